"""Blanchard-Kahn eigen-decoupling for :class:`~pltfiscal.model.LinearREModel`.

Unstable eigen-directions are solved forward in closed form: for a left
eigenvector ``w`` with eigenvalue ``lam`` and exogenous law ``z' = Phi z``,

    w X_t = -sum_k lam^(-k-1) w B S Phi^k z_t = -w B S (lam I - Phi)^(-1) z_t,

which pins the jump variables down as linear functions of the predetermined
states and the exogenous state.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .model import LinearREModel

UNIT_TOL = 1e-8
COND_LIMIT = 1e10
IMAG_TOL = 1e-10


class Verdict(str, enum.Enum):
    DETERMINATE = "Determinate"
    INDETERMINATE = "Indeterminate"
    NO_STABLE_SOLUTION = "NoStableSolution"
    BOUNDARY = "Boundary"

    def __str__(self):
        return self.value


class SolverError(RuntimeError):
    """Base class for solver failures."""


class DecompositionError(SolverError):
    """The eigen decomposition failed or is numerically unusable."""


class NotDeterminateError(SolverError):
    def __init__(self, classification: "Classification"):
        self.classification = classification
        super().__init__(
            f"model is not determinate: {classification.verdict} "
            f"({classification.n_unstable} unstable roots for "
            f"{classification.n_jumps} jump variables)")


@dataclass(frozen=True, eq=False)
class Classification:
    verdict: Verdict
    eigenvalues: np.ndarray
    n_unstable: int
    n_jumps: int
    n_boundary: int = 0

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.eigenvalues)

    @property
    def is_determinate(self) -> bool:
        return self.verdict is Verdict.DETERMINATE

    def table(self) -> list[dict]:
        rows = []
        for lam in self.eigenvalues:
            rows.append({"real": float(lam.real), "imag": float(lam.imag),
                         "modulus": float(abs(lam))})
        return rows


def _eigvals(A: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(A)):
        raise DecompositionError("transition matrix has non-finite entries")
    try:
        lam = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"eigenvalue computation failed: {exc}") from exc
    if not np.all(np.isfinite(lam)):
        raise DecompositionError("eigenvalue computation returned non-finite values")
    return lam


def verdict_from_counts(n_unstable: int, n_jumps: int) -> Verdict:
    if n_unstable == n_jumps:
        return Verdict.DETERMINATE
    if n_unstable < n_jumps:
        return Verdict.INDETERMINATE
    return Verdict.NO_STABLE_SOLUTION


def classify(model: LinearREModel, tol: float = UNIT_TOL) -> Classification:
    """Count roots outside the unit circle against the number of jumps.

    A root whose modulus is within ``tol`` of one makes the verdict
    ``Boundary``.
    """
    lam = _eigvals(model.A)
    lam = lam[np.argsort(np.abs(lam), kind="stable")]
    mod = np.abs(lam)
    n_boundary = int(np.sum(np.abs(mod - 1.0) <= tol))
    n_unstable = int(np.sum(mod > 1.0 + tol))
    if n_boundary:
        verdict = Verdict.BOUNDARY
    else:
        verdict = verdict_from_counts(n_unstable, model.n_jumps)
    return Classification(verdict, lam, n_unstable, model.n_jumps, n_boundary)


@dataclass(frozen=True, eq=False)
class Solution:
    """Decoupled solution.

    The state vector ``xi_t`` stacks the predetermined values determined in
    period ``t`` (``R_t``, ``b_t``, ...) and the exogenous state ``z_t``:

        xi_t = T xi_{t-1} + R nu_t
        jumps_t = jump_state xi_{t-1} + jump_shock nu_t

    The same policy in period-``t`` form is kept in ``jump_states`` /
    ``jump_exo`` (jumps on ``s_t`` and ``z_t``) and ``state_states`` /
    ``state_exo`` (next predetermined block).
    """

    model: LinearREModel
    classification: Classification
    T: np.ndarray
    R: np.ndarray
    state_names: tuple[str, ...]
    shock_names: tuple[str, ...]
    jump_names: tuple[str, ...]
    jump_state: np.ndarray
    jump_shock: np.ndarray
    jump_states: np.ndarray
    jump_exo: np.ndarray
    state_states: np.ndarray
    state_exo: np.ndarray

    @property
    def n_endogenous_states(self) -> int:
        return self.model.n_predetermined

    def jump_policy(self, name: str) -> dict[str, float]:
        """Coefficients of one jump variable on the predetermined and
        exogenous states of the same period."""
        i = self.jump_names.index(name)
        out = {}
        for k, s in enumerate(self.model.predetermined_names):
            out[s] = float(self.jump_states[i, k])
        for k, z in enumerate(self.model.process.state_names):
            out[z] = float(self.jump_exo[i, k])
        return out


def _current_name(name: str) -> str:
    return name[:-4] if name.endswith("_lag") else name


def _as_real(M: np.ndarray, what: str) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    if M.size and np.max(np.abs(M.imag)) > IMAG_TOL * scale:
        raise DecompositionError(f"{what} has a non-negligible imaginary part")
    return np.ascontiguousarray(M.real)


def solve(model: LinearREModel, tol: float = UNIT_TOL,
          cond_limit: float = COND_LIMIT) -> Solution:
    """Solve a determinate model by eigen-decoupling."""
    if np.any(model.const != 0.0):
        raise ValueError("solve() handles models without intercepts only")
    cls = classify(model, tol)
    if not cls.is_determinate:
        raise NotDeterminateError(cls)

    A = model.A
    try:
        lam, V = np.linalg.eig(A)
        cond = np.linalg.cond(V)
        if not np.isfinite(cond) or cond > cond_limit:
            raise DecompositionError(
                f"eigenvector matrix is near-defective (condition number {cond:.3g})")
        W = np.linalg.inv(V)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"eigen decomposition failed: {exc}") from exc

    nj = model.n_jumps
    proc = model.process
    Phi, S, Gamma = proc.transition, proc.loading, proc.impact
    nz = Phi.shape[0]
    BS = model.B @ S

    unstable = np.abs(lam) > 1.0 + tol
    Wu = W[unstable]
    lam_u = lam[unstable]

    if nj:
        # forward solution of each unstable combination on the exogenous state
        M = np.empty((nj, nz), dtype=complex)
        eye = np.eye(nz)
        for i, (w, lu) in enumerate(zip(Wu, lam_u)):
            M[i] = -np.linalg.solve((lu * eye - Phi).T, w @ BS)
        Wj, Ws = Wu[:, :nj], Wu[:, nj:]
        try:
            F_s = -np.linalg.solve(Wj, Ws)
            F_z = np.linalg.solve(Wj, M)
        except np.linalg.LinAlgError as exc:
            raise DecompositionError(
                "unstable eigenvectors do not load on the jump variables") from exc
        F_s = _as_real(F_s, "jump policy")
        F_z = _as_real(F_z, "jump policy")
    else:
        F_s = np.zeros((0, model.n_predetermined))
        F_z = np.zeros((0, nz))

    A_sj, A_ss = A[nj:, :nj], A[nj:, nj:]
    G_s = A_ss + A_sj @ F_s
    G_z = A_sj @ F_z + BS[nj:]

    ns = model.n_predetermined
    T = np.zeros((ns + nz, ns + nz))
    T[:ns, :ns] = G_s
    T[:ns, ns:] = G_z @ Phi
    T[ns:, ns:] = Phi
    R = np.vstack([G_z @ Gamma, Gamma])
    jump_state = np.hstack([F_s, F_z @ Phi])
    jump_shock = F_z @ Gamma

    state_names = tuple(_current_name(s) for s in model.predetermined_names) + proc.state_names
    return Solution(
        model=model,
        classification=cls,
        T=T,
        R=R,
        state_names=state_names,
        shock_names=proc.innovation_names,
        jump_names=model.jump_names,
        jump_state=jump_state,
        jump_shock=jump_shock,
        jump_states=F_s,
        jump_exo=F_z,
        state_states=G_s,
        state_exo=G_z,
    )


def expectation_residual(solution: Solution, s: np.ndarray, z: np.ndarray) -> np.ndarray:
    """``E_t X_{t+1} - A X_t - B e_t`` implied by the policy at ``(s_t, z_t)``."""
    model = solution.model
    Phi, S = model.process.transition, model.process.loading
    j = solution.jump_states @ s + solution.jump_exo @ z
    x = np.concatenate([j, s])
    s_next = solution.state_states @ s + solution.state_exo @ z
    z_next = Phi @ z
    j_next = solution.jump_states @ s_next + solution.jump_exo @ z_next
    x_next = np.concatenate([j_next, s_next])
    return x_next - model.A @ x - model.B @ (S @ z)
