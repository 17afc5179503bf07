"""Parameters, policy rules and the two linearized economies.

Both builders return a :class:`LinearREModel` in the canonical form

    E_t X_{t+1} = A X_t + B e_t + c

with jump variables listed first and predetermined variables last.  A
predetermined entry named ``"<v>_lag"`` holds ``v_{t-1}``, so the row for it
in ``A`` is the law that determines ``v_t``.

The shock vector ``e_t`` is a linear function of an exogenous state ``z_t``
(``e_t = S z_t``) that evolves as ``z_{t+1} = Phi z_t + Gamma nu_{t+1}``;
see :class:`ShockProcess`.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

Scaling = Literal["level", "log"]
RuleKind = Literal["it", "plt", "general"]

STEADY_STATE_TOL = 1e-12

#: Reference parameterizations of the two determinate policy mixes.
MONETARY_LED = {"phi_pi": 1.2, "phi_p": 1.2, "gamma": 0.2}
FISCALLY_LED = {"phi_pi": 0.9, "phi_p": -0.1, "gamma": 0.0}


@dataclass(frozen=True)
class ModelParams:
    """Structural, policy and shock-process parameters of both economies.

    ``R_ss`` and ``m_ss`` default to the values implied by the Leeper steady
    state (``R = pi/beta`` and ``m = c R / (R - 1)``).  Passing them explicitly
    is allowed; :func:`build_leeper` rejects inconsistent combinations.
    """

    beta: float = 0.99
    pi_ss: float = 1.0
    R_ss: float | None = None
    c_ss: float = 1.0
    b_ss: float = 0.4
    m_ss: float | None = None
    tau_ss: float = 0.1
    kappa: float = 0.1
    phi_p: float = 1.2
    phi_pi: float = 1.2
    delta: float = 0.0
    gamma: float = 0.2
    rho_theta: float = 0.5
    rho_psi: float = 0.5
    rho_eps: float = 0.5
    weights: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")
        if self.R_ss is None:
            object.__setattr__(self, "R_ss", self.pi_ss / self.beta)
        if self.m_ss is None:
            R = self.R_ss
            m = self.c_ss * R / (R - 1.0) if R != 1.0 else math.inf
            object.__setattr__(self, "m_ss", m)
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))

        if self.pi_ss < 1.0:
            raise ValueError(f"pi_ss must be >= 1, got {self.pi_ss}")
        if self.kappa <= 0.0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must lie in [0, 1], got {self.delta}")
        if self.gamma < 0.0:
            raise ValueError(f"gamma must be nonnegative, got {self.gamma}")
        for name in ("rho_theta", "rho_psi", "rho_eps"):
            rho = getattr(self, name)
            if not 0.0 <= rho < 1.0:
                raise ValueError(f"{name} must lie in [0, 1), got {rho}")
        if len(self.weights) != 3 or any(w < 0 for w in self.weights):
            raise ValueError(f"weights must be three nonnegative numbers, got {self.weights}")
        for name in ("beta", "pi_ss", "R_ss", "c_ss", "b_ss", "tau_ss", "kappa",
                     "phi_p", "phi_pi", "delta", "gamma"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def tau_over_b(self) -> float:
        return self.tau_ss / self.b_ss

    def leeper_residuals(self) -> tuple[float, float]:
        """Residuals of ``R beta = pi`` and ``m (R - 1) = c R``."""
        return (self.R_ss * self.beta - self.pi_ss,
                self.m_ss * (self.R_ss - 1.0) - self.c_ss * self.R_ss)

    def replace(self, **changes) -> "ModelParams":
        """Copy with ``changes`` applied; derived steady states are recomputed
        unless given explicitly."""
        if {"beta", "pi_ss", "c_ss"} & changes.keys():
            changes.setdefault("R_ss", None)
            changes.setdefault("m_ss", None)
        elif "R_ss" in changes:
            changes.setdefault("m_ss", None)
        return dataclasses.replace(self, **changes)

    def with_rule(self, kind: RuleKind) -> "ModelParams":
        """Apply the polar restriction of a rule family.

        ``"it"`` zeroes the price-level coefficient and inertia, ``"plt"``
        zeroes the inflation coefficient and sets unit inertia, ``"general"``
        leaves the coefficients untouched.
        """
        if kind == "it":
            return self.replace(phi_p=0.0, delta=0.0)
        if kind == "plt":
            return self.replace(phi_pi=0.0, delta=1.0)
        if kind == "general":
            return self
        raise ValueError(f"unknown rule kind {kind!r}")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class RuleCoeffs:
    """Quasi-differenced interest-rate rule

    ``R_t = c_pi pi_t + c_pi_lag pi_{t-1} + c_R_lag R_{t-1}
    + c_theta theta_t + c_theta_lag theta_{t-1}``.
    """

    c_pi: float
    c_pi_lag: float
    c_R_lag: float
    c_theta: float = 1.0
    c_theta_lag: float = 0.0

    @property
    def kind(self) -> str:
        if self.c_R_lag == 0.0 and self.c_pi_lag == 0.0:
            return "it"
        if self.c_R_lag == 1.0 and self.c_pi_lag == 0.0:
            return "plt"
        return "general"


def make_rule(phi_p: float, phi_pi: float, delta: float,
              scaling: Scaling = "level", pi_ss: float = 1.0) -> RuleCoeffs:
    """Quasi-difference the price-level/inflation rule.

    ``scaling="level"`` divides the inflation terms by steady-state gross
    inflation (linearized, not log-linearized, variables); ``"log"`` does not.
    """
    if scaling == "level":
        s = 1.0 / pi_ss
    elif scaling == "log":
        s = 1.0
    else:
        raise ValueError(f"scaling must be 'level' or 'log', got {scaling!r}")
    return RuleCoeffs(
        c_pi=(phi_p + phi_pi) * s,
        c_pi_lag=-delta * phi_pi * s,
        c_R_lag=float(delta),
        c_theta=1.0,
        c_theta_lag=-float(delta),
    )


@dataclass(frozen=True)
class ShockProcess:
    """Exogenous driving block.

    ``z_{t+1} = transition @ z_t + impact @ nu_{t+1}`` and the model's shock
    vector is ``e_t = loading @ z_t``.
    """

    state_names: tuple[str, ...]
    innovation_names: tuple[str, ...]
    transition: np.ndarray
    loading: np.ndarray
    impact: np.ndarray

    @classmethod
    def white_noise(cls, shock_names) -> "ShockProcess":
        n = len(shock_names)
        return cls(tuple(shock_names), tuple(shock_names), np.zeros((n, n)),
                   np.eye(n), np.eye(n))


@dataclass(frozen=True, eq=False)
class LinearREModel:
    A: np.ndarray
    B: np.ndarray
    var_names: tuple[str, ...]
    shock_names: tuple[str, ...]
    n_predetermined: int
    process: ShockProcess | None = None
    const: np.ndarray | None = None
    kind: str = "generic"
    rule: str = "general"
    # Output scaling for derived series: the inflation rate's units in the
    # price level (steady-state gross inflation for level deviations) and the
    # coefficient on next-period inflation in the real-rate definition.
    inflation_scale: float = 1.0
    fisher_slope: float = 1.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        B = np.asarray(self.B, dtype=float)
        if B.ndim == 1:
            B = B.reshape(-1, 1)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        n = A.shape[0]
        if A.ndim != 2 or A.shape[1] != n:
            raise ValueError(f"A must be square, got shape {A.shape}")
        if B.shape[0] != n:
            raise ValueError(f"B has {B.shape[0]} rows, expected {n}")
        if len(self.var_names) != n or len(set(self.var_names)) != n:
            raise ValueError("var_names must be unique and match the dimension of A")
        if len(self.shock_names) != B.shape[1] or len(set(self.shock_names)) != B.shape[1]:
            raise ValueError("shock_names must be unique and match the columns of B")
        if not 0 <= self.n_predetermined <= n:
            raise ValueError(f"n_predetermined must lie in [0, {n}]")
        if self.process is None:
            object.__setattr__(self, "process", ShockProcess.white_noise(self.shock_names))
        elif self.process.loading.shape != (B.shape[1], len(self.process.state_names)):
            raise ValueError("shock process loading does not match the shock vector")
        c = np.zeros(n) if self.const is None else np.asarray(self.const, dtype=float)
        if c.shape != (n,):
            raise ValueError("const must have one entry per variable")
        object.__setattr__(self, "const", c)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def n_jumps(self) -> int:
        return self.n - self.n_predetermined

    @property
    def jump_names(self) -> tuple[str, ...]:
        return self.var_names[:self.n_jumps]

    @property
    def predetermined_names(self) -> tuple[str, ...]:
        return self.var_names[self.n_jumps:]

    def index(self, name: str) -> int:
        return self.var_names.index(name)


def check_leeper_steady_state(params: ModelParams, tol: float = STEADY_STATE_TOL) -> None:
    r1, r2 = params.leeper_residuals()
    scale = max(1.0, abs(params.m_ss), abs(params.c_ss * params.R_ss))
    if abs(r1) > tol or abs(r2) > tol * scale:
        raise ValueError(
            f"Leeper steady state is inconsistent: R*beta - pi = {r1:.3g}, "
            f"m*(R-1) - c*R = {r2:.3g}")
    if params.R_ss == 1.0:
        raise ValueError("R_ss = 1 makes money demand singular")


def leeper_rule_kind(params: ModelParams) -> str:
    if params.delta == 1.0 and params.phi_pi == 0.0:
        return "plt"
    if params.delta == 0.0 and params.phi_p == 0.0:
        return "it"
    raise ValueError(
        "the flexible-price model supports only strict PLT (delta=1, phi_pi=0) "
        f"or strict IT (delta=0, phi_p=0); got delta={params.delta}, "
        f"phi_p={params.phi_p}, phi_pi={params.phi_pi}")


def _theta_process(rule: RuleCoeffs, rho_theta: float, others: list[tuple[str, float]],
                   monetary_pos: int):
    """Exogenous block with (theta, theta_lag) plus independent AR(1) shocks.

    ``others`` lists (name, rho) for the remaining shocks in shock-vector
    order; the monetary column sits at ``monetary_pos``.
    """
    names = []
    for name, _ in others[:monetary_pos]:
        names.append(name)
    names += ["theta", "theta_lag"]
    for name, _ in others[monetary_pos:]:
        names.append(name)
    nz = len(names)
    rhos = dict(others)
    Phi = np.zeros((nz, nz))
    for i, name in enumerate(names):
        if name == "theta":
            Phi[i, i] = rho_theta
        elif name == "theta_lag":
            Phi[i, names.index("theta")] = 1.0
        else:
            Phi[i, i] = rhos[name]

    innov = [n for n in names if n != "theta_lag"]
    Gamma = np.zeros((nz, len(innov)))
    for k, name in enumerate(innov):
        Gamma[names.index(name), k] = 1.0

    ne = len(others) + 1
    S = np.zeros((ne, nz))
    col = 0
    for k in range(ne):
        if k == monetary_pos:
            S[k, names.index("theta")] = rule.c_theta
            S[k, names.index("theta_lag")] = rule.c_theta_lag
        else:
            S[k, names.index(others[col][0])] = 1.0
            col += 1
    return ShockProcess(tuple(names), tuple(innov), Phi, S, Gamma)


def build_leeper(params: ModelParams) -> LinearREModel:
    """Flexible-price model over ``(pi, R_lag, b_lag)``.

    Money and taxes are substituted out of the budget constraint.  The rule
    must be strict PLT or strict IT (see :meth:`ModelParams.with_rule`).
    """
    check_leeper_steady_state(params)
    kind = leeper_rule_kind(params)
    beta, pi, R = params.beta, params.pi_ss, params.R_ss
    c, b, m, gamma = params.c_ss, params.b_ss, params.m_ss, params.gamma
    rule = make_rule(params.phi_p, params.phi_pi, params.delta, "level", pi)

    # money demand slope and the inflation-tax coefficient of the budget constraint
    mu = c / (R - 1.0) ** 2
    infl = (m + b * R) / pi ** 2

    rate = np.array([rule.c_pi, rule.c_R_lag, 0.0])
    A = np.zeros((3, 3))
    A[0] = beta * rate
    A[1] = rate
    A[2] = mu * rate + np.array([-infl, b / pi - mu / pi, R / pi - gamma])
    B = np.array([[beta, 0.0],
                  [1.0, 0.0],
                  [mu, -1.0]])

    shock_names = ("dtheta", "psi") if kind == "plt" else ("theta", "psi")
    process = _theta_process(rule, params.rho_theta, [("psi", params.rho_psi)], 0)
    return LinearREModel(
        A=A, B=B,
        var_names=("pi", "R_lag", "b_lag"),
        shock_names=shock_names,
        n_predetermined=2,
        process=process,
        kind="leeper",
        rule=kind,
        inflation_scale=pi,
        fisher_slope=1.0 / beta,
        meta={"params": params},
    )


def build_nk(params: ModelParams, rule: RuleCoeffs | None = None,
             rate_peg: float | None = None) -> LinearREModel:
    """Sticky-price model over ``(y, pi, R_lag, b_lag)``.

    A ``pi_lag`` state is appended when the rule responds to lagged inflation.
    With ``rate_peg`` the rule is replaced by ``R_t = rate_peg`` (the
    constrained regime of the lower-bound experiment); the layout is kept
    identical to the unconstrained model.
    """
    if params.kappa <= 0:
        raise ValueError("kappa must be positive")
    if params.tau_ss <= 0 or params.b_ss <= 0:
        raise ValueError("tau_ss and b_ss must be positive")
    if rule is None:
        rule = make_rule(params.phi_p, params.phi_pi, params.delta, "log")
    beta, kappa = params.beta, params.kappa
    tb = params.tau_over_b
    debt_root = (1.0 - tb * params.gamma) / beta

    names = ["y", "pi", "R_lag", "b_lag"]
    if rule.c_pi_lag != 0.0:
        names.append("pi_lag")
    n = len(names)
    iy, ipi, iR, ib = 0, 1, 2, 3

    # R_t = rate @ X_t + m_t (+ peg)
    rate = np.zeros(n)
    rate_shock = np.zeros(3)
    rate_const = 0.0
    if rate_peg is None:
        rate[ipi] = rule.c_pi
        rate[iR] = rule.c_R_lag
        if rule.c_pi_lag != 0.0:
            rate[4] = rule.c_pi_lag
        rate_shock[1] = 1.0
    else:
        rate_const = float(rate_peg)

    A = np.zeros((n, n))
    B = np.zeros((n, 3))
    c = np.zeros(n)

    A[iy, iy] = 1.0 + kappa / beta
    A[iy, ipi] = -1.0 / beta
    A[iy] += rate
    B[iy] = rate_shock + np.array([-(1.0 - params.rho_eps), 0.0, 0.0])
    c[iy] = rate_const

    A[ipi, iy] = -kappa / beta
    A[ipi, ipi] = 1.0 / beta

    A[iR] = rate
    B[iR] = rate_shock
    c[iR] = rate_const

    A[ib] = rate
    A[ib, ipi] += -1.0 / beta
    A[ib, ib] += debt_root
    B[ib] = rate_shock + np.array([0.0, 0.0, -tb / beta])
    c[ib] = rate_const

    if n == 5:
        A[4, ipi] = 1.0

    process = _theta_process(rule, params.rho_theta,
                             [("eps", params.rho_eps), ("psi", params.rho_psi)], 1)
    return LinearREModel(
        A=A, B=B,
        var_names=tuple(names),
        shock_names=("eps", "theta", "psi"),
        n_predetermined=n - 2,
        process=process,
        const=c,
        kind="nk",
        rule=rule.kind,
        meta={"params": params, "rule": rule, "rate": rate, "rate_shock": rate_shock,
              "rate_peg": rate_peg},
    )


def nk_contemporaneous_matrix(params: ModelParams) -> np.ndarray:
    """Transition over the contemporaneous vector ``(y_t, pi_t, R_t, b_t)``
    under strict PLT, obtained by inverting the structural lead matrix.

    Forecast errors are disregarded in this representation, so it is meant
    for eigenvalue analysis; :func:`build_nk` is the solvable form.
    """
    beta, kappa, phi = params.beta, params.kappa, params.phi_p
    tb = params.tau_over_b
    lead = np.array([[-1.0, -1.0, 0.0, 0.0],
                     [0.0, -beta, 0.0, 0.0],
                     [0.0, -phi, 1.0, 0.0],
                     [0.0, 1.0 / beta, -1.0, 1.0]])
    lag = np.array([[-1.0, 0.0, -1.0, 0.0],
                    [kappa, -1.0, 0.0, 0.0],
                    [0.0, 0.0, 1.0, 0.0],
                    [0.0, 0.0, 0.0, (1.0 - tb * params.gamma) / beta]])
    return np.linalg.solve(lead, lag)


def nk_debt_root(params: ModelParams) -> float:
    """Eigenvalue attached to real debt, ``(1 - gamma tau/b) / beta``."""
    return (1.0 - params.tau_over_b * params.gamma) / params.beta
