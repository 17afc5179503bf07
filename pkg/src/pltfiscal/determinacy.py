"""Analytic determinacy predicates and regime maps.

The predicates use only closed-form eigenvalues (flexible-price model) or the
determinant/trace/principal-minor summaries of the 3x3 block of the
sticky-price model, never the numerical solver.  :func:`sweep` evaluates both
routes on a grid and flags disagreements.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .model import ModelParams, build_leeper, build_nk
from .solver import Verdict, classify, verdict_from_counts

BAND = 1e-6


class Stance(str, enum.Enum):
    ACTIVE = "Active"
    PASSIVE = "Passive"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class RegimeVerdict:
    monetary: Stance | None
    fiscal: Stance | None
    verdict: Verdict
    # distance of the closest analytic root modulus from one
    margin: float = math.inf
    notes: tuple[str, ...] = field(default=())

    @property
    def label(self) -> str:
        if self.verdict is Verdict.DETERMINATE:
            return f"{self.verdict} ({regime_label(self.monetary, self.fiscal)})"
        return str(self.verdict)


def regime_label(monetary: Stance | None, fiscal: Stance | None) -> str:
    if monetary is None or fiscal is None:
        return "?"
    return f"{'AM' if monetary is Stance.ACTIVE else 'PM'}/{'AF' if fiscal is Stance.ACTIVE else 'PF'}"


def _stance(modulus: float) -> Stance:
    return Stance.ACTIVE if modulus > 1.0 else Stance.PASSIVE


def _pairing(monetary: Stance, fiscal: Stance) -> Verdict:
    if monetary is not fiscal:
        return Verdict.DETERMINATE
    if monetary is Stance.PASSIVE:
        return Verdict.INDETERMINATE
    return Verdict.NO_STABLE_SOLUTION


def leeper_predicate(phi_p: float, gamma: float, beta: float,
                     pi_ss: float = 1.0, band: float = BAND) -> RegimeVerdict:
    """Regime of the flexible-price model under strict PLT.

    The roots are ``0``, ``1/beta - gamma`` (fiscal) and
    ``1 + beta phi_p / pi`` (monetary).  Monetary policy is active when the
    latter lies outside the unit circle, which for ``phi_p > -2 pi / beta``
    is the sign condition ``phi_p > 0``.
    """
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must lie in (0, 1)")
    fiscal_root = abs(1.0 / beta - gamma)
    monetary_root = abs(1.0 + beta * phi_p / pi_ss)
    margin = min(abs(fiscal_root - 1.0), abs(monetary_root - 1.0))
    notes = ()
    if phi_p < -2.0 * pi_ss / beta:
        notes = ("phi_p below -2 pi/beta: monetary root is outside the unit circle",)
    if margin <= band:
        return RegimeVerdict(None, None, Verdict.BOUNDARY, margin, notes)
    monetary, fiscal = _stance(monetary_root), _stance(fiscal_root)
    return RegimeVerdict(monetary, fiscal, _pairing(monetary, fiscal), margin, notes)


def leeper_it_predicate(phi_pi: float, gamma: float, beta: float,
                        pi_ss: float = 1.0, band: float = BAND) -> RegimeVerdict:
    """Strict IT counterpart: the monetary root is ``beta phi_pi / pi``."""
    fiscal_root = abs(1.0 / beta - gamma)
    monetary_root = abs(beta * phi_pi / pi_ss)
    margin = min(abs(fiscal_root - 1.0), abs(monetary_root - 1.0))
    if margin <= band:
        return RegimeVerdict(None, None, Verdict.BOUNDARY, margin)
    monetary, fiscal = _stance(monetary_root), _stance(fiscal_root)
    return RegimeVerdict(monetary, fiscal, _pairing(monetary, fiscal), margin)


class WoodfordCount(NamedTuple):
    n_outside: int | None
    case: str | None


def woodford_case(det: float, trace: float, minors: float,
                  tol: float = BAND) -> WoodfordCount:
    """Roots of a real 3x3 matrix outside the unit circle from its summaries.

    The three inequality sets (cases 1-3) each characterize exactly two roots
    outside and one inside.  When none holds the count comes from the roots
    of ``x^3 - trace x^2 + minors x - det``.  A root within ``tol`` of the
    unit circle gives ``n_outside=None``.
    """
    # c1 and c2 are the characteristic polynomial at +1 and -1
    c1 = 1 - trace + minors - det
    c2 = -1 - trace - minors - det
    c3 = det ** 2 - det * trace + minors - 1
    roots = np.roots([1.0, -trace, minors, -det])
    mod = np.abs(roots)
    if abs(c1) <= tol or abs(c2) <= tol or np.any(np.abs(mod - 1.0) <= tol):
        return WoodfordCount(None, None)

    if c1 < 0 and c2 > 0:
        return WoodfordCount(2, "case1")
    if c1 > 0 and c2 < 0 and c3 > 0:
        return WoodfordCount(2, "case2")
    if c1 > 0 and c2 < 0 and c3 < 0 and abs(trace) > 3:
        return WoodfordCount(2, "case3")
    return WoodfordCount(int(np.sum(mod > 1.0)), None)


def nk_summaries(phi_p: float, beta: float, kappa: float) -> tuple[float, float, float]:
    """(det, trace, sum of principal minors) of the 3x3 output/inflation/rate block."""
    return (1.0 / beta,
            2.0 + 1.0 / beta + kappa / beta,
            (2.0 + kappa + beta + kappa * phi_p) / beta)


def nk_inverse_summaries(phi_p: float, beta: float, kappa: float) -> tuple[float, float, float]:
    """Summaries of the inverse of the same block."""
    return (beta,
            kappa + beta + kappa * phi_p + 2.0,
            2.0 * beta + 1.0 + kappa)


def nk_predicate(phi_p: float, gamma: float, beta: float, tau_over_b: float,
                 kappa: float, band: float = BAND) -> RegimeVerdict:
    """Regime of the sticky-price model under strict PLT.

    Fiscal policy is passive when the debt root ``(1 - gamma tau/b)/beta``
    lies inside the unit circle, i.e. for
    ``(b/tau)(1 - beta) < gamma < (b/tau)(1 + beta)``.  Monetary policy is
    active when the 3x3 block has two roots outside the unit circle
    (``phi_p > 0`` on the usual range).  Disagreements with the one-sided
    fiscal threshold ``gamma < (b/tau)(1 + beta)`` are recorded in ``notes``.
    """
    if kappa <= 0 or tau_over_b <= 0:
        raise ValueError("kappa and tau_over_b must be positive")
    debt_root = abs(-(tau_over_b * gamma - 1.0) / beta)
    det, trace, minors = nk_summaries(phi_p, beta, kappa)
    block = woodford_case(det, trace, minors, tol=band)
    roots = np.roots([1.0, -trace, minors, -det])
    margin = float(min(abs(debt_root - 1.0), np.min(np.abs(np.abs(roots) - 1.0))))

    notes = []
    one_sided = Stance.PASSIVE if gamma < (1.0 + beta) / tau_over_b else Stance.ACTIVE
    if abs(debt_root - 1.0) > band and one_sided is not _stance(debt_root):
        notes.append(f"fiscal stance {one_sided} by the one-sided gamma threshold, "
                     f"{_stance(debt_root)} by the debt root")
    if block.case is not None:
        notes.append(f"two outside roots via {block.case}")

    if abs(debt_root - 1.0) <= band or block.n_outside is None:
        return RegimeVerdict(None, None, Verdict.BOUNDARY, margin, tuple(notes))
    monetary = Stance.ACTIVE if block.n_outside >= 2 else Stance.PASSIVE
    fiscal = _stance(debt_root)
    n_unstable = block.n_outside + (1 if fiscal is Stance.ACTIVE else 0)
    verdict = verdict_from_counts(n_unstable, 2)
    return RegimeVerdict(monetary, fiscal, verdict, margin, tuple(notes))


VERDICT_CODES = {Verdict.DETERMINATE: 0, Verdict.INDETERMINATE: 1,
                 Verdict.NO_STABLE_SOLUTION: 2, Verdict.BOUNDARY: 3}


@dataclass
class RegimeMap:
    model_kind: str
    rule: str
    coef_name: str
    coef_grid: np.ndarray
    gamma_grid: np.ndarray
    analytic: np.ndarray      # verdict codes, shape (len(coef), len(gamma))
    numerical: np.ndarray
    margin: np.ndarray
    labels: np.ndarray        # regime labels of the analytic route

    @property
    def disagreement(self) -> np.ndarray:
        return self.analytic != self.numerical

    def disagreements(self, band: float = 0.0) -> int:
        """Disagreeing cells whose analytic margin exceeds ``band``."""
        return int(np.sum(self.disagreement & (self.margin > band)))

    def to_dict(self) -> dict:
        return {
            "model": self.model_kind,
            "rule": self.rule,
            "axes": {self.coef_name: [_g(v) for v in self.coef_grid],
                     "gamma": [_g(v) for v in self.gamma_grid]},
            "codes": {v.value: c for v, c in VERDICT_CODES.items()},
            "analytic": self.analytic.tolist(),
            "numerical": self.numerical.tolist(),
            "regime": self.labels.tolist(),
            "disagreement": self.disagreement.astype(int).tolist(),
            "n_disagreements": int(self.disagreement.sum()),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def _g(x: float) -> float:
    return float(f"{x:.12g}")


def sweep(model_kind: str, coef_grid, gamma_grid,
          params: ModelParams | None = None) -> RegimeMap:
    """Analytic and numerical verdicts over a (phi_p, gamma) grid under strict PLT."""
    params = (params or ModelParams()).with_rule("plt")
    coef_grid = np.asarray(coef_grid, dtype=float)
    gamma_grid = np.asarray(gamma_grid, dtype=float)
    shape = (coef_grid.size, gamma_grid.size)
    analytic = np.empty(shape, dtype=int)
    numerical = np.empty(shape, dtype=int)
    margin = np.empty(shape)
    labels = np.empty(shape, dtype=object)

    for i, phi_p in enumerate(coef_grid):
        for k, gamma in enumerate(gamma_grid):
            p = params.replace(phi_p=float(phi_p), gamma=float(gamma))
            if model_kind == "leeper":
                rv = leeper_predicate(p.phi_p, p.gamma, p.beta, p.pi_ss)
                model = build_leeper(p)
            elif model_kind == "nk":
                rv = nk_predicate(p.phi_p, p.gamma, p.beta, p.tau_over_b, p.kappa)
                model = build_nk(p)
            else:
                raise ValueError(f"unknown model kind {model_kind!r}")
            analytic[i, k] = VERDICT_CODES[rv.verdict]
            numerical[i, k] = VERDICT_CODES[classify(model).verdict]
            margin[i, k] = rv.margin
            labels[i, k] = rv.label
    return RegimeMap(model_kind, "plt", "phi_p", coef_grid, gamma_grid,
                     analytic, numerical, margin, labels)


def fiscal_stance(params: ModelParams, model_kind: str, band: float = BAND) -> Stance | None:
    """Fiscal stance from the debt root of either economy."""
    if model_kind == "leeper":
        root = abs(1.0 / params.beta - params.gamma)
    elif model_kind == "nk":
        root = abs((1.0 - params.tau_over_b * params.gamma) / params.beta)
    else:
        raise ValueError(f"unknown model kind {model_kind!r}")
    if abs(root - 1.0) <= band:
        return None
    return _stance(root)


def regime_tag(params: ModelParams, model_kind: str, verdict: Verdict) -> str:
    """``AM/PF`` or ``PM/AF`` for a determinate model, else the verdict.

    A determinate equilibrium pairs opposite stances, so the fiscal root
    fixes the label whatever the monetary rule.
    """
    if verdict is not Verdict.DETERMINATE:
        return str(verdict)
    fiscal = fiscal_stance(params, model_kind)
    if fiscal is None:
        return "?"
    monetary = Stance.PASSIVE if fiscal is Stance.ACTIVE else Stance.ACTIVE
    return regime_label(monetary, fiscal)
