"""Impulse responses, the lower-bound experiment and welfare losses."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.linalg import solve_discrete_lyapunov

from .determinacy import regime_tag
from .model import LinearREModel, ModelParams, RuleCoeffs, build_nk, make_rule
from .solver import Solution, Verdict, classify, solve

ShockName = Literal["demand", "monetary", "fiscal"]

#: innovation label of each named shock
SHOCK_INNOVATION = {"demand": "eps", "monetary": "theta", "fiscal": "psi"}
_PERSISTENCE_FIELD = {"demand": "rho_eps", "monetary": "rho_theta", "fiscal": "rho_psi"}

WELFARE_HORIZON = 500
# demand innovation large enough for the lower bound to matter
ZLB_DEMAND_SIZE = 0.08


class HorizonTooShortError(RuntimeError):
    """The lower bound still binds at the last simulated date."""


class ZLBConvergenceError(RuntimeError):
    """Guess-and-verify iterations did not settle on a binding window."""


@dataclass(frozen=True)
class ShockSpec:
    name: ShockName
    size: float = 0.01
    sign: int = -1
    # AR(1) persistence; None defers to the model parameters
    persistence: float | None = None

    def __post_init__(self):
        if self.name not in SHOCK_INNOVATION:
            raise ValueError(f"unknown shock {self.name!r}")
        if not math.isfinite(self.size):
            raise ValueError("shock size must be finite")
        if self.sign not in (-1, 1):
            raise ValueError("sign must be +1 or -1")
        if self.persistence is not None and not 0.0 <= self.persistence < 1.0:
            raise ValueError("persistence must lie in [0, 1)")

    @property
    def innovation(self) -> float:
        return self.sign * self.size

    def apply_to(self, params: ModelParams) -> ModelParams:
        """Parameters with this shock's persistence, if one is set."""
        if self.persistence is None:
            return params
        return params.replace(**{_PERSISTENCE_FIELD[self.name]: self.persistence})


@dataclass(frozen=True, eq=False)
class Continuation:
    """Linear law for extending a path beyond its last period.

    ``x_t = loadings[name] @ T^(t-H) state`` for ``t >= H``.
    """

    T: np.ndarray
    loadings: dict
    state: np.ndarray


@dataclass(eq=False)
class IRFSeries:
    horizon: int
    paths: dict
    shock: ShockSpec
    regime: str = ""
    rule: str = ""
    binding: np.ndarray | None = None
    continuation: Continuation | None = None
    meta: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.paths[name]

    @property
    def binding_window(self) -> list[int]:
        if self.binding is None:
            return []
        return [int(t) for t in np.flatnonzero(self.binding)]

    def columns(self) -> list[str]:
        cols = list(self.paths)
        if self.binding is not None:
            cols.append("binding")
        return cols

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        cols = self.columns()
        writer.writerow(["t"] + cols)
        for t in range(self.horizon):
            row = [str(t)]
            for c in cols:
                if c == "binding":
                    row.append(str(int(self.binding[t])))
                else:
                    row.append(fmt(self.paths[c][t]))
            writer.writerow(row)
        return buf.getvalue()


def fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _clean(x: float) -> float:
    return float(fmt(x))


def _innovation_vector(solution: Solution, shock: ShockSpec) -> np.ndarray:
    label = SHOCK_INNOVATION[shock.name]
    if label not in solution.shock_names:
        raise ValueError(f"model has no {shock.name} shock")
    nu = np.zeros(len(solution.shock_names))
    nu[solution.shock_names.index(label)] = shock.innovation
    return nu


def _check_persistence(model: LinearREModel, shock: ShockSpec) -> None:
    if shock.persistence is None:
        return
    params = model.meta.get("params")
    if params is None:
        return
    rho = getattr(params, _PERSISTENCE_FIELD[shock.name])
    if rho != shock.persistence:
        raise ValueError(
            f"shock persistence {shock.persistence} differs from the solved model's "
            f"{rho}; build the model from shock.apply_to(params)")


def _output_names(model: LinearREModel) -> tuple[list[str], list[str]]:
    """Reported names of the jump and predetermined blocks."""
    jumps = list(model.jump_names)
    states = []
    for s in model.predetermined_names:
        cur = s[:-4] if s.endswith("_lag") else s
        states.append(None if cur in jumps else cur)
    return jumps, states


def _assemble(model: LinearREModel, J: np.ndarray, S: np.ndarray, Z: np.ndarray,
              horizon: int) -> dict:
    """Paths from stacked jumps ``J``, current predetermined values ``S`` and
    exogenous states ``Z`` (each with ``horizon + 1`` rows)."""
    jumps, states = _output_names(model)
    paths = {}
    for k, name in enumerate(jumps):
        paths[name] = J[:horizon, k].copy()
    for k, name in enumerate(states):
        if name is not None:
            paths[name] = S[:horizon, k].copy()
    if "pi" in paths:
        paths["price_gap"] = np.cumsum(paths["pi"]) / model.inflation_scale
    if "pi" in paths and "R" in paths:
        pi_next = J[1:horizon + 1, jumps.index("pi")]
        paths["real_rate"] = paths["R"] - model.fisher_slope * pi_next
    for k, name in enumerate(model.process.state_names):
        paths[name] = Z[:horizon, k].copy()
    return paths


def _continuation(solution: Solution, xi_last: np.ndarray) -> Continuation:
    model = solution.model
    jumps, states = _output_names(model)
    loadings = {}
    for k, name in enumerate(jumps):
        loadings[name] = solution.jump_state[k]
    for k, name in enumerate(states):
        if name is not None:
            loadings[name] = solution.T[k]
    return Continuation(solution.T, loadings, xi_last)


def _tags(model: LinearREModel) -> tuple[str, str]:
    params = model.meta.get("params")
    if params is None or model.kind not in ("leeper", "nk"):
        return "", model.rule
    return regime_tag(params, model.kind, Verdict.DETERMINATE), model.rule


def irf(solution: Solution, shock: ShockSpec, horizon: int) -> IRFSeries:
    """Response to a one-time innovation at ``t = 0`` with no later shocks."""
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    model = solution.model
    _check_persistence(model, shock)
    nu = _innovation_vector(solution, shock)
    ns = model.n_predetermined
    nj = model.n_jumps

    J = np.zeros((horizon + 1, nj))
    X = np.zeros((horizon + 1, solution.T.shape[0]))
    xi = np.zeros(solution.T.shape[0])
    zero = np.zeros_like(nu)
    for t in range(horizon + 1):
        e = nu if t == 0 else zero
        J[t] = solution.jump_state @ xi + solution.jump_shock @ e
        xi = solution.T @ xi + solution.R @ e
        X[t] = xi

    paths = _assemble(model, J, X[:, :ns], X[:, ns:], horizon)
    regime, rule = _tags(model)
    return IRFSeries(horizon, paths, shock, regime, rule,
                     continuation=_continuation(solution, X[horizon - 1]))


def default_lower_bound(params: ModelParams) -> float:
    """Rate deviation at which the gross nominal rate equals one."""
    return -(params.pi_ss / params.beta - 1.0)


def _piecewise_path(solution: Solution, model: LinearREModel, pegged: LinearREModel,
                    regime: np.ndarray, nu: np.ndarray, horizon: int):
    """Perfect-foresight path for a given binding schedule.

    Dates after the last binding date follow the unconstrained policy; earlier
    dates are solved backward from it, one regime per date.
    """
    proc = model.process
    nj, ns = model.n_jumps, model.n_predetermined
    steps = horizon + 1
    Z = np.zeros((steps, proc.transition.shape[0]))
    Z[0] = proc.impact @ nu
    for t in range(1, steps):
        Z[t] = proc.transition @ Z[t - 1]
    E = Z @ proc.loading.T

    F = [solution.jump_states] * steps
    g = [solution.jump_exo @ Z[t] for t in range(steps)]
    last = int(np.flatnonzero(regime).max()) if regime.any() else -1
    for t in range(last, -1, -1):
        m = pegged if regime[t] else model
        A, B, c = m.A, m.B, m.const
        Ajj, Ajs, Asj, Ass = A[:nj, :nj], A[:nj, nj:], A[nj:, :nj], A[nj:, nj:]
        Fn, gn = F[t + 1], g[t + 1]
        lhs = Ajj - Fn @ Asj
        rhs_s = Fn @ Ass - Ajs
        rhs_0 = Fn @ (B[nj:] @ E[t] + c[nj:]) + gn - B[:nj] @ E[t] - c[:nj]
        F[t] = np.linalg.solve(lhs, rhs_s)
        g[t] = np.linalg.solve(lhs, rhs_0)

    rate = model.meta["rate"]
    rate_shock = model.meta["rate_shock"]
    J = np.zeros((steps, nj))
    S = np.zeros((steps + 1, ns))
    shadow = np.zeros(steps)
    for t in range(steps):
        s = S[t]
        j = F[t] @ s + g[t]
        x = np.concatenate([j, s])
        m = pegged if t < regime.size and regime[t] else model
        S[t + 1] = m.A[nj:] @ x + m.B[nj:] @ E[t] + m.const[nj:]
        J[t] = j
        shadow[t] = rate @ x + rate_shock @ E[t]
    return J, S[1:], Z, shadow


def zlb_irf(model: LinearREModel, shock: ShockSpec, horizon: int,
            lower_bound: float | None = None, max_iter: int = 200) -> IRFSeries:
    """Sticky-price response with the nominal rate floored at ``lower_bound``.

    ``model`` comes from :func:`~pltfiscal.model.build_nk`.  ``lower_bound``
    defaults to a unit gross rate; ``-inf`` gives the unconstrained response.
    The binding schedule is found by guess and verify, starting from the
    unconstrained path.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    if model.kind != "nk" or "rate" not in model.meta:
        raise ValueError("zlb_irf needs a sticky-price model from build_nk")
    if model.meta.get("rate_peg") is not None:
        raise ValueError("model already pegs the rate")
    params, coeffs = model.meta["params"], model.meta["rule"]
    solution = solve(model)
    base = irf(solution, shock, horizon)
    if lower_bound is None:
        lower_bound = default_lower_bound(params)
    if lower_bound == -math.inf:
        return base
    base.meta["lower_bound"] = lower_bound
    base.meta["shadow_rate"] = base["R"].copy()
    base.binding = np.zeros(horizon, dtype=bool)
    base.meta["iterations"] = 0
    if np.all(base["R"] >= lower_bound):
        return base

    pegged = build_nk(params, coeffs, rate_peg=lower_bound)
    nu = _innovation_vector(solution, shock)
    nj, ns = model.n_jumps, model.n_predetermined
    regime = np.zeros(horizon + 1, dtype=bool)
    regime[:horizon] = base["R"] < lower_bound
    seen = set()
    for it in range(1, max_iter + 1):
        if regime[horizon - 1]:
            raise HorizonTooShortError(
                f"lower bound still binds at t={horizon - 1}; extend the horizon")
        J, S, Z, shadow = _piecewise_path(solution, model, pegged, regime, nu, horizon)
        new = np.zeros_like(regime)
        new[:horizon] = shadow[:horizon] < lower_bound
        if np.array_equal(new, regime):
            break
        key = new.tobytes()
        if key in seen:
            raise ZLBConvergenceError("binding schedule cycles between guesses")
        seen.add(regime.tobytes())
        regime = new
    else:
        raise ZLBConvergenceError(f"no convergent binding window after {max_iter} guesses")

    paths = _assemble(model, J, S, Z, horizon)
    xi_last = np.concatenate([S[horizon - 1], Z[horizon - 1]])
    regime_name, rule_name = _tags(model)
    out = IRFSeries(horizon, paths, shock, regime_name, rule_name,
                    binding=regime[:horizon].copy(),
                    continuation=_continuation(solution, xi_last))
    out.meta.update(lower_bound=lower_bound, shadow_rate=shadow[:horizon].copy(),
                    iterations=it)
    return out


def rule_residual(series: IRFSeries) -> np.ndarray:
    """Realized rate minus the rate the unconstrained rule prescribes."""
    return series["R"] - series.meta.get("shadow_rate", series["R"])


@dataclass(frozen=True)
class LossReport:
    L_pi: float
    L_x: float
    L_R: float
    weights: tuple[float, float, float]
    horizon: int
    tail: float = 0.0

    @property
    def L_total(self) -> float:
        w_pi, w_x, w_R = self.weights
        return w_pi * self.L_pi + w_x * self.L_x + w_R * self.L_R

    @property
    def tail_ratio(self) -> float:
        total = self.L_total
        return self.tail / total if total else 0.0

    def to_dict(self) -> dict:
        return {"L_pi": _clean(self.L_pi), "L_x": _clean(self.L_x), "L_R": _clean(self.L_R),
                "L_total": _clean(self.L_total), "weights": list(self.weights),
                "horizon": self.horizon, "tail": _clean(self.tail),
                "tail_ratio": _clean(self.tail_ratio)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def _tail(cont: Continuation, name: str, beta: float, horizon: int) -> float:
    c = np.asarray(cont.loadings[name])
    P = solve_discrete_lyapunov(math.sqrt(beta) * cont.T.T, np.outer(c, c))
    # a quadratic form in a PSD matrix; clip rounding noise below zero
    return max(0.0, beta ** horizon * float(cont.state @ P @ cont.state))


def welfare_loss(series: IRFSeries, weights=(1.0, 1.0, 1.0), beta: float = 0.99,
                 include_tail: bool = True) -> LossReport:
    """Discounted quadratic loss of inflation, output gap and rate deviations.

    The sum over the simulated horizon is completed with the exact discounted
    tail of the continuation, so the result does not depend on the horizon.
    """
    weights = tuple(float(w) for w in weights)
    if len(weights) != 3 or any(w < 0 for w in weights):
        raise ValueError("weights must be three nonnegative numbers")
    H = series.horizon
    disc = beta ** np.arange(H)
    parts = {}
    tails = {}
    for key, name in (("pi", "pi"), ("x", "y"), ("R", "R")):
        x = series[name]
        parts[key] = float(disc @ (x * x))
        tails[key] = 0.0
        if include_tail and series.continuation is not None:
            tails[key] = _tail(series.continuation, name, beta, H)
    w_pi, w_x, w_R = weights
    tail = w_pi * tails["pi"] + w_x * tails["x"] + w_R * tails["R"]
    return LossReport(parts["pi"] + tails["pi"], parts["x"] + tails["x"],
                      parts["R"] + tails["R"], weights, H, tail)


@dataclass
class WelfareCurves:
    branch: str
    coef_name: str
    rows: list

    def column(self, key: str) -> np.ndarray:
        return np.array([r[key] for r in self.rows], dtype=float)

    def determinate_rows(self, regime: str | None = None) -> list:
        return [r for r in self.rows
                if r["determinate"] and (regime is None or r["regime"] == regime)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        cols = [self.coef_name, "gamma", "regime", "determinate",
                "L_pi", "L_x", "L_R", "L_total"]
        writer.writerow(cols)
        for r in self.rows:
            writer.writerow([fmt(r["coef"]), fmt(r["gamma"]), r["regime"],
                             int(r["determinate"])]
                            + [fmt(r[k]) if r["determinate"] else ""
                               for k in ("L_pi", "L_x", "L_R", "L_total")])
        return buf.getvalue()

    def to_dict(self) -> dict:
        rows = []
        for r in self.rows:
            row = {self.coef_name: _clean(r["coef"]), "gamma": _clean(r["gamma"]),
                   "regime": r["regime"], "determinate": bool(r["determinate"])}
            for k in ("L_pi", "L_x", "L_R", "L_total"):
                row[k] = _clean(r[k]) if r["determinate"] else None
            rows.append(row)
        return {"branch": self.branch, "coefficient": self.coef_name, "rows": rows}


def welfare_sweep(branch: Literal["it", "plt"], grid, params: ModelParams | None = None,
                  shock: ShockSpec | None = None, weights=(1.0, 1.0, 1.0),
                  schedule: tuple[float, float] = (0.0, 0.2),
                  horizon: int = WELFARE_HORIZON) -> WelfareCurves:
    """Loss after a demand shock along the monetary coefficient of one rule.

    ``schedule`` gives gamma when monetary policy is (passive, active); the
    cut-off is ``phi_pi = 1`` under IT and ``phi_p = 0`` under PLT.  Points
    exactly at the cut-off and non-determinate points carry no losses.
    """
    params = params or ModelParams()
    shock = shock or ShockSpec("demand")
    params = shock.apply_to(params)
    if branch == "it":
        coef_name, cutoff = "phi_pi", 1.0
    elif branch == "plt":
        coef_name, cutoff = "phi_p", 0.0
    else:
        raise ValueError(f"branch must be 'it' or 'plt', got {branch!r}")
    gamma_passive_mp, gamma_active_mp = schedule

    rows = []
    for coef in np.asarray(grid, dtype=float):
        row = {"coef": float(coef), "L_pi": math.nan, "L_x": math.nan,
               "L_R": math.nan, "L_total": math.nan}
        if coef == cutoff:
            row.update(gamma=math.nan, regime="cut-off", determinate=False)
            rows.append(row)
            continue
        gamma = gamma_passive_mp if coef < cutoff else gamma_active_mp
        p = params.replace(**{coef_name: float(coef), "gamma": gamma}).with_rule(branch)
        model = build_nk(p)
        cls = classify(model)
        row.update(gamma=gamma, regime=regime_tag(p, "nk", cls.verdict),
                   determinate=cls.is_determinate)
        if cls.is_determinate:
            series = irf(solve(model), shock, horizon)
            loss = welfare_loss(series, weights, p.beta)
            row.update(L_pi=loss.L_pi, L_x=loss.L_x, L_R=loss.L_R, L_total=loss.L_total)
        rows.append(row)
    return WelfareCurves(branch, coef_name, rows)


def nk_residuals(series: IRFSeries, params: ModelParams,
                 rule: RuleCoeffs | None = None) -> dict[str, np.ndarray]:
    """Residuals of the four sticky-price equations along a perfect-foresight path.

    Dates where the lower bound binds are excluded from the rule residual.
    """
    if rule is None:
        rule = make_rule(params.phi_p, params.phi_pi, params.delta, "log")
    y, pi, R, b = series["y"], series["pi"], series["R"], series["b"]
    eps, theta, psi = series["eps"], series["theta"], series["psi"]
    beta, kappa, tb = params.beta, params.kappa, params.tau_over_b
    lag = lambda x: np.concatenate([[0.0], x[:-1]])
    euler = y[:-1] - (y[1:] - (R[:-1] - pi[1:]) + (1 - params.rho_eps) * eps[:-1])
    nkpc = pi[:-1] - (beta * pi[1:] + kappa * y[:-1])
    budget = b - ((1 - tb * params.gamma) / beta * lag(b) + R - pi / beta - tb / beta * psi)
    policy = R - (rule.c_pi * pi + rule.c_pi_lag * lag(pi) + rule.c_R_lag * lag(R)
                  + rule.c_theta * theta + rule.c_theta_lag * lag(theta))
    if series.binding is not None:
        policy = np.where(series.binding, 0.0, policy)
    return {"euler": euler, "nkpc": nkpc, "budget": budget, "rule": policy}
