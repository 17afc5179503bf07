"""Analytic inflation solutions of the flexible-price model.

Each regime/rule cell has a ``*_coefficients`` function returning the
loadings of ``pi_t`` on ``(R_lag, b_lag, theta, theta_lag, psi)`` and a
formula function that evaluates them at given states.  They are written
independently of :mod:`pltfiscal.solver` and serve as its oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import ModelParams, build_leeper, check_leeper_steady_state

STATE_KEYS = ("R_lag", "b_lag", "theta", "theta_lag", "psi")


class RegimeError(ValueError):
    """Parameters belong to a different policy regime than the formula."""


@dataclass(frozen=True)
class LeeperCoeffs:
    phi1: float
    phi2: float
    phi3: float
    phi1_t: float
    phi2_t: float
    phi3_t: float
    H: float
    K: float
    J: float
    H_t: float
    K_t: float
    e2: float
    e3: float


def leeper_coeffs(params: ModelParams) -> LeeperCoeffs:
    check_leeper_steady_state(params)
    beta, pi, R = params.beta, params.pi_ss, params.R_ss
    c, b, gamma = params.c_ss, params.b_ss, params.gamma
    phi_p, phi_pi = params.phi_p, params.phi_pi
    if R == 1.0:
        raise ValueError("R_ss = 1 makes money demand singular")

    phi1 = c / (R - 1) / pi * (1 / beta - phi_p / (R - 1)) + b / (beta * pi)
    phi2 = c / (pi * (R - 1) ** 2) - c / (R - 1) ** 2 - b / pi
    phi3 = -c / (R - 1) ** 2
    phi1_t = c / (R - 1) / pi * (1 / beta - phi_pi / (R - 1)) + b / (beta * pi)
    phi2_t = c / (pi * (R - 1) ** 2) - b / pi
    phi3_t = phi3

    e3 = 1 / beta - gamma
    H = 1 - 1 / beta + gamma + beta * phi_p / pi
    K = (1 / beta - gamma - 1) * phi1 + phi_p / pi * phi2
    J = beta * phi1 + (1 / beta - gamma - beta * phi_p / pi) * phi2
    H_t = -1 / beta + gamma + beta * phi_pi / pi
    K_t = (1 / beta - gamma) * phi1_t + phi_pi / pi * phi2_t
    return LeeperCoeffs(phi1, phi2, phi3, phi1_t, phi2_t, phi3_t, H, K, J, H_t, K_t,
                        e2=1 + beta * phi_p / pi, e3=e3)


def _fiscal_passive(params: ModelParams) -> bool:
    return abs(1 / params.beta - params.gamma) < 1


def _dot(coef: dict, values: dict) -> float:
    return sum(coef[k] * values[k] for k in STATE_KEYS)


def ampf_plt_coefficients(params: ModelParams) -> dict[str, float]:
    if not (params.phi_p > 0 and _fiscal_passive(params)):
        raise RegimeError("AM/PF PLT solution needs phi_p > 0 and |1/beta - gamma| < 1")
    beta, pi, phi_p, rho = params.beta, params.pi_ss, params.phi_p, params.rho_theta
    return {
        "R_lag": -pi / phi_p,
        "b_lag": 0.0,
        "theta": -beta / (1 + beta * phi_p / pi - rho),
        "theta_lag": pi / phi_p,
        "psi": 0.0,
    }


def pmaf_plt_coefficients(params: ModelParams) -> dict[str, float]:
    if not (params.phi_p < 0 and not _fiscal_passive(params)):
        raise RegimeError("PM/AF PLT solution needs phi_p < 0 and |1/beta - gamma| > 1")
    k = leeper_coeffs(params)
    beta, e3 = params.beta, k.e3
    rho_t, rho_p = params.rho_theta, params.rho_psi
    HK, JK = k.H / k.K, k.J / k.K
    # coefficient on the bracket ((e3-1)/(e3-rho) theta_t - theta_{t-1})
    bracket = (e3 * HK * k.phi3 - JK - beta) / e3
    return {
        "R_lag": -JK,
        "b_lag": -e3 * HK,
        "theta": bracket * (e3 - 1) / (e3 - rho_t),
        "theta_lag": -bracket,
        "psi": e3 * HK / (e3 - rho_p),
    }


def it_regime(params: ModelParams) -> str:
    monetary_active = abs(params.beta * params.phi_pi / params.pi_ss) > 1
    if monetary_active and _fiscal_passive(params):
        return "AM/PF"
    if not monetary_active and not _fiscal_passive(params):
        return "PM/AF"
    raise RegimeError("IT parameters are not in a determinate regime")


def it_coefficients(params: ModelParams) -> dict[str, float]:
    regime = it_regime(params)
    beta, pi, phi_pi = params.beta, params.pi_ss, params.phi_pi
    if regime == "AM/PF":
        return {"R_lag": 0.0, "b_lag": 0.0,
                "theta": beta / (params.rho_theta - beta * phi_pi / pi),
                "theta_lag": 0.0, "psi": 0.0}
    k = leeper_coeffs(params)
    e3 = k.e3
    HK = k.H_t / k.K_t
    return {
        "R_lag": k.phi2_t * HK,
        "b_lag": -e3 * HK,
        "theta": (e3 * HK * k.phi3_t + k.phi2_t * HK - beta) / (e3 - params.rho_theta),
        "theta_lag": 0.0,
        "psi": e3 * HK / (e3 - params.rho_psi),
    }


def pi_ampf_plt(R_lag, theta, theta_lag, params: ModelParams) -> float:
    coef = ampf_plt_coefficients(params)
    return _dot(coef, {"R_lag": R_lag, "b_lag": 0.0, "theta": theta,
                       "theta_lag": theta_lag, "psi": 0.0})


def pi_pmaf_plt(R_lag, b_lag, psi, theta, theta_lag, params: ModelParams) -> float:
    coef = pmaf_plt_coefficients(params)
    return _dot(coef, {"R_lag": R_lag, "b_lag": b_lag, "theta": theta,
                       "theta_lag": theta_lag, "psi": psi})


def pi_it(R_lag, b_lag, psi, theta, params: ModelParams) -> float:
    """Inflation under strict IT in whichever determinate regime applies."""
    coef = it_coefficients(params)
    return _dot(coef, {"R_lag": R_lag, "b_lag": b_lag, "theta": theta,
                       "theta_lag": 0.0, "psi": psi})


def closed_form_coefficients(params: ModelParams, rule: str) -> dict[str, float]:
    if rule == "it":
        return it_coefficients(params)
    if rule != "plt":
        raise ValueError(f"rule must be 'it' or 'plt', got {rule!r}")
    if params.phi_p > 0:
        return ampf_plt_coefficients(params)
    return pmaf_plt_coefficients(params)


@dataclass(frozen=True)
class OracleReport:
    rule: str
    closed_form: dict
    numerical: dict
    tol: float

    @property
    def differences(self) -> dict[str, float]:
        return {k: self.numerical[k] - self.closed_form[k] for k in STATE_KEYS}

    @property
    def mismatched(self) -> list[str]:
        out = []
        for k, d in self.differences.items():
            if abs(d) > self.tol * max(1.0, abs(self.closed_form[k])):
                out.append(k)
        return out

    @property
    def ok(self) -> bool:
        return not self.mismatched

    def __str__(self):
        if self.ok:
            return f"{self.rule}: closed form matches solver"
        lines = [f"{self.rule}: closed form disagrees with solver"]
        for k in self.mismatched:
            lines.append(f"  {k}: table {self.closed_form[k]:.12g} "
                         f"solver {self.numerical[k]:.12g}")
        return "\n".join(lines)


def oracle_report(params: ModelParams, tol: float = 1e-8) -> OracleReport:
    """Compare the analytic inflation solution with the numerical policy.

    ``params`` must already carry a strict IT or PLT rule.
    """
    from .solver import solve

    model = build_leeper(params)
    cf = closed_form_coefficients(params, model.rule)
    policy = solve(model).jump_policy("pi")
    return OracleReport(model.rule, cf, {k: policy[k] for k in STATE_KEYS}, tol)
