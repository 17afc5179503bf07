from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pltfiscal.model import (FISCALLY_LED, MONETARY_LED, LinearREModel, ModelParams,
                             RuleCoeffs, ShockProcess, build_leeper, build_nk,
                             check_leeper_steady_state, make_rule, nk_contemporaneous_matrix,
                             nk_debt_root)


def closed_form_transition(p: ModelParams) -> np.ndarray:
    b, k, phi, tb, g = p.beta, p.kappa, p.phi_p, p.tau_over_b, p.gamma
    return np.array([
        [k / b + 1, -1 / b, 1, 0],
        [-k / b, 1 / b, 0, 0],
        [-k / b * phi, phi / b, 1, 0],
        [-k / b ** 2 * (b * phi - 1), (b * phi - 1) / b ** 2, 1, -(tb * g - 1) / b],
    ])


def test_defaults_and_derived_steady_state():
    p = ModelParams()
    assert p.R_ss == pytest.approx(1 / 0.99)
    assert p.m_ss == pytest.approx(p.c_ss * p.R_ss / (p.R_ss - 1))
    assert p.tau_over_b == pytest.approx(0.25)
    assert p.leeper_residuals() == pytest.approx((0.0, 0.0), abs=1e-12)


def test_replace_recomputes_derived_values():
    p = ModelParams().replace(beta=0.95)
    assert p.R_ss == pytest.approx(1 / 0.95)
    check_leeper_steady_state(p)


@pytest.mark.parametrize("bad", [
    {"beta": 1.0}, {"beta": 0.0}, {"pi_ss": 0.9}, {"kappa": 0.0},
    {"rho_eps": 1.0}, {"rho_theta": -0.1}, {"weights": (1, -1, 1)}, {"gamma": math.nan},
])
def test_invalid_parameters_rejected(bad):
    with pytest.raises(ValueError):
        ModelParams(**bad)


def test_inconsistent_leeper_steady_state_rejected():
    with pytest.raises(ValueError, match="inconsistent"):
        build_leeper(ModelParams(R_ss=1.05).with_rule("plt"))


def test_mixed_rule_rejected_by_flexible_price_model():
    with pytest.raises(ValueError, match="strict"):
        build_leeper(ModelParams(delta=0.5))


def test_with_rule_polar_cases():
    it = ModelParams(phi_p=0.7, delta=0.3).with_rule("it")
    assert (it.phi_p, it.delta) == (0.0, 0.0)
    plt = ModelParams(phi_pi=0.7).with_rule("plt")
    assert (plt.phi_pi, plt.delta) == (0.0, 1.0)
    with pytest.raises(ValueError):
        ModelParams().with_rule("nominal")


def test_quasi_difference_of_general_rule():
    r = make_rule(phi_p=0.5, phi_pi=1.5, delta=0.8, scaling="level", pi_ss=1.02)
    assert r.c_pi == pytest.approx(2.0 / 1.02)
    assert r.c_pi_lag == pytest.approx(-0.8 * 1.5 / 1.02)
    assert (r.c_R_lag, r.c_theta_lag) == (0.8, -0.8)
    assert r.kind == "general"
    assert make_rule(1.2, 0, 1).kind == "plt"
    assert make_rule(0, 1.2, 0).kind == "it"


def test_leeper_eigenvalues_at_fiscally_led_point():
    p = ModelParams().replace(**FISCALLY_LED).with_rule("plt")
    lam = np.sort(np.abs(np.linalg.eigvals(build_leeper(p).A)))
    assert lam == pytest.approx([0.0, 1 + 0.99 * -0.1, 1 / 0.99], abs=1e-12)


def test_leeper_layout():
    m = build_leeper(ModelParams().with_rule("plt"))
    assert m.var_names == ("pi", "R_lag", "b_lag")
    assert m.jump_names == ("pi",)
    assert m.shock_names == ("dtheta", "psi")
    assert m.B[:, 1] == pytest.approx([0.0, 0.0, -1.0])
    it = build_leeper(ModelParams().with_rule("it"))
    assert it.shock_names == ("theta", "psi")


def test_theta_process_carries_difference_under_plt():
    m = build_leeper(ModelParams().with_rule("plt"))
    proc = m.process
    assert proc.state_names == ("theta", "theta_lag", "psi")
    # the monetary shock entering the model is theta_t - theta_{t-1}
    assert proc.loading[0] == pytest.approx([1.0, -1.0, 0.0])


def test_nk_layout_and_debt_root():
    p = ModelParams().replace(**MONETARY_LED).with_rule("plt")
    m = build_nk(p)
    assert m.var_names == ("y", "pi", "R_lag", "b_lag")
    assert m.n_jumps == 2
    assert nk_debt_root(p) == pytest.approx((1 - 0.25 * 0.2) / 0.99)
    assert np.min(np.abs(np.linalg.eigvals(m.A) - nk_debt_root(p))) < 1e-10


def test_nk_lagged_inflation_state_for_general_rule():
    m = build_nk(ModelParams(phi_p=0.5, phi_pi=1.5, delta=0.5))
    assert m.var_names[-1] == "pi_lag"
    assert m.n_predetermined == 3


def test_rate_peg_keeps_layout():
    p = ModelParams().with_rule("it")
    free, pegged = build_nk(p), build_nk(p, rate_peg=-0.01)
    assert free.var_names == pegged.var_names
    assert pegged.const[2] == -0.01
    assert np.all(pegged.A[2] == 0.0)


@given(phi=st.floats(-3, 3), gamma=st.floats(0, 10), kappa=st.floats(0.01, 1),
       beta=st.floats(0.9, 0.999))
def test_contemporaneous_matrix_matches_closed_form(phi, gamma, kappa, beta):
    p = ModelParams(beta=beta, kappa=kappa, phi_p=phi, gamma=gamma).with_rule("plt")
    assert nk_contemporaneous_matrix(p) == pytest.approx(closed_form_transition(p), abs=1e-10)


@given(phi=st.floats(-3, 3), gamma=st.floats(0, 10).filter(lambda g: abs(g - 4) > 1e-3))
def test_lagged_form_is_similar_to_contemporaneous_form(phi, gamma):
    p = ModelParams(phi_p=phi, gamma=gamma).with_rule("plt")
    beta, cb = p.beta, nk_debt_root(p)
    M = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, phi, 1, 0],
                  [0, phi - 1 / beta, 1, cb]])
    A_lag = build_nk(p).A
    assert nk_contemporaneous_matrix(p) == pytest.approx(M @ A_lag @ np.linalg.inv(M), abs=1e-9)


def test_model_validation():
    with pytest.raises(ValueError):
        LinearREModel(A=np.eye(2), B=np.zeros((3, 1)), var_names=("a", "b"),
                      shock_names=("e",), n_predetermined=1)
    with pytest.raises(ValueError):
        LinearREModel(A=np.eye(2), B=np.zeros((2, 1)), var_names=("a", "a"),
                      shock_names=("e",), n_predetermined=1)
    m = LinearREModel(A=np.eye(2), B=[1.0, 0.0], var_names=("a", "b"),
                      shock_names=("e",), n_predetermined=1)
    assert m.process.innovation_names == ("e",)
    assert isinstance(m.process, ShockProcess)


def test_rule_kind_property():
    assert RuleCoeffs(1.0, 0.0, 1.0).kind == "plt"
