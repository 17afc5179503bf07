from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from pltfiscal.closed_form import (RegimeError, ampf_plt_coefficients, it_coefficients,
                                   it_regime, leeper_coeffs, oracle_report, pi_ampf_plt,
                                   pi_it, pi_pmaf_plt, pmaf_plt_coefficients)
from pltfiscal.model import FISCALLY_LED, MONETARY_LED, ModelParams


def test_ampf_plt_formula_value():
    p = ModelParams(phi_p=1.2, gamma=0.2, rho_theta=0.5).with_rule("plt")
    got = pi_ampf_plt(0.0, 0.01, 0.0, p)
    assert got == pytest.approx(-0.99 * 0.01 / (1 + 0.99 * 1.2 - 0.5), rel=1e-12)
    assert pi_ampf_plt(0.01, 0.0, 0.0, p) == pytest.approx(-0.01 / 1.2)


def test_regime_guards():
    fiscal = ModelParams().replace(**FISCALLY_LED).with_rule("plt")
    monetary = ModelParams().replace(**MONETARY_LED).with_rule("plt")
    with pytest.raises(RegimeError):
        ampf_plt_coefficients(fiscal)
    with pytest.raises(RegimeError):
        pmaf_plt_coefficients(monetary)
    with pytest.raises(RegimeError):
        it_regime(ModelParams(phi_pi=0.5, gamma=0.2).with_rule("it"))


def test_pmaf_inflation_rises_with_lagged_debt():
    p = ModelParams().replace(**FISCALLY_LED).with_rule("plt")
    assert pmaf_plt_coefficients(p)["b_lag"] > 0
    assert pi_pmaf_plt(0, 0.01, 0, 0, 0, p) > 0


def test_ampf_it_depends_only_on_theta():
    p = ModelParams().replace(**MONETARY_LED).with_rule("it")
    coef = it_coefficients(p)
    assert coef["theta"] == pytest.approx(0.99 / (0.5 - 0.99 * 1.2))
    assert pi_it(1.0, 1.0, 1.0, 0.0, p) == 0.0


def test_leeper_coefficients_roots():
    k = leeper_coeffs(ModelParams(phi_p=-0.1, gamma=0.0).with_rule("plt"))
    assert k.e2 == pytest.approx(1 - 0.099)
    assert k.e3 == pytest.approx(1 / 0.99)


@pytest.mark.parametrize("mix", [MONETARY_LED, FISCALLY_LED])
@pytest.mark.parametrize("rule", ["it", "plt"])
def test_oracle_at_reference_points(mix, rule):
    report = oracle_report(ModelParams().replace(**mix).with_rule(rule))
    assert report.ok, str(report)


@given(phi=st.floats(-1.5, -0.05), gamma=st.floats(0, 0.005), rho_t=st.floats(0, 0.9),
       rho_p=st.floats(0, 0.9))
def test_oracle_pmaf_plt_random(phi, gamma, rho_t, rho_p):
    p = ModelParams(phi_p=phi, gamma=gamma, rho_theta=rho_t, rho_psi=rho_p).with_rule("plt")
    assert oracle_report(p).ok


def test_report_names_mismatch():
    report = oracle_report(ModelParams().replace(**MONETARY_LED).with_rule("plt"))
    broken = type(report)(report.rule, {**report.closed_form, "theta": 0.0},
                          report.numerical, report.tol)
    assert broken.mismatched == ["theta"]
    assert "theta" in str(broken)
