from __future__ import annotations

import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pltfiscal.model import FISCALLY_LED, MONETARY_LED, ModelParams, build_leeper, build_nk
from pltfiscal.simulate import (LossReport, ShockSpec, irf, nk_residuals, welfare_loss,
                                welfare_sweep)
from pltfiscal.solver import solve

P = ModelParams()


def nk_solution(mix, rule, **changes):
    p = P.replace(**mix, **changes).with_rule(rule)
    return p, solve(build_nk(p))


def test_shock_spec_validation():
    with pytest.raises(ValueError):
        ShockSpec("supply")
    with pytest.raises(ValueError):
        ShockSpec("demand", size=math.inf)
    with pytest.raises(ValueError):
        ShockSpec("demand", persistence=1.0)
    assert ShockSpec("demand", size=0.02).innovation == -0.02


def test_horizon_zero_rejected():
    _, sol = nk_solution(MONETARY_LED, "it")
    with pytest.raises(ValueError):
        irf(sol, ShockSpec("demand"), 0)


def test_zero_shock_gives_zero_paths():
    _, sol = nk_solution(FISCALLY_LED, "plt")
    r = irf(sol, ShockSpec("demand", size=0.0), 20)
    assert all(np.all(v == 0) for v in r.paths.values())


def test_persistence_mismatch_rejected():
    _, sol = nk_solution(MONETARY_LED, "it")
    with pytest.raises(ValueError, match="persistence"):
        irf(sol, ShockSpec("demand", persistence=0.8), 10)


def test_persistence_override_via_apply_to():
    shock = ShockSpec("demand", persistence=0.8)
    p = shock.apply_to(P.replace(**MONETARY_LED).with_rule("it"))
    r = irf(solve(build_nk(p)), shock, 5)
    assert r["eps"] == pytest.approx(-0.01 * 0.8 ** np.arange(5))


def test_fiscally_led_plt_raises_rate_after_demand_shock():
    _, sol = nk_solution(FISCALLY_LED, "plt")
    r = irf(sol, ShockSpec("demand"), 20)
    assert r["R"][0] > 0
    assert r.regime == "PM/AF" and r.rule == "plt"


@pytest.mark.parametrize("rule", ["it", "plt"])
def test_ricardian_fiscal_shock(rule):
    _, sol = nk_solution(MONETARY_LED, rule)
    r = irf(sol, ShockSpec("fiscal"), 40)
    for name in ("y", "pi", "R"):
        assert np.max(np.abs(r[name])) < 1e-10
    assert np.max(np.abs(r["b"])) > 1e-4


def test_derived_series():
    p, sol = nk_solution(FISCALLY_LED, "it")
    r = irf(sol, ShockSpec("demand"), 30)
    assert r["price_gap"] == pytest.approx(np.cumsum(r["pi"]))
    assert r["real_rate"][:-1] == pytest.approx(r["R"][:-1] - r["pi"][1:])
    assert all(len(v) == 30 for v in r.paths.values())


@given(mix=st.sampled_from([MONETARY_LED, FISCALLY_LED]), rule=st.sampled_from(["it", "plt"]),
       shock=st.sampled_from(["demand", "monetary", "fiscal"]), size=st.floats(-0.1, 0.1))
def test_equation_residuals_along_paths(mix, rule, shock, size):
    p, sol = nk_solution(mix, rule)
    r = irf(sol, ShockSpec(shock, size=size), 60)
    for name, res in nk_residuals(r, p).items():
        assert np.max(np.abs(res)) < 1e-10, name


@given(phi=st.floats(0.05, 3), gamma=st.floats(0.05, 7.9))
def test_plt_rule_identity(phi, gamma):
    p = P.replace(phi_p=phi, gamma=gamma).with_rule("plt")
    r = irf(solve(build_nk(p)), ShockSpec("monetary"), 40)
    R_lag = np.concatenate([[0.0], r["R"][:-1]])
    dtheta = r["theta"] - r["theta_lag"]
    assert np.max(np.abs(r["R"] - R_lag - phi * r["pi"] - dtheta)) < 1e-10


@given(mix=st.sampled_from([MONETARY_LED, FISCALLY_LED]), rule=st.sampled_from(["it", "plt"]),
       size=st.floats(0.001, 0.1))
def test_linearity(mix, rule, size):
    _, sol = nk_solution(mix, rule)
    a = irf(sol, ShockSpec("demand", size=size), 30)
    b = irf(sol, ShockSpec("demand", size=2 * size), 30)
    for name in a.paths:
        assert np.array_equal(2 * a[name], b[name]), name


def test_leeper_irf_runs():
    p = P.replace(**FISCALLY_LED).with_rule("plt")
    r = irf(solve(build_leeper(p)), ShockSpec("fiscal"), 10)
    assert set(r.paths) >= {"pi", "R", "b", "price_gap"}
    assert r.regime == "PM/AF"


def test_csv_layout():
    _, sol = nk_solution(MONETARY_LED, "plt")
    text = irf(sol, ShockSpec("demand"), 5).to_csv()
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0][:4] == ["t", "y", "pi", "R"]
    assert [r[0] for r in rows[1:]] == ["0", "1", "2", "3", "4"]


def test_zero_irf_zero_loss():
    _, sol = nk_solution(MONETARY_LED, "it")
    loss = welfare_loss(irf(sol, ShockSpec("demand", size=0.0), 10))
    assert (loss.L_pi, loss.L_x, loss.L_R, loss.L_total) == (0.0, 0.0, 0.0, 0.0)


def test_negative_weights_rejected():
    _, sol = nk_solution(MONETARY_LED, "it")
    with pytest.raises(ValueError):
        welfare_loss(irf(sol, ShockSpec("demand"), 10), weights=(1, -1, 1))


@given(w=st.tuples(st.floats(0, 5), st.floats(0, 5), st.floats(0, 5)))
def test_loss_additivity(w):
    _, sol = nk_solution(FISCALLY_LED, "plt")
    loss = welfare_loss(irf(sol, ShockSpec("demand"), 50), weights=w)
    assert loss.L_total == w[0] * loss.L_pi + w[1] * loss.L_x + w[2] * loss.L_R
    assert min(loss.L_pi, loss.L_x, loss.L_R) >= 0


@pytest.mark.parametrize("mix", [MONETARY_LED, FISCALLY_LED])
def test_loss_invariant_to_horizon(mix):
    p, sol = nk_solution(mix, "it")
    short = welfare_loss(irf(sol, ShockSpec("demand"), 25), beta=p.beta)
    long = welfare_loss(irf(sol, ShockSpec("demand"), 500), beta=p.beta)
    assert short.L_total == pytest.approx(long.L_total, rel=1e-12)
    assert long.tail_ratio < 1e-12


def test_loss_without_tail_is_partial_sum():
    p, sol = nk_solution(MONETARY_LED, "it")
    r = irf(sol, ShockSpec("demand"), 10)
    loss = welfare_loss(r, beta=p.beta, include_tail=False)
    assert loss.L_pi == pytest.approx(np.sum(p.beta ** np.arange(10) * r["pi"] ** 2))


def test_loss_report_json():
    loss = LossReport(1.0, 2.0, 3.0, (1.0, 0.5, 0.0), 10)
    assert loss.to_dict()["L_total"] == 2.0


def test_sweep_marks_cutoff_and_switches_gamma():
    curves = welfare_sweep("it", [0.5, 1.0, 1.5], horizon=100)
    gap = curves.rows[1]
    assert gap["regime"] == "cut-off" and not gap["determinate"]
    assert [r["gamma"] for r in (curves.rows[0], curves.rows[2])] == [0.0, 0.2]
    assert [r["regime"] for r in (curves.rows[0], curves.rows[2])] == ["PM/AF", "AM/PF"]
    assert ",,,," in curves.to_csv().splitlines()[2] + ","


def test_sweep_point_equals_direct_loss():
    curves = welfare_sweep("plt", [-0.1], horizon=200)
    p = P.replace(phi_p=-0.1, gamma=0.0).with_rule("plt")
    direct = welfare_loss(irf(solve(build_nk(p)), ShockSpec("demand"), 200), beta=p.beta)
    assert curves.rows[0]["L_total"] == direct.L_total


def test_sweep_rejects_unknown_branch():
    with pytest.raises(ValueError):
        welfare_sweep("ngdp", [1.0])
