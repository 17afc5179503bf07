"""Monetary-fiscal interactions under price level targeting.

Linear rational-expectations models of a flexible-price money-in-utility
economy and a small sticky-price economy, a Blanchard-Kahn solver, analytic
determinacy predicates, impulse responses with an occasionally binding lower
bound, and quadratic welfare losses.
"""

from .closed_form import closed_form_coefficients, oracle_report
from .determinacy import (RegimeVerdict, Stance, leeper_predicate, nk_predicate,
                          regime_tag, sweep, woodford_case)
from .model import (FISCALLY_LED, MONETARY_LED, LinearREModel, ModelParams, RuleCoeffs,
                    ShockProcess, build_leeper, build_nk, make_rule)
from .simulate import (IRFSeries, LossReport, ShockSpec, irf, welfare_loss, welfare_sweep,
                       zlb_irf)
from .solver import Classification, Solution, Verdict, classify, solve

__all__ = [
    "Classification", "FISCALLY_LED", "IRFSeries", "LinearREModel", "LossReport",
    "MONETARY_LED", "ModelParams", "RegimeVerdict", "RuleCoeffs", "ShockProcess",
    "ShockSpec", "Solution", "Stance", "Verdict", "build_leeper", "build_nk",
    "classify", "closed_form_coefficients", "irf", "leeper_predicate", "make_rule",
    "nk_predicate", "oracle_report", "regime_tag", "solve", "sweep", "welfare_loss",
    "welfare_sweep", "woodford_case", "zlb_irf",
]
