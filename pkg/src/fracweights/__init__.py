"""Two-weight inequalities for the multilinear fractional integral into
weighted Lipschitz spaces: parameter regions, power-weight examples,
supremum-over-balls certification and desk-scale operator quadrature."""

__version__ = "0.1.0"

from .params import Ball, FracParams, Region, classify, region_classify
from .weights import PowerWeight, TabulatedWeight, WeightPair
from .conditions import (
    ConditionValue,
    global_condition_value,
    hbb_value,
    hcal_value,
    local_condition_value,
    mixed_condition_value,
    related_weights_value,
)
from .power_weights import ball_integral_power, construct_example_pair
from .supsearch import GridSpec, Tolerances, certify_membership, estimate_sup
from .operators import GridFunction, apply_Igamma, apply_Jgamma, boundedness_experiment

__all__ = [
    "__version__",
    "Ball",
    "FracParams",
    "Region",
    "classify",
    "region_classify",
    "PowerWeight",
    "TabulatedWeight",
    "WeightPair",
    "ConditionValue",
    "hcal_value",
    "hbb_value",
    "local_condition_value",
    "global_condition_value",
    "mixed_condition_value",
    "related_weights_value",
    "ball_integral_power",
    "construct_example_pair",
    "GridSpec",
    "Tolerances",
    "estimate_sup",
    "certify_membership",
    "GridFunction",
    "apply_Igamma",
    "apply_Jgamma",
    "boundedness_experiment",
]
