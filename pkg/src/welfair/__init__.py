"""Welfare-based group-fairness audits over finite decision problems."""

from .core import (
    DEFAULT_ENUMERATION_CAP,
    DEFAULT_EPSILON,
    DecisionSpace,
    Fdmp,
    Individual,
    Population,
    Thresholds,
    UtilityModel,
    conditional_probability,
    cost_of,
    qualification,
    welfare_of,
)
from .errors import (
    EnumerationCapExceeded,
    HorizonUnbounded,
    ParseError,
    SchemaError,
    ScenarioError,
    SupportTooLarge,
    UnknownAlgorithm,
    WelfairError,
    ZeroConditionMass,
)
from .metrics import FairnessVerdict, GroupStats, MetricSpec, evaluate_multi_group

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_ENUMERATION_CAP",
    "DEFAULT_EPSILON",
    "DecisionSpace",
    "EnumerationCapExceeded",
    "FairnessVerdict",
    "Fdmp",
    "GroupStats",
    "HorizonUnbounded",
    "Individual",
    "MetricSpec",
    "ParseError",
    "Population",
    "ScenarioError",
    "SchemaError",
    "SupportTooLarge",
    "Thresholds",
    "UnknownAlgorithm",
    "UtilityModel",
    "WelfairError",
    "ZeroConditionMass",
    "conditional_probability",
    "cost_of",
    "evaluate_multi_group",
    "qualification",
    "welfare_of",
    "__version__",
]
