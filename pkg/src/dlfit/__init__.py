"""Learning description-logic concepts that fit labelled examples.

Typical use::

    from dlfit import SearchConfig, bounded_fit, load_facts, load_problem

    db = load_facts("facts.txt")
    problem = load_problem("problem.json", db)
    result = bounded_fit(problem, SearchConfig(fragment="ALCQf"))
    print(result.status, result.concept_text())
"""

from .bisim import ALC, ALCQ, bisimilar, max_bisimulation, quotient, separating_concept
from .core import *  # noqa: F401,F403
from .core import __all__ as _core_all
from .driver import (
    APPROX,
    BUDGET,
    EXACT,
    NONE,
    FitResult,
    SearchConfig,
    bounded_fit,
    enumerate_topologies,
    max_fit,
)
from .errors import DLFitError, InputError
from .metrics import MetricsReport, cross_validate, evaluate

__version__ = "0.1.0"

__all__ = list(_core_all) + [
    "ALC",
    "ALCQ",
    "APPROX",
    "BUDGET",
    "DLFitError",
    "EXACT",
    "FitResult",
    "InputError",
    "MetricsReport",
    "NONE",
    "SearchConfig",
    "bisimilar",
    "bounded_fit",
    "cross_validate",
    "enumerate_topologies",
    "evaluate",
    "max_bisimulation",
    "max_fit",
    "quotient",
    "separating_concept",
]
