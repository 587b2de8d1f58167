"""Decision procedures for Presburger arithmetic with 2^|x| and with a powers-of-two predicate."""

from .config import Limits, SolveConfig, Strategy
from .errors import ContractError, ExpqError, ParseError, ResourceExceeded
from .formula import FALSE, TRUE, Formula, PrenexFormula, normalize, to_prenex
from .fragments import Fragment, fragment_check
from .master import Decision, MasterResult, decide, decide_pres_power, master_procedure
from .metrics import MetricsReport, metrics
from .oracle import bounded_witness_search, eval_ground, eval_qf, naive_eval, sample_equivalence
from .parser import Dialect, parse, render, translate_pres_power
from .term import Term

__all__ = [
    "ContractError",
    "Decision",
    "Dialect",
    "ExpqError",
    "FALSE",
    "Formula",
    "Fragment",
    "Limits",
    "MasterResult",
    "MetricsReport",
    "ParseError",
    "PrenexFormula",
    "ResourceExceeded",
    "SolveConfig",
    "Strategy",
    "TRUE",
    "Term",
    "bounded_witness_search",
    "decide",
    "decide_pres_power",
    "eval_ground",
    "eval_qf",
    "fragment_check",
    "master_procedure",
    "metrics",
    "naive_eval",
    "normalize",
    "parse",
    "render",
    "sample_equivalence",
    "to_prenex",
    "translate_pres_power",
]

__version__ = "0.1.0"
