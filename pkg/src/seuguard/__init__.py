"""Conditional relevance analysis of control-program variables under single-event upsets."""

__version__ = "0.1.0"

from .checker import CheckConfig, check, classify_variable
from .domain import InputDomain
from .instrument import self_compose
from .lang import list_variables, parse, parse_file
from .oracle import oracle_classify, run_concrete
from .pipeline import AnalysisConfig, analyze
from .prop import parse_spec
from .report import emit_report
from .slicer import slice_program
from .values import flip_bit
from .verdict import FaultModel, Verdict

__all__ = [
    "AnalysisConfig", "CheckConfig", "FaultModel", "InputDomain", "Verdict", "analyze", "check",
    "classify_variable", "emit_report", "flip_bit", "list_variables", "oracle_classify", "parse",
    "parse_file", "parse_spec", "run_concrete", "self_compose", "slice_program",
]
