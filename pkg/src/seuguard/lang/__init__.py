"""CtrlC: the deterministic C-like mini-language analysed by seuguard."""

from .ast import Program
from .diagnostics import Diagnostic, ParseError
from .parser import parse, parse_file
from .printer import pretty


def list_variables(program: Program) -> list[str]:
    """Parameters then locals, in declaration order."""
    return program.variables


__all__ = ["Diagnostic", "ParseError", "Program", "list_variables", "parse", "parse_file", "pretty"]
