"""CtrlC abstract syntax.

Nodes are frozen dataclasses. Source spans never take part in equality, so a
re-parsed pretty-print compares equal to the original tree. Statements carry a
``sid``: the preorder statement index assigned by the parser (1-based), which
doubles as the CFG node id.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union


@dataclass(frozen=True)
class Span:
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


NOSPAN = Span(0, 0)


def _span():
    return field(default=NOSPAN, compare=False, repr=False)


# -- expressions -------------------------------------------------------------


@dataclass(frozen=True)
class IntLit:
    value: int
    span: Span = _span()


@dataclass(frozen=True)
class BoolLit:
    value: bool
    span: Span = _span()


@dataclass(frozen=True)
class Var:
    name: str
    span: Span = _span()


@dataclass(frozen=True)
class Input:
    """The ``input()`` intrinsic: one fresh read from the environment."""

    span: Span = _span()


@dataclass(frozen=True)
class ReplayInput:
    """Shadow-copy read that replays the base copy's value (instrumentation only)."""

    span: Span = _span()


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"
    span: Span = _span()


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    span: Span = _span()


Expr = Union[IntLit, BoolLit, Var, Input, ReplayInput, Unary, Binary]


# -- statements --------------------------------------------------------------


@dataclass(frozen=True)
class Decl:
    sid: int
    name: str
    type: str
    init: Expr
    span: Span = _span()


@dataclass(frozen=True)
class Assign:
    sid: int
    name: str
    expr: Expr
    span: Span = _span()


@dataclass(frozen=True)
class If:
    sid: int
    cond: Expr
    then: tuple
    orelse: tuple = ()
    span: Span = _span()


@dataclass(frozen=True)
class While:
    sid: int
    cond: Expr
    body: tuple
    # fault hooks run before every evaluation of the condition (shadow copy only)
    cond_hooks: tuple = ()
    span: Span = _span()


@dataclass(frozen=True)
class Output:
    sid: int
    expr: Expr
    span: Span = _span()


@dataclass(frozen=True)
class Return:
    sid: int
    expr: Expr
    span: Span = _span()


@dataclass(frozen=True)
class Print:
    sid: int
    expr: Expr
    span: Span = _span()


# -- instrumentation-only statements -----------------------------------------


@dataclass(frozen=True)
class HookSite:
    """Static fault-hook site: the ``use_index``-th syntactic use of ``var`` in statement ``sid``."""

    sid: int
    use_index: int
    var: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Hook:
    site: HookSite
    # first hook of the group guarding one statement execution
    first: bool = True


@dataclass(frozen=True)
class Observe:
    """Output point: append the emitted value to the copy's buffer and update its flag."""

    copy: str  # "base" | "shadow"
    expr: Expr
    sid: int = 0


@dataclass(frozen=True)
class ShareParam:
    """Shadow parameter receives the base copy's input value."""

    name: str
    source: str


@dataclass(frozen=True)
class Assert:
    """``assert(!(phi ^ phi'))``."""


Stmt = Union[Decl, Assign, If, While, Output, Return, Print, Hook, Observe, ShareParam, Assert]


@dataclass(frozen=True)
class Program:
    name: str
    ret_type: str
    params: tuple  # ((name, type), ...)
    locals: tuple  # ((name, type, init), ...)
    body: tuple
    warnings: tuple = field(default=(), compare=False, repr=False)

    @property
    def variables(self) -> list[str]:
        return [p[0] for p in self.params] + [l[0] for l in self.locals]

    def type_of(self, name: str) -> str:
        for n, t in self.params:
            if n == name:
                return t
        for n, t, _ in self.locals:
            if n == name:
                return t
        raise KeyError(name)

    def statements(self) -> list:
        return list(walk(self.body))

    def statement(self, sid: int):
        for s in walk(self.body):
            if s.sid == sid:
                return s
        raise KeyError(sid)

    def control_loop(self) -> Optional[While]:
        """The trailing ``while (true)`` of a control-loop-shaped program, if any.

        A program is control-loop shaped when its body ends in ``while (true)``
        containing an ``output`` statement and it never returns.
        """
        if not self.body:
            return None
        last = self.body[-1]
        if not (isinstance(last, While) and last.cond == BoolLit(True)):
            return None
        stmts = self.statements()
        if any(isinstance(s, Return) for s in stmts):
            return None
        if not any(isinstance(s, Output) for s in walk(last.body)):
            return None
        return last


# -- traversal helpers -------------------------------------------------------


def walk(stmts) -> Iterator:
    """Preorder over source statements (instrumentation nodes are skipped)."""
    for s in stmts:
        if isinstance(s, (Hook, Observe, ShareParam, Assert)):
            continue
        yield s
        if isinstance(s, If):
            yield from walk(s.then)
            yield from walk(s.orelse)
        elif isinstance(s, While):
            yield from walk(s.body)


def expr_vars(e) -> list[str]:
    """Variable occurrences in evaluation order (duplicates kept)."""
    if isinstance(e, Var):
        return [e.name]
    if isinstance(e, Unary):
        return expr_vars(e.operand)
    if isinstance(e, Binary):
        return expr_vars(e.left) + expr_vars(e.right)
    return []


def own_expr(s):
    """The expression a statement itself evaluates (conditions for If/While)."""
    if isinstance(s, (Decl,)):
        return s.init
    if isinstance(s, (If, While)):
        return s.cond
    if isinstance(s, (Assign, Output, Return, Print)):
        return s.expr
    return None


def stmt_uses(s) -> list[str]:
    e = own_expr(s)
    return expr_vars(e) if e is not None else []


def stmt_def(s) -> Optional[str]:
    if isinstance(s, (Decl, Assign)):
        return s.name
    return None


def has_input(e) -> bool:
    if isinstance(e, (Input, ReplayInput)):
        return True
    if isinstance(e, Unary):
        return has_input(e.operand)
    if isinstance(e, Binary):
        return has_input(e.left) or has_input(e.right)
    return False
