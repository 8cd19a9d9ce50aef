"""Self-composition with single-event-upset hooks.

``self_compose`` builds the composite program

* terminating programs:   I;S  then  I';S'  then  assert(!(phi ^ phi'))
* control-loop programs:  I; I'; while (true) { S; S'; assert(!(phi ^ phi')) }

where ``S`` is the program body with an output point before each ``output`` /
``return`` (``O.append(o); phi = phi && Phi(O)``) and the primed copy is the
body renamed ``v -> v'`` with a fault hook before each syntactic use of the
variable under investigation. The flags are cumulative, so the assertion fails
exactly when one copy has violated the property and the other has not.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .lang.ast import (
    Assert, Assign, Binary, Decl, Hook, HookSite, If, Input, Observe, Output,
    Print, Program, ReplayInput, Return, ShareParam, Unary, Var, While,
    expr_vars, own_expr,
)
from .lang.printer import format_stmts
from .prop import SafetySpec

SHADOW_SUFFIX = "'"
CONTROL_LOOP = "ControlLoop"
TERMINATING = "Terminating"


class InstrumentError(ValueError):
    pass


# -- renaming ---------------------------------------------------------------


def _rename_expr(e, m):
    if isinstance(e, Var):
        return Var(m(e.name), e.span)
    if isinstance(e, Unary):
        return Unary(e.op, _rename_expr(e.operand, m), e.span)
    if isinstance(e, Binary):
        return Binary(e.op, _rename_expr(e.left, m), _rename_expr(e.right, m), e.span)
    return e


def rename(fragment, suffix: str = SHADOW_SUFFIX, variables=None) -> tuple:
    """Rename every variable ``v`` (optionally only those in ``variables``) to ``v + suffix``."""
    vs = None if variables is None else set(variables)

    def m(name):
        return name + suffix if vs is None or name in vs else name

    def stmt(s):
        if isinstance(s, Decl):
            return replace(s, name=m(s.name), init=_rename_expr(s.init, m))
        if isinstance(s, Assign):
            return replace(s, name=m(s.name), expr=_rename_expr(s.expr, m))
        if isinstance(s, If):
            return replace(s, cond=_rename_expr(s.cond, m), then=block(s.then), orelse=block(s.orelse))
        if isinstance(s, While):
            return replace(s, cond=_rename_expr(s.cond, m), body=block(s.body))
        if isinstance(s, (Output, Return, Print)):
            return replace(s, expr=_rename_expr(s.expr, m))
        if isinstance(s, Observe):
            return replace(s, expr=_rename_expr(s.expr, m))
        return s

    def block(b):
        return tuple(stmt(s) for s in b)

    return block(fragment)


def _replay_inputs(fragment) -> tuple:
    """Shadow reads replay the base copy's values instead of reading afresh."""

    def stmt(s):
        if isinstance(s, Decl) and isinstance(s.init, Input):
            return replace(s, init=ReplayInput(s.init.span))
        if isinstance(s, Assign) and isinstance(s.expr, Input):
            return replace(s, expr=ReplayInput(s.expr.span))
        if isinstance(s, If):
            return replace(s, then=block(s.then), orelse=block(s.orelse))
        if isinstance(s, While):
            return replace(s, body=block(s.body))
        return s

    def block(b):
        return tuple(stmt(s) for s in b)

    return block(fragment)


# -- hooks and output points --------------------------------------------------


def insert_fault_hooks(fragment, var: str, _sites: list | None = None):
    """Insert one hook before the enclosing statement for each syntactic use of ``var``.

    Returns ``(fragment, sites)``. Loop-test uses become hooks run before every
    evaluation of the test.
    """
    sites = [] if _sites is None else _sites

    def hooks_for(s):
        e = own_expr(s)
        n = expr_vars(e).count(var) if e is not None else 0
        hs = []
        for k in range(n):
            site = HookSite(s.sid, k, var, s.span.line)
            sites.append(site)
            hs.append(Hook(site, first=(k == 0)))
        return hs

    def block(b):
        out = []
        for s in b:
            if isinstance(s, While):
                hs = hooks_for(s)
                out.append(replace(s, body=block(s.body), cond_hooks=tuple(hs)))
            elif isinstance(s, If):
                out += hooks_for(s)
                then = block(s.then)
                orelse = block(s.orelse)
                out.append(replace(s, then=then, orelse=orelse))
            else:
                out += hooks_for(s)
                out.append(s)
        return tuple(out)

    return block(fragment), sites


def add_output_points(fragment, copy: str) -> tuple:
    def block(b):
        out = []
        for s in b:
            if isinstance(s, (Output, Return)):
                out.append(Observe(copy, s.expr, s.sid))
                out.append(s)
            elif isinstance(s, If):
                out.append(replace(s, then=block(s.then), orelse=block(s.orelse)))
            elif isinstance(s, While):
                out.append(replace(s, body=block(s.body)))
            else:
                out.append(s)
        return tuple(out)

    return block(fragment)


# -- self-composition ---------------------------------------------------------


@dataclass(frozen=True)
class InstrumentedProgram:
    program: Program
    spec: SafetySpec
    target: str
    shadow_target: str
    shape: str
    base_init: tuple
    base_step: tuple
    shadow_init: tuple
    shadow_step: tuple
    hooks: tuple
    shares: tuple = ()  # shadow parameters take the base inputs before either copy runs
    phi_vars: tuple = ("phi", "phi" + SHADOW_SUFFIX)
    assertion: Assert = Assert()
    loop_sid: int = 0

    @property
    def base(self) -> tuple:
        return self.base_init + self.base_step

    @property
    def shadow(self) -> tuple:
        return self.shadow_init + self.shadow_step

    @property
    def variables(self) -> list:
        return self.program.variables

    @property
    def shadow_variables(self) -> list:
        return [v + SHADOW_SUFFIX for v in self.program.variables]


def self_compose(program: Program, spec: SafetySpec, x: str) -> InstrumentedProgram:
    V = program.variables
    if x not in V:
        raise InstrumentError(f"variable {x!r} is not declared in {program.name}")
    if spec.output_variable not in V:
        raise InstrumentError(f"property variable {spec.output_variable!r} is not declared in {program.name}")
    xs = x + SHADOW_SUFFIX
    loop = program.control_loop()
    if loop is not None:
        shape = CONTROL_LOOP
        init, step = program.body[:-1], loop.body
    else:
        shape = TERMINATING
        init, step = program.body, ()

    sites: list = []

    def shadow_of(frag):
        frag = _replay_inputs(rename(frag, SHADOW_SUFFIX))
        frag, _ = insert_fault_hooks(frag, xs, sites)
        return add_output_points(frag, "shadow")

    shares = tuple(ShareParam(n + SHADOW_SUFFIX, n) for n, _ in program.params)
    shadow_init = shadow_of(init)
    shadow_step = shadow_of(step)
    return InstrumentedProgram(
        program=program,
        spec=spec,
        target=x,
        shadow_target=xs,
        shape=shape,
        base_init=add_output_points(init, "base"),
        base_step=add_output_points(step, "base"),
        shadow_init=shadow_init,
        shadow_step=shadow_step,
        hooks=tuple(sites),
        shares=shares,
        loop_sid=loop.sid if loop is not None else 0,
    )


def strip_hooks(fragment) -> tuple:
    """Remove hooks and output points; the inverse of instrumentation up to renaming."""
    out = []
    for s in fragment:
        if isinstance(s, (Hook, Observe, ShareParam, Assert)):
            continue
        if isinstance(s, If):
            s = replace(s, then=strip_hooks(s.then), orelse=strip_hooks(s.orelse))
        elif isinstance(s, While):
            s = replace(s, body=strip_hooks(s.body), cond_hooks=())
        out.append(s)
    return tuple(out)


def emit(instr: InstrumentedProgram) -> str:
    """The composite program in CtrlC-like concrete syntax, for inspection."""
    p = instr.program
    params = ", ".join(f"{t} {n}" for n, t in p.params)
    spec = instr.spec
    lines = [
        f"// self-composition of {p.name} for SEU on {instr.target!r} ({instr.shape})",
        f"// Phi(O): {spec.text()}; O holds the last {spec.window} output value(s)",
        f"void {p.name}__instrumented({params}) {{",
        "  bool phi = true;",
        "  bool phi' = true;",
    ]
    lines += format_stmts(instr.shares, 1)

    def body(frag, ind, done_label):
        out = []
        for line in format_stmts(frag, ind):
            stripped = line.lstrip()
            if stripped.startswith("return "):
                pad = line[: len(line) - len(stripped)]
                out.append(f"{pad}goto {done_label};  // {stripped}")
            else:
                out.append(line)
        return out

    if instr.shape == TERMINATING:
        lines.append("  // I;S -- original copy")
        lines += body(instr.base_init, 1, "base_done")
        lines.append("base_done:")
        lines.append("  // I';S' -- shadow copy with SEU hooks")
        lines += body(instr.shadow_init, 1, "shadow_done")
        lines.append("shadow_done:")
        lines.append("  assert(!(phi ^ phi'));")
    else:
        lines.append("  // I -- original initialisation")
        lines += body(instr.base_init, 1, "")
        lines.append("  // I' -- shadow initialisation with SEU hooks")
        lines += body(instr.shadow_init, 1, "")
        lines.append("  while (true) {")
        lines.append("    // S")
        lines += body(instr.base_step, 2, "")
        lines.append("    // S'")
        lines += body(instr.shadow_step, 2, "")
        lines.append("    assert(!(phi ^ phi'));")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"
