"""Brute-force ground truth for conditional relevance.

The oracle never looks at the self-composed program. It runs the original
program twice per input vector, once fault-free and once with the target
variable flipped immediately before its k-th dynamic use, for every k and
every bit, and compares the two runs directly:

    CRV(x)  iff  exists inputs:  all(phi over P) xor all(phi' over P')

i.e. either the fault-free run is safe everywhere and the faulted run violates
somewhere (fault introducing), or the reverse (fault masking). For control-loop
programs the comparison is made after every completed cycle, over the outputs
seen so far, up to the unwind horizon.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .domain import InputDomain
from .lang.ast import (
    Assign, Binary, BoolLit, Decl, HookSite, If, Input, IntLit, Output, Print,
    Program, Return, Unary, Var, While, expr_vars, has_input, own_expr, walk,
)
from .prop import OutputBuffer, SafetySpec, eval_phi
from .values import Trap, div, flip_bit, mod, wrap
from .verdict import (
    CRV, FIRST_USE, INTRODUCING, MASKING, NON_CRV, NONDET, UNKNOWN,
    Counterexample, InputVector, Verdict,
)

DEFAULT_BUDGET = 10_000


@dataclass
class ExecutionRecord:
    trace: list = field(default_factory=list)  # statement ids in visit order
    output_points: list = field(default_factory=list)  # (value, phi, cycle)
    input_log: list = field(default_factory=list)
    terminated: bool = False
    steps: int = 0
    trap: Optional[str] = None
    truncated: Optional[str] = None  # reason when a bound cut the run short
    completed_cycles: int = 0
    stop_cycle: int = 0  # cycle in which the run ended
    use_sites: list = field(default_factory=list)  # sid of each dynamic use of the fault target
    flows: list = field(default_factory=list)  # (writer_sid, reader_sid, var), when requested


class _Stop(Exception):
    pass


class _Returned(Exception):
    pass


class _Horizon(Exception):
    pass


def _eval(e, env):
    t = type(e)
    if t is Var:
        return env[e.name]
    if t is IntLit:
        return e.value
    if t is Binary:
        op = e.op
        if op == "&&":
            return 1 if _eval(e.left, env) != 0 and _eval(e.right, env) != 0 else 0
        if op == "||":
            return 1 if _eval(e.left, env) != 0 or _eval(e.right, env) != 0 else 0
        a = _eval(e.left, env)
        b = _eval(e.right, env)
        if op == "+":
            return wrap(a + b)
        if op == "-":
            return wrap(a - b)
        if op == "*":
            return wrap(a * b)
        if op == "/":
            return div(a, b)
        if op == "%":
            return mod(a, b)
        if op == "<":
            return int(a < b)
        if op == "<=":
            return int(a <= b)
        if op == ">":
            return int(a > b)
        if op == ">=":
            return int(a >= b)
        if op == "==":
            return int(a == b)
        if op == "!=":
            return int(a != b)
        raise ValueError(op)
    if t is BoolLit:
        return 1 if e.value else 0
    if t is Unary:
        v = _eval(e.operand, env)
        return wrap(-v) if e.op == "-" else int(v == 0)
    raise ValueError(f"cannot evaluate {e!r}")


class _Run:
    def __init__(self, program, spec, inputs, fault, unwind, budget, max_cycles, record_flows, uses=None):
        self.p = program
        self.spec = spec
        self.inputs = inputs
        self.target, self.occurrence, self.bit = fault if fault else (None, 0, 0)
        self.unwind = unwind
        self.budget = budget
        self.max_cycles = max_cycles
        self.rec = ExecutionRecord()
        self.env = dict(inputs.params)
        self.buffer = OutputBuffer(spec.window)
        self.cycle = 0
        self.reads = 0
        self.uses = 0
        self.record_flows = record_flows
        self.writer = {n: 0 for n, _ in program.params}
        self.uses_of = uses if uses is not None else use_map(program)
        self.hits = {sid: self.target in names for sid, names in self.uses_of.items()}

    def visit(self, s):
        rec = self.rec
        rec.steps += 1
        if rec.steps > self.budget:
            rec.truncated = "step budget"
            raise _Stop
        sid = s.sid
        rec.trace.append(sid)
        if self.hits[sid]:
            self.uses += 1
            rec.use_sites.append(sid)
            if self.uses == self.occurrence:
                self.env[self.target] = flip_bit(self.env[self.target], self.bit)
        if self.record_flows:
            for v in set(self.uses_of[sid]):
                rec.flows.append((self.writer.get(v, 0), sid, v))

    def read(self):
        streams = self.inputs.streams
        stream = streams[self.cycle] if self.cycle < len(streams) else ()
        if self.reads >= len(stream):
            self.rec.truncated = "input stream exhausted"
            raise _Stop
        v = stream[self.reads]
        self.reads += 1
        self.rec.input_log.append(v)
        return v

    def block(self, stmts):
        for s in stmts:
            self.stmt(s)

    def stmt(self, s):
        t = type(s)
        if t is Print:
            self.visit(s)  # a use site, but never evaluated
            return
        self.visit(s)
        env = self.env
        if t is Assign or t is Decl:
            e = s.expr if t is Assign else s.init
            env[s.name] = self.read() if type(e) is Input else _eval(e, env)
            self.writer[s.name] = s.sid
        elif t is If:
            if _eval(s.cond, env) != 0:
                self.block(s.then)
            else:
                self.block(s.orelse)
        elif t is While:
            n = 0
            while _eval(s.cond, env) != 0:
                n += 1
                if n > self.unwind:
                    self.rec.truncated = f"unwind bound {self.unwind} at line {s.span.line}"
                    raise _Stop
                self.block(s.body)
                self.visit(s)
        elif t is Output or t is Return:
            v = _eval(s.expr, env)
            self.buffer.append(v)
            self.rec.output_points.append((v, eval_phi(self.spec, self.buffer), self.cycle))
            if t is Return:
                raise _Returned
        else:
            raise TypeError(s)

    def control_loop(self, loop):
        self.visit(loop)
        while True:
            if self.cycle == self.max_cycles:
                raise _Horizon
            self.cycle += 1
            self.reads = 0
            self.block(loop.body)
            self.rec.completed_cycles = self.cycle
            self.visit(loop)

    def run(self) -> ExecutionRecord:
        loop = self.p.control_loop()
        try:
            try:
                if loop is None:
                    self.block(self.p.body)
                    raise _Returned
                self.block(self.p.body[:-1])
                self.control_loop(loop)
            except (_Returned, _Horizon):
                self.rec.terminated = True
                if loop is None:
                    self.rec.completed_cycles = 1
        except _Stop:
            pass
        except Trap as exc:
            self.rec.trap = str(exc)
        self.rec.stop_cycle = self.cycle
        return self.rec


def use_map(program: Program) -> dict:
    """Variables each statement's own expression reads, by statement id."""
    return {s.sid: expr_vars(own_expr(s)) if own_expr(s) is not None else [] for s in walk(program.body)}


def run_concrete(
    program: Program,
    spec: SafetySpec,
    inputs,
    fault=None,
    *,
    unwind: int = 16,
    budget: int = DEFAULT_BUDGET,
    max_cycles: Optional[int] = None,
    record_flows: bool = False,
    uses: Optional[dict] = None,
) -> ExecutionRecord:
    """Execute the original program on one input vector.

    ``fault`` is ``(variable, occurrence, bit)``: the variable's stored value is
    flipped immediately before the statement performing its ``occurrence``-th
    dynamic use (1-based) and stays flipped. ``inputs`` is an InputVector or a
    plain dict of parameter values.
    """
    if isinstance(inputs, dict):
        inputs = InputVector(dict(inputs))
    if max_cycles is None:
        max_cycles = unwind
    return _Run(program, spec, inputs, fault, unwind, budget, max_cycles, record_flows, uses).run()


def divergence(program: Program, clean: ExecutionRecord, faulted: ExecutionRecord) -> Optional[str]:
    """Direction in which the fault flips the property's verdict, or None.

    Only prefixes completed by both runs are compared: the whole run for
    terminating programs, each completed cycle for control loops.
    """
    if program.control_loop() is None:
        checkpoints = [0] if clean.completed_cycles and faulted.completed_cycles else []
    else:
        checkpoints = range(1, min(clean.completed_cycles, faulted.completed_cycles) + 1)
    for k in checkpoints:
        safe = all(phi for _, phi, c in clean.output_points if c <= k)
        safe_f = all(phi for _, phi, c in faulted.output_points if c <= k)
        if safe != safe_f:
            return INTRODUCING if safe else MASKING
    return None


def input_vectors(program: Program, domains: InputDomain, cycles: int):
    """All input vectors in ascending lexicographic order (parameters, then per-cycle streams)."""
    params = [n for n, _ in program.params]
    uses_input = any(has_input(own_expr(s)) for s in walk(program.body) if own_expr(s) is not None)
    n_cycles = (cycles + 1) if program.control_loop() is not None else 1
    stream_len = domains.reads_per_cycle if uses_input else 0
    slots = n_cycles * stream_len
    choices = [domains.values(p) for p in params] + [domains.input_values()] * slots
    for combo in itertools.product(*choices):
        pv = dict(zip(params, combo[: len(params)]))
        flat = combo[len(params):]
        streams = tuple(tuple(flat[i * stream_len:(i + 1) * stream_len]) for i in range(n_cycles)) if slots else ()
        yield InputVector(pv, streams)


def _paired_points(clean, faulted):
    out = []
    for a, b in itertools.zip_longest(clean.output_points, faulted.output_points):
        out.append((a[0] if a else None, b[0] if b else None, a[1] if a else None, b[1] if b else None))
    return tuple(out)


def make_counterexample(program, x, vec, clean, faulted, occurrence, bit, direction, site=None):
    if site is None:
        sid = faulted.use_sites[occurrence - 1] if occurrence <= len(faulted.use_sites) else 0
        line = program.statement(sid).span.line if sid else 0
        site = HookSite(sid, 0, x, line)
    return Counterexample(
        input_vector=vec,
        hook_site=site,
        occurrence=occurrence,
        bit_position=bit,
        direction=direction,
        trace=tuple(clean.trace),
        trace_faulted=tuple(faulted.trace),
        output_points=_paired_points(clean, faulted),
    )


def oracle_classify(
    program: Program,
    spec: SafetySpec,
    x: str,
    domains: InputDomain,
    *,
    unwind: int = 16,
    cycles: Optional[int] = None,
    budget: int = DEFAULT_BUDGET,
    bits=range(32),
    trigger: str = NONDET,
) -> Verdict:
    if x not in program.variables:
        raise ValueError(f"unknown variable {x!r}")
    cycles = unwind if cycles is None else cycles
    kw = dict(unwind=unwind, budget=budget, max_cycles=cycles, uses=use_map(program))
    bounded = False
    traps = 0
    first_mask = None
    runs = 0
    for vec in input_vectors(program, domains, cycles):
        clean = run_concrete(program, spec, vec, (x, 0, 0), **kw)
        runs += 1
        bounded |= clean.truncated is not None
        traps += clean.trap is not None
        n = len(clean.use_sites)
        occurrences = range(1, min(n, 1) + 1) if trigger == FIRST_USE else range(1, n + 1)
        for k in occurrences:
            for b in bits:
                faulted = run_concrete(program, spec, vec, (x, k, b), **kw)
                runs += 1
                bounded |= _observable_truncation(clean, faulted)
                traps += faulted.trap is not None
                d = divergence(program, clean, faulted)
                if d == INTRODUCING:
                    cex = make_counterexample(program, x, vec, clean, faulted, k, b, d)
                    return _verdict(x, CRV, d, cex, bounded, traps, runs, (unwind, cycles), domains, program)
                if d == MASKING and first_mask is None:
                    first_mask = make_counterexample(program, x, vec, clean, faulted, k, b, d)
    if first_mask is not None:
        return _verdict(x, CRV, MASKING, first_mask, bounded, traps, runs, (unwind, cycles), domains, program)
    return _verdict(x, UNKNOWN if bounded else NON_CRV, None, None, bounded, traps, runs, (unwind, cycles), domains, program)


def _observable_truncation(clean, faulted) -> bool:
    """Whether a truncated faulted run cut off a comparison that could still matter.

    Once the fault-free run traps in some cycle, nothing from that cycle on is
    compared, so a faulted run truncated there or later is irrelevant.
    """
    if faulted.truncated is None:
        return False
    return clean.trap is None or faulted.stop_cycle < clean.stop_cycle


def _verdict(x, cls, direction, cex, bounded, traps, runs, limits, domains, program):
    unwind, cycles = limits
    diags = []
    if traps:
        diags.append(f"{traps} run(s) trapped (division by zero); not counted as property violations")
    if bounded:
        diags.append("a bound truncated at least one run")
    bounds = {"unwind": unwind, "domains": domains.describe([n for n, _ in program.params])}
    if program.control_loop() is not None:
        bounds["cycles"] = cycles
    return Verdict(
        variable=x,
        classification=cls,
        direction=direction,
        counterexample=cex,
        bounds=bounds,
        engine="oracle",
        diagnostics=tuple(diags),
        stats={"runs": runs, "traps": traps},
    )
