"""Bounded exhaustive checking of the self-composed program.

The composite (see ``instrument.self_compose``) is compiled into a flat list of
instructions whose expressions are Python closures over a single environment
list holding both copies' variables plus one iteration counter per loop. The
machine explores, depth first, every resolution of the nondeterminism left
after fixing the parameters:

* ``input()`` values read by the base copy (and fresh values for reads the
  shadow copy makes beyond what the base recorded in the same cycle),
* at each fault hook that has not fired yet: flip one of the allowed bits now,
  or not at all (only "now" for the first-use trigger).

Choices are tried in ascending order with "no flip" last, and parameter
vectors ascend lexicographically, so the first counterexample found is the
first in that canonical order. A fault-introducing witness stops the search;
a fault-masking witness is remembered and the search continues in case an
introducing one exists.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Optional

from .domain import InputDomain
from .instrument import CONTROL_LOOP, InstrumentedProgram, self_compose
from .lang.ast import (
    Assign, Binary, BoolLit, Decl, Hook, If, Input, IntLit, Observe, Output,
    Print, Program, ReplayInput, Return, ShareParam, Unary, Var, While,
    has_input, own_expr, walk,
)
from .oracle import DEFAULT_BUDGET, divergence, make_counterexample, run_concrete
from .prop import SafetySpec, phi_function
from .slicer import slice_program
from .values import Trap, div, flip_bit, mod
from .verdict import (
    CRV, FIRST_USE, INTRODUCING, MASKING, NON_CRV, NONDET, UNKNOWN,
    Counterexample, FaultModel, InputVector, Verdict,
)

log = logging.getLogger(__name__)

_M = 1 << 32
_H = 1 << 31

(ASSIGN, READ_BASE, READ_SHADOW, BRANCH, JUMP, LOOP_ENTER, LOOP_TEST, HOOK,
 OBSERVE, ASSERT, CYCLE, SHADOW_START, HALT) = range(13)


class CheckerError(RuntimeError):
    """Internal inconsistency, e.g. a counterexample that does not replay."""


# -- expression compilation ---------------------------------------------------


def _cexpr(e, idx):
    t = type(e)
    if t is Var:
        i = idx[e.name]
        return lambda env: env[i]
    if t is IntLit:
        v = e.value
        return lambda env: v
    if t is BoolLit:
        v = 1 if e.value else 0
        return lambda env: v
    if t is Unary:
        f = _cexpr(e.operand, idx)
        if e.op == "-":
            return lambda env: ((_H - f(env)) % _M) - _H
        return lambda env: 0 if f(env) else 1
    if t is Binary:
        a = _cexpr(e.left, idx)
        b = _cexpr(e.right, idx)
        op = e.op
        if op == "+":
            return lambda env: ((a(env) + b(env) + _H) % _M) - _H
        if op == "-":
            return lambda env: ((a(env) - b(env) + _H) % _M) - _H
        if op == "*":
            return lambda env: ((a(env) * b(env) + _H) % _M) - _H
        if op == "/":
            return lambda env: div(a(env), b(env))
        if op == "%":
            return lambda env: mod(a(env), b(env))
        if op == "<":
            return lambda env: 1 if a(env) < b(env) else 0
        if op == "<=":
            return lambda env: 1 if a(env) <= b(env) else 0
        if op == ">":
            return lambda env: 1 if a(env) > b(env) else 0
        if op == ">=":
            return lambda env: 1 if a(env) >= b(env) else 0
        if op == "==":
            return lambda env: 1 if a(env) == b(env) else 0
        if op == "!=":
            return lambda env: 1 if a(env) != b(env) else 0
        if op == "&&":
            return lambda env: 1 if a(env) and b(env) else 0
        if op == "||":
            return lambda env: 1 if a(env) or b(env) else 0
        raise ValueError(f"unknown operator {op!r}")
    raise ValueError(f"cannot compile {e!r}")


# -- statement compilation ----------------------------------------------------


@dataclass
class Machine:
    code: list
    copy_of: list  # "base" / "shadow" per instruction, for diagnostics
    index: dict  # variable name (shadow names primed) -> env slot
    size: int  # env length
    params: list


class _Compiler:
    def __init__(self, instr: InstrumentedProgram):
        self.instr = instr
        names = instr.variables + instr.shadow_variables
        self.index = {n: i for i, n in enumerate(names)}
        self.size = len(names)
        self.code = []
        self.copy_of = []

    def emit(self, copy, *op):
        self.code.append(list(op))
        self.copy_of.append(copy)
        return len(self.code) - 1

    def here(self):
        return len(self.code)

    def slot(self):
        self.size += 1
        return self.size - 1

    def block(self, stmts, copy, returns):
        for s in stmts:
            self.stmt(s, copy, returns)

    def stmt(self, s, copy, returns):
        idx = self.index
        t = type(s)
        if t is Decl or t is Assign:
            e = s.init if t is Decl else s.expr
            if type(e) is Input:
                self.emit(copy, READ_BASE, idx[s.name])
            elif type(e) is ReplayInput:
                self.emit(copy, READ_SHADOW, idx[s.name])
            else:
                self.emit(copy, ASSIGN, idx[s.name], _cexpr(e, idx))
        elif t is If:
            br = self.emit(copy, BRANCH, _cexpr(s.cond, idx), None)
            self.block(s.then, copy, returns)
            if s.orelse:
                j = self.emit(copy, JUMP, None)
                self.code[br][2] = self.here()
                self.block(s.orelse, copy, returns)
                self.code[j][1] = self.here()
            else:
                self.code[br][2] = self.here()
        elif t is While:
            slot = self.slot()
            self.emit(copy, LOOP_ENTER, slot)
            top = self.here()
            for h in s.cond_hooks:
                self.stmt(h, copy, returns)
            test = self.emit(copy, LOOP_TEST, _cexpr(s.cond, idx), slot, None, s.span.line)
            self.block(s.body, copy, returns)
            self.emit(copy, JUMP, top)
            self.code[test][3] = self.here()
        elif t is Hook:
            if s.first:  # later hooks guarding the same statement are observationally identical
                self.emit(copy, HOOK, idx[self.instr.shadow_target], s.site)
        elif t is Observe:
            self.emit(copy, OBSERVE, 0 if s.copy == "base" else 1, _cexpr(s.expr, idx))
        elif t is ShareParam:
            src = idx[s.source]
            self.emit(copy, ASSIGN, idx[s.name], lambda env: env[src])
        elif t is Return:
            returns.append(self.emit(copy, JUMP, None))
        elif t is Output or t is Print:
            pass
        else:
            raise TypeError(f"unexpected statement {s!r}")

    def compile(self) -> Machine:
        ins = self.instr
        self.block(ins.shares, "shadow", [])
        if ins.shape == CONTROL_LOOP:
            self.block(ins.base_init, "base", [])
            self.block(ins.shadow_init, "shadow", [])
            top = self.emit("base", CYCLE)
            self.block(ins.base_step, "base", [])
            self.block(ins.shadow_step, "shadow", [])
            self.emit("shadow", ASSERT)
            self.emit("shadow", JUMP, top)
        else:
            rets = []
            self.block(ins.base_init, "base", rets)
            for r in rets:
                self.code[r][1] = self.here()
            self.emit("shadow", SHADOW_START)
            rets = []
            self.block(ins.shadow_init, "shadow", rets)
            for r in rets:
                self.code[r][1] = self.here()
            self.emit("shadow", ASSERT)
            self.emit("shadow", HALT)
        code = [tuple(op) for op in self.code]
        return Machine(code, self.copy_of, self.index, self.size, [n for n, _ in ins.program.params])


def compile_instrumented(instr: InstrumentedProgram) -> Machine:
    return _Compiler(instr).compile()


# -- exploration --------------------------------------------------------------


class _Search:
    """Mutable bookkeeping for one ``check`` call."""

    def __init__(self, machine, spec, fault, domains, unwind, max_cycles, fixed=None):
        self.m = machine
        self.window = spec.window
        self.phi = phi_function(spec)
        self.fault = fault
        self.bits = tuple(fault.bits) if fault is not None else ()
        self.first_use = fault is not None and fault.trigger == FIRST_USE
        self.values = tuple(domains.input_values())
        self.rpc = domains.reads_per_cycle
        self.unwind = unwind
        self.max_cycles = max_cycles
        self.fixed = fixed  # per-cycle input streams for a single concrete run
        self.intro = None
        self.mask = None
        self.truncated = 0
        self.truncation = None
        self.traps = 0
        self.trap_messages = []
        self.paths = 0
        self.finished = []  # (outb, outs, assertion_failures) when running concretely
        self.failures = 0

    def run(self, params: dict) -> bool:
        """Explore everything under one parameter vector. True when the search can stop."""
        env = [0] * self.m.size
        for n, v in params.items():
            env[self.m.index[n]] = v
        # pc, env, bufb, bufs, phib, phis, flip, occ, breads, spos, cycle, log, extra, outb, outs
        stack = [(0, env, (), (), True, True, None, 0, (), 0, 0, (), False, (), ())]
        code = self.m.code
        window = self.window
        phi = self.phi
        unwind = self.unwind
        rpc = self.rpc
        values = self.values
        fault = self.fault
        bits = self.bits
        first_use = self.first_use
        fixed = self.fixed
        while stack:
            (pc, env, bufb, bufs, phib, phis, flip, occ, breads, spos, cycle, rlog, extra,
             outb, outs) = stack.pop()
            self.paths += 1
            try:
                while True:
                    op = code[pc]
                    k = op[0]
                    if k == ASSIGN:
                        env[op[1]] = op[2](env)
                        pc += 1
                    elif k == BRANCH:
                        pc = pc + 1 if op[1](env) else op[2]
                    elif k == LOOP_TEST:
                        if op[1](env):
                            n = env[op[2]] + 1
                            if n > unwind:
                                self._truncate(f"unwind bound {unwind} at line {op[4]}")
                                break
                            env[op[2]] = n
                            pc += 1
                        else:
                            pc = op[3]
                    elif k == JUMP:
                        pc = op[1]
                    elif k == LOOP_ENTER:
                        env[op[1]] = 0
                        pc += 1
                    elif k == HOOK:
                        if fault is None or flip is not None:
                            pc += 1
                            continue
                        occ += 1
                        i, site = op[1], op[2]
                        alts = []
                        if not first_use:
                            alts.append((pc + 1, env[:], bufb, bufs, phib, phis, None, occ, breads, spos,
                                         cycle, rlog, extra, outb, outs))
                        v = env[i]
                        for b in reversed(bits):
                            e2 = env[:]
                            e2[i] = flip_bit(v, b)
                            alts.append((pc + 1, e2, bufb, bufs, phib, phis, (occ, b, site), occ, breads,
                                         spos, cycle, rlog, extra, outb, outs))
                        stack.extend(alts)
                        break
                    elif k == OBSERVE:
                        v = op[2](env)
                        if op[1] == 0:
                            bufb = (bufb + (v,))[-window:]
                            phib = phib and phi(bufb)
                            outb = outb + (v,)
                        else:
                            bufs = (bufs + (v,))[-window:]
                            phis = phis and phi(bufs)
                            outs = outs + (v,)
                        pc += 1
                    elif k == ASSERT:
                        if phib != phis:
                            self.failures += 1
                            if fixed is not None:
                                break
                            d = INTRODUCING if phib else MASKING
                            w = (d, params, rlog, flip, extra)
                            if d == INTRODUCING:
                                self.intro = w
                                return True
                            if self.mask is None:
                                self.mask = w
                            break
                        pc += 1
                    elif k == READ_BASE:
                        pos = len(breads)
                        if pos >= rpc:
                            self._truncate("input() reads per cycle exceeded")
                            break
                        i = op[1]
                        if fixed is not None:
                            v = fixed[cycle][pos]
                            env[i] = v
                            breads = breads + (v,)
                            rlog = rlog + ((cycle, pos, v),)
                            pc += 1
                            continue
                        alts = []
                        for v in reversed(values):
                            e2 = env[:]
                            e2[i] = v
                            alts.append((pc + 1, e2, bufb, bufs, phib, phis, flip, occ, breads + (v,), spos,
                                         cycle, rlog + ((cycle, pos, v),), extra, outb, outs))
                        stack.extend(alts)
                        break
                    elif k == READ_SHADOW:
                        i = op[1]
                        if spos < len(breads):
                            env[i] = breads[spos]
                            spos += 1
                            pc += 1
                            continue
                        if spos >= rpc:
                            self._truncate("input() reads per cycle exceeded")
                            break
                        if fixed is not None:
                            v = fixed[cycle][spos]
                            env[i] = v
                            rlog = rlog + ((cycle, spos, v),)
                            spos += 1
                            extra = True
                            pc += 1
                            continue
                        alts = []
                        for v in reversed(values):
                            e2 = env[:]
                            e2[i] = v
                            alts.append((pc + 1, e2, bufb, bufs, phib, phis, flip, occ, breads, spos + 1,
                                         cycle, rlog + ((cycle, spos, v),), True, outb, outs))
                        stack.extend(alts)
                        break
                    elif k == CYCLE:
                        if cycle == self.max_cycles:
                            self.finished.append((outb, outs))
                            break
                        cycle += 1
                        breads = ()
                        spos = 0
                        pc += 1
                    elif k == SHADOW_START:
                        spos = 0
                        pc += 1
                    elif k == HALT:
                        self.finished.append((outb, outs))
                        break
                    else:
                        raise CheckerError(f"bad opcode {k}")
            except Trap as exc:
                self.traps += 1
                if len(self.trap_messages) < 5:
                    self.trap_messages.append(f"{self.m.copy_of[pc]} copy: {exc}")
        return False

    def _truncate(self, reason):
        self.truncated += 1
        if self.truncation is None:
            self.truncation = reason


def _uses_input(program: Program) -> bool:
    return any(has_input(own_expr(s)) for s in walk(program.body) if own_expr(s) is not None)


def _input_vector(program, domains, cycles, params, rlog) -> InputVector:
    """A full input vector consistent with the reads made on a path (unread slots take the lowest value)."""
    if not _uses_input(program):
        return InputVector(dict(params))
    n_cycles = cycles + 1 if program.control_loop() is not None else 1
    lo = domains.input_range[0]
    streams = [[lo] * domains.reads_per_cycle for _ in range(n_cycles)]
    for c, p, v in rlog:
        streams[c][p] = v
    return InputVector(dict(params), tuple(tuple(s) for s in streams))


def _validated(instr, domains, unwind, cycles, witness) -> Counterexample:
    """Replay a witness with the concrete interpreter; refuse to report it otherwise."""
    direction, params, rlog, flip, extra = witness
    p, spec, x = instr.program, instr.spec, instr.target
    occ, bit, site = flip
    vec = _input_vector(p, domains, cycles, params, rlog)
    kw = dict(unwind=unwind, budget=10 * DEFAULT_BUDGET, max_cycles=cycles)
    clean = run_concrete(p, spec, vec, (x, 0, 0), **kw)
    faulted = run_concrete(p, spec, vec, (x, occ, bit), **kw)
    got = divergence(p, clean, faulted)
    if got != direction:
        raise CheckerError(
            f"counterexample for {x!r} does not replay: expected {direction}, concrete runs give {got} "
            f"(inputs {vec.to_dict()}, occurrence {occ}, bit {bit})"
        )
    cex = make_counterexample(p, x, vec, clean, faulted, occ, bit, direction, site=site)
    if extra:
        cex = replace(cex, extra_reads=True)
    return cex


def check(
    instr: InstrumentedProgram,
    fault: Optional[FaultModel],
    domains: InputDomain,
    unwind: int = 16,
    *,
    cycles: Optional[int] = None,
    validate: bool = True,
) -> Verdict:
    """Explore all inputs and fault resolutions of the composite.

    Loops are cut after ``unwind`` iterations per activation; control-loop
    programs run ``cycles`` control cycles (default ``unwind``).
    ``fault=None`` disables every hook (the shadow then mirrors the base copy).
    """
    if unwind < 0:
        raise ValueError("unwind must be >= 0")
    cycles = unwind if cycles is None else cycles
    machine = compile_instrumented(instr)
    search = _Search(machine, instr.spec, fault, domains, unwind, cycles)
    for combo in domains.param_vectors(machine.params):
        if search.run(dict(zip(machine.params, combo))):
            break
    witness = search.intro or search.mask
    p = instr.program
    bounds = {"unwind": unwind, "domains": domains.describe(machine.params)}
    if instr.shape == CONTROL_LOOP:
        bounds["cycles"] = cycles
    if fault is not None:
        bounds["fault_bits"] = list(fault.bit_positions)
        bounds["trigger"] = fault.trigger
    diags = []
    if search.traps:
        diags.append(f"{search.traps} path(s) trapped and were excluded: " + "; ".join(search.trap_messages))
    if search.truncated:
        diags.append(f"{search.truncated} path(s) truncated: {search.truncation}")
    stats = {"paths": search.paths, "truncated": search.truncated, "traps": search.traps}
    if witness is not None:
        cex = _validated(instr, domains, unwind, cycles, witness) if validate else None
        return Verdict(instr.target, CRV, witness[0], cex, bounds, "checker", False, tuple(diags), stats)
    cls = UNKNOWN if search.truncated else NON_CRV
    return Verdict(instr.target, cls, None, None, bounds, "checker", False, tuple(diags), stats)


def run_composite(instr: InstrumentedProgram, vector: InputVector, unwind: int = 16,
                  domains: Optional[InputDomain] = None, cycles: Optional[int] = None):
    """Run the composite once on concrete inputs with every hook disabled.

    Returns ``(base_outputs, shadow_outputs, assertion_failures, truncated, trapped)``.
    """
    if domains is None:
        domains = InputDomain()
    cycles = unwind if cycles is None else cycles
    machine = compile_instrumented(instr)
    streams = list(vector.streams) + [()] * (cycles + 1 - len(vector.streams))
    search = _Search(machine, instr.spec, None, domains, unwind, cycles, fixed=streams)
    # the fixed stream bounds reads, not the domain
    search.rpc = max([domains.reads_per_cycle] + [len(s) for s in streams])
    try:
        search.run(dict(vector.params))
    except IndexError:
        return (), (), 0, True, False
    outb, outs = search.finished[0] if search.finished else ((), ())
    return outb, outs, search.failures, bool(search.truncated), bool(search.traps)


# -- per-variable pipeline ----------------------------------------------------


@dataclass(frozen=True)
class CheckConfig:
    domains: InputDomain = InputDomain()
    unwind: int = 16
    cycles: Optional[int] = None
    bit_positions: tuple = (0, 31)
    trigger: str = NONDET
    prune: bool = True
    validate: bool = True


def classify_variable(program: Program, spec: SafetySpec, x: str, config: CheckConfig = CheckConfig(), sl=None) -> Verdict:
    if x not in program.variables:
        raise ValueError(f"unknown variable {x!r}")
    if config.prune:
        sl = sl if sl is not None else slice_program(program, spec)
        if x not in sl.relevant_variables:
            log.debug("%s: pruned by slicing", x)
            return Verdict(x, NON_CRV, engine="slice", pruned=True,
                           bounds={"unwind": config.unwind},
                           diagnostics=("not in the backward slice of the output",))
    instr = self_compose(program, spec, x)
    fault = FaultModel(x, tuple(config.bit_positions), config.trigger)
    return check(instr, fault, config.domains, config.unwind, cycles=config.cycles, validate=config.validate)
