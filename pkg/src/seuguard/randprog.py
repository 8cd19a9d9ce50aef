"""Random CtrlC programs for differential testing.

Generated programs are small enough for the brute-force oracle and shaped so
that every loop and every input read can influence the output:

* loops are counted (``while (i < K)`` with ``K`` at most the loop bound) and
  each loop body accumulates into the output variable,
* the output variable is only ever updated as ``o = o + e``, never
  overwritten, so no loop is dead with respect to the output,
* ``input()`` reads sit at the top level of the body (never under a branch),
  so the number of reads per cycle does not depend on any variable.

Without these rules a flip on a variable outside the slice could still change
how often a loop runs (and hit the unwind bound) or which stream value a later
read sees, which slicing cannot account for.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .domain import InputDomain
from .lang import parse
from .lang.ast import walk


@dataclass(frozen=True)
class GenConfig:
    max_stmts: int = 20
    max_params: int = 3
    max_domain: int = 8  # values per parameter
    max_space: int = 32  # product of all parameter domain sizes
    max_trip: int = 3  # loop bound K
    max_depth: int = 2  # nesting of if/while
    control_loop_prob: float = 0.25
    input_prob: float = 0.3
    cycles: int = 2
    input_values: int = 2


@dataclass(frozen=True)
class GeneratedProgram:
    seed: int
    source: str
    property: str
    domains: InputDomain
    cycles: int

    def __str__(self):
        return self.source


class _Gen:
    def __init__(self, seed: int, cfg: GenConfig):
        self.r = random.Random(seed)
        self.cfg = cfg
        self.budget = cfg.max_stmts
        self.counters = 0
        self.locals_ = []  # (name, type, init text)
        self.top = 0  # nesting depth of the program's main statement list

    # expressions

    def leaf(self, ints):
        r = self.r
        if ints and r.random() < 0.65:
            return r.choice(ints)
        return str(r.randint(0, 5))

    def int_expr(self, ints, depth=0):
        r = self.r
        if depth >= 2 or r.random() < 0.4:
            return self.leaf(ints)
        op = r.choice(["+", "+", "-", "*", "/", "%"])
        a = self.int_expr(ints, depth + 1)
        b = self.int_expr(ints, depth + 1)
        if op in "/%" and r.random() < 0.5:
            b = str(r.randint(1, 4))  # mostly safe divisors; the rest may trap
        return f"({a} {op} {b})"

    def cond(self, ints, bools, depth=0):
        r = self.r
        x = r.random()
        if bools and x < 0.15:
            return r.choice(bools)
        if depth < 1 and x < 0.3:
            op = r.choice(["&&", "||"])
            return f"({self.cond(ints, bools, depth + 1)} {op} {self.cond(ints, bools, depth + 1)})"
        if depth < 1 and x < 0.35:
            return f"!({self.cond(ints, bools, depth + 1)})"
        op = r.choice(["<", "<=", ">", ">=", "==", "!="])
        return f"{self.int_expr(ints, 1)} {op} {self.int_expr(ints, 1)}"

    # statements

    def stmts(self, ints, bools, writable, depth, n, out):
        lines = []
        for _ in range(n):
            if self.budget <= 0:
                break
            lines += self.stmt(ints, bools, writable, depth, out)
        return lines

    def stmt(self, ints, bools, writable, depth, out):
        r = self.r
        self.budget -= 1
        x = r.random()
        if depth < self.cfg.max_depth and x < 0.2 and self.budget >= 3:
            return self.loop(ints, bools, writable, depth, out)
        if depth < self.cfg.max_depth and x < 0.45 and self.budget >= 2:
            then = self.stmts(ints, bools, writable, depth + 1, r.randint(1, 2), out)
            orelse = self.stmts(ints, bools, writable, depth + 1, r.randint(0, 2), out) if r.random() < 0.5 else []
            c = self.cond(ints, bools)
            lines = [f"if ({c}) {{"] + ["  " + l for l in then] + ["}"]
            if orelse:
                lines[-1] = "} else {"
                lines += ["  " + l for l in orelse] + ["}"]
            return lines
        if x < 0.55 and depth == self.top:
            return [f"print {r.choice(ints + bools)};"]
        if bools and x < 0.62:
            return [f"{r.choice(bools)} = {self.cond(ints, bools)};"]
        if depth == self.top and x < 0.7:
            return [f"{out} = {out} + {self.int_expr(ints)};"]
        return [f"{r.choice(writable)} = {self.int_expr(ints)};"]

    def loop(self, ints, bools, writable, depth, out):
        r = self.r
        i = f"i{self.counters}"
        self.counters += 1
        self.locals_.append((i, "int", "0"))
        k = r.randint(1, self.cfg.max_trip)
        self.budget -= 2  # counter update and output accumulation
        inner = self.stmts(ints + [i], bools, writable, depth + 1, r.randint(0, 2), out)
        body = inner + [f"{out} = {out} + {self.int_expr(ints + [i])};", f"{i} = {i} + 1;"]
        return [f"{i} = 0;", f"while ({i} < {k}) {{"] + ["  " + l for l in body] + ["}"]


def _split_domain(r, n_params, cfg):
    """Parameter ranges whose sizes multiply to at most ``max_space``."""
    sizes = []
    space = cfg.max_space
    for k in range(n_params):
        left = n_params - k - 1
        cap = min(cfg.max_domain, max(1, int(space // (2 ** left))))
        size = r.randint(1, cap)
        sizes.append(size)
        space //= size
    ranges = []
    for s in sizes:
        lo = r.choice([0, 0, -2, 3])
        ranges.append((lo, lo + s - 1))
    return ranges


def statement_count(source: str) -> int:
    """Statements of a program, nested ones and declarations included."""
    return sum(1 for _ in walk(parse(source).body))


def generate(seed: int, cfg: GenConfig = GenConfig()) -> GeneratedProgram:
    """A program of at most ``cfg.max_stmts`` statements (oversized drafts are redrawn)."""
    for attempt in range(1000):
        g = _draw(seed if attempt == 0 else f"{seed}/{attempt}", seed, cfg)
        if statement_count(g.source) <= cfg.max_stmts:
            return g
    raise RuntimeError(f"no program within {cfg.max_stmts} statements for seed {seed}")


def _draw(rng_seed, seed: int, cfg: GenConfig) -> GeneratedProgram:
    g = _Gen(rng_seed, cfg)
    r = g.r
    n_params = r.randint(1, cfg.max_params)
    params = [f"p{k}" for k in range(n_params)]
    control = r.random() < cfg.control_loop_prob
    reads = r.random() < cfg.input_prob
    out = "o"
    ints_local = ["a", "b"][: r.randint(1, 2)]
    has_flag = r.random() < 0.4
    bools = ["flag"] if has_flag else []
    ints = params + [out] + ints_local
    writable = ints_local + (params if r.random() < 0.5 else [])

    g.budget = cfg.max_stmts
    head = [f"int {out} = {r.randint(0, 3)};"]
    for v in ints_local:
        head.append(f"int {v} = {g.int_expr(params, 1)};")
    if has_flag:
        head.append(f"bool flag = {g.cond(params, [])};")
    g.budget -= len(head)

    body_lines = []
    if control:
        g.top = 1
        g.budget -= 2  # loop header and output
        if reads:
            body_lines.append(f"{ints_local[0]} = input();")
            g.budget -= 1
        body_lines += g.stmts(ints, bools, writable, 1, r.randint(1, 4), out)
        body_lines.append(f"output {out};")
        main = ["while (true) {"] + ["  " + l for l in body_lines] + ["}"]
    else:
        if reads:
            body_lines.append(f"{ints_local[0]} = input();")
            g.budget -= 1
        body_lines += g.stmts(ints, bools, writable, 0, r.randint(1, 6), out)
        g.budget -= 1
        main = body_lines + [f"return {out};"]

    decls = [f"int {n} = {init};" for n, _, init in g.locals_]
    ret = "void" if control else "int"
    sig = ", ".join(f"int {p}" for p in params)
    lines = [f"{ret} gen{seed}({sig}) {{"] + ["  " + l for l in head + decls + main] + ["}"]
    source = "\n".join(lines) + "\n"

    ranges = _split_domain(r, n_params, cfg)
    domains = InputDomain(dict(zip(params, ranges)), (0, cfg.input_values - 1), reads_per_cycle=1)
    if control and r.random() < 0.3:
        prop = f"window {out} in ({r.randint(0, 4)},{r.randint(6, 15)}) persist 2"
    else:
        prop = f"always {out} {r.choice(['<=', '<=', '<', '>=', '!='])} {r.randint(2, 12)}"
    return GeneratedProgram(seed, source, prop, domains, cfg.cycles)
