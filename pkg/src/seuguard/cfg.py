"""Statement-level control flow graph and program dependence graph.

Every source statement is one node (its ``sid``); conditions of ``if`` and
``while`` are the statement nodes themselves. ``ENTRY`` and ``EXIT`` are
synthetic. Conditions always carry a true and a false edge, even for
``while (true)``, so every node can structurally reach ``EXIT``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .lang.ast import If, Program, Return, While, stmt_def, stmt_uses, walk

log = logging.getLogger(__name__)

ENTRY = 0


@dataclass(frozen=True)
class Cfg:
    nodes: tuple
    edges: tuple  # ((src, dst, label), ...); label is "T", "F" or None
    entry: int
    exit: int
    stmts: dict = field(compare=False, repr=False)
    defs: dict = field(compare=False, repr=False)
    uses: dict = field(compare=False, repr=False)

    def succs(self, n) -> list:
        return [d for s, d, _ in self.edges if s == n]

    def preds(self, n) -> list:
        return [s for s, d, _ in self.edges if d == n]

    @property
    def conditions(self) -> list:
        return [n for n in self.nodes if isinstance(self.stmts.get(n), (If, While))]

    def label(self, n) -> str:
        if n == self.entry:
            return "ENTRY"
        if n == self.exit:
            return "EXIT"
        return describe(self.stmts[n])


def describe(s) -> str:
    from .lang.printer import format_expr, format_stmts

    if isinstance(s, If):
        return f"if ({format_expr(s.cond)})"
    if isinstance(s, While):
        return f"while ({format_expr(s.cond)})"
    return format_stmts([s], 0)[0]


def build_cfg(program: Program) -> Cfg:
    stmts = {s.sid: s for s in walk(program.body)}
    exit_id = len(stmts) + 1
    edges = []

    def seq(block, nxt):
        # build backwards: each statement learns its successor
        for s in reversed(block):
            nxt = one(s, nxt)
        return nxt

    def one(s, nxt):
        if isinstance(s, If):
            edges.append((s.sid, seq(s.then, nxt), "T"))
            edges.append((s.sid, seq(s.orelse, nxt), "F"))
        elif isinstance(s, While):
            edges.append((s.sid, seq(s.body, s.sid), "T"))
            edges.append((s.sid, nxt, "F"))
        elif isinstance(s, Return):
            edges.append((s.sid, exit_id, None))
        else:
            edges.append((s.sid, nxt, None))
        return s.sid

    first = seq(program.body, exit_id)
    edges.append((ENTRY, first, None))
    nodes = (ENTRY, *sorted(stmts), exit_id)
    defs = {n: ({stmt_def(s)} if stmt_def(s) else set()) for n, s in stmts.items()}
    uses = {n: set(stmt_uses(s)) for n, s in stmts.items()}
    for n in (ENTRY, exit_id):
        defs[n], uses[n] = set(), set()
    return Cfg(nodes, tuple(sorted(edges, key=lambda e: (e[0], e[1], e[2] or ""))), ENTRY, exit_id, stmts, defs, uses)


class UnreachableExit(Warning):
    pass


def post_dominators(cfg: Cfg, warnings: list | None = None) -> dict:
    """Map each node to the set of nodes post-dominating it (reflexive).

    Nodes that cannot reach the exit have no post-dominators in the usual sense;
    they are left out of the result and reported.
    """
    succ = {n: cfg.succs(n) for n in cfg.nodes}
    pred = {n: cfg.preds(n) for n in cfg.nodes}

    # nodes that can reach exit
    live = {cfg.exit}
    work = [cfg.exit]
    while work:
        n = work.pop()
        for p in pred[n]:
            if p not in live:
                live.add(p)
                work.append(p)
    dead = [n for n in cfg.nodes if n not in live]
    if dead:
        msg = f"nodes {dead} cannot reach exit; excluded from post-dominance"
        log.warning(msg)
        if warnings is not None:
            warnings.append(msg)

    order = [n for n in cfg.nodes if n in live]
    pdom = {n: set(order) for n in order}
    pdom[cfg.exit] = {cfg.exit}
    changed = True
    while changed:
        changed = False
        for n in reversed(order):
            if n == cfg.exit:
                continue
            ss = [pdom[s] for s in succ[n] if s in live]
            new = set.intersection(*ss) if ss else set()
            new = new | {n}
            if new != pdom[n]:
                pdom[n] = new
                changed = True
    return {n: frozenset(v) for n, v in pdom.items()}


def control_dependence(cfg: Cfg, pdom: dict | None = None) -> list:
    """Control edges ``(c, s)``: ``s`` is control dependent on branch node ``c``.

    ``s`` depends on ``c`` when some successor ``u`` of ``c`` is post-dominated
    by ``s`` while ``s`` does not strictly post-dominate ``c``. A loop test is
    therefore control dependent on itself.
    """
    if pdom is None:
        pdom = post_dominators(cfg)
    out = set()
    for c in cfg.nodes:
        if c not in pdom:
            continue
        succs = [u for u in cfg.succs(c) if u in pdom]
        if len(set(cfg.succs(c))) < 2:
            continue
        for u in succs:
            for s in pdom[u]:
                if s == c or s not in pdom[c]:
                    out.add((c, s))
    return sorted(out)


def reaching_definitions(cfg: Cfg) -> dict:
    """IN sets of ``(var, def_node)`` pairs per node, iterated to a fixed point."""
    gen = {n: {(v, n) for v in cfg.defs[n]} for n in cfg.nodes}
    rd_in = {n: set() for n in cfg.nodes}
    rd_out = {n: set(gen[n]) for n in cfg.nodes}
    pred = {n: cfg.preds(n) for n in cfg.nodes}
    changed = True
    while changed:
        changed = False
        for n in cfg.nodes:
            inn = set()
            for p in pred[n]:
                inn |= rd_out[p]
            killed = cfg.defs[n]
            out = {d for d in inn if d[0] not in killed} | gen[n]
            if inn != rd_in[n] or out != rd_out[n]:
                rd_in[n], rd_out[n] = inn, out
                changed = True
    return {n: frozenset(v) for n, v in rd_in.items()}


def data_dependence(cfg: Cfg, rd: dict | None = None) -> list:
    """Def-use edges ``(def_node, use_node, var)``, loop-carried ones included."""
    if rd is None:
        rd = reaching_definitions(cfg)
    out = set()
    for n in cfg.nodes:
        for v, d in rd[n]:
            if v in cfg.uses[n]:
                out.add((d, n, v))
    return sorted(out)


@dataclass(frozen=True)
class Pdg:
    nodes: tuple
    edges: tuple  # ((src, dst, "data", var) | (src, dst, "control", None), ...)
    cfg: Cfg = field(compare=False, repr=False)
    reaching: dict = field(compare=False, repr=False)

    def preds(self, n) -> list:
        return [e[0] for e in self.edges if e[1] == n]


def build_pdg(cfg: Cfg) -> Pdg:
    rd = reaching_definitions(cfg)
    edges = [(a, b, "data", v) for a, b, v in data_dependence(cfg, rd)]
    edges += [(c, s, "control", None) for c, s in control_dependence(cfg)]
    edges.sort(key=lambda e: (e[0], e[1], e[2], e[3] or ""))
    return Pdg(cfg.nodes, tuple(edges), cfg, rd)


def to_dot(graph, name: str = "G") -> str:
    cfg = graph.cfg if isinstance(graph, Pdg) else graph
    lines = [f"digraph {name} {{", "  node [shape=box, fontname=monospace];"]
    for n in cfg.nodes:
        shape = ", shape=diamond" if n in cfg.conditions else ""
        label = cfg.label(n).replace("\\", "\\\\").replace('"', '\\"')
        lines.append(f'  n{n} [label="{n}: {label}"{shape}];')
    if isinstance(graph, Pdg):
        for a, b, kind, var in graph.edges:
            if kind == "data":
                lines.append(f'  n{a} -> n{b} [label="{var}"];')
            else:
                lines.append(f"  n{a} -> n{b} [style=dashed];")
    else:
        for a, b, lab in graph.edges:
            lines.append(f'  n{a} -> n{b} [label="{lab}"];' if lab else f"  n{a} -> n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"
