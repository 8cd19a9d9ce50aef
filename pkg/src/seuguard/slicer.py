"""Backward static slicing over the program dependence graph."""

from __future__ import annotations

from dataclasses import dataclass

from .cfg import Pdg, build_cfg, build_pdg
from .lang.ast import Output, Program, Return, walk
from .prop import SafetySpec


class SliceError(ValueError):
    pass


@dataclass(frozen=True)
class SlicingCriterion:
    locations: tuple  # statement node ids (the output points)
    variables: frozenset


@dataclass(frozen=True)
class Slice:
    statements: frozenset
    relevant_variables: frozenset


def output_points(program: Program) -> tuple:
    return tuple(s.sid for s in walk(program.body) if isinstance(s, (Output, Return)))


def criterion_for(program: Program, spec: SafetySpec) -> SlicingCriterion:
    """Slice at every output statement, observing the property's output variable."""
    return SlicingCriterion(output_points(program), frozenset({spec.output_variable}))


def backward_slice(pdg: Pdg, criterion: SlicingCriterion) -> Slice:
    cfg = pdg.cfg
    stmt_nodes = set(cfg.stmts)
    seeds = set()
    for loc in criterion.locations:
        if loc not in stmt_nodes:
            raise SliceError(f"criterion location {loc} is not a statement of the graph")
        seeds.add(loc)
        seeds |= {d for v, d in pdg.reaching[loc] if v in criterion.variables}

    preds = {}
    for a, b, _, _ in pdg.edges:
        preds.setdefault(b, set()).add(a)

    closed = set()
    work = sorted(seeds)
    while work:
        n = work.pop()
        if n in closed:
            continue
        closed.add(n)
        work.extend(p for p in preds.get(n, ()) if p not in closed)

    stmts = frozenset(n for n in closed if n in stmt_nodes)
    rv = set(criterion.variables)
    for n in stmts:
        rv |= cfg.defs[n] | cfg.uses[n]
    return Slice(stmts, frozenset(rv))


def relevant_variables(sl: Slice) -> frozenset:
    return sl.relevant_variables


def slice_program(program: Program, spec: SafetySpec) -> Slice:
    pdg = build_pdg(build_cfg(program))
    return backward_slice(pdg, criterion_for(program, spec))


def render_slice(source: str, program: Program, sl: Slice) -> str:
    """Source listing with lines of excluded statements marked ``-``."""
    excluded, kept = set(), set()
    for s in walk(program.body):
        (kept if s.sid in sl.statements else excluded).add(s.span.line)
    out = []
    for i, line in enumerate(source.splitlines(), 1):
        mark = "-" if i in excluded and i not in kept else " "
        out.append(f"{mark} {i:3d} | {line}")
    return "\n".join(out) + "\n"
