import pytest

from _support import brute_control_dependence, brute_post_dominators, random_cfg
from seuguard.cfg import (
    build_cfg, build_pdg, control_dependence, data_dependence, post_dominators,
    reaching_definitions, to_dot,
)
from seuguard.lang import parse
from seuguard.lang.ast import Assign, If, Return, While
from seuguard.lang.printer import format_expr


def sid_of(program, pred):
    return next(s.sid for s in program.statements() if pred(s))


def test_motiv_cfg_shape(motiv):
    cfg = build_cfg(motiv)
    assert len(cfg.nodes) == len(motiv.statements()) + 2
    assert len(cfg.conditions) == 3
    for c in cfg.conditions:
        assert sorted(l for s, _, l in cfg.edges if s == c) == ["F", "T"]


def test_straight_line_is_a_path():
    p = parse("int f() { int a = 1; int b = a; a = b + 1; return a; }")
    cfg = build_cfg(p)
    assert len(cfg.nodes) == 6
    assert [(s, d) for s, d, _ in cfg.edges] == [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]
    assert control_dependence(cfg) == []


def test_empty_infinite_loop_self_edge():
    cfg = build_cfg(parse("void g() { while (true) { } }"))
    w = cfg.conditions[0]
    assert (w, w, "T") in cfg.edges


def test_postdom_path():
    p = parse("int f() { int a = 1; int b = 2; return a; }")
    cfg = build_cfg(p)
    assert post_dominators(cfg)[1] >= {1, 2, 3, cfg.exit}


def test_postdom_diamond():
    p = parse("int f(int x) { int a = 0; if (x > 1) { a = 1; } else { a = 2; } return a; }")
    cfg = build_cfg(p)
    cond = sid_of(p, lambda s: isinstance(s, If))
    join = sid_of(p, lambda s: isinstance(s, Return))
    assert join in post_dominators(cfg)[cond]


def test_motiv_count_increment_postdominates_output_two(motiv):
    cfg = build_cfg(motiv)
    two = sid_of(motiv, lambda s: isinstance(s, Assign) and s.name == "output" and getattr(s.expr, "value", None) == 2)
    inc = sid_of(motiv, lambda s: isinstance(s, Assign) and s.name == "count")
    assert inc in post_dominators(cfg)[two]
    assert post_dominators(cfg) == brute_post_dominators(cfg)


def test_motiv_control_chain(motiv):
    cfg = build_cfg(motiv)
    loop = sid_of(motiv, lambda s: isinstance(s, While))
    xt = sid_of(motiv, lambda s: isinstance(s, If) and format_expr(s.cond) == "x > 10")
    yt = sid_of(motiv, lambda s: isinstance(s, If) and format_expr(s.cond) == "y == 1")
    two = sid_of(motiv, lambda s: isinstance(s, Assign) and getattr(s.expr, "value", None) == 2)
    cd = set(control_dependence(cfg))
    assert {(yt, two), (xt, yt), (loop, xt), (loop, loop)} <= cd
    assert sorted(cd) == brute_control_dependence(cfg)


def test_single_if_one_control_edge():
    p = parse("int f(int x) { int a = 0; if (x > 1) { a = 1; } return a; }")
    assert control_dependence(build_cfg(p)) == [(2, 3)]


def test_motiv_output_increment_reaches_return(motiv):
    cfg = build_cfg(motiv)
    inc = sid_of(motiv, lambda s: isinstance(s, Assign) and s.name == "output" and "output" in repr(s.expr))
    ret = sid_of(motiv, lambda s: isinstance(s, Return))
    assert (inc, ret, "output") in data_dependence(cfg)


def test_single_data_edge():
    p = parse("int f() { int a = 1; int b = a; return 0; }")
    assert data_dependence(build_cfg(p)) == [(1, 2, "a")]


def test_loop_carried_edge():
    p = parse("int f() { int c = 0; while (c < 3) { c = c + 1; } return c; }")
    assert (3, 3, "c") in data_dependence(build_cfg(p))


def test_data_edges_have_definition_clear_paths(motiv):
    """Every data edge is witnessed by a path on which the variable is not redefined."""
    cfg = build_cfg(motiv)
    for d, u, v in data_dependence(cfg):
        seen, work, ok = set(), list(cfg.succs(d)), False
        while work and not ok:
            n = work.pop()
            if n == u:
                ok = True
            elif n not in seen and v not in cfg.defs[n]:
                seen.add(n)
                work.extend(cfg.succs(n))
        assert ok, (d, u, v)


def test_unreachable_exit_is_reported():
    warnings = []
    p = parse("void g() { int a = 0; while (true) { a = a + 1; output a; } }")
    pdom = post_dominators(build_cfg(p), warnings)
    assert warnings == [] and pdom  # while(true) keeps its structural false edge


@pytest.mark.parametrize("seed", range(40))
def test_random_cfgs_match_brute_force(seed):
    cfg = random_cfg(seed)
    assert post_dominators(cfg) == brute_post_dominators(cfg)
    assert control_dependence(cfg) == brute_control_dependence(cfg)


def test_dot_output(motiv):
    cfg = build_cfg(motiv)
    dot = to_dot(build_pdg(cfg), "f")
    assert dot.startswith("digraph f {") and "style=dashed" in dot
    assert "shape=diamond" in to_dot(cfg)


def test_reaching_definitions_entry_empty(motiv):
    assert reaching_definitions(build_cfg(motiv))[0] == frozenset()
