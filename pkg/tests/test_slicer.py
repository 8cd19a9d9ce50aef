import pytest

from seuguard.cfg import build_cfg, build_pdg
from seuguard.lang import parse
from seuguard.lang.ast import Print, Return
from seuguard.prop import parse_spec
from seuguard.slicer import (
    SliceError, SlicingCriterion, backward_slice, criterion_for, output_points, render_slice,
    slice_program,
)


def test_motiv_relevant_variables(motiv, motiv_spec):
    sl = slice_program(motiv, motiv_spec)
    assert sl.relevant_variables == {"x", "y", "output", "count"}
    assert "alarm" not in sl.relevant_variables


def test_motiv_alarm_slice(motiv):
    pdg = build_pdg(build_cfg(motiv))
    pr = next(s.sid for s in motiv.statements() if isinstance(s, Print))
    sl = backward_slice(pdg, SlicingCriterion((pr,), frozenset({"alarm"})))
    assert sl.relevant_variables == {"x", "alarm", "count"}


def test_criterion_is_return(motiv, motiv_spec):
    c = criterion_for(motiv, motiv_spec)
    assert len(c.locations) == 1
    assert isinstance(motiv.statement(c.locations[0]), Return)


def test_output_points_in_control_loop():
    p = parse("void g(int a) { int s = 0; while (true) { s = s + a; if (s > 3) { output 1; } output s; } }")
    assert len(output_points(p)) == 2


def test_irrelevant_assignment_excluded():
    p = parse("int f(int a, int b) { int o = a; int junk = b * 2; print junk; return o; }")
    sl = slice_program(p, parse_spec("always o <= 3"))
    assert sl.relevant_variables == {"a", "o"}


def test_bad_location():
    pdg = build_pdg(build_cfg(parse("int f() { return 0; }")))
    with pytest.raises(SliceError):
        backward_slice(pdg, SlicingCriterion((99,), frozenset({"x"})))


def test_render_marks_excluded(motiv, motiv_spec):
    from _support import BENCH

    src = (BENCH / "motivating_example.ctl").read_text()
    text = render_slice(src, motiv, slice_program(motiv, motiv_spec))
    marked = [l for l in text.splitlines() if l.startswith("-")]
    assert any("alarm = true" in l for l in marked) and any("print alarm" in l for l in marked)
    assert not any("output = 2" in l for l in marked)
