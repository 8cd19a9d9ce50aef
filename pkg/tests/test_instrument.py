import pytest

from seuguard.instrument import (
    CONTROL_LOOP, TERMINATING, InstrumentError, emit, insert_fault_hooks, rename, self_compose,
    strip_hooks,
)
from seuguard.lang import parse
from seuguard.lang.ast import Hook, Observe, ShareParam, While, walk
from seuguard.prop import parse_spec


def test_rename_primes_everything(motiv):
    shadow = rename(motiv.body)
    names = {s.name for s in walk(shadow) if hasattr(s, "name")}
    assert names == {"output'", "alarm'", "count'"}


def test_hooks_one_per_use(motiv):
    body, sites = insert_fault_hooks(motiv.body, "count")
    # count is used by the loop test and by count++
    assert len(sites) == 2
    loop = next(s for s in body if isinstance(s, While))
    assert len(loop.cond_hooks) == 1


def test_two_uses_in_one_statement():
    p = parse("int f(int x) { int o = x + x; return o; }")
    body, sites = insert_fault_hooks(p.body, "x")
    hooks = [s for s in body if isinstance(s, Hook)]
    assert [h.first for h in hooks] == [True, False]
    assert [s.use_index for s in sites] == [0, 1]


def test_terminating_shape(motiv, motiv_spec):
    ins = self_compose(motiv, motiv_spec, "x")
    assert ins.shape == TERMINATING and ins.base_step == ()
    assert ins.shares == (ShareParam("x'", "x"), ShareParam("y'", "y"))
    assert not any(isinstance(s, Hook) for s in walk(ins.base) if True)
    obs = [s for s in ins.shadow if isinstance(s, Observe)]
    assert [o.copy for o in obs] == ["shadow"]


def test_control_loop_shape():
    p = parse("void g(int a) { int s = 0; while (true) { s = s + a; output s; } }")
    ins = self_compose(p, parse_spec("always s <= 9"), "a")
    assert ins.shape == CONTROL_LOOP
    assert ins.loop_sid == 2
    assert any(isinstance(s, Hook) for s in ins.shadow_step)


def test_strip_hooks_restores_renamed_body(motiv, motiv_spec):
    ins = self_compose(motiv, motiv_spec, "count")
    assert strip_hooks(ins.shadow) == rename(motiv.body)
    assert strip_hooks(ins.base) == motiv.body


def test_unknown_variable(motiv, motiv_spec):
    with pytest.raises(InstrumentError):
        self_compose(motiv, motiv_spec, "nope")


def test_property_variable_must_exist(motiv):
    with pytest.raises(InstrumentError):
        self_compose(motiv, parse_spec("always speed <= 1"), "x")


def test_emit_text(motiv, motiv_spec):
    text = emit(self_compose(motiv, motiv_spec, "x"))
    assert "assert(!(phi ^ phi'));" in text
    assert "mimic_seu_effect(&x');" in text
    assert "goto base_done;" in text
    assert text.index("x' = x;") < text.index("int output = 4;")
