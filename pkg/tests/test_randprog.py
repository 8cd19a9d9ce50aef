import pytest
from hypothesis import given, settings, strategies as st

from seuguard.domain import DomainError, InputDomain, parse_assignment, parse_range
from seuguard.lang import parse
from seuguard.prop import parse_spec
from seuguard.randprog import GenConfig, generate, statement_count


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_generated_programs_parse_and_respect_bounds(seed):
    g = generate(seed)
    p = parse(g.source)
    parse_spec(g.property)
    cfg = GenConfig()
    assert statement_count(g.source) <= cfg.max_stmts
    assert 1 <= len(p.params) <= cfg.max_params
    space = 1
    for lo, hi in g.domains.ranges.values():
        assert hi - lo + 1 <= cfg.max_domain
        space *= hi - lo + 1
    assert space <= cfg.max_space


def test_generation_is_deterministic():
    assert generate(7).source == generate(7).source
    assert generate(7).source != generate(8).source


@pytest.mark.parametrize("text,want", [("0..20", (0, 20)), ("-3..-1", (-3, -1)), (" 4 .. 4 ", (4, 4))])
def test_parse_range(text, want):
    assert parse_range(text) == want


@pytest.mark.parametrize("text", ["5", "3..1", "a..b", "0..99999999999"])
def test_parse_range_rejects(text):
    with pytest.raises(DomainError):
        parse_range(text)


def test_assignment_and_input_key():
    d = InputDomain.from_assignments([parse_assignment("x=0..2"), parse_assignment("input=1..3")], reads_per_cycle=2)
    assert d.ranges == {"x": (0, 2)} and d.input_range == (1, 3)
    assert list(d.param_vectors(["x"])) == [(0,), (1,), (2,)]
    assert list(d.values("unlisted")) == list(range(0, 16))
    with pytest.raises(DomainError):
        parse_assignment("=0..1")
