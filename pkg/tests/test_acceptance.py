"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line."""

import random
import time

import pytest

from _support import (
    RANDOM_UNWIND, benchmarks, bench_config, brute_control_dependence, random_cfg,
)
from seuguard.cfg import control_dependence
from seuguard.checker import run_composite
from seuguard.instrument import self_compose
from seuguard.lang import parse
from seuguard.oracle import divergence, input_vectors, run_concrete
from seuguard.pipeline import analyze, load_property
from seuguard.randprog import GenConfig, statement_count, generate
from seuguard.report import efficiency, emit_report, format_eta
from seuguard.values import flip_bit
from seuguard.verdict import CRV, NON_CRV

RUNTIME_LIMIT_ROW1 = 30.0  # seconds
RUNTIME_LIMIT_DIFFERENTIAL = 600.0  # seconds
FLIP_PAIRS = 100_000
RANDOM_CFGS = 100
MIN_RANDOM_PROGRAMS = 200


@pytest.fixture
def verdict_line(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance {n:2d}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return emit


def _bench(name):
    cfg = bench_config(name)
    return cfg, parse(open(cfg.source).read()), load_property(cfg.property, cfg.source)


def test_01_motivating_example_row(verdict_line):
    cfg = bench_config("Motivating Example")
    t0 = time.perf_counter()
    r = analyze(cfg)
    dt = time.perf_counter() - t0
    by_var = {v.variable: v for v in r.per_variable}
    eliminated = [x for x in r.relevant if by_var[x].verdict.classification == NON_CRV]
    ok = (
        (r.T, r.S, r.M, r.eta_text) == (5, 4, 1, "25%")
        and eliminated == ["y"]
        and set(r.crvs) == {"x", "output", "count"}
        and r.unknown_count == 0
        and dt < RUNTIME_LIMIT_ROW1
    )
    verdict_line(1, ok, f"T={r.T} S={r.S} M={r.M} eta={r.eta_text} eliminated={eliminated} "
                        f"crv={r.crvs} in {dt:.1f}s (limit {RUNTIME_LIMIT_ROW1:.0f}s)")


def test_02_reconstructed_rows_and_golden(verdict_line):
    want = {"Temperature Control": (6, 4, 2, "50%"), "Fan Speed Control": (5, 4, 1, "25%")}
    parts, ok = [], True
    for cfg, expected in benchmarks():
        if cfg.name not in want:
            continue
        r = analyze(cfg)
        got = (r.T, r.S, r.M, r.eta_text)
        golden = emit_report(r, "json") == expected.read_text(encoding="utf-8")
        ok &= got == want[cfg.name] and golden
        parts.append(f"{cfg.name} {got} golden={'same' if golden else 'DIFFERS'}")
    ok &= len(parts) == 2
    verdict_line(2, ok, "; ".join(parts))


def test_03_efficiency_worked_example(verdict_line):
    ok = efficiency(4, 1) == 25.0 and format_eta(4, 1) == "25%"
    verdict_line(3, ok, f"S=4 M=1 -> {format_eta(4, 1)}")


def test_04_checker_oracle_differential(verdict_line, bench_differential, random_differential):
    rows, seconds = random_differential
    t0 = time.perf_counter()
    bench_mismatch = [(name, r.variable) for name, rep in bench_differential.items() for r in rep.mismatches]
    bench_vars = sum(len(rep.per_variable) for rep in bench_differential.values())
    rand_mismatch = [(seed, x, v.key(), o.key()) for seed, rs in rows.items() for x, v, o, _ in rs
                     if v.key() != o.key()]
    rand_vars = sum(len(rs) for rs in rows.values())
    gen = GenConfig()
    shape_ok = all(
        statement_count(g.source) <= gen.max_stmts
        and len(g.domains.ranges) <= 3
        and all(hi - lo + 1 <= 8 for lo, hi in g.domains.ranges.values())
        for g in map(generate, rows)
    )
    total = seconds + time.perf_counter() - t0 + sum(
        r.seconds for rep in bench_differential.values() for r in rep.per_variable)
    ok = (not bench_mismatch and not rand_mismatch and shape_ok
          and len(rows) >= MIN_RANDOM_PROGRAMS and total < RUNTIME_LIMIT_DIFFERENTIAL)
    verdict_line(4, ok, f"benchmarks {bench_vars} vars, {len(bench_mismatch)} mismatches; "
                        f"{len(rows)} random programs (unwind {RANDOM_UNWIND}) {rand_vars} vars, "
                        f"{len(rand_mismatch)} mismatches {rand_mismatch[:3]}; shape ok={shape_ok}; "
                        f"{total:.0f}s (limit {RUNTIME_LIMIT_DIFFERENTIAL:.0f}s)")


def test_05_slice_soundness(verdict_line, bench_differential, random_differential):
    rows, _ = random_differential
    bad = []
    checked = 0
    for name, rep in bench_differential.items():
        for r in rep.per_variable:
            checked += 1
            if (r.verdict.classification == CRV or r.oracle.classification == CRV) and r.variable not in rep.relevant:
                bad.append((name, r.variable))
    for seed, rs in rows.items():
        for x, v, o, in_slice in rs:
            checked += 1
            if (v.is_crv or o.is_crv) and not in_slice:
                bad.append((seed, x))
    verdict_line(5, not bad, f"{checked} benchmark and random-program variables, violations={bad[:5]}")


def test_06_semantics_preservation(verdict_line):
    runs, bad = 0, []
    for cfg, _ in benchmarks():
        _, program, spec = _bench(cfg.name)
        cycles = cfg.unwind if cfg.cycles is None else cfg.cycles
        vectors = list(input_vectors(program, cfg.domains, cycles))
        for x in program.variables:
            instr = self_compose(program, spec, x)
            for vec in vectors:
                runs += 1
                base, shadow, fails, _, _ = run_composite(instr, vec, cfg.unwind, cfg.domains, cycles)
                rec = run_concrete(program, spec, vec, unwind=cfg.unwind, max_cycles=cycles)
                plain = tuple(p[0] for p in rec.output_points)
                if base != plain or shadow != plain or fails:
                    bad.append((cfg.name, x, vec.to_dict()))
    verdict_line(6, runs > 0 and not bad, f"{runs} composite runs with faults disabled, differences={bad[:3]}")


def test_07_flip_bit_properties(verdict_line):
    rng = random.Random(20240607)
    failures = 0
    for _ in range(FLIP_PAIRS):
        v = rng.randint(-(2**31), 2**31 - 1)
        b = rng.randrange(32)
        f = flip_bit(v, b)
        if flip_bit(f, b) != v or bin((v ^ f) & 0xFFFFFFFF).count("1") != 1:
            failures += 1
    verdict_line(7, failures == 0, f"{FLIP_PAIRS} (value, bit) pairs, failures={failures}")


def test_08_counterexamples_replay(verdict_line, bench_differential):
    replayed, bad = 0, []
    for cfg, _ in benchmarks():
        _, program, spec = _bench(cfg.name)
        for r in bench_differential[cfg.name].per_variable:
            if not r.verdict.is_crv:
                continue
            c = r.verdict.counterexample
            kw = dict(unwind=cfg.unwind, max_cycles=cfg.cycles)
            clean = run_concrete(program, spec, c.input_vector, (r.variable, 0, 0), **kw)
            faulted = run_concrete(program, spec, c.input_vector, (r.variable, c.occurrence, c.bit_position), **kw)
            replayed += 1
            if divergence(program, clean, faulted) != c.direction:
                bad.append((cfg.name, r.variable))
    verdict_line(8, replayed > 0 and not bad, f"{replayed} benchmark CRV counterexamples replayed, failures={bad}")


def test_09_control_dependence_random_cfgs(verdict_line):
    bad = []
    for seed in range(RANDOM_CFGS):
        cfg = random_cfg(seed, max_nodes=12)
        if sorted(set(control_dependence(cfg))) != brute_control_dependence(cfg):
            bad.append(seed)
    verdict_line(9, not bad, f"{RANDOM_CFGS} random CFGs (<= 12 nodes), disagreements={bad}")


def test_10_deterministic_json(verdict_line):
    diffs = []
    for cfg, _ in benchmarks():
        a = emit_report(analyze(cfg), "json")
        b = emit_report(analyze(cfg), "json")
        if a != b:
            diffs.append(cfg.name)
    verdict_line(10, not diffs, f"two runs per benchmark, differing reports={diffs}")
