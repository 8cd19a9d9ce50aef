import dataclasses
import time

import pytest

from _support import BENCH, RANDOM_SEEDS, benchmarks, differential_row
from seuguard.lang import parse
from seuguard.pipeline import analyze
from seuguard.prop import parse_spec


@pytest.fixture(scope="session")
def motiv():
    return parse((BENCH / "motivating_example.ctl").read_text())


@pytest.fixture(scope="session")
def motiv_spec():
    return parse_spec("always output <= 10")


@pytest.fixture(scope="session")
def bench_differential():
    """Differential (checker plus oracle) reports for every shipped benchmark, by name."""
    return {cfg.name: analyze(dataclasses.replace(cfg, engine="differential")) for cfg, _ in benchmarks()}


@pytest.fixture(scope="session")
def random_differential():
    """({seed: rows}, seconds) for the generated-program corpus."""
    t0 = time.perf_counter()
    rows = {seed: differential_row(seed) for seed in RANDOM_SEEDS}
    return rows, time.perf_counter() - t0
