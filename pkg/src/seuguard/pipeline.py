"""End-to-end analysis: parse, slice, then prune or instrument-and-check each variable."""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .checker import CheckConfig, classify_variable
from .domain import InputDomain, parse_assignment, parse_range
from .lang import Program, parse
from .oracle import DEFAULT_BUDGET, oracle_classify
from .prop import PropertyError, SafetySpec, parse_spec
from .report import AnalysisReport, VariableResult
from .slicer import slice_program
from .verdict import FIRST_USE, NONDET

log = logging.getLogger(__name__)

ENGINES = ("checker", "oracle", "differential")


class ConfigError(ValueError):
    pass


@dataclass
class AnalysisConfig:
    source: str  # path to a .ctl file
    property: Optional[str] = None  # property text or path to a .prop file; default: sidecar .prop
    variables: Optional[list] = None  # None analyses every variable
    domains: InputDomain = field(default_factory=InputDomain)
    unwind: int = 16
    cycles: Optional[int] = None
    bit_positions: tuple = (0, 31)
    trigger: str = NONDET
    engine: str = "checker"
    name: Optional[str] = None
    jobs: int = 1
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise ConfigError(f"unknown engine {self.engine!r}")
        if self.trigger not in (NONDET, FIRST_USE):
            raise ConfigError(f"unknown trigger {self.trigger!r}")
        if self.unwind < 1:
            raise ConfigError("--unwind must be positive")
        if self.cycles is not None and self.cycles < 1:
            raise ConfigError("--cycles must be positive")
        lo, hi = self.bit_positions
        if not 0 <= lo <= hi <= 31:
            raise ConfigError(f"fault bits {lo}..{hi} must lie within 0..31")
        if self.jobs < 1:
            raise ConfigError("--jobs must be positive")


def load_property(text_or_path: Optional[str], source: str) -> SafetySpec:
    if text_or_path is None:
        sidecar = Path(source).with_suffix(".prop")
        if not sidecar.exists():
            raise PropertyError(f"no --property given and no {sidecar.name} next to the source")
        text_or_path = str(sidecar)
    p = Path(text_or_path)
    if p.suffix == ".prop" or (p.exists() and p.is_file()):
        text = p.read_text(encoding="utf-8")
    else:
        text = text_or_path
    lines = [l for l in text.splitlines() if l.strip() and not l.lstrip().startswith("#")]
    if len(lines) != 1:
        raise PropertyError(f"expected exactly one property line, got {len(lines)}")
    return parse_spec(lines[0])


def count_loc(source: str) -> int:
    """Non-blank source lines."""
    return sum(1 for line in source.splitlines() if line.strip())


def _check_domains(program: Program, domains: InputDomain):
    params = {n for n, _ in program.params}
    for name in domains.ranges:
        if name not in params:
            raise ConfigError(f"--domain names {name!r}, which is not a parameter of {program.name}")


def _one(args):
    program, spec, x, in_slice, sl, cfg = args
    t0 = time.perf_counter()
    oracle = None
    if cfg.engine == "oracle":
        verdict = _oracle(program, spec, x, cfg)
    else:
        verdict = classify_variable(program, spec, x, _check_config(cfg), sl)
        if cfg.engine == "differential":
            oracle = _oracle(program, spec, x, cfg)
    return VariableResult(x, in_slice, verdict, time.perf_counter() - t0, oracle)


def _check_config(cfg: AnalysisConfig) -> CheckConfig:
    return CheckConfig(cfg.domains, cfg.unwind, cfg.cycles, tuple(cfg.bit_positions), cfg.trigger)


def _oracle(program, spec, x, cfg):
    lo, hi = cfg.bit_positions
    return oracle_classify(program, spec, x, cfg.domains, unwind=cfg.unwind, cycles=cfg.cycles,
                           budget=cfg.budget, bits=range(lo, hi + 1), trigger=cfg.trigger)


def analyze(config: AnalysisConfig, program: Optional[Program] = None, spec: Optional[SafetySpec] = None) -> AnalysisReport:
    source = Path(config.source).read_text(encoding="utf-8")
    if program is None:
        program = parse(source)
    if spec is None:
        spec = load_property(config.property, config.source)
    _check_domains(program, config.domains)
    variables = program.variables
    if spec.output_variable not in variables:
        raise PropertyError(f"property names {spec.output_variable!r}, which is not a variable of {program.name}")
    selected = variables if config.variables is None else list(config.variables)
    for x in selected:
        if x not in variables:
            raise ConfigError(f"unknown variable {x!r}; variables are {', '.join(variables)}")

    sl = slice_program(program, spec)
    relevant = [v for v in variables if v in sl.relevant_variables]
    tasks = [(program, spec, x, x in sl.relevant_variables, sl, config) for x in selected]
    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_one, tasks))  # map keeps declaration order
    else:
        results = [_one(t) for t in tasks]
    for r in results:
        log.info("%s: %s", r.variable, r.verdict.classification)

    bounds = {
        "unwind": config.unwind,
        "domains": config.domains.describe([n for n, _ in program.params]),
        "fault_bits": list(config.bit_positions),
        "trigger": config.trigger,
    }
    if program.control_loop() is not None:
        bounds["cycles"] = config.unwind if config.cycles is None else config.cycles
    return AnalysisReport(
        program=config.name or program.name,
        loc=count_loc(source),
        phi_text=spec.render(),
        variables=variables,
        relevant=relevant,
        per_variable=results,
        config=bounds,
        engine=config.engine,
    )


# -- benchmark manifest -------------------------------------------------------


def load_manifest(path) -> list:
    """``AnalysisConfig`` plus expected-report path for each manifest entry."""
    path = Path(path)
    data = json.loads(path.read_text(encoding="utf-8"))
    out = []
    for b in data["benchmarks"]:
        items = [parse_assignment(f"{k}={v}") for k, v in b.get("domains", {}).items()]
        cfg = AnalysisConfig(
            source=str(path.parent / b["source"]),
            property=str(path.parent / b["property"]),
            domains=InputDomain.from_assignments(items),
            unwind=int(b.get("unwind", 16)),
            bit_positions=parse_range(b.get("fault_bits", "0..31")),
            name=b["name"],
        )
        expected = path.parent / b["expected"] if b.get("expected") else None
        out.append((cfg, expected))
    return out
