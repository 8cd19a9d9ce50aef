from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional

NON_CRV = "NonCrv"
CRV = "Crv"
UNKNOWN = "Unknown"
INTRODUCING = "FaultIntroducing"
MASKING = "FaultMasking"

NONDET = "nondet"
FIRST_USE = "first-use"


@dataclass(frozen=True)
class FaultModel:
    target: str
    bit_positions: tuple = (0, 31)
    trigger: str = NONDET
    max_events: int = 1

    def __post_init__(self):
        lo, hi = self.bit_positions
        if not (0 <= lo <= hi <= 31):
            raise ValueError(f"bit positions {lo}..{hi} must lie within 0..31")
        if self.trigger not in (NONDET, FIRST_USE):
            raise ValueError(f"unknown trigger {self.trigger!r}")
        if self.max_events != 1:
            raise ValueError("only single-upset fault models are supported")

    @property
    def bits(self) -> range:
        return range(self.bit_positions[0], self.bit_positions[1] + 1)


@dataclass(frozen=True)
class InputVector:
    params: dict
    streams: tuple = ()  # per-cycle input() values

    def to_dict(self) -> dict:
        d = dict(self.params)
        if any(self.streams):
            d["input"] = [list(s) for s in self.streams]
        return d


@dataclass(frozen=True)
class Counterexample:
    input_vector: InputVector
    hook_site: Optional[object]  # HookSite: static statement + use index
    occurrence: int  # dynamic use occurrence of the target (1-based)
    bit_position: int
    direction: str
    trace: tuple = ()  # fault-free location sequence (statement ids)
    trace_faulted: tuple = ()
    output_points: tuple = ()  # ((o, o', phi, phi'), ...)
    extra_reads: bool = False

    def to_dict(self) -> dict:
        site = None
        if self.hook_site is not None:
            site = {"sid": self.hook_site.sid, "use_index": self.hook_site.use_index, "line": self.hook_site.line}
        return {
            "inputs": self.input_vector.to_dict(),
            "hook_site": site,
            "occurrence": self.occurrence,
            "bit": self.bit_position,
            "direction": self.direction,
            "trace": list(self.trace),
            "trace_faulted": list(self.trace_faulted),
            "output_points": [list(p) for p in self.output_points],
            "extra_reads": self.extra_reads,
        }


@dataclass
class Verdict:
    variable: str
    classification: str
    direction: Optional[str] = None
    counterexample: Optional[Counterexample] = None
    bounds: dict = field(default_factory=dict)
    engine: str = "checker"
    pruned: bool = False
    diagnostics: tuple = ()
    stats: dict = field(default_factory=dict)

    @property
    def is_crv(self) -> bool:
        return self.classification == CRV

    def key(self) -> tuple:
        """What the differential comparison compares."""
        return (self.classification, self.direction)

    def to_dict(self) -> dict:
        return {
            "variable": self.variable,
            "classification": self.classification,
            "direction": self.direction,
            "engine": self.engine,
            "pruned": self.pruned,
            "counterexample": self.counterexample.to_dict() if self.counterexample else None,
            "diagnostics": list(self.diagnostics),
            "bounds": self.bounds,
        }
