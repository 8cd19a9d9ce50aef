from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from .values import INT_MAX, INT_MIN

DEFAULT_RANGE = (0, 15)
INPUT_KEY = "input"  # domain key for the input() stream; ``input`` is a keyword so it never names a variable


class DomainError(ValueError):
    pass


_RANGE_RE = re.compile(r"^\s*([+-]?\d+)\s*\.\.\s*([+-]?\d+)\s*$")


def parse_range(text: str) -> tuple:
    m = _RANGE_RE.match(text)
    if not m:
        raise DomainError(f"expected lo..hi, got {text!r}")
    lo, hi = int(m.group(1)), int(m.group(2))
    if lo > hi:
        raise DomainError(f"empty range {lo}..{hi}")
    if lo < INT_MIN or hi > INT_MAX:
        raise DomainError(f"range {lo}..{hi} exceeds 32-bit values")
    return lo, hi


def parse_assignment(text: str) -> tuple:
    """``var=lo..hi`` -> ``(var, (lo, hi))``."""
    name, sep, rng = text.partition("=")
    if not sep or not name.strip():
        raise DomainError(f"expected var=lo..hi, got {text!r}")
    return name.strip(), parse_range(rng)


@dataclass(frozen=True)
class InputDomain:
    """Finite input space: one inclusive range per parameter plus the ``input()`` stream.

    Each control cycle (the whole run for terminating programs) may perform at
    most ``reads_per_cycle`` ``input()`` reads.
    """

    ranges: dict = field(default_factory=dict)
    input_range: tuple = DEFAULT_RANGE
    reads_per_cycle: int = 4

    def __post_init__(self):
        for name, (lo, hi) in list(self.ranges.items()) + [(INPUT_KEY, self.input_range)]:
            if lo > hi:
                raise DomainError(f"empty range for {name}: {lo}..{hi}")
        if self.reads_per_cycle < 0:
            raise DomainError("reads_per_cycle must be >= 0")

    @classmethod
    def from_assignments(cls, items, reads_per_cycle: int = 4) -> "InputDomain":
        ranges, input_range = {}, DEFAULT_RANGE
        for name, rng in items:
            if name == INPUT_KEY:
                input_range = rng
            else:
                ranges[name] = rng
        return cls(ranges, input_range, reads_per_cycle)

    def range_of(self, param: str) -> tuple:
        return self.ranges.get(param, DEFAULT_RANGE)

    def values(self, param: str) -> range:
        lo, hi = self.range_of(param)
        return range(lo, hi + 1)

    def input_values(self) -> range:
        return range(self.input_range[0], self.input_range[1] + 1)

    def param_vectors(self, params) -> itertools.product:
        """All parameter assignments, lexicographically ascending in declaration order."""
        return itertools.product(*(self.values(p) for p in params))

    def describe(self, params) -> dict:
        d = {p: list(self.range_of(p)) for p in params}
        d[INPUT_KEY] = list(self.input_range)
        d["reads_per_cycle"] = self.reads_per_cycle
        return d
