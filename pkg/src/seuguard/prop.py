"""Safety properties over the recent history of the control output.

Concrete syntax::

    always <var> <cmp> <int>                     cmp in <= < >= > == != (also ≤ ≥ ≠)
    window <var> in (<lo>,<hi>) persist <n>

``window`` is violated only when the last ``n`` outputs are all outside the
inclusive range ``[lo, hi]``.
"""

from __future__ import annotations

import operator
import re
from collections import deque
from dataclasses import dataclass
from typing import Union

from .values import INT_MAX, INT_MIN

COMPARISONS = {
    "<=": operator.le,
    "<": operator.lt,
    ">=": operator.ge,
    ">": operator.gt,
    "==": operator.eq,
    "!=": operator.ne,
}
_UNICODE = {"≤": "<=", "≥": ">=", "≠": "!=", "=": "=="}
_PRETTY = {"<=": "≤", ">=": "≥", "!=": "≠", "==": "=", "<": "<", ">": ">"}


class PropertyError(ValueError):
    pass


@dataclass(frozen=True)
class Instant:
    comparison: str
    bound: int


@dataclass(frozen=True)
class Window:
    r_min: int
    r_max: int
    n: int

    def __post_init__(self):
        if self.r_min >= self.r_max:
            raise PropertyError(f"window range needs r_min < r_max, got ({self.r_min},{self.r_max})")
        if self.n < 1:
            raise PropertyError(f"window length must be >= 1, got {self.n}")


@dataclass(frozen=True)
class SafetySpec:
    output_variable: str
    form: Union[Instant, Window]

    @property
    def window(self) -> int:
        """Buffer capacity needed to evaluate the property."""
        return self.form.n if isinstance(self.form, Window) else 1

    def render(self) -> str:
        f = self.form
        if isinstance(f, Instant):
            return f"{self.output_variable} {_PRETTY[f.comparison]} {f.bound}"
        return f"{self.output_variable} ∈ [{f.r_min}, {f.r_max}] within last {f.n}"

    def text(self) -> str:
        f = self.form
        if isinstance(f, Instant):
            return f"always {self.output_variable} {f.comparison} {f.bound}"
        return f"window {self.output_variable} in ({f.r_min},{f.r_max}) persist {f.n}"


_INT = r"([+-]?\d+)"
_ALWAYS_RE = re.compile(r"^\s*always\s+([A-Za-z_]\w*)\s*(<=|>=|==|!=|<|>|≤|≥|≠|=)\s*" + _INT + r"\s*$")
_WINDOW_RE = re.compile(
    r"^\s*window\s+([A-Za-z_]\w*)\s+in\s*\(\s*" + _INT + r"\s*,\s*" + _INT
    + r"\s*\)\s*persist\s+" + _INT + r"\s*$"
)


def _int32(text: str) -> int:
    v = int(text)
    if not INT_MIN <= v <= INT_MAX:
        raise PropertyError(f"bound {v} outside 32-bit range")
    return v


def parse_spec(text: str) -> SafetySpec:
    m = _ALWAYS_RE.match(text)
    if m:
        var, cmp, bound = m.groups()
        return SafetySpec(var, Instant(_UNICODE.get(cmp, cmp), _int32(bound)))
    m = _WINDOW_RE.match(text)
    if m:
        var, lo, hi, n = m.groups()
        return SafetySpec(var, Window(_int32(lo), _int32(hi), int(n)))
    raise PropertyError(f"cannot parse property {text.strip()!r}")


class OutputBuffer:
    """The last ``capacity`` output values, oldest first."""

    __slots__ = ("entries", "capacity")

    def __init__(self, capacity: int, entries=()):
        self.capacity = capacity
        self.entries = deque(entries, maxlen=capacity)

    def append(self, value: int) -> "OutputBuffer":
        self.entries.append(value)
        return self

    def copy(self) -> "OutputBuffer":
        return OutputBuffer(self.capacity, self.entries)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __repr__(self):
        return f"OutputBuffer({list(self.entries)!r}, capacity={self.capacity})"


def append(buffer: OutputBuffer, value: int) -> OutputBuffer:
    return buffer.append(value)


def eval_phi(spec: SafetySpec, buffer) -> bool:
    f = spec.form
    entries = list(buffer)
    if isinstance(f, Instant):
        if not entries:
            raise PropertyError("instantaneous property evaluated on an empty buffer")
        return COMPARISONS[f.comparison](entries[-1], f.bound)
    if len(entries) < f.n:
        return True
    return not all(v < f.r_min or v > f.r_max for v in entries[-f.n:])


def phi_function(spec: SafetySpec):
    """Fast evaluator over a sequence whose last item is the newest value."""
    f = spec.form
    if isinstance(f, Instant):
        cmp, bound = COMPARISONS[f.comparison], f.bound
        return lambda buf: cmp(buf[-1], bound)
    lo, hi, n = f.r_min, f.r_max, f.n

    def window(buf):
        if len(buf) < n:
            return True
        for v in buf[-n:]:
            if lo <= v <= hi:
                return True
        return False

    return window
