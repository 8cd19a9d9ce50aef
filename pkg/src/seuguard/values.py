"""32-bit two's-complement value semantics shared by every interpreter."""

INT_MIN = -(2**31)
INT_MAX = 2**31 - 1
WORD_BITS = 32


class Trap(Exception):
    """Defined runtime error (division or modulo by zero)."""


def wrap(v: int) -> int:
    return ((v + 2**31) & 0xFFFFFFFF) - 2**31


def flip_bit(value: int, pos: int) -> int:
    """Single-event upset: XOR ``value`` with ``1 << pos`` in a 32-bit word."""
    if not 0 <= pos < WORD_BITS:
        raise ValueError(f"bit position {pos} outside 0..{WORD_BITS - 1}")
    return wrap(value ^ (1 << pos))


def div(a: int, b: int) -> int:
    if b == 0:
        raise Trap("division by zero")
    q = abs(a) // abs(b)
    return wrap(q if (a < 0) == (b < 0) else -q)


def mod(a: int, b: int) -> int:
    if b == 0:
        raise Trap("modulo by zero")
    r = abs(a) % abs(b)
    return wrap(-r if a < 0 else r)


def truthy(v: int) -> bool:
    return v != 0
