"""Fixed-length Boolean vectors, labels, and the exact-arithmetic helpers.

Variables are indexed 1..n throughout the package. The text form of a
vector is a string of '0'/'1' characters with the leftmost character
holding x_1; this is the form used in all JSON traces. Internally the
bits are packed into a single Python int (bit i-1 holds x_i), so
popcount and AND do the heavy lifting.

Exact arithmetic is Python's own: `int` is arbitrary precision and
`fractions.Fraction` keeps rationals reduced with a positive
denominator. No floating point enters any scoring or comparison path.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

POSITIVE = 1
NEGATIVE = -1


def as_label(value: int) -> int:
    """Validate that value is one of the two class labels -1, +1."""
    if value not in (NEGATIVE, POSITIVE):
        raise ValueError(f"label must be -1 or +1, got {value!r}")
    return value


@dataclass(frozen=True, slots=True)
class BitVec:
    """Immutable Boolean vector of fixed length n, bits packed into an int."""

    n: int
    word: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("length must be nonnegative")
        if self.word < 0 or self.word >> self.n:
            raise ValueError("bit pattern does not fit the declared length")

    @staticmethod
    def from_text(text: str) -> "BitVec":
        word = 0
        for i, ch in enumerate(text):
            if ch == "1":
                word |= 1 << i
            elif ch != "0":
                raise ValueError(f"invalid bit character {ch!r}")
        return BitVec(len(text), word)

    @staticmethod
    def from_bits(bits: Sequence[int]) -> "BitVec":
        word = 0
        for i, b in enumerate(bits):
            if b not in (0, 1):
                raise ValueError(f"invalid bit value {b!r}")
            word |= b << i
        return BitVec(len(bits), word)

    @staticmethod
    def from_support(n: int, indices: Iterable[int]) -> "BitVec":
        """Build a vector from 1-based positions of its 1 bits."""
        word = 0
        for i in indices:
            if not 1 <= i <= n:
                raise ValueError(f"index {i} out of range 1..{n}")
            word |= 1 << (i - 1)
        return BitVec(n, word)

    @staticmethod
    def zeros(n: int) -> "BitVec":
        return BitVec(n, 0)

    @staticmethod
    def ones(n: int) -> "BitVec":
        return BitVec(n, (1 << n) - 1)

    def get(self, i: int) -> int:
        """Bit x_i, 1-based."""
        if not 1 <= i <= self.n:
            raise ValueError(f"index {i} out of range 1..{self.n}")
        return (self.word >> (i - 1)) & 1

    def to_text(self) -> str:
        return "".join("1" if (self.word >> i) & 1 else "0" for i in range(self.n))

    def support(self) -> tuple[int, ...]:
        """1-based indices of the 1 bits, ascending."""
        return tuple(i + 1 for i in range(self.n) if (self.word >> i) & 1)

    @property
    def weight(self) -> int:
        return self.word.bit_count()

    def __lt__(self, other: "BitVec") -> bool:
        # Lexicographic on the text form; this is the map-key order.
        if self.n != other.n:
            return self.n < other.n
        return self.to_text() < other.to_text()

    def __repr__(self) -> str:
        return f"BitVec({self.to_text()!r})"


@dataclass(frozen=True, slots=True)
class LabeledExample:
    x: BitVec
    label: int

    def __post_init__(self):
        as_label(self.label)


def _require_same_length(x: BitVec, y: BitVec) -> None:
    if x.n != y.n:
        raise ValueError(f"length mismatch: {x.n} vs {y.n}")


def weight(x: BitVec) -> int:
    """Number of 1 bits."""
    return x.word.bit_count()


def same(x: BitVec, y: BitVec) -> int:
    """Number of positions where x and y agree."""
    _require_same_length(x, y)
    return x.n - (x.word ^ y.word).bit_count()


def intersect_count(x: BitVec, y: BitVec) -> int:
    """Number of positions where both x and y are 1."""
    _require_same_length(x, y)
    return (x.word & y.word).bit_count()


def leq(x: BitVec, y: BitVec) -> bool:
    """Pointwise x_i <= y_i for every position."""
    _require_same_length(x, y)
    return x.word & ~y.word == 0


def parse_rational(text: str) -> Fraction:
    """Parse 'P/Q' or a plain integer string into an exact rational."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(text))


def format_rational(value: Fraction | int) -> str:
    """Render an exact rational as 'P/Q' (denominator always present)."""
    f = Fraction(value)
    return f"{f.numerator}/{f.denominator}"
