"""Conjunction-counting kernels and the explicit feature-expansion oracle.

Four feature families are supported: all signed conjunctions, all
monotone conjunctions, and the size-bounded variants of each. The
kernel value is the exact number of conjunctions of the family that are
true in both arguments (the empty conjunction counts, so monotone
kernels are always >= 1).

`expand` deliberately materialises the feature space so the closed-form
kernels can be certified against an independent inner product. The
enumeration order is fixed: monotone conjunctions are ordered by size
then lexicographically on their index tuples; signed conjunctions follow
a ternary counter over {absent, positive, negative} trits with x_1 as
the most significant digit.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .bitvec import BitVec, intersect_count, same
from .errors import GuardExceeded

MONOTONE_EXPAND_LIMIT = 20
SIGNED_EXPAND_LIMIT = 10

_FAMILIES = ("all", "monotone", "bounded", "bounded-monotone")


@dataclass(frozen=True, slots=True)
class KernelKind:
    """One of the four conjunction families; k is the size bound when bounded."""

    family: str
    k: int | None = None

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        bounded = self.family.startswith("bounded")
        if bounded and (self.k is None or self.k < 0):
            raise ValueError("bounded families need k >= 0")
        if not bounded and self.k is not None:
            raise ValueError(f"family {self.family!r} takes no size bound")

    @staticmethod
    def all_conjunctions() -> "KernelKind":
        return KernelKind("all")

    @staticmethod
    def monotone() -> "KernelKind":
        return KernelKind("monotone")

    @staticmethod
    def bounded(k: int) -> "KernelKind":
        return KernelKind("bounded", k)

    @staticmethod
    def bounded_monotone(k: int) -> "KernelKind":
        return KernelKind("bounded-monotone", k)

    @property
    def is_monotone(self) -> bool:
        return self.family in ("monotone", "bounded-monotone")

    def check_k(self, n: int) -> None:
        if self.k is not None and self.k > n:
            raise ValueError(f"size bound k={self.k} exceeds n={n}")

    def describe(self) -> str:
        return self.family if self.k is None else f"{self.family}(k={self.k})"


def kernel(kind: KernelKind, x: BitVec, y: BitVec) -> int:
    """Exact count of conjunctions of the family true in both x and y."""
    kind.check_k(x.n)
    if kind.family == "all":
        return 1 << same(x, y)
    if kind.family == "monotone":
        return 1 << intersect_count(x, y)
    base = same(x, y) if kind.family == "bounded" else intersect_count(x, y)
    return sum(comb(base, l) for l in range(kind.k + 1))


def enumerate_monotone(n: int, k: int | None = None) -> list[int]:
    """Subset masks ordered by size then lexicographically on index tuples."""
    from itertools import combinations

    top = n if k is None else min(k, n)
    masks = []
    for size in range(top + 1):
        for combo in combinations(range(n), size):
            m = 0
            for i in combo:
                m |= 1 << i
            masks.append(m)
    return masks


def enumerate_signed(n: int, k: int | None = None) -> list[tuple[int, int]]:
    """(positive-mask, negative-mask) pairs in ternary-counter order.

    Trit 0 = variable absent, 1 = positive literal, 2 = negated literal;
    x_1 is the most significant digit of the counter.
    """
    out = []
    for code in range(3**n):
        pos = neg = 0
        for i in range(n):
            trit = (code // 3 ** (n - 1 - i)) % 3
            if trit == 1:
                pos |= 1 << i
            elif trit == 2:
                neg |= 1 << i
        if k is not None and (pos | neg).bit_count() > k:
            continue
        out.append((pos, neg))
    return out


def dimension(kind: KernelKind, n: int) -> int:
    kind.check_k(n)
    if kind.family == "all":
        return 3**n
    if kind.family == "monotone":
        return 1 << n
    if kind.family == "bounded-monotone":
        return sum(comb(n, l) for l in range(kind.k + 1))
    return sum(comb(n, l) * (1 << l) for l in range(kind.k + 1))


@dataclass(frozen=True, slots=True)
class ExplicitFeatureVector:
    """0/1 indicator over the enumerated conjunction space, packed in an int."""

    kind: KernelKind
    n: int
    size: int
    bits: int

    def indicator(self, index: int) -> int:
        if not 0 <= index < self.size:
            raise ValueError(f"feature index {index} out of range")
        return (self.bits >> index) & 1

    def to_list(self) -> list[int]:
        return [(self.bits >> i) & 1 for i in range(self.size)]


def expand(kind: KernelKind, x: BitVec, max_vars: int | None = None) -> ExplicitFeatureVector:
    """Materialise the feature map of x (oracle use only; guarded by size)."""
    kind.check_k(x.n)
    if kind.is_monotone:
        limit = MONOTONE_EXPAND_LIMIT if max_vars is None else max_vars
        if x.n > limit:
            raise GuardExceeded(f"expansion over {x.n} variables exceeds guard {limit}")
        masks = enumerate_monotone(x.n, kind.k)
        bits = 0
        for idx, m in enumerate(masks):
            if m & ~x.word == 0:
                bits |= 1 << idx
        return ExplicitFeatureVector(kind, x.n, len(masks), bits)
    limit = SIGNED_EXPAND_LIMIT if max_vars is None else max_vars
    if x.n > limit:
        raise GuardExceeded(f"signed expansion over {x.n} variables exceeds guard {limit}")
    pairs = enumerate_signed(x.n, kind.k)
    bits = 0
    for idx, (pos, neg) in enumerate(pairs):
        if pos & ~x.word == 0 and neg & x.word == 0:
            bits |= 1 << idx
    return ExplicitFeatureVector(kind, x.n, len(pairs), bits)


def dot(a: ExplicitFeatureVector, b: ExplicitFeatureVector) -> int:
    """Exact inner product of two explicit feature vectors."""
    if a.kind != b.kind or a.n != b.n:
        raise ValueError("feature vectors come from different spaces")
    return (a.bits & b.bits).bit_count()
