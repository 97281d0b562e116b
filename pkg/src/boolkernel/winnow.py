"""Winnow(alpha, theta) in explicit and lazy support-restricted forms.

Three ways to run the multiplicative-update learner:

* `ExplicitWinnow` — one weight per feature, for small feature spaces.
* `MonomialSpace` + `ExplicitWinnow` — the feature space of all nonempty
  monotone monomials over m variables, fully enumerated (m <= 16).
* `LazyMonomialWinnow` — the same learner over all 2^m - 1 nonempty
  monomials without enumerating them: a prediction on x only involves
  monomials inside the support of x, and an update only touches those
  same monomials, so a sparse exponent map keyed by support subsets is
  an exact simulation no matter how large m is. This is what makes the
  counting-reduction instances (m in the hundreds) executable.

Weights are alpha^e for an integer exponent e per feature (initially 0,
i.e. weight 1), so everything stays exact rational arithmetic. A score
equal to theta predicts +1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .bitvec import BitVec, LabeledExample
from .errors import GuardExceeded
from .kernels import enumerate_monotone
from .trace import StepRecord, Trace

DEFAULT_SUPPORT_GUARD = 24
MONOMIAL_SPACE_GUARD = 16


def ceil_log(alpha: Fraction, x: Fraction) -> int:
    """Smallest integer e with alpha**e >= x, by exact rational bracketing."""
    alpha, x = Fraction(alpha), Fraction(x)
    if alpha <= 1:
        raise ValueError("base must exceed 1")
    if x <= 0:
        raise ValueError("argument must be positive")
    if x == 1:
        return 0
    if x > 1:
        hi = 1
        while alpha**hi < x:
            hi *= 2
        lo = hi // 2  # alpha**lo < x <= alpha**hi
        while lo + 1 < hi:
            mid = (lo + hi) // 2
            if alpha**mid >= x:
                hi = mid
            else:
                lo = mid
        return hi
    # x < 1: walk down to the most negative e that still satisfies alpha**e >= x
    hi, lo = 0, -1
    while alpha**lo >= x:
        hi, lo = lo, lo * 2
    # now alpha**lo < x <= alpha**hi
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if alpha**mid >= x:
            hi = mid
        else:
            lo = mid
    return hi


def winnow_bound(alpha: Fraction, theta: Fraction, n_features: int, k: int) -> Fraction:
    """Mistake ceiling for a k-literal monotone disjunction target.

    The log term is rounded up to an integer exactly; since the result
    is an upper bound, the rounding preserves validity.
    """
    alpha, theta = Fraction(alpha), Fraction(theta)
    if alpha <= 1 or theta < 1 or n_features < 1 or k < 0:
        raise ValueError("need alpha > 1, theta >= 1, n_features >= 1, k >= 0")
    first = alpha / (alpha - 1) * Fraction(n_features) / theta
    return first + k * (alpha + 1) * (1 + ceil_log(alpha, theta))


@dataclass(frozen=True, slots=True)
class WinnowConfig:
    alpha: Fraction
    theta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        object.__setattr__(self, "theta", Fraction(self.theta))
        if self.alpha <= 1:
            raise ValueError("promotion factor must exceed 1")
        if self.theta <= 0:
            raise ValueError("threshold must be positive")


class _PowerCache:
    """Memoised exact powers alpha**e for integer e of either sign."""

    def __init__(self, alpha: Fraction):
        self.alpha = alpha
        self._cache: dict[int, Fraction] = {0: Fraction(1)}

    def __call__(self, e: int) -> Fraction:
        v = self._cache.get(e)
        if v is None:
            v = self.alpha**e
            self._cache[e] = v
        return v


def iter_set_bits(word: int) -> Iterator[int]:
    """0-based indices of set bits, ascending."""
    while word:
        low = word & -word
        yield low.bit_length() - 1
        word ^= low


def nonempty_submasks(mask: int) -> Iterator[int]:
    """All nonzero submasks of mask (descending numeric order)."""
    sub = mask
    while sub:
        yield sub
        sub = (sub - 1) & mask


class ExplicitWinnow:
    """One integer exponent per feature; examples live in the feature space."""

    def __init__(self, config: WinnowConfig, n_features: int):
        self.config = config
        self.n_features = n_features
        self.exponents = [0] * n_features
        self._pow = _PowerCache(config.alpha)

    def score(self, x: BitVec) -> Fraction:
        if x.n != self.n_features:
            raise ValueError(f"feature dimension mismatch: {x.n} vs {self.n_features}")
        exps = self.exponents
        p = self._pow
        total = Fraction(0)
        for i in iter_set_bits(x.word):
            total += p(exps[i])
        return total

    def weights(self) -> list[Fraction]:
        return [self._pow(e) for e in self.exponents]

    def process(self, example: LabeledExample) -> tuple[Fraction, int, bool]:
        s = self.score(example.x)
        predicted = 1 if s >= self.config.theta else -1
        mistake = predicted != example.label
        if mistake:
            d = 1 if example.label > 0 else -1
            exps = self.exponents
            for i in iter_set_bits(example.x.word):
                exps[i] += d
        return s, predicted, mistake

    def run(self, stream: Iterable[LabeledExample]) -> Trace:
        trace = Trace()
        for step, ex in enumerate(stream, start=1):
            s, predicted, mistake = self.process(ex)
            trace.records.append(StepRecord(step, ex.x, ex.label, predicted, mistake, s))
        trace.final_state = self
        return trace


class MonomialSpace:
    """Enumerated space of all nonempty monotone monomials over m variables.

    Feature order is by monomial size then lexicographically on index
    tuples, matching the expansion oracle minus its empty-monomial slot.
    """

    def __init__(self, m: int):
        if m > MONOMIAL_SPACE_GUARD:
            raise GuardExceeded(f"monomial space over {m} variables exceeds guard {MONOMIAL_SPACE_GUARD}")
        self.m = m
        self.masks = enumerate_monotone(m)[1:]  # drop the empty monomial
        self.index_of = {mask: i for i, mask in enumerate(self.masks)}
        self.dimension = len(self.masks)

    def transform(self, x: BitVec) -> BitVec:
        if x.n != self.m:
            raise ValueError(f"length mismatch: {x.n} vs {self.m}")
        bits = 0
        for sub in nonempty_submasks(x.word):
            bits |= 1 << self.index_of[sub]
        return BitVec(self.dimension, bits)

    def transform_stream(self, stream: Iterable[LabeledExample]) -> list[LabeledExample]:
        return [LabeledExample(self.transform(ex.x), ex.label) for ex in stream]


class LazyMonomialWinnow:
    """Exact Winnow over all nonempty monotone monomials, stored sparsely.

    The exponent map holds integer net exponents keyed by support mask;
    a missing key means exponent 0 (weight 1). Every update appends to
    the audit log so any stored exponent can be re-derived on demand.
    """

    def __init__(self, config: WinnowConfig, m: int, support_guard: int = DEFAULT_SUPPORT_GUARD):
        self.config = config
        self.m = m
        self.support_guard = support_guard
        self.exponents: dict[int, int] = {}
        self.audit_log: list[tuple[BitVec, int]] = []
        self._pow = _PowerCache(config.alpha)

    def _check(self, x: BitVec) -> None:
        if x.n != self.m:
            raise ValueError(f"length mismatch: {x.n} vs {self.m}")
        if x.weight > self.support_guard:
            raise GuardExceeded(
                f"support weight {x.weight} exceeds guard {self.support_guard}"
            )

    def score(self, x: BitVec) -> Fraction:
        """Sum of alpha^exponent over nonempty monomials inside support(x)."""
        self._check(x)
        exps = self.exponents
        p = self._pow
        total = Fraction(0)
        word = x.word
        sub = word
        while sub:
            e = exps.get(sub)
            total += p(e) if e else 1
            sub = (sub - 1) & word
        return total

    def exponent_of(self, indices: Iterable[int]) -> int:
        """Net exponent of the monomial given by 1-based variable indices."""
        mask = 0
        for i in indices:
            if not 1 <= i <= self.m:
                raise ValueError(f"index {i} out of range 1..{self.m}")
            mask |= 1 << (i - 1)
        if mask == 0:
            raise ValueError("monomials are nonempty")
        return self.exponents.get(mask, 0)

    def process(self, example: LabeledExample) -> tuple[Fraction, int, bool]:
        s = self.score(example.x)
        predicted = 1 if s >= self.config.theta else -1
        mistake = predicted != example.label
        if mistake:
            d = 1 if example.label > 0 else -1
            exps = self.exponents
            word = example.x.word
            sub = word
            while sub:
                exps[sub] = exps.get(sub, 0) + d
                sub = (sub - 1) & word
            self.audit_log.append((example.x, d))
        return s, predicted, mistake

    def run(self, stream: Iterable[LabeledExample]) -> Trace:
        trace = Trace()
        for step, ex in enumerate(stream, start=1):
            s, predicted, mistake = self.process(ex)
            trace.records.append(StepRecord(step, ex.x, ex.label, predicted, mistake, s))
        trace.final_state = self
        return trace

    def audit_check(self, masks: Iterable[int] | None = None) -> bool:
        """Re-derive stored exponents from the audit log; True iff all match."""
        keys = list(self.exponents) if masks is None else list(masks)
        for key in keys:
            net = sum(d for vec, d in self.audit_log if key & ~vec.word == 0)
            if net != self.exponents.get(key, 0):
                return False
        return True

    def weights_on_support(self, x: BitVec) -> dict[int, Fraction]:
        """Weight of every nonempty monomial inside support(x), keyed by mask."""
        self._check(x)
        return {sub: self._pow(self.exponents.get(sub, 0)) for sub in nonempty_submasks(x.word)}


def kwp_score(
    sequence: Iterable[LabeledExample],
    z: BitVec,
    alpha: Fraction,
    theta: Fraction,
    support_guard: int = DEFAULT_SUPPORT_GUARD,
    force: bool = False,
) -> tuple[Fraction, bool]:
    """Run lazy Winnow over the sequence; exact score of z and the decision.

    The problem definition requires a monotone consistent sequence, so an
    inconsistent one raises unless `force` is set (then it only warns).
    """
    from .reduction import check_monotone_consistent

    sequence = list(sequence)
    result = check_monotone_consistent(sequence)
    if not result.ok:
        msg = f"sequence is not monotone consistent at pair {result.violation}"
        if not force:
            raise ValueError(msg)
        import warnings

        warnings.warn(msg, stacklevel=2)
    sim = LazyMonomialWinnow(WinnowConfig(alpha, theta), z.n, support_guard)
    for ex in sequence:
        sim.process(ex)
    score = sim.score(z)
    return score, score >= sim.config.theta


def kwp_decide(
    sequence: Iterable[LabeledExample],
    z: BitVec,
    alpha: Fraction,
    theta: Fraction,
    support_guard: int = DEFAULT_SUPPORT_GUARD,
    force: bool = False,
) -> bool:
    """Decision form of `kwp_score`: is the trained score of z at least theta?"""
    return kwp_score(sequence, z, alpha, theta, support_guard, force)[1]
