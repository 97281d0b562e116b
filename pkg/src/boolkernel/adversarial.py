"""Adversarial constructions against the monotone-monomial kernel Perceptron.

The centrepiece is a generate-and-verify hard set: t vectors of equal
weight w whose pairwise supports overlap in at most c positions. Fed to
the kernel Perceptron after the two-example prefix <0^n,-1>, <1^n,+1>,
every hard-set vector is a forced false positive whenever the exact
binomial margin below is positive:

    sum_{r=c+1}^{w} C(w,r)  -  t * sum_{r=0}^{c} C(w,r)  >  t + 1

The certificate operation decomposes the score on a hard-set vector
into the shared-monomial part (monomials also satisfied by another set
member) and the private part, exactly, from the mistake list alone.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .bitvec import NEGATIVE, POSITIVE, BitVec, LabeledExample
from .errors import GenerationFailed, GuardExceeded
from .kernels import KernelKind
from .perceptron import PerceptronConfig, PerceptronState, run
from .trace import Trace
from .winnow import nonempty_submasks

CERTIFICATE_GUARD = 24


@dataclass(frozen=True, slots=True)
class HardSetParams:
    n: int
    weight: int
    cap: int
    count: int
    seed: int
    max_attempts: int = 2000

    def __post_init__(self):
        if not 0 < self.weight <= self.n:
            raise ValueError("need 0 < weight <= n")
        if not 0 <= self.cap < self.weight:
            raise ValueError("need 0 <= cap < weight")
        if self.count < 0:
            raise ValueError("count must be nonnegative")


@dataclass(frozen=True, slots=True)
class HardSet:
    params: HardSetParams
    vectors: tuple[BitVec, ...]

    def validate(self) -> None:
        p = self.params
        for v in self.vectors:
            if v.weight != p.weight:
                raise ValueError(f"vector {v.to_text()} has weight {v.weight} != {p.weight}")
        for i in range(len(self.vectors)):
            for j in range(i + 1, len(self.vectors)):
                inter = (self.vectors[i].word & self.vectors[j].word).bit_count()
                if inter > p.cap:
                    raise ValueError(f"pair ({i + 1},{j + 1}) intersects in {inter} > {p.cap}")


def gen_hard_set(params: HardSetParams) -> HardSet:
    """Seeded rejection sampling; every returned set passes `validate`.

    Bits are drawn 1 with probability 2*weight/n; overweight draws are
    trimmed by clearing the highest-indexed 1 bits, underweight draws
    are rejected, and candidates that overlap an accepted vector in more
    than `cap` positions are rejected. Deterministic given the seed.
    """
    rng = random.Random(params.seed)
    n, w, cap = params.n, params.weight, params.cap
    accepted: list[BitVec] = []
    attempts = 0
    while len(accepted) < params.count:
        if attempts >= params.max_attempts:
            raise GenerationFailed(
                f"no valid vector after {attempts} attempts "
                f"(have {len(accepted)} of {params.count})"
            )
        attempts += 1
        word = 0
        for pos in range(n):
            if rng.randrange(n) < 2 * w:
                word |= 1 << pos
        if word.bit_count() < w:
            continue
        while word.bit_count() > w:  # clear highest-indexed 1s first
            word &= ~(1 << (word.bit_length() - 1))
        if any((word & v.word).bit_count() > cap for v in accepted):
            continue
        accepted.append(BitVec(n, word))
    hs = HardSet(params, tuple(accepted))
    hs.validate()
    return hs


def mistake_forcing_margin(weight: int, cap: int, count: int) -> int:
    """Exact slack in the forced-false-positive condition (positive = forced)."""
    private = sum(math.comb(weight, r) for r in range(cap + 1, weight + 1))
    shared = sum(math.comb(weight, r) for r in range(cap + 1))
    return private - count * shared - (count + 1)


def build_mistake_sequence(hs: HardSet) -> list[LabeledExample]:
    """Prefix <0^n,-1>, <1^n,+1> then every hard-set vector as a negative.

    Labels agree with the full conjunction x_1..x_n as target: the set
    vectors have weight < n, so they are negatives.
    """
    n = hs.params.n
    seq = [
        LabeledExample(BitVec.zeros(n), NEGATIVE),
        LabeledExample(BitVec.ones(n), POSITIVE),
    ]
    seq.extend(LabeledExample(v, NEGATIVE) for v in hs.vectors)
    return seq


@dataclass(frozen=True, slots=True)
class Certificate:
    """Exact decomposition of the dual score on a hard-set vector."""

    sum_shared: Fraction  # monomials also satisfied by another set vector
    sum_private: Fraction  # monomials satisfied by this vector alone
    empty_weight: Fraction
    bias: Fraction

    @property
    def score(self) -> Fraction:
        return self.sum_shared + self.sum_private + self.empty_weight + self.bias


def certificate(state: PerceptronState, hs: HardSet, i: int) -> Certificate:
    """Partition the score of hard-set vector i over its satisfied monomials.

    Every monomial inside the support of x^i gets its exact dual weight
    (computed from the mistake list via a superset-sum transform); the
    nonempty ones are split by whether some other set vector also
    satisfies them. Requires weight(x^i) <= 24.
    """
    if not 1 <= i <= len(hs.vectors):
        raise ValueError(f"index {i} out of range 1..{len(hs.vectors)}")
    xi = hs.vectors[i - 1]
    w = xi.weight
    if w > CERTIFICATE_GUARD:
        raise GuardExceeded(f"support weight {w} exceeds guard {CERTIFICATE_GUARD}")

    # Restrict every support to x^i's coordinates (w-bit masks).
    positions = [p for p in range(xi.n) if (xi.word >> p) & 1]
    place = {p: j for j, p in enumerate(positions)}

    def restrict(word: int) -> int:
        out = 0
        rem = word & xi.word
        while rem:
            low = rem & -rem
            out |= 1 << place[low.bit_length() - 1]
            rem ^= low
        return out

    size = 1 << w
    counts = [0] * size
    for rec in state.mistakes:
        counts[restrict(rec.x.word)] += rec.label

    # Superset-sum: counts[T] becomes the net update count of monomial T.
    for b in range(w):
        step = 1 << b
        base = 0
        while base < size:
            for off in range(base, base + step):
                counts[off] += counts[off + step]
            base += step * 2

    shared_masks: set[int] = set()
    for j, other in enumerate(hs.vectors, start=1):
        if j == i:
            continue
        overlap = restrict(other.word)
        if overlap:
            shared_masks.update(nonempty_submasks(overlap))

    rate = state.config.learning_rate
    total = sum(counts)
    shared_total = sum(counts[m] for m in shared_masks)
    empty = counts[0]
    return Certificate(
        sum_shared=rate * shared_total,
        sum_private=rate * (total - shared_total - empty),
        empty_weight=rate * empty,
        bias=state.w_hat,
    )


_LARGE_THETA_NUM_EXP = 47  # the small/large threshold split sits at 2^(47 n / 1000)
_LARGE_THETA_DEN = 1000


def _theta_is_large(theta: Fraction, n: int) -> bool:
    # theta > 2^(47n/1000)  <=>  theta^1000 > 2^(47n), exactly.
    if theta <= 0:
        return False
    return theta**_LARGE_THETA_DEN > Fraction(2) ** (_LARGE_THETA_NUM_EXP * n)


def threshold_case_sequence(
    theta: Fraction, n: int, hs: HardSet
) -> tuple[str, list[LabeledExample]]:
    """Mistake-forcing sequence for the generalized learner at threshold theta.

    Negative thresholds prepend ceil(-theta) copies of <0^n,-1>; large
    positive thresholds switch to the full disjunction target and repeat
    the single-bit example e_1 ceil(theta/2) - 1 times; the mid range
    keeps the standard sequence.
    """
    theta = Fraction(theta)
    if theta < 0:
        reps = math.ceil(-theta)
        seq = [LabeledExample(BitVec.zeros(n), NEGATIVE) for _ in range(reps)]
        seq.append(LabeledExample(BitVec.ones(n), POSITIVE))
        seq.extend(LabeledExample(v, NEGATIVE) for v in hs.vectors)
        return "conjunction x_1..x_n", seq
    if _theta_is_large(theta, n):
        reps = max(math.ceil(theta / 2) - 1, 0)
        e1 = BitVec.from_support(n, [1])
        return "disjunction x_1 v .. v x_n", [LabeledExample(e1, POSITIVE)] * reps
    return "conjunction x_1..x_n", build_mistake_sequence(hs)


@dataclass(frozen=True, slots=True)
class PacDistribution:
    """Finite-support distribution: 1/4 on 0^n, 1/4 on 1^n, 1/2 split over the set."""

    hard_set: HardSet

    def __post_init__(self):
        if not self.hard_set.vectors:
            raise ValueError("distribution needs at least one hard-set vector")

    def atoms(self) -> list[tuple[BitVec, int, Fraction]]:
        n = self.hard_set.params.n
        t = len(self.hard_set.vectors)
        out = [
            (BitVec.zeros(n), NEGATIVE, Fraction(1, 4)),
            (BitVec.ones(n), POSITIVE, Fraction(1, 4)),
        ]
        out.extend((v, NEGATIVE, Fraction(1, 2 * t)) for v in self.hard_set.vectors)
        return out

    def total_weight(self) -> Fraction:
        return sum((wt for _, _, wt in self.atoms()), Fraction(0))


def pac_sample(dist: PacDistribution, count: int, seed: int) -> list[LabeledExample]:
    """i.i.d. draws with the exact atom probabilities, deterministic per seed."""
    rng = random.Random(seed)
    n = dist.hard_set.params.n
    t = len(dist.hard_set.vectors)
    zero = LabeledExample(BitVec.zeros(n), NEGATIVE)
    one = LabeledExample(BitVec.ones(n), POSITIVE)
    out = []
    for _ in range(count):
        u = rng.randrange(4 * t)
        if u < t:
            out.append(zero)
        elif u < 2 * t:
            out.append(one)
        else:
            out.append(LabeledExample(dist.hard_set.vectors[(u - 2 * t) // 2], NEGATIVE))
    return out


@dataclass
class PacExperimentResult:
    trace: Trace
    true_error: Fraction
    prefix_hit: bool
    distinct_hard_seen: int

    @property
    def final_state(self) -> PerceptronState:
        return self.trace.final_state


def pac_experiment(
    dist: PacDistribution, sample_size: int, seed: int, force_prefix: bool = False
) -> PacExperimentResult:
    """Train the monotone kernel Perceptron on a drawn sample; exact error.

    The error of the final hypothesis is the total probability of the
    misclassified atoms, evaluated exactly over the finite support. With
    `force_prefix` the stream starts with <0^n,-1>, <1^n,+1> ahead of
    the drawn sample.
    """
    n = dist.hard_set.params.n
    sample = pac_sample(dist, sample_size, seed)
    stream = list(sample)
    if force_prefix:
        stream = [
            LabeledExample(BitVec.zeros(n), NEGATIVE),
            LabeledExample(BitVec.ones(n), POSITIVE),
        ] + stream
    config = PerceptronConfig(KernelKind.monotone())
    trace = run(config, stream)
    state = trace.final_state
    error = Fraction(0)
    for vec, label, weight in dist.atoms():
        if state.predict(vec) != label:
            error += weight
    prefix_hit = (
        len(stream) >= 2
        and stream[0].x.weight == 0
        and stream[0].label == NEGATIVE
        and stream[1].x.weight == stream[1].x.n
        and stream[1].label == POSITIVE
    )
    hard_words = {v.word for v in dist.hard_set.vectors}
    seen = {ex.x.word for ex in sample if ex.x.word in hard_words}
    return PacExperimentResult(trace, error, prefix_hit, len(seen))
