"""Dual-form kernel Perceptron with threshold, learning-rate and bias knobs.

The hypothesis is held implicitly as the list of mistake examples: the
score of x is  rate * sum_{(v,L) in mistakes} L * K(v, x) (+ bias). The
prediction is +1 exactly when the score reaches the threshold, so a tie
predicts +1. `explicit_run` replays a stream in the materialised
feature space and serves as the primal oracle for the dual form.

All score arithmetic is integer/rational and exact; kernel sums are
plain ints scaled once by the learning rate.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, NamedTuple

from .bitvec import BitVec, LabeledExample
from .kernels import KernelKind, enumerate_monotone, enumerate_signed, kernel
from .errors import GuardExceeded
from .trace import StepRecord, Trace


@dataclass(frozen=True, slots=True)
class PerceptronConfig:
    kind: KernelKind
    theta: Fraction = Fraction(0)
    learning_rate: Fraction = Fraction(1)
    use_bias: bool = False

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")


class MistakeRecord(NamedTuple):
    x: BitVec
    label: int
    step: int


@dataclass(frozen=True, slots=True)
class PerceptronState:
    """Immutable dual state; `process` returns an updated copy."""

    config: PerceptronConfig
    mistakes: tuple[MistakeRecord, ...] = ()
    bias_steps: int = 0  # promotions minus demotions
    steps_seen: int = 0

    @staticmethod
    def fresh(config: PerceptronConfig) -> "PerceptronState":
        return PerceptronState(config)

    @property
    def w_hat(self) -> Fraction:
        if not self.config.use_bias:
            return Fraction(0)
        return self.config.learning_rate * self.bias_steps

    def kernel_sum(self, x: BitVec) -> int:
        kind = self.config.kind
        return sum(rec.label * kernel(kind, rec.x, x) for rec in self.mistakes)

    def score(self, x: BitVec) -> Fraction:
        return self.config.learning_rate * self.kernel_sum(x) + self.w_hat

    def predict(self, x: BitVec) -> int:
        return 1 if self.score(x) >= self.config.theta else -1

    def process(self, example: LabeledExample) -> tuple["PerceptronState", int, bool]:
        predicted = self.predict(example.x)
        step = self.steps_seen + 1
        if predicted == example.label:
            return replace(self, steps_seen=step), predicted, False
        new = replace(
            self,
            mistakes=self.mistakes + (MistakeRecord(example.x, example.label, step),),
            bias_steps=self.bias_steps + example.label,
            steps_seen=step,
        )
        return new, predicted, True


def run(config: PerceptronConfig, stream: Iterable[LabeledExample]) -> Trace:
    """Fold the dual update over a stream, recording every step."""
    state = PerceptronState.fresh(config)
    trace = Trace()
    for step, ex in enumerate(stream, start=1):
        score = state.score(ex.x)
        state, predicted, mistake = state.process(ex)
        trace.records.append(StepRecord(step, ex.x, ex.label, predicted, mistake, score))
    trace.final_state = state
    return trace


def explicit_run(
    config: PerceptronConfig, stream: Iterable[LabeledExample], max_vars: int | None = None
) -> Trace:
    """Primal oracle: same algorithm over the materialised feature space."""
    stream = list(stream)
    if not stream:
        t = Trace()
        t.final_state = _ExplicitPerceptron(config, 0)
        return t
    n = stream[0].x.n
    learner = _ExplicitPerceptron(config, n, max_vars=max_vars)
    trace = Trace()
    for step, ex in enumerate(stream, start=1):
        score, predicted, mistake = learner.process(ex)
        trace.records.append(StepRecord(step, ex.x, ex.label, predicted, mistake, score))
    trace.final_state = learner
    return trace


class _ExplicitPerceptron:
    """Weight vector over the enumerated conjunction space.

    Weights are stored as integer update counts; the actual weight is
    count * learning_rate, applied once at comparison time.
    """

    def __init__(self, config: PerceptronConfig, n: int, max_vars: int | None = None):
        from .kernels import MONOTONE_EXPAND_LIMIT, SIGNED_EXPAND_LIMIT

        self.config = config
        self.n = n
        kind = config.kind
        if kind.is_monotone:
            limit = MONOTONE_EXPAND_LIMIT if max_vars is None else max_vars
            if n > limit:
                raise GuardExceeded(f"explicit run over {n} variables exceeds guard {limit}")
            self._features = [("mono", m, 0) for m in enumerate_monotone(n, kind.k)]
        else:
            limit = SIGNED_EXPAND_LIMIT if max_vars is None else max_vars
            if n > limit:
                raise GuardExceeded(f"explicit run over {n} variables exceeds guard {limit}")
            self._features = [("sign", pos, neg) for pos, neg in enumerate_signed(n, kind.k)]
        self.counts = [0] * len(self._features)
        self.bias_steps = 0

    def active_indices(self, x: BitVec) -> list[int]:
        word = x.word
        out = []
        for idx, (tag, pos, neg) in enumerate(self._features):
            if tag == "mono":
                if pos & ~word == 0:
                    out.append(idx)
            elif pos & ~word == 0 and neg & word == 0:
                out.append(idx)
        return out

    def weights(self) -> list[Fraction]:
        rate = self.config.learning_rate
        return [rate * c for c in self.counts]

    def score(self, x: BitVec) -> Fraction:
        total = sum(self.counts[i] for i in self.active_indices(x))
        if self.config.use_bias:
            total += self.bias_steps
        return self.config.learning_rate * total

    def process(self, example: LabeledExample) -> tuple[Fraction, int, bool]:
        active = self.active_indices(example.x)
        total = sum(self.counts[i] for i in active)
        if self.config.use_bias:
            total += self.bias_steps
        score = self.config.learning_rate * total
        predicted = 1 if score >= self.config.theta else -1
        mistake = predicted != example.label
        if mistake:
            for i in active:
                self.counts[i] += example.label
            self.bias_steps += example.label
        return score, predicted, mistake


def perceptron_bound(radius: Fraction, u_norm: Fraction, margin: Fraction) -> Fraction:
    """Mistake ceiling radius^2 * u_norm^2 / margin^2 for a separable stream."""
    radius, u_norm, margin = Fraction(radius), Fraction(u_norm), Fraction(margin)
    if radius <= 0 or u_norm <= 0 or margin <= 0:
        raise ValueError("bound inputs must be positive")
    return radius**2 * u_norm**2 / margin**2
