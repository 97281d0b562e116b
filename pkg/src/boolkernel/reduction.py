"""Counting-hardness reduction: M2SAT instance -> kernel-Winnow prediction.

Given a monotone 2-CNF F over n variables and a count threshold K, the
builder emits a monotone consistent example sequence S over m variables
and a query z such that lazy Winnow(alpha, theta), run over all
nonempty monotone monomials, answers  score(z) >= theta  exactly when F
has at least K satisfying assignments.

The m variables split into three blocks: A = x_1..x_n mirrors the CNF
variables, B = x_{n+1}..x_{n+U} carries an exact-count formula that
pads the score to sit against theta, and C holds slack variables that
force every intended promotion/demotion while keeping S monotone
consistent. All derived quantities (U, V, W, m, q, c, p, D) are exact
rationals/integers; every defining inequality can be re-checked with
`verify_inequalities`, and `verify_trace` replays the whole sequence on
the lazy simulator asserting the claimed behaviour step by step.

Base-2 logs of alpha appear only inside ceilings, so they are evaluated
exactly via `ceil_log` against powers of two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

from .bitvec import NEGATIVE, POSITIVE, BitVec, LabeledExample, format_rational, leq
from .cnf import M2SATInstance, MonotoneCNF, count_sat, exact_count_cnf
from .errors import GuardExceeded, ParameterViolation, SlackBudgetError, VerificationFailure
from .winnow import LazyMonomialWinnow, WinnowConfig, ceil_log, nonempty_submasks

SLACK_PROMOTION = "slack-promotion"
CLAUSE_NEGATIVE = "clause-negative"
STAGE2_PROMOTION = "stage2-promotion"
STAGE4_PROMOTION = "stage4-promotion"


@dataclass(frozen=True)
class ReductionParams:
    """Every derived quantity of the construction, all exact.

    D and p depend on the count threshold K and are filled in by
    `with_count_threshold`; the other fields depend only on (n, alpha,
    theta).
    """

    n: int
    alpha: Fraction
    theta: Fraction
    epsilon: Fraction
    U: int
    V: int
    W: int
    m: int
    q: int
    c: int
    gadget_reps: int  # positives per slack group: ceil(log_alpha(theta/3))
    ceil_un: int  # ceil((U - n) / log2(alpha))
    K: int | None = None
    D: Fraction | None = None
    p: int | None = None

    @property
    def stage4_first(self) -> int:
        return self.q - self.ceil_un

    @property
    def stage4_second(self) -> int:
        return self.ceil_un - self.c

    def with_count_threshold(self, K: int) -> "ReductionParams":
        """Fill in D and p for a concrete K, validating their windows."""
        if not 1 <= K <= 2**self.n:
            raise ParameterViolation("K range", f"K={K} outside 1..2^{self.n}")
        alpha, theta, q, c = self.alpha, self.theta, self.q, self.c
        D = theta - (2**self.n - 1) * (2**self.U - 1) - alpha**q * K
        quarter = Fraction(1, 4) * alpha**q
        if not alpha ** (q - c) <= quarter < D:
            raise ParameterViolation(
                "Eq (6) window", f"need alpha^(q-c) <= alpha^q/4 < D, got D={_approx(D)}"
            )
        p = math.ceil(D / alpha ** (q - c))
        if p <= 1:
            raise ParameterViolation("Eq (10) p-range", f"p={p} must exceed 1")
        if not D <= p * alpha ** (q - c) < D + quarter:
            raise ParameterViolation("p window", "no multiple of alpha^(q-c) in [D, D + alpha^q/4)")
        if p > 2**self.U - 3:
            raise ParameterViolation("Eq (10) p-range", f"p={p} > 2^U - 3 = {2 ** self.U - 3}")
        return replace(self, K=K, D=D, p=p)


def compute_params(
    n: int, alpha: Fraction, theta: Fraction, epsilon: Fraction = Fraction(1, 2)
) -> ReductionParams:
    """Derive (U, V, W, m, q, c, ...) and validate the K-independent constraints."""
    alpha, theta = Fraction(alpha), Fraction(theta)
    if n < 2:
        raise ParameterViolation("variable count", "the construction needs n >= 2")
    if alpha <= 1:
        raise ParameterViolation("alpha range", "promotion factor must exceed 1")
    if theta < 1:
        raise ParameterViolation("theta range", "threshold must be at least 1")
    if not 0 < epsilon < 1:
        raise ParameterViolation("epsilon range", "need 0 < epsilon < 1")

    c = ceil_log(alpha, Fraction(4))
    # U = n + 1 + ceil((c + 1) * log2(alpha)): smallest e with 2^e >= alpha^(c+1)
    U = n + 1 + ceil_log(Fraction(2), alpha ** (c + 1))
    # V = ceil((n + 1) / log2(alpha)) + 1: smallest e with alpha^e >= 2^(n+1), plus 1
    V = ceil_log(alpha, Fraction(2) ** (n + 1)) + 1
    W = ceil_log(alpha, Fraction(2) ** (U + 2)) + 1
    m = n + U + 6 * V * n * n + 6 * U * W + 3

    # alpha >= 1 + 1/m^(1-eps), checked exactly: (alpha-1)^b * m^(b-a) >= 1
    a, b = epsilon.numerator, epsilon.denominator
    if (alpha - 1) ** b * m ** (b - a) < 1:
        raise ParameterViolation(
            "growth-rate floor", f"alpha={alpha} below 1 + 1/m^(1-{epsilon}) at m={m}"
        )

    q = ceil_log(alpha, theta / Fraction(2) ** (n + 1)) - 1
    if not alpha**q * 2 ** (n + 1) < theta <= alpha ** (q + 1) * 2 ** (n + 1):
        raise ParameterViolation("Eq (3) window", f"q={q} does not bracket theta")
    if alpha**c < 4:
        raise ParameterViolation("c definition", "alpha^c must reach 4")
    ceil_un = ceil_log(alpha, Fraction(2) ** (U - n))
    if ceil_un < c:
        raise ParameterViolation("stage-4 split", f"ceil((U-n)/log alpha)={ceil_un} < c={c}")
    if q - ceil_un <= 0:
        raise ParameterViolation(
            "stage-4 positivity", f"q={q} <= ceil((U-n)/log alpha)={ceil_un}; theta too small"
        )
    gadget_reps = ceil_log(alpha, theta / 3)
    if gadget_reps < 1:
        raise ParameterViolation("gadget size", "theta too small for slack gadgets")
    return ReductionParams(
        n=n,
        alpha=alpha,
        theta=theta,
        epsilon=epsilon,
        U=U,
        V=V,
        W=W,
        m=m,
        q=q,
        c=c,
        gadget_reps=gadget_reps,
        ceil_un=ceil_un,
    )


@dataclass(frozen=True)
class StageAnnotation:
    stage: int
    purpose: str
    group: int | None = None  # running slack-gadget id
    slack_pair: tuple[int, int] | None = None  # promoted pair, 1-based

    def to_json_dict(self) -> dict:
        d: dict = {"stage": self.stage, "purpose": self.purpose}
        if self.group is not None:
            d["group"] = self.group
        if self.slack_pair is not None:
            d["slack_pair"] = list(self.slack_pair)
        return d


@dataclass(frozen=True)
class AnnotatedExample:
    x: BitVec
    label: int
    annotation: StageAnnotation

    def to_labeled(self) -> LabeledExample:
        return LabeledExample(self.x, self.label)


@dataclass(frozen=True)
class KWPInstance:
    m: int
    alpha: Fraction
    theta: Fraction
    examples: tuple[AnnotatedExample, ...]
    z: BitVec
    m2sat: M2SATInstance

    def sequence(self) -> list[LabeledExample]:
        return [e.to_labeled() for e in self.examples]

    def to_json_dict(self) -> dict:
        return {
            "m": self.m,
            "alpha": format_rational(self.alpha),
            "theta": format_rational(self.theta),
            "z": self.z.to_text(),
            "m2sat": self.m2sat.to_json_dict(),
            "examples": [
                {"x": e.x.to_text(), "label": e.label, **e.annotation.to_json_dict()}
                for e in self.examples
            ],
        }

    @staticmethod
    def from_json_dict(doc: dict) -> "KWPInstance":
        from .bitvec import parse_rational

        examples = []
        for rec in doc["examples"]:
            ann = StageAnnotation(
                rec["stage"],
                rec["purpose"],
                rec.get("group"),
                tuple(rec["slack_pair"]) if "slack_pair" in rec else None,
            )
            examples.append(AnnotatedExample(BitVec.from_text(rec["x"]), rec["label"], ann))
        return KWPInstance(
            doc["m"],
            parse_rational(doc["alpha"]),
            parse_rational(doc["theta"]),
            tuple(examples),
            BitVec.from_text(doc["z"]),
            M2SATInstance.from_json_dict(doc["m2sat"]),
        )


class _Builder:
    def __init__(self, params: ReductionParams):
        self.params = params
        self.examples: list[AnnotatedExample] = []
        self.group_counter = 0

    def _vec(self, indices) -> BitVec:
        return BitVec.from_support(self.params.m, indices)

    def emit_gadget_groups(self, stage: int, beta: int) -> list[int]:
        """Three slack pairs starting at variable beta; returns the lead bits."""
        leads = []
        for g in range(3):
            lo, hi = beta + 2 * g, beta + 2 * g + 1
            leads.append(lo)
            self.group_counter += 1
            ann = StageAnnotation(stage, SLACK_PROMOTION, self.group_counter, (lo, hi))
            positive = AnnotatedExample(self._vec([lo, hi]), POSITIVE, ann)
            self.examples.extend([positive] * self.params.gadget_reps)
        return leads

    def emit_clause_negative(self, stage: int, active_block: list[int], beta: int) -> None:
        leads = self.emit_gadget_groups(stage, beta)
        ann = StageAnnotation(stage, CLAUSE_NEGATIVE)
        self.examples.append(
            AnnotatedExample(self._vec(active_block + leads), NEGATIVE, ann)
        )


def build_kwp(
    instance: M2SATInstance,
    alpha: Fraction,
    theta: Fraction,
    epsilon: Fraction = Fraction(1, 2),
) -> tuple[KWPInstance, ReductionParams]:
    """Emit the four-stage sequence and query for an M2SAT instance."""
    params = compute_params(instance.n, alpha, theta, epsilon).with_count_threshold(instance.K)
    n, U, V, W, m = params.n, params.U, params.V, params.W, params.m
    b = _Builder(params)

    a_vars = list(range(1, n + 1))
    b_vars = list(range(n + 1, n + U + 1))

    # Stage 1: V demotion rounds per CNF clause, each forced by a fresh gadget.
    stage1_base = n + U + 1
    cursor = stage1_base
    for i1, i2 in instance.clauses:
        active = [v for v in a_vars if v not in (i1, i2)]
        for _ in range(V):
            if cursor + 5 > n + U + 6 * V * n * n:
                raise SlackBudgetError("stage-1 slack block exhausted")
            b.emit_clause_negative(1, active, cursor)
            cursor += 6

    # Stage 2: q promotions on all A-variables plus the dedicated slack bit.
    stage2_slack = n + U + 6 * V * n * n + 1
    ann2 = StageAnnotation(2, STAGE2_PROMOTION)
    stage2_example = AnnotatedExample(b._vec(a_vars + [stage2_slack]), POSITIVE, ann2)
    b.examples.extend([stage2_example] * params.q)

    # Stage 3: same demotion machinery over B for the exact-count formula.
    pad_cnf = exact_count_cnf(U, params.p)
    cursor = stage2_slack + 1
    for clause in pad_cnf.clauses:
        zeroed = {n + v for v in clause}
        active = [v for v in b_vars if v not in zeroed]
        for _ in range(W):
            if cursor + 5 > m - 2:
                raise SlackBudgetError("stage-3 slack block exhausted")
            b.emit_clause_negative(3, active, cursor)
            cursor += 6

    # Stage 4: q - c promotions on B, split across the last two slack bits.
    ann4 = StageAnnotation(4, STAGE4_PROMOTION)
    first = AnnotatedExample(b._vec(b_vars + [m - 1]), POSITIVE, ann4)
    second = AnnotatedExample(b._vec(b_vars + [m]), POSITIVE, ann4)
    b.examples.extend([first] * params.stage4_first)
    b.examples.extend([second] * params.stage4_second)

    z = BitVec.from_support(m, range(1, n + U + 1))
    kwp = KWPInstance(m, params.alpha, params.theta, tuple(b.examples), z, instance)
    return kwp, params


@dataclass(frozen=True)
class ConsistencyResult:
    ok: bool
    violation: tuple[int, int] | None = None  # 1-based positions in the sequence


def check_monotone_consistent(sequence) -> ConsistencyResult:
    """First pair (i, j) with x^i <= x^j pointwise but b_i > b_j, if any.

    Duplicates are collapsed before the pairwise scan, so repeated
    examples (the common case in built sequences) cost nothing extra.
    """
    sequence = list(sequence)
    reps: dict[int, tuple[int, int]] = {}  # word -> (first position, label)
    order: list[tuple[int, int, int]] = []  # (word, position, label)
    for pos, ex in enumerate(sequence, start=1):
        prev = reps.get(ex.x.word)
        if prev is None:
            reps[ex.x.word] = (pos, ex.label)
            order.append((ex.x.word, pos, ex.label))
        elif prev[1] != ex.label:
            lo, hi = (prev[0], pos) if prev[1] > ex.label else (pos, prev[0])
            return ConsistencyResult(False, (lo, hi))
    for a in range(len(order)):
        wa, pa, la = order[a]
        for bidx in range(len(order)):
            if a == bidx:
                continue
            wb, pb, lb = order[bidx]
            if wa & ~wb == 0 and la > lb:  # x^a <= x^b but label drops
                return ConsistencyResult(False, (pa, pb))
    return ConsistencyResult(True)


@dataclass
class CheckEntry:
    name: str
    passed: bool
    lhs: str = ""
    rhs: str = ""
    note: str = ""


@dataclass
class Report:
    entries: list[CheckEntry]

    @property
    def ok(self) -> bool:
        return all(e.passed for e in self.entries)

    def failed(self) -> list[CheckEntry]:
        return [e for e in self.entries if not e.passed]

    def to_json_dict(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [
                {"name": e.name, "passed": e.passed, "lhs": e.lhs, "rhs": e.rhs, "note": e.note}
                for e in self.entries
            ],
        }


def _entry(name, passed, lhs=None, rhs=None, note=""):
    def fmt(v):
        if v is None:
            return ""
        if isinstance(v, Fraction):
            return format_rational(v)
        return str(v)

    return CheckEntry(name, bool(passed), fmt(lhs), fmt(rhs), note)


def _approx(value: Fraction) -> str:
    """Order-of-magnitude rendering that survives huge exact rationals."""
    value = Fraction(value)
    if value == 0:
        return "0"
    bits = value.numerator.bit_length() - value.denominator.bit_length()
    if abs(bits) > 900:
        sign = "-" if value < 0 else ""
        return f"{sign}~2^{bits}"
    return f"{float(value):.6g}"


def verify_inequalities(params: ReductionParams, instance: M2SATInstance) -> Report:
    """Re-check every numbered inequality of the construction exactly.

    Quantities that depend on the run (the gamma slacks) are replaced by
    their proven worst-case bounds, so a passing report certifies the
    windows for any conforming trace.
    """
    if params.K is None:
        params = params.with_count_threshold(instance.K)
    n, U, V, W = params.n, params.U, params.V, params.W
    alpha, theta, q, c = params.alpha, params.theta, params.q, params.c
    D, p = params.D, params.p
    aq = alpha**q
    aqc = alpha ** (q - c)
    cnt = count_sat(instance.to_cnf())
    g1max = 2**n * alpha**-V
    g2max = 2**U * alpha**-W
    nonempty_unsat = 2**n - 1 - cnt

    entries = [
        _entry("Eq (3) lower", aq * 2 ** (n + 1) < theta, aq * 2 ** (n + 1), theta),
        _entry("Eq (3) upper", theta <= alpha ** (q + 1) * 2 ** (n + 1), theta, alpha ** (q + 1) * 2 ** (n + 1)),
        _entry(
            "Eq (4) M_A lower",
            cnt >= 2 or nonempty_unsat >= 1,
            aq,
            aq * cnt,
            "strictness via count >= 2 or a nonempty unsatisfying assignment",
        ),
        _entry("Eq (4) M_A upper", aq * (cnt + g1max) < theta / 2, aq * (cnt + g1max), theta / 2),
        _entry("Eq (5) M_B lower", D <= p * aqc, D, p * aqc),
        _entry(
            "Eq (5) M_B upper",
            aqc * (p + g2max) < D + aq / 2,
            aqc * (p + g2max),
            D + aq / 2,
        ),
        _entry("Eq (6)", aqc <= aq / 4 < D, aqc, D),
        _entry("Eq (7)", p * aqc < D + aq / 4 <= theta - 3 * aq / 4, p * aqc, theta - 3 * aq / 4),
        _entry(
            "Eq (8)",
            theta - 3 * aq / 4 <= alpha ** (q + 1) * 2 ** (n + 1) - 3 * aqc,
            theta - 3 * aq / 4,
            alpha ** (q + 1) * 2 ** (n + 1) - 3 * aqc,
        ),
        _entry(
            "Eq (9)",
            alpha ** (q + 1) * 2 ** (n + 1) - 3 * aqc == aqc * (alpha ** (c + 1) * 2 ** (n + 1) - 3),
            alpha ** (q + 1) * 2 ** (n + 1) - 3 * aqc,
            aqc * (alpha ** (c + 1) * 2 ** (n + 1) - 3),
        ),
        _entry(
            "Eq (10)",
            1 < p <= alpha ** (c + 1) * 2 ** (n + 1) - 3 <= 2**U - 3,
            p,
            2**U - 3,
        ),
        _entry(
            "Eq (11)",
            p * aqc + aqc / 4 < theta - aq / 2,
            p * aqc + aqc / 4,
            theta - aq / 2,
        ),
        _entry(
            "stage-4 tail",
            alpha ** (params.ceil_un - c) * 2**U < aq / 2,
            alpha ** (params.ceil_un - c) * 2**U,
            aq / 2,
        ),
        _entry("gamma1 bound", g1max < Fraction(1, 2), g1max, Fraction(1, 2)),
        _entry("gamma2 bound", g2max < Fraction(1, 4), g2max, Fraction(1, 4)),
    ]
    return Report(entries)


def verify_trace(kwp: KWPInstance, instance: M2SATInstance) -> Report:
    """Replay the sequence on the lazy simulator, asserting every stage claim.

    Raises VerificationFailure at the first step whose behaviour departs
    from its annotation or whose checkpoint window fails; returns an
    aggregate report when everything holds.
    """
    params = compute_params(instance.n, kwp.alpha, kwp.theta).with_count_threshold(instance.K)
    n, U = params.n, params.U
    alpha, theta, q = params.alpha, params.theta, params.q
    if kwp.m != params.m:
        raise VerificationFailure(0, "instance m mismatch", f"{kwp.m} != {params.m}")
    if n + U > 24:
        raise GuardExceeded("query support exceeds the lazy-score guard")
    cnf = instance.to_cnf()
    cnt = count_sat(cnf)
    clause_masks = cnf.clause_masks()

    sim = LazyMonomialWinnow(WinnowConfig(alpha, theta), kwp.m)
    entries: list[CheckEntry] = []
    counters = {SLACK_PROMOTION: 0, CLAUSE_NEGATIVE: 0, STAGE2_PROMOTION: 0, STAGE4_PROMOTION: 0}

    a_mask = (1 << n) - 1
    b_mask = ((1 << U) - 1) << n

    def crossing_check(step: int, pair: tuple[int, int]) -> None:
        weights = sim.weights_on_support(BitVec.from_support(kwp.m, pair))
        total = sum(weights.values(), Fraction(0))
        if not theta <= total < alpha * theta:
            raise VerificationFailure(
                step,
                "slack group crossing",
                f"pair {pair} sum {_approx(total)} outside [theta, alpha*theta)",
            )

    def stage1_exponent_check(step: int) -> None:
        for mask in range(1, 1 << n):
            e = sim.exponents.get(mask, 0)
            satisfied = all(mask & cm for cm in clause_masks)
            if satisfied and e != 0:
                raise VerificationFailure(
                    step, "post-stage-1 exponents", f"satisfying monomial {mask:b} has exponent {e}"
                )
            if not satisfied and e > -params.V:
                raise VerificationFailure(
                    step, "post-stage-1 exponents", f"unsatisfying monomial {mask:b} exponent {e} > -V"
                )

    def block_sums() -> tuple[Fraction, Fraction, Fraction]:
        m_a = m_b = m_ab = Fraction(0)
        for sub, w in sim.weights_on_support(kwp.z).items():
            if sub & b_mask == 0:
                m_a += w
            elif sub & a_mask == 0:
                m_b += w
            else:
                m_ab += w
        return m_a, m_b, m_ab

    prev_ann: StageAnnotation | None = None
    for step, ex in enumerate(kwp.examples, start=1):
        ann = ex.annotation
        if (
            prev_ann is not None
            and prev_ann.purpose == SLACK_PROMOTION
            and ann.group != prev_ann.group
        ):
            crossing_check(step - 1, prev_ann.slack_pair)
        if prev_ann is not None and ann.stage != prev_ann.stage:
            if prev_ann.stage == 1:
                stage1_exponent_check(step - 1)
            elif prev_ann.stage == 2:
                m_a, _, _ = block_sums()
                if not alpha**q < m_a < theta / 2:
                    raise VerificationFailure(
                        step - 1, "Eq (4) M_A window", "M_A outside (alpha^q, theta/2)"
                    )
                entries.append(_entry("Eq (4) M_A window", True, m_a, theta / 2))

        score, predicted, mistake = sim.process(ex.to_labeled())
        if ann.purpose in (SLACK_PROMOTION, STAGE2_PROMOTION, STAGE4_PROMOTION):
            if ex.label != POSITIVE or not mistake or not score < theta:
                raise VerificationFailure(
                    step, f"{ann.purpose} must be a strict false negative", f"score {_approx(score)}"
                )
        elif ann.purpose == CLAUSE_NEGATIVE:
            if ex.label != NEGATIVE or not mistake or not score > theta:
                raise VerificationFailure(
                    step, "clause negative must be a strict false positive", f"score {_approx(score)}"
                )
        else:
            raise VerificationFailure(step, "unknown annotation", ann.purpose)
        counters[ann.purpose] += 1
        prev_ann = ann

    if prev_ann is not None and prev_ann.purpose == SLACK_PROMOTION:
        crossing_check(len(kwp.examples), prev_ann.slack_pair)

    m_a, m_b, m_ab = block_sums()
    if not params.D <= m_b < params.D + alpha**q / 2:
        raise VerificationFailure(len(kwp.examples), "Eq (5) M_B window", "M_B outside [D, D + alpha^q/2)")
    entries.append(_entry("Eq (5) M_B window", True, m_b, params.D + alpha**q / 2))
    expected_ab = (2**n - 1) * (2**U - 1)
    if m_ab != expected_ab:
        raise VerificationFailure(len(kwp.examples), "M_AB untouched", f"{m_ab} != {expected_ab}")
    entries.append(_entry("M_AB untouched", True, m_ab, expected_ab))

    score_z = sim.score(kwp.z)
    if score_z != m_a + m_b + m_ab:
        raise VerificationFailure(len(kwp.examples), "score decomposition", "M_A+M_B+M_AB != score(z)")
    decision = score_z >= theta
    expected = cnt >= instance.K
    if decision != expected:
        raise VerificationFailure(
            len(kwp.examples),
            "final decision",
            f"score(z) >= theta is {decision} but |F^-1(1)| >= K is {expected}",
        )
    entries.append(
        _entry("final decision matches model count", True, str(decision), f"count={cnt}, K={instance.K}")
    )
    for purpose, seen in counters.items():
        entries.append(_entry(f"steps verified: {purpose}", True, str(seen)))
    return Report(entries)
