"""Exact-arithmetic lab for Boolean-kernel online learning.

Kernel Perceptron over conjunction feature spaces, Winnow with a lazy
support-restricted monomial simulator, adversarial mistake-forcing
constructions, and a model-counting reduction builder with end-to-end
verifiers. Everything numeric is exact (arbitrary-precision integers
and rationals); floats appear only in rendered figures.
"""

from .bitvec import (
    NEGATIVE,
    POSITIVE,
    BitVec,
    LabeledExample,
    format_rational,
    intersect_count,
    leq,
    parse_rational,
    same,
    weight,
)
from .kernels import ExplicitFeatureVector, KernelKind, dot, expand, kernel
from .perceptron import (
    PerceptronConfig,
    PerceptronState,
    explicit_run,
    perceptron_bound,
    run,
)
from .winnow import (
    ExplicitWinnow,
    LazyMonomialWinnow,
    MonomialSpace,
    WinnowConfig,
    ceil_log,
    kwp_decide,
    kwp_score,
    winnow_bound,
)
from .adversarial import (
    HardSet,
    HardSetParams,
    PacDistribution,
    build_mistake_sequence,
    certificate,
    gen_hard_set,
    mistake_forcing_margin,
    pac_experiment,
    pac_sample,
    threshold_case_sequence,
)
from .cnf import M2SATInstance, MonotoneCNF, count_sat, exact_count_cnf
from .reduction import (
    KWPInstance,
    ReductionParams,
    build_kwp,
    check_monotone_consistent,
    compute_params,
    verify_inequalities,
    verify_trace,
)
from .trace import StepRecord, Trace, emit_plotdata, summary_csv

__all__ = [name for name in dir() if not name.startswith("_")]
