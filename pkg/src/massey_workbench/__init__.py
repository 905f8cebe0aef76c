"""Exact-arithmetic workbench for bounded cohomology of free groups:
decompositions, decomposable quasi-morphisms, the aligned cochain complex,
and the explicit bounded primitive of the Massey triple product
representative, with every identity checked in rational arithmetic."""

from .cochain import (
    Cochain,
    EvalContext,
    alternate,
    coboundary,
    constant,
    cup,
    evaluate,
    exhaustive_aligned_tuples,
    is_aligned,
    lincomb,
    qm_cochain,
    random_aligned_tuple,
    restrict,
    sup_norm_estimate,
    TableCochain,
)
from .decomposition import (
    AxiomReport,
    DecompositionSpec,
    TriangleDecomposition,
    check_axioms,
    decompose,
    is_non_self_overlapping,
    measure_r_hat,
    prefix_product,
    suffix_product,
    triangle_split,
)
from .errors import ConfigError, ResourceCapError, UsageError, WorkbenchError
from .massey import (
    MasseyInstance,
    TriangleTermLedger,
    beta1,
    beta2,
    bounded_primitive,
    eta1,
    eta2,
    eta_bridge,
    massey_representative,
    three_sum_residual,
    verify_massey_triviality,
    verify_primitives,
)
from .quasimorphism import (
    LambdaTable,
    QuasiMorphism,
    defect,
    defect_from_triangle,
    defect_sup,
    eval_qm,
)
from .report import ExperimentPlan, Report, StageResult
from .words import (
    Word,
    ball_size,
    enumerate_ball,
    format_word,
    parse_word,
    sample_word,
    split_product,
    word,
)

__version__ = "0.1.0"
