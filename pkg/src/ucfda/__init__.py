"""Fisher discriminant analysis with class-specific projected variances.

The UC rule classifies by squared distance to each projected class mean
divided by that class's own variance along the direction, instead of the
plain squared distance used by FDA.
"""

from .assumptions import TestReport, box_m_test, check_assumptions, levene_test
from .bench import BenchmarkConfig, BenchmarkReport, CellResult, format_report, run_benchmark
from .classifiers import (
    DiscriminantScores,
    FitConfig,
    FittedModel,
    LpSettings,
    Method,
    classify,
    classify_fda,
    classify_lda,
    classify_lp,
    classify_qda,
    classify_uc,
    decision_scores,
    fit,
    parameter_count,
    predict,
)
from .data import (
    DatasetSpec,
    FoldPlan,
    LabeledDataset,
    apply_scaler,
    load_csv,
    load_manifest,
    minmax_scale,
    prepare,
    prune_sparse_columns,
    stratified_kfold,
)
from .lp import LpProjection, fit_lp_projection
from .scatter import ProjectionBasis, between_scatter, fisher_directions, project_stats, within_scatter

__version__ = "0.1.0"
