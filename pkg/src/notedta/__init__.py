"""Diagnostic test accuracy of free-text clinical notes.

Classifies pathology-request notes into a 46-category taxonomy with
statement/query polarity, compares them against serological gold
standards, and computes the full accuracy panel (Sn, Sp, PPV, NPV,
LR+, LR-) with confidence intervals.
"""

from .classifier import (
    CategoryRule,
    Lexicon,
    NoteClassification,
    classify_note,
    default_lexicon,
    load_lexicon,
    normalize_note,
)
from .evaluate import (
    CategoryResult,
    EvaluationConfig,
    EvaluationResult,
    emit_plot_data,
    emit_report,
    evaluate_condition,
)
from .ingest import (
    CohortFormatError,
    CohortSummary,
    parse_cohort_file,
    summarize_demographics,
    write_cohort_file,
)
from .metrics import (
    CiConfig,
    ContingencyTable,
    MetricEstimate,
    MetricPanel,
    adjust_predictive_values,
    build_contingency,
    ci_likelihood_ratio,
    ci_proportion,
    compute_metrics,
)
from .model import Cohort, Condition, PathologyRecord, SerologyStatus, Sex
from .serology import SerologyThresholds, classify_marker
from .synth import SynthesisSpec, synthesize_exact, synthesize_random

__version__ = "0.1.0"
