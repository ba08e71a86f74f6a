"""End-to-end evaluation: notes vs serology, per category.

For the target condition the test label is the note's statement/query
polarity; the control categories carry no hepatitis mention of their own,
so their test labels are simply the polarity label again (negative unless
the note also states the condition). Records whose note matches the
vaccination-response category are removed before analysis, mirroring the
source data; records missing the relevant marker are excluded per
category and counted.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field

from .classifier import (
    VACCINATION_CATEGORY,
    Lexicon,
    NoteClassification,
    classify_note,
    default_lexicon,
)
from .ingest import CohortSummary, summarize_demographics
from .metrics import (
    CiConfig,
    ContingencyTable,
    MetricEstimate,
    MetricPanel,
    build_contingency,
    compute_metrics,
    format_percent,
    format_percent_1dp,
    format_proportion,
    format_ratio,
)
from .model import Cohort, Condition
from .serology import SerologyThresholds, classify_marker

DEFAULT_CONTROL_CATEGORIES = (10, 16, 17, 22, 24, 26, 29, 31, 32, 37)


@dataclass(frozen=True)
class EvaluationConfig:
    target_condition: Condition
    control_category_ids: tuple[int, ...] = DEFAULT_CONTROL_CATEGORIES
    exclude_vaccination: bool = True
    thresholds: SerologyThresholds = field(default_factory=SerologyThresholds)
    ci: CiConfig = field(default_factory=CiConfig)

    def __post_init__(self):
        bad = [c for c in self.control_category_ids if not (1 <= c <= 46)]
        if bad:
            raise ValueError(f"control category ids out of range: {bad}")
        if self.target_condition.category_id in self.control_category_ids:
            raise ValueError("control categories must not include the target's own category")


@dataclass(frozen=True)
class CategoryResult:
    category_id: int
    label: str
    icd10_chapter: str | None
    n_evaluated: int
    n_missing_excluded: int
    n_vaccination_excluded: int
    table: ContingencyTable
    panel: MetricPanel

    @property
    def percent_marker_positive(self) -> float | None:
        if self.n_evaluated == 0:
            return None
        return 100.0 * self.table.diseased / self.n_evaluated


@dataclass(frozen=True)
class EvaluationResult:
    condition: Condition
    primary: CategoryResult
    controls: tuple[CategoryResult, ...]
    summary: CohortSummary

    def all_results(self) -> tuple[CategoryResult, ...]:
        return (self.primary, *self.controls)


def _member_ids(cls: NoteClassification) -> set[int]:
    ids = {m.category_id for m in cls.all_matches}
    ids.add(cls.category_id)
    return ids


def evaluate_condition(
    cohort: Cohort, config: EvaluationConfig, lexicon: Lexicon | None = None
) -> EvaluationResult:
    """Classify every note once, then tally per-category 2x2 tables."""
    lexicon = lexicon or default_lexicon()
    condition = config.target_condition
    classified = [(rec, classify_note(rec.note_text, lexicon)) for rec in cohort]
    if config.exclude_vaccination:
        kept = [(r, c) for r, c in classified if VACCINATION_CATEGORY not in _member_ids(c)]
    else:
        kept = classified
    n_vacc = {cid: 0 for cid in (condition.category_id, *config.control_category_ids)}
    if config.exclude_vaccination:
        for rec, cls in classified:
            if VACCINATION_CATEGORY in _member_ids(cls):
                for cid in n_vacc:
                    if cid in _member_ids(cls):
                        n_vacc[cid] += 1

    def category_result(cid: int) -> CategoryResult:
        members = [(r, c) for r, c in kept if cid in _member_ids(c)]
        label_of = lambda c: c.hbv_label if condition is Condition.HEPATITIS_B else c.hcv_label
        pairs = [
            (label_of(cls), classify_marker(rec, condition, config.thresholds))
            for rec, cls in members
        ]
        table, n_missing = build_contingency(pairs)
        rule = lexicon.rule(cid)
        return CategoryResult(
            category_id=cid,
            label=rule.label,
            icd10_chapter=rule.icd10_chapter,
            n_evaluated=table.n,
            n_missing_excluded=n_missing,
            n_vaccination_excluded=n_vacc[cid],
            table=table,
            panel=compute_metrics(table, config.ci),
        )

    primary = category_result(condition.category_id)
    controls = tuple(category_result(cid) for cid in config.control_category_ids)
    return EvaluationResult(condition, primary, controls, summarize_demographics(cohort))


# ---------------------------------------------------------------------------
# Report emission


def _ci_pct(est: MetricEstimate) -> str:
    if not est.defined or est.ci_low is None:
        return "n.d." if not est.defined else format_percent(est.value)
    return (
        f"{format_percent(est.value)} "
        f"({format_percent_1dp(est.ci_low)}-{format_percent_1dp(est.ci_high)})"
    )


def _ci_ratio(est: MetricEstimate) -> str:
    if not est.defined:
        return "n.d."
    if est.ci_low is None:
        return format_ratio(est)
    return f"{format_ratio(est)} ({format_ratio(est.ci_low)}-{format_ratio(est.ci_high)})"


def _panel_json(result: CategoryResult) -> dict:
    def est(e: MetricEstimate) -> dict:
        def num(v):
            if v is None:
                return None
            return "inf" if math.isinf(v) else v

        return {
            "value": num(e.value),
            "ci_low": num(e.ci_low),
            "ci_high": num(e.ci_high),
            "method": e.method,
            "note": e.note,
            "display": format_proportion(e) if e.method != "log" else format_ratio(e),
        }

    p = result.panel
    return {
        "category_id": result.category_id,
        "label": result.label,
        "n_evaluated": result.n_evaluated,
        "n_missing_excluded": result.n_missing_excluded,
        "n_vaccination_excluded": result.n_vaccination_excluded,
        "counts": {
            "tp": result.table.tp,
            "fp": result.table.fp,
            "fn": result.table.fn,
            "tn": result.table.tn,
        },
        "percent_marker_positive": result.percent_marker_positive,
        "sn": est(p.sn),
        "sp": est(p.sp),
        "ppv": est(p.ppv),
        "npv": est(p.npv),
        "lr_pos": est(p.lr_pos),
        "lr_neg": est(p.lr_neg),
        "prevalence_sample": p.prevalence_sample,
    }


def emit_report(result: EvaluationResult, format: str) -> str:
    """Render an evaluation as markdown, csv, or json.

    Markdown mirrors the reference table layout (percent metrics with 95%
    CIs, 2-dp likelihood ratios); CSV and JSON carry full-precision values
    plus the raw counts so every number is reproducible.
    """
    if format == "json":
        payload = {
            "condition": result.condition.value,
            "marker": result.condition.marker_name,
            "demographics": {
                "n_total": result.summary.n_total,
                "age_mean": result.summary.age_mean,
                "age_sd": result.summary.age_sd,
                "n_male": result.summary.n_male,
                "n_female": result.summary.n_female,
                "n_unspecified": result.summary.n_unspecified,
            },
            "primary": _panel_json(result.primary),
            "controls": [_panel_json(c) for c in result.controls],
        }
        return json.dumps(payload, indent=2)
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(
            [
                "category_id", "label", "role", "n_evaluated", "n_missing_excluded",
                "tp", "fp", "fn", "tn", "percent_marker_positive",
                "sn", "sn_low", "sn_high", "sp", "sp_low", "sp_high",
                "ppv", "ppv_low", "ppv_high", "npv", "npv_low", "npv_high",
                "lr_pos", "lr_pos_low", "lr_pos_high", "lr_neg", "lr_neg_low", "lr_neg_high",
            ]
        )
        for role, res in [("primary", result.primary)] + [("control", c) for c in result.controls]:
            p = res.panel
            row = [
                res.category_id, res.label, role, res.n_evaluated, res.n_missing_excluded,
                res.table.tp, res.table.fp, res.table.fn, res.table.tn,
                res.percent_marker_positive,
            ]
            for e in (p.sn, p.sp, p.ppv, p.npv, p.lr_pos, p.lr_neg):
                row.extend(v if v is not None else "" for v in (e.value, e.ci_low, e.ci_high))
            writer.writerow(row)
        return buf.getvalue()
    if format == "markdown":
        return _markdown_report(result)
    raise ValueError(f"unknown report format: {format!r}")


def _markdown_report(result: EvaluationResult) -> str:
    cond = result.condition
    p = result.primary
    lines = [
        f"# Clinical-note diagnostic accuracy: {cond.marker_name}",
        "",
        f"Cohort: {result.summary.n_total} records; "
        f"category {p.category_id} evaluated n={p.n_evaluated} "
        f"(missing serology excluded: {p.n_missing_excluded}).",
        "",
        "## Primary category",
        "",
        "| Clinical note | Sn (%) (95% CI) | Sp (%) (95% CI) | PPV (%) (95% CI) "
        "| NPV (%) (95% CI) | LR+ | LR- |",
        "|---|---|---|---|---|---|---|",
        (
            f"| Category {p.category_id}: {p.label} "
            f"| {_ci_pct(p.panel.sn)} | {_ci_pct(p.panel.sp)} "
            f"| {_ci_pct(p.panel.ppv)} | {_ci_pct(p.panel.npv)} "
            f"| {_ci_ratio(p.panel.lr_pos)}* | {_ci_ratio(p.panel.lr_neg)}* |"
        ),
        "",
        "\\* Likelihood ratios are computed from raw counts; recomputing them "
        "from the 2-dp rounded Sn/Sp shown here gives slightly different "
        "point values.",
        "",
        f"Summary line: Sn {_ci_pct(p.panel.sn)}, Sp {_ci_pct(p.panel.sp)}.",
        "",
        "## Control categories",
        "",
        f"| ICD-10 | Category | % {cond.marker_name} positive | Sn (%) | Sp (%) | PPV (%) | NPV (%) |",
        "|---|---|---|---|---|---|---|",
    ]
    for c in result.controls:
        pmp = c.percent_marker_positive
        pmp_s = "n.d." if pmp is None else format_percent_1dp(pmp / 100.0)
        lines.append(
            f"| {c.icd10_chapter or '-'} | {c.label} | {pmp_s} "
            f"| {format_percent(c.panel.sn.value)} | {format_percent(c.panel.sp.value)} "
            f"| {format_percent(c.panel.ppv.value)} | {format_percent(c.panel.npv.value)} |"
        )
    lines.append("")
    lines.append("n.d. = not defined (zero denominator).")
    lines.append("")
    return "\n".join(lines)


def emit_plot_data(result: EvaluationResult) -> dict[str, str]:
    """Plot-ready CSV series (per-category Sn and Sp), ordered by id."""
    out = {}
    for metric in ("sensitivity", "specificity"):
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["category_id", "label", metric])
        for res in sorted(result.all_results(), key=lambda r: r.category_id):
            est = res.panel.sn if metric == "sensitivity" else res.panel.sp
            writer.writerow(
                [res.category_id, res.label, "" if est.value is None else est.value]
            )
        out[metric] = buf.getvalue()
    return out


def emit_demographics_csv(summary: CohortSummary) -> str:
    """Plot-ready demographic data: per-decade age histogram + sex counts."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["kind", "key", "count"])
    for decade, count in summary.age_histogram:
        writer.writerow(["age_decade", f"{decade}-{decade + 9}", count])
    writer.writerow(["sex", "male", summary.n_male])
    writer.writerow(["sex", "female", summary.n_female])
    writer.writerow(["sex", "unspecified", summary.n_unspecified])
    return buf.getvalue()
