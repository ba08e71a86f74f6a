"""Acceptance gate: one test, and one printed pass/fail line, per criterion.

Each test gathers its sub-checks first, prints a single summary line of the
form ``criterion N (<topic>): PASS|FAIL``, then asserts. Failures therefore
still print their line before pytest reports them.
"""

import itertools
import math
import random

import pytest
from scipy import stats

from notedta.classifier import classify_note, default_lexicon
from notedta.cli import main
from notedta.evaluate import EvaluationConfig, evaluate_condition
from notedta.ingest import parse_cohort_file
from notedta.metrics import (
    ContingencyTable,
    adjust_predictive_values,
    ci_likelihood_ratio,
    ci_proportion,
    compute_metrics,
    format_proportion,
)
from notedta.model import Condition
from notedta.synth import SynthesisSpec, synthesize_exact

HBV = Condition.HEPATITIS_B
HCV = Condition.HEPATITIS_C
HBV_TABLE = ContingencyTable(69, 45, 8, 57)
HCV_TABLE = ContingencyTable(101, 38, 17, 10)


def _report(number, topic, failures):
    status = "FAIL" if failures else "PASS"
    print(f"criterion {number} ({topic}): {status}")
    assert not failures, "; ".join(failures)


def _check_display(table, expected):
    panel = compute_metrics(table)
    failures = []
    for name, want in zip(("sn", "sp", "ppv", "npv"), expected):
        got = format_proportion(getattr(panel, name).value)
        if got != want:
            failures.append(f"{name}: displayed {got!r}, required {want!r}")
    return failures


def test_criterion_1_worked_example_hbv():
    failures = _check_display(HBV_TABLE, ("0.90", "0.56", "0.61", "0.87"))
    _report(1, "HBV worked example display", failures)


def test_criterion_2_worked_example_hcv():
    failures = _check_display(HCV_TABLE, ("0.86", "0.21", "0.73", "0.37"))
    _report(2, "HCV worked example display", failures)


def test_criterion_3_exact_sn_sp_intervals():
    cases = [
        ("hbv sn", 69, 77, (80.6, 95.4)),
        ("hbv sp", 57, 102, (45.7, 65.7)),
        ("hcv sn", 101, 118, (77.9, 91.4)),
        ("hcv sp", 10, 48, (10.5, 35.0)),
    ]
    failures = []
    for name, k, n, (lo, hi) in cases:
        got_lo, got_hi = ci_proportion(k, n)
        got_lo, got_hi = 100 * got_lo, 100 * got_hi
        if abs(got_lo - lo) > 0.5 or abs(got_hi - hi) > 0.5:
            failures.append(f"{name}: ({got_lo:.1f},{got_hi:.1f}) vs ({lo},{hi})")
    _report(3, "exact Sn/Sp intervals", failures)


def test_criterion_4_log_method_lr_intervals():
    cases = [
        ("hbv lr+", HBV_TABLE, "lr_pos", (1.61, 2.56)),
        ("hbv lr-", HBV_TABLE, "lr_neg", (0.09, 0.37)),
        ("hcv lr+", HCV_TABLE, "lr_pos", (0.92, 1.27)),
        ("hcv lr-", HCV_TABLE, "lr_neg", (0.34, 1.40)),
    ]
    failures = []
    for name, table, which, (lo, hi) in cases:
        got = ci_likelihood_ratio(table, which)
        if got is None or abs(got[0] - lo) > 0.02 or abs(got[1] - hi) > 0.02:
            failures.append(f"{name}: {got} vs ({lo},{hi})")
    _report(4, "log-method LR intervals", failures)


def test_criterion_5_end_to_end_pipeline(tmp_path, capsys):
    plan = [
        ("figS1-hbv", "hbv", 241, HBV_TABLE, 62),
        ("figS1-hcv", "hcv", 327, HCV_TABLE, 161),
    ]
    failures = []
    for preset, cond, total, table, missing in plan:
        cohort_path = tmp_path / f"{preset}.csv"
        outdir = tmp_path / f"{preset}-out"
        if main(["synth", str(cohort_path), "--preset", preset, "--seed", "1"]) != 0:
            failures.append(f"{preset}: synth failed")
            continue
        cohort = parse_cohort_file(cohort_path)
        if len(cohort) != total:
            failures.append(f"{preset}: {len(cohort)} records, wanted {total}")
        code = main(
            ["evaluate", str(cohort_path), "--condition", cond, "--outdir", str(outdir)]
        )
        if code != 0:
            failures.append(f"{preset}: evaluate failed")
            continue
        result = evaluate_condition(
            cohort, EvaluationConfig(HBV if cond == "hbv" else HCV)
        )
        p = result.primary
        if p.table != table or p.n_missing_excluded != missing:
            failures.append(f"{preset}: table {p.table}, missing {p.n_missing_excluded}")
        if p.n_evaluated != table.n:
            failures.append(f"{preset}: n={p.n_evaluated}, wanted {table.n}")
    capsys.readouterr()
    _report(5, "synth to evaluate pipeline", failures)


def test_criterion_6_classifier_corpus():
    corpus = {
        "Hep C": "positive",
        "Known Hep C": "positive",
        "Hep C Pos": "positive",
        "Hx Hep C": "positive",
        "Hep C exposure": "positive",
        "?Hep C": "negative",
        "Possible Hep C": "negative",
        "Hepatitis cause?": "negative",
        "Screen Hep C": "negative",
    }
    lexicon = default_lexicon()
    failures = [
        f"{text!r}: {classify_note(text, lexicon).hcv_label} vs {want}"
        for text, want in corpus.items()
        if classify_note(text, lexicon).hcv_label != want
    ]
    _report(6, "polarity phrase corpus", failures)


def test_criterion_7_nd_semantics():
    from notedta.model import Cohort, PathologyRecord

    records = tuple(
        PathologyRecord(f"w{i}", note_text="work screening", hbsag_iu=0.5)
        for i in range(15)
    )
    result = evaluate_condition(Cohort(records), EvaluationConfig(HBV))
    ctl = next(c for c in result.controls if c.category_id == 32)
    failures = []
    if format_proportion(ctl.panel.sp.value) != "1.00":
        failures.append(f"sp displayed {format_proportion(ctl.panel.sp.value)!r}")
    for name in ("sn", "ppv"):
        est = getattr(ctl.panel, name)
        if format_proportion(est.value) != "n.d.":
            failures.append(f"{name} not rendered n.d.")
    _report(7, "n.d. semantics", failures)


def _naive_panel(tp, fp, fn, tn):
    def ratio(num, den):
        return num / den if den else None

    sn = ratio(tp, tp + fn)
    sp = ratio(tn, tn + fp)
    ppv = ratio(tp, tp + fp)
    npv = ratio(tn, tn + fn)
    lr_pos = lr_neg = None
    if sn is not None and sp is not None:
        if sp == 1.0:
            lr_pos = math.inf if sn > 0 else None
        else:
            lr_pos = sn / (1.0 - sp)
        if sp == 0.0:
            lr_neg = math.inf if sn < 1 else None
        else:
            lr_neg = (1.0 - sn) / sp
    return sn, sp, ppv, npv, lr_pos, lr_neg


def test_criterion_8_property_suites():
    failures = []

    # (a) brute-force oracle equivalence over all tables with cells in 0..6
    for cells in itertools.product(range(7), repeat=4):
        panel = compute_metrics(ContingencyTable(*cells))
        got = (
            panel.sn.value, panel.sp.value, panel.ppv.value,
            panel.npv.value, panel.lr_pos.value, panel.lr_neg.value,
        )
        want = _naive_panel(*cells)
        for g, w in zip(got, want):
            ok = (
                g is w
                or (g is not None and w is not None
                    and (g == w or math.isclose(g, w, rel_tol=1e-12)))
            )
            if not ok:
                failures.append(f"(a) {cells}: {got} vs {want}")
                break

    # (b) exhaustive Clopper-Pearson coverage for small n
    for n in range(1, 13):
        pmf_cache = {k: None for k in range(n + 1)}
        intervals = [ci_proportion(k, n) for k in range(n + 1)]
        for p10 in range(5, 100, 5):
            p = p10 / 100.0
            coverage = sum(
                stats.binom.pmf(k, n, p)
                for k in range(n + 1)
                if intervals[k][0] <= p <= intervals[k][1]
            )
            if coverage < 0.95 - 1e-9:
                failures.append(f"(b) n={n} p={p}: coverage {coverage:.4f}")

    # (c) Bayes and likelihood-ratio identities on random tables
    rng = random.Random(8)
    for _ in range(10_000):
        tp, fp, fn, tn = (rng.randint(1, 200) for _ in range(4))
        panel = compute_metrics(ContingencyTable(tp, fp, fn, tn))
        sn, sp = panel.sn.value, panel.sp.value
        prev = (tp + fn) / (tp + fp + fn + tn)
        ppv, npv = adjust_predictive_values(sn, sp, prev)
        if abs(ppv - panel.ppv.value) > 1e-12 or abs(npv - panel.npv.value) > 1e-12:
            failures.append(f"(c) bayes mismatch at {(tp, fp, fn, tn)}")
            break
        if abs(panel.lr_pos.value - sn / (1 - sp)) > 1e-12:
            failures.append(f"(c) lr+ mismatch at {(tp, fp, fn, tn)}")
            break
        if abs(panel.lr_neg.value - (1 - sn) / sp) > 1e-12:
            failures.append(f"(c) lr- mismatch at {(tp, fp, fn, tn)}")
            break

    # (d) synthesize -> evaluate round-trip on random feasible specs
    rng = random.Random(9)
    for i in range(100):
        table = ContingencyTable(*(rng.randint(0, 30) for _ in range(4)))
        condition = rng.choice([HBV, HCV])
        spec = SynthesisSpec(
            condition, table, n_missing=rng.randint(0, 20), seed=i
        )
        result = evaluate_condition(synthesize_exact(spec), EvaluationConfig(condition))
        if result.primary.table != table:
            failures.append(f"(d) spec {i}: {result.primary.table} vs {table}")

    _report(8, "property suites", failures[:5])


def test_criterion_9_no_numeric_claim_for_control_rows():
    # The published control-row percentages come from unpublished raw counts,
    # so no numeric reproduction is asserted anywhere in this suite; the
    # behavioral checks in criteria 7 and 8 stand in for them. This test
    # records that scoping decision.
    _report(9, "control rows out of numeric scope", [])
