"""Command-line entry point.

Subcommands: validate, classify, evaluate, synth, report. Batch,
file-based: each run writes its artifacts and prints a terse summary.
Exit codes: 0 success, 1 input error, 2 internal invariant failure.
"""

import argparse
import json
import os
import sys
from pathlib import Path

from .classifier import classify_note, default_lexicon, load_lexicon
from .evaluate import (
    EvaluationConfig,
    emit_demographics_csv,
    emit_plot_data,
    emit_report,
    evaluate_condition,
)
from .ingest import (
    CohortFormatError,
    parse_cohort_file,
    parse_cohort_file_with_report,
    write_cohort_file,
)
from .metrics import CiConfig, ContingencyTable
from .model import Condition
from .serology import SerologyThresholds
from .synth import SynthesisSpec, synthesize_exact, synthesize_random

LEXICON_ENV = "NOTEDTA_LEXICON"

PRESETS = {
    "figS1-hbv": dict(
        condition=Condition.HEPATITIS_B,
        table=ContingencyTable(tp=69, fp=45, fn=8, tn=57),
        n_missing=62,
        age_mean=38.0,
        age_sd=14.4,
        sex_split=(129, 112),  # analysed subset target 98:81 plus missing
    ),
    "figS1-hcv": dict(
        condition=Condition.HEPATITIS_C,
        table=ContingencyTable(tp=101, fp=38, fn=17, tn=10),
        n_missing=161,
        age_mean=36.0,
        age_sd=15.8,
        sex_split=(165, 162),
    ),
}

_CONDITIONS = {"hbv": Condition.HEPATITIS_B, "hcv": Condition.HEPATITIS_C}


def _load_lexicon(path: str | None):
    path = path or os.environ.get(LEXICON_ENV)
    return load_lexicon(path) if path else default_lexicon()


def _thresholds(args) -> SerologyThresholds:
    return SerologyThresholds(
        hbsag_cutoff=args.hbsag_cutoff, anti_hcv_cutoff=args.anti_hcv_cutoff
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="notedta",
        description="Diagnostic accuracy of clinical notes against serological gold standards.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("validate", help="check a cohort CSV and print a summary")
    p.add_argument("input")
    p.add_argument("--strict", action="store_true", help="abort on the first malformed row")
    p.add_argument("--report", help="write a JSON validation report here")

    p = sub.add_parser("classify", help="classify notes, one per input line")
    p.add_argument("input", help="text file of notes, '-' for stdin")
    p.add_argument("--lexicon", help=f"lexicon file (default: built-in, or ${LEXICON_ENV})")

    p = sub.add_parser("evaluate", help="run the full pipeline and write reports")
    p.add_argument("input", help="cohort CSV")
    p.add_argument("--condition", choices=sorted(_CONDITIONS), required=True)
    p.add_argument("--outdir", default=".", help="directory for report/plot files")
    p.add_argument("--lexicon")
    p.add_argument("--hbsag-cutoff", type=float, default=1.6)
    p.add_argument("--anti-hcv-cutoff", type=float, default=1.0)
    p.add_argument("--ci-method", choices=["exact", "score"], default="exact")
    p.add_argument("--ci-level", type=float, default=0.95)
    p.add_argument("--keep-vaccination", action="store_true",
                   help="do not exclude vaccination-response records")

    p = sub.add_parser("synth", help="write a synthetic cohort CSV")
    p.add_argument("output")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--condition", choices=sorted(_CONDITIONS))
    p.add_argument("--n", type=int, help="random cohort size (without --preset)")
    p.add_argument("--prevalence", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("report", help="re-render a stored JSON result")
    p.add_argument("input", help="report.json written by evaluate")
    p.add_argument("--format", choices=["markdown", "csv"], default="markdown")
    return parser


def _cmd_validate(args) -> int:
    cohort, report = parse_cohort_file_with_report(args.input, strict=args.strict)
    if args.report:
        Path(args.report).write_text(report.to_json(), encoding="utf-8")
    print(
        f"{args.input}: {report.n_parsed} records parsed, "
        f"{len(report.skipped)} skipped, {len(report.warnings)} warnings"
    )
    return 0


def _cmd_classify(args) -> int:
    lexicon = _load_lexicon(args.lexicon)
    fh = sys.stdin if args.input == "-" else open(args.input, encoding="utf-8")
    with fh:
        for line in fh:
            c = classify_note(line.rstrip("\n"), lexicon)
            print(f"{c.category_id}\t{c.hbv_label}\t{c.hcv_label}\t{c.matched_pattern}")
    return 0


def _cmd_evaluate(args) -> int:
    cohort = parse_cohort_file(args.input)
    config = EvaluationConfig(
        target_condition=_CONDITIONS[args.condition],
        exclude_vaccination=not args.keep_vaccination,
        thresholds=_thresholds(args),
        ci=CiConfig(level=args.ci_level, proportion_method=args.ci_method),
    )
    result = evaluate_condition(cohort, config, _load_lexicon(args.lexicon))
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "report.md").write_text(emit_report(result, "markdown"), encoding="utf-8")
    (outdir / "report.csv").write_text(emit_report(result, "csv"), encoding="utf-8")
    (outdir / "report.json").write_text(emit_report(result, "json"), encoding="utf-8")
    plots = emit_plot_data(result)
    (outdir / "plotdata_sensitivity.csv").write_text(plots["sensitivity"], encoding="utf-8")
    (outdir / "plotdata_specificity.csv").write_text(plots["specificity"], encoding="utf-8")
    (outdir / "demographics.csv").write_text(
        emit_demographics_csv(result.summary), encoding="utf-8"
    )
    p = result.primary
    print(
        f"{args.condition}: n={p.n_evaluated} "
        f"(missing excluded: {p.n_missing_excluded}); "
        f"table tp={p.table.tp} fp={p.table.fp} fn={p.table.fn} tn={p.table.tn}; "
        f"reports in {outdir}"
    )
    return 0


def _cmd_synth(args) -> int:
    if args.preset:
        preset = PRESETS[args.preset]
        spec = SynthesisSpec(
            condition=preset["condition"],
            target_table=preset["table"],
            n_missing=preset["n_missing"],
            age_mean=preset["age_mean"],
            age_sd=preset["age_sd"],
            sex_split=preset["sex_split"],
            seed=args.seed,
        )
        cohort = synthesize_exact(spec)
    else:
        if args.n is None:
            raise CliInputError("either --preset or --n is required")
        condition = _CONDITIONS[args.condition or "hbv"]
        cohort = synthesize_random(
            args.n,
            args.prevalence,
            note_mix={condition.category_id: 0.5, 32: 0.2, 37: 0.2, 45: 0.1},
            seed=args.seed,
        )
    write_cohort_file(cohort, args.output)
    print(f"{args.output}: {len(cohort)} records written (seed={args.seed})")
    return 0


def _cmd_report(args) -> int:
    # Re-render from the stored full-precision JSON without recomputation.
    with open(args.input, encoding="utf-8") as fh:
        payload = json.load(fh)
    if args.format == "csv":
        print(_json_to_csv(payload), end="")
    else:
        print(_json_to_markdown(payload), end="")
    return 0


def _fmt(v, nd="n.d."):
    if v is None:
        return nd
    if v == "inf":
        return "+inf"
    return f"{v:.4f}"


def _json_to_csv(payload: dict) -> str:
    import csv as _csv
    import io

    buf = io.StringIO()
    writer = _csv.writer(buf)
    writer.writerow(["category_id", "label", "tp", "fp", "fn", "tn",
                     "sn", "sp", "ppv", "npv", "lr_pos", "lr_neg"])
    for block in [payload["primary"], *payload["controls"]]:
        counts = block["counts"]
        writer.writerow(
            [block["category_id"], block["label"],
             counts["tp"], counts["fp"], counts["fn"], counts["tn"]]
            + [_fmt(block[m]["value"], nd="") for m in ("sn", "sp", "ppv", "npv", "lr_pos", "lr_neg")]
        )
    return buf.getvalue()


def _json_to_markdown(payload: dict) -> str:
    lines = [
        f"# {payload['marker']} report (re-rendered)",
        "",
        "| Category | Sn | Sp | PPV | NPV | LR+ | LR- |",
        "|---|---|---|---|---|---|---|",
    ]
    for block in [payload["primary"], *payload["controls"]]:
        cells = [_fmt(block[m]["value"]) for m in ("sn", "sp", "ppv", "npv", "lr_pos", "lr_neg")]
        lines.append(f"| {block['category_id']}: {block['label']} | " + " | ".join(cells) + " |")
    lines.append("")
    return "\n".join(lines)


class CliInputError(ValueError):
    pass


_COMMANDS = {
    "validate": _cmd_validate,
    "classify": _cmd_classify,
    "evaluate": _cmd_evaluate,
    "synth": _cmd_synth,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.subcommand](args)
    except (CliInputError, CohortFormatError, FileNotFoundError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except Exception as err:  # internal invariant failure
        print(f"internal error: {err!r}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
