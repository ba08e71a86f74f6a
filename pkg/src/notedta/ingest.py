"""Cohort file parsing, serialization, and demographic summaries.

The on-disk format is UTF-8 CSV with header
``record_id,age,sex,note_text,hbsag_iu,anti_hcv_iu,collection_year``;
free text is quoted, an empty field means absent. Sex tokens M/F/1/2 are
recognised; anything else maps to unspecified (with a warning recorded in
the validation report).
"""

import csv
import json
import math
import statistics
from dataclasses import dataclass, field

from .model import Cohort, PathologyRecord, Sex

HEADER = ["record_id", "age", "sex", "note_text", "hbsag_iu", "anti_hcv_iu", "collection_year"]

_SEX_TOKENS = {"m": Sex.MALE, "1": Sex.MALE, "f": Sex.FEMALE, "2": Sex.FEMALE, "": Sex.UNSPECIFIED}


class CohortFormatError(ValueError):
    """Malformed cohort file (bad header, bad field, duplicate id)."""


@dataclass
class ValidationReport:
    path: str
    strict: bool
    n_rows: int = 0
    n_parsed: int = 0
    skipped: list[dict] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {
                "path": self.path,
                "strict": self.strict,
                "n_rows": self.n_rows,
                "n_parsed": self.n_parsed,
                "n_skipped": len(self.skipped),
                "skipped_rows": self.skipped,
                "warnings": self.warnings,
            },
            indent=2,
        )


def _parse_int(raw: str, column: str, row: int, low: int, high: int) -> int | None:
    if raw == "":
        return None
    try:
        value = int(raw)
    except ValueError:
        raise CohortFormatError(f"row {row}, column {column}: not an integer: {raw!r}")
    if not (low <= value <= high):
        raise CohortFormatError(f"row {row}, column {column}: out of range [{low},{high}]: {value}")
    return value


def _parse_assay(raw: str, column: str, row: int) -> float | None:
    if raw == "":
        return None
    try:
        value = float(raw)
    except ValueError:
        raise CohortFormatError(f"row {row}, column {column}: not a number: {raw!r}")
    if not math.isfinite(value) or value < 0:
        raise CohortFormatError(f"row {row}, column {column}: must be finite and >= 0: {raw!r}")
    return value


def parse_cohort_file(path, strict: bool = True, provenance: str | None = None) -> Cohort:
    cohort, _ = parse_cohort_file_with_report(path, strict=strict, provenance=provenance)
    return cohort


def parse_cohort_file_with_report(
    path, strict: bool = True, provenance: str | None = None
) -> tuple[Cohort, ValidationReport]:
    """Parse a cohort CSV.

    In strict mode any malformed row raises CohortFormatError with the row
    number; in lenient mode malformed rows are skipped and listed in the
    report. Duplicate record ids are an error in both modes.
    """
    report = ValidationReport(path=str(path), strict=strict)
    records: list[PathologyRecord] = []
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CohortFormatError(f"{path}: empty file, header row required")
        if header != HEADER:
            raise CohortFormatError(f"{path}: bad header {header!r}, expected {HEADER!r}")
        for rownum, row in enumerate(reader, start=2):
            report.n_rows += 1
            try:
                records.append(_parse_row(row, rownum, seen, report))
            except CohortFormatError as err:
                if strict:
                    raise
                report.skipped.append({"row": rownum, "reason": str(err)})
    report.n_parsed = len(records)
    cohort = Cohort(tuple(records), provenance=provenance or str(path))
    return cohort, report


def _parse_row(row, rownum: int, seen: set, report: ValidationReport) -> PathologyRecord:
    if len(row) != len(HEADER):
        raise CohortFormatError(f"row {rownum}: expected {len(HEADER)} fields, got {len(row)}")
    record_id, age_raw, sex_raw, note_text, hbsag_raw, hcv_raw, year_raw = row
    if not record_id:
        raise CohortFormatError(f"row {rownum}, column record_id: empty")
    if record_id in seen:
        raise CohortFormatError(f"row {rownum}: duplicate record_id {record_id!r}")
    sex_token = sex_raw.strip().lower()
    sex = _SEX_TOKENS.get(sex_token)
    if sex is None:
        report.warnings.append(
            f"row {rownum}: unrecognised sex token {sex_raw!r}, treated as unspecified"
        )
        sex = Sex.UNSPECIFIED
    record = PathologyRecord(
        record_id=record_id,
        age=_parse_int(age_raw, "age", rownum, 0, 130),
        sex=sex,
        note_text=note_text,
        hbsag_iu=_parse_assay(hbsag_raw, "hbsag_iu", rownum),
        anti_hcv_iu=_parse_assay(hcv_raw, "anti_hcv_iu", rownum),
        collection_year=_parse_int(year_raw, "collection_year", rownum, 1800, 2200),
    )
    seen.add(record_id)
    return record


_SEX_OUT = {Sex.MALE: "M", Sex.FEMALE: "F", Sex.UNSPECIFIED: ""}


def write_cohort_file(cohort: Cohort, path) -> None:
    """Serialize a cohort back to the CSV schema (lossless round trip)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(HEADER)
        for rec in cohort:
            writer.writerow(
                [
                    rec.record_id,
                    "" if rec.age is None else rec.age,
                    _SEX_OUT[rec.sex],
                    rec.note_text,
                    "" if rec.hbsag_iu is None else repr(rec.hbsag_iu),
                    "" if rec.anti_hcv_iu is None else repr(rec.anti_hcv_iu),
                    "" if rec.collection_year is None else rec.collection_year,
                ]
            )


@dataclass(frozen=True)
class CohortSummary:
    n_total: int
    age_mean: float | None
    age_sd: float | None
    n_male: int
    n_female: int
    n_unspecified: int
    n_missing_hbsag: int
    n_missing_anti_hcv: int
    age_histogram: tuple[tuple[int, int], ...]  # (decade start, count)


def summarize_demographics(cohort: Cohort) -> CohortSummary:
    """Counts, age mean/SD (sample SD), and a per-decade age histogram.

    Age statistics cover only records with age present; a single aged
    record yields SD 0.
    """
    if len(cohort) == 0:
        raise ValueError("cannot summarize an empty cohort")
    ages = [r.age for r in cohort if r.age is not None]
    decades: dict[int, int] = {}
    for a in ages:
        decades[(a // 10) * 10] = decades.get((a // 10) * 10, 0) + 1
    return CohortSummary(
        n_total=len(cohort),
        age_mean=statistics.fmean(ages) if ages else None,
        age_sd=(statistics.stdev(ages) if len(ages) > 1 else (0.0 if ages else None)),
        n_male=sum(1 for r in cohort if r.sex is Sex.MALE),
        n_female=sum(1 for r in cohort if r.sex is Sex.FEMALE),
        n_unspecified=sum(1 for r in cohort if r.sex is Sex.UNSPECIFIED),
        n_missing_hbsag=sum(1 for r in cohort if r.hbsag_iu is None),
        n_missing_anti_hcv=sum(1 for r in cohort if r.anti_hcv_iu is None),
        age_histogram=tuple(sorted(decades.items())),
    )
