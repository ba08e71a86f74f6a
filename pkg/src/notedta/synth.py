"""Deterministic synthetic cohorts.

The real source dataset is not distributable, so cohorts are generated:
either exactly (to hit target contingency counts) or stochastically.

All randomness comes from splitmix64 (Steele, Lea & Flood 2014), chosen
because it is tiny and fully specified by two published constants:

    state += 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    return z ^ (z >> 31)

Uniform doubles are ``next() / 2**64``; normals use Box-Muller. The same
seed therefore yields byte-identical cohorts on any platform.
"""

import math
from dataclasses import dataclass

from .classifier import Lexicon, default_lexicon
from .metrics import ContingencyTable
from .model import Cohort, Condition, PathologyRecord, Sex
from .serology import SerologyThresholds

_MASK = (1 << 64) - 1


class SplitMix64:
    """splitmix64 PRNG; stream order is part of the synthesis contract."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self, low: float = 0.0, high: float = 1.0) -> float:
        return low + (high - low) * (self.next_u64() / 2.0**64)

    def randint(self, low: int, high: int) -> int:
        # Inclusive bounds; modulo bias is irrelevant at these ranges.
        return low + self.next_u64() % (high - low + 1)

    def normal(self, mean: float, sd: float) -> float:
        u1 = max(self.uniform(), 1e-12)
        u2 = self.uniform()
        return mean + sd * math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def shuffle(self, items: list) -> None:
        # Fisher-Yates
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(0, i)
            items[i], items[j] = items[j], items[i]


HBV_STATEMENT_PHRASES = ("Hep B", "Known Hep B", "Hep B Pos", "Hx Hep B", "Hep B exposure")
HBV_QUERY_PHRASES = ("?Hep B", "Possible Hep B", "Screen Hep B")
HCV_STATEMENT_PHRASES = ("Hep C", "Known Hep C", "Hep C Pos", "Hx Hep C", "Hep C exposure")
HCV_QUERY_PHRASES = ("?Hep C", "Possible Hep C", "Screen Hep C")


def _default_phrases(condition: Condition) -> tuple[tuple[str, ...], tuple[str, ...]]:
    if condition is Condition.HEPATITIS_B:
        return HBV_STATEMENT_PHRASES, HBV_QUERY_PHRASES
    return HCV_STATEMENT_PHRASES, HCV_QUERY_PHRASES


@dataclass(frozen=True)
class SynthesisSpec:
    condition: Condition
    target_table: ContingencyTable
    n_missing: int = 0
    age_mean: float = 40.0
    age_sd: float = 17.0
    sex_split: tuple[int, int] | None = None  # (male, female); None = even split
    seed: int = 0
    statement_phrases: tuple[str, ...] = ()
    query_phrases: tuple[str, ...] = ()

    def __post_init__(self):
        if self.n_missing < 0:
            raise ValueError("n_missing must be >= 0")
        stm, qry = _default_phrases(self.condition)
        if not self.statement_phrases:
            object.__setattr__(self, "statement_phrases", stm)
        if not self.query_phrases:
            object.__setattr__(self, "query_phrases", qry)
        total = self.target_table.n + self.n_missing
        if self.sex_split is None:
            object.__setattr__(self, "sex_split", (total // 2, total - total // 2))
        if sum(self.sex_split) != total:
            raise ValueError(
                f"sex_split {self.sex_split} must sum to table n + n_missing = {total}"
            )


def synthesize_exact(
    spec: SynthesisSpec, thresholds: SerologyThresholds = SerologyThresholds()
) -> Cohort:
    """Cohort whose evaluation reproduces ``spec.target_table`` exactly.

    Statement phrases carry the test-positive records (tp, fp), query
    phrases the test-negative ones (fn, tn); marker values strictly respect
    the cutoff side; ``n_missing`` extra records carry no marker value.
    """
    rng = SplitMix64(spec.seed)
    cutoff = thresholds.cutoff(spec.condition)
    t = spec.target_table
    tag = "hbv" if spec.condition is Condition.HEPATITIS_B else "hcv"

    groups = [
        ("tp", t.tp, spec.statement_phrases, True),
        ("fp", t.fp, spec.statement_phrases, False),
        ("fn", t.fn, spec.query_phrases, True),
        ("tn", t.tn, spec.query_phrases, False),
        ("na", spec.n_missing, spec.statement_phrases + spec.query_phrases, None),
    ]

    sexes = [Sex.MALE] * spec.sex_split[0] + [Sex.FEMALE] * spec.sex_split[1]
    rng.shuffle(sexes)

    records: list[PathologyRecord] = []
    idx = 0
    for group, count, phrases, marker_positive in groups:
        for k in range(count):
            if marker_positive is None:
                value = None
            elif marker_positive:
                value = round(rng.uniform(cutoff, 10.0 * cutoff), 3)
                value = max(value, cutoff)
            else:
                value = round(rng.uniform(0.0, cutoff), 3)
                if value >= cutoff:
                    value = cutoff / 2.0
            age = min(100, max(0, int(round(rng.normal(spec.age_mean, spec.age_sd)))))
            records.append(
                PathologyRecord(
                    record_id=f"{tag}-{group}-{k:05d}",
                    age=age,
                    sex=sexes[idx],
                    note_text=phrases[k % len(phrases)],
                    hbsag_iu=value if spec.condition is Condition.HEPATITIS_B else None,
                    anti_hcv_iu=value if spec.condition is Condition.HEPATITIS_C else None,
                    collection_year=rng.randint(1997, 2007),
                )
            )
            idx += 1
    return Cohort(tuple(records), provenance=f"synthesize_exact(seed={spec.seed})")


def synthesize_random(
    n: int,
    prevalence: float,
    note_mix: dict[int, float],
    seed: int = 0,
    lexicon: Lexicon | None = None,
    thresholds: SerologyThresholds = SerologyThresholds(),
) -> Cohort:
    """Seeded stochastic cohort for stress and property testing.

    Each record's note comes from a category sampled by ``note_mix``
    weights (hepatitis categories use the statement/query phrase pools,
    others the first lexicon pattern of the category); each marker is
    positive independently with probability ``prevalence``.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if not (0.0 <= prevalence <= 1.0):
        raise ValueError("prevalence must be in [0,1]")
    if not note_mix or any(w < 0 for w in note_mix.values()) or sum(note_mix.values()) <= 0:
        raise ValueError("note_mix weights must be non-negative and not all zero")
    lexicon = lexicon or default_lexicon()
    rng = SplitMix64(seed)
    cats = sorted(note_mix)
    total_w = sum(note_mix.values())

    def sample_category() -> int:
        x = rng.uniform(0.0, total_w)
        acc = 0.0
        for c in cats:
            acc += note_mix[c]
            if x < acc:
                return c
        return cats[-1]

    def sample_value(cutoff: float) -> float:
        if rng.uniform() < prevalence:
            return round(max(rng.uniform(cutoff, 10.0 * cutoff), cutoff), 3)
        v = round(rng.uniform(0.0, cutoff), 3)
        return v if v < cutoff else cutoff / 2.0

    records = []
    for i in range(n):
        cat = sample_category()
        if cat == 1:
            pool = HBV_STATEMENT_PHRASES + HBV_QUERY_PHRASES
        elif cat == 2:
            pool = HCV_STATEMENT_PHRASES + HCV_QUERY_PHRASES
        elif cat == 45:
            pool = ("",)
        else:
            pool = tuple(" ".join(p) for p in lexicon.rule(cat).patterns[:3])
        note = pool[rng.randint(0, len(pool) - 1)]
        records.append(
            PathologyRecord(
                record_id=f"syn-{i:06d}",
                age=min(100, max(0, int(round(rng.normal(40.0, 17.0))))),
                sex=Sex.MALE if rng.uniform() < 0.5 else Sex.FEMALE,
                note_text=note,
                hbsag_iu=sample_value(thresholds.hbsag_cutoff),
                anti_hcv_iu=sample_value(thresholds.anti_hcv_cutoff),
                collection_year=rng.randint(1997, 2007),
            )
        )
    return Cohort(tuple(records), provenance=f"synthesize_random(seed={seed})")
