"""Rule-based classification of free-text pathology-request notes.

A note is normalized to a token sequence, matched against an ordered
lexicon of phrase patterns (46 disease/health categories), and given a
per-condition polarity: a plain *statement* of hepatitis B/C ("Known Hep
C", "Hep C Pos") maps to a positive test label, while a *query* or
screening entry ("?Hep C", "Screen Hep C", "Possible Hep C") maps to
negative. Polarity applies to the two hepatitis categories only.

Category 45 absorbs empty notes, category 46 everything unmatched.
"""

import re
from dataclasses import dataclass
from importlib import resources

NO_NOTE_CATEGORY = 45
NONSPECIFIC_CATEGORY = 46
HBV_CATEGORY = 1
HCV_CATEGORY = 2
VACCINATION_CATEGORY = 34

_TOKEN_RE = re.compile(r"[a-z0-9]+|\?")

# Multi-token abbreviation canonicalization, applied longest-match-first.
_CANONICAL: dict[tuple[str, ...], tuple[str, ...]] = {
    ("hepatitis", "b"): ("hepatitis-b",),
    ("hep", "b"): ("hepatitis-b",),
    ("hbv",): ("hepatitis-b",),
    ("hepatitis", "c"): ("hepatitis-c",),
    ("hep", "c"): ("hepatitis-c",),
    ("hcv",): ("hepatitis-c",),
    ("hx",): ("history",),
    ("pos",): ("positive",),
    ("fi",): ("for", "investigation"),
}
_MAX_ABBREV = max(len(k) for k in _CANONICAL)


def normalize_note(text: str) -> tuple[str, ...]:
    """Lower-case, isolate '?' as its own token, canonicalize abbreviations.

    Idempotent: normalizing the joined token sequence returns the same
    sequence.
    """
    raw = _TOKEN_RE.findall(text.lower())
    out: list[str] = []
    i = 0
    while i < len(raw):
        for width in range(_MAX_ABBREV, 0, -1):
            chunk = tuple(raw[i : i + width])
            if chunk in _CANONICAL:
                out.extend(_CANONICAL[chunk])
                i += width
                break
        else:
            out.append(raw[i])
            i += 1
    return tuple(out)


@dataclass(frozen=True)
class CategoryRule:
    category_id: int
    label: str
    icd10_chapter: str | None
    priority: int
    patterns: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if not (1 <= self.category_id <= 46):
            raise ValueError(f"category_id out of range: {self.category_id}")
        if not self.patterns:
            raise ValueError(f"category {self.category_id} has no patterns")


@dataclass(frozen=True)
class Lexicon:
    rules: tuple[CategoryRule, ...]
    query_keywords: tuple[tuple[str, ...], ...]
    statement_keywords: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        ids = sorted(r.category_id for r in self.rules)
        if ids != list(range(1, 47)):
            missing = sorted(set(range(1, 47)) - set(ids))
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            if missing:
                raise ValueError(f"lexicon missing categories: {missing}")
            raise ValueError(f"lexicon has duplicate categories: {dupes}")
        prios = [r.priority for r in self.rules]
        if len(set(prios)) != len(prios):
            raise ValueError("rule priorities must be unique")

    def rule(self, category_id: int) -> CategoryRule:
        for r in self.rules:
            if r.category_id == category_id:
                return r
        raise KeyError(category_id)


@dataclass(frozen=True)
class Match:
    category_id: int
    pattern: str  # the matched pattern, space-joined
    position: int  # token index of the match start


@dataclass(frozen=True)
class NoteClassification:
    category_id: int
    matched_pattern: str
    hbv_label: str  # "positive" / "negative"
    hcv_label: str
    all_matches: tuple[Match, ...]


def _contains(tokens: tuple[str, ...], pattern: tuple[str, ...]) -> int:
    """Index of the first contiguous occurrence of pattern, or -1."""
    w = len(pattern)
    for i in range(len(tokens) - w + 1):
        if tuple(tokens[i : i + w]) == pattern:
            return i
    return -1


def classify_note(text: str, lexicon: Lexicon) -> NoteClassification:
    """Assign a category and per-condition polarity to one note.

    Deterministic: ties between categories are broken by rule priority
    (the hepatitis categories rank highest so polarity is never masked).
    """
    tokens = normalize_note(text)
    if not tokens:
        return NoteClassification(NO_NOTE_CATEGORY, "", "negative", "negative", ())

    matches: list[Match] = []
    best: tuple[int, Match] | None = None
    for rule in lexicon.rules:
        for pattern in rule.patterns:
            pos = _contains(tokens, pattern)
            if pos >= 0:
                m = Match(rule.category_id, " ".join(pattern), pos)
                matches.append(m)
                if best is None or rule.priority < best[0]:
                    best = (rule.priority, m)
                break  # one match per category is enough

    if best is None:
        return NoteClassification(NONSPECIFIC_CATEGORY, "", "negative", "negative", ())

    is_query = _note_is_query(tokens, lexicon)
    matched_ids = {m.category_id for m in matches}
    hbv = "positive" if (HBV_CATEGORY in matched_ids and not is_query) else "negative"
    hcv = "positive" if (HCV_CATEGORY in matched_ids and not is_query) else "negative"
    return NoteClassification(
        best[1].category_id, best[1].pattern, hbv, hcv, tuple(matches)
    )


def _note_is_query(tokens: tuple[str, ...], lexicon: Lexicon) -> bool:
    """A '?' token anywhere or any query keyword marks the note as a query."""
    if "?" in tokens:
        return True
    return any(_contains(tokens, kw) >= 0 for kw in lexicon.query_keywords)


# ---------------------------------------------------------------------------
# Lexicon file format: blocks introduced by "[category N]" with "label:",
# "chapter:", "priority:" and one "pattern:" line per phrase, plus a
# "[polarity]" block of "query:" / "statement:" lines. Patterns and
# keywords are normalized on load.


def load_lexicon(path) -> Lexicon:
    with open(path, encoding="utf-8") as fh:
        return parse_lexicon(fh.read())


def default_lexicon() -> Lexicon:
    text = resources.files("notedta").joinpath("data/default_lexicon.txt").read_text("utf-8")
    return parse_lexicon(text)


def parse_lexicon(text: str) -> Lexicon:
    rules: list[CategoryRule] = []
    query: list[tuple[str, ...]] = []
    statement: list[tuple[str, ...]] = []
    current: dict | None = None
    in_polarity = False

    def flush():
        nonlocal current
        if current is None:
            return
        rules.append(
            CategoryRule(
                category_id=current["id"],
                label=current.get("label", ""),
                icd10_chapter=current.get("chapter"),
                priority=current["priority"],
                patterns=tuple(current["patterns"]),
            )
        )
        current = None

    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line == "[polarity]":
            flush()
            in_polarity = True
            continue
        header = re.fullmatch(r"\[category (\d+)\]", line)
        if header:
            flush()
            in_polarity = False
            current = {"id": int(header.group(1)), "patterns": []}
            continue
        key, _, value = line.partition(":")
        key, value = key.strip(), value.strip()
        if in_polarity:
            if key == "query":
                query.append(("?",) if value == "?" else normalize_note(value))
            elif key == "statement":
                statement.append(normalize_note(value))
            else:
                raise ValueError(f"line {lineno}: unknown polarity key {key!r}")
            continue
        if current is None:
            raise ValueError(f"line {lineno}: content outside any block")
        if key == "label":
            current["label"] = value
        elif key == "chapter":
            current["chapter"] = None if value == "-" else value
        elif key == "priority":
            current["priority"] = int(value)
        elif key == "pattern":
            pat = normalize_note(value)
            if not pat:
                raise ValueError(f"line {lineno}: empty pattern")
            current["patterns"].append(pat)
        else:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
    flush()
    return Lexicon(tuple(rules), tuple(query), tuple(statement))
