"""Tour of the note classifier on short clinical phrases.

Shows normalization (case folding, abbreviation expansion, question-mark
isolation), category assignment across the 46-category lexicon, and the
statement-versus-query polarity rule that decides the hepatitis test labels.

Run with: python demos/02_note_classification_tour.py
"""

from notedta.classifier import classify_note, default_lexicon, normalize_note

PHRASES = [
    "Known Hep C",
    "?Hep C",
    "Hep C Pos",
    "Possible Hep C",
    "Hx Hep B",
    "Screen Hep C",
    "Hepatitis cause?",
    "RANTS, known Hep B",
    "IVDA on methadone",
    "work screening",
    "fatigue and lethargy",
    "",
    "zzz unintelligible zzz",
]

lexicon = default_lexicon()
header = f"{'note':28} {'tokens':32} cat  hbv       hcv"
print(header)
print("-" * len(header))
for phrase in PHRASES:
    c = classify_note(phrase, lexicon)
    tokens = " ".join(normalize_note(phrase)) or "(none)"
    label = lexicon.rule(c.category_id).label
    print(f"{phrase!r:28} {tokens:32} {c.category_id:>3}  "
          f"{c.hbv_label:9} {c.hcv_label:9} [{label}]")
