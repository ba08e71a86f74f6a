"""How predictive values move with prevalence while Sn and Sp stay fixed.

Takes the hepatitis B note classifier's operating point (Sn 0.896, Sp 0.559
from the reference table) and projects PPV and NPV across a range of disease
prevalences with Bayes' theorem. The sample prevalence in the reference
cohort was 77/179, which recovers the in-sample PPV and NPV exactly.

Run with: python demos/03_prevalence_adjustment.py
"""

from notedta.metrics import (
    ContingencyTable,
    adjust_predictive_values,
    compute_metrics,
    format_proportion,
)

table = ContingencyTable(tp=69, fp=45, fn=8, tn=57)
panel = compute_metrics(table)
sn, sp = panel.sn.value, panel.sp.value
print(f"operating point: Sn {format_proportion(sn)}, Sp {format_proportion(sp)}\n")

print("prevalence   PPV    NPV")
for prevalence in (0.01, 0.05, 0.10, 0.20, panel.prevalence_sample, 0.60, 0.90):
    ppv, npv = adjust_predictive_values(sn, sp, prevalence)
    marker = "  <- sample prevalence" if prevalence == panel.prevalence_sample else ""
    print(f"{prevalence:10.3f}   {format_proportion(ppv)}   {format_proportion(npv)}{marker}")

print(f"\nin-sample check: PPV {format_proportion(panel.ppv.value)}, "
      f"NPV {format_proportion(panel.npv.value)}")
