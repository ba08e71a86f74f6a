"""2x2 contingency tables and the diagnostic-accuracy panel.

Point estimates are always computed from raw counts, never from rounded
intermediate metrics. A metric whose denominator is zero is *undefined*
(rendered ``n.d.``), which is a value, not an error; a positive likelihood
ratio with perfect specificity and non-zero sensitivity is infinite
(rendered ``+inf``).

Confidence intervals:

* proportions (Sn, Sp): exact Clopper-Pearson by default, Wilson score
  behind the ``score`` method flag;
* predictive values (PPV, NPV): logit-transformed intervals;
* likelihood ratios: the standard log method,
  ``exp(ln(LR) +/- z * se)`` with
  ``se = sqrt(1/a - 1/(a+b) + 1/c - 1/(c+d))`` over the relevant cells.
"""

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from scipy.stats import beta as _beta
from scipy.stats import norm as _norm

from .model import SerologyStatus

# Standard-normal two-sided quantile at 95%, fixed so reports are stable.
Z_95 = 1.959964


def _z_quantile(level: float) -> float:
    if abs(level - 0.95) < 1e-12:
        return Z_95
    return float(_norm.ppf(1.0 - (1.0 - level) / 2.0))


@dataclass(frozen=True)
class CiConfig:
    level: float = 0.95
    proportion_method: str = "exact"  # "exact" (Clopper-Pearson) or "score" (Wilson)
    haldane: bool = False  # +0.5 continuity correction for LR intervals

    def __post_init__(self):
        if not (0.0 < self.level < 1.0):
            raise ValueError(f"confidence level must be in (0,1): {self.level}")
        if self.proportion_method not in ("exact", "score"):
            raise ValueError(f"unknown proportion CI method: {self.proportion_method!r}")


@dataclass(frozen=True)
class ContingencyTable:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        for name in ("tp", "fp", "fn", "tn"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @property
    def diseased(self) -> int:
        return self.tp + self.fn

    @property
    def test_positive(self) -> int:
        return self.tp + self.fp


@dataclass(frozen=True)
class MetricEstimate:
    """Point estimate plus interval; ``None`` marks an undefined quantity."""
    value: float | None
    ci_low: float | None = None
    ci_high: float | None = None
    method: str = ""
    note: str = ""

    @property
    def defined(self) -> bool:
        return self.value is not None

    @property
    def infinite(self) -> bool:
        return self.value is not None and math.isinf(self.value)


@dataclass(frozen=True)
class MetricPanel:
    sn: MetricEstimate
    sp: MetricEstimate
    ppv: MetricEstimate
    npv: MetricEstimate
    lr_pos: MetricEstimate
    lr_neg: MetricEstimate
    prevalence_sample: float | None


def build_contingency(pairs) -> tuple[ContingencyTable, int]:
    """Tally (test_label, truth) pairs into a 2x2 table.

    ``test_label`` is the string "positive"/"negative" (or a bool), truth is
    a SerologyStatus. Pairs with missing truth are excluded; their count is
    returned alongside the table.
    """
    tp = fp = fn = tn = 0
    n_missing = 0
    for test_label, truth in pairs:
        if truth is SerologyStatus.MISSING:
            n_missing += 1
            continue
        test_pos = test_label in (True, "positive")
        truth_pos = truth is SerologyStatus.POSITIVE
        if test_pos and truth_pos:
            tp += 1
        elif test_pos:
            fp += 1
        elif truth_pos:
            fn += 1
        else:
            tn += 1
    return ContingencyTable(tp, fp, fn, tn), n_missing


def ci_proportion(
    successes: int, trials: int, level: float = 0.95, method: str = "exact"
) -> tuple[float, float]:
    """Two-sided binomial confidence interval for ``successes/trials``.

    ``exact`` is the equal-tailed Clopper-Pearson interval (beta quantile
    form), ``score`` the Wilson interval.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not (0 <= successes <= trials):
        raise ValueError("successes must be in [0, trials]")
    alpha = 1.0 - level
    k, n = successes, trials
    if method == "exact":
        low = 0.0 if k == 0 else float(_beta.ppf(alpha / 2.0, k, n - k + 1))
        high = 1.0 if k == n else float(_beta.ppf(1.0 - alpha / 2.0, k + 1, n - k))
        return low, high
    if method == "score":
        z = _z_quantile(level)
        p = k / n
        centre = p + z * z / (2.0 * n)
        half = z * math.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n))
        denom = 1.0 + z * z / n
        return (centre - half) / denom, (centre + half) / denom
    raise ValueError(f"unknown method: {method!r}")


def ci_likelihood_ratio(
    table: ContingencyTable,
    which: str,
    level: float = 0.95,
    haldane: bool = False,
) -> tuple[float, float] | None:
    """Log-method confidence interval for LR+ or LR-.

    Requires tp >= 1 and fp >= 1 (LR+), or fn >= 1 and tn >= 1 (LR-);
    returns None when the precondition fails. With ``haldane`` set, 0.5 is
    added to every cell before evaluation.
    """
    if which not in ("lr_pos", "lr_neg"):
        raise ValueError(f"which must be 'lr_pos' or 'lr_neg': {which!r}")
    tp, fp, fn, tn = table.tp, table.fp, table.fn, table.tn
    if haldane:
        tp, fp, fn, tn = tp + 0.5, fp + 0.5, fn + 0.5, tn + 0.5
    if which == "lr_pos":
        if tp <= 0 or fp <= 0:
            return None
        lr = (tp / (tp + fn)) / (fp / (fp + tn))
        se = math.sqrt(1 / tp - 1 / (tp + fn) + 1 / fp - 1 / (fp + tn))
    else:
        if fn <= 0 or tn <= 0:
            return None
        lr = (fn / (tp + fn)) / (tn / (fp + tn))
        se = math.sqrt(1 / fn - 1 / (tp + fn) + 1 / tn - 1 / (fp + tn))
    z = _z_quantile(level)
    return math.exp(math.log(lr) - z * se), math.exp(math.log(lr) + z * se)


def _proportion_estimate(successes: int, trials: int, ci: CiConfig) -> MetricEstimate:
    if trials == 0:
        return MetricEstimate(None, note="zero denominator")
    low, high = ci_proportion(successes, trials, ci.level, ci.proportion_method)
    method = "clopper-pearson" if ci.proportion_method == "exact" else "wilson"
    return MetricEstimate(successes / trials, low, high, method=method)


def _logit_estimate(successes: int, trials: int, ci: CiConfig) -> MetricEstimate:
    if trials == 0:
        return MetricEstimate(None, note="zero denominator")
    p = successes / trials
    if successes == 0 or successes == trials:
        # Logit transform degenerates; report the point estimate only.
        return MetricEstimate(p, method="logit", note="degenerate logit interval")
    z = _z_quantile(ci.level)
    se = math.sqrt(1 / successes + 1 / (trials - successes))
    lo = math.log(p / (1 - p)) - z * se
    hi = math.log(p / (1 - p)) + z * se
    return MetricEstimate(p, 1 / (1 + math.exp(-lo)), 1 / (1 + math.exp(-hi)), method="logit")


def _lr_estimate(table: ContingencyTable, which: str, ci: CiConfig) -> MetricEstimate:
    tp, fp, fn, tn = table.tp, table.fp, table.fn, table.tn
    if which == "lr_pos":
        if tp + fn == 0 or tn + fp == 0:
            return MetricEstimate(None, note="undefined Sn or Sp")
        if fp == 0:
            if tp == 0:
                return MetricEstimate(None, note="0/0 likelihood ratio")
            return MetricEstimate(math.inf, method="log", note="specificity 1 with Sn > 0")
        value = (tp * (fp + tn)) / ((tp + fn) * fp)
    else:
        if tp + fn == 0 or tn + fp == 0:
            return MetricEstimate(None, note="undefined Sn or Sp")
        if tn == 0:
            if fn == 0:
                return MetricEstimate(None, note="0/0 likelihood ratio")
            return MetricEstimate(math.inf, method="log", note="specificity 0 with Sn < 1")
        value = (fn * (fp + tn)) / ((tp + fn) * tn)
    bounds = ci_likelihood_ratio(table, which, ci.level, ci.haldane)
    if bounds is None:
        return MetricEstimate(value, method="log", note="interval needs all relevant cells >= 1")
    return MetricEstimate(value, bounds[0], bounds[1], method="log")


def compute_metrics(table: ContingencyTable, ci: CiConfig = CiConfig()) -> MetricPanel:
    """The six-metric diagnostic accuracy panel for a 2x2 table."""
    tp, fp, fn, tn = table.tp, table.fp, table.fn, table.tn
    return MetricPanel(
        sn=_proportion_estimate(tp, tp + fn, ci),
        sp=_proportion_estimate(tn, tn + fp, ci),
        ppv=_logit_estimate(tp, tp + fp, ci),
        npv=_logit_estimate(tn, tn + fn, ci),
        lr_pos=_lr_estimate(table, "lr_pos", ci),
        lr_neg=_lr_estimate(table, "lr_neg", ci),
        prevalence_sample=(tp + fn) / table.n if table.n > 0 else None,
    )


def adjust_predictive_values(
    sn: float, sp: float, prevalence: float
) -> tuple[float | None, float | None]:
    """PPV/NPV at an externally supplied prevalence (Bayes identities)."""
    for name, v in (("sn", sn), ("sp", sp), ("prevalence", prevalence)):
        if not (0.0 <= v <= 1.0):
            raise ValueError(f"{name} must be in [0,1]: {v}")
    p = prevalence
    ppv_num = sn * p
    ppv_den = sn * p + (1 - sp) * (1 - p)
    npv_num = sp * (1 - p)
    npv_den = sp * (1 - p) + (1 - sn) * p
    ppv = ppv_num / ppv_den if ppv_den > 0 else None
    npv = npv_num / npv_den if npv_den > 0 else None
    return ppv, npv


# ---------------------------------------------------------------------------
# Display rounding (the source tables print 2-dp proportions, integer or 1-dp
# percentages derived from them, and 2-dp likelihood ratios).


def _round_half_up(value: float, places: int) -> Decimal:
    q = Decimal(1).scaleb(-places)
    return Decimal(repr(value)).quantize(q, rounding=ROUND_HALF_UP)


def format_proportion(estimate_or_value, places: int = 2) -> str:
    """Proportion as a fixed-decimal string, e.g. 0.8961 -> '0.90'."""
    value = getattr(estimate_or_value, "value", estimate_or_value)
    if value is None:
        return "n.d."
    if math.isinf(value):
        return "+inf"
    return str(_round_half_up(value, places))

def format_percent(value: float | None) -> str:
    """Percentage derived from the 2-dp proportion: 0.8769 -> '87'.

    The source tables print point percentages this way (0.8769 rounds to
    0.87, shown as 87, not 88).
    """
    if value is None:
        return "n.d."
    if math.isinf(value):
        return "+inf"
    return str((_round_half_up(value, 2) * 100).quantize(Decimal(1)))


def format_percent_1dp(value: float | None) -> str:
    """CI-bound percentage with one decimal: 0.80599 -> '80.6'; 1.0 -> '100'."""
    if value is None:
        return "n.d."
    pct = _round_half_up(value * 100, 1)
    if pct == pct.to_integral_value():
        return str(pct.quantize(Decimal(1)))
    return str(pct)


def format_ratio(estimate_or_value) -> str:
    """Likelihood ratio to two decimals; 'n.d.' / '+inf' when not finite."""
    value = getattr(estimate_or_value, "value", estimate_or_value)
    if value is None:
        return "n.d."
    if math.isinf(value):
        return "+inf"
    return str(_round_half_up(value, 2))
