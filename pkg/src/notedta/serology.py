"""Gold-standard classification of raw immunoassay values.

Cutoffs default to the originating laboratory's values (HBsAg 1.6 IU,
anti-HCV 1.0 IU) but are plain configuration: other laboratories use
different assay calibrations.
"""

from dataclasses import dataclass

from .model import Condition, PathologyRecord, SerologyStatus


@dataclass(frozen=True)
class SerologyThresholds:
    hbsag_cutoff: float = 1.6
    anti_hcv_cutoff: float = 1.0

    def __post_init__(self):
        if self.hbsag_cutoff <= 0 or self.anti_hcv_cutoff <= 0:
            raise ValueError("cutoffs must be > 0")

    def cutoff(self, condition: Condition) -> float:
        if condition is Condition.HEPATITIS_B:
            return self.hbsag_cutoff
        return self.anti_hcv_cutoff


def classify_marker(
    record: PathologyRecord,
    condition: Condition,
    thresholds: SerologyThresholds = SerologyThresholds(),
) -> SerologyStatus:
    """Map an assay value to positive/negative/missing.

    The comparison at the cutoff is inclusive: value >= cutoff is positive.
    """
    value = record.assay_value(condition)
    if value is None:
        return SerologyStatus.MISSING
    if value >= thresholds.cutoff(condition):
        return SerologyStatus.POSITIVE
    return SerologyStatus.NEGATIVE
