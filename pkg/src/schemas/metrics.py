from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field


class RougeEntry(BaseModel):
    """
    Precision, recall and F-measure of one ROUGE variant.

    Attributes:
        precision (float): Overlap divided by candidate size.
        recall (float): Overlap divided by reference size.
        f_measure (float): Harmonic mean of precision and recall, 0 when both are 0.
    """

    model_config = ConfigDict(frozen=True)
    precision: float = Field(..., ge=0.0, le=1.0)
    recall: float = Field(..., ge=0.0, le=1.0)
    f_measure: float = Field(..., ge=0.0, le=1.0)

    @classmethod
    def from_precision_recall(cls, precision: float, recall: float) -> "RougeEntry":
        total = precision + recall
        f_measure = min(1.0, 2.0 * precision * recall / total) if total > 0 else 0.0
        return cls(precision=precision, recall=recall, f_measure=f_measure)

    @classmethod
    def zero(cls) -> "RougeEntry":
        return cls(precision=0.0, recall=0.0, f_measure=0.0)


class RougeScore(BaseModel):
    """ROUGE-1, ROUGE-2 and ROUGE-L for one pair or averaged over a corpus."""

    model_config = ConfigDict(frozen=True)
    rouge1: RougeEntry
    rouge2: RougeEntry
    rougeL: RougeEntry

    def f_measures_percent(self) -> tuple[float, float, float]:
        """F-measures scaled to the 0-100 range used by report tables."""
        return (
            100.0 * self.rouge1.f_measure,
            100.0 * self.rouge2.f_measure,
            100.0 * self.rougeL.f_measure,
        )
