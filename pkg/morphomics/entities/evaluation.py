from typing import List

from pydantic import BaseModel, Field, model_validator


class RocPoint(BaseModel):
    threshold: float
    fpr: float = Field(ge=0, le=1)
    tpr: float = Field(ge=0, le=1)


class YoudenPoint(BaseModel):
    threshold: float
    sensitivity: float = Field(ge=0, le=1)
    specificity: float = Field(ge=0, le=1)
    accuracy: float = Field(ge=0, le=1)

    @property
    def youden_index(self) -> float:
        return self.sensitivity + self.specificity - 1.0


class BootstrapSummary(BaseModel):
    n: int = Field(ge=1)
    mean: float
    stdev: float = Field(ge=0)
    ci_low: float
    ci_high: float
    samples: List[float] = Field(default_factory=list, repr=False)


class WelchResult(BaseModel):
    t: float
    df: float
    p_two_sided: float = Field(ge=0, le=1)


class EvalReport(BaseModel):
    auc: float = Field(ge=0, le=1)
    threshold: float
    sensitivity: float = Field(ge=0, le=1)
    specificity: float = Field(ge=0, le=1)
    accuracy: float = Field(ge=0, le=1)
    n_positive: int = Field(ge=0)
    n_negative: int = Field(ge=0)
    bootstrap: BootstrapSummary
    roc_points: List[RocPoint]

    @model_validator(mode='after')
    def check_roc(self):
        fprs = [point.fpr for point in self.roc_points]
        if any(b < a for a, b in zip(fprs, fprs[1:])):
            raise ValueError("roc_points must be monotone in fpr")
        return self
