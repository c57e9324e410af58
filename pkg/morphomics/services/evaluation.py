# morphomics/services/evaluation.py
"""
Evaluation statistics

- roc_auc: Mann-Whitney formulation through average ranks (ties count 1/2)
- youden_point: operating point maximizing sensitivity + specificity - 1
- bootstrap_auc: percentile interval over seeded resamples
- welch_test: unequal-variance two-sample t-test
- feature_class_statistics: per-feature class means compared with welch_test
"""

import logging
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.special import betainc
from scipy.stats import rankdata
from sklearn.metrics import roc_curve

from morphomics.entities.evaluation import BootstrapSummary, EvalReport, RocPoint, WelchResult, YoudenPoint
from morphomics.exceptions import SingleClassError

logger = logging.getLogger(__name__)

DEFAULT_BOOTSTRAP = 5000
MAX_REDRAWS = 10_000
_TIE_TOLERANCE = 1e-12


def _check_binary(scores, labels):
    scores = np.asarray(scores, dtype=np.float64).reshape(-1)
    labels = np.asarray(labels).reshape(-1)
    if scores.shape != labels.shape:
        raise ValueError(f"{scores.size} scores for {labels.size} labels")
    if not np.all(np.isin(labels, (0, 1))):
        raise ValueError("labels must be 0 or 1")
    labels = labels.astype(np.int64)
    if np.unique(labels).size < 2:
        raise SingleClassError("both classes are required")
    return scores, labels


def _auc(scores: np.ndarray, labels: np.ndarray) -> float:
    ranks = rankdata(scores, method='average')
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    rank_sum = float(ranks[labels == 1].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def roc_auc(scores, labels) -> float:
    """Share of (positive, negative) pairs ranked correctly, ties counted 1/2"""
    scores, labels = _check_binary(scores, labels)
    return _auc(scores, labels)


def roc_points(scores, labels) -> List[RocPoint]:
    """(threshold, fpr, tpr) for every distinct score, starting at (inf, 0, 0)"""
    scores, labels = _check_binary(scores, labels)
    fpr, tpr, thresholds = roc_curve(labels, scores, drop_intermediate=False)
    return [
        RocPoint(threshold=float(t), fpr=float(f), tpr=float(s))
        for t, f, s in zip(thresholds, fpr, tpr)
    ]


def youden_point(scores, labels) -> YoudenPoint:
    """
    Threshold among observed scores maximizing the Youden index

    A row is called positive when its score is >= threshold. Ties go to the
    higher specificity, then to the lower threshold.
    """
    scores, labels = _check_binary(scores, labels)
    fpr, tpr, thresholds = roc_curve(labels, scores, drop_intermediate=False)
    observed = np.isfinite(thresholds) & np.isin(thresholds, scores)
    fpr, tpr, thresholds = fpr[observed], tpr[observed], thresholds[observed]

    youden = tpr - fpr
    tied = np.flatnonzero(youden >= youden.max() - _TIE_TOLERANCE)
    specificity = 1.0 - fpr[tied]
    tied = tied[specificity >= specificity.max() - _TIE_TOLERANCE]
    best = tied[np.argmin(thresholds[tied])]

    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    true_pos = tpr[best] * n_pos
    true_neg = (1.0 - fpr[best]) * n_neg
    return YoudenPoint(
        threshold=float(thresholds[best]),
        sensitivity=float(tpr[best]),
        specificity=float(1.0 - fpr[best]),
        accuracy=float((true_pos + true_neg) / len(labels)),
    )


def bootstrap_auc(scores, labels, n: int = DEFAULT_BOOTSTRAP, seed: int = 0) -> BootstrapSummary:
    """
    AUC over `n` resamples with replacement

    Resamples missing a class are re-drawn so exactly `n` AUCs are kept.
    The interval is the 2.5 / 97.5 percentile pair.
    """
    if n < 1:
        raise ValueError(f"bootstrap count must be positive, got {n}")
    scores, labels = _check_binary(scores, labels)
    rng = np.random.default_rng(seed)
    size = len(scores)
    samples = np.empty(n)
    redraws = 0
    for i in range(n):
        while True:
            index = rng.integers(0, size, size)
            drawn = labels[index]
            positives = int(drawn.sum())
            if 0 < positives < size:
                break
            redraws += 1
            if redraws > MAX_REDRAWS:
                raise SingleClassError(f"gave up after {MAX_REDRAWS} single-class resamples")
        samples[i] = _auc(scores[index], drawn)

    if redraws:
        logger.debug(f"Bootstrap re-drew {redraws} single-class resamples")
    ci_low, ci_high = np.percentile(samples, [2.5, 97.5])
    return BootstrapSummary(
        n=n,
        mean=float(samples.mean()),
        stdev=float(samples.std(ddof=1)) if n > 1 else 0.0,
        ci_low=float(ci_low),
        ci_high=float(ci_high),
        samples=samples.tolist(),
    )


def welch_test(samples_a: Sequence[float], samples_b: Sequence[float]) -> WelchResult:
    """
    Two-sided unequal-variance t-test

    Both variances zero: equal means give t = 0 and p = 1, different means
    give an infinite t and p = 0.

    Raises:
        ValueError: a sample has fewer than 2 values
    """
    a = np.asarray(samples_a, dtype=np.float64).reshape(-1)
    b = np.asarray(samples_b, dtype=np.float64).reshape(-1)
    if a.size < 2 or b.size < 2:
        raise ValueError(f"each sample needs at least 2 values, got {a.size} and {b.size}")

    mean_a, mean_b = float(a.mean()), float(b.mean())
    share_a = a.var(ddof=1) / a.size
    share_b = b.var(ddof=1) / b.size
    squared_error = share_a + share_b
    if squared_error == 0:
        df = float(a.size + b.size - 2)
        if mean_a == mean_b:
            return WelchResult(t=0.0, df=df, p_two_sided=1.0)
        return WelchResult(t=float(np.copysign(np.inf, mean_a - mean_b)), df=df, p_two_sided=0.0)

    t = (mean_a - mean_b) / np.sqrt(squared_error)
    df = squared_error ** 2 / (share_a ** 2 / (a.size - 1) + share_b ** 2 / (b.size - 1))
    p = betainc(0.5 * df, 0.5, df / (df + t * t))
    return WelchResult(t=float(t), df=float(df), p_two_sided=float(np.clip(p, 0.0, 1.0)))


def evaluate(scores, labels, n_bootstrap: int = DEFAULT_BOOTSTRAP, seed: int = 0) -> EvalReport:
    """AUC, Youden operating point, bootstrap summary and ROC points"""
    scores, labels = _check_binary(scores, labels)
    point = youden_point(scores, labels)
    report = EvalReport(
        auc=_auc(scores, labels),
        threshold=point.threshold,
        sensitivity=point.sensitivity,
        specificity=point.specificity,
        accuracy=point.accuracy,
        n_positive=int(labels.sum()),
        n_negative=int(len(labels) - labels.sum()),
        bootstrap=bootstrap_auc(scores, labels, n_bootstrap, seed),
        roc_points=roc_points(scores, labels),
    )
    logger.info(
        f"AUC {report.auc:.4f} (bootstrap {report.bootstrap.mean:.4f} +/- {report.bootstrap.stdev:.4f}), "
        f"sens {report.sensitivity:.3f}, spec {report.specificity:.3f}"
    )
    return report


def feature_class_statistics(table: pd.DataFrame, feature_columns: Optional[Sequence[str]] = None,
                             label_column: str = 'label') -> pd.DataFrame:
    """
    Per-feature class means and standard deviations with a Welch comparison

    Returns:
        DataFrame with columns feature, mean_benign, std_benign,
        mean_malignant, std_malignant, t, df, p_two_sided
    """
    if label_column not in table.columns:
        raise ValueError(f"table has no {label_column!r} column")
    if feature_columns is None:
        feature_columns = [c for c in table.columns if c not in ('id', label_column)]
    benign = table[table[label_column] == 0]
    malignant = table[table[label_column] == 1]

    rows = []
    for name in feature_columns:
        result = welch_test(malignant[name].to_numpy(), benign[name].to_numpy())
        rows.append({
            'feature': name,
            'mean_benign': float(benign[name].mean()),
            'std_benign': float(benign[name].std(ddof=1)),
            'mean_malignant': float(malignant[name].mean()),
            'std_malignant': float(malignant[name].std(ddof=1)),
            't': result.t,
            'df': result.df,
            'p_two_sided': result.p_two_sided,
        })
    return pd.DataFrame(rows, columns=[
        'feature', 'mean_benign', 'std_benign', 'mean_malignant', 'std_malignant', 't', 'df', 'p_two_sided',
    ])
