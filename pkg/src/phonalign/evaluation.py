"""Boundary-error and frame-tagging metrics.

Boundary errors are absolute differences, in milliseconds, between
positionally paired interior boundaries of a reference and a hypothesis
tier.  The utterance-final boundary is excluded because it is fixed to
the file duration rather than predicted.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import LabelMismatchError
from .inventory import FoldingTable, fold_label
from .textgrid import AlignedTier

__all__ = [
    "DEFAULT_TOLERANCES",
    "BoundaryErrorReport",
    "FrameMetricReport",
    "boundary_abs_errors",
    "summarize_errors",
    "tolerance_table",
    "empirical_cdf",
    "cdf_below",
    "boundary_error_report",
    "frame_metrics",
]

DEFAULT_TOLERANCES = (10.0, 20.0, 25.0, 50.0, 100.0)
ERROR_DECIMALS = 6  # ms


def _errors(errors):
    e = np.asarray(errors, dtype=float).ravel()
    if e.size == 0:
        raise ValueError("error list is empty")
    if np.any(e < 0) or not np.all(np.isfinite(e)):
        raise ValueError("errors must be finite and non-negative")
    return e


def boundary_abs_errors(
    ref: AlignedTier, hyp: AlignedTier, folding: FoldingTable | None = None
) -> list[float]:
    """``1000 * |ref - hyp|`` for each interior boundary, in milliseconds.

    Errors are rounded to 1e-6 ms.  TextGrid times are decimal, and
    without the rounding a 5 ms shift could come out as 4.9999999999 ms
    and land on the wrong side of a 5 ms threshold.

    Labels are compared after folding; any difference in the label
    sequences raises :class:`LabelMismatchError` naming the first one.
    """
    rl = [fold_label(x, folding) for x in ref.labels]
    hl = [fold_label(x, folding) for x in hyp.labels]
    for idx, (a, b) in enumerate(zip(rl, hl)):
        if a != b:
            raise LabelMismatchError(
                f"label mismatch at segment {idx}: ref {a!r} vs hyp {b!r}", idx
            )
    if len(rl) != len(hl):
        idx = min(len(rl), len(hl))
        raise LabelMismatchError(
            f"segment counts differ ({len(rl)} vs {len(hl)}); first unmatched segment {idx}",
            idx,
        )
    r = np.asarray(ref.boundaries, dtype=float)
    h = np.asarray(hyp.boundaries, dtype=float)
    return [float(x) for x in np.round(1000.0 * np.abs(r - h), ERROR_DECIMALS)]


def summarize_errors(errors) -> tuple[float, float]:
    """(mean, median); the median of an even count averages the middle pair."""
    e = _errors(errors)
    return float(np.mean(e)), float(np.median(e))


def tolerance_table(errors, thresholds: Sequence[float] = DEFAULT_TOLERANCES) -> list[float]:
    """Percent of errors strictly below each threshold, rounded to 2 decimals."""
    e = _errors(errors)
    th = np.asarray(thresholds, dtype=float)
    if np.any(th <= 0) or np.any(np.diff(th) < 0):
        raise ValueError("thresholds must be positive and sorted")
    return [round(100.0 * np.count_nonzero(e < t) / e.size, 2) for t in th]


def empirical_cdf(errors) -> list[tuple[float, float]]:
    """Step points ``(x, F(x))`` at each distinct error value, F right-continuous."""
    e = np.sort(_errors(errors))
    xs, counts = np.unique(e, return_counts=True)
    F = np.cumsum(counts) / e.size
    F[-1] = 1.0
    return [(float(x), float(f)) for x, f in zip(xs, F)]


def cdf_below(cdf: Sequence[tuple[float, float]], x: float) -> float:
    """Left limit ``F(x-)`` of a step CDF, i.e. the fraction of errors < x."""
    value = 0.0
    for xi, fi in cdf:
        if xi >= x:
            break
        value = fi
    return value


@dataclass(frozen=True)
class BoundaryErrorReport:
    abs_errors: tuple[float, ...]
    mean_ms: float
    median_ms: float
    tolerance_rows: tuple[tuple[float, float], ...]
    cdf: tuple[tuple[float, float], ...]

    @property
    def count(self) -> int:
        return len(self.abs_errors)

    def tolerance_tsv(self) -> str:
        lines = ["threshold_ms\tpercent"]
        lines += [f"{t:.6f}\t{p:.6f}" for t, p in self.tolerance_rows]
        return "\n".join(lines) + "\n"

    def cdf_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["error_ms", "cumulative_fraction"])
        for x, f in self.cdf:
            w.writerow([f"{x:.6f}", f"{f:.6f}"])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "count": self.count,
            "mean_ms": round(self.mean_ms, 6),
            "median_ms": round(self.median_ms, 6),
            "tolerances": {f"{t:g}": round(p, 6) for t, p in self.tolerance_rows},
        }

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True) + "\n"

    def write(self, tsv=None, cdf_csv=None, json_path=None) -> None:
        for path, text in ((tsv, self.tolerance_tsv), (cdf_csv, self.cdf_csv), (json_path, self.summary_json)):
            if path is not None:
                Path(path).write_text(text(), encoding="utf-8")


def boundary_error_report(
    errors, thresholds: Sequence[float] = DEFAULT_TOLERANCES
) -> BoundaryErrorReport:
    e = _errors(errors)
    mean, median = summarize_errors(e)
    pct = tolerance_table(e, thresholds)
    return BoundaryErrorReport(
        tuple(float(x) for x in e),
        mean,
        median,
        tuple(zip((float(t) for t in thresholds), pct)),
        tuple(empirical_cdf(e)),
    )


@dataclass(frozen=True)
class FrameMetricReport:
    sensitivity: float
    specificity: float
    balanced_accuracy: float
    tp: int
    tn: int
    fp: int
    fn: int


def frame_metrics(pred_tags, true_tags, threshold: float = 0.5) -> FrameMetricReport:
    """Sensitivity, specificity and balanced accuracy pooled over all frame-label cells.

    ``pred_tags`` may hold probabilities; a cell counts as tagged when
    its value exceeds ``threshold``.  ``true_tags`` must be 0/1.
    """
    pred = np.asarray(pred_tags, dtype=float)
    true = np.asarray(true_tags)
    if pred.shape != true.shape:
        raise ValueError(f"shape mismatch: {pred.shape} vs {true.shape}")
    if not 0 < threshold < 1:
        raise ValueError("threshold must be in (0, 1)")
    if not np.all((true == 0) | (true == 1)):
        raise ValueError("true tags must be 0/1")
    p = pred > threshold
    t = true.astype(bool)
    tp = int(np.count_nonzero(p & t))
    tn = int(np.count_nonzero(~p & ~t))
    fp = int(np.count_nonzero(p & ~t))
    fn = int(np.count_nonzero(~p & t))
    if tp + fn == 0 or tn + fp == 0:
        raise ValueError("need at least one positive and one negative cell")
    sens = tp / (tp + fn)
    specificity = tn / (tn + fp)
    return FrameMetricReport(sens, specificity, (sens + specificity) / 2, tp, tn, fp, fn)
