"""
Scoring alignments against a reference
======================================

Boundary errors, the tolerance table and the CDF it is a sample of,
plus frame-level tagging metrics.
"""

import numpy as np

from phonalign import AlignedTier, Interval
from phonalign.evaluation import (
    boundary_abs_errors,
    boundary_error_report,
    empirical_cdf,
    frame_metrics,
)


def tier(labels, edges):
    return AlignedTier("phones", tuple(Interval(l, a, b) for l, a, b in zip(labels, edges, edges[1:])))


ref = tier(["sil", "k", "ae", "t", "sil"], [0, 0.12, 0.19, 0.31, 0.38, 0.6])
hyp = tier(["sil", "k", "ae", "t", "sil"], [0, 0.125, 0.18, 0.335, 0.381, 0.6])

errs = boundary_abs_errors(ref, hyp)
print("errors (ms):", np.round(errs, 3))

report = boundary_error_report(errs)
print(report.tolerance_tsv())
print("CDF:", [(round(x, 1), round(f, 2)) for x, f in empirical_cdf(errs)])

###############################################################################
# Tagging metrics treat every (frame, class) cell as one decision.

rng = np.random.default_rng(0)
truth = (rng.random((5, 40)) < 0.2).astype(int)
probs = np.clip(truth * 0.7 + rng.normal(0.1, 0.2, truth.shape), 0, 1)
m = frame_metrics(probs, truth)
print(f"sensitivity {m.sensitivity:.3f}  specificity {m.specificity:.3f}  "
      f"balanced accuracy {m.balanced_accuracy:.3f}")
