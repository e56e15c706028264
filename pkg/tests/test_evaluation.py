import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from phonalign.errors import LabelMismatchError
from phonalign.evaluation import (
    boundary_abs_errors,
    boundary_error_report,
    cdf_below,
    empirical_cdf,
    frame_metrics,
    summarize_errors,
    tolerance_table,
)
from phonalign.inventory import buckeye_folding
from phonalign.textgrid import AlignedTier, Interval

error_lists = st.lists(st.floats(0, 200, allow_nan=False), min_size=1, max_size=60)


def make_tier(labels, edges):
    return AlignedTier("p", tuple(Interval(l, a, b) for l, a, b in zip(labels, edges, edges[1:])))


class TestBoundaryErrors:
    def test_identical(self):
        t = make_tier("abc", [0, 0.1, 0.2, 0.3])
        assert boundary_abs_errors(t, t) == [0.0, 0.0]

    def test_uniform_shift(self):
        r = make_tier("abc", [0, 0.1, 0.2, 0.3])
        h = make_tier("abc", [0, 0.105, 0.205, 0.3])
        assert boundary_abs_errors(r, h) == pytest.approx([5.0, 5.0])

    def test_decimal_shift_not_below_itself(self, rng):
        edges = np.round(np.cumsum(rng.uniform(0.01, 0.3, size=40)), 3)
        r = make_tier(["x"] * 39, list(edges))
        h = make_tier(["x"] * 39, [edges[0]] + [e + 0.005 for e in edges[1:-1]] + [edges[-1]])
        errs = boundary_abs_errors(r, h)
        assert set(errs) == {5.0}
        assert tolerance_table(errs, [5, 10]) == [0.0, 100.0]

    def test_final_boundary_excluded(self):
        r = make_tier("ab", [0, 0.1, 0.3])
        h = make_tier("ab", [0, 0.1, 0.9])
        assert boundary_abs_errors(r, h) == [0.0]

    def test_mismatch(self):
        with pytest.raises(LabelMismatchError) as exc:
            boundary_abs_errors(make_tier("abc", [0, 1, 2, 3]), make_tier("abd", [0, 1, 2, 3]))
        assert exc.value.index == 2

    def test_length_mismatch(self):
        with pytest.raises(LabelMismatchError):
            boundary_abs_errors(make_tier("ab", [0, 1, 2]), make_tier("abc", [0, 1, 2, 3]))

    def test_folded_labels_match(self):
        r = make_tier(["aan", "tq"], [0, 1, 2])
        h = make_tier(["aa", "t"], [0, 1, 2])
        assert boundary_abs_errors(r, h, buckeye_folding()) == [0.0]


class TestSummaries:
    def test_odd(self):
        assert summarize_errors([1, 2, 9]) == (4.0, 2.0)

    def test_even_median(self):
        assert summarize_errors([1, 2, 3, 4])[1] == 2.5

    def test_single(self):
        assert summarize_errors([7]) == (7.0, 7.0)

    def test_empty(self):
        with pytest.raises(ValueError):
            summarize_errors([])

    @given(error_lists, st.randoms())
    def test_permutation_invariant(self, errs, rnd):
        shuffled = errs[:]
        rnd.shuffle(shuffled)
        a, b = summarize_errors(errs), summarize_errors(shuffled)
        assert a[1] == b[1]
        assert a[0] == pytest.approx(b[0], rel=1e-12, abs=1e-12)


class TestTolerance:
    def test_example(self):
        assert tolerance_table([5, 15, 30], [10, 20]) == [33.33, 66.67]

    def test_all_zero(self):
        assert tolerance_table([0, 0, 0]) == [100.0] * 5

    def test_strict(self):
        assert tolerance_table([10.0], [10]) == [0.0]

    def test_empty(self):
        with pytest.raises(ValueError):
            tolerance_table([], [10])

    def test_unsorted_thresholds(self):
        with pytest.raises(ValueError):
            tolerance_table([1.0], [20, 10])

    @given(error_lists)
    def test_matches_cdf_left_limit(self, errs):
        th = [10, 20, 25, 50, 100]
        cdf = empirical_cdf(errs)
        assert tolerance_table(errs, th) == [round(100 * cdf_below(cdf, t), 2) for t in th]

    @given(error_lists)
    def test_monotone(self, errs):
        assert np.all(np.diff(tolerance_table(errs, [1, 5, 10, 50, 150, 250])) >= 0)


class TestCDF:
    def test_example(self):
        assert empirical_cdf([1, 1, 3]) == [(1.0, pytest.approx(2 / 3)), (3.0, 1.0)]

    def test_singleton(self):
        assert empirical_cdf([5]) == [(5.0, 1.0)]

    @given(error_lists)
    def test_step_function(self, errs):
        cdf = empirical_cdf(errs)
        xs, fs = zip(*cdf)
        assert list(xs) == sorted(set(xs))
        assert np.all(np.diff(fs) > 0)
        assert fs[-1] == 1.0

    def test_empty(self):
        with pytest.raises(ValueError):
            empirical_cdf([])


class TestReport:
    def test_outputs(self, tmp_path):
        rep = boundary_error_report([5.0, 15.0, 30.0], [10, 20])
        rep.write(tmp_path / "t.tsv", tmp_path / "c.csv", tmp_path / "s.json")
        assert (tmp_path / "t.tsv").read_text().splitlines() == [
            "threshold_ms\tpercent", "10.000000\t33.330000", "20.000000\t66.670000",
        ]
        assert (tmp_path / "c.csv").read_text().splitlines()[1] == "5.000000,0.333333"
        summary = json.loads((tmp_path / "s.json").read_text())
        assert summary["mean_ms"] == pytest.approx(50 / 3, abs=1e-6)
        assert summary["median_ms"] == 15.0
        assert summary["tolerances"] == {"10": 33.33, "20": 66.67}


class TestFrameMetrics:
    def test_perfect(self):
        y = np.array([[1, 0], [0, 1]])
        r = frame_metrics(y, y)
        assert (r.sensitivity, r.specificity, r.balanced_accuracy) == (1, 1, 1)

    def test_counts(self):
        true = np.array([1, 1, 1, 1, 0, 0, 0, 0])
        pred = np.array([1, 1, 1, 0, 0, 0, 1, 1])
        r = frame_metrics(pred, true)
        assert (r.tp, r.fn, r.tn, r.fp) == (3, 1, 2, 2)
        assert r.sensitivity == 0.75 and r.specificity == 0.5 and r.balanced_accuracy == 0.625

    def test_balanced_definition(self):
        # 4 of 5 positives tagged, 3 of 5 negatives untagged
        true = np.array([1] * 5 + [0] * 5)
        pred = np.array([1, 1, 1, 1, 0, 0, 0, 0, 1, 1])
        assert frame_metrics(pred, true).balanced_accuracy == pytest.approx(0.7)

    def test_threshold_on_probabilities(self):
        r = frame_metrics(np.array([0.9, 0.4, 0.6, 0.1]), np.array([1, 1, 0, 0]), threshold=0.5)
        assert (r.tp, r.fn, r.fp, r.tn) == (1, 1, 1, 1)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            frame_metrics(np.zeros((2, 3)), np.zeros((3, 2)))

    def test_row_permutation_invariant(self, rng):
        for _ in range(20):
            true = rng.integers(0, 2, size=(6, 15))
            true[0, 0], true[0, 1] = 0, 1
            pred = rng.random((6, 15))
            perm = rng.permutation(6)
            assert frame_metrics(pred, true) == frame_metrics(pred[perm], true[perm])
