import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_force_decode, enumerate_segmentations
from phonalign.decoder import (
    COST_CEILING,
    Posteriorgram,
    boundary_time,
    cost_matrix,
    decode,
    interpolate_crossing,
    parse_posteriorgram,
    path_cost,
    read_posteriorgram,
    refine_boundaries,
    write_posteriorgram,
)
from phonalign.errors import InfeasibleAlignmentError, ParseError
from phonalign.features import FeatureConfig
from phonalign.inventory import PhoneSet

EXAMPLE_O = np.array([[0.1, 1.0, 1.0], [1.0, 0.1, 0.1]])


def random_instance(rng):
    k = int(rng.integers(2, 6))
    T = int(rng.integers(1, 9))
    n = int(rng.integers(1, min(4, T) + 1))
    P = rng.dirichlet(np.ones(k), size=T).T
    s = rng.integers(0, k, size=n)
    return cost_matrix(P), s


def assert_valid_path(path, n, T):
    assert len(path) == T
    assert path[0] == 0 and path[-1] == n - 1
    steps = np.diff(path)
    assert np.all((steps == 0) | (steps == 1))
    assert set(path.tolist()) == set(range(n))


class TestOracle:
    def test_enumeration_counts(self):
        assert sum(1 for _ in enumerate_segmentations(8, 4)) == math.comb(7, 3)

    def test_example_by_hand(self):
        best, paths = brute_force_decode(EXAMPLE_O, [0, 1])
        assert best == pytest.approx(0.3)
        assert [p.tolist() for p in paths] == [[0, 1, 1]]


class TestDecode:
    def test_example(self):
        path, costs = decode(EXAMPLE_O, [0, 1])
        assert path.tolist() == [0, 1, 1]
        assert costs.total == pytest.approx(0.3, abs=1e-12)

    def test_single_symbol(self, rng):
        O = rng.uniform(0, 5, size=(3, 6))
        path, _ = decode(O, [2])
        assert path.tolist() == [0] * 6

    def test_n_equals_T(self, rng):
        O = rng.uniform(0, 5, size=(3, 4))
        path, _ = decode(O, [0, 2, 1, 0])
        assert path.tolist() == [0, 1, 2, 3]

    def test_infeasible(self):
        with pytest.raises(InfeasibleAlignmentError):
            decode(np.zeros((2, 2)), [0, 1, 0])

    def test_empty(self):
        with pytest.raises(ValueError):
            decode(np.zeros((2, 2)), [])

    def test_padding(self):
        _, costs = decode(EXAMPLE_O, [0, 1])
        M = costs.M
        assert M.shape == (3, 4)
        assert M[0, 0] == 0
        assert np.all(np.isinf(M[0, 1:])) and np.all(np.isinf(M[1:, 0]))

    def test_tie_stays_on_current_symbol(self):
        # frames 1 and 2 are equally good for either symbol: both splits cost 0
        O = np.zeros((2, 3))
        path, _ = decode(O, [0, 1])
        # backtracking from the end stays on symbol 1 as long as it can
        assert path.tolist() == [0, 1, 1]

    def test_optimal_on_random_instances(self, rng):
        for _ in range(200):
            O, s = random_instance(rng)
            path, costs = decode(O, s)
            best, optimal = brute_force_decode(O, s)
            assert abs(costs.total - best) <= 1e-9
            assert abs(path_cost(O, s, path) - best) <= 1e-9
            assert_valid_path(path, len(s), O.shape[1])
            assert any(np.array_equal(path, p) for p in optimal)

    def test_ceiling_invariance(self, rng):
        for ceiling in (COST_CEILING, 50.0):
            for _ in range(20):
                P = rng.dirichlet(np.ones(4), size=8).T
                P[rng.random(P.shape) < 0.3] = 0.0
                s = rng.integers(0, 4, size=3)
                tiny = P.copy()
                tiny[P == 0] = math.exp(-ceiling) * rng.uniform(0, 1)
                a, ca = decode(cost_matrix(P, ceiling), s)
                b, cb = decode(cost_matrix(tiny, ceiling), s)
                assert np.array_equal(a, b)
                assert ca.total == cb.total


class TestCostMatrix:
    def test_abs_log(self):
        np.testing.assert_allclose(cost_matrix(np.array([[1.0, 0.5]])), [[0.0, math.log(2)]])

    def test_zero_is_ceiling(self):
        assert cost_matrix(np.array([[0.0]]))[0, 0] == COST_CEILING
        assert np.isfinite(cost_matrix(np.zeros((2, 2)))).all()


class TestBoundaryTime:
    def test_first_frame(self):
        assert boundary_time(1) == pytest.approx(0.025, abs=1e-12)

    def test_tenth_frame(self):
        assert boundary_time(10) == pytest.approx(0.115, abs=1e-12)

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            boundary_time(0)

    def test_general_config(self):
        assert boundary_time(3, window=0.020, step=0.005) == pytest.approx(0.030)


class TestInterpolateCrossing:
    def test_symmetric(self):
        assert interpolate_crossing([[1, 0], [0, 1]]) == 0.5

    def test_two_thirds(self):
        assert interpolate_crossing([[2, 0], [0, 1]]) == pytest.approx(2 / 3, abs=1e-15)

    def test_parallel(self):
        assert interpolate_crossing([[1, 0], [2, 1]]) is None

    def test_outside_unit_interval(self):
        assert interpolate_crossing([[0, 1], [2, 4]]) is None

    def test_non_finite(self):
        assert interpolate_crossing([[0.1, 1.1], [np.inf, 0.2]]) is None

    @given(st.lists(st.floats(-50, 50), min_size=4, max_size=4))
    def test_result_solves_the_system(self, vals):
        A = np.array(vals).reshape(2, 2)
        chi = interpolate_crossing(A)
        if chi is None:
            return
        d = A[:, 1] - A[:, 0]
        y1, y2 = A[0, 0] + d[0] * chi, A[1, 0] + d[1] * chi
        assert 0 <= chi <= 1
        assert y1 == pytest.approx(y2, abs=1e-9 * (1 + abs(A).max()))


class TestRefineBoundaries:
    def test_no_interpolation(self):
        path, costs = decode(EXAMPLE_O, [0, 1])
        b = refine_boundaries(path, costs, duration=0.045)
        assert b.interior == pytest.approx((0.025,))
        assert b.times[-1] == 0.045

    def test_interpolated_block(self):
        # transition after frame 1; M block rows {0,1} x frames {1,2} is [[1,0],[0,1]]
        path = np.array([0, 1, 1])
        M = np.full((3, 4), np.inf)
        M[0, 0] = 0
        M[1:3, 1:3] = [[1.0, 0.0], [0.0, 1.0]]
        from phonalign.decoder import CostMatrix

        b = refine_boundaries(path, CostMatrix(EXAMPLE_O, M, (0, 1)), interpolation=True)
        assert b.interior == pytest.approx((0.030,), abs=1e-12)
        assert b.offsets == (0.5,)

    def test_parallel_keeps_base(self):
        path = np.array([0, 1, 1])
        M = np.full((3, 4), np.inf)
        M[1:3, 1:3] = [[1.0, 0.0], [2.0, 1.0]]
        from phonalign.decoder import CostMatrix

        b = refine_boundaries(path, CostMatrix(EXAMPLE_O, M, (0, 1)), interpolation=True)
        assert b.interior == pytest.approx((0.025,))
        assert b.offsets == (None,)

    def test_decoded_example_with_interpolation(self):
        # the first segment is a single frame, so M[next, t] is unreachable (inf)
        path, costs = decode(EXAMPLE_O, [0, 1])
        b = refine_boundaries(path, costs, interpolation=True)
        assert b.interior == pytest.approx((0.025,))

    def test_o_source(self):
        path, costs = decode(EXAMPLE_O, [0, 1])
        b = refine_boundaries(path, costs, interpolation=True, source="O")
        # O block rows {0,1} x frames {1,2}: [[0.1, 1.0], [1.0, 0.1]] crosses at 0.5
        assert b.offsets == (0.5,)
        assert b.interior == pytest.approx((0.030,))

    def test_disabled_reproduces_formula(self, rng):
        for _ in range(50):
            O, s = random_instance(rng)
            path, costs = decode(O, s)
            b = refine_boundaries(path, costs)
            frames = np.flatnonzero(np.diff(path)) + 1
            assert b.interior == tuple(boundary_time(int(i)) for i in frames)

    def test_strictly_increasing_with_interpolation(self, rng):
        for _ in range(300):
            k, T = 4, int(rng.integers(2, 30))
            n = int(rng.integers(1, min(8, T) + 1))
            P = rng.dirichlet(np.ones(k) * 0.3, size=T).T
            path, costs = decode(cost_matrix(P), rng.integers(0, k, size=n))
            b = refine_boundaries(path, costs, interpolation=True)
            assert np.all(np.diff(b.times) > 0)
            assert all(0 <= t <= b.times[-1] for t in b.times)

    def test_clamped_to_duration(self):
        path, costs = decode(EXAMPLE_O, [0, 1])
        b = refine_boundaries(path, costs, duration=0.02)
        assert b.interior == (0.02,) and b.clamped == 1

    def test_config_step(self):
        path, costs = decode(EXAMPLE_O, [0, 1])
        b = refine_boundaries(path, costs, FeatureConfig(window_length=0.02, frame_step=0.005))
        assert b.interior == pytest.approx((0.020,))


class TestPosteriorgramFile:
    def test_round_trip(self, tmp_path, rng):
        for trial in range(50):
            k, T = int(rng.integers(1, 6)), int(rng.integers(1, 20))
            P = rng.dirichlet(np.ones(k), size=T).T
            pg = Posteriorgram(P, PhoneSet(tuple(f"s{i}" for i in range(k))))
            write_posteriorgram(pg, tmp_path / "x.pgram")
            back = read_posteriorgram(tmp_path / "x.pgram")
            assert back.phone_set == pg.phone_set
            np.testing.assert_allclose(back.probs, P, rtol=0, atol=1e-9)

    def test_format(self):
        text = "PGRAM1\n2 1\na b\n0.25 0.75\n"
        pg = parse_posteriorgram(text)
        assert pg.phone_set.symbols == ("a", "b")
        assert pg.probs[:, 0].tolist() == [0.25, 0.75]

    @pytest.mark.parametrize(
        "text",
        [
            "PGRAM2\n1 1\na\n1\n",
            "PGRAM1\n2 1\na b\nnan 0.5\n",
            "PGRAM1\n2 1\na b\n-0.1 1.0\n",
            "PGRAM1\n2 2\na b\n0.5 0.5\n",
            "PGRAM1\n2 1\na\n0.5 0.5\n",
        ],
    )
    def test_rejects(self, text):
        with pytest.raises(ParseError):
            parse_posteriorgram(text)

    def test_softmax_mode_checks_columns(self):
        with pytest.raises(ValueError):
            Posteriorgram(np.array([[0.5], [0.1]]), PhoneSet(("a", "b")), "softmax")
