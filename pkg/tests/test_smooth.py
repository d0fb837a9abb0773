"""Ball-minimum entropy construction, budget allocation, truncations."""

import math

import numpy as np
import pytest

from resolvkit import (
    FiniteDist,
    MixedSourceSpec,
    allocate_budget,
    allocate_budget_grid,
    ball_members,
    ball_sample_stats,
    entropy,
    mixture,
    smooth_min_entropy_dist,
    split_smooth_entropy_grid,
    truncate_components,
    variational_distance,
)
from resolvkit.smooth import _h_delta_many, _sorted_tables

# 2 log2(e) / e: the entropy overshoot of the shared-pivot truncation
TRUNCATION_SLACK_BITS = 2.0 * math.log2(math.e) / math.e


def random_dist(rng, size):
    return FiniteDist(rng.dirichlet(np.ones(size)))


class TestConstruction:
    def test_ternary_example(self):
        # oracle: hand evaluation — pivot at rank 2, trim 0.25 - 0.2 = 0.05
        res = smooth_min_entropy_dist(FiniteDist([0.5, 0.3, 0.2]), 0.25)
        assert np.allclose(res.v_delta.probs, [0.75, 0.25, 0.0], atol=1e-12)
        assert res.j_star == 2
        assert abs(res.epsilon - 0.05) <= 1e-12
        assert abs(res.h_bits - 0.8112781244591328) <= 1e-12

    def test_zero_budget_is_identity(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            p = random_dist(rng, int(rng.integers(2, 8)))
            res = smooth_min_entropy_dist(p, 0.0)
            assert np.allclose(res.v_delta.probs, p.probs, atol=1e-12)
            assert abs(res.h_bits - entropy(p)) <= 1e-12

    def test_uniform_four_example(self):
        # oracle: ties broken by index; tail atom removed, budget onto the top
        res = smooth_min_entropy_dist(FiniteDist([0.25] * 4), 0.25)
        assert np.allclose(res.v_delta.probs, [0.5, 0.25, 0.25, 0.0], atol=1e-12)
        assert res.j_star == 3
        assert res.epsilon == 0.0
        assert abs(res.h_bits - 1.5) <= 1e-12

    def test_full_budget_collapses_to_point_mass(self):
        res = smooth_min_entropy_dist(FiniteDist([0.6, 0.4]), 0.5)
        assert np.allclose(res.v_delta.probs, [1.0, 0.0], atol=1e-12)
        assert res.h_bits == 0.0

    def test_rejects_bad_delta(self):
        p = FiniteDist([0.5, 0.5])
        with pytest.raises(ValueError):
            smooth_min_entropy_dist(p, 1.0)
        with pytest.raises(ValueError):
            smooth_min_entropy_dist(p, -0.1)

    def test_pivot_and_residual_invariants(self):
        rng = np.random.default_rng(29)
        for _ in range(300):
            p = random_dist(rng, int(rng.integers(2, 9)))
            delta = float(rng.uniform(0.0, 0.99))
            res = smooth_min_entropy_dist(p, delta)
            srt = np.sort(p.probs)[::-1]
            cum = np.cumsum(srt)
            jj = res.j_star - 1
            if jj > 0:
                assert cum[jj - 1] < 1.0 - delta + 1e-9
            assert cum[jj] >= 1.0 - delta - 1e-9
            assert -1e-12 <= res.epsilon <= srt[jj] + 1e-12

    def test_monotone_in_delta(self):
        rng = np.random.default_rng(31)
        for _ in range(500):
            p = random_dist(rng, int(rng.integers(2, 8)))
            d1, d2 = sorted(rng.uniform(0.0, 0.99, size=2))
            h1 = smooth_min_entropy_dist(p, float(d1)).h_bits
            h2 = smooth_min_entropy_dist(p, float(d2)).h_bits
            assert h1 >= h2 - 1e-12

    def test_feasibility_and_equality(self):
        rng = np.random.default_rng(37)
        for _ in range(300):
            p = random_dist(rng, int(rng.integers(2, 8)))
            delta = float(rng.uniform(0.0, 0.99))
            res = smooth_min_entropy_dist(p, delta)
            d = variational_distance(p, res.v_delta)
            assert d <= delta + 1e-12
            if delta <= 1.0 - p.probs.max():
                assert abs(d - delta) <= 1e-9

    def test_sampled_ball_minimality_and_majorization(self):
        rng = np.random.default_rng(41)
        for _ in range(50):
            p = random_dist(rng, int(rng.integers(2, 6)))
            delta = float(rng.uniform(0.0, 0.9))
            res = smooth_min_entropy_dist(p, delta)
            samples = ball_members(p, delta, 1000, rng)
            dists = 0.5 * np.abs(samples - p.probs).sum(axis=1)
            assert dists.max() <= delta + 1e-12
            min_h, max_gap = ball_sample_stats(res, samples)
            assert min_h >= res.h_bits - 1e-9
            assert max_gap <= 1e-9


class TestFastEvaluator:
    def test_matches_full_construction(self):
        rng = np.random.default_rng(43)
        for _ in range(200):
            p = random_dist(rng, int(rng.integers(2, 10)))
            srt, cum, cum_ent = _sorted_tables(p)
            deltas = np.append(rng.uniform(0.0, 0.999, size=8), [0.0, 1.0])
            fast = _h_delta_many(srt, cum, cum_ent, deltas)
            for d, h in zip(deltas, fast):
                if d >= 1.0:
                    assert h == 0.0
                else:
                    assert abs(h - smooth_min_entropy_dist(p, float(d)).h_bits) <= 1e-10


class TestAllocation:
    def test_two_component_example(self):
        # oracle: budget 0.1 all on the first component: 0.1/0.3 of its ball
        res = allocate_budget([1.0, 0.5], [0.3, 0.7], 0.1)
        assert np.allclose(res.deltas, [1.0 / 3.0, 0.0], atol=1e-12)
        assert res.active_index == 1
        assert abs(res.objective - 0.55) <= 1e-12

    def test_zero_budget(self):
        res = allocate_budget([1.0, 0.5], [0.3, 0.7], 0.0)
        assert np.allclose(res.deltas, [0.0, 0.0])
        assert abs(res.objective - (0.3 * 1.0 + 0.7 * 0.5)) <= 1e-12

    def test_second_pivot_example(self):
        # oracle: 0.4 exceeds the first weight 0.3; remainder 0.1/0.7 at the second
        res = allocate_budget([1.0, 0.5], [0.3, 0.7], 0.4)
        assert np.allclose(res.deltas, [1.0, 0.1 / 0.7], atol=1e-12)
        assert res.active_index == 2
        assert abs(res.objective - 0.3) <= 1e-12

    def test_unsorted_input_is_sorted_internally(self):
        res = allocate_budget([0.5, 1.0], [0.7, 0.3], 0.1)
        assert abs(res.objective - 0.55) <= 1e-12
        assert list(res.order) == [1, 0]

    def test_invariants(self):
        rng = np.random.default_rng(47)
        for _ in range(300):
            k = int(rng.integers(1, 6))
            ent = rng.uniform(0.0, 4.0, size=k)
            weights = rng.dirichlet(np.ones(k))
            delta = float(rng.uniform(0.0, 0.999))
            res = allocate_budget(ent, weights, delta)
            w_sorted = weights[res.order]
            assert abs(float(np.dot(w_sorted, res.deltas)) - delta) <= 1e-12
            ii = res.active_index - 1
            assert np.all(res.deltas[:ii] == 1.0)
            assert np.all(res.deltas[ii + 1:] == 0.0)
            assert np.all(res.deltas >= 0.0) and np.all(res.deltas <= 1.0 + 1e-12)

    def test_rejects_bad_weights(self):
        with pytest.raises(ValueError):
            allocate_budget([1.0, 0.5], [0.4, 0.4], 0.1)

    def test_greedy_beats_grid_up_to_resolution(self):
        rng = np.random.default_rng(53)
        for _ in range(60):
            k = int(rng.integers(2, 4))
            ent = np.sort(rng.uniform(0.1, 4.0, size=k))[::-1]
            weights = rng.dirichlet(np.ones(k))
            delta = float(rng.uniform(0.0, 0.95))
            greedy = allocate_budget(ent, weights, delta).objective
            grid = allocate_budget_grid(ent, weights, delta, step=1e-3)
            assert greedy <= grid + 1e-3 * ent.max() + 1e-12

    def test_exact_grid_match_when_remainder_component_is_active(self):
        # active component last: the remainder slot lands on the exact optimum
        ent = [2.0, 1.0]
        weights = [0.25, 0.75]
        delta = 0.45  # pivot at the second component
        greedy = allocate_budget(ent, weights, delta).objective
        grid = allocate_budget_grid(ent, weights, delta, step=1e-3)
        assert abs(greedy - grid) <= 1e-9


class TestSplitGrid:
    def test_single_component(self):
        p = FiniteDist([0.5, 0.3, 0.2])
        got = split_smooth_entropy_grid([p], [1.0], 0.25, 1e-3)
        assert abs(got - smooth_min_entropy_dist(p, 0.25).h_bits) <= 1e-12

    def test_identical_components_bounded_by_common_value(self):
        # With identical components the equal split reproduces the common
        # ball value; the grid may do strictly better by splitting the
        # budget unevenly, so the common value is only an upper bound.
        p = FiniteDist([0.5, 0.5])
        common = smooth_min_entropy_dist(p, 0.25).h_bits
        got = split_smooth_entropy_grid([p, p], [0.5, 0.5], 0.25, 1e-3)
        assert got <= common + 1e-9

    def test_oracle_below_equal_split(self):
        a = FiniteDist([0.5, 0.5])
        b = FiniteDist([0.9, 0.1])
        got = split_smooth_entropy_grid([a, b], [0.5, 0.5], 0.2, 1e-3)
        equal_split = 0.5 * smooth_min_entropy_dist(a, 0.2).h_bits \
            + 0.5 * smooth_min_entropy_dist(b, 0.2).h_bits
        assert got <= equal_split + 1e-12

    def test_three_components_and_caps(self):
        rng = np.random.default_rng(59)
        comps = [random_dist(rng, 4) for _ in range(3)]
        value = split_smooth_entropy_grid(comps, [0.2, 0.3, 0.5], 0.3, 0.02)
        assert 0.0 <= value <= max(entropy(c) for c in comps)
        with pytest.raises(ValueError):
            split_smooth_entropy_grid([random_dist(rng, 3) for _ in range(4)],
                                      [0.25] * 4, 0.3, 0.02)
        with pytest.raises(ValueError):
            split_smooth_entropy_grid(comps, [0.2, 0.3, 0.5], 0.3, 0.5)


class TestTruncation:
    def make_spec(self):
        return MixedSourceSpec(
            (FiniteDist([0.4, 0.35, 0.15, 0.1]), FiniteDist([0.1, 0.2, 0.3, 0.4])),
            np.array([0.6, 0.4]),
        )

    def test_zero_budget_keeps_components(self):
        spec = self.make_spec()
        res = truncate_components(spec, 0.0)
        mixed = mixture(spec)
        assert res.j_star == mixed.alphabet_size
        comps = spec.materialized()
        for comp, v, eta in zip(comps, res.v_components, res.etas):
            assert np.allclose(v.probs, comp.probs, atol=1e-12)
            pivot_original = res.sort_perm[res.j_star - 1]
            assert abs(eta - comp.probs[pivot_original]) <= 1e-12

    def test_weighted_truncations_recombine(self):
        spec = self.make_spec()
        res = truncate_components(spec, 0.2)
        recombined = sum(w * v.probs for w, v in zip(spec.weights, res.v_components))
        assert np.max(np.abs(recombined - res.v_mixture.probs)) <= 1e-12

    def test_average_distance_is_mixture_tail(self):
        spec = self.make_spec()
        for delta in (0.1, 0.2, 0.35, 0.6):
            res = truncate_components(spec, delta)
            mixed = mixture(spec)
            srt = mixed.probs[res.sort_perm]
            tail = float(srt[res.j_star:].sum())
            comps = spec.materialized()
            avg = sum(w * variational_distance(c, v)
                      for w, c, v in zip(spec.weights, comps, res.v_components))
            assert abs(avg - tail) <= 1e-12
            assert avg <= delta + 1e-12

    def test_entropy_overshoot_bound(self):
        # mixture truncation entropy exceeds the ball minimum by < 1.0615 bits
        rng = np.random.default_rng(61)
        for _ in range(100):
            k = int(rng.integers(1, 4))
            size = int(rng.integers(2, 7))
            spec = MixedSourceSpec(tuple(random_dist(rng, size) for _ in range(k)),
                                   rng.dirichlet(np.ones(k)))
            delta = float(rng.uniform(0.0, 0.9))
            res = truncate_components(spec, delta)
            h_ball = smooth_min_entropy_dist(mixture(spec), delta).h_bits
            assert entropy(res.v_mixture) <= h_ball + TRUNCATION_SLACK_BITS + 1e-9

    def test_inequality_chain(self):
        # mixture truncation entropy >= weighted component truncation
        # entropies >= weighted per-component ball minima at the realized
        # distances >= the split grid oracle (up to grid resolution)
        rng = np.random.default_rng(67)
        for _ in range(40):
            k = int(rng.integers(2, 4))
            size = int(rng.integers(3, 6))
            spec = MixedSourceSpec(tuple(random_dist(rng, size) for _ in range(k)),
                                   rng.dirichlet(np.ones(k)))
            delta = float(rng.uniform(0.05, 0.7))
            res = truncate_components(spec, delta)
            comps = spec.materialized()
            weighted = sum(w * entropy(v) for w, v in zip(spec.weights, res.v_components))
            assert entropy(res.v_mixture) >= weighted - 1e-9
            realized = sum(
                w * smooth_min_entropy_dist(c, min(variational_distance(c, v), 0.999)).h_bits
                for w, c, v in zip(spec.weights, comps, res.v_components))
            assert weighted >= realized - 1e-9
            if k <= 3:
                oracle = split_smooth_entropy_grid(comps, spec.weights, delta, 5e-3)
                assert realized >= oracle - 0.05


class TestBallSampler:
    def test_members_stay_in_ball(self):
        rng = np.random.default_rng(71)
        p = FiniteDist([0.4, 0.3, 0.2, 0.1])
        samples = ball_members(p, 0.3, 500, rng)
        dists = 0.5 * np.abs(samples - p.probs).sum(axis=1)
        assert dists.max() <= 0.3 + 1e-12
        assert np.allclose(samples.sum(axis=1), 1.0, atol=1e-9)
        assert samples.min() >= -1e-12

    def test_zero_radius(self):
        rng = np.random.default_rng(73)
        p = FiniteDist([0.6, 0.4])
        samples = ball_members(p, 0.0, 10, rng)
        assert np.allclose(samples, p.probs, atol=1e-15)
