import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jointpurity import quantum as q
from jointpurity.hom import (InterferometerModel, ScanResult, coincidence_prob, expected_scan,
                             overlap, scan_grid, simulate_scan)
from jointpurity.prep import (HWP, QWP, Component, Correlation, Discrete, LCPhase, PairRecipe,
                              PhotonState, Pol, TABLE1_STATES, UniformInterval,
                              ensemble_density_matrix, get_preparation, quartz_recipe)

TC = 0.22
TAU = 5 * TC
S = 1 / np.sqrt(2)
IDEAL = InterferometerModel(1.0, TC)
REAL = InterferometerModel(0.9, TC)


def g(dt):
    return np.exp(-dt ** 2 / (2 * TC ** 2))


class TestModel:
    @pytest.mark.parametrize("v,tc", [(-0.1, 1), (1.1, 1), (0.5, 0), (0.5, -1)])
    def test_invalid(self, v, tc):
        with pytest.raises(ValueError):
            InterferometerModel(v, tc)


class TestOverlap:
    def test_identical(self):
        p = PhotonState.from_amplitudes(0.6, 0.8j)
        assert overlap(p, p, TC) == pytest.approx(1.0)

    def test_distant_time_bins(self):
        a = PhotonState((Component(1, Pol.H, 0.0),))
        b = PhotonState((Component(1, Pol.H, 10 * TC),))
        assert abs(overlap(a, b, TC)) < 1e-6

    def test_crossed_delays(self):
        a = PhotonState((Component(S, Pol.H, 0.0), Component(S, Pol.V, TAU)))
        b = PhotonState((Component(S, Pol.H, TAU), Component(S, Pol.V, 0.0)))
        # cross terms: H-H at dt=-tau, V-V at dt=+tau
        assert overlap(a, b, TC) == pytest.approx(0.5 * g(TAU) + 0.5 * g(TAU), abs=1e-15)
        assert abs(overlap(a, b, TC)) < 1e-5
        shifted = a.shifted(TAU)
        expected = 0.5 * g(0.0) + 0.5 * g(2 * TAU)
        assert overlap(shifted, b, TC) == pytest.approx(expected, abs=1e-15)
        assert overlap(shifted, b, TC) == pytest.approx(0.5, abs=1e-9)

    @given(st.floats(0, 2), st.floats(0, 2), st.floats(0, 1))
    def test_magnitude_bounded(self, t1, t2, x):
        a = PhotonState.from_amplitudes(np.cos(x), np.sin(x), t1)
        b = PhotonState((Component(0.3, Pol.H, t2), Component(0.7j, Pol.V, 0.0)))
        assert abs(overlap(a, b, TC)) <= 1 + 1e-12


class TestCoincidence:
    def test_identical_pure_ideal(self):
        p = PhotonState.from_amplitudes(S, S)
        assert coincidence_prob(p, p, IDEAL) == pytest.approx(0.0)

    @pytest.mark.parametrize("v", [0.0, 0.5, 0.9, 1.0])
    def test_distinguishable(self, v):
        a = PhotonState((Component(1, Pol.H, 0.0),))
        b = PhotonState((Component(1, Pol.H, 50 * TC),))
        assert coincidence_prob(a, b, InterferometerModel(v, TC)) == pytest.approx(0.5)

    def test_dip_floor_at_90_percent(self):
        p = PhotonState.horizontal()
        assert coincidence_prob(p, p, REAL) == pytest.approx(0.05)

    def test_orthogonal_polarizations_give_singlet_weight(self):
        a, b = PhotonState.horizontal(), PhotonState.from_amplitudes(0, 1)
        # |HV> has singlet weight 1/2
        assert coincidence_prob(a, b, IDEAL) == pytest.approx(
            q.singlet_projection(q.tensor(q.H.projector(), q.V.projector())))


def mixed_recipe(correlation=Correlation.INDEPENDENT):
    return get_preparation("mix_pm").recipe(correlation)


class TestExpectedScan:
    def test_mixed_single_dip(self):
        scan = expected_scan(mixed_recipe(), [0.0], IDEAL)
        assert scan.points[0].expected_prob == pytest.approx(0.25, abs=1e-12)
        assert scan.visibility()[0] == pytest.approx(0.5, abs=1e-12)

    def test_anti_aligned_double_dip(self):
        delays = scan_grid(2 * TAU + 10 * TC, TC / 10)
        scan = expected_scan(quartz_recipe(TAU, aligned=False), delays, IDEAL)
        mins = scan.local_minima()
        assert len(mins) == 2
        np.testing.assert_allclose(scan.delays[mins], [-TAU, TAU], atol=1e-12)
        np.testing.assert_allclose(scan.expected[mins], 3 / 8, atol=1e-9)
        assert scan.expected[np.argmin(abs(scan.delays))] == pytest.approx(0.5, abs=1e-9)

    def test_aligned_single_dip_to_zero(self):
        delays = scan_grid(2 * TAU, TC / 10)
        scan = expected_scan(quartz_recipe(TAU, aligned=True), delays, IDEAL)
        mins = scan.local_minima()
        assert len(mins) == 1
        assert scan.delays[mins[0]] == pytest.approx(0.0, abs=1e-12)
        assert scan.expected[mins[0]] == pytest.approx(0.0, abs=1e-12)

    def test_sixteen_configuration_argument(self):
        # independent oracle: each photon uniformly in one of 4 (pol, bin) states;
        # identical configurations never coincide, all others coincide half the time
        configs = list(itertools.product("HV", "EL"))
        combos = list(itertools.product(configs, configs))
        assert len(combos) == 16
        identical = sum(a == b for a, b in combos)
        assert identical == 4
        mean = sum(0.0 if a == b else 0.5 for a, b in combos) / 16
        dip_visibility = 1 - mean / 0.5
        assert dip_visibility == pytest.approx(0.25)
        scan = expected_scan(quartz_recipe(TAU, aligned=False), [TAU], IDEAL)
        assert scan.points[0].expected_prob == pytest.approx(mean, abs=1e-9)

    @pytest.mark.parametrize("prep", TABLE1_STATES, ids=lambda p: p.name)
    def test_mode_matched_equals_singlet_projection(self, prep):
        rho = prep.density_matrix()
        scan = expected_scan(prep.recipe(), [0.0], IDEAL)
        target = q.singlet_projection(q.tensor(rho, rho))
        assert scan.points[0].expected_prob == pytest.approx(target, abs=1e-9)
        assert scan.visibility()[0] == pytest.approx(q.purity(rho), abs=1e-9)

    def test_mode_matched_different_arms(self):
        arm_a = (HWP(0.3), LCPhase.slot(), QWP(0.2))
        arm_b = (QWP(1.1), LCPhase.slot(), HWP(0.7))
        dist = UniformInterval(0.2, 2.5)
        recipe = PairRecipe(arm_a, arm_b, dist)
        ra, rb = ensemble_density_matrix(arm_a, dist), ensemble_density_matrix(arm_b, dist)
        scan = expected_scan(recipe, [0.0], IDEAL)
        assert scan.points[0].expected_prob == pytest.approx(
            q.singlet_projection(q.tensor(ra, rb)), abs=1e-9)

    @pytest.mark.parametrize("dist", [Discrete.uniform([0, np.pi]),
                                      Discrete.uniform([0, np.pi, np.pi / 2]),
                                      UniformInterval(0, np.pi)])
    @pytest.mark.parametrize("v", [0.9, 1.0])
    def test_correlated_identical_arms_floor(self, dist, v):
        arm = (HWP(np.pi / 8), LCPhase.slot())
        recipe = PairRecipe.symmetric(arm, dist, Correlation.CORRELATED)
        scan = expected_scan(recipe, [0.0], InterferometerModel(v, TC))
        assert scan.points[0].expected_prob == pytest.approx((1 - v) / 2, abs=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(st.floats(-3, 3), st.floats(0, 1))
    def test_probabilities_bounded(self, delay, v):
        model = InterferometerModel(v, TC)
        for recipe in (mixed_recipe(), quartz_recipe(TAU, False), quartz_recipe(TAU, True)):
            p = expected_scan(recipe, [delay], model).points[0].expected_prob
            assert (1 - v) / 2 - 1e-12 <= p <= 0.5 + 1e-12


class TestSimulateScan:
    def test_mixed_counts_match_binomial(self):
        n = 100_000
        scan = simulate_scan(mixed_recipe(), [0.0], IDEAL, n, seed=17)
        sigma = np.sqrt(0.25 * 0.75 / n)
        assert abs(scan.points[0].counts / n - 0.25) < 3 * sigma
        assert 3 * sigma < 0.005

    def test_ideal_pure_never_coincides(self):
        recipe = get_preparation("plus").recipe()
        scan = simulate_scan(recipe, [0.0], IDEAL, 1, seed=3)
        assert scan.points[0].counts == 0
        assert scan.points[0].expected_prob == 0.0

    def test_deterministic(self):
        delays = [-0.5, 0.0, 0.5]
        a = simulate_scan(quartz_recipe(TAU, False), delays, REAL, 1000, seed=9)
        b = simulate_scan(quartz_recipe(TAU, False), delays, REAL, 1000, seed=9)
        assert a.to_csv() == b.to_csv()

    def test_point_seed_derivation(self):
        # point i uses seed + i, so dropping the first point shifts the stream by one
        full = simulate_scan(mixed_recipe(), [0.0, 0.1], REAL, 500, seed=40)
        tail = simulate_scan(mixed_recipe(), [0.1], REAL, 500, seed=41)
        assert full.points[1].counts == tail.points[0].counts

    def test_correlated_uniform_counts(self):
        recipe = get_preparation("continuum").recipe(Correlation.CORRELATED)
        n, reps = 5_000, 40
        hits = sum(simulate_scan(recipe, [0.0], REAL, n, seed=s).points[0].counts
                   for s in range(reps))
        total = n * reps
        assert abs(hits / total - 0.05) < 3 * np.sqrt(0.05 * 0.95 / total)

    def test_requires_pairs(self):
        with pytest.raises(ValueError):
            simulate_scan(mixed_recipe(), [0.0], IDEAL, 0, seed=1)


class TestScanResult:
    def test_csv_round_trip(self):
        scan = simulate_scan(mixed_recipe(), scan_grid(1.0, 0.25), REAL, 200, seed=2)
        text = scan.to_csv()
        assert text.splitlines()[0] == "delay_ps,expected_prob,counts,pairs"
        assert "\r" not in text
        back = ScanResult.from_csv(text)
        assert back.to_csv() == text

    def test_expected_only_csv_has_empty_counts(self):
        text = expected_scan(mixed_recipe(), [0.0], IDEAL).to_csv()
        assert text.splitlines()[1] == "0.0,0.25,,0"

    def test_empirical_baseline(self):
        scan = simulate_scan(mixed_recipe(), scan_grid(20 * TC, TC), REAL, 4000, seed=8)
        assert scan.empirical_baseline() == pytest.approx(0.5, abs=0.04)
        assert expected_scan(mixed_recipe(), [-5.0, 0.0, 5.0], REAL).empirical_baseline() == 0.5

    def test_scan_grid(self):
        grid = scan_grid(1.0, 0.1)
        assert len(grid) == 21 and grid[10] == 0.0
        np.testing.assert_allclose(grid[[0, -1]], [-1.0, 1.0])
