import numpy as np
import pytest
from scipy.signal import lfilter

import mums


def chain_solution(y_impact, y_medium, p, q, k_impact=None, shock=1.0):
    """Hand-built solution object for exercising the closed forms directly."""
    k_i = y_impact if k_impact is None else k_impact
    return mums.MarkovSolution(
        q=q,
        k_impact=k_i,
        k_medium=q * k_i / (1.0 - p),
        controls_impact=np.array([y_impact]),
        controls_medium=np.array([y_medium]),
        p=p,
        shock=shock,
        markov_valid=0.0 <= q < 1.0,
        stationary=abs(q) < 1.0,
        control_names=("y",),
    )


HUMP_CASE = dict(y_impact=0.1, y_medium=0.25 / 0.3, p=0.7, q=0.8)


class TestWeights:
    def test_matches_ratio_form_when_separated(self):
        p, q = 0.7, 0.3
        n = np.arange(1, 50)
        w = mums.cross_geometric_weights(p, q, 50)
        np.testing.assert_allclose(w[1:], (q**n - p**n) / (q - p), atol=1e-14)

    def test_equal_arguments_give_the_limit_exactly(self):
        p = 0.7
        w = mums.cross_geometric_weights(p, p, 30)
        n = np.arange(1, 30)
        np.testing.assert_allclose(w[1:], n * p ** (n - 1), rtol=1e-13)

    def test_leading_entries(self):
        w = mums.cross_geometric_weights(0.4, 0.9, 3)
        assert w[0] == 0.0
        assert w[1] == 1.0
        assert w[2] == pytest.approx(1.3, abs=1e-15)


class TestIrf:
    def test_impact_and_first_step(self):
        sol = chain_solution(**HUMP_CASE)
        path = mums.irf(sol, 5)
        assert path.controls["y"][0] == pytest.approx(0.1, abs=1e-15)
        assert path.controls["y"][1] == pytest.approx(0.32, abs=1e-12)
        assert path.state[1] == pytest.approx(
            sol.p * sol.k_impact + (1 - sol.p) * sol.k_medium, rel=1e-13
        )
        assert path.exogenous[1] == pytest.approx(0.7, rel=1e-15)

    def test_second_step_shows_the_hump(self):
        sol = chain_solution(**HUMP_CASE)
        path = mums.irf(sol, 5)
        assert path.controls["y"][2] == pytest.approx(0.424, abs=1e-12)
        assert path.controls["y"][2] > path.controls["y"][1] > path.controls["y"][0]

    def test_no_persistence_is_geometric(self):
        sol = chain_solution(y_impact=1.5, y_medium=0.0, p=0.7, q=0.0, k_impact=0.4)
        path = mums.irf(sol, 20)
        np.testing.assert_allclose(path.controls["y"], 1.5 * 0.7 ** np.arange(21), rtol=1e-14)

    def test_matches_recurrence_everywhere(self, generic_model):
        sol = mums.solve_model(generic_model)
        path = mums.irf(sol, 100)
        rec_y = mums.irf_recurrence(
            float(sol.controls_impact[0]), float(sol.controls_medium[0]), sol.p, sol.q, 100
        )
        rec_k = mums.irf_recurrence(sol.k_impact, sol.k_medium, sol.p, sol.q, 100)
        assert np.max(np.abs(rec_y - path.controls["y"])) <= 1e-12
        assert np.max(np.abs(rec_k - path.state)) <= 1e-12

    def test_recurrence_values_by_hand(self):
        rec = mums.irf_recurrence(0.1, 0.25 / 0.3, 0.7, 0.8, 3)
        assert rec[1] == pytest.approx(0.32, abs=1e-12)
        assert rec[2] == pytest.approx(0.424, abs=1e-12)
        assert rec[3] == pytest.approx(1.5 * 0.424 - 0.56 * 0.32, abs=1e-12)

    def test_recurrence_degenerates_to_ar1(self):
        rec = mums.irf_recurrence(2.0, 0.0, 0.6, 0.0, 30)
        np.testing.assert_allclose(rec, 2.0 * 0.6 ** np.arange(31), rtol=1e-13)

    def test_limit_continuity_across_equal_persistence(self):
        # Paths must vary continuously as q crosses p, and sit within 1e-9
        # of the exact q = p limit once |q - p| reaches 1e-9.
        p = 0.7
        limit = mums.irf(chain_solution(0.1, 0.25 / 0.3, p, p, k_impact=0.1), 100)
        previous_gap = None
        for k in range(6, 13):
            for sign in (1.0, -1.0):
                sol = chain_solution(0.1, 0.25 / 0.3, p, p + sign * 10.0**-k, k_impact=0.1)
                path = mums.irf(sol, 100)
                gap = max(
                    float(np.max(np.abs(path.controls["y"] - limit.controls["y"]))),
                    float(np.max(np.abs(path.state - limit.state))),
                )
                if k >= 9:
                    assert gap <= 1e-9
            if previous_gap is not None:
                assert gap <= previous_gap * 1.001
            previous_gap = gap

    def test_algebraic_warning_for_invalid_q(self):
        sol = chain_solution(0.1, 0.2, 0.5, -0.5)
        with pytest.warns(mums.AlgebraicSolutionWarning):
            mums.irf(sol, 5)


class TestPdv:
    def test_reduces_to_impact_without_medium_state(self):
        sol = chain_solution(y_impact=1.5, y_medium=0.0, p=0.7, q=0.0, k_impact=0.0)
        for beta in (0.5, 0.9, 0.995):
            assert mums.pdv_multiplier(sol, beta, "y") == pytest.approx(1.5, rel=1e-15)

    def test_truncated_sum_oracle(self, generic_model):
        sol = mums.solve_model(generic_model)
        beta = 0.99
        n = np.arange(10_001, dtype=float)
        path = mums.irf(sol, 10_000)
        discounted = beta**n
        shock_pdv = float(np.sum(discounted * sol.p**n))
        for variable in ("y", "state"):
            oracle = float(np.sum(discounted * path.series(variable))) / shock_pdv
            assert mums.pdv_multiplier(sol, beta, variable) == pytest.approx(
                oracle, abs=1e-8
            )

    def test_diverging_discount_is_rejected(self):
        sol = chain_solution(0.1, 0.2, 0.5, 0.999999)
        assert mums.pdv_multiplier(sol, 0.9, "y") is not None
        with pytest.warns(mums.AlgebraicSolutionWarning), pytest.raises(mums.DomainError):
            # q above 1 with beta close to 1 pushes |beta*q| past 1.
            mums.pdv_multiplier(chain_solution(0.1, 0.2, 0.5, 1.5), 0.99, "y")

    def test_bad_beta_rejected(self):
        sol = chain_solution(0.1, 0.2, 0.5, 0.5)
        with pytest.raises(ValueError):
            mums.pdv_multiplier(sol, 1.0, "y")


class TestCumulativeSum:
    def test_geometric_sum_case(self, static_model):
        sol = mums.solve_states(static_model, 0.0, 1.0)
        total = mums.cumulative_sum(sol, "y")
        assert total == pytest.approx(sol.controls_impact[0] / 0.3, rel=1e-13)
        assert total == pytest.approx(5.1283, abs=1e-4)

    def test_state_identity(self, generic_model):
        sol = mums.solve_model(generic_model)
        total = mums.cumulative_sum(sol, "state")
        assert total == pytest.approx(sol.k_medium / (sol.q * (1.0 - sol.q)), rel=1e-12)

    def test_truncated_sum_oracle(self, generic_model):
        sol = mums.solve_model(generic_model)
        path = mums.irf(sol, 10_000)
        for variable in ("y", "state"):
            oracle = float(np.sum(path.series(variable)))
            assert mums.cumulative_sum(sol, variable) == pytest.approx(oracle, abs=1e-8)

    def test_divergent_sum_is_rejected(self):
        with pytest.warns(mums.AlgebraicSolutionWarning), pytest.raises(mums.DomainError):
            mums.cumulative_sum(chain_solution(0.1, 0.2, 0.5, 1.01), "y")


class TestOccupancy:
    def test_first_two_periods(self):
        occ = mums.occupancy(0.7, 0.8, 1)
        assert (occ.p_impact[0], occ.p_medium[0]) == (1.0, 0.0)
        assert (occ.p_impact[1], occ.p_medium[1]) == (0.7, pytest.approx(0.3))

    def test_matches_closed_forms(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            p, q = rng.uniform(0.0, 0.99, size=2)
            occ = mums.occupancy(p, q, 60)
            n = np.arange(61)
            w = mums.cross_geometric_weights(p, q, 61)
            np.testing.assert_allclose(occ.p_impact, p**n, atol=1e-12)
            np.testing.assert_allclose(occ.p_medium, (1 - p) * w, atol=1e-12)

    def test_probabilities_stay_in_the_simplex(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            p, q = rng.uniform(0.0, 0.999, size=2)
            occ = mums.occupancy(p, q, 100)
            assert np.all(occ.p_impact >= 0.0) and np.all(occ.p_medium >= 0.0)
            assert np.all(occ.p_impact + occ.p_medium <= 1.0 + 1e-15)

    def test_reconstructs_the_ensemble_path(self):
        sol = chain_solution(**HUMP_CASE)
        occ = mums.occupancy(sol.p, sol.q, 80)
        reconstruction = occ.p_impact * 0.1 + occ.p_medium * (0.25 / 0.3)
        path = mums.irf(sol, 80)
        np.testing.assert_allclose(reconstruction, path.controls["y"], atol=1e-12)


class TestTransientPower:
    def test_zeroth_power_is_identity(self):
        np.testing.assert_array_equal(mums.transient_power(0.7, 0.8, 0), np.eye(2))

    def test_first_power_is_the_block(self):
        np.testing.assert_allclose(
            mums.transient_power(0.7, 0.8, 1), [[0.7, 0.3], [0.0, 0.8]], atol=1e-15
        )

    def test_matches_repeated_multiplication(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            p, q = rng.uniform(0.0, 0.99, size=2)
            n = int(rng.integers(0, 40))
            block = np.array([[p, 1 - p], [0.0, q]])
            np.testing.assert_allclose(
                mums.transient_power(p, q, n),
                np.linalg.matrix_power(block, n),
                atol=1e-12,
            )


class TestHumpDiagnosis:
    def test_state_condition(self):
        humped = mums.hump_diagnosis(chain_solution(**HUMP_CASE), "state")
        assert humped.has_hump and humped.expectation_ratio == pytest.approx(1.5)
        flat = mums.hump_diagnosis(
            chain_solution(0.1, 0.25 / 0.3, p=0.3, q=0.4), "state"
        )
        assert not flat.has_hump  # p + q < 1

    def test_control_peak_location(self):
        report = mums.hump_diagnosis(chain_solution(**HUMP_CASE), "y", horizon=100)
        assert report.has_hump
        assert report.peak_index >= 2
        path = mums.irf(chain_solution(**HUMP_CASE), 100)
        assert abs(path.controls["y"][report.peak_index]) >= 0.424 - 1e-12

    def test_zero_impact_is_undefined(self):
        sol = chain_solution(y_impact=0.5, y_medium=0.1, p=0.5, q=0.5, k_impact=0.5)
        bad = mums.MarkovSolution(
            q=0.5,
            k_impact=0.0,
            k_medium=0.0,
            controls_impact=np.array([0.0]),
            controls_medium=np.array([0.1]),
            p=0.5,
            shock=1.0,
            markov_valid=True,
            stationary=True,
            control_names=("y",),
        )
        assert mums.hump_diagnosis(sol, "y") is not None
        with pytest.raises(mums.DomainError):
            mums.hump_diagnosis(bad, "y")


def test_arma_filter_reproduces_the_recurrence():
    # The linear-filter form of the second-order law, used as the
    # independent summation oracle elsewhere, matches the plain recursion.
    y0, ym, p, q = 0.3, -0.8, 0.6, 0.25
    y1 = p * y0 + (1 - p) * ym
    impulse = np.zeros(200)
    impulse[0] = 1.0
    filtered = lfilter([y0, y1 - (p + q) * y0], [1.0, -(p + q), p * q], impulse)
    np.testing.assert_allclose(
        filtered, mums.irf_recurrence(y0, ym, p, q, 199), atol=1e-13
    )
