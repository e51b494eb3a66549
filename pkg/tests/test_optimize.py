"""Coordinate-descent optimizer tests."""
import numpy as np
import pytest

from mdiqds.channel import IntensityConfig, SystemParams
from mdiqds.models import run_smb1
from mdiqds.optimize import (
    REFERENCE_VECTOR,
    SearchSpace,
    config_from_vector,
    coordinate_descent,
    multi_start,
    optimize_models,
    qds_search_space,
    rate_objective,
)


def box2(initial=(0.9, 0.1)) -> SearchSpace:
    return SearchSpace(names=("x", "y"), lower=(0.0, 0.0), upper=(1.0, 1.0),
                       initial=initial)


class TestCoordinateDescent:
    def test_constant_objective_returns_start(self):
        point = coordinate_descent(lambda x: 1.0, box2())
        assert point.x == (0.9, 0.1)
        assert point.converged
        assert point.cycles == 1

    def test_concave_quadratic_with_cross_term(self):
        def f(v):
            dx, dy = v[0] - 0.3, v[1] - 0.6
            return -(dx * dx) - 2.0 * dy * dy - 0.5 * dx * dy

        point = coordinate_descent(f, box2())
        assert abs(point.x[0] - 0.3) <= 1e-4
        assert abs(point.x[1] - 0.6) <= 1e-4
        assert point.converged

    def test_monotone_accepted_values(self):
        def f(v):
            return -(v[0] - 0.4) ** 2 - (v[1] - 0.2) ** 2

        point = coordinate_descent(f, box2())
        assert all(a < b for a, b in zip(point.history, point.history[1:]))

    def test_deterministic_given_seed(self):
        space = SearchSpace(names=("x", "y"), lower=(0.0, 0.0), upper=(1.0, 1.0))
        f = lambda v: -(v[0] - 0.5) ** 2 - (v[1] - 0.5) ** 2  # noqa: E731
        a = coordinate_descent(f, space, seed=17)
        b = coordinate_descent(f, space, seed=17)
        assert a == b
        c = coordinate_descent(f, space, seed=18)
        assert c.x != a.x  # different random start

    def test_bounds_validation(self):
        with pytest.raises(ValueError):
            SearchSpace(names=("x",), lower=(1.0,), upper=(0.0,))


class TestMultiStart:
    @staticmethod
    def bumps(v):
        # two separated maxima, the better one away from the default start
        big = 2.0 * np.exp(-40.0 * ((v[0] - 0.8) ** 2 + (v[1] - 0.8) ** 2))
        small = 1.0 * np.exp(-40.0 * ((v[0] - 0.15) ** 2 + (v[1] - 0.15) ** 2))
        return float(big + small)

    def test_k1_reduces_to_coordinate_descent(self):
        space = box2(initial=(0.1, 0.1))
        single = coordinate_descent(self.bumps, space, seed=5)
        multi = multi_start(self.bumps, space, k=1, seed=5)
        assert multi.x == single.x
        assert multi.value == single.value
        assert multi.start_values == (single.value,)

    def test_more_starts_never_worse(self):
        space = box2(initial=(0.1, 0.1))
        v1 = multi_start(self.bumps, space, k=1, seed=5).value
        v5 = multi_start(self.bumps, space, k=5, seed=5).value
        assert v5 >= v1
        assert v5 > 1.5  # a random start reached the taller bump

    def test_invalid_count(self):
        with pytest.raises(ValueError):
            multi_start(self.bumps, box2(), k=0)


class TestRateOptimization:
    PARAMS = SystemParams(distance_km=100.0, n_pulses=1e12)

    def test_improves_on_reference(self):
        objective = rate_objective(self.PARAMS, "smb1")
        reference_rate = objective(np.asarray(REFERENCE_VECTOR))
        point = coordinate_descent(objective, qds_search_space())
        assert reference_rate > 0.0
        assert point.value >= reference_rate

    def test_every_candidate_stays_feasible(self):
        objective = rate_objective(self.PARAMS, "smb1")
        seen: list[np.ndarray] = []

        def checked(x):
            seen.append(np.array(x))
            cfg = config_from_vector(x)  # raises if the invariants break
            assert isinstance(cfg, IntensityConfig)
            return objective(x)

        coordinate_descent(checked, qds_search_space())
        assert len(seen) > 10

    def test_optimize_models_orders_and_pools(self):
        results = optimize_models(self.PARAMS, seed=1, starts=1)
        assert results["smb1"].rate >= results["sob"].rate > 0.0
        assert results["smb1"].rate >= results["smb2"].rate
        reference = run_smb1(self.PARAMS, config_from_vector(REFERENCE_VECTOR))
        assert results["smb1"].rate >= reference.rate

    def test_hint_does_not_change_results(self):
        objective = rate_objective(self.PARAMS, "smb1")
        x = np.asarray(REFERENCE_VECTOR)
        first = objective(x)
        again = objective(x)  # second call runs with a warm length hint
        assert first == again

    def test_custom_weak_decoy_intensity(self):
        results = optimize_models(self.PARAMS, models=("smb1",), seed=2,
                                  a_d2=1e-3)
        assert results["smb1"].feasible
        assert results["smb1"].config.a_d2 == 1e-3


@pytest.mark.slow
def test_multistart_agreement_at_150km():
    """Independent starts land on the same rate plateau within 2%."""
    params = SystemParams(distance_km=150.0, n_pulses=1e14)
    point = multi_start(rate_objective(params, "smb1"), qds_search_space(),
                        k=5, seed=3)
    values = np.asarray(point.start_values)
    assert values.min() > 0.0
    assert (values.max() - values.min()) / values.max() <= 0.02
