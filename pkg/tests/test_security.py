"""Security-layer tests: entropy bounds, thresholds, probabilities, solver."""
import math

import pytest

from mdiqds import security
from mdiqds.security import SecurityBudget

EPS12 = 1e-12
NEAR_ONE = 1.0 - 1e-15


class TestMinEntropy:
    def test_uniform_error_gives_zero(self):
        assert security.min_entropy(1e4, 0.5) == 0.0

    def test_error_free(self):
        assert security.min_entropy(1e4, 0.0) == 1e4

    def test_known_value(self):
        assert security.min_entropy(1e4, 0.11) == pytest.approx(5000.9, abs=0.5)
        assert security.min_entropy(1e4, 0.11) == pytest.approx(5000.84041835472, rel=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            security.min_entropy(10.0, 1.5)


class TestEveErrorRate:
    def test_saturated_rhs(self):
        assert security.eve_error_rate(n_l1=1e4, e_l1=0.0, length=2e4) == 0.5

    def test_zero_rhs(self):
        assert security.eve_error_rate(n_l1=0.0, e_l1=0.0, length=100) == 0.0

    def test_half_entropy_point(self):
        # n_L1/(L/2) = 0.5 with no errors solves H2(p) = 0.5
        got = security.eve_error_rate(n_l1=2500.0, e_l1=0.0, length=10_000)
        assert got == pytest.approx(0.11003, abs=1e-4)

    def test_domain(self):
        with pytest.raises(ValueError):
            security.eve_error_rate(10.0, 0.1, length=1)


class TestKeepErrorBound:
    def test_vanishing_confidence(self):
        assert security.keep_error_bound(0.02, 1e4, 1e3, NEAR_ONE) == pytest.approx(0.02, abs=1e-4)

    def test_known_value(self):
        got = security.keep_error_bound(0.02, 1e4, 1e3, EPS12)
        assert got == pytest.approx(0.1488, abs=1e-3)

    def test_penalty_shrinks_with_test_size(self):
        assert (security.keep_error_bound(0.02, 1e4, 1e4, EPS12)
                < security.keep_error_bound(0.02, 1e4, 1e3, EPS12))

    def test_capped_at_one(self):
        assert security.keep_error_bound(0.9, 100, 1, 1e-9) == 1.0


class TestThresholds:
    def test_even_split(self):
        s_a, s_v, ok = security.thresholds(0.0, 0.3)
        assert (s_a, s_v) == (pytest.approx(0.1), pytest.approx(0.2))
        assert ok

    def test_degenerate_gap(self):
        s_a, s_v, ok = security.thresholds(0.2, 0.2)
        assert s_a == s_v
        assert not ok

    def test_known_value(self):
        s_a, s_v, ok = security.thresholds(0.01, 0.11003)
        assert s_a == pytest.approx(0.04334, abs=1e-5)
        assert s_v == pytest.approx(0.07669, abs=1e-5)
        assert ok

    def test_large_keep_error_infeasible(self):
        _, _, ok = security.thresholds(0.55, 0.6)
        assert not ok


class TestSecurityProbabilities:
    BUDGET = SecurityBudget()

    def test_robustness_is_twice_eps_pe(self):
        p_rob, _, _ = security.security_probabilities(
            0.04, 0.06, 1e4, 0.1, self.BUDGET, 0.0, 0.0)
        assert p_rob == pytest.approx(2e-12)

    def test_vacuous_repudiation_bound(self):
        _, p_rep, _ = security.security_probabilities(
            0.05, 0.05, 1e4, 0.1, self.BUDGET, 0.0, 0.0)
        assert p_rep == 2.0

    def test_repudiation_known_value(self):
        _, p_rep, _ = security.security_probabilities(
            0.0, 0.03334, 43917, 0.5, self.BUDGET, 0.0, 0.0)
        assert p_rep == pytest.approx(1e-5, rel=0.05)

    def test_forging_assembly(self):
        eps_n, eps_e = 3e-12, 4e-12
        _, _, p_forge = security.security_probabilities(
            0.04, 0.06, 1e4, 0.1, self.BUDGET, eps_n, eps_e)
        p_f = math.exp(-2.0 * 5e3 * (0.1 - 0.06) ** 2)
        assert p_forge == pytest.approx(p_f + 1e-12 + 1e-12 + eps_n + eps_e, rel=1e-9)

    def test_forging_vacuous_when_threshold_reaches_pe(self):
        _, _, p_forge = security.security_probabilities(
            0.04, 0.12, 1e4, 0.1, self.BUDGET, 0.0, 0.0)
        assert p_forge >= 1.0


class TestSolveSignatureLength:
    def test_trivial_target_gives_minimal_block(self):
        assert security.solve_signature_length(lambda L: True, 10_000) == 2

    def test_infeasible_everywhere(self):
        assert security.solve_signature_length(lambda L: False, 10_000) is None

    def test_threshold_predicate(self):
        for lmin in (2, 4, 36, 514, 9998, 10_000):
            got = security.solve_signature_length(lambda L: L >= lmin, 10_000)
            assert got == lmin

    def test_cap_excludes_solution(self):
        assert security.solve_signature_length(lambda L: L >= 2048, 2000) is None

    def test_odd_cap(self):
        assert security.solve_signature_length(lambda L: L >= 1999, 2001) == 2000

    def test_non_monotone_island_found_by_bracket(self):
        feasible = {6, 8, 12}.union(range(64, 10_001))
        got = security.solve_signature_length(lambda L: L in feasible, 10_000)
        assert got == 6

    def test_non_monotone_boundary_falls_back_to_scan(self):
        # L = 6 flips from infeasible to feasible between queries, so the
        # post-search recheck contradicts monotonicity and forces the scan
        seen: dict[int, int] = {}

        def flaky(length: int) -> bool:
            seen[length] = seen.get(length, 0) + 1
            if length == 6:
                return seen[length] > 1
            return length >= 8

        got = security.solve_signature_length(flaky, 10_000)
        assert got == 6
        assert seen[6] >= 3  # bracket/binary probe, recheck, scan hit

    def test_budget_validation(self):
        with pytest.raises(ValueError):
            SecurityBudget(epsilon=0.0)
        with pytest.raises(ValueError):
            SecurityBudget(eps_pe=1.0)
