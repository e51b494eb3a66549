"""Security layer: min-entropy, thresholds, failure bounds, length solver.

Given the single-photon quantities projected onto one signature block,
this module evaluates the three protocol failure probabilities
(robustness, repudiation, forging), derives the acceptance/verification
thresholds from the forger's minimum error rate, and solves for the
smallest even block length whose worst failure probability meets the
target security level.

The forging bound's tail term p_F (the probability that a forger forced
to error rate at least p_E on the L/2 unknown bits still lands below the
verification threshold) is the Hoeffding tail
exp(-2 * (L/2) * (p_E - s_v)^2); it requires p_E > s_v, which the
threshold construction guarantees on feasible points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .bounds import binary_entropy, inverse_binary_entropy, test_sample_penalty

__all__ = [
    "SecurityBudget",
    "SecurityOutcome",
    "min_entropy",
    "eve_error_rate",
    "keep_error_bound",
    "thresholds",
    "security_probabilities",
    "solve_signature_length",
]


@dataclass(frozen=True)
class SecurityBudget:
    """Security level and per-component failure probabilities.

    epsilon is the overall target; eps_pe covers the error test, eps_sf
    every statistical-fluctuation term, and g_prob the residual forging
    term. Each component used by the estimation chain defaults to
    eps_sf.
    """

    epsilon: float = 1e-5
    eps_pe: float = 1e-12
    eps_sf: float = 1e-12
    g_prob: float = 1e-12

    def __post_init__(self) -> None:
        for name in ("epsilon", "eps_pe", "eps_sf", "g_prob"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must be in (0, 1), got {value}")


@dataclass(frozen=True)
class SecurityOutcome:
    """Security quantities evaluated at one block length."""

    length: int
    n_l1: float
    e_l1: float
    h_min: float
    p_e: float
    e_test: float
    e_keep: float
    s_a: float
    s_v: float
    p_robust: float
    p_repudiation: float
    p_forge: float
    thresholds_ok: bool
    feasible: bool

    @property
    def worst_probability(self) -> float:
        return max(self.p_robust, self.p_repudiation, self.p_forge)


def min_entropy(n_l1: float, e_l1: float) -> float:
    """Single-photon min-entropy n_L1 * (1 - H2(e_L1)), floored at 0."""
    if not 0.0 <= e_l1 <= 1.0:
        raise ValueError(f"e_l1 must be in [0, 1], got {e_l1}")
    return max(n_l1 * (1.0 - binary_entropy(e_l1)), 0.0)


def eve_error_rate(n_l1: float, e_l1: float, length: float) -> float:
    """Minimum error rate p_E a forger must incur on the kept half.

    Solves H2(p_E) = 2 n_L1 / L * (1 - H2(e_L1)) for p_E in [0, 0.5];
    the right-hand side is clamped to [0, 1], with 1 mapping to 0.5.
    """
    if length < 2:
        raise ValueError(f"block length must be >= 2, got {length}")
    rhs = 2.0 * n_l1 / length * (1.0 - binary_entropy(e_l1))
    rhs = min(max(rhs, 0.0), 1.0)
    return inverse_binary_entropy(rhs)


def keep_error_bound(e_test: float, length: float, n_test: float, eps_pe: float) -> float:
    """Upper bound on the kept-half error rate from the test sample.

    E_keep = E_test + test_sample_penalty(L, n_test, eps_pe), capped at
    1. Both recipients see identical statistics under the symmetric
    link, so the max over users equals the single-user value.
    """
    return min(e_test + test_sample_penalty(length, n_test, eps_pe), 1.0)


def thresholds(e_keep: float, p_e: float) -> tuple[float, float, bool]:
    """Authentication/verification thresholds and their feasibility.

    s_a = E_keep + (p_E - E_keep)/3 and s_v = E_keep + 2(p_E - E_keep)/3.
    Feasible only when 0 < s_a < s_v < 1/2, which requires E_keep < p_E.
    """
    s_a = e_keep + (p_e - e_keep) / 3.0
    s_v = e_keep + 2.0 * (p_e - e_keep) / 3.0
    ok = 0.0 < s_a < s_v < 0.5
    return s_a, s_v, ok


def security_probabilities(s_a: float, s_v: float, length: float, p_e: float,
                           budget: SecurityBudget,
                           eps_n: float, eps_e: float) -> tuple[float, float, float]:
    """Robustness, repudiation and forging failure probabilities.

    Parameters
    ----------
    eps_n, eps_e : float
        Aggregate failure probabilities consumed estimating the kept
        block's single-photon count and error rate.

    Returns
    -------
    (P_robust, P_repudiation, P_forge) where
    P_robust = 2 eps_pe,
    P_repudiation = 2 exp(-(1/4)(s_v - s_a)^2 L) and
    P_forge = p_F + g + eps_pe + eps_n + eps_e with the Hoeffding tail
    p_F described in the module docstring (p_F = 1 when p_E <= s_v).
    """
    p_robust = 2.0 * budget.eps_pe
    p_repudiation = 2.0 * math.exp(-0.25 * (s_v - s_a) ** 2 * length)
    gap = p_e - s_v
    p_f = math.exp(-2.0 * (length / 2.0) * gap * gap) if gap > 0 else 1.0
    p_forge = p_f + budget.g_prob + budget.eps_pe + eps_n + eps_e
    return p_robust, p_repudiation, p_forge


def solve_signature_length(feasible_at: Callable[[int], bool], l_max: int,
                           hint: int | None = None) -> int | None:
    """Smallest even L in [2, l_max] accepted by feasible_at.

    Exponential bracketing followed by binary search, assuming
    feasibility is monotone in L. A hint (e.g. the solution of a nearby
    configuration) only anchors the bracket and cannot change the
    result: the returned L is re-verified against L - 2, and a boundary
    contradicting monotonicity triggers a linear scan from 2 upward.
    Returns None when no even L <= l_max is feasible.
    """
    if l_max < 2:
        return None
    l_cap = l_max - (l_max % 2)
    lo = 0  # exclusive edge, treated as infeasible
    hi = None
    if hint is not None:
        anchor = min(max(2, hint - (hint % 2)), l_cap)
        if feasible_at(anchor):
            hi = anchor
            probe = anchor // 2
            probe -= probe % 2
            while probe >= 2:
                if feasible_at(probe):
                    hi = probe
                    probe //= 2
                    probe -= probe % 2
                else:
                    lo = probe
                    break
        else:
            lo = anchor
            probe = anchor * 2
            while probe <= l_cap and not feasible_at(probe):
                lo = probe
                probe *= 2
            if probe <= l_cap:
                hi = probe
            elif lo < l_cap and feasible_at(l_cap):
                hi = l_cap
            else:
                return None
    else:
        probe = 2
        while probe <= l_cap and not feasible_at(probe):
            lo = probe
            probe *= 2
        if probe <= l_cap:
            hi = probe
        elif lo < l_cap and feasible_at(l_cap):
            hi = l_cap
        else:
            return None
    # binary search on even lengths in (lo, hi]
    while hi - lo > 2:
        mid = (lo + hi) // 2
        mid -= mid % 2
        if mid == lo:
            mid += 2
        if feasible_at(mid):
            hi = mid
        else:
            lo = mid
    best = hi
    if best > 2 and feasible_at(best - 2):
        # non-monotone boundary: linear scan for the true minimum
        scan = 2
        while scan <= l_max:
            if feasible_at(scan):
                return scan
            scan += 2
        return None
    return best
