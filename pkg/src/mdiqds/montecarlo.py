"""Desk-scale Monte Carlo of the messaging stage and the tail bounds.

Two families of experiments:

* Messaging-stage simulators. Honest runs draw mismatch patterns at a
  given error rate and count aborts against the authentication
  threshold. The repudiation simulator plays a malicious signer who
  plants mismatches in both recipients' strings and relies on the
  random half-exchange to skew the two views apart; the forging
  simulator plays a recipient who must guess the kept half at error
  rate p_E. Signature strings are modeled as disjoint freshly drawn
  blocks of key material.

* Coverage tests for the deviation functions: each bound id maps to the
  random experiment its inequality speaks about (Poisson tallies for the
  Hoeffding fluctuation, hypergeometric draws for the
  without-replacement bounds) and counts how often the one-sided bound
  is violated. The violation frequency must stay at or below the bound's
  failure probability; these runs use inflated eps values (1e-2 to 1e-3)
  because violations at 1e-12 are unobservable at desk scale.

All trial batches derive per-purpose generators from a spawned seed
sequence, so identical seeds give identical statistics regardless of
batch composition.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import (
    hoeffding_delta,
    sampling_lambda,
    serfling_count_gamma,
    serfling_fraction_gamma,
    test_sample_penalty,
)

__all__ = [
    "BOUND_IDS",
    "TrialStats",
    "KeyMaterial",
    "make_key_material",
    "recipient_mismatches",
    "wilson_upper",
    "simulate_honest",
    "simulate_repudiation",
    "simulate_forging",
    "validate_bound",
]

BOUND_IDS = ("hoeffding", "serfling_fraction", "serfling_count",
             "sampling_lambda", "eq3_penalty")

_Z99 = 2.5758293035489004  # two-sided 99% normal quantile


def wilson_upper(successes: int, trials: int, z: float = _Z99) -> float:
    """Wilson score upper confidence limit for a binomial proportion."""
    if trials <= 0:
        return 1.0
    p_hat = successes / trials
    denom = 1.0 + z * z / trials
    center = p_hat + z * z / (2.0 * trials)
    half = z * math.sqrt(p_hat * (1.0 - p_hat) / trials + z * z / (4.0 * trials * trials))
    return min((center + half) / denom, 1.0)


@dataclass(frozen=True)
class TrialStats:
    """Outcome counts of one Monte Carlo batch."""

    label: str
    trials: int
    successes: int
    frequency: float
    wilson99_upper: float
    bound: float
    seed: int
    detail: dict = field(default_factory=dict)


def _stats(label: str, trials: int, successes: int, bound: float, seed: int,
           detail: dict | None = None) -> TrialStats:
    return TrialStats(label=label, trials=trials, successes=int(successes),
                      frequency=successes / trials,
                      wilson99_upper=wilson_upper(int(successes), trials),
                      bound=bound, seed=seed, detail=detail or {})


# ---------------------------------------------------------------------------
# messaging stage


@dataclass(frozen=True)
class KeyMaterial:
    """One message value's signature and recipient strings.

    sig_b/sig_c are the signer's strings, key_b/key_c the recipients'
    correlated copies; keep_b/keep_c mark the random halves each
    recipient keeps, the complements being forwarded to the other
    recipient during symmetrization.
    """

    sig_b: np.ndarray
    sig_c: np.ndarray
    key_b: np.ndarray
    key_c: np.ndarray
    keep_b: np.ndarray
    keep_c: np.ndarray

    def __post_init__(self) -> None:
        length = self.sig_b.size
        if not (self.sig_c.size == self.key_b.size == self.key_c.size == length):
            raise ValueError("all strings must share one length")
        if self.keep_b.sum() != length // 2 or self.keep_c.sum() != length // 2:
            raise ValueError("each recipient must keep exactly half of its string")

    @property
    def length(self) -> int:
        return int(self.sig_b.size)


def make_key_material(rng: np.random.Generator, length: int,
                      mismatches_b: int = 0, mismatches_c: int = 0) -> KeyMaterial:
    """Draw signature/key strings with planted mismatch counts.

    The signer's strings are uniform; each recipient string differs from
    the corresponding signature string at exactly the requested number
    of uniformly placed positions. Keep masks select a uniform random
    half per recipient.
    """
    if length % 2:
        raise ValueError(f"length must be even, got {length}")
    sig_b = rng.integers(0, 2, length, dtype=np.int8)
    sig_c = rng.integers(0, 2, length, dtype=np.int8)
    key_b, key_c = sig_b.copy(), sig_c.copy()
    for key, count in ((key_b, mismatches_b), (key_c, mismatches_c)):
        if count:
            pos = rng.choice(length, size=count, replace=False)
            key[pos] ^= 1
    keep_b = np.zeros(length, dtype=bool)
    keep_b[rng.choice(length, size=length // 2, replace=False)] = True
    keep_c = np.zeros(length, dtype=bool)
    keep_c[rng.choice(length, size=length // 2, replace=False)] = True
    return KeyMaterial(sig_b, sig_c, key_b, key_c, keep_b, keep_c)


def recipient_mismatches(km: KeyMaterial) -> tuple[int, int]:
    """Mismatch counts seen by each recipient after symmetrization.

    A recipient's symmetrized string holds its own kept half plus the
    half forwarded by the other recipient, so both views have full
    length and jointly cover every planted mismatch exactly once.
    """
    diff_b = km.key_b != km.sig_b
    diff_c = km.key_c != km.sig_c
    bob = int(diff_b[km.keep_b].sum() + diff_c[~km.keep_c].sum())
    charlie = int(diff_c[km.keep_c].sum() + diff_b[~km.keep_b].sum())
    return bob, charlie


def simulate_honest(length: int, error_rate: float, s_a: float,
                    trials: int, seed: int = 0) -> TrialStats:
    """Abort frequency of honest runs at a given channel error rate.

    Each trial draws a length-bit mismatch pattern at the given rate;
    the run aborts when the mismatch fraction reaches s_a. The attached
    bound is the Hoeffding tail exp(-2 L (s_a - rate)^2) when the rate
    sits below the threshold.
    """
    rng = np.random.default_rng(seed)
    counts = rng.binomial(length, error_rate, size=trials)
    aborts = int((counts / length >= s_a).sum())
    bound = math.exp(-2.0 * length * (s_a - error_rate) ** 2) if error_rate < s_a else 1.0
    return _stats("honest-abort", trials, aborts, bound, seed,
                  {"length": length, "error_rate": error_rate, "s_a": s_a})


def _repudiation_batch(rng: np.random.Generator, length: int, mismatches: int,
                       s_a: float, s_v: float, trials: int,
                       method: str) -> tuple[int, int, int]:
    """(successes, bob_accepts, charlie_rejects) for one mismatch count."""
    half = length // 2
    if method == "hypergeometric":
        # kept-half overlap counts are hypergeometric; the two strings
        # are exchanged independently
        h_bb = rng.hypergeometric(mismatches, length - mismatches, half, trials)
        h_cc = rng.hypergeometric(mismatches, length - mismatches, half, trials)
        bob = h_bb + (mismatches - h_cc)
        charlie = h_cc + (mismatches - h_bb)
    elif method == "bits":
        bob = np.empty(trials, dtype=np.int64)
        charlie = np.empty(trials, dtype=np.int64)
        for t in range(trials):
            km = make_key_material(rng, length, mismatches, mismatches)
            bob[t], charlie[t] = recipient_mismatches(km)
    else:
        raise ValueError(f"unknown method {method!r}")
    accept = bob / length < s_a
    reject = charlie / length >= s_v
    return int((accept & reject).sum()), int(accept.sum()), int(reject.sum())


def simulate_repudiation(length: int, s_a: float, s_v: float, trials: int,
                         seed: int = 0, mismatches: int | None = None,
                         method: str = "hypergeometric") -> TrialStats:
    """Repudiation success frequency of a mismatch-planting signer.

    Success means the first recipient accepts (fraction < s_a) while the
    second rejects the forwarded message (fraction >= s_v). With
    ``mismatches`` omitted, the per-string mismatch count is swept over
    a grid around L*(s_a+s_v)/2 and the worst (largest) empirical
    success frequency is reported. The attached bound is
    2*exp(-(1/4)(s_v-s_a)^2 L).
    """
    if not 0.0 <= s_a < s_v:
        raise ValueError(f"need 0 <= s_a < s_v, got s_a={s_a}, s_v={s_v}")
    center = length * (s_a + s_v) / 2.0
    if mismatches is None:
        grid = sorted({min(max(int(round(center * u)), 0), length)
                       for u in (0.6, 0.75, 0.9, 1.0, 1.1, 1.25, 1.4)})
    else:
        grid = [mismatches]
    bound = 2.0 * math.exp(-0.25 * (s_v - s_a) ** 2 * length)
    seq = np.random.SeedSequence(seed)
    best: tuple[int, int, int, int] | None = None  # successes, accepts, rejects, m
    for child, m in zip(seq.spawn(len(grid)), grid):
        rng = np.random.default_rng(child)
        got = _repudiation_batch(rng, length, m, s_a, s_v, trials, method)
        if best is None or got[0] > best[0]:
            best = (*got, m)
    successes, accepts, rejects, m_best = best  # type: ignore[misc]
    return _stats("repudiation", trials, successes, bound, seed,
                  {"mismatches": m_best, "bob_accepts": accepts,
                   "charlie_rejects": rejects, "length": length,
                   "s_a": s_a, "s_v": s_v, "method": method})


def simulate_forging(length: int, p_e: float, s_v: float, trials: int,
                     seed: int = 0) -> TrialStats:
    """Forging success frequency at forced error rate p_e.

    The forger errs independently at rate p_e on the unknown L/2 half
    and wins when the error fraction on that half stays below s_v. The
    attached bound is the Hoeffding tail exp(-2 (L/2) (p_e - s_v)^2)
    when p_e exceeds s_v (vacuous bound 1 otherwise).
    """
    rng = np.random.default_rng(seed)
    half = length // 2
    errors = rng.binomial(half, p_e, size=trials)
    successes = int((errors / half < s_v).sum())
    gap = p_e - s_v
    bound = math.exp(-2.0 * half * gap * gap) if gap > 0 else 1.0
    return _stats("forging", trials, successes, bound, seed,
                  {"length": length, "p_e": p_e, "s_v": s_v,
                   "bob_accepts": successes})


# ---------------------------------------------------------------------------
# coverage of the deviation functions


def validate_bound(bound: str, eps: float, trials: int, seed: int = 0,
                   population: int = 100_000, sample: int = 1_000) -> TrialStats:
    """Empirical violation frequency of one deviation bound.

    Each bound id maps to the experiment its inequality describes, with
    a worst-case-variance half-marked population:

    - ``hoeffding``: Poisson tally with mean ``population``; violation
      when the draw falls below mean - g(mean, eps).
    - ``serfling_fraction``: sample of ``sample`` items from
      ``population``; violation when the sample fraction exceeds the
      population fraction by more than the fractional deviation.
    - ``serfling_count``: same draw; violation when the unobserved
      part's count falls below its proportional estimate minus the
      count-form deviation.
    - ``sampling_lambda``: violation when the sampled count falls below
      the proportional share minus the sample deviation.
    - ``eq3_penalty``: error test with ``sample`` test bits against a
      kept half of ``population``/2 bits; violation when the kept-half
      error rate exceeds the test rate plus the penalty.

    The violation frequency is expected at or below eps in every case.
    """
    if eps < 1e-3:
        raise ValueError("coverage runs need eps >= 1e-3 to be measurable")
    rng = np.random.default_rng(seed)
    detail = {"population": population, "sample": sample, "eps": eps}
    if bound == "hoeffding":
        mean = float(population)
        draws = rng.poisson(mean, size=trials)
        violations = int((draws < mean - hoeffding_delta(mean, eps)).sum())
    elif bound in ("serfling_fraction", "serfling_count"):
        total = population
        y = sample
        x = total - y
        marked = total // 2
        k = rng.hypergeometric(marked, total - marked, y, size=trials)
        if bound == "serfling_fraction":
            lim = marked / total + serfling_fraction_gamma(x, y, eps)
            violations = int((k / y > lim).sum())
        else:
            rest = marked - k
            lim = x * k / y - serfling_count_gamma(x, y, eps)
            violations = int((rest < lim).sum())
    elif bound == "sampling_lambda":
        x = population
        y = sample
        marked = x // 2
        k = rng.hypergeometric(marked, x - marked, y, size=trials)
        lim = y * marked / x - sampling_lambda(x, y, eps)
        violations = int((k < lim).sum())
    elif bound == "eq3_penalty":
        length = population
        n_test = sample
        half = length // 2
        total = half + n_test
        marked = total // 2
        k = rng.hypergeometric(marked, total - marked, n_test, size=trials)
        rest = marked - k
        lim = k / n_test + test_sample_penalty(length, n_test, eps)
        violations = int((rest / half > lim).sum())
    else:
        raise ValueError(f"unknown bound id {bound!r}; expected one of {BOUND_IDS}")
    return _stats(bound, trials, violations, eps, seed, detail)
