"""The three parameter-estimation pipelines and their signature rates.

All three models share one backbone: bound the single-photon-pair count
and error rate of the sifted signal-basis keys, project them onto one
signature block with without-replacement sampling deviations, derive the
forger's minimum error rate and the acceptance thresholds, and check the
three failure probabilities against the security level.

They differ in two places. The sign-one-bit model ("sob") dedicates a
whole block of N_s pulse pairs to a single signed bit, with the entire
key pool forming that bit's signature material, and searches for the
smallest self-sufficient N_s; its rate 1/N_s is independent of the total
pulse count. The two sign-multiple-bits models ("smb1", "smb2") solve
for the smallest secure signature length L and sign n_pool/(2L) bits
from the shared pool; smb1 bounds the signal-basis single-photon count
directly from signal-basis data, while smb2 transfers the X-basis count
onto the Z basis through the single-photon preparation populations.

The two key-generation pairs (signer with each recipient) are assumed
statistically identical over the symmetric link, so one channel
computation serves both and the max over recipients of any bound equals
the single-pair value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .bounds import (
    hoeffding_delta,
    sampling_lambda,
    serfling_count_gamma,
    serfling_fraction_gamma,
)
from .channel import (
    SIGNAL,
    IntensityConfig,
    SystemParams,
    TallySet,
    expected_tallies,
    single_photon_truth,
)
from .decoy import EpsTerms, single_photon_bounds
from .security import (
    SecurityBudget,
    SecurityOutcome,
    eve_error_rate,
    keep_error_bound,
    min_entropy,
    security_probabilities,
    solve_signature_length,
    thresholds,
)

__all__ = [
    "MODELS",
    "KeepBlockEstimate",
    "RateResult",
    "estimate_e_z1",
    "project_to_keep",
    "single_photon_populations",
    "estimate_n_z1_from_x",
    "signed_bits",
    "run_sob",
    "run_smb1",
    "run_smb2",
    "run_model",
]

MODELS = ("sob", "smb1", "smb2")

# Fixed, pulse-count-independent start of the geometric block-size
# bracket; keeps the sign-one-bit search identical for every total N
# above the found block size.
_SOB_BRACKET_START = 1024


def estimate_e_z1(n_z1: float, n_x1: float, m_x1: float,
                  eps_m_x1: float, eps_n_x1: float,
                  eps_gamma: float) -> tuple[float, float, EpsTerms]:
    """Signal-basis single-photon error bound from the X-basis sample.

    m_Z1 = min(ceil(n_Z1 * m_X1/n_X1 + (n_Z1 + n_X1) * gamma), n_Z1)
    with the fractional Serfling deviation gamma(n_Z1, n_X1, eps_gamma);
    e_Z1 = m_Z1 / n_Z1 (0 when n_Z1 = 0). The returned ledger carries
    the failure probabilities of the two inputs plus the sampling step.
    """
    if n_x1 <= 0:
        raise ValueError("n_x1 must be positive")
    if n_z1 < 0 or m_x1 < 0:
        raise ValueError("counts must be non-negative")
    terms: EpsTerms = (("m_X1 estimate", eps_m_x1), ("n_X1 estimate", eps_n_x1),
                       ("z-error sampling step", eps_gamma))
    if n_z1 == 0:
        return 0.0, 0.0, terms
    raw = n_z1 * (m_x1 / n_x1) + (n_z1 + n_x1) * serfling_fraction_gamma(n_z1, n_x1, eps_gamma)
    m_z1 = min(float(math.ceil(raw)), n_z1)
    return m_z1, m_z1 / n_z1, terms


@dataclass(frozen=True)
class KeepBlockEstimate:
    """Single-photon quantities projected onto the kept half-signature."""

    n_l1: float
    e_l1: float
    length: int
    feasible: bool
    eps_n_term: float
    eps_e_term: float


def project_to_keep(n_z1: float, e_z1: float, z_signal: float, length: int,
                    eps_sf: float) -> KeepBlockEstimate:
    """Project pool-level single-photon bounds onto one signature block.

    The L/2 kept bits are a without-replacement sample of the
    |Z^{a_s,b_s}| signal-cell events:

        n_L1 = n_Z1 * (L/2) / |Z| - Lambda(|Z|, L/2, eps_sf)
        e_L1 = e_Z1 + Lambda(n_Z1, n_L1, eps_sf) / n_L1

    n_L1 is floored at 0 and clamped to L/2, e_L1 capped at 1; a
    triggered floor/cap marks the estimate infeasible.
    """
    if not 2 <= length <= 2 * z_signal:
        raise ValueError(f"need 2 <= L <= 2*|Z|, got L={length}, |Z|={z_signal}")
    half = length / 2.0
    n_l1 = n_z1 * half / z_signal - sampling_lambda(z_signal, half, eps_sf)
    n_l1 = min(max(n_l1, 0.0), half)
    if n_l1 < 1.0:
        return KeepBlockEstimate(0.0, 1.0, length, False, eps_sf, eps_sf)
    e_l1 = e_z1 + sampling_lambda(n_z1, n_l1, eps_sf) / n_l1
    if e_l1 > 1.0:
        return KeepBlockEstimate(n_l1, 1.0, length, False, eps_sf, eps_sf)
    return KeepBlockEstimate(n_l1, e_l1, length, True, eps_sf, eps_sf)


def single_photon_populations(tallies: TallySet, cfg: IntensityConfig,
                              eps_sf: float) -> tuple[float, float, EpsTerms]:
    """Bounds on the single-photon preparation populations per basis.

    N-_Z1 = (a_s + b_s) e^{-a_s-b_s} N_{z,ss} - g(N_{z,ss}, eps_sf) and
    N+_X1 = sum over cells of (a+b) e^{-a-b} N_{x,ab} + g(N_{x,ab},
    eps_sf), holding jointly with confidence 1 - 9 eps_sf.

    Raises no error on a non-positive lower bound; callers treat it as
    infeasible.
    """
    n_z_ss = float(tallies.pulses_z[SIGNAL, SIGNAL])
    a_s, b_s = cfg.a_s, cfg.b_s
    n_z1_lo = (a_s + b_s) * math.exp(-a_s - b_s) * n_z_ss - hoeffding_delta(n_z_ss, eps_sf)
    n_x1_hi = 0.0
    for i, a in enumerate(cfg.intensities_a):
        for j, b in enumerate(cfg.intensities_b):
            n_x_ab = float(tallies.pulses_x[i, j])
            n_x1_hi += (a + b) * math.exp(-a - b) * n_x_ab + hoeffding_delta(n_x_ab, eps_sf)
    return n_z1_lo, n_x1_hi, (("single-photon populations", 9.0 * eps_sf),)


def estimate_n_z1_from_x(n_x1: float, n_z1_pop_lo: float, n_x1_pop_hi: float,
                         eps_sf: float) -> float:
    """Transfer the X-basis single-photon count onto the Z basis.

    n_Z1 = n_X1 * N-_Z1 / N+_X1 - gamma(N-_Z1, N+_X1, eps_sf) with the
    count-form Serfling deviation, floored at 0.
    """
    if n_x1_pop_hi < 1:
        raise ValueError(f"X population bound must be >= 1, got {n_x1_pop_hi}")
    value = n_x1 * (n_z1_pop_lo / n_x1_pop_hi) - serfling_count_gamma(
        n_z1_pop_lo, n_x1_pop_hi, eps_sf)
    return max(value, 0.0)


def signed_bits(n_pool: float, length: float) -> float:
    """Bits signable from a pool: each bit consumes 2L pool bits."""
    return n_pool / (2.0 * length)


@dataclass(frozen=True)
class RateResult:
    """Signature rate of one model at one configuration.

    rate * n_pulses == n_bits exactly on every feasible result; the
    block_size field is populated by the sign-one-bit model only.
    """

    model: str
    distance_km: float
    n_pulses: float
    feasible: bool
    rate: float = 0.0
    n_bits: float = 0.0
    length: int = 0
    block_size: int | None = None
    n_pool: float = 0.0
    n_test: float = 0.0
    n_z1: float = 0.0
    n_x1: float = 0.0
    m_x1: float = 0.0
    e_z1: float = 0.0
    n_l1: float = 0.0
    e_l1: float = 0.0
    h_min: float = 0.0
    e_test: float = 0.0
    e_keep: float = 0.0
    p_e: float = 0.0
    s_a: float = 0.0
    s_v: float = 0.0
    p_robust: float = 0.0
    p_repudiation: float = 0.0
    p_forge: float = 0.0
    eps_n_terms: EpsTerms = field(default_factory=tuple)
    eps_e_terms: EpsTerms = field(default_factory=tuple)
    config: IntensityConfig | None = None
    reason: str = ""

    @property
    def eps_n(self) -> float:
        return sum(v for _, v in self.eps_n_terms)

    @property
    def eps_e(self) -> float:
        return sum(v for _, v in self.eps_e_terms)


@dataclass(frozen=True)
class _Pipeline:
    """Length-independent state of one estimation run."""

    n_z1: float
    e_z1: float
    z_signal: float
    n_test: float
    n_pool: float
    e_test: float
    budget: SecurityBudget
    eps_n_terms: EpsTerms
    eps_e_terms: EpsTerms
    estimates: dict

    def outcome_at(self, length: int) -> SecurityOutcome:
        keep = project_to_keep(self.n_z1, self.e_z1, self.z_signal, length,
                               self.budget.eps_sf)
        eps_n = sum(v for _, v in self.eps_n_terms) + keep.eps_n_term
        eps_e = sum(v for _, v in self.eps_e_terms) + keep.eps_e_term
        e_keep = keep_error_bound(self.e_test, length, self.n_test, self.budget.eps_pe)
        p_e = eve_error_rate(keep.n_l1, keep.e_l1, length)
        s_a, s_v, ordered = thresholds(e_keep, p_e)
        p_rob, p_rep, p_forge = security_probabilities(
            s_a, s_v, length, p_e, self.budget, eps_n, eps_e)
        feasible = (keep.feasible and ordered
                    and max(p_rob, p_rep, p_forge) <= self.budget.epsilon)
        return SecurityOutcome(
            length=length, n_l1=keep.n_l1, e_l1=keep.e_l1,
            h_min=min_entropy(keep.n_l1, keep.e_l1), p_e=p_e,
            e_test=self.e_test, e_keep=e_keep, s_a=s_a, s_v=s_v,
            p_robust=p_rob, p_repudiation=p_rep, p_forge=p_forge,
            thresholds_ok=ordered, feasible=feasible)

    def full_eps_terms(self) -> tuple[EpsTerms, EpsTerms]:
        proj_n: EpsTerms = (("keep-block count projection", self.budget.eps_sf),)
        proj_e: EpsTerms = (("keep-block error projection", self.budget.eps_sf),)
        return self.eps_n_terms + proj_n, self.eps_e_terms + proj_e


def _build_pipeline(params: SystemParams, cfg: IntensityConfig,
                    budget: SecurityBudget, n_pulses: float,
                    x_derived: bool) -> _Pipeline | str:
    """Assemble the length-independent estimation state, or a failure reason."""
    tallies = expected_tallies(params, cfg, n_pulses)
    truth = single_photon_truth(params, cfg, n_pulses)
    est = single_photon_bounds(tallies, truth, eps1=budget.eps_sf,
                               eps_cell=budget.eps_sf)
    if not est.valid:
        return "decoy validity gate failed"
    if x_derived:
        pop_lo, pop_hi, pop_terms = single_photon_populations(tallies, cfg, budget.eps_sf)
        if pop_lo <= 0 or pop_hi < 1:
            return "single-photon population bound non-positive"
        n_z1 = estimate_n_z1_from_x(est.n_x1, pop_lo, pop_hi, budget.eps_sf)
        if n_z1 <= 0:
            return "x-derived signal-basis single-photon bound is zero"
        eps_n_terms = (est.eps_n_x1_terms + pop_terms
                       + (("x-to-z count transfer", budget.eps_sf),))
    else:
        n_z1 = est.n_z1
        eps_n_terms = est.eps_n_z1_terms
    _, e_z1, e_terms = estimate_e_z1(n_z1, est.n_x1, est.m_x1,
                                     eps_m_x1=est.eps_m_x1,
                                     eps_n_x1=est.eps_n_x1,
                                     eps_gamma=budget.eps_sf)
    if tallies.n_test < 1:
        return "error-test sample is empty"
    return _Pipeline(
        n_z1=n_z1, e_z1=e_z1, z_signal=tallies.z_signal,
        n_test=tallies.n_test, n_pool=tallies.n_pool, e_test=tallies.e_test,
        budget=budget, eps_n_terms=eps_n_terms, eps_e_terms=e_terms,
        estimates={"n_z1": n_z1, "n_x1": est.n_x1, "m_x1": est.m_x1, "e_z1": e_z1})


def _even_floor(x: float) -> int:
    n = int(x)
    return n - (n % 2)


def _infeasible(model: str, params: SystemParams, cfg: IntensityConfig,
                reason: str) -> RateResult:
    return RateResult(model=model, distance_km=params.distance_km,
                      n_pulses=params.n_pulses, feasible=False,
                      config=cfg, reason=reason)


def _result_from(model: str, params: SystemParams, cfg: IntensityConfig,
                 pipe: _Pipeline, outcome: SecurityOutcome, rate: float,
                 n_bits: float, block_size: int | None = None) -> RateResult:
    eps_n_terms, eps_e_terms = pipe.full_eps_terms()
    return RateResult(
        model=model, distance_km=params.distance_km, n_pulses=params.n_pulses,
        feasible=True, rate=rate, n_bits=n_bits, length=outcome.length,
        block_size=block_size, n_pool=pipe.n_pool, n_test=pipe.n_test,
        n_z1=pipe.estimates["n_z1"], n_x1=pipe.estimates["n_x1"],
        m_x1=pipe.estimates["m_x1"], e_z1=pipe.estimates["e_z1"],
        n_l1=outcome.n_l1, e_l1=outcome.e_l1, h_min=outcome.h_min,
        e_test=outcome.e_test, e_keep=outcome.e_keep, p_e=outcome.p_e,
        s_a=outcome.s_a, s_v=outcome.s_v, p_robust=outcome.p_robust,
        p_repudiation=outcome.p_repudiation, p_forge=outcome.p_forge,
        eps_n_terms=eps_n_terms, eps_e_terms=eps_e_terms, config=cfg)


def _run_smb(model: str, params: SystemParams, cfg: IntensityConfig,
             budget: SecurityBudget, length_hint: int | None = None) -> RateResult:
    pipe = _build_pipeline(params, cfg, budget, params.n_pulses,
                           x_derived=(model == "smb2"))
    if isinstance(pipe, str):
        return _infeasible(model, params, cfg, pipe)
    l_max = _even_floor(pipe.n_pool / 2.0)
    length = solve_signature_length(lambda L: pipe.outcome_at(L).feasible, l_max,
                                    hint=length_hint)
    if length is None:
        return _infeasible(model, params, cfg, "no feasible signature length")
    outcome = pipe.outcome_at(length)
    n_bits = signed_bits(pipe.n_pool, length)
    return _result_from(model, params, cfg, pipe, outcome,
                        rate=n_bits / params.n_pulses, n_bits=n_bits)


def run_smb1(params: SystemParams, cfg: IntensityConfig,
             budget: SecurityBudget | None = None,
             length_hint: int | None = None) -> RateResult:
    """Sign-multiple-bits rate with direct signal-basis estimation.

    length_hint only anchors the length search (e.g. with the solution
    of a nearby configuration); it cannot change the result.
    """
    budget = budget if budget is not None else SecurityBudget(epsilon=params.epsilon)
    return _run_smb("smb1", params, cfg, budget, length_hint)


def run_smb2(params: SystemParams, cfg: IntensityConfig,
             budget: SecurityBudget | None = None,
             length_hint: int | None = None) -> RateResult:
    """Sign-multiple-bits rate with X-basis-derived signal estimation."""
    budget = budget if budget is not None else SecurityBudget(epsilon=params.epsilon)
    return _run_smb("smb2", params, cfg, budget, length_hint)


def run_sob(params: SystemParams, cfg: IntensityConfig,
            budget: SecurityBudget | None = None) -> RateResult:
    """Sign-one-bit rate: minimal self-sufficient block of N_s pulse pairs.

    Within one block the whole key pool backs the single bit (L =
    n_pool/2 per message value). The block size search brackets
    geometrically from a fixed start, so the result does not depend on
    the total pulse count once it exceeds the found block size.
    """
    budget = budget if budget is not None else SecurityBudget(epsilon=params.epsilon)
    n_total = int(params.n_pulses)

    def block_outcome(n_s: int) -> tuple[_Pipeline, SecurityOutcome] | None:
        pipe = _build_pipeline(params, cfg, budget, float(n_s), x_derived=False)
        if isinstance(pipe, str):
            return None
        length = _even_floor(pipe.n_pool / 2.0)
        if length < 2:
            return None
        return pipe, pipe.outcome_at(length)

    def feasible(n_s: int) -> bool:
        got = block_outcome(n_s)
        return got is not None and got[1].feasible

    if not feasible(n_total):
        return _infeasible("sob", params, cfg, "no feasible block size")
    lo = 0  # exclusive lower edge; nothing below has been probed feasible
    hi = _SOB_BRACKET_START
    while hi < n_total and not feasible(hi):
        lo = hi
        hi *= 4
    if hi >= n_total:
        hi = n_total
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    pipe, outcome = block_outcome(hi)  # type: ignore[misc]
    n_bits = params.n_pulses / hi
    return _result_from("sob", params, cfg, pipe, outcome,
                        rate=1.0 / hi, n_bits=n_bits, block_size=hi)


def run_model(model: str, params: SystemParams, cfg: IntensityConfig,
              budget: SecurityBudget | None = None) -> RateResult:
    """Dispatch by model name ('sob', 'smb1' or 'smb2')."""
    try:
        runner = {"sob": run_sob, "smb1": run_smb1, "smb2": run_smb2}[model]
    except KeyError:
        raise ValueError(f"unknown model {model!r}; expected one of {MODELS}") from None
    return runner(params, cfg, budget)
