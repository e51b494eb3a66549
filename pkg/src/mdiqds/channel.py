"""Expected detection statistics for a symmetric weak-coherent-pulse MDI link.

Physical model
--------------
Both senders sit distance_km/2 from the untrusted measurement node, each
arm with transmittance eta = eta_d * 10^(-alpha * (distance_km/2) / 10)
(detector efficiency folded in). Pulses carry Poissonian photon numbers
set by the chosen intensity. A measurement succeeds when both arms
produce a click, where a click is either a surviving photon (each photon
arrives independently with probability eta) or a dark count (probability
p_dc per gate). Coincidences caused by photons on both sides suffer the
misalignment error e_d; any coincidence involving a dark-only click is
random (error probability 1/2).

Photon-number sums are truncated at n, m <= PHOTON_CUTOFF; the neglected
tail is below 1e-12 relative for intensities up to ~0.4 and below 1e-8
at intensity 1.0, far inside the statistical tolerances used downstream.

Everything here is an expected-value computation, linear in the pulse
count; `sample_tallies` additionally draws integer Poisson tallies for
stochastic end-to-end runs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "PHOTON_CUTOFF",
    "SystemParams",
    "IntensityConfig",
    "TallySet",
    "SinglePhotonTruth",
    "conditional_intensity_prob",
    "expected_tallies",
    "sample_tallies",
    "single_photon_truth",
]

PHOTON_CUTOFF = 10

# Intensity index convention used throughout: 0 = signal, 1 = strong
# decoy, 2 = weak decoy.
SIGNAL, DECOY1, DECOY2 = 0, 1, 2


@dataclass(frozen=True)
class SystemParams:
    """Device constants, link geometry and statistical budget of a run.

    Attributes
    ----------
    alpha : float
        Fiber loss in dB/km.
    eta_d : float
        Detector efficiency in [0, 1].
    p_dc : float
        Dark-count probability per detection gate.
    e_d : float
        Optical misalignment error in [0, 0.5].
    distance_km : float
        Total sender-to-sender distance; the measurement node sits at
        the midpoint.
    n_pulses : float
        Total number of pulse pairs N.
    r_test : float
        Fraction of signal-basis key events sacrificed for the error
        test, in (0, 1).
    epsilon : float
        Overall security level of the protocol.
    """

    alpha: float = 0.2
    eta_d: float = 0.5
    p_dc: float = 1e-7
    e_d: float = 0.03
    distance_km: float = 100.0
    n_pulses: float = 1e12
    r_test: float = 0.055
    epsilon: float = 1e-5

    def __post_init__(self) -> None:
        if not 0.0 <= self.eta_d <= 1.0:
            raise ValueError(f"eta_d must be in [0, 1], got {self.eta_d}")
        if not 0.0 <= self.p_dc < 1.0:
            raise ValueError(f"p_dc must be in [0, 1), got {self.p_dc}")
        if not 0.0 <= self.e_d <= 0.5:
            raise ValueError(f"e_d must be in [0, 0.5], got {self.e_d}")
        if self.distance_km < 0:
            raise ValueError(f"distance_km must be >= 0, got {self.distance_km}")
        if self.n_pulses < 1:
            raise ValueError(f"n_pulses must be >= 1, got {self.n_pulses}")
        if not 0.0 < self.r_test < 1.0:
            raise ValueError(f"r_test must be in (0, 1), got {self.r_test}")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")

    @property
    def arm_transmittance(self) -> float:
        """Per-arm transmittance including detector efficiency."""
        return self.eta_d * 10.0 ** (-self.alpha * (self.distance_km / 2.0) / 10.0)


@dataclass(frozen=True)
class IntensityConfig:
    """Decoy intensities and selection probabilities for both senders.

    Alice's fields are (a_s, a_d1, a_d2) with selection probabilities
    (p_as, p_ad1, p_ad2) and basis probability p_z; the second sender
    mirrors them (b_*). Omitted b-fields default to Alice's values,
    which is the symmetric configuration used everywhere in this
    package.
    """

    a_s: float
    a_d1: float
    a_d2: float
    p_as: float
    p_ad1: float
    p_ad2: float
    p_z: float
    b_s: float = None  # type: ignore[assignment]
    b_d1: float = None  # type: ignore[assignment]
    b_d2: float = None  # type: ignore[assignment]
    p_bs: float = None  # type: ignore[assignment]
    p_bd1: float = None  # type: ignore[assignment]
    p_bd2: float = None  # type: ignore[assignment]
    p_z_b: float = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        mirror = {
            "b_s": self.a_s, "b_d1": self.a_d1, "b_d2": self.a_d2,
            "p_bs": self.p_as, "p_bd1": self.p_ad1, "p_bd2": self.p_ad2,
            "p_z_b": self.p_z,
        }
        for name, value in mirror.items():
            if getattr(self, name) is None:
                object.__setattr__(self, name, value)
        for ints, who in (((self.a_s, self.a_d1, self.a_d2), "a"),
                          ((self.b_s, self.b_d1, self.b_d2), "b")):
            s, d1, d2 = ints
            if not s > d1 > d2 >= 0.0:
                raise ValueError(f"intensities must satisfy {who}_s > {who}_d1 > {who}_d2 >= 0, got {ints}")
        for probs, who in ((self.probs_a, "a"), (self.probs_b, "b")):
            if min(probs) <= 0.0:
                raise ValueError(f"selection probabilities for {who} must be positive, got {probs}")
            if not math.isclose(sum(probs), 1.0, rel_tol=0, abs_tol=1e-9):
                raise ValueError(f"selection probabilities for {who} must sum to 1, got {sum(probs)}")
        for pz in (self.p_z, self.p_z_b):
            if not 0.0 < pz < 1.0:
                raise ValueError(f"p_z must be in (0, 1), got {pz}")

    @classmethod
    def symmetric(cls, a_s: float, a_d1: float, p_as: float, p_ad1: float,
                  p_z: float, a_d2: float = 5e-4) -> "IntensityConfig":
        """Symmetric two-sender configuration; p_ad2 = 1 - p_as - p_ad1."""
        return cls(a_s=a_s, a_d1=a_d1, a_d2=a_d2, p_as=p_as, p_ad1=p_ad1,
                   p_ad2=1.0 - p_as - p_ad1, p_z=p_z)

    @property
    def intensities_a(self) -> tuple[float, float, float]:
        return (self.a_s, self.a_d1, self.a_d2)

    @property
    def intensities_b(self) -> tuple[float, float, float]:
        return (self.b_s, self.b_d1, self.b_d2)

    @property
    def probs_a(self) -> tuple[float, float, float]:
        return (self.p_as, self.p_ad1, self.p_ad2)

    @property
    def probs_b(self) -> tuple[float, float, float]:
        return (self.p_bs, self.p_bd1, self.p_bd2)

    def basis_pair_prob(self, basis: str) -> float:
        """Probability that both senders choose the given basis."""
        if basis == "Z":
            return self.p_z * self.p_z_b
        if basis == "X":
            return (1.0 - self.p_z) * (1.0 - self.p_z_b)
        raise ValueError(f"basis must be 'Z' or 'X', got {basis!r}")

    def cell_pulse_fractions(self, basis: str) -> np.ndarray:
        """3x3 matrix of per-pulse allocation P_{W,ab} for basis W."""
        w = self.basis_pair_prob(basis)
        return w * np.outer(self.probs_a, self.probs_b)


@dataclass
class TallySet:
    """Detection statistics and pool bookkeeping for one configuration.

    counts_*/errors_* are 3x3 matrices over (Alice intensity, Bob
    intensity) with index order (signal, decoy1, decoy2); pulses_* hold
    the pulse-pair allocations N_{W,ab}. Counts are expected values in
    the default mode and integer draws in sampled mode.
    """

    n_pulses: float
    r_test: float
    counts_z: np.ndarray
    counts_x: np.ndarray
    errors_z: np.ndarray
    errors_x: np.ndarray
    pulses_z: np.ndarray
    pulses_x: np.ndarray

    def __post_init__(self) -> None:
        for errs, counts, basis in ((self.errors_z, self.counts_z, "Z"),
                                    (self.errors_x, self.counts_x, "X")):
            if np.any(errs > counts + 1e-9):
                raise ValueError(f"error counts exceed event counts in basis {basis}")

    @property
    def z_signal(self) -> float:
        """|Z^{a_s,b_s}|: events in the signal-signal Z cell."""
        return float(self.counts_z[SIGNAL, SIGNAL])

    @property
    def n_test(self) -> float:
        return self.r_test * self.z_signal

    @property
    def n_pool(self) -> float:
        return (1.0 - self.r_test) * self.z_signal

    @property
    def e_test(self) -> float:
        """Observed error rate of the signal-signal Z cell."""
        if self.z_signal == 0:
            return 0.0
        return float(self.errors_z[SIGNAL, SIGNAL]) / self.z_signal

    def basis_total(self, basis: str) -> float:
        return float((self.counts_z if basis == "Z" else self.counts_x).sum())


@dataclass
class SinglePhotonTruth:
    """Channel-model truth about the (1,1)-photon-pair component.

    s11_* are 3x3 expected counts of successful events caused by both
    senders emitting exactly one photon; e11_* are the expected error
    counts among those events. y11/e11_rate are the per-(1,1)-pair yield
    and error rate (cell independent in this channel model).
    """

    s11_z: np.ndarray
    s11_x: np.ndarray
    e11_z: np.ndarray
    e11_x: np.ndarray
    y11: float
    e11_rate: float

    @property
    def s11_z_total(self) -> float:
        return float(self.s11_z.sum())

    @property
    def s11_x_total(self) -> float:
        return float(self.s11_x.sum())

    @property
    def e11_x_total(self) -> float:
        return float(self.e11_x.sum())


def _poisson_pmf(intensities: tuple[float, float, float], n_max: int) -> np.ndarray:
    """pmf[i, n] = exp(-mu_i) mu_i^n / n! for n = 0..n_max."""
    pmf = np.empty((len(intensities), n_max + 1))
    for i, mu in enumerate(intensities):
        if mu == 0.0:
            row = np.zeros(n_max + 1)
            row[0] = 1.0
        else:
            ns = np.arange(n_max + 1)
            log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, n_max + 1)))))
            row = np.exp(-mu + ns * math.log(mu) - log_fact)
        pmf[i] = row
    return pmf


@lru_cache(maxsize=512)
def _pair_statistics(eta: float, p_dc: float, e_d: float,
                     ints_a: tuple[float, float, float],
                     ints_b: tuple[float, float, float]) -> tuple:
    """Per-pulse yield and error-rate matrices over intensity cells.

    Returns (yield[3,3], err_rate_contrib[3,3], y11, e11) where the 3x3
    matrices are already averaged over photon numbers but not yet
    weighted by basis/intensity selection probabilities.
    """
    n = np.arange(PHOTON_CUTOFF + 1)
    q = 1.0 - (1.0 - eta) ** n                      # photon-click prob given n photons
    click = 1.0 - (1.0 - q) * (1.0 - p_dc)          # threshold detector incl. dark
    yield_nm = np.outer(click, click)
    photon_pair = np.outer(q, q)
    err_nm = e_d * photon_pair + 0.5 * (yield_nm - photon_pair)

    pmf_a = _poisson_pmf(ints_a, PHOTON_CUTOFF)
    pmf_b = _poisson_pmf(ints_b, PHOTON_CUTOFF)
    cell_yield = pmf_a @ yield_nm @ pmf_b.T
    cell_err = pmf_a @ err_nm @ pmf_b.T
    y11 = float(yield_nm[1, 1])
    e11 = float(err_nm[1, 1] / yield_nm[1, 1]) if yield_nm[1, 1] > 0 else 0.0
    return cell_yield, cell_err, y11, e11


def conditional_intensity_prob(cfg: IntensityConfig, n: int, m: int, basis: str) -> np.ndarray:
    """Posterior intensity-pair probabilities p_{a,b|nm,W}.

    Bayes rule over the selection probabilities and Poisson emission:
    p_{a,b|nm,W} = P_W(a,b) Pois(n|a) Pois(m|b) / sum over (a',b').
    The returned 3x3 table sums to 1.

    Raises
    ------
    ValueError
        If n or m is negative, or the posterior is degenerate (zero
        total mass, e.g. photons claimed from all-zero intensities).
    """
    if n < 0 or m < 0:
        raise ValueError(f"photon numbers must be non-negative, got ({n}, {m})")
    pa = np.array([math.exp(-mu) * mu**n / math.factorial(n) if mu > 0 else (1.0 if n == 0 else 0.0)
                   for mu in cfg.intensities_a])
    pb = np.array([math.exp(-mu) * mu**m / math.factorial(m) if mu > 0 else (1.0 if m == 0 else 0.0)
                   for mu in cfg.intensities_b])
    joint = cfg.cell_pulse_fractions(basis) * np.outer(pa, pb)
    total = joint.sum()
    if total <= 0.0:
        raise ValueError(f"degenerate posterior: no intensity pair can emit ({n}, {m}) photons")
    return joint / total


def expected_tallies(params: SystemParams, cfg: IntensityConfig,
                     n_pulses: float | None = None) -> TallySet:
    """Expected counts/errors per basis and intensity cell.

    Parameters
    ----------
    params, cfg
        Link constants and intensity configuration.
    n_pulses : float, optional
        Overrides params.n_pulses (counts scale linearly).
    """
    n = params.n_pulses if n_pulses is None else n_pulses
    cell_yield, cell_err, _, _ = _pair_statistics(
        params.arm_transmittance, params.p_dc, params.e_d,
        cfg.intensities_a, cfg.intensities_b)
    frac_z = cfg.cell_pulse_fractions("Z")
    frac_x = cfg.cell_pulse_fractions("X")
    return TallySet(
        n_pulses=n,
        r_test=params.r_test,
        counts_z=n * frac_z * cell_yield,
        counts_x=n * frac_x * cell_yield,
        errors_z=n * frac_z * cell_err,
        errors_x=n * frac_x * cell_err,
        pulses_z=n * frac_z,
        pulses_x=n * frac_x,
    )


def sample_tallies(params: SystemParams, cfg: IntensityConfig,
                   rng: np.random.Generator,
                   n_pulses: float | None = None) -> TallySet:
    """Poisson-sampled integer tallies around the expected values.

    Counts are drawn per cell as Poisson(expected count); error counts
    as Binomial(count, cell error rate), which keeps errors <= counts.
    """
    mean = expected_tallies(params, cfg, n_pulses)
    out = {}
    for basis in ("z", "x"):
        counts = rng.poisson(getattr(mean, f"counts_{basis}")).astype(float)
        mean_counts = getattr(mean, f"counts_{basis}")
        mean_errors = getattr(mean, f"errors_{basis}")
        rate = np.divide(mean_errors, mean_counts,
                         out=np.zeros_like(mean_errors), where=mean_counts > 0)
        errors = rng.binomial(counts.astype(np.int64), rate).astype(float)
        out[f"counts_{basis}"] = counts
        out[f"errors_{basis}"] = errors
    return TallySet(n_pulses=mean.n_pulses, r_test=mean.r_test,
                    pulses_z=mean.pulses_z, pulses_x=mean.pulses_x, **out)


def single_photon_truth(params: SystemParams, cfg: IntensityConfig,
                        n_pulses: float | None = None) -> SinglePhotonTruth:
    """Expected (1,1)-pair detection statistics per basis and cell."""
    n = params.n_pulses if n_pulses is None else n_pulses
    _, _, y11, e11 = _pair_statistics(
        params.arm_transmittance, params.p_dc, params.e_d,
        cfg.intensities_a, cfg.intensities_b)
    pa1 = np.array([mu * math.exp(-mu) for mu in cfg.intensities_a])
    pb1 = np.array([mu * math.exp(-mu) for mu in cfg.intensities_b])
    pair11 = np.outer(pa1, pb1)
    s11_z = n * cfg.cell_pulse_fractions("Z") * pair11 * y11
    s11_x = n * cfg.cell_pulse_fractions("X") * pair11 * y11
    return SinglePhotonTruth(
        s11_z=s11_z, s11_x=s11_x,
        e11_z=s11_z * e11, e11_x=s11_x * e11,
        y11=y11, e11_rate=e11,
    )
