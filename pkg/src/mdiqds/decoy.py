"""Single-photon-pair bounds from decoy-state statistics.

Bounds the (1,1)-photon-pair contributions behind the observed tallies:
a lower bound on the single-photon counts in the signal-signal Z cell
(n_Z1) and across the X basis (n_X1), and an upper bound on the
single-photon error count in X (m_X1), each a Hoeffding fluctuation away
from its channel-model mean. Chernoff-style validity conditions on the
per-cell exposure mu_L gate the whole estimate: when a consumed cell is
too thin to support the concentration argument, the configuration is
reported as invalid and the caller must treat it as rate zero rather
than use an unsound bound.

Every deviation consumes a failure probability; the per-quantity sums
are carried along as explicit (label, value) ledgers so the security
layer can audit its aggregate budget.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import hoeffding_delta
from .channel import SIGNAL, SinglePhotonTruth, TallySet

__all__ = [
    "DecoyDecomposition",
    "SinglePhotonEstimate",
    "check_chernoff_conditions",
    "exposure_mu",
    "decoy_decomposition",
    "estimate_n_z1",
    "estimate_n_x1",
    "estimate_m_x1_e_x1",
    "single_photon_bounds",
]

EpsTerms = tuple[tuple[str, float], ...]


def check_chernoff_conditions(mu_l: float, eps: float, eps_hat: float) -> bool:
    """Validity of the concentration argument for exposure mu_l.

    Log-equivalent of the two inequality conditions: the exposure must
    satisfy mu_l >= (32/3) ln(2/eps) and mu_l >= 3 ln(1/eps_hat).
    """
    if mu_l <= 0:
        return False
    return mu_l >= (32.0 / 3.0) * math.log(2.0 / eps) and mu_l >= 3.0 * math.log(1.0 / eps_hat)


def exposure_mu(tallies: TallySet, cell: tuple[int, int, str], eps_cell: float) -> float:
    """Lower-bounded exposure mu_L of one intensity cell.

    mu_L = |W^{a,b}| - sqrt(sum_{a,b} |W^{a,b}| / 2 * ln(1/eps_cell)),
    where the sum runs over all cells of the same basis. May be negative
    for thin cells; callers must then fail the validity check.
    """
    a, b, basis = cell
    counts = tallies.counts_z if basis == "Z" else tallies.counts_x
    total = float(counts.sum())
    if total == 0.0:
        return 0.0
    return float(counts[a, b]) - math.sqrt(total / 2.0 * math.log(1.0 / eps_cell))


@dataclass
class DecoyDecomposition:
    """Per-cell exposure/fluctuation bookkeeping for one basis."""

    basis: str
    mu_l: np.ndarray        # 3x3 exposures
    delta: np.ndarray       # 3x3 Hoeffding fluctuations at eps_prime
    valid: np.ndarray       # 3x3 bools, Chernoff conditions per cell
    eps_cell: float
    eps_a: float
    eps_hat: float

    @property
    def eps_prime(self) -> float:
        """Aggregate per-cell failure probability."""
        return self.eps_cell + self.eps_a + self.eps_hat


def decoy_decomposition(tallies: TallySet, basis: str, eps_cell: float,
                        eps_a: float | None = None,
                        eps_hat: float | None = None) -> DecoyDecomposition:
    """Exposures, fluctuations and validity flags for every cell of a basis."""
    eps_a = eps_cell if eps_a is None else eps_a
    eps_hat = eps_cell if eps_hat is None else eps_hat
    counts = tallies.counts_z if basis == "Z" else tallies.counts_x
    mu_l = np.empty((3, 3))
    delta = np.empty((3, 3))
    valid = np.empty((3, 3), dtype=bool)
    eps_prime = eps_cell + eps_a + eps_hat
    for a in range(3):
        for b in range(3):
            mu_l[a, b] = exposure_mu(tallies, (a, b, basis), eps_cell)
            delta[a, b] = hoeffding_delta(float(counts[a, b]), eps_prime)
            valid[a, b] = check_chernoff_conditions(mu_l[a, b], eps_a, eps_hat)
    return DecoyDecomposition(basis=basis, mu_l=mu_l, delta=delta, valid=valid,
                              eps_cell=eps_cell, eps_a=eps_a, eps_hat=eps_hat)


def estimate_n_z1(tallies: TallySet, truth: SinglePhotonTruth, eps1: float) -> float:
    """Lower bound on (1,1) events in the signal-signal Z cell.

    Signal-cell mean minus its Hoeffding fluctuation, floored at 0.
    The caller treats 0 as infeasible (the protocol aborts).
    """
    mean = float(truth.s11_z[SIGNAL, SIGNAL])
    return max(mean - hoeffding_delta(mean, eps1), 0.0)


def estimate_n_x1(tallies: TallySet, truth: SinglePhotonTruth, eps1: float) -> float:
    """Lower bound on (1,1) events summed over all X-basis cells."""
    mean = truth.s11_x_total
    return max(mean - hoeffding_delta(mean, eps1), 0.0)


def estimate_m_x1_e_x1(tallies: TallySet, truth: SinglePhotonTruth, eps1: float,
                       n_x1: float | None = None,
                       deviation_sign: int = +1) -> tuple[float, float]:
    """Upper bound on (1,1) error events in X, and the error rate.

    Parameters
    ----------
    deviation_sign : int
        +1 (default) adds the Hoeffding fluctuation so m_X1 is a
        conservative upper bound; -1 subtracts it instead.
    n_x1 : float, optional
        Denominator for the rate; recomputed at eps1 when omitted.

    Returns
    -------
    (m_x1, e_x1) with e_x1 = m_x1 / n_x1 clamped to [0, 1].
    """
    if deviation_sign not in (+1, -1):
        raise ValueError(f"deviation_sign must be +1 or -1, got {deviation_sign}")
    if n_x1 is None:
        n_x1 = estimate_n_x1(tallies, truth, eps1)
    if n_x1 <= 0:
        raise ValueError("n_x1 must be positive to form the error rate")
    mean = truth.e11_x_total
    m_x1 = max(mean + deviation_sign * hoeffding_delta(mean, eps1), 0.0)
    e_x1 = min(max(m_x1 / n_x1, 0.0), 1.0)
    return m_x1, e_x1


@dataclass
class SinglePhotonEstimate:
    """Bundle of decoy bounds with their failure-probability ledgers."""

    n_z1: float
    n_x1: float
    m_x1: float
    e_x1: float
    valid: bool
    eps_n_z1_terms: EpsTerms = field(default_factory=tuple)
    eps_n_x1_terms: EpsTerms = field(default_factory=tuple)
    eps_m_x1_terms: EpsTerms = field(default_factory=tuple)

    @property
    def eps_n_z1(self) -> float:
        return sum(v for _, v in self.eps_n_z1_terms)

    @property
    def eps_n_x1(self) -> float:
        return sum(v for _, v in self.eps_n_x1_terms)

    @property
    def eps_m_x1(self) -> float:
        return sum(v for _, v in self.eps_m_x1_terms)


def single_photon_bounds(tallies: TallySet, truth: SinglePhotonTruth,
                         eps1: float, eps_cell: float,
                         deviation_sign: int = +1) -> SinglePhotonEstimate:
    """Run the validity gates and all three single-photon estimates.

    Gates: the per-cell exposure condition on the signal-signal Z cell
    (the cell n_Z1 reads) and on the X-basis aggregate (the exposure
    behind the summed n_X1/m_X1 estimates). A failed gate, or a
    non-positive n_X1, yields valid=False with zeroed estimates.

    The per-quantity failure ledgers include the estimate's own
    fluctuation (eps1) plus the gate-condition budget of the basis the
    quantity reads (three per-cell epsilons for the Z signal cell, times
    nine cells for the X aggregate).
    """
    mu_z = exposure_mu(tallies, (SIGNAL, SIGNAL, "Z"), eps_cell)
    x_total = tallies.basis_total("X")
    mu_x = (x_total - math.sqrt(x_total / 2.0 * math.log(1.0 / eps_cell))) if x_total > 0 else 0.0
    gates_ok = (check_chernoff_conditions(mu_z, eps_cell, eps_cell)
                and check_chernoff_conditions(mu_x, eps_cell, eps_cell))

    gate_z: EpsTerms = (("z-cell exposure", 3 * eps_cell),)
    gate_x: EpsTerms = (("x-cell exposures", 9 * 3 * eps_cell),)
    if not gates_ok:
        return SinglePhotonEstimate(0.0, 0.0, 0.0, 0.0, valid=False,
                                    eps_n_z1_terms=gate_z, eps_n_x1_terms=gate_x)

    n_z1 = estimate_n_z1(tallies, truth, eps1)
    n_x1 = estimate_n_x1(tallies, truth, eps1)
    if n_x1 <= 0 or n_z1 <= 0:
        return SinglePhotonEstimate(n_z1, n_x1, 0.0, 0.0, valid=False,
                                    eps_n_z1_terms=gate_z, eps_n_x1_terms=gate_x)
    m_x1, e_x1 = estimate_m_x1_e_x1(tallies, truth, eps1, n_x1=n_x1,
                                    deviation_sign=deviation_sign)
    return SinglePhotonEstimate(
        n_z1=n_z1, n_x1=n_x1, m_x1=m_x1, e_x1=e_x1, valid=True,
        eps_n_z1_terms=gate_z + (("n_Z1 fluctuation", eps1),),
        eps_n_x1_terms=gate_x + (("n_X1 fluctuation", eps1),),
        eps_m_x1_terms=(("m_X1 fluctuation", eps1),),
    )
