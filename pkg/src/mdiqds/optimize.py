"""Signature-rate parameter optimization by coordinate descent.

Local search over (a_s, a_d1, p_as, p_ad1, p_z) with the weak decoy
intensity and the error-test fraction held fixed. Each coordinate visit
tries a step in both directions and halves the step until it finds an
improvement or hits the minimum step; a full cycle that improves the
objective by less than 1e-4 relative terminates the search. Candidate
points are projected onto the feasible box/simplex before evaluation,
and infeasible protocol configurations score 0 so the search can cross
infeasible regions.

Everything is deterministic given (space, seed); multi-start draws its
extra starting points from per-start seeded generators and evaluates
them in a fixed order.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .channel import IntensityConfig, SystemParams
from .models import MODELS, RateResult, run_model, run_smb1, run_smb2
from .security import SecurityBudget

__all__ = [
    "MIN_STEP",
    "REFERENCE_VECTOR",
    "SearchSpace",
    "OptimalPoint",
    "coordinate_descent",
    "multi_start",
    "qds_search_space",
    "config_from_vector",
    "rate_objective",
    "optimize_models",
]

MIN_STEP = 1e-6
_MAX_CYCLES = 200
_REL_TOL = 1e-4

# a_s, a_d1, p_as, p_ad1, p_z: plain starting point used when nothing
# better is known (moderate signal, weak decoy, uniform selection).
REFERENCE_VECTOR = (0.4, 0.05, 1.0 / 3.0, 1.0 / 3.0, 0.5)

_QDS_NAMES = ("a_s", "a_d1", "p_as", "p_ad1", "p_z")
_PROB_LO, _PROB_HI = 1e-3, 1.0 - 1e-3


@dataclass(frozen=True)
class SearchSpace:
    """Box-constrained coordinate space with an optional projection."""

    names: tuple[str, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    initial: tuple[float, ...] | None = None
    steps: tuple[float, ...] | None = None
    project: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self) -> None:
        k = len(self.names)
        if not (len(self.lower) == len(self.upper) == k):
            raise ValueError("bounds must match the number of coordinates")
        if any(lo >= hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError("every lower bound must be below its upper bound")

    def clip_project(self, x: np.ndarray) -> np.ndarray:
        y = np.clip(x, self.lower, self.upper)
        if self.project is not None:
            y = self.project(y)
        return y

    def base_steps(self) -> np.ndarray:
        if self.steps is not None:
            return np.asarray(self.steps, dtype=float)
        return (np.asarray(self.upper) - np.asarray(self.lower)) / 20.0


@dataclass(frozen=True)
class OptimalPoint:
    """Best point found, with the accepted-value history for auditing."""

    x: tuple[float, ...]
    value: float
    cycles: int
    converged: bool
    evaluations: int
    history: tuple[float, ...]
    start_values: tuple[float, ...] = ()


def _start_vector(space: SearchSpace, seed: int) -> np.ndarray:
    if space.initial is not None:
        return space.clip_project(np.asarray(space.initial, dtype=float))
    rng = np.random.default_rng(seed)
    lo = np.asarray(space.lower)
    hi = np.asarray(space.upper)
    return space.clip_project(lo + rng.uniform(size=len(space.names)) * (hi - lo))


def coordinate_descent(objective: Callable[[np.ndarray], float],
                       space: SearchSpace, seed: int = 0) -> OptimalPoint:
    """Cyclic coordinate descent with backtracking step halving.

    Each coordinate visit starts from (twice) the step that last worked
    for that coordinate, halves on failure down to MIN_STEP, and walks
    repeatedly in an accepted direction while the objective keeps
    improving. Only strict improvements are accepted, so the value
    history is strictly increasing.
    """
    x = _start_vector(space, seed)
    f = float(objective(x))
    evaluations = 1
    history = [f]
    base = space.base_steps()
    cur_step = base.copy()
    converged = False
    cycle = 0
    for cycle in range(1, _MAX_CYCLES + 1):
        f_start = f
        for i in range(len(space.names)):
            step = min(base[i], cur_step[i] * 2.0)
            while step >= MIN_STEP:
                moved = False
                for direction in (+1.0, -1.0):
                    cand = x.copy()
                    cand[i] += direction * step
                    cand = space.clip_project(cand)
                    fc = float(objective(cand))
                    evaluations += 1
                    if fc > f:
                        x, f = cand, fc
                        history.append(fc)
                        moved = True
                        # keep walking while the same move pays off
                        while True:
                            cand = x.copy()
                            cand[i] += direction * step
                            cand = space.clip_project(cand)
                            fc = float(objective(cand))
                            evaluations += 1
                            if fc > f:
                                x, f = cand, fc
                                history.append(fc)
                            else:
                                break
                        break
                if moved:
                    cur_step[i] = step
                    break
                step /= 2.0
            else:
                cur_step[i] = MIN_STEP
        if f - f_start <= _REL_TOL * abs(f_start):
            converged = True
            break
    return OptimalPoint(x=tuple(float(v) for v in x), value=f, cycles=cycle,
                        converged=converged, evaluations=evaluations,
                        history=tuple(history))


def multi_start(objective: Callable[[np.ndarray], float], space: SearchSpace,
                k: int, seed: int = 0) -> OptimalPoint:
    """Best of k coordinate-descent runs; start 0 is the plain run.

    Extra starts are uniform draws over the box; a draw sitting on the
    zero plateau (local search cannot leave it) is repaired by halving
    towards the first run's solution until the objective turns positive,
    keeping every start useful while staying deterministic in the seed.
    """
    if k < 1:
        raise ValueError(f"start count must be >= 1, got {k}")
    results = [coordinate_descent(objective, space, seed)]
    anchor = np.asarray(results[0].x)
    for i in range(1, k):
        rng = np.random.default_rng([seed, i])
        lo = np.asarray(space.lower)
        hi = np.asarray(space.upper)
        x0 = space.clip_project(lo + rng.uniform(size=len(space.names)) * (hi - lo))
        if results[0].value > 0.0:
            for _ in range(8):
                if objective(x0) > 0.0:
                    break
                x0 = space.clip_project(0.5 * (x0 + anchor))
        start_space = replace(space, initial=tuple(float(v) for v in x0))
        results.append(coordinate_descent(objective, start_space, seed))
    best = max(results, key=lambda r: r.value)
    return replace(best, start_values=tuple(r.value for r in results))


def _qds_projection(a_d2: float) -> Callable[[np.ndarray], np.ndarray]:
    """Restore intensity ordering and the selection-probability simplex."""

    def project(x: np.ndarray) -> np.ndarray:
        y = x.copy()
        y[1] = min(max(y[1], a_d2 + 1e-4), 0.3)      # a_d1
        y[0] = min(max(y[0], y[1] + 1e-3), 1.0)      # a_s above a_d1
        y[2] = min(max(y[2], _PROB_LO), _PROB_HI)    # p_as
        y[3] = min(max(y[3], _PROB_LO), _PROB_HI)    # p_ad1
        excess = y[2] + y[3]
        if excess > 1.0 - _PROB_LO:                  # keep p_ad2 >= floor
            scale = (1.0 - _PROB_LO) / excess
            y[2] *= scale
            y[3] *= scale
        y[4] = min(max(y[4], _PROB_LO), _PROB_HI)    # p_z
        return y

    return project


def qds_search_space(initial: Sequence[float] | None = REFERENCE_VECTOR,
                     a_d2: float = 5e-4) -> SearchSpace:
    """Search space over (a_s, a_d1, p_as, p_ad1, p_z)."""
    return SearchSpace(
        names=_QDS_NAMES,
        lower=(a_d2 + 1e-4 + 1e-3, a_d2 + 1e-4, _PROB_LO, _PROB_LO, _PROB_LO),
        upper=(1.0, 0.3, _PROB_HI, _PROB_HI, _PROB_HI),
        initial=None if initial is None else tuple(initial),
        steps=(0.05, 0.01, 0.05, 0.05, 0.05),
        project=_qds_projection(a_d2),
    )


def config_from_vector(x: Sequence[float], a_d2: float = 5e-4) -> IntensityConfig:
    a_s, a_d1, p_as, p_ad1, p_z = (float(v) for v in x)
    return IntensityConfig.symmetric(a_s=a_s, a_d1=a_d1, p_as=p_as,
                                     p_ad1=p_ad1, p_z=p_z, a_d2=a_d2)


def rate_objective(params: SystemParams, model: str,
                   budget: SecurityBudget | None = None,
                   a_d2: float = 5e-4) -> Callable[[np.ndarray], float]:
    """Objective config-vector -> signature rate; 0 on any infeasibility.

    For the multiple-bit models the previous call's signature length
    seeds the next length search (pure speed-up: the solver re-verifies
    minimality, and the evaluation order is fixed, so trajectories stay
    deterministic).
    """
    hint: list[int | None] = [None]

    def objective(x: np.ndarray) -> float:
        try:
            cfg = config_from_vector(x, a_d2)
        except ValueError:
            return 0.0
        if model in ("smb1", "smb2"):
            runner = run_smb1 if model == "smb1" else run_smb2
            result = runner(params, cfg, budget, length_hint=hint[0])
            if result.feasible:
                hint[0] = result.length
        else:
            result = run_model(model, params, cfg, budget)
        return result.rate

    return objective


def optimize_models(params: SystemParams, models: Sequence[str] = MODELS,
                    budget: SecurityBudget | None = None, seed: int = 0,
                    starts: int = 1, a_d2: float = 5e-4,
                    initial: Sequence[float] | None = None) -> dict[str, RateResult]:
    """Optimize each model, then cross-evaluate the pooled optima.

    Every model is re-evaluated at every model's best configuration, at
    the plain reference vector and at the supplied warm start, and keeps
    its own argmax. The pooling costs a handful of extra evaluations and
    removes spurious cross-model rate inversions caused by one local
    search stopping short of a configuration another search found.

    Parameters
    ----------
    initial : sequence of float, optional
        Warm-start vector (e.g. the optimum of a neighbouring sweep
        point); the reference vector is used when omitted.
    """
    start = tuple(REFERENCE_VECTOR) if initial is None else tuple(initial)
    space = qds_search_space(initial=start, a_d2=a_d2)
    candidates: list[tuple[float, ...]] = [tuple(REFERENCE_VECTOR), start]
    for model in models:
        point = multi_start(rate_objective(params, model, budget, a_d2),
                            space, k=starts, seed=seed)
        candidates.append(point.x)
    out: dict[str, RateResult] = {}
    for model in models:
        best: RateResult | None = None
        for vec in candidates:
            result = run_model(model, params, config_from_vector(vec, a_d2), budget)
            if best is None or result.rate > best.rate:
                best = result
        out[model] = best  # type: ignore[assignment]
    return out
