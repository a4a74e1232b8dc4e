"""
Projective spin measurements.

Born distributions, collapse onto canonical axis eigenstates, seeded
sampling and sequential Stern-Gerlach chains with post-selection.

Sampling uses numpy's PCG64 generator. An outcome is drawn by inverse CDF
over the descending-m ordering: the first index whose cumulative
probability exceeds a uniform draw u in [0, 1). Because collapse always
lands on the canonical eigenstate |m>_axis, a chain of measurements is a
Markov chain whose kernel between consecutive axes is
|<m'|_next |m>_prev|^2; `run_sequence` samples whole batches with that
kernel, one uniform vector per step.
"""

from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy import stats

from utils.tool_config import ToolConfig
from .errors import EnumerationBoundError, ImpossibleOutcomeError, SpinValidationError
from .rotation import Axis, axis_eigenstate, eigenbasis, exact_pi_half_probabilities
from .spin_core import Spin, StateVector, format_half

logger = logging.getLogger(__name__)

_CONFIG = ToolConfig()

Chain = tuple[int, ...]


@dataclass(frozen=True)
class MeasurementRecord:
    """One sampled outcome."""
    axis: Axis
    twice_m: int
    probability: float

    def __post_init__(self):
        if not 0.0 <= self.probability <= 1.0:
            raise SpinValidationError(f"probability {self.probability!r} outside [0, 1]")

    def to_json(self) -> dict:
        return {"axis": self.axis.to_json(), "twice_m": self.twice_m, "probability": self.probability}


@dataclass(frozen=True)
class Condition:
    """Post-selection on the outcome of one step of a chain."""
    step: int
    twice_m: int

    def to_json(self) -> dict:
        return {"step": self.step, "twice_m": self.twice_m}


@dataclass(frozen=True)
class SequenceStats:
    """
    Aggregated outcome chains of repeated sequential runs.

    `shots` counts every run; `accepted` counts the runs kept by the
    condition (all of them when there is none). Counts sum to `accepted`.
    """
    spin: Spin
    axes: tuple[Axis, ...]
    shots: int
    seed: int
    counts: Mapping[Chain, int]
    accepted: int
    condition: Optional[Condition] = None

    def __post_init__(self):
        if sum(self.counts.values()) != self.accepted:
            raise SpinValidationError("chain counts must sum to the accepted shots")
        if self.accepted > self.shots:
            raise SpinValidationError("accepted shots exceed total shots")
        ordered = dict(sorted(self.counts.items(), key=lambda kv: tuple(-m for m in kv[0])))
        object.__setattr__(self, "counts", ordered)
        object.__setattr__(self, "axes", tuple(self.axes))

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.shots

    def marginal(self, step: int) -> dict[int, int]:
        """Counts per outcome at one step, over the whole spectrum."""
        if not 0 <= step < len(self.axes):
            raise SpinValidationError(f"step {step} outside chain of length {len(self.axes)}")
        out = {m: 0 for m in self.spin.twice_ms}
        for chain, count in self.counts.items():
            out[chain[step]] += count
        return out

    def final_counts(self) -> dict[int, int]:
        return self.marginal(len(self.axes) - 1)

    def merge(self, other: "SequenceStats") -> "SequenceStats":
        """Combine two runs of the same experiment; order does not matter."""
        if (self.spin, self.axes, self.condition) != (other.spin, other.axes, other.condition):
            raise SpinValidationError("can only merge runs of the same experiment")
        return SequenceStats(
            spin=self.spin,
            axes=self.axes,
            shots=self.shots + other.shots,
            seed=min(self.seed, other.seed),
            counts=dict(Counter(self.counts) + Counter(other.counts)),
            accepted=self.accepted + other.accepted,
            condition=self.condition,
        )

    def to_json(self) -> dict:
        return {
            "spin": self.spin.to_json(),
            "axes": [axis.to_json() for axis in self.axes],
            "shots": self.shots,
            "seed": self.seed,
            "condition": self.condition.to_json() if self.condition else None,
            "accepted": self.accepted,
            "counts": [{"chain": list(chain), "count": count} for chain, count in self.counts.items()],
        }

    def csv_rows(self) -> list[tuple[str, int]]:
        return [(" ".join(format_half(m, signed=True) for m in chain), count)
                for chain, count in self.counts.items()]


@dataclass(frozen=True)
class GoodnessOfFit:
    """Pearson chi-square result after pooling sparse bins."""
    statistic: float
    degrees: int
    passed: bool
    p_value: float
    critical: float

    def to_json(self) -> dict:
        return {
            "statistic": self.statistic,
            "degrees": self.degrees,
            "critical": self.critical,
            "p_value": self.p_value,
            "pass": self.passed,
        }


def _check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0:
        raise SpinValidationError(f"seed must be a non-negative integer, got {seed!r}")
    return int(seed)


def make_generator(seed: int) -> np.random.Generator:
    """The pinned bit generator: PCG64. Seeds are non-negative integers."""
    _check_seed(seed)
    return np.random.Generator(np.random.PCG64(seed))


def _probabilities(state: StateVector, spin: Spin, axis: Axis) -> np.ndarray:
    state.check_spin(spin)
    probs = np.abs(eigenbasis(spin, axis).conj().T @ state.amplitudes) ** 2
    total = probs.sum()
    if abs(total - 1.0) > _CONFIG.COMPOSED_TOL:
        raise SpinValidationError(f"Born probabilities sum to {total!r}")
    return probs / total


def born_distribution(state: StateVector, spin: Spin, axis: Axis) -> list[tuple[int, float]]:
    """p_m = |<m|_axis state>|^2, descending m."""
    return [(m, float(p)) for m, p in zip(spin.twice_ms, _probabilities(state, spin, axis))]


def project(state: StateVector, spin: Spin, axis: Axis, twice_m: int) -> tuple[StateVector, float]:
    """Collapse onto |m>_axis; returns the eigenstate and the Born probability."""
    index = spin.index_of(twice_m)
    probability = float(_probabilities(state, spin, axis)[index])
    if probability < _CONFIG.IMPOSSIBLE_OUTCOME_PROB:
        logger.warning("rejected projection onto m=%s along %s (p=%.3e)",
                       format_half(twice_m), axis.label, probability)
        raise ImpossibleOutcomeError(twice_m, probability)
    return axis_eigenstate(spin, twice_m, axis), min(probability, 1.0)


def predictable_with_certainty(state: StateVector, spin: Spin, axis: Axis) -> Optional[int]:
    """The outcome whose probability is >= 1 - 1e-10, if any."""
    for m, p in born_distribution(state, spin, axis):
        if p >= 1.0 - _CONFIG.CERTAINTY_TOL:
            return m
    return None


def _cdf(probs: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(probs, axis=-1)
    return cdf / cdf[..., -1:]


def _inverse_cdf(cdf: np.ndarray, u):
    """First index with cdf > u."""
    return np.searchsorted(cdf, u, side="right")


def sample_outcome(state: StateVector, spin: Spin, axis: Axis,
                   rng: np.random.Generator) -> tuple[MeasurementRecord, StateVector]:
    """Draw one Born outcome and collapse."""
    probs = _probabilities(state, spin, axis)
    index = int(_inverse_cdf(_cdf(probs), rng.random()))
    twice_m = spin.twice_ms[index]
    record = MeasurementRecord(axis, twice_m, float(min(probs[index], 1.0)))
    return record, axis_eigenstate(spin, twice_m, axis)


def sample_outcomes(state: StateVector, spin: Spin, axis: Axis,
                    rng: np.random.Generator, size: int) -> np.ndarray:
    """Vectorized `sample_outcome` without collapse: `size` twice_m values."""
    if size < 1:
        raise SpinValidationError(f"size must be positive, got {size}")
    indices = _inverse_cdf(_cdf(_probabilities(state, spin, axis)), rng.random(size))
    return np.asarray(spin.twice_ms)[indices]


def transition_matrix(spin: Spin, from_axis: Axis, to_axis: Axis) -> np.ndarray:
    """T[i, j] = |<m_j|_to |m_i>_from|^2."""
    overlaps = eigenbasis(spin, from_axis).conj().T @ eigenbasis(spin, to_axis)
    return np.abs(overlaps) ** 2


def _check_condition(spin: Spin, axes: Sequence[Axis],
                     condition: Optional[Condition]) -> Optional[Condition]:
    if condition is None:
        return None
    if not 0 <= condition.step < len(axes):
        raise SpinValidationError(
            f"condition step {condition.step} outside chain of length {len(axes)}"
        )
    spin.check_twice_m(condition.twice_m)
    return condition


def _run_batch(first_cdf: np.ndarray, kernels: list[np.ndarray], size: int,
               seed: int, condition_index: Optional[tuple[int, int]]) -> tuple[Counter, int]:
    rng = make_generator(seed)
    steps = 1 + len(kernels)
    outcomes = np.empty((size, steps), dtype=np.int64)
    outcomes[:, 0] = _inverse_cdf(first_cdf, rng.random(size))
    for k, kernel_cdf in enumerate(kernels, start=1):
        rows = kernel_cdf[outcomes[:, k - 1]]
        outcomes[:, k] = (rows <= rng.random(size)[:, None]).sum(axis=1)
    if condition_index is not None:
        step, index = condition_index
        outcomes = outcomes[outcomes[:, step] == index]
    counts: Counter = Counter()
    if outcomes.shape[0]:
        chains, tallies = np.unique(outcomes, axis=0, return_counts=True)
        for chain, tally in zip(chains, tallies):
            counts[tuple(int(i) for i in chain)] = int(tally)
    return counts, int(outcomes.shape[0])


def run_sequence(spin: Spin, initial: StateVector, axes: Sequence[Axis], shots: int,
                 seed: int, condition: Optional[Condition] = None,
                 workers: int = 1, batch_shots: Optional[int] = None) -> SequenceStats:
    """
    Repeat the measurement chain `shots` times.

    Shots are split into batches of `batch_shots`; batch b draws from
    PCG64(seed + b). Batches may run on several workers and are merged in
    batch order, so the result depends only on (inputs, seed, batch_shots).
    Runs whose outcome at `condition.step` differs from `condition.twice_m`
    are discarded but still counted in `shots`.
    """
    if shots < 1:
        raise SpinValidationError(f"shots must be positive, got {shots}")
    if not axes:
        raise SpinValidationError("at least one measurement axis is required")
    seed = _check_seed(seed)
    initial.check_spin(spin)
    axes = tuple(axes)
    condition = _check_condition(spin, axes, condition)
    batch_shots = batch_shots or _CONFIG.BATCH_SHOTS

    first_cdf = _cdf(_probabilities(initial, spin, axes[0]))
    kernels = [_cdf(transition_matrix(spin, a, b)) for a, b in zip(axes, axes[1:])]
    condition_index = (condition.step, spin.index_of(condition.twice_m)) if condition else None

    sizes = [min(batch_shots, shots - start) for start in range(0, shots, batch_shots)]
    jobs = [(first_cdf, kernels, size, seed + b, condition_index) for b, size in enumerate(sizes)]
    logger.info("running %d shots of %s on spin %s in %d batches (%d workers)",
                shots, "->".join(a.label for a in axes), spin.label, len(jobs), workers)
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda job: _run_batch(*job), jobs))
    else:
        results = [_run_batch(*job) for job in jobs]

    total: Counter = Counter()
    accepted = 0
    for counts, kept in results:
        total.update(counts)
        accepted += kept
    ms = spin.twice_ms
    chain_counts = {tuple(ms[i] for i in chain): n for chain, n in total.items()}
    logger.info("accepted %d of %d shots", accepted, shots)
    return SequenceStats(spin, axes, shots, seed, chain_counts, accepted, condition)


def _exact_kernel(spin: Spin, from_axis: str, to_axis: str) -> list[list[Fraction]]:
    ms = spin.twice_ms
    if from_axis == to_axis:
        return [[Fraction(int(i == j)) for j in range(spin.dim)] for i in range(spin.dim)]
    # distinct principal axes are related by a quarter turn about a perpendicular axis
    return [[exact_pi_half_probabilities(spin, a, b) for b in ms] for a in ms]


def exact_final_distribution(spin: Spin, initial_axis: Axis, initial_twice_m: int,
                             axes: Sequence[Axis],
                             condition: Optional[Condition] = None) -> Optional[list[tuple[int, Fraction]]]:
    """
    Exact distribution of the last outcome of a chain started in |m>_initial,
    conditioned on `condition`. Returns None unless every axis is x, y or z,
    and for spins beyond the exact quarter-turn bound.
    """
    names = [initial_axis.principal_name()] + [a.principal_name() for a in axes]
    if any(name is None for name in names):
        return None
    condition = _check_condition(spin, axes, condition)
    weights = [Fraction(int(m == initial_twice_m)) for m in spin.twice_ms]
    for step, (prev, cur) in enumerate(zip(names, names[1:])):
        try:
            kernel = _exact_kernel(spin, prev, cur)
        except EnumerationBoundError as e:
            logger.info("no exact distribution: %s", e)
            return None
        weights = [sum(weights[i] * kernel[i][j] for i in range(spin.dim)) for j in range(spin.dim)]
        if condition is not None and condition.step == step:
            keep = spin.index_of(condition.twice_m)
            weights = [w if j == keep else Fraction(0) for j, w in enumerate(weights)]
    total = sum(weights)
    if total == 0:
        return None
    return [(m, w / total) for m, w in zip(spin.twice_ms, weights)]


def _critical_value(degrees: int) -> float:
    if degrees in _CONFIG.CHI2_CRITICAL:
        return _CONFIG.CHI2_CRITICAL[degrees]
    return float(stats.chi2.isf(_CONFIG.CHI2_SIGNIFICANCE, degrees))


def _pool_bins(observed: np.ndarray, expected: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Merge every bin with expected count < 5 into one; fold a still-small pool into the smallest bin."""
    small = expected < _CONFIG.CHI2_MIN_EXPECTED
    if not small.any():
        return observed, expected
    obs = list(observed[~small])
    exp = list(expected[~small])
    pool_obs, pool_exp = observed[small].sum(), expected[small].sum()
    if pool_exp >= _CONFIG.CHI2_MIN_EXPECTED or not exp:
        obs.append(pool_obs)
        exp.append(pool_exp)
    else:
        target = int(np.argmin(exp))
        obs[target] += pool_obs
        exp[target] += pool_exp
    return np.asarray(obs, dtype=np.float64), np.asarray(exp, dtype=np.float64)


def chi_square_gof(observed: Sequence[int], expected: Sequence[float], shots: int) -> GoodnessOfFit:
    """Pearson chi-square of observed counts against probabilities, at p = 0.001."""
    if shots <= 0:
        raise SpinValidationError("chi-square test needs at least one shot")
    obs = np.asarray(observed, dtype=np.float64)
    probs = np.asarray(expected, dtype=np.float64)
    if obs.shape != probs.shape:
        raise SpinValidationError(f"bin mismatch: {obs.shape} observed vs {probs.shape} expected")
    if abs(probs.sum() - 1.0) > 1e-9:
        raise SpinValidationError(f"expected probabilities sum to {probs.sum()!r}")
    if obs.sum() != shots:
        raise SpinValidationError(f"observed counts sum to {obs.sum():g}, not {shots} shots")
    obs, exp = _pool_bins(obs, probs * shots)
    degrees = len(exp) - 1
    if degrees < 1:
        return GoodnessOfFit(0.0, 0, True, 1.0, float("inf"))
    result = stats.chisquare(obs, exp)
    statistic = float(result.statistic)
    critical = _critical_value(degrees)
    return GoodnessOfFit(statistic, degrees, statistic < critical, float(result.pvalue), critical)
