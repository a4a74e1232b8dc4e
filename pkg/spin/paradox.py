"""
The realism paradox for sequential spin measurements.

If S_x = s and S_z = s both held as pre-existing values between two
measurements, then S_x^2 + S_y^2 + S_z^2 >= 2 s^2, while S^2 = s(s+1) on a
spin-s particle. For s > 1 the two cannot both hold. This module checks
the inequality, enumerates candidate value assignments (v_x, v_y, v_z)
over the spectrum, and computes the operator facts behind it.

Assignment arithmetic is exact: values are kept as twice_v integers and
squares are compared in quarter units.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import product
from typing import Optional

import numpy as np

from utils.tool_config import ToolConfig
from .errors import EnumerationBoundError, InvariantViolation, SpinValidationError
from .rotation import exact_pi_half_probabilities
from .spin_core import Spin, casimir, commutator, format_half, spin_operators, squared

logger = logging.getLogger(__name__)

_CONFIG = ToolConfig()


class AssignmentMode(Enum):
    EXACT_SUM_RULE = "exact_sum_rule"
    POSITIVITY_BOUND = "positivity_bound"


@dataclass(frozen=True)
class Assignment:
    """Hypothetical pre-existing values (v_x, v_y, v_z), each twice_v in the spectrum."""
    twice_vx: int
    twice_vy: int
    twice_vz: int

    @property
    def values(self) -> tuple[Fraction, Fraction, Fraction]:
        return tuple(Fraction(t, 2) for t in (self.twice_vx, self.twice_vy, self.twice_vz))

    @property
    def quarter_squares(self) -> tuple[int, int, int]:
        """4 v_i^2 for each component."""
        return (self.twice_vx ** 2, self.twice_vy ** 2, self.twice_vz ** 2)

    def check(self, spin: Spin) -> "Assignment":
        for t in (self.twice_vx, self.twice_vy, self.twice_vz):
            spin.check_twice_m(t)
        return self

    def label(self) -> str:
        return "(" + ", ".join(format_half(t) for t in (self.twice_vx, self.twice_vy, self.twice_vz)) + ")"

    def to_json(self) -> dict:
        return {"twice_vx": self.twice_vx, "twice_vy": self.twice_vy, "twice_vz": self.twice_vz}


def _fraction_json(q: Fraction) -> dict:
    return {"num": q.numerator, "den": q.denominator}


@dataclass(frozen=True)
class ParadoxReport:
    """Max-max inequality for one spin, with the probability of observing that event."""
    spin: Spin
    lhs: Fraction
    rhs: Fraction
    violated: bool
    min_sy_squared_needed: Fraction
    joint_probability: Fraction

    def __post_init__(self):
        if not (self.violated == (self.lhs > self.rhs) == (self.spin.twice_s > 2)):
            raise InvariantViolation(
                f"paradox characterizations disagree for s={self.spin.label}: "
                f"violated={self.violated}, 2s^2={self.lhs}, s(s+1)={self.rhs}"
            )

    def to_json(self) -> dict:
        return {
            "twice_s": self.spin.twice_s,
            "lhs": float(self.lhs),
            "rhs": float(self.rhs),
            "violated": self.violated,
            "min_sy_squared_needed": float(self.min_sy_squared_needed),
            "joint_probability": _fraction_json(self.joint_probability),
        }


@dataclass(frozen=True)
class VonNeumannWitness:
    """Size of [S_x^2, S_z^2] in hbar^4."""
    commutator_max_abs: float
    nonzero: bool

    def to_json(self) -> dict:
        return {"commutator_max_abs": self.commutator_max_abs, "nonzero": self.nonzero}


@dataclass(frozen=True)
class SumSpectrum:
    """
    Eigenvalues of the operator S_x^2 + S_z^2 set against the sums v_x^2 + v_z^2
    of spectrum values. The eigenvalues are s(s+1) - m_y^2, so the largest is s(s+1) for
    integer s and s(s+1) - 1/4 for half-integer s; the largest value sum is 2 s^2.
    """
    spin: Spin
    operator_eigenvalues: tuple[float, ...]
    value_sums: tuple[Fraction, ...]

    @property
    def max_eigenvalue(self) -> float:
        return max(self.operator_eigenvalues)

    @property
    def max_value_sum(self) -> Fraction:
        return max(self.value_sums)

    @property
    def unreachable_sums(self) -> tuple[Fraction, ...]:
        """Value sums that are not eigenvalues of the summed operator."""
        eig = np.asarray(self.operator_eigenvalues)
        return tuple(v for v in self.value_sums
                     if not np.any(np.abs(eig - float(v)) < _CONFIG.COMPOSED_TOL))

    def to_json(self) -> dict:
        return {
            "operator_eigenvalues": list(self.operator_eigenvalues),
            "value_sums": [float(v) for v in self.value_sums],
            "unreachable_sums": [float(v) for v in self.unreachable_sums],
        }


@dataclass(frozen=True)
class FalsificationReport:
    """Can v_x and v_z be pre-existing values together, given S^2 = s(s+1)?"""
    spin: Spin
    twice_vx: int
    twice_vz: int
    required_vy_squared: Fraction
    max_vy_squared: Fraction
    positivity_ok: bool
    witnesses: tuple[Assignment, ...]
    reason: str

    @property
    def feasible(self) -> bool:
        return bool(self.witnesses)

    def to_json(self) -> dict:
        return {
            "spin": self.spin.to_json(),
            "twice_vx": self.twice_vx,
            "twice_vz": self.twice_vz,
            "required_vy_squared": float(self.required_vy_squared),
            "max_vy_squared": float(self.max_vy_squared),
            "positivity_ok": self.positivity_ok,
            "feasible": self.feasible,
            "witnesses": [w.to_json() for w in self.witnesses],
            "reason": self.reason,
        }


def paradox_condition(spin: Spin) -> ParadoxReport:
    s = spin.s
    lhs = 2 * s * s
    rhs = spin.casimir_value
    return ParadoxReport(
        spin=spin,
        lhs=lhs,
        rhs=rhs,
        violated=lhs > rhs,
        min_sy_squared_needed=rhs - lhs,
        joint_probability=exact_pi_half_probabilities(spin, spin.twice_s, spin.twice_s),
    )


def _check_enumerable(spin: Spin):
    if spin.twice_s > _CONFIG.MAX_ENUMERATION_TWICE_S:
        raise EnumerationBoundError(
            f"assignment enumeration supports s <= {format_half(_CONFIG.MAX_ENUMERATION_TWICE_S)}, "
            f"got s={spin.label}"
        )


def enumerate_assignments(spin: Spin, mode: AssignmentMode) -> list[Assignment]:
    """
    All triples over the spectrum cube satisfying the mode's constraint:
    exact sum rule v_x^2 + v_y^2 + v_z^2 = s(s+1), or the positivity bound
    v_x^2 + v_z^2 <= s(s+1) with v_y unconstrained.
    """
    _check_enumerable(spin)
    ms = spin.twice_ms
    target = spin.twice_s * (spin.twice_s + 2)  # 4 s(s+1)
    found = []
    for tx, ty, tz in product(ms, ms, ms):
        if mode is AssignmentMode.EXACT_SUM_RULE:
            ok = tx * tx + ty * ty + tz * tz == target
        else:
            ok = tx * tx + tz * tz <= target
        if ok:
            found.append(Assignment(tx, ty, tz))
    logger.debug("%s: %d of %d triples for s=%s", mode.value, len(found), len(ms) ** 3, spin.label)
    return found


def max_max_witness(spin: Spin) -> Optional[Assignment]:
    """An exact-sum-rule assignment with |v_x| = |v_z| = s, if one exists."""
    for a in enumerate_assignments(spin, AssignmentMode.EXACT_SUM_RULE):
        if abs(a.twice_vx) == spin.twice_s and abs(a.twice_vz) == spin.twice_s:
            return a
    return None


def max_max_assignment_feasible(spin: Spin) -> bool:
    feasible = max_max_witness(spin) is not None
    if feasible == paradox_condition(spin).violated:
        raise InvariantViolation(f"enumeration and inequality disagree for s={spin.label}")
    return feasible


def falsify(spin: Spin, twice_vx: int, twice_vz: int) -> FalsificationReport:
    """Check the pair (v_x, v_z) against the sum rule; report witnesses or why none exist."""
    spin.check_twice_m(twice_vx)
    spin.check_twice_m(twice_vz)
    required = spin.casimir_value - Fraction(twice_vx ** 2 + twice_vz ** 2, 4)
    max_vy_squared = spin.s * spin.s
    witnesses = tuple(
        a for a in enumerate_assignments(spin, AssignmentMode.EXACT_SUM_RULE)
        if a.twice_vx == twice_vx and a.twice_vz == twice_vz
    )
    if witnesses:
        reason = "v_y = " + " or ".join(format_half(w.twice_vy) for w in witnesses)
    elif required < 0:
        reason = f"required v_y^2 = {required} is negative"
    elif required > max_vy_squared:
        reason = f"required v_y^2 = {required} exceeds the largest available {max_vy_squared}"
    else:
        reason = f"required v_y^2 = {required} is not the square of a spectrum value"
    return FalsificationReport(
        spin=spin,
        twice_vx=twice_vx,
        twice_vz=twice_vz,
        required_vy_squared=required,
        max_vy_squared=max_vy_squared,
        positivity_ok=required >= 0,
        witnesses=witnesses,
        reason=reason,
    )


def von_neumann_witness(spin: Spin) -> VonNeumannWitness:
    s_x, _, s_z = spin_operators(spin)
    size = commutator(squared(s_x), squared(s_z)).max_abs()
    return VonNeumannWitness(size, size > _CONFIG.COMPOSED_TOL)


def sum_operator_spectrum(spin: Spin) -> SumSpectrum:
    s_x, _, s_z = spin_operators(spin)
    summed = squared(s_x) + squared(s_z)
    eigenvalues = np.linalg.eigvalsh(summed.entries)[::-1]
    ms = spin.twice_ms
    sums = sorted({Fraction(a * a + b * b, 4) for a in ms for b in ms}, reverse=True)
    return SumSpectrum(
        spin,
        tuple(float(round(e, 12)) for e in eigenvalues),
        tuple(sums),
    )


def paradox_scan(twice_s_max: int, workers: int = 1) -> list[ParadoxReport]:
    """Reports for twice_s = 1 .. twice_s_max, in order."""
    if isinstance(twice_s_max, bool) or not isinstance(twice_s_max, int) or twice_s_max < 1:
        raise SpinValidationError(f"twice_s_max must be an integer >= 1, got {twice_s_max!r}")
    spins = [Spin(t) for t in range(1, twice_s_max + 1)]
    logger.info("scanning paradox condition for twice_s = 1..%d", twice_s_max)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(paradox_condition, spins))
    return [paradox_condition(spin) for spin in spins]


def casimir_holds(spin: Spin) -> bool:
    """S^2 equals s(s+1) times the identity, entrywise within 1e-12."""
    expected = float(spin.casimir_value) * np.eye(spin.dim)
    return bool(np.allclose(casimir(spin).entries, expected, rtol=0.0, atol=_CONFIG.IDENTITY_TOL))
