"""
Rotated spin eigenstates.

Eigenstates of n.S for an arbitrary direction n(theta, phi) are obtained by
rotating |m>_z with R = exp(-i phi S_z) exp(-i theta S_y). The y-rotation is
the Wigner small-d matrix d^s(beta), evaluated with the usual factorial sum:

    d^s_{m'm}(b) = sqrt((s+m')!(s-m')!(s+m)!(s-m)!)
                   * sum_k (-1)^(m'-m+k) cos(b/2)^(2s+m-m'-2k) sin(b/2)^(m'-m+2k)
                     / ((s+m-k)! k! (m'-m+k)! (s-m'-k)!)

so that column m of d^s(b) is the m-eigenstate of cos(b) S_z + sin(b) S_x.
At b = pi/2 every term carries the same power 2^(-s), which gives the exact
rational route in `exact_pi_half_probabilities`.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from utils.tool_config import ToolConfig
from .errors import EnumerationBoundError, SpinValidationError
from .spin_core import (
    ComplexScalar,
    OperatorMatrix,
    Spin,
    StateVector,
    Units,
    format_half,
)

logger = logging.getLogger(__name__)

_CONFIG = ToolConfig()
TWO_PI = 2.0 * math.pi
_AXIS_MATCH_TOL = 1e-12


@dataclass(frozen=True)
class Axis:
    """Direction n(theta, phi); theta from +z, phi from +x. Normalized on construction."""
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        theta, phi = float(self.theta), float(self.phi)
        if not (math.isfinite(theta) and math.isfinite(phi)):
            raise SpinValidationError(f"axis angles must be finite, got ({self.theta!r}, {self.phi!r})")
        theta = math.fmod(theta, TWO_PI)
        if theta < 0.0:
            theta += TWO_PI
        if theta > math.pi:
            theta = TWO_PI - theta
            phi += math.pi
        phi = math.fmod(phi, TWO_PI)
        if phi < 0.0:
            phi += TWO_PI
        if phi >= TWO_PI:
            phi = 0.0
        # phi is meaningless on the poles
        if theta == 0.0 or theta == math.pi:
            phi = 0.0
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)

    @property
    def unit_vector(self) -> tuple[float, float, float]:
        st = math.sin(self.theta)
        return (st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta))

    def principal_name(self) -> Optional[str]:
        """'x', 'y' or 'z' when the axis is one of the named directions."""
        for name, axis in (("x", X), ("y", Y), ("z", Z)):
            if (abs(self.theta - axis.theta) <= _AXIS_MATCH_TOL
                    and abs(self.phi - axis.phi) <= _AXIS_MATCH_TOL):
                return name
        return None

    @property
    def label(self) -> str:
        return self.principal_name() or f"{self.theta:.12g},{self.phi:.12g}"

    @classmethod
    def parse(cls, text: str) -> "Axis":
        """Axis specifier: x | y | z | 'theta,phi' in radians."""
        token = text.strip().lower()
        if token in NAMED_AXES:
            return NAMED_AXES[token]
        parts = token.split(",")
        if len(parts) != 2:
            raise SpinValidationError(f"axis must be x, y, z or 'theta,phi', got {text!r}")
        try:
            theta, phi = float(parts[0]), float(parts[1])
        except ValueError:
            raise SpinValidationError(f"axis angles must be numbers, got {text!r}")
        return cls(theta, phi)

    def to_json(self) -> dict:
        return {"label": self.label, "theta": self.theta, "phi": self.phi}


X = Axis(math.pi / 2, 0.0)
Y = Axis(math.pi / 2, math.pi / 2)
Z = Axis(0.0, 0.0)
NAMED_AXES = {"x": X, "y": Y, "z": Z}


@dataclass(frozen=True)
class Expansion:
    """Amplitudes of a state over the eigenbasis of `axis`, descending m."""
    spin: Spin
    axis: Axis
    amplitudes: tuple[tuple[int, ComplexScalar], ...]

    def __post_init__(self):
        if tuple(m for m, _ in self.amplitudes) != self.spin.twice_ms:
            raise SpinValidationError("expansion labels must be the full spectrum, descending")
        total = sum(abs(a) ** 2 for _, a in self.amplitudes)
        if abs(total - 1.0) > _CONFIG.NORM_TOL:
            raise SpinValidationError(f"expansion is not normalized (sum |a|^2 = {total!r})")

    def amplitude(self, twice_m: int) -> complex:
        return self.amplitudes[self.spin.index_of(twice_m)][1].to_complex()

    def to_json(self) -> dict:
        return {
            "spin": self.spin.to_json(),
            "axis": self.axis.to_json(),
            "amplitudes": [
                {"twice_m": m, "re": a.re, "im": a.im} for m, a in self.amplitudes
            ],
        }


def _d_terms(twice_s: int, twice_mp: int, twice_m: int):
    """
    Yield (sign, cos power, sin power, denominator) for each k in the sum.
    All quantities are integers because s+m, s-m, m'-m are.
    """
    j_plus_m = (twice_s + twice_m) // 2
    j_minus_mp = (twice_s - twice_mp) // 2
    mp_minus_m = (twice_mp - twice_m) // 2
    k_min = max(0, -mp_minus_m)
    k_max = min(j_plus_m, j_minus_mp)
    for k in range(k_min, k_max + 1):
        sign = -1 if (mp_minus_m + k) % 2 else 1
        cos_pow = twice_s + (twice_m - twice_mp) // 2 - 2 * k
        sin_pow = mp_minus_m + 2 * k
        denom = (
            math.factorial(j_plus_m - k)
            * math.factorial(k)
            * math.factorial(mp_minus_m + k)
            * math.factorial(j_minus_mp - k)
        )
        yield sign, cos_pow, sin_pow, denom


def _factorial_product(twice_s: int, twice_mp: int, twice_m: int) -> int:
    return (
        math.factorial((twice_s + twice_mp) // 2)
        * math.factorial((twice_s - twice_mp) // 2)
        * math.factorial((twice_s + twice_m) // 2)
        * math.factorial((twice_s - twice_m) // 2)
    )


def wigner_d_entry(spin: Spin, twice_mp: int, twice_m: int, beta: float) -> float:
    """d^s_{m'm}(beta) in floating point."""
    spin.check_twice_m(twice_mp)
    spin.check_twice_m(twice_m)
    c, s = math.cos(beta / 2.0), math.sin(beta / 2.0)
    total = 0.0
    for sign, cos_pow, sin_pow, denom in _d_terms(spin.twice_s, twice_mp, twice_m):
        total += sign * (c ** cos_pow) * (s ** sin_pow) / denom
    return math.sqrt(_factorial_product(spin.twice_s, twice_mp, twice_m)) * total


def wigner_small_d(spin: Spin, beta: float) -> OperatorMatrix:
    """Real orthogonal d^s(beta), rows m', columns m, both descending."""
    if not math.isfinite(beta):
        raise SpinValidationError(f"beta must be finite, got {beta!r}")
    ms = spin.twice_ms
    entries = np.array(
        [[wigner_d_entry(spin, mp, m, beta) for m in ms] for mp in ms],
        dtype=np.float64,
    )
    return OperatorMatrix(entries, Units.DIMENSIONLESS)


@lru_cache(maxsize=1024)
def eigenbasis(spin: Spin, axis: Axis) -> np.ndarray:
    """Columns are the canonical eigenstates |m>_axis, descending m."""
    d = wigner_small_d(spin, axis.theta).entries
    phases = np.exp(-1j * (np.asarray(spin.twice_ms, dtype=np.float64) / 2.0) * axis.phi)
    columns = phases[:, None] * d
    # the float factorial sum loses ~1e-12 of norm to cancellation near s = 20
    columns = columns / np.linalg.norm(columns, axis=0)
    basis = np.column_stack([
        StateVector(columns[:, i], axis.label).amplitudes for i in range(spin.dim)
    ])
    basis.setflags(write=False)
    return basis


def axis_eigenstate(spin: Spin, twice_m: int, axis: Axis) -> StateVector:
    """Normalized eigenstate of n.S with eigenvalue m, canonical global phase."""
    column = eigenbasis(spin, axis)[:, spin.index_of(twice_m)]
    return StateVector(column, axis.label)


def expand(state: StateVector, spin: Spin, axis: Axis) -> Expansion:
    """Coefficients a_m = <m|_axis state>."""
    state.check_spin(spin)
    coefficients = eigenbasis(spin, axis).conj().T @ state.amplitudes
    return Expansion(
        spin,
        axis,
        tuple((m, ComplexScalar.of(a)) for m, a in zip(spin.twice_ms, coefficients)),
    )


def exact_pi_half_probabilities(spin: Spin, twice_m_from: int, twice_m_to: int) -> Fraction:
    """
    |d^s_{m_to, m_from}(pi/2)|^2 as a reduced fraction.

    With cos = sin = 1/sqrt(2) the entry is sqrt(F) * S / 2^s, F the factorial
    product and S a rational sum, so the square is F * S^2 / 2^(2s).
    """
    if spin.twice_s > _CONFIG.MAX_EXACT_TWICE_S:
        raise EnumerationBoundError(
            f"exact pi/2 path supports s <= {format_half(_CONFIG.MAX_EXACT_TWICE_S)}, got s={spin.label}"
        )
    spin.check_twice_m(twice_m_from)
    spin.check_twice_m(twice_m_to)
    total = Fraction(0)
    for sign, _, _, denom in _d_terms(spin.twice_s, twice_m_to, twice_m_from):
        total += Fraction(sign, denom)
    factorials = _factorial_product(spin.twice_s, twice_m_to, twice_m_from)
    return factorials * total * total / (2 ** spin.twice_s)
