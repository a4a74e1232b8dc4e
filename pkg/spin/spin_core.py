"""
Spin-s operator algebra.

Exact spin quantum numbers, dense complex operator matrices and normalized
state vectors in the S_z eigenbasis. Amplitudes and matrix indices run over
m = s, s-1, ..., -s (index i <-> m = s - i). Units: hbar = 1.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import ClassVar, Iterable, Sequence

import numpy as np
from numpy.typing import NDArray

from utils.tool_config import ToolConfig
from .errors import SpinValidationError

logger = logging.getLogger(__name__)

_CONFIG = ToolConfig()
NORM_TOL = _CONFIG.NORM_TOL
PHASE_TOL = _CONFIG.PHASE_TOL
IDENTITY_TOL = _CONFIG.IDENTITY_TOL

ArrayC = NDArray[np.complex128]


@dataclass(frozen=True)
class Units:
    """Power of hbar carried by an operator; products add powers."""
    power: int = 0

    DIMENSIONLESS: ClassVar["Units"]
    HBAR: ClassVar["Units"]
    HBAR_SQUARED: ClassVar["Units"]
    HBAR_CUBED: ClassVar["Units"]
    HBAR_FOURTH: ClassVar["Units"]

    def __post_init__(self):
        if isinstance(self.power, bool) or not isinstance(self.power, int):
            raise SpinValidationError(f"hbar power must be an integer, got {self.power!r}")

    @property
    def label(self) -> str:
        if self.power == 0:
            return "1"
        if self.power == 1:
            return "hbar"
        return f"hbar^{self.power}"

    def __mul__(self, other: "Units") -> "Units":
        return Units(self.power + other.power)


Units.DIMENSIONLESS = Units(0)
Units.HBAR = Units(1)
Units.HBAR_SQUARED = Units(2)
Units.HBAR_CUBED = Units(3)
Units.HBAR_FOURTH = Units(4)


def _frozen(array, dtype=np.complex128) -> np.ndarray:
    out = np.array(array, dtype=dtype, copy=True)
    if not np.all(np.isfinite(out)):
        raise SpinValidationError("non-finite value in matrix or vector")
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ComplexScalar:
    """A finite complex number as an explicit (re, im) pair."""
    re: float
    im: float

    def __post_init__(self):
        if not (np.isfinite(self.re) and np.isfinite(self.im)):
            raise SpinValidationError("ComplexScalar must be finite")

    @classmethod
    def of(cls, value: complex) -> "ComplexScalar":
        value = complex(value)
        return cls(float(value.real), float(value.imag))

    def to_complex(self) -> complex:
        return complex(self.re, self.im)

    def __abs__(self) -> float:
        return abs(self.to_complex())


@dataclass(frozen=True)
class Spin:
    """Spin quantum number stored as twice_s, so half-integers stay exact."""
    twice_s: int

    def __post_init__(self):
        if isinstance(self.twice_s, bool) or not isinstance(self.twice_s, (int, np.integer)):
            raise SpinValidationError(f"twice_s must be an integer, got {self.twice_s!r}")
        if self.twice_s < 0:
            raise SpinValidationError(f"twice_s must be non-negative, got {self.twice_s}")
        object.__setattr__(self, "twice_s", int(self.twice_s))

    @property
    def s(self) -> Fraction:
        return Fraction(self.twice_s, 2)

    @property
    def dim(self) -> int:
        return self.twice_s + 1

    @property
    def twice_ms(self) -> tuple[int, ...]:
        """Spectrum as twice_m values, descending."""
        return tuple(range(self.twice_s, -self.twice_s - 1, -2))

    @property
    def casimir_value(self) -> Fraction:
        """s(s+1)."""
        return self.s * (self.s + 1)

    @property
    def label(self) -> str:
        return format_half(self.twice_s)

    def contains(self, twice_m: int) -> bool:
        return (
            isinstance(twice_m, (int, np.integer))
            and -self.twice_s <= twice_m <= self.twice_s
            and (self.twice_s - twice_m) % 2 == 0
        )

    def check_twice_m(self, twice_m: int) -> int:
        if not self.contains(twice_m):
            raise SpinValidationError(
                f"m={format_half(twice_m) if isinstance(twice_m, int) else twice_m!r} "
                f"is outside the spectrum of spin {self.label}"
            )
        return int(twice_m)

    def index_of(self, twice_m: int) -> int:
        """Position of twice_m in the descending basis."""
        return (self.twice_s - self.check_twice_m(twice_m)) // 2

    def to_json(self) -> dict:
        return {"twice_s": self.twice_s, "s": self.label}


def format_half(twice_value: int, signed: bool = False) -> str:
    """Render twice_value / 2 as '2', '-3/2', '+1/2'."""
    value = Fraction(twice_value, 2)
    text = str(value)
    if signed and value > 0:
        text = "+" + text
    return text


def make_spin(twice_s: int) -> Spin:
    return Spin(twice_s)


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense Hermitian-or-not operator in the S_z eigenbasis with an hbar power tag."""
    entries: ArrayC
    units: Units = Units.HBAR

    def __post_init__(self):
        entries = _frozen(self.entries)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise SpinValidationError(f"operator must be square, got shape {entries.shape}")
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def _check_same_dim(self, other: "OperatorMatrix"):
        if self.dim != other.dim:
            raise SpinValidationError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_same_dim(other)
        return OperatorMatrix(self.entries @ other.entries, self.units * other.units)

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_same_dim(other)
        if self.units != other.units:
            raise SpinValidationError(f"cannot add {self.units.label} and {other.units.label}")
        return OperatorMatrix(self.entries + other.entries, self.units)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_same_dim(other)
        if self.units != other.units:
            raise SpinValidationError(f"cannot subtract {other.units.label} from {self.units.label}")
        return OperatorMatrix(self.entries - other.entries, self.units)

    def scaled(self, factor: complex) -> "OperatorMatrix":
        return OperatorMatrix(self.entries * factor, self.units)

    def is_hermitian(self, tol: float = IDENTITY_TOL) -> bool:
        return bool(np.allclose(self.entries, self.entries.conj().T, rtol=0.0, atol=tol))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.entries))) if self.entries.size else 0.0

    def to_json(self) -> dict:
        return {
            "units": self.units.label,
            "entries": [[[float(z.real), float(z.imag)] for z in row] for row in self.entries],
        }


@dataclass(frozen=True)
class StateVector:
    """
    Normalized amplitudes over the S_z eigenbasis.

    The global phase is canonical: the first amplitude with magnitude above
    PHASE_TOL (scanning from m = +s) is real and non-negative. `basis_axis`
    is a label only.
    """
    amplitudes: ArrayC
    basis_axis: str = "z"

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128, copy=True)
        if amps.ndim != 1 or amps.size == 0:
            raise SpinValidationError(f"state must be a non-empty vector, got shape {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise SpinValidationError("non-finite amplitude in state")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise SpinValidationError(f"state is not normalized (sum |a|^2 = {norm!r})")
        object.__setattr__(self, "amplitudes", _frozen(canonical_phase(amps)))

    @classmethod
    def from_amplitudes(cls, amplitudes: Iterable[complex], basis_axis: str = "z",
                        normalize: bool = False) -> "StateVector":
        amps = np.asarray(list(amplitudes), dtype=np.complex128)
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0.0 or not np.isfinite(norm):
                raise SpinValidationError("cannot normalize a zero or non-finite vector")
            amps = amps / norm
        return cls(amps, basis_axis)

    @classmethod
    def basis(cls, spin: Spin, twice_m: int) -> "StateVector":
        """|m>_z."""
        amps = np.zeros(spin.dim, dtype=np.complex128)
        amps[spin.index_of(twice_m)] = 1.0
        return cls(amps, "z")

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def check_spin(self, spin: Spin) -> "StateVector":
        if self.dim != spin.dim:
            raise SpinValidationError(
                f"state dimension {self.dim} does not match spin {spin.label} (dim {spin.dim})"
            )
        return self

    def inner(self, other: "StateVector") -> complex:
        """<self|other>."""
        if self.dim != other.dim:
            raise SpinValidationError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def close_to(self, other: "StateVector", tol: float = 1e-10) -> bool:
        return self.dim == other.dim and bool(
            np.allclose(self.amplitudes, other.amplitudes, rtol=0.0, atol=tol)
        )


def canonical_phase(amplitudes: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the first non-negligible amplitude is real >= 0."""
    magnitudes = np.abs(amplitudes)
    nonzero = np.flatnonzero(magnitudes > PHASE_TOL)
    if nonzero.size == 0:
        return amplitudes
    lead = amplitudes[nonzero[0]]
    out = amplitudes * (np.conj(lead) / magnitudes[nonzero[0]])
    out[nonzero[0]] = magnitudes[nonzero[0]]
    return out


@lru_cache(maxsize=None)
def ladder_operator(spin: Spin) -> OperatorMatrix:
    """S+ with Condon-Shortley elements <m+1|S+|m> = sqrt(s(s+1) - m(m+1)) >= 0."""
    # 4*(s(s+1) - m(m+1)) in integers, one entry per column m = s-1, ..., -s
    ts = spin.twice_s
    quarters = [ts * (ts + 2) - tm * (tm + 2) for tm in spin.twice_ms[1:]]
    raising = np.diag(np.sqrt(np.asarray(quarters, dtype=np.float64)) / 2.0, k=1)
    return OperatorMatrix(raising.astype(np.complex128), Units.HBAR)


@lru_cache(maxsize=None)
def spin_operators(spin: Spin) -> tuple[OperatorMatrix, OperatorMatrix, OperatorMatrix]:
    """(S_x, S_y, S_z) for the given spin, in units of hbar."""
    raising = ladder_operator(spin).entries
    lowering = raising.conj().T
    s_x = OperatorMatrix((raising + lowering) / 2.0, Units.HBAR)
    s_y = OperatorMatrix((raising - lowering) / 2.0j, Units.HBAR)
    s_z = OperatorMatrix(np.diag(np.asarray(spin.twice_ms, dtype=np.float64) / 2.0), Units.HBAR)
    logger.debug("built spin operators for s=%s (dim %d)", spin.label, spin.dim)
    return s_x, s_y, s_z


def identity(spin: Spin, units: Units = Units.DIMENSIONLESS) -> OperatorMatrix:
    return OperatorMatrix(np.eye(spin.dim, dtype=np.complex128), units)


def squared(op: OperatorMatrix) -> OperatorMatrix:
    return op @ op


@lru_cache(maxsize=None)
def casimir(spin: Spin) -> OperatorMatrix:
    """S^2 = S_x^2 + S_y^2 + S_z^2, built from the component matrices."""
    s_x, s_y, s_z = spin_operators(spin)
    return squared(s_x) + squared(s_y) + squared(s_z)


def component_along(spin: Spin, direction: Sequence[float]) -> OperatorMatrix:
    """n.S for a unit vector n = (nx, ny, nz)."""
    nx, ny, nz = (float(c) for c in direction)
    s_x, s_y, s_z = spin_operators(spin)
    return OperatorMatrix(nx * s_x.entries + ny * s_y.entries + nz * s_z.entries, Units.HBAR)


def commutator(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    """[A, B] = AB - BA; units multiply."""
    return (a @ b) - (b @ a)


def matrix_apply(op: OperatorMatrix, state: StateVector) -> ArrayC:
    """Plain matrix-vector product, not renormalized."""
    if op.dim != state.dim:
        raise SpinValidationError(f"dimension mismatch: operator {op.dim} vs state {state.dim}")
    return op.entries @ state.amplitudes


@dataclass(frozen=True)
class OperatorSet:
    """The four observables printed by the `ops` command."""
    spin: Spin
    operators: dict[str, OperatorMatrix] = field(default_factory=dict)

    @classmethod
    def build(cls, spin: Spin) -> "OperatorSet":
        s_x, s_y, s_z = spin_operators(spin)
        return cls(spin, {"S_x": s_x, "S_y": s_y, "S_z": s_z, "S^2": casimir(spin)})

    def to_json(self) -> dict:
        return {
            "spin": self.spin.to_json(),
            "matrices": {name: op.to_json() for name, op in self.operators.items()},
        }
