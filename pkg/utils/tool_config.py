"""
Tool configuration for spin experiments.

This module provides centralized configuration for the simulation and
verification tools, including numerical tolerances, sampling defaults
and enumeration bounds.
"""

from dataclasses import dataclass, field


# Pearson chi-square critical values at significance 0.001, keyed by d.o.f.
DEFAULT_CHI2_CRITICAL = {
    1: 10.828,
    2: 13.816,
    3: 16.266,
    4: 18.467,
    5: 20.515,
    6: 22.458,
    7: 24.322,
    8: 26.124,
    9: 27.877,
    10: 29.588,
}


@dataclass
class ToolConfig:
    """Configuration for spin experiment tools."""

    # Sampling settings
    DEFAULT_SHOTS: int = 1_000_000
    DEFAULT_SEED: int = 42
    BATCH_SHOTS: int = 250_000            # Shots per seeded batch
    DEFAULT_WORKERS: int = 1

    # Numerical tolerances
    NORM_TOL: float = 1e-12               # State normalization
    IDENTITY_TOL: float = 1e-12           # Constructed identities (Casimir, ...)
    COMPOSED_TOL: float = 1e-10           # Composed computations
    CERTAINTY_TOL: float = 1e-10          # Outcome predictable with certainty
    IMPOSSIBLE_OUTCOME_PROB: float = 1e-15
    PHASE_TOL: float = 1e-10              # Smallest amplitude that fixes the global phase

    # Enumeration bounds (in units of twice_s)
    MAX_ENUMERATION_TWICE_S: int = 20     # s <= 10
    MAX_EXACT_TWICE_S: int = 30           # s <= 15
    DEFAULT_SCAN_TWICE_S: int = 20

    # Goodness of fit
    CHI2_SIGNIFICANCE: float = 0.001
    CHI2_MIN_EXPECTED: float = 5.0
    CHI2_CRITICAL: dict[int, float] = field(default_factory=lambda: dict(DEFAULT_CHI2_CRITICAL))

    # Output
    FLOAT_SIG_DIGITS: int = 12
