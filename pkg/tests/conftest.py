"""Shared fixtures: the spin-2 system and its stretched S_x eigenstate."""

import math

import numpy as np
import pytest

from spin import Spin, StateVector

# Coefficients of |2>_x over |2>_z ... |-2>_z
STRETCHED_X_COEFFS = np.array([1 / 4, 1 / 2, math.sqrt(6) / 4, 1 / 2, 1 / 4])
STRETCHED_X_PROBS = np.array([1 / 16, 1 / 4, 3 / 8, 1 / 4, 1 / 16])


@pytest.fixture
def spin2():
    return Spin(4)


@pytest.fixture
def stretched_x(spin2):
    """|2>_x written out by hand in the S_z basis."""
    return StateVector.from_amplitudes(STRETCHED_X_COEFFS)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_state(rng, dim):
    amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return StateVector.from_amplitudes(amps, normalize=True)


def three_sigma(p, n):
    return 3.0 * math.sqrt(p * (1.0 - p) / n)
