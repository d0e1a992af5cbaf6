import math

import mpmath
import numpy as np
import pytest

from jmatrix.gammafn import gammaln_real, loggamma

mpmath.mp.dps = 40

GRID = [
    0.25 + 0.1j,
    0.5 + 3.0j,
    2.75 + 0.0j,
    1.0 + 10.0j,
    3.4j,
    0.75 + 0.5j,
    6.5 + 20.0j,
    1e-3 + 1e-3j,
    0.1 + 40.0j,
    12.0 + 0.25j,
]


def test_matches_reference_to_1e12():
    for z in GRID:
        ref = complex(mpmath.loggamma(z))
        got = loggamma(z)
        assert abs(got - ref) <= 1e-12 * max(1.0, abs(ref))


def test_vectorized():
    zs = np.array(GRID)
    vals = loggamma(zs)
    for z, v in zip(GRID, vals):
        assert abs(v - loggamma(z)) == 0.0


def test_real_branch():
    for x in (0.1, 0.5, 1.0, 2.5, 7.0, 31.5):
        assert abs(gammaln_real(x) - math.lgamma(x)) <= 1e-13 * max(1.0, abs(math.lgamma(x)))


def test_pure_imaginary_real_part():
    # only the modulus enters the weight computations; pin it hard
    for g in (0.1, 1.0, 5.0):
        ref = float(mpmath.re(mpmath.loggamma(2j * g)))
        assert abs(loggamma(2j * g).real - ref) <= 1e-12 * max(1.0, abs(ref))


def test_rejects_poles_and_left_reals():
    with pytest.raises(ValueError):
        loggamma(0.0)
    with pytest.raises(ValueError):
        loggamma(-1.5)
    with pytest.raises(ValueError):
        gammaln_real(-2.0)
