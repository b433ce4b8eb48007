import cmath

import numpy as np
import pytest

from loewner import Empirical


def root_upper(w):
    """Square root with nonnegative imaginary part (oracle-side branch pick)."""
    r = cmath.sqrt(w)
    return r if r.imag >= 0 else -r


def gaussian_empirical(mass=1.0, atoms=(), span=4.0, n=2001):
    """Truncated-Gaussian density plus optional atoms, total mass one."""
    xs = np.linspace(-span, span, n)
    dens = np.exp(-xs**2 / 2.0)
    dens *= mass / np.trapezoid(dens, xs)
    return Empirical(atoms=atoms, a=-span, b=span, values=dens)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(key=20250810))
