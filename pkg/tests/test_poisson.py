import math

import mpmath
import numpy as np
import pytest

from conftest import SQRT2, lattice, lattice_union_spectrum, union_fixture
from qckit.errors import IncompleteDataError, IncompleteSpectrumError, NumericalError, ValidationError
from qckit.poisson import GaussianTest, poisson_residual


def theta3(q):
    return float(mpmath.jtheta(3, 0, q))


@pytest.fixture(scope="module")
def integers():
    return lattice(1.0, 0.0, -60, 60)


@pytest.fixture(scope="module")
def integer_spec():
    return lattice_union_spectrum([(1.0, 0.0)])


def test_gaussian_transform_numerically():
    h = GaussianTest(1.5, 0.3)
    x = np.linspace(-15, 15, 30001)
    for g in (0.0, 0.4, -1.1):
        num = np.sum(h(x) * np.exp(-2j * np.pi * g * x)) * (x[1] - x[0])
        assert num == pytest.approx(complex(h.transform(g)), abs=1e-12)


def test_self_dual_gaussian(integers, integer_spec):
    r = poisson_residual(integers, integer_spec, GaussianTest(), 40, 40)
    assert r.residual <= 1e-15
    assert r.lhs == pytest.approx(theta3(math.exp(-math.pi)), abs=1e-15)


def test_scaled_gaussian_against_theta(integers, integer_spec):
    # 2 sum e^{-4 pi n^2} = sum e^{-pi n^2 / 4}
    r = poisson_residual(integers, integer_spec, GaussianTest(2.0), 40, 40)
    assert r.lhs.real == pytest.approx(2 * theta3(math.exp(-4 * math.pi)), abs=1e-14)
    assert r.rhs.real == pytest.approx(theta3(math.exp(-math.pi / 4)), abs=1e-14)
    assert r.residual <= 1e-14


def test_shifted_centered_gaussian():
    A = lattice(1.0, 0.25, -60, 60)
    S = lattice_union_spectrum([(1.0, 0.25)])
    r = poisson_residual(A, S, GaussianTest(1.3, 0.4), 40, 40)
    assert r.residual <= 1e-13


def test_union_and_linearity(union_spec):
    A = union_fixture(60.0)
    h = GaussianTest(1.0, 0.2)
    r = poisson_residual(A, union_spec, h, 50, 50)
    assert r.residual <= 1e-12
    parts = [
        poisson_residual(lattice(a, 0.25, -60, 60), lattice_union_spectrum([(a, 0.25)]), h, 50, 50)
        for a in (1.0, SQRT2)
    ]
    assert r.lhs == pytest.approx(parts[0].lhs + parts[1].lhs, abs=1e-14)
    assert r.rhs == pytest.approx(parts[0].rhs + parts[1].rhs, abs=1e-14)


def test_residual_shrinks_with_cutoff(union_spec):
    A = union_fixture(60.0)
    h = GaussianTest(1.0)
    res = [poisson_residual(A, union_spec, h, c, c, tail_tol=1.0).residual for c in (1.0, 2.0, 4.0)]
    assert res[0] > res[1] > res[2]


def test_tail_too_large(integers, integer_spec):
    with pytest.raises(NumericalError):
        poisson_residual(integers, integer_spec, GaussianTest(), 2, 2)


def test_cutoffs_need_data(integers, integer_spec):
    with pytest.raises(IncompleteDataError):
        poisson_residual(integers, integer_spec, GaussianTest(), 100, 10)
    with pytest.raises(IncompleteSpectrumError):
        poisson_residual(integers, integer_spec, GaussianTest(), 10, 100)


def test_gaussian_scale_positive():
    with pytest.raises(ValidationError):
        GaussianTest(0.0)
