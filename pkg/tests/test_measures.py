import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from freeconvb.dualnum import DualComplex
from freeconvb.errors import DegenerateValue, DomainError, UnsupportedRepr
from freeconvb.measures import (
    NONFINITE,
    Arcsine,
    Atomic,
    CauchyBDerivative,
    CauchyLaw,
    DerivativeOfMeasure,
    DifferenceOfMeasures,
    FreePoisson,
    GridDensity,
    Mixture,
    Semicircle,
    SemicircleBDerivative,
    SignedAtomic,
    UnitCircleAtomic,
    ZERO_SECOND,
    dual_cauchy,
    g_second,
    moments_from_cauchy,
    moments_from_contour,
    reciprocal_and_h,
    stieltjes_invert,
    voiculescu_phi,
)

SQRT2 = math.sqrt(2)

LAWS = {
    "dirac": Atomic.dirac(0.3),
    "bernoulli": Atomic.symmetric_bernoulli(),
    "semicircle": Semicircle(0.5, 2.0),
    "arcsine": Arcsine(-0.2, 1.5),
    "cauchy": CauchyLaw(0.4, 0.7),
    "free_poisson": FreePoisson(0.5, 2.0),
    "mixture": Mixture((Semicircle(), Atomic.dirac(3.0)), (0.7, 0.3)),
}

DENSITY_LAWS = ["semicircle", "arcsine", "cauchy", "free_poisson"]


def quad_cauchy(law, z):
    """Oracle: integrate the density against 1/(z - x) numerically."""
    lo, hi = law.support() if law.support() is not None else (-np.inf, np.inf)
    f = lambda x: law.density(np.array([x]))[0] / (z - x)
    re = integrate.quad(lambda x: f(x).real, lo, hi, limit=400, epsabs=1e-13)[0]
    im = integrate.quad(lambda x: f(x).imag, lo, hi, limit=400, epsabs=1e-13)[0]
    atom = 1 - law.rate if isinstance(law, FreePoisson) and law.rate < 1 else 0.0
    return complex(re, im) + atom / z


# =============================================================================
# Cauchy transforms
# =============================================================================


@pytest.mark.parametrize(
    "law, z, expected",
    [
        (Atomic.dirac(0.0), 1j, -1j),
        (Semicircle(0, 1), 2j, 1j * (1 - SQRT2)),
        (Atomic.symmetric_bernoulli(), 2j, -0.4j),
    ],
)
def test_cauchy_examples(law, z, expected):
    assert abs(law.cauchy(z) - expected) < 1e-12


@pytest.mark.parametrize("name", DENSITY_LAWS)
@pytest.mark.parametrize("z", [0.3 + 0.5j, -2 + 1j, 4 + 0.2j, 10j])
def test_cauchy_matches_quadrature(name, z):
    law = LAWS[name]
    assert abs(law.cauchy(z) - quad_cauchy(law, z)) < 1e-7


@pytest.mark.parametrize("name", sorted(LAWS))
@given(x=st.floats(-20, 20), y=st.floats(1e-3, 50))
def test_nevanlinna_property(name, x, y):
    law = LAWS[name]
    z = complex(x, y)
    assert law.cauchy(z).imag < 0
    assert abs(law.cauchy(z.conjugate()) - law.cauchy(z).conjugate()) < 1e-12


@pytest.mark.parametrize("name", sorted(LAWS))
def test_probability_normalization(name):
    y = 1e6
    assert abs(1j * y * LAWS[name].cauchy(1j * y) - 1) < 1e-4


@pytest.mark.parametrize("name", ["semicircle", "arcsine", "free_poisson", "bernoulli"])
def test_dual_cauchy_derivative(name, fd):
    law = LAWS[name]
    z = 0.7 + 0.4j
    assert abs(law.cauchy(DualComplex(z, 1)).inf - fd(law.cauchy, z)) < 1e-7


def test_cauchy_on_atom_raises():
    with pytest.raises(DomainError):
        Atomic.dirac(1.0).cauchy(1.0)


@pytest.mark.parametrize(
    "law, z, F, h",
    [
        (Atomic.dirac(2.5), 1j, 1j - 2.5, -2.5),
        (Atomic.symmetric_bernoulli(), 2j, 2.5j, 0.5j),
        (Semicircle(0, 1), 2j, 1j * (1 + SQRT2), 1j * (SQRT2 - 1)),
    ],
)
def test_reciprocal_and_h(law, z, F, h):
    got_F, got_h = reciprocal_and_h(law, z)
    assert abs(got_F - F) < 1e-12 and abs(got_h - h) < 1e-12


def test_reciprocal_of_zero_transform():
    with pytest.raises(DegenerateValue):
        Atomic.symmetric_bernoulli().reciprocal(0.0)


# =============================================================================
# Second coordinates
# =============================================================================


@pytest.mark.parametrize(
    "nu, z, expected",
    [
        (DerivativeOfMeasure(Atomic.dirac(0.0), 1.0), 1j, -1.0),
        (SemicircleBDerivative(1.0), 2j, 1 / (2 * SQRT2 * 1j) - 1j * (1 - SQRT2)),
        (CauchyBDerivative(1.0), 1j, 0.25j),
        (SignedAtomic((0.0, 1.0), (1.0, -1.0)), 2j, 1 / 2j - 1 / (2j - 1)),
        (DifferenceOfMeasures(Semicircle(), Atomic.dirac(0.0)), 2j, 1j * (1 - SQRT2) + 0.5j),
        (ZERO_SECOND, 1j, 0),
    ],
)
def test_second_coordinate_examples(nu, z, expected):
    assert abs(nu.g(z) - expected) < 1e-12


def test_semicircle_b_derivative_value():
    assert abs(SemicircleBDerivative(1.0).g(2j) - 0.060660j) < 1e-6


@pytest.mark.parametrize("t", [0.5, 1.0, 3.0])
def test_semicircle_b_derivative_is_variance_derivative(t, fd):
    z = 0.4 + 0.9j
    oracle = fd(lambda s: Semicircle(0, s).cauchy(z), t)
    assert abs(SemicircleBDerivative(t).g(z) - oracle) < 1e-7


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_cauchy_b_derivative_is_log_scale_derivative(t, fd):
    z = -0.3 + 0.8j
    oracle = t * fd(lambda s: CauchyLaw(0, s).cauchy(z), t)
    assert abs(CauchyBDerivative(t).g(z) - oracle) < 1e-7


@pytest.mark.parametrize(
    "nu",
    [
        DerivativeOfMeasure(Semicircle(), 2.0),
        DifferenceOfMeasures(Arcsine(), Semicircle()),
        SemicircleBDerivative(1.5),
        CauchyBDerivative(1.0),
        SignedAtomic((0.0, 1.0), (1.0, -1.0)),
    ],
)
def test_second_coordinate_has_zero_mass(nu):
    y = 1e6
    assert abs(1j * y * nu.g(1j * y)) < 1e-4


def test_second_coordinate_arithmetic():
    a, b = SemicircleBDerivative(1.0), CauchyBDerivative(1.0)
    z = 0.3 + 1.1j
    assert abs((a + b).g(z) - (a.g(z) + b.g(z))) < 1e-14
    assert abs((a - b).g(z) - (a.g(z) - b.g(z))) < 1e-14
    assert abs((a * 2.5).g(z) - 2.5 * a.g(z)) < 1e-14


def test_g_second_rejects_real_points():
    with pytest.raises(DomainError):
        g_second(SemicircleBDerivative(1.0), 0.5)


@pytest.mark.parametrize(
    "pair, Z, expected",
    [
        ((Atomic.dirac(0.0), ZERO_SECOND), DualComplex(1j, 1), DualComplex(-1j, 1)),
        ((Semicircle(), SemicircleBDerivative(1.0)), DualComplex(2j, 0),
         DualComplex(1j * (1 - SQRT2), SemicircleBDerivative(1.0).g(2j))),
    ],
)
def test_dual_cauchy(pair, Z, expected):
    assert dual_cauchy(pair, Z).is_close(expected)


@given(x=st.floats(-5, 5), y=st.floats(0.05, 5), w=st.floats(-3, 3))
def test_dual_cauchy_conjugate_symmetry(x, y, w):
    pair = (Semicircle(0.2, 1.3), SemicircleBDerivative(1.3))
    Z = DualComplex(complex(x, y), w)
    lhs = dual_cauchy(pair, Z.conjugate())
    assert lhs.is_close(dual_cauchy(pair, Z).conjugate(), 1e-10)


# =============================================================================
# Moment generating functions and Voiculescu transforms
# =============================================================================


@pytest.mark.parametrize(
    "law, z, expected",
    [
        (UnitCircleAtomic((0.0,), (1.0,)), 0.5, 1.0),
        (UnitCircleAtomic((0.0, math.pi), (0.5, 0.5)), 0.3, 0.15 / 0.7 - 0.15 / 1.3),
        (Atomic.dirac(2.0), -1.0, -2 / 3),
    ],
)
def test_psi_examples(law, z, expected):
    assert abs(law.psi(z) - expected) < 1e-12


def test_psi_of_free_poisson_matches_moments():
    law, z = FreePoisson(1.0, 1.0), -0.05
    series = sum(law.moment(n) * z**n for n in range(1, 40))
    assert abs(law.psi(z) - series) < 1e-12


def test_psi_needs_nonnegative_support():
    with pytest.raises(UnsupportedRepr):
        Semicircle().psi(0.1j)


@pytest.mark.parametrize(
    "law, z, expected",
    [
        (Atomic.dirac(1.7), 2j, 1.7),
        (Semicircle(0, 2.0), 5j, -0.4j),
        (CauchyLaw(0, 0.8), 1 + 3j, -0.8j),
    ],
)
def test_voiculescu_phi(law, z, expected):
    assert abs(voiculescu_phi(law, z) - expected) < 1e-10


# =============================================================================
# Densities and moment extraction
# =============================================================================


@pytest.mark.parametrize(
    "G, x, expected",
    [
        (Semicircle().cauchy, 0.0, 1 / math.pi),
        (Arcsine().cauchy, 0.0, 1 / (2 * math.pi)),
    ],
)
def test_stieltjes_inversion(G, x, expected):
    d = stieltjes_invert(G, [x - 0.1, x, x + 0.1], 1e-8)
    assert abs(d.density(x) - expected) < 1e-6


def test_stieltjes_inversion_of_atom_off_grid():
    eps = 1e-3
    d = stieltjes_invert(lambda z: 1 / z, [0.5, 1.0, 1.5], eps)
    assert abs(d.density(1.0) - eps / (math.pi * (1 + eps**2))) < 1e-15


def test_richardson_improves_smoothing():
    law = Semicircle()
    xs = np.linspace(-1.5, 1.5, 31)
    plain = stieltjes_invert(law.cauchy, xs, 1e-2)
    extrap = stieltjes_invert(law.cauchy, xs, 1e-2, richardson=True)
    exact = law.density(xs)
    assert np.max(np.abs(extrap.values - exact)) < 0.1 * np.max(np.abs(plain.values - exact))


def panel_gauss_cauchy(d, z, order=30):
    """Oracle: Gauss-Legendre on every panel of a piecewise-linear density."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    a, b = d.grid[:-1, None], d.grid[1:, None]
    x = 0.5 * (b - a) * nodes + 0.5 * (a + b)
    return complex(np.sum(0.5 * (b - a) * weights * d.density(x) / (z - x)))


@pytest.mark.parametrize("z", [0.3 + 0.2j, 2.5 + 0.01j, -1 + 3j, 0.01 + 0.05j])
def test_grid_density_matches_quadrature(z):
    xs = np.linspace(-2, 2, 401)
    d = GridDensity.normalized(xs, Semicircle().density(xs))
    assert abs(d.cauchy(z) - panel_gauss_cauchy(d, z)) < 1e-10


def test_grid_density_derivative(fd):
    xs = np.linspace(-2, 2, 101)
    d = GridDensity.normalized(xs, Semicircle().density(xs))
    z = 0.4 + 0.3j
    assert abs(d.cauchy(DualComplex(z, 1)).inf - fd(d.cauchy, z)) < 1e-6


def test_grid_density_validation():
    with pytest.raises(ValueError):
        GridDensity(np.array([0.0, 1.0]), np.array([1.0, 3.0]))
    with pytest.raises(ValueError):
        GridDensity(np.array([1.0, 0.0]), np.array([1.0, 1.0]))
    d = GridDensity.normalized([0.0, 1.0, 2.0], [1.0, -1.0, 1.0])
    assert abs(d.total_mass() - 1) < 1e-14


@pytest.mark.parametrize(
    "law, m1, m2",
    [
        (Atomic.dirac(1.3), 1.3, 1.69),
        (Semicircle(0, 1), 0.0, 1.0),
        (FreePoisson(2.0, 1.0), 2.0, 6.0),
    ],
)
def test_moments_from_cauchy(law, m1, m2):
    assert abs(moments_from_cauchy(law.cauchy, 1) - m1) < 1e-4
    assert abs(moments_from_cauchy(law.cauchy, 2) - m2) < 1e-4 * max(1, m2)


def test_heavy_tails_have_no_second_moment():
    assert moments_from_cauchy(CauchyLaw().cauchy, 2) is NONFINITE
    assert not NONFINITE


@pytest.mark.parametrize("name", ["semicircle", "arcsine", "free_poisson", "bernoulli", "mixture"])
def test_contour_moments_match_closed_forms(name):
    law = LAWS[name]
    lo, hi = law.support()
    radius = 2 * max(abs(lo), abs(hi)) + 1
    got = moments_from_contour(law.cauchy, 6, radius)
    for n, m in enumerate(got, start=1):
        assert abs(m - law.moment(n)) < 1e-9 * max(1, abs(law.moment(n)))
