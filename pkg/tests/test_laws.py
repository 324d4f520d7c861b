import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from freeconvb import nc
from freeconvb.errors import InvalidSpec
from freeconvb.laws import (
    StableBDerivative,
    StableLaw,
    StableSpec,
    burgers_residual,
    conservation_identity_check,
    poisson_b_derivative,
    poisson_b_family,
    richardson_derivative,
    stable_cauchy,
    stable_phi,
    stable_scaling,
    stable_second,
    stable_second_fd_check,
)
from freeconvb.measures import (
    Arcsine,
    Atomic,
    CauchyBDerivative,
    Semicircle,
    SemicircleBDerivative,
)
from freeconvb.typeb import TypeBLaw, probe_grid

CASE4_B = cmath.exp(1j * math.pi * 1.35)
SPECS = {
    "case1": StableSpec(1, a=0.5),
    "case2": StableSpec(2, b=-1.0),
    "case3_a2": StableSpec(3, 2.0, 1.0),
    "case3_a15": StableSpec(3, 1.5, cmath.exp(-0.25j * math.pi)),
    "case4": StableSpec(4, 0.7, CASE4_B),
    "case5": StableSpec(5, b=-1.0),
}


# =============================================================================
# Stable laws
# =============================================================================


@pytest.mark.parametrize(
    "spec, z, expected",
    [
        (StableSpec(3, 2.0, 1.0), 2 + 1j, 1 / (2 + 1j)),
        (StableSpec(2, b=-1.0), 3j, -1j),
        (StableSpec(5, b=-1.0), 1j, -1j * math.pi / 2),
        (StableSpec(1, a=0.7), 1j, 0.7),
    ],
)
def test_stable_phi(spec, z, expected):
    assert abs(stable_phi(spec, z) - expected) < 1e-14


@pytest.mark.parametrize(
    "args",
    [
        dict(case=6),
        dict(case=2, b=1.0),
        dict(case=3, alpha=2.0, b=1j),
        dict(case=3, alpha=0.5, b=1.0),
        dict(case=4, alpha=0.7, b=1.0),
        dict(case=4, alpha=1.5, b=-1.0),
        dict(case=5, b=-1 + 1j),
    ],
)
def test_invalid_stable_specs(args):
    with pytest.raises(InvalidSpec):
        StableSpec(**args)


@pytest.mark.parametrize(
    "spec, t, expected",
    [
        (StableSpec(3, 2.0, 1.0), 4.0, (0.5, 0.0)),
        (StableSpec(1), 7.0, (1 / 7, 0.0)),
        (StableSpec(5, b=-1.0), math.e, (1 / math.e, -1.0)),
    ],
)
def test_stable_scaling(spec, t, expected):
    s, shift = stable_scaling(spec, t)
    assert abs(s - expected[0]) < 1e-14 and abs(shift - expected[1]) < 1e-14


@pytest.mark.parametrize("name", sorted(SPECS))
@pytest.mark.parametrize("t", [0.5, 2.0, 3.3])
def test_scaling_identity(name, t):
    spec = SPECS[name]
    s, shift = stable_scaling(spec, t)
    sign = 1 if spec.case == 5 else -1
    for z in (1 + 2j, -0.5 + 0.7j, 3j):
        lhs = t * stable_phi(spec, z)
        rhs = (stable_phi(spec, s * z) + sign * shift) / s
        assert abs(lhs - rhs) < 1e-12 * max(1, abs(lhs))


@pytest.mark.parametrize("t", [0.5, 1.0, 2.5])
@pytest.mark.parametrize("z", [0.3 + 0.4j, -3 + 1j, 5j])
def test_stable_cauchy_closed_forms(t, z):
    semi = stable_cauchy(StableSpec(3, 2.0, t), 1.0, z)
    assert abs(semi - Semicircle(0, t).cauchy(z)) < 1e-12
    cauchy = stable_cauchy(StableSpec(2, b=-t), 1.0, z)
    assert abs(cauchy - 1 / (z + 1j * t)) < 1e-14
    assert abs(stable_cauchy(StableSpec(1), 1.0, z) - 1 / z) < 1e-15


@pytest.mark.parametrize("name", sorted(SPECS))
@pytest.mark.parametrize("q", [1.0, 2.0])
def test_stable_round_trip(name, q):
    spec = SPECS[name]
    for z in probe_grid(4, 3, y_range=(0.5, 5.0)):
        F = 1 / stable_cauchy(spec, q, z)
        assert abs(F + q * stable_phi(spec, F) - z) < 1e-10 * max(1, abs(z))
        assert F.imag >= z.imag - 1e-12


@pytest.mark.parametrize("name", sorted(SPECS))
def test_stable_cauchy_conjugate_and_nevanlinna(name):
    law = StableLaw(SPECS[name])
    for z in probe_grid(4, 3):
        G = law.cauchy(z)
        assert G.imag < 0
        assert abs(law.cauchy(z.conjugate()) - G.conjugate()) < 1e-14


def test_stable_second_matches_named_families():
    semi = stable_second(StableSpec(3, 2.0, 1.0), 2j)
    assert abs(semi - 0.060660j) < 1e-6
    cauchy = stable_second(StableSpec(2, b=-1.0), 1j)
    assert abs(cauchy - 0.25j) < 1e-14
    for z in probe_grid(4, 3):
        assert abs(stable_second(StableSpec(3, 2.0, 1.0), z) - SemicircleBDerivative(1.0).g(z)) < 1e-9
        assert abs(stable_second(StableSpec(2, b=-1.0), z) - CauchyBDerivative(1.0).g(z)) < 1e-9


def test_stable_second_of_dirac_vanishes():
    assert abs(stable_second(StableSpec(1), 0.3 + 1j)) < 1e-15
    assert not StableBDerivative(StableSpec(1)).is_measure
    assert StableBDerivative(StableSpec(2, b=-1.0)).is_measure


@pytest.mark.parametrize(
    "name, limit",
    [("case2", 1e-8), ("case3_a2", 1e-6), ("case3_a15", 1e-6), ("case4", 1e-5), ("case5", 1e-5)],
)
@pytest.mark.parametrize("z", [0.5 + 1j, -1 + 2j, 3j])
def test_stable_second_matches_q_difference(name, limit, z):
    assert stable_second_fd_check(SPECS[name], z) < limit


def test_fd_step_range():
    with pytest.raises(ValueError):
        stable_second_fd_check(SPECS["case2"], 1j, h=1e-2)


@pytest.mark.parametrize("t", [0.5, 1.0, 4.0])
def test_semicircle_b_is_arcsine_minus_semicircle(t):
    for z in probe_grid(5, 4):
        lhs = SemicircleBDerivative(t).g(z)
        rhs = (Arcsine(0, 2 * math.sqrt(t)).cauchy(z) - Semicircle(0, t).cauchy(z)) / t
        assert abs(lhs - rhs) < 1e-10


# =============================================================================
# Poisson family
# =============================================================================


def test_poisson_family_at_zero():
    got = poisson_b_family(2.0, 0.3, 1.5, 0.4, 0.0, 4)
    expected = nc.poisson_moments_b((1.5, 0), (2.0, 0), 4, exact=False)
    assert np.allclose(got, [m.re for m in expected], rtol=1e-14)


def test_poisson_catalan():
    assert np.allclose(poisson_b_family(1.0, 0.0, 1.0, 0.0, 0.0, 3), [1, 2, 5])


def test_poisson_derivative_for_jump_growth():
    d = poisson_b_derivative(1.0, 1.0, 1.0, 0.0, 4)
    moments = poisson_b_family(1.0, 0.0, 1.0, 0.0, 0.0, 4)
    assert np.allclose(d, [n * m for n, m in zip(range(1, 5), moments)], rtol=1e-9)
    assert abs(d[0] - 1) < 1e-10


@pytest.mark.parametrize(
    "alpha1, alpha2, lambda1, lambda2",
    [(1.0, 1.0, 1.0, 0.0), (2.0, -0.5, 0.7, 1.3), (0.5, 0.2, 3.0, -1.0)],
)
def test_poisson_derivative_matches_dual_moments(alpha1, alpha2, lambda1, lambda2):
    L = 8
    d = poisson_b_derivative(alpha1, alpha2, lambda1, lambda2, L)
    dual = nc.poisson_moments_b((lambda1, lambda2), (alpha1, alpha2), L)
    for n in range(L):
        assert abs(d[n] - dual[n].inf) < 1e-8 * max(1, abs(dual[n].inf))


@given(st.floats(-2, 2), st.floats(0.1, 3))
def test_richardson_derivative_polynomial(x0, c):
    f = lambda x: c * x**5 - x**2
    exact = 5 * c * x0**4 - 2 * x0
    assert abs(richardson_derivative(f, x0) - exact) < 1e-9 * max(1, abs(exact))


# =============================================================================
# Type B heat equation
# =============================================================================

BURGERS_GRID = [complex(x, 0.5) for x in (-1.0, 0.0, 1.0)] + [2j]


def test_burgers_from_dirac_is_second_order():
    p = TypeBLaw(Atomic.dirac(0.0))
    r1, _ = burgers_residual(p, 0.5, BURGERS_GRID, h_t=1e-3)
    r1_half, _ = burgers_residual(p, 0.5, BURGERS_GRID, h_t=5e-4)
    assert r1 < 1e-5
    assert 3.5 < r1 / r1_half < 4.5


def test_burgers_bernoulli_convergence_rate():
    p = TypeBLaw(Atomic.symmetric_bernoulli())
    coarse = burgers_residual(p, 0.5, BURGERS_GRID, 2e-3, 2e-3)
    fine = burgers_residual(p, 0.5, BURGERS_GRID, 1e-3, 1e-3)
    assert 3.5 < coarse[0] / fine[0] < 4.5
    assert 3.5 < coarse[1] / fine[1] < 4.5


def test_burgers_with_semicircle_second():
    p = TypeBLaw(Semicircle(0, 1), SemicircleBDerivative(1.0))
    coarse = burgers_residual(p, 0.5, BURGERS_GRID, 2e-3, 2e-3)
    fine = burgers_residual(p, 0.5, BURGERS_GRID, 1e-3, 1e-3)
    assert fine[1] < 1e-5
    assert 3.5 < coarse[1] / fine[1] < 4.5


def test_conservation_with_constant_polynomial():
    p = TypeBLaw(Semicircle(0, 1), SemicircleBDerivative(1.0))
    z = 0.3 + 0.6j
    assert conservation_identity_check(p, 0.5, [1.0], z) < 1e-5


def test_conservation_with_linear_polynomial():
    p = TypeBLaw(Semicircle(0, 1), SemicircleBDerivative(1.0))
    assert conservation_identity_check(p, 0.5, [0.0, 1.0], 0.3 + 0.6j) < 1e-5


def test_conservation_atomic_quadratic_is_second_order():
    law = Atomic((-1.0, 0.5), (0.4, 0.6))
    p = TypeBLaw(law, SemicircleBDerivative(0.5))
    z = -0.4 + 0.8j
    coarse = conservation_identity_check(p, 0.5, [0.0, 0.0, 1.0], z, h_t=2e-3)
    fine = conservation_identity_check(p, 0.5, [0.0, 0.0, 1.0], z, h_t=1e-3)
    assert 3.5 < coarse / fine < 4.5
