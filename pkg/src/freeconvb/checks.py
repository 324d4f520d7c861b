"""Acceptance and invariant checks shared by the test-suite and the CLI.

Each ``criterion_*`` function runs one numbered acceptance check and returns
a :class:`CheckResult`.  Thresholds are the acceptance tolerances.
"""

from __future__ import annotations

import cmath
import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import fock, laws, nc
from .dualnum import DualComplex
from .measures import (
    Arcsine,
    Atomic,
    CauchyLaw,
    FreePoisson,
    Mixture,
    Semicircle,
    SemicircleBDerivative,
    UnitCircleAtomic,
)
from .subordination import Domain, additive_omega, multiplicative_omega
from .typeb import (
    TypeBLaw,
    boxplus_b,
    cfree_correspondence_error,
    infinitesimal_boxplus_check,
    infinitesimal_boxtimes_check,
    linear_path,
    probe_grid,
    rho_from_sigma,
    rotating_circle_path,
    semicircle_variance_path,
    sigma_from_rho,
)

__all__ = ["CheckResult", "CRITERIA", "SUITES", "run_criterion", "run_suite"]


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status} criterion {self.number:2d} {self.name}: "
            f"{self.value:.3e} (limit {self.threshold:.1e}) {self.detail}".rstrip()
        )


def _centered(points, weights) -> Atomic:
    mean = sum(p * w for p, w in zip(points, weights))
    return Atomic(tuple(p - mean for p in points), tuple(weights))


# =============================================================================
# Combinatorics
# =============================================================================


def criterion_1() -> CheckResult:
    worst = 0
    start = time.perf_counter()
    for k in range(1, 7):
        total, zero = nc.count_b_pairings(k)
        worst = max(worst, abs(total - (k + 1) * nc.catalan(k)), abs(zero - k * nc.catalan(k)))
    elapsed = time.perf_counter() - start
    ok = worst == 0 and elapsed < 10
    return CheckResult(1, "type B pairing counts", ok, worst, 0, f"in {elapsed:.2f}s")


def criterion_2() -> CheckResult:
    m = nc.moments_from_cumulants([0, (1, 1)], 12, exact=True)
    worst = 0
    for k in range(1, 7):
        target = DualComplex(Fraction(nc.catalan(k)), Fraction(k * nc.catalan(k)))
        got = m.at(2 * k)
        worst = max(worst, abs(got.re - target.re), abs(got.inf - target.inf))
        worst = max(worst, abs(m.at(2 * k - 1).re), abs(m.at(2 * k - 1).inf))
    return CheckResult(2, "type B semicircle moments (exact)", worst == 0, float(worst), 0)


def random_dual_cumulants(rng: random.Random, L: int, scale: float):
    return [DualComplex(rng.uniform(-scale, scale), rng.uniform(-scale, scale)) for _ in range(L)]


def criterion_3() -> CheckResult:
    rng = random.Random(20240603)
    exact_worst = Fraction(0)
    float_worst = 0.0
    for _ in range(20):
        kappa = [
            DualComplex(Fraction(rng.randint(-9, 9), rng.randint(1, 9)),
                        Fraction(rng.randint(-9, 9), rng.randint(1, 9)))
            for _ in range(10)
        ]
        exact_worst = max(exact_worst, nc.check_functional_equation(kappa, 10, exact=True))
        float_worst = max(
            float_worst,
            nc.check_functional_equation(random_dual_cumulants(rng, 10, 0.5), 10),
        )
    ok = exact_worst == 0 and float_worst < 1e-12
    return CheckResult(
        3, "moment-cumulant functional equation", ok, float_worst, 1e-12,
        f"exact residual {exact_worst}",
    )


# =============================================================================
# Additive subordination
# =============================================================================


def additive_test_pairs() -> list:
    B = Atomic.symmetric_bernoulli()
    return [
        (B, B),
        (Semicircle(), Semicircle()),
        (B, Semicircle(0.5, 2.0)),
        (Atomic((-1, 0, 2), (0.3, 0.3, 0.4)), Atomic((0, 1), (0.6, 0.4))),
        (Arcsine(), B),
        (FreePoisson(1.0, 1.0), Semicircle()),
        (FreePoisson(2.0, 0.5), FreePoisson(0.5, 1.0)),
        (CauchyLaw(0.0, 1.0), B),
        (Atomic.dirac(0.7), Semicircle()),
        (Atomic((-2, -1, 1, 3), (0.1, 0.4, 0.3, 0.2)), Arcsine(1.0, 0.5)),
    ]


def criterion_4() -> CheckResult:
    start = time.perf_counter()
    grid = probe_grid()
    worst = 0.0
    for mu1, mu2 in additive_test_pairs():
        for z in grid:
            r = additive_omega(mu1, mu2, z)
            worst = max(worst, r.residual_sub, r.residual_sum)
    B = Atomic.symmetric_bernoulli()
    dens_err = 0.0
    for x in np.linspace(-1.9, 1.9, 39):
        G = additive_omega(B, B, complex(x, 1e-6)).value.re
        dens_err = max(dens_err, abs(-G.imag / math.pi - 1 / (math.pi * math.sqrt(4 - x * x))))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-10 and dens_err < 1e-5 and elapsed < 30
    return CheckResult(
        4, "additive subordination identities", ok, worst, 1e-10,
        f"arcsine density error {dens_err:.1e}, {elapsed:.1f}s",
    )


def criterion_5() -> CheckResult:
    worst = 0.0
    for s, t in ((0.5, 0.5), (0.2, 0.8), (0.35, 0.65)):
        out = boxplus_b(TypeBLaw.semicircle_b(s), TypeBLaw.semicircle_b(t))
        v = s + t
        for z in probe_grid():
            closed = (1 / cmath.sqrt(z - 2 * math.sqrt(v)) / cmath.sqrt(z + 2 * math.sqrt(v))
                      - Semicircle(0.0, v).cauchy(z)) / v
            worst = max(worst, abs(out.g3(z) - closed))
    return CheckResult(5, "type B semicircle family closure", worst < 1e-8, worst, 1e-8,
                       "variances with s + t = 1")


def criterion_6() -> CheckResult:
    B = Atomic.symmetric_bernoulli()
    paths = [
        (linear_path(B, Atomic.dirac(0.0)), linear_path(Semicircle(), Arcsine())),
        (linear_path(Atomic((0, 1), (0.5, 0.5)), B), linear_path(B, Atomic.dirac(0.0))),
        (semicircle_variance_path(1.0), semicircle_variance_path(0.5, 2.0)),
    ]
    worst = 0.0
    for p1, p2 in paths:
        for t0 in (0.2, 0.5):
            for z in (2j, 1 + 1j, -0.5 + 0.3j):
                worst = max(worst, infinitesimal_boxplus_check(p1, p2, t0, z))
    return CheckResult(6, "derivative of convolution paths", worst < 1e-6, worst, 1e-6)


def ans_test_pairs() -> list:
    B = Atomic.symmetric_bernoulli()
    c3 = _centered((-1.0, 0.5, 2.0), (0.2, 0.4, 0.4))
    mix = Mixture((Semicircle(), B), (0.5, 0.5))
    return [
        (B, B, B, B),
        (Semicircle(), Semicircle(), Semicircle(), Semicircle()),
        (B, c3, Semicircle(), Arcsine()),
        (Atomic((0, 1), (0.5, 0.5)), mix, Arcsine(), c3),
        (FreePoisson(), Semicircle(0.0, 2.0), Atomic.dirac(0.3), Atomic.symmetric_bernoulli(0.5)),
    ]


def criterion_7() -> CheckResult:
    grid = probe_grid()
    roundtrip = 0.0
    worst = 0.0
    for mu1, rho1, mu2, rho2 in ans_test_pairs():
        for rho in (rho1, rho2):
            back = rho_from_sigma(sigma_from_rho(rho))
            roundtrip = max(roundtrip, max(abs(back.cauchy(z) - rho.cauchy(z)) for z in grid))
        worst = max(worst, cfree_correspondence_error(mu1, rho1, mu2, rho2, grid))
    ok = worst < 1e-8 and roundtrip < 1e-6
    return CheckResult(7, "c-free / type B correspondence", ok, worst, 1e-8,
                       f"round trip {roundtrip:.1e}")


# =============================================================================
# Fock model
# =============================================================================


def criterion_8() -> CheckResult:
    start = time.perf_counter()
    exact_ok = True
    for N in (1, 2, 3):
        basis = fock.build_fock(N, 1, 3)
        X = fock.matrix_XN(basis, N, 1)
        for n in (1, 2, 3):
            exact_ok &= fock.psi_N_moment(basis, X, 2 * n) == fock.predicted_moment(N, 2 * n)
    basis = fock.build_fock(2, 1, 4)
    X = fock.matrix_XN(basis, 2, 1)
    err = abs(fock.psi_N_moment(basis, X, 8, exact=False) - float(fock.predicted_moment(2, 8)))
    elapsed = time.perf_counter() - start
    ok = exact_ok and err < 1e-12 and elapsed < 60
    return CheckResult(8, "Fock model moments", ok, err, 1e-12,
                       f"exact {'ok' if exact_ok else 'MISMATCH'}, {elapsed:.2f}s")


# =============================================================================
# Multiplicative
# =============================================================================


def multiplicative_disc_pairs() -> list:
    return [
        (UnitCircleAtomic((0.0, 1.0), (0.5, 0.5)), UnitCircleAtomic((0.0, 1.0), (0.5, 0.5))),
        (UnitCircleAtomic((0.3, 2.0, -1.0), (0.2, 0.5, 0.3)), UnitCircleAtomic((0.0,), (1.0,))),
        (UnitCircleAtomic((0.1, 1.5), (0.7, 0.3)), UnitCircleAtomic((-0.4, 0.9), (0.4, 0.6))),
    ]


def multiplicative_slit_pairs() -> list:
    return [
        (Atomic((1, 2), (0.5, 0.5)), Atomic((1, 2), (0.5, 0.5))),
        (FreePoisson(2.0, 1.0), Atomic((0.5, 1.5), (0.3, 0.7))),
        (Atomic((0.2, 1.0, 3.0), (0.2, 0.5, 0.3)), FreePoisson(1.5, 0.5)),
    ]


def disc_points() -> list:
    return [r * cmath.exp(1j * a) for r in (0.1, 0.3, 0.6) for a in np.linspace(0.1, 6.1, 7)]


def slit_points() -> list:
    return [complex(-x, y) for x in (0.1, 1.0, 5.0) for y in (-0.5, 0.0, 0.5)]


def criterion_9() -> CheckResult:
    worst = 0.0
    for mu1, mu2 in multiplicative_disc_pairs():
        for z in disc_points():
            r = multiplicative_omega(mu1, mu2, z, Domain.DISC)
            worst = max(worst, r.residual_sum, r.residual_sub)
    for mu1, mu2 in multiplicative_slit_pairs():
        for z in slit_points():
            r = multiplicative_omega(mu1, mu2, z, Domain.SLIT_PLANE)
            worst = max(worst, r.residual_sum, r.residual_sub)
    fd_worst = 0.0
    p1 = rotating_circle_path((0.0, 1.0), (0.5, 0.5), (1.0, -0.5))
    p2 = rotating_circle_path((0.3, 2.0), (0.3, 0.7), (0.2, 0.4))
    p3 = rotating_circle_path((0.5, 1.5, 3.0), (0.2, 0.3, 0.5), (0.0, 1.0, -1.0))
    for a, b in ((p1, p2), (p2, p3), (p1, p3)):
        for z in (0.3 + 0.2j, -0.4j, 0.5):
            fd_worst = max(fd_worst, infinitesimal_boxtimes_check(a, b, 0.2, z))
    ok = worst < 1e-10 and fd_worst < 1e-6
    return CheckResult(9, "multiplicative subordination", ok, worst, 1e-10,
                       f"rotation derivative error {fd_worst:.1e}")


# =============================================================================
# Laws
# =============================================================================


def criterion_10() -> CheckResult:
    B = Atomic.symmetric_bernoulli()
    data = [
        TypeBLaw(B),
        TypeBLaw(Atomic((-1, 0, 2), (0.3, 0.3, 0.4)), SemicircleBDerivative(0.5)),
    ]
    grid = [complex(x, y) for x in (-1.0, 0.0, 1.5) for y in (0.5, 1.5)]
    ratios = []
    for p in data:
        coarse = laws.burgers_residual(p, 0.5, grid, 2e-3, 2e-3)
        fine = laws.burgers_residual(p, 0.5, grid, 1e-3, 1e-3)
        ratios += [coarse[0] / fine[0], coarse[1] / fine[1]]
    ok = all(3.5 <= r <= 4.5 for r in ratios)
    worst = max(abs(r - 4) for r in ratios)
    return CheckResult(10, "type B heat equation", ok, worst, 0.5,
                       "ratios " + ", ".join(f"{r:.3f}" for r in ratios))


def stable_specs() -> list:
    return [
        (laws.StableSpec(3, 2.0, 1.0), 1e-6),
        (laws.StableSpec(3, 1.5, cmath.exp(-0.25j * math.pi)), 1e-6),
        (laws.StableSpec(4, 0.7, cmath.exp(1j * math.pi * 1.35)), 1e-6),
        (laws.StableSpec(2, b=-1.0), 1e-6),
        (laws.StableSpec(5, b=-1.0), 1e-5),
    ]


def criterion_11() -> CheckResult:
    worst_ratio = 0.0
    worst = 0.0
    for spec, limit in stable_specs():
        for z in probe_grid(5, 5):
            r = laws.stable_second_fd_check(spec, z, 1e-4)
            worst = max(worst, r)
            worst_ratio = max(worst_ratio, r / limit)
    return CheckResult(11, "stable second coordinates", worst_ratio < 1, worst, 1e-6,
                       "case 5 limit 1e-5")


def criterion_12() -> CheckResult:
    params = [(1.0, 1.0, 1.0, 0.0), (1.3, 0.7, 2.0, 0.5), (0.5, -0.2, 0.8, 1.0)]
    worst = 0.0
    for a1, a2, l1, l2 in params:
        fd = laws.poisson_b_derivative(a1, a2, l1, l2, 6)
        combinatorial = nc.poisson_moments_b((l1, l2), (a1, a2), 6)
        worst = max(worst, float(np.max(np.abs(fd - np.array([m.inf for m in combinatorial])))))
    return CheckResult(12, "free Poisson infinitesimal moments", worst < 1e-8, worst, 1e-8)


CRITERIA: dict[int, Callable[[], CheckResult]] = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
    11: criterion_11,
    12: criterion_12,
}

SUITES: dict[str, tuple] = {
    "combinatorics": (1, 2, 3),
    "additive": (4,),
    "semicircle-b": (5,),
    "inf": (6,),
    "ans": (7,),
    "fock": (8,),
    "multiplicative": (9,),
    "burgers": (10,),
    "stable": (11,),
    "poisson": (12,),
    "all": tuple(CRITERIA),
}


def run_criterion(number: int) -> CheckResult:
    start = time.perf_counter()
    result = CRITERIA[number]()
    result.seconds = time.perf_counter() - start
    return result


def run_suite(name: str) -> list:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return [run_criterion(n) for n in SUITES[name]]
