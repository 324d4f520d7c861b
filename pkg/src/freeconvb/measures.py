"""First-coordinate measures and second-coordinate functionals.

Every measure exposes its Cauchy transform ``G(z) = ∫ (z - t)^{-1} dμ(t)``
through :meth:`MeasureRepr.cauchy`, which accepts a complex number or a
:class:`~freeconvb.dualnum.DualComplex` (and then also returns the derivative
in the infinitesimal part).  Second-coordinate functionals expose
``g(z) = ν((z - t)^{-1})`` through :meth:`SecondCoordRepr.g`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import dualnum as dn
from .dualnum import DualComplex, base_value
from .errors import (
    DegenerateValue,
    DomainError,
    NoConvergence,
    UnsupportedRepr,
)

__all__ = [
    "MeasureRepr",
    "Atomic",
    "Semicircle",
    "Arcsine",
    "CauchyLaw",
    "FreePoisson",
    "free_poisson_moment",
    "UnitCircleAtomic",
    "GridDensity",
    "Mixture",
    "EvaluatorMeasure",
    "SecondCoordRepr",
    "SignedAtomic",
    "DerivativeOfMeasure",
    "DifferenceOfMeasures",
    "SemicircleBDerivative",
    "CauchyBDerivative",
    "Evaluator",
    "Combination",
    "ZERO_SECOND",
    "NonFinite",
    "NONFINITE",
    "cauchy_transform",
    "reciprocal_and_h",
    "g_second",
    "psi_transform",
    "voiculescu_phi",
    "stieltjes_invert",
    "moments_from_cauchy",
    "moments_from_contour",
    "dual_cauchy",
]


def _imag(z) -> float:
    return complex(base_value(z)).imag


def _paired_root(z, a, b):
    """``sqrt(z - a) * sqrt(z - b)`` with principal roots.

    This branch is analytic off the segment ``[a, b]`` and behaves like ``z``
    at infinity, unlike ``sqrt((z - a)(z - b))``.
    """
    return dn.sqrt(z - a) * dn.sqrt(z - b)


# =============================================================================
# Measures
# =============================================================================


class MeasureRepr:
    """Base class of first-coordinate laws."""

    def cauchy(self, z):
        raise UnsupportedRepr(f"{type(self).__name__} has no Cauchy transform")

    def support(self):
        """Closed interval ``(lo, hi)`` containing the support, or ``None``."""
        return None

    def moment(self, n: int):
        raise UnsupportedRepr(f"moments of {type(self).__name__} are not available")

    def psi(self, z):
        """Moment generating function ``∫ zt/(1 - zt) dμ(t)`` for laws on ``[0, ∞)``."""
        supp = self.support()
        if supp is None or supp[0] < 0:
            raise UnsupportedRepr("psi needs a law supported on [0, inf) or the circle")
        if base_value(z) == 0:
            return 0 * z
        w = 1 / z
        return self.cauchy(w) * w - 1

    def reciprocal(self, z):
        """``F(z) = 1 / G(z)``."""
        G = self.cauchy(z)
        if base_value(G) == 0:
            raise DegenerateValue("Cauchy transform vanishes")
        return 1 / G


@dataclass(frozen=True)
class Atomic(MeasureRepr):
    """Finitely supported law ``Σ w_i δ_{x_i}``."""

    points: tuple
    weights: tuple

    def __post_init__(self):
        pts = tuple(float(x) for x in self.points)
        wts = tuple(float(w) for w in self.weights)
        if len(pts) != len(wts) or not pts:
            raise ValueError("points and weights must be non-empty and aligned")
        if any(w <= 0 for w in wts):
            raise ValueError("weights must be positive")
        if abs(sum(wts) - 1) > 1e-12:
            raise ValueError("weights must sum to 1")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    @classmethod
    def dirac(cls, a: float = 0.0):
        return cls((a,), (1.0,))

    @classmethod
    def symmetric_bernoulli(cls, a: float = 1.0):
        return cls((-a, a), (0.5, 0.5))

    def cauchy(self, z):
        if _imag(z) == 0 and float(base_value(z).real) in self.points:
            raise DomainError("z lies on an atom")
        total = 0
        for x, w in zip(self.points, self.weights):
            total = total + w / (z - x)
        return total

    def support(self):
        return (min(self.points), max(self.points))

    def moment(self, n):
        return sum(w * x**n for x, w in zip(self.points, self.weights))

    def psi(self, z):
        if self.support()[0] < 0:
            raise UnsupportedRepr("psi needs atoms in [0, inf)")
        total = 0
        for x, w in zip(self.points, self.weights):
            total = total + w * (z * x) / (1 - z * x)
        return total


@dataclass(frozen=True)
class Semicircle(MeasureRepr):
    """Semicircle law with given mean and variance."""

    mean: float = 0.0
    variance: float = 1.0

    def __post_init__(self):
        if self.variance <= 0:
            raise ValueError("variance must be positive")

    def cauchy(self, z):
        r = 2 * math.sqrt(self.variance)
        u = z - self.mean
        # rationalised (u - S)/(2t) = 2/(u + S) avoids cancellation at large |z|
        return 2 / (u + _paired_root(u, r, -r))

    def density(self, x):
        x = np.asarray(x, dtype=float) - self.mean
        t = self.variance
        return np.sqrt(np.clip(4 * t - x**2, 0, None)) / (2 * np.pi * t)

    def support(self):
        r = 2 * math.sqrt(self.variance)
        return (self.mean - r, self.mean + r)

    def moment(self, n):
        from .nc import catalan

        t = self.variance
        return sum(
            math.comb(n, k) * catalan(k // 2) * t ** (k // 2) * self.mean ** (n - k)
            for k in range(0, n + 1, 2)
        )


@dataclass(frozen=True)
class Arcsine(MeasureRepr):
    """Arcsine law on ``[center - radius, center + radius]``."""

    center: float = 0.0
    radius: float = 2.0

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    def cauchy(self, z):
        u = z - self.center
        return 1 / _paired_root(u, self.radius, -self.radius)

    def density(self, x):
        x = np.asarray(x, dtype=float) - self.center
        r = self.radius
        out = np.zeros_like(x)
        inside = np.abs(x) < r
        out[inside] = 1 / (np.pi * np.sqrt(r**2 - x[inside] ** 2))
        return out

    def support(self):
        return (self.center - self.radius, self.center + self.radius)

    def moment(self, n):
        r = self.radius
        central = [
            math.comb(k, k // 2) * (r / 2) ** k if k % 2 == 0 else 0.0
            for k in range(n + 1)
        ]
        return sum(
            math.comb(n, k) * central[k] * self.center ** (n - k) for k in range(n + 1)
        )


@dataclass(frozen=True)
class CauchyLaw(MeasureRepr):
    """Cauchy law with location ``loc`` and scale ``scale``."""

    loc: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    def cauchy(self, z):
        im = _imag(z)
        if im == 0:
            raise DomainError("Cauchy law transform needs Im z != 0")
        shift = 1j * self.scale if im > 0 else -1j * self.scale
        return 1 / (z - self.loc + shift)

    def density(self, x):
        x = np.asarray(x, dtype=float) - self.loc
        t = self.scale
        return t / (np.pi * (x**2 + t**2))

    def moment(self, n):
        return math.nan


@dataclass(frozen=True)
class FreePoisson(MeasureRepr):
    """Free Poisson law with rate ``λ`` and jump size ``α``.

    Its free cumulants are ``κ_n = λ α^n``.
    """

    rate: float = 1.0
    jump: float = 1.0

    def __post_init__(self):
        if self.rate <= 0 or self.jump <= 0:
            raise ValueError("rate and jump must be positive")

    def _edges(self):
        lam, a = self.rate, self.jump
        return a * (1 - math.sqrt(lam)) ** 2, a * (1 + math.sqrt(lam)) ** 2

    def cauchy(self, z):
        lam, a = self.rate, self.jump
        lo, hi = self._edges()
        return 2 / (z + a * (1 - lam) + _paired_root(z, lo, hi))

    def density(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self._edges()
        out = np.zeros_like(x)
        inside = (x > lo) & (x < hi)
        xs = x[inside]
        out[inside] = np.sqrt((hi - xs) * (xs - lo)) / (2 * np.pi * self.jump * xs)
        return out

    def support(self):
        lo, hi = self._edges()
        return (min(lo, 0.0) if self.rate < 1 else lo, hi)

    def moment(self, n):
        return free_poisson_moment(self.rate, self.jump, n)


def free_poisson_moment(rate, jump, n: int):
    """``n``-th moment of the free Poisson law, polynomial in ``rate``.

    Narayana numbers count non-crossing partitions by number of blocks.
    Works for any numeric (or dual) ``rate`` and ``jump``.
    """
    if n == 0:
        return 1.0
    return jump**n * sum(
        (math.comb(n, k) * math.comb(n, k - 1) // n) * rate**k for k in range(1, n + 1)
    )


@dataclass(frozen=True)
class UnitCircleAtomic(MeasureRepr):
    """Atomic law on the unit circle with atoms at ``exp(i θ_k)``."""

    angles: tuple
    weights: tuple

    def __post_init__(self):
        ang = tuple(float(x) for x in self.angles)
        wts = tuple(float(w) for w in self.weights)
        if len(ang) != len(wts) or not ang:
            raise ValueError("angles and weights must be non-empty and aligned")
        if any(w <= 0 for w in wts) or abs(sum(wts) - 1) > 1e-12:
            raise ValueError("weights must be positive and sum to 1")
        object.__setattr__(self, "angles", ang)
        object.__setattr__(self, "weights", wts)

    def psi(self, z):
        total = 0
        for th, w in zip(self.angles, self.weights):
            zeta = cmath.exp(1j * th)
            total = total + w * (z * zeta) / (1 - z * zeta)
        return total

    def moment(self, n):
        return sum(w * cmath.exp(1j * n * th) for th, w in zip(self.angles, self.weights))


@dataclass(frozen=True, eq=False)
class GridDensity(MeasureRepr):
    """Piecewise-linear density through ``(grid[k], values[k])``.

    The Cauchy transform and its derivative are integrated panel by panel in
    closed form, so they are exact for the interpolated density.
    """

    grid: np.ndarray
    values: np.ndarray
    strict: bool = True

    def __post_init__(self):
        x = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if x.ndim != 1 or x.shape != v.shape or x.size < 2:
            raise ValueError("grid and values must be 1-d arrays of equal length >= 2")
        if np.any(np.diff(x) <= 0):
            raise ValueError("grid must be strictly increasing")
        object.__setattr__(self, "grid", x)
        object.__setattr__(self, "values", v)
        if self.strict:
            if np.any(v < 0):
                raise ValueError("density must be nonnegative")
            if abs(self.total_mass() - 1) > 1e-8:
                raise ValueError("density must integrate to 1")

    @classmethod
    def normalized(cls, grid, values):
        grid = np.asarray(grid, dtype=float)
        values = np.clip(np.asarray(values, dtype=float), 0, None)
        mass = np.trapezoid(values, grid)
        return cls(grid, values / mass)

    def total_mass(self) -> float:
        return float(np.trapezoid(self.values, self.grid))

    def _transform(self, z: complex):
        x, v = self.grid, self.values
        if z.imag == 0 and x[0] <= z.real <= x[-1]:
            raise DomainError("z lies on the support")
        dx = np.diff(x)
        slope = np.diff(v) / dx
        u_left = z - x[:-1]
        u_right = z - x[1:]
        # log(u_left / u_right) written as log1p to keep accuracy far away
        logs = np.log1p(dx / u_right)
        A = v[:-1] + slope * u_left
        G = np.sum(A * logs - slope * dx)
        dG = -np.sum(A * (1 / u_right - 1 / u_left) - slope * logs)
        return complex(G), complex(dG)

    def cauchy(self, z):
        if isinstance(z, DualComplex):
            if isinstance(z.re, DualComplex):
                raise UnsupportedRepr("grid densities support first derivatives only")
            G, dG = self._transform(complex(z.re))
            return DualComplex(G, z.inf * dG)
        return self._transform(complex(z))[0]

    def density(self, x):
        return np.interp(x, self.grid, self.values, left=0.0, right=0.0)

    def support(self):
        return (float(self.grid[0]), float(self.grid[-1]))

    def moment(self, n):
        return float(np.trapezoid(self.grid**n * self.values, self.grid))


@dataclass(frozen=True)
class Mixture(MeasureRepr):
    """Convex combination ``Σ c_k μ_k`` of laws."""

    components: tuple
    coefficients: tuple

    def __post_init__(self):
        coef = tuple(float(c) for c in self.coefficients)
        if len(coef) != len(self.components) or not coef:
            raise ValueError("components and coefficients must align")
        if any(c < 0 for c in coef) or abs(sum(coef) - 1) > 1e-12:
            raise ValueError("coefficients must be a probability vector")
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "coefficients", coef)

    def _terms(self):
        return [(c, m) for c, m in zip(self.coefficients, self.components) if c > 0]

    def cauchy(self, z):
        total = 0
        for c, m in self._terms():
            total = total + c * m.cauchy(z)
        return total

    def psi(self, z):
        total = 0
        for c, m in self._terms():
            total = total + c * m.psi(z)
        return total

    def support(self):
        supports = [m.support() for _, m in self._terms()]
        if any(s is None for s in supports):
            return None
        return (min(s[0] for s in supports), max(s[1] for s in supports))

    def moment(self, n):
        return sum(c * m.moment(n) for c, m in self._terms())


@dataclass(frozen=True, eq=False)
class EvaluatorMeasure(MeasureRepr):
    """A law known only through a (dual-capable) Cauchy transform evaluator."""

    G: Callable
    support_hint: tuple | None = None
    label: str = "evaluator"
    psi_fn: Callable | None = None

    def cauchy(self, z):
        return self.G(z)

    def support(self):
        return self.support_hint

    def psi(self, z):
        if self.psi_fn is not None:
            return self.psi_fn(z)
        return MeasureRepr.psi(self, z)


# =============================================================================
# Second coordinates
# =============================================================================


class SecondCoordRepr:
    """Base class of second-coordinate functionals ``ν`` with ``ν(1) = 0``."""

    def g(self, z):
        raise UnsupportedRepr(f"{type(self).__name__} has no g evaluator")

    def psi(self, z):
        """``ν(zt/(1 - zt)) = g(1/z)/z`` for functionals on the half line."""
        if base_value(z) == 0:
            return 0 * z
        w = 1 / z
        return self.g(w) * w

    def __add__(self, other):
        if not isinstance(other, SecondCoordRepr):
            return NotImplemented
        return Combination(((1.0, self), (1.0, other)))

    def __sub__(self, other):
        if not isinstance(other, SecondCoordRepr):
            return NotImplemented
        return Combination(((1.0, self), (-1.0, other)))

    def __mul__(self, c):
        if isinstance(c, SecondCoordRepr):
            return NotImplemented
        return Combination(((c, self),))

    __rmul__ = __mul__


@dataclass(frozen=True)
class SignedAtomic(SecondCoordRepr):
    """``Σ w_i δ_{x_i}`` with signed weights summing to zero."""

    points: tuple
    weights: tuple

    def __post_init__(self):
        pts = tuple(float(x) for x in self.points)
        wts = tuple(float(w) for w in self.weights)
        if len(pts) != len(wts):
            raise ValueError("points and weights must align")
        if abs(sum(wts)) > 1e-12:
            raise ValueError("signed weights must sum to 0")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    def g(self, z):
        total = 0 * z
        for x, w in zip(self.points, self.weights):
            total = total + w / (z - x)
        return total

    def psi(self, z):
        total = 0 * z
        for x, w in zip(self.points, self.weights):
            total = total + w * (z * x) / (1 - z * x)
        return total


@dataclass(frozen=True)
class DerivativeOfMeasure(SecondCoordRepr):
    """Distributional derivative of ``mass * base``: ``g = -mass * G_base'``."""

    base: MeasureRepr
    mass: float = 1.0

    def __post_init__(self):
        if self.mass < 0:
            raise ValueError("mass must be nonnegative")

    def g(self, z):
        if self.mass == 0:
            return 0 * z
        return -self.mass * self.base.cauchy(DualComplex(z, 1)).inf

    def total_mass(self):
        return self.mass

    def cauchy_of_measure(self, z):
        """Cauchy transform of the underlying positive measure ``mass * base``."""
        return self.mass * self.base.cauchy(z)


@dataclass(frozen=True)
class DifferenceOfMeasures(SecondCoordRepr):
    """``plus - minus`` for two probability laws."""

    plus: MeasureRepr
    minus: MeasureRepr

    def g(self, z):
        return self.plus.cauchy(z) - self.minus.cauchy(z)

    def psi(self, z):
        return self.plus.psi(z) - self.minus.psi(z)


@dataclass(frozen=True)
class SemicircleBDerivative(SecondCoordRepr):
    """Variance derivative of the semicircle family at variance ``t``."""

    variance: float = 1.0

    def __post_init__(self):
        if self.variance <= 0:
            raise ValueError("variance must be positive")

    def g(self, z):
        t = self.variance
        r = 2 * math.sqrt(t)
        return (1 / _paired_root(z, r, -r) - Semicircle(0.0, t).cauchy(z)) / t


@dataclass(frozen=True)
class CauchyBDerivative(SecondCoordRepr):
    """Scale derivative ``-it/(z + it)^2`` of the Cauchy family at scale ``t``."""

    scale: float = 1.0

    def g(self, z):
        t = self.scale
        if _imag(z) > 0:
            return -1j * t / (z + 1j * t) ** 2
        if _imag(z) < 0:
            return 1j * t / (z - 1j * t) ** 2
        raise DomainError("real argument")


@dataclass(frozen=True, eq=False)
class Evaluator(SecondCoordRepr):
    """Opaque second coordinate given by evaluators of ``g`` and/or ``ψ``."""

    g_fn: Callable | None = None
    psi_fn: Callable | None = None
    label: str = "evaluator"
    is_measure: bool = True

    def g(self, z):
        if self.g_fn is None:
            raise UnsupportedRepr(f"{self.label} has no g evaluator")
        return self.g_fn(z)

    def psi(self, z):
        if self.psi_fn is not None:
            return self.psi_fn(z)
        return SecondCoordRepr.psi(self, z)


@dataclass(frozen=True)
class Combination(SecondCoordRepr):
    """Finite linear combination ``Σ c_k ν_k``."""

    terms: tuple = field(default_factory=tuple)

    def g(self, z):
        total = 0 * z
        for c, nu in self.terms:
            total = total + c * nu.g(z)
        return total

    def psi(self, z):
        total = 0 * z
        for c, nu in self.terms:
            total = total + c * nu.psi(z)
        return total


ZERO_SECOND = Combination(())


# =============================================================================
# Transforms
# =============================================================================


def cauchy_transform(mu: MeasureRepr, z):
    """``G_μ`` at a complex or dual point (dual part ``w G_μ'(z)``)."""
    return mu.cauchy(z)


def reciprocal_and_h(mu: MeasureRepr, z):
    """Return ``(F, h)`` with ``F = 1/G`` and ``h = F - z``."""
    F = mu.reciprocal(z)
    return F, F - z


def g_second(nu: SecondCoordRepr, z):
    """``g_ν`` at a complex or dual point."""
    if _imag(z) == 0:
        raise DomainError("g is evaluated off the real axis only")
    return nu.g(z)


def psi_transform(mu: MeasureRepr, z):
    """``ψ_μ(z) = ∫ zt/(1 - zt) dμ(t)`` for laws on the circle or the half line."""
    return mu.psi(z)


def voiculescu_phi(mu: MeasureRepr, z: complex, tol=1e-14, max_iter=100) -> complex:
    """``φ_μ(z) = F_μ^{-1}(z) - z`` by damped Newton iteration from ``w = z``."""
    z = complex(z)
    w = z
    for _ in range(max_iter):
        F = mu.reciprocal(DualComplex(w, 1))
        if F.inf == 0:
            raise NoConvergence("F' vanished during inversion")
        step = (F.re - z) / F.inf
        new = w - step
        for _ in range(60):
            if new.imag > 0:
                break
            step /= 2
            new = w - step
        else:
            raise NoConvergence("inversion left the upper half-plane", abs(step))
        w = new
        if abs(step) < tol * max(1.0, abs(w)):
            return w - z
    raise NoConvergence("Voiculescu transform inversion did not converge", abs(step))


def stieltjes_invert(G: Callable, grid, eps: float, richardson: bool = False) -> GridDensity:
    """Sample ``-Im G(x + i eps)/π`` on ``grid``.

    With ``richardson=True`` the samples at ``eps`` and ``eps/2`` are combined
    as ``2 d(eps/2) - d(eps)``, cancelling the first-order smoothing error.
    """
    grid = np.asarray(grid, dtype=float)

    def sample(e):
        return np.array([-complex(G(complex(x, e))).imag / math.pi for x in grid])

    values = sample(eps)
    if richardson:
        values = 2 * sample(eps / 2) - values
    return GridDensity(grid, values, strict=False)


class NonFinite:
    """Sentinel returned when a moment limit does not stabilise."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NONFINITE"

    def __bool__(self):
        return False


NONFINITE = NonFinite()


def moments_from_cauchy(G: Callable, order: int, rtol: float = 1e-4):
    """First or second moment from the behaviour of ``G`` along ``iy``.

    Probes ``y = 1e3, 1e4, 1e5``; returns :data:`NONFINITE` unless the real
    parts of the last two probes agree to ``rtol`` and the imaginary part of
    the last probe is below ``rtol`` (relative to the limit).
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    probes = []
    for y in (1e3, 1e4, 1e5):
        z = 1j * y
        g = complex(G(z))
        m1 = z * (z * g - 1)
        if order == 1:
            probes.append(m1)
        else:
            probes.append(z * (z * z * g - z - m1.real))
    a, b = probes[-2], probes[-1]
    scale = max(1.0, abs(b))
    if not all(cmath.isfinite(p) for p in probes):
        return NONFINITE
    # the real parts converge like y^-2, the imaginary parts like y^-1
    if abs(a.real - b.real) > rtol * scale or abs(b.imag) > rtol * scale:
        return NONFINITE
    return b.real


def moments_from_contour(G: Callable, n_max: int, radius: float, nodes: int = 256):
    """Moments ``∮ z^n G(z) dz / (2πi)`` on the circle ``|z| = radius``.

    Requires ``G`` analytic outside a disc smaller than ``radius``.  The
    trapezoidal rule on the circle converges geometrically.  Nodes are offset
    by half a step so that none sits on the real axis.
    """
    theta = 2 * math.pi * (np.arange(nodes) + 0.5) / nodes
    zs = radius * np.exp(1j * theta)
    values = np.array([complex(G(complex(z))) for z in zs])
    out = []
    for n in range(1, n_max + 1):
        out.append(complex(np.mean(zs ** (n + 1) * values)))
    return out


def dual_cauchy(pair, Z):
    """``(G_μ(z), w G_μ'(z) + g_ν(z))`` for a pair ``(μ, ν)``."""
    mu, nu = pair
    Z = dn.as_dual(Z)
    G = mu.cauchy(Z)
    return DualComplex(G.re, G.inf + nu.g(Z.re))
