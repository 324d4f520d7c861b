"""Type B laws and their convolutions.

A type B law is a pair ``(μ, ν)``: a probability measure and a second
coordinate functional with ``ν(1) = 0``.  Convolutions are returned lazily
as evaluators; nothing is discretised unless a density is requested.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .dualnum import DualComplex, as_dual
from .errors import InfiniteVariance, NoConvergence, NonCentered, UnsupportedRepr
from .measures import (
    NONFINITE,
    Arcsine,
    Atomic,
    DerivativeOfMeasure,
    DifferenceOfMeasures,
    Evaluator,
    EvaluatorMeasure,
    MeasureRepr,
    Mixture,
    SecondCoordRepr,
    Semicircle,
    SemicircleBDerivative,
    UnitCircleAtomic,
    ZERO_SECOND,
    moments_from_cauchy,
    voiculescu_phi,
)
from .subordination import (
    DEFAULT_CONFIG,
    Domain,
    SolverConfig,
    additive_omega,
    multiplicative_omega,
    solve_fixed_point,
)

__all__ = [
    "TypeBLaw",
    "ConvolutionOutput",
    "MultiplicativeOutput",
    "CFreeOutput",
    "boxplus_b",
    "boxtimes_b",
    "cfree_boxplus",
    "rho_from_sigma",
    "sigma_from_rho",
    "cfree_correspondence_error",
    "ns_semigroup_b",
    "ns_cauchy_by_phi",
    "Path",
    "linear_path",
    "semicircle_variance_path",
    "rotating_circle_path",
    "infinitesimal_boxplus_check",
    "infinitesimal_boxtimes_check",
    "probe_grid",
]


def probe_grid(nx: int = 10, ny: int = 10, x_range=(-3.0, 3.0), y_range=(0.1, 10.0)):
    """Points ``x + iy`` with ``x`` uniform and ``y`` log-uniform."""
    xs = np.linspace(*x_range, nx)
    ys = np.geomspace(*y_range, ny)
    return [complex(x, y) for y in ys for x in xs]


# =============================================================================
# Type B laws
# =============================================================================


@dataclass(frozen=True)
class TypeBLaw:
    """A pair ``(first, second)`` of a law and a second coordinate."""

    first: MeasureRepr
    second: SecondCoordRepr = ZERO_SECOND

    @classmethod
    def semicircle_b(cls, variance: float = 1.0) -> "TypeBLaw":
        """Semicircle family at ``variance`` with its dilation derivative.

        The second coordinate is ``v ∂_v γ_v``, the derivative of
        ``s ↦ γ_{s v}`` at ``s = 1``.  This normalisation is closed under
        ``⊞_B``: variances ``s`` and ``t`` combine to variance ``s + t``.
        """
        return cls(Semicircle(0.0, variance), variance * SemicircleBDerivative(variance))

    def dual_cauchy(self, Z):
        Z = as_dual(Z)
        G = self.first.cauchy(Z)
        return DualComplex(G.re, G.inf + self.second.g(Z.re))

    def translated(self, a: float) -> "TypeBLaw":
        """Law of ``(X + a, ξ)``: both transforms are shifted by ``a``."""
        first, second = self.first, self.second
        if isinstance(first, Atomic):
            new_first = Atomic(tuple(x + a for x in first.points), first.weights)
        else:
            new_first = EvaluatorMeasure(lambda z: first.cauchy(z - a), label="translate")
        new_second = Evaluator(lambda z: second.g(z - a), label="translate")
        return TypeBLaw(new_first, new_second)


def _as_law(p) -> TypeBLaw:
    if isinstance(p, TypeBLaw):
        return p
    first, second = p
    return TypeBLaw(first, second)


# =============================================================================
# Additive type B convolution
# =============================================================================


@dataclass
class ConvolutionOutput:
    """Lazy result of ``(μ₁, ν₁) ⊞_B (μ₂, ν₂)``.

    ``G3`` accepts complex or dual points; ``g3`` accepts complex points.
    ``first`` and ``second`` wrap them as reprs so the output can be fed back
    into further convolutions.
    """

    p1: TypeBLaw
    p2: TypeBLaw
    config: SolverConfig = DEFAULT_CONFIG
    _cache: dict = field(default_factory=dict, repr=False)

    def solve(self, z: complex):
        """Subordination data at ``z`` with unit seed (cached)."""
        z = complex(z)
        hit = self._cache.get(z)
        if hit is None:
            hit = additive_omega(self.p1.first, self.p2.first, DualComplex(z, 1), self.config)
            self._cache[z] = hit
        return hit

    def omegas(self, z: complex):
        """``(ω₁, ω₁', ω₂, ω₂')`` at ``z``."""
        r = self.solve(z)
        return r.omega1.re, r.omega1.inf, r.omega2.re, r.omega2.inf

    def G3(self, Z):
        if isinstance(Z, DualComplex):
            om1, d1, _, _ = self.omegas(Z.re)
            return self.p1.first.cauchy(DualComplex(om1, Z.inf * d1))
        return self.solve(Z).value.re

    def F3(self, Z):
        return 1 / self.G3(Z)

    def g3(self, z):
        om1, d1, om2, d2 = self.omegas(z)
        return self.p1.second.g(om1) * d1 + self.p2.second.g(om2) * d2

    def dual_cauchy(self, Z):
        Z = as_dual(Z)
        G = self.G3(DualComplex(Z.re, Z.inf))
        return DualComplex(G.re, G.inf + self.g3(Z.re))

    @property
    def first(self) -> EvaluatorMeasure:
        s1, s2 = self.p1.first.support(), self.p2.first.support()
        hint = None if s1 is None or s2 is None else (s1[0] + s2[0], s1[1] + s2[1])
        return EvaluatorMeasure(self.G3, support_hint=hint, label="boxplus")

    @property
    def second(self) -> Evaluator:
        return Evaluator(self.g3, label="boxplus_b")

    @property
    def law(self) -> TypeBLaw:
        return TypeBLaw(self.first, self.second)


def boxplus_b(p1, p2, config: SolverConfig = DEFAULT_CONFIG) -> ConvolutionOutput:
    """Additive type B free convolution ``p1 ⊞_B p2``."""
    return ConvolutionOutput(_as_law(p1), _as_law(p2), config)


# =============================================================================
# Multiplicative type B convolution
# =============================================================================


@dataclass
class MultiplicativeOutput:
    """Lazy result of ``(μ₁, ν₁) ⊠_B (μ₂, ν₂)``, carried through ``ψ``."""

    p1: TypeBLaw
    p2: TypeBLaw
    domain: Domain = Domain.DISC
    config: SolverConfig = DEFAULT_CONFIG
    _cache: dict = field(default_factory=dict, repr=False)

    def solve(self, z: complex):
        z = complex(z)
        hit = self._cache.get(z)
        if hit is None:
            hit = multiplicative_omega(
                self.p1.first, self.p2.first, DualComplex(z, 1), self.domain, self.config
            )
            self._cache[z] = hit
        return hit

    def psi3(self, Z):
        if isinstance(Z, DualComplex):
            r = self.solve(Z.re)
            return self.p1.first.psi(DualComplex(r.omega1.re, Z.inf * r.omega1.inf))
        return self.solve(Z).value.re

    def psi_second(self, z):
        """``ψ_{ν₃}(z)``."""
        z = complex(z)
        r = self.solve(z)
        om1, d1 = r.omega1.re, r.omega1.inf
        om2, d2 = r.omega2.re, r.omega2.inf
        rhs = (self.p1.second.psi(om1) / om1) * d1 + (self.p2.second.psi(om2) / om2) * d2
        return z * rhs

    @property
    def first(self) -> EvaluatorMeasure:
        def no_cauchy(z):
            raise UnsupportedRepr("multiplicative outputs are carried through psi")

        return EvaluatorMeasure(
            no_cauchy,
            support_hint=(0.0, math.inf) if self.domain is Domain.SLIT_PLANE else None,
            label="boxtimes",
            psi_fn=self.psi3,
        )

    @property
    def second(self) -> Evaluator:
        return Evaluator(psi_fn=self.psi_second, label="boxtimes_b")


def boxtimes_b(
    p1, p2, domain: Domain = Domain.DISC, config: SolverConfig = DEFAULT_CONFIG
) -> MultiplicativeOutput:
    """Multiplicative type B free convolution ``p1 ⊠_B p2``."""
    return MultiplicativeOutput(_as_law(p1), _as_law(p2), Domain(domain), config)


# =============================================================================
# Conditionally free convolution and the rho/sigma correspondence
# =============================================================================


@dataclass
class CFreeOutput:
    """``F_{ρ₃}(z) = z + h_{ρ₁}(ω₁(z)) + h_{ρ₂}(ω₂(z))`` with ``ω_j`` from ``μ₁ ⊞ μ₂``."""

    mu1: MeasureRepr
    rho1: MeasureRepr
    mu2: MeasureRepr
    rho2: MeasureRepr
    config: SolverConfig = DEFAULT_CONFIG

    def F(self, Z):
        Z = as_dual(Z)
        r = additive_omega(self.mu1, self.mu2, Z, self.config)
        h1 = self.rho1.reciprocal(r.omega1) - r.omega1
        h2 = self.rho2.reciprocal(r.omega2) - r.omega2
        out = Z + h1 + h2
        return out

    def h(self, Z):
        return self.F(Z) - Z

    def h_prime(self, z):
        return self.F(DualComplex(complex(z), 1)).inf - 1

    def G(self, Z):
        return 1 / self.F(Z)

    def __call__(self, Z):
        F = self.F(Z)
        return F if isinstance(Z, DualComplex) else F.re

    @property
    def measure(self) -> EvaluatorMeasure:
        def G(Z):
            g = self.G(Z)
            return g if isinstance(Z, DualComplex) else g.re

        return EvaluatorMeasure(G, label="cfree")


def cfree_boxplus(m1, m2, config: SolverConfig = DEFAULT_CONFIG) -> CFreeOutput:
    """Conditionally free convolution of ``m1 = (μ₁, ρ₁)`` and ``m2 = (μ₂, ρ₂)``."""
    (mu1, rho1), (mu2, rho2) = m1, m2
    return CFreeOutput(mu1, rho1, mu2, rho2, config)


def _atomic_from_reciprocal(F_poly_num, F_poly_den):
    """Atoms of the law with ``F = num/den`` (``num`` monic of degree ``n+1``)."""
    roots = np.roots(F_poly_num).real
    dnum = np.polyder(F_poly_num)
    weights = np.polyval(F_poly_den, roots) / np.polyval(dnum, roots)
    return roots, weights


def rho_from_sigma(sigma0, mass: float | None = None) -> MeasureRepr:
    """Law ``ρ`` with ``F_ρ(z) = z - m G_{σ₀}(z)`` where ``m`` is the mass of ``σ₀``.

    ``sigma0`` is a :class:`DerivativeOfMeasure` (whose ``base`` and ``mass``
    are used) or a probability law together with ``mass``.
    """
    if isinstance(sigma0, DerivativeOfMeasure):
        base, m = sigma0.base, sigma0.mass
    else:
        base, m = sigma0, 1.0 if mass is None else mass
    if m == 0:
        return Atomic.dirac(0.0)
    if isinstance(base, Atomic):
        # F = (z Q - m P)/Q with Q = Π(z - x_i), P = Σ w_i Π_{j≠i}(z - x_j)
        xs, ws = np.array(base.points), np.array(base.weights)
        Q = np.poly(xs)
        P = np.zeros(len(xs))
        for i, w in enumerate(ws):
            P = P + w * np.poly(np.delete(xs, i))
        num = np.polysub(np.polymul([1.0, 0.0], Q), m * P)
        roots, weights = _atomic_from_reciprocal(num, Q)
        order = np.argsort(roots)
        weights = weights[order] / weights.sum()
        return Atomic(tuple(roots[order]), tuple(weights))
    if isinstance(base, Semicircle) and base.mean == 0:
        v = base.variance
        if math.isclose(m, v, rel_tol=1e-14):
            return Semicircle(0.0, v)
        if math.isclose(m, 2 * v, rel_tol=1e-14):
            return Arcsine(0.0, 2 * math.sqrt(v))

    def G(z):
        return 1 / (z - m * base.cauchy(z))

    supp = base.support()
    hint = None
    if supp is not None:
        r = max(abs(supp[0]), abs(supp[1])) + 2 * math.sqrt(m)
        hint = (-r, r)
    return EvaluatorMeasure(G, support_hint=hint, label="rho_from_sigma")


def _moment_or_probe(rho: MeasureRepr, order: int):
    try:
        value = rho.moment(order)
        if isinstance(value, complex):
            value = value.real
        if value is not None and math.isfinite(value):
            return float(value)
        return NONFINITE
    except Exception:
        return moments_from_cauchy(rho.cauchy, order)


def sigma_from_rho(rho: MeasureRepr) -> DerivativeOfMeasure:
    """Positive measure ``σ₀`` with ``h_ρ = -G_{σ₀}``, as a derivative functional.

    The mass of ``σ₀`` equals the variance of ``ρ``.

    Raises
    ------
    NonCentered
        If ``ρ`` has nonzero mean.
    InfiniteVariance
        If the second moment of ``ρ`` does not exist.
    """
    m1 = moments_from_cauchy(rho.cauchy, 1)
    if m1 is NONFINITE:
        raise InfiniteVariance("law has no finite first moment")
    if abs(m1) > 1e-6:
        raise NonCentered(f"law has mean {m1}")
    m2 = _moment_or_probe(rho, 2)
    if m2 is NONFINITE:
        raise InfiniteVariance("second moment does not exist")
    if m2 <= 1e-15:
        return DerivativeOfMeasure(Atomic.dirac(0.0), 0.0)

    if isinstance(rho, Atomic):
        # h = (Q - zP)/P: atoms of σ₀ are the zeros of P
        xs, ws = np.array(rho.points), np.array(rho.weights)
        Q = np.poly(xs)
        P = np.zeros(len(xs))
        for i, w in enumerate(ws):
            P = P + w * np.poly(np.delete(xs, i))
        ys = np.sort(np.roots(P).real) if len(P) > 1 else np.array([0.0])
        cs = -np.polyval(Q, ys) / np.polyval(np.polyder(P), ys)
        mass = float(cs.sum())
        return DerivativeOfMeasure(Atomic(tuple(ys), tuple(cs / mass)), mass)
    if isinstance(rho, Semicircle):
        return DerivativeOfMeasure(Semicircle(0.0, rho.variance), rho.variance)
    if isinstance(rho, Arcsine) and rho.center == 0:
        r = rho.radius
        return DerivativeOfMeasure(Semicircle(0.0, r * r / 4), r * r / 2)

    def G_base(z):
        return -(rho.reciprocal(z) - z) / m2

    return DerivativeOfMeasure(
        EvaluatorMeasure(G_base, support_hint=rho.support(), label="sigma_from_rho"), m2
    )


def cfree_correspondence_error(mu1, rho1, mu2, rho2, points=None, config=DEFAULT_CONFIG) -> float:
    """Largest ``|h'_{ρ₃}(z) - g_{σ₃}(z)|`` over ``points``.

    The left side comes from the conditionally free convolution, the right
    side from ``⊞_B`` applied to ``(μ_j, σ_j)`` with ``σ_j = sigma_from_rho(ρ_j)``.
    """
    points = probe_grid() if points is None else points
    cf = cfree_boxplus((mu1, rho1), (mu2, rho2), config)
    out = boxplus_b((mu1, sigma_from_rho(rho1)), (mu2, sigma_from_rho(rho2)), config)
    return max(abs(cf.h_prime(z) - out.g3(z)) for z in points)


# =============================================================================
# Nica-Speicher semigroup
# =============================================================================


def ns_semigroup_b(p, t: float, Z, config: SolverConfig = DEFAULT_CONFIG):
    """``(G_t, g_t)`` of the type B semigroup ``p^{⊞_B t}`` at ``Z``.

    ``ω_t`` is the attracting fixed point of ``w ↦ z + (t - 1) h_μ(w)``; then
    ``G_t = G_μ(ω_t)`` and ``g_t = t g_ν(ω_t) ω_t'``.  ``G_t`` is dual when
    ``Z`` is.
    """
    if t < 1:
        raise ValueError("t must be at least 1")
    p = _as_law(p)
    if not isinstance(Z, DualComplex):
        G, g = ns_semigroup_b(p, t, DualComplex(complex(Z), 0), config)
        return G.re, g
    z, seed = complex(Z.re), Z.inf
    if z.imag < 0:
        G, g = ns_semigroup_b(p, t, DualComplex(z.conjugate(), np.conj(seed)), config)
        return G.conjugate(), g.conjugate()
    mu = p.first

    def T2(w, zz):
        return zz + (t - 1) * (mu.reciprocal(w) - w)

    if t == 1:
        w, dw = z, 1.0
    else:
        w, _, residual, _ = solve_fixed_point(
            lambda w: T2(w, z), 2j * max(1.0, z.imag), config
        )
        if residual > 1e-10 * max(1.0, abs(w)):
            raise NoConvergence("semigroup subordination did not converge", residual)
        dw = 1 / (1 - T2(DualComplex(w, 1), z).inf)
    G = mu.cauchy(DualComplex(w, seed * dw))
    g = t * p.second.g(w) * dw
    return G, g


def ns_cauchy_by_phi(mu: MeasureRepr, t: float, z: complex, tol=1e-14, max_iter=100):
    """``G_{μ^{⊞t}}(z)`` by inverting ``v ↦ v + t φ_μ(v)`` with Newton's method.

    Independent of :func:`ns_semigroup_b`; valid where ``φ_μ`` is defined,
    i.e. for ``Im z`` comfortably large.
    """
    z = complex(z)
    v = z
    for _ in range(max_iter):
        phi = voiculescu_phi(mu, v)
        h = 1e-6 * max(1.0, abs(v))
        dphi = (voiculescu_phi(mu, v + h) - voiculescu_phi(mu, v - h)) / (2 * h)
        step = (v + t * phi - z) / (1 + t * dphi)
        while (v - step).imag <= 0 and abs(step) > tol:
            step /= 2
        v = v - step
        if abs(step) < tol * max(1.0, abs(v)):
            return 1 / v
    raise NoConvergence("phi-scaling inversion did not converge", abs(step))


# =============================================================================
# Paths of laws
# =============================================================================


@dataclass(frozen=True, eq=False)
class Path:
    """Differentiable family ``t ↦ γ(t)`` with its derivative functional."""

    at: Callable[[float], MeasureRepr]
    derivative: Callable[[float], SecondCoordRepr]
    label: str = "path"

    def law(self, t: float) -> TypeBLaw:
        return TypeBLaw(self.at(t), self.derivative(t))


def linear_path(mu: MeasureRepr, nu: MeasureRepr) -> Path:
    """``t ↦ (1 - t) μ + t ν`` with derivative ``ν - μ``."""
    return Path(
        lambda t: Mixture((mu, nu), (1 - t, t)),
        lambda t: DifferenceOfMeasures(nu, mu),
        "linear",
    )


def semicircle_variance_path(v0: float = 1.0, rate: float = 1.0) -> Path:
    """``t ↦ γ_{v0 + rate t}``."""
    return Path(
        lambda t: Semicircle(0.0, v0 + rate * t),
        lambda t: rate * SemicircleBDerivative(v0 + rate * t),
        "semicircle-variance",
    )


def rotating_circle_path(angles, weights, speeds) -> Path:
    """Atoms ``exp(i(θ_k + c_k t))`` on the circle rotating at speeds ``c_k``."""
    angles = tuple(float(a) for a in angles)
    speeds = tuple(float(c) for c in speeds)
    weights = tuple(float(w) for w in weights)

    def at(t):
        return UnitCircleAtomic(tuple(a + c * t for a, c in zip(angles, speeds)), weights)

    def derivative(t):
        def psi(z):
            total = 0
            for a, c, w in zip(angles, speeds, weights):
                zeta = cmath.exp(1j * (a + c * t))
                total = total + w * 1j * c * zeta * z / (1 - z * zeta) ** 2
            return total

        return Evaluator(psi_fn=psi, label="rotation")

    return Path(at, derivative, "rotating-circle")


def infinitesimal_boxplus_check(path1: Path, path2: Path, t0: float, z, h: float = 1e-4,
                                config=DEFAULT_CONFIG) -> float:
    """``|g₃(z) - ∂_t G_{γ₁(t) ⊞ γ₂(t)}(z)|`` with a central difference in ``t``."""
    out = boxplus_b(path1.law(t0), path2.law(t0), config)

    def G(t):
        return additive_omega(path1.at(t), path2.at(t), complex(z), config).value.re

    fd = (G(t0 + h) - G(t0 - h)) / (2 * h)
    return abs(out.g3(z) - fd)


def infinitesimal_boxtimes_check(path1: Path, path2: Path, t0: float, z, h: float = 1e-4,
                                 domain=Domain.DISC, config=DEFAULT_CONFIG) -> float:
    """``|ψ_{ν₃}(z) - ∂_t ψ_{γ₁(t) ⊠ γ₂(t)}(z)|`` with a central difference in ``t``."""
    out = boxtimes_b(path1.law(t0), path2.law(t0), domain, config)

    def psi(t):
        return multiplicative_omega(path1.at(t), path2.at(t), complex(z), domain, config).value.re

    fd = (psi(t0 + h) - psi(t0 - h)) / (2 * h)
    return abs(out.psi_second(z) - fd)
