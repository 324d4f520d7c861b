"""Free stable laws, their type B second coordinates, the type B free Poisson
family and the type B heat (Burgers) system.

Stable laws are described by their Voiculescu transform ``φ``:

====  ===========================  ==========================================
case  ``φ(z)``                     parameters
====  ===========================  ==========================================
1     ``a``                        point mass
2     ``a + ib``                   ``b < 0`` (Cauchy)
3     ``a + b z^{1-α}``            ``α ∈ (1, 2]``, ``arg b ∈ [(α-2)π, 0]``
4     ``a + b z^{1-α}``            ``α ∈ (0, 1)``, ``arg b ∈ [π, (1+α)π]``
5     ``a + b log z``              ``b < 0``
====  ===========================  ==========================================
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import dualnum as dn
from .dualnum import DualComplex, as_dual
from .errors import DomainError, InvalidSpec, NoConvergence
from .measures import (
    MeasureRepr,
    SecondCoordRepr,
    Semicircle,
    SemicircleBDerivative,
    free_poisson_moment,
)
from .subordination import DEFAULT_CONFIG, SolverConfig
from .typeb import TypeBLaw, boxplus_b

__all__ = [
    "StableSpec",
    "StableLaw",
    "StableBDerivative",
    "stable_phi",
    "stable_scaling",
    "stable_cauchy",
    "stable_second",
    "stable_second_fd_check",
    "poisson_b_family",
    "poisson_b_derivative",
    "richardson_derivative",
    "BurgersState",
    "burgers_state",
    "burgers_residual",
    "conservation_identity_check",
]

_ARG_TOL = 1e-12


def _arg_in(arg: float, lo: float, hi: float) -> bool:
    """Whether ``arg`` (mod 2π) lies in ``[lo, hi]`` up to a small tolerance."""
    for k in (-2, -1, 0, 1, 2):
        a = arg + 2 * math.pi * k
        if lo - _ARG_TOL <= a <= hi + _ARG_TOL:
            return True
    return False


@dataclass(frozen=True)
class StableSpec:
    """Parameters ``(case, α, b, a)`` of a free stable law."""

    case: int
    alpha: float = 1.0
    b: complex = 0.0
    a: float = 0.0

    def __post_init__(self):
        case, alpha = self.case, float(self.alpha)
        b = complex(self.b)
        object.__setattr__(self, "b", b)
        if case not in (1, 2, 3, 4, 5):
            raise InvalidSpec(f"unknown stable case {case}")
        if case in (1, 2, 5):
            object.__setattr__(self, "alpha", 1.0)
        if case in (2, 5) and not (b.imag == 0 and b.real < 0):
            raise InvalidSpec(f"case {case} needs real b < 0")
        if case == 3:
            if not 1 < alpha <= 2:
                raise InvalidSpec("case 3 needs alpha in (1, 2]")
            if b == 0 or not _arg_in(cmath.phase(b), (alpha - 2) * math.pi, 0.0):
                raise InvalidSpec("case 3 needs arg b in [(alpha-2)pi, 0]")
        if case == 4:
            if not 0 < alpha < 1:
                raise InvalidSpec("case 4 needs alpha in (0, 1)")
            if b == 0 or not _arg_in(cmath.phase(b), math.pi, (1 + alpha) * math.pi):
                raise InvalidSpec("case 4 needs arg b in [pi, (1+alpha)pi]")


def stable_phi(spec: StableSpec, z):
    """Voiculescu transform of the stable law (complex or dual ``z``)."""
    a, b = spec.a, spec.b
    if spec.case == 1:
        return a + 0 * z
    if spec.case == 2:
        return a + 1j * b.real + 0 * z
    if spec.case in (3, 4):
        return a + b * dn.power(z, 1 - spec.alpha)
    return a + b.real * dn.log(z)


def stable_scaling(spec: StableSpec, t: float):
    """Constants ``(s(t), b(t))`` relating ``t φ_μ`` to a dilated and shifted ``φ_μ``.

    For cases 1 to 4, ``t φ(z) = (φ(s z) - b(t)) / s``.  In case 5 the
    returned ``b(t) = b log t`` enters with the opposite sign:
    ``t φ(z) = (φ(s z) + b(t)) / s``.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if spec.case in (1, 2):
        return 1 / t, 0.0
    if spec.case in (3, 4):
        alpha = spec.alpha
        return t ** (-1 / alpha), spec.a * (1 - t ** (1 - 1 / alpha))
    return 1 / t, spec.b.real * math.log(t)


def stable_cauchy(spec: StableSpec, q: float, Z, tol: float = 1e-14, max_iter: int = 100):
    """``G_{μ^{⊞q}}(Z)`` by solving ``w + q φ(w) = z`` for ``w = F(z)``.

    Newton's method is started at a height where ``w ≈ z`` and continued
    down to ``Im z``.  Dual input returns ``G'`` in the dual part.
    """
    if q <= 0:
        raise ValueError("q must be positive")
    Zd = as_dual(Z)
    z = complex(Zd.re)
    if z.imag < 0:
        out = stable_cauchy(spec, q, DualComplex(z.conjugate(), np.conj(Zd.inf)), tol, max_iter)
        out = as_dual(out).conjugate()
        return out if isinstance(Z, DualComplex) else out.re
    if z.imag == 0:
        raise DomainError("stable transforms are evaluated off the real axis")

    if spec.case in (1, 2):
        w = z - q * complex(stable_phi(spec, z))
    else:
        w = _invert_stable(spec, q, z, tol, max_iter)
    dphi = stable_phi(spec, DualComplex(w, 1)).inf
    dw = 1 / (1 + q * dphi)
    G = 1 / DualComplex(w, Zd.inf * dw)
    return G if isinstance(Z, DualComplex) else G.re


def _invert_stable(spec, q, z, tol, max_iter):
    top = max(z.imag, 10 * (1 + abs(z.real)) * max(1.0, q))
    heights = np.geomspace(top, z.imag, 24) if top > z.imag else [z.imag]
    w = complex(z.real, top)
    for y in heights:
        target = complex(z.real, y)
        for _ in range(max_iter):
            phi = stable_phi(spec, DualComplex(w, 1))
            f = w + q * phi.re - target
            step = f / (1 + q * phi.inf)
            new = w - step
            for _ in range(60):
                if new.imag > 0:
                    break
                step /= 2
                new = w - step
            else:
                raise NoConvergence(f"stable inversion left the half-plane at z={target}", abs(step))
            w = new
            if abs(step) < tol * max(1.0, abs(w)):
                break
        else:
            raise NoConvergence(f"stable inversion failed at z={target}", abs(step))
    residual = abs(w + q * complex(stable_phi(spec, w)) - z)
    if residual > 1e-11 * max(1.0, abs(z)):
        raise NoConvergence(f"stable inversion residual {residual} at z={z}", residual)
    return w


def stable_second(spec: StableSpec, z):
    """``∂_q G_{μ^{⊞q}}(z)`` at ``q = 1`` in closed form through ``G`` and ``G'``."""
    G = stable_cauchy(spec, 1.0, DualComplex(complex(z), 1))
    if spec.case == 5:
        return -(G.re + z * G.inf) - spec.b.real * G.inf
    return -(G.re + z * G.inf) / spec.alpha


def stable_second_fd_check(spec: StableSpec, z, h: float = 1e-4) -> float:
    """``|stable_second - central difference of G_{μ^{⊞q}} in q at q = 1|``."""
    if not 1e-5 <= h <= 1e-3:
        raise ValueError("h must lie in [1e-5, 1e-3]")
    fd = (stable_cauchy(spec, 1 + h, z) - stable_cauchy(spec, 1 - h, z)) / (2 * h)
    return abs(stable_second(spec, z) - fd)


@dataclass(frozen=True)
class StableLaw(MeasureRepr):
    """The stable law ``μ^{⊞q}`` as a measure."""

    spec: StableSpec
    q: float = 1.0

    def cauchy(self, z):
        return stable_cauchy(self.spec, self.q, z)


@dataclass(frozen=True)
class StableBDerivative(SecondCoordRepr):
    """Second coordinate ``∂_q μ^{⊞q}`` at ``q = 1`` of a stable law.

    In case 1 this is the derivative of a point mass, which is not a measure.
    """

    spec: StableSpec

    @property
    def is_measure(self) -> bool:
        return self.spec.case != 1

    def g(self, z):
        return stable_second(self.spec, z)


# =============================================================================
# Type B free Poisson family
# =============================================================================


def poisson_b_family(alpha1, alpha2, lambda1, lambda2, t: float, L: int) -> list:
    """Moments ``m_1..m_L`` of the free Poisson law with jump ``α₁ exp(t α₂/α₁)``
    and rate ``λ₁ + t λ₂``."""
    if alpha1 <= 0:
        raise ValueError("alpha1 must be positive")
    jump = alpha1 * math.exp(t * alpha2 / alpha1)
    rate = lambda1 + t * lambda2
    return [free_poisson_moment(rate, jump, n) for n in range(1, L + 1)]


def richardson_derivative(f, x0: float, h: float = 0.1, levels: int = 6):
    """Derivative of a smooth function by Richardson-extrapolated central differences.

    Builds the usual Neville tableau over step sizes ``h, h/2, ...``; works
    elementwise when ``f`` returns an array.
    """
    table = []
    for i in range(levels):
        step = h / 2**i
        row = [(np.asarray(f(x0 + step)) - np.asarray(f(x0 - step))) / (2 * step)]
        for j in range(1, i + 1):
            factor = 4.0**j
            row.append((factor * row[j - 1] - table[i - 1][j - 1]) / (factor - 1))
        table.append(row)
    return table[-1][-1]


def poisson_b_derivative(alpha1, alpha2, lambda1, lambda2, L: int) -> np.ndarray:
    """``d/dt`` at ``t = 0`` of :func:`poisson_b_family` moments (finite differences)."""
    return richardson_derivative(
        lambda t: np.array(poisson_b_family(alpha1, alpha2, lambda1, lambda2, t, L)), 0.0
    )


# =============================================================================
# Type B heat equation
# =============================================================================


@dataclass
class BurgersState:
    """``(𝔊(t), 𝔏(t)) = p ⊞_B (γ_t, λ_t)`` with ``λ_t = ∂_t γ_t``."""

    t: float
    output: object

    def G(self, Z):
        return self.output.G3(Z)

    def g(self, z):
        return self.output.g3(z)


def burgers_state(p, t: float, config: SolverConfig = DEFAULT_CONFIG) -> BurgersState:
    if t <= 0:
        raise ValueError("t must be positive")
    heat = TypeBLaw(Semicircle(0.0, t), SemicircleBDerivative(t))
    return BurgersState(t, boxplus_b(p, heat, config))


def _burgers_terms(p, t, z, h_t, h_z, config):
    now = burgers_state(p, t, config)
    up = burgers_state(p, t + h_t, config)
    down = burgers_state(p, t - h_t, config)
    G = now.G(DualComplex(z, 1))
    g = now.g(z)
    dG_dt = (up.G(z) - down.G(z)) / (2 * h_t)
    dg_dt = (up.g(z) - down.g(z)) / (2 * h_t)
    dg_dz = (now.g(z + h_z) - now.g(z - h_z)) / (2 * h_z)
    return G.re, G.inf, g, dG_dt, dg_dt, dg_dz


def burgers_residual(p, t: float, grid: Sequence[complex], h_t: float = 1e-3,
                     h_z: float = 1e-3, config: SolverConfig = DEFAULT_CONFIG):
    """Largest residuals of ``∂_t G + G ∂_z G = 0`` and ``∂_t g + ∂_z(G g) = 0``.

    ``∂_t`` and ``∂_z g`` are central differences; ``∂_z G`` is exact (dual).
    """
    r1 = r2 = 0.0
    for z in grid:
        G, dG, g, dG_dt, dg_dt, dg_dz = _burgers_terms(p, t, complex(z), h_t, h_z, config)
        r1 = max(r1, abs(dG_dt + G * dG))
        r2 = max(r2, abs(dg_dt + dG * g + G * dg_dz))
    return r1, r2


def conservation_identity_check(p, t: float, P: Sequence[float], z, h_t: float = 1e-3,
                                config: SolverConfig = DEFAULT_CONFIG) -> float:
    """Residual of ``∂_t[g P(G)] + ∂_z[g G P(G)] = 0``.

    ``P`` holds polynomial coefficients, lowest degree first.  Both
    derivatives are central differences with step ``h_t``.
    """
    poly = np.polynomial.Polynomial(P)
    z = complex(z)

    def flux(state, zz):
        G = state.G(zz)
        return state.g(zz) * G * poly(G)

    def density(state, zz):
        return state.g(zz) * poly(state.G(zz))

    now = burgers_state(p, t, config)
    up = burgers_state(p, t + h_t, config)
    down = burgers_state(p, t - h_t, config)
    d_t = (density(up, z) - density(down, z)) / (2 * h_t)
    d_z = (flux(now, z + h_t) - flux(now, z - h_t)) / (2 * h_t)
    return abs(d_t + d_z)
