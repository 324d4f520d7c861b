"""Subordination solvers for additive and multiplicative free convolution.

The additive solver finds ``ω₁`` as the attracting fixed point of

    T(w, z) = z + H₂(z + H₁(w)),    H_j = F_j - id,

a holomorphic self-map of the upper half-plane, and sets ``ω₂ = z + H₁(ω₁)``.
The multiplicative solver does the same for ``T(w, z) = z k₂(z k₁(w))`` with
``k_j(w) = η_j(w)/w``.

Both solvers run plain fixed-point iteration first, then polish with Newton's
method (derivatives from dual numbers).  Points very close to the real axis
are reached by continuation in ``Im z``.  Derivatives of ``ω_j`` with respect
to ``z`` come from the implicit function theorem at the converged point, so
they are exact up to the fixed-point residual.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Callable

from .dualnum import DualComplex, as_dual
from .errors import DegenerateMeasure, DomainError, NoConvergence
from .measures import MeasureRepr, dual_cauchy

__all__ = [
    "SolverConfig",
    "SubordinationResult",
    "Domain",
    "additive_omega",
    "multiplicative_omega",
    "dual_subordination_check",
    "normalization_ratio",
    "solve_fixed_point",
]

log = logging.getLogger(__name__)

_MACHINE_EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances shared by the subordination solvers."""

    tol: float = 1e-13
    max_iter: int = 500
    eps_im: float = 1e-7
    newton_iter: int = 60

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.eps_im <= 0:
            raise ValueError("eps_im must be positive")


DEFAULT_CONFIG = SolverConfig()


@dataclass
class SubordinationResult:
    """Converged subordination data at one point.

    ``omega1`` and ``omega2`` are dual numbers whose infinitesimal parts are
    ``ω_j'(z)`` times the infinitesimal part of the input point.  ``value``
    is ``G₃`` (additive) or ``ψ₃`` (multiplicative), also dual.
    """

    omega1: DualComplex
    omega2: DualComplex
    value: DualComplex
    iterations: int
    residual_sub: float
    residual_sum: float
    steps: list = field(default_factory=list, repr=False)

    @property
    def G3(self):
        return self.value

    @property
    def psi3(self):
        return self.value

    def derivatives(self):
        """``(ω₁'(z), ω₂'(z))`` assuming the input seed had unit infinitesimal part."""
        return self.omega1.inf, self.omega2.inf


class Domain(enum.Enum):
    DISC = "disc"
    SLIT_PLANE = "slit"


# =============================================================================
# Generic fixed-point machinery
# =============================================================================


def _accept_threshold(w: complex, tol: float) -> float:
    return max(tol, 64 * _MACHINE_EPS) * max(1.0, abs(w))


def solve_fixed_point(
    T: Callable,
    w0: complex,
    config: SolverConfig = DEFAULT_CONFIG,
    inside: Callable[[complex], bool] = lambda w: w.imag > 0,
):
    """Fixed point of ``T`` by iteration followed by Newton polishing.

    ``T`` must accept complex and dual arguments; ``T(DualComplex(w, 1)).inf``
    is used as ``T'(w)``.  ``inside`` tells whether a Newton candidate stays
    in the domain of ``T``.

    Returns
    -------
    w, iterations, residual, steps
        ``steps`` lists the iteration increments ``|w_{k+1} - w_k|``.
    """
    w = complex(w0)
    steps = []
    iterations = 0
    for iterations in range(1, config.max_iter + 1):
        w_next = complex(T(w))
        if not inside(w_next):
            raise DomainError(f"fixed-point iterate left the domain at {w_next}")
        delta = abs(w_next - w)
        steps.append(delta)
        w = w_next
        if delta < config.tol * max(1.0, abs(w)):
            break

    residual = abs(complex(T(w)) - w)
    for _ in range(config.newton_iter):
        if residual <= _accept_threshold(w, config.tol) / 8:
            break
        Tw = T(DualComplex(w, 1))
        slope = Tw.inf - 1
        if slope == 0:
            break
        candidate = w - (Tw.re - w) / slope
        if not inside(candidate):
            break
        cand_residual = abs(complex(T(candidate)) - candidate)
        if not cand_residual < residual:
            break
        w, residual = candidate, cand_residual
    return w, iterations, residual, steps


def _implicit_derivative(T2: Callable, w: complex, z: complex) -> complex:
    """``dw/dz`` for the fixed point ``w = T2(w, z)``."""
    d_w = T2(DualComplex(w, 1), z).inf
    d_z = T2(w, DualComplex(z, 1)).inf
    denom = 1 - d_w
    if denom == 0:
        raise NoConvergence("fixed point is parabolic; derivative undefined")
    return d_z / denom


def _continuation(solve_at: Callable, z: complex, config: SolverConfig):
    """Solve at ``z`` by walking ``Im z`` down from a comfortable height."""
    heights = []
    y = z.imag
    while y < 1e-2:
        heights.append(y)
        y *= 4
    heights.append(y)
    heights.reverse()
    guess = None
    total_iter = 0
    result = None
    for y in heights:
        point = complex(z.real, y)
        result = solve_at(point, guess)
        total_iter += result[1]
        guess = result[0]
    w, _, residual, steps = result
    return w, total_iter, residual, steps


# =============================================================================
# Additive subordination
# =============================================================================


def _split_point(Z):
    Z = as_dual(Z)
    z = complex(Z.re)
    return z, Z.inf


def additive_omega(
    mu1: MeasureRepr,
    mu2: MeasureRepr,
    Z,
    config: SolverConfig = DEFAULT_CONFIG,
) -> SubordinationResult:
    """Subordination functions of ``μ₁ ⊞ μ₂`` at a complex or dual point.

    Points in the lower half-plane are handled through conjugate symmetry;
    points with ``0 <= Im z < eps_im`` are lifted to ``Im z = eps_im``.
    """
    z, seed = _split_point(Z)
    if z.imag < 0:
        res = additive_omega(mu1, mu2, DualComplex(z.conjugate(), _conj(seed)), config)
        return SubordinationResult(
            res.omega1.conjugate(),
            res.omega2.conjugate(),
            res.value.conjugate(),
            res.iterations,
            res.residual_sub,
            res.residual_sum,
            res.steps,
        )
    if z.imag < config.eps_im:
        z = complex(z.real, config.eps_im)

    def H1(w):
        return mu1.reciprocal(w) - w

    def H2(w):
        return mu2.reciprocal(w) - w

    def T2(w, zz):
        return zz + H2(zz + H1(w))

    def solve_at(point, guess):
        start = guess if guess is not None else 2j * max(1.0, point.imag)
        return solve_fixed_point(lambda w: T2(w, point), start, config)

    w, iterations, residual, steps = solve_at(z, None)
    if residual > _accept_threshold(w, config.tol) and z.imag < 1e-2:
        log.debug("continuing in Im z towards %s", z)
        w, iterations, residual, steps = _continuation(solve_at, z, config)
    if residual > _accept_threshold(w, config.tol):
        raise NoConvergence(
            f"additive subordination did not converge at z={z}", residual
        )

    d_omega = _implicit_derivative(T2, w, z)
    omega1 = DualComplex(w, seed * d_omega)
    Zd = DualComplex(z, seed)
    omega2 = Zd + H1(omega1)
    G3 = mu1.cauchy(omega1)
    residual_sub = abs(complex(mu2.cauchy(omega2.re)) - G3.re)
    residual_sum = abs(omega1.re + omega2.re - z - 1 / G3.re)
    return SubordinationResult(
        omega1, omega2, G3, iterations, residual_sub, residual_sum, steps
    )


def _conj(x):
    return x.conjugate() if hasattr(x, "conjugate") else x


def normalization_ratio(mu1, mu2, y: float = 1e6, config=DEFAULT_CONFIG):
    """``(ω₁(iy)/iy, ω₂(iy)/iy)``, which tends to ``(1, 1)`` as ``y → ∞``."""
    res = additive_omega(mu1, mu2, 1j * y, config)
    return res.omega1.re / (1j * y), res.omega2.re / (1j * y)


# =============================================================================
# Multiplicative subordination
# =============================================================================


def _low_moments(mu):
    try:
        return complex(mu.moment(1)), complex(mu.moment(2))
    except Exception:  # evaluator-only laws: differentiate psi numerically
        h = 1e-4
        p1 = complex(mu.psi(h))
        p2 = complex(mu.psi(-h))
        m1 = (p1 - p2) / (2 * h)
        m2 = (p1 + p2) / (2 * h * h)
        return m1, m2


def _make_k(mu, small: float = 1e-7):
    """``k(w) = η(w)/w`` with its Taylor expansion near ``w = 0``."""
    m1, m2 = _low_moments(mu)

    def k(w):
        from .dualnum import base_value

        if abs(base_value(w)) < small:
            return m1 + (m2 - m1 * m1) * w
        p = mu.psi(w)
        return p / ((1 + p) * w)

    return k, m1


def multiplicative_omega(
    mu1: MeasureRepr,
    mu2: MeasureRepr,
    Z,
    domain: Domain = Domain.DISC,
    config: SolverConfig = DEFAULT_CONFIG,
) -> SubordinationResult:
    """Subordination functions of ``μ₁ ⊠ μ₂``.

    ``domain`` selects the unit disc (laws on the circle) or the slit plane
    ``ℂ \\ [0, ∞)`` (laws on the half line).  ``value`` is ``ψ₃ = ψ₁(ω₁)``.
    """
    domain = Domain(domain)
    z, seed = _split_point(Z)
    if domain is Domain.DISC:
        if not 0 < abs(z) < 1:
            raise DomainError("disc subordination needs 0 < |z| < 1")
    elif z.imag == 0 and z.real >= 0:
        raise DomainError("slit-plane subordination needs z outside [0, inf)")

    k1, m1a = _make_k(mu1)
    k2, m1b = _make_k(mu2)
    if domain is Domain.DISC and (abs(m1a) < 1e-14 or abs(m1b) < 1e-14):
        raise DegenerateMeasure("first moment vanishes; subordination is not determined")

    def T2(w, zz):
        return zz * k2(zz * k1(w))

    if domain is Domain.DISC:

        def inside(w):
            return abs(w) < 1

    else:

        def inside(w):
            return not (w.imag == 0 and w.real > 0)

    w, iterations, residual, steps = solve_fixed_point(
        lambda w: T2(w, z), z, config, inside
    )
    if residual > _accept_threshold(w, config.tol):
        raise NoConvergence(
            f"multiplicative subordination did not converge at z={z}", residual
        )
    d_omega = _implicit_derivative(T2, w, z)
    omega1 = DualComplex(w, seed * d_omega)
    Zd = DualComplex(z, seed)
    omega2 = Zd * k1(omega1)
    psi3 = mu1.psi(omega1)
    residual_sub = abs(complex(mu2.psi(omega2.re)) - psi3.re)
    eta3 = psi3.re / (1 + psi3.re)
    residual_sum = abs(z * eta3 - omega1.re * omega2.re)
    return SubordinationResult(
        omega1, omega2, psi3, iterations, residual_sub, residual_sum, steps
    )


# =============================================================================
# Dual (type B) subordination
# =============================================================================


def dual_subordination_check(pair1, pair2, result3, Z, config=DEFAULT_CONFIG) -> float:
    """Residual of the dual subordination relations at ``Z = (z, w)``.

    ``result3 = (G3, g3)`` are evaluators of the convolved pair; ``G3`` must be
    dual-capable.  The second coordinates of ``Ω_j = (ω_j, o_j)`` are built
    from ``ω_j'``, ``g_{ν_j}`` and ``g3``; the function returns the largest of
    ``|Ω₁ + Ω₂ - Z - F_B(Z)|`` and ``|G_{B,j}(Ω_j) - G_B(Z)|``.
    """
    (mu1, nu1), (mu2, nu2) = pair1, pair2
    G3_eval, g3_eval = result3
    Z = as_dual(Z)
    z, w = complex(Z.re), Z.inf
    sub = additive_omega(mu1, mu2, DualComplex(z, 1), config)
    om1, d1 = sub.omega1.re, sub.omega1.inf
    om2, d2 = sub.omega2.re, sub.omega2.inf
    G3 = G3_eval(DualComplex(z, 1))
    dG3 = G3.inf
    g3 = g3_eval(z)
    g1 = nu1.g(om1)
    g2 = nu2.g(om2)
    o1 = w * d1 + (g3 * (d1 - 1) + g2 * d2) / dG3
    o2 = w * d2 + (g3 * (d2 - 1) + g1 * d1) / dG3
    Om1 = DualComplex(om1, o1)
    Om2 = DualComplex(om2, o2)
    GB = DualComplex(G3.re, w * dG3 + g3)
    FB = 1 / GB
    r_sum = (Om1 + Om2 - Z - FB).norm()
    r1 = (dual_cauchy((mu1, nu1), Om1) - GB).norm()
    r2 = (dual_cauchy((mu2, nu2), Om2) - GB).norm()
    return max(r_sum, r1, r2)
