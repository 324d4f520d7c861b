"""Dual numbers over the complex field.

A dual number ``Z = z + w*h`` with ``h**2 = 0`` carries a value ``z`` and a
first-order perturbation ``w``.  Evaluating an analytic function ``f`` at
``Z`` gives ``f(z) + w f'(z) h``, so the class doubles as a forward-mode
derivative carrier.  Coordinates may be any numeric type supporting field
arithmetic (``int``, ``float``, ``complex``, :class:`fractions.Fraction`), which
gives exact arithmetic for free when rationals are used.
"""

from __future__ import annotations

import cmath
import numbers
from typing import Callable

from .errors import CriticalPoint, DomainError, NonInvertible

__all__ = [
    "DualComplex",
    "HBAR",
    "as_dual",
    "dual_mul",
    "dual_pow",
    "lift_analytic",
    "compose_inverse_step",
    "sqrt",
    "log",
    "exp",
    "power",
    "value",
    "infinitesimal",
    "base_value",
]


class DualComplex:
    """Element ``re + inf*h`` of the algebra of dual numbers.

    Instances are immutable values.  Arithmetic with plain numbers treats the
    number as ``x + 0h``.
    """

    __slots__ = ("re", "inf")

    def __init__(self, re=0, inf=0):
        self.re = re
        self.inf = inf

    # -- construction helpers -------------------------------------------------

    @classmethod
    def variable(cls, z):
        """Return ``z + 1h``, the seed for differentiating at ``z``."""
        return cls(z, 1)

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, DualComplex):
            return DualComplex(self.re + other.re, self.inf + other.inf)
        if isinstance(other, numbers.Number):
            return DualComplex(self.re + other, self.inf)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, DualComplex):
            return DualComplex(self.re - other.re, self.inf - other.inf)
        if isinstance(other, numbers.Number):
            return DualComplex(self.re - other, self.inf)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, numbers.Number):
            return DualComplex(other - self.re, -self.inf)
        return NotImplemented

    def __neg__(self):
        return DualComplex(-self.re, -self.inf)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, DualComplex):
            return DualComplex(
                self.re * other.re, self.re * other.inf + self.inf * other.re
            )
        if isinstance(other, numbers.Number):
            return DualComplex(self.re * other, self.inf * other)
        return NotImplemented

    __rmul__ = __mul__

    def reciprocal(self):
        """Return ``1/self``; raises :class:`NonInvertible` when ``re == 0``."""
        if self.re == 0:
            raise NonInvertible("dual number with zero first coordinate")
        r = 1 / self.re
        return DualComplex(r, -self.inf * r * r)

    def __truediv__(self, other):
        if isinstance(other, DualComplex):
            return self * other.reciprocal()
        if isinstance(other, numbers.Number):
            if other == 0:
                raise NonInvertible("division by zero")
            return DualComplex(self.re / other, self.inf / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, numbers.Number):
            return other * self.reciprocal()
        return NotImplemented

    def __pow__(self, n):
        if isinstance(n, numbers.Integral):
            return dual_pow(self, int(n))
        if isinstance(n, numbers.Number):
            return power(self, n)
        return NotImplemented

    # -- comparisons and misc ---------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, DualComplex):
            return self.re == other.re and self.inf == other.inf
        if isinstance(other, numbers.Number):
            return self.re == other and self.inf == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.inf))

    def __repr__(self):
        return f"DualComplex({self.re!r}, {self.inf!r})"

    def __str__(self):
        return f"({self.re}) + ({self.inf})h"

    def conjugate(self):
        """Coordinatewise complex conjugate."""
        return DualComplex(_conj(self.re), _conj(self.inf))

    def norm(self):
        """Max of the moduli of both coordinates (used for residuals)."""
        return max(abs(self.re), abs(self.inf))

    def is_close(self, other, tol=1e-12):
        other = as_dual(other)
        return (self - other).norm() <= tol


HBAR = DualComplex(0, 1)


def _conj(x):
    return x.conjugate() if hasattr(x, "conjugate") else x


def as_dual(x) -> DualComplex:
    """Coerce a number, or a ``(re, inf)`` pair, to a dual number."""
    if isinstance(x, DualComplex):
        return x
    if isinstance(x, (tuple, list)):
        if len(x) != 2:
            raise ValueError("a dual number pair must have two entries")
        return DualComplex(x[0], x[1])
    return DualComplex(x, 0)


def value(x):
    """First coordinate of a dual number, or the number itself."""
    return x.re if isinstance(x, DualComplex) else x


def infinitesimal(x):
    """Second coordinate of a dual number, or zero for plain numbers."""
    return x.inf if isinstance(x, DualComplex) else 0


def dual_mul(a: DualComplex, b: DualComplex) -> DualComplex:
    """Product rule multiplication ``(a.re b.re, a.re b.inf + a.inf b.re)``."""
    return as_dual(a) * as_dual(b)


def dual_pow(a: DualComplex, n: int) -> DualComplex:
    """Integer power ``(re**n, n re**(n-1) inf)``.

    Raises
    ------
    NonInvertible
        If ``a.re == 0`` and ``n < 0``.
    """
    a = as_dual(a)
    if n < 0 and a.re == 0:
        raise NonInvertible("zero base with negative exponent")
    if n == 0:
        return DualComplex(a.re ** 0, 0 * a.inf)
    return DualComplex(a.re**n, n * a.re ** (n - 1) * a.inf)


def lift_analytic(
    f: Callable, fprime: Callable, a: DualComplex
) -> DualComplex:
    """Evaluate an analytic function at a dual number.

    Returns ``(f(a.re), a.inf * fprime(a.re))``.  Any arithmetic failure of
    ``f`` or ``fprime`` at ``a.re`` is reported as :class:`DomainError`.
    """
    a = as_dual(a)
    try:
        fz = f(a.re)
        dfz = fprime(a.re)
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        raise DomainError(f"function undefined at {a.re!r}") from exc
    return DualComplex(fz, a.inf * dfz)


def compose_inverse_step(z, g_value, f1_prime_value, target: DualComplex):
    """Second coordinate of the compositional inverse of ``F(Z) = (f1(z), w f1'(z) + g(z))``.

    ``z`` must already equal ``f1^{-1}(target.re)``; the caller supplies
    ``g(z)`` and ``f1'(z)``.
    """
    if f1_prime_value == 0:
        raise CriticalPoint("derivative vanishes at the preimage")
    return DualComplex(z, (target.inf - g_value) / f1_prime_value)


# -- lifted elementary functions ---------------------------------------------------
# Each function recurses into the first coordinate, so nested dual numbers
# (duals whose coordinates are duals) propagate second derivatives.


def sqrt(x):
    """Principal square root, lifted to dual numbers."""
    if isinstance(x, DualComplex):
        if x.re == 0:
            raise DomainError("sqrt is not differentiable at 0")
        r = sqrt(x.re)
        return DualComplex(r, x.inf / (2 * r))
    return cmath.sqrt(x)


def log(x):
    """Principal logarithm, lifted to dual numbers."""
    if isinstance(x, DualComplex):
        if x.re == 0:
            raise DomainError("log undefined at 0")
        return DualComplex(log(x.re), x.inf / x.re)
    if x == 0:
        raise DomainError("log undefined at 0")
    return cmath.log(x)


def exp(x):
    """Exponential, lifted to dual numbers."""
    if isinstance(x, DualComplex):
        e = exp(x.re)
        return DualComplex(e, x.inf * e)
    return cmath.exp(x)


def power(x, p):
    """Principal power ``x**p = exp(p Log x)`` for a real or complex exponent."""
    if isinstance(x, DualComplex):
        if x.re == 0:
            raise DomainError("power undefined at 0")
        v = power(x.re, p)
        return DualComplex(v, x.inf * p * v / x.re)
    if x == 0:
        raise DomainError("power undefined at 0")
    return cmath.exp(p * cmath.log(x))


def base_value(x):
    """Innermost scalar of a possibly nested dual number."""
    while isinstance(x, DualComplex):
        x = x.re
    return x
