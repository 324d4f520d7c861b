"""Truncated full Fock space model of free creation operators.

The alphabet consists of triples ``(i, j, k)`` with ``1 <= i, j <= N`` and
``1 <= k <= K``; the Fock space is truncated at word length ``D``.  The
creation operator ``ℓ(g)`` prepends ``g`` and sends words of length ``D`` to
zero.  All operators are stored as integer sparse matrices; the scale
``(2N)^{-1/2}`` of ``X̂_N`` is tracked separately so vacuum moments can be
returned as exact rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import SizeLimit, TruncationTooShallow

__all__ = [
    "MAX_DIMENSION",
    "FockBasis",
    "FockOperator",
    "build_fock",
    "creation",
    "matrix_XN",
    "check_L_relations",
    "psi_N_moment",
    "psi_N_word",
    "predicted_moment",
    "infinitesimal_law_extract",
]

MAX_DIMENSION = 10**6


@dataclass(frozen=True)
class FockBasis:
    """Words of length ``<= depth`` over an alphabet of ``N^2 K`` letters."""

    N: int
    K: int
    depth: int

    @property
    def alphabet_size(self) -> int:
        return self.N * self.N * self.K

    @cached_property
    def offsets(self) -> tuple:
        """Index of the first word of each length ``0..depth+1``."""
        out = [0]
        for length in range(self.depth + 1):
            out.append(out[-1] + self.alphabet_size**length)
        return tuple(out)

    @property
    def dimension(self) -> int:
        return self.offsets[-1]

    def letter(self, i: int, j: int, k: int) -> int:
        """Ordinal of the letter ``(i, j, k)`` (1-based labels)."""
        if not (1 <= i <= self.N and 1 <= j <= self.N and 1 <= k <= self.K):
            raise ValueError(f"letter {(i, j, k)} outside the alphabet")
        return ((i - 1) * self.N + (j - 1)) * self.K + (k - 1)

    def index(self, word: Sequence[int]) -> int:
        """Ordinal of a word given as letter ordinals, first letter leftmost."""
        if len(word) > self.depth:
            raise ValueError("word longer than the truncation depth")
        idx = 0
        for g in word:
            idx = idx * self.alphabet_size + g
        return self.offsets[len(word)] + idx

    def word(self, index: int) -> tuple:
        """Inverse of :meth:`index`."""
        length = int(np.searchsorted(self.offsets, index, side="right")) - 1
        rest = index - self.offsets[length]
        letters = []
        for _ in range(length):
            rest, g = divmod(rest, self.alphabet_size)
            letters.append(g)
        return tuple(reversed(letters))

    def length_mask(self, max_length: int) -> np.ndarray:
        """Boolean mask of basis words of length ``<= max_length``."""
        mask = np.zeros(self.dimension, dtype=bool)
        mask[: self.offsets[max_length + 1]] = True
        return mask


def build_fock(N: int, K: int, D: int) -> FockBasis:
    """Fock basis for ``N x N`` matrices with ``K`` colours, truncated at depth ``D``."""
    if N < 1 or K < 1 or D < 0:
        raise ValueError("N, K >= 1 and D >= 0 required")
    basis = FockBasis(N, K, D)
    if basis.dimension > MAX_DIMENSION:
        raise SizeLimit(f"Fock dimension {basis.dimension} exceeds {MAX_DIMENSION}")
    return basis


@dataclass(frozen=True, eq=False)
class FockOperator:
    """Sparse integer matrix on a Fock basis, with a tag for bookkeeping."""

    matrix: sp.csr_matrix
    tag: str = "composite"

    def adjoint(self) -> "FockOperator":
        tag = {"creation": "annihilation", "annihilation": "creation"}.get(self.tag, self.tag)
        return FockOperator(self.matrix.T.tocsr(), tag)

    def __add__(self, other):
        return FockOperator((self.matrix + other.matrix).tocsr())

    def __matmul__(self, other):
        return FockOperator((self.matrix @ other.matrix).tocsr())


def creation(basis: FockBasis, g: int) -> FockOperator:
    """``ℓ(g)``: prepend letter ``g``; words of full depth are annihilated."""
    A = basis.alphabet_size
    rows, cols = [], []
    for length in range(basis.depth):
        start, stop = basis.offsets[length], basis.offsets[length + 1]
        src = np.arange(start, stop)
        dst = basis.offsets[length + 1] + g * A**length + (src - start)
        rows.append(dst)
        cols.append(src)
    rows = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
    cols = np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
    data = np.ones(len(rows), dtype=np.int64)
    n = basis.dimension
    return FockOperator(sp.csr_matrix((data, (rows, cols)), shape=(n, n)), "creation")


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """``N x N`` matrix of Fock operators with a common scalar factor ``sqrt(scale_sq)``."""

    entries: tuple
    scale_sq: Fraction

    @property
    def N(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def is_self_adjoint(self) -> bool:
        for i in range(self.N):
            for j in range(self.N):
                diff = self.entries[i][j].matrix - self.entries[j][i].matrix.T
                if diff.count_nonzero():
                    return False
        return True

    def apply(self, vectors: np.ndarray) -> np.ndarray:
        """Apply the unscaled integer matrix to a stack of ``N`` vectors."""
        out = np.zeros_like(vectors)
        for i in range(self.N):
            for j in range(self.N):
                out[i] += self.entries[i][j].matrix @ vectors[j]
        return out


def matrix_XN(basis: FockBasis, N: int, k: int) -> OperatorMatrix:
    """``X̂_N(k)`` with entries ``(2N)^{-1/2}(ℓ(i,j,k) + ℓ(j,i,k) + adjoints)``."""
    if basis.N != N:
        raise ValueError("basis was built for a different N")
    ells = {
        (i, j): creation(basis, basis.letter(i, j, k))
        for i in range(1, N + 1)
        for j in range(1, N + 1)
    }
    rows = []
    for i in range(1, N + 1):
        row = []
        for j in range(1, N + 1):
            s = ells[(i, j)] + ells[(j, i)]
            row.append(s + s.adjoint())
        rows.append(tuple(row))
    return OperatorMatrix(tuple(rows), Fraction(1, 2 * N))


def check_L_relations(basis: FockBasis, N: int, K: int) -> int:
    """Largest entry violation of the four relations between ``L_N(k)`` and ``L_N(k)^t``.

    The check is done on ``N``-scaled integer matrices, restricted to words
    of length ``<= depth - 1`` where truncation does not interfere.
    ``0`` means every relation holds exactly.
    """
    if basis.N != N or basis.K != K:
        raise ValueError("basis does not match N, K")
    if basis.depth < 1:
        raise TruncationTooShallow("need depth >= 1")
    ell = {
        (i, j, k): creation(basis, basis.letter(i, j, k)).matrix
        for i in range(1, N + 1)
        for j in range(1, N + 1)
        for k in range(1, K + 1)
    }
    mask = basis.length_mask(basis.depth - 1)
    identity = sp.identity(basis.dimension, dtype=np.int64, format="csr")[:, mask]

    def entry(k, kp, left_t, right_t, a, b):
        # N (M1^* M2)_{ab} = Σ_m ℓ(..)^* ℓ(..); a transpose swaps the index pair
        total = None
        for m in range(1, N + 1):
            left = ell[(a, m, k)] if left_t else ell[(m, a, k)]
            right = ell[(b, m, kp)] if right_t else ell[(m, b, kp)]
            term = (left.T @ right)[:, mask]
            total = term if total is None else total + term
        return total

    worst = 0
    for k in range(1, K + 1):
        for kp in range(1, K + 1):
            for left_t, right_t, expected in (
                (False, False, N),
                (True, True, N),
                (True, False, 1),
                (False, True, 1),
            ):
                for a in range(1, N + 1):
                    for b in range(1, N + 1):
                        got = entry(k, kp, left_t, right_t, a, b)
                        target = expected if (k == kp and a == b) else 0
                        diff = got - target * identity
                        if diff.nnz:
                            worst = max(worst, int(abs(diff).max()))
    return worst


def _vacuum_stack(basis: FockBasis, N: int, dtype) -> np.ndarray:
    return np.zeros((N, basis.dimension), dtype=dtype)


def psi_N_word(basis: FockBasis, matrices: Sequence[OperatorMatrix], exact: bool = True):
    """``ψ_N`` of the product ``matrices[0] matrices[1] ...`` (vacuum state).

    Returns a :class:`Fraction` in exact mode, otherwise a float.
    """
    N = basis.N
    m = len(matrices)
    if basis.depth < math.ceil(m / 2):
        raise TruncationTooShallow(f"depth {basis.depth} < ceil({m}/2)")
    total = 0
    for i in range(N):
        v = _vacuum_stack(basis, N, np.int64)
        v[i, 0] = 1
        # act from the right: (X1 X2 ... Xm)_{ii} Ω
        for M in reversed(matrices):
            v = M.apply(v)
        total += int(v[i, 0])
    scale = Fraction(1)
    for M in matrices:
        scale *= M.scale_sq
    # the product of m factors sqrt(scale_sq) is rational only for even m
    if m % 2:
        if total != 0:
            raise ArithmeticError("odd moment with nonzero count")
        return Fraction(0) if exact else 0.0
    value = Fraction(total, N) * _fraction_sqrt(scale)
    return value if exact else float(value)


def _fraction_sqrt(x: Fraction) -> Fraction:
    num, den = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if num * num != x.numerator or den * den != x.denominator:
        raise ArithmeticError("scale is not a perfect square")
    return Fraction(num, den)


def psi_N_moment(basis: FockBasis, XN: OperatorMatrix, m: int, exact: bool = True):
    """``ψ_N(X_N^m) = (1/N) Σ_i ⟨Ω, (X_N^m)_{ii} Ω⟩``.

    In float mode the matrices are scaled in floating point at every step.
    """
    if basis.depth < math.ceil(m / 2):
        raise TruncationTooShallow(f"depth {basis.depth} < ceil({m}/2)")
    if exact:
        return psi_N_word(basis, [XN] * m, exact=True)
    N = basis.N
    c = math.sqrt(float(XN.scale_sq))
    total = 0.0
    for i in range(N):
        v = np.zeros((N, basis.dimension))
        v[i, 0] = 1.0
        for _ in range(m):
            v = c * XN.apply(v)
        total += v[i, 0]
    return total / N


def predicted_moment(N: int, m: int) -> Fraction:
    """``C_{m/2} (1 + 1/N)^{m/2}`` for even ``m``, zero for odd ``m``."""
    from .nc import catalan

    if m % 2:
        return Fraction(0)
    n = m // 2
    return catalan(n) * (1 + Fraction(1, N)) ** n


def _lagrange_coefficients(xs: Sequence[Fraction], ys: Sequence[Fraction]) -> list:
    """Monomial coefficients of the interpolating polynomial, exactly."""
    n = len(xs)
    coeffs = [Fraction(0)] * n
    for i in range(n):
        basis_poly = [Fraction(1)]
        denom = Fraction(1)
        for j in range(n):
            if j == i:
                continue
            basis_poly = [Fraction(0)] + basis_poly
            for d in range(len(basis_poly) - 1):
                basis_poly[d] -= xs[j] * basis_poly[d + 1]
            denom *= xs[i] - xs[j]
        for d in range(n):
            coeffs[d] += ys[i] * basis_poly[d] / denom
    return coeffs


def infinitesimal_law_extract(moment_fn: Callable[[int, int], Fraction], m_max: int) -> list:
    """``(μ(t^m), μ'(t^m))`` for ``m = 1..m_max`` from moments as functions of ``N``.

    ``moment_fn(N, m)`` must be a polynomial of degree ``<= m/2`` in ``1/N``;
    it is interpolated exactly through ``N = 1..m/2 + 1`` and the constant and
    linear coefficients are returned.
    """
    out = []
    for m in range(1, m_max + 1):
        degree = m // 2
        Ns = range(1, degree + 2)
        xs = [Fraction(1, N) for N in Ns]
        ys = [Fraction(moment_fn(N, m)) for N in Ns]
        coeffs = _lagrange_coefficients(xs, ys)
        mu = coeffs[0]
        mu_prime = coeffs[1] if len(coeffs) > 1 else Fraction(0)
        out.append((mu, mu_prime))
    return out
