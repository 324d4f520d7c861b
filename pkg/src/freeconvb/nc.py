"""Non-crossing partitions and the moment-cumulant machinery over dual numbers.

Type A objects are partitions of ``{1..n}``.  Type B pairings live on
``{1..n, -1..-n}`` placed on a circle in the order ``1, 2, ..., n, -1, ..., -n``.

All moment/cumulant routines accept sequences whose entries are plain numbers
or :class:`~freeconvb.dualnum.DualComplex`; with :class:`fractions.Fraction`
coordinates (``exact=True``) every identity holds exactly.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .dualnum import DualComplex, as_dual
from .errors import InvalidBlock, SizeLimit

__all__ = [
    "NCPartitionA",
    "NCPairingB",
    "DualSequence",
    "catalan",
    "enumerate_nc",
    "enumerate_nc_pairings",
    "lift_pairing_b",
    "enumerate_b_pairings_lifted",
    "enumerate_b_pairings_direct",
    "count_b_pairings",
    "kreweras_type_count",
    "moments_from_cumulants",
    "cumulants_from_moments",
    "check_functional_equation",
    "colored_pairing_count",
    "colored_pairing_count_b",
    "infinitesimal_free_mixed_moment",
    "bernoulli_moments_b",
    "poisson_moments_b",
]

MAX_PARTITION_SIZE = 12
MAX_PAIRING_SIZE = 16
MAX_SERIES_LENGTH = 12


def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)


# =============================================================================
# Type A partitions
# =============================================================================


@dataclass(frozen=True)
class NCPartitionA:
    """A partition of ``{1..n}`` given by sorted blocks."""

    n: int
    blocks: tuple

    def block_sizes(self):
        return tuple(len(b) for b in self.blocks)

    def is_pairing(self) -> bool:
        return all(len(b) == 2 for b in self.blocks)

    def block_of(self, i: int) -> tuple:
        for b in self.blocks:
            if i in b:
                return b
        raise KeyError(i)

    def is_noncrossing(self) -> bool:
        covered = sorted(x for b in self.blocks for x in b)
        if covered != list(range(1, self.n + 1)):
            return False
        return _blocks_noncrossing([tuple(x - 1 for x in b) for b in self.blocks])


@lru_cache(maxsize=None)
def _nc_shapes(m: int) -> tuple:
    """All non-crossing partitions of ``range(m)`` as tuples of blocks.

    The block of 0 either is a singleton, or continues at some ``q``; then the
    gap ``1..q-1`` and the tail ``q..m-1`` are partitioned independently and
    0 joins the tail block containing ``q``.
    """
    if m == 0:
        return ((),)
    out = [((0,),) + _shift(rest, 1) for rest in _nc_shapes(m - 1)]
    for q in range(1, m):
        for gap in _nc_shapes(q - 1):
            for tail in _nc_shapes(m - q):
                blocks = list(_shift(tail, q))
                idx = next(i for i, b in enumerate(blocks) if b[0] == q)
                blocks[idx] = (0,) + blocks[idx]
                out.append(tuple(blocks) + _shift(gap, 1))
    return tuple(out)


def _shift(blocks, offset):
    return tuple(tuple(x + offset for x in b) for b in blocks)


def enumerate_nc(n: int) -> list:
    """All non-crossing partitions of ``{1..n}``, ``1 <= n <= 12``."""
    if not 1 <= n <= MAX_PARTITION_SIZE:
        raise SizeLimit(f"enumerate_nc supports 1 <= n <= {MAX_PARTITION_SIZE}")
    return [
        NCPartitionA(n, tuple(sorted(tuple(x + 1 for x in b) for b in shape)))
        for shape in _nc_shapes(n)
    ]


@lru_cache(maxsize=None)
def _nc_pairing_shapes(m: int) -> tuple:
    if m == 0:
        return ((),)
    if m % 2:
        return ()
    out = []
    for q in range(1, m, 2):
        for inner in _nc_pairing_shapes(q - 1):
            for outer in _nc_pairing_shapes(m - q - 1):
                out.append(
                    ((0, q),)
                    + tuple((a + 1, b + 1) for a, b in inner)
                    + tuple((a + q + 1, b + q + 1) for a, b in outer)
                )
    return tuple(out)


def enumerate_nc_pairings(m: int) -> list:
    """All non-crossing pairings of ``{1..m}``; empty for odd ``m``."""
    if m > MAX_PAIRING_SIZE or m < 0:
        raise SizeLimit(f"enumerate_nc_pairings supports m <= {MAX_PAIRING_SIZE}")
    if m % 2:
        return []
    return [
        NCPartitionA(m, tuple(sorted((a + 1, b + 1) for a, b in shape)))
        for shape in _nc_pairing_shapes(m)
    ]


# =============================================================================
# Type B pairings
# =============================================================================


def _circle_position(label: int, n: int) -> int:
    return label - 1 if label > 0 else n - label - 1


def _crosses(a: Sequence[int], b: Iterable[int]) -> bool:
    """Whether block ``b`` crosses block ``a`` (positions on a circle)."""
    a = sorted(a)
    r = len(a)
    gaps = {bisect.bisect(a, x) % r for x in b}
    return len(gaps) > 1


def _blocks_noncrossing(blocks) -> bool:
    for i, a in enumerate(blocks):
        for b in blocks[i + 1:]:
            if _crosses(a, b):
                return False
    return True


@dataclass(frozen=True)
class NCPairingB:
    """Inversion-symmetric pairing of ``{±1..±n}`` with an optional zero block.

    ``n`` is the number of positive labels.  ``pairs`` holds the two-element
    blocks as sorted tuples; ``zero_block`` is ``None`` or the sorted tuple
    ``(-j, -i, i, j)``.
    """

    n: int
    pairs: tuple
    zero_block: tuple | None = None

    def blocks(self) -> list:
        out = list(self.pairs)
        if self.zero_block is not None:
            out.append(self.zero_block)
        return out

    def canonical(self) -> frozenset:
        return frozenset(frozenset(b) for b in self.blocks())

    def abs_pairing(self) -> NCPartitionA:
        seen = set()
        for b in self.blocks():
            seen.add(tuple(sorted({abs(x) for x in b})))
        return NCPartitionA(self.n, tuple(sorted(seen)))

    def is_valid(self) -> bool:
        """Check symmetry, the zero block shape and non-crossing on the circle."""
        labels = sorted(x for b in self.blocks() for x in b)
        expected = sorted(list(range(1, self.n + 1)) + list(range(-self.n, 0)))
        if labels != expected:
            return False
        canon = self.canonical()
        if any(frozenset(-x for x in b) not in canon for b in canon):
            return False
        for p in self.pairs:
            if len(p) != 2 or p[0] == -p[1]:
                return False
        if self.zero_block is not None:
            z = self.zero_block
            pos = sorted(x for x in z if x > 0)
            if len(z) != 4 or len(pos) != 2 or sorted(z) != sorted(pos + [-x for x in pos]):
                return False
        positions = [[_circle_position(x, self.n) for x in b] for b in self.blocks()]
        if not _blocks_noncrossing(positions):
            return False
        abs_part = self.abs_pairing()
        return abs_part.is_pairing() and abs_part.is_noncrossing()


def _sym_block(b):
    return tuple(sorted(b))


def lift_pairing_b(base: NCPartitionA, K=None) -> NCPairingB:
    """The type B pairing with absolute value ``base`` and zero block over ``K``.

    Blocks nested strictly inside ``K`` and blocks disjoint from the interval
    spanned by ``K`` are copied together with their negatives.  Blocks that
    enclose ``K`` are cut into ``{p, -q}`` and ``{-p, q}``; this is the
    cyclic relabelling ``1..i-1 -> -1..-(i-1)`` of the outer part.
    """
    if not base.is_pairing():
        raise InvalidBlock("base must be a pairing")
    pairs = []
    if not K:
        for p, q in base.blocks:
            pairs += [_sym_block((p, q)), _sym_block((-p, -q))]
        return NCPairingB(base.n, tuple(sorted(pairs)), None)
    K = tuple(sorted(K))
    if K not in base.blocks:
        raise InvalidBlock(f"{K} is not a block of the base pairing")
    i, j = K
    for p, q in base.blocks:
        if (p, q) == K:
            continue
        if p < i and q > j:
            pairs += [_sym_block((p, -q)), _sym_block((-p, q))]
        else:
            pairs += [_sym_block((p, q)), _sym_block((-p, -q))]
    return NCPairingB(base.n, tuple(sorted(pairs)), (-j, -i, i, j))


def enumerate_b_pairings_lifted(k: int) -> list:
    """All lifts ``(base, K)`` of type A pairings of ``{1..2k}``."""
    out = []
    for base in enumerate_nc_pairings(2 * k):
        out.append(lift_pairing_b(base, None))
        for block in base.blocks:
            out.append(lift_pairing_b(base, block))
    return out


def enumerate_b_pairings_direct(k: int) -> list:
    """Brute-force search over symmetric non-crossing pairings of ``{±1..±2k}``.

    Independent of the lifting construction: every symmetric pairing (plus at
    most one zero block of the form ``{±i, ±j}``) is generated and kept if
    no two blocks cross on the circle.
    """
    n = 2 * k
    if n > MAX_PARTITION_SIZE:
        raise SizeLimit("direct enumeration supports k <= 6")
    found = []

    def place(unassigned, blocks, zero):
        if not unassigned:
            pairs = tuple(sorted(_sym_block(b) for b in blocks if len(b) == 2))
            found.append(NCPairingB(n, pairs, zero))
            return
        p = unassigned[0]
        for r in unassigned[1:]:
            rest = [x for x in unassigned[1:] if x != r]
            options = [((p, r), (-p, -r)), ((p, -r), (-p, r))]
            if zero is None:
                options.append(((p, r, -p, -r),))
            for new in options:
                new_pos = [[_circle_position(x, n) for x in b] for b in new]
                old_pos = [[_circle_position(x, n) for x in b] for b in blocks]
                if not _blocks_noncrossing(new_pos):
                    continue
                if any(_crosses(o, b) for o in old_pos for b in new_pos):
                    continue
                z = zero
                if len(new) == 1:
                    z = tuple(sorted(new[0]))
                place(rest, blocks + list(new), z)

    place(list(range(1, n + 1)), [], None)
    return found


def count_b_pairings(k: int) -> tuple:
    """``(total, with_zero_block)`` over the lifts of pairings of ``{1..2k}``.

    Every lift is validated; the counts equal ``(k+1) C_k`` and ``k C_k``.
    """
    if not 1 <= k <= 8:
        raise SizeLimit("count_b_pairings supports 1 <= k <= 8")
    lifted = enumerate_b_pairings_lifted(k)
    distinct = {p.canonical() for p in lifted}
    if len(distinct) != len(lifted) or not all(p.is_valid() for p in lifted):
        raise AssertionError("lifting produced an invalid or repeated pairing")
    zero = sum(1 for p in lifted if p.zero_block is not None)
    return len(lifted), zero


# =============================================================================
# Moments and cumulants
# =============================================================================


class DualSequence(tuple):
    """Tuple of coefficients where entry ``k-1`` is the order-``k`` term."""

    def at(self, order: int):
        """1-based access."""
        if order < 1:
            raise IndexError("orders start at 1")
        return self[order - 1]


def _exactify(x):
    if isinstance(x, DualComplex):
        return DualComplex(_exactify(x.re), _exactify(x.inf))
    if isinstance(x, complex):
        if x.imag != 0:
            raise TypeError("exact mode requires real coordinates")
        x = x.real
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


def _prepare(seq, L, exact):
    terms = [as_dual(x) for x in list(seq)[:L]]
    terms += [DualComplex(0, 0)] * (L - len(terms))
    if exact:
        terms = [_exactify(t) for t in terms]
    return terms


@lru_cache(maxsize=None)
def _integer_partitions(n: int, largest: int | None = None) -> tuple:
    if largest is None:
        largest = n
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, largest), 0, -1):
        for rest in _integer_partitions(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


def kreweras_type_count(parts: Sequence[int]) -> int:
    """Number of non-crossing partitions of ``{1..n}`` with the given block sizes."""
    n = sum(parts)
    k = len(parts)
    denom = math.factorial(n - k + 1)
    for size in set(parts):
        denom *= math.factorial(parts.count(size))
    return math.factorial(n) // denom


@lru_cache(maxsize=None)
def _types_with_counts(n: int) -> tuple:
    return tuple((p, kreweras_type_count(p)) for p in _integer_partitions(n))


def _product(factors):
    out = DualComplex(1, 0)
    for f in factors:
        out = out * f
    return out


def moments_from_cumulants(kappa, L: int, exact: bool = False) -> DualSequence:
    """Moments ``m_1..m_L`` from free cumulants over dual numbers.

    ``m_n`` is the sum over non-crossing partitions of ``{1..n}`` of the
    products of cumulants indexed by block sizes.  Partitions are grouped by
    their block-size multiset and counted in closed form.
    """
    if L > MAX_SERIES_LENGTH:
        raise SizeLimit(f"L <= {MAX_SERIES_LENGTH} required")
    k = _prepare(kappa, L, exact)
    moments = []
    for n in range(1, L + 1):
        total = DualComplex(0, 0)
        for parts, count in _types_with_counts(n):
            total = total + count * _product(k[s - 1] for s in parts)
        moments.append(total)
    return DualSequence(moments)


def cumulants_from_moments(m, L: int, exact: bool = False) -> DualSequence:
    """Invert :func:`moments_from_cumulants` by triangular recursion."""
    if L > MAX_SERIES_LENGTH:
        raise SizeLimit(f"L <= {MAX_SERIES_LENGTH} required")
    mom = _prepare(m, L, exact)
    kappa = []
    for n in range(1, L + 1):
        rest = DualComplex(0, 0)
        for parts, count in _types_with_counts(n):
            if len(parts) == 1:
                continue
            rest = rest + count * _product(kappa[s - 1] for s in parts)
        kappa.append(mom[n - 1] - rest)
    return DualSequence(kappa)


def _series_mul(a, b, L):
    """Product of two power series given by coefficient lists of length L+1."""
    out = [DualComplex(0, 0)] * (L + 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j in range(L + 1 - i):
            out[i + j] = out[i + j] + ai * b[j]
    return out


def check_functional_equation(kappa, L: int, exact: bool = False):
    """Largest coefficient mismatch in ``M(z) = R(z (1 + M(z)))`` through degree L.

    ``M`` comes from :func:`moments_from_cumulants`; the right-hand side is
    built by explicit composition of truncated series.
    """
    k = _prepare(kappa, L, exact)
    m = moments_from_cumulants(k, L)
    zero = DualComplex(0, 0)
    # u(z) = z (1 + M(z)) as coefficients of z^0..z^L
    u = [zero, DualComplex(1, 0)] + [m[d - 2] for d in range(2, L + 1)]
    rhs = [zero] * (L + 1)
    power = [DualComplex(1, 0)] + [zero] * L
    for s in range(1, L + 1):
        power = _series_mul(power, u, L)
        for d in range(L + 1):
            rhs[d] = rhs[d] + k[s - 1] * power[d]
    return max((m[d - 1] - rhs[d]).norm() for d in range(1, L + 1))


# =============================================================================
# Coloured pairings and mixed moments
# =============================================================================


@lru_cache(maxsize=None)
def _colored_count(colors: tuple) -> int:
    if not colors:
        return 1
    if len(colors) % 2:
        return 0
    first = colors[0]
    total = 0
    for q in range(1, len(colors), 2):
        if colors[q] == first:
            total += _colored_count(colors[1:q]) * _colored_count(colors[q + 1:])
    return total


def colored_pairing_count(colors: Sequence) -> int:
    """Number of non-crossing pairings joining only equal colours."""
    if len(colors) > 14:
        raise SizeLimit("colour words of length <= 14 supported")
    return _colored_count(tuple(colors))


def colored_pairing_count_b(colors: Sequence, j: int) -> int:
    """Type B pairings whose zero block contains ``j`` and respect the colours.

    The count runs over every lifted type B pairing of ``{±1..±len(colors)}``;
    a pairing is kept when its absolute value joins only equal colours and its
    zero block contains ``j``.
    """
    m = len(colors)
    if not 1 <= j <= m:
        raise ValueError("j must be a position of the word")
    if m % 2:
        return 0
    count = 0
    for pairing in enumerate_b_pairings_lifted(m // 2):
        if pairing.zero_block is None or j not in pairing.zero_block:
            continue
        if all(colors[p - 1] == colors[q - 1] for p, q in pairing.abs_pairing().blocks):
            count += 1
    return count


def infinitesimal_free_mixed_moment(law_a, law_b, word: Sequence[int], exact=False):
    """Dual mixed moment of two infinitesimally free variables.

    Parameters
    ----------
    law_a, law_b : sequence
        Dual moments ``mu(t^n) + h mu'(t^n)`` for ``n = 1, 2, ...`` of each
        variable (at least ``len(word)`` terms, missing terms read as 0).
    word : sequence of {1, 2}
        Letter ``1`` stands for the first variable, ``2`` for the second.
    """
    n = len(word)
    if n == 0:
        return DualComplex(1, 0)
    if any(letter not in (1, 2) for letter in word):
        raise ValueError("word letters must be 1 or 2")
    cumulants = {
        1: cumulants_from_moments(law_a, n, exact),
        2: cumulants_from_moments(law_b, n, exact),
    }
    total = DualComplex(0, 0)
    for part in enumerate_nc(n):
        term = DualComplex(1, 0)
        for block in part.blocks:
            letters = {word[i - 1] for i in block}
            if len(letters) > 1:
                term = DualComplex(0, 0)
                break
            term = term * cumulants[letters.pop()][len(block) - 1]
        total = total + term
    return total


def bernoulli_moments_b(Lambda, A, n: int) -> DualComplex:
    """``Lambda * A**n`` in dual arithmetic."""
    if n < 1:
        raise ValueError("n >= 1 required")
    return as_dual(Lambda) * as_dual(A) ** n


def poisson_moments_b(Lambda, A, L: int, exact: bool = False) -> DualSequence:
    """Moments of the type B free Poisson law with cumulants ``Lambda * A**n``."""
    Lambda, A = as_dual(Lambda), as_dual(A)
    if exact:
        Lambda, A = _exactify(Lambda), _exactify(A)
    kappa = [Lambda * A**n for n in range(1, L + 1)]
    return moments_from_cumulants(kappa, L, exact)
