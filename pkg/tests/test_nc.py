import itertools
import random
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from freeconvb import nc
from freeconvb.dualnum import DualComplex
from freeconvb.errors import InvalidBlock, SizeLimit


# =============================================================================
# Brute-force oracles
# =============================================================================


def set_partitions(items):
    """Every set partition of ``items`` (restricted growth strings)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def crossing(a, b):
    return any(p < q < r < s or q < p < s < r for p, r in itertools.combinations(sorted(a), 2)
               for q, s in itertools.combinations(sorted(b), 2))


def brute_nc(n):
    out = []
    for part in set_partitions(range(1, n + 1)):
        if not any(crossing(a, b) for a, b in itertools.combinations(part, 2)):
            out.append(part)
    return out


def brute_moments(kappa, L):
    """Moments by summing cumulant products over brute-force NC partitions."""
    out = []
    for n in range(1, L + 1):
        total = DualComplex(0, 0)
        for part in brute_nc(n):
            term = DualComplex(1, 0)
            for block in part:
                term = term * kappa[len(block) - 1]
            total = total + term
        out.append(total)
    return out


# Frozen from brute_nc: Catalan numbers 1, 2, 5, 14, 42, 132, 429
NC_COUNTS = {1: 1, 2: 2, 3: 5, 4: 14, 5: 42, 6: 132, 7: 429}


@pytest.mark.parametrize("n", range(1, 8))
def test_nc_enumeration_matches_filter(n):
    fast = {p.blocks for p in nc.enumerate_nc(n)}
    slow = {tuple(sorted(tuple(sorted(b)) for b in part)) for part in brute_nc(n)}
    assert fast == slow
    assert len(fast) == NC_COUNTS[n] == nc.catalan(n)


def test_nc_enumeration_bounds():
    with pytest.raises(SizeLimit):
        nc.enumerate_nc(0)
    with pytest.raises(SizeLimit):
        nc.enumerate_nc(13)


@pytest.mark.parametrize("m, count", [(2, 1), (6, 5), (3, 0), (8, 14)])
def test_pairing_counts(m, count):
    pairings = nc.enumerate_nc_pairings(m)
    assert len(pairings) == count
    assert all(p.is_pairing() and p.is_noncrossing() for p in pairings)


# =============================================================================
# Type B pairings
# =============================================================================


def test_lift_without_zero_block():
    base = nc.NCPartitionA(2, ((1, 2),))
    lifted = nc.lift_pairing_b(base)
    assert lifted.canonical() == frozenset({frozenset({1, 2}), frozenset({-1, -2})})
    assert lifted.zero_block is None


def test_lift_with_zero_block():
    base = nc.NCPartitionA(2, ((1, 2),))
    lifted = nc.lift_pairing_b(base, (1, 2))
    assert lifted.pairs == ()
    assert set(lifted.zero_block) == {1, 2, -1, -2}


def test_lift_nested_inside_zero_block():
    base = nc.NCPartitionA(4, ((1, 4), (2, 3)))
    lifted = nc.lift_pairing_b(base, (1, 4))
    assert set(lifted.zero_block) == {1, 4, -1, -4}
    assert set(lifted.pairs) == {(2, 3), (-3, -2)}
    assert lifted.is_valid()


def test_lift_cuts_enclosing_block():
    base = nc.NCPartitionA(4, ((1, 4), (2, 3)))
    lifted = nc.lift_pairing_b(base, (2, 3))
    assert set(lifted.pairs) == {(-4, 1), (-1, 4)}
    assert lifted.is_valid()


def test_lift_rejects_foreign_block():
    with pytest.raises(InvalidBlock):
        nc.lift_pairing_b(nc.NCPartitionA(4, ((1, 4), (2, 3))), (1, 2))


@pytest.mark.parametrize("k, total, zero", [(1, 2, 1), (2, 6, 4), (3, 20, 15), (4, 70, 56)])
def test_type_b_counts(k, total, zero):
    assert nc.count_b_pairings(k) == (total, zero)
    assert total == comb(2 * k, k) and zero == k * nc.catalan(k)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_lifts_with_zero_block_match_direct_search(k):
    lifted = {p.canonical() for p in nc.enumerate_b_pairings_lifted(k) if p.zero_block}
    direct = {p.canonical() for p in nc.enumerate_b_pairings_direct(k) if p.zero_block}
    assert lifted == direct
    assert len(direct) == k * nc.catalan(k)


# Frozen from the direct search: symmetric pairings without a zero block.
NO_ZERO_BLOCK_COUNTS = {1: 2, 2: 6, 3: 20, 4: 70}


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_lifts_without_zero_block_are_a_subset(k):
    lifted = {p.canonical() for p in nc.enumerate_b_pairings_lifted(k) if not p.zero_block}
    direct = [p for p in nc.enumerate_b_pairings_direct(k) if not p.zero_block]
    assert lifted <= {p.canonical() for p in direct}
    assert len(lifted) == nc.catalan(k)
    assert len(direct) == NO_ZERO_BLOCK_COUNTS[k] == comb(2 * k, k)
    assert all(p.is_valid() for p in direct)


# =============================================================================
# Moments and cumulants
# =============================================================================


def test_semicircle_moments():
    m = nc.moments_from_cumulants([0, 1], 10)
    assert [m.at(n).re for n in range(1, 11)] == [0, 1, 0, 2, 0, 5, 0, 14, 0, 42]


def test_type_b_semicircle_moments():
    m = nc.moments_from_cumulants([0, DualComplex(1, 1)], 12, exact=True)
    for k in range(1, 7):
        assert m.at(2 * k) == DualComplex(nc.catalan(k), k * nc.catalan(k))
        assert m.at(2 * k - 1) == DualComplex(0, 0)


def test_dirac_moments():
    m = nc.moments_from_cumulants([Fraction(3, 2)], 6, exact=True)
    assert [m.at(n).re for n in range(1, 7)] == [Fraction(3, 2) ** n for n in range(1, 7)]


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_moments_match_brute_force(seed):
    rng = random.Random(seed)
    kappa = [DualComplex(Fraction(rng.randint(-3, 3)), Fraction(rng.randint(-3, 3))) for _ in range(7)]
    assert list(nc.moments_from_cumulants(kappa, 7, exact=True)) == brute_moments(kappa, 7)


@pytest.mark.parametrize(
    "moments, cumulants",
    [
        ([0, 1, 0, 2, 0, 5, 0, 14], [0, 1, 0, 0, 0, 0, 0, 0]),
        ([2, 4, 8, 16, 32], [2, 0, 0, 0, 0]),
        (
            [DualComplex(0, 0), DualComplex(1, 1), DualComplex(0, 0), DualComplex(2, 4),
             DualComplex(0, 0), DualComplex(5, 15)],
            [0, DualComplex(1, 1), 0, 0, 0, 0],
        ),
    ],
)
def test_cumulants_from_moments(moments, cumulants):
    got = nc.cumulants_from_moments(moments, len(moments), exact=True)
    assert list(got) == [DualComplex(c.re, c.inf) if isinstance(c, DualComplex) else DualComplex(c, 0)
                         for c in cumulants]


def test_series_length_limit():
    with pytest.raises(SizeLimit):
        nc.moments_from_cumulants([0, 1], 13)


small_fraction = st.fractions(min_value=-4, max_value=4, max_denominator=7)
dual_fraction = st.builds(DualComplex, small_fraction, small_fraction)


@given(st.lists(dual_fraction, min_size=1, max_size=8))
def test_round_trip_is_exact(kappa):
    L = len(kappa)
    m = nc.moments_from_cumulants(kappa, L, exact=True)
    assert list(nc.cumulants_from_moments(m, L, exact=True)) == list(kappa)


@given(st.lists(dual_fraction, min_size=1, max_size=8))
def test_functional_equation_exact(kappa):
    assert nc.check_functional_equation(kappa, len(kappa), exact=True) == 0


@pytest.mark.parametrize("kappa", [[0, 1, 0, 0, 0, 0], [0] * 6])
def test_functional_equation_simple(kappa):
    assert nc.check_functional_equation(kappa, 6) == 0


# =============================================================================
# Coloured counts, mixed moments and Poisson laws
# =============================================================================


@pytest.mark.parametrize("colors, count", [((1, 1), 1), ((1, 2, 2, 1), 1), ((1, 2, 1, 2), 0), ((1, 1, 1, 1), 2)])
def test_colored_pairing_count(colors, count):
    assert nc.colored_pairing_count(colors) == count


@pytest.mark.parametrize("colors, j, count", [((1, 1), 1, 1), ((1, 2, 1, 2), 2, 0), ((1, 1, 2, 2), 3, 1)])
def test_colored_pairing_count_b(colors, j, count):
    assert nc.colored_pairing_count_b(colors, j) == count


def test_mixed_moment_of_two_letters():
    a = [DualComplex(Fraction(2), Fraction(3))]
    b = [DualComplex(Fraction(5), Fraction(-1))]
    got = nc.infinitesimal_free_mixed_moment(a, b, (1, 2), exact=True)
    assert got == DualComplex(10, 3 * 5 + 2 * -1)


def test_mixed_moment_with_null_variable():
    a = [DualComplex(0, 0), DualComplex(1, 1)]
    b = [DualComplex(0, 0)]
    assert nc.infinitesimal_free_mixed_moment(a, b, (2,), exact=True) == DualComplex(0, 0)


def test_alternating_semicircles_vanish():
    law = [DualComplex(0, 0), DualComplex(1, 1), DualComplex(0, 0), DualComplex(2, 4)]
    assert nc.infinitesimal_free_mixed_moment(law, law, (1, 2, 1, 2), exact=True) == DualComplex(0, 0)
    assert nc.infinitesimal_free_mixed_moment(law, law, (1, 1, 2, 2), exact=True) == DualComplex(1, 2)


@pytest.mark.parametrize(
    "Lambda, A, n, expected",
    [((1, 0), (1, 1), 3, DualComplex(1, 3)), ((2, 0), (3, 0), 2, DualComplex(18, 0)), ((1, 1), (2, 0), 2, DualComplex(4, 4))],
)
def test_bernoulli_moments(Lambda, A, n, expected):
    assert nc.bernoulli_moments_b(Lambda, A, n) == expected


def test_poisson_moments():
    m = nc.poisson_moments_b((1, 0), (1, 0), 5, exact=True)
    assert [x.re for x in m] == [1, 2, 5, 14, 42]
    assert all(x == DualComplex(0, 0) for x in nc.poisson_moments_b((0, 0), (1, 1), 4, exact=True))
    m = nc.poisson_moments_b((1, 0), (1, 1), 2, exact=True)
    assert m.at(1) == DualComplex(1, 1)
    assert m.at(2) == DualComplex(2, 4)
