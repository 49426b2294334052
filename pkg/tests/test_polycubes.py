import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from begcluster.errors import DomainError, ResourceError
from begcluster.polycubes import (
    Polycube,
    binomial_pairs,
    bound_ratio,
    bound_table,
    bs_bound,
    canonical_form,
    count_fixed_polycubes,
    fixed_polycube_counts,
    llp_bound,
    multinomial_identity_check,
    naive_fixed_polycube_counts,
    ratio_closed_form,
    ratio_identity_scan,
    rooted_animal_count,
)
from begcluster.trees import c_n

SQUARE = [1, 2, 6, 19, 63, 216, 760, 2725]
CUBIC = [1, 3, 15, 86, 534]


def test_counts_d2():
    assert fixed_polycube_counts(2, 8) == SQUARE


def test_counts_d3():
    assert fixed_polycube_counts(3, 5) == CUBIC


def test_counts_d1():
    assert fixed_polycube_counts(1, 30) == [1] * 30
    assert count_fixed_polycubes(1, 7) == 1


@pytest.mark.parametrize("d,n", [(2, 9), (3, 6), (4, 4), (5, 3)])
def test_redelmeier_matches_naive(d, n):
    assert fixed_polycube_counts(d, n) == naive_fixed_polycube_counts(d, n, budget=n)


def test_naive_oracle_values():
    assert naive_fixed_polycube_counts(2, 8) == SQUARE
    assert naive_fixed_polycube_counts(3, 5) == CUBIC


def test_worker_count_does_not_matter():
    assert fixed_polycube_counts(2, 10, workers=1) == fixed_polycube_counts(2, 10, workers=3)


def test_budget():
    with pytest.raises(ResourceError):
        count_fixed_polycubes(2, 13)
    assert count_fixed_polycubes(2, 9, budget=9) == 9910
    with pytest.raises(ResourceError):
        count_fixed_polycubes(2, 9, budget=8)
    with pytest.raises(DomainError):
        count_fixed_polycubes(2, 0)


def test_rooted_count_examples():
    assert rooted_animal_count(2, 1) == 1
    assert rooted_animal_count(2, 2) == 4
    assert rooted_animal_count(2, 3) == 18


@pytest.mark.parametrize("d,nmax", [(2, 7), (3, 5)])
def test_rooted_is_n_times_fixed(d, nmax):
    counts = fixed_polycube_counts(d, nmax)
    for n in range(1, nmax + 1):
        assert rooted_animal_count(d, n) == n * counts[n - 1]


def test_spanning_tree_domination():
    for n in range(1, 7):
        assert rooted_animal_count(2, n) <= c_n(n, 2).exact


def test_llp_examples():
    assert llp_bound(2, 3) == 6
    assert llp_bound(2, 4) == 22
    assert llp_bound(2, 5) == 91
    assert llp_bound(2, 2) == 2
    with pytest.raises(DomainError):
        llp_bound(2, 1)


def test_bs_examples():
    assert bs_bound(2, 3) == 28
    assert bs_bound(2, 1) == 1
    assert bs_bound(3, 4) == 969


def test_ratio_examples():
    ratio, closed = bound_ratio(2, 3)
    assert ratio == closed == Fraction(3, 14)
    ratio, closed = bound_ratio(2, 10)
    assert ratio == closed == Fraction(2, 77)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_ratio_identity_small_n(d):
    for n in range(2, 60):
        ratio, closed = bound_ratio(d, n)
        assert ratio == closed


def test_recurrence_binomials_are_exact():
    for d in (2, 3):
        for n, c_l, c_b in binomial_pairs(d, 150):
            assert c_l == math.comb((2 * d - 1) * n, n - 2)
            assert c_b == math.comb((2 * d - 1) * n - 1, n - 1)
    *_, (n, c_l, c_b) = binomial_pairs(2, 3000)
    assert (c_l, c_b) == (math.comb(9000, 2998), math.comb(8999, 2999))


def test_ratio_scan_small_range_clean():
    assert ratio_identity_scan(2, 200) == []


def test_ratio_quarter_on_doubling():
    for n in (10**3, 10**4):
        q = ratio_closed_form(2, 2 * n) / ratio_closed_form(2, n)
        assert abs(float(q) - 0.25) < 1e-3


def test_multinomial_examples():
    assert multinomial_identity_check(2, 3)
    assert multinomial_identity_check(2, 2)
    assert multinomial_identity_check(3, 4)
    for d in (2, 3):
        for n in range(2, 9):
            assert multinomial_identity_check(d, n)
    with pytest.raises(ResourceError):
        multinomial_identity_check(2, 9)


def test_bounds_order():
    for d in (2, 3, 4, 5):
        for n in range(2, 120):
            assert llp_bound(d, n) <= bs_bound(d, n)


@pytest.mark.parametrize("d,nmax", [(2, 10), (3, 7), (4, 5)])
def test_counts_below_llp(d, nmax):
    counts = fixed_polycube_counts(d, nmax)
    for n in range(2, nmax + 1):
        assert counts[n - 1] <= llp_bound(d, n)


def test_llp_tight_for_small_animals():
    assert llp_bound(2, 2) == 2 and llp_bound(2, 3) == 6


def test_bound_table_rows_and_external_input():
    rows = bound_table(2, 14, known={13: 1903890, 14: 7204874}, budget=12)
    by_n = {r.n: r for r in rows}
    assert by_n[3].a_n == 6 and by_n[3].llp == 6 and by_n[3].bs == 28 and by_n[3].ratio == Fraction(3, 14)
    assert by_n[12].source == "enumerated" and by_n[12].a_n == 505861
    assert by_n[13].source == "unverified input"
    assert all(r.a_star == r.n * r.a_n for r in rows)
    rows = bound_table(2, 14, budget=12)
    assert rows[-1].source == "absent" and rows[-1].a_n is None


def test_polycube_type():
    p = Polycube([(5, 5), (6, 5), (6, 6)])
    assert p.cells == ((0, 0), (1, 0), (1, 1))
    with pytest.raises(DomainError):
        Polycube([(0, 0), (2, 0)])


@given(
    st.sets(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=1, max_size=8),
    st.tuples(st.integers(-50, 50), st.integers(-50, 50)),
)
def test_canonical_form_translation_invariant(cells, shift):
    moved = [(a + shift[0], b + shift[1]) for a, b in cells]
    assert canonical_form(moved) == canonical_form(cells)
    assert canonical_form(cells)[0] == (0, 0)
