import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from drinfeld_periods.ffield import FiniteField, ff_make, ff_solve_kummer, is_prime


def naive_mul(a, b, modulus, p):
    """Schoolbook product of coefficient vectors reduced by a monic modulus
    (coefficients low degree first, leading 1 included)."""
    modulus = list(modulus)[:-1]
    d = len(modulus)
    prod = [0] * (2 * d - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    for k in range(2 * d - 2, d - 1, -1):
        c = prod[k]
        if c:
            prod[k] = 0
            for i, mcoef in enumerate(modulus):
                prod[k - d + i] = (prod[k - d + i] - c * mcoef) % p
    return prod[:d]


def is_irreducible_bruteforce(modulus, p):
    f = list(modulus)
    d = len(f) - 1
    # any factor has degree <= d // 2; try all monic polynomials of that degree
    for k in range(1, d // 2 + 1):
        for low in itertools.product(range(p), repeat=k):
            g = list(low) + [1]
            r = f[:]
            for i in range(len(r) - 1, k - 1, -1):
                c = r[i]
                if c:
                    for j in range(k + 1):
                        r[i - k + j] = (r[i - k + j] - c * g[j]) % p
            if not any(r[:k]):
                return False
    return True


@pytest.mark.parametrize("p,d", [(2, 1), (2, 3), (3, 1), (3, 2), (3, 4), (5, 2), (7, 1)])
def test_modulus_is_irreducible(p, d):
    F = FiniteField(p, 1, d)
    assert len(F.modulus) == d + 1 and F.modulus[-1] == 1
    assert is_irreducible_bruteforce(F.modulus, p)


def test_documented_moduli():
    # lexicographically first monic irreducible, low degree first
    assert tuple(FiniteField(3, 1, 2).modulus) == (1, 0, 1)
    assert tuple(FiniteField(3, 1, 4).modulus) == (1, 0, 1, 1, 1)


def test_field_is_cached():
    assert FiniteField(3, 1, 4) is FiniteField(3, 1, 4)
    assert ff_make(3, 4) is FiniteField(3, 1, 4)


@pytest.mark.parametrize("p,d", [(3, 2), (3, 4), (2, 4)])
def test_multiplication_matches_schoolbook(p, d):
    F = FiniteField(p, 1, d)
    for a in F.elements()[:25]:
        for b in F.elements()[::7]:
            assert (a * b).to_list() == naive_mul(a.to_list(), b.to_list(), F.modulus, p)


def test_field_axioms_exhaustive_f9():
    F = FiniteField(3, 1, 2)
    E = F.elements()
    assert len(E) == 9 and len(set(x.code for x in E)) == 9
    for a in E:
        assert a + (-a) == F.zero()
        if a:
            assert a * a.inverse() == F.one()
            assert a ** 8 == F.one()
        for b in E:
            assert a * b == b * a
            if b:
                assert (a / b) * b == a


def test_frobenius_is_additive_and_multiplicative():
    F = FiniteField(3, 1, 4)
    E = F.elements()
    for a, b in zip(E[::5], E[3::7]):
        assert (a + b).frobenius(1) == a.frobenius(1) + b.frobenius(1)
        assert (a * b).frobenius(1) == a.frobenius(1) * b.frobenius(1)
        assert a.frobenius(1) == a ** 3
        assert a.frobenius(4) == a
        assert a.frobenius(-1).frobenius(1) == a


def test_subfields():
    F = FiniteField(3, 1, 4)
    assert len(F.subfield(1)) == 3
    assert len(F.subfield(2)) == 9
    with pytest.raises(ValueError):
        F.subfield(3)


def test_kummer_solutions():
    F = FiniteField(3, 1, 4)
    minus_one = -F.one()
    roots = ff_solve_kummer(minus_one, 8)
    assert len(roots) == 8
    assert all(r ** 8 == minus_one for r in roots)
    assert [r.sort_key() for r in roots] == sorted(r.sort_key() for r in roots)
    # x^8 = -1 has no solution in F_9: its unit group has order 8
    assert ff_solve_kummer(-FiniteField(3, 1, 2).one(), 8) == []
    with pytest.raises(ValueError):
        ff_solve_kummer(F.one(), 3)


def test_square_roots_in_f9_of_generator_square():
    F = FiniteField(3, 1, 2)
    g = F.gen()
    sols = ff_solve_kummer(g * g, 2)
    assert sorted(s.to_list() for s in sols) == sorted([g.to_list(), (-g).to_list()])


def test_is_prime():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_tower_parameters():
    F = FiniteField(3, 2, 2)
    assert F.q == 9 and F.order == 81 and F.degree == 4
    x = F.gen()
    assert x.frobenius(1) == x ** 9


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 80), st.integers(0, 80), st.integers(0, 80))
def test_distributivity_f81(i, j, k):
    F = FiniteField(3, 1, 4)
    a, b, c = F(F.elements()[i]), F(F.elements()[j]), F(F.elements()[k])
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)


def test_multiplicative_group_cyclic_order():
    F = FiniteField(3, 1, 4)
    orders = set()
    for a in F.elements():
        if not a:
            continue
        k = 1
        while a ** k != F.one():
            k += 1
        orders.add(k)
        assert 80 % k == 0
    assert 80 in orders and math.lcm(*orders) == 80
