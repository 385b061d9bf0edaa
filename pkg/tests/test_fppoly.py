from __future__ import annotations

from fractions import Fraction
from itertools import permutations

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from frobsplit.errors import ArityMismatch, BadReduction, NotPrime, PrimeMismatch, ResourceExceeded
from frobsplit.fppoly import (
    FpElem,
    FpPoly,
    Prime,
    RationalPoly,
    bounded_witness,
    coeff,
    fedder_hypersurface,
    poly_mul,
    poly_pow,
    reduce_mod_p,
    univariate_gcd,
)

from strategies import SMALL_PRIMES, sparse_polys


def to_sympy(f: FpPoly):
    xs = sympy.symbols(f"x0:{f.arity}")
    expr = sum((c * sympy.prod([x**e for x, e in zip(xs, m)]) for m, c in f), sympy.Integer(0))
    return sympy.Poly(expr, *xs, modulus=f.p) if expr != 0 else sympy.Poly(0, *xs, modulus=f.p)


def sympy_terms(P, p):
    return {m: int(c) % p for m, c in P.terms() if int(c) % p}


def test_prime_validation():
    assert Prime(7) == 7
    for bad in (0, 1, 4, -3, 2**31 + 11):
        with pytest.raises(NotPrime):
            Prime(bad)


def test_fp_elem_arithmetic():
    a = FpElem(3, 7)
    assert a * a.inverse() == 1
    assert a / 3 == 1
    assert FpElem(Fraction(1, 2), 7) == 4
    with pytest.raises(PrimeMismatch):
        FpElem(1, 5) + FpElem(1, 7)


def test_binomial_example():
    # (x - 1)(x - 2) = x^2 + 2x + 2 over F_5
    x = FpPoly.variable(0, 1, 5)
    f = (x - 1) * (x - 2)
    assert dict(f.terms) == {(2,): 1, (1,): 2, (0,): 2}


def test_fermat_square_witness():
    # (x^2 + y^2)^4 over F_5 contains x^4 y^4 with all exponents <= 4
    f = FpPoly({(2, 0): 1, (0, 2): 1}, 2, 5)
    h = poly_pow(f, 4)
    assert bounded_witness(h, 4) == (4, 4)
    assert int(coeff(h, (4, 4))) == 6 % 5


def test_frobenius_on_binomial():
    f = FpPoly({(1, 0): 1, (0, 1): 1}, 2, 3)
    assert poly_pow(f, 3) == FpPoly({(3, 0): 1, (0, 3): 1}, 2, 3)


def test_mismatches():
    with pytest.raises(ArityMismatch):
        FpPoly.variable(0, 1, 5) + FpPoly.variable(0, 2, 5)
    with pytest.raises(PrimeMismatch):
        FpPoly.variable(0, 1, 5) * FpPoly.variable(0, 1, 7)


def test_term_cap():
    f = FpPoly({(1, 0, 0): 1, (0, 1, 0): 1, (0, 0, 1): 1, (0, 0, 0): 1}, 3, 101)
    with pytest.raises(ResourceExceeded):
        poly_pow(f, 40, cap=1000)


def test_reduce_mod_p():
    f = RationalPoly([((1,), Fraction(1, 3)), ((0,), Fraction(2))], 1)
    assert dict(reduce_mod_p(f, 5).terms) == {(1,): 2, (0,): 2}
    with pytest.raises(BadReduction):
        reduce_mod_p(f, 3)


def test_rational_poly_json_roundtrip():
    f = RationalPoly([((2, 1), Fraction(3, 7)), ((0, 0), Fraction(-1))], 2, ["x", "y"])
    assert RationalPoly.from_json(f.to_json()) == f
    assert RationalPoly.from_json(f.dumps()) == f


def test_fedder_examples():
    cubic = FpPoly({(3, 0, 0): 1, (0, 3, 0): 1, (0, 0, 3): 1}, 3, 7)
    assert fedder_hypersurface(cubic)
    assert not fedder_hypersurface(FpPoly(cubic.terms, 3, 5))


@given(sparse_polys(), st.integers(0, 8), st.integers(0, 8))
def test_pow_is_additive_in_exponent(f, a, b):
    assert poly_pow(f, a + b) == poly_mul(poly_pow(f, a), poly_pow(f, b))


@given(st.data())
def test_frobenius_additivity(data):
    p = data.draw(st.sampled_from(SMALL_PRIMES))
    arity = data.draw(st.integers(1, 3))
    f = data.draw(sparse_polys(p=p, arity=arity))
    g = data.draw(sparse_polys(p=p, arity=arity))
    assert poly_pow(f + g, p) == poly_pow(f, p) + poly_pow(g, p)


@given(sparse_polys(), st.integers(0, 6))
def test_coeff_matches_repeated_multiplication(f, e):
    naive = FpPoly.one(f.arity, f.p)
    for _ in range(e):
        naive = naive * f
    h = poly_pow(f, e)
    assert h == naive
    for m, c in naive:
        assert int(coeff(h, m)) == c


@settings(max_examples=200)
@given(sparse_polys(max_terms=5, max_exp=3), st.integers(0, 5))
def test_pow_matches_sympy(f, e):
    expected = sympy_terms(to_sympy(f) ** e, f.p)
    assert dict(poly_pow(f, e).terms) == expected


@given(sparse_polys(), st.integers(0, 4))
def test_bounded_witness_is_filtered_scan(f, bound):
    w = bounded_witness(f, bound)
    qualifying = [m for m, c in f if c and all(x <= bound for x in m)]
    if w is None:
        assert not qualifying
    else:
        assert w in f.terms and f.terms[w] != 0
        assert all(x <= bound for x in w)
        # leading qualifying term in descending lex order
        assert w == max(qualifying)


@given(st.data())
def test_fedder_invariant_under_permutation_and_scaling(data):
    p = data.draw(st.sampled_from([2, 3, 5]))
    arity = data.draw(st.integers(1, 3))
    f = data.draw(sparse_polys(p=p, arity=arity, max_terms=4, max_exp=3))
    if f.is_zero():
        return
    perm = data.draw(st.permutations(range(arity)))
    c = data.draw(st.integers(1, p - 1))
    base = fedder_hypersurface(f)
    assert fedder_hypersurface(f.permute(perm)) == base
    assert fedder_hypersurface(f * c) == base


def test_univariate_gcd():
    # (x-1)(x-2) and (x-1)(x-3) over F_7 share x - 1
    a = [2, 4, 1]
    b = [3, 3, 1]
    assert univariate_gcd(a, b, 7) == [6, 1]
