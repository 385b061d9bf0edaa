"""Acceptance gate: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import inspect
import itertools
import sys
from fractions import Fraction
from math import comb
from pathlib import Path

import pytest
import sympy

sys.path.insert(0, str(Path(__file__).resolve().parent))

from hypothesis import HealthCheck, given, settings  # noqa: E402

from frobsplit.errors import BadReduction, LambdaDegenerateModP  # noqa: E402
from frobsplit.fppoly import RationalPoly, univariate_gcd  # noqa: E402
from frobsplit.lattice import Fan, diag_split_toric, fx_polytope, product_fan, projective_space_fan  # noqa: E402
from frobsplit.pairs import (  # noqa: E402
    INF,
    ComplexityOneInstance,
    complexity_one_verdict,
    cross_ratio,
    hasse_polynomial,
    ordinary_pair,
)
from frobsplit.toricpairs import (  # noqa: E402
    BranchDatum,
    ToricAmbient,
    cyclic_cover_verdict,
    frobenius_pullback_obstruction,
    linear_form,
    never_fregular_check,
    point_form,
    toric_pair_fsplit,
)
from frobsplit.tvb import (  # noqa: E402
    bundle_verdict,
    cotangent_bundle,
    dual_bundle,
    frobenius_pullback_cotangent,
    hyperplane_bundle,
    hyperplane_case_verdict,
    quotient_descriptor,
    rank_two_instance,
    ranktwo_verdict,
    tangent_bundle,
)

from bundles import four_line_bundle, rank_two_bundles  # noqa: E402

TABLE_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23]
P1F = projective_space_fan(1)
P2F = projective_space_fan(2)
P1xP1F = product_fan(P1F, P1F)
RESULTS: list[tuple[int, str, bool, str]] = []


def odd_primes(lo, hi):
    return [int(q) for q in sympy.primerange(max(lo, 3), hi + 1)]


# 1 -------------------------------------------------------------------------

# (representative orders, F-split condition, F-regular condition)
TABLE = [
    ((5, 7), lambda p: True, lambda p: True),
    ((2, 2, 2), lambda p: p >= 3, lambda p: p >= 3),
    ((2, 2, 9), lambda p: p >= 3, lambda p: p >= 3),
    ((2, 3, 3), lambda p: p >= 5, lambda p: p >= 5),
    ((2, 3, 4), lambda p: p >= 5, lambda p: p >= 5),
    ((2, 3, 5), lambda p: p >= 7, lambda p: p >= 7),
    ((2, 3, 6), lambda p: p % 3 == 1, lambda p: False),
    ((2, 4, 4), lambda p: p % 4 == 1, lambda p: False),
    ((3, 3, 3), lambda p: p % 3 == 1, lambda p: False),
]


def monomial_route(orders, p) -> bool:
    # the same pair (P^1, sum (mu-1)/mu c_i) through the Cox monomial criterion
    forms = [point_form(0, 1), point_form(1, 0), point_form(1, 1)]
    branches = [BranchDatum(f, Fraction(mu - 1, mu)) for f, mu in zip(forms, orders)]
    return toric_pair_fsplit(ToricAmbient.projective_space(1), branches, p).is_yes


def criterion_1():
    for orders, split, reg in TABLE:
        for p in TABLE_PRIMES:
            dec = complexity_one_verdict(ComplexityOneInstance.from_orders(orders), p)
            assert dec.fsplit.is_yes == split(p), (orders, p, "fsplit")
            assert dec.fregular.is_yes == reg(p), (orders, p, "fregular")
            assert monomial_route(orders, p) == split(p), (orders, p, "monomial route")
    return f"{len(TABLE)} rows x {len(TABLE_PRIMES)} primes, cross-checked by the monomial criterion"


# 2 -------------------------------------------------------------------------

def brute_ordinary(lam, p):
    x = sympy.symbols("x")
    m = (p - 1) // 2
    return int(sympy.Poly(((x - lam) * (x - 1)) ** m, x).coeff_monomial(x**m)) % p != 0


def criterion_2():
    assert ordinary_pair(0, 1, 2, INF, 3) is False and brute_ordinary(2, 3) is False
    assert ordinary_pair(0, 1, 2, INF, 5) is True and brute_ordinary(2, 5) is True
    y0, y1 = RationalPoly.variable(0, 2), RationalPoly.variable(1, 2)
    checked = 0
    for p in (3, 5, 7, 11, 13):
        for lam in range(2, p):
            f = y0 * y1 * (y0 - y1) * (y0 - y1.scale(lam))
            monomial = toric_pair_fsplit(ToricAmbient.projective_space(1), [BranchDatum(f, n=2)], p).is_yes
            # cross-ratio of (0, 1, lam, inf) is lam/(lam-1); ordinarity is constant on the orbit
            assert ordinary_pair(0, 1, lam, INF, p) == monomial == brute_ordinary(lam, p), (lam, p)
            checked += 1
    return f"{checked} (lambda, p) pairs agree with the brute-force expansion"


# 3 -------------------------------------------------------------------------

def criterion_3():
    f = point_form(0, 1) * point_form(1, 1) * point_form(1, 0)
    primes = [int(q) for q in sympy.primerange(5, 101)]
    for p in primes:
        dec = cyclic_cover_verdict(ToricAmbient.projective_space(1), BranchDatum(f, n=3), p)
        assert dec.fsplit.is_yes == (p % 3 == 1), p
        assert dec.fregular.is_no, p
    return f"{len(primes)} primes in [5, 100]"


# 4 -------------------------------------------------------------------------

def criterion_4():
    quartic = RationalPoly([(tuple(4 * int(i == j) for i in range(4)), 1) for j in range(4)], 4)
    X = ToricAmbient.projective_space(3)
    b = BranchDatum(quartic, n=2)
    assert toric_pair_fsplit(X, [b], 3).is_no
    witnesses = {}
    for p in (5, 7, 11, 13):
        v = toric_pair_fsplit(X, [b], p)
        assert v.is_yes, p
        w = v.certificate["monomial"]
        assert all(e <= p - 1 for e in w), (p, w)
        witnesses[p] = w
    return f"No at 3; witnesses {witnesses}"


# 5 -------------------------------------------------------------------------

def criterion_5():
    sextic = RationalPoly([(tuple(6 * int(i == j) for i in range(3)), 1) for j in range(3)], 3)
    cubic = RationalPoly([((3, 0), 1), ((0, 3), 1)], 2)
    assert never_fregular_check(ToricAmbient.projective_space(2), [BranchDatum(sextic, Fraction(1, 2))])
    assert never_fregular_check(ToricAmbient.projective_space(1), [BranchDatum(cubic, Fraction(2, 3))])
    return "sextic on P^2 and cubic on P^1"


# 6 -------------------------------------------------------------------------

def criterion_6():
    for name, fan in (("P1", P1F), ("P2", P2F), ("P1xP1", P1xP1F)):
        for p in (2, 3, 5, 7):
            v = diag_split_toric(fan, p)
            assert v.is_yes, (name, p)
            reps = [tuple(u) for u in v.certificate["representatives"]]
            F = fx_polytope(fan)
            k = p - 1
            assert all(F.contains(u, k) for u in reps)
            assert sorted(tuple(x % p for x in u) for u in reps) == sorted(
                itertools.product(range(p), repeat=fan.dim)
            )
            # brute force: scan a box around (p-1)F_X class by class
            box = range(-k * 2, k * 2 + 1)
            pts = [u for u in itertools.product(box, repeat=fan.dim) if F.contains(u, k)]
            for cls in itertools.product(range(p), repeat=fan.dim):
                assert any(tuple(x % p for x in u) == cls for u in pts), (name, p, cls)
    return "P1, P2, P1xP1 at p in {2,3,5,7}"


# 7 -------------------------------------------------------------------------

def criterion_7():
    for fan in (P2F, P1xP1F):
        b = cotangent_bundle(fan)
        assert quotient_descriptor(b).trivial_boundary
        for p in (2, 3, 5, 7):
            assert hyperplane_case_verdict(b, p).fregular.is_yes
    for p in (2, 3, 5):
        assert frobenius_pullback_obstruction(2, len(P2F.rays), p)
        assert hyperplane_case_verdict(frobenius_pullback_cotangent(P2F, p), p).fsplit.is_no
    return "cotangent F-regular; F*Omega on P^2 obstructed at 2, 3, 5"


# 8 -------------------------------------------------------------------------

def criterion_8():
    for p in (2, 3, 5, 7, 11, 13):
        inst = rank_two_instance(tangent_bundle(P2F))
        assert inst.orders == ()
        assert ranktwo_verdict(tangent_bundle(P2F), p).fregular.is_yes
    b = four_line_bundle(lines=((0, 1), (1, 1), (2, 1), (1, 0)))
    pts = [pt for pt, _ in rank_two_instance(b).stabilizers]
    assert cross_ratio(*pts) == 2
    assert ranktwo_verdict(b, 5).fsplit.is_yes
    assert ranktwo_verdict(b, 3).fsplit.is_no
    return "tangent of P^2 F-regular; cross-ratio 2 bundle split at 5, not at 3"


# 9 -------------------------------------------------------------------------

DECAGON = Fan(2, ((1, 0), (2, 1), (1, 1), (1, 2), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)), True, True)
NORMALS = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1), (1, 2, 3), (2, 1, 5), (3, 7, 2), (1, 5, 11), (4, 3, 1), (2, 9, 7)]


def general_in_p2(vectors) -> bool:
    """No three collinear, and the points impose independent conditions on cubics."""
    if not all(sympy.Matrix(c).det() != 0 for c in itertools.combinations(vectors, 3)):
        return False
    cubics = [e for e in itertools.product(range(4), repeat=3) if sum(e) == 3]
    M = sympy.Matrix([[x**a * y**b * z**c for a, b, c in cubics] for x, y, z in vectors])
    return M.det() != 0


def criterion_9():
    assert general_in_p2(NORMALS)
    E = hyperplane_bundle(DECAGON, NORMALS)
    for p in (3, 5, 7):
        dec = bundle_verdict(E, p)
        assert dec.fsplit.is_yes and dec.fregular.is_yes
        dual = bundle_verdict(dual_bundle(E), p)
        assert dual.fsplit.is_no, p
        assert comb(5, 2) == len(NORMALS)

    counted = {"n": 0}

    @settings(max_examples=300, deadline=None, suppress_health_check=list(HealthCheck))
    @given(rank_two_bundles())
    def duality(b):
        for p in (3, 5, 7):
            try:
                v = ranktwo_verdict(b, p).fsplit.value
            except (LambdaDegenerateModP, BadReduction):
                continue
            assert ranktwo_verdict(dual_bundle(b), p).fsplit.value is v
        counted["n"] += 1

    duality()
    assert counted["n"] >= 100, counted
    return f"E split and F-regular, E* not split; duality on {counted['n']} random rank-two bundles"


# 10 ------------------------------------------------------------------------

def criterion_10():
    inst = ComplexityOneInstance.projective_line([])
    for p in (2, 3, 5, 7):
        dec = complexity_one_verdict(inst, p)
        assert dec.fregular.is_yes and dec.fsplit.is_yes
    return "(P^1, 0) F-regular at 2, 3, 5, 7"


# 11 ------------------------------------------------------------------------

PROPERTY_MODULES = ["test_fppoly", "test_lattice", "test_pairs", "test_toricpairs", "test_tvb"]


def criterion_11():
    for p in odd_primes(3, 50):
        H = hasse_polynomial(p)
        dH = [(i * c) % p for i, c in enumerate(H)][1:]
        assert univariate_gcd(H, dH, p) == [1], p
    ran = 0
    for name in PROPERTY_MODULES:
        mod = __import__(name)
        for fname, fn in sorted(inspect.getmembers(mod, inspect.isfunction)):
            if fname.startswith("test_") and getattr(fn, "is_hypothesis_test", False):
                fn()
                ran += 1
    return f"Hasse squarefree for odd p <= 50; {ran} property suites at 200 cases"


CRITERIA = [
    (1, "Table of stabilizer orders", criterion_1),
    (2, "Legendre ordinarity", criterion_2),
    (3, "Triple cover congruence", criterion_3),
    (4, "Fano quartic double cover", criterion_4),
    (5, "K3 never F-regular", criterion_5),
    (6, "Toric diagonal splitting", criterion_6),
    (7, "Cotangent and Frobenius pullback", criterion_7),
    (8, "Rank-two routing", criterion_8),
    (9, "Lauritzen asymmetry and rank-two duality", criterion_9),
    (10, "Flag-variety regression", criterion_10),
    (11, "Property suites and Hasse squarefreeness", criterion_11),
]


def evaluate(num, name, fn):
    try:
        detail = fn()
        ok = True
    except AssertionError as exc:
        ok, detail = False, f"assertion failed: {exc}"
    line = f"{'PASS' if ok else 'FAIL'} criterion {num}: {name} ({detail})"
    RESULTS.append((num, name, ok, line))
    print(line)
    return ok, line


@pytest.mark.parametrize("num,name,fn", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(num, name, fn):
    ok, line = evaluate(num, name, fn)
    assert ok, line


if __name__ == "__main__":
    from hypothesis import settings as _s

    _s.register_profile("suite", max_examples=200, deadline=None, suppress_health_check=list(HealthCheck))
    _s.load_profile("suite")
    results = [evaluate(*c)[0] for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
