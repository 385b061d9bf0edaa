"""Rational divisors on curves and the complexity-one classification.

A complexity-one T-variety is described by its quotient curve ``C`` and the
stabilizer orders ``mu`` over finitely many points of ``C``.  The boundary
divisor of the quotient pair is ``sum (mu - 1)/mu * c``; whether the variety
is F-split or F-regular depends only on this pair and on ``p``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, comb

from frobsplit.errors import (
    BadReduction,
    CoefficientOutOfRange,
    DegeneratePoints,
    EvenPrime,
    LambdaDegenerateModP,
    NotComplete,
    OutOfModel,
    ValidationError,
)
from frobsplit.fppoly import FpPoly, Prime, coeff, poly_pow
from frobsplit.verdict import Decision, Verdict

RULE_AFFINE = "complexity-one:affine-quotient"
RULE_ELLIPTIC = "complexity-one:ordinary-elliptic-free-action"
RULE_TABLE = "complexity-one:stabilizer-triple-table"
RULE_FOUR_HALVES = "complexity-one:four-half-points-ordinary"
RULE_DEGREE = "complexity-one:degree-bound"
RULE_DIAG = "complexity-one:diagonal-necessary-condition"


@dataclass(frozen=True)
class CurvePoint:
    """A point of ``P^1`` over ``Q``; ``value is None`` means infinity."""

    value: Fraction | None

    def __post_init__(self):
        if self.value is not None:
            object.__setattr__(self, "value", Fraction(self.value))

    @classmethod
    def infinity(cls) -> CurvePoint:
        return cls(None)

    @classmethod
    def projective(cls, a, b) -> CurvePoint:
        """The point ``(a : b)``, canonicalized to ``b = 1`` or infinity."""
        a, b = Fraction(a), Fraction(b)
        if a == 0 and b == 0:
            raise DegeneratePoints("(0:0) is not a point of P^1")
        if b == 0:
            return cls(None)
        return cls(a / b)

    @classmethod
    def parse(cls, text) -> CurvePoint:
        if isinstance(text, CurvePoint):
            return text
        if isinstance(text, (list, tuple)):
            return cls.projective(*text)
        if isinstance(text, (int, Fraction)):
            return cls(Fraction(text))
        s = str(text).strip().lower()
        if s in ("inf", "infinity", "oo", "∞"):
            return cls(None)
        try:
            return cls(Fraction(s))
        except (ValueError, ZeroDivisionError):
            raise OutOfModel(f"point {text!r} is not a rational point of P^1") from None

    @property
    def is_infinity(self) -> bool:
        return self.value is None

    def homogeneous(self) -> tuple[Fraction, Fraction]:
        if self.value is None:
            return Fraction(1), Fraction(0)
        return self.value, Fraction(1)

    def __str__(self):
        return "inf" if self.value is None else str(self.value)


INF = CurvePoint.infinity()


@dataclass(frozen=True)
class QDivisor:
    """A finite formal sum ``sum a_i * c_i`` with rational coefficients."""

    entries: tuple[tuple[CurvePoint, Fraction], ...] = ()

    def __post_init__(self):
        acc: dict[CurvePoint, Fraction] = {}
        for pt, a in self.entries:
            pt = CurvePoint.parse(pt)
            acc[pt] = acc.get(pt, Fraction(0)) + Fraction(a)
        object.__setattr__(
            self,
            "entries",
            tuple(sorted(((pt, a) for pt, a in acc.items() if a), key=lambda e: _point_key(e[0]))),
        )

    @classmethod
    def from_orders(cls, stabilizers) -> QDivisor:
        return cls(tuple((pt, Fraction(mu - 1, mu)) for pt, mu in stabilizers))

    @property
    def degree(self) -> Fraction:
        return sum((a for _, a in self.entries), Fraction(0))

    @property
    def coefficients(self) -> list[Fraction]:
        return [a for _, a in self.entries]

    def __len__(self):
        return len(self.entries)


def _point_key(pt: CurvePoint):
    return (1, Fraction(0)) if pt.value is None else (0, pt.value)


def pair_genus(g: int, delta: QDivisor) -> Fraction:
    """``(deg Δ + 2g) / 2`` for a curve of genus ``g`` with boundary ``Δ``."""
    if g < 0:
        raise ValueError("genus must be nonnegative")
    for pt, a in delta.entries:
        if not 0 <= a < 1:
            raise CoefficientOutOfRange(f"coefficient {a} at {pt} is outside [0, 1)")
    return (delta.degree + 2 * g) / 2


def _det(a: CurvePoint, b: CurvePoint) -> Fraction:
    a0, a1 = a.homogeneous()
    b0, b1 = b.homogeneous()
    return a0 * b1 - a1 * b0


def cross_ratio(c1, c2, c3, c4) -> Fraction:
    """``(c1, c2; c3, c4) = ((c1-c3)(c2-c4)) / ((c1-c4)(c2-c3))``.

    Points at infinity are handled through homogeneous coordinates, which
    gives the usual limits.
    """
    pts = [CurvePoint.parse(c) for c in (c1, c2, c3, c4)]
    if len(set(pts)) < 4:
        raise DegeneratePoints(f"points {', '.join(map(str, pts))} are not pairwise distinct")
    c1, c2, c3, c4 = pts
    return (_det(c1, c3) * _det(c2, c4)) / (_det(c1, c4) * _det(c2, c3))


def _reduce_fraction(x: Fraction, p: int) -> int:
    if x.denominator % p == 0:
        raise BadReduction(p, x)
    return x.numerator * pow(x.denominator, -1, p) % p


def hasse_coefficient(lam: int, p: int) -> int:
    """Coefficient of ``x^m`` in ``((x - lam)(x - 1))^m``, ``m = (p-1)/2``, in ``F_p``."""
    m = (p - 1) // 2
    f = FpPoly({(2,): 1, (1,): -(lam + 1), (0,): lam}, 1, p)
    return int(coeff(poly_pow(f, m), (m,)))


def hasse_polynomial(p: int) -> list[int]:
    """Little-endian coefficients of ``sum_i C(m, i)^2 lam^i`` mod ``p``."""
    m = (p - 1) // 2
    return [comb(m, i) ** 2 % p for i in range(m + 1)]


def ordinary_pair(c1, c2, c3, c4, p) -> bool:
    """Whether ``(P^1, 1/2 (c1 + c2 + c3 + c4))`` is ordinary at ``p``."""
    p = Prime(p)
    if p == 2:
        raise EvenPrime("ordinarity of a four-point half pair needs p odd")
    lam = cross_ratio(c1, c2, c3, c4)
    lam_p = _reduce_fraction(lam, p)
    if lam_p in (0, 1):
        raise LambdaDegenerateModP(f"cross-ratio {lam} is {lam_p} mod {p}")
    return hasse_coefficient(lam_p, p) != 0


def fsplit_degree_bound(g: int, delta: QDivisor, p, e: int = 1) -> bool:
    """Necessary condition for a splitting: ``deg ⌈(q-1)Δ⌉ <= (q-1)(2-2g)``, ``q = p^e``.

    The right-hand side is ``(q-1)(2-2g)``, the sign forced by effectivity of
    ``(1-q)(K_C + Δ)``; with ``2g - 2`` no genus-zero pair could split.
    """
    p = Prime(p)
    if e < 1:
        raise ValueError("e must be at least 1")
    q1 = p**e - 1
    lhs = sum(ceil(q1 * a) for a in delta.coefficients)
    return lhs <= q1 * (2 - 2 * g)


def fregular_degree_bound(g: int, delta: QDivisor, p, max_e: int = 6) -> int | None:
    """Smallest ``e <= max_e`` with ``deg ⌈(q-1)Δ⌉ < (q-1)(2-2g)``, or ``None``."""
    p = Prime(p)
    for e in range(1, max_e + 1):
        q1 = p**e - 1
        if sum(ceil(q1 * a) for a in delta.coefficients) < q1 * (2 - 2 * g):
            return e
    return None


class Base(str, enum.Enum):
    AFFINE = "affine"
    ELLIPTIC = "elliptic"
    P1 = "P1"


@dataclass(frozen=True)
class ComplexityOneInstance:
    """Quotient data of a complexity-one T-variety.

    ``stabilizers`` lists the points with nontrivial stabilizer order
    (``mu >= 2``).  Elliptic bases are given in Legendre form with branch
    points ``0, 1, lam, inf``; ``free`` says whether the torus acts freely.
    """

    base: Base
    stabilizers: tuple[tuple[CurvePoint, int], ...] = ()
    legendre_lambda: Fraction | None = None
    free: bool = True

    def __post_init__(self):
        object.__setattr__(self, "base", Base(self.base))
        stabs = tuple((CurvePoint.parse(pt), int(mu)) for pt, mu in self.stabilizers)
        for i, (_, mu) in enumerate(stabs):
            if mu < 2:
                raise ValidationError(f"stabilizer order {mu} < 2", f"stabilizers[{i}].order")
        if len({pt for pt, _ in stabs}) != len(stabs):
            raise ValidationError("stabilizer points are not distinct", "stabilizers")
        object.__setattr__(self, "stabilizers", stabs)
        if self.base is Base.ELLIPTIC:
            if self.legendre_lambda is None:
                raise ValidationError("elliptic base needs a Legendre parameter", "lambda")
            lam = Fraction(self.legendre_lambda)
            if lam in (0, 1):
                raise DegeneratePoints("Legendre parameter must avoid 0 and 1")
            object.__setattr__(self, "legendre_lambda", lam)
            if self.free != (not stabs):
                raise ValidationError(
                    "elliptic instance: 'free' must be true exactly when no stabilizers are listed",
                    "free",
                )

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(sorted(mu for _, mu in self.stabilizers))

    @property
    def delta(self) -> QDivisor:
        return QDivisor.from_orders(self.stabilizers)

    @property
    def genus(self) -> int:
        return 1 if self.base is Base.ELLIPTIC else 0

    @classmethod
    def projective_line(cls, stabilizers=()) -> ComplexityOneInstance:
        return cls(Base.P1, tuple(stabilizers))

    @classmethod
    def from_orders(cls, orders) -> ComplexityOneInstance:
        """P^1 instance with the given orders at ``0, inf, 1, 2, 3, ...``."""
        points = [CurvePoint(0), INF] + [CurvePoint(k) for k in range(1, len(orders))]
        return cls(Base.P1, tuple(zip(points, orders)))


# rows: (orders, fsplit condition, fregular condition)
def _at_least(b):
    return lambda p: p >= b


def _congruent(r, m):
    return lambda p: p % m == r


def _never(p):
    return False


TABLE_ROWS = (
    ("(2,2,*)", lambda o: len(o) == 3 and o[0] == 2 and o[1] == 2, _at_least(3), _at_least(3), "p >= 3", "p >= 3"),
    ("(2,3,3)", lambda o: o == (2, 3, 3), _at_least(5), _at_least(5), "p >= 5", "p >= 5"),
    ("(2,3,4)", lambda o: o == (2, 3, 4), _at_least(5), _at_least(5), "p >= 5", "p >= 5"),
    ("(2,3,5)", lambda o: o == (2, 3, 5), _at_least(7), _at_least(7), "p >= 7", "p >= 7"),
    ("(2,3,6)", lambda o: o == (2, 3, 6), _congruent(1, 3), _never, "p = 1 mod 3", "never"),
    ("(2,4,4)", lambda o: o == (2, 4, 4), _congruent(1, 4), _never, "p = 1 mod 4", "never"),
    ("(3,3,3)", lambda o: o == (3, 3, 3), _congruent(1, 3), _never, "p = 1 mod 3", "never"),
)


def match_table_row(orders: tuple[int, ...]):
    """Name of the stabilizer-table row matching ``orders`` (sorted), or ``None``."""
    if len(orders) <= 2:
        return "(1,*,*)"
    for name, match, *_ in TABLE_ROWS:
        if match(orders):
            return name
    return None


def complexity_one_verdict(inst: ComplexityOneInstance, p) -> Decision:
    """F-split and F-regular verdicts for a complexity-one T-variety."""
    p = Prime(p)
    if inst.base is Base.AFFINE:
        cert = {"quotient": "affine curve"}
        return Decision(
            Verdict.yes("affine-quotient", RULE_AFFINE, cert),
            Verdict.yes("affine-quotient", RULE_AFFINE, cert),
        )

    if inst.base is Base.ELLIPTIC:
        if not inst.free:
            cert = {"delta_degree": str(inst.delta.degree)}
            return Decision(
                Verdict.no("elliptic-with-boundary", RULE_ELLIPTIC, cert),
                Verdict.no("elliptic-with-boundary", RULE_ELLIPTIC, cert),
            )
        lam = inst.legendre_lambda
        ordinary = ordinary_pair(0, 1, lam, INF, p)
        cert = {"legendre_lambda": str(lam), "ordinary": ordinary}
        fsplit = (
            Verdict.yes("ordinary-elliptic", RULE_ELLIPTIC, cert)
            if ordinary
            else Verdict.no("supersingular-elliptic", RULE_ELLIPTIC, cert)
        )
        return Decision(fsplit, Verdict.no("genus-one-quotient", RULE_ELLIPTIC, cert))

    orders = inst.orders
    cert = {"orders": list(orders)}
    row = match_table_row(orders)
    if row == "(1,*,*)":
        cert["row"] = row
        return Decision(
            Verdict.yes("table-row", RULE_TABLE, cert),
            Verdict.yes("table-row", RULE_TABLE, cert),
        )
    if row is not None:
        _, _, split_ok, reg_ok, split_txt, reg_txt = next(r for r in TABLE_ROWS if r[0] == row)
        cert = dict(cert, row=row, fsplit_condition=split_txt, fregular_condition=reg_txt)
        fs = (
            Verdict.yes("table-row", RULE_TABLE, cert)
            if split_ok(p)
            else Verdict.no("table-row-condition-fails", RULE_TABLE, cert)
        )
        fr = (
            Verdict.yes("table-row", RULE_TABLE, cert)
            if reg_ok(p)
            else Verdict.no("table-row-condition-fails", RULE_TABLE, cert)
        )
        return Decision(fs, fr)

    if orders == (2, 2, 2, 2):
        pts = [pt for pt, _ in inst.stabilizers]
        no_reg = Verdict.no("boundary-genus-one", RULE_FOUR_HALVES, cert)
        if p == 2:
            return Decision(Verdict.no("four-halves-needs-odd-p", RULE_FOUR_HALVES, cert), no_reg)
        ordinary = ordinary_pair(*pts, p)
        cert = dict(cert, cross_ratio=str(cross_ratio(*pts)), ordinary=ordinary)
        fs = (
            Verdict.yes("ordinary-pair", RULE_FOUR_HALVES, cert)
            if ordinary
            else Verdict.no("non-ordinary-pair", RULE_FOUR_HALVES, cert)
        )
        return Decision(fs, Verdict.no("boundary-genus-one", RULE_FOUR_HALVES, cert))

    cert["pair_genus"] = str(pair_genus(0, inst.delta))
    return Decision(
        Verdict.no("orders-not-in-table", RULE_TABLE, cert),
        Verdict.no("orders-not-in-table", RULE_TABLE, cert),
    )


def diag_necessary_complexity_one(inst: ComplexityOneInstance, p) -> Verdict:
    """Necessary condition for diagonal splitting of a complete complexity-one variety.

    Only ``P^1`` quotients with at most two nontrivial orders or exactly
    ``(2,2,2)`` survive; those return Unknown since only necessity is known.
    """
    Prime(p)
    if inst.base is Base.AFFINE:
        raise NotComplete("diagonal necessary condition is stated for complete varieties")
    cert = {"orders": list(inst.orders)}
    if inst.base is Base.ELLIPTIC:
        return Verdict.no("quotient-not-P1", RULE_DIAG, dict(cert, base="elliptic"))
    orders = inst.orders
    if len(orders) <= 2:
        return Verdict.unknown("passes-necessary-condition", RULE_DIAG, dict(cert, shape="(1,*,*)"))
    if orders == (2, 2, 2):
        return Verdict.unknown("passes-necessary-condition", RULE_DIAG, dict(cert, shape="(2,2,2)"))
    return Verdict.no("excluded-stabilizer-shape", RULE_DIAG, cert)


def instance_from_json(data: dict) -> ComplexityOneInstance:
    base = data.get("base", "P1")
    aliases = {"P1": Base.P1, "p1": Base.P1, "projective-line": Base.P1,
               "affine": Base.AFFINE, "affine-curve": Base.AFFINE,
               "elliptic": Base.ELLIPTIC, "elliptic-legendre": Base.ELLIPTIC}
    if base not in aliases:
        raise ValidationError(f"unknown base {base!r}", "base")
    stabs = []
    for i, s in enumerate(data.get("stabilizers", [])):
        try:
            stabs.append((CurvePoint.parse(s["point"]), int(s["order"])))
        except KeyError as exc:
            raise ValidationError(f"missing field {exc.args[0]!r}", f"stabilizers[{i}]") from None
    lam = data.get("lambda")
    free = data.get("free", not stabs)
    return ComplexityOneInstance(
        aliases[base], tuple(stabs), Fraction(str(lam)) if lam is not None else None, bool(free)
    )


def instance_to_json(inst: ComplexityOneInstance) -> dict:
    out = {
        "kind": "complexity-one",
        "base": inst.base.value,
        "stabilizers": [{"point": str(pt), "order": mu} for pt, mu in inst.stabilizers],
    }
    if inst.base is Base.ELLIPTIC:
        out["lambda"] = str(inst.legendre_lambda)
        out["free"] = inst.free
    return out
