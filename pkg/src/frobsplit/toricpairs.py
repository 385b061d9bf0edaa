"""Splitting of pairs ``(X, sum a_i V(f_i))`` on smooth complete toric varieties.

Everything is phrased in Cox coordinates.  Splitting maps of the pair
correspond to sections of ``(1-p)(K_X + Δ)``; after multiplying by
``prod f_i^ceil((p-1) a_i)`` they become Cox polynomials of multidegree
``(p-1) * deg(-K_X)``, and a splitting exists iff some term of
``g = prod f_i^ceil((p-1) a_i)`` divides ``(prod_j x_j)^(p-1)``, i.e. has
every exponent at most ``p - 1``.  Cyclic covers, the K3 and Fano double
covers and Fedder-type checks for hypersurfaces are special cases.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil

from frobsplit.errors import (
    BadReduction,
    HomogeneityViolation,
    NotComplete,
    OutOfModel,
    ValidationError,
    WildRamification,
)
from frobsplit.fppoly import (
    FpPoly,
    Prime,
    RationalPoly,
    bounded_witness,
    poly_pow,
    reduce_mod_p,
)
from frobsplit.lattice import Fan, product_fan, projective_space_fan
from frobsplit.verdict import Decision, Verdict

RULE_PAIR = "toric-pair:cox-monomial-criterion"
RULE_CYCLIC = "cyclic-cover:anticanonical-branch-congruence"
RULE_FEDDER = "fedder:hypersurface-frobenius-power"
RULE_NEVER_REG = "toric-pair:anticanonical-boundary-not-f-regular"
RULE_TORIC = "toric:toric-varieties-f-regular"
RULE_PULLBACK = "tvb:frobenius-pullback-cotangent-degree"

FLAG_COMPLETE = "complete"
FLAG_SMOOTH = "smooth"
FLAG_REDUCED = "reduced-branch"
FLAG_ANTICANONICAL = "anticanonical-matching"
FLAG_NORMAL = "normal"


class Preset(str, enum.Enum):
    PROJECTIVE_SPACE = "P"
    PRODUCT = "PP"
    GENERAL = "general"


@dataclass(frozen=True)
class ToricAmbient:
    """A smooth complete toric variety with its Cox-ring grading.

    ``cox_degrees[j]`` is the class of the ``j``-th torus-invariant prime
    divisor in the (torsion-free) class group.
    """

    preset: Preset
    dims: tuple[int, ...] = ()
    fan: Fan | None = None
    cox_degrees: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        preset = Preset(self.preset)
        object.__setattr__(self, "preset", preset)
        if preset is Preset.PROJECTIVE_SPACE:
            (m,) = self.dims
            if m < 1:
                raise ValidationError("projective space dimension must be positive", "ambient.m")
            object.__setattr__(self, "fan", projective_space_fan(m))
            object.__setattr__(self, "cox_degrees", tuple((1,) for _ in range(m + 1)))
        elif preset is Preset.PRODUCT:
            if not self.dims or any(m < 1 for m in self.dims):
                raise ValidationError("product needs positive factor dimensions", "ambient.dims")
            object.__setattr__(self, "fan", product_fan(*(projective_space_fan(m) for m in self.dims)))
            k = len(self.dims)
            degs = []
            for i, m in enumerate(self.dims):
                degs += [tuple(int(j == i) for j in range(k))] * (m + 1)
            object.__setattr__(self, "cox_degrees", tuple(degs))
        else:
            if self.fan is None:
                raise ValidationError("general ambient needs a fan", "ambient.fan")
            degs = tuple(tuple(int(x) for x in d) for d in self.cox_degrees)
            if len(degs) != len(self.fan.rays):
                raise ValidationError(
                    f"{len(degs)} Cox degrees for {len(self.fan.rays)} rays", "ambient.coxDegrees"
                )
            if len({len(d) for d in degs}) > 1 or not degs or not degs[0]:
                raise ValidationError("Cox degrees must be nonempty vectors of equal length", "ambient.coxDegrees")
            object.__setattr__(self, "cox_degrees", degs)

    @classmethod
    def projective_space(cls, m: int) -> ToricAmbient:
        return cls(Preset.PROJECTIVE_SPACE, (m,))

    @classmethod
    def product(cls, *dims: int) -> ToricAmbient:
        return cls(Preset.PRODUCT, tuple(dims))

    @classmethod
    def general(cls, fan: Fan, cox_degrees) -> ToricAmbient:
        return cls(Preset.GENERAL, (), fan, tuple(map(tuple, cox_degrees)))

    @property
    def cox_arity(self) -> int:
        return len(self.cox_degrees)

    @property
    def dim(self) -> int:
        return self.fan.dim

    @property
    def complete(self) -> bool:
        return self.fan.complete

    @property
    def smooth(self) -> bool:
        return self.fan.smooth

    @property
    def anticanonical_class(self) -> tuple[int, ...]:
        """Class of ``-K_X``: the sum of all torus-invariant prime divisors."""
        return tuple(sum(col) for col in zip(*self.cox_degrees))

    def assumptions(self) -> tuple[str, ...]:
        if self.preset is Preset.GENERAL:
            return (FLAG_COMPLETE, FLAG_SMOOTH)
        return ()

    def require_complete_smooth(self):
        if not self.complete:
            raise NotComplete("toric ambient is not asserted complete")
        if not self.smooth:
            raise OutOfModel("singular toric ambients are not supported")

    def to_json(self) -> dict:
        if self.preset is Preset.PROJECTIVE_SPACE:
            return {"preset": "P", "m": self.dims[0]}
        if self.preset is Preset.PRODUCT:
            return {"preset": "PP", "dims": list(self.dims)}
        return {"preset": "general", "fan": self.fan.to_json(), "coxDegrees": [list(d) for d in self.cox_degrees]}

    @classmethod
    def from_json(cls, data: dict) -> ToricAmbient:
        preset = data.get("preset")
        try:
            if preset == "P":
                return cls.projective_space(int(data["m"]))
            if preset == "PP":
                return cls.product(*map(int, data["dims"]))
            if preset == "general":
                return cls.general(Fan.from_json(data["fan"]), data["coxDegrees"])
        except KeyError as exc:
            raise ValidationError(f"missing field {exc.args[0]!r}", "ambient") from None
        raise ValidationError(f"unknown preset {preset!r}", "ambient.preset")


def divisor_class(X: ToricAmbient, f: RationalPoly) -> tuple[int, ...]:
    """Multidegree of a homogeneous Cox polynomial; raises if not homogeneous."""
    if f.arity != X.cox_arity:
        raise ValidationError(f"polynomial in {f.arity} variables, ambient has {X.cox_arity} Cox variables")
    if not f:
        raise ValidationError("branch polynomial is zero")
    if any(e < 0 for m, _ in f for e in m):
        raise ValidationError("Cox polynomials must have nonnegative exponents")
    degs = f.degrees(X.cox_degrees)
    if len(degs) != 1:
        raise HomogeneityViolation(f"polynomial has terms in several classes: {sorted(degs)}")
    return degs.pop()


@dataclass(frozen=True)
class BranchDatum:
    """Boundary component ``a * V(f)``; when ``n`` is given, ``a = (n-1)/n``."""

    f: RationalPoly
    a: Fraction | None = None
    n: int | None = None

    def __post_init__(self):
        if self.n is not None:
            if self.n < 2:
                raise ValidationError("cover order must be at least 2", "n")
            a = Fraction(self.n - 1, self.n)
            if self.a is not None and Fraction(self.a) != a:
                raise ValidationError(f"coefficient {self.a} inconsistent with order {self.n}", "a")
            object.__setattr__(self, "a", a)
        if self.a is None:
            raise ValidationError("branch datum needs a coefficient or an order", "a")
        a = Fraction(self.a)
        if not 0 <= a < 1:
            raise ValidationError(f"coefficient {a} outside [0, 1)", "a")
        object.__setattr__(self, "a", a)

    def exponent(self, p: int) -> int:
        return ceil((p - 1) * self.a)

    def to_json(self) -> dict:
        out = {"f": self.f.to_json()}
        if self.n is not None:
            out["n"] = self.n
        else:
            out["a"] = str(self.a)
        return out

    @classmethod
    def from_json(cls, data: dict) -> BranchDatum:
        if "f" not in data:
            raise ValidationError("branch datum needs 'f'", "branches")
        f = RationalPoly.from_json(data["f"])
        a = data.get("a")
        n = data.get("n")
        return cls(f, Fraction(str(a)) if a is not None else None, int(n) if n is not None else None)


def boundary_delta(branches):
    """``[(f_i, (n_i - 1)/n_i)]`` for a list of ``(f_i, n_i)``."""
    out = []
    for f, n in branches:
        if n < 2:
            raise ValidationError(f"cover order {n} < 2")
        out.append((f, Fraction(n - 1, n)))
    return out


def _reduce_branch(f: RationalPoly, p: int) -> FpPoly:
    g = reduce_mod_p(f, p)
    if g.is_zero():
        raise BadReduction(p, None, f"branch polynomial vanishes identically mod {p}")
    return g


def splitting_polynomial(X: ToricAmbient, branches, p) -> FpPoly:
    """``prod f_i^ceil((p-1) a_i)`` over ``F_p``."""
    p = Prime(p)
    g = FpPoly.one(X.cox_arity, p)
    for b in branches:
        divisor_class(X, b.f)
        m = b.exponent(p)
        if m:
            g = g * poly_pow(_reduce_branch(b.f, p), m)
    return g


def toric_pair_fsplit(X: ToricAmbient, branches, p, flags=()) -> Verdict:
    """F-splitting of ``(X, sum a_i V(f_i))`` by the Cox monomial criterion."""
    p = Prime(p)
    X.require_complete_smooth()
    branches = list(branches)
    assumptions = X.assumptions() + tuple(f for f in flags if f in (FLAG_REDUCED,))
    if not branches:
        return Verdict.yes(
            "toric-canonical-splitting",
            RULE_PAIR,
            {"monomial": [0] * X.cox_arity, "exponents_cap": p - 1, "note": "empty boundary"},
            assumptions=assumptions,
        )
    g = splitting_polynomial(X, branches, p)
    witness = bounded_witness(g, p - 1)
    exps = [b.exponent(p) for b in branches]
    if witness is None:
        return Verdict.no(
            "no-admissible-monomial",
            RULE_PAIR,
            {"exponents": exps, "terms_checked": len(g), "exponents_cap": p - 1},
            assumptions=assumptions,
        )
    return Verdict.yes(
        "admissible-monomial",
        RULE_PAIR,
        {
            "monomial": list(witness),
            "coefficient": g.terms[witness],
            "exponents": exps,
            "exponents_cap": p - 1,
        },
        assumptions=assumptions,
    )


def never_fregular_check(X: ToricAmbient, branches) -> bool:
    """True iff ``sum a_i [V(f_i)]`` equals the anticanonical class exactly."""
    total = [Fraction(0)] * len(X.anticanonical_class)
    for b in branches:
        cls = divisor_class(X, b.f)
        for k, c in enumerate(cls):
            total[k] += b.a * c
    return bool(branches) and tuple(total) == tuple(map(Fraction, X.anticanonical_class))


def toric_pair_fregular(X: ToricAmbient, branches) -> Verdict:
    branches = list(branches)
    if not branches:
        return Verdict.yes("toric", RULE_TORIC, assumptions=X.assumptions())
    if never_fregular_check(X, branches):
        return Verdict.no(
            "boundary-anticanonical",
            RULE_NEVER_REG,
            {"anticanonical_class": list(X.anticanonical_class)},
            assumptions=X.assumptions(),
        )
    return Verdict.unknown("no-f-regularity-rule", RULE_PAIR, assumptions=X.assumptions())


def toric_pair_verdict(X: ToricAmbient, branches, p, flags=()) -> Decision:
    branches = list(branches)
    return Decision(toric_pair_fsplit(X, branches, p, flags), toric_pair_fregular(X, branches))


def cyclic_cover_verdict(X: ToricAmbient, branch: BranchDatum, p, flags=()) -> Decision:
    """Cyclic cover of order ``n`` of ``X`` branched along ``V(f)``.

    The monomial criterion decides F-splitting.  When the boundary
    ``(n-1)/n V(f)`` is anticanonical (asserted by the
    ``anticanonical-matching`` flag, or detected from the grading) the
    cover is split only for ``p = 1 mod n`` and is never F-regular.
    """
    p = Prime(p)
    flags = tuple(flags)
    if branch.n is None:
        raise ValidationError("cyclic cover needs an order n", "branch.n")
    n = branch.n
    if n % p == 0:
        raise WildRamification(f"p={p} divides the cover order {n}")
    fsplit = toric_pair_fsplit(X, [branch], p, flags)
    extra = tuple(f for f in flags if f in (FLAG_REDUCED,))
    if FLAG_ANTICANONICAL in flags:
        anticanonical = True
        extra += (FLAG_ANTICANONICAL,)
    else:
        anticanonical = never_fregular_check(X, [branch])
    fsplit = fsplit.with_assumptions(*extra)
    if not anticanonical:
        return Decision(
            fsplit,
            Verdict.unknown("no-f-regularity-rule", RULE_CYCLIC, assumptions=fsplit.assumptions),
        )
    cert = {"n": n, "p_mod_n": p % n}
    if p % n != 1:
        notes = ()
        if fsplit.is_yes:
            notes = ("monomial criterion found a witness although p != 1 mod n",)
        fsplit = Verdict.no(
            "p-not-1-mod-n", RULE_CYCLIC, dict(cert, monomial_verdict=fsplit.value.value),
            assumptions=fsplit.assumptions, notes=notes,
        )
    fregular = Verdict.no("boundary-anticanonical", RULE_CYCLIC, cert, assumptions=fsplit.assumptions)
    return Decision(fsplit, fregular)


def fedder_cox(X: ToricAmbient | None, f: RationalPoly, p, flags=()) -> Verdict:
    """Fedder's criterion for the Cox-ring hypersurface ``V(f)``.

    Yes iff some term of ``f^(p-1)`` has every exponent at most ``p - 1``.
    """
    p = Prime(p)
    if X is not None:
        divisor_class(X, f)
    g = reduce_mod_p(f, p)
    if g.is_zero():
        raise BadReduction(p, None, f"polynomial vanishes identically mod {p}")
    if not g.has_nonnegative_exponents():
        raise ValidationError("Fedder's criterion needs a polynomial with nonnegative exponents")
    h = poly_pow(g, p - 1)
    witness = bounded_witness(h, p - 1)
    assumptions = tuple(fl for fl in flags if fl == FLAG_NORMAL)
    if witness is None:
        return Verdict.no(
            "in-frobenius-power-of-maximal-ideal", RULE_FEDDER,
            {"power": p - 1, "terms_checked": len(h)}, assumptions=assumptions,
        )
    return Verdict.yes(
        "frobenius-power-witness", RULE_FEDDER,
        {"monomial": list(witness), "coefficient": h.terms[witness], "power": p - 1},
        assumptions=assumptions,
    )


def frobenius_pullback_obstruction(n: int, ray_count: int, p) -> bool:
    """True when ``F^* Ω`` of an ``n``-dimensional toric variety cannot be F-split.

    The anticanonical degree of the quotient pair is ``(p-1)(n - #rays)``,
    negative as soon as there are more rays than the dimension.
    """
    Prime(p)
    if ray_count < n:
        raise ValidationError(f"{ray_count} rays for dimension {n}")
    return (p - 1) * (n - ray_count) < 0


def linear_form(coeffs, names=None) -> RationalPoly:
    """``sum c_j x_j`` as a Cox polynomial."""
    r = len(coeffs)
    return RationalPoly(
        [(tuple(int(i == j) for i in range(r)), Fraction(c)) for j, c in enumerate(coeffs)],
        r,
        names,
    )


def point_form(a, b) -> RationalPoly:
    """Linear form on ``P^1`` (Cox variables ``y0, y1``) vanishing at ``(a : b)``."""
    return linear_form((Fraction(b), -Fraction(a)))


@dataclass(frozen=True)
class ToricPairInstance:
    ambient: ToricAmbient
    branches: tuple[BranchDatum, ...] = ()
    flags: tuple[str, ...] = field(default=())
