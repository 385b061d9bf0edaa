"""Two-step toric vector bundles given by Klyachko filtrations.

For every ray the filtration of ``E`` drops from ``E`` to at most one proper
subspace and then to zero.  A subspace held on ``mu`` consecutive levels
gives a boundary coefficient ``(mu-1)/mu`` on the quotient of ``P(E)``,
which is ``P(E)`` blown up along the subspaces.  Rank two bundles reduce to
the complexity-one classification; hyperplane configurations reduce to a
pair on projective space; configurations of points with trivial boundary
are handled by rules for blowups of projective space in general points.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import comb, gcd, lcm

from sympy import Matrix, Rational

from frobsplit.errors import (
    GeneralPositionNotAsserted,
    NotHyperplaneCase,
    OrphanSubspace,
    ValidationError,
)
from frobsplit.fppoly import Prime
from frobsplit.lattice import Fan
from frobsplit.pairs import (
    ComplexityOneInstance,
    CurvePoint,
    complexity_one_verdict,
    diag_necessary_complexity_one,
)
from frobsplit.toricpairs import (
    BranchDatum,
    ToricAmbient,
    linear_form,
    never_fregular_check,
    toric_pair_fsplit,
)
from frobsplit.verdict import Decision, Verdict

RULE_RANK_TWO = "tvb:rank-two-via-complexity-one"
RULE_HYPERPLANE = "tvb:hyperplane-quotient-pair"
RULE_POINTS = "tvb:blowup-in-general-points"
RULE_DESCRIPTOR = "tvb:quotient-descriptor-only"
RULE_TRIVIAL = "tvb:no-proper-subspaces"

FLAG_KLYACHKO = "klyachko-compatible"
FLAG_GENERAL = "general-position"
FLAG_LINEAR_CHECKED = "linear-general-position-checked"


def _to_sympy(vectors):
    return Matrix([[Rational(x.numerator, x.denominator) for x in map(Fraction, v)] for v in vectors])


def _to_fractions(mat: Matrix) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(
        tuple(Fraction(int(x.p), int(x.q)) for x in mat.row(i)) for i in range(mat.rows)
    )


def _fraction_vec(v) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) if not isinstance(x, str) else Fraction(x) for x in v)


@dataclass(frozen=True)
class Subspace:
    """Proper nonzero subspace of ``Q^r`` stored by its reduced row echelon basis."""

    ambient_dim: int
    basis: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        r = self.ambient_dim
        vecs = [_fraction_vec(v) for v in self.basis]
        if not vecs:
            raise ValidationError("subspace basis is empty")
        if any(len(v) != r for v in vecs):
            raise ValidationError(f"basis vectors must have length {r}")
        M = _to_sympy(vecs)
        R, pivots = M.rref()
        if len(pivots) != len(vecs):
            raise ValidationError("basis vectors are linearly dependent")
        if not 1 <= len(vecs) < r:
            raise ValidationError(f"subspace of dimension {len(vecs)} is not proper in dimension {r}")
        object.__setattr__(self, "basis", _to_fractions(R[: len(pivots), :]))

    @classmethod
    def span(cls, *vectors) -> Subspace:
        vectors = [_fraction_vec(v) for v in vectors]
        M = _to_sympy(vectors)
        R, pivots = M.rref()
        return cls(len(vectors[0]), _to_fractions(R[: len(pivots), :]))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, other: Subspace) -> bool:
        if other.ambient_dim != self.ambient_dim:
            raise ValidationError("subspaces live in different ambient spaces")
        return _to_sympy(self.basis + other.basis).rank() == self.dim

    def perp(self) -> Subspace:
        """Orthogonal complement under the standard pairing."""
        null = _to_sympy(self.basis).nullspace()
        return Subspace.span(*[[Fraction(int(x.p), int(x.q)) for x in v] for v in null])

    def transform(self, matrix) -> Subspace:
        """Image under an invertible matrix acting on column vectors."""
        A = _to_sympy(matrix)
        imgs = [A * _to_sympy([v]).T for v in self.basis]
        return Subspace.span(*[[Fraction(int(x.p), int(x.q)) for x in col] for col in imgs])

    def primitive_vector(self) -> tuple[int, ...]:
        """Primitive integer generator of a line (``dim == 1``), first nonzero entry positive."""
        if self.dim != 1:
            raise ValueError("not a line")
        v = self.basis[0]
        den = lcm(*(x.denominator for x in v))
        ints = [int(x * den) for x in v]
        g = gcd(*ints)
        return tuple(x // g for x in ints)

    def to_json(self) -> dict:
        return {"basis": [[str(x) for x in v] for v in self.basis]}

    @classmethod
    def from_json(cls, data, r) -> Subspace:
        basis = data["basis"] if isinstance(data, dict) else data
        return cls.span(*[[Fraction(str(x)) for x in v] for v in basis]) if basis else cls(r, ())


class Shape(str, enum.Enum):
    ONE_STEP = "one-step"
    TWO_STEP = "two-step"


@dataclass(frozen=True)
class RayFiltration:
    """Filtration ``E^rho(lambda)`` attached to one ray.

    ``E`` for ``lambda < first``; for a two-step filtration the subspace
    ``subspace`` on ``first <= lambda <= sub_last``; zero above.  A one-step
    filtration drops from ``E`` to zero at ``first`` (so ``last = first - 1``).
    """

    ray: int
    shape: Shape
    first: int
    subspace: int | None = None
    sub_last: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "shape", Shape(self.shape))
        if self.shape is Shape.TWO_STEP:
            if self.subspace is None or self.sub_last is None:
                raise ValidationError("two-step filtration needs subspace and subLast", f"ray {self.ray}")
            if self.first > self.sub_last:
                raise ValidationError("first must not exceed subLast", f"ray {self.ray}")
        elif self.subspace is not None:
            raise ValidationError("one-step filtration has no subspace", f"ray {self.ray}")

    @classmethod
    def one_step(cls, ray, last) -> RayFiltration:
        return cls(ray, Shape.ONE_STEP, last + 1)

    @classmethod
    def two_step(cls, ray, first, subspace, sub_last) -> RayFiltration:
        return cls(ray, Shape.TWO_STEP, first, subspace, sub_last)

    @property
    def last(self) -> int:
        """Top level at which something nonzero remains."""
        return self.sub_last if self.shape is Shape.TWO_STEP else self.first - 1

    def level(self, lam: int):
        """``'E'``, the subspace index, or ``0`` at level ``lam``."""
        if lam < self.first:
            return "E"
        if self.shape is Shape.TWO_STEP and lam <= self.sub_last:
            return self.subspace
        return 0

    def to_json(self) -> dict:
        if self.shape is Shape.ONE_STEP:
            return {"ray": self.ray, "shape": "one-step", "last": self.first - 1}
        return {
            "ray": self.ray,
            "shape": "two-step",
            "first": self.first,
            "subspace": self.subspace,
            "subLast": self.sub_last,
        }

    @classmethod
    def from_json(cls, data: dict, where="filtration") -> RayFiltration:
        try:
            shape = Shape(data.get("shape", "two-step"))
        except ValueError:
            raise ValidationError(f"unknown shape {data.get('shape')!r}", where) from None
        try:
            if shape is Shape.ONE_STEP:
                if "last" in data:
                    last = int(data["last"])
                    if "first" in data and int(data["first"]) != last + 1:
                        raise ValidationError("one-step filtration needs first = last + 1", where)
                else:
                    last = int(data["first"]) - 1
                return cls.one_step(int(data["ray"]), last)
            return cls.two_step(int(data["ray"]), int(data["first"]), int(data["subspace"]), int(data["subLast"]))
        except KeyError as exc:
            raise ValidationError(f"missing field {exc.args[0]!r}", where) from None


@dataclass(frozen=True)
class TwoStepBundle:
    rank: int
    fan: Fan
    subspaces: tuple[Subspace, ...]
    filtrations: tuple[RayFiltration, ...]
    general_position: bool = False

    def __post_init__(self):
        subs = tuple(self.subspaces)
        filts = tuple(sorted(self.filtrations, key=lambda f: f.ray))
        object.__setattr__(self, "subspaces", subs)
        object.__setattr__(self, "filtrations", filts)
        if self.rank < 1:
            raise ValidationError("rank must be positive", "rank")
        for i, s in enumerate(subs):
            if s.ambient_dim != self.rank:
                raise ValidationError(f"subspace lives in dimension {s.ambient_dim}, rank is {self.rank}", f"subspaces[{i}]")
        if len(set(subs)) != len(subs):
            raise ValidationError("subspaces are not distinct", "subspaces")
        rays = [f.ray for f in filts]
        if sorted(rays) != list(range(len(self.fan.rays))):
            raise ValidationError("need exactly one filtration per ray of the fan", "filtrations")
        for f in filts:
            if f.shape is Shape.TWO_STEP and not 0 <= f.subspace < len(subs):
                raise ValidationError(f"subspace index {f.subspace} out of range", f"filtrations[ray {f.ray}]")

    def to_json(self) -> dict:
        return {
            "kind": "tvb",
            "rank": self.rank,
            "fan": self.fan.to_json(),
            "subspaces": [s.to_json() for s in self.subspaces],
            "filtrations": [f.to_json() for f in self.filtrations],
            "generalPosition": self.general_position,
        }

    @classmethod
    def from_json(cls, data: dict) -> TwoStepBundle:
        try:
            rank = int(data["rank"])
            fan = Fan.from_json(data["fan"])
            subs = tuple(Subspace.from_json(s, rank) for s in data.get("subspaces", []))
            filts = tuple(
                RayFiltration.from_json(f, f"filtrations[{i}]") for i, f in enumerate(data["filtrations"])
            )
        except KeyError as exc:
            raise ValidationError(f"missing field {exc.args[0]!r}", "tvb") from None
        return cls(rank, fan, subs, filts, bool(data.get("generalPosition", False)))

    def transform(self, matrix) -> TwoStepBundle:
        """Apply a change of basis of ``E`` to all subspaces."""
        return replace(self, subspaces=tuple(s.transform(matrix) for s in self.subspaces))


def mu_values(bundle: TwoStepBundle) -> list[int]:
    """Multiplicity ``mu_i`` of each subspace.

    ``mu_i(rho) = max{λ : E_i ⊆ E^rho(λ)} - min{λ : E^rho(λ) != E} + 1``,
    clamped at zero, and ``mu_i`` is the maximum over the rays.  The ``+ 1``
    makes a subspace held on a single level count once, so cotangent
    bundles get trivial boundary.
    """
    out = []
    for i, Ei in enumerate(bundle.subspaces):
        if not any(f.shape is Shape.TWO_STEP and f.subspace == i for f in bundle.filtrations):
            raise OrphanSubspace(f"subspace {i} occurs in no filtration")
        best = 0
        for f in bundle.filtrations:
            if f.shape is Shape.TWO_STEP and bundle.subspaces[f.subspace].contains(Ei):
                top = f.sub_last
            else:
                top = f.first - 1
            best = max(best, top - f.first + 1)
        out.append(best)
    return out


@dataclass(frozen=True)
class QuotientDescriptor:
    """Separated quotient pair of ``P(E)``: blowup centers and boundary coefficients."""

    base_dim: int
    centers: tuple[tuple[int, int], ...]
    delta: tuple[Fraction, ...]
    nested: bool = False

    def to_json(self) -> dict:
        return {
            "base": f"P^{self.base_dim}",
            "centers": [{"dim": d, "mu": mu} for d, mu in self.centers],
            "delta": [str(a) for a in self.delta],
            "nested": self.nested,
        }

    @property
    def trivial_boundary(self) -> bool:
        return all(a == 0 for a in self.delta)


def _nested(bundle: TwoStepBundle) -> bool:
    subs = bundle.subspaces
    return any(i != j and subs[j].contains(subs[i]) for i in range(len(subs)) for j in range(len(subs)))


def quotient_descriptor(bundle: TwoStepBundle) -> QuotientDescriptor:
    mus = mu_values(bundle)
    return QuotientDescriptor(
        bundle.rank - 1,
        tuple((s.dim, mu) for s, mu in zip(bundle.subspaces, mus)),
        tuple(Fraction(mu - 1, mu) if mu else Fraction(0) for mu in mus),
        _nested(bundle),
    )


def dual_bundle(bundle: TwoStepBundle) -> TwoStepBundle:
    """``E^*rho(λ) = E^rho(-λ)^⊥``: complements of subspaces on reflected intervals."""
    subs = tuple(s.perp() for s in bundle.subspaces)
    filts = []
    for f in bundle.filtrations:
        if f.shape is Shape.TWO_STEP:
            filts.append(RayFiltration.two_step(f.ray, -f.sub_last, f.subspace, -f.first))
        else:
            filts.append(RayFiltration.one_step(f.ray, -f.first))
    return TwoStepBundle(bundle.rank, bundle.fan, subs, tuple(filts), bundle.general_position)


def _line_point(s: Subspace) -> CurvePoint:
    a, b = s.basis[0]
    return CurvePoint.projective(a, b)


def rank_two_instance(bundle: TwoStepBundle) -> ComplexityOneInstance:
    """Complexity-one data of ``P(E)``: lines with ``mu > 1`` as points of ``P(E) = P^1``."""
    if bundle.rank != 2:
        raise ValidationError("rank-two route needs rank 2", "rank")
    mus = mu_values(bundle)
    stabs = [(_line_point(s), mu) for s, mu in zip(bundle.subspaces, mus) if mu > 1]
    return ComplexityOneInstance.projective_line(stabs)


def _tag(v: Verdict, rule_prefix: str, **extra) -> Verdict:
    cert = v.certificate
    if extra:
        cert = dict(cert or {}, **extra)
    return replace(v, rule=f"{rule_prefix} <- {v.rule}", certificate=cert).with_assumptions(FLAG_KLYACHKO)


def ranktwo_verdict(bundle: TwoStepBundle, p) -> Decision:
    p = Prime(p)
    inst = rank_two_instance(bundle)
    dec = complexity_one_verdict(inst, p)
    diag = diag_necessary_complexity_one(inst, p)
    return Decision(
        _tag(dec.fsplit, RULE_RANK_TWO),
        _tag(dec.fregular, RULE_RANK_TWO),
        _tag(diag, RULE_RANK_TWO),
        extra={"instance": inst},
    )


def hyperplane_forms(bundle: TwoStepBundle) -> list[tuple[tuple[int, ...], int]]:
    """Linear form cutting out each hyperplane subspace, with its ``mu``."""
    if any(s.dim != bundle.rank - 1 for s in bundle.subspaces):
        raise NotHyperplaneCase("not every subspace is a hyperplane")
    mus = mu_values(bundle)
    # primitive integer normals, so reduction mod p only fails when it must
    return [(s.perp().primitive_vector(), mu) for s, mu in zip(bundle.subspaces, mus)]


def hyperplane_case_verdict(bundle: TwoStepBundle, p) -> Decision:
    """Quotient ``(P^{r-1}, sum (mu_i-1)/mu_i H_i)`` decided by the toric pair criterion."""
    p = Prime(p)
    if bundle.rank < 2:
        raise NotHyperplaneCase("rank one bundles have no hyperplanes")
    forms = hyperplane_forms(bundle)
    X = ToricAmbient.projective_space(bundle.rank - 1)
    branches = [
        BranchDatum(linear_form(c), Fraction(mu - 1, mu)) for c, mu in forms if mu > 1
    ]
    fsplit = toric_pair_fsplit(X, branches, p)
    fsplit = replace(fsplit, rule=f"{RULE_HYPERPLANE} <- {fsplit.rule}").with_assumptions(FLAG_KLYACHKO)
    if not branches:
        fregular = Verdict.yes(
            "trivial-boundary", RULE_HYPERPLANE, {"quotient": f"P^{bundle.rank - 1}"},
            assumptions=(FLAG_KLYACHKO,),
        )
    elif never_fregular_check(X, branches):
        fregular = Verdict.no("boundary-anticanonical", RULE_HYPERPLANE, assumptions=(FLAG_KLYACHKO,))
    else:
        fregular = Verdict.unknown("no-f-regularity-rule", RULE_HYPERPLANE, assumptions=(FLAG_KLYACHKO,))
    return Decision(fsplit, fregular)


def anticanonical_sections(m: int) -> int:
    """``h^0(P^m, O(m+1)) = C(2m+1, m)``."""
    return comb(2 * m + 1, m)


def point_blowup_rules(m: int, num_points: int, p, general_position: bool = True) -> Decision:
    """Blowup of ``P^m`` in ``num_points`` general points, trivial boundary."""
    Prime(p)
    if not general_position:
        raise GeneralPositionNotAsserted("point rules need points in general position")
    if m < 1:
        raise ValidationError("base dimension must be positive")
    cert = {"base_dim": m, "points": num_points, "h0_bound": anticanonical_sections(m)}
    assumptions = (FLAG_GENERAL,)
    if m == 1 or num_points <= m + 1:
        why = "curve-blowup-trivial" if m == 1 else "toric-after-coordinate-change"
        v = Verdict.yes(why, RULE_POINTS, cert, assumptions=assumptions)
        return Decision(v, v)
    if num_points == m + 2:
        v = Verdict.yes("n-plus-two-points", RULE_POINTS, cert, assumptions=assumptions)
        return Decision(v, v)
    if num_points >= anticanonical_sections(m):
        v = Verdict.no("no-sections-of-anticanonical-power", RULE_POINTS, cert, assumptions=assumptions)
        return Decision(v, v)
    v = Verdict.unknown("between-known-bounds", RULE_POINTS, cert, assumptions=assumptions)
    return Decision(v, v)


def linear_general_position(lines) -> bool:
    """Every ``min(k, r)`` of the given lines in ``Q^r`` span a space of that dimension."""
    from itertools import combinations

    lines = list(lines)
    if not lines:
        return True
    r = lines[0].ambient_dim
    for k in range(2, min(len(lines), r) + 1):
        for combo in combinations(lines, k):
            if _to_sympy([s.basis[0] for s in combo]).rank() != k:
                return False
    if len(lines) > r:
        for combo in combinations(lines, r):
            if _to_sympy([s.basis[0] for s in combo]).rank() != r:
                return False
    return True


def bundle_verdict(bundle: TwoStepBundle, p) -> Decision:
    """Route a bundle to the strongest applicable rule.

    Rank two goes to the complexity-one classification, all-hyperplane
    configurations to the pair criterion on ``P^{r-1}``, point
    configurations with trivial boundary to the blowup rules.  Everything
    else returns Unknown with the quotient descriptor attached.
    """
    p = Prime(p)
    desc = quotient_descriptor(bundle)
    no_diag = Verdict.unknown("no-diagonal-rule", RULE_DESCRIPTOR, desc.to_json())
    if bundle.rank == 1 or not bundle.subspaces:
        v = Verdict.yes("toric-quotient", RULE_TRIVIAL, desc.to_json(), assumptions=(FLAG_KLYACHKO,))
        return Decision(v, v, no_diag, extra={"descriptor": desc})
    if bundle.rank == 2:
        dec = ranktwo_verdict(bundle, p)
        return replace(dec, extra=dict(dec.extra, descriptor=desc))
    if desc.nested:
        v = Verdict.unknown("nested-subspaces", RULE_DESCRIPTOR, desc.to_json(), assumptions=(FLAG_KLYACHKO,))
        return Decision(v, v, no_diag, extra={"descriptor": desc})
    if all(s.dim == bundle.rank - 1 for s in bundle.subspaces):
        dec = hyperplane_case_verdict(bundle, p)
        return Decision(dec.fsplit, dec.fregular, no_diag, extra={"descriptor": desc})
    if all(s.dim == 1 for s in bundle.subspaces) and desc.trivial_boundary:
        m, ell = bundle.rank - 1, len(bundle.subspaces)
        checked = ()
        if not bundle.general_position:
            # up to m + 2 points, general position is a linear condition we can check
            if ell <= m + 2 and linear_general_position(bundle.subspaces):
                checked = (FLAG_LINEAR_CHECKED,)
            else:
                v = Verdict.unknown("general-position-not-asserted", RULE_POINTS, desc.to_json())
                return Decision(v, v, no_diag, extra={"descriptor": desc})
        dec = point_blowup_rules(m, ell, p, True)
        return Decision(
            dec.fsplit.with_assumptions(FLAG_KLYACHKO, *checked),
            dec.fregular.with_assumptions(FLAG_KLYACHKO, *checked),
            no_diag,
            extra={"descriptor": desc},
        )
    v = Verdict.unknown("no-rule-for-configuration", RULE_DESCRIPTOR, desc.to_json(), assumptions=(FLAG_KLYACHKO,))
    return Decision(v, v, no_diag, extra={"descriptor": desc})


# Standard bundles -----------------------------------------------------------

def _dedupe(subspaces):
    index: dict[Subspace, int] = {}
    for s in subspaces:
        index.setdefault(s, len(index))
    return index


def _single_level_bundle(fan: Fan, rank: int, per_ray, top=0, general=False) -> TwoStepBundle:
    index = _dedupe(per_ray)
    filts = tuple(RayFiltration.two_step(i, 0, index[s], top if not isinstance(top, dict) else top.get(i, 0))
                  for i, s in enumerate(per_ray))
    return TwoStepBundle(rank, fan, tuple(index), filts, general)


def tangent_bundle(fan: Fan) -> TwoStepBundle:
    """``E = N ⊗ Q``; each ray holds ``<rho>`` at level 0."""
    return _single_level_bundle(fan, fan.dim, [Subspace.span(r) for r in fan.rays])


def cotangent_bundle(fan: Fan) -> TwoStepBundle:
    """``E = M ⊗ Q``; each ray holds ``rho^⊥`` at level 0."""
    return _single_level_bundle(fan, fan.dim, [Subspace.span(r).perp() for r in fan.rays])


def frobenius_pullback_cotangent(fan: Fan, p) -> TwoStepBundle:
    """``F^* Ω``: ``rho^⊥`` held on the ``p`` levels ``0 .. p - 1``."""
    p = Prime(p)
    return _single_level_bundle(fan, fan.dim, [Subspace.span(r).perp() for r in fan.rays], top=p - 1)


def hyperplane_bundle(fan: Fan, normals, doubled=(), general=True) -> TwoStepBundle:
    """Bundle with hyperplane ``ker(normals[i])`` at ray ``i``; ``doubled`` rays hold it for two levels."""
    if len(normals) != len(fan.rays):
        raise ValidationError("need one hyperplane per ray")
    rank = len(normals[0])
    subs = [Subspace.span(n).perp() for n in normals]
    top = {i: 1 for i in doubled}
    return _single_level_bundle(fan, rank, subs, top=top, general=general)
