"""Fans, the weight polytopes ``P_X`` and ``F_X``, and residue coverage mod p.

``P_X = {u : <rho, u> <= 1 for every ray rho}`` carries the weights of
Frobenius splittings of a toric variety; its symmetrization
``F_X = P_X ∩ -P_X`` decides diagonal splitting: the toric variety is
diagonally split at ``p`` exactly when the lattice points of ``(p-1) F_X``
hit every class of ``M / pM``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog

from frobsplit.errors import NotComplete, ResourceExceeded, Unbounded, ValidationError
from frobsplit.fppoly import Prime
from frobsplit.verdict import Verdict

MISSING_LIST_LIMIT = 10**4
DEFAULT_POINT_CAP = 10**7


@dataclass(frozen=True)
class Fan:
    """Primitive rays of a fan in ``Z^dim``.

    Cones are not modeled: ``complete`` and ``smooth`` are assertions made by
    the caller and are never checked.
    """

    dim: int
    rays: tuple[tuple[int, ...], ...]
    complete: bool = True
    smooth: bool = True

    def __post_init__(self):
        rays = tuple(tuple(int(x) for x in r) for r in self.rays)
        object.__setattr__(self, "rays", rays)
        if self.dim < 1:
            raise ValidationError("fan dimension must be positive", "dim")
        for i, r in enumerate(rays):
            if len(r) != self.dim:
                raise ValidationError(f"ray has length {len(r)}, expected {self.dim}", f"rays[{i}]")
            if not any(r):
                raise ValidationError("ray is zero", f"rays[{i}]")
            if math.gcd(*r) != 1:
                raise ValidationError(f"ray {r} is not primitive", f"rays[{i}]")
        if len(set(rays)) != len(rays):
            raise ValidationError("rays are not pairwise distinct", "rays")

    @classmethod
    def from_json(cls, data: dict) -> Fan:
        try:
            return cls(
                int(data["dim"]),
                tuple(tuple(r) for r in data["rays"]),
                bool(data.get("complete", False)),
                bool(data.get("smooth", False)),
            )
        except KeyError as exc:
            raise ValidationError(f"missing field {exc.args[0]!r}", "fan") from None

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "rays": [list(r) for r in self.rays],
            "complete": self.complete,
            "smooth": self.smooth,
        }

    def transform(self, matrix) -> Fan:
        """Apply an integer matrix to every ray (a change of lattice basis when unimodular)."""
        A = [list(map(int, row)) for row in matrix]
        rays = tuple(tuple(sum(A[i][j] * r[j] for j in range(self.dim)) for i in range(self.dim)) for r in self.rays)
        return Fan(self.dim, rays, self.complete, self.smooth)


def projective_space_fan(n: int) -> Fan:
    rays = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    rays.append(tuple(-1 for _ in range(n)))
    return Fan(n, tuple(rays), True, True)


def product_fan(*fans: Fan) -> Fan:
    dim = sum(f.dim for f in fans)
    rays = []
    offset = 0
    for f in fans:
        for r in f.rays:
            v = [0] * dim
            v[offset:offset + f.dim] = r
            rays.append(tuple(v))
        offset += f.dim
    return Fan(dim, tuple(rays), all(f.complete for f in fans), all(f.smooth for f in fans))


def hirzebruch_fan(a: int) -> Fan:
    return Fan(2, ((1, 0), (0, 1), (-1, a), (0, -1)), True, True)


@dataclass(frozen=True)
class HPolytope:
    """``{u : <normal, u> <= bound}`` for every listed inequality."""

    dim: int
    inequalities: tuple[tuple[tuple[int, ...], Fraction], ...]

    def __post_init__(self):
        ineqs = tuple((tuple(int(x) for x in a), Fraction(b)) for a, b in self.inequalities)
        for a, _ in ineqs:
            if len(a) != self.dim:
                raise ValidationError(f"normal {a} does not have length {self.dim}")
        object.__setattr__(self, "inequalities", ineqs)

    def contains(self, u: Sequence[int], k=1) -> bool:
        return all(sum(x * y for x, y in zip(a, u)) <= k * b for a, b in self.inequalities)

    def on_boundary(self, u: Sequence[int], k=1) -> bool:
        return any(sum(x * y for x, y in zip(a, u)) == k * b for a, b in self.inequalities)

    def bounding_box(self, k=1):
        """Integer box containing ``k * P``; ``None`` if empty, raises if unbounded."""
        if not self.inequalities:
            raise Unbounded("polytope without inequalities is all of Q^n")
        A = np.array([a for a, _ in self.inequalities], dtype=float)
        b = np.array([float(k * b) for _, b in self.inequalities])
        lo, hi = [], []
        for i in range(self.dim):
            bounds = []
            for sign in (1.0, -1.0):
                c = np.zeros(self.dim)
                c[i] = sign
                res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * self.dim, method="highs")
                if res.status == 2:
                    return None
                if res.status == 3:
                    raise Unbounded(f"k*P is unbounded in coordinate {i}")
                if res.status != 0:
                    raise RuntimeError(f"linear program failed: {res.message}")
                bounds.append(sign * res.fun)
            lo.append(math.floor(bounds[0] - 1e-6))
            hi.append(math.ceil(bounds[1] + 1e-6))
        return lo, hi


def px_polytope(fan: Fan) -> HPolytope:
    if not fan.rays:
        raise ValidationError("fan has no rays")
    return HPolytope(fan.dim, tuple((r, Fraction(1)) for r in fan.rays))


def fx_polytope(fan: Fan) -> HPolytope:
    if not fan.rays:
        raise ValidationError("fan has no rays")
    ineqs = []
    for r in fan.rays:
        ineqs.append((r, Fraction(1)))
        ineqs.append((tuple(-x for x in r), Fraction(1)))
    return HPolytope(fan.dim, tuple(ineqs))


def enumerate_scaled(P: HPolytope, k: int, cap: int = DEFAULT_POINT_CAP) -> list[tuple[int, ...]]:
    """All lattice points of ``k * P`` in ascending lexicographic order."""
    if k < 1:
        raise ValueError("scale factor must be positive")
    box = P.bounding_box(k)
    if box is None:
        return []
    lo, hi = box
    size = math.prod(h - l + 1 for l, h in zip(lo, hi))
    if size > cap:
        raise ResourceExceeded("bounding box candidate count", cap, size)
    ranges = [range(l, h + 1) for l, h in zip(lo, hi)]
    return [u for u in itertools.product(*ranges) if P.contains(u, k)]


@dataclass(frozen=True)
class ResidueCoverage:
    """Image of a point set in ``(Z/p)^dim``.

    ``missing`` is ``None`` when there are more than ``MISSING_LIST_LIMIT``
    missing classes; ``missing_count`` and ``missing_sample`` are always set.
    """

    p: int
    dim: int
    covered: frozenset
    missing: frozenset | None
    missing_count: int
    missing_sample: tuple[int, ...] | None
    representatives: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def complete(self) -> bool:
        return self.missing_count == 0

    def __post_init__(self):
        assert len(self.covered) + self.missing_count == self.p ** self.dim


def residue_class(u: Sequence[int], p: int) -> tuple[int, ...]:
    return tuple(x % p for x in u)


def residue_coverage(points: Iterable[Sequence[int]], p, dim: int | None = None, choose=None) -> ResidueCoverage:
    """Classes mod ``p`` hit by ``points``.

    ``choose`` ranks competing representatives of a class (smallest key wins);
    by default the first point seen is kept.
    """
    p = Prime(p)
    reps: dict[tuple, tuple] = {}
    for u in points:
        u = tuple(u)
        if dim is None:
            dim = len(u)
        elif len(u) != dim:
            raise ValidationError(f"point {u} does not have dimension {dim}")
        c = residue_class(u, p)
        if c not in reps or (choose is not None and choose(u) < choose(reps[c])):
            reps[c] = u
    if dim is None:
        raise ValidationError("dimension unknown for an empty point set")
    total = p ** dim
    covered = frozenset(reps)
    missing_count = total - len(covered)
    sample = None
    missing = None
    if missing_count:
        if missing_count <= MISSING_LIST_LIMIT:
            missing = frozenset(
                c for c in itertools.product(range(p), repeat=dim) if c not in covered
            )
            sample = min(missing)
        else:
            for c in itertools.product(range(p), repeat=dim):
                if c not in covered:
                    sample = c
                    break
    else:
        missing = frozenset()
    return ResidueCoverage(int(p), dim, covered, missing, missing_count, sample, reps)


RULE_DIAGONAL = "toric-diagonal:symmetric-weight-polytope-residues"


def diag_split_toric(fan: Fan, p) -> Verdict:
    """Diagonal splitting of a complete toric variety.

    Yes iff every class of ``M / pM`` has a representative among the lattice
    points of ``(p-1) * F_X``.  The certificate is one representative per
    class (Yes) or a missing class (No).  Representatives in the interior are
    preferred; if some class can only be represented on the boundary of
    ``(p-1) F_X`` the verdict carries a ``boundary-witness`` note.
    """
    p = Prime(p)
    if not fan.complete:
        raise NotComplete("diagonal splitting criterion needs a complete fan")
    F = fx_polytope(fan)
    k = p - 1
    pts = enumerate_scaled(F, k)

    def rank(u):
        return (F.on_boundary(u, k), sum(abs(x) for x in u), tuple(-x for x in u))

    cov = residue_coverage(pts, p, dim=fan.dim, choose=rank)
    assumptions = ("complete",)
    if cov.complete:
        reps = sorted(cov.representatives.items())
        boundary = [list(u) for _, u in reps if F.on_boundary(u, k)]
        notes = ()
        if boundary:
            notes = ("boundary-witness: some classes are represented only on the boundary of (p-1)F_X",)
        return Verdict.yes(
            "all-classes-represented",
            RULE_DIAGONAL,
            {
                "representatives": [list(u) for _, u in reps],
                "boundary_representatives": boundary,
            },
            assumptions=assumptions,
            notes=notes,
        )
    return Verdict.no(
        "missing-residue-class",
        RULE_DIAGONAL,
        {"missing_class": list(cov.missing_sample), "missing_count": cov.missing_count},
        assumptions=assumptions,
    )


def toric_fsplit(fan: Fan, p) -> Verdict:
    """Normal toric varieties are F-split: ``chi^0`` lies in ``(p-1) P_X``."""
    p = Prime(p)
    P = px_polytope(fan)
    if not P.contains((0,) * fan.dim, p - 1):
        raise AssertionError("origin outside (p-1)P_X")
    return Verdict.yes("toric", "toric:canonical-splitting", {"weight": [0] * fan.dim})
