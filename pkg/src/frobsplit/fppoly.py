"""Prime fields and sparse multivariate (Laurent) polynomials over them.

Polynomials are stored as a map from exponent tuples to coefficients.  An
``FpPoly`` keeps residues in ``[0, p)`` and never stores zeros; a
``RationalPoly`` keeps exact :class:`fractions.Fraction` coefficients and is
reduced to ``F_p`` on demand, so one instance can be swept over many primes.

Iteration order is canonical: descending lexicographic order on exponent
tuples, i.e. the leading term in lex order (``x0 > x1 > ...``) comes first.
Witness searches return the first qualifying term in this order.
"""

from __future__ import annotations

import json
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

from sympy import isprime

from frobsplit.errors import (
    ArityMismatch,
    BadReduction,
    NotPrime,
    PrimeMismatch,
    ResourceExceeded,
)

Monomial = tuple  # exponent tuple; length is the arity

DEFAULT_TERM_CAP = 10**7
PRIME_LIMIT = 2**31


class Prime(int):
    """An ``int`` checked to be a prime in ``[2, 2**31)``."""

    def __new__(cls, value):
        if isinstance(value, Prime):
            return value
        if isinstance(value, bool) or int(value) != value:
            raise NotPrime(f"{value!r} is not an integer")
        value = int(value)
        if not 2 <= value < PRIME_LIMIT or not isprime(value):
            raise NotPrime(f"{value} is not a prime in [2, 2^31)")
        return super().__new__(cls, value)

    def __repr__(self):
        return f"Prime({int(self)})"


class FpElem:
    """An element of the prime field ``F_p``."""

    __slots__ = ("residue", "p")

    def __init__(self, value, p):
        p = Prime(p)
        if isinstance(value, Fraction):
            if value.denominator % p == 0:
                raise BadReduction(p, value)
            value = value.numerator * pow(value.denominator, -1, p)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "residue", int(value) % p)

    def __setattr__(self, name, value):
        raise AttributeError("FpElem is immutable")

    def _coerce(self, other):
        if isinstance(other, FpElem):
            if other.p != self.p:
                raise PrimeMismatch(f"F_{self.p} vs F_{other.p}")
            return other.residue
        if isinstance(other, int):
            return other % self.p
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpElem(self.residue + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpElem(self.residue - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpElem(o - self.residue, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpElem(self.residue * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FpElem(-self.residue, self.p)

    def inverse(self) -> FpElem:
        if self.residue == 0:
            raise ZeroDivisionError("zero has no inverse in F_p")
        return FpElem(pow(self.residue, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * FpElem(o, self.p).inverse()

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        return FpElem(pow(self.residue, e, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, FpElem):
            return self.p == other.p and self.residue == other.residue
        if isinstance(other, int):
            return self.residue == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.residue, int(self.p)))

    def __bool__(self):
        return self.residue != 0

    def __int__(self):
        return self.residue

    def __repr__(self):
        return f"FpElem({self.residue}, {int(self.p)})"


def _add_exp(a, b):
    return tuple(x + y for x, y in zip(a, b))


class FpPoly:
    """Sparse polynomial over ``F_p`` in a fixed number of variables.

    Exponents may be negative (Laurent polynomials).  Instances are
    immutable; arithmetic returns new objects.
    """

    __slots__ = ("_terms", "arity", "p", "_hash")

    def __init__(self, terms: Mapping[tuple, int] | Iterable, arity: int, p):
        p = Prime(p)
        if arity < 1:
            raise ArityMismatch("arity must be positive")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[tuple, int] = {}
        for mono, c in items:
            mono = tuple(int(e) for e in mono)
            if len(mono) != arity:
                raise ArityMismatch(f"monomial {mono} has length {len(mono)}, expected {arity}")
            c = int(FpElem(c, p)) if isinstance(c, (Fraction, FpElem)) else int(c)
            acc[mono] = (acc.get(mono, 0) + c) % p
        self._terms = MappingProxyType(
            {m: acc[m] for m in sorted(acc, reverse=True) if acc[m]}
        )
        self.arity = arity
        self.p = p
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict, arity: int, p: Prime) -> FpPoly:
        # terms already reduced and nonzero
        obj = object.__new__(cls)
        obj._terms = MappingProxyType({m: terms[m] for m in sorted(terms, reverse=True)})
        obj.arity = arity
        obj.p = p
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, arity, p) -> FpPoly:
        return cls({}, arity, p)

    @classmethod
    def one(cls, arity, p) -> FpPoly:
        return cls({(0,) * arity: 1}, arity, p)

    @classmethod
    def constant(cls, c, arity, p) -> FpPoly:
        return cls({(0,) * arity: c}, arity, p)

    @classmethod
    def variable(cls, i, arity, p) -> FpPoly:
        e = [0] * arity
        e[i] = 1
        return cls({tuple(e): 1}, arity, p)

    @classmethod
    def monomial(cls, exponents, p, c=1) -> FpPoly:
        exponents = tuple(exponents)
        return cls({exponents: c}, len(exponents), p)

    @property
    def terms(self) -> Mapping[tuple, int]:
        return self._terms

    def __iter__(self) -> Iterator[tuple[tuple, int]]:
        return iter(self._terms.items())

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def _check(self, other: FpPoly):
        if self.arity != other.arity:
            raise ArityMismatch(f"arity {self.arity} vs {other.arity}")
        if self.p != other.p:
            raise PrimeMismatch(f"prime {self.p} vs {other.p}")

    def _lift(self, other):
        if isinstance(other, FpPoly):
            self._check(other)
            return other
        if isinstance(other, (int, FpElem)):
            return FpPoly.constant(int(other) if isinstance(other, FpElem) else other, self.arity, self.p)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        acc = dict(self._terms)
        p = self.p
        for m, c in other._terms.items():
            v = (acc.get(m, 0) + c) % p
            if v:
                acc[m] = v
            else:
                acc.pop(m, None)
        return FpPoly._raw(acc, self.arity, p)

    __radd__ = __add__

    def __neg__(self):
        p = self.p
        return FpPoly._raw({m: p - c for m, c in self._terms.items()}, self.arity, p)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return poly_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, e):
        return poly_pow(self, e)

    def __eq__(self, other):
        if isinstance(other, FpPoly):
            return self.arity == other.arity and self.p == other.p and self._terms == other._terms
        if isinstance(other, int):
            return self == FpPoly.constant(other, self.arity, self.p)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.arity, int(self.p), tuple(self._terms.items())))
        return self._hash

    def coeff(self, m) -> FpElem:
        return coeff(self, m)

    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        return max((sum(m) for m in self._terms), default=-1)

    def has_nonnegative_exponents(self) -> bool:
        return all(e >= 0 for m in self._terms for e in m)

    def substitute_frobenius(self) -> FpPoly:
        """``f(x^p)``; equals ``f**p`` over ``F_p``."""
        p = self.p
        return FpPoly._raw({tuple(e * p for e in m): c for m, c in self._terms.items()}, self.arity, p)

    def permute(self, perm) -> FpPoly:
        """Rename variable ``i`` to ``perm[i]``."""
        out = {}
        for m, c in self._terms.items():
            e = [0] * self.arity
            for i, x in enumerate(m):
                e[perm[i]] = x
            out[tuple(e)] = c
        return FpPoly._raw(out, self.arity, self.p)

    def to_json(self, names=None) -> dict:
        names = list(names) if names is not None else default_names(self.arity)
        return {
            "vars": names,
            "terms": [{"e": list(m), "c": str(c)} for m, c in self._terms.items()],
        }

    def __repr__(self):
        return f"FpPoly({format_poly(self._terms.items(), default_names(self.arity))}, p={int(self.p)})"


def default_names(arity: int) -> list[str]:
    return [f"x{i}" for i in range(arity)]


def format_poly(items, names) -> str:
    parts = []
    for m, c in items:
        mono = "*".join(
            n if e == 1 else f"{n}^{e}" for n, e in zip(names, m) if e
        )
        if not mono:
            parts.append(str(c))
        elif c == 1:
            parts.append(mono)
        else:
            parts.append(f"{c}*{mono}")
    return " + ".join(parts) or "0"


def poly_mul(f: FpPoly, g: FpPoly, cap: int = DEFAULT_TERM_CAP) -> FpPoly:
    """Product of two polynomials over the same field and arity."""
    f._check(g)
    if len(f) > len(g):
        f, g = g, f
    p = f.p
    acc: dict[tuple, int] = {}
    get = acc.get
    for m1, c1 in f._terms.items():
        for m2, c2 in g._terms.items():
            m = tuple(x + y for x, y in zip(m1, m2))
            acc[m] = get(m, 0) + c1 * c2
        if len(acc) > cap:
            raise ResourceExceeded("polynomial term count", cap, len(acc))
    out = {}
    for m, c in acc.items():
        c %= p
        if c:
            out[m] = c
    return FpPoly._raw(out, f.arity, p)


def poly_pow(f: FpPoly, e: int, cap: int = DEFAULT_TERM_CAP) -> FpPoly:
    """``f**e`` by binary exponentiation; ``f**0 == 1``."""
    if e < 0:
        raise ValueError("exponent must be nonnegative")
    result = FpPoly.one(f.arity, f.p)
    base = f
    while e:
        if e & 1:
            result = poly_mul(result, base, cap)
        e >>= 1
        if e:
            base = poly_mul(base, base, cap)
    return result


def coeff(f: FpPoly, m) -> FpElem:
    m = tuple(m)
    if len(m) != f.arity:
        raise ArityMismatch(f"monomial {m} has length {len(m)}, expected {f.arity}")
    return FpElem(f.terms.get(m, 0), f.p)


def bounded_witness(f: FpPoly, bound: int, extra: Mapping[int, int] | None = None):
    """First term (canonical order) of ``f`` with every exponent in ``[0, bound]``.

    ``extra`` optionally lowers the cap for individual variables (by index).
    Returns the exponent tuple, or ``None`` when no term qualifies.
    """
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    caps = [bound] * f.arity
    for i, c in (extra or {}).items():
        caps[i] = min(caps[i], c)
    for m, _ in f:
        if all(0 <= e <= c for e, c in zip(m, caps)):
            return m
    return None


def fedder_hypersurface(f: FpPoly, p=None) -> bool:
    """Fedder's test for a hypersurface ``V(f)`` in affine space.

    True iff ``f^(p-1)`` is not in the Frobenius power of the maximal ideal
    generated by the variables, i.e. some term of ``f^(p-1)`` has all
    exponents at most ``p - 1``.
    """
    p = f.p if p is None else Prime(p)
    if p != f.p:
        raise PrimeMismatch(f"polynomial over F_{f.p}, asked about p={p}")
    if not f.has_nonnegative_exponents():
        raise ValueError("Fedder's criterion needs a polynomial, not a Laurent polynomial")
    return bounded_witness(poly_pow(f, p - 1), p - 1) is not None


def _parse_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, bool):
        raise ValueError(f"bad coefficient {c!r}")
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c.strip())
    raise ValueError(f"bad coefficient {c!r}")


class RationalPoly:
    """Sparse polynomial with exact rational coefficients."""

    __slots__ = ("_terms", "arity", "names")

    def __init__(self, terms: Mapping | Iterable, arity: int, names=None):
        if arity < 1:
            raise ArityMismatch("arity must be positive")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[tuple, Fraction] = {}
        for mono, c in items:
            mono = tuple(int(e) for e in mono)
            if len(mono) != arity:
                raise ArityMismatch(f"monomial {mono} has length {len(mono)}, expected {arity}")
            acc[mono] = acc.get(mono, Fraction(0)) + _parse_fraction(c)
        self._terms = MappingProxyType(
            {m: acc[m] for m in sorted(acc, reverse=True) if acc[m]}
        )
        self.arity = arity
        self.names = tuple(names) if names is not None else tuple(default_names(arity))
        if len(self.names) != arity:
            raise ArityMismatch(f"{len(self.names)} variable names for arity {arity}")

    @classmethod
    def variable(cls, i, arity, names=None) -> RationalPoly:
        e = [0] * arity
        e[i] = 1
        return cls({tuple(e): 1}, arity, names)

    @classmethod
    def constant(cls, c, arity, names=None) -> RationalPoly:
        return cls({(0,) * arity: c}, arity, names)

    @property
    def terms(self):
        return self._terms

    def __iter__(self):
        return iter(self._terms.items())

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def _lift(self, other):
        if isinstance(other, RationalPoly):
            if other.arity != self.arity:
                raise ArityMismatch(f"arity {self.arity} vs {other.arity}")
            return other
        if isinstance(other, (int, Fraction)):
            return RationalPoly.constant(other, self.arity, self.names)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalPoly(list(self) + list(other), self.arity, self.names)

    __radd__ = __add__

    def __neg__(self):
        return RationalPoly({m: -c for m, c in self}, self.arity, self.names)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalPoly(
            [(_add_exp(m1, m2), c1 * c2) for m1, c1 in self for m2, c2 in other],
            self.arity,
            self.names,
        )

    __rmul__ = __mul__

    def __pow__(self, e):
        out = RationalPoly.constant(1, self.arity, self.names)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, RationalPoly):
            return self.arity == other.arity and dict(self._terms) == dict(other._terms)
        return NotImplemented

    def __hash__(self):
        return hash((self.arity, tuple(self._terms.items())))

    def degrees(self, grading) -> set[tuple]:
        """Set of multidegrees of the terms under a per-variable grading."""
        out = set()
        for m, _ in self:
            out.add(tuple(sum(e * g[k] for e, g in zip(m, grading)) for k in range(len(grading[0]))))
        return out

    def scale(self, c) -> RationalPoly:
        c = _parse_fraction(c)
        return RationalPoly({m: v * c for m, v in self}, self.arity, self.names)

    def permute(self, perm) -> RationalPoly:
        out = {}
        for m, c in self:
            e = [0] * self.arity
            for i, x in enumerate(m):
                e[perm[i]] = x
            out[tuple(e)] = c
        return RationalPoly(out, self.arity, self.names)

    def to_json(self) -> dict:
        return {
            "vars": list(self.names),
            "terms": [{"e": list(m), "c": str(c)} for m, c in self],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, data) -> RationalPoly:
        if isinstance(data, str):
            data = json.loads(data)
        names = data.get("vars")
        terms = data.get("terms")
        if not isinstance(terms, list):
            raise ValueError("polynomial needs a 'terms' list")
        if names is None:
            if not terms:
                raise ValueError("cannot infer arity of an empty polynomial without 'vars'")
            names = default_names(len(terms[0]["e"]))
        return cls([(t["e"], t["c"]) for t in terms], len(names), names)

    def __repr__(self):
        return f"RationalPoly({format_poly(self._terms.items(), self.names)})"


def reduce_mod_p(f: RationalPoly, p) -> FpPoly:
    """Coefficient-wise image of ``f`` in ``F_p``; zero images are dropped."""
    p = Prime(p)
    out = {}
    for m, c in f:
        if c.denominator % p == 0:
            raise BadReduction(p, m)
        v = c.numerator * pow(c.denominator, -1, p) % p
        if v:
            out[m] = v
    return FpPoly._raw(out, f.arity, p)


def fppoly_from_json(data, p) -> FpPoly:
    """Parse the JSON polynomial format directly into ``F_p``."""
    return reduce_mod_p(RationalPoly.from_json(data), p)


def univariate_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    """Monic gcd of two dense univariate polynomials over ``F_p``.

    Coefficient lists are little-endian (``a[i]`` multiplies ``x**i``).
    """
    def trim(c):
        c = [x % p for x in c]
        while c and c[-1] == 0:
            c.pop()
        return c

    a, b = trim(a), trim(b)
    while b:
        inv = pow(b[-1], -1, p)
        r = a[:]
        while len(r) >= len(b):
            q = r[-1] * inv % p
            shift = len(r) - len(b)
            for i, c in enumerate(b):
                r[shift + i] = (r[shift + i] - q * c) % p
            r = trim(r)
            if not r:
                break
        a, b = b, r
    if not a:
        return []
    inv = pow(a[-1], -1, p)
    return [x * inv % p for x in a]
