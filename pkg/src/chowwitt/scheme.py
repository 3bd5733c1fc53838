"""Catalog schemes of dimension at most one, seen as delta-graded point sets.

The dimension function is delta = -codim: generic points sit at delta 0 and
closed points at delta -1.  Closed points carry the valuation they induce on
the function field, and every point carries the basis label of its twist
line (the dual of m/m^2, written through the chosen uniformizer).
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import count

from .errors import FieldMismatch, InvalidDelta, ParseError
from .scalars import GF, QQ, RationalFunctionField, monic_irreducibles
from .scalars.fields import is_prime
from .scalars.parse import field_spec, parse_scheme_spec, parse_twist
from .scalars.valuation import Valuation

KINDS = ("SpecField", "SpecZ", "SpecZLoc", "A1", "P1", "SpecDVR", "Empty")


@dataclass(frozen=True)
class Point:
    """A point of a catalog scheme.

    ``valuation`` is None for generic points; ``residue_field`` is the
    computational residue field (an extension presented by the place's
    polynomial for non-rational points of curves over F_q).
    """

    label: str
    delta: int
    residue_field: object
    valuation: object = None
    degree: int = 1

    @property
    def is_generic(self):
        return self.valuation is None

    @property
    def sort_key(self):
        v = self.valuation
        if v is None:
            return (0,)
        if v.kind == "prime":
            return (1, v.place)
        if v.kind == "infinity":
            return (3,)
        return (2, self.degree, v.place.sort_key())

    def __repr__(self):
        return f"Point({self.label}, delta={self.delta})"

    def to_json(self):
        return {"label": self.label, "delta": self.delta, "residueField": _field_name(self.residue_field),
                "degree": self.degree}


def _field_name(F):
    try:
        return field_spec(F)
    except AttributeError:
        return repr(F)


class CatalogScheme:
    """One of SpecField(k), SpecZ, SpecZLoc(primes), A1(k), P1(k), SpecDVR(p), or the empty scheme."""

    def __init__(self, kind, base=None, primes=(), prime=None):
        if kind not in KINDS:
            raise ValueError(f"unknown catalog scheme {kind!r}")
        self.kind = kind
        self.base = base
        self.primes = tuple(sorted(primes))
        self.prime = prime
        if kind in ("SpecZ", "SpecZLoc", "SpecDVR"):
            self.function_field = QQ
        elif kind in ("A1", "P1"):
            self.function_field = RationalFunctionField(base)
        elif kind == "SpecField":
            self.function_field = base
        else:
            self.function_field = None

    # constructors
    @classmethod
    def spec_field(cls, k):
        return cls("SpecField", base=k)

    @classmethod
    def spec_z(cls, inverted=()):
        if inverted:
            if not all(is_prime(p) for p in inverted):
                raise ValueError("only primes can be inverted")
            return cls("SpecZLoc", primes=inverted)
        return cls("SpecZ")

    @classmethod
    def affine_line(cls, k):
        return cls("A1", base=k)

    @classmethod
    def projective_line(cls, k):
        return cls("P1", base=k)

    @classmethod
    def dvr(cls, p):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        return cls("SpecDVR", prime=p)

    @classmethod
    def empty(cls):
        return cls("Empty")

    @classmethod
    def parse(cls, text):
        kind, payload = parse_scheme_spec(text)
        if kind == "SpecZ":
            return cls.spec_z()
        if kind == "SpecZLoc":
            return cls.spec_z(payload)
        if kind == "SpecDVR":
            return cls.dvr(payload)
        if kind == "SpecField":
            if payload.kind == "ratfunc":
                raise ParseError("SpecField needs a finite field or Q")
            return cls.spec_field(payload)
        if payload.kind == "ratfunc":
            raise ParseError(f"{kind} needs a base field, not a function field")
        return cls(kind, base=payload)

    def __eq__(self, o):
        return isinstance(o, CatalogScheme) and self._key() == o._key()

    def __hash__(self):
        return hash(self._key())

    def _key(self):
        return (self.kind, self.base, self.primes, self.prime)

    @property
    def spec(self):
        if self.kind == "SpecZ":
            return "SpecZ"
        if self.kind == "SpecZLoc":
            return "SpecZ[1/" + ",".join(map(str, self.primes)) + "]"
        if self.kind == "SpecDVR":
            return f"DVR/{self.prime}"
        if self.kind == "Empty":
            return "Empty"
        prefix = {"SpecField": "Spec", "A1": "A1", "P1": "P1"}[self.kind]
        return f"{prefix}/{field_spec(self.base)}"

    def __repr__(self):
        return f"CatalogScheme({self.spec})"

    # structure
    @property
    def dimension(self):
        if self.kind == "Empty":
            return -1
        return 0 if self.kind == "SpecField" else 1

    @property
    def deltas(self):
        return {-1: [], 0: [0]}.get(self.dimension, [0, -1])

    @property
    def characteristic(self):
        if self.kind in ("SpecZ", "SpecZLoc", "SpecDVR"):
            return 0
        if self.kind == "Empty":
            return None
        return self.base.characteristic

    @property
    def is_arithmetic(self):
        return self.kind in ("SpecZ", "SpecZLoc", "SpecDVR")

    def generic_point(self):
        if self.kind == "Empty":
            raise InvalidDelta("the empty scheme has no points")
        return Point("generic", 0, self.function_field)

    def closed_points(self, bound):
        """Closed points inside a truncation bound, in enumeration order.

        The bound is a prime bound for SpecZ and SpecZLoc, a degree bound over
        finite fields and a height bound over Q.  SpecDVR has one closed point.
        """
        if self.kind in ("SpecField", "Empty"):
            return []
        if self.kind == "SpecDVR":
            return [self._prime_point(self.prime)]
        if self.is_arithmetic:
            return [self._prime_point(p) for p in range(2, bound + 1)
                    if is_prime(p) and p not in self.primes]
        K = self.function_field
        out = []
        if self.base.order is not None:
            for d in range(1, bound + 1):
                for g in monic_irreducibles(self.base, d):
                    out.append(self._poly_point(Valuation.at_poly(K, g)))
        else:
            for a in rational_points(bound):
                out.append(self._poly_point(Valuation.at_poly(K, (QQ.neg(QQ.coerce_raw(a)), QQ.one_raw))))
        if self.kind == "P1":
            out.append(Point("inf", -1, self.base, Valuation.at_infinity(K), 1))
        return out

    def _prime_point(self, p):
        return Point(str(p), -1, GF(p), Valuation.at_prime(p), 1)

    def _poly_point(self, v):
        return Point(str(v.place), -1, v.residue_ring, v, v.degree)

    def points(self, delta, truncation):
        """Points with the given delta value inside a truncation (SupportSet or bound)."""
        if delta not in self.deltas:
            raise InvalidDelta(f"{self.spec} has no points with delta = {delta}")
        if delta == 0:
            return [self.generic_point()]
        if isinstance(truncation, SupportSet):
            return list(truncation.points)
        return self.closed_points(truncation)

    def omega_twist(self, x):
        return omega_twist(self, x)


def rational_points(height):
    """Rationals a/b with |a|, b <= height, ordered by height then value."""
    seen = set()
    out = []
    for h in range(0, height + 1):
        for b in range(1, max(h, 1) + 1):
            for a in range(-h, h + 1):
                if max(abs(a), b) != h and not (h == 0 and a == 0):
                    continue
                x = Fraction(a, b)
                if x not in seen:
                    seen.add(x)
                    out.append(x)
    return out


@dataclass(frozen=True)
class SupportSet:
    """A finite set of closed points used to truncate a Gersten complex."""

    points: tuple = ()
    closure_complete: bool = False

    @classmethod
    def of(cls, scheme, bound):
        return cls(tuple(scheme.closed_points(bound)), scheme.kind in ("SpecField", "SpecDVR", "Empty"))

    def enlarge(self, more):
        """Union with more points; the order of existing points is kept."""
        have = {p.label for p in self.points}
        extra = tuple(p for p in more if p.label not in have)
        return SupportSet(self.points + extra, self.closure_complete)

    def labels(self):
        return [p.label for p in self.points]

    def __len__(self):
        return len(self.points)

    def to_json(self):
        return {"points": self.labels(), "closureComplete": self.closure_complete}


@dataclass(frozen=True)
class TwistData:
    """Line bundle data: O(d) on P1, trivial elsewhere."""

    degree: int = 0

    @classmethod
    def parse(cls, text):
        return cls(parse_twist(text)) if text else cls(0)

    def check(self, scheme):
        if self.degree and scheme.kind != "P1":
            raise FieldMismatch("O(d) twists are only defined on P1 in the catalog")

    def transition_unit(self, scheme, x):
        """Unit u such that a section in the chart at x equals u times the standard section.

        Only the point at infinity of P1 sees the cocycle t^d; the class of
        the unit matters only up to squares.
        """
        if scheme.kind == "P1" and x.valuation is not None and x.valuation.kind == "infinity" and self.degree % 2:
            return scheme.function_field.t()
        return None

    def label(self):
        return f"O({self.degree})"


def omega_twist(scheme, x):
    """Basis label for the twist line at x and the rule for changing it.

    Returns ``(label, rebase)`` where ``rebase(c, u)`` rewrites a class c
    when the uniformizer is multiplied by the unit u.
    """
    if x.is_generic:
        return "1", lambda c, u: c
    v = x.valuation
    label = "dpi_1/t" if v.kind == "infinity" else f"dpi_{v.label}"
    return label, lambda c, u: c.times_unit(u)


def nu_q(scheme):
    """Characteristic-zero fiber: (scheme, inclusion description)."""
    if scheme.is_arithmetic:
        return CatalogScheme.spec_field(QQ), "generic point Spec Q -> " + scheme.spec
    if scheme.kind == "Empty" or scheme.characteristic == 0:
        return scheme, "identity"
    return CatalogScheme.empty(), "empty fiber"


def round_bound(scheme, rnd):
    """Truncation bound used in stabilization round ``rnd`` (rounds start at 1).

    Arithmetic schemes take primes up to the (rnd+2)-th prime; curves take
    degree (or height) at most ``rnd``.
    """
    return _nth_prime(rnd + 2) if scheme.is_arithmetic else rnd


def support_rounds(scheme, start=1):
    """Restartable enumeration of the support sets used by stabilization rounds."""
    for r in count(start):
        yield SupportSet.of(scheme, round_bound(scheme, r))


def _nth_prime(k):
    n, found = 1, 0
    while found < k:
        n += 1
        if is_prime(n):
            found += 1
    return n
