"""Discrete valuations on Q and on k(t), plus the real pseudo-place of Q."""

from fractions import Fraction
import math

from ..errors import EvenCharacteristic, FieldMismatch, UnsupportedField
from . import poly as P
from .fields import GF, ExtensionField, FieldElement, PrimeField, QQ, is_prime
from .factor import factor_finite

INF = math.inf


def legendre(a, p=None):
    """Legendre symbol (a/p) in {1, 0, -1} for an odd prime p."""
    if isinstance(a, FieldElement):
        if a.field.kind != "prime":
            raise FieldMismatch("legendre expects an element of a prime field")
        p = a.field.p
        a = a.raw
    if p == 2:
        raise EvenCharacteristic("Legendre symbol needs an odd prime")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if isinstance(a, Fraction):
        a = a.numerator * pow(a.denominator, -1, p)
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def _poly_val(F, f, g):
    """Multiplicity of irreducible g in nonzero f."""
    v = 0
    while True:
        q, r = P.divmod_(F, f, g)
        if r:
            return v
        f = q
        v += 1


class Valuation:
    """A place of Q or of k(t) with a chosen uniformizer.

    ``kind`` is one of ``prime`` (p on Q), ``real`` (sign pseudo-valuation on
    Q), ``poly`` (monic irreducible P on k(t)) or ``infinity`` (on k(t), with
    uniformizer 1/t).
    """

    def __init__(self, field, kind, place=None):
        self.field = field
        self.kind = kind
        self.place = place
        if kind == "prime":
            if field != QQ or not is_prime(place):
                raise FieldMismatch("prime places live on Q")
            self.uniformizer = QQ(place)
            self.residue_ring = PrimeField(place)
            self.residue_field = self.residue_ring
            self.degree = 1
        elif kind == "real":
            if field != QQ:
                raise FieldMismatch("the real place lives on Q")
            self.uniformizer = None
            self.residue_ring = self.residue_field = None
            self.degree = 1
        elif kind == "poly":
            if field.kind != "ratfunc":
                raise FieldMismatch("polynomial places live on k(t)")
            B = field.base
            pl = place.coeffs if isinstance(place, P.Poly) else tuple(B.coerce_raw(c) for c in place)
            pl = P.monic(B, pl)
            from .factor import is_irreducible
            if not is_irreducible(P.Poly._raw(B, pl)):
                raise ValueError(f"{P.fmt(B, pl)} is not irreducible, so it is not a place")
            self.place = P.Poly._raw(B, pl)
            self.uniformizer = field(self.place)
            self.degree = P.deg(pl)
            if self.degree == 1:
                self.residue_ring = B
                self.residue_field = B
                self.root = B.neg(pl[0])
            else:
                self.residue_ring = ExtensionField(B, pl)
                self.residue_field = GF(B.order ** self.degree) if B.order else None
        elif kind == "infinity":
            if field.kind != "ratfunc":
                raise FieldMismatch("the infinite place lives on k(t)")
            self.uniformizer = field.t().inverse()
            self.residue_ring = self.residue_field = field.base
            self.degree = 1
        else:
            raise ValueError(kind)

    # --- constructors -------------------------------------------------------
    @classmethod
    def at_prime(cls, p):
        return cls(QQ, "prime", p)

    @classmethod
    def real(cls):
        return cls(QQ, "real")

    @classmethod
    def at_poly(cls, field, poly):
        return cls(field, "poly", poly)

    @classmethod
    def at_infinity(cls, field):
        return cls(field, "infinity")

    def __eq__(self, o):
        return isinstance(o, Valuation) and (self.field, self.kind, self.place) == (o.field, o.kind, o.place)

    def __hash__(self):
        return hash((self.field, self.kind, str(self.place)))

    @property
    def label(self):
        if self.kind == "prime":
            return str(self.place)
        if self.kind == "real":
            return "inf"
        if self.kind == "infinity":
            return "inf"
        return str(self.place)

    def __repr__(self):
        return f"Valuation({self.field}, {self.label})"

    @property
    def residue_characteristic(self):
        if self.kind == "prime":
            return self.place
        if self.kind == "real":
            return 0
        return self.field.characteristic

    # --- evaluation ---------------------------------------------------------
    def _check(self, x):
        x = self.field(x) if not isinstance(x, FieldElement) else x
        if x.field != self.field:
            raise FieldMismatch(f"{x.field} is not the field of {self}")
        return x

    def __call__(self, x):
        x = self._check(x)
        if x.is_zero():
            return INF
        if self.kind == "prime":
            r = x.raw
            return _int_val(r.numerator, self.place) - _int_val(r.denominator, self.place)
        if self.kind == "real":
            return 0
        B = self.field.base
        num, den = x.raw
        if self.kind == "infinity":
            return P.deg(den) - P.deg(num)
        return _poly_val(B, num, self.place.coeffs) - _poly_val(B, den, self.place.coeffs)

    def sign(self, x):
        if self.kind != "real":
            raise ValueError("sign only at the real place")
        x = self._check(x)
        return (x.raw > 0) - (x.raw < 0)

    def split(self, x):
        """x -> (v(x), u) with x = uniformizer^v * u."""
        x = self._check(x)
        v = self(x)
        if v == INF:
            raise ZeroDivisionError("valuation of zero")
        return v, x / self.uniformizer ** v

    def reduce(self, u):
        """Image of a unit in the residue ring."""
        u = self._check(u)
        if self(u) != 0:
            raise ValueError(f"{u} is not a unit at {self.label}")
        if self.kind == "prime":
            return self.residue_ring(u.raw)
        if self.kind == "real":
            raise ValueError("no residue field at the real place")
        B = self.field.base
        num, den = u.raw
        if self.kind == "infinity":
            return B.elem(B.mul(num[-1], B.inv(den[-1])))
        if self.degree == 1:
            return B.elem(B.mul(P.evaluate(B, num, self.root), B.inv(P.evaluate(B, den, self.root))))
        R = self.residue_ring
        return R.elem(R.mul(R.reduce(num), R.inv(R.reduce(den))))

    def residue_of(self, x):
        """Reduction of the unit part: x = pi^v u -> (v, reduce(u))."""
        v, u = self.split(x)
        return v, self.reduce(u)

    def to_standard(self, r):
        """Map an element of the computational residue ring into the standard F_{q^d}."""
        if self.residue_ring is self.residue_field or self.residue_field == self.residue_ring:
            return r
        if self.residue_field is None:
            raise UnsupportedField("residue field is a number field")
        emb = _embedding(self.residue_ring, self.residue_field)
        return emb(r)


def _int_val(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _roots(F, f):
    return sorted((F.elem(F.neg(g[0])) for g, _ in factor_finite(F, f) if P.deg(g) == 1),
                  key=lambda e: e.sort_key())


def _embedding(R, T):
    """Deterministic embedding of the extension R = B[x]/(m) into the finite field T."""
    B = R.base
    if B.kind == "prime":
        base_map = lambda c: T(B.elem(c).raw) if T.kind == "prime" else T.elem(P.trim(T.base, (c,)))
    else:
        # B = F_p[y]/(mB); pick the smallest root of mB in T
        mB = tuple(T.elem(P.trim(T.base, (c,))).raw for c in B.modulus)
        y = _roots(T, mB)[0]

        def base_map(c):
            acc = T.zero
            for coef in reversed(c):
                acc = acc * y + T.elem(P.trim(T.base, (coef,)))
            return acc
    m_img = tuple(base_map(c).raw for c in R.modulus)
    theta = _roots(T, m_img)[0]

    def emb(r):
        acc = T.zero
        for c in reversed(r.raw):
            acc = acc * theta + base_map(c)
        return acc
    return emb


def places_of(x):
    """Finite places where an element of k(t) (or Q) has nonzero valuation."""
    from .factor import factor
    F = x.field
    if F == QQ:
        from .fields import prime_factors
        r = x.raw
        return [Valuation.at_prime(p) for p in sorted(set(prime_factors(r.numerator) + prime_factors(r.denominator)))]
    B = F.base
    out = []
    for part in x.raw:
        if P.deg(part) > 0:
            _, items = factor(P.Poly._raw(B, part))
            out.extend(g for g, _ in items)
    uniq = sorted(set(out), key=lambda g: g.sort_key())
    return [Valuation.at_poly(F, g) for g in uniq]
