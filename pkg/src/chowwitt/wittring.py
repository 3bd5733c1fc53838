"""Witt and Grothendieck-Witt rings of catalog fields.

Normal forms: a :class:`WittClass` is stored through a canonical anisotropic
diagonal representative; a :class:`GWClass` is the pair (virtual rank, Witt
class) subject to rank = dim mod 2.  After inverting 2 every torsion element
of W dies (its torsion is 2-primary), so GW(k)[1/2] and GW(k) (x) Q are
tracked by rank and signature coordinates in :class:`LocalGWClass`.

Over Q(t) the representative is built from Milnor coordinates,
    C  _|_  _|_a <t - a> R_a,
where C is the first residue at infinity (uniformizer 1/t) and R_a the second
residue at t = a.  It is canonical, but not necessarily anisotropic.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product

from .errors import (CharacteristicTwo, Degenerate, FieldMismatch, ResidueCharacteristicTwo,
                     TruncationRequired, UnsupportedExtension, UnsupportedField)
from .qform import (QuadForm, canonical_form, diagonalize, square_class, square_class_key,
                    witt_decompose)
from .scalars import poly as P
from .scalars import intmat
from .scalars.factor import factor, monic_irreducibles
from .scalars.fields import GF, QQ, FieldElement, is_prime
from .scalars.valuation import Valuation


# --- coefficient rings and group presentations ----------------------------------------

class CoefficientRing(Enum):
    INT = "Int"
    INT_HALF = "IntHalf"
    RAT = "Rat"

    @classmethod
    def parse(cls, s):
        if isinstance(s, cls):
            return s
        key = str(s).strip()
        aliases = {"Int": cls.INT, "Z": cls.INT, "IntHalf": cls.INT_HALF, "Z[1/2]": cls.INT_HALF,
                   "Rat": cls.RAT, "Q": cls.RAT}
        if key not in aliases:
            raise ValueError(f"unknown coefficient ring {s!r}")
        return aliases[key]

    @property
    def two_invertible(self):
        return self is not CoefficientRing.INT

    def localize(self, free, torsion):
        """Tensor a presentation (free rank, torsion factors) with the ring."""
        if self is CoefficientRing.RAT:
            return free, []
        if self is CoefficientRing.INT_HALF:
            out = []
            for d in torsion:
                while d % 2 == 0:
                    d //= 2
                if d > 1:
                    out.append(d)
            return free, out
        return free, list(torsion)

    def allows(self, x):
        x = Fraction(x)
        if self is CoefficientRing.RAT:
            return True
        d = x.denominator
        if self is CoefficientRing.INT:
            return d == 1
        return d & (d - 1) == 0

    @property
    def free_symbol(self):
        return {"Int": "Z", "IntHalf": "Z[1/2]", "Rat": "Q"}[self.value]


@dataclass(frozen=True)
class AbelianGroup:
    """Finitely generated module over a coefficient ring, by invariant factors."""

    free_rank: int
    torsion: tuple
    coeff: CoefficientRing = CoefficientRing.INT
    note: str = ""

    @property
    def invariant_factors(self):
        return list(self.torsion) + [0] * self.free_rank

    @property
    def order(self):
        if self.free_rank:
            return None
        n = 1
        for d in self.torsion:
            n *= d
        return n

    def is_trivial(self):
        return self.free_rank == 0 and not self.torsion

    def render(self):
        parts = [f"Z/{d}" for d in self.torsion]
        if self.free_rank == 1:
            parts.append(self.coeff.free_symbol)
        elif self.free_rank > 1:
            parts.append(f"{self.coeff.free_symbol}^{self.free_rank}")
        return " x ".join(parts) if parts else "0"

    __str__ = render

    def to_json(self):
        return {"coeff": self.coeff.value, "freeRank": self.free_rank, "torsion": list(self.torsion),
                "rendered": self.render(), "note": self.note}


def presentation_from_coordinates(gen_coords, moduli):
    """Subgroup of prod Z/m_i (m_i = 0 meaning Z) generated by the given vectors.

    Returns (free rank, torsion factors) of the generated subgroup, computed
    as Z^g / kernel with the kernel found by exact lattice algebra.
    """
    g = len(gen_coords)
    k = len(moduli)
    if g == 0:
        return 0, []
    # kernel of [C | diag(m)] : Z^{g+k} -> Z^k, projected to the first g coordinates
    rows = []
    for i in range(k):
        rows.append([gen_coords[j][i] for j in range(g)] + [moduli[i] if l == i else 0 for l in range(k)])
    K = intmat.kernel(rows, g + k) if rows else intmat.identity(g)
    proj = [K[i] for i in range(g)]
    cols = [c for c in intmat.columns(proj) if any(c)]
    if not cols:
        return g, []
    facs = intmat.invariant_factors(intmat.from_columns(cols, g))
    return g - len(facs), sorted(d for d in facs if d > 1)


# --- Witt classes ----------------------------------------------------------------------------

def _is_qt(F):
    return F.kind == "ratfunc" and F.base.kind == "rationals"


def _char2_finite(F):
    return F.characteristic == 2 and F.order is not None


class WittClass:
    """Element of W(k) in normal form."""

    __slots__ = ("field", "rep")

    def __init__(self, field, rep):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "rep", rep)

    def __setattr__(self, *a):
        raise AttributeError("WittClass is immutable")

    @classmethod
    def of_form(cls, q):
        return witt_class_of(q)

    @classmethod
    def zero(cls, F):
        return cls(F, QuadForm(F, []))

    @classmethod
    def one(cls, F):
        return witt_class_of(QuadForm(F, [F.one]))

    @classmethod
    def bracket(cls, F, u):
        return witt_class_of(QuadForm(F, [F(u)]))

    @property
    def entries(self):
        return self.rep.entries

    @property
    def dim(self):
        return self.rep.rank

    def is_zero(self):
        return self.rep.rank == 0

    def _check(self, o):
        if not isinstance(o, WittClass) or o.field != self.field:
            raise FieldMismatch("Witt classes over different fields")

    def __add__(self, o):
        if o == 0:
            return self
        self._check(o)
        return witt_class_of(self.rep + o.rep)

    __radd__ = __add__

    def __neg__(self):
        if _char2_finite(self.field):
            return self
        return witt_class_of(self.rep * (-self.field.one))

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        if isinstance(o, int):
            if o < 0:
                return (-self) * (-o)
            acc = WittClass.zero(self.field)
            for _ in range(o):
                acc = acc + self
            return acc
        self._check(o)
        return witt_class_of(self.rep * o.rep)

    __rmul__ = __mul__

    def times_unit(self, u):
        return witt_class_of(self.rep * self.field(u))

    def __eq__(self, o):
        if isinstance(o, int) and o == 0:
            return self.is_zero()
        return isinstance(o, WittClass) and self.field == o.field and self.rep.entries == o.rep.entries

    def __hash__(self):
        return hash((self.field, self.rep.entries))

    def __repr__(self):
        return "0" if self.is_zero() else repr(self.rep)

    def signature(self):
        if self.field.kind != "rationals":
            raise UnsupportedField(f"no signature on {self.field}")
        return sum(1 if a.raw > 0 else -1 for a in self.entries)

    def rational_coordinates(self):
        """Faithful coordinates of the image in W(k) (x) Q (signatures)."""
        F = self.field
        if F.kind == "rationals":
            return (self.signature(),)
        if F.order is not None or (F.kind == "ratfunc" and F.base.order is not None):
            return ()
        raise UnsupportedField(f"W (x) Q coordinates over {F}")

    def to_json(self):
        from .scalars.parse import field_spec
        return {"field": field_spec(self.field), "entries": [str(a) for a in self.entries]}


def witt_class_of(q):
    """Witt class of a form, as its canonical anisotropic kernel."""
    F = q.field
    if _char2_finite(F):
        return WittClass(F, QuadForm(F, [F.one] * (q.rank % 2)))
    q = _cancel_pairs(q)
    if _is_qt(F):
        return _qt_class(q)
    return _kernel_class(F, tuple(sorted((square_class(a) for a in q.entries), key=square_class_key)))


@lru_cache(maxsize=1 << 14)
def _kernel_class(F, classes):
    kernel, _ = witt_decompose(QuadForm(F, classes))
    return WittClass(F, kernel)


def _cancel_pairs(q):
    """Drop pairs <a, -a> (hyperbolic planes) before the general decomposition."""
    if q.rank < 4:
        return q
    F = q.field
    counts = {}
    for a in q.entries:
        r = square_class(a)
        counts[r] = counts.get(r, 0) + 1
    out = []
    for r in sorted(counts, key=square_class_key):
        n = counts[r]
        if not n:
            continue
        partner = square_class(-r)
        if partner != r and partner in counts:
            k = min(n, counts[partner])
            n -= k
            counts[partner] -= k
        counts[r] = 0
        out.extend([r] * n)
    return QuadForm(F, out)


# --- Q(t) Milnor coordinates ------------------------------------------------------------

def qt_coordinates(q):
    """(C over Q, {a: R_a over Q}) for a form over Q(t) with degree-1 support."""
    F = q.field
    const = []
    res = {}
    for f in q.entries:
        num, den = f.raw
        v_inf = P.deg(den) - P.deg(num)
        if v_inf % 2 == 0:
            const.append(QQ(num[-1] / den[-1]))
        for part in (num, den):
            if P.deg(part) <= 0:
                continue
            _, items = factor(P.Poly._raw(QQ, part))
            for g, _ in items:
                v = Valuation.at_poly(F, g)
                k, u = v.split(f)
                if k % 2 == 0:
                    continue
                if g.degree > 1:
                    raise UnsupportedField(f"residue at {g} lies in a number field")
                a = QQ.neg(g.coeffs[0])
                res.setdefault(a, []).append(v.reduce(u))
    C = witt_class_of(QuadForm(QQ, const))
    R = {a: witt_class_of(QuadForm(QQ, ents)) for a, ents in res.items()}
    return C, {a: r for a, r in R.items() if not r.is_zero()}


def _qt_class(q):
    F = q.field
    C, R = qt_coordinates(q)
    entries = [F(c) for c in C.entries]
    t = F.t()
    for a in sorted(R):
        entries.extend(square_class(F(r) * (t - F(a))) for r in R[a].entries)
    return WittClass(F, QuadForm(F, sorted(entries, key=square_class_key)))


# --- Grothendieck-Witt classes -------------------------------------------------------------

class GWClass:
    """Element of GW(k) as (virtual rank, Witt class) with rank = dim mod 2."""

    __slots__ = ("field", "rank", "witt")

    def __init__(self, field, rank, witt):
        if witt.field != field:
            raise FieldMismatch("Witt part over another field")
        if (rank - witt.dim) % 2:
            raise ValueError(f"rank {rank} and Witt dimension {witt.dim} differ mod 2")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "witt", witt)

    def __setattr__(self, *a):
        raise AttributeError("GWClass is immutable")

    @classmethod
    def of_form(cls, q):
        return cls(q.field, q.rank, witt_class_of(q))

    @classmethod
    def zero(cls, F):
        return cls(F, 0, WittClass.zero(F))

    @classmethod
    def one(cls, F):
        return cls(F, 1, WittClass.one(F))

    @classmethod
    def bracket(cls, F, u):
        return cls.of_form(QuadForm(F, [F(u)]))

    @classmethod
    def hyperbolic(cls, F):
        return cls(F, 2, WittClass.zero(F))

    def __add__(self, o):
        if isinstance(o, int):
            o = GWClass.one(self.field) * o
        return GWClass(self.field, self.rank + o.rank, self.witt + o.witt)

    __radd__ = __add__

    def __neg__(self):
        return GWClass(self.field, -self.rank, -self.witt)

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, int):
            return GWClass(self.field, self.rank * o, self.witt * o)
        return GWClass(self.field, self.rank * o.rank, self.witt * o.witt)

    __rmul__ = __mul__

    def times_unit(self, u):
        return GWClass(self.field, self.rank, self.witt.times_unit(u))

    def is_zero(self):
        return self.rank == 0 and self.witt.is_zero()

    def __eq__(self, o):
        if isinstance(o, int):
            o = GWClass.one(self.field) * o
        return isinstance(o, GWClass) and (self.field, self.rank, self.witt) == (o.field, o.rank, o.witt)

    def __hash__(self):
        return hash((self.field, self.rank, self.witt))

    def __repr__(self):
        return f"GW(rank={self.rank}, witt={self.witt!r})"

    def localize(self, coeff=CoefficientRing.INT_HALF):
        coeff = CoefficientRing.parse(coeff)
        if not coeff.two_invertible:
            raise ValueError("localization needs 2 inverted")
        return LocalGWClass(self.field, coeff, Fraction(self.rank),
                            tuple(Fraction(x) for x in self.witt.rational_coordinates()))

    def to_json(self):
        d = self.witt.to_json()
        d["rank"] = self.rank
        return d


@dataclass(frozen=True)
class LocalGWClass:
    """Element of GW(k) (x) Lambda for Lambda in {Z[1/2], Q}: (rank, signatures)."""

    field: object
    coeff: CoefficientRing
    rank: Fraction
    signatures: tuple

    def _check(self, o):
        if not isinstance(o, LocalGWClass) or o.field != self.field:
            raise FieldMismatch("localized GW classes over different fields")

    def __add__(self, o):
        self._check(o)
        return LocalGWClass(self.field, self.coeff, self.rank + o.rank,
                            tuple(a + b for a, b in zip(self.signatures, o.signatures)))

    def __neg__(self):
        return LocalGWClass(self.field, self.coeff, -self.rank, tuple(-a for a in self.signatures))

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        if isinstance(o, (int, Fraction)):
            o = Fraction(o)
            if not self.coeff.allows(o):
                raise ValueError(f"{o} is not in {self.coeff.value}")
            return LocalGWClass(self.field, self.coeff, self.rank * o, tuple(a * o for a in self.signatures))
        self._check(o)
        return LocalGWClass(self.field, self.coeff, self.rank * o.rank,
                            tuple(a * b for a, b in zip(self.signatures, o.signatures)))

    __rmul__ = __mul__

    def is_zero(self):
        return self.rank == 0 and all(a == 0 for a in self.signatures)

    def to_json(self):
        return {"coeff": self.coeff.value, "rank": str(self.rank), "signatures": [str(a) for a in self.signatures]}

    def __repr__(self):
        sig = ", signature " + ",".join(str(a) for a in self.signatures) if self.signatures else ""
        return f"rank {self.rank}{sig} in GW (x) {self.coeff.value}"


def epsilon(F):
    """epsilon = -<-1> in GW(F)."""
    return -GWClass.bracket(F, -F.one)


def epsilon_idempotents(F, coeff=CoefficientRing.INT_HALF):
    """(e_plus, e_minus) = ((1 - eps)/2, (1 + eps)/2) in GW(F)[1/2]."""
    if F.characteristic == 2:
        raise CharacteristicTwo("the idempotents need 2 invertible")
    one = GWClass.one(F).localize(coeff)
    eps = epsilon(F).localize(coeff)
    half = Fraction(1, 2)
    return (one - eps) * half, (one + eps) * half


# --- residues -----------------------------------------------------------------------------

def _residue_label(v, uniformizer):
    if uniformizer is None:
        if v.kind == "infinity":
            return "dpi_1/t"
        return f"dpi_{v.label}"
    return f"dpi_{uniformizer}"


class TwistedClass:
    """A Witt or GW class written in a chosen basis of a line L.

    ``basis`` names the reference vector; ``scale`` records the unit u such
    that the current basis is u times the reference one.
    """

    __slots__ = ("underlying", "basis", "scale")

    def __init__(self, underlying, basis, scale=None):
        object.__setattr__(self, "underlying", underlying)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "scale", scale if scale is not None else underlying.field.one)

    def __setattr__(self, *a):
        raise AttributeError("TwistedClass is immutable")

    @property
    def field(self):
        return self.underlying.field

    @property
    def label(self):
        if self.scale == self.field.one:
            return self.basis
        return f"{self.basis}*({self.scale})"

    def rebase(self, u):
        u = self.field(u)
        if u.is_zero():
            raise Degenerate("rebase by zero")
        return TwistedClass(self.underlying.times_unit(u), self.basis, self.scale * u)

    def __add__(self, o):
        if (o.basis, o.scale) != (self.basis, self.scale):
            raise FieldMismatch("twisted classes in different bases; rebase first")
        return TwistedClass(self.underlying + o.underlying, self.basis, self.scale)

    def __eq__(self, o):
        return (isinstance(o, TwistedClass) and self.underlying == o.underlying
                and self.basis == o.basis and self.scale == o.scale)

    def __hash__(self):
        return hash((self.underlying, self.basis))

    def is_zero(self):
        return self.underlying.is_zero()

    def __repr__(self):
        from .scalars.parse import field_spec
        cls = "<>" if self.underlying.is_zero() and isinstance(self.underlying, WittClass) else repr(self.underlying)
        return f"{cls} twisted by {self.label} over {field_spec(self.field)}"

    def to_json(self):
        d = self.underlying.to_json()
        d["twistBasis"] = self.label
        return d


def residue_field_of(v):
    R = v.residue_ring
    if R is None:
        raise UnsupportedField("the real place has no residue field")
    return R


def second_residue(c, v, coeff=CoefficientRing.INT, uniformizer=None):
    """Second residue of a Witt class at a valuation, normalized by d<u pi> = <u bar>."""
    coeff = CoefficientRing.parse(coeff)
    if isinstance(c, QuadForm):
        c = witt_class_of(c)
    if c.field != v.field:
        raise FieldMismatch(f"{c.field} is not the field of {v}")
    if v.kind == "real":
        raise UnsupportedField("no residue at the real place")
    pi = v.uniformizer if uniformizer is None else v.field(uniformizer)
    if v(pi) != 1:
        raise ValueError(f"{pi} is not a uniformizer at {v.label}")
    label = _residue_label(v, uniformizer)
    if v.residue_characteristic == 2:
        if coeff is CoefficientRing.INT:
            raise ResidueCharacteristicTwo(f"residue at {v.label} has characteristic 2")
        return TwistedClass(WittClass.zero(GF(2)), label)
    R = residue_field_of(v)
    ents = []
    for a in c.entries:
        k = v(a)
        if k % 2:
            ents.append(v.reduce(a / pi ** k))
    return TwistedClass(witt_class_of(QuadForm(R, ents)), label)


def first_residue(c, v, uniformizer=None):
    """First residue: the unit entries reduced (entries of odd valuation dropped)."""
    if isinstance(c, QuadForm):
        c = witt_class_of(c)
    pi = v.uniformizer if uniformizer is None else v.field(uniformizer)
    R = residue_field_of(v)
    ents = []
    for a in c.entries:
        k = v(a)
        if k % 2 == 0:
            ents.append(v.reduce(a / pi ** k))
    return witt_class_of(QuadForm(R, ents))


# --- transfers -----------------------------------------------------------------------------

def _functional(L, kind):
    if kind == "trace":
        return lambda y: L.trace(y)
    if kind == "geometric":
        d = L.degree
        return lambda y: (y[d - 1] if len(y) >= d else L.base.zero_raw)
    raise UnsupportedExtension(f"unknown functional {kind!r}")


def transfer_form(q, functional="trace"):
    """Scharlau transfer of a diagonal form along L = k[x]/(m) -> k."""
    L = q.field
    if L.kind not in ("extension", "finite"):
        raise UnsupportedExtension(f"{L} is not presented as a simple extension")
    if L.characteristic == 2:
        raise CharacteristicTwo("transfer needs 2 invertible")
    k = L.base
    s = _functional(L, functional)
    d = L.degree
    basis = [L.reduce(P.monomial(k, i)) for i in range(d)]
    out = []
    for a in q.entries:
        gram = [[k.elem(s(L.mul(a.raw, L.mul(basis[i], basis[j])))) for j in range(d)] for i in range(d)]
        out.extend(diagonalize(gram, k).entries)
    return QuadForm(k, out)


def scharlau_transfer(c, functional="trace", base=None):
    """Transfer of a WittClass or GWClass along its field's defining extension.

    When ``base`` equals the class's own field the extension is trivial and the
    class is returned unchanged.
    """
    L = c.field
    if base is not None and base == L:
        return c
    if isinstance(c, GWClass):
        d = L.degree if L.kind in ("extension", "finite") else None
        if d is None:
            raise UnsupportedExtension(f"{L} is not presented as a simple extension")
        k = L.base
        q = transfer_form(c.witt.rep, functional)
        w = witt_class_of(q)
        return GWClass(k, c.rank * d, w)
    if isinstance(c, WittClass):
        return witt_class_of(transfer_form(c.rep, functional))
    raise TypeError("transfer expects a WittClass or GWClass")


# --- group structure ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _finite_nonsquare(F):
    return min((e for e in F.elements() if not e.is_zero() and not e.is_square()), key=lambda e: e.sort_key())


def finite_witt_coordinates(F, entries):
    """Faithful coordinates of a diagonal form's class in W(F_q), q odd.

    q = 3 mod 4: one coordinate mod 4 (+1 per square entry, -1 per nonsquare);
    q = 1 mod 4: (number of square entries, number of nonsquare entries) mod 2.
    """
    sq = sum(1 for a in entries if a.is_square())
    ns = len(entries) - sq
    if F.order % 4 == 3:
        return [(sq - ns) % 4]
    return [sq % 2, ns % 2]


def finite_witt_moduli(F):
    return [4] if F.order % 4 == 3 else [2, 2]


def _finite_structure(F):
    if F.characteristic == 2:
        return 0, [2], "abstract: rank mod 2"
    one = WittClass.one(F)
    g = WittClass.bracket(F, _finite_nonsquare(F))
    gens = [one, g]
    orders = []
    for x in gens:
        acc, n = x, 1
        while not acc.is_zero():
            acc = acc + x
            n += 1
        orders.append(n)
    relations = [[orders[0], 0], [0, orders[1]]]
    for a in range(orders[0]):
        for b in range(orders[1]):
            if (a or b) and (one * a + g * b).is_zero():
                relations.append([a, b])
    facs = intmat.invariant_factors(intmat.from_columns(relations, 2))
    return 2 - len(facs), sorted(d for d in facs if d > 1), "generators <1>, <g>"


def _squarefree_units(primes):
    out = []
    ps = sorted(primes)
    for r in range(len(ps) + 1):
        for sub in combinations(ps, r):
            m = 1
            for p in sub:
                m *= p
            for two in (1, 2):
                for sign in (1, -1):
                    out.append(sign * two * m)
    return sorted(out, key=lambda a: (abs(a), a < 0))


def rational_witt_coordinates(a, primes):
    """Coordinates of <a> (a squarefree integer) in Z + Z/2 + sum_p W(F_p)."""
    coords = [1 if a > 0 else -1, 1 if a % 2 == 0 else 0]
    for p in sorted(primes):
        F = GF(p)
        ents = [F(a // p)] if a % p == 0 else []
        coords.extend(finite_witt_coordinates(F, ents))
    return coords


def rational_witt_moduli(primes):
    out = [0, 2]
    for p in sorted(primes):
        out.extend(finite_witt_moduli(GF(p)))
    return out


def _rational_structure(truncation):
    primes = sorted(p for p in truncation if p != 2)
    if any(not is_prime(p) for p in primes):
        raise ValueError("truncation must consist of primes")
    gens = _squarefree_units(primes)
    coords = [rational_witt_coordinates(a, primes) for a in gens]
    free, tors = presentation_from_coordinates(coords, rational_witt_moduli(primes))
    return free, tors, f"subgroup generated by <a> for squarefree {{2}} u {primes}-units"


def function_field_places(F, max_degree):
    B = F.base
    out = []
    for d in range(1, max_degree + 1):
        out.extend(monic_irreducibles(B, d))
    return out


def _residue_coords(v, entries):
    R = v.residue_ring
    return finite_witt_coordinates(_OrderView(R), entries)


class _OrderView:
    """Adapter exposing ``order`` for residue rings of finite-field places."""

    def __init__(self, R):
        self.order = R.order


def function_field_witt_coordinates(F, places, entries):
    """First residue at infinity plus second residues at the given finite places."""
    vinf = Valuation.at_infinity(F)
    coords = []
    unit_ents = []
    for a in entries:
        k, u = vinf.split(a)
        if k % 2 == 0:
            unit_ents.append(vinf.reduce(u))
    coords.extend(finite_witt_coordinates(F.base, unit_ents))
    for g in places:
        v = Valuation.at_poly(F, g)
        ents = []
        for a in entries:
            k, u = v.split(a)
            if k % 2:
                ents.append(v.reduce(u))
        coords.extend(_residue_coords(v, ents))
    return coords


def function_field_witt_moduli(F, places):
    out = list(finite_witt_moduli(F.base))
    for g in places:
        out.extend([4] if (F.base.order ** g.degree) % 4 == 3 else [2, 2])
    return out


def _function_field_structure(F, max_degree):
    B = F.base
    places = function_field_places(F, max_degree)
    g = _finite_nonsquare(B)
    gens = []
    for mask in product((0, 1), repeat=len(places)):
        f = F.one
        for bit, pl in zip(mask, places):
            if bit:
                f = f * F(pl)
        gens.extend([f, f * F(g)])
    coords = [function_field_witt_coordinates(F, places, [a]) for a in gens]
    free, tors = presentation_from_coordinates(coords, function_field_witt_moduli(F, places))
    return free, tors, f"subgroup supported on places of degree <= {max_degree}"


def group_structure(F, coeff=CoefficientRing.INT, truncation=None):
    """Invariant factors of W(F) (x) coeff.

    ``truncation``: for Q an iterable of primes (or an int bound p_max); for
    F_q(t) the maximal place degree.
    """
    coeff = CoefficientRing.parse(coeff)
    if F.order is not None:
        free, tors, note = _finite_structure(F)
    elif F.kind == "rationals":
        if truncation is None:
            if coeff is CoefficientRing.INT:
                raise TruncationRequired("W(Q) is infinitely generated; give a set of primes")
            truncation = ()
        if isinstance(truncation, int):
            truncation = [p for p in range(3, truncation + 1) if is_prime(p)]
        free, tors, note = _rational_structure(truncation)
    elif F.kind == "ratfunc" and F.base.order is not None:
        if F.characteristic == 2:
            raise UnsupportedField("W of a characteristic 2 function field")
        if truncation is None:
            if coeff is CoefficientRing.INT:
                raise TruncationRequired("W(F_q(t)) is infinitely generated; give a place degree")
            truncation = 1
        free, tors, note = _function_field_structure(F, int(truncation))
    else:
        raise UnsupportedField(f"group structure of W({F})")
    free, tors = coeff.localize(free, tors)
    return AbelianGroup(free, tuple(tors), coeff, note)


# --- random elements -----------------------------------------------------------------------------

def random_unit(F, rng):
    if F.kind == "rationals":
        while True:
            n = rng.randint(-40, 40)
            if n:
                return QQ(Fraction(n, rng.randint(1, 6)))
    if F.kind == "ratfunc":
        if F.base.kind == "rationals":
            # products of linear factors keep residues inside Q
            t = F.t()
            x = F(random_unit(F.base, rng))
            for _ in range(rng.randint(0, 2)):
                x = x * (t - rng.randint(-3, 3)) ** rng.choice([-1, 1])
            return x
        return F.elem(F.random_raw(rng, degree=2))
    while True:
        x = F.elem(F.random_raw(rng))
        if not x.is_zero():
            return x


def random_form(F, rng, max_rank=3):
    return QuadForm(F, [random_unit(F, rng) for _ in range(rng.randint(0, max_rank))])


def random_witt(F, rng, max_rank=3):
    return witt_class_of(random_form(F, rng, max_rank))


def random_gw(F, rng, max_rank=3):
    a = GWClass.of_form(random_form(F, rng, max_rank))
    b = GWClass.of_form(random_form(F, rng, max(1, max_rank - 1)))
    return a - b
