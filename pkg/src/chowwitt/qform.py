"""Diagonal symmetric bilinear forms: invariants, isotropy, Witt decomposition.

Each supported field kind has a backend that tracks a form only through a
complete set of isometry invariants:

* finite fields of odd order: rank and determinant class;
* Q: rank, determinant class, signature and the Hasse symbols
  prod_{i<j} (a_i, a_j)_v at every place where they can be nontrivial;
* F_q(t) (q odd): the same data over its places (including t = oo).

With these, "is isotropic", "represents c", "split off <c>" and "split off a
hyperbolic plane" are pure functions of the invariants, and a canonical
diagonal representative is produced greedily by always splitting off the
smallest represented square class.  Isometric inputs therefore give identical
outputs.  Q(t) is handled separately (ranks <= 3, see ``_QtBackend``).
"""

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, count
from math import prod as _prod

from .errors import CharacteristicTwo, Degenerate, UnsupportedField
from .scalars import poly as P
from .scalars.factor import factor, squarefree_decomposition
from .scalars.fields import QQ, FieldElement, prime_factors
from .scalars.valuation import Valuation, legendre

INF = "inf"


# --- Hilbert symbols over Q -----------------------------------------------------

def _split2(x, p):
    """x = p^v * u with u prime to p (x a nonzero Fraction or int)."""
    x = Fraction(x)
    n, d = x.numerator, x.denominator
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v, n, d


@lru_cache(maxsize=None)
def _two_adic_table():
    """(alpha, u, beta, w) -> (2^alpha u, 2^beta w)_2 for odd u, w mod 8.

    Decided by searching for a primitive solution of a x^2 + b y^2 = z^2
    modulo 64.
    """
    mod = 64
    parities = {}
    for x in range(mod):
        parities.setdefault(x * x % mod, set()).add(x % 2)
    pairs = [(s, par) for s, ps in parities.items() for par in ps]
    table = {}
    classes = [(al, u) for al in (0, 1) for u in (1, 3, 5, 7)]
    for al, u in classes:
        for be, w in classes:
            a, b = 2 ** al * u, 2 ** be * w
            ok = False
            for sx, px in pairs:
                for sy, py in pairs:
                    zs = parities.get((a * sx + b * sy) % mod)
                    if zs and (px or py or 1 in zs):
                        ok = True
                        break
                if ok:
                    break
            table[(al, u, be, w)] = 1 if ok else -1
    return table


def hilbert_symbol(a, b, place):
    """Hilbert symbol (a, b)_v over Q for v a prime or 'inf'."""
    a, b = Fraction(a.raw if isinstance(a, FieldElement) else a), Fraction(b.raw if isinstance(b, FieldElement) else b)
    if a == 0 or b == 0:
        raise Degenerate("Hilbert symbol of zero")
    if place in (INF, float("inf")):
        return -1 if (a < 0 and b < 0) else 1
    p = int(place)
    va, na, da = _split2(a, p)
    vb, nb, db = _split2(b, p)
    if p == 2:
        u = (na * da) % 8
        w = (nb * db) % 8
        return _two_adic_table()[(va % 2, u, vb % 2, w)]
    ua, ub = na * da, nb * db
    sign = -1 if (va * vb % 2 and p % 4 == 3) else 1
    la = legendre(ua, p) if vb % 2 else 1
    lb = legendre(ub, p) if va % 2 else 1
    return sign * la * lb


def _strip(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


@lru_cache(maxsize=1 << 16)
def _cached_hilbert(a, b, place):
    """Hilbert symbol for nonzero integers a, b (fast path of hilbert_symbol)."""
    if place == INF:
        return -1 if (a < 0 and b < 0) else 1
    va, ua = _strip(a, place)
    vb, ub = _strip(b, place)
    if place == 2:
        return _two_adic_table()[(va % 2, ua % 8, vb % 2, ub % 8)]
    sign = -1 if (va * vb % 2 and place % 4 == 3) else 1
    la = (1 if pow(ua % place, (place - 1) // 2, place) == 1 else -1) if vb % 2 else 1
    lb = (1 if pow(ub % place, (place - 1) // 2, place) == 1 else -1) if va % 2 else 1
    return sign * la * lb


@lru_cache(maxsize=1 << 14)
def _cached_prime_factors(n):
    return tuple(prime_factors(n))


def hilbert_symbol_formula(a, b, p):
    """Closed-form 2-adic symbol (independent route used as a test oracle)."""
    va, na, da = _split2(a, p)
    vb, nb, db = _split2(b, p)
    u, w = na * da, nb * db
    if p != 2:
        return hilbert_symbol(a, b, p)
    eps = lambda x: ((x - 1) // 2) % 2
    omega = lambda x: ((x * x - 1) // 8) % 2
    e = (eps(u) * eps(w) + va * omega(w) + vb * omega(u)) % 2
    return -1 if e else 1


# --- square classes --------------------------------------------------------------

def _squarefree_int(n):
    sign = -1 if n < 0 else 1
    out = 1
    n = abs(n)
    for p in prime_factors(n):
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e % 2:
            out *= p
    return sign * out


def _odd_part(B, f):
    """Monic product of the odd-multiplicity squarefree factors of f."""
    out = (B.one_raw,)
    for g, m in squarefree_decomposition(B, f):
        if m % 2:
            out = P.mul(B, out, g)
    return out


def square_class_key(a):
    """Total order on canonical square-class representatives."""
    F = a.field
    if F.kind == "rationals":
        r = a.raw
        return (0, abs(r.numerator), r < 0, r.denominator)
    if F.kind == "ratfunc":
        B = F.base
        num = a.raw[0]
        c = B.elem(num[-1])
        mono = P.monic(B, num)
        ck = square_class_key(c) if B.kind == "rationals" else (0 if c == B.one else 1,)
        return (P.deg(mono), tuple(B.sort_key(x) for x in reversed(mono)), ck)
    return (0 if a == F.one else 1, a.sort_key())


# --- backends ----------------------------------------------------------------------

class _FiniteBackend:
    """F_q with q odd: data = (rank, det class)."""

    def __init__(self, F):
        self.F = F
        self.nonsquare = min((e for e in F.elements() if not e.is_zero() and not e.is_square()),
                             key=lambda e: e.sort_key())

    def rep(self, a):
        return self.F.one if a.is_square() else self.nonsquare

    def candidates(self, data=None):
        return [self.F.one, self.nonsquare]

    def data(self, entries):
        d = self.F.one
        for a in entries:
            d = d * a
        return (len(entries), self.rep(d))

    def isotropic(self, data):
        n, d = data
        return n >= 3 or (n == 2 and (-d).is_square())

    def represents(self, data, c):
        n, d = data
        if n == 0:
            return False
        return n >= 2 or self.rep(c) == d

    def split(self, data, c):
        n, d = data
        return (n - 1, self.rep(d * c))

    def hyperbolic_split(self, data):
        n, d = data
        return (n - 2, self.rep(-d))

    def rank(self, data):
        return data[0]

    def last(self, data):
        return data[1]


@dataclass(frozen=True)
class _GlobalData:
    n: int
    d: object  # canonical det class
    eps: dict = dc_field(hash=False)
    sig: int = 0


class _GlobalBackend:
    """Shared Hasse-Minkowski logic for Q and F_q(t)."""

    def places_of(self, a):
        raise NotImplementedError

    def _eps_product(self, eps, x, y):
        places = set(eps) | set(self.places_of(x)) | set(self.places_of(y)) | set(self.special)
        out = {v: eps.get(v, 1) * self.hilbert(x, y, v) for v in places}
        return {v: e for v, e in out.items() if e != 1}

    def data(self, entries):
        # Hasse invariant built incrementally: eps(q + <a>) = eps(q) (det q, a)
        out = _GlobalData(0, self.F.one, {}, 0)
        for a in entries:
            out = self.add_entry(out, a)
        return out

    def _all_places(self, data):
        return set(data.eps) | set(self.places_of(data.d)) | set(self.special)

    def isotropic(self, data):
        n, d = data.n, data.d
        if n <= 1:
            return False
        if n == 2:
            return (-d).is_square()
        if n >= 5:
            return self.big_rank_isotropic(data)
        places = self._all_places(data)
        if n == 3:
            return all(self.hilbert(-self.F.one, -d, v) == data.eps.get(v, 1) for v in places)
        return all((not self.local_square(d, v)) or data.eps.get(v, 1) == self.minus_one_pair(v)
                   for v in places)

    def add_entry(self, data, c):
        return _GlobalData(data.n + 1, self.rep(data.d * c), self._eps_product(data.eps, data.d, c),
                           data.sig + self.sign(c))

    def represents(self, data, c):
        if data.n == 0:
            return False
        if data.n == 1:
            return self.rep(c) == data.d
        if data.n >= 4:
            return abs(data.sig - self.sign(c)) < data.n + 1
        return self.isotropic(self.add_entry(data, -c))

    def split(self, data, c):
        d1 = self.rep(data.d * c)
        return _GlobalData(data.n - 1, d1, self._eps_product(data.eps, c, d1), data.sig - self.sign(c))

    def hyperbolic_split(self, data):
        d1 = self.rep(-data.d)
        return _GlobalData(data.n - 2, d1, self._eps_product(data.eps, -self.F.one, d1), data.sig)

    def rank(self, data):
        return data.n

    def last(self, data):
        return data.d


class _RationalBackend(_GlobalBackend):
    special = (2, INF)

    def __init__(self):
        self.F = QQ

    def rep(self, a):
        r = a.raw
        return QQ(_squarefree_int(r.numerator * r.denominator))

    def candidates(self, data=None):
        if data is not None and data.n == 2:
            # a binary form is usually represented by a unit at its bad places; try those first
            primes = sorted({v for v in data.eps if v != INF} | set(self.places_of(data.d)) | {2})
            units = sorted({_prod(sub) for k in range(len(primes) + 1) for sub in combinations(primes, k)})
            for m in units:
                yield QQ(m)
                yield QQ(-m)
        for m in count(1):
            if _squarefree_int(m) == m:
                yield QQ(m)
                yield QQ(-m)

    def places_of(self, a):
        r = a.raw
        return _cached_prime_factors(abs(r.numerator * r.denominator))

    def hilbert(self, a, b, v):
        # the symbol only sees square classes, so n/d may be replaced by n*d
        x, y = a.raw, b.raw
        return _cached_hilbert(x.numerator * x.denominator, y.numerator * y.denominator, v)

    def sign(self, a):
        return 1 if a.raw > 0 else -1

    def local_square(self, a, v):
        r = a.raw
        if v == INF:
            return r > 0
        val, n, d = _split2(r, v)
        if val % 2:
            return False
        u = n * d
        if v == 2:
            return u % 8 == 1
        return legendre(u, v) == 1

    def minus_one_pair(self, v):
        return -1 if v in (2, INF) else 1

    def big_rank_isotropic(self, data):
        return abs(data.sig) < data.n


class _FunctionFieldBackend(_GlobalBackend):
    """F_q(t), q odd; places are Valuation objects (finite ones and t = oo)."""

    def __init__(self, F):
        self.F = F
        self.base = _FiniteBackend(F.base)
        self.special = (Valuation.at_infinity(F),)

    def rep(self, a):
        B = self.F.base
        num, den = a.raw
        c = self.base.rep(B.elem(B.mul(num[-1], den[-1])))
        f = _odd_part(B, P.mul(B, P.monic(B, num), den))
        return self.F.elem(self.F.make(P.scale(B, f, c.raw)))

    def candidates(self, data=None):
        B = self.F.base
        g = self.base.nonsquare
        for D in count(0):
            for f in _monic_squarefree(B, D):
                yield self.F.elem(self.F.make(f))
                yield self.F.elem(self.F.make(P.scale(B, f, g.raw)))

    def places_of(self, a):
        B = self.F.base
        out = []
        for part in a.raw:
            if P.deg(part) > 0:
                _, items = factor(P.Poly._raw(B, part))
                out.extend(Valuation.at_poly(self.F, g) for g, _ in items)
        return out

    def hilbert(self, a, b, v):
        return tame_hilbert(a, b, v)

    def sign(self, a):
        return 0

    def local_square(self, a, v):
        val, u = v.split(a)
        return val % 2 == 0 and v.reduce(u).is_square()

    def minus_one_pair(self, v):
        return 1

    def big_rank_isotropic(self, data):
        return True


def tame_hilbert(a, b, v):
    """Hilbert symbol at a nondyadic discrete valuation via the tame symbol."""
    al, u = v.split(a)
    be, w = v.split(b)
    t = (a ** be) * (b ** (-al))
    if (al * be) % 2:
        t = -t
    return 1 if v.reduce(t).is_square() else -1


def _monic_squarefree(B, D):
    from itertools import product
    elems = sorted(B.raw_elements(), key=B.sort_key)
    for tail in product(elems, repeat=D):
        f = tuple(reversed(tail)) + (B.one_raw,)
        if D == 0 or P.deg(P.gcd(B, f, P.deriv(B, f))) == 0:
            yield f


# --- Q(t): ranks <= 3 via residues ---------------------------------------------------

class _QtBackend:
    """Q(t).  Constant forms reduce to Q; otherwise only ranks <= 3 are decided.

    Rank 3: <a1,a2,a3> is isotropic iff the quaternion algebra (-a2/a1, -a3/a1)
    splits.  That holds iff every finite residue (tame symbol) is a square and
    the specialization at a rational point where everything is a unit splits
    over Q.  Residues at places of degree > 1 live in number fields and are
    refused.
    """

    def __init__(self, F):
        self.F = F
        self.Q = _RationalBackend()

    def rep(self, a):
        B = QQ
        num, den = a.raw
        lc = num[-1] * den[-1] if den else num[-1]
        c = _squarefree_int((lc.numerator * lc.denominator))
        f = _odd_part(B, P.mul(B, P.monic(B, num), den))
        return self.F.elem(self.F.make(P.scale(B, f, Fraction(c))))

    @staticmethod
    def constant(a):
        num, den = a.raw
        return P.deg(num) <= 0 and P.deg(den) <= 0

    def _places(self, a):
        out = []
        for part in a.raw:
            if P.deg(part) > 0:
                _, items = factor(P.Poly._raw(QQ, part))
                for g, _ in items:
                    out.append(g)
        return out

    def quaternion_split(self, A, B):
        places = set(self._places(A)) | set(self._places(B))
        for g in places:
            if g.degree > 1:
                raise UnsupportedField(f"residue at {g} lies in a number field")
            if tame_hilbert(A, B, Valuation.at_poly(self.F, g)) != 1:
                return False
        roots = [QQ.neg(g.coeffs[0]) for g in places]
        for a0 in _rational_points():
            if a0 not in roots:
                break
        ev = lambda x: QQ(P.evaluate(QQ, x.raw[0], a0) / P.evaluate(QQ, x.raw[1], a0))
        Aq, Bq = ev(A), ev(B)
        places_q = set(prime_factors((Aq.raw.numerator * Aq.raw.denominator))) | set(
            prime_factors(Bq.raw.numerator * Bq.raw.denominator)) | {2, INF}
        return all(hilbert_symbol(Aq, Bq, v) == 1 for v in places_q)

    def isotropic(self, entries):
        n = len(entries)
        if n <= 1:
            return False
        if n == 2:
            return (-entries[0] * entries[1]).is_square()
        if n == 3:
            a1 = entries[0]
            return self.quaternion_split(-entries[1] / a1, -entries[2] / a1)
        raise UnsupportedField("isotropy of nonconstant forms of rank >= 4 over Q(t)")


def _rational_points():
    yield Fraction(0)
    for m in count(1):
        yield Fraction(m)
        yield Fraction(-m)


@lru_cache(maxsize=None)
def _backend(F):
    if F.characteristic == 2:
        raise CharacteristicTwo(f"{F} has characteristic 2")
    if F.kind in ("prime", "finite") or (F.kind == "extension" and F.order):
        return _FiniteBackend(F)
    if F.kind == "rationals":
        return _RationalBackend()
    if F.kind == "ratfunc":
        if F.base.kind == "rationals":
            return _QtBackend(F)
        return _FunctionFieldBackend(F)
    raise UnsupportedField(f"no quadratic form backend for {F}")


def square_class(a):
    """Canonical representative of the square class of a nonzero element."""
    if a.is_zero():
        raise Degenerate("zero has no square class")
    if a.field.characteristic == 2 and a.field.order:
        return a.field.one
    return _backend(a.field).rep(a)


# --- forms ---------------------------------------------------------------------------

class QuadForm:
    """Diagonal nondegenerate form <a_1, ..., a_n>."""

    __slots__ = ("field", "entries")

    def __init__(self, field, entries=()):
        ents = tuple(field(e) if not isinstance(e, FieldElement) or e.field != field else e for e in entries)
        if any(e.is_zero() for e in ents):
            raise Degenerate("diagonal entries must be nonzero")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "entries", ents)

    def __setattr__(self, *args):
        raise AttributeError("QuadForm is immutable")

    @classmethod
    def hyperbolic(cls, field, copies=1):
        return cls(field, [field.one, -field.one] * copies)

    @property
    def rank(self):
        return len(self.entries)

    def __len__(self):
        return len(self.entries)

    def det(self):
        d = self.field.one
        for a in self.entries:
            d = d * a
        return d

    def signed_discriminant(self):
        n = self.rank
        d = self.det()
        if (n * (n - 1) // 2) % 2:
            d = -d
        return square_class(d)

    def gram(self):
        F = self.field
        return [[self.entries[i] if i == j else F.zero for j in range(self.rank)] for i in range(self.rank)]

    def __add__(self, other):
        _same_field(self, other)
        return QuadForm(self.field, self.entries + other.entries)

    def __mul__(self, other):
        if isinstance(other, QuadForm):
            _same_field(self, other)
            return QuadForm(self.field, [a * b for a in self.entries for b in other.entries])
        c = self.field(other)
        return QuadForm(self.field, [c * a for a in self.entries])

    __rmul__ = __mul__

    def canonical_entries(self):
        """Entries replaced by canonical square classes and sorted."""
        return QuadForm(self.field, sorted((square_class(a) for a in self.entries), key=square_class_key))

    def __eq__(self, other):
        return isinstance(other, QuadForm) and self.field == other.field and self.entries == other.entries

    def __hash__(self):
        return hash((self.field, self.entries))

    def __repr__(self):
        return "<" + ",".join(str(a) for a in self.entries) + ">"

    def invariants(self):
        return form_invariants(self)

    def to_json(self):
        from .scalars.parse import field_spec
        return {"field": field_spec(self.field), "entries": [str(a) for a in self.entries]}


def _same_field(a, b):
    if a.field != b.field:
        from .errors import FieldMismatch
        raise FieldMismatch(f"{a.field} vs {b.field}")


@dataclass(frozen=True)
class FormInvariants:
    rank: int
    signed_discriminant: FieldElement
    hasse_symbols: dict = dc_field(default_factory=dict, hash=False)
    signatures: dict = dc_field(default_factory=dict, hash=False)

    def to_json(self):
        return {
            "rank": self.rank,
            "signedDiscriminant": str(self.signed_discriminant),
            "hasseSymbols": {str(k): v for k, v in sorted(self.hasse_symbols.items(), key=lambda kv: _place_key(kv[0]))},
            "signatures": dict(self.signatures),
        }


def _place_key(v):
    return (1, 0) if v == INF else (0, v)


def form_invariants(q):
    F = q.field
    if q.rank == 0:
        disc = F.one
    elif F.characteristic == 2:
        disc = F.one
    else:
        disc = q.signed_discriminant()
    hasse, sigs = {}, {}
    if F.kind == "rationals":
        backend = _RationalBackend()
        data = backend.data(list(q.entries))
        # canonical: the two special places plus every place where the symbol is -1
        hasse = {v: data.eps.get(v, 1) for v in set(backend.special) | set(data.eps)}
        sigs = {INF: data.sig}
    return FormInvariants(q.rank, disc, hasse, sigs)


# --- decision procedures ----------------------------------------------------------------

def is_isotropic(q):
    """True iff q represents zero nontrivially."""
    B = _backend(q.field)
    if isinstance(B, _QtBackend):
        if all(B.constant(a) for a in q.entries):
            return is_isotropic(_to_q(q))
        return B.isotropic(list(q.entries))
    return B.isotropic(B.data(list(q.entries)))


def represents(q, c):
    """True iff q represents the nonzero element c."""
    c = q.field(c)
    B = _backend(q.field)
    if isinstance(B, _QtBackend):
        return is_isotropic(QuadForm(q.field, list(q.entries) + [-c]))
    return B.represents(B.data(list(q.entries)), c)


def _greedy(B, data):
    entries = []
    while B.rank(data) > 0:
        if B.rank(data) == 1:
            c = B.last(data)
        else:
            c = next(c for c in B.candidates(data) if B.represents(data, c))
        entries.append(c)
        data = B.split(data, c)
    return sorted(entries, key=square_class_key)


def _to_q(q):
    return QuadForm(QQ, [QQ(a.raw[0][0] / a.raw[1][0]) for a in q.entries])


def _from_q(F, q):
    return QuadForm(F, [F(a) for a in q.entries])


def canonical_form(q):
    """Canonical diagonal representative of the isometry class of q."""
    B = _backend(q.field)
    if isinstance(B, _QtBackend):
        if all(B.constant(a) for a in q.entries):
            return _from_q(q.field, canonical_form(_to_q(q)))
        return q.canonical_entries()
    return QuadForm(q.field, _greedy(B, B.data(list(q.entries))))


def witt_decompose(q):
    """q -> (anisotropic kernel in canonical form, number of hyperbolic planes)."""
    B = _backend(q.field)
    if isinstance(B, _QtBackend):
        return _qt_decompose(B, q)
    data = B.data(list(q.entries))
    h = 0
    while B.isotropic(data):
        data = B.hyperbolic_split(data)
        h += 1
    return QuadForm(q.field, _greedy(B, data)), h


def _qt_decompose(B, q):
    F = q.field
    if all(B.constant(a) for a in q.entries):
        k, h = witt_decompose(_to_q(q))
        return _from_q(F, k), h
    n = q.rank
    if n > 3:
        raise UnsupportedField("Witt decomposition of nonconstant forms of rank >= 4 over Q(t)")
    if not B.isotropic(list(q.entries)):
        return q.canonical_entries(), 0
    if n == 2:
        return QuadForm(F, []), 1
    return QuadForm(F, [B.rep(-q.det())]), 1


def diagonalize(gram, field=None):
    """Symmetric Gram matrix -> canonical isometric diagonal form."""
    F = field or _infer_field(gram)
    if F.characteristic == 2:
        raise CharacteristicTwo("diagonalization needs 2 invertible")
    M = [[F(x) for x in row] for row in gram]
    n = len(M)
    if any(len(r) != n for r in M):
        raise Degenerate("Gram matrix must be square")
    for i in range(n):
        for j in range(n):
            if M[i][j] != M[j][i]:
                raise Degenerate("Gram matrix must be symmetric")
    diag = []
    while M:
        k = next((i for i in range(len(M)) if not M[i][i].is_zero()), None)
        if k is None:
            pair = next(((i, j) for i in range(len(M)) for j in range(len(M)) if not M[i][j].is_zero()), None)
            if pair is None:
                raise Degenerate("Gram matrix is singular")
            i, j = pair
            # e_i <- e_i + e_j gives a nonzero diagonal entry 2 b(e_i, e_j)
            for r in range(len(M)):
                M[r][i] = M[r][i] + M[r][j]
            for c in range(len(M)):
                M[i][c] = M[i][c] + M[j][c]
            k = i
        a = M[k][k]
        diag.append(a)
        rest = [r for r in range(len(M)) if r != k]
        M = [[M[r][c] - M[r][k] * M[k][c] / a for c in rest] for r in rest]
    return canonical_form(QuadForm(F, diag))


def _infer_field(gram):
    for row in gram:
        for x in row:
            if isinstance(x, FieldElement):
                return x.field
    return QQ


def is_isometric(q1, q2):
    _same_field(q1, q2)
    return q1.rank == q2.rank and canonical_form(q1) == canonical_form(q2)
