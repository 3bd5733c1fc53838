"""Milnor-Witt K-theory of fields in low degrees.

An :class:`MWExpr` is a formal integer combination of monomials
``eta^m [u_1]...[u_k]`` of a fixed degree ``k - m``.  Equality modulo Morel's
relations is decided by :func:`normal_form` through the pullback square

    K^MW_n = K^M_n  x_{I^n / I^{n+1}}  I^n        (n >= 1)
    K^MW_0 = GW,    K^MW_n = W                    (n < 0)

where ``[u]`` maps to ``{u}`` in Milnor K-theory and to ``<u> - 1`` in the
fundamental ideal, and ``eta`` maps to ``0`` and ``<1>`` respectively.

Residues are computed twice: :func:`residue` rewrites symbols until the
uniformizer leads each word, and :func:`residue_coordinates` applies the
valuation/tame symbol and the Witt second residue to the coordinates.
"""

from collections import defaultdict
from dataclasses import dataclass

from .errors import (FieldMismatch, ParseError, ResidueCharacteristicTwo, UnsupportedDegree,
                     UnsupportedExtension, UnsupportedField)
from .qform import QuadForm, form_invariants, hilbert_symbol, square_class
from .scalars import QQ
from .scalars.fields import FieldElement, prime_factors
from .scalars.parse import field_spec, parse_element, parse_symbol_terms
from .scalars.valuation import Valuation, legendre
from .wittring import GWClass, WittClass, _residue_label, random_unit, scharlau_transfer, witt_class_of

class _Uniformizer:
    """Placeholder letter [pi] used while rewriting residues."""

    def __repr__(self):
        return "pi"


_PI = _Uniformizer()


def _pi_index(word, start=0):
    for i in range(start, len(word)):
        if word[i] is _PI:
            return i
    return -1


# --- expressions ---------------------------------------------------------------------------

class MWExpr:
    """Formal combination of eta-graded symbols over a field.

    ``terms`` maps ``(eta_power, letters)`` to an integer coefficient, where
    ``letters`` is a tuple of nonzero field elements.
    """

    __slots__ = ("field", "degree", "terms")

    def __init__(self, field, degree, terms=None):
        clean = {}
        for (m, letters), c in (terms or {}).items():
            if not c:
                continue
            letters = tuple(_as_element(field, u) for u in letters)
            if len(letters) - m != degree:
                raise ValueError(f"monomial eta^{m}{_fmt_letters(letters)} does not have degree {degree}")
            if m < 0:
                raise ValueError("negative eta power")
            clean[(m, letters)] = clean.get((m, letters), 0) + c
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "terms", {k: v for k, v in clean.items() if v})

    def __setattr__(self, *a):
        raise AttributeError("MWExpr is immutable")

    # constructors
    @classmethod
    def zero(cls, F, degree):
        return cls(F, degree)

    @classmethod
    def one(cls, F):
        return cls(F, 0, {(0, ()): 1})

    @classmethod
    def eta(cls, F):
        return cls(F, -1, {(1, ()): 1})

    @classmethod
    def symbol(cls, F, *units):
        """[u_1][u_2]...[u_k] in degree k."""
        return cls(F, len(units), {(0, tuple(units)): 1})

    @classmethod
    def bracket(cls, F, u):
        """<u> = 1 + eta[u] in degree 0."""
        return cls(F, 0, {(0, ()): 1, (1, (u,)): 1})

    @classmethod
    def hyperbolic(cls, F):
        """h = 2 + eta[-1]."""
        return cls(F, 0, {(0, ()): 2, (1, (-F.one,)): 1})

    @classmethod
    def parse(cls, F, text, degree=None):
        """Read a literal such as ``eta^1*[2][t] - 2*[3]``; the degree is inferred."""
        terms = {}
        degs = set()
        for coef, m, letters in parse_symbol_terms(text):
            units = tuple(parse_element(F, s) for s in letters)
            if any(u.is_zero() for u in units):
                raise ParseError("symbols need nonzero entries")
            degs.add(len(units) - m)
            key = (m, units)
            terms[key] = terms.get(key, 0) + coef
        if degree is not None:
            degs.add(degree)
        if len(degs) != 1:
            raise ParseError(f"mixed degrees {sorted(degs)} in {text!r}")
        return cls(F, degs.pop(), terms)

    # arithmetic
    def _check(self, o):
        if not isinstance(o, MWExpr) or o.field != self.field:
            raise FieldMismatch("symbol expressions over different fields")

    def __add__(self, o):
        if isinstance(o, int) and o == 0:
            return self
        self._check(o)
        if o.degree != self.degree:
            raise ValueError(f"cannot add degrees {self.degree} and {o.degree}")
        terms = dict(self.terms)
        for k, c in o.terms.items():
            terms[k] = terms.get(k, 0) + c
        return MWExpr(self.field, self.degree, terms)

    __radd__ = __add__

    def __neg__(self):
        return MWExpr(self.field, self.degree, {k: -c for k, c in self.terms.items()})

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        if isinstance(o, int):
            return MWExpr(self.field, self.degree, {k: c * o for k, c in self.terms.items()})
        self._check(o)
        terms = defaultdict(int)
        for (m1, l1), c1 in self.terms.items():
            for (m2, l2), c2 in o.terms.items():
                terms[(m1 + m2, l1 + l2)] += c1 * c2
        return MWExpr(self.field, self.degree + o.degree, terms)

    __rmul__ = __mul__

    def eta_times(self, power=1):
        return MWExpr(self.field, self.degree - power,
                      {(m + power, letters): c for (m, letters), c in self.terms.items()})

    def __eq__(self, o):
        return (isinstance(o, MWExpr) and self.field == o.field and self.degree == o.degree
                and self.terms == o.terms)

    def __hash__(self):
        return hash((self.field, self.degree, tuple(sorted(map(str, self.terms.items())))))

    def is_empty(self):
        return not self.terms

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (m, letters), c in sorted(self.terms.items(), key=lambda kv: _term_key(*kv[0])):
            mono = []
            if m:
                mono.append(f"eta^{m}")
            if letters:
                mono.append(_fmt_letters(letters))
            body = "*".join(mono)
            if not body:
                parts.append(("-" if c < 0 else "+", str(abs(c))))
            else:
                parts.append(("-" if c < 0 else "+", body if abs(c) == 1 else f"{abs(c)}*{body}"))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def to_json(self):
        return {
            "field": field_spec(self.field),
            "degree": self.degree,
            "terms": [{"coef": c, "eta": m, "symbols": [str(u) for u in letters]}
                      for (m, letters), c in sorted(self.terms.items(), key=lambda kv: _term_key(*kv[0]))],
        }

    @classmethod
    def from_json(cls, F, data):
        terms = {}
        for t in data["terms"]:
            key = (t["eta"], tuple(parse_element(F, s) for s in t["symbols"]))
            terms[key] = terms.get(key, 0) + t["coef"]
        return cls(F, data["degree"], terms)


def _as_element(F, u):
    if isinstance(u, FieldElement) and u.field == F:
        if u.is_zero():
            raise ValueError("symbols need nonzero entries")
        return u
    x = F(u)
    if x.is_zero():
        raise ValueError("symbols need nonzero entries")
    return x


def _fmt_letters(letters):
    return "".join(f"[{u}]" for u in letters)


def _term_key(m, letters):
    return (m, len(letters), tuple(u.sort_key() for u in letters))


# --- Milnor K_2 backend ------------------------------------------------------------------------

def tame_symbol(a, b, v):
    """Tame symbol at v: (-1)^(alpha*beta) * b^alpha / a^beta reduced, with alpha = v(a), beta = v(b).

    Normalized so that {pi, u} goes to the reduction of u.
    """
    alpha, beta = v(a), v(b)
    x = b ** alpha / a ** beta
    if (alpha * beta) % 2:
        x = -x
    return v.reduce(x)


@dataclass(frozen=True)
class MilnorK2:
    """Element of K^M_2 of a catalog field in coordinates.

    Over a finite field the group is zero and ``coords`` is empty.  Over Q the
    coordinates are the real sign (Hilbert symbol at infinity) and the tame
    symbols at odd primes, stored as residues in [1, p-1].
    """

    field: object
    sign: int = 1
    coords: tuple = ()

    @classmethod
    def zero(cls, F):
        return cls(F)

    @classmethod
    def of_symbol(cls, F, a, b):
        if F.order is not None:
            return cls(F)
        if F.kind != "rationals":
            raise UnsupportedField(f"Milnor K_2 of {F} is not supported")
        sign = hilbert_symbol(a.raw, b.raw, "inf")
        primes = set()
        for x in (a.raw, b.raw):
            primes.update(prime_factors(abs(x.numerator)))
            primes.update(prime_factors(x.denominator))
        coords = []
        for p in sorted(primes):
            if p == 2:
                continue
            r = tame_symbol(a, b, Valuation.at_prime(p)).raw
            if r != 1:
                coords.append((p, r))
        return cls(F, sign, tuple(coords))

    def __add__(self, o):
        if o.field != self.field:
            raise FieldMismatch("Milnor K_2 over different fields")
        if self.field.order is not None:
            return self
        merged = dict(self.coords)
        for p, r in o.coords:
            merged[p] = merged.get(p, 1) * r % p
        return MilnorK2(self.field, self.sign * o.sign, tuple(sorted((p, r) for p, r in merged.items() if r != 1)))

    def __mul__(self, n):
        if self.field.order is not None:
            return self
        return MilnorK2(self.field, self.sign ** (n % 2),
                        tuple((p, pow(r, n, p)) for p, r in self.coords if pow(r, n, p) != 1))

    __rmul__ = __mul__

    def is_zero(self):
        return self.sign == 1 and not self.coords

    def hilbert_symbols(self):
        """Image in K_2/2: quaternion classes at every place (1 means split)."""
        out = {"inf": self.sign}
        prod = self.sign
        for p, r in self.coords:
            s = legendre(r, p)
            if s == -1:
                out[p] = s
            prod *= s
        out[2] = prod
        return out

    def to_json(self):
        if self.field.order is not None:
            return {"group": "0"}
        return {"sign": self.sign, "tame": {str(p): r for p, r in self.coords}}


# --- normal forms --------------------------------------------------------------------------

def _supported_low(F):
    if F.kind == "ratfunc":
        return F.base.kind == "rationals" or (F.base.order is not None and F.characteristic != 2)
    return F.kind == "rationals" or (F.order is not None and F.characteristic != 2)


def _ideal_form(e):
    """Diagonal form representing the image of e in W(F).

    The products of (<u_i> - 1) are expanded in the group ring of square
    classes, where equal classes with opposite signs cancel before any form is built.
    """
    F = e.field
    classes = {}

    def cls(x):
        r = classes.get(x)
        if r is None:
            r = classes[x] = square_class(x)
        return r

    one = cls(F.one)
    total = defaultdict(int)
    for (m, letters), c in e.terms.items():
        poly = {one: c}
        for u in letters:
            ru = cls(u)
            nxt = defaultdict(int)
            for r, k in poly.items():
                nxt[cls(r * ru)] += k
                nxt[r] -= k
            poly = {r: k for r, k in nxt.items() if k}
        for r, k in poly.items():
            total[r] += k
    ents = []
    for r, k in total.items():
        ents.extend([r] * k if k > 0 else [cls(-r)] * (-k))
    return QuadForm(F, ents)


@dataclass(frozen=True, eq=False)
class MWNormalForm:
    """Decided element of K^MW_n(F) for n <= 2.

    n < 0: ``witt``; n = 0: ``gw``; n = 1, 2: ``milnor`` (an element of F^x,
    or a :class:`MilnorK2`) together with ``witt`` in I^n.
    """

    field: object
    degree: int
    milnor: object = None
    witt: object = None
    gw: object = None

    def _key(self):
        return (self.field, self.degree, self.milnor, self.witt, self.gw)

    def __eq__(self, o):
        if isinstance(o, int) and o == 0:
            return self.is_zero()
        return isinstance(o, MWNormalForm) and self._key() == o._key()

    def __hash__(self):
        return hash((self.field, self.degree, self.witt, self.gw))

    def is_zero(self):
        if self.degree == 0:
            return self.gw.is_zero()
        if self.degree < 0:
            return self.witt.is_zero()
        mil = self.milnor == self.field.one if self.degree == 1 else self.milnor.is_zero()
        return mil and self.witt.is_zero()

    def __add__(self, o):
        if self.degree != o.degree or self.field != o.field:
            raise FieldMismatch("normal forms of different degree or field")
        if self.degree == 0:
            return MWNormalForm(self.field, 0, gw=self.gw + o.gw)
        if self.degree < 0:
            return MWNormalForm(self.field, self.degree, witt=self.witt + o.witt)
        mil = self.milnor * o.milnor if self.degree == 1 else self.milnor + o.milnor
        return MWNormalForm(self.field, self.degree, mil, self.witt + o.witt)

    def times_unit(self, u):
        """Multiply by <u>."""
        u = self.field(u)
        if self.degree == 0:
            return MWNormalForm(self.field, 0, gw=self.gw.times_unit(u))
        return MWNormalForm(self.field, self.degree, self.milnor, self.witt.times_unit(u), None)

    def pullback_consistent(self):
        """Check that the Milnor and Witt coordinates agree modulo 2 / I^{n+1}."""
        if self.degree <= 0:
            return True
        F = self.field
        rep = self.witt.rep
        disc = form_invariants(rep).signed_discriminant if rep.rank else F.one
        if self.degree == 1:
            return square_class(disc) == square_class(self.milnor)
        if square_class(disc) != square_class(F.one):
            return False
        if F.order is not None:
            return self.witt.is_zero() and self.milnor.is_zero()
        expected = self.milnor.hilbert_symbols()
        observed = clifford_invariants(self.witt)
        places = set(expected) | set(observed)
        return all(expected.get(p, 1) == observed.get(p, 1) for p in places)

    def __repr__(self):
        if self.degree == 0:
            return repr(self.gw)
        if self.degree < 0:
            return f"W-class {self.witt!r} in degree {self.degree}"
        return f"MW{self.degree}(milnor={self.milnor!r}, witt={self.witt!r})"

    def to_json(self):
        d = {"field": field_spec(self.field), "degree": self.degree}
        if self.degree == 0:
            d["gw"] = self.gw.to_json()
        elif self.degree < 0:
            d["witt"] = self.witt.to_json()
        else:
            d["milnor"] = str(self.milnor) if self.degree == 1 else self.milnor.to_json()
            d["witt"] = self.witt.to_json()
        return d


def clifford_invariants(w):
    """Clifford invariant of a class in I^2(Q), place by place (only -1 entries kept, plus 2 and inf)."""
    if w.field.kind != "rationals":
        raise UnsupportedField("Clifford invariants are computed over Q")
    ents = list(w.entries)
    pad = (-len(ents)) % 8
    ents += [QQ.one, -QQ.one] * (pad // 2)
    inv = form_invariants(QuadForm(QQ, ents)).hasse_symbols
    out = {p: e for p, e in inv.items() if e == -1}
    out.setdefault("inf", inv.get("inf", 1))
    out.setdefault(2, inv.get(2, 1))
    return out


def normal_form(e):
    """Decide the class of an expression modulo Morel's relations (degree <= 2)."""
    F, n = e.field, e.degree
    if n > 2:
        raise UnsupportedDegree(f"no normal form in degree {n}")
    if n == 2 and not (F.kind == "rationals" or (F.order is not None and F.characteristic != 2)):
        raise UnsupportedField(f"degree-2 normal forms are not available over {F}")
    if n <= 1 and not _supported_low(F):
        raise UnsupportedField(f"no normal form over {F}")
    witt = witt_class_of(_ideal_form(e))
    if n <= 0:
        rank = sum(c for (m, letters), c in e.terms.items() if m == 0 and not letters)
        if n < 0:
            return MWNormalForm(F, n, witt=witt)
        return MWNormalForm(F, 0, gw=GWClass(F, rank, witt))
    milnor = F.one if n == 1 else MilnorK2.zero(F)
    for (m, letters), c in e.terms.items():
        if m:
            continue
        if n == 1:
            milnor = milnor * letters[0] ** c
        else:
            milnor = milnor + MilnorK2.of_symbol(F, *letters) * c
    return MWNormalForm(F, n, milnor, witt)


def equal(a, b):
    """True/False when decidable; None ("unknown") in degrees above 2."""
    if a.degree != b.degree:
        return False
    if a.degree > 2:
        return None
    return normal_form(a) == normal_form(b)


def to_gw(e):
    if e.degree != 0:
        raise UnsupportedDegree(f"toGW expects degree 0, got {e.degree}")
    return normal_form(e).gw


def from_gw(g):
    """A degree-0 expression whose GW class is g (inverse of to_gw)."""
    F = g.field
    # sum of <u> = 1 + eta[u] over the entries, plus (rank - dim)/2 copies of h = 2 + eta[-1]
    planes = (g.rank - g.witt.dim) // 2
    terms = {(0, ()): g.rank, (1, (-F.one,)): planes}
    for u in g.witt.entries:
        terms[(1, (u,))] = terms.get((1, (u,)), 0) + 1
    return MWExpr(F, 0, terms)


def eta_shift(e):
    """Image in W(F) for degree <= 0."""
    if e.degree > 0:
        raise UnsupportedDegree("etaShift expects degree <= 0")
    nf = normal_form(e)
    return nf.gw.witt if e.degree == 0 else nf.witt


# --- residues -------------------------------------------------------------------------------

class TwistedMW:
    """Residue output: an expression over the residue field, in the basis named by ``basis``."""

    __slots__ = ("expr", "basis", "scale")

    def __init__(self, expr, basis, scale=None):
        object.__setattr__(self, "expr", expr)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "scale", scale if scale is not None else expr.field.one)

    def __setattr__(self, *a):
        raise AttributeError("TwistedMW is immutable")

    @property
    def field(self):
        return self.expr.field

    @property
    def degree(self):
        return self.expr.degree

    def rebase(self, u):
        """Multiply by <u>, recording the change of basis."""
        u = self.field(u)
        return TwistedMW(MWExpr.bracket(self.field, u) * self.expr, self.basis, self.scale * u)

    def normal_form(self):
        return normal_form(self.expr)

    def __repr__(self):
        label = self.basis if self.scale == self.field.one else f"{self.basis}*({self.scale})"
        return f"{self.expr!r} twisted by {label} over {field_spec(self.field)}"

    def to_json(self):
        d = self.expr.to_json()
        d["twistBasis"] = self.basis
        return d


def _uniformizer(v, uniformizer):
    if v.kind == "real":
        raise UnsupportedField("no residue at the real place")
    if v.residue_characteristic == 2:
        raise ResidueCharacteristicTwo(f"residue at {v.label} has characteristic 2")
    pi = v.uniformizer if uniformizer is None else v.field(uniformizer)
    if v(pi) != 1:
        raise ValueError(f"{pi} is not a uniformizer at {v.label}")
    return pi


def _power_of_pi(a, minus_one):
    """[pi^a] as (coef, eta, letters) words; ``_PI`` stands for [pi]."""
    if a == 0:
        return []
    if a > 0:
        return [(a, 0, (_PI,)), (a // 2, 1, (_PI, minus_one))]
    b = -a
    base = [(b, 0, (_PI,)), (b // 2, 1, (_PI, minus_one))]
    out = [(-c, m, w) for c, m, w in base]
    if b % 2:
        # extra factor eta[pi] from <pi^b> = 1 + eta[pi]
        out += [(-c, m + 1, (_PI,) + w) for c, m, w in base]
    return out


def _expand_letter(u, v, pi, minus_one):
    """[u] with u = pi^a w as a combination of words in [pi] and unit letters."""
    a = v(u)
    w = u / pi ** a
    out = list(_power_of_pi(a, minus_one))
    if w != v.field.one:
        out.append((1, 0, (w,)))
        out += [(c, m + 1, word + (w,)) for c, m, word in _power_of_pi(a, minus_one)]
    return [t for t in out if t[0]]


def _lead_pi(words, minus_one):
    """Rewrite words so that at most one [pi] appears, in front.

    ``words`` maps (eta_power, letters) to coefficients; identical words are
    merged after every round so cancellations happen early.  Returns the
    words that start with [pi] (with the [pi] removed).
    """
    done = defaultdict(int)
    current = dict(words)
    while current:
        nxt = defaultdict(int)
        for (m, w), c in current.items():
            if not c:
                continue
            i = _pi_index(w)
            if i < 0:
                continue
            j = i if i > 0 else _pi_index(w, 1)
            if j < 0:
                done[(m, w[1:])] += c
            elif j == 1 and i == 0:
                # [pi][pi] = [pi][-1]
                nxt[(m, (_PI, minus_one) + w[2:])] += c
            else:
                # [x][pi] = eps [pi][x],  eps = -1 - eta[-1] central
                x = w[j - 1]
                head, tail = w[:j - 1], w[j + 1:]
                nxt[(m, head + (_PI, x) + tail)] -= c
                nxt[(m + 1, head + (_PI, minus_one, x) + tail)] -= c
        current = {k: c for k, c in nxt.items() if c}
    return done


def residue(e, v, uniformizer=None):
    """Residue of an expression at a valuation by symbolic rewriting."""
    if e.field != v.field:
        raise FieldMismatch(f"{e.field} is not the field of {v}")
    if e.degree > 2:
        raise UnsupportedDegree(f"residues are implemented in degrees <= 2, got {e.degree}")
    pi = _uniformizer(v, uniformizer)
    F = e.field
    minus_one = -F.one
    words = defaultdict(int)
    for (m, letters), c in e.terms.items():
        partial = {(m, ()): c}
        for u in letters:
            exp = _expand_letter(u, v, pi, minus_one)
            step = defaultdict(int)
            for (m1, w1), c1 in partial.items():
                for c2, m2, w2 in exp:
                    step[(m1 + m2, w1 + w2)] += c1 * c2
            partial = {k: c for k, c in step.items() if c}
        for k, c in partial.items():
            words[k] += c
    sink = _lead_pi(words, minus_one)
    kappa = v.residue_ring
    terms = defaultdict(int)
    for (m, units), c in sink.items():
        if c:
            terms[(m, tuple(v.reduce(u) for u in units))] += c
    return TwistedMW(MWExpr(kappa, e.degree - 1, terms), _residue_label(v, uniformizer))


def residue_coordinates(e, v, uniformizer=None):
    """Residue computed on normal-form coordinates (independent of the rewriting route)."""
    if e.degree > 2:
        raise UnsupportedDegree(f"residues are implemented in degrees <= 2, got {e.degree}")
    pi = _uniformizer(v, uniformizer)
    F, n = e.field, e.degree
    kappa = v.residue_ring
    ents = []
    for a in _ideal_form(e).entries:
        k = v(a)
        if k % 2:
            ents.append(v.reduce(a / pi ** k))
    dw = witt_class_of(QuadForm(kappa, ents))
    if n <= 0:
        return MWNormalForm(kappa, n - 1, witt=dw)
    if n == 1:
        rank = sum(c * v(letters[0]) for (m, letters), c in e.terms.items() if m == 0)
        return MWNormalForm(kappa, 0, gw=GWClass(kappa, rank, dw))
    milnor = kappa.one
    for (m, letters), c in e.terms.items():
        if m == 0:
            milnor = milnor * tame_symbol(letters[0], letters[1], v) ** c
    return MWNormalForm(kappa, 1, milnor, dw)


# --- transfers --------------------------------------------------------------------------------

def transfer(nf, functional="trace", base=None):
    """Transfer a normal form of degree <= 1 along L = k[x]/(m) down to k."""
    L = nf.field
    if base is not None and base == L:
        return nf
    if nf.degree > 1:
        raise UnsupportedDegree("transfers are implemented in degrees <= 1")
    if L.kind not in ("extension", "finite"):
        raise UnsupportedExtension(f"{L} is not presented as a simple extension")
    k = L.base
    if nf.degree == 0:
        return MWNormalForm(k, 0, gw=scharlau_transfer(nf.gw, functional))
    w = scharlau_transfer(nf.witt, functional)
    if nf.degree < 0:
        return MWNormalForm(k, nf.degree, witt=w)
    return MWNormalForm(k, 1, k.elem(L.norm(nf.milnor.raw)), w)


# --- random expressions ----------------------------------------------------------------------

def random_expr(F, degree, rng, max_terms=3, max_eta=2):
    """Random expression of the given degree with small eta powers."""
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        m = rng.randint(max(0, -degree), max(0, -degree) + max_eta)
        k = degree + m
        letters = tuple(random_unit(F, rng) for _ in range(k))
        key = (m, letters)
        terms[key] = terms.get(key, 0) + rng.choice([-2, -1, 1, 1, 2])
    return MWExpr(F, degree, terms)
