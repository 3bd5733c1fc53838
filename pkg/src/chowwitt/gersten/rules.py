"""Coefficient rules: which group sits at a point, how it is generated, and its coordinates.

Every term of a truncated complex is presented as the subgroup of a
coordinate group ``prod Z/m_i`` (``m_i = 0`` meaning ``Z``) generated by a
finite list of elements.  Closed points use the coordinate vectors
themselves as generators; the generic point uses elements whose divisor
lies in the support.  Coordinates are faithful on the generated subgroup
(over Z in integral mode, after tensoring with Q in rational mode), which is
what makes the homology computation exact.
"""

from dataclasses import dataclass, field as dc_field
from enum import Enum
from itertools import combinations

from ..errors import UnsupportedCoefficientDegree, UnsupportedField
from ..mwk import MWExpr, normal_form, residue_coordinates
from ..qform import QuadForm
from ..scalars import QQ
from ..wittring import (WittClass, _finite_nonsquare, finite_witt_coordinates, finite_witt_moduli,
                        function_field_witt_coordinates, function_field_witt_moduli, qt_coordinates,
                        rational_witt_coordinates, rational_witt_moduli, second_residue)


class CoefficientRule(Enum):
    MILNOR_WITT_RATIONAL = "MilnorWittRational"
    WITT_MINUS = "WittMinus"
    MILNOR_ONLY = "MilnorOnly"
    WITT_SHEAF = "WittSheaf"

    @classmethod
    def parse(cls, text):
        if isinstance(text, cls):
            return text
        aliases = {"mw-rational": cls.MILNOR_WITT_RATIONAL, "witt-minus": cls.WITT_MINUS,
                   "milnor": cls.MILNOR_ONLY, "milnor-only": cls.MILNOR_ONLY, "witt": cls.WITT_SHEAF}
        for r in cls:
            aliases[r.value] = r
        if text not in aliases:
            raise ValueError(f"unknown coefficient rule {text!r}")
        return aliases[text]

    @property
    def default_coeff(self):
        from ..wittring import CoefficientRing
        return {"MilnorWittRational": CoefficientRing.RAT, "WittMinus": CoefficientRing.INT_HALF,
                "MilnorOnly": CoefficientRing.INT, "WittSheaf": CoefficientRing.INT}[self.value]

    @property
    def uses_witt(self):
        return self is not CoefficientRule.MILNOR_ONLY


@dataclass
class Term:
    """One point's summand: generators inside a coordinate group."""

    point: object
    p: int
    n: int
    twist_label: str
    generators: list
    elements: list
    coords: list            # one coordinate vector per generator
    coord_names: list
    moduli: list
    gen_tags: list          # "plus" / "minus"
    coord_tags: list        # "milnor" / "witt"
    touches: list = dc_field(default_factory=list)   # per generator: labels of points where it may ramify

    @property
    def r(self):
        return self.p - self.n

    @property
    def label(self):
        return (self.point.label, self.p, self.n, self.r)


# --- generating places -----------------------------------------------------------------------

def aux_primes(p):
    """Extra generic units used for SpecDVR(p): 2 and the least odd prime that is a nonsquare mod p."""
    from ..scalars.fields import is_prime
    from ..scalars.valuation import legendre
    q = 3
    while not (is_prime(q) and q != p and legendre(q, p) == -1):
        q += 2
    return sorted({2, q} - {p})


@dataclass
class Places:
    """Generic units: constants and the places (prime elements) the generic term may use."""

    field: object
    constants: list
    places: list            # (label, element)
    point_labels: set       # labels of closed points present in the complex


def generating_places(scheme, points, keep_two):
    K = scheme.function_field
    labels = {pt.label for pt in points}
    if scheme.is_arithmetic:
        primes = {int(pt.label) for pt in points}
        primes |= set(scheme.primes)
        if scheme.kind == "SpecDVR":
            primes |= set(aux_primes(scheme.prime))
        if not keep_two and 2 not in scheme.primes:
            primes.discard(2)
        places = [(str(p), QQ(p)) for p in sorted(primes)]
        return Places(K, [QQ.one, -QQ.one], places, labels)
    if scheme.kind == "SpecField":
        B = scheme.base
        consts = [B.one, -B.one] if B.order is None else [B.one, _finite_nonsquare(B)]
        return Places(K, consts, [], labels)
    B = scheme.base
    consts = [K.one, -K.one] if B.order is None else [K.one, K(_finite_nonsquare(B))]
    places = [(pt.label, pt.valuation.uniformizer) for pt in points if pt.valuation.kind == "poly"]
    return Places(K, consts, places, labels)


def _subset_units(pl, max_size=2):
    """Units c * (product of at most max_size places) with the labels they involve."""
    out = []
    for c in pl.constants:
        for k in range(max_size + 1):
            for sub in combinations(pl.places, k):
                a = c
                for _, x in sub:
                    a = a * x
                out.append((a, [lab for lab, _ in sub]))
    return out


def _is_formally_real(F):
    base = F.base if F.kind == "ratfunc" else F
    return base.kind == "rationals"


def _is_qt(F):
    return F.kind == "ratfunc" and F.base.kind == "rationals"


def _infinity_labels(scheme):
    return ["inf"] if scheme.kind == "P1" else []


# --- Witt-valued coordinates -------------------------------------------------------------------

def _generic_witt_coords(F, a, pl, integral):
    """Coordinates of <a> in the generic Witt group."""
    if integral:
        if F.kind == "rationals":
            odd = [int(lab) for lab, _ in pl.places if lab != "2"]
            return rational_witt_coordinates(_as_int(a), odd)
        if F.order is not None:
            return finite_witt_coordinates(F, [a])
        if F.kind == "ratfunc" and F.base.order is not None:
            return function_field_witt_coordinates(F, [_place_poly(x) for _, x in pl.places], [a])
        raise UnsupportedField(f"integral Witt coordinates over {F} are not available; use IntHalf or Rat")
    return _rational_witt_coords(WittClass.bracket(F, a), pl)


def _place_poly(x):
    from ..scalars.poly import Poly
    num, _ = x.raw
    return Poly._raw(x.field.base, num)


def _generic_witt_moduli(F, pl, integral):
    if not integral:
        return [0] * _rational_witt_dim(F, pl)
    if F.kind == "rationals":
        return rational_witt_moduli([int(lab) for lab, _ in pl.places if lab != "2"])
    if F.order is not None:
        return finite_witt_moduli(F)
    return function_field_witt_moduli(F, [_place_poly(x) for _, x in pl.places])


def _generic_witt_names(F, pl, integral):
    if not integral:
        if F.kind == "rationals":
            return ["sig"]
        if _is_qt(F):
            return ["sig_const"] + [f"sig_res_{lab}" for lab, _ in pl.places]
        return []
    if F.kind == "rationals":
        odd = [lab for lab, _ in pl.places if lab != "2"]
        names = ["sign", "res_2"]
        for p in odd:
            names.extend(f"res_{p}_{i}" for i in range(len(finite_witt_moduli(_gf(int(p))))))
        return names
    if F.order is not None:
        return [f"w{i}" for i in range(len(finite_witt_moduli(F)))]
    names = [f"first_inf_{i}" for i in range(len(finite_witt_moduli(F.base)))]
    for lab, x in pl.places:
        d = _place_poly(x).degree
        k = 1 if (F.base.order ** d) % 4 == 3 else 2
        names.extend(f"res_{lab}_{i}" for i in range(k))
    return names


def _gf(p):
    from ..scalars import GF
    return GF(p)


def _rational_witt_dim(F, pl):
    if F.kind == "rationals":
        return 1
    if _is_qt(F):
        return 1 + len(pl.places)
    return 0


def _rational_witt_coords(w, pl):
    """Signature coordinates of a Witt class over Q or Q(t) (empty otherwise)."""
    F = w.field
    if F.kind == "rationals":
        return [w.signature()]
    if _is_qt(F):
        const, res = qt_coordinates(w.rep)
        out = [const.signature()]
        for lab, x in pl.places:
            a = -x.raw[0][0]
            out.append(res[a].signature() if a in res else 0)
        return out
    return []


def _as_int(a):
    r = a.raw
    if r.denominator != 1:
        raise ValueError(f"{a} is not an integer")
    return r.numerator


def _closed_witt_coords(point, w, integral):
    kappa = point.residue_field
    if integral:
        if kappa.order is None:
            raise UnsupportedField(f"W({kappa}) is not finitely generated; use IntHalf or Rat")
        return finite_witt_coordinates(kappa, list(w.entries))
    if kappa.order is None:
        return [w.signature()]
    return []


def _closed_witt_layout(point, integral):
    kappa = point.residue_field
    if point.valuation.residue_characteristic == 2:
        return [], []
    if integral:
        if kappa.order is None:
            raise UnsupportedField(f"W({kappa}) is not finitely generated; use IntHalf or Rat")
        m = finite_witt_moduli(kappa)
        return [f"w{i}" for i in range(len(m))], m
    if kappa.order is None:
        return ["sig"], [0]
    return [], []


# --- rule implementations --------------------------------------------------------------------------

class _Rule:
    """Shared plumbing; subclasses fill in the three hooks."""

    def __init__(self, scheme, twist, coeff):
        from ..wittring import CoefficientRing
        self.scheme = scheme
        self.twist = twist
        self.coeff = coeff
        # integral: coordinates faithful over Z; exact: no torsion is dropped by the coordinates
        self.integral = coeff is CoefficientRing.INT
        self.exact = coeff is not CoefficientRing.RAT

    def twist_unit(self, point):
        return self.twist.transition_unit(self.scheme, point)


class WittRule(_Rule):
    """M_r = W for every r (WittSheaf over Z, WittMinus after inverting 2)."""

    def generic(self, pl, r):
        F = pl.field
        gens, elems, coords, touches = [], [], [], []
        inf = _infinity_labels(self.scheme)
        for a, labs in _subset_units(pl):
            gens.append(f"<{a}>")
            elems.append(a)
            coords.append(_generic_witt_coords(F, a, pl, self.integral))
            touches.append(labs + inf)
        names = _generic_witt_names(F, pl, self.integral)
        mods = _generic_witt_moduli(F, pl, self.integral)
        return gens, elems, coords, names, mods, ["minus"] * len(gens), ["witt"] * len(names), touches

    def closed_layout(self, point, r):
        names, mods = _closed_witt_layout(point, self.integral)
        return names, mods, ["witt"] * len(names)

    def residue(self, a, point, r):
        v = point.valuation
        if v.residue_characteristic == 2:
            return []
        u = self.twist_unit(point)
        x = WittClass.bracket(v.field, a if u is None else a * u)
        w = second_residue(x, v).underlying
        return _closed_witt_coords(point, w, self.integral)


class MilnorRule(_Rule):
    """M_r = K^M_r, tracked by valuations; no quadratic-form arithmetic at all."""

    def generic(self, pl, r):
        F = pl.field
        empty = [], [], [], [], [], [], [], []
        if r <= -1:
            return empty
        if r == 0:
            return ["1"], [1], [[1]], ["rank"], [0], ["plus"], ["milnor"], [[]]
        if r == 1 and F.order is None:
            gens = [f"{{{lab}}}" for lab, _ in pl.places]
            elems = [x for _, x in pl.places]
            coords = [[int(i == j) for i in range(len(elems))] for j in range(len(elems))]
            names = [f"v_{lab}" for lab, _ in pl.places]
            inf = _infinity_labels(self.scheme)
            touches = [[lab] + inf for lab, _ in pl.places]
            return gens, elems, coords, names, [0] * len(names), ["plus"] * len(gens), ["milnor"] * len(names), touches
        # K_1 of a finite field and K_2 of Q, F_q, F_q(t) are torsion
        if self.exact or r > 2 or _is_qt(F):
            raise UnsupportedCoefficientDegree(f"K^M_{r}({F}) is only tracked rationally here")
        return empty

    def closed_layout(self, point, r):
        if r == 0:
            return ["rank"], [0], ["milnor"]
        if r < 0:
            return [], [], []
        if point.residue_field.order is None or self.exact or r > 1:
            raise UnsupportedCoefficientDegree(f"K^M_{r} at {point.label} is out of range")
        return [], [], []

    def residue(self, u, point, r):
        if r - 1 != 0:
            return []
        return [point.valuation(u)]


def _mw_touch(labs, scheme):
    return labs + _infinity_labels(scheme)


class MilnorWittRule(_Rule):
    """M_r = K^MW_r (x) Q, split into the plus part (Milnor) and the minus part (Witt)."""

    def __init__(self, scheme, twist, coeff):
        super().__init__(scheme, twist, coeff)
        if self.exact:
            raise UnsupportedCoefficientDegree("the Milnor-Witt rule is rational; use Rat")

    def generic(self, pl, r):
        F = pl.field
        if r > 2:
            raise UnsupportedCoefficientDegree(f"K^MW_{r} needs normal forms beyond degree 2")
        if r == 2 and F.kind == "ratfunc":
            if _is_qt(F):
                raise UnsupportedCoefficientDegree("K^MW_2(Q(t)) (x) Q is not finitely presented here")
        real = _is_formally_real(F)
        h = MWExpr.hyperbolic(F)
        minus_one = -F.one
        gens, elems, tags, touches = [], [], [], []

        def add(expr, tag, labs):
            gens.append(repr(expr))
            elems.append(expr)
            tags.append(tag)
            touches.append(_mw_touch(labs, self.scheme))

        units = [(minus_one, [])] + [(x, [lab]) for lab, x in pl.places]
        if r in (1, 2):
            for u, labs in units:
                sym = MWExpr.symbol(F, u) if r == 1 else MWExpr.symbol(F, minus_one, u)
                if r == 1:
                    add(h * sym, "plus", labs)
                if real:
                    add(MWExpr.symbol(F, minus_one).eta_times(1) * sym * -1, "minus", labs)
        elif r == 0:
            add(h, "plus", [])
            if real:
                for a, labs in _subset_units(pl):
                    add(MWExpr.bracket(F, a) - MWExpr.bracket(F, -a), "minus", labs)
        elif real:
            for a, labs in _subset_units(pl):
                add(MWExpr.bracket(F, a).eta_times(-r), "minus", labs)
        names, tags_c = self._generic_names(pl, r)
        coords = [self._generic_coords(e, pl, r) for e in elems]
        return gens, elems, coords, names, [0] * len(names), tags, tags_c, touches

    def _generic_names(self, pl, r):
        F = pl.field
        names, tags = [], []
        if r == 0:
            names.append("rank")
            tags.append("milnor")
        if r == 1:
            names.extend(f"v_{lab}" for lab, _ in pl.places)
            tags.extend("milnor" for _ in pl.places)
        w = _generic_witt_names(F, pl, False)
        return names + w, tags + ["witt"] * len(w)

    def _generic_coords(self, e, pl, r):
        F = pl.field
        real = _is_formally_real(F)
        if r == 2 and not real:
            return []
        nf = normal_form(e)
        out = []
        if r == 0:
            out.append(nf.gw.rank)
            w = nf.gw.witt
        elif r < 0:
            w = nf.witt
        else:
            if r == 1:
                out.extend(_valuation_at(nf.milnor, x) for _, x in pl.places)
            w = nf.witt
        if real:
            out.extend(_rational_witt_coords(w, pl))
        return out

    def closed_layout(self, point, r):
        kappa = point.residue_field
        two = point.valuation.residue_characteristic == 2
        if r == 0:
            if kappa.order is None:
                return ["rank", "sig"], [0, 0], ["milnor", "witt"]
            return ["rank"], [0], ["milnor"]
        if r < 0:
            if kappa.order is None and not two:
                return ["sig"], [0], ["witt"]
            return [], [], []
        if kappa.order is None:
            raise UnsupportedCoefficientDegree(f"K^MW_{r}({kappa}) (x) Q is not finitely presented here")
        if r > 2:
            raise UnsupportedCoefficientDegree(f"K^MW_{r} needs normal forms beyond degree 2")
        return [], [], []

    def residue(self, e, point, r):
        v = point.valuation
        kappa = point.residue_field
        r_closed = r - 1
        if v.residue_characteristic == 2:
            if r_closed == 0:
                return [sum(c * v(letters[0]) for (m, letters), c in e.terms.items() if m == 0)]
            return []
        if r_closed > 0 and kappa.order is not None:
            return []
        if r_closed < 0 and kappa.order is not None:
            return []
        u = self.twist_unit(point)
        if u is not None:
            e = e * MWExpr.bracket(e.field, u)
        nf = residue_coordinates(e, v)
        if r_closed == 0:
            out = [nf.gw.rank]
            if kappa.order is None:
                out.append(nf.gw.witt.signature())
            return out
        return [nf.witt.signature()]


def _valuation_at(x, place):
    from ..scalars.valuation import Valuation
    F = x.field
    if F.kind == "rationals":
        return Valuation.at_prime(_as_int(place))(x)
    return Valuation.at_poly(F, _place_poly(place))(x)


def make_rule(rule, scheme, twist, coeff):
    rule = CoefficientRule.parse(rule)
    if rule in (CoefficientRule.WITT_SHEAF, CoefficientRule.WITT_MINUS):
        return WittRule(scheme, twist, coeff)
    if rule is CoefficientRule.MILNOR_ONLY:
        return MilnorRule(scheme, twist, coeff)
    return MilnorWittRule(scheme, twist, coeff)
