"""Reciprocity on the projective line: residues summed over all closed points.

Finite places contribute the transfer (geometric functional) of the residue
taken with the monic uniformizer.  The point at infinity is written in the
basis attached to 1/t; to compare it with the finite places it is rebased to
the uniformizer -1/t, i.e. multiplied by <-1>.
"""

from ..mwk import MWExpr, MWNormalForm, residue_coordinates, transfer
from ..scalars.valuation import Valuation, places_of
from ..wittring import GWClass


def _places(e):
    seen = {}
    for (m, letters), c in e.terms.items():
        for u in letters:
            for v in places_of(u):
                seen[v] = v
    return list(seen)


def reciprocity_terms(e):
    """(label, contribution in GW(k)) for every closed point where e ramifies, infinity last."""
    F = e.field
    k = F.base
    out = []
    for v in _places(e):
        r = residue_coordinates(e, v)
        out.append((v.label, transfer(r, "geometric") if r.field != k else r))
    vinf = Valuation.at_infinity(F)
    r = residue_coordinates(e, vinf).times_unit(-k.one)
    out.append(("inf", r))
    return out


def reciprocity_defect(e):
    """Sum of the contributions; zero exactly when reciprocity holds for e."""
    if e.degree != 1:
        raise ValueError("reciprocity is checked on degree-1 expressions")
    k = e.field.base
    total = MWNormalForm(k, 0, gw=GWClass.zero(k))
    for _, x in reciprocity_terms(e):
        total = total + x
    return total


def random_supported_symbol(F, places, rng, max_terms=2):
    """Random degree-1 expression in units built from the given places and constants."""
    k = F.base
    consts = [c for c in (k.elem(k.coerce_raw(a)) for a in (1, -1, 2, 3)) if not c.is_zero()]
    expr = MWExpr.zero(F, 1)
    for _ in range(rng.randint(1, max_terms)):
        u = F(rng.choice(consts))
        for _ in range(rng.randint(1, 2)):
            u = u * F(rng.choice(places)) ** rng.choice([-1, 1, 1, 2])
        term = MWExpr.symbol(F, u)
        if rng.random() < 0.5:
            term = MWExpr.bracket(F, F(rng.choice(consts)) * F(rng.choice(places))) * term
        expr = expr + term * rng.choice([-1, 1, 2])
    return expr
