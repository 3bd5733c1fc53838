import random

import pytest

from chowwitt.errors import ResidueCharacteristicTwo, UnsupportedDegree, UnsupportedField
from chowwitt.mwk import (MWExpr, MilnorK2, equal, eta_shift, from_gw, normal_form, random_expr, residue,
                          residue_coordinates, to_gw, transfer)
from chowwitt.qform import QuadForm, hilbert_symbol
from chowwitt.scalars import GF, QQ
from chowwitt.scalars.parse import parse_element, parse_field
from chowwitt.scalars.valuation import Valuation
from chowwitt.wittring import GWClass, WittClass, group_structure, random_unit, scharlau_transfer, witt_class_of

SEED = 2024


def sym(F, *units):
    return MWExpr.symbol(F, *(F(u) for u in units))


# --- examples ------------------------------------------------------------------------------------

def test_normal_form_examples():
    nf = normal_form(sym(QQ, 4))
    assert nf.milnor == QQ(4) and nf.witt.is_zero()
    # [4] = [2] + [2] + eta[2][2]
    expanded = sym(QQ, 2) * 2 + MWExpr.eta(QQ) * sym(QQ, 2, 2)
    assert normal_form(expanded) == nf
    for spec in ("Q", "Fp:5", "Fq:9", "Fp:3(t)"):
        F = parse_field(spec)
        assert normal_form(MWExpr.eta(F) * MWExpr.hyperbolic(F)).is_zero()
    assert normal_form(sym(GF(5), 2, 4)).is_zero()


def test_to_gw_examples():
    assert to_gw(MWExpr.bracket(QQ, QQ(4))) == GWClass.one(QQ)
    assert to_gw(MWExpr.bracket(GF(5), GF(5)(2))) == GWClass.bracket(GF(5), 2)
    assert to_gw(MWExpr.zero(QQ, 0)).is_zero()
    with pytest.raises(UnsupportedDegree):
        to_gw(sym(QQ, 2))


def test_eta_shift_examples():
    F3, F5 = GF(3), GF(5)
    assert eta_shift(MWExpr.bracket(F3, F3(2))) == witt_class_of(QuadForm(F3, [F3(2)]))
    x = MWExpr.bracket(F5, F5(2))
    assert eta_shift(MWExpr.eta(F5) * x) == eta_shift(x) == witt_class_of(QuadForm(F5, [F5(2)]))
    rng = random.Random(SEED)
    for _ in range(20):
        y = random_expr(QQ, rng.randint(-2, 0), rng)
        assert eta_shift(MWExpr.hyperbolic(QQ) * y).is_zero()
    with pytest.raises(UnsupportedDegree):
        eta_shift(sym(QQ, 3))


def test_normal_form_errors():
    with pytest.raises(UnsupportedDegree):
        normal_form(sym(QQ, 2, 3, 5))
    with pytest.raises(UnsupportedField):
        normal_form(sym(parse_field("Q(t)"), 2, 3))
    assert equal(sym(QQ, 2, 3, 5), sym(QQ, 2, 3, 5)) is None
    # over Q(t) a residue at a point of degree >= 2 would need Witt groups of number fields
    Qt = parse_field("Q(t)")
    with pytest.raises(UnsupportedField):
        normal_form(MWExpr.symbol(Qt, parse_element(Qt, "t^2-2")))
    assert normal_form(MWExpr.symbol(Qt, parse_element(Qt, "t-2"))).milnor == parse_element(Qt, "t-2")


def test_residue_examples():
    Qt = parse_field("Q(t)")
    t = parse_element(Qt, "t")
    v = Valuation.at_poly(Qt, (0, 1))
    assert to_gw(residue(MWExpr.symbol(Qt, t), v, t).expr) == GWClass.one(QQ)
    assert normal_form(residue(sym(Qt, 2), v).expr).is_zero()
    F = parse_field("Fp:5(t)")
    t5 = parse_element(F, "t")
    r = residue(MWExpr.symbol(F, t5, F(2)), Valuation.at_poly(F, (0, 1)), t5)
    assert normal_form(r.expr) == normal_form(sym(GF(5), 2))
    with pytest.raises(ResidueCharacteristicTwo):
        residue(sym(QQ, 2), Valuation.at_prime(2))


def test_transfer_examples():
    F9, F3 = GF(9), GF(3)
    one = normal_form(MWExpr.one(F9))
    out = transfer(one)
    assert out.field == F3 and out.gw == scharlau_transfer(GWClass.one(F9))
    # trace Gram matrix of F_9/F_3 in the basis 1, g
    g = F9.generator()
    gram = [[F3.elem(F9.trace((a * b).raw)) for b in (F9.one, g)] for a in (F9.one, g)]
    from chowwitt.qform import diagonalize
    assert out.gw == GWClass.of_form(diagonalize(gram, F3))
    assert transfer(one, base=F9) == one
    # the norm of F_9/F_3 is z -> z^(1+3)
    for z in F9.elements():
        if not z.is_zero():
            milnor = transfer(normal_form(MWExpr.symbol(F9, z))).milnor
            assert F9.elem(F9.embed_raw(milnor)) == z ** 4


def test_transfer_is_additive():
    rng = random.Random(SEED + 9)
    L = GF(25)
    for n in (-1, 0, 1):
        for _ in range(30):
            x, y = normal_form(random_expr(L, n, rng)), normal_form(random_expr(L, n, rng))
            assert transfer(x + y) == transfer(x) + transfer(y)


# --- relation soundness ------------------------------------------------------------------------

def _random_rewrite(e, rng):
    """Apply one of Morel's relations somewhere in e; the class must not change."""
    F, n = e.field, e.degree
    terms = dict(e.terms)
    choice = rng.randrange(4)
    with_letters = [k for k in terms if k[1]]
    if choice == 0 and with_letters:
        # [uv] = [u] + [v] + eta[u][v]
        key = rng.choice(with_letters)
        c = terms.pop(key)
        m, letters = key
        i = rng.randrange(len(letters))
        a = random_unit(F, rng)
        b = letters[i] / a
        head, tail = letters[:i], letters[i + 1:]
        # separate summands: a and b may coincide
        out = MWExpr(F, n, terms)
        for key2 in ((m, head + (a,) + tail), (m, head + (b,) + tail), (m + 1, head + (a, b) + tail)):
            out = out + MWExpr(F, n, {key2: c})
        return out
    if choice == 1 and any(len(k[1]) >= 2 for k in terms):
        # [a][b] = -<-1>[b][a] = -[b][a] - eta[-1][b][a]
        key = rng.choice([k for k in terms if len(k[1]) >= 2])
        c = terms.pop(key)
        m, letters = key
        i = rng.randrange(len(letters) - 1)
        head, tail = letters[:i], letters[i + 2:]
        a, b = letters[i], letters[i + 1]
        return (MWExpr(F, n, terms) + MWExpr(F, n, {(m, head + (b, a) + tail): -c})
                + MWExpr(F, n, {(m + 1, head + (-F.one, b, a) + tail): -c}))
    coef = rng.choice([-2, -1, 1, 2])
    if choice == 2:
        # add a multiple of a Steinberg symbol [u][1-u]
        u = random_unit(F, rng)
        while u == F.one:
            u = random_unit(F, rng)
        k = max(n, 2)
        m = k - n
        others = tuple(random_unit(F, rng) for _ in range(k - 2))
        pos = rng.randrange(k - 1)
        letters = others[:pos] + (u, F.one - u) + others[pos:]
        return e + MWExpr(F, n, {(m, letters): coef})
    # add a multiple of eta * h * (random symbol)
    k = max(n + 1, 0)
    filler = MWExpr.symbol(F, *(random_unit(F, rng) for _ in range(k)))
    killed = MWExpr.eta(F) * MWExpr.hyperbolic(F) * filler
    killed = killed.eta_times(killed.degree - n) if killed.degree > n else killed
    return e + killed * coef


def test_relation_soundness():
    rng = random.Random(SEED)
    cases = [("Q", (-1, 0, 1, 2)), ("Fp:5", (-1, 0, 1, 2)), ("Fq:9", (0, 1, 2)), ("Fp:3(t)", (-1, 0, 1)),
             ("Fp:5(t)", (0, 1))]
    checked = 0
    while checked < 500:
        spec, degrees = cases[checked % len(cases)]
        F = parse_field(spec)
        e = random_expr(F, rng.choice(degrees), rng)
        e2 = _random_rewrite(e, rng)
        assert e2.degree == e.degree
        assert normal_form(e) == normal_form(e2), (e, e2)
        checked += 1


def test_normal_form_is_additive_and_eta_linear():
    rng = random.Random(SEED + 1)
    for spec in ("Q", "Fp:5", "Fp:3(t)"):
        F = parse_field(spec)
        for _ in range(40):
            n = rng.choice((-1, 0, 1))
            x, y = random_expr(F, n, rng), random_expr(F, n, rng)
            assert normal_form(x + y) == normal_form(x) + normal_form(y)
            if n <= 0:
                assert eta_shift(x.eta_times()) == eta_shift(x)


def test_to_gw_is_a_ring_map_with_inverse():
    rng = random.Random(SEED + 2)
    for spec in ("Q", "Fp:5", "Fq:9"):
        F = parse_field(spec)
        for _ in range(40):
            x, y = random_expr(F, 0, rng), random_expr(F, 0, rng)
            assert to_gw(x * y) == to_gw(x) * to_gw(y)
            assert to_gw(x + y) == to_gw(x) + to_gw(y)
            assert to_gw(from_gw(to_gw(x))) == to_gw(x)
        u = random_unit(F, rng)
        assert to_gw(MWExpr.bracket(F, u)).rank == 1


# --- pullback square -------------------------------------------------------------------------

@pytest.mark.parametrize("spec,degrees", [("Q", (1, 2)), ("Fp:5", (1, 2)), ("Fq:9", (1, 2)), ("Fp:3(t)", (1,))])
def test_pullback_square_consistency(spec, degrees):
    F = parse_field(spec)
    rng = random.Random(SEED + 3)
    for _ in range(60):
        nf = normal_form(random_expr(F, rng.choice(degrees), rng))
        assert nf.pullback_consistent()


def test_milnor_k2_hilbert_coordinates_match_direct_symbols():
    rng = random.Random(SEED + 4)
    for _ in range(100):
        a, b = QQ(rng.choice([-1, 1]) * rng.randint(1, 60)), QQ(rng.choice([-1, 1]) * rng.randint(1, 60))
        k2 = MilnorK2.of_symbol(QQ, a, b)
        for place, s in k2.hilbert_symbols().items():
            assert s == hilbert_symbol(a.raw, b.raw, place)


@pytest.mark.parametrize("q", [3, 5, 7, 9])
def test_degree_two_vanishes_over_finite_fields(q):
    F = GF(q)
    units = [x for x in F.elements() if not x.is_zero()]
    for a in units:
        for b in units:
            nf = normal_form(MWExpr.symbol(F, a, b))
            assert nf.is_zero()
            # the rewriting route agrees: all residues of a constant symbol vanish trivially
    # I^2 = 0: products of two elements of I are Witt-trivial
    rng = random.Random(SEED + q)
    gens = [WittClass.bracket(F, u) - WittClass.one(F) for u in units]
    for _ in range(30):
        assert (rng.choice(gens) * rng.choice(gens)).is_zero()
    assert group_structure(F).order == 4


# --- residues -------------------------------------------------------------------------------

def _random_place(F, rng):
    if F.kind == "rationals":
        return Valuation.at_prime(rng.choice([3, 5, 7, 11]))
    if rng.random() < 0.25:
        return Valuation.at_infinity(F)
    return Valuation.at_poly(F, (F.base.elem(F.base.random_raw(rng)).raw, F.base.one_raw))


def _expr_with_places(F, v, n, rng):
    """Random expression whose letters mix units and powers of the uniformizer."""
    terms = {}
    for _ in range(rng.randint(1, 3)):
        m = rng.randint(max(0, -n), max(0, -n) + 1)
        k = n + m
        letters = tuple(random_unit(F, rng) * v.uniformizer ** rng.randint(-1, 2) for _ in range(k))
        terms[(m, letters)] = terms.get((m, letters), 0) + rng.choice([-1, 1, 2])
    return MWExpr(F, n, terms)


@pytest.mark.parametrize("spec,degrees", [("Q", (0, 1, 2)), ("Fp:3(t)", (0, 1)), ("Fp:5(t)", (0, 1))])
def test_two_residue_routes_agree(spec, degrees):
    F = parse_field(spec)
    rng = random.Random(SEED + 5)
    for _ in range(60):
        v = _random_place(F, rng)
        e = _expr_with_places(F, v, rng.choice(degrees), rng)
        assert residue(e, v).normal_form() == residue_coordinates(e, v)


@pytest.mark.parametrize("spec", ["Q", "Fp:3(t)", "Fp:5(t)"])
def test_residue_twist_rebasing(spec):
    F = parse_field(spec)
    rng = random.Random(SEED + 6)
    for _ in range(100):
        v = _random_place(F, rng)
        e = _expr_with_places(F, v, rng.choice((0, 1)), rng)
        u = random_unit(F, rng)
        while v(u) != 0:
            u = random_unit(F, rng)
        moved = residue(e, v, u * v.uniformizer)
        assert moved.normal_form() == residue(e, v).rebase(v.reduce(u)).normal_form()


@pytest.mark.parametrize("spec", ["Q", "Fp:3(t)"])
def test_residue_projection_formula_and_unit_symbols(spec):
    F = parse_field(spec)
    rng = random.Random(SEED + 7)
    for _ in range(60):
        v = _random_place(F, rng)
        u = random_unit(F, rng)
        while v(u) != 0:
            u = random_unit(F, rng)
        e = _expr_with_places(F, v, rng.choice((0, 1)), rng)
        lhs = residue(MWExpr.bracket(F, u) * e, v).normal_form()
        rhs = residue(e, v).rebase(v.reduce(u)).normal_form()
        assert lhs == rhs
        letters = [random_unit(F, rng) for _ in range(2 if F.kind == "rationals" else 1)]
        if all(v(x) == 0 for x in letters):
            assert residue(MWExpr.symbol(F, *letters), v).normal_form().is_zero()


def _lift(v, x):
    """A unit of the valued field reducing to x."""
    F = v.field
    if F.kind == "rationals":
        return QQ(x.raw)
    return F(x.raw) if v.residue_field == F.base else None


@pytest.mark.parametrize("spec", ["Q", "Fp:5(t)"])
def test_residue_is_left_inverse_to_multiplication_by_pi(spec):
    F = parse_field(spec)
    rng = random.Random(SEED + 8)
    done = 0
    while done < 100:
        v = _random_place(F, rng)
        if v.residue_field.kind == "finite" and F.kind == "ratfunc" and v.residue_field != F.base:
            continue
        kappa = v.residue_field
        y = random_expr(kappa, rng.choice((0, 1)), rng)
        lifted = MWExpr(F, y.degree, {(m, tuple(_lift(v, u) for u in letters)): c
                                      for (m, letters), c in y.terms.items()})
        out = residue(MWExpr.symbol(F, v.uniformizer) * lifted, v)
        assert out.normal_form() == normal_form(y)
        done += 1


# --- serialization --------------------------------------------------------------------------

@pytest.mark.parametrize("spec", ["Q", "Fp:5", "Fq:9", "Fp:3(t)", "Q(t)"])
def test_expression_json_round_trip(spec):
    F = parse_field(spec)
    rng = random.Random(SEED)
    for _ in range(30):
        e = random_expr(F, rng.randint(-1, 2), rng)
        assert MWExpr.from_json(F, e.to_json()) == e
        assert MWExpr.parse(F, repr(e), e.degree) == e if e.terms else True


def test_parse_literal():
    e = MWExpr.parse(QQ, "eta^1*[2][3] - 2*[5]")
    assert e.degree == 1
    assert e == MWExpr(QQ, 1, {(1, (QQ(2), QQ(3))): 1, (0, (QQ(5),)): -2})
