import random
from fractions import Fraction

import pytest
import sympy

from chowwitt.errors import DegreeBoundExceeded, EvenCharacteristic, ParseError, ZeroPolynomial
from chowwitt.scalars import GF, QQ, Poly, factor, intmat, is_prime, monic_irreducibles
from chowwitt.scalars.parse import field_spec, parse_element, parse_field, parse_poly
from chowwitt.scalars.valuation import Valuation, legendre

SEED = 1234
FIELD_SPECS = ["Fp:3", "Fp:7", "Fq:9", "Fq:25", "Q", "Fp:3(t)", "Fq:9(t)", "Q(t)"]


def random_element(F, rng):
    if F.kind == "rationals":
        return QQ(Fraction(rng.randint(-50, 50), rng.randint(1, 20)))
    if F.kind == "ratfunc":
        num = [F.base.elem(_base_raw(F.base, rng)) for _ in range(rng.randint(1, 3))]
        den = [F.base.elem(_base_raw(F.base, rng)) for _ in range(rng.randint(1, 2))] + [F.base.one]
        return F(Poly(F.base, num)) / F(Poly(F.base, den))
    return F.elem(F.random_raw(rng))


def _base_raw(k, rng):
    if k.kind == "rationals":
        return Fraction(rng.randint(-9, 9), rng.randint(1, 4))
    return k.random_raw(rng)


# --- parsing -------------------------------------------------------------------------------------

@pytest.mark.parametrize("spec", FIELD_SPECS)
def test_field_spec_round_trip(spec):
    assert field_spec(parse_field(spec)) == spec


@pytest.mark.parametrize("bad", ["Fp:4", "Fq:6", "R", "Q(s)", "Fp:"])
def test_bad_field_specs(bad):
    with pytest.raises(ParseError):
        parse_field(bad)


def test_finite_field_descriptor_data():
    F = parse_field("Fq:9")
    assert (F.characteristic, F.order) == (3, 9)
    assert parse_field("Q(t)").characteristic == 0
    assert parse_field("Fq:9(t)").characteristic == 3


# --- field axioms --------------------------------------------------------------------------------

@pytest.mark.parametrize("spec", FIELD_SPECS)
def test_field_axioms_on_random_triples(spec):
    F = parse_field(spec)
    rng = random.Random(SEED)
    for _ in range(200):
        x, y, z = (random_element(F, rng) for _ in range(3))
        assert (x + y) + z == x + (y + z)
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        assert x + y == y + x and x * y == y * x
        assert x - x == F.zero
        if not x.is_zero():
            assert x * x.inverse() == F.one


def test_rational_payload_is_canonical():
    x = QQ(Fraction(6, -4))
    assert x.raw == Fraction(-3, 2) and x.raw.denominator > 0


def test_rational_function_denominator_is_monic():
    F = parse_field("Fp:5(t)")
    x = parse_element(F, "(t+1)/(2*t^2+2)")
    den = x.raw[1]
    assert den[-1] == F.base.one_raw


# --- factorization -------------------------------------------------------------------------------

def _expand(lead, factors):
    out = None
    for f, m in factors:
        term = f ** m
        out = term if out is None else out * term
    F = factors[0][0].field if factors else None
    return out * Poly(F, [lead]) if out is not None else None


def test_factor_examples():
    F3, F5 = GF(3), GF(5)
    assert factor(parse_poly(F3, "t^2+1")) == (1, [(parse_poly(F3, "t^2+1"), 1)])
    _, fs = factor(parse_poly(QQ, "t^2-1"))
    assert sorted(str(f) for f, _ in fs) == ["t+1", "t-1"]
    _, fs = factor(parse_poly(F5, "t^3+t"))
    assert sorted(str(f) for f, _ in fs) == ["t", "t+2", "t+3"]


def _roots_brute(F, f):
    return [a for a in F.elements() if f(a).is_zero()]


@pytest.mark.parametrize("q", [3, 5, 9])
def test_factor_multiplicative_and_irreducible_over_finite_fields(q):
    F = GF(q)
    rng = random.Random(SEED + q)
    for _ in range(100):
        coeffs = [F.elem(F.random_raw(rng)) for _ in range(rng.randint(1, 6))] + [F.one]
        f = Poly(F, coeffs)
        lead, fs = factor(f)
        assert _expand(lead, fs) == f
        for g, _ in fs:
            assert g.lead() == F.one_raw or g.lead() == F.one
            if g.degree >= 2:
                # linear-factor oracle: an irreducible factor of degree >= 2 has no roots
                assert not _roots_brute(F, g)
        # every root found by brute force shows up as a linear factor
        linear = {str(g) for g, _ in fs if g.degree == 1}
        for a in _roots_brute(F, f):
            assert str(Poly(F, [-a, F.one])) in linear


def test_factor_over_q_matches_sympy():
    rng = random.Random(SEED)
    t = sympy.symbols("t")
    for _ in range(100):
        coeffs = [rng.randint(-6, 6) for _ in range(rng.randint(2, 7))]
        if not any(coeffs[1:]):
            coeffs[-1] = 1
        f = Poly(QQ, coeffs)
        if f.degree < 1:
            continue
        lead, fs = factor(f)
        assert _expand(lead, fs) == f
        expected = sympy.factor_list(sum(c * t ** i for i, c in enumerate(coeffs)), t)[1]
        ours = sorted((g.degree, m) for g, m in fs)
        theirs = sorted((sympy.degree(g, t), m) for g, m in expected)
        assert ours == theirs


def test_factor_errors():
    with pytest.raises(ZeroPolynomial):
        factor(Poly(QQ, []))
    with pytest.raises(DegreeBoundExceeded):
        factor(Poly(QQ, [1] * 10 + [1]), bound=8)


def _necklace(q, d):
    return sum(sympy.mobius(d // k) * q ** k for k in sympy.divisors(d)) // d


@pytest.mark.parametrize("q,D", [(2, 4), (3, 3), (5, 2), (9, 2), (7, 2)])
def test_irreducible_count_against_two_oracles(q, D):
    F = GF(q)
    # oracle 1: Gauss's necklace formula
    for d in range(1, D + 1):
        assert len(monic_irreducibles(F, d)) == _necklace(q, d)
    # oracle 2: t^(q^D) - t is the product of the monic irreducibles of degree dividing D
    big = Poly(F, [F.zero, -F.one] + [F.zero] * (q ** D - 2) + [F.one])
    _, fs = factor(big)
    assert all(m == 1 for _, m in fs)
    by_degree = {}
    for g, _ in fs:
        by_degree[g.degree] = by_degree.get(g.degree, 0) + 1
    assert by_degree == {d: _necklace(q, d) for d in range(1, D + 1) if D % d == 0}


# --- Legendre symbol -----------------------------------------------------------------------------

def test_legendre_examples():
    assert legendre(GF(7)(2)) == 1
    assert legendre(GF(3)(2)) == -1
    assert all(legendre(GF(p)(1)) == 1 for p in (3, 5, 7, 11, 13))
    assert legendre(GF(5)(0)) == 0
    with pytest.raises(EvenCharacteristic):
        legendre(1, 2)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 101])
def test_legendre_multiplicative_and_matches_square_table(p):
    squares = {x * x % p for x in range(1, p)}
    rng = random.Random(SEED + p)
    for _ in range(100):
        a, b = rng.randrange(p), rng.randrange(p)
        assert legendre(a, p) * legendre(b, p) == legendre(a * b % p, p)
        assert legendre(a, p) == (0 if a == 0 else (1 if a in squares else -1))


# --- valuations ----------------------------------------------------------------------------------

def test_valuation_examples():
    assert Valuation.at_prime(2)(QQ(12)) == 2
    F = parse_field("Fp:3(t)")
    assert Valuation.at_poly(F, (1, 0, 1))(parse_element(F, "(t^2+1)/t")) == 1
    assert Valuation.at_prime(5)(QQ(0)) == float("inf")


def test_uniformizer_and_residue_fields():
    F = parse_field("Fp:3(t)")
    v = Valuation.at_poly(F, (1, 0, 1))
    assert v(v.uniformizer) == 1 and v.residue_field.order == 9
    vinf = Valuation.at_infinity(F)
    assert vinf(vinf.uniformizer) == 1
    G = parse_field("Q(t)")
    w = Valuation.at_poly(G, (-2, 1))
    assert w.residue_field == QQ
    assert Valuation.at_prime(7).residue_field.order == 7


@pytest.mark.parametrize("spec,place", [("Q", 2), ("Q", 3), ("Fp:3(t)", (0, 1)), ("Fp:5(t)", (2, 0, 1)),
                                        ("Fp:3(t)", "inf"), ("Q(t)", (1, 1))])
def test_valuation_is_additive_and_ultrametric(spec, place):
    F = parse_field(spec)
    if place == "inf":
        v = Valuation.at_infinity(F)
    elif F.kind == "rationals":
        v = Valuation.at_prime(place)
    else:
        v = Valuation.at_poly(F, place)
    rng = random.Random(SEED)
    for _ in range(200):
        x, y = random_element(F, rng), random_element(F, rng)
        if x.is_zero() or y.is_zero():
            continue
        assert v(x * y) == v(x) + v(y)
        assert v(x + y) >= min(v(x), v(y))


# --- Smith normal form ---------------------------------------------------------------------------

def _sympy_invariants(A):
    from sympy.matrices.normalforms import smith_normal_form
    D = smith_normal_form(sympy.Matrix(A), domain=sympy.ZZ)
    return [abs(int(D[i, i])) for i in range(min(D.shape)) if D[i, i] != 0]


def test_snf_against_sympy_oracle():
    rng = random.Random(SEED)
    for _ in range(100):
        m, n = rng.randint(1, 5), rng.randint(1, 5)
        A = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(m)]
        assert intmat.invariant_factors(A) == _sympy_invariants(A)


def test_snf_certificate():
    rng = random.Random(SEED + 1)
    for _ in range(50):
        A = [[rng.randint(-6, 6) for _ in range(4)] for _ in range(3)]
        U, D, V = intmat.snf(A)
        assert intmat.matmul(intmat.matmul(U, A), V) == D
        diag = [D[i][i] for i in range(3)]
        nz = [d for d in diag if d]
        assert all(b % a == 0 for a, b in zip(nz, nz[1:]))


def test_is_prime_small_table():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert all(sympy.isprime(n) == is_prime(n) for n in range(1000))


def test_reducible_polynomial_is_not_a_place():
    with pytest.raises(ValueError):
        Valuation.at_poly(parse_field("Fp:5(t)"), (1, 0, 1))
