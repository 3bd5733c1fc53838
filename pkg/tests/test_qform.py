import random
from fractions import Fraction
from itertools import product

import pytest

from chowwitt.errors import CharacteristicTwo, Degenerate
from chowwitt.qform import (INF, QuadForm, canonical_form, diagonalize, form_invariants, hilbert_symbol,
                            hilbert_symbol_formula, is_isometric, is_isotropic, represents, witt_decompose)
from chowwitt.scalars import GF, QQ
from chowwitt.scalars.fields import prime_factors
from chowwitt.scalars.parse import parse_field

SEED = 4321


def form(F, *entries):
    return QuadForm(F, [F(a) for a in entries])


def rand_rational(rng, bound=100):
    return Fraction(rng.choice([-1, 1]) * rng.randint(1, bound), rng.randint(1, bound))


# --- Hilbert symbols -------------------------------------------------------------------------------

def test_hilbert_examples():
    assert hilbert_symbol(-1, -1, INF) == -1
    assert hilbert_symbol(-1, -1, 2) == -1
    assert hilbert_symbol(2, 3, 3) == -1
    with pytest.raises(Degenerate):
        hilbert_symbol(0, 3, 3)


def test_two_adic_table_matches_closed_formula():
    # the table is found by search modulo 64; the formula is the classical closed form
    for a in range(-40, 41):
        for b in range(-40, 41):
            if a and b:
                assert hilbert_symbol(a, b, 2) == hilbert_symbol_formula(a, b, 2)


def _solvable_mod(a, b, p, k):
    """Primitive solution of a x^2 + b y^2 = z^2 mod p^k (brute force over x, y)."""
    m = p ** k
    squares = {z * z % m for z in range(m)}
    unit_squares = {z * z % m for z in range(m) if z % p}
    for x in range(m):
        for y in range(m):
            val = (a * x * x + b * y * y) % m
            if (x % p or y % p) and val in squares:
                return True
            if not (x % p or y % p) and val in unit_squares:
                return True
    return False


@pytest.mark.parametrize("p", [3, 5, 7])
def test_odd_hilbert_symbol_against_brute_force(p):
    # square classes of Q_p are 1, n, p, np; for exponents at most 1 a primitive solution mod p^3 decides
    n = next(x for x in range(2, p) if pow(x, (p - 1) // 2, p) == p - 1)
    classes = [s * c for c in (1, n, p, n * p) for s in (1, -1)]
    for a in classes:
        for b in classes:
            expected = 1 if _solvable_mod(a, b, p, 3) else -1
            assert hilbert_symbol(a, b, p) == expected, (a, b, p)


def test_hilbert_product_formula():
    rng = random.Random(SEED)
    for _ in range(200):
        a, b = rand_rational(rng), rand_rational(rng)
        places = {2, INF} | set(prime_factors(a.numerator * a.denominator)) | set(
            prime_factors(b.numerator * b.denominator))
        total = 1
        for v in places:
            total *= hilbert_symbol(a, b, v)
        assert total == 1


def test_hilbert_bimultiplicative_and_symmetric():
    rng = random.Random(SEED + 1)
    for _ in range(200):
        a, a2, b = rand_rational(rng, 30), rand_rational(rng, 30), rand_rational(rng, 30)
        for v in (2, 3, 5, 7, INF):
            assert hilbert_symbol(a * a2, b, v) == hilbert_symbol(a, b, v) * hilbert_symbol(a2, b, v)
            assert hilbert_symbol(a, b, v) == hilbert_symbol(b, a, v)
            assert hilbert_symbol(a, -a, v) == 1


# --- isotropy ------------------------------------------------------------------------------------

def test_isotropy_examples():
    assert is_isotropic(form(QQ, 1, -1))
    assert not is_isotropic(form(QQ, 1, 1, -7))
    assert is_isotropic(form(GF(3), 1, 1, 1))


def _integer_zero(entries, bound):
    for xs in product(range(-bound, bound + 1), repeat=len(entries)):
        if any(xs) and sum(a * x * x for a, x in zip(entries, xs)) == 0:
            return True
    return False


def test_isotropy_one_sided_search_oracle():
    assert not _integer_zero([1, 1, -7], 12)
    rng = random.Random(SEED)
    for _ in range(150):
        ents = [rng.choice([-1, 1]) * rng.randint(1, 15) for _ in range(3)]
        q = form(QQ, *ents)
        if _integer_zero(ents, 8):
            assert is_isotropic(q), ents
        if not is_isotropic(q):
            assert not _integer_zero(ents, 8)


def _rep_counts(q):
    F = q.field
    els = F.elements()
    counts = {}
    for xs in product(els, repeat=q.rank):
        val = F.zero
        for a, x in zip(q.entries, xs):
            val = val + a * x * x
        counts[val] = counts.get(val, 0) + 1
    return counts


@pytest.mark.parametrize("q", [3, 5, 7, 9])
def test_finite_field_isometry_against_counting_oracle(q):
    F = GF(q)
    units = [e for e in F.elements() if not e.is_zero()]
    rng = random.Random(SEED + q)
    max_rank = 4 if q <= 5 else 3
    for _ in range(40):
        n = rng.randint(1, max_rank)
        q1 = QuadForm(F, [rng.choice(units) for _ in range(n)])
        q2 = QuadForm(F, [rng.choice(units) for _ in range(n)])
        assert is_isometric(q1, q2) == (_rep_counts(q1) == _rep_counts(q2))
        # isotropy over F_q: rank >= 3, or rank 2 with -det a square
        iso = n >= 3 or (n == 2 and (-q1.det()).is_square())
        assert is_isotropic(q1) == iso
        assert is_isotropic(q1) == (_rep_counts(q1)[F.zero] > 1)


# --- Witt decomposition ----------------------------------------------------------------------------

def test_witt_decompose_examples():
    k, h = witt_decompose(form(QQ, 1, -1, 2))
    assert (k, h) == (form(QQ, 2), 1)
    assert witt_decompose(form(GF(3), 1, 1, 1, 1)) == (QuadForm(GF(3), []), 2)
    k, h = witt_decompose(form(QQ, 1, 1, -7))
    assert h == 0 and is_isometric(k, form(QQ, 1, 1, -7))


@pytest.mark.parametrize("spec", ["Fp:3", "Fp:5", "Fq:9", "Q", "Fp:3(t)"])
def test_witt_decompose_rank_and_idempotence(spec):
    from chowwitt.wittring import random_form
    F = parse_field(spec)
    rng = random.Random(SEED)
    for _ in range(40):
        q = random_form(F, rng, max_rank=5 if F.kind != "ratfunc" else 3)
        k, h = witt_decompose(q)
        assert k.rank + 2 * h == q.rank
        assert not is_isotropic(k) or k.rank == 0
        assert witt_decompose(k)[1] == 0
        assert is_isometric(k + QuadForm.hyperbolic(F, h), q)


def test_canonical_form_is_an_isometry_invariant_over_q():
    rng = random.Random(SEED + 7)
    for _ in range(150):
        a, b, c = (QQ(rand_rational(rng, 200)) for _ in range(3))
        if (a + b).is_zero():
            continue
        # <a, b> and <a+b, ab(a+b)> are isometric
        assert canonical_form(QuadForm(QQ, [a, b, c])) == canonical_form(QuadForm(QQ, [a + b, a * b * (a + b), c]))
        s = QQ(rng.randint(1, 20))
        assert canonical_form(QuadForm(QQ, [a * s * s, b])) == canonical_form(QuadForm(QQ, [b, a]))


def test_represents_matches_witt_decomposition():
    rng = random.Random(SEED + 3)
    for _ in range(60):
        q = QuadForm(QQ, [QQ(rand_rational(rng, 20)) for _ in range(rng.randint(1, 3))])
        c = QQ(rand_rational(rng, 20))
        # q represents c iff q + <-c> is isotropic
        assert represents(q, c) == is_isotropic(q + QuadForm(QQ, [-c]))


# --- diagonalization and invariants ----------------------------------------------------------------

def test_diagonalize_examples():
    assert is_isometric(diagonalize([[0, 1], [1, 0]], QQ), form(QQ, 1, -1))
    assert diagonalize([[2]], GF(5)) == form(GF(5), 2)
    assert is_isometric(diagonalize([[1, 1], [1, 2]], QQ), form(QQ, 1, 1))
    with pytest.raises(Degenerate):
        diagonalize([[1, 1], [1, 1]], QQ)
    with pytest.raises(CharacteristicTwo):
        diagonalize([[1]], GF(2))


def _jacobi(gram):
    """<d1, d2/d1, ...> from leading principal minors (independent route)."""
    import sympy
    M = sympy.Matrix(gram)
    minors = [sympy.Integer(1)] + [M[:k, :k].det() for k in range(1, M.shape[0] + 1)]
    if any(m == 0 for m in minors):
        return None
    return [Fraction(int(sympy.fraction(minors[k] / minors[k - 1])[0]),
                     int(sympy.fraction(minors[k] / minors[k - 1])[1])) for k in range(1, len(minors))]


def test_diagonalize_preserves_invariants_over_q():
    rng = random.Random(SEED)
    checked = 0
    while checked < 60:
        n = rng.randint(1, 4)
        G = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                G[i][j] = G[j][i] = rng.randint(-5, 5)
        jac = _jacobi(G)
        if jac is None:
            continue
        d = diagonalize(G, QQ)
        ref = QuadForm(QQ, [QQ(x) for x in jac])
        assert is_isometric(d, ref)
        assert form_invariants(d) == form_invariants(ref)
        assert form_invariants(d).hasse_symbols == form_invariants(ref).hasse_symbols
        checked += 1


def test_diagonalize_over_finite_fields_preserves_det_class():
    rng = random.Random(SEED + 2)
    for q in (3, 5, 7, 9):
        F = GF(q)
        els = F.elements()
        from chowwitt.scalars.linalg import det
        for _ in range(30):
            n = rng.randint(1, 4)
            G = [[F.zero] * n for _ in range(n)]
            for i in range(n):
                for j in range(i, n):
                    G[i][j] = G[j][i] = rng.choice(els)
            D = F.elem(det(F, [[x.raw for x in row] for row in G]))
            if D.is_zero():
                continue
            d = diagonalize(G, F)
            assert d.rank == n
            assert (d.det() * D.inverse()).is_square()


def test_form_invariants_signature_parity_and_discriminant():
    rng = random.Random(SEED + 5)
    for _ in range(100):
        q = QuadForm(QQ, [QQ(rand_rational(rng, 30)) for _ in range(rng.randint(1, 6))])
        inv = form_invariants(q)
        assert (inv.signatures[INF] - inv.rank) % 2 == 0
        n = q.rank
        sign = -1 if (n * (n - 1) // 2) % 2 else 1
        assert (inv.signed_discriminant * (q.det() * sign).inverse()).raw > 0
    h = form_invariants(QuadForm.hyperbolic(QQ))
    assert h.signed_discriminant == QQ.one and all(e == 1 for e in h.hasse_symbols.values())
