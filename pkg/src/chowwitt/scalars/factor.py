"""Factorization of univariate polynomials over the catalog base fields.

Finite fields: squarefree decomposition, distinct-degree and Cantor-Zassenhaus
equal-degree splitting (trace map in characteristic 2).  Rationals: Zassenhaus
(factor mod a good prime, Hensel lift, recombine), bounded in degree.
"""

from fractions import Fraction
from itertools import combinations
from math import gcd as igcd
import random

from ..errors import DegreeBoundExceeded, UnsupportedField, ZeroPolynomial
from . import poly as P
from .fields import PrimeField, is_prime

DEFAULT_Q_DEGREE_BOUND = 8


def _sorted(F, items):
    return sorted(items, key=lambda fm: (P.deg(fm[0]), tuple(F.sort_key(c) for c in reversed(fm[0])), fm[1]))


# --- squarefree -----------------------------------------------------------------


def _pth_root(F, f):
    """f(x) = g(x)^p in a perfect field of characteristic p; return g."""
    p = F.characteristic
    q = F.order
    root = q // p  # a -> a^(q/p) inverts Frobenius on F_q
    return P.trim(F, [F.pow(f[i], root) for i in range(0, len(f), p)])


def squarefree_decomposition(F, f):
    """Monic f -> list of (g_i, i) with f = prod g_i^i and g_i squarefree, coprime."""
    P.require_nonzero(f)
    f = P.monic(F, f)
    if P.deg(f) == 0:
        return []
    out = {}
    p = F.characteristic
    one = (F.one_raw,)

    def yun(f, mult):
        i = 1
        df = P.deriv(F, f)
        c = P.gcd(F, f, df)
        w = P.divmod_(F, f, c)[0]
        while P.deg(w) > 0:
            y = P.gcd(F, w, c)
            z = P.divmod_(F, w, y)[0]
            if P.deg(z) > 0:
                out[i * mult] = P.mul(F, out.get(i * mult, one), z)
            i += 1
            w = y
            c = P.divmod_(F, c, y)[0]
        if P.deg(c) > 0:
            if p == 0:
                raise AssertionError("characteristic zero remainder")
            yun(_pth_root(F, c), mult * p)

    if p and not P.deriv(F, f):
        yun_input = _pth_root(F, f)
        sub = squarefree_decomposition(F, yun_input)
        return _sorted(F, [(g, m * p) for g, m in sub])
    yun(f, 1)
    return _sorted(F, [(g, m) for m, g in out.items()])


# --- finite fields --------------------------------------------------------------


def _distinct_degree(F, f):
    q = F.order
    x = (F.zero_raw, F.one_raw)
    out = []
    h = x
    d = 0
    while P.deg(f) >= 2 * (d + 1):
        d += 1
        h = P.powmod(F, h, q, f)
        g = P.gcd(F, f, P.sub(F, h, x))
        if P.deg(g) > 0:
            out.append((g, d))
            f = P.divmod_(F, f, g)[0]
            h = P.rem(F, h, f)
    if P.deg(f) > 0:
        out.append((f, P.deg(f)))
    return out


def _equal_degree(F, f, d, rng):
    n = P.deg(f)
    if n == d:
        return [f]
    q = F.order
    while True:
        r = P.trim(F, [F.random_raw(rng) for _ in range(n)])
        if P.deg(r) < 1:
            continue
        if F.characteristic == 2:
            # trace map F_{q^d} -> F_2 applied to r
            m = (q.bit_length() - 1) * d
            t = r
            acc = r
            for _ in range(m - 1):
                t = P.rem(F, P.mul(F, t, t), f)
                acc = P.add(F, acc, t)
            g = P.gcd(F, acc, f)
        else:
            g = P.gcd(F, P.sub(F, P.powmod(F, r, (q ** d - 1) // 2, f), (F.one_raw,)), f)
        if 0 < P.deg(g) < n:
            return (_equal_degree(F, g, d, rng)
                    + _equal_degree(F, P.divmod_(F, f, g)[0], d, rng))


def factor_finite(F, f, seed=0):
    rng = random.Random(seed)
    out = []
    for g, m in squarefree_decomposition(F, f):
        for h, d in _distinct_degree(F, g):
            for irr in _equal_degree(F, h, d, rng):
                out.append((P.monic(F, irr), m))
    return _sorted(F, out)


# --- rationals ------------------------------------------------------------------


def _to_primitive_int(f):
    den = 1
    for c in f:
        den = den * c.denominator // igcd(den, c.denominator)
    ints = [int(c * den) for c in f]
    cont = 0
    for c in ints:
        cont = igcd(cont, c)
    if ints[-1] < 0:
        cont = -cont
    return [c // cont for c in ints]


def _zmod(poly, m):
    return [c % m for c in poly]


def _sym(poly, m):
    return [c - m if c > m // 2 else c for c in (x % m for x in poly)]


def _imul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _itrim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _idivexact(a, b):
    """Exact division over Z; None if b does not divide a."""
    a = list(a)
    q = [0] * max(len(a) - len(b) + 1, 0)
    for k in range(len(a) - len(b), -1, -1):
        c = a[k + len(b) - 1]
        if c % b[-1]:
            return None
        c //= b[-1]
        q[k] = c
        for j, y in enumerate(b):
            a[k + j] -= c * y
    if any(a):
        return None
    return _itrim(q)


def _mignotte(f):
    n = len(f) - 1
    norm = sum(c * c for c in f) ** 0.5
    return int(2 ** n * (norm + 1) * abs(f[-1])) + 1


def _pad(a, n):
    return list(a) + [0] * (n - len(a))


def _add_scaled(a, d, m):
    out = _pad(a, max(len(a), len(d)))
    for i, c in enumerate(d):
        out[i] += c * m
    return out


def _factor_squarefree_int(f, bound):
    n = len(f) - 1
    if n <= 1:
        return [f]
    lc = f[-1]
    p = 3
    while True:
        if is_prime(p) and lc % p:
            Fp = PrimeField(p)
            fp = P.trim(Fp, [c % p for c in f])
            if P.deg(P.gcd(Fp, fp, P.deriv(Fp, fp))) == 0:
                break
        p += 2
    Fp = PrimeField(p)
    modfactors = [g for g, _ in factor_finite(Fp, P.trim(Fp, [c % p for c in f]))]
    if len(modfactors) == 1:
        return [f]
    B = 2 * _mignotte(f)
    k = 1
    while p ** k <= B:
        k += 1
    lifted = _hensel_lift_all(f, modfactors, p, k)
    mk = p ** k
    result = []
    remaining = list(range(len(lifted)))
    g = list(f)
    s = 1
    while 2 * s <= len(remaining):
        found = False
        for subset in combinations(remaining, s):
            cand = [g[-1]]
            for i in subset:
                cand = _zmod(_imul(cand, lifted[i]), mk)
            cand = _itrim(_sym(cand, mk))
            cont = 0
            for c in cand:
                cont = igcd(cont, c)
            cand = [c // cont for c in cand]
            q = _idivexact(g, cand)
            if q is not None:
                result.append(cand)
                g = q
                remaining = [i for i in remaining if i not in subset]
                found = True
                break
        if not found:
            s += 1
    result.append(g)
    return result


def _hensel_lift_all(f, factors, p, k):
    """Multifactor lift by repeated two-factor lifting."""
    out = []
    cur = list(f)
    mk = p ** k
    Fp = PrimeField(p)
    for idx in range(len(factors) - 1):
        g0 = factors[idx]
        rest = (1,)
        for h in factors[idx + 1:]:
            rest = P.mul(Fp, rest, h)
        g, h = _lift_pair(cur, list(g0), list(rest), p, k)
        out.append(g)
        # cur becomes lc * h (a lift of lc * rest), kept with the leading coefficient
        cur = _zmod([c * cur[-1] for c in h], mk)
    lc_inv = pow(cur[-1], -1, mk)
    out.append(_zmod([c * lc_inv for c in cur], mk))
    return out


def _lift_pair(f, g, h, p, k):
    Fp = PrimeField(p)
    _, s, t = P.xgcd(Fp, tuple(g), tuple(h))
    lc = f[-1]
    lc_inv_p = pow(lc, -1, p)
    m = p
    mk = p ** k
    while m < mk:
        prod = _imul([lc], _imul(g, h))
        e = [(x - y) for x, y in zip(_pad(f, len(prod)), prod)]
        e = [(c // m) % p for c in e]
        a = P.trim(Fp, [c * lc_inv_p % p for c in e])
        qq, r = P.divmod_(Fp, P.mul(Fp, t, a), tuple(g))
        dh = P.add(Fp, P.mul(Fp, s, a), P.mul(Fp, qq, tuple(h)))
        g = _zmod(_add_scaled(g, r, m), m * p)
        h = _zmod(_add_scaled(h, dh, m), m * p)
        m *= p
    return _zmod(g, mk), _zmod(h, mk)


def factor_rational(F, f, bound=DEFAULT_Q_DEGREE_BOUND):
    if P.deg(f) > bound:
        raise DegreeBoundExceeded(f"degree {P.deg(f)} exceeds bound {bound} over Q")
    out = []
    for g, m in squarefree_decomposition(F, f):
        ints = _to_primitive_int(g)
        for h in _factor_squarefree_int(ints, bound):
            hq = P.monic(F, tuple(Fraction(c) for c in h))
            out.append((hq, m))
    return _sorted(F, out)


# --- public entry point ---------------------------------------------------------


def factor(poly, bound=DEFAULT_Q_DEGREE_BOUND):
    """Factor a nonzero polynomial into monic irreducibles with multiplicities.

    Returns ``(leading_coefficient, [(Poly, multiplicity), ...])`` sorted by
    degree then coefficients.
    """
    F = poly.field
    f = poly.coeffs
    if not f:
        raise ZeroPolynomial("cannot factor the zero polynomial")
    lc = F.elem(f[-1])
    if P.deg(f) == 0:
        return lc, []
    if F.order is not None:
        items = factor_finite(F, f)
    elif F.kind == "rationals":
        items = factor_rational(F, f, bound)
    else:
        raise UnsupportedField(f"factorization over {F}")
    return lc, [(P.Poly._raw(F, g), m) for g, m in items]


def is_irreducible(poly, bound=DEFAULT_Q_DEGREE_BOUND):
    _, items = factor(poly, bound)
    return len(items) == 1 and items[0][1] == 1


def monic_irreducibles(F, degree):
    """All monic irreducible polynomials of given degree over a finite field, sorted."""
    from itertools import product
    from .fields import is_irreducible_finite
    elems = F.raw_elements()
    out = []
    for tail in product(elems, repeat=degree):
        f = tuple(reversed(tail)) + (F.one_raw,)
        f = P.trim(F, f)
        if is_irreducible_finite(F, f):
            out.append(P.Poly._raw(F, f))
    return sorted(out, key=lambda g: g.sort_key())
