"""Catalog fields with exact element arithmetic.

Every field object doubles as the descriptor of the spec: it is immutable,
hashable, compares by its defining data, and knows how to do arithmetic on
*raw payloads* (ints mod p, tuples of coefficients, Fractions, pairs of
polynomials).  :class:`FieldElement` wraps a payload together with its field.
"""

from fractions import Fraction
from functools import lru_cache
from math import isqrt
import random

from ..errors import FieldMismatch, ParseError, UnsupportedField
from . import poly as P


def is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class FieldElement:
    __slots__ = ("field", "raw")

    def __init__(self, field, raw):
        self.field = field
        self.raw = raw

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch(f"{other.field} vs {self.field}")
            return other.raw
        return self.field.coerce_raw(other)

    def __add__(self, o):
        return FieldElement(self.field, self.field.add(self.raw, self._coerce(o)))

    __radd__ = __add__

    def __sub__(self, o):
        return FieldElement(self.field, self.field.sub(self.raw, self._coerce(o)))

    def __rsub__(self, o):
        return FieldElement(self.field, self.field.sub(self._coerce(o), self.raw))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.raw))

    def __mul__(self, o):
        return FieldElement(self.field, self.field.mul(self.raw, self._coerce(o)))

    __rmul__ = __mul__

    def __truediv__(self, o):
        return FieldElement(self.field, self.field.mul(self.raw, self.field.inv(self._coerce(o))))

    def __rtruediv__(self, o):
        return FieldElement(self.field, self.field.mul(self._coerce(o), self.field.inv(self.raw)))

    def inverse(self):
        return FieldElement(self.field, self.field.inv(self.raw))

    def __pow__(self, n):
        if n < 0:
            return FieldElement(self.field, self.field.pow(self.field.inv(self.raw), -n))
        return FieldElement(self.field, self.field.pow(self.raw, n))

    def __eq__(self, o):
        if isinstance(o, FieldElement):
            return self.field == o.field and self.raw == o.raw
        try:
            return self.raw == self.field.coerce_raw(o)
        except (TypeError, ValueError, ParseError):
            return NotImplemented

    def __hash__(self):
        return hash((self.field, self.raw))

    def is_zero(self):
        return self.field.is_zero(self.raw)

    def __bool__(self):
        return not self.is_zero()

    def is_square(self):
        return self.field.is_square(self.raw)

    def sort_key(self):
        return self.field.sort_key(self.raw)

    def __lt__(self, o):
        return self.sort_key() < o.sort_key()

    def __repr__(self):
        return self.field.fmt(self.raw)

    __str__ = __repr__


class Field:
    """Abstract base.  Subclasses implement the raw payload operations."""

    kind = None
    characteristic = 0
    order = None  # number of elements, finite fields only

    def __call__(self, x):
        if isinstance(x, FieldElement):
            if x.field == self:
                return x
            return self.elem(self.embed_raw(x))
        return FieldElement(self, self.coerce_raw(x))

    def embed_raw(self, x):
        raise FieldMismatch(f"cannot coerce element of {x.field} into {self}")

    def elem(self, raw):
        return FieldElement(self, raw)

    @property
    def zero(self):
        return self.elem(self.zero_raw)

    @property
    def one(self):
        return self.elem(self.one_raw)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def is_zero(self, a):
        return a == self.zero_raw

    def pow(self, a, n):
        result = self.one_raw
        while n:
            if n & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            n >>= 1
        return result

    def from_int(self, n):
        return self.coerce_raw(n)

    @property
    def is_finite(self):
        return self.order is not None

    def poly(self, coeffs):
        return P.Poly(self, coeffs)

    def __repr__(self):
        return self.name()

    __str__ = __repr__


class PrimeField(Field):
    kind = "prime"

    def __init__(self, p):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.e = 1
        self.characteristic = p
        self.order = p
        self.zero_raw = 0
        self.one_raw = 1 % p

    def __eq__(self, o):
        return isinstance(o, PrimeField) and o.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def name(self):
        return f"Fp:{self.p}"

    def coerce_raw(self, x):
        if isinstance(x, Fraction):
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        if isinstance(x, int):
            return x % self.p
        if isinstance(x, str):
            return parse_rational(x) if "/" in x else int(x) % self.p
        raise TypeError(f"cannot coerce {x!r} into {self}")

    def embed_raw(self, x):
        if x.field == self:
            return x.raw
        raise FieldMismatch(f"cannot coerce element of {x.field} into {self}")

    def add(self, a, b):
        return (a + b) % self.p

    def neg(self, a):
        return -a % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def pow(self, a, n):
        return pow(a, n, self.p)

    def is_square(self, a):
        if a == 0 or self.p == 2:
            return True
        return pow(a, (self.p - 1) // 2, self.p) == 1

    def elements(self):
        return [self.elem(i) for i in range(self.p)]

    def raw_elements(self):
        return list(range(self.p))

    def random_raw(self, rng):
        return rng.randrange(self.p)

    def sort_key(self, a):
        return (a,)

    def fmt(self, a):
        return str(a)

    def to_json_raw(self, a):
        return a

    def prime_field(self):
        return self


def parse_rational(s):
    try:
        return Fraction(s.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational literal {s!r}") from exc


class Rationals(Field):
    kind = "rationals"
    characteristic = 0

    zero_raw = Fraction(0)
    one_raw = Fraction(1)

    def __eq__(self, o):
        return isinstance(o, Rationals)

    def __hash__(self):
        return hash("Q")

    def name(self):
        return "Q"

    def coerce_raw(self, x):
        if isinstance(x, (int, Fraction)):
            return Fraction(x)
        if isinstance(x, str):
            return parse_rational(x)
        raise TypeError(f"cannot coerce {x!r} into Q")

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def pow(self, a, n):
        return a ** n

    def is_square(self, a):
        if a == 0:
            return True
        if a < 0:
            return False
        n, d = a.numerator, a.denominator
        return isqrt(n) ** 2 == n and isqrt(d) ** 2 == d

    def random_raw(self, rng, bound=30):
        while True:
            n = rng.randint(-bound, bound)
            if n:
                return Fraction(n, rng.randint(1, bound))

    def sort_key(self, a):
        return (abs(a.numerator) + a.denominator, a < 0, abs(a.numerator), a.denominator)

    def fmt(self, a):
        return str(a)

    def to_json_raw(self, a):
        return str(a)


class ExtensionField(Field):
    """base[x]/(modulus) for an irreducible modulus; payloads are coefficient tuples."""

    kind = "extension"
    var = "x"

    def __init__(self, base, modulus):
        modulus = tuple(modulus.coeffs) if isinstance(modulus, P.Poly) else tuple(modulus)
        modulus = P.monic(base, P.trim(base, modulus))
        if P.deg(modulus) < 1:
            raise ValueError("modulus must have positive degree")
        self.base = base
        self.modulus = modulus
        self.degree = P.deg(modulus)
        self.characteristic = base.characteristic
        self.order = base.order ** self.degree if base.order else None
        self.zero_raw = ()
        self.one_raw = (base.one_raw,)

    def __eq__(self, o):
        return type(o) is type(self) and o.base == self.base and o.modulus == self.modulus

    def __hash__(self):
        return hash(("ext", self.base, self.modulus))

    def name(self):
        return f"{self.base}[{self.var}]/({P.fmt(self.base, self.modulus, self.var)})"

    def reduce(self, c):
        c = P.trim(self.base, c)
        if len(c) > self.degree:
            c = P.rem(self.base, c, self.modulus)
        return c

    def coerce_raw(self, x):
        if isinstance(x, P.Poly):
            return self.reduce(x.coeffs)
        if isinstance(x, (tuple, list)):
            return self.reduce([self.base.coerce_raw(c) for c in x])
        return P.trim(self.base, (self.base.coerce_raw(x),))

    def embed_raw(self, x):
        if x.field == self.base:
            return P.trim(self.base, (x.raw,))
        raise FieldMismatch(f"cannot coerce element of {x.field} into {self}")

    def generator(self):
        return self.elem(self.reduce((self.base.zero_raw, self.base.one_raw)))

    def add(self, a, b):
        return P.add(self.base, a, b)

    def neg(self, a):
        return P.neg(self.base, a)

    def sub(self, a, b):
        return P.sub(self.base, a, b)

    def mul(self, a, b):
        return self.reduce(P.mul(self.base, a, b))

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        g, s, _ = P.xgcd(self.base, a, self.modulus)
        return self.reduce(s)

    def is_zero(self, a):
        return not a

    def is_square(self, a):
        if not a:
            return True
        if self.order is None:
            raise UnsupportedField(f"square test in {self}")
        if self.characteristic == 2:
            return True
        return self.pow(a, (self.order - 1) // 2) == self.one_raw

    def raw_elements(self):
        if self.order is None:
            raise UnsupportedField(f"{self} is infinite")
        out = [()]
        for _ in range(self.degree):
            out = [c + (b,) for c in out for b in self.base.raw_elements()]
        return [self.reduce(c) for c in out]

    def elements(self):
        return [self.elem(r) for r in self.raw_elements()]

    def random_raw(self, rng):
        return self.reduce([self.base.random_raw(rng) for _ in range(self.degree)])

    def sort_key(self, a):
        padded = list(a) + [self.base.zero_raw] * (self.degree - len(a))
        return tuple(k for c in reversed(padded) for k in self.base.sort_key(c))

    def fmt(self, a):
        return P.fmt(self.base, a, self.var)

    def to_json_raw(self, a):
        return [self.base.to_json_raw(c) for c in a]

    def trace(self, a):
        """Trace to the base field (sum of Galois-free formula via matrix trace)."""
        return matrix_trace(self, a)

    def norm(self, a):
        return matrix_norm(self, a)

    def prime_field(self):
        return self.base.prime_field()


def _mult_matrix(F, a):
    cols = []
    basis_elem = F.one_raw
    x = F.reduce((F.base.zero_raw, F.base.one_raw))
    for _ in range(F.degree):
        prod = F.mul(a, basis_elem)
        cols.append(list(prod) + [F.base.zero_raw] * (F.degree - len(prod)))
        basis_elem = F.mul(basis_elem, x)
    return [[cols[j][i] for j in range(F.degree)] for i in range(F.degree)]


def matrix_trace(F, a):
    M = _mult_matrix(F, a)
    acc = F.base.zero_raw
    for i in range(F.degree):
        acc = F.base.add(acc, M[i][i])
    return acc


def matrix_norm(F, a):
    from .linalg import det
    return det(F.base, _mult_matrix(F, a))


class FiniteField(ExtensionField):
    """F_{p^e} as F_p[x]/(m) with a fixed lexicographically-first primitive modulus."""

    kind = "finite"

    def __init__(self, p, e):
        if e < 2:
            raise ValueError("use PrimeField for e = 1")
        self.p = p
        self.e = e
        super().__init__(PrimeField(p), conway_polynomial(p, e))

    def name(self):
        return f"Fq:{self.p ** self.e}"


class RationalFunctionField(Field):
    """base(t), payload (num, den) with den monic and gcd(num, den) = 1."""

    kind = "ratfunc"
    var = "t"

    def __init__(self, base):
        if base.kind not in ("prime", "finite", "rationals"):
            raise UnsupportedField("rational function fields only over Fp, Fq or Q")
        self.base = base
        self.characteristic = base.characteristic
        self.zero_raw = ((), (base.one_raw,))
        self.one_raw = ((base.one_raw,), (base.one_raw,))

    def __eq__(self, o):
        return isinstance(o, RationalFunctionField) and o.base == self.base

    def __hash__(self):
        return hash(("ratfunc", self.base))

    def name(self):
        return f"{self.base}(t)"

    def t(self):
        return self.elem(((self.base.zero_raw, self.base.one_raw), (self.base.one_raw,)))

    def make(self, num, den=None):
        B = self.base
        if den is None:
            den = (B.one_raw,)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            return self.zero_raw
        g = P.gcd(B, num, den)
        if P.deg(g) > 0:
            num = P.divmod_(B, num, g)[0]
            den = P.divmod_(B, den, g)[0]
        lc = B.inv(den[-1])
        return P.scale(B, num, lc), P.scale(B, den, lc)

    def coerce_raw(self, x):
        if isinstance(x, P.Poly):
            if x.field != self.base:
                raise FieldMismatch(f"{x.field} polynomial in {self}")
            return self.make(x.coeffs)
        if isinstance(x, tuple) and len(x) == 2 and isinstance(x[0], P.Poly):
            return self.make(x[0].coeffs, x[1].coeffs)
        if isinstance(x, str):
            from .parse import parse_ratfunc
            return parse_ratfunc(self, x).raw
        return self.make(P.trim(self.base, (self.base.coerce_raw(x),)))

    def embed_raw(self, x):
        if x.field == self.base:
            return self.make(P.trim(self.base, (x.raw,)))
        raise FieldMismatch(f"cannot coerce element of {x.field} into {self}")

    def num(self, a):
        return P.Poly._raw(self.base, a[0])

    def den(self, a):
        return P.Poly._raw(self.base, a[1])

    def add(self, a, b):
        B = self.base
        if a[1] == b[1]:
            return self.make(P.add(B, a[0], b[0]), a[1])
        return self.make(P.add(B, P.mul(B, a[0], b[1]), P.mul(B, b[0], a[1])), P.mul(B, a[1], b[1]))

    def neg(self, a):
        return (P.neg(self.base, a[0]), a[1])

    def mul(self, a, b):
        B = self.base
        return self.make(P.mul(B, a[0], b[0]), P.mul(B, a[1], b[1]))

    def inv(self, a):
        if not a[0]:
            raise ZeroDivisionError("inverse of zero")
        return self.make(a[1], a[0])

    def is_zero(self, a):
        return not a[0]

    def is_square(self, a):
        from .factor import squarefree_decomposition
        if not a[0]:
            return True
        B = self.base
        if not B.is_square(a[0][-1]):
            return False
        for part in (a[0], a[1]):
            for _, m in squarefree_decomposition(B, P.monic(B, part)):
                if m % 2:
                    return False
        return True

    def random_raw(self, rng, degree=3):
        B = self.base
        while True:
            num = P.trim(B, [B.random_raw(rng) for _ in range(rng.randint(1, degree + 1))])
            den = P.trim(B, [B.random_raw(rng) for _ in range(rng.randint(1, degree + 1))])
            if num and den:
                return self.make(num, den)

    def sort_key(self, a):
        B = self.base
        return (max(P.deg(a[0]), P.deg(a[1])), P.deg(a[1]),
                tuple(B.sort_key(c) for c in reversed(a[1])),
                P.deg(a[0]), tuple(B.sort_key(c) for c in reversed(a[0])))

    def fmt(self, a):
        num = P.fmt(self.base, a[0], self.var)
        if a[1] == (self.base.one_raw,):
            return num
        return f"({num})/({P.fmt(self.base, a[1], self.var)})"

    def to_json_raw(self, a):
        return self.fmt(a)

    def prime_field(self):
        return self.base.prime_field()


# --- constructors --------------------------------------------------------------

QQ = Rationals()


@lru_cache(maxsize=None)
def GF(q):
    """Finite field with q elements (PrimeField when q is prime)."""
    p, e = prime_power(q)
    return PrimeField(p) if e == 1 else FiniteField(p, e)


def prime_power(q):
    for p in range(2, q + 1):
        if q % p == 0:
            e = 0
            n = q
            while n % p == 0:
                n //= p
                e += 1
            if n != 1 or not is_prime(p):
                raise ValueError(f"{q} is not a prime power")
            return p, e
    raise ValueError(f"{q} is not a prime power")


def prime_factors(n):
    out = []
    n = abs(n)
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out.append(n)
    return out


@lru_cache(maxsize=None)
def conway_polynomial(p, e):
    """Lexicographically first monic primitive polynomial of degree e over F_p.

    Candidates are ordered by the coefficient vector (c_{e-1}, ..., c_0) read as
    a base-p number; the choice is fixed and reproducible, which is all that the
    canonical forms in this package rely on.
    """
    F = PrimeField(p)
    order = p ** e - 1
    cofactors = [order // r for r in prime_factors(order)]
    x = (0, 1)
    for n in range(p ** e):
        digits = []
        m = n
        for _ in range(e):
            digits.append(m % p)
            m //= p
        f = tuple(digits) + (1,)
        if f[0] == 0:
            continue
        if not is_irreducible_finite(F, f):
            continue
        if P.powmod(F, x, order, f) != (1,):
            continue
        if all(P.powmod(F, x, c, f) != (1,) for c in cofactors):
            return f
    raise RuntimeError("no primitive polynomial found")


def is_irreducible_finite(F, f):
    """Rabin's test over a finite field F."""
    n = P.deg(f)
    if n <= 0:
        return False
    if n == 1:
        return True
    q = F.order
    x = (F.zero_raw, F.one_raw)
    for r in prime_factors(n):
        h = P.sub(F, P.powmod(F, x, q ** (n // r), f), x)
        if P.deg(P.gcd(F, h, f)) != 0:
            return False
    h = P.sub(F, P.powmod(F, x, q ** n, f), x)
    return not P.rem(F, h, f)


def field_for(kind, p=None, e=None, base=None):
    if kind == "prime":
        return PrimeField(p)
    if kind == "finite":
        return GF(p ** e)
    if kind == "rationals":
        return QQ
    if kind == "ratfunc":
        return RationalFunctionField(base)
    raise ValueError(kind)


def rng_for(seed):
    return random.Random(seed)
