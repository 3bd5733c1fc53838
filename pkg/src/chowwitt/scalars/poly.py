"""Dense univariate polynomial arithmetic over a field.

Coefficients are stored low degree first as tuples of *raw payloads* of the
coefficient field (see :mod:`chowwitt.scalars.fields`); the zero polynomial is
the empty tuple.  The free functions take the field as first argument so that
field implementations can use them without building wrapper objects.
"""

from ..errors import ZeroPolynomial


def trim(F, c):
    c = list(c)
    while c and F.is_zero(c[-1]):
        c.pop()
    return tuple(c)


def deg(c):
    return len(c) - 1 if c else -1


def add(F, a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, y in enumerate(b):
        out[i] = F.add(out[i], y)
    return trim(F, out)


def neg(F, a):
    return tuple(F.neg(x) for x in a)


def sub(F, a, b):
    return add(F, a, neg(F, b))


def scale(F, a, s):
    if F.is_zero(s):
        return ()
    return trim(F, [F.mul(x, s) for x in a])


def mul(F, a, b):
    if not a or not b:
        return ()
    out = [F.zero_raw] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if F.is_zero(x):
            continue
        for j, y in enumerate(b):
            out[i + j] = F.add(out[i + j], F.mul(x, y))
    return trim(F, out)


def shift(F, a, k):
    return ((F.zero_raw,) * k + tuple(a)) if a else ()


def monomial(F, k, c=None):
    return shift(F, (F.one_raw if c is None else c,), k)


def divmod_(F, a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    db = len(b) - 1
    inv_lead = F.inv(b[-1])
    q = [F.zero_raw] * max(len(a) - db, 0)
    for k in range(len(a) - 1 - db, -1, -1):
        c = r[k + db]
        if F.is_zero(c):
            continue
        c = F.mul(c, inv_lead)
        q[k] = c
        for j, y in enumerate(b):
            r[k + j] = F.sub(r[k + j], F.mul(c, y))
    return trim(F, q), trim(F, r[:db])


def rem(F, a, b):
    return divmod_(F, a, b)[1]


def monic(F, a):
    if not a:
        return ()
    return scale(F, a, F.inv(a[-1]))


def gcd(F, a, b):
    while b:
        a, b = b, rem(F, a, b)
    return monic(F, a)


def xgcd(F, a, b):
    """Return (g, s, t) with s*a + t*b = g monic."""
    r0, r1 = a, b
    s0, s1 = (F.one_raw,), ()
    t0, t1 = (), (F.one_raw,)
    while r1:
        q, r = divmod_(F, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(F, s0, mul(F, q, s1))
        t0, t1 = t1, sub(F, t0, mul(F, q, t1))
    if not r0:
        return (), (), ()
    li = F.inv(r0[-1])
    return scale(F, r0, li), scale(F, s0, li), scale(F, t0, li)


def evaluate(F, a, x):
    acc = F.zero_raw
    for c in reversed(a):
        acc = F.add(F.mul(acc, x), c)
    return acc


def deriv(F, a):
    return trim(F, [F.mul(F.from_int(i), c) for i, c in enumerate(a)][1:])


def powmod(F, a, n, m):
    result = (F.one_raw,)
    base = rem(F, a, m)
    while n:
        if n & 1:
            result = rem(F, mul(F, result, base), m)
        base = rem(F, mul(F, base, base), m)
        n >>= 1
    return result


def power(F, a, n):
    result = (F.one_raw,)
    while n:
        if n & 1:
            result = mul(F, result, a)
        a = mul(F, a, a)
        n >>= 1
    return result


def compose(F, a, b):
    """a(b(x))."""
    acc = ()
    for c in reversed(a):
        acc = add(F, mul(F, acc, b), (c,) if not F.is_zero(c) else ())
    return acc


def require_nonzero(a):
    if not a:
        raise ZeroPolynomial("zero polynomial")


def fmt(F, a, var="t"):
    if not a:
        return "0"
    terms = []
    for i in range(len(a) - 1, -1, -1):
        c = a[i]
        if F.is_zero(c):
            continue
        cs = F.fmt(c)
        if i == 0:
            terms.append(cs)
            continue
        mono = var if i == 1 else f"{var}^{i}"
        if cs == "1":
            terms.append(mono)
        elif cs == "-1":
            terms.append("-" + mono)
        elif any(ch in cs[1:] for ch in "+-") or " " in cs:
            terms.append(f"({cs})*{mono}")
        else:
            terms.append(f"{cs}*{mono}")
    out = terms[0]
    for t in terms[1:]:
        out += t if t.startswith("-") else "+" + t
    return out


class Poly:
    """Polynomial wrapper with operator overloading; immutable."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs=()):
        coeffs = [c.raw if hasattr(c, "raw") else field.coerce_raw(c) for c in coeffs]
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", trim(field, coeffs))

    @classmethod
    def _raw(cls, field, coeffs):
        p = object.__new__(cls)
        object.__setattr__(p, "field", field)
        object.__setattr__(p, "coeffs", tuple(coeffs))
        return p

    def __setattr__(self, *args):
        raise AttributeError("Poly is immutable")

    @classmethod
    def x(cls, field):
        return cls._raw(field, (field.zero_raw, field.one_raw))

    @property
    def degree(self):
        return deg(self.coeffs)

    def is_zero(self):
        return not self.coeffs

    def lead(self):
        return self.field.elem(self.coeffs[-1]) if self.coeffs else self.field.zero

    def coeff(self, i):
        return self.field.elem(self.coeffs[i] if i < len(self.coeffs) else self.field.zero_raw)

    def _other(self, o):
        if isinstance(o, Poly):
            return o.coeffs
        return trim(self.field, [o.raw if hasattr(o, "raw") else self.field.coerce_raw(o)])

    def __add__(self, o):
        return Poly._raw(self.field, add(self.field, self.coeffs, self._other(o)))

    __radd__ = __add__

    def __sub__(self, o):
        return Poly._raw(self.field, sub(self.field, self.coeffs, self._other(o)))

    def __rsub__(self, o):
        return Poly._raw(self.field, sub(self.field, self._other(o), self.coeffs))

    def __neg__(self):
        return Poly._raw(self.field, neg(self.field, self.coeffs))

    def __mul__(self, o):
        return Poly._raw(self.field, mul(self.field, self.coeffs, self._other(o)))

    __rmul__ = __mul__

    def __pow__(self, n):
        return Poly._raw(self.field, power(self.field, self.coeffs, n))

    def __divmod__(self, o):
        q, r = divmod_(self.field, self.coeffs, self._other(o))
        return Poly._raw(self.field, q), Poly._raw(self.field, r)

    def __floordiv__(self, o):
        return divmod(self, o)[0]

    def __mod__(self, o):
        return divmod(self, o)[1]

    def __eq__(self, o):
        if isinstance(o, Poly):
            return self.field == o.field and self.coeffs == o.coeffs
        try:
            return self.coeffs == self._other(o)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __call__(self, x):
        x = self.field(x)
        return self.field.elem(evaluate(self.field, self.coeffs, x.raw))

    def monic(self):
        return Poly._raw(self.field, monic(self.field, self.coeffs))

    def gcd(self, o):
        return Poly._raw(self.field, gcd(self.field, self.coeffs, o.coeffs))

    def derivative(self):
        return Poly._raw(self.field, deriv(self.field, self.coeffs))

    def sort_key(self):
        return (self.degree, tuple(self.field.sort_key(c) for c in reversed(self.coeffs)))

    def __lt__(self, o):
        return self.sort_key() < o.sort_key()

    def __repr__(self):
        return fmt(self.field, self.coeffs)

    __str__ = __repr__
