"""Text syntax for fields, elements, forms, schemes, twists and symbols."""

import re

from ..errors import ParseError
from .fields import GF, QQ, RationalFunctionField, is_prime, prime_power

_FIELD_RE = re.compile(r"^(Q|Fp:(\d+)|Fq:(\d+))(\(t\))?$")


def parse_field(spec):
    """'Q', 'Fp:7', 'Fq:9', 'Q(t)', 'Fq:3(t)' -> field object."""
    s = spec.replace(" ", "")
    m = _FIELD_RE.match(s)
    if not m:
        raise ParseError(f"unrecognized field spec {spec!r}")
    if m.group(1) == "Q":
        base = QQ
    elif m.group(2):
        p = int(m.group(2))
        if not is_prime(p):
            raise ParseError(f"Fp:{p} needs a prime")
        base = GF(p)
    else:
        q = int(m.group(3))
        try:
            prime_power(q)
        except ValueError as exc:
            raise ParseError(str(exc)) from None
        base = GF(q)
    return RationalFunctionField(base) if m.group(4) else base


def field_spec(F):
    """Inverse of parse_field."""
    if F.kind == "ratfunc":
        return field_spec(F.base) + "(t)"
    if F.kind == "rationals":
        return "Q"
    if F.kind == "prime":
        return f"Fp:{F.p}"
    return f"Fq:{F.order}"


# --- arithmetic expressions -----------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_]\w*)|(.))")


def _tokens(s):
    out = []
    pos = 0
    s = s.strip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if m is None or m.end() == pos:
            break
        num, name, sym = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif name is not None:
            out.append(("name", name))
        elif sym.strip():
            out.append(("sym", sym))
        pos = m.end()
    return out


class _ExprParser:
    """Recursive descent for + - * / ^ and parentheses, evaluated in a field."""

    def __init__(self, text, field, names):
        self.toks = _tokens(text)
        self.i = 0
        self.F = field
        self.names = names
        self.text = text

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, val=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (val is not None and tok[1] != val):
            raise ParseError(f"unexpected token in {self.text!r} at position {self.i}")
        self.i += 1
        return tok

    def parse(self):
        v = self.expr()
        if self.i != len(self.toks):
            raise ParseError(f"trailing input in {self.text!r}")
        return v

    def expr(self):
        tok = self.peek()
        if tok == ("sym", "-"):
            self.take()
            v = -self.term()
        else:
            if tok == ("sym", "+"):
                self.take()
            v = self.term()
        while self.peek() in (("sym", "+"), ("sym", "-")):
            op = self.take()[1]
            rhs = self.term()
            v = v + rhs if op == "+" else v - rhs
        return v

    def term(self):
        v = self.power()
        while True:
            tok = self.peek()
            if tok in (("sym", "*"), ("sym", "/")):
                self.take()
                rhs = self.power()
                v = v * rhs if tok[1] == "*" else v / rhs
            elif tok[0] in ("name", "num") or tok == ("sym", "("):
                v = v * self.power()  # implicit product, e.g. 2t
            else:
                return v

    def power(self):
        base = self.atom()
        if self.peek() == ("sym", "^"):
            self.take()
            neg = False
            if self.peek() == ("sym", "-"):
                self.take()
                neg = True
            e = self.take("num")[1]
            return base ** (-e if neg else e)
        return base

    def atom(self):
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return self.F(val)
        if kind == "name":
            self.take()
            if val not in self.names:
                raise ParseError(f"unknown symbol {val!r} in {self.text!r}")
            return self.names[val]
        if (kind, val) == ("sym", "("):
            self.take()
            v = self.expr()
            self.take("sym", ")")
            return v
        raise ParseError(f"cannot parse {self.text!r}")


def _names(F):
    names = {}
    base = F.base if F.kind == "ratfunc" else F
    if F.kind == "ratfunc":
        names["t"] = F.t()
    if base.kind in ("finite", "extension"):
        names["x"] = F(base.generator()) if F is not base else base.generator()
    return names


def parse_element(F, text):
    """Parse an element literal such as '3/4', 't^2+1', '(t+1)/t^2', 'x+1'."""
    if not isinstance(text, str):
        return F(text)
    try:
        return _ExprParser(text, F, _names(F)).parse()
    except ZeroDivisionError:
        raise ParseError(f"division by zero in {text!r}") from None


def parse_ratfunc(F, text):
    return parse_element(F, text)


def parse_poly(F, text):
    """Polynomial in t over F given as text."""
    from .fields import RationalFunctionField as RF
    R = RF(F)
    val = parse_element(R, text)
    if val.raw[1] != (F.one_raw,):
        raise ParseError(f"{text!r} is not a polynomial")
    return R.num(val.raw)


# --- forms, schemes, twists, symbols --------------------------------------------

def _split_top(s, sep=","):
    parts, depth, cur = [], 0, ""
    for ch in s:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    return [p.strip() for p in parts]


def parse_form_entries(F, text):
    """'<1,1,-7>' -> list of field elements."""
    s = text.strip()
    if not (s.startswith("<") and s.endswith(">")):
        raise ParseError(f"form literal must look like <a,b,...>, got {text!r}")
    body = s[1:-1].strip()
    if not body:
        return []
    return [parse_element(F, e) for e in _split_top(body)]


_SCHEME_RE = re.compile(r"^(SpecZ(?:\[1/([\d,]+)\])?|(A1|P1|Spec)/(.+)|DVR/(\d+)|SpecDVR\((\d+)\))$")


def parse_scheme_spec(text):
    """Scheme strings -> (kind, payload).

    kinds: SpecZ, SpecZLoc (payload: tuple of inverted primes), A1/P1/SpecField
    (payload: field), SpecDVR (payload: prime).
    """
    s = text.replace(" ", "")
    m = _SCHEME_RE.match(s)
    if not m:
        raise ParseError(f"unrecognized scheme spec {text!r}")
    if m.group(1).startswith("SpecZ") and m.group(3) is None:
        if m.group(2):
            primes = tuple(sorted({int(p) for p in m.group(2).split(",")}))
            if not all(is_prime(p) for p in primes):
                raise ParseError(f"inverted elements must be primes in {text!r}")
            return "SpecZLoc", primes
        return "SpecZ", None
    if m.group(3):
        kind = {"A1": "A1", "P1": "P1", "Spec": "SpecField"}[m.group(3)]
        return kind, parse_field(m.group(4))
    p = int(m.group(5) or m.group(6))
    if not is_prime(p):
        raise ParseError(f"DVR needs a prime, got {p}")
    return "SpecDVR", p


def parse_twist(text):
    """'O(d)' -> d."""
    m = re.match(r"^\s*O\(\s*(-?\d+)\s*\)\s*$", text or "")
    if not m:
        raise ParseError(f"twist must look like O(d), got {text!r}")
    return int(m.group(1))


_MONO_RE = re.compile(r"^(?:(\d+)\s*\*?\s*)?(?:eta(?:\^(\d+))?\s*\*?\s*)?((?:\[[^\]]+\])*)$")


def parse_symbol_terms(text):
    """'eta^1*[2][t] - 2*[3]' -> [(coef, eta_power, [letter strings]), ...].

    A bare integer is a multiple of the unit symbol.
    """
    s = text.replace(" ", "")
    if not s:
        raise ParseError("empty symbol literal")
    chunks = []
    depth, cur, sign = 0, "", 1
    for i, ch in enumerate(s):
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth -= 1
        if ch in "+-" and depth == 0 and (cur or i > 0):
            if cur:
                chunks.append((sign, cur))
            sign = 1 if ch == "+" else -1
            cur = ""
        elif ch in "+-" and depth == 0:
            sign = 1 if ch == "+" else -1
        else:
            cur += ch
    if cur:
        chunks.append((sign, cur))
    out = []
    for sign, chunk in chunks:
        m = _MONO_RE.match(chunk)
        if not m or not chunk:
            raise ParseError(f"bad symbol term {chunk!r}")
        coef = int(m.group(1)) if m.group(1) else 1
        eta = 0
        if "eta" in chunk:
            eta = int(m.group(2)) if m.group(2) else 1
        letters = re.findall(r"\[([^\]]+)\]", m.group(3) or "")
        out.append((sign * coef, eta, letters))
    return out
