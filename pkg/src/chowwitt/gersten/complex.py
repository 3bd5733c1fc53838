"""Truncated twisted Gersten complexes and their homology."""

from dataclasses import dataclass, field as dc_field

from ..errors import ChowWittError, InvalidDelta, TwoNotInvertible
from ..scalars import intmat
from ..scheme import SupportSet, TwistData, omega_twist
from ..wittring import CoefficientRing
from .rules import CoefficientRule, Term, generating_places, make_rule


class GerstenComplex:
    """Terms per delta value and integer differential matrices between them.

    ``differentials[p]`` maps the generators at delta ``p`` to the
    generators at ``p - 1``; columns and rows carry (point, generator, twist
    basis) labels.
    """

    def __init__(self, scheme, rule, twist, n, support, coeff, terms, differentials):
        self.scheme = scheme
        self.rule = rule
        self.twist = twist
        self.n = n
        self.support = support
        self.coeff = coeff
        self.terms = terms
        self.differentials = differentials
        self._relations = {}

    @property
    def degrees(self):
        return sorted(self.terms, reverse=True)

    def size(self, p):
        return sum(len(t.generators) for t in self.terms.get(p, []))

    def labels(self, p):
        return [(t.point.label, g, t.twist_label) for t in self.terms.get(p, []) for g in t.generators]

    def term_labels(self, p):
        return [{"point": t.point.label, "p": t.p, "n": t.n, "r": t.r, "twist": t.twist_label}
                for t in self.terms.get(p, [])]

    def coordinate_matrix(self, p, free_only=False):
        """Block-diagonal matrix of generator coordinates at delta p (rows: coordinates)."""
        rows = []
        offset = 0
        g = self.size(p)
        for t in self.terms.get(p, []):
            for i, m in enumerate(t.moduli):
                if free_only and m:
                    continue
                row = [0] * g
                for j, c in enumerate(t.coords):
                    row[offset + j] = c[i]
                rows.append(row)
            offset += len(t.generators)
        return rows

    def relations(self, p):
        """Columns spanning the relations among the generators at delta p."""
        if p not in self._relations:
            g = self.size(p)
            cols = []
            offset = 0
            for t in self.terms.get(p, []):
                for col in _term_relations(t):
                    full = [0] * g
                    full[offset:offset + len(col)] = col
                    cols.append(full)
                offset += len(t.generators)
            self._relations[p] = cols
        return self._relations[p]

    def matrix(self, p):
        return self.differentials.get(p, [])

    def check_square_zero(self):
        for p in self.degrees:
            if p - 1 in self.differentials and p in self.differentials:
                prod = intmat.matmul(self.differentials[p - 1], self.differentials[p])
                if not _in_lattice(prod, self.relations(p - 2), self.size(p - 2)):
                    raise ChowWittError(f"d o d is not zero at delta {p}")
        return True

    def check_relations_compatible(self):
        """Relations map to relations: the matrices descend to the presented groups."""
        for p, D in self.differentials.items():
            R = self.relations(p)
            if not R or not D:
                continue
            image = intmat.matmul(D, intmat.from_columns(R, self.size(p)))
            if not _in_lattice(image, self.relations(p - 1), self.size(p - 1)):
                raise ChowWittError(f"differential at delta {p} does not respect relations")
        return True

    def generic_vector(self, p, element_label):
        vec = [0] * self.size(p)
        for i, (_, g, _) in enumerate(self.labels(p)):
            if g == element_label:
                vec[i] = 1
                return vec
        raise KeyError(element_label)

    def to_json(self, dump_matrices=False):
        d = {"scheme": self.scheme.spec, "rule": self.rule.value, "twist": self.twist.label(), "n": self.n,
             "coeff": self.coeff.value, "support": self.support.to_json(),
             "terms": {str(p): self.term_labels(p) for p in self.degrees},
             "ranks": {str(p): self.size(p) for p in self.degrees}}
        if dump_matrices:
            d["matrices"] = {str(p): {"rows": [list(x) for x in self.labels(p - 1)],
                                      "columns": [list(x) for x in self.labels(p)],
                                      "entries": self.differentials[p]} for p in sorted(self.differentials)}
        return d

    def __repr__(self):
        sizes = ", ".join(f"{p}:{self.size(p)}" for p in self.degrees)
        return f"GerstenComplex({self.scheme.spec}, {self.rule.value}, n={self.n}, {self.twist.label()}, sizes {sizes})"


def _term_relations(t):
    g = len(t.generators)
    if t.point.is_generic:
        if not t.moduli:
            return [[int(i == j) for i in range(g)] for j in range(g)]
        k = len(t.moduli)
        rows = [[t.coords[j][i] for j in range(g)] + [t.moduli[i] if l == i else 0 for l in range(k)]
                for i in range(k)]
        K = intmat.kernel(rows, g + k)
        return [c[:g] for c in intmat.columns(K) if any(c[:g])]
    return [[m if i == j else 0 for i in range(g)] for j, m in enumerate(t.moduli) if m]


def _in_lattice(M, rel_cols, nrows):
    cols = [c for c in intmat.columns(M) if any(c)]
    if not cols:
        return True
    if not rel_cols:
        return False
    basis = intmat.column_basis(intmat.from_columns(rel_cols, nrows), nrows)
    for c in cols:
        y = intmat.solve_rational(basis, c) if basis and basis[0] else None
        if y is None or any(v.denominator != 1 for v in y):
            return False
    return True


# --- building ------------------------------------------------------------------------------------

def build(scheme, rule, twist=None, n=0, support=None, coeff=None):
    """Assemble the truncated complex on the line of grade n.

    The term at delta p uses M_{p-n}; closed points come from ``support``
    (a SupportSet or a bound) and the generic term is generated by units
    whose divisor lies in that support.
    """
    rule = CoefficientRule.parse(rule)
    coeff = CoefficientRing.parse(coeff) if coeff is not None else rule.default_coeff
    twist = twist or TwistData(0)
    twist.check(scheme)
    if support is None:
        support = SupportSet.of(scheme, 1)
    elif not isinstance(support, SupportSet):
        support = SupportSet.of(scheme, support)
    engine = make_rule(rule, scheme, twist, coeff)
    terms = {}
    if scheme.kind == "Empty":
        return GerstenComplex(scheme, rule, twist, n, support, coeff, {}, {})
    drop_two = rule.uses_witt and coeff is CoefficientRing.INT
    closed = [x for x in scheme.points(-1, support) if not (drop_two and _residue_char_two(x))] \
        if -1 in scheme.deltas else []
    pl = generating_places(scheme, closed, keep_two=not drop_two)
    generic = scheme.generic_point()
    r0 = 0 - n
    gens, elems, coords, names, mods, gtags, ctags, touches = engine.generic(pl, r0)
    terms[0] = [Term(generic, 0, n, twist.label() if twist.degree else "1", gens, elems, coords, names, mods,
                     gtags, ctags, touches)]
    differentials = {}
    if -1 in scheme.deltas:
        r1 = -1 - n
        closed_terms = []
        for x in closed:
            names_c, mods_c, ctags_c = engine.closed_layout(x, r1)
            basis, _ = omega_twist(scheme, x)
            label = basis if not twist.degree else f"{basis}|{twist.label()}"
            unit = [[int(i == j) for i in range(len(names_c))] for j in range(len(names_c))]
            closed_terms.append(Term(x, -1, n, label, list(names_c), [None] * len(names_c), unit, list(names_c),
                                     list(mods_c), ["plus" if c == "milnor" else "minus" for c in ctags_c],
                                     list(ctags_c)))
        terms[-1] = closed_terms
        D = []
        for t in closed_terms:
            block = [[0] * len(gens) for _ in t.generators]
            if t.generators:
                for j, e in enumerate(elems):
                    if not _may_ramify(touches[j], t.point, twist):
                        continue
                    col = engine.residue(e, t.point, r0)
                    for i, val in enumerate(col):
                        block[i][j] = val
            D.extend(block)
        differentials[0] = D
    c = GerstenComplex(scheme, rule, twist, n, support, coeff, terms, differentials)
    c.check_square_zero()
    return c


def _residue_char_two(x):
    return x.valuation is not None and x.valuation.residue_characteristic == 2


def _may_ramify(touched, point, twist):
    if point.label in touched:
        return True
    return point.valuation.kind == "infinity" and twist.degree % 2 == 1


# --- homology --------------------------------------------------------------------------------------

_COEFF_ORDER = [CoefficientRing.INT, CoefficientRing.INT_HALF, CoefficientRing.RAT]


@dataclass(frozen=True)
class HomologyReport:
    """Homology at one delta value of a truncated complex."""

    degree: int
    n: int
    coeff: CoefficientRing
    free_rank: int
    torsion: tuple = ()
    stabilized: bool = False
    support_used: tuple = ()
    closure_complete: bool = False
    scheme: str = ""
    rule: str = ""
    twist: str = "O(0)"
    rounds: int = 0
    note: str = ""

    @property
    def r(self):
        return self.degree - self.n

    @property
    def invariant_factors(self):
        return list(self.torsion) + [0] * self.free_rank

    @property
    def rank(self):
        return self.free_rank

    def is_zero(self):
        return self.free_rank == 0 and not self.torsion

    def render(self):
        sym = self.coeff.free_symbol
        parts = [f"Z/{d}" for d in self.torsion]
        if self.free_rank:
            parts.append(sym if self.free_rank == 1 else f"{sym}^{self.free_rank}")
        return " x ".join(parts) if parts else "0"

    def same_group(self, o):
        return (self.coeff, self.free_rank, tuple(self.torsion)) == (o.coeff, o.free_rank, tuple(o.torsion))

    def to_json(self):
        return {"degree": self.degree, "n": self.n, "r": self.r, "coeff": self.coeff.value,
                "freeRank": self.free_rank, "torsion": list(self.torsion),
                "invariantFactors": self.invariant_factors, "rendered": self.render(),
                "stabilized": self.stabilized,
                "supportUsed": {"points": list(self.support_used), "closureComplete": self.closure_complete},
                "scheme": self.scheme, "rule": self.rule, "twist": self.twist, "rounds": self.rounds,
                "note": self.note}

    @classmethod
    def from_json(cls, d):
        return cls(d["degree"], d["n"], CoefficientRing.parse(d["coeff"]), d["freeRank"], tuple(d["torsion"]),
                   d["stabilized"], tuple(d["supportUsed"]["points"]), d["supportUsed"]["closureComplete"],
                   d["scheme"], d["rule"], d["twist"], d["rounds"], d["note"])


def _effective_coeff(c, coeff):
    coeff = CoefficientRing.parse(coeff) if coeff is not None else c.coeff
    if _COEFF_ORDER.index(coeff) < _COEFF_ORDER.index(c.coeff):
        return c.coeff, f"complex built over {c.coeff.value}; reported over {c.coeff.value}"
    return coeff, ""


def homology_at(c, p, coeff=None):
    """Homology at delta p, exact over Z (Smith form) or by ranks over Q."""
    if p not in c.terms:
        raise InvalidDelta(f"{c.scheme.spec} has no term at delta {p}")
    coeff, note = _effective_coeff(c, coeff)
    if coeff is CoefficientRing.RAT:
        free, tors = _rational_homology(c, p), []
    else:
        free, tors = _integral_homology(c, p)
        free, tors = coeff.localize(free, tors)
    closure = c.support.closure_complete or not c.scheme.deltas or c.scheme.kind in ("SpecField", "SpecDVR")
    return HomologyReport(p, c.n, coeff, free, tuple(tors), closure, tuple(c.support.labels()),
                          c.support.closure_complete, c.scheme.spec, c.rule.value, c.twist.label(), 0, note)


def homology(c, coeff=None):
    """Reports for every delta value of the complex, keyed by delta."""
    return {p: homology_at(c, p, coeff) for p in c.degrees}


def _rational_homology(c, p):
    C = c.coordinate_matrix(p, free_only=True)
    dim = intmat.rational_rank(C) if C else 0
    out_rank = 0
    if p in c.differentials and c.differentials[p]:
        tgt = c.coordinate_matrix(p - 1, free_only=True)
        if tgt:
            out_rank = intmat.rational_rank(intmat.matmul(tgt, c.differentials[p]))
    in_rank = 0
    if p + 1 in c.differentials and c.differentials[p + 1] and C:
        in_rank = intmat.rational_rank(intmat.matmul(C, c.differentials[p + 1]))
    return dim - out_rank - in_rank


def _cycles(c, p):
    g = c.size(p)
    D = c.differentials.get(p)
    if not D or c.size(p - 1) == 0:
        return intmat.identity(g)
    R = c.relations(p - 1)
    h = c.size(p - 1)
    A = intmat.hstack(D, intmat.from_columns(R, h), nrows=h) if R else D
    K = intmat.kernel(A, g + len(R))
    proj = [K[i] for i in range(g)]
    return intmat.column_basis(proj, g)


def _boundaries(c, p):
    g = c.size(p)
    cols = list(c.relations(p))
    D_in = c.differentials.get(p + 1)
    if D_in:
        cols.extend(intmat.columns(D_in))
    return intmat.from_columns([x for x in cols if any(x)], g)


def _integral_homology(c, p):
    g = c.size(p)
    if g == 0:
        return 0, []
    Z = _cycles(c, p)
    return intmat.quotient(Z, _boundaries(c, p), g)


def generates_homology(c, p, vector, coeff=None):
    """Whether an integer vector at delta p is a cycle, and how much of H_p its class generates.

    Returns ``(is_cycle, {"free_part": bool, "all": bool})`` where ``free_part``
    means the quotient of H_p by the class is finite, and ``all`` means it
    vanishes after localization.
    """
    coeff, _ = _effective_coeff(c, coeff)
    g = c.size(p)
    D = c.differentials.get(p)
    if D and c.size(p - 1):
        image = intmat.matmul(D, [[x] for x in vector])
        if coeff is CoefficientRing.RAT or c.coeff is not CoefficientRing.INT:
            tgt = c.coordinate_matrix(p - 1, free_only=True)
            is_cycle = not any(v for row in intmat.matmul(tgt, image) for v in row) if tgt else True
        else:
            is_cycle = _in_lattice(image, c.relations(p - 1), c.size(p - 1))
        if not is_cycle:
            return False, {"free_part": False, "all": False}
    Z = _cycles(c, p)
    B_plus = intmat.hstack(_boundaries(c, p), [[x] for x in vector], nrows=g)
    free, tors = intmat.quotient(Z, B_plus, g) if Z and Z[0] else (0, [])
    free, tors = coeff.localize(free, tors)
    return True, {"free_part": free == 0, "all": free == 0 and not tors}


# --- stabilization ---------------------------------------------------------------------------------

@dataclass
class StabilizationResult:
    reports: dict
    stabilized: bool
    rounds: int
    history: list = dc_field(default_factory=list)

    def __getitem__(self, p):
        return self.reports[p]


def stabilize(builder, max_rounds=4, coeff=None):
    """Enlarge the support round by round until two consecutive homology reports agree.

    ``builder(round)`` returns a complex for a given round (rounds start at 1).
    Complexes whose support is already complete stabilize in round 0.
    """
    history = []
    prev = None
    last = None
    for rnd in range(1, max_rounds + 1):
        c = builder(rnd)
        reps = homology(c, coeff)
        history.append({p: r.render() for p, r in reps.items()})
        if c.support.closure_complete or c.scheme.kind in ("SpecField", "SpecDVR", "Empty"):
            return StabilizationResult(_mark(reps, True, 0), True, 0, history)
        if prev is not None and all(reps[p].same_group(prev[p]) for p in reps):
            return StabilizationResult(_mark(reps, True, rnd), True, rnd, history)
        prev = last = reps
    return StabilizationResult(_mark(last or {}, False, max_rounds), False, max_rounds, history)


def _mark(reps, flag, rounds):
    from dataclasses import replace
    return {p: replace(r, stabilized=flag, rounds=rounds) for p, r in reps.items()}


# --- plus/minus split ----------------------------------------------------------------------------

def plus_minus_split(c):
    """Block decomposition into the plus (Milnor) and minus (Witt) complexes."""
    if not c.coeff.two_invertible:
        raise TwoNotInvertible("the plus/minus split needs 2 inverted")
    return _restrict(c, "plus", "milnor"), _restrict(c, "minus", "witt")


def _restrict(c, gtag, ctag):
    other_g = {"plus": "minus", "minus": "plus"}[gtag]
    other_c = {"milnor": "witt", "witt": "milnor"}[ctag]
    terms = {}
    keep = {}
    for p, ts in c.terms.items():
        new_ts = []
        idx = []
        offset = 0
        for t in ts:
            gsel = [j for j, tag in enumerate(t.gen_tags) if tag == gtag]
            csel = [i for i, tag in enumerate(t.coord_tags) if tag == ctag]
            for j, tag in enumerate(t.gen_tags):
                for i, ct in enumerate(t.coord_tags):
                    if (tag, ct) in ((gtag, other_c), (other_g, ctag)) and t.coords[j][i]:
                        raise ChowWittError(f"coordinates at {t.point.label} are not block diagonal")
            if t.point.is_generic:
                coords = [[t.coords[j][i] for i in csel] for j in gsel]
                gens = [t.generators[j] for j in gsel]
            else:
                gens = [t.generators[i] for i in csel]
                coords = [[int(a == b) for a in range(len(csel))] for b in range(len(csel))]
                gsel = csel
            new_ts.append(Term(t.point, t.p, t.n, t.twist_label, gens, [t.elements[j] for j in gsel], coords,
                               [t.coord_names[i] for i in csel], [t.moduli[i] for i in csel],
                               [gtag] * len(gens), [ctag] * len(csel),
                               [t.touches[j] for j in gsel] if t.touches else []))
            idx.extend(offset + j for j in gsel)
            offset += len(t.generators)
        terms[p] = new_ts
        keep[p] = idx
    diffs = {}
    for p, D in c.differentials.items():
        rows, cols = keep.get(p - 1, []), keep[p]
        all_rows = range(c.size(p - 1))
        for i in all_rows:
            if i in rows:
                continue
            for j in cols:
                if D[i][j]:
                    raise ChowWittError("differential is not block diagonal")
        diffs[p] = [[D[i][j] for j in cols] for i in rows]
    return GerstenComplex(c.scheme, c.rule, c.twist, c.n, c.support, c.coeff, terms, diffs)
