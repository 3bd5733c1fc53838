"""Checkers that recompute named statements from the lower modules.

Each checker returns a :class:`TheoremReport`.  A failing report always
carries a concrete counterexample; a truncation that does not stabilize is
reported as inconclusive rather than as a failure.
"""

import random
from dataclasses import dataclass, field as dc_field

from .errors import CharacteristicTwo, NotFormallyReal
from .gersten import CoefficientRule, build, generates_homology, homology, stabilize
from .scalars import GF, QQ
from .scalars.fields import is_prime
from .scalars.parse import field_spec
from .scheme import CatalogScheme, TwistData, nu_q, round_bound
from .wittring import (CoefficientRing, GWClass, epsilon, epsilon_idempotents, group_structure, random_gw)

DEFAULT_SEED = 20240601


@dataclass
class TheoremReport:
    theorem_id: str
    status: str
    witnesses: dict = dc_field(default_factory=dict)
    parameters: dict = dc_field(default_factory=dict)
    counterexample: object = None
    seed: object = None

    @property
    def passed(self):
        return self.status == "pass"

    @property
    def exit_code(self):
        return {"pass": 0, "fail": 1, "inconclusive": 2}[self.status]

    def to_json(self):
        return {"theoremId": self.theorem_id, "status": self.status, "witnesses": self.witnesses,
                "parameters": self.parameters, "counterexample": self.counterexample, "seed": self.seed}

    @classmethod
    def from_json(cls, d):
        return cls(d["theoremId"], d["status"], d["witnesses"], d["parameters"], d.get("counterexample"),
                   d.get("seed"))


def _report(theorem_id, failures, witnesses, parameters, seed=None, inconclusive=False):
    if failures:
        return TheoremReport(theorem_id, "fail", witnesses, parameters, failures[0], seed)
    return TheoremReport(theorem_id, "inconclusive" if inconclusive else "pass", witnesses, parameters, None, seed)


# --- W(F_p)[1/2] = 0 ------------------------------------------------------------------------------

def check_key_lemma_witt(p_max):
    """For every odd prime p <= p_max: |W(F_p)| = 4, exponent divides 4, so W(F_p)[1/2] = 0."""
    witnesses, failures = {}, []
    for p in range(3, p_max + 1):
        if not is_prime(p):
            continue
        G = group_structure(GF(p))
        exponent = max(G.torsion, default=1)
        localized = group_structure(GF(p), CoefficientRing.INT_HALF)
        expected = "Z/4" if p % 4 == 3 else "Z/2 x Z/2"
        witnesses[str(p)] = G.render()
        if G.order != 4 or 4 % exponent or not localized.is_trivial() or G.render() != expected:
            failures.append({"p": p, "structure": G.render(), "localized": localized.render()})
    return _report("keylemma-witt", failures, witnesses, {"pMax": p_max})


# --- GW[1/2] = Z[1/2] x W[1/2] ------------------------------------------------------------------

def _gw_generators(F):
    if F.kind == "rationals":
        return [GWClass.bracket(F, QQ(a)) for a in (1, -1, 2, -2, 3, -3, 5, -5, 6, -6)]
    g = min((e for e in F.elements() if not e.is_zero() and not e.is_square()), key=lambda e: e.sort_key())
    return [GWClass.one(F), GWClass.bracket(F, g)]


def _two_power_annihilates(x, limit=4):
    """Smallest k <= limit with 2^k x = 0 in GW, or None."""
    acc = x
    for k in range(limit + 1):
        if acc.is_zero():
            return k
        acc = acc * 2
    return None


def check_gw_splitting(F, samples=100, seed=DEFAULT_SEED):
    """x -> (e+ x, e- x) is a bijection GW(F)[1/2] -> Z[1/2] x W(F)[1/2] and respects products."""
    if F.characteristic == 2:
        raise CharacteristicTwo("the splitting needs 2 invertible")
    coeff = CoefficientRing.INT_HALF
    e_plus, e_minus = epsilon_idempotents(F, coeff)
    eps = epsilon(F)
    one = GWClass.one(F)
    failures = []
    if not (e_plus * e_plus - e_plus).is_zero() or not (e_minus * e_minus - e_minus).is_zero():
        failures.append({"reason": "idempotents are not idempotent"})
    if not (e_plus * e_minus).is_zero():
        failures.append({"reason": "idempotents are not orthogonal"})
    minus_rank = 0
    annihilation = {}
    for x in _gw_generators(F):
        loc = x.localize(coeff)
        plus_part, minus_part = e_plus * loc, e_minus * loc
        if not (plus_part + minus_part - loc).is_zero():
            failures.append({"element": repr(x), "reason": "parts do not add back"})
        if not (plus_part - e_plus * x.rank).is_zero():
            failures.append({"element": repr(x), "reason": "plus part is not determined by the rank"})
        # integral witness: (1 + eps) x is 2-power torsion exactly when its signatures vanish
        twice_minus = (one + eps) * x
        k = _two_power_annihilates(twice_minus)
        annihilation[repr(x)] = k if k is not None else "signature " + ",".join(str(s) for s in minus_part.signatures)
        if k is None and all(s == 0 for s in minus_part.signatures):
            failures.append({"element": repr(x), "reason": "minus part is neither torsion nor detected"})
        if any(minus_part.signatures):
            minus_rank = 1
    rng = random.Random(seed)
    checked = 0
    for _ in range(samples):
        x, y = random_gw(F, rng), random_gw(F, rng)
        xy = x * y
        for e_loc, sign in ((e_plus, -1), (e_minus, 1)):
            lhs = e_loc * xy.localize(coeff)
            rhs = (e_loc * x.localize(coeff)) * (e_loc * y.localize(coeff))
            # integral form of the same identity: (1 -+ eps)x * (1 -+ eps)y = 2 (1 -+ eps) xy
            u = one + eps * sign
            integral_ok = (u * x) * (u * y) == (u * xy) * 2
            if not (lhs - rhs).is_zero() or not integral_ok:
                failures.append({"x": repr(x), "y": repr(y), "part": "plus" if sign < 0 else "minus"})
        checked += 1
    witnesses = {"field": field_spec(F), "plusFactor": "Z[1/2] (rank)",
                 "minusFactorRank": minus_rank, "minusTwoPowerAnnihilation": annihilation,
                 "randomPairs": checked}
    return _report("gw-splitting", failures, witnesses, {"field": field_spec(F), "samples": samples}, seed)


# --- rational Chow-Witt decomposition ---------------------------------------------------------------

def _stable_homology(scheme, rule, twist, n, coeff, max_rounds):
    return stabilize(lambda k: build(scheme, rule, twist, n, support=round_bound(scheme, k), coeff=coeff),
                     max_rounds, coeff)


def check_chowwitt_decomposition(scheme, twist=None, n=0, max_rounds=3):
    """rank CH~ line = rank Milnor line + rank Witt cohomology of the characteristic-zero fiber, degreewise."""
    twist = twist or TwistData(0)
    rat = CoefficientRing.RAT
    left = _stable_homology(scheme, CoefficientRule.MILNOR_WITT_RATIONAL, twist, n, rat, max_rounds)
    milnor = _stable_homology(scheme, CoefficientRule.MILNOR_ONLY, twist, n, rat, max_rounds)
    fiber, inclusion = nu_q(scheme)
    fiber_twist = twist if fiber.kind == "P1" else TwistData(0)
    if fiber.kind == "Empty":
        witt_ranks = {}
        witt_stable = True
    else:
        witt = _stable_homology(fiber, CoefficientRule.WITT_SHEAF, fiber_twist, n, rat, max_rounds)
        witt_ranks = {p: r.free_rank for p, r in witt.reports.items()}
        witt_stable = witt.stabilized
    degrees = sorted(set(left.reports) | set(milnor.reports) | set(witt_ranks), reverse=True)
    rows, failures = {}, []
    for p in degrees:
        lr = left.reports[p].free_rank if p in left.reports else 0
        mr = milnor.reports[p].free_rank if p in milnor.reports else 0
        wr = witt_ranks.get(p, 0)
        rows[str(p)] = {"chowWitt": lr, "chow": mr, "witt": wr}
        if lr != mr + wr:
            failures.append({"delta": p, "chowWitt": lr, "chow": mr, "witt": wr})
    stable = left.stabilized and milnor.stabilized and witt_stable
    params = {"scheme": scheme.spec, "twist": twist.label(), "n": n, "fiber": fiber.spec, "inclusion": inclusion}
    witnesses = {"ranks": rows, "rounds": {"chowWitt": left.rounds, "chow": milnor.rounds}}
    return _report("chowwitt-decomposition", failures, witnesses, params, inconclusive=not stable)


# --- Gersten-Witt resolution ----------------------------------------------------------------------

def check_gersten_witt_resolution(scheme, rounds=5, coeff=CoefficientRing.INT_HALF):
    """H_0 of the Witt complex is free of rank 1 on <1>, and the closed-point line has no homology."""
    coeff = CoefficientRing.parse(coeff)
    if not scheme.is_arithmetic:
        raise ValueError("the resolution check runs on SpecZ, SpecZ[1/S] or a DVR")
    rule = CoefficientRule.WITT_SHEAF if coeff is CoefficientRing.INT else CoefficientRule.WITT_MINUS
    result = stabilize(lambda k: build(scheme, rule, None, 0, support=round_bound(scheme, k), coeff=coeff),
                       rounds, coeff)
    final = build(scheme, rule, None, 0, support=round_bound(scheme, max(result.rounds, 1)), coeff=coeff)
    h0, h1 = result.reports[0], result.reports.get(-1)
    vec = final.generic_vector(0, "<1>")
    cycle, gen_info = generates_homology(final, 0, vec, coeff)
    failures = []
    if not cycle:
        failures.append({"element": "<1>", "reason": "not a cycle"})
    if h0.free_rank != 1:
        failures.append({"delta": 0, "group": h0.render(), "reason": "free rank is not 1"})
    if not gen_info["free_part"]:
        failures.append({"element": "<1>", "reason": "does not generate the free part", "group": h0.render()})
    if coeff.two_invertible and (h0.torsion or not gen_info["all"]):
        failures.append({"delta": 0, "group": h0.render(), "reason": "not generated by <1> after inverting 2"})
    if h1 is not None and not h1.is_zero():
        failures.append({"delta": -1, "group": h1.render(), "reason": "second residue is not surjective"})
    witnesses = {"H0": h0.to_json(), "H-1": h1.to_json() if h1 else None, "generator": "<1>",
                 "history": result.history}
    params = {"scheme": scheme.spec, "rounds": rounds, "coeff": coeff.value}
    return _report("gersten-witt-resolution", failures, witnesses, params, inconclusive=not result.stabilized)


# --- formally real fields --------------------------------------------------------------------------

def _base_field(scheme):
    if scheme.is_arithmetic:
        return QQ
    return scheme.base


def check_formally_real_nonvanishing(scheme, support=2):
    """<1> lies in the kernel of the first Witt differential over Q and has signature 1."""
    k = _base_field(scheme)
    if k is None or k.kind != "rationals":
        raise NotFormallyReal(f"{scheme.spec}: the base field is not formally real")
    c = build(scheme, CoefficientRule.WITT_SHEAF, None, 0, support=support, coeff=CoefficientRing.RAT)
    vec = c.generic_vector(0, "<1>")
    failures = []
    D = c.differentials.get(0)
    image = [sum(a * b for a, b in zip(row, vec)) for row in D] if D else []
    if any(image):
        failures.append({"element": "<1>", "reason": "nonzero residue", "image": image})
    t = c.terms[0][0]
    sig_index = t.coord_names.index("sig" if "sig" in t.coord_names else "sig_const")
    signature = t.coords[t.generators.index("<1>")][sig_index]
    if signature != 1:
        failures.append({"element": "<1>", "signature": signature})
    h0 = homology(c)[0]
    if h0.free_rank < 1:
        failures.append({"delta": 0, "group": h0.render()})
    witnesses = {"class": "<1>", "signature": signature, "kernelRank": h0.free_rank}
    return _report("formally-real-nonvanishing", failures, witnesses, {"scheme": scheme.spec, "support": support})


# --- sphere endomorphisms ----------------------------------------------------------------------------

def sphere_endo_witt_part(scheme, n, i, max_rounds=4):
    """Rank of H^{n-i}(nu_Q(s), W) (x) Q; the K-theory summand is not computed."""
    fiber, _ = nu_q(scheme)
    q = n - i
    out = {"scheme": scheme.spec, "fiber": fiber.spec, "n": n, "i": i, "cohomologicalDegree": q,
           "wittRank": 0, "wittTorsion": [], "kSummand": "not computed", "stabilized": True}
    if fiber.kind == "Empty" or -q not in fiber.deltas:
        return out
    res = _stable_homology(fiber, CoefficientRule.WITT_SHEAF, TwistData(0), 0, CoefficientRing.RAT, max_rounds)
    rep = res.reports[-q]
    out.update(wittRank=rep.free_rank, stabilized=res.stabilized)
    return out


# --- registry used by the command line ------------------------------------------------------------

THEOREMS = ("keylemma-witt", "gw-splitting", "chowwitt-decomposition", "gersten-witt-resolution",
            "formally-real-nonvanishing")


def run_checker(theorem_id, **params):
    from .scalars.parse import parse_field
    if theorem_id == "keylemma-witt":
        return check_key_lemma_witt(int(params.get("pmax") or 7))
    if theorem_id == "gw-splitting":
        return check_gw_splitting(parse_field(params.get("field") or "Fp:5"), int(params.get("samples") or 100),
                                  int(params.get("seed") or DEFAULT_SEED))
    scheme = CatalogScheme.parse(params.get("scheme") or "SpecZ")
    if theorem_id == "chowwitt-decomposition":
        twist = TwistData.parse(params.get("twist"))
        return check_chowwitt_decomposition(scheme, twist, int(params.get("n") or 0),
                                            int(params.get("rounds") or 3))
    if theorem_id == "gersten-witt-resolution":
        return check_gersten_witt_resolution(scheme, int(params.get("rounds") or 5),
                                             params.get("coeff") or "IntHalf")
    if theorem_id == "formally-real-nonvanishing":
        return check_formally_real_nonvanishing(scheme)
    raise KeyError(theorem_id)
