"""Command-line front end.

Verbs: witt, gw, mw, residue, transfer, gersten, verify, catalog.  Every verb
prints plain text by default and a schema-versioned JSON document with
``--json``.  Exit codes: 0 success or pass, 1 theorem failure, 2 inconclusive,
64 usage error, 65 computation error.
"""

import argparse
import json
import sys

from .errors import ChowWittError
from .scalars.parse import field_spec, parse_field, parse_form_entries, parse_poly

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE, EXIT_COMPUTE = 0, 1, 2, 64, 65


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _converting(fn, *args):
    """Run an input conversion; malformed values are usage errors."""
    try:
        return fn(*args)
    except (ChowWittError, ValueError, KeyError) as exc:
        raise UsageError(str(exc)) from None


# --- shared argument helpers -------------------------------------------------------------------

def _field(args):
    return _converting(parse_field, args.field)


def _form(F, text):
    from .qform import QuadForm
    return QuadForm(F, _converting(parse_form_entries, F, text))


def _coeff(text):
    from .wittring import CoefficientRing
    return _converting(CoefficientRing.parse, text)


def _primes(text):
    if not text:
        return None
    return _converting(lambda s: tuple(int(p) for p in s.split(",")), text)


def _valuation(F, text):
    from .scalars.valuation import Valuation

    def build():
        if F.kind == "rationals":
            if text in ("inf", "real"):
                return Valuation.real()
            return Valuation.at_prime(int(text))
        if F.kind == "ratfunc":
            if text == "inf":
                return Valuation.at_infinity(F)
            return Valuation.at_poly(F, parse_poly(F.base, text))
        raise ValueError(f"{field_spec(F)} carries no discrete valuations")
    return _converting(build)


def _expression(F, text, degree=None):
    from .mwk import MWExpr
    return _converting(MWExpr.parse, F, text, degree)


def _scheme(text):
    from .scheme import CatalogScheme
    return _converting(CatalogScheme.parse, text)


def _twist(text):
    from .scheme import TwistData
    return _converting(TwistData.parse, text)


# --- verb handlers: each returns (payload, text, exit code) ---------------------------------------

def _witt(args):
    from .qform import form_invariants, hilbert_symbol, is_isotropic, witt_decompose
    from .wittring import group_structure
    if args.action == "group":
        F = _field(args)
        G = group_structure(F, _coeff(args.coeff), _primes(args.primes))
        return G.to_json(), G.render(), EXIT_OK
    if args.action == "hilbert":
        a, b = _converting(_rational, args.a), _converting(_rational, args.b)
        place = args.place if args.place == "inf" else _converting(int, args.place)
        value = _converting(hilbert_symbol, a, b, place)
        return {"a": args.a, "b": args.b, "place": str(place), "value": value}, str(value), EXIT_OK
    F = _field(args)
    q = _form(F, args.form)
    if args.action == "class":
        kernel, planes = witt_decompose(q)
        payload = {"field": field_spec(F), "entries": [str(a) for a in kernel.entries], "hyperbolicPlanes": planes}
        text = ("0" if kernel.rank == 0 else repr(kernel)) + (f" + {planes}H" if planes else "")
        return payload, text, EXIT_OK
    if args.action == "isotropic":
        value = is_isotropic(q)
        return {"field": field_spec(F), "isotropic": value}, "isotropic" if value else "anisotropic", EXIT_OK
    inv = form_invariants(q)
    return inv.to_json(), json.dumps(inv.to_json(), sort_keys=True), EXIT_OK


def _rational(text):
    from .scalars.fields import parse_rational
    return parse_rational(text)


def _gw(args):
    from .wittring import GWClass, epsilon_idempotents
    F = _field(args)
    coeff = _coeff(args.coeff)
    if args.action == "idempotents":
        plus, minus = epsilon_idempotents(F, coeff)
        payload = {"field": field_spec(F), "ePlus": plus.to_json(), "eMinus": minus.to_json()}
        return payload, f"e+ = {plus}\ne- = {minus}", EXIT_OK
    x = GWClass.of_form(_form(F, args.form))
    if args.action == "class":
        return x.to_json(), repr(x), EXIT_OK
    plus, minus = epsilon_idempotents(F, coeff)
    loc = x.localize(coeff)
    p, m = plus * loc, minus * loc
    payload = {"element": x.to_json(), "plus": p.to_json(), "minus": m.to_json()}
    return payload, f"plus: {p}\nminus: {m}", EXIT_OK


def _mw(args):
    from .mwk import eta_shift, normal_form, to_gw
    F = _field(args)
    e = _expression(F, args.expr, args.degree)
    if args.action == "to-gw":
        g = to_gw(e)
        return g.to_json(), repr(g), EXIT_OK
    if args.action == "eta-shift":
        w = eta_shift(e)
        return w.to_json(), repr(w), EXIT_OK
    nf = normal_form(e)
    return nf.to_json(), repr(nf), EXIT_OK


def _residue(args):
    from .mwk import normal_form, residue
    from .wittring import second_residue
    F = _field(args)
    v = _valuation(F, args.at)
    uniformizer = _converting(lambda: F(_element(F, args.uniformizer))) if args.uniformizer else None
    if (args.form is None) == (args.expr is None):
        raise UsageError("residue: give exactly one of --form or --expr")
    if args.form is not None:
        r = second_residue(_form(F, args.form), v, _coeff(args.coeff), uniformizer)
        return r.to_json(), repr(r), EXIT_OK
    r = residue(_expression(F, args.expr, args.degree), v, uniformizer)
    nf = r.normal_form()
    payload = r.to_json()
    return payload, f"{r}\nnormal form: {nf}", EXIT_OK


def _element(F, text):
    from .scalars.parse import parse_element
    return parse_element(F, text)


def _transfer(args):
    from .scalars.fields import ExtensionField
    from .wittring import GWClass, scharlau_transfer, witt_class_of
    k = _field(args)
    if args.modulus:
        modulus = _converting(parse_poly, k, args.modulus.replace("x", "t"))
        L = _converting(ExtensionField, k, modulus)
    elif k.kind == "finite":
        L = k
    else:
        raise UsageError("transfer: --modulus is required unless --field is a non-prime finite field")
    q = _form(L, args.form)
    c = GWClass.of_form(q) if args.gw else witt_class_of(q)
    out = scharlau_transfer(c, args.functional)
    payload = {"from": L.name() if L.kind == "extension" else field_spec(L), "functional": args.functional,
               "result": out.to_json()}
    return payload, f"{out} over {field_spec(out.field)}", EXIT_OK


def _gersten(args):
    from .gersten import CoefficientRule, build, homology, stabilize
    from .scheme import round_bound
    scheme = _scheme(args.scheme)
    rule = _converting(CoefficientRule.parse, args.rule)
    twist = _twist(args.twist) if args.twist else None
    coeff = _coeff(args.coeff) if args.coeff else rule.default_coeff
    if args.action == "build":
        support = args.support_degree if args.support_degree is not None else round_bound(scheme, 1)
        c = build(scheme, rule, twist, args.n, support=support, coeff=coeff)
        payload = c.to_json(dump_matrices=args.dump_matrices)
        lines = [f"{scheme.spec} {rule.value} n={args.n} twist={c.twist.label()}"]
        for p in c.degrees:
            lines.append(f"delta={p}: {c.size(p)} generators on {', '.join(t['point'] for t in c.term_labels(p)) or 'nothing'}")
        if args.dump_matrices:
            for p, m in sorted(c.differentials.items()):
                lines.append(f"d[{p}] = {c.matrix(p)}")
        return payload, "\n".join(lines), EXIT_OK
    if args.rounds:
        result = stabilize(lambda k: build(scheme, rule, twist, args.n, support=round_bound(scheme, k), coeff=coeff),
                           args.rounds, coeff)
        reports = result.reports
        stable = result.stabilized
    else:
        support = args.support_degree if args.support_degree is not None else round_bound(scheme, 1)
        c = build(scheme, rule, twist, args.n, support=support, coeff=coeff)
        reports = homology(c, coeff)
        stable = True
    payload = {"reports": [reports[p].to_json() for p in sorted(reports, reverse=True)], "stabilized": stable}
    if args.dump_matrices and not args.rounds:
        payload["complex"] = c.to_json(dump_matrices=True)
    text = "\n".join(f"H at delta={p}: {reports[p].render()}" for p in sorted(reports, reverse=True))
    return payload, text, EXIT_OK if stable else EXIT_INCONCLUSIVE


def _verify(args):
    from . import verify as V
    if args.theorem == "sphere-endo":
        out = V.sphere_endo_witt_part(_scheme(args.scheme or "SpecZ"), args.n or 0, args.i, args.rounds or 4)
        text = f"Witt part rank {out['wittRank']} (K-summand {out['kSummand']})"
        return out, text, EXIT_OK if out["stabilized"] else EXIT_INCONCLUSIVE
    params = {"pmax": args.pmax, "field": args.field, "samples": args.samples, "seed": args.seed,
              "scheme": args.scheme, "twist": args.twist, "n": args.n, "rounds": args.rounds, "coeff": args.coeff}
    if args.field:
        _field(args)
    if args.scheme:
        _scheme(args.scheme)
    report = V.run_checker(args.theorem, **params)
    return report.to_json(), f"{report.theorem_id}: {report.status}", report.exit_code


def _catalog(args):
    from .scheme import nu_q, omega_twist, round_bound
    if args.action == "schemes":
        kinds = ["SpecZ", "SpecZ[1/p,...]", "DVR/p", "Spec/<field>", "A1/<field>", "P1/<field>"]
        return {"schemes": kinds}, "\n".join(kinds), EXIT_OK
    scheme = _scheme(args.scheme)
    if args.action == "nu-q":
        fiber, how = nu_q(scheme)
        return {"scheme": scheme.spec, "fiber": fiber.spec, "inclusion": how}, f"{fiber.spec} ({how})", EXIT_OK
    bound = args.degree if args.degree is not None else round_bound(scheme, 1)
    points = scheme.points(args.delta, bound)
    if args.action == "twist":
        rows = [{"point": x.label, "basis": omega_twist(scheme, x)[0]} for x in points]
        return {"scheme": scheme.spec, "twists": rows}, "\n".join(f"{r['point']}: {r['basis']}" for r in rows), EXIT_OK
    rows = [x.to_json() for x in points]
    text = "\n".join(f"{x.label} (delta {x.delta}, residue field {field_spec(x.residue_field)})" for x in points)
    return {"scheme": scheme.spec, "delta": args.delta, "bound": bound, "points": rows}, text, EXIT_OK


# --- parser ------------------------------------------------------------------------------------------

def _common(p):
    p.add_argument("--json", action="store_true", help="print a JSON document instead of text")
    p.add_argument("--out", metavar="FILE", help="also write the JSON document to FILE")


def build_parser():
    top = _Parser(prog="chowwitt", description="Quadratic forms, Milnor-Witt K-theory and Gersten complexes.")
    verbs = top.add_subparsers(dest="verb", parser_class=_Parser, required=True)

    w = verbs.add_parser("witt", help="Witt groups, Witt classes, form invariants and Hilbert symbols")
    w.add_argument("action", choices=["group", "class", "invariants", "isotropic", "hilbert"])
    w.add_argument("--field", default="Q")
    w.add_argument("--form", help="diagonal form such as <1,1,-7>")
    w.add_argument("--coeff", default="Int", help="Int, IntHalf or Rat")
    w.add_argument("--primes", help="comma-separated primes truncating W(Q)")
    w.add_argument("--a", help="first Hilbert symbol argument (rational)")
    w.add_argument("--b", help="second Hilbert symbol argument (rational)")
    w.add_argument("--place", default="inf", help="prime or inf")
    _common(w)

    g = verbs.add_parser("gw", help="Grothendieck-Witt classes and the e+/e- splitting")
    g.add_argument("action", choices=["class", "split", "idempotents"])
    g.add_argument("--field", default="Q")
    g.add_argument("--form")
    g.add_argument("--coeff", default="IntHalf")
    _common(g)

    m = verbs.add_parser("mw", help="normal forms of Milnor-Witt symbols")
    m.add_argument("action", choices=["normal", "to-gw", "eta-shift"])
    m.add_argument("--field", default="Q")
    m.add_argument("--expr", required=True, help="symbol expression such as eta^1*[2][t]")
    m.add_argument("--degree", type=int)
    _common(m)

    r = verbs.add_parser("residue", help="second residue of a form or a symbol at a place")
    r.add_argument("--field", required=True)
    r.add_argument("--at", required=True, help="prime, monic polynomial in t, or inf")
    r.add_argument("--form")
    r.add_argument("--expr")
    r.add_argument("--degree", type=int)
    r.add_argument("--uniformizer")
    r.add_argument("--coeff", default="Int")
    _common(r)

    t = verbs.add_parser("transfer", help="Scharlau transfer along k[x]/(m) -> k")
    t.add_argument("--field", required=True, help="base field k, or a non-prime finite field over its prime field")
    t.add_argument("--modulus", help="irreducible monic polynomial in x over k")
    t.add_argument("--form", required=True, help="form over the extension, entries in x")
    t.add_argument("--functional", choices=["trace", "geometric"], default="trace")
    t.add_argument("--gw", action="store_true", help="transfer the GW class instead of the Witt class")
    _common(t)

    ge = verbs.add_parser("gersten", help="build truncated Gersten complexes and their homology")
    ge.add_argument("action", choices=["build", "homology"])
    ge.add_argument("--scheme", required=True)
    ge.add_argument("--rule", default="mw-rational")
    ge.add_argument("--n", type=int, default=0)
    ge.add_argument("--twist")
    ge.add_argument("--support-degree", type=int)
    ge.add_argument("--coeff")
    ge.add_argument("--rounds", type=int, help="stabilize over this many support rounds")
    ge.add_argument("--dump-matrices", action="store_true")
    _common(ge)

    from .verify import THEOREMS
    v = verbs.add_parser("verify", help="run a theorem checker")
    v.add_argument("theorem", choices=list(THEOREMS) + ["sphere-endo"])
    v.add_argument("--pmax", type=int)
    v.add_argument("--field")
    v.add_argument("--samples", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--scheme")
    v.add_argument("--twist")
    v.add_argument("--n", type=int)
    v.add_argument("--i", type=int, default=0)
    v.add_argument("--rounds", type=int)
    v.add_argument("--coeff")
    _common(v)

    c = verbs.add_parser("catalog", help="catalog schemes, points, twists and characteristic-zero fibers")
    c.add_argument("action", choices=["schemes", "points", "twist", "nu-q"])
    c.add_argument("--scheme")
    c.add_argument("--delta", type=int, default=-1)
    c.add_argument("--degree", type=int, help="support bound for closed points")
    _common(c)
    return top


_HANDLERS = {"witt": _witt, "gw": _gw, "mw": _mw, "residue": _residue, "transfer": _transfer,
             "gersten": _gersten, "verify": _verify, "catalog": _catalog}

_REQUIRED = {("witt", "class"): ["form"], ("witt", "invariants"): ["form"], ("witt", "isotropic"): ["form"],
             ("witt", "hilbert"): ["a", "b"], ("gw", "class"): ["form"], ("gw", "split"): ["form"],
             ("catalog", "points"): ["scheme"], ("catalog", "twist"): ["scheme"], ("catalog", "nu-q"): ["scheme"]}


def _emit(document, args, text, stream):
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(document, fh, indent=2, sort_keys=True)
    if args.json:
        stream.write(json.dumps(document, indent=2, sort_keys=True) + "\n")
    else:
        stream.write(text + "\n")


def run(argv=None, stdout=None, stderr=None):
    """Execute one command; returns the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        for flag in _REQUIRED.get((args.verb, getattr(args, "action", None)), []):
            if getattr(args, flag) is None:
                raise UsageError(f"{args.verb} {args.action}: --{flag} is required")
        payload, text, code = _HANDLERS[args.verb](args)
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else EXIT_OK
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except ChowWittError as exc:
        if getattr(args, "json", False):
            stdout.write(json.dumps({"schemaVersion": SCHEMA_VERSION, "error": exc.to_json()}, sort_keys=True) + "\n")
        else:
            stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_COMPUTE
    document = {"schemaVersion": SCHEMA_VERSION, "command": args.verb, "result": payload}
    _emit(document, args, text, stdout)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
