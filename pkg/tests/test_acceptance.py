"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line with its wall time and budget.  The lines
are printed at the end of a pytest run (see conftest.py) and directly when
this file is executed as a script.
"""

import functools
import random
import subprocess
import sys
import time
from itertools import combinations_with_replacement, product
from pathlib import Path

from chowwitt.gersten import build, homology_at, random_supported_symbol, reciprocity_defect, stabilize
from chowwitt.scalars import GF, is_prime
from chowwitt.scalars.parse import parse_element, parse_field
from chowwitt.scheme import CatalogScheme, TwistData
from chowwitt.verify import (check_chowwitt_decomposition, check_formally_real_nonvanishing,
                             check_gersten_witt_resolution, check_gw_splitting, check_key_lemma_witt,
                             sphere_endo_witt_part)
from chowwitt.wittring import group_structure
from oracles import oracle_homology

RESULTS = []
SEED = 20240601


def criterion(number, title, budget):
    def wrap(fn):
        @functools.wraps(fn)
        def run():
            start = time.perf_counter()
            detail = ""
            try:
                detail = fn() or ""
                elapsed = time.perf_counter() - start
                assert elapsed < budget, f"took {elapsed:.1f} s, budget {budget} s"
            except BaseException as exc:
                elapsed = time.perf_counter() - start
                RESULTS.append(f"FAIL  {number:>2}. {title} ({elapsed:.1f} s / {budget} s): {exc}")
                print(RESULTS[-1])
                raise
            RESULTS.append(f"PASS  {number:>2}. {title} ({elapsed:.1f} s / {budget} s){': ' + detail if detail else ''}")
            print(RESULTS[-1])
        return run
    return wrap


def _enumerated_witt_group(p):
    n = next(x for x in range(2, p) if pow(x, (p - 1) // 2, p) == p - 1)

    def counts(ents):
        c = [0] * p
        for xs in product(range(p), repeat=len(ents)):
            c[sum(a * x * x for a, x in zip(ents, xs)) % p] += 1
        return tuple(c)

    anisotropic = {(0, ())}
    for rank in (1, 2, 3):
        for ents in combinations_with_replacement((1, n), rank):
            c = counts(ents)
            if c[0] == 1:
                anisotropic.add((rank, c))
    return len(anisotropic), counts((1, 1))[0] == 1


@criterion(1, "Key-Lemma engine", 10)
def test_criterion_01_key_lemma():
    report = check_key_lemma_witt(200)
    assert report.passed, report.counterexample
    for p in range(3, 201):
        if is_prime(p):
            G = group_structure(GF(p))
            assert G.order == 4 and max(G.torsion) in (2, 4)
            assert (G.render() == "Z/4") == (p % 4 == 3)
    for p in (p for p in range(3, 21) if is_prime(p)):
        order, z4 = _enumerated_witt_group(p)
        assert order == 4 and (report.witnesses[str(p)] == "Z/4") == z4
    return f"{len(report.witnesses)} odd primes"


@criterion(2, "GW splitting", 10)
def test_criterion_02_gw_splitting():
    ranks = {}
    for spec in ("Fp:3", "Fp:5", "Fp:7", "Fq:9", "Q"):
        report = check_gw_splitting(parse_field(spec), samples=100, seed=SEED)
        assert report.passed, (spec, report.counterexample)
        assert report.witnesses["randomPairs"] == 100
        ranks[spec] = report.witnesses["minusFactorRank"]
    assert ranks == {"Fp:3": 0, "Fp:5": 0, "Fp:7": 0, "Fq:9": 0, "Q": 1}
    return "minus ranks " + ", ".join(f"{k}={v}" for k, v in ranks.items())


@criterion(3, "Formally-real nonvanishing", 5)
def test_criterion_03_formally_real():
    for spec in ("Spec/Q", "P1/Q"):
        report = check_formally_real_nonvanishing(CatalogScheme.parse(spec))
        assert report.passed and report.witnesses["signature"] == 1, (spec, report.counterexample)
    return "<1> has signature 1 in both kernels"


def _well_formed_complexes():
    specs = [("Spec/Fp:5", "mw-rational", 0, 0, None, None), ("Spec/Q", "mw-rational", 0, 0, None, None),
             ("SpecZ", "witt", 0, 0, 13, "Int"), ("SpecZ[1/2]", "witt-minus", 0, 0, 13, None),
             ("DVR/3", "witt", 0, 0, None, "Int"), ("DVR/5", "witt", 0, 0, None, "Int"),
             ("DVR/7", "witt", 0, 0, None, "Int"), ("P1/Fp:3", "mw-rational", 0, -1, 2, None),
             ("P1/Fp:3", "mw-rational", -1, -1, 2, None), ("P1/Fp:5", "mw-rational", 0, -1, 2, None),
             ("P1/Q", "mw-rational", 0, -1, 2, None), ("P1/Q", "mw-rational", -1, -1, 2, None),
             ("P1/Q", "milnor", 0, -1, 2, "Rat"), ("A1/Fp:3", "mw-rational", 0, -1, 3, None),
             ("A1/Fp:5", "witt", 0, 0, 2, "Int"), ("P1/Fp:3", "witt", 1, 0, 2, "Int")]
    for spec, rule, twist, n, support, coeff in specs:
        yield build(CatalogScheme.parse(spec), rule, TwistData(twist), n, support, coeff)


@criterion(4, "Complex well-formedness and reciprocity", 60)
def test_criterion_04_well_formed():
    built = 0
    for c in _well_formed_complexes():
        assert c.check_square_zero() and c.check_relations_compatible()
        built += 1
    checked = 0
    for spec in ("Fp:3", "Fp:5", "Q"):
        F = parse_field(spec + "(t)")
        k = F.base
        t = parse_element(F, "t")
        places = [t, t - F.one, t + F.one]
        if k.order is not None:
            places.append(parse_element(F, "t^2+1") if k.order % 4 == 3 else parse_element(F, "t^2+2"))
        rng = random.Random(SEED)
        for _ in range(100):
            e = random_supported_symbol(F, places, rng)
            assert reciprocity_defect(e).is_zero(), (spec, e)
            checked += 1
    return f"{built} complexes, {checked} symbols"


@criterion(5, "Homotopy invariance at desk scale", 60)
def test_criterion_05_homotopy_invariance():
    rounds = {}
    for q in (3, 5):
        X = CatalogScheme.affine_line(GF(q))
        res = stabilize(lambda r: build(X, "mw-rational", n=-1, support=r), 4)
        assert res.stabilized and res[-1].is_zero(), (q, res.history)
        rounds[q] = res.rounds
    return "stabilized in rounds " + ", ".join(f"F_{q}: {r}" for q, r in rounds.items())


@criterion(6, "Rational Chow-Witt decomposition", 120)
def test_criterion_06_decomposition():
    cases = [("P1/Q", 0, -1), ("P1/Q", -1, -1), ("SpecZ[1/2]", 0, 0), ("Spec/Fp:5", 0, 0)]
    for spec, twist, n in cases:
        report = check_chowwitt_decomposition(CatalogScheme.parse(spec), TwistData(twist), n)
        assert report.passed, (spec, twist, report.counterexample)
        for row in report.witnesses["ranks"].values():
            assert row["chowWitt"] == row["chow"] + row["witt"]
    return f"{len(cases)} cases with equal ranks"


@criterion(7, "2-inverted Q-fiber isomorphism", 30)
def test_criterion_07_two_inverted():
    report = check_gersten_witt_resolution(CatalogScheme.parse("SpecZ[1/2]"), rounds=5, coeff="IntHalf")
    assert report.passed, report.counterexample
    h0 = report.witnesses["H0"]
    assert h0["freeRank"] == 1 and h0["torsion"] == [] and h0["stabilized"]
    assert report.witnesses["generator"] == "<1>"
    return f"H_0 = {h0['rendered']} on <1>"


@criterion(8, "Gersten-Witt resolution for DVRs", 10)
def test_criterion_08_dvr():
    groups = {}
    for p in (3, 5, 7):
        X = CatalogScheme.dvr(p)
        c = build(X, "witt", n=0, coeff="Int")
        h0, h1 = homology_at(c, 0), homology_at(c, -1)
        assert (h0.free_rank, list(h0.torsion)) == oracle_homology(c, 0)
        assert h1.is_zero() and oracle_homology(c, -1) == (0, [])
        report = check_gersten_witt_resolution(X, coeff="Int")
        assert report.passed, report.counterexample
        groups[p] = h0.render()
    return "H_0: " + ", ".join(f"DVR/{p} {g}" for p, g in groups.items())


@criterion(9, "Sphere-endomorphism Witt summand", 30)
def test_criterion_09_sphere_endo():
    expected = {"Spec/Q": 1, "SpecZ": 1, "Spec/Fp:7": 0}
    for spec, rank in expected.items():
        out = sphere_endo_witt_part(CatalogScheme.parse(spec), 0, 0)
        assert out["wittRank"] == rank and out["kSummand"] == "not computed", (spec, out)
    return ", ".join(f"{k} rank {v}" for k, v in expected.items())


@criterion(10, "Property suites", 600)
def test_criterion_10_property_suites():
    here = Path(__file__).resolve().parent
    suites = sorted(str(p) for p in here.glob("test_*.py") if p.name != Path(__file__).name)
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *suites],
                          capture_output=True, text=True, cwd=here.parent)
    summary = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-500:]
    assert proc.returncode == 0, summary
    return summary.strip("= ")


if __name__ == "__main__":
    sys.path.insert(0, str(Path(__file__).resolve().parent))
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except BaseException:
                failed += 1
    sys.exit(1 if failed else 0)
