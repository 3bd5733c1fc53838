import pytest
import sympy

from chowwitt.errors import FieldMismatch, InvalidDelta, ParseError
from chowwitt.qform import QuadForm
from chowwitt.scalars import GF, QQ, Poly, factor
from chowwitt.scalars.parse import parse_element
from chowwitt.scalars.valuation import Valuation
from chowwitt.scheme import CatalogScheme, SupportSet, TwistData, nu_q, omega_twist, support_rounds
from chowwitt.wittring import witt_class_of

CATALOG = ["SpecZ", "SpecZ[1/2]", "SpecZ[1/2,3]", "A1/Fp:3", "A1/Fq:9", "A1/Q", "P1/Fp:3", "P1/Q", "Spec/Fq:9",
           "Spec/Q", "DVR/5"]


@pytest.mark.parametrize("spec", CATALOG)
def test_spec_round_trip(spec):
    assert CatalogScheme.parse(spec).spec == spec


@pytest.mark.parametrize("bad", ["SpecZ[1/4]", "A1/Fp:3(t)", "P2/Q", "Spec/Q(t)", "DVR/6"])
def test_bad_scheme_specs(bad):
    with pytest.raises((ParseError, ValueError)):
        CatalogScheme.parse(bad)


def test_points_examples():
    A1 = CatalogScheme.parse("A1/Fp:3")
    pts = A1.points(-1, 2)
    assert [p.degree for p in pts] == [1] * 3 + [2] * 3
    Z = CatalogScheme.parse("SpecZ")
    (g,) = Z.points(0, 5)
    assert g.is_generic and g.residue_field == QQ
    P1 = CatalogScheme.parse("P1/Q")
    closed = P1.points(-1, 2)
    inf = [p for p in closed if p.label == "inf"]
    assert len(inf) == 1 and inf[0].residue_field == QQ
    with pytest.raises(InvalidDelta):
        Z.points(-2, 5)
    with pytest.raises(InvalidDelta):
        CatalogScheme.parse("Spec/Q").points(-1, 3)


def test_residue_fields_of_closed_points():
    for p in CatalogScheme.parse("A1/Fp:5").points(-1, 2):
        assert p.residue_field.order == 5 ** p.degree
    for p in CatalogScheme.parse("SpecZ").points(-1, 13):
        assert p.residue_field == GF(int(p.label))


@pytest.mark.parametrize("spec", CATALOG)
def test_delta_drops_by_one_along_specializations(spec):
    X = CatalogScheme.parse(spec)
    if X.dimension == 0:
        assert X.deltas == [0]
        return
    g = X.generic_point()
    for x in X.closed_points(2 if X.base is not None else 13):
        assert g.delta - x.delta == 1
        # the closed point's valuation lives on the generic point's field
        assert x.valuation.field == g.residue_field


def _necklace(q, d):
    return sum(sympy.mobius(d // k) * q ** k for k in sympy.divisors(d)) // d


@pytest.mark.parametrize("q,D", [(3, 4), (5, 3), (7, 2), (9, 2)])
def test_closed_point_count_against_two_oracles(q, D):
    X = CatalogScheme.affine_line(GF(q))
    by_degree = {}
    for p in X.closed_points(D):
        by_degree[p.degree] = by_degree.get(p.degree, 0) + 1
    assert by_degree == {d: _necklace(q, d) for d in range(1, D + 1)}
    # brute-force factorization of t^(q^D) - t counts points of degree dividing D
    F = GF(q)
    big = Poly(F, [F.zero, -F.one] + [F.zero] * (q ** D - 2) + [F.one])
    _, fs = factor(big)
    assert len(fs) == sum(c for d, c in by_degree.items() if D % d == 0)


def test_enumeration_is_deterministic_and_ordered():
    X = CatalogScheme.parse("A1/Fp:3")
    a, b = X.closed_points(3), X.closed_points(3)
    assert [p.label for p in a] == [p.label for p in b]
    assert [p.degree for p in a] == sorted(p.degree for p in a)
    first, second = list(zip(range(3), support_rounds(X))), list(zip(range(3), support_rounds(X)))
    assert [s.labels() for _, s in first] == [s.labels() for _, s in second]


def test_support_sets_grow_monotonically():
    X = CatalogScheme.parse("SpecZ")
    previous = []
    for _, s in zip(range(4), support_rounds(X)):
        assert s.labels()[:len(previous)] == previous
        previous = s.labels()
    s = SupportSet.of(X, 5)
    bigger = s.enlarge(X.closed_points(11))
    assert bigger.labels()[:len(s)] == s.labels() and len(bigger) == 5
    assert s.enlarge(s.points) == s


def test_nu_q_examples_and_idempotence():
    Q = CatalogScheme.spec_field(QQ)
    assert nu_q(CatalogScheme.parse("SpecZ"))[0] == Q
    assert nu_q(CatalogScheme.parse("SpecZ[1/2]"))[0] == Q
    assert nu_q(CatalogScheme.parse("A1/Fp:5"))[0].kind == "Empty"
    for spec in CATALOG:
        once = nu_q(CatalogScheme.parse(spec))[0]
        assert nu_q(once)[0] == once


def test_omega_twist_examples():
    Z = CatalogScheme.parse("SpecZ")
    seven = next(p for p in Z.closed_points(7) if p.label == "7")
    assert omega_twist(Z, seven)[0] == "dpi_7"
    P1 = CatalogScheme.parse("P1/Fp:3")
    inf = next(p for p in P1.closed_points(1) if p.label == "inf")
    label, _ = omega_twist(P1, inf)
    assert label == "dpi_1/t"
    assert inf.valuation(inf.valuation.uniformizer) == 1
    assert inf.valuation.uniformizer == parse_element(P1.function_field, "1/t")
    A1 = CatalogScheme.parse("A1/Q")
    K = A1.function_field
    v = Valuation.at_poly(K, (-2, 0, 1))
    x = A1._poly_point(v)
    assert omega_twist(A1, x)[0] == "dpi_t^2-2"
    assert v.uniformizer == parse_element(K, "t^2-2")


def test_twist_rebase_multiplies_by_unit_class():
    Z = CatalogScheme.parse("SpecZ")
    seven = next(p for p in Z.closed_points(7) if p.label == "7")
    _, rebase = omega_twist(Z, seven)
    F7 = GF(7)
    c = witt_class_of(QuadForm(F7, [F7.one]))
    assert rebase(c, F7(3)) == witt_class_of(QuadForm(F7, [F7(3)]))
    assert rebase(rebase(c, F7(3)), F7(3).inverse()) == c


def test_twist_data():
    assert TwistData.parse("O(-1)").degree == -1
    assert TwistData.parse("").degree == 0
    with pytest.raises(FieldMismatch):
        TwistData(1).check(CatalogScheme.parse("SpecZ"))
    P1 = CatalogScheme.parse("P1/Fp:3")
    inf = next(p for p in P1.closed_points(1) if p.label == "inf")
    assert TwistData(1).transition_unit(P1, inf) is not None
    assert TwistData(2).transition_unit(P1, inf) is None
