import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphs import ex, graphs
from rdfhorn.axioms import axiomatic_triples
from rdfhorn.errors import RegimeError
from rdfhorn.terms import (
    RDF,
    RDFS,
    XSD,
    BNode,
    Graph,
    PlainLiteral,
    Regime,
    Triple,
    TypedLiteral,
    URI,
    collect_vocabulary,
    max_container_index,
)


def test_term_invariants():
    with pytest.raises(ValueError):
        URI("")
    with pytest.raises(ValueError):
        BNode("")
    assert PlainLiteral("a", "EN-gb").lang == "en-gb"
    # the four kinds never compare equal
    assert len({URI("a"), PlainLiteral("a"), TypedLiteral("a", XSD.string), BNode("a")}) == 4


def test_generalized_and_normal_triples():
    assert Triple(ex("o"), RDF.type, ex("A")).is_normal
    assert not Triple(PlainLiteral("lit"), ex("p"), ex("o")).is_normal
    assert not Triple(ex("s"), BNode("p"), ex("o")).is_normal
    assert Triple(BNode("s"), ex("p"), PlainLiteral("o")).is_normal


def test_graph_dedup_and_blank_inventory():
    g = Graph([(BNode("y"), ex("p"), BNode("x")), (BNode("y"), ex("p"), BNode("x")), (ex("a"), ex("p"), ex("b"))])
    assert len(g) == 2
    assert g.blank_nodes() == [BNode("x"), BNode("y")]
    assert not g.is_ground


@given(graphs)
def test_graph_iteration_is_sorted_and_deterministic(g):
    assert list(g) == sorted(g.triples, key=Triple.sort_key)
    assert list(Graph(reversed(list(g)))) == list(g)


def test_collect_vocabulary_partitions():
    v = collect_vocabulary([Graph([(ex("o"), RDF.type, ex("A"))])])
    assert {ex("o"), RDF.type, ex("A")} <= v.uris and not v.plain and not v.typed
    assert RDFS.subClassOf in v.uris  # built-ins always included
    v = collect_vocabulary([Graph([(ex("a"), ex("b"), PlainLiteral("x"))])])
    assert PlainLiteral("x") in v.plain
    one = TypedLiteral("1", XSD.integer)
    v = collect_vocabulary([Graph([(ex("a"), ex("b"), one)])])
    assert one in v.typed and one not in v.plain


@given(graphs)
def test_vocabulary_covers_every_name_once(g):
    v = collect_vocabulary([g])
    for t in g:
        for x in t:
            if not isinstance(x, BNode):
                assert [x in v.uris, x in v.plain, x in v.typed].count(True) == 1


def test_max_container_index():
    assert max_container_index([Graph()]) == 1
    assert max_container_index([Graph([(ex("a"), RDF.member(3), ex("b"))])]) == 3
    g1 = Graph([(ex("a"), RDF.member(2), ex("b"))])
    g2 = Graph([(RDF.member(7), RDF.type, RDF.Property)])
    assert max_container_index([g1, g2]) == 7


def test_axiomatic_triples_examples():
    assert Triple(RDF.nil, RDF.type, RDF.List) in axiomatic_triples(Regime.RDF, 1)
    assert Triple(RDF.Alt, RDFS.subClassOf, RDFS.Container) in axiomatic_triples(Regime.RDFS, 1)
    rdf2 = axiomatic_triples(Regime.RDF, 2)
    assert Triple(RDF.member(2), RDF.type, RDF.Property) in rdf2
    assert not any(RDF.member(3) in t for t in rdf2)


@pytest.mark.parametrize("regime", [Regime.SIMPLE, Regime.ERDFS])
def test_axiomatic_triples_rejects_other_regimes(regime):
    with pytest.raises(RegimeError) as e:
        axiomatic_triples(regime, 1)
    assert e.value.code == "E_REGIME"


@given(st.integers(min_value=1, max_value=30))
def test_axiomatic_triples_properties(n):
    for regime in (Regime.RDF, Regime.RDFS):
        step = len(axiomatic_triples(regime, n + 1)) - len(axiomatic_triples(regime, n))
        assert step == len(axiomatic_triples(regime, 2)) - len(axiomatic_triples(regime, 1))
    assert axiomatic_triples(Regime.RDF, n) <= axiomatic_triples(Regime.RDFS, n)
    assert all(t.is_normal for t in axiomatic_triples(Regime.RDFS, n))
