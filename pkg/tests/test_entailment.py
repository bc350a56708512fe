import random

import pytest

from graphs import (
    DOMAIN,
    EX1_E,
    EX1_S,
    EX4_S,
    INTRO_E,
    INTRO_S,
    NOTXML_S,
    RANGE_UNSAT_S,
    SC,
    TYPE,
    ex,
    graph,
    random_rdfs_graph,
)
from oracles import homomorphism_exists, naive_closure
from rdfhorn.datatypes import xsd_map
from rdfhorn.embedding import constants_of, dom_facts, psi, tr
from rdfhorn.entailment import Prepared, Verdict, decide, satisfiable
from rdfhorn.errors import NotStandardError, PreconditionError, UnsupportedError
from rdfhorn.logic import HornRule, Var
from rdfhorn.terms import RDF, RDFS, BNode, Graph, Regime, Triple, URI, collect_vocabulary, max_container_index


def test_intro_example():
    assert decide(INTRO_S, INTRO_E, "rdfs").verdict == Verdict.ENTAILED
    assert decide(INTRO_S, INTRO_E, "rdf").verdict == Verdict.NOT_ENTAILED


def test_example_1():
    assert decide(EX1_S, EX1_E, "erdfs").entailed
    assert not decide(EX1_S, EX1_E, "rdfs").entailed


def test_example_4():
    abc = graph((ex("a"), ex("b"), ex("c")))
    r = decide(EX4_S, abc, "rdfs", xsd_map(), "d")
    assert r.entailed and r.via_inconsistency
    assert satisfiable(EX4_S, "rdfs", xsd_map(), "dstar")
    assert not decide(EX4_S, abc, "rdfs", xsd_map(), "dstar").entailed


def test_satisfiability_examples():
    for regime in ("rdf", "rdfs", "erdfs"):
        assert not satisfiable(NOTXML_S, regime)
    assert satisfiable(NOTXML_S, "simple")
    assert not satisfiable(RANGE_UNSAT_S, "rdfs")
    assert satisfiable(RANGE_UNSAT_S, "rdf")


def test_witness_and_verdict_line():
    E = graph((BNode("w"), TYPE, ex("B")))
    r = decide(INTRO_S, E, "rdfs")
    assert r.witness == {BNode("w"): ex("o")}
    assert r.verdict_line() == "VERDICT: ENTAILED"
    r = decide(NOTXML_S, E, "rdf")
    assert r.witness is None and r.verdict_line() == "VERDICT: ENTAILED via-inconsistency"
    assert decide(INTRO_S, E, "simple").verdict_line() == "VERDICT: NOT-ENTAILED"


def test_blank_nodes_in_s_are_skolemized():
    S = graph((BNode("x"), TYPE, ex("A")), (ex("A"), SC, ex("B")))
    assert decide(S, graph((BNode("y"), TYPE, ex("B"))), "rdfs").entailed
    assert not decide(S, graph((ex("o"), TYPE, ex("B"))), "rdfs").entailed


@pytest.mark.parametrize("regime", ["simple", "rdf", "rdfs", "erdfs"])
def test_empty_e_is_entailed(regime):
    assert decide(INTRO_S, Graph(), regime).entailed


def test_erdfs_errors():
    with pytest.raises(NotStandardError):
        decide(graph((RDF.type, RDFS.subPropertyOf, ex("a"))), Graph(), "erdfs")
    with pytest.raises(PreconditionError) as e:
        decide(EX1_S, graph((ex("mother"), TYPE, RDFS.Resource)), "erdfs")
    assert e.value.code == "E_PRECONDITION"
    with pytest.raises(UnsupportedError):
        decide(EX1_S, EX1_E, "erdfs", xsd_map(), "dstar")


def test_unsat_entails_everything():
    rng = random.Random(2)
    for S in (NOTXML_S, RANGE_UNSAT_S):
        for _ in range(10):
            E = random_rdfs_graph(rng, max_triples=4)
            r = decide(S, E, "rdfs")
            assert r.entailed and r.via_inconsistency


def test_rdf_entailment_implies_rdfs_entailment():
    rng = random.Random(4)
    for _ in range(60):
        S = random_rdfs_graph(rng, max_triples=10, max_member=3)
        E = random_rdfs_graph(rng, max_triples=2, max_member=3)
        s, r, rs = (decide(S, E, g).entailed for g in ("simple", "rdf", "rdfs"))
        assert (not s or r) and (not r or rs)


def test_prepared_matches_decide():
    rng = random.Random(9)
    S = random_rdfs_graph(rng, max_triples=15, max_member=3)
    P = Prepared(S, "rdfs")
    for _ in range(30):
        E = random_rdfs_graph(rng, max_triples=2, max_member=4)
        assert P.entails(E).entailed == decide(S, E, "rdfs").entailed


def _oracle(S: Graph, E: Graph, regime: str) -> bool:
    """Skolemize S by hand, close naively, and search for a homomorphism of tr(E)."""
    sk = {b: URI(f"urn:oracle:sk{i}") for i, b in enumerate(S.blank_nodes())}
    skS = Graph(Triple(*(sk.get(x, x) for x in t)) for t in S)
    n = max_container_index([S, E])
    facts = [HornRule((), a) for a in tr(skS).atoms]
    th = list(psi(Regime(regime), None, collect_vocabulary([skS, E]), n).rules) + facts
    consts = constants_of(th) | {x for a in tr(E).atoms for x in a.args if not isinstance(x, Var)}
    if regime != "simple":
        th += dom_facts(consts)
    closed, bottom = naive_closure(th)
    return bottom or homomorphism_exists(tr(E).atoms, closed)


@pytest.mark.parametrize("regime", ["simple", "rdf", "rdfs"])
def test_decide_matches_naive_oracle(regime):
    rng = random.Random({"simple": 21, "rdf": 22, "rdfs": 23}[regime])
    for _ in range(30):
        S = random_rdfs_graph(rng, max_triples=8, max_member=3)
        E = random_rdfs_graph(rng, max_triples=2, max_member=3)
        assert decide(S, E, regime).entailed == _oracle(S, E, regime), (S, E)


def test_erdfs_single_triple_examples():
    S = graph((ex("A"), SC, ex("B")), (ex("B"), SC, ex("C")), (ex("p"), DOMAIN, ex("A")))
    assert decide(S, graph((ex("A"), SC, ex("C"))), "erdfs").entailed
    assert decide(S, graph((ex("p"), DOMAIN, ex("C"))), "erdfs").entailed
    assert not decide(S, graph((ex("C"), SC, ex("A"))), "erdfs").entailed
