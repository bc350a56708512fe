import random

import pytest

from graphs import NOTXML_S, SC, TYPE, random_generalized_graph, random_rdfs_graph
from oracles import homomorphism_exists, naive_closure
from rdfhorn.embedding import psi
from rdfhorn.engine import Engine, Limits, materialize, query
from rdfhorn.entailment import theory_for
from rdfhorn.errors import ResourceLimitError
from rdfhorn.logic import BOTTOM, ExistentialConjunction, HornRule, HornTheory, Var, data, isa, pred
from rdfhorn.terms import Regime, URI, DatatypeMode
from rdfhorn.datatypes import xsd_map

x, y, z = Var("x"), Var("y"), Var("z")
A, B, C, P, Q = (URI(f"urn:{n}") for n in "ABCPQ")


def store_atoms(store):
    return set(store.atoms())


def test_materialize_subclass_transitivity():
    facts = HornTheory((HornRule((), data(A, SC, B)), HornRule((), data(B, SC, C))))
    store = materialize(facts | psi(Regime.RDFS))
    assert store.contains(data(A, SC, C))


def test_materialize_ill_typed_xml_is_bottom():
    store = Engine(theory_for(NOTXML_S, "rdf")).materialize()
    assert store.bottom


def test_materialize_simple_keeps_facts():
    facts = HornTheory((HornRule((), data(A, P, B)), HornRule((), isa(A, C))))
    store = materialize(facts | psi(Regime.SIMPLE))
    assert store_atoms(store) == {data(A, P, B), isa(A, C)}


def test_query_examples():
    o = URI("urn:o")
    store = materialize(HornTheory((HornRule((), data(o, TYPE, B)),)))
    assert query(store, ExistentialConjunction((x,), (data(x, TYPE, B),))) == {x: o}
    assert query(store, ExistentialConjunction((), (data(o, TYPE, B),))) == {}
    assert query(store, ExistentialConjunction((x,), (data(x, TYPE, A),))) is None
    assert query(store, ExistentialConjunction((x,), (data(x, TYPE, x),))) is None


def _random_theory(rng):
    consts = [A, B, C, P, Q]
    preds = [("data", 3), ("isa", 2), ("u", 1), ("r", 2)]
    vars_ = [x, y, z]

    def atom(pool):
        name, n = rng.choice(preds)
        args = tuple(rng.choice(pool) for _ in range(n))
        return pred(name, *args) if name not in ("data", "isa") else (data(*args) if name == "data" else isa(*args))

    rules = [HornRule((), atom(consts)) for _ in range(rng.randint(2, 10))]
    for _ in range(rng.randint(1, 6)):
        body = tuple(atom(consts + vars_) for _ in range(rng.randint(1, 3)))
        bv = {v for a in body for v in a.variables()}
        head = BOTTOM if rng.random() < 0.1 else atom(consts + sorted(bv, key=lambda v: v.name))
        if head != BOTTOM and not head.variables() <= bv:
            continue
        rules.append(HornRule(body, head))
    return HornTheory(tuple(rules))


def test_engine_matches_naive_oracle_on_random_theories():
    rng = random.Random(11)
    for _ in range(300):
        th = _random_theory(rng)
        facts, bottom = naive_closure(th.rules)
        store = materialize(th)
        assert store.bottom == bottom
        if not bottom:
            assert store_atoms(store) == facts


@pytest.mark.parametrize("regime", ["simple", "rdf", "rdfs"])
def test_engine_matches_naive_oracle_on_regime_theories(regime):
    rng = random.Random({"simple": 1, "rdf": 2, "rdfs": 3}[regime])
    for _ in range(25):
        S = random_rdfs_graph(rng, max_triples=12, max_member=3)
        th = theory_for(S, regime)
        facts, bottom = naive_closure(th.rules)
        store = Engine(th).materialize()
        assert store.bottom == bottom
        if not bottom:
            assert store_atoms(store) == facts


def test_engine_matches_naive_oracle_with_datatypes():
    rng = random.Random(3)
    for _ in range(20):
        S = random_generalized_graph(rng, 8)
        for mode in (DatatypeMode.DSTAR, DatatypeMode.D):
            th = theory_for(S, "rdfs", xsd_map(), mode)
            facts, bottom = naive_closure(th.rules)
            store = Engine(th).materialize()
            assert store.bottom == bottom
            if not bottom:
                assert store_atoms(store) == facts


def test_query_matches_homomorphism_oracle():
    rng = random.Random(7)
    for _ in range(200):
        th = _random_theory(rng)
        store = materialize(th)
        if store.bottom:
            continue
        facts = store_atoms(store)
        atoms = tuple(data(rng.choice([x, y, A, B]), rng.choice([P, Q, x]), rng.choice([y, z, C]))
                      for _ in range(rng.randint(1, 3)))
        vs = tuple(sorted({v for a in atoms for v in a.variables()}, key=lambda v: v.name))
        q = ExistentialConjunction(vs, atoms)
        w = query(store, q)
        assert (w is not None) == homomorphism_exists(atoms, facts)
        if w is not None:
            assert all(a.substitute(w) in facts for a in atoms)


def test_monotone_in_input_facts():
    rng = random.Random(5)
    for _ in range(30):
        S = random_rdfs_graph(rng, max_triples=10, max_member=2)
        extra = random_rdfs_graph(rng, max_triples=4, max_member=2, blank_prob=0)  # keeps Skolem names stable
        small = Engine(theory_for(S, "rdfs", max_idx=2)).materialize()
        big = Engine(theory_for(S | extra, "rdfs", max_idx=2)).materialize()
        if not big.bottom:
            assert store_atoms(small) <= store_atoms(big)


def test_extend_adds_consequences():
    th = HornTheory((HornRule((), isa(A, B)), HornRule((isa(x, B),), isa(x, C))))
    eng = Engine(th)
    store = eng.materialize()
    st2 = eng.extend(store, [isa(P, B)])
    assert st2.contains(isa(P, C)) and not store.contains(isa(P, C))


def test_fact_limit_raises_with_stats():
    chain = [HornRule((), data(URI(f"urn:c{i}"), SC, URI(f"urn:c{i + 1}"))) for i in range(60)]
    th = HornTheory(tuple(chain)) | psi(Regime.RDFS)
    with pytest.raises(ResourceLimitError) as e:
        Engine(th, Limits(max_facts=200)).materialize()
    assert "facts" in e.value.stats


def test_stats_counts():
    th = HornTheory((HornRule((), data(A, SC, B)), HornRule((), data(B, SC, C)))) | psi(Regime.RDFS)
    store = materialize(th)
    s = store.stats
    assert s["facts"] == store.count()
    assert s["rounds"] >= 1 and s["derived"] > 0
