import itertools
import json
import random

import pytest

from oracles import brute_accessible, brute_colorable
from rdfhorn.datatypes import is_definite, load_datatype_map
from rdfhorn.entailment import decide
from rdfhorn.errors import ConfigError, NotDefiniteError
from rdfhorn.reductions import (
    COL_D,
    COL_R,
    PS_ANY,
    SP,
    accessibility_oracle,
    col_node,
    coloring_from_spec,
    coloring_oracle,
    gen_k_coloring,
    gen_path_system,
    path_system_from_spec,
    ps_node,
    random_graph,
    random_path_system,
)
from rdfhorn.terms import RDF, BNode, Triple

TRIANGLE = (["1", "2", "3"], [("1", "2"), ("2", "3"), ("1", "3")])
K4 = (["1", "2", "3", "4"], [(u, v) for u, v in itertools.combinations("1234", 2)])


def test_small_path_system():
    red = gen_path_system(["a", "b"], ["a"], ["b"], [("b", "a", "a")])
    assert len(red.graph) == 3
    assert Triple(ps_node("a"), SP, SP) in red.graph
    assert Triple(PS_ANY, SP, ps_node("b")) in red.graph
    assert Triple(ps_node("b"), ps_node("a"), ps_node("a")) in red.graph
    assert accessibility_oracle(["a", "b"], ["a"], [("b", "a", "a")]) == {"a", "b"}
    assert decide(red.graph, red.queries["b"], "rdfs").entailed
    assert decide(red.graph, red.any_query, "rdfs").entailed


def test_no_sources_no_relation():
    X = ["a", "b", "c"]
    red = gen_path_system(X, [], X, [])
    assert accessibility_oracle(X, [], []) == set()
    for t in X:
        assert not decide(red.graph, red.queries[t], "rdfs").entailed


def test_trivial_oracle_cases():
    X = ["a", "b", "c"]
    R = [("a", "b", "c"), ("c", "a", "a")]
    assert accessibility_oracle(X, X, R) == set(X)
    assert accessibility_oracle(X, ["b"], []) == {"b"}


def test_path_system_rejects_unknown_nodes():
    with pytest.raises(ValueError):
        gen_path_system(["a"], ["b"], [], [])


def test_accessibility_oracle_matches_brute_force():
    rng = random.Random(12)
    for _ in range(200):
        X, Srcs, T, R = random_path_system(rng.randint(1, 10), rng.randint(0, 20), rng.randint(0, 3),
                                           rng.randint(1, 3), rng)
        assert accessibility_oracle(X, Srcs, R) == brute_accessible(X, Srcs, R)


def test_engine_matches_accessibility_oracle():
    rng = random.Random(13)
    for _ in range(20):
        X, Srcs, T, R = random_path_system(8, 12, 2, 3, rng)
        red = gen_path_system(X, Srcs, T, R)
        acc = accessibility_oracle(X, Srcs, R)
        for t in T:
            assert decide(red.graph, red.queries[t], "rdfs").entailed == (t in acc)
        assert decide(red.graph, red.any_query, "rdfs").entailed == bool(acc & set(T))


def test_k_coloring_graphs():
    V, E = TRIANGLE
    red = gen_k_coloring(V, E, 3)
    assert all(Triple(col_node(v), RDF.type, COL_D) in red.S for v in V)
    assert all(Triple(col_node(u), COL_R, col_node(v)) in red.S for u, v in E)
    assert len(red.S) == len(V) + len(E)
    assert list(red.H) == [Triple(BNode("x"), COL_R, BNode("x"))]
    with pytest.raises(ValueError):
        gen_k_coloring(V, E, 2)


def test_k_coloring_expected_verdicts():
    # colorable means the self-loop query is NOT entailed
    assert coloring_oracle(*TRIANGLE, 3) is not None
    assert coloring_oracle(*K4, 3) is None
    assert brute_colorable(3, [(0, 1), (1, 2), (0, 2)], 3)
    assert not brute_colorable(4, list(itertools.combinations(range(4), 2)), 3)


def test_coloring_is_proper():
    V, E = K4
    col = coloring_oracle(V, E, 4)
    assert col is not None and all(col[u] != col[v] for u, v in E)


def test_coloring_map_is_refused(tmp_path):
    red = gen_k_coloring(*TRIANGLE, 3)
    p = tmp_path / "dtmap.json"
    p.write_text(json.dumps(red.dtmap))
    D = load_datatype_map(p)
    assert not is_definite(D)
    with pytest.raises(NotDefiniteError) as e:
        decide(red.S, red.H, "simple", D, "d")
    assert e.value.code == "E_NOT_DEFINITE"


def test_coloring_oracle_matches_brute_force():
    rng = random.Random(14)
    for _ in range(60):
        n = rng.randint(1, 8)
        V, E = random_graph(n, rng.random(), rng)
        idx = {v: i for i, v in enumerate(V)}
        expect = brute_colorable(n, [(idx[u], idx[v]) for u, v in E], 3)
        assert (coloring_oracle(V, E, 3) is not None) == expect


def test_specs():
    X, Srcs, T, R = path_system_from_spec({"nodes": ["a", "b"], "sources": ["a"], "terminals": ["b"],
                                           "relation": [["b", "a", "a"]]})
    assert (X, Srcs, T, R) == (["a", "b"], ["a"], ["b"], [("b", "a", "a")])
    spec = {"random": {"nodes": 6, "tuples": 8}, "seed": 3}
    assert path_system_from_spec(spec) == path_system_from_spec(spec)
    V, E, k = coloring_from_spec({"nodes": [1, 2], "edges": [[1, 2]], "k": 4})
    assert (V, E, k) == (["1", "2"], [("1", "2")], 4)
    with pytest.raises(ConfigError):
        path_system_from_spec({"sources": []})
    with pytest.raises(ConfigError):
        coloring_from_spec({"nodes": [1], "edges": [[1]]})
