"""Generators and oracles for the PATH SYSTEM and k-coloring reductions.

PATH SYSTEM ACCESSIBILITY reduces to ground RDFS entailment: a node t is
accessible iff the generated graph entails <t, sp, sp>. Graph k-colorability
reduces to simple-D entailment with a datatype whose value space has exactly
k elements; such a map is not definite, so the engine refuses it and the
expected verdicts come from the coloring oracle.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .terms import RDF, RDFS, BNode, Graph, Triple, URI

PS_NS = "urn:pathsystem:"
COL_NS = "urn:coloring:"
SP = RDFS.subPropertyOf

# ---------------------------------------------------------------------------
# PATH SYSTEM


def ps_node(x) -> URI:
    return URI(f"{PS_NS}node:{x}")


PS_ANY = URI(f"{PS_NS}any")  # the extra node "a" whose sp-successors are the terminals


@dataclass
class PathSystemReduction:
    graph: Graph
    queries: dict  # terminal -> single-triple query graph
    any_query: Graph  # entailed iff some terminal is accessible


def gen_path_system(X, Srcs, T, R) -> PathSystemReduction:
    """Encode a path system as a ground graph.

    Sources x give <x, sp, sp>, terminals x give <any, sp, x> and tuples of R
    are copied verbatim.
    """
    X = list(X)
    nodes = set(X)
    for x in list(Srcs) + list(T) + [n for t in R for n in t]:
        if x not in nodes:
            raise ValueError(f"node {x!r} is not in X")
    triples = [Triple(ps_node(x), SP, SP) for x in Srcs]
    triples += [Triple(PS_ANY, SP, ps_node(x)) for x in T]
    triples += [Triple(ps_node(x), ps_node(y), ps_node(z)) for x, y, z in R]
    queries = {t: Graph([Triple(ps_node(t), SP, SP)]) for t in T}
    return PathSystemReduction(Graph(triples), queries, Graph([Triple(PS_ANY, SP, SP)]))


def accessibility_oracle(X, Srcs, R) -> set:
    """Accessible nodes, by a worklist over the tuples that mention each node."""
    watch: dict = {}
    for x, y, z in R:
        watch.setdefault(y, []).append((x, y, z))
        watch.setdefault(z, []).append((x, y, z))
    acc = set(Srcs)
    todo = list(acc)
    while todo:
        n = todo.pop()
        for x, y, z in watch.get(n, ()):
            if x not in acc and y in acc and z in acc:
                acc.add(x)
                todo.append(x)
    return acc


def random_path_system(n_nodes: int, n_tuples: int, n_sources: int, n_terminals: int, rng: random.Random):
    X = [f"x{i}" for i in range(n_nodes)]
    Srcs = rng.sample(X, min(n_sources, n_nodes))
    T = rng.sample(X, min(n_terminals, n_nodes))
    R = sorted({tuple(rng.choice(X) for _ in range(3)) for _ in range(n_tuples)})
    return X, Srcs, T, R


# ---------------------------------------------------------------------------
# k-coloring

COL_D = URI(f"{COL_NS}d")
COL_R = URI(f"{COL_NS}R")


def col_node(v) -> URI:
    return URI(f"{COL_NS}node:{v}")


@dataclass
class ColoringReduction:
    S: Graph
    H: Graph
    dtmap: dict = field(default_factory=dict)  # datatype-map config document


def gen_k_coloring(V, E, k: int) -> ColoringReduction:
    """S types every node with d and links adjacent nodes by R; H = {<_:x, R, _:x>}.

    S entails H under simple-D entailment iff the graph has no k-coloring.
    """
    if k < 3:
        raise ValueError("k must be at least 3")
    V = list(V)
    for u, v in E:
        if u not in V or v not in V:
            raise ValueError(f"edge ({u!r}, {v!r}) uses an unknown node")
    S = Graph([Triple(col_node(v), RDF.type, COL_D) for v in V]
              + [Triple(col_node(u), COL_R, col_node(v)) for u, v in E])
    H = Graph([Triple(BNode("x"), COL_R, BNode("x"))])
    dtmap = {
        "datatypes": [
            {"uri": "rdf:XMLLiteral"},
            {"uri": COL_D.value, "kind": "enum", "values": [str(i) for i in range(1, k + 1)]},
        ]
    }
    return ColoringReduction(S, H, dtmap)


def coloring_oracle(V, E, k: int) -> dict | None:
    """A k-coloring as a dict node -> color in 1..k, or None; backtracking search."""
    V = list(V)
    adj = {v: set() for v in V}
    for u, v in E:
        adj[u].add(v)
        adj[v].add(u)
    order = sorted(V, key=lambda v: -len(adj[v]))
    col: dict = {}

    def go(i):
        if i == len(order):
            return True
        v = order[i]
        used = {col[u] for u in adj[v] if u in col}
        for c in range(1, k + 1):
            if c not in used:
                col[v] = c
                if go(i + 1):
                    return True
                del col[v]
        return False

    return dict(col) if go(0) else None


def random_graph(n_nodes: int, edge_prob: float, rng: random.Random):
    V = [f"v{i}" for i in range(n_nodes)]
    E = [(u, v) for u, v in itertools.combinations(V, 2) if rng.random() < edge_prob]
    return V, E


# ---------------------------------------------------------------------------
# SPEC.json instances


def _need(spec: dict, key: str):
    if key not in spec:
        raise ConfigError(f"instance spec needs {key!r}")
    return spec[key]


def load_spec(source) -> dict:
    if isinstance(source, dict):
        return source
    try:
        text = Path(source).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read instance spec: {e}") from None
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"instance spec is not valid JSON: {e}") from None
    if not isinstance(spec, dict):
        raise ConfigError("instance spec must be a JSON object")
    return spec


def path_system_from_spec(spec: dict, seed: int | None = None):
    """(X, Srcs, T, R) from explicit lists or from a "random" block with a seed."""
    if "random" in spec:
        r = spec["random"]
        rng = random.Random(seed if seed is not None else spec.get("seed", 0))
        return random_path_system(int(r.get("nodes", 8)), int(r.get("tuples", 10)),
                                  int(r.get("sources", 2)), int(r.get("terminals", 2)), rng)
    X = [str(x) for x in _need(spec, "nodes")]
    R = [tuple(str(n) for n in t) for t in spec.get("relation", [])]
    if any(len(t) != 3 for t in R):
        raise ConfigError("every relation tuple needs three nodes")
    return X, [str(x) for x in spec.get("sources", [])], [str(x) for x in spec.get("terminals", [])], R


def coloring_from_spec(spec: dict, seed: int | None = None):
    """(V, E, k) from explicit lists or from a "random" block with a seed."""
    k = int(spec.get("k", 3))
    if "random" in spec:
        r = spec["random"]
        rng = random.Random(seed if seed is not None else spec.get("seed", 0))
        V, E = random_graph(int(r.get("nodes", 6)), float(r.get("edge_prob", 0.5)), rng)
        return V, E, k
    V = [str(v) for v in _need(spec, "nodes")]
    E = [tuple(str(n) for n in e) for e in spec.get("edges", [])]
    if any(len(e) != 2 for e in E):
        raise ConfigError("every edge needs two nodes")
    return V, E, k


__all__ = [
    "gen_path_system", "accessibility_oracle", "random_path_system", "PathSystemReduction",
    "gen_k_coloring", "coloring_oracle", "random_graph", "ColoringReduction",
    "load_spec", "path_system_from_spec", "coloring_from_spec", "ps_node", "col_node", "PS_ANY",
]
