"""Independent brute-force oracles used by the tests.

These intentionally share no evaluation code with the package: they work on
plain tuples, tuple-at-a-time, recomputing everything every round.
"""

from __future__ import annotations

import itertools

from rdfhorn.logic import BOTTOM, Atom, Var


def _match(atom: Atom, fact: Atom, binding: dict):
    if atom.pred != fact.pred or len(atom.args) != len(fact.args):
        return None
    b = dict(binding)
    for x, y in zip(atom.args, fact.args):
        if isinstance(x, Var):
            if x in b and b[x] != y:
                return None
            b[x] = y
        elif x != y:
            return None
    return b


def _index(facts):
    """Facts grouped by predicate; a plain dict, rebuilt from scratch every round."""
    idx = {}
    for f in facts:
        idx.setdefault(f.pred, []).append(f)
    return idx


def _bindings(body, idx, binding=None):
    binding = binding or {}
    if not body:
        yield binding
        return
    first, rest = body[0], body[1:]
    for f in idx.get(first.pred, ()):
        b = _match(first, f, binding)
        if b is not None:
            yield from _bindings(rest, idx, b)


def naive_closure(rules, extra_facts=(), congruence_eq=False):
    """Naive fixpoint of Horn rules. Returns (set of facts, bottom derived).

    With ``congruence_eq``, atoms with predicate "=" are treated as an
    equivalence relation and a congruence over all other predicates.
    """
    facts = set(extra_facts)
    rules = list(rules)
    for r in rules:
        if not r.body:
            facts.add(r.head)
    proper = [r for r in rules if r.body]
    while True:
        if BOTTOM in facts:
            return facts, True
        new = set()
        snapshot = list(facts)
        idx = _index(snapshot)
        for r in proper:
            for b in _bindings(list(r.body), idx):
                h = r.head.substitute(b)
                if h not in facts:
                    new.add(h)
        if congruence_eq:
            eqs = {(f.args[0], f.args[1]) for f in snapshot if f.pred == "="}
            for a, b in list(eqs):
                new.add(Atom("=", (b, a)))
                for c, d in list(eqs):
                    if b == c:
                        new.add(Atom("=", (a, d)))
            for f in snapshot:
                if f.pred == "=":
                    continue
                for i, x in enumerate(f.args):
                    for a, b in eqs:
                        if a == x:
                            args = list(f.args)
                            args[i] = b
                            new.add(Atom(f.pred, tuple(args)))
            new -= facts
        if not new:
            return facts, BOTTOM in facts
        facts |= new


def homomorphism_exists(atoms, facts) -> bool:
    for _ in _bindings(list(atoms), _index(facts)):
        return True
    return False


def brute_accessible(nodes, sources, triples):
    """Least fixpoint of accessibility in a path system."""
    acc = set(sources)
    changed = True
    while changed:
        changed = False
        for x, y, z in triples:
            if x not in acc and y in acc and z in acc:
                acc.add(x)
                changed = True
    return acc


def brute_colorable(n, edges, k) -> bool:
    for col in itertools.product(range(k), repeat=n):
        if all(col[u] != col[v] for u, v in edges):
            return True
    return False
