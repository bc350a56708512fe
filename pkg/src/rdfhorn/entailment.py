"""Entailment and satisfiability checking for RDF graphs.

For simple, RDF and RDFS entailment (with or without D* or D datatypes) a
graph S entails E iff the Skolemized translation of S plus the regime axioms
either is inconsistent or answers the conjunctive query tr(E). For
extensional RDFS the direct embedding is used: atoms of tr^erdfs(E) form the
query and each rule of tr^erdfs(E) is checked by freezing its variables.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field

from .datatypes import DatatypeMap, normalize, _literals_of
from .embedding import (
    ILLXML,
    check_datatypes,
    constants_of,
    dom_facts,
    entailment_precondition_erdfs,
    psi,
    psi_erdfs_v,
    standard_use,
    tr,
    tr_erdfs,
)
from .engine import Engine, FactStore, Limits, query
from .errors import NotStandardError, PreconditionError, UnsupportedError
from .logic import ExistentialConjunction, HornRule, HornTheory, Var, skolem_mapping
from .terms import (
    BNode,
    DatatypeMode,
    Graph,
    PlainLiteral,
    Regime,
    Triple,
    TypedLiteral,
    URI,
    Vocabulary,
    collect_vocabulary,
    max_container_index,
)

DEFAULT_SKOLEM_NS = "urn:sk:"
FREEZE_NS = "urn:rdfhorn:frozen:"


class Verdict(enum.Enum):
    ENTAILED = "ENTAILED"
    NOT_ENTAILED = "NOT-ENTAILED"


@dataclass
class EntailmentResult:
    verdict: Verdict
    via_inconsistency: bool = False
    witness: dict | None = None
    stats: dict = field(default_factory=dict)

    @property
    def entailed(self) -> bool:
        return self.verdict == Verdict.ENTAILED

    def __bool__(self) -> bool:
        return self.entailed

    def verdict_line(self) -> str:
        line = "VERDICT: " + self.verdict.value
        return line + " via-inconsistency" if self.via_inconsistency else line


def _as_regime(r) -> Regime:
    return r if isinstance(r, Regime) else Regime(r)


def _as_mode(m) -> DatatypeMode:
    if m is None:
        return DatatypeMode.NONE
    return m if isinstance(m, DatatypeMode) else DatatypeMode(m)


def _skolemize_graph(S: Graph, namespace: str, avoid) -> tuple[Graph, dict]:
    """Replace the blank nodes of S by fresh URIs, in sorted order."""
    blanks = S.blank_nodes()
    mapping = skolem_mapping([Var(b.id) for b in blanks], namespace, avoid)
    bm = {b: mapping[Var(b.id)] for b in blanks}
    return Graph(Triple(*(bm.get(x, x) for x in t)) for t in S.triples), bm


def _fresh_constants(n: int, avoid, namespace: str = FREEZE_NS) -> list[URI]:
    out, i = [], 0
    while len(out) < n:
        i += 1
        c = URI(f"{namespace}c{i}")
        if c not in avoid:
            out.append(c)
    return out


class Prepared:
    """S materialized once under a regime; answers entailment questions for many E."""

    def __init__(self, S: Graph, regime=Regime.RDFS, D: DatatypeMap | None = None,
                 mode=DatatypeMode.NONE, limits: Limits | None = None, max_idx: int | None = None,
                 skolem_ns: str = DEFAULT_SKOLEM_NS, E_hint: Graph | None = None, build: bool = True):
        self.regime = _as_regime(regime)
        self.mode = _as_mode(mode)
        self.D = D
        self.limits = limits or Limits()
        self.skolem_ns = skolem_ns
        hint = E_hint if E_hint is not None else Graph()
        if self.regime == Regime.ERDFS and self.mode != DatatypeMode.NONE:
            raise UnsupportedError("extensional RDFS with datatypes has no Horn embedding")
        if self.regime == Regime.ERDFS:
            rep = standard_use(S)
            if not rep:
                raise NotStandardError("S does not have only standard use of the RDF(S) vocabulary",
                                       problems=rep.problems)
        self.S = S
        self.max_idx = max_idx if max_idx is not None else max_container_index([S, hint])
        self.literals = _literals_of(S) | _literals_of(hint)
        self.theory = None
        if build:
            self._build()
        else:
            self.theory = self._make_theory()

    # -- construction
    def _make_theory(self) -> HornTheory:
        S = self.S
        if self.mode != DatatypeMode.NONE:
            self.D = check_datatypes(self.mode, self.D)
            S = normalize(S, self.D, self.literals)
        skS, self.skolems = _skolemize_graph(S, self.skolem_ns, S.terms())
        vocab = collect_vocabulary([skS]) | self._extra_vocab()
        if self.regime == Regime.ERDFS:
            return tr_erdfs(skS).theory() | psi_erdfs_v(vocab, self.max_idx)
        facts = tuple(HornRule((), a) for a in tr(skS).atoms)
        return (HornTheory(facts) | psi(self.regime, self.D, vocab, self.max_idx, self.mode)
                | HornTheory(tuple(dom_facts(constants_of(facts)))))

    def _build(self):
        t0 = time.monotonic()
        self.theory = self._make_theory()
        self.engine = Engine(self.theory, self.limits)
        self.store = self.engine.materialize()
        self.build_ms = (time.monotonic() - t0) * 1000

    def _extra_vocab(self):
        lits = list(self.literals)
        if self.mode != DatatypeMode.NONE:
            lits = normalize(lits, self.D, self.literals)
        return Vocabulary(frozenset(), frozenset(x for x in lits if isinstance(x, PlainLiteral)),
                          frozenset(x for x in lits if isinstance(x, TypedLiteral)))

    @property
    def satisfiable(self) -> bool:
        return not self.store.bottom

    def stats(self) -> dict:
        s = dict(self.store.stats)
        s["elapsed_ms"] = round(self.build_ms, 3)
        return s

    def _compatible(self, E: Graph) -> bool:
        if max_container_index([E]) > self.max_idx:
            return False
        return _literals_of(E) <= self.literals

    # -- questions
    def entails(self, E: Graph) -> EntailmentResult:
        if not self._compatible(E):
            return Prepared(self.S, self.regime, self.D, self.mode, self.limits, None, self.skolem_ns,
                            E_hint=E).entails(E)
        t0 = time.monotonic()
        stats = self.stats()
        if self.regime == Regime.ERDFS:
            _check_erdfs(self.S, E, self.max_idx)
        if self.store.bottom:
            return EntailmentResult(Verdict.ENTAILED, True, None, stats)
        if self.mode != DatatypeMode.NONE:
            E = normalize(E, self.D, self.literals)
        if self.regime == Regime.ERDFS:
            res = self._entails_erdfs(E, stats)
        else:
            res = self._entails_query(tr(E), stats)
        res.stats["query_ms"] = round((time.monotonic() - t0) * 1000, 3)
        return res

    def _store_with_constants(self, consts) -> FactStore:
        """The store, extended with dom facts for constants that S does not mention."""
        I = self.store.interner
        new = [c for c in consts if I.get(c) is None]
        if not new or self.regime in (Regime.SIMPLE, Regime.RDF, Regime.ERDFS):
            return self.store
        return self.engine.extend(self.store, [r.head for r in dom_facts(new)])

    def _entails_query(self, q: ExistentialConjunction, stats) -> EntailmentResult:
        store = self._store_with_constants(q.constants())
        if store.bottom:
            return EntailmentResult(Verdict.ENTAILED, True, None, stats)
        w = query(store, q, self.limits)
        if w is None:
            return EntailmentResult(Verdict.NOT_ENTAILED, False, None, stats)
        return EntailmentResult(Verdict.ENTAILED, False, _witness(w), stats)

    def _entails_erdfs(self, E: Graph, stats) -> EntailmentResult:
        trE = tr_erdfs(E)
        w = query(self.store, trE.conjunction(), self.limits)
        if w is None:
            return EntailmentResult(Verdict.NOT_ENTAILED, False, None, stats)
        avoid = set(self.store.interner.ids) | E.terms()
        for rule in trE.rules:
            if not self._rule_entailed(rule, avoid):
                return EntailmentResult(Verdict.NOT_ENTAILED, False, None, stats)
        return EntailmentResult(Verdict.ENTAILED, False, _witness(w), stats)

    def _rule_entailed(self, rule: HornRule, avoid) -> bool:
        vs = sorted(rule.variables(), key=lambda v: v.name)
        consts = dict(zip(vs, _fresh_constants(len(vs), avoid)))
        body = [a.substitute(consts) for a in rule.body]
        head = rule.head.substitute(consts)
        st = self.engine.extend(self.store, body)
        return st.bottom or st.contains(head)


def _check_erdfs(S: Graph, E: Graph, max_idx):
    for name, g in (("S", S), ("E", E)):
        rep = standard_use(g)
        if not rep:
            raise NotStandardError(f"{name} does not have only standard use of the RDF(S) vocabulary: "
                                   + "; ".join(rep.problems), problems=rep.problems)
    rep = entailment_precondition_erdfs(S, E, max_idx)
    if not rep:
        raise PreconditionError("E is not within the vocabulary of S: " + "; ".join(rep.problems),
                                problems=rep.problems)


def _witness(w: dict) -> dict:
    return {BNode(v.name): t for v, t in sorted(w.items(), key=lambda kv: kv[0].name)}


def prepare(S: Graph, regime=Regime.RDFS, D: DatatypeMap | None = None, mode=DatatypeMode.NONE,
            limits: Limits | None = None, max_idx: int | None = None, E_hint: Graph | None = None) -> Prepared:
    return Prepared(S, regime, D, mode, limits, max_idx, E_hint=E_hint)


def decide(S: Graph, E: Graph, regime=Regime.RDFS, D: DatatypeMap | None = None, mode=DatatypeMode.NONE,
           limits: Limits | None = None, max_idx: int | None = None,
           skolem_ns: str = DEFAULT_SKOLEM_NS) -> EntailmentResult:
    """Decide S |=_regime E (with datatype ``mode`` over map ``D``)."""
    regime, mode = _as_regime(regime), _as_mode(mode)
    if regime == Regime.ERDFS:
        if mode != DatatypeMode.NONE:
            raise UnsupportedError("extensional RDFS with datatypes has no Horn embedding")
        _check_erdfs(S, E, max_idx)
    P = Prepared(S, regime, D, mode, limits, max_idx, skolem_ns, E_hint=E)
    return P.entails(E)


def satisfiable(S: Graph, regime=Regime.RDFS, D: DatatypeMap | None = None, mode=DatatypeMode.NONE,
                limits: Limits | None = None, max_idx: int | None = None) -> bool:
    return Prepared(S, regime, D, mode, limits, max_idx).satisfiable


def theory_for(S: Graph, regime=Regime.RDFS, D: DatatypeMap | None = None, mode=DatatypeMode.NONE,
               max_idx: int | None = None, E: Graph | None = None) -> HornTheory:
    """The Horn theory that ``decide`` materializes for S (for --dump-theory)."""
    return Prepared(S, regime, D, mode, None, max_idx, E_hint=E, build=False).theory


__all__ = [
    "decide", "satisfiable", "prepare", "Prepared", "EntailmentResult", "Verdict", "theory_for", "ILLXML",
]
