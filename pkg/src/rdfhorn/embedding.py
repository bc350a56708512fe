"""Translations of RDF graphs into Horn frame logic and the regime axiomatizations.

``tr`` maps a graph to an existential conjunction of data molecules.
``psi`` builds the axiomatization of an entailment regime, optionally with
the D* or D datatype axioms, instantiated over a vocabulary and truncated at
a container-membership index. ``tr_erdfs`` and ``psi_erdfs_v`` implement the
direct embedding of extensional RDFS for graphs with standard use of the
RDF(S) vocabulary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .axioms import axiomatic_triples
from .datatypes import DatatypeMap, IllTyped, WellTyped, is_definite, is_xml_content, xsd_map
from .errors import NoXMLLiteralError, NotDefiniteError, NotStandardError, UnsupportedError
from .logic import (
    BOTTOM,
    And,
    Atom,
    ExistentialConjunction,
    HornRule,
    HornTheory,
    Implies,
    Var,
    data,
    exists,
    forall,
    horn_normalize,
    isa,
    pred,
)
from .terms import (
    RDF,
    RDFS,
    BNode,
    DatatypeMode,
    Graph,
    Regime,
    Triple,
    TypedLiteral,
    URI,
    Vocabulary,
    collect_vocabulary,
    is_name,
)

DOM = "dom"  # guard predicate: holds for every constant of the problem
ILLD = "illD"
DT = "dt"
ILLXML = URI("urn:rdfhorn:illxml")

_X, _Y, _Z, _U, _V = (Var(n) for n in ("x", "y", "z", "u", "v"))
_Z1, _Z2 = Var("z1"), Var("z2")

TYPE, SC, SP = RDF.type, RDFS.subClassOf, RDFS.subPropertyOf


def _bvar(b: BNode) -> Var:
    return Var(b.id)


def _lterm(t):
    return _bvar(t) if isinstance(t, BNode) else t


# ---------------------------------------------------------------------------
# tr


def tr(G: Graph) -> ExistentialConjunction:
    """One data molecule per triple, blank nodes existentially quantified."""
    atoms = tuple(data(*(_lterm(x) for x in t)) for t in G)
    return ExistentialConjunction(tuple(_bvar(b) for b in G.blank_nodes()), atoms)


def constants_of(rules) -> set:
    out = set()
    for r in rules:
        for a in (*r.body, r.head):
            for x in a.args:
                if not isinstance(x, Var):
                    out.add(x)
    return out


def dom_facts(constants) -> list[HornRule]:
    return [HornRule((), pred(DOM, c)) for c in sorted(constants, key=_const_key)]


def _const_key(c):
    from .terms import term_sort_key

    return term_sort_key(c)


# ---------------------------------------------------------------------------
# psi


def _fact(a: Atom) -> HornRule:
    return HornRule((), a)


def _table9_rdf_axioms() -> list:
    return [
        forall("x", Implies(exists("y z", data(_Y, _X, _Z)), data(_X, TYPE, RDF.Property))),
        forall("x", Implies(And(data(_X, TYPE, RDF.XMLLiteral), pred(ILLD, _X)), BOTTOM)),
    ]


def _table9_rdfs_axioms() -> list:
    return [
        forall("x", data(_X, TYPE, RDFS.Resource)),
        forall("u v x y", Implies(And(data(_X, RDFS.domain, _Y), data(_U, _X, _V)), data(_U, TYPE, _Y))),
        forall("u v x y", Implies(And(data(_X, RDFS.range, _Y), data(_U, _X, _V)), data(_V, TYPE, _Y))),
        forall("x", Implies(data(_X, TYPE, RDF.Property), data(_X, SP, _X))),
        forall("x y z", Implies(And(data(_X, SP, _Y), data(_Y, SP, _Z)), data(_X, SP, _Z))),
        forall("x y", Implies(data(_X, SP, _Y), forall("z1 z2", Implies(data(_Z1, _X, _Z2), data(_Z1, _Y, _Z2))))),
        forall("x", Implies(data(_X, TYPE, RDFS.Class), data(_X, SC, RDFS.Resource))),
        forall("x y", Implies(data(_X, SC, _Y), forall("z", Implies(data(_Z, TYPE, _X), data(_Z, TYPE, _Y))))),
        forall("x", Implies(data(_X, TYPE, RDFS.Class), data(_X, SC, _X))),
        forall("x y z", Implies(And(data(_X, SC, _Y), data(_Y, SC, _Z)), data(_X, SC, _Z))),
        forall("x", Implies(data(_X, TYPE, RDFS.ContainerMembershipProperty), data(_X, SP, RDFS.member))),
        forall("x", Implies(data(_X, TYPE, RDFS.Datatype), data(_X, SC, RDFS.Literal))),
        forall("x", Implies(And(data(_X, TYPE, RDFS.Literal), pred(ILLD, _X)), BOTTOM)),
    ]


def _table9_erdfs_axioms() -> list:
    """The extensional (if-and-only-if) axioms; not Horn, kept symbolically."""
    return [
        forall("x y", Implies(forall("u v", Implies(data(_U, _X, _V), data(_U, TYPE, _Y))), data(_X, RDFS.domain, _Y))),
        forall("x y", Implies(forall("u v", Implies(data(_U, _X, _V), data(_V, TYPE, _Y))), data(_X, RDFS.range, _Y))),
        forall("x y", Implies(
            And(data(_X, TYPE, RDF.Property), data(_Y, TYPE, RDF.Property),
                forall("u v", Implies(data(_U, _X, _V), data(_U, _Y, _V)))),
            data(_X, SP, _Y))),
        forall("x y", Implies(
            And(data(_X, TYPE, RDFS.Class), data(_Y, TYPE, RDFS.Class),
                forall("u", Implies(data(_U, TYPE, _X), data(_U, TYPE, _Y)))),
            data(_X, SC, _Y))),
    ]


def _rules(formulas) -> list[HornRule]:
    out = []
    for f in formulas:
        out += horn_normalize(f, guard=DOM)
    return out


def _xml_well_typed(lit: TypedLiteral, D: DatatypeMap | None) -> bool:
    if D is not None:
        return isinstance(D.well_typed(lit), WellTyped)
    return is_xml_content(lit.lexical)


def check_datatypes(mode: DatatypeMode, D: DatatypeMap | None) -> DatatypeMap | None:
    if mode == DatatypeMode.NONE:
        return None
    D = D if D is not None else xsd_map()
    if not D.has_xmlliteral:
        raise NoXMLLiteralError("a datatype map must interpret rdf:XMLLiteral")
    if mode == DatatypeMode.D:
        rep = is_definite(D)
        if not rep:
            raise NotDefiniteError(
                "D entailment over a non-definite datatype map needs case reasoning: " + "; ".join(rep.violations),
                violations=rep.violations,
            )
    return D


def psi(
    regime: Regime,
    D: DatatypeMap | None = None,
    vocab: Vocabulary | None = None,
    max_idx: int = 1,
    mode: DatatypeMode = DatatypeMode.NONE,
) -> HornTheory:
    """Axiomatization of ``regime`` (plus D* or D axioms) over ``vocab``.

    The universally quantified ``x type Resource`` axiom is guarded by the
    ``dom`` predicate; ``dom`` facts are emitted for every constant of the
    vocabulary and of the theory itself. The literals are taken as they are:
    callers normalize them first in the datatype modes.
    """
    vocab = vocab or Vocabulary()
    if regime == Regime.ERDFS and mode != DatatypeMode.NONE:
        raise UnsupportedError("extensional RDFS with datatypes has no Horn embedding")
    D = check_datatypes(mode, D)
    rules: list[HornRule] = []
    symbolic: list = []
    typed = sorted(vocab.typed, key=_const_key)
    plain = sorted(vocab.plain, key=_const_key)
    if regime != Regime.SIMPLE:
        for t in sorted(axiomatic_triples(Regime.RDF, max_idx), key=Triple.sort_key):
            rules.append(_fact(data(*t)))
        for t in typed:
            if t.datatype == RDF.XMLLiteral:
                if _xml_well_typed(t, D):
                    rules.append(_fact(data(t, TYPE, RDF.XMLLiteral)))
                else:
                    rules.append(_fact(pred(ILLD, t)))
        rules += _rules(_table9_rdf_axioms())
    if regime in (Regime.RDFS, Regime.ERDFS):
        for t in sorted(axiomatic_triples(Regime.RDFS, max_idx), key=Triple.sort_key):
            rules.append(_fact(data(*t)))
        for t in plain:
            rules.append(_fact(data(t, TYPE, RDFS.Literal)))
        rules += _rules(_table9_rdfs_axioms())
    if regime == Regime.ERDFS:
        symbolic += _table9_erdfs_axioms()
    if D is not None:
        rules += _datatype_axioms(D, typed, plain, mode)
    consts = set(vocab.uris) | set(vocab.literals) | constants_of(rules)
    rules += dom_facts(consts)
    return HornTheory(tuple(rules), tuple(symbolic))


def _datatype_axioms(D: DatatypeMap, typed, plain, mode) -> list[HornRule]:
    rules = []
    dom = D.dom()
    for t in typed:
        wt = D.well_typed(t)
        if isinstance(wt, WellTyped):
            rules.append(_fact(data(t, TYPE, t.datatype)))
        elif isinstance(wt, IllTyped):
            rules.append(_fact(pred(ILLD, t)))
    for u in dom:
        rules.append(_fact(data(u, TYPE, RDFS.Datatype)))
    for u in dom:
        rules += _rules([forall("x", Implies(And(pred(ILLD, _X), data(_X, TYPE, u)), BOTTOM))])
    if mode != DatatypeMode.D:
        return rules
    for t in typed:
        tok = D.value(t)
        if tok is None:
            continue
        for u in dom:
            if D.member(tok, u):
                rules.append(_fact(data(t, TYPE, u)))
    for s in plain:
        tok = D.value(s)
        for u in dom:
            if D.member(tok, u):
                rules.append(_fact(data(s, TYPE, u)))
    for u in dom:
        rules += _rules([forall("x", Implies(data(_X, TYPE, u), pred(DT, _X, u)))])
    for i, u1 in enumerate(dom):
        for u2 in dom[i + 1:]:
            if D.disjoint(u1, u2):
                rules += _rules([Implies(exists("x", And(pred(DT, _X, u1), pred(DT, _X, u2))), BOTTOM)])
    for s in plain:
        tok = D.value(s)
        for u in dom:
            if not D.member(tok, u):
                rules.append(HornRule((pred(DT, s, u),), BOTTOM))
    for t in typed:
        tok = D.value(t)
        if tok is None or t.datatype not in D:
            continue
        for u in dom:
            if not D.member(tok, u):
                rules.append(HornRule((pred(DT, t, u),), BOTTOM))
    return rules


# ---------------------------------------------------------------------------
# Standard use, positions and the eRDFS precondition


ONTOLOGY_PROPERTIES = (RDF.type, RDFS.subClassOf, RDFS.domain, RDFS.range, RDFS.subPropertyOf)
TYPE_ONLY_CLASSES = (
    RDFS.ContainerMembershipProperty, RDFS.Resource, RDFS.Class, RDFS.Datatype, RDF.Property,
)


@dataclass(frozen=True)
class Report:
    ok: bool
    problems: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


def _triple_violations(t: Triple) -> list[str]:
    s, p, o = t
    out = []
    for pos, x in (("subject", s), ("object", o)):
        if x in ONTOLOGY_PROPERTIES:
            out.append(f"{x} in {pos} position of {t}")
    for pos, x in (("subject", s), ("predicate", p), ("object", o)):
        if x in TYPE_ONLY_CLASSES and not (pos == "object" and p == TYPE):
            out.append(f"{x} in {pos} position of {t}")
    return out


def standard_use(G) -> Report:
    """Whether the graph uses the RDF(S) ontology vocabulary only in its standard positions."""
    problems = []
    for t in (G if isinstance(G, Graph) else Graph(G)):
        problems += _triple_violations(t)
    return Report(not problems, tuple(problems))


def standard_axiomatic_triples(max_idx: int = 1) -> list[Triple]:
    """RDF(S) axiomatic triples (up to rdf:_max_idx) that have only standard use."""
    return [t for t in sorted(axiomatic_triples(Regime.RDFS, max_idx), key=Triple.sort_key)
            if not _triple_violations(t)]


def positions(G) -> tuple[set, set]:
    """(terms in property positions, terms in class positions) of a graph."""
    props, classes = set(), set()
    for s, p, o in (G if isinstance(G, Graph) else Graph(G)):
        props.add(p)
        if p == SP:
            props |= {s, o}
        elif p in (RDFS.domain, RDFS.range):
            props.add(s)
            classes.add(o)
        elif p == SC:
            classes |= {s, o}
        elif p == TYPE:
            classes.add(o)
            if o in (RDF.Property, RDFS.ContainerMembershipProperty):
                props.add(s)
            elif o in (RDFS.Class, RDFS.Datatype):
                classes.add(s)
    return props, classes


def vocabularies(G, max_idx: int = 1) -> tuple[set, set]:
    """Property and class vocabularies: names in those positions in G or the standard axiomatic triples."""
    props, classes = positions(G)
    ap, ac = positions(standard_axiomatic_triples(max_idx))
    return {x for x in props | ap if is_name(x)}, {x for x in classes | ac if is_name(x)}


def entailment_precondition_erdfs(S: Graph, E: Graph, max_idx: int | None = None) -> Report:
    """Check E ⊴ S for two graphs with standard use."""
    from .terms import max_container_index

    if max_idx is None:
        max_idx = max_container_index([S, E])
    problems = []
    for name, g in (("S", S), ("E", E)):
        r = standard_use(g)
        if not r:
            problems += [f"{name}: {p}" for p in r.problems]
    if problems:
        return Report(False, tuple(problems))
    sp_, sc_ = vocabularies(S, max_idx)
    ep_pos, ec_pos = positions(E)
    for x in sorted({x for x in ep_pos if is_name(x)} - sp_, key=_const_key):
        problems.append(f"property {x} of E is not in the property vocabulary of S")
    for x in sorted({x for x in ec_pos if is_name(x)} - sc_, key=_const_key):
        problems.append(f"class {x} of E is not in the class vocabulary of S")
    for x in sorted({x for x in ep_pos | ec_pos if isinstance(x, BNode)}, key=_const_key):
        problems.append(f"blank node {x} in a class or property position of E")
    terms = E.terms()
    for x in (RDFS.Resource, RDFS.Class, RDF.Property):
        if x in terms:
            problems.append(f"{x} occurs in E")
    return Report(not problems, tuple(problems))


# ---------------------------------------------------------------------------
# tr^erdfs


@dataclass(frozen=True)
class ErdfsTranslation:
    """Existential conjunction of atoms plus universally closed Horn rules."""

    variables: tuple = ()
    atoms: tuple = ()
    rules: tuple = field(default_factory=tuple)

    def conjunction(self) -> ExistentialConjunction:
        used = {v for a in self.atoms for v in a.variables()}
        return ExistentialConjunction(tuple(v for v in self.variables if v in used), self.atoms)

    def theory(self) -> HornTheory:
        """As a theory; only meaningful when ground."""
        return HornTheory(tuple(HornRule((), a) for a in self.atoms) + self.rules)


_RX, _RY = Var("#x"), Var("#y")  # rule variables; cannot clash with blank-node ids from parsing


def tr_erdfs_triple(t: Triple) -> tuple[list[Atom], list[HornRule]]:
    s, p, o = (_lterm(x) for x in t)
    if p == TYPE and o == RDFS.Datatype:
        return [isa(s, RDFS.Datatype)], [HornRule((isa(_RX, s),), isa(_RX, RDFS.Literal))]
    if p == TYPE and o == RDFS.ContainerMembershipProperty:
        return ([isa(s, RDFS.ContainerMembershipProperty)],
                [HornRule((data(_RX, s, _RY),), data(_RX, RDFS.member, _RY))])
    if p == TYPE:
        return [isa(s, o)], []
    if p == SC:
        return [], [HornRule((isa(_RX, s),), isa(_RX, o))]
    if p == SP:
        return [], [HornRule((data(_RX, s, _RY),), data(_RX, o, _RY))]
    if p == RDFS.domain:
        return [], [HornRule((data(_RX, s, _RY),), isa(_RX, o))]
    if p == RDFS.range:
        return [], [HornRule((data(_RX, s, _RY),), isa(_RY, o))]
    return [data(s, p, o)], []


def tr_erdfs(G: Graph) -> ErdfsTranslation:
    """Direct embedding of a graph with standard use of the RDF(S) vocabulary."""
    rep = standard_use(G)
    if not rep:
        raise NotStandardError("graph does not have only standard use of the RDF(S) vocabulary",
                               problems=rep.problems)
    atoms, rules = [], []
    for t in G:
        a, r = tr_erdfs_triple(t)
        atoms += a
        rules += r
    return ErdfsTranslation(
        tuple(_bvar(b) for b in G.blank_nodes()),
        tuple(dict.fromkeys(atoms)),
        tuple(dict.fromkeys(rules)),
    )


def psi_erdfs_v(vocab: Vocabulary | None = None, max_idx: int = 1) -> HornTheory:
    """Axioms for the part of the RDF(S) vocabulary that the direct embedding leaves out."""
    vocab = vocab or Vocabulary()
    rules: list[HornRule] = []
    for t in standard_axiomatic_triples(max_idx):
        a, r = tr_erdfs_triple(t)
        rules += [HornRule((), x) for x in a] + r
    for t in sorted(vocab.typed, key=_const_key):
        if t.datatype == RDF.XMLLiteral:
            cls = RDF.XMLLiteral if is_xml_content(t.lexical) else ILLXML
            rules.append(HornRule((), isa(t, cls)))
    for t in sorted(vocab.plain, key=_const_key):
        rules.append(HornRule((), isa(t, RDFS.Literal)))
    rules.append(HornRule((isa(_X, RDFS.Literal), isa(_X, ILLXML)), BOTTOM))
    return HornTheory(tuple(rules))


def vocabulary_of(*graphs) -> Vocabulary:
    return collect_vocabulary(graphs)


__all__ = [
    "tr", "psi", "psi_erdfs_v", "tr_erdfs", "tr_erdfs_triple", "standard_use", "positions", "vocabularies",
    "entailment_precondition_erdfs", "standard_axiomatic_triples", "ErdfsTranslation", "Report",
    "DOM", "ILLD", "DT", "ILLXML", "dom_facts", "constants_of",
]
