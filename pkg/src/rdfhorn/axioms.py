"""RDF and RDFS axiomatic triples, truncated at a container-membership index.

The tables below list the membership conditions of the RDF and RDFS
interpretations as (subject, predicate, object) patterns. ``"_i"`` in the
subject stands for every container membership property rdf:_1 .. rdf:_n.
"""

from __future__ import annotations

from .errors import RegimeError
from .terms import RDF, RDFS, Regime, Triple

_P = "property"  # shorthand: <s, rdf:type, rdf:Property>

RDF_TABLE = [
    (RDF.type, _P, None),
    (RDF.subject, _P, None),
    (RDF.predicate, _P, None),
    (RDF.object, _P, None),
    (RDF.first, _P, None),
    (RDF.rest, _P, None),
    (RDF.value, _P, None),
    ("_i", _P, None),
    (RDF.nil, RDF.type, RDF.List),
]

RDFS_TABLE = [
    # domains
    *[(s, RDFS.domain, RDFS.Resource) for s in (
        RDF.type, RDFS.member, RDFS.seeAlso, RDFS.isDefinedBy, RDFS.comment, RDFS.label, RDF.value, "_i")],
    *[(s, RDFS.domain, RDF.Property) for s in (RDFS.domain, RDFS.range, RDFS.subPropertyOf)],
    (RDFS.subClassOf, RDFS.domain, RDFS.Class),
    *[(s, RDFS.domain, RDF.Statement) for s in (RDF.subject, RDF.predicate, RDF.object)],
    *[(s, RDFS.domain, RDF.List) for s in (RDF.first, RDF.rest)],
    # ranges
    *[(s, RDFS.range, RDFS.Resource) for s in (
        RDF.subject, RDF.predicate, RDF.object, RDFS.member, RDF.first, RDFS.seeAlso,
        RDFS.isDefinedBy, RDF.value, "_i")],
    *[(s, RDFS.range, RDFS.Literal) for s in (RDFS.comment, RDFS.label)],
    (RDFS.subPropertyOf, RDFS.range, RDF.Property),
    *[(s, RDFS.range, RDFS.Class) for s in (RDF.type, RDFS.domain, RDFS.range, RDFS.subClassOf)],
    (RDF.rest, RDFS.range, RDF.List),
    # the rest
    *[(s, RDFS.subClassOf, RDFS.Container) for s in (RDF.Alt, RDF.Bag, RDF.Seq)],
    (RDFS.ContainerMembershipProperty, RDFS.subClassOf, RDF.Property),
    (RDFS.isDefinedBy, RDFS.subPropertyOf, RDFS.seeAlso),
    (RDF.XMLLiteral, RDF.type, RDFS.Datatype),
    (RDF.XMLLiteral, RDFS.subClassOf, RDFS.Literal),
    (RDFS.Datatype, RDFS.subClassOf, RDFS.Class),
    ("_i", RDF.type, RDFS.ContainerMembershipProperty),
]


def _expand(table, n: int) -> set[Triple]:
    out = set()
    for s, p, o in table:
        if p == _P:
            p, o = RDF.type, RDF.Property
        subjects = [RDF.member(i) for i in range(1, n + 1)] if s == "_i" else [s]
        for subj in subjects:
            out.add(Triple(subj, p, o))
    return out


def axiomatic_triples(regime: Regime, max_container_index: int = 1) -> frozenset[Triple]:
    """Axiomatic triples of ``regime`` (Rdf or Rdfs) with rdf:_i for 1 <= i <= n."""
    if max_container_index < 1:
        raise ValueError("max_container_index must be positive")
    if regime == Regime.RDF:
        return frozenset(_expand(RDF_TABLE, max_container_index))
    if regime == Regime.RDFS:
        return frozenset(_expand(RDF_TABLE, max_container_index) | _expand(RDFS_TABLE, max_container_index))
    raise RegimeError(f"no axiomatic triple set for regime {regime.value}")
