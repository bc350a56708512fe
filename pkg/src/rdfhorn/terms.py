"""RDF terms, triples, graphs and vocabularies."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Union

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"

_CONTAINER_RE = re.compile(re.escape(RDF_NS) + r"_([1-9][0-9]*)$")


@dataclass(frozen=True, slots=True)
class URI:
    value: str

    def __post_init__(self):
        if not self.value:
            raise ValueError("URI text must be nonempty")

    def __str__(self) -> str:
        return f"<{self.value}>"


@dataclass(frozen=True, slots=True)
class PlainLiteral:
    lexical: str
    lang: str | None = None

    def __post_init__(self):
        if self.lang is not None:
            if not self.lang:
                raise ValueError("empty language tag")
            object.__setattr__(self, "lang", self.lang.lower())

    def __str__(self) -> str:
        s = '"' + escape_string(self.lexical) + '"'
        return s + "@" + self.lang if self.lang else s


@dataclass(frozen=True, slots=True)
class TypedLiteral:
    lexical: str
    datatype: URI

    def __post_init__(self):
        if isinstance(self.datatype, str):
            object.__setattr__(self, "datatype", URI(self.datatype))

    def __str__(self) -> str:
        return '"' + escape_string(self.lexical) + '"^^' + str(self.datatype)


@dataclass(frozen=True, slots=True)
class BNode:
    id: str

    def __post_init__(self):
        if not self.id:
            raise ValueError("blank node id must be nonempty")

    def __str__(self) -> str:
        return "_:" + self.id


Term = Union[URI, PlainLiteral, TypedLiteral, BNode]
Literal = Union[PlainLiteral, TypedLiteral]

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def escape_string(s: str) -> str:
    return "".join(_ESCAPES.get(ch, ch) for ch in s)


def is_literal(t) -> bool:
    return isinstance(t, (PlainLiteral, TypedLiteral))


def is_name(t) -> bool:
    """URIs and literals, i.e. everything except blank nodes."""
    return isinstance(t, (URI, PlainLiteral, TypedLiteral))


_KIND_ORDER = {URI: 0, PlainLiteral: 1, TypedLiteral: 2, BNode: 3}


def term_sort_key(t: Term) -> tuple:
    """Total deterministic order over terms of all four kinds."""
    if isinstance(t, URI):
        return (0, t.value, "")
    if isinstance(t, PlainLiteral):
        return (1, t.lexical, t.lang or "")
    if isinstance(t, TypedLiteral):
        return (2, t.lexical, t.datatype.value)
    return (3, t.id, "")


def container_index(t) -> int | None:
    """Return i if ``t`` is rdf:_i, else None."""
    if isinstance(t, URI):
        m = _CONTAINER_RE.match(t.value)
        if m:
            return int(m.group(1))
    return None


class RDF:
    type = URI(RDF_NS + "type")
    Property = URI(RDF_NS + "Property")
    XMLLiteral = URI(RDF_NS + "XMLLiteral")
    nil = URI(RDF_NS + "nil")
    List = URI(RDF_NS + "List")
    Statement = URI(RDF_NS + "Statement")
    subject = URI(RDF_NS + "subject")
    predicate = URI(RDF_NS + "predicate")
    object = URI(RDF_NS + "object")
    first = URI(RDF_NS + "first")
    rest = URI(RDF_NS + "rest")
    Seq = URI(RDF_NS + "Seq")
    Bag = URI(RDF_NS + "Bag")
    Alt = URI(RDF_NS + "Alt")
    value = URI(RDF_NS + "value")

    @staticmethod
    def member(i: int) -> URI:
        if i < 1:
            raise ValueError("container membership index must be positive")
        return URI(f"{RDF_NS}_{i}")


class RDFS:
    domain = URI(RDFS_NS + "domain")
    range = URI(RDFS_NS + "range")
    Resource = URI(RDFS_NS + "Resource")
    Literal = URI(RDFS_NS + "Literal")
    Datatype = URI(RDFS_NS + "Datatype")
    Class = URI(RDFS_NS + "Class")
    subClassOf = URI(RDFS_NS + "subClassOf")
    subPropertyOf = URI(RDFS_NS + "subPropertyOf")
    member = URI(RDFS_NS + "member")
    Container = URI(RDFS_NS + "Container")
    label = URI(RDFS_NS + "label")
    ContainerMembershipProperty = URI(RDFS_NS + "ContainerMembershipProperty")
    comment = URI(RDFS_NS + "comment")
    seeAlso = URI(RDFS_NS + "seeAlso")
    isDefinedBy = URI(RDFS_NS + "isDefinedBy")


class XSD:
    string = URI(XSD_NS + "string")
    integer = URI(XSD_NS + "integer")
    decimal = URI(XSD_NS + "decimal")
    boolean = URI(XSD_NS + "boolean")


RDF_VOCABULARY = frozenset(
    v for k, v in vars(RDF).items() if isinstance(v, URI)
) | {RDF.member(1)}
RDFS_VOCABULARY = frozenset(v for k, v in vars(RDFS).items() if isinstance(v, URI))


class Triple(NamedTuple):
    subject: Term
    predicate: Term
    object: Term

    @property
    def is_normal(self) -> bool:
        return (
            isinstance(self.subject, (URI, BNode))
            and isinstance(self.predicate, URI)
        )

    @property
    def is_ground(self) -> bool:
        return not any(isinstance(t, BNode) for t in self)

    def blank_nodes(self) -> set[BNode]:
        return {t for t in self if isinstance(t, BNode)}

    def sort_key(self) -> tuple:
        return tuple(term_sort_key(t) for t in self)

    def __str__(self) -> str:
        return f"{self.subject} {self.predicate} {self.object} ."


class Graph:
    """A finite set of generalized triples. Iteration is sorted."""

    __slots__ = ("_triples", "_sorted")

    def __init__(self, triples: Iterable = ()):
        self._triples = frozenset(
            t if isinstance(t, Triple) else Triple(*t) for t in triples
        )
        self._sorted = None

    @property
    def triples(self) -> frozenset[Triple]:
        return self._triples

    def __iter__(self) -> Iterator[Triple]:
        if self._sorted is None:
            self._sorted = tuple(sorted(self._triples, key=Triple.sort_key))
        return iter(self._sorted)

    def __len__(self) -> int:
        return len(self._triples)

    def __contains__(self, t) -> bool:
        return t in self._triples

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self._triples == other._triples

    def __hash__(self) -> int:
        return hash(self._triples)

    def __or__(self, other: "Graph") -> "Graph":
        return Graph(self._triples | other._triples)

    def __repr__(self) -> str:
        return f"Graph({len(self)} triples)"

    def blank_nodes(self) -> list[BNode]:
        """bl(G), sorted by id."""
        return sorted({b for t in self._triples for b in t.blank_nodes()}, key=lambda b: b.id)

    def terms(self) -> set:
        return {x for t in self._triples for x in t}

    @property
    def is_ground(self) -> bool:
        return all(t.is_ground for t in self._triples)

    @property
    def is_normal(self) -> bool:
        return all(t.is_normal for t in self._triples)


@dataclass(frozen=True)
class Vocabulary:
    uris: frozenset = frozenset()
    plain: frozenset = frozenset()
    typed: frozenset = frozenset()

    @property
    def literals(self) -> frozenset:
        return self.plain | self.typed

    def __or__(self, other: "Vocabulary") -> "Vocabulary":
        return Vocabulary(self.uris | other.uris, self.plain | other.plain, self.typed | other.typed)


def collect_vocabulary(graphs: Iterable[Graph], builtins: bool = True) -> Vocabulary:
    uris, plain, typed = set(), set(), set()
    if builtins:
        uris |= RDF_VOCABULARY | RDFS_VOCABULARY
    for g in graphs:
        for t in g.triples if isinstance(g, Graph) else g:
            for x in t:
                if isinstance(x, URI):
                    uris.add(x)
                elif isinstance(x, PlainLiteral):
                    plain.add(x)
                elif isinstance(x, TypedLiteral):
                    typed.add(x)
                    uris.add(x.datatype)
    return Vocabulary(frozenset(uris), frozenset(plain), frozenset(typed))


def max_container_index(graphs: Iterable[Graph]) -> int:
    """Largest i such that rdf:_i occurs in any graph; at least 1."""
    best = 1
    for g in graphs:
        for t in g.triples if isinstance(g, Graph) else g:
            for x in t:
                i = container_index(x)
                if i is not None and i > best:
                    best = i
    return best


class Regime(enum.Enum):
    SIMPLE = "simple"
    RDF = "rdf"
    RDFS = "rdfs"
    ERDFS = "erdfs"

    def __lt__(self, other):  # for sorting in reports
        return _REGIME_ORDER[self] < _REGIME_ORDER[other]


_REGIME_ORDER = {Regime.SIMPLE: 0, Regime.RDF: 1, Regime.RDFS: 2, Regime.ERDFS: 3}


class DatatypeMode(enum.Enum):
    NONE = "none"
    DSTAR = "dstar"
    D = "d"
