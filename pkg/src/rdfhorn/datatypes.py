"""Datatype maps, well-typedness, definiteness and literal normalization.

A value is represented by a hashable *token*. Two well-typed literals denote
the same value iff their tokens are equal. Tokens are tuples whose first
element names a value space family:

* ``("string", s)``: xsd:string values and plain literals without tag
* ``("num", c)``: xsd:integer and xsd:decimal, ``c`` a canonical decimal string
* ``("xml", s)``: XML literal values, identified with their lexical form
* ``("bool", b)``: xsd:boolean
* ``("langstring", s, tag)``: tagged plain literals, which belong to no
  datatype value space
* custom datatypes use their declared value-space name
"""

from __future__ import annotations

import json
import re
import xml.parsers.expat
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from .errors import ConfigError
from .terms import RDF, RDF_NS, RDFS_NS, XSD, XSD_NS, URI, Graph, PlainLiteral, Triple, TypedLiteral

# ---------------------------------------------------------------------------
# Lexical tests and canonical forms of the built-in datatypes

_INTEGER_RE = re.compile(r"[+-]?[0-9]+\Z")
_DECIMAL_RE = re.compile(r"[+-]?([0-9]+(\.[0-9]*)?|\.[0-9]+)\Z")


def canonical_decimal(s: str) -> str:
    """Exact canonical decimal string: no '+', no leading/trailing zeros, "0" for zero."""
    neg = s.startswith("-")
    s = s.lstrip("+-")
    whole, _, frac = s.partition(".")
    whole = whole.lstrip("0")
    frac = frac.rstrip("0")
    if not whole and not frac:
        return "0"
    out = (whole or "0") + ("." + frac if frac else "")
    return "-" + out if neg else out


def is_xml_content(s: str) -> bool:
    """Balanced, well-formed XML content (as found between a start and an end tag)."""
    p = xml.parsers.expat.ParserCreate()
    try:
        p.Parse("<w>" + s + "</w>", True)
    except xml.parsers.expat.ExpatError:
        return False
    return True


@dataclass(frozen=True)
class Datatype:
    uri: URI
    lexical_test: Callable[[str], bool]
    value_key: Callable[[str], tuple]
    value_space: str
    infinite: bool = True
    member: Callable[[tuple], bool] | None = None
    kind: str = "builtin"

    def contains(self, token: tuple) -> bool:
        """True iff the value denoted by ``token`` is in this datatype's value space."""
        if token is None:
            return False
        if self.member is not None:
            return self.member(token)
        return token[0] == self.value_space


def _builtin(uri: URI) -> Datatype:
    if uri == XSD.string:
        return Datatype(uri, lambda s: True, lambda s: ("string", s), "string")
    if uri == XSD.integer:
        return Datatype(
            uri,
            lambda s: bool(_INTEGER_RE.match(s)),
            lambda s: ("num", canonical_decimal(s)),
            "num",
            member=lambda t: t[0] == "num" and "." not in t[1],
        )
    if uri == XSD.decimal:
        return Datatype(uri, lambda s: bool(_DECIMAL_RE.match(s)), lambda s: ("num", canonical_decimal(s)), "num")
    if uri == RDF.XMLLiteral:
        return Datatype(uri, is_xml_content, lambda s: ("xml", s), "xml")
    if uri == XSD.boolean:
        return Datatype(
            uri,
            lambda s: s in ("true", "false", "1", "0"),
            lambda s: ("bool", s in ("true", "1")),
            "bool",
            infinite=False,
        )
    raise ConfigError(f"unknown builtin datatype {uri.value}")


BUILTIN_URIS = (RDF.XMLLiteral, XSD.string, XSD.integer, XSD.decimal, XSD.boolean)

# relations between built-in datatypes sharing a value-space family
_BUILTIN_RELATIONS = {frozenset((XSD.integer, XSD.decimal)): "infinite-overlap"}

RELATIONS = ("disjoint", "infinite-overlap", "finite-overlap")


# ---------------------------------------------------------------------------
# Well-typedness


@dataclass(frozen=True)
class WellTyped:
    token: tuple


@dataclass(frozen=True)
class IllTyped:
    pass


@dataclass(frozen=True)
class Unknown:
    pass


ILL_TYPED = IllTyped()
UNKNOWN = Unknown()


@dataclass(frozen=True)
class DefinitenessReport:
    ok: bool
    violations: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


@dataclass
class DatatypeMap:
    """Partial map from URIs to datatypes plus declared value-space relations."""

    entries: dict = field(default_factory=dict)
    relations: dict = field(default_factory=dict)  # frozenset({u1, u2}) -> relation name
    value_members: dict = field(default_factory=dict)  # uri -> URIs of datatypes that are values of it

    def __contains__(self, uri) -> bool:
        return uri in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def dom(self) -> list[URI]:
        return sorted(self.entries, key=lambda u: u.value)

    @property
    def has_xmlliteral(self) -> bool:
        d = self.entries.get(RDF.XMLLiteral)
        return d is not None and d.value_space == "xml"

    def well_typed(self, lit: TypedLiteral):
        d = self.entries.get(lit.datatype)
        if d is None:
            return UNKNOWN
        if not d.lexical_test(lit.lexical):
            return ILL_TYPED
        return WellTyped(d.value_key(lit.lexical))

    def value(self, lit) -> tuple | None:
        """Value token of a plain literal or well-typed typed literal; None otherwise."""
        if isinstance(lit, PlainLiteral):
            if lit.lang is None:
                return ("string", lit.lexical)
            return ("langstring", lit.lexical, lit.lang)
        if isinstance(lit, TypedLiteral):
            wt = self.well_typed(lit)
            return wt.token if isinstance(wt, WellTyped) else None
        return None

    def member(self, token, uri: URI) -> bool:
        d = self.entries.get(uri)
        return d is not None and d.contains(token)

    def relation(self, u1: URI, u2: URI) -> str | None:
        """'equal', a name from RELATIONS, or None if unknown."""
        if u1 == u2:
            return "equal"
        key = frozenset((u1, u2))
        if key in self.relations:
            return self.relations[key]
        if key in _BUILTIN_RELATIONS:
            return _BUILTIN_RELATIONS[key]
        d1, d2 = self.entries.get(u1), self.entries.get(u2)
        if d1 is None or d2 is None:
            return None
        if d1.value_space != d2.value_space:
            return "disjoint"
        return None

    def disjoint(self, u1: URI, u2: URI) -> bool:
        return self.relation(u1, u2) == "disjoint"

    @classmethod
    def from_builtins(cls, uris: Iterable[URI] = BUILTIN_URIS[:4]) -> "DatatypeMap":
        return cls({u: _builtin(u) for u in uris})


def xsd_map() -> DatatypeMap:
    """rdf:XMLLiteral, xsd:string, xsd:integer and xsd:decimal: a definite datatype map."""
    return DatatypeMap.from_builtins()


def is_definite(D: DatatypeMap) -> DefinitenessReport:
    """Check the definiteness conditions pairwise and return the violations found."""
    v = []
    dom = D.dom()
    for u in dom:
        if not D.entries[u].infinite:
            v.append(f"finite value space: {u.value}")
    for i, u1 in enumerate(dom):
        for u2 in dom[i + 1:]:
            rel = D.relation(u1, u2)
            if rel == "finite-overlap":
                v.append(f"finite-overlap: {u1.value} {u2.value}")
            elif rel is None:
                v.append(f"undeclared relation: {u1.value} {u2.value}")
    for u, members in sorted(D.value_members.items(), key=lambda kv: kv[0].value):
        for m in members:
            if m in D.entries:
                v.append(f"datatype in value space: {m.value} in {u.value}")
    return DefinitenessReport(not v, tuple(v))


# ---------------------------------------------------------------------------
# Config loading

_PREFIXES = {"rdf:": RDF_NS, "rdfs:": RDFS_NS, "xsd:": XSD_NS}

_REWRITES = {
    "identity": lambda s: s,
    "lowercase": str.lower,
    "uppercase": str.upper,
    "decimal": canonical_decimal,
}


def _uri(text) -> URI:
    if not isinstance(text, str) or not text:
        raise ConfigError(f"expected a URI string, got {text!r}")
    for p, ns in _PREFIXES.items():
        if text.startswith(p):
            return URI(ns + text[len(p):])
    return URI(text)


def _custom(spec: dict) -> tuple[Datatype, list[URI]]:
    uri = _uri(spec.get("uri"))
    kind = spec.get("kind", "builtin")
    members = [_uri(m) for m in spec.get("value_members", [])]
    if kind == "builtin":
        return _builtin(uri), members
    if kind == "regex":
        try:
            lex = re.compile(spec["pattern"])
        except KeyError:
            raise ConfigError(f"regex datatype {uri.value} needs a 'pattern'") from None
        except re.error as e:
            raise ConfigError(f"bad pattern for {uri.value}: {e}") from None
        rewrite = spec.get("rewrite", "identity")
        if rewrite not in _REWRITES:
            raise ConfigError(f"unknown rewrite {rewrite!r}; expected one of {sorted(_REWRITES)}")
        fn = _REWRITES[rewrite]
        space = spec.get("value_space") or ("num" if rewrite == "decimal" else uri.value)
        vpat = re.compile(spec["value_pattern"]) if "value_pattern" in spec else lex
        dt = Datatype(
            uri,
            lambda s: lex.fullmatch(s) is not None,
            lambda s: (space, fn(s)),
            space,
            infinite=bool(spec.get("infinite", True)),
            member=lambda t: t[0] == space and len(t) == 2 and vpat.fullmatch(t[1]) is not None,
            kind="regex",
        )
        return dt, members
    if kind == "enum":
        values = spec.get("values")
        if isinstance(values, list):
            table = {str(x): str(x) for x in values}
        elif isinstance(values, dict):
            table = {str(k): str(x) for k, x in values.items()}
        else:
            raise ConfigError(f"enum datatype {uri.value} needs a 'values' list or object")
        if not table:
            raise ConfigError(f"enum datatype {uri.value} has no values")
        space = spec.get("value_space") or uri.value
        vals = frozenset(table.values())
        dt = Datatype(
            uri,
            lambda s: s in table,
            lambda s: (space, table[s]),
            space,
            infinite=False,
            member=lambda t: t[0] == space and len(t) == 2 and t[1] in vals,
            kind="enum",
        )
        return dt, members
    raise ConfigError(f"unknown datatype kind {kind!r}")


def load_datatype_map(source) -> DatatypeMap:
    """Build a DatatypeMap from a JSON document (dict, JSON text, or file path)."""
    if isinstance(source, (str, Path)) and not str(source).lstrip().startswith("{"):
        try:
            source = Path(source).read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"cannot read datatype map: {e}") from None
    if isinstance(source, str):
        try:
            source = json.loads(source)
        except json.JSONDecodeError as e:
            raise ConfigError(f"datatype map is not valid JSON: {e}") from None
    if not isinstance(source, dict) or not isinstance(source.get("datatypes"), list):
        raise ConfigError("datatype map must be an object with a 'datatypes' list")
    D = DatatypeMap()
    for spec in source["datatypes"]:
        if not isinstance(spec, dict):
            raise ConfigError("each datatype entry must be an object")
        dt, members = _custom(spec)
        if dt.uri in D.entries:
            raise ConfigError(f"duplicate datatype {dt.uri.value}")
        D.entries[dt.uri] = dt
        if members:
            D.value_members[dt.uri] = members
    for rel in source.get("relations", []):
        try:
            a, b, r = _uri(rel["a"]), _uri(rel["b"]), rel["relation"]
        except (KeyError, TypeError):
            raise ConfigError("relations need 'a', 'b' and 'relation'") from None
        if r not in RELATIONS:
            raise ConfigError(f"unknown relation {r!r}; expected one of {RELATIONS}")
        if a == b:
            raise ConfigError("a relation needs two distinct datatypes")
        D.relations[frozenset((a, b))] = r
    return D


# ---------------------------------------------------------------------------
# Literal order and normalization


def literal_order_key(lit) -> tuple:
    """Untagged plain < tagged plain < typed; lexicographic within each group."""
    if isinstance(lit, PlainLiteral):
        return (0, lit.lexical, "") if lit.lang is None else (1, lit.lexical, lit.lang)
    if isinstance(lit, TypedLiteral):
        return (2, lit.lexical, lit.datatype.value)
    raise TypeError(f"not a literal: {lit!r}")


def literal_order(a, b) -> int:
    """-1, 0 or 1 as ``a`` is less than, equal to or greater than ``b``."""
    ka, kb = literal_order_key(a), literal_order_key(b)
    return (ka > kb) - (ka < kb)


@dataclass(frozen=True)
class LiteralClass:
    representative: object
    members: frozenset


def literal_classes(literals: Iterable, D: DatatypeMap) -> list[LiteralClass]:
    """Group plain and well-typed literals by value; other literals are left out."""
    groups: dict = {}
    for lit in set(literals):
        if isinstance(lit, PlainLiteral) and lit.lang is not None:
            continue
        tok = D.value(lit)
        if tok is not None:
            groups.setdefault(tok, set()).add(lit)
    out = [LiteralClass(min(m, key=literal_order_key), frozenset(m)) for m in groups.values()]
    out.sort(key=lambda c: literal_order_key(c.representative))
    return out


class Normalizer:
    """Replaces every literal by the least literal denoting the same value."""

    def __init__(self, literals: Iterable, D: DatatypeMap):
        self.mapping = {}
        for cls in literal_classes(literals, D):
            for m in cls.members:
                if m != cls.representative:
                    self.mapping[m] = cls.representative

    def term(self, t):
        return self.mapping.get(t, t)

    def triple(self, t: Triple) -> Triple:
        m = self.mapping
        return Triple(m.get(t[0], t[0]), m.get(t[1], t[1]), m.get(t[2], t[2]))

    def graph(self, g: Graph) -> Graph:
        return Graph(self.triple(t) for t in g.triples) if self.mapping else g

    def atom(self, a):
        m = self.mapping
        if not m:
            return a
        return type(a)(a.pred, tuple(m.get(x, x) for x in a.args))

    def rule(self, r):
        if not self.mapping:
            return r
        return type(r)(tuple(self.atom(a) for a in r.body), self.atom(r.head))


def _literals_of(obj) -> set:
    from .logic import Atom, HornRule  # local import keeps the module layering flat

    out = set()

    def add(x):
        if isinstance(x, (PlainLiteral, TypedLiteral)):
            out.add(x)

    if isinstance(obj, Graph):
        for t in obj.triples:
            for x in t:
                add(x)
        return out
    for item in obj:
        if isinstance(item, Triple):
            for x in item:
                add(x)
        elif isinstance(item, Atom):
            for x in item.args:
                add(x)
        elif isinstance(item, HornRule):
            for a in (*item.body, item.head):
                for x in a.args:
                    add(x)
        else:
            add(item)
    return out


def normalize(obj, D: DatatypeMap, extra_literals: Iterable = ()):
    """Normalize a Graph or a collection of atoms/rules/triples over its own literals plus ``extra_literals``."""
    n = Normalizer(_literals_of(obj) | set(extra_literals), D)
    if isinstance(obj, Graph):
        return n.graph(obj)
    from .logic import Atom, HornRule

    out = []
    for item in obj:
        if isinstance(item, Triple):
            out.append(n.triple(item))
        elif isinstance(item, Atom):
            out.append(n.atom(item))
        elif isinstance(item, HornRule):
            out.append(n.rule(item))
        else:
            out.append(n.term(item))
    return type(obj)(out) if isinstance(obj, (set, frozenset, tuple)) else out
