"""Reading and writing graphs in an N-Triples style syntax.

Each statement is ``subject predicate object .``. Terms are ``<uri>``,
``_:id``, ``"text"``, ``"text"@lang``, ``"text"^^<uri>`` and, as a
convenience, prefixed names ``pfx:local`` declared with ``@prefix pfx: <uri> .``
(``rdf``, ``rdfs`` and ``xsd`` are predeclared) and ``a`` for rdf:type in
predicate position. Literals and blank nodes are accepted in every position.
``#`` starts a comment outside of strings and IRIs.
"""

from __future__ import annotations

import re

from .errors import ParseError
from .terms import RDF, RDF_NS, RDFS_NS, XSD_NS, URI, BNode, Graph, PlainLiteral, Triple, TypedLiteral

DEFAULT_PREFIXES = {"rdf": RDF_NS, "rdfs": RDFS_NS, "xsd": XSD_NS}

_BNODE_RE = re.compile(r"_:([A-Za-z0-9_](?:[A-Za-z0-9_\-.]*[A-Za-z0-9_\-])?)")
_PNAME_RE = re.compile(r"([A-Za-z][A-Za-z0-9_\-]*)?:([A-Za-z0-9_](?:[A-Za-z0-9_\-.]*[A-Za-z0-9_\-])?)?")
_LANG_RE = re.compile(r"@([A-Za-z]+(?:-[A-Za-z0-9]+)*)")
_WS = " \t\r\n"
_STR_ESC = {"t": "\t", "n": "\n", "r": "\r", "b": "\b", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.prefixes = dict(DEFAULT_PREFIXES)

    # -- position helpers
    def where(self, pos=None):
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def error(self, msg, pos=None):
        line, col = self.where(pos)
        raise ParseError(msg, line, col)

    def skip(self):
        t, n = self.text, len(self.text)
        while self.pos < n:
            c = t[self.pos]
            if c in _WS:
                self.pos += 1
            elif c == "#":
                j = t.find("\n", self.pos)
                self.pos = n if j < 0 else j
            else:
                break

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else ""

    # -- terms
    def iri(self) -> str:
        start = self.pos
        j = self.text.find(">", self.pos + 1)
        if j < 0:
            self.error("unterminated IRI", start)
        raw = self.text[self.pos + 1:j]
        if any(c in raw for c in " \n\t<\"{}|^`"):
            self.error("invalid character in IRI", start)
        self.pos = j + 1
        value = self._unescape(raw, start, iri=True)
        if not value:
            self.error("empty IRI", start)
        return value

    def _unescape(self, raw: str, start: int, iri=False) -> str:
        if "\\" not in raw:
            return raw
        out, i = [], 0
        while i < len(raw):
            c = raw[i]
            if c != "\\":
                out.append(c)
                i += 1
                continue
            if i + 1 >= len(raw):
                self.error("dangling escape", start)
            e = raw[i + 1]
            if e in "uU":
                k = 4 if e == "u" else 8
                hexs = raw[i + 2:i + 2 + k]
                if len(hexs) != k or not all(h in "0123456789abcdefABCDEF" for h in hexs):
                    self.error("bad unicode escape", start)
                out.append(chr(int(hexs, 16)))
                i += 2 + k
            elif not iri and e in _STR_ESC:
                out.append(_STR_ESC[e])
                i += 2
            else:
                self.error(f"unknown escape \\{e}", start)
        return "".join(out)

    def string(self) -> str:
        start = self.pos
        t = self.text
        i = self.pos + 1
        while True:
            if i >= len(t) or t[i] == "\n":
                self.error("unterminated string", start)
            if t[i] == "\\":
                i += 2
                continue
            if t[i] == '"':
                break
            i += 1
        raw = t[self.pos + 1:i]
        self.pos = i + 1
        return self._unescape(raw, start)

    def pname(self) -> str:
        start = self.pos
        m = _PNAME_RE.match(self.text, self.pos)
        if not m:
            self.error("expected a term", start)
        pfx = m.group(1) or ""
        if pfx not in self.prefixes:
            self.error(f"undeclared prefix {pfx}:", start)
        self.pos = m.end()
        return self.prefixes[pfx] + (m.group(2) or "")

    def term(self, predicate=False):
        self.skip()
        start = self.pos
        c = self.peek()
        if c == "<":
            return URI(self.iri())
        if c == "_":
            m = _BNODE_RE.match(self.text, self.pos)
            if not m:
                self.error("bad blank node label", start)
            self.pos = m.end()
            return BNode(m.group(1))
        if c == '"':
            lex = self.string()
            if self.peek() == "@":
                m = _LANG_RE.match(self.text, self.pos)
                if not m:
                    self.error("bad language tag", self.pos)
                self.pos = m.end()
                return PlainLiteral(lex, m.group(1))
            if self.text.startswith("^^", self.pos):
                self.pos += 2
                if self.peek() == "<":
                    return TypedLiteral(lex, URI(self.iri()))
                return TypedLiteral(lex, URI(self.pname()))
            return PlainLiteral(lex)
        if predicate and c == "a" and (self.pos + 1 >= len(self.text) or self.text[self.pos + 1] in _WS + "<\"_"):
            self.pos += 1
            return RDF.type
        if c == "" or c == ".":
            self.error("expected a term", start)
        return URI(self.pname())

    # -- statements
    def directive(self):
        start = self.pos
        self.pos += len("@prefix")
        self.skip()
        m = re.compile(r"([A-Za-z][A-Za-z0-9_\-]*)?:").match(self.text, self.pos)
        if not m:
            self.error("expected prefix name", self.pos)
        self.pos = m.end()
        self.skip()
        if self.peek() != "<":
            self.error("expected IRI in @prefix", self.pos)
        self.prefixes[m.group(1) or ""] = self.iri()
        self.skip()
        if self.peek() != ".":
            self.error("expected '.' after @prefix", start)
        self.pos += 1

    def parse(self) -> Graph:
        triples = []
        while True:
            self.skip()
            if self.pos >= len(self.text):
                break
            if self.text.startswith("@prefix", self.pos):
                self.directive()
                continue
            s = self.term()
            p = self.term(predicate=True)
            o = self.term()
            self.skip()
            if self.peek() != ".":
                self.error("expected '.' at end of statement")
            self.pos += 1
            triples.append(Triple(s, p, o))
        return Graph(triples)


def parse_ntriples(text: str) -> Graph:
    return _Parser(text).parse()


def load_graph(path) -> Graph:
    with open(path, encoding="utf-8") as f:
        return parse_ntriples(f.read())


# ---------------------------------------------------------------------------
# Serialization


def _escape(s: str) -> str:
    out = []
    for ch in s:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def _escape_iri(s: str) -> str:
    return "".join(f"\\u{ord(c):04X}" if c in ' <>"{}|^`\\' or ord(c) <= 0x20 else c for c in s)


def format_term(t) -> str:
    if isinstance(t, URI):
        return f"<{_escape_iri(t.value)}>"
    if isinstance(t, BNode):
        return f"_:{t.id}"
    if isinstance(t, PlainLiteral):
        s = f'"{_escape(t.lexical)}"'
        return f"{s}@{t.lang}" if t.lang else s
    if isinstance(t, TypedLiteral):
        return f'"{_escape(t.lexical)}"^^<{_escape_iri(t.datatype.value)}>'
    raise TypeError(f"not a term: {t!r}")


def _shape_key(t: Triple) -> tuple:
    return tuple((3, "", "") if isinstance(x, BNode) else _key(x) for x in t)


def _key(x) -> tuple:
    from .terms import term_sort_key

    return term_sort_key(x)


def canonical_blank_names(G: Graph) -> dict:
    """Rename blank nodes to b0, b1, ... in order of first occurrence in a sorted listing."""
    order = sorted(G.triples, key=lambda t: (_shape_key(t), t.sort_key()))
    names: dict = {}
    for t in order:
        for x in t:
            if isinstance(x, BNode) and x not in names:
                names[x] = BNode(f"b{len(names)}")
    return names


def serialize(G: Graph) -> str:
    names = canonical_blank_names(G)
    renamed = Graph(Triple(*(names.get(x, x) for x in t)) for t in G.triples)
    return "".join(" ".join(format_term(x) for x in t) + " .\n" for t in renamed)
