"""Export of ground, non-higher-order graphs as contextual DL-Lite_R knowledge bases.

The export rewrites the Horn theory tr^erdfs(S) plus the extensional-RDFS
vocabulary axioms rule by rule: facts become assertions, class and property
inclusions pass through, domain and range rules become role typings
(Exists(P) and Exists(Inv(P)) on the left) and the single disjointness
constraint becomes a negated right-hand side.

A small DL-Lite reasoner (``DlChecker``) decides consistency, assertion
entailment and inclusion entailment over exported knowledge bases.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .embedding import positions, psi_erdfs_v, standard_use, tr_erdfs
from .errors import HigherOrderError, NotGroundError, NotStandardError, ParseError
from .logic import BOTTOM, HornRule, Var
from .terms import BNode, Graph, collect_vocabulary, max_container_index

# ---------------------------------------------------------------------------
# Syntax


@dataclass(frozen=True, order=True)
class Role:
    name: object
    inverse: bool = False

    def inv(self) -> "Role":
        return Role(self.name, not self.inverse)


@dataclass(frozen=True)
class Atomic:
    name: object


@dataclass(frozen=True)
class ExistsRole:
    role: Role


@dataclass(frozen=True)
class Not:
    concept: object  # Atomic or ExistsRole


@dataclass(frozen=True)
class ConceptInclusion:
    left: object
    right: object


@dataclass(frozen=True)
class RoleInclusion:
    left: Role
    right: Role


@dataclass(frozen=True)
class ConceptAssertion:
    concept: object
    individual: object


@dataclass(frozen=True)
class RoleAssertion:
    role: object
    subject: object
    object: object


@dataclass
class DlKnowledgeBase:
    tbox: list = field(default_factory=list)
    abox: list = field(default_factory=list)

    def axioms(self) -> list:
        return self.tbox + self.abox

    def to_text(self) -> str:
        return "".join(format_axiom(a) + "\n" for a in self.axioms())


def _name(x) -> str:
    from .ntriples import format_term

    return format_term(x)


def _role_text(r: Role) -> str:
    return f"Inv({_name(r.name)})" if r.inverse else _name(r.name)


def _concept_text(c) -> str:
    if isinstance(c, Atomic):
        return _name(c.name)
    if isinstance(c, ExistsRole):
        return f"Exists({_role_text(c.role)})"
    if isinstance(c, Not):
        return f"Not({_concept_text(c.concept)})"
    raise TypeError(f"not a concept: {c!r}")


def format_axiom(a) -> str:
    if isinstance(a, ConceptInclusion):
        return f"SubClassOf({_concept_text(a.left)} {_concept_text(a.right)})"
    if isinstance(a, RoleInclusion):
        return f"SubPropertyOf({_role_text(a.left)} {_role_text(a.right)})"
    if isinstance(a, ConceptAssertion):
        return f"Type({_name(a.individual)} {_name(a.concept)})"
    if isinstance(a, RoleAssertion):
        return f"Rel({_name(a.role)} {_name(a.subject)} {_name(a.object)})"
    raise TypeError(f"not an axiom: {a!r}")


# ---------------------------------------------------------------------------
# Export


def _check_exportable(S: Graph):
    rep = standard_use(S)
    if not rep:
        raise NotStandardError("graph does not have only standard use of the RDF(S) vocabulary",
                               problems=rep.problems)
    props, classes = positions(S)
    bad = sorted((x for x in props | classes if isinstance(x, BNode)), key=lambda b: b.id)
    if bad:
        raise HigherOrderError("blank nodes in class or property positions: "
                               + ", ".join(f"_:{b.id}" for b in bad))
    if not S.is_ground:
        raise NotGroundError("graph contains blank nodes")


def _rule_axiom(r: HornRule):
    """The DL-Lite axiom equivalent to one rule of the extensional-RDFS theory."""
    body, head = r.body, r.head
    if not body:
        if head.pred == "isa":
            return ConceptAssertion(head.args[1], head.args[0])
        if head.pred == "data":
            s, p, o = head.args
            return RoleAssertion(p, s, o)
    elif len(body) == 1:
        b = body[0]
        if b.pred == "isa" and head.pred == "isa" and b.args[0] == head.args[0]:
            return ConceptInclusion(Atomic(b.args[1]), Atomic(head.args[1]))
        if b.pred == "data" and head.pred == "data" and (b.args[0], b.args[2]) == (head.args[0], head.args[2]):
            return RoleInclusion(Role(b.args[1]), Role(head.args[1]))
        if b.pred == "data" and head.pred == "isa":
            x, p, y = b.args
            if head.args[0] == x and isinstance(x, Var) and x != y:
                return ConceptInclusion(ExistsRole(Role(p)), Atomic(head.args[1]))
            if head.args[0] == y and isinstance(y, Var) and x != y:
                return ConceptInclusion(ExistsRole(Role(p, True)), Atomic(head.args[1]))
    elif len(body) == 2 and head == BOTTOM:
        a, b = body
        if a.pred == b.pred == "isa" and a.args[0] == b.args[0]:
            return ConceptInclusion(Atomic(a.args[1]), Not(Atomic(b.args[1])))
    raise ValueError(f"rule has no DL-Lite counterpart: {r}")


def export_dllite(S: Graph, max_idx: int | None = None) -> DlKnowledgeBase:
    """DL-Lite_R knowledge base equivalent to tr^erdfs(S) with the vocabulary axioms.

    Container-membership axioms are kept only up to the largest index used in S.
    """
    _check_exportable(S)
    if max_idx is None:
        max_idx = max_container_index([S])
    theory = tr_erdfs(S).theory() | psi_erdfs_v(collect_vocabulary([S]), max_idx)
    kb = DlKnowledgeBase()
    seen = set()
    for r in theory.rules:
        ax = _rule_axiom(r)
        if ax in seen:
            continue
        seen.add(ax)
        (kb.abox if isinstance(ax, (ConceptAssertion, RoleAssertion)) else kb.tbox).append(ax)
    kb.tbox.sort(key=format_axiom)
    kb.abox.sort(key=format_axiom)
    return kb


# ---------------------------------------------------------------------------
# Parsing .dll text


def _split_args(text: str, line: int) -> list[str]:
    """Split the top-level, space-separated arguments of an axiom."""
    out, depth, cur, i, in_str, in_iri = [], 0, [], 0, False, False
    while i < len(text):
        c = text[i]
        if in_str:
            cur.append(c)
            if c == "\\" and i + 1 < len(text):
                cur.append(text[i + 1])
                i += 1
            elif c == '"':
                in_str = False
        elif in_iri:
            cur.append(c)
            in_iri = c != ">"
        elif c == '"':
            in_str = True
            cur.append(c)
        elif c == "<":
            in_iri = True
            cur.append(c)
        elif c == "(":
            depth += 1
            cur.append(c)
        elif c == ")":
            depth -= 1
            cur.append(c)
        elif c == " " and depth == 0:
            if cur:
                out.append("".join(cur))
                cur = []
        else:
            cur.append(c)
        i += 1
    if cur:
        out.append("".join(cur))
    if in_str or in_iri or depth:
        raise ParseError("unbalanced axiom", line, 1)
    return out


def _parse_term(text: str, line: int):
    from .ntriples import _Parser

    p = _Parser(text)
    try:
        t = p.term()
    except ParseError as e:
        raise ParseError(str(e), line, e.column) from None
    if p.pos != len(text):
        raise ParseError(f"unexpected text after term: {text[p.pos:]!r}", line, p.pos + 1)
    return t


def _wrapped(text: str, head: str):
    if text.startswith(head + "(") and text.endswith(")"):
        return text[len(head) + 1:-1]
    return None


def _parse_role(text: str, line: int) -> Role:
    inner = _wrapped(text, "Inv")
    return Role(_parse_term(inner, line), True) if inner is not None else Role(_parse_term(text, line))


def _parse_concept(text: str, line: int):
    inner = _wrapped(text, "Not")
    if inner is not None:
        return Not(_parse_concept(inner, line))
    inner = _wrapped(text, "Exists")
    if inner is not None:
        return ExistsRole(_parse_role(inner, line))
    return Atomic(_parse_term(text, line))


def parse_dll(text: str) -> DlKnowledgeBase:
    kb = DlKnowledgeBase()
    for n, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        head = s.split("(", 1)[0]
        inner = _wrapped(s, head)
        if inner is None:
            raise ParseError(f"malformed axiom: {s!r}", n, 1)
        args = _split_args(inner, n)
        arity = {"SubClassOf": 2, "SubPropertyOf": 2, "Type": 2, "Rel": 3}.get(head)
        if arity is None or len(args) != arity:
            raise ParseError(f"unknown axiom or wrong arity: {s!r}", n, 1)
        if head == "SubClassOf":
            kb.tbox.append(ConceptInclusion(_parse_concept(args[0], n), _parse_concept(args[1], n)))
        elif head == "SubPropertyOf":
            kb.tbox.append(RoleInclusion(_parse_role(args[0], n), _parse_role(args[1], n)))
        elif head == "Type":
            kb.abox.append(ConceptAssertion(_parse_term(args[1], n), _parse_term(args[0], n)))
        else:
            kb.abox.append(RoleAssertion(*(_parse_term(a, n) for a in args)))
    return kb


# ---------------------------------------------------------------------------
# Reasoning


def _basic(c):
    return ("A", c.name) if isinstance(c, Atomic) else ("E", c.role)


class DlChecker:
    """Consistency and entailment for a DL-Lite_R knowledge base.

    Basic concepts are ``("A", name)`` or ``("E", role)``. Positive inclusions
    are closed under reflexivity and transitivity, role inclusions also induce
    inclusions between their existentials, and a basic concept is
    unsatisfiable when its closure meets a negative inclusion or requires a
    role whose inverse existential is unsatisfiable.
    """

    def __init__(self, kb: DlKnowledgeBase):
        role_edges: dict = {}
        concept_edges: dict = {}
        self.negative = []
        for ax in kb.tbox:
            if isinstance(ax, RoleInclusion):
                for l, r in ((ax.left, ax.right), (ax.left.inv(), ax.right.inv())):
                    role_edges.setdefault(l, set()).add(r)
            elif isinstance(ax.right, Not):
                self.negative.append((_basic(ax.left), _basic(ax.right.concept)))
            else:
                concept_edges.setdefault(_basic(ax.left), set()).add(_basic(ax.right))
        self._role_edges = role_edges
        self._role_up: dict = {}
        for l, rs in list(role_edges.items()):
            for r in rs:
                concept_edges.setdefault(("E", l), set()).add(("E", r))
        self._concept_edges = concept_edges
        self._up: dict = {}
        self._unsat = self._compute_unsat()
        self._compute_abox(kb.abox)

    @staticmethod
    def _reach(start, edges) -> frozenset:
        seen, stack = {start}, [start]
        while stack:
            for y in edges.get(stack.pop(), ()):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return frozenset(seen)

    def role_up(self, r: Role) -> frozenset:
        if r not in self._role_up:
            self._role_up[r] = self._reach(r, self._role_edges)
        return self._role_up[r]

    def up(self, b) -> frozenset:
        if b not in self._up:
            self._up[b] = self._reach(b, self._concept_edges)
        return self._up[b]

    def _clash(self, concepts) -> bool:
        return any(a in concepts and b in concepts for a, b in self.negative)

    def _compute_unsat(self) -> set:
        basics = set(self._concept_edges) | {y for ys in self._concept_edges.values() for y in ys}
        basics |= {x for pair in self.negative for x in pair}
        for b in list(basics):
            if b[0] == "E":
                basics.add(("E", b[1].inv()))
        unsat = {b for b in basics if self._clash(self.up(b))}
        changed = True
        while changed:
            changed = False
            for b in basics:
                if b in unsat:
                    continue
                if self.up(b) & unsat or (b[0] == "E" and ("E", b[1].inv()) in unsat):
                    unsat.add(b)
                    changed = True
        return unsat

    def _compute_abox(self, abox):
        self.roles: set = set()  # (role name, subject, object)
        self.types: dict = {}
        for ax in abox:
            if isinstance(ax, RoleAssertion):
                for r in self.role_up(Role(ax.role)):
                    s, o = (ax.object, ax.subject) if r.inverse else (ax.subject, ax.object)
                    self.roles.add((r.name, s, o))
            else:
                self.types.setdefault(ax.individual, set()).update(self.up(("A", ax.concept)))
        for p, s, o in self.roles:
            self.types.setdefault(s, set()).update(self.up(("E", Role(p))))
            self.types.setdefault(o, set()).update(self.up(("E", Role(p, True))))
        self.consistent = not any(self._clash(ts) or ts & self._unsat for ts in self.types.values())

    # -- questions
    def unsatisfiable(self, c) -> bool:
        return _basic(c) in self._unsat

    def entails(self, ax) -> bool:
        if not self.consistent:
            return True
        if isinstance(ax, ConceptAssertion):
            return ("A", ax.concept) in self.types.get(ax.individual, ())
        if isinstance(ax, RoleAssertion):
            return (ax.role, ax.subject, ax.object) in self.roles
        if isinstance(ax, RoleInclusion):
            return ax.right in self.role_up(ax.left) or ("E", ax.left) in self._unsat
        if isinstance(ax, ConceptInclusion):
            left = _basic(ax.left)
            if left in self._unsat:
                return True
            if isinstance(ax.right, Not):
                # B1 subsumed by not B2 iff B1 and B2 together are unsatisfiable
                combined = self.up(left) | self.up(_basic(ax.right.concept))
                return self._clash(combined) or bool(combined & self._unsat)
            return _basic(ax.right) in self.up(left)
        raise TypeError(f"not an axiom: {ax!r}")


__all__ = [
    "DlKnowledgeBase", "DlChecker", "export_dllite", "parse_dll", "format_axiom",
    "Role", "Atomic", "ExistsRole", "Not", "ConceptInclusion", "RoleInclusion",
    "ConceptAssertion", "RoleAssertion",
]
