"""Horn frame logic: atoms, rules, theories, Skolemization and Horn normalization.

Constants are RDF terms (URIs and literals). Variables are ``Var`` objects.
Data molecules ``s[p -> o]`` are atoms with predicate ``"data"``, is-a
molecules ``s : c`` use ``"isa"``. Auxiliary predicates (illD, dt, dom) are
plain predicate atoms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .errors import (
    EqualityUnsupportedError,
    NotHornError,
    SkolemClashError,
    UnsafeRuleError,
)
from .terms import URI, BNode, PlainLiteral, TypedLiteral, term_sort_key


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self) -> str:
        return "?" + self.name


def is_var(t) -> bool:
    return isinstance(t, Var)


def _check_const(t):
    if isinstance(t, BNode):
        raise TypeError("blank nodes must be turned into variables or constants first")
    if not isinstance(t, (Var, URI, PlainLiteral, TypedLiteral)):
        raise TypeError(f"not a logic term: {t!r}")
    return t


_RESERVED = {"data", "isa", "=", "top", "bottom"}


class Atom(NamedTuple):
    pred: str
    args: tuple

    def variables(self) -> set[Var]:
        return {a for a in self.args if isinstance(a, Var)}

    @property
    def is_ground(self) -> bool:
        return not any(isinstance(a, Var) for a in self.args)

    def substitute(self, mapping: dict) -> "Atom":
        return Atom(self.pred, tuple(mapping.get(a, a) if isinstance(a, Var) else a for a in self.args))

    def __str__(self) -> str:
        if self.pred == "top":
            return "true"
        if self.pred == "bottom":
            return "false"
        if self.pred == "=":
            return f"{self.args[0]} = {self.args[1]}"
        return self.pred + "(" + ",".join(str(a) for a in self.args) + ")"


def data(s, p, o) -> Atom:
    return Atom("data", (_check_const(s), _check_const(p), _check_const(o)))


def isa(s, c) -> Atom:
    return Atom("isa", (_check_const(s), _check_const(c)))


def pred(name: str, *args) -> Atom:
    if name in _RESERVED:
        raise ValueError(f"reserved predicate name {name!r}")
    return Atom(name, tuple(_check_const(a) for a in args))


def eq(a, b) -> Atom:
    return Atom("=", (_check_const(a), _check_const(b)))


TOP = Atom("top", ())
BOTTOM = Atom("bottom", ())


def _atom_sort_key(a: Atom) -> tuple:
    return (a.pred, tuple((1, x.name, "", "") if isinstance(x, Var) else (0,) + term_sort_key(x) for x in a.args))


@dataclass(frozen=True)
class HornRule:
    body: tuple
    head: Atom

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))
        if self.head == TOP:
            raise ValueError("rule head must not be Top")
        if self.head.pred == "=" and self.head.args[0] != self.head.args[1]:
            raise EqualityUnsupportedError("equality in rule head")
        bound = set()
        for a in self.body:
            if a.pred != "=":
                bound |= a.variables()
        unsafe = self.head.variables() - bound
        if unsafe:
            names = ", ".join(sorted(v.name for v in unsafe))
            raise UnsafeRuleError(f"head variables not bound by the body: {names}")

    @property
    def is_fact(self) -> bool:
        return not self.body

    @property
    def is_constraint(self) -> bool:
        return self.head == BOTTOM

    def variables(self) -> set[Var]:
        out = self.head.variables()
        for a in self.body:
            out |= a.variables()
        return out

    def __str__(self) -> str:
        if not self.body:
            return f"{self.head} ."
        return ", ".join(str(a) for a in self.body) + f" -> {self.head} ."


@dataclass(frozen=True)
class HornTheory:
    """A deduplicated list of Horn rules (facts are bodiless rules).

    ``symbolic`` holds formulas that are part of the theory but cannot be
    evaluated by the engine; a theory with symbolic parts is not evaluable.
    """

    rules: tuple = ()
    symbolic: tuple = ()

    def __post_init__(self):
        seen = dict.fromkeys(self.rules)
        object.__setattr__(self, "rules", tuple(seen))
        object.__setattr__(self, "symbolic", tuple(self.symbolic))

    @property
    def evaluable(self) -> bool:
        return not self.symbolic

    def facts(self) -> list[Atom]:
        return [r.head for r in self.rules if not r.body]

    def proper_rules(self) -> list[HornRule]:
        return [r for r in self.rules if r.body]

    def __iter__(self):
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)

    def __contains__(self, r) -> bool:
        return r in set(self.rules)

    def __or__(self, other: "HornTheory") -> "HornTheory":
        return HornTheory(self.rules + other.rules, self.symbolic + other.symbolic)

    def to_text(self) -> str:
        lines = [str(r) for r in self.rules]
        lines += ["# non-evaluable: " + str(f) for f in self.symbolic]
        return "\n".join(lines)


@dataclass(frozen=True)
class ExistentialConjunction:
    variables: tuple = ()
    atoms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "atoms", tuple(self.atoms))
        used = set()
        for a in self.atoms:
            used |= a.variables()
        missing = [v for v in self.variables if v not in used]
        if missing:
            raise ValueError(f"quantified variable does not occur: {missing[0]}")
        free = used - set(self.variables)
        if free:
            raise ValueError(f"free variable in conjunction: {sorted(v.name for v in free)[0]}")

    def constants(self) -> set:
        return {x for a in self.atoms for x in a.args if not isinstance(x, Var)}

    def __str__(self) -> str:
        body = " & ".join(str(a) for a in self.atoms) or "true"
        if not self.variables:
            return body
        return "exists " + ",".join(v.name for v in self.variables) + ". " + body


# ---------------------------------------------------------------------------
# Skolemization


def skolem_mapping(variables: Iterable[Var], namespace: str = "urn:sk:", avoid: Iterable = ()) -> dict:
    """Map each variable (in sorted order) to ``namespace + "sk_" + i``."""
    avoid = set(avoid)
    mapping = {}
    for i, v in enumerate(sorted(set(variables), key=lambda v: v.name), start=1):
        c = URI(f"{namespace}sk_{i}")
        if c in avoid:
            raise SkolemClashError(f"Skolem constant {c} already occurs in the input", constant=c)
        mapping[v] = c
    return mapping


def skolemize(phi: ExistentialConjunction, namespace: str = "urn:sk:", avoid: Iterable = ()) -> tuple:
    """Replace every existential variable with a fresh constant; returns ground atoms."""
    mapping = skolem_mapping(phi.variables, namespace, set(avoid) | phi.constants())
    return tuple(a.substitute(mapping) for a in phi.atoms)


# ---------------------------------------------------------------------------
# Formulas and Horn normalization


@dataclass(frozen=True)
class Forall:
    vars: tuple
    body: object

    def __str__(self):
        return "forall " + ",".join(v.name for v in self.vars) + " (" + str(self.body) + ")"


@dataclass(frozen=True)
class Exists:
    vars: tuple
    body: object

    def __str__(self):
        return "exists " + ",".join(v.name for v in self.vars) + " (" + str(self.body) + ")"


@dataclass(frozen=True)
class Implies:
    ante: object
    cons: object

    def __str__(self):
        return f"{self.ante} -> {self.cons}"


@dataclass(frozen=True)
class And:
    parts: tuple = field(default_factory=tuple)

    def __init__(self, *parts):
        flat = []
        for p in parts:
            flat.extend(p.parts if isinstance(p, And) else [p])
        object.__setattr__(self, "parts", tuple(flat))

    def __str__(self):
        return " & ".join(str(p) for p in self.parts) or "true"


def forall(names: str, body) -> Forall:
    return Forall(tuple(Var(n) for n in names.split()), body)


def exists(names: str, body) -> Exists:
    return Exists(tuple(Var(n) for n in names.split()), body)


def _flatten_body(f, fresh) -> list[Atom]:
    if isinstance(f, Atom):
        if f == TOP:
            return []
        if f.pred == "=":
            if f.args[0] == f.args[1]:
                return []
            raise EqualityUnsupportedError(f"non-trivial equality {f}")
        return [f]
    if isinstance(f, And):
        out = []
        for p in f.parts:
            out += _flatten_body(p, fresh)
        return out
    if isinstance(f, Exists):
        # an existential in a body is a universal over the whole rule
        ren = {v: Var(f"{v.name}'{next(fresh)}") for v in f.vars}
        return [a.substitute(ren) for a in _flatten_body(f.body, fresh)]
    if isinstance(f, (Forall, Implies)):
        raise NotHornError(f"universal quantification or implication in a rule body: {f}")
    raise NotHornError(f"unsupported formula in body: {f!r}")


def _heads(f, fresh) -> list[tuple[list[Atom], Atom]]:
    """Return (extra body, head) pairs for a head formula."""
    if isinstance(f, Atom):
        if f == TOP:
            return []
        if f.pred == "=":
            if f.args[0] == f.args[1]:
                return []
            raise EqualityUnsupportedError(f"non-trivial equality {f}")
        return [([], f)]
    if isinstance(f, And):
        out = []
        for p in f.parts:
            out += _heads(p, fresh)
        return out
    if isinstance(f, Forall):
        return _heads(f.body, fresh)
    if isinstance(f, Implies):
        body = _flatten_body(f.ante, fresh)
        return [(body + b, h) for b, h in _heads(f.cons, fresh)]
    if isinstance(f, Exists):
        raise NotHornError(f"existential quantifier in a rule head: {f}")
    raise NotHornError(f"unsupported formula in head: {f!r}")


def horn_normalize(formula, guard: str | None = None) -> list[HornRule]:
    """Rewrite an implication with conjunctive or nested-implication head into Horn rules.

    Head conjunctions are split; a nested implication in the head has its body
    conjoined onto the outer body. If ``guard`` is given, head variables not
    bound by the body get a ``guard(v)`` body atom instead of raising E_UNSAFE.
    """
    rules = []
    for body, head in _heads(formula, itertools.count(1)):
        body = list(dict.fromkeys(body))
        if BOTTOM in body:
            continue
        bound = set()
        for a in body:
            bound |= a.variables()
        unsafe = sorted(head.variables() - bound, key=lambda v: v.name)
        if unsafe and guard is not None:
            body = body + [pred(guard, v) for v in unsafe]
        rules.append(HornRule(tuple(body), head))
    return rules
