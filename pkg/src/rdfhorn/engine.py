"""Semi-naive materialization of Horn theories and conjunctive query answering.

Ground atoms are interned and stored per relation: one binary relation per
data-molecule predicate constant (subject -> set of objects), one binary
``isa`` relation, and one relation per auxiliary predicate. Rules are
compiled to Python functions, one per body position acting as the delta.
Each function is planned so that the innermost loop is, where possible, a
bulk set operation instead of a per-fact loop.

Two rewritings keep large RDFS closures cheap:

* A rule ``T(x,y) & T(y,z) -> T(x,z)`` over a data predicate constant is not
  evaluated as a rule. Instead the relation keeps its non-derived edges ``N``
  and the closure ``N+`` is maintained incrementally (SCC condensation).
* For a *propagation rule* ``A[x] & T(x,y) -> A[y]`` over such a closed
  relation T, facts produced by the rule itself are not fed back into it,
  and the join of new T edges only looks at facts of A the rule did not
  produce. Since T is transitive at the fixpoint, every consequence is still
  derived from a fact that was not produced by the rule.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

from .errors import ResourceLimitError, UnsupportedError
from .logic import BOTTOM, Atom, ExistentialConjunction, HornRule, HornTheory, Var

_EMPTY = frozenset()


def _union(values):
    return set().union(*values)


# ---------------------------------------------------------------------------
# Interning


class Interner:
    def __init__(self):
        self.ids: dict = {}
        self.terms: list = []

    def __call__(self, t) -> int:
        i = self.ids.get(t)
        if i is None:
            i = self.ids[t] = len(self.terms)
            self.terms.append(t)
        return i

    def get(self, t):
        return self.ids.get(t)

    def copy(self) -> "Interner":
        c = Interner()
        c.ids = dict(self.ids)
        c.terms = list(self.terms)
        return c


# ---------------------------------------------------------------------------
# Relations


class Rel:
    """A unary (set) or binary (dict of sets) relation with pending and delta parts."""

    __slots__ = (
        "key", "unary", "fwd", "rev", "pend", "delta", "tags", "dexcl",
        "base", "base_rev", "N", "Nrev", "size",
    )

    def __init__(self, key, unary=False):
        self.key = key
        self.unary = unary
        self.fwd = set() if unary else {}
        self.pend = set() if unary else {}
        self.delta = set() if unary else {}
        self.rev = None
        self.tags = None
        self.dexcl = None
        self.base = None
        self.base_rev = None
        self.N = None
        self.Nrev = None
        self.size = 0

    # -- insertion (binary)
    def add(self, s, o):
        cur = self.fwd.get(s)
        if cur is not None and o in cur:
            return
        p = self.pend.get(s)
        if p is None:
            self.pend[s] = {o}
        else:
            p.add(o)

    def add_many(self, s, os):
        cur = self.fwd.get(s)
        os = os - cur if cur else set(os)
        if not os:
            return
        p = self.pend.get(s)
        if p is None:
            self.pend[s] = os
        else:
            p |= os

    def add_t(self, tag, s, o):
        cur = self.fwd.get(s)
        if cur is not None and o in cur:
            return
        p = self.pend.get(s)
        if p is None:
            self.pend[s] = {o}
        elif o in p:
            return
        else:
            p.add(o)
        t = self.tags.setdefault(tag, {})
        ts = t.get(s)
        if ts is None:
            t[s] = {o}
        else:
            ts.add(o)

    def add_many_t(self, tag, s, os):
        cur = self.fwd.get(s)
        os = os - cur if cur else set(os)
        p = self.pend.get(s)
        if p:
            os -= p
        if not os:
            return
        if p is None:
            self.pend[s] = os
        else:
            p |= os
        t = self.tags.setdefault(tag, {})
        ts = t.get(s)
        if ts is None:
            t[s] = set(os)
        else:
            ts |= os

    # -- insertion (unary)
    def add1(self, s):
        if s not in self.fwd:
            self.pend.add(s)

    def add1_many(self, xs):
        self.pend |= xs - self.fwd

    def add1_t(self, tag, s):
        if s in self.fwd or s in self.pend:
            return
        self.pend.add(s)
        self.tags.setdefault(tag, set()).add(s)

    def add1_many_t(self, tag, xs):
        new = xs - self.fwd - self.pend
        if new:
            self.pend |= new
            self.tags.setdefault(tag, set()).update(new)

    # -- reading
    def dx(self, tag):
        """Delta without the facts that rule ``tag`` produced in the last round."""
        d = self.dexcl
        if d is None:
            return self.delta
        return d.get(tag, self.delta)

    def contains(self, s, o=None) -> bool:
        if self.unary:
            return s in self.fwd
        return o in self.fwd.get(s, _EMPTY)

    def __len__(self):
        return self.size

    def pairs(self):
        if self.unary:
            for s in self.fwd:
                yield (s,)
        else:
            for s, os in self.fwd.items():
                for o in os:
                    yield (s, o)

    def ensure_rev(self):
        if self.rev is None:
            rev = {}
            for s, os in self.fwd.items():
                for o in os:
                    r = rev.get(o)
                    if r is None:
                        rev[o] = {s}
                    else:
                        r.add(s)
            self.rev = rev
        return self.rev

    def copy(self) -> "Rel":
        c = Rel(self.key, self.unary)
        if self.unary:
            c.fwd = set(self.fwd)
        else:
            c.fwd = {s: set(os) for s, os in self.fwd.items()}
        if self.rev is not None:
            c.rev = {o: set(ss) for o, ss in self.rev.items()}
        if self.tags is not None:
            c.tags = {}
        if self.base is not None:
            c.base = {k: ({s: set(os) for s, os in b.items()} if isinstance(b, dict) else set(b))
                      for k, b in self.base.items()}
        if self.base_rev is not None:
            c.base_rev = {k: ({o: set(ss) for o, ss in r.items()} if r is not None else None)
                          for k, r in self.base_rev.items()}
        if self.N is not None:
            c.N = {s: set(os) for s, os in self.N.items()}
            c.Nrev = {o: set(ss) for o, ss in self.Nrev.items()}
        c.size = self.size
        return c


def _add_rev(rev, delta):
    for s, os in delta.items():
        for o in os:
            r = rev.get(o)
            if r is None:
                rev[o] = {s}
            else:
                r.add(s)


# ---------------------------------------------------------------------------
# Program compilation

_CODE_CACHE: dict = {}


@dataclass
class _PAtom:
    kind: str          # "bin", "fam" (data with variable predicate), "un"
    key: tuple | None  # relation key with constants as ("c", index)
    s: tuple
    o: tuple | None
    p: tuple | None = None  # predicate term for "fam"


@dataclass
class _Variant:
    fn: object
    consts: tuple
    constraint: bool
    source: str


@dataclass
class Program:
    variants: list = field(default_factory=list)
    constraints: list = field(default_factory=list)
    tc_keys: list = field(default_factory=list)
    base_needs: list = field(default_factory=list)  # (key, tag, need_rev)
    rev_needs: list = field(default_factory=list)
    facts: list = field(default_factory=list)
    ground_bottom: bool = False
    sources: list = field(default_factory=list)


def _term_code(t, consts, cindex):
    """('v', name) or ('c', index) for a logic term; interning constants."""
    if isinstance(t, Var):
        return ("v", t.name)
    i = cindex.get(t)
    if i is None:
        i = cindex[t] = len(consts)
        consts.append(t)
    return ("c", i)


def _patom(a: Atom, consts, cindex) -> _PAtom:
    if a.pred == "data":
        s, p, o = (_term_code(x, consts, cindex) for x in a.args)
        if p[0] == "v":
            return _PAtom("fam", None, s, o, p)
        return _PAtom("bin", ("data", p), s, o)
    if a.pred == "isa":
        s, o = (_term_code(x, consts, cindex) for x in a.args)
        return _PAtom("bin", ("isa",), s, o)
    if len(a.args) == 1:
        return _PAtom("un", (a.pred, 1), _term_code(a.args[0], consts, cindex), None)
    if len(a.args) == 2:
        s, o = (_term_code(x, consts, cindex) for x in a.args)
        return _PAtom("bin", (a.pred, 2), s, o)
    raise UnsupportedError(f"predicate {a.pred} of arity {len(a.args)} is not supported by the engine")


def _is_tc(rule: HornRule):
    """Return the predicate constant c if the rule is data(x,c,y) & data(y,c,z) -> data(x,c,z)."""
    if len(rule.body) != 2 or rule.head.pred != "data":
        return None
    h = rule.head.args
    if isinstance(h[1], Var) or not all(isinstance(v, Var) for v in (h[0], h[2])) or h[0] == h[2]:
        return None
    for a, b in (rule.body, rule.body[::-1]):
        if a.pred != "data" or b.pred != "data":
            return None
        if a.args[1] != h[1] or b.args[1] != h[1]:
            return None
        x, y = a.args[0], a.args[2]
        y2, z = b.args[0], b.args[2]
        if x == h[0] and z == h[2] and y == y2 and isinstance(y, Var) and len({x, y, z}) == 3:
            return h[1]
    return None


def _is_propagation(rule: HornRule, tc_preds):
    """Return (index of A atom, index of T atom) for A[x] & T(x,y) -> A[y], T closed."""
    if len(rule.body) != 2 or rule.head == BOTTOM:
        return None
    for ti in (0, 1):
        t = rule.body[ti]
        a = rule.body[1 - ti]
        if t.pred != "data" or t.args[1] not in tc_preds:
            continue
        x, y = t.args[0], t.args[2]
        if not (isinstance(x, Var) and isinstance(y, Var)) or x == y:
            continue
        if list(a.args).count(x) != 1 or y in a.args:
            continue
        if a.substitute({x: y}) == rule.head:
            return (1 - ti, ti)
    return None


class _Planner:
    """Orders the evaluation steps of one rule variant and emits Python source."""

    MAX_SEARCH_ATOMS = 4

    def __init__(self, atoms, sources, head, constraint, tag, consts):
        self.atoms = atoms
        self.sources = sources
        self.head = head
        self.constraint = constraint
        self.tag = tag
        self.consts = consts
        self.rev_needs = set()
        self.base_rev_needs = set()
        self.vmap = {}

    # -- variable liveness
    def _vars_of(self, a: _PAtom):
        out = [t[1] for t in (a.s, a.o, a.p) if t is not None and t[0] == "v"]
        return out

    def _alive(self, v, stages, skip_atom=None, skip_pos=None):
        if self.head is not None:
            for t in (self.head.s, self.head.o, self.head.p):
                if t is not None and t == ("v", v):
                    return True
        for i, a in enumerate(self.atoms):
            if stages[i] == 3:
                continue
            for pos, t in (("s", a.s), ("o", a.o), ("p", a.p)):
                if t == ("v", v) and not (i == skip_atom and pos in skip_pos):
                    return True
        return False

    # -- step enumeration: returns list of (cost_multiplier, step_descriptor, new_stage, newly_bound)
    def _options(self, i, stages, bound):
        a = self.atoms[i]
        src = self.sources[i]
        st = stages[i]
        isb = lambda t: t is None or t[0] == "c" or t[1] in bound  # noqa: E731
        small = src in ("delta", "dexcl")
        opts = []
        if a.kind == "fam" and st == 0:
            if isb(a.p):
                opts.append((1.0, ("lookup", i), 1, set()))
            else:
                opts.append((3.0 if small else 20.0, ("choose", i), 1, {a.p[1]}))
            return opts
        if a.kind == "un":
            if isb(a.s):
                opts.append((0.5, ("un_check", i), 3, set()))
            elif self._alive(a.s[1], stages, i, ("s",)):
                opts.append((30.0 if small else 300.0, ("un_iter", i), 3, {a.s[1]}))
            else:
                opts.append((1.0, ("nonempty", i), 3, set()))
            return opts
        sb, ob = isb(a.s), isb(a.o)
        if st == 2:
            if ob:
                opts.append((0.5, ("xk_check", i), 3, set()))
            elif self._alive(a.o[1], stages, i, ("o",)):
                opts.append((2.0 if small else 5.0, ("xk_iter", i), 3, {a.o[1]}))
            else:
                opts.append((1.0, ("noop", i), 3, set()))
            return opts
        if sb and ob:
            opts.append((0.5, ("check", i), 3, set()))
        elif sb:
            if self._alive(a.o[1], stages, i, ("o",)):
                opts.append((2.0 if small else 5.0, ("values", i), 3, {a.o[1]}))
            else:
                opts.append((0.8, ("has_key", i), 3, set()))
        elif ob:
            s_alive = self._alive(a.s[1], stages, i, ("s",))
            can_rev = a.kind == "bin" and src in ("full", "base")
            if can_rev:
                opts.append((5.0 if s_alive else 0.8, ("rev", i, s_alive), 3, {a.s[1]} if s_alive else set()))
            else:
                opts.append(((30.0 if small else 300.0) if s_alive else (10.0 if small else 100.0),
                             ("scan_o", i, s_alive), 3, {a.s[1]} if s_alive else set()))
        else:
            if a.s == a.o:
                opts.append((30.0 if small else 300.0, ("diag", i), 3, {a.s[1]}))
            else:
                s_alive = self._alive(a.s[1], stages, i, ("s",))
                o_alive = self._alive(a.o[1], stages, i, ("o",))
                if s_alive:
                    opts.append((30.0 if small else 300.0, ("key", i), 2, {a.s[1]}))
                elif o_alive:
                    opts.append((30.0 if small else 300.0, ("union", i), 3, {a.o[1]}))
                else:
                    opts.append((1.0, ("nonempty", i), 3, set()))
        return opts

    def _bulk_ok(self, step, newly):
        """Can this final step be replaced by a bulk insert into the head?"""
        if self.constraint or self.head is None or len(newly) != 1:
            return False
        kind = step[0]
        if kind not in ("values", "xk_iter", "union", "un_iter"):
            return False
        (v,) = newly
        h = self.head
        vt = ("v", v)
        if h.kind == "un":
            return h.s == vt
        if h.o != vt or h.s == vt or (h.p is not None and h.p == vt):
            return False
        return True

    def plan(self):
        n = len(self.atoms)
        init = [1 if a.kind != "fam" else 0 for a in self.atoms]
        best = [None, float("inf")]
        exhaustive = n <= self.MAX_SEARCH_ATOMS

        def rec(stages, bound, seq, cost, prod):
            # the last step may still be discounted by a bulk insert
            if cost - prod >= best[1]:
                return
            pending = [i for i in range(n) if stages[i] != 3]
            if not pending:
                # bulk discount for the final step
                final_cost = cost
                if seq:
                    step, m, newly, prev_prod = seq[-1]
                    if self._bulk_ok(step, newly):
                        final_cost = cost - prev_prod * m + prev_prod * 0.3
                if final_cost < best[1]:
                    best[0], best[1] = list(seq), final_cost
                return
            cands = []
            for i in pending:
                for m, step, ns, newly in self._options(i, stages, bound):
                    cands.append((m, i, step, ns, newly))
            if not exhaustive:
                cands.sort(key=lambda c: c[0])
                cands = cands[:1]
            for m, i, step, ns, newly in cands:
                st2 = list(stages)
                st2[i] = ns
                p2 = prod * m
                seq.append((step, m, newly, prod))
                rec(st2, bound | newly, seq, cost + p2, p2)
                seq.pop()

        rec(init, frozenset(), [], 0.0, 1.0)
        return best[0]

    # -- code emission
    def emit(self, fname):
        seq = self.plan()
        L = [f"def {fname}(S, C):"]
        ind = "    "
        for k in range(len(self.consts)):
            L.append(f"{ind}c{k} = C[{k}]")
        # relation handles for constant keys
        for i, a in enumerate(self.atoms):
            if a.kind == "fam":
                continue
            L.append(f"{ind}R{i} = S.rel({self._key_code(a.key)})")
        delta_i = [i for i, s in enumerate(self.sources) if s in ("delta", "dexcl")]
        for i in delta_i:
            a = self.atoms[i]
            if a.kind == "fam":
                L.append(f"{ind}if not S.ddata: return False")
            else:
                L.append(f"{ind}if not R{i}.delta: return False")
        h = self.head
        if h is not None and h.kind != "fam":
            L.append(f"{ind}H = S.rel({self._key_code(h.key)})")
        if self.tag is not None:
            L.append(f"{ind}TAG = {self.tag!r}")
        depth = 1
        for n_step, (step, m, newly, _prod) in enumerate(seq):
            last = n_step == len(seq) - 1
            if last and self._bulk_ok(step, newly):
                L.append(ind * depth + self._bulk_code(step))
                break
            lines, dd = self._step_code(step)
            for ln in lines:
                L.append(ind * depth + ln)
            depth += dd
        else:
            L.append(ind * depth + self._head_code())
        L.append(f"{ind}return False")
        return "\n".join(L) + "\n"

    def _key_code(self, key):
        if key[0] == "data":
            return f"('data', {self._t(key[1])})"
        return repr(key)

    def _t(self, t):
        return f"c{t[1]}" if t[0] == "c" else f"v_{self._vid(t[1])}"

    def _vid(self, name):
        m = self.vmap
        if name not in m:
            m[name] = len(m)
        return m[name]

    def _facts(self, i):
        a = self.atoms[i]
        r = f"_r{i}" if a.kind == "fam" else f"R{i}"
        src = self.sources[i]
        if src == "delta":
            return f"{r}.delta"
        if src == "dexcl":
            return f"{r}.dx(TAG)"
        if src == "base":
            return f"{r}.base[TAG]"
        return f"{r}.fwd"

    def _rev(self, i):
        a = self.atoms[i]
        src = self.sources[i]
        if src == "base":
            self.base_rev_needs.add(i)
            return f"R{i}.base_rev[TAG]"
        self.rev_needs.add(a.key)
        return f"R{i}.rev"

    def _step_code(self, step):
        """Return (lines, depth increase) where lines are nested by one level each."""
        kind, i = step[0], step[1]
        a = self.atoms[i]
        F = self._facts(i)
        s, o = a.s, a.o

        def nest(lines):
            return [("    " * k) + ln for k, ln in enumerate(lines)], len(lines)

        if kind == "choose":
            fam = "S.ddata" if self.sources[i] in ("delta", "dexcl") else "tuple(S.data.items())"
            return nest([f"for {self._t(a.p)}, _r{i} in {fam}:"])
        if kind == "lookup":
            return [f"_r{i} = S.data.get({self._t(a.p)})", f"if _r{i} is not None:"], 1
        if kind == "un_check":
            return nest([f"if {self._t(s)} in {F}:"])
        if kind == "un_iter":
            return nest([f"for {self._t(s)} in {F}:"])
        if kind == "nonempty":
            return nest([f"if {F}:"])
        if kind == "check":
            return nest([f"if {self._t(o)} in {F}.get({self._t(s)}, EMPTY):"])
        if kind == "values":
            return nest([f"for {self._t(o)} in {F}.get({self._t(s)}, EMPTY):"])
        if kind == "has_key":
            return nest([f"if {self._t(s)} in {F}:"])
        if kind == "rev":
            alive = step[2]
            rv = self._rev(i)
            if alive:
                return nest([f"for {self._t(s)} in {rv}.get({self._t(o)}, EMPTY):"])
            return nest([f"if {self._t(o)} in {rv}:"])
        if kind == "scan_o":
            alive = step[2]
            if alive:
                return nest([f"for {self._t(s)}, _x{i} in {F}.items():", f"if {self._t(o)} in _x{i}:"])
            return nest([f"if any({self._t(o)} in _x for _x in {F}.values()):"])
        if kind == "diag":
            return nest([f"for {self._t(s)}, _x{i} in {F}.items():", f"if {self._t(s)} in _x{i}:"])
        if kind == "key":
            return nest([f"for {self._t(s)}, _x{i} in {F}.items():"])
        if kind == "union":
            return nest([f"for {self._t(o)} in UNION({F}.values()):"])
        if kind == "xk_check":
            return nest([f"if {self._t(o)} in _x{i}:"])
        if kind == "xk_iter":
            return nest([f"for {self._t(o)} in _x{i}:"])
        if kind == "noop":
            return [], 0
        raise AssertionError(kind)

    def _head_rel(self):
        h = self.head
        if h.kind == "fam":
            return f"S.data_rel({self._t(h.p)})"
        return "H"

    def _head_code(self):
        if self.constraint:
            return "return True"
        h = self.head
        r = self._head_rel()
        if h.kind == "un":
            if self.tag is not None:
                return f"{r}.add1_t(TAG, {self._t(h.s)})"
            return f"{r}.add1({self._t(h.s)})"
        if self.tag is not None:
            return f"{r}.add_t(TAG, {self._t(h.s)}, {self._t(h.o)})"
        return f"{r}.add({self._t(h.s)}, {self._t(h.o)})"

    def _bulk_code(self, step):
        kind, i = step[0], step[1]
        a = self.atoms[i]
        F = self._facts(i)
        if kind == "values":
            X = f"{F}.get({self._t(a.s)}, EMPTY)"
        elif kind == "xk_iter":
            X = f"_x{i}"
        elif kind == "union":
            X = f"UNION({F}.values())"
        else:  # un_iter
            X = F
        h = self.head
        r = self._head_rel()
        if h.kind == "un":
            if self.tag is not None:
                return f"{r}.add1_many_t(TAG, {X})"
            return f"{r}.add1_many({X})"
        if self.tag is not None:
            return f"{r}.add_many_t(TAG, {self._t(h.s)}, {X})"
        return f"{r}.add_many({self._t(h.s)}, {X})"


def _compile_source(src: str, fname: str):
    code = _CODE_CACHE.get(src)
    if code is None:
        code = compile(src, f"<rule {fname}>", "exec")
        _CODE_CACHE[src] = code
    ns = {"EMPTY": _EMPTY, "UNION": _union}
    exec(code, ns)
    return ns[fname]


def compile_program(theory) -> Program:
    """Compile a HornTheory (or iterable of HornRules) into an executable program."""
    rules = list(theory.rules if isinstance(theory, HornTheory) else theory)
    prog = Program()
    proper = []
    for r in rules:
        if not r.body:
            if r.head == BOTTOM:
                prog.ground_bottom = True
            else:
                prog.facts.append(r.head)
        else:
            proper.append(r)
    tc_preds = {}
    rest = []
    for r in proper:
        c = _is_tc(r)
        if c is not None and c not in tc_preds:
            tc_preds[c] = r
        elif c is not None:
            continue
        else:
            rest.append(r)
    tc_const_list = list(tc_preds)
    prog.tc_keys = tc_const_list
    for ridx, r in enumerate(rest):
        constraint = r.head == BOTTOM
        prop = _is_propagation(r, set(tc_preds))
        for di in range(len(r.body)):
            consts, cindex = [], {}
            patoms = [_patom(a, consts, cindex) for a in r.body]
            head = None if constraint else _patom(r.head, consts, cindex)
            sources = ["full"] * len(patoms)
            sources[di] = "delta"
            tag = None
            if prop is not None:
                ai, ti = prop
                tag = f"P{ridx}"
                if di == ai:
                    sources[di] = "dexcl"
                elif patoms[ai].kind != "fam":
                    sources[ai] = "base"
            planner = _Planner(patoms, sources, head, constraint, tag, consts)
            fname = "rule"
            src = planner.emit(fname)
            fn = _compile_source(src, fname)
            v = _Variant(fn, tuple(consts), constraint, src)
            (prog.constraints if constraint else prog.variants).append(v)
            prog.sources.append(src)
            if tag is not None:
                ai, ti = prop
                if sources[ai] == "base":
                    need_rev = ai in planner.base_rev_needs
                    prog.base_needs.append((patoms[ai].key, tuple(consts), tag, need_rev))
            for key in planner.rev_needs:
                prog.rev_needs.append((key, tuple(consts)))
            if tag is not None:
                prog.base_needs.append(("__tags__", tuple(consts), tag, head))
    return prog


# ---------------------------------------------------------------------------
# Fact store and evaluation


@dataclass
class Limits:
    max_facts: int | None = None
    timeout_ms: int | None = None


class FactStore:
    """Interned ground atoms produced by materialization."""

    def __init__(self, interner: Interner | None = None):
        self.interner = interner or Interner()
        self.rels: dict = {}
        self.data: dict = {}
        self.ddata: list = []
        self.bottom = False
        self.stats = {"rounds": 0, "facts": 0, "derived": 0, "rule_applications": 0, "elapsed_ms": 0.0}
        self._tc: list = []
        self._base: list = []   # (rel, tag, need_rev)
        self._tagged: set = set()  # tags used by propagation rules

    # -- relation access
    def rel(self, key) -> Rel:
        r = self.rels.get(key)
        if r is None:
            if key[0] == "data":
                return self.data_rel(key[1])
            r = self.rels[key] = Rel(key, unary=(len(key) == 2 and key[1] == 1))
            if self._tagged:
                r.tags = {}
        return r

    def data_rel(self, pid) -> Rel:
        r = self.data.get(pid)
        if r is None:
            r = self.data[pid] = self.rels[("data", pid)] = Rel(("data", pid))
            if self._tagged:
                r.tags = {}
        return r

    # -- atoms
    def _encode(self, atom: Atom, create=True):
        f = self.interner if create else self.interner.get
        ids = [f(x) for x in atom.args]
        if any(i is None for i in ids):
            return None
        if atom.pred == "data":
            return ("data", ids[1]), ids[0], ids[2]
        if atom.pred == "isa":
            return ("isa",), ids[0], ids[1]
        if len(ids) == 1:
            return (atom.pred, 1), ids[0], None
        if len(ids) == 2:
            return (atom.pred, 2), ids[0], ids[1]
        raise UnsupportedError(f"predicate {atom.pred} of arity {len(ids)}")

    def insert(self, atom: Atom):
        """Queue a ground atom; it becomes visible after the next merge."""
        if atom == BOTTOM:
            self.bottom = True
            return
        if atom.pred == "top":
            return
        key, s, o = self._encode(atom)
        r = self.rel(key)
        if r.unary:
            r.add1(s)
        else:
            r.add(s, o)

    def contains(self, atom: Atom) -> bool:
        if atom == BOTTOM:
            return self.bottom
        enc = self._encode(atom, create=False)
        if enc is None:
            return False
        key, s, o = enc
        r = self.rels.get(key)
        return r is not None and r.contains(s, o)

    def _decode(self, key, s, o=None) -> Atom:
        T = self.interner.terms
        if key[0] == "data":
            return Atom("data", (T[s], T[key[1]], T[o]))
        if key[0] == "isa":
            return Atom("isa", (T[s], T[o]))
        if key[1] == 1:
            return Atom(key[0], (T[s],))
        return Atom(key[0], (T[s], T[o]))

    def atoms(self):
        for key, r in self.rels.items():
            for tup in r.pairs():
                yield self._decode(key, *tup)

    def count(self) -> int:
        return sum(r.size for r in self.rels.values())

    def __len__(self):
        return self.count()

    def copy(self) -> "FactStore":
        c = FactStore(self.interner.copy())
        for key, r in self.rels.items():
            r2 = r.copy()
            c.rels[key] = r2
            if key[0] == "data":
                c.data[key[1]] = r2
        c.bottom = self.bottom
        c.stats = dict(self.stats)
        c._tagged = set(self._tagged)
        c._tc = [c.rels[r.key] for r in self._tc]
        c._base = [(c.rels[r.key], tag, nr) for r, tag, nr in self._base]
        return c


class Engine:
    """Binds a compiled program to fact stores."""

    def __init__(self, theory, limits: Limits | None = None):
        self.program = compile_program(theory)
        self.limits = limits or Limits()

    # -- setup of a store for this program
    def _prepare(self, store: FactStore):
        prog = self.program
        I = store.interner

        def ckey(key, consts):
            if key[0] == "data":
                return ("data", I(consts[key[1][1]]))
            return key

        tags = {t for _k, _c, t, _h in prog.base_needs if _k == "__tags__"}
        if tags:
            store._tagged |= tags
        for key, consts, tag, extra in prog.base_needs:
            if key == "__tags__":
                continue
            r = store.rel(ckey(key, consts))
            if r.base is None:
                r.base, r.base_rev = {}, {}
            if tag not in r.base:
                r.base[tag] = set() if r.unary else {}
                r.base_rev[tag] = {} if extra else None
        for key, consts in prog.rev_needs:
            store.rel(ckey(key, consts)).ensure_rev()
        for c in prog.tc_keys:
            r = store.data_rel(I(c))
            if r.N is None:
                r.N, r.Nrev = {}, {}
                if r not in store._tc:
                    store._tc.append(r)
        if store._tagged:
            for r in store.rels.values():
                if r.tags is None:
                    r.tags = {}
        store._base = [(r, tag, r.base_rev[tag] is not None) for r in store.rels.values() if r.base for tag in r.base]
        # pre-intern rule constants so that relation handles resolve
        self._consts = {}

    def materialize(self, extra_facts=()) -> FactStore:
        store = FactStore()
        self._prepare(store)
        if self.program.ground_bottom:
            store.bottom = True
        inputs = set(self.program.facts) | set(extra_facts)
        for a in inputs:
            store.insert(a)
        self._run(store, len(inputs - {BOTTOM}), initial=True)
        return store

    def extend(self, store: FactStore, facts) -> FactStore:
        """Continue materialization of a copy of ``store`` with additional facts."""
        st = store.copy()
        self._prepare(st)
        new = {a for a in facts if a != BOTTOM and not store.contains(a)}
        for a in facts:
            st.insert(a)
        self._run(st, len(new), initial=False)
        return st

    # -- the fixpoint loop
    def _bind(self, store, variants):
        I = store.interner
        return [(v.fn, tuple(I(c) for c in v.consts)) for v in variants]

    def _run(self, store: FactStore, n_inputs: int, initial: bool):
        t0 = time.monotonic()
        lim = self.limits
        deadline = t0 + lim.timeout_ms / 1000.0 if lim.timeout_ms else None
        rules = self._bind(store, self.program.variants)
        constraints = self._bind(store, self.program.constraints)
        stats = store.stats
        prior = 0 if initial else stats.get("derived", 0)
        inputs = store.count() + n_inputs
        apps = 0

        def check():
            if deadline is not None and time.monotonic() > deadline:
                stats["elapsed_ms"] = (time.monotonic() - t0) * 1000
                raise ResourceLimitError("timeout exceeded", stats=dict(stats))

        while True:
            n_new = self._merge(store)
            stats["facts"] = store.count()
            stats["derived"] = prior + stats["facts"] - inputs
            if lim.max_facts is not None and stats["facts"] > lim.max_facts:
                stats["elapsed_ms"] = (time.monotonic() - t0) * 1000
                raise ResourceLimitError(f"fact limit {lim.max_facts} exceeded", stats=dict(stats))
            check()
            if store.bottom or n_new == 0:
                break
            stats["rounds"] += 1
            for fn, C in constraints:
                apps += 1
                if fn(store, C):
                    store.bottom = True
                    break
            if store.bottom:
                break
            for fn, C in rules:
                apps += 1
                fn(store, C)
                check()
        stats["rule_applications"] += apps
        stats["elapsed_ms"] = (time.monotonic() - t0) * 1000
        # clear deltas so the store is at rest
        for r in store.rels.values():
            r.delta = set() if r.unary else {}
            r.dexcl = None
        store.ddata = []

    def _merge(self, store: FactStore) -> int:
        total = 0
        # pend -> delta
        for r in store.rels.values():
            pend = r.pend
            r.delta = pend
            r.pend = set() if r.unary else {}
        # transitive closure maintenance
        for r in store._tc:
            self._close(r)
        ddata = []
        for key, r in store.rels.items():
            d = r.delta
            r.dexcl = None
            if not d:
                if r.tags:
                    r.tags = {}
                continue
            if r.unary:
                r.fwd |= d
                n = len(d)
                tags = r.tags
                if tags:
                    r.dexcl = {t: d - ts for t, ts in tags.items()}
                if r.base:
                    for tag, b in r.base.items():
                        ex = tags.get(tag) if tags else None
                        b |= (d - ex) if ex else d
            else:
                fwd = r.fwd
                n = 0
                for s, os in d.items():
                    cur = fwd.get(s)
                    if cur is None:
                        fwd[s] = set(os)
                    else:
                        cur |= os
                    n += len(os)
                if r.rev is not None:
                    _add_rev(r.rev, d)
                tags = r.tags
                if tags:
                    dex = {}
                    for t, tmap in tags.items():
                        dd = {}
                        for s, os in d.items():
                            ts = tmap.get(s)
                            if ts:
                                rest = os - ts
                                if rest:
                                    dd[s] = rest
                            else:
                                dd[s] = os
                        dex[t] = dd
                    r.dexcl = dex
                if r.base:
                    for tag, b in r.base.items():
                        add = r.dexcl.get(tag, d) if r.dexcl else d
                        for s, os in add.items():
                            cur = b.get(s)
                            if cur is None:
                                b[s] = set(os)
                            else:
                                cur |= os
                        br = r.base_rev.get(tag)
                        if br is not None:
                            _add_rev(br, add)
                if key[0] == "data":
                    ddata.append((key[1], r))
            if r.tags:
                r.tags = {}
            r.size += n
            total += n
        store.ddata = ddata
        return total

    def _close(self, r: Rel):
        """Add the transitive-closure consequences of new non-closure edges to r.delta."""
        d = r.delta
        if not d:
            return
        N, Nrev, fwd = r.N, r.Nrev, r.fwd
        dirty = []
        for s, os in d.items():
            ns = N.get(s)
            for o in os:
                if o == s:
                    continue
                if ns is None:
                    ns = N[s] = set()
                if o not in ns:
                    ns.add(o)
                    rv = Nrev.get(o)
                    if rv is None:
                        Nrev[o] = {s}
                    else:
                        rv.add(s)
                    dirty.append(s)
        if not dirty:
            return
        # ancestors of the sources of new edges
        affected = set(dirty)
        stack = list(affected)
        while stack:
            v = stack.pop()
            for u in Nrev.get(v, _EMPTY):
                if u not in affected:
                    affected.add(u)
                    stack.append(u)
        reach = {}

        def outside(w):
            a = fwd.get(w, _EMPTY)
            b = d.get(w)
            return a | b if b else a

        # iterative Tarjan over the affected subgraph; SCCs come out sinks first
        index = {}
        low = {}
        on = set()
        st = []
        counter = itertools.count()
        for root in affected:
            if root in index:
                continue
            work = [(root, iter(N.get(root, _EMPTY)))]
            index[root] = low[root] = next(counter)
            st.append(root)
            on.add(root)
            while work:
                v, it = work[-1]
                advanced = False
                for w in it:
                    if w not in affected:
                        continue
                    if w not in index:
                        index[w] = low[w] = next(counter)
                        st.append(w)
                        on.add(w)
                        work.append((w, iter(N.get(w, _EMPTY))))
                        advanced = True
                        break
                    if w in on and index[w] < low[v]:
                        low[v] = index[w]
                if advanced:
                    continue
                work.pop()
                if work:
                    u = work[-1][0]
                    if low[v] < low[u]:
                        low[u] = low[v]
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = st.pop()
                        on.discard(w)
                        comp.append(w)
                        if w == v:
                            break
                    cset = set(comp)
                    acc = set()
                    for x in comp:
                        for w in N.get(x, _EMPTY):
                            acc.add(w)
                            if w in cset:
                                continue
                            if w in affected:
                                acc |= reach[w]
                            else:
                                acc |= outside(w)
                    for x in comp:
                        reach[x] = acc
                        new = acc - fwd.get(x, _EMPTY)
                        dx = d.get(x)
                        if dx:
                            new -= dx
                            dx |= new
                        elif new:
                            d[x] = new


# ---------------------------------------------------------------------------
# Queries


def query(store: FactStore, q: ExistentialConjunction, limits: Limits | None = None, max_steps: int | None = None):
    """Find a homomorphism from the query variables into the store, or None."""
    I = store.interner
    enc = []
    for a in q.atoms:
        args = []
        for x in a.args:
            if isinstance(x, Var):
                args.append(("v", x.name))
            else:
                i = I.get(x)
                if i is None:
                    return None
                args.append(("c", i))
        enc.append((a.pred, args))
    deadline = None
    if limits and limits.timeout_ms:
        deadline = time.monotonic() + limits.timeout_ms / 1000.0
    steps = [0]

    def val(t, b):
        return t[1] if t[0] == "c" else b.get(t[1])

    def candidates(atom, b):
        """Return an estimate and a generator of bindings extensions."""
        pred, args = atom
        if pred == "data":
            s, p, o = args
            pv = val(p, b)
            rels = [(pv, store.data.get(pv))] if pv is not None else list(store.data.items())
            rels = [(pid, r) for pid, r in rels if r is not None and r.size]
            est = 0
            for _pid, r in rels:
                est += _estimate(r, val(s, b), val(o, b))
            return est, _gen_bin(rels, s, o, p, b)
        if pred == "isa" or len(args) == 2:
            key = ("isa",) if pred == "isa" else (pred, 2)
            r = store.rels.get(key)
            if r is None:
                return 0, iter(())
            return _estimate(r, val(args[0], b), val(args[1], b)), _gen_bin([(None, r)], args[0], args[1], None, b)
        r = store.rels.get((pred, 1))
        if r is None:
            return 0, iter(())
        sv = val(args[0], b)
        if sv is not None:
            return (1 if sv in r.fwd else 0), iter([{}] if sv in r.fwd else [])
        return len(r.fwd), ({args[0][1]: x} for x in r.fwd)

    def _estimate(r, sv, ov):
        if sv is not None and ov is not None:
            return 1 if ov in r.fwd.get(sv, _EMPTY) else 0
        if sv is not None:
            return len(r.fwd.get(sv, _EMPTY))
        if ov is not None:
            return len(r.ensure_rev().get(ov, _EMPTY))
        return r.size

    def _gen_bin(rels, s, o, p, b):
        for pid, r in rels:
            ext0 = {}
            if p is not None and p[0] == "v" and p[1] not in b:
                ext0 = {p[1]: pid}
            sv, ov = val(s, b), val(o, b)
            if sv is None and s[0] == "v" and s[1] in ext0:
                sv = ext0[s[1]]
            if ov is None and o[0] == "v" and o[1] in ext0:
                ov = ext0[o[1]]
            if sv is not None and ov is not None:
                if ov in r.fwd.get(sv, _EMPTY):
                    yield dict(ext0)
            elif sv is not None:
                for x in r.fwd.get(sv, _EMPTY):
                    if o[1] in ext0 and ext0[o[1]] != x:
                        continue
                    e = dict(ext0)
                    e[o[1]] = x
                    yield e
            elif ov is not None:
                for x in r.ensure_rev().get(ov, _EMPTY):
                    e = dict(ext0)
                    e[s[1]] = x
                    yield e
            else:
                same = s[1] == o[1]
                for x, ys in r.fwd.items():
                    if same:
                        if x in ys:
                            e = dict(ext0)
                            e[s[1]] = x
                            yield e
                        continue
                    for y in ys:
                        e = dict(ext0)
                        e[s[1]] = x
                        e[o[1]] = y
                        yield e

    def solve(remaining, b):
        if not remaining:
            return dict(b)
        steps[0] += 1
        if max_steps is not None and steps[0] > max_steps:
            raise ResourceLimitError("query step limit exceeded", stats={"steps": steps[0]})
        if deadline is not None and steps[0] % 256 == 0 and time.monotonic() > deadline:
            raise ResourceLimitError("query timeout exceeded", stats={"steps": steps[0]})
        best = None
        for idx, atom in enumerate(remaining):
            est, gen = candidates(atom, b)
            if best is None or est < best[0]:
                best = (est, idx, gen)
            if est == 0:
                break
        est, idx, gen = best
        if est == 0:
            return None
        rest = remaining[:idx] + remaining[idx + 1:]
        for ext in gen:
            b2 = dict(b)
            b2.update(ext)
            res = solve(rest, b2)
            if res is not None:
                return res
        return None

    res = solve(enc, {})
    if res is None:
        return None
    T = I.terms
    return {Var(k): T[v] for k, v in res.items()}


def materialize(theory, limits: Limits | None = None) -> FactStore:
    return Engine(theory, limits).materialize()
