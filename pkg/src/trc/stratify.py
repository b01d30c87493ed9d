"""Stratification typing and the bracket-abstraction compiler.

``stratify`` assigns an integer type to every variable of a term, where an
application's function is exactly one type above its argument, ``k(-)``
raises the type by one, and the components of a pair share the pair's type.
Types live in all of the integers (the assignment is shift-invariant); the
reported assignment is shifted so its minimum is 0.

``abstract`` builds, for an admissible variable ``x`` and term ``t``, a term
``l`` in which ``x`` does not occur and which behaves like the function
``s -> t[s/x]`` up to extensional equality.  Admissibility is the level
discipline of ``abstraction_levels``: walking from the root at level 0,
levels rise by one into function position, stay put into argument and pair
positions, and drop by one into k-bodies; every occurrence of ``x`` must sit
at level exactly 0 and no subterm containing ``x`` may go negative.

``compile_combinator`` iterates ``abstract`` over a parameter list (last
parameter first) and self-tests the output by applying it to its parameters
and comparing with the body extensionally; it never returns unverified
output.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping, Optional

from .engine import RuleSet, ext_equal
from .terms import (
    ABST, P1, P2,
    App, Defined, KWrap, Pair, Term, TrcError, Var,
    Position, app, children, format_position, free_vars, render, subterms,
    term_size,
)

IDENTITY = Defined("I")
IDENTITY_BODY = Pair(P1, P2)


class NotAbstractable(TrcError):
    def __init__(self, position: Position, reason: str, variable: str = "", parameter: str = ""):
        self.position = position
        self.reason = reason  # "x-at-nonzero-level" | "negative-level"
        self.variable = variable
        self.parameter = parameter
        where = format_position(position)
        super().__init__(f"not abstractable over {variable or '?'}: {reason} at {where}")


class InternalLevelError(TrcError):
    """The abstraction recursion visited a case its precondition excludes."""


class CompileError(TrcError):
    def __init__(self, message: str, diagnostics: str = ""):
        self.diagnostics = diagnostics
        super().__init__(message if not diagnostics else f"{message}\n{diagnostics}")


# ---------------------------------------------------------------------------
# Stratification solver (union-find over difference constraints)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Constraint:
    """tau(a) = tau(b) + offset, generated at the named subterm."""

    a: str
    b: str
    offset: int
    at: Position


@dataclass(frozen=True)
class StratifyResult:
    assignment: Optional[dict[str, int]]
    conflict: Optional[tuple[Constraint, ...]]

    @property
    def satisfiable(self) -> bool:
        return self.assignment is not None


def _node_key(pos: Position) -> str:
    return "node:" + format_position(pos)


def term_constraints(t: Term) -> list[Constraint]:
    """The difference constraints of the typing discipline, one unknown per
    variable (shared across occurrences) and per subterm occurrence."""
    out: list[Constraint] = []
    for pos, sub in subterms(t):
        key = _node_key(pos)
        if isinstance(sub, Var):
            out.append(Constraint(key, "var:" + sub.name, 0, pos))
        elif isinstance(sub, App):
            fk = _node_key(pos + ("function",))
            ak = _node_key(pos + ("argument",))
            out.append(Constraint(fk, ak, 1, pos))
            out.append(Constraint(key, ak, 0, pos))
        elif isinstance(sub, KWrap):
            bk = _node_key(pos + ("k-body",))
            out.append(Constraint(key, bk, 1, pos))
        elif isinstance(sub, Pair):
            lk = _node_key(pos + ("pair-left",))
            rk = _node_key(pos + ("pair-right",))
            out.append(Constraint(key, lk, 0, pos))
            out.append(Constraint(key, rk, 0, pos))
        # constants and defined names: fresh unconstrained unknown per occurrence
    return out


class _OffsetUnionFind:
    def __init__(self) -> None:
        self.parent: dict[str, str] = {}
        self.offset: dict[str, int] = {}  # value(key) = value(parent) + offset

    def find(self, key: str) -> tuple[str, int]:
        if key not in self.parent:
            self.parent[key] = key
            self.offset[key] = 0
            return key, 0
        path = []
        cur = key
        total = 0
        while self.parent[cur] != cur:
            path.append(cur)
            total += self.offset[cur]
            cur = self.parent[cur]
        # path compression, re-anchoring offsets at the root
        acc = total
        for node in path:
            step = self.offset[node]
            self.parent[node] = cur
            self.offset[node] = acc
            acc -= step
        return cur, total

    def union(self, a: str, b: str, delta: int) -> bool:
        """Impose value(a) = value(b) + delta; False on contradiction."""
        ra, da = self.find(a)
        rb, db = self.find(b)
        if ra == rb:
            return da == db + delta
        # value(ra) = value(a) - da = value(b) + delta - da = value(rb) + db + delta - da
        self.parent[ra] = rb
        self.offset[ra] = db + delta - da
        return True

    def value(self, key: str) -> tuple[str, int]:
        return self.find(key)


def _conflict_cycle(constraints: list[Constraint], bad: Constraint) -> tuple[Constraint, ...]:
    """A walk from bad.a to bad.b through earlier constraints, closed by ``bad``.

    Replaying the cycle sums its offsets to a nonzero value, the witness of
    unsatisfiability (an equation a = a + c with c != 0).
    """
    adj: dict[str, list[tuple[str, Constraint]]] = {}
    for c in constraints:
        if c is bad:
            continue
        adj.setdefault(c.a, []).append((c.b, c))
        adj.setdefault(c.b, []).append((c.a, c))
    seen = {bad.a: None}
    queue = deque([bad.a])
    parents: dict[str, tuple[str, Constraint]] = {}
    while queue:
        cur = queue.popleft()
        if cur == bad.b:
            break
        for nxt, c in adj.get(cur, ()):
            if nxt not in seen:
                seen[nxt] = None
                parents[nxt] = (cur, c)
                queue.append(nxt)
    path: list[Constraint] = []
    cur = bad.b
    while cur != bad.a:
        prev, c = parents[cur]
        path.append(c)
        cur = prev
    path.reverse()
    return tuple(path + [bad])


def replay_conflict(cycle: tuple[Constraint, ...]) -> int:
    """Net offset around the conflict walk; nonzero by construction.

    The walk starts at the closing constraint's left node with level 0 and
    follows the other constraints to its right node; the return value is the
    amount by which the closing constraint then contradicts itself (the ``c``
    of the impossible equation ``a = a + c``).
    """
    closing = cycle[-1]
    cur = closing.a
    level = 0
    for c in cycle[:-1]:
        if c.a == cur:
            level -= c.offset  # tau(a) = tau(b) + off  =>  tau(b) = tau(a) - off
            cur = c.b
        elif c.b == cur:
            level += c.offset
            cur = c.a
        else:
            raise TrcError("conflict walk is not connected")
    if cur != closing.b:
        raise TrcError("conflict walk does not reach the closing constraint")
    return level + closing.offset


def stratify(t: Term) -> StratifyResult:
    constraints = term_constraints(t)
    uf = _OffsetUnionFind()
    for i, c in enumerate(constraints):
        if not uf.union(c.a, c.b, c.offset):
            return StratifyResult(None, _conflict_cycle(constraints[: i + 1], c))
    assignment: dict[str, int] = {}
    anchors: dict[str, int] = {}
    for name in sorted(free_vars(t)):
        root, off = uf.value("var:" + name)
        # variables in separate components are anchored independently at 0
        base = anchors.setdefault(root, -off)
        assignment[name] = base + off
    if assignment:
        low = min(assignment.values())
        assignment = {k: v - low for k, v in assignment.items()}
    return StratifyResult(assignment, None)


# ---------------------------------------------------------------------------
# Abstraction levels and the bracket-abstraction recursion
# ---------------------------------------------------------------------------

def _contains_var(t: Term, x: str) -> bool:
    return x in free_vars(t)


def abstraction_levels(x: str, t: Term) -> dict[Position, int]:
    """Level of every subterm position, walking from the root at level 0.

    Succeeds iff every occurrence of ``x`` sits at level exactly 0 and no
    subterm containing ``x`` has a negative level; raises NotAbstractable
    otherwise.
    """
    levels: dict[Position, int] = {}
    stack: list[tuple[Position, Term, int]] = [((), t, 0)]
    while stack:
        pos, sub, level = stack.pop()
        levels[pos] = level
        contains = _contains_var(sub, x)
        if contains and level < 0:
            raise NotAbstractable(pos, "negative-level", x)
        if isinstance(sub, Var) and sub.name == x and level != 0:
            raise NotAbstractable(pos, "x-at-nonzero-level", x)
        for sel, child in children(sub):
            if sel == "function":
                delta = 1
            elif sel == "k-body":
                delta = -1
            else:
                delta = 0
            stack.append((pos + (sel,), child, level + delta))
    return levels


def abstract(x: str, t: Term) -> Term:
    """Bracket abstraction of ``x`` from ``t`` (precondition: levels admit it).

    The recursion is indexed by the current level n (starting at 0):

      (i)   x not in t          -> k(t)
      (ii)  n = 0 and t = x     -> I
      (iii) t = <a, b>          -> <F_n(a), F_n(b)>
      (iv)  t = k(c)            -> Abst k(F_{n-1}(c))
      (v)   t = u v             -> Abst F_{n+1}(u) F_n(v)

    The result contains no occurrence of ``x``; applying it to any s is
    extensionally equal to t[s/x].
    """
    abstraction_levels(x, t)  # raises when inadmissible
    return _abstract_level(x, t, 0)


def _abstract_level(x: str, t: Term, n: int) -> Term:
    if not _contains_var(t, x):
        return KWrap(t)
    if isinstance(t, Var) and t.name == x:
        if n != 0:
            raise InternalLevelError(f"variable {x} reached at level {n}")
        return IDENTITY
    if isinstance(t, Pair):
        return Pair(_abstract_level(x, t.left, n), _abstract_level(x, t.right, n))
    if isinstance(t, KWrap):
        if n < 1:
            raise InternalLevelError(f"k-body containing {x} reached at level {n}")
        return App(ABST, KWrap(_abstract_level(x, t.body, n - 1)))
    if isinstance(t, App):
        return App(App(ABST, _abstract_level(x, t.fn, n + 1)), _abstract_level(x, t.arg, n))
    raise InternalLevelError(f"unexpected node {t!r} at level {n}")


# ---------------------------------------------------------------------------
# Combinator specs and compilation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CombinatorSpec:
    """A definition ``name x1 ... xn = body`` over exactly those parameters."""

    name: str
    params: tuple[str, ...]
    body: Term

    def __post_init__(self) -> None:
        if len(set(self.params)) != len(self.params):
            raise ValueError(f"{self.name}: parameters must be distinct")
        loose = free_vars(self.body) - set(self.params)
        if loose:
            raise ValueError(f"{self.name}: body uses undeclared variables {sorted(loose)}")


def compile_combinator(
    spec: CombinatorSpec,
    rs: RuleSet,
    defs: Mapping[str, Term] | None = None,
    optimize_result: bool = False,
) -> Term:
    """Closed term for ``spec`` by iterated abstraction, innermost parameter first.

    Self-test: the result applied to the parameters must be extensionally
    equal to the body; on failure the result is rejected with diagnostics.
    """
    t = spec.body
    for param in reversed(spec.params):
        try:
            t = abstract(param, t)
        except NotAbstractable as exc:
            raise NotAbstractable(exc.position, exc.reason, exc.variable, parameter=param) from None
    if optimize_result:
        t = optimize(t)
    applied = app(t, *[Var(p) for p in spec.params])
    evidence = ext_equal(applied, spec.body, rs, defs=defs)
    if not evidence.equal:
        left = evidence.levels[-1].left.result
        right = evidence.levels[-1].right.result
        raise CompileError(
            f"{spec.name}: compiled term failed its self-test",
            diagnostics=f"applied form normalizes to {render(left)}, body to {render(right)}",
        )
    return t


# ---------------------------------------------------------------------------
# Kernel-verified simplifier
# ---------------------------------------------------------------------------

def _head_simplify(t: Term, eta: bool) -> Optional[Term]:
    # Abst (Abst (Abst a)) -> Abst a
    if (
        isinstance(t, App) and t.fn == ABST and isinstance(t.arg, App) and t.arg.fn == ABST
        and isinstance(t.arg.arg, App) and t.arg.arg.fn == ABST
    ):
        return App(ABST, t.arg.arg.arg)
    # Abst (Abst k(a)) -> k(a)
    if (
        isinstance(t, App) and t.fn == ABST and isinstance(t.arg, App) and t.arg.fn == ABST
        and isinstance(t.arg.arg, KWrap)
    ):
        return t.arg.arg
    # Abst k(k(a)) -> k(k(a))
    if isinstance(t, App) and t.fn == ABST and isinstance(t.arg, KWrap) and isinstance(t.arg.body, KWrap):
        return t.arg
    # Abst k(a) k(b) -> k(a b)
    if (
        isinstance(t, App) and isinstance(t.fn, App) and t.fn.fn == ABST
        and isinstance(t.fn.arg, KWrap) and isinstance(t.arg, KWrap)
    ):
        return KWrap(App(t.fn.arg.body, t.arg.body))
    # Abst P_i -> k(P_i) ; Abst I -> k(I)
    if isinstance(t, App) and t.fn == ABST and t.arg in (P1, P2, IDENTITY):
        return KWrap(t.arg)
    # Abst k(P_i) -> P_i ; Abst k(I) -> I
    if isinstance(t, App) and t.fn == ABST and isinstance(t.arg, KWrap) and t.arg.body in (P1, P2, IDENTITY):
        return t.arg.body
    # eta (off by default): Abst k(u) I -> u
    if (
        eta and isinstance(t, App) and t.arg == IDENTITY and isinstance(t.fn, App)
        and t.fn.fn == ABST and isinstance(t.fn.arg, KWrap)
    ):
        return t.fn.arg.body
    return None


def optimize(t: Term, eta: bool = False) -> Term:
    """Exhaustively apply the verified simplifications; never grows the term.

    All rewrites shrink or preserve size except the pair distribution
    ``Abst <a,b> -> <Abst a, Abst b>``, which is attempted and kept only when
    the fully simplified candidate is no larger than what it replaces.
    """
    def go(u: Term) -> Term:
        # head rules first, so whole-node collapses win over sub-collapses
        head = _head_simplify(u, eta)
        if head is not None:
            return go(head)
        if isinstance(u, App):
            v: Term = App(go(u.fn), go(u.arg))
        elif isinstance(u, KWrap):
            v = KWrap(go(u.body))
        elif isinstance(u, Pair):
            v = Pair(go(u.left), go(u.right))
        else:
            v = u
        if v != u:
            head = _head_simplify(v, eta)
            if head is not None:
                return go(head)
        if isinstance(v, App) and v.fn == ABST and isinstance(v.arg, Pair):
            candidate = go(Pair(App(ABST, v.arg.left), App(ABST, v.arg.right)))
            if term_size(candidate) <= term_size(v):
                return candidate
        return v

    out = go(t)
    return out if term_size(out) <= term_size(t) else t
