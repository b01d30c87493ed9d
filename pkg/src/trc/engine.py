"""Oriented rewrite rules and fuel-bounded normalization for TRC terms.

The core rule set houses the calculus' equations as left-to-right rewrite
rules.  Normalization is deterministic: at each step the leftmost-outermost
position where any rule applies is rewritten with the first matching rule in
rule-set order.  Nontermination is a normal, reportable outcome (the fuel
bound), never a hang.

Two of the core rules exist in a corrected and an uncorrected variant (see
``EngineConfig.corrected_axioms``): the pair-application rule
``<x,y> z -> <x z, y z>`` and the abstraction rule
``Abst x y z -> x k(z) (y z)``.  The uncorrected spellings
(``<x,y> z -> <x y, x z>`` and ``Abst x y z -> x k(y) (y z)``) reproduce a
documented misprint and are kept behind the flag purely for regression tests;
they are inconsistent with the corrected theory's own derivations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Protocol

from .terms import (
    ABST, EQ, P1, P2,
    App, KWrap, Pair, PatVar, Term, TrcError, Var,
    expand_defined, format_position, free_vars, fresh_var, match_pattern,
    navigate, pattern_vars, render, replace_at, substitute, subterms, to_pattern,
    Position,
)


class RuleError(TrcError):
    """Raised when a rule or rule registration is malformed."""


@dataclass(frozen=True)
class EngineConfig:
    fuel: int = 10000
    ext_depth: int = 4
    corrected_axioms: bool = True
    surjective_pairing: bool = True
    eq_reflexivity: bool = True

    def __post_init__(self) -> None:
        if self.fuel < 1:
            raise ValueError("fuel must be >= 1")
        if self.ext_depth < 0:
            raise ValueError("ext_depth must be >= 0")


@dataclass(frozen=True)
class Rule:
    """Oriented schematic equation.

    ``identical`` names two pattern variables that must bind syntactically
    identical subterms for the rule to fire (only used by the Eq rule).
    """

    name: str
    lhs: Term
    rhs: Term
    provenance: str  # "axiom", "derived:<id>", "hypothesis:<id>", "fact"
    identical: Optional[tuple[str, str]] = None

    def __post_init__(self) -> None:
        extra = pattern_vars(self.rhs) - pattern_vars(self.lhs)
        if extra:
            raise RuleError(f"rule {self.name}: rhs pattern variables {sorted(extra)} not bound by lhs")


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[Rule, ...]
    config: EngineConfig

    def __post_init__(self) -> None:
        names = [r.name for r in self.rules]
        if len(names) != len(set(names)):
            raise RuleError("rule names must be unique")

    def extended(self, more: Iterable[Rule]) -> "RuleSet":
        return RuleSet(self.rules + tuple(more), self.config)


def _pv(name: str) -> PatVar:
    return PatVar("$" + name)


def core_rules(config: EngineConfig | None = None) -> RuleSet:
    """The core rule set, in fixed order, honoring the config toggles."""
    cfg = config or EngineConfig()
    x, y, z = _pv("x"), _pv("y"), _pv("z")
    a, b = _pv("a"), _pv("b")
    rules: list[Rule] = [
        Rule("K", App(KWrap(x), y), x, "axiom"),
        Rule("P1-proj", App(P1, Pair(a, b)), a, "axiom"),
        Rule("P2-proj", App(P2, Pair(a, b)), b, "axiom"),
    ]
    if cfg.surjective_pairing:
        rules.append(Rule("surjective-pairing", Pair(App(P1, x), App(P2, x)), x, "axiom"))
    if cfg.corrected_axioms:
        rules.append(Rule("pair-application", App(Pair(x, y), z), Pair(App(x, z), App(y, z)), "axiom"))
        rules.append(Rule("Abst", App(App(App(ABST, x), y), z), App(App(x, KWrap(z)), App(y, z)), "axiom"))
    else:
        rules.append(Rule("pair-application", App(Pair(x, y), z), Pair(App(x, y), App(x, z)), "axiom"))
        rules.append(Rule("Abst", App(App(App(ABST, x), y), z), App(App(x, KWrap(y)), App(y, z)), "axiom"))
    if cfg.eq_reflexivity:
        rules.append(Rule("Eq-refl", App(EQ, Pair(a, b)), P1, "axiom", identical=("$a", "$b")))
    return RuleSet(tuple(rules), cfg)


def rule_match(rule: Rule, t: Term) -> Optional[dict[str, Term]]:
    subst = match_pattern(rule.lhs, t)
    if subst is None:
        return None
    if rule.identical is not None:
        p, q = rule.identical
        if subst.get(p) != subst.get(q):
            return None
    return subst


@dataclass(frozen=True)
class TraceStep:
    position: Position
    rule_name: str
    before: Term
    after: Term

    def line(self, number: int) -> str:
        return f"{number} {format_position(self.position)} {self.rule_name} ⊢ {render(self.after)}"


@dataclass(frozen=True)
class NormalizeResult:
    result: Term
    trace: tuple[TraceStep, ...]
    exhausted: bool

    def lines(self) -> list[str]:
        return [step.line(i) for i, step in enumerate(self.trace, start=1)]


def rewrite_at(t: Term, pos: Position, rule: Rule) -> Optional[Term]:
    """Apply ``rule`` at exactly ``pos``; None when the rule does not match there."""
    sub = navigate(t, pos)
    subst = rule_match(rule, sub)
    if subst is None:
        return None
    return replace_at(t, pos, substitute(rule.rhs, subst))


def rewrite_step(t: Term, rs: RuleSet) -> Optional[TraceStep]:
    """One step: first rule (in rule-set order) at the leftmost-outermost position."""
    for pos, sub in subterms(t):
        for rule in rs.rules:
            subst = rule_match(rule, sub)
            if subst is not None:
                after = replace_at(t, pos, substitute(rule.rhs, subst))
                return TraceStep(pos, rule.name, t, after)
    return None


def normalize(t: Term, rs: RuleSet, fuel: int | None = None) -> NormalizeResult:
    limit = rs.config.fuel if fuel is None else fuel
    trace: list[TraceStep] = []
    cur = t
    for _ in range(limit):
        step = rewrite_step(cur, rs)
        if step is None:
            return NormalizeResult(cur, tuple(trace), False)
        trace.append(step)
        cur = step.after
    # fuel consumed: exhausted only when a redex actually remains
    exhausted = rewrite_step(cur, rs) is not None
    return NormalizeResult(cur, tuple(trace), exhausted)


# ---------------------------------------------------------------------------
# Extensional equality
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExtLevel:
    fresh: Optional[str]  # variable applied to reach this level (None at level 0)
    left: NormalizeResult
    right: NormalizeResult


@dataclass(frozen=True)
class ExtEvidence:
    equal: bool
    levels: tuple[ExtLevel, ...]

    def __bool__(self) -> bool:
        return self.equal

    @property
    def fresh_vars(self) -> tuple[str, ...]:
        return tuple(lv.fresh for lv in self.levels if lv.fresh is not None)

    def summary(self) -> str:
        steps = sum(len(lv.left.trace) + len(lv.right.trace) for lv in self.levels)
        depth = len(self.levels) - 1
        if self.equal:
            return f"EQUAL (ext depth {depth}, {steps} rewrite steps)"
        return f"UNKNOWN (searched ext depth {depth}, {steps} rewrite steps)"


def ext_equal(
    s: Term,
    t: Term,
    rs: RuleSet,
    defs: Mapping[str, Term] | None = None,
    ext_depth: int | None = None,
    fuel: int | None = None,
) -> ExtEvidence:
    """Decide equality up to extensionality by bounded fresh-variable application.

    An ``equal`` result is sound (a genuine equality of the calculus); a
    non-equal result is merely inconclusive.
    """
    depth = rs.config.ext_depth if ext_depth is None else ext_depth
    left = expand_defined(s, defs) if defs else s
    right = expand_defined(t, defs) if defs else t
    levels: list[ExtLevel] = []
    fresh: Optional[str] = None
    used: set[str] = set()
    for _ in range(depth + 1):
        ln = normalize(left, rs, fuel)
        rn = normalize(right, rs, fuel)
        levels.append(ExtLevel(fresh, ln, rn))
        if ln.result == rn.result:
            return ExtEvidence(True, tuple(levels))
        avoid = free_vars(ln.result) | free_vars(rn.result) | used
        fresh = fresh_var(avoid)
        used.add(fresh)
        left = App(ln.result, Var(fresh))
        right = App(rn.result, Var(fresh))
    return ExtEvidence(False, tuple(levels))


# ---------------------------------------------------------------------------
# Derived-rule registration
# ---------------------------------------------------------------------------

class EqualityRecord(Protocol):
    """What the engine needs to know about a kernel-checked theorem."""

    @property
    def theorem_id(self) -> str: ...

    def equation_sides(self) -> Optional[tuple[Term, Term]]: ...


def register_derived_rule(rs: RuleSet, lhs: Term, rhs: Term, record: EqualityRecord) -> RuleSet:
    """Extend ``rs`` with a derived rule backed by a checked equality theorem.

    The record's statement must be exactly ``lhs = rhs`` (with object
    variables where the rule has pattern variables); anything else is
    rejected.  Extending a rule set never changes the meaning of equalities
    already derivable, only their reachability by rewriting.
    """
    sides = record.equation_sides()
    if sides is None:
        raise RuleError(f"theorem {record.theorem_id} is not an equality")
    want_lhs, want_rhs = to_pattern(sides[0]), to_pattern(sides[1])
    if (want_lhs, want_rhs) != (lhs, rhs):
        raise RuleError(
            f"statement mismatch for {record.theorem_id}: "
            f"rule says {render(lhs)} -> {render(rhs)}"
        )
    return rs.extended([Rule(record.theorem_id, lhs, rhs, f"derived:{record.theorem_id}")])
