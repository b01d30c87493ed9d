"""Term language of the TRC combinator calculus.

Terms are built from variables, the four constants ``Abst``, ``Eq``, ``P1``,
``P2``, declared (defined) names, binary application, the constant-function
former ``k(t)`` and the pairing former ``<s,t>``.  There are no binders:
variables are free metavariables, so substitution is capture-free by
construction.

Concrete syntax::

    term  := app ; app := atom | app atom
    atom  := 'Abst' | 'Eq' | 'P1' | 'P2' | IDENT
           | 'k' '(' term ')' | '<' term ',' term '>' | '(' term ')'
    IDENT := [a-zA-Z_][a-zA-Z0-9_']*   (keywords excluded)

Application associates left (``x y z`` reads ``(x y) z``).  Lowercase
identifiers are variables; identifiers starting with an uppercase letter are
declared names.  In rule and hypothesis syntax, ``$name`` is a pattern
variable, lexically distinct from object variables.  ``--`` starts a comment
running to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Union


class TrcError(Exception):
    """Base class for errors raised by this package."""


class ParseError(TrcError):
    def __init__(self, message: str, line: int, col: int, expected: tuple[str, ...] = ()):
        self.line = line
        self.col = col
        self.expected = expected
        detail = f"{line}:{col}: {message}"
        if expected:
            detail += " (expected one of: " + ", ".join(expected) + ")"
        super().__init__(detail)


class PositionError(TrcError):
    def __init__(self, selector: str, at: tuple[str, ...]):
        self.selector = selector
        self.at = at
        super().__init__(f"invalid position: selector {selector!r} fails at {format_position(at)}")


# ---------------------------------------------------------------------------
# Term nodes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Defined:
    name: str


@dataclass(frozen=True)
class PatVar:
    """Pattern variable; only appears in rule/hypothesis patterns."""

    name: str  # includes the leading '$'


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True)
class KWrap:
    body: "Term"


@dataclass(frozen=True)
class Pair:
    left: "Term"
    right: "Term"


Term = Union[Var, Const, Defined, PatVar, App, KWrap, Pair]

ABST = Const("Abst")
EQ = Const("Eq")
P1 = Const("P1")
P2 = Const("P2")

KEYWORDS = {"Abst", "Eq", "P1", "P2", "k"}
CONSTANTS = {"Abst": ABST, "Eq": EQ, "P1": P1, "P2": P2}

# Position selectors, in child order.
FN = "function"
ARG = "argument"
KBODY = "k-body"
LEFT = "pair-left"
RIGHT = "pair-right"

Position = tuple[str, ...]
Subst = Mapping[str, Term]

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")


def app(fn: Term, *args: Term) -> Term:
    """Left-associated application of ``fn`` to ``args``."""
    t = fn
    for a in args:
        t = App(t, a)
    return t


def children(t: Term) -> tuple[tuple[str, Term], ...]:
    if isinstance(t, App):
        return ((FN, t.fn), (ARG, t.arg))
    if isinstance(t, KWrap):
        return ((KBODY, t.body),)
    if isinstance(t, Pair):
        return ((LEFT, t.left), (RIGHT, t.right))
    return ()


def subterms(t: Term) -> Iterator[tuple[Position, Term]]:
    """All (position, subterm) pairs in leftmost-outermost (preorder) order."""
    stack: list[tuple[Position, Term]] = [((), t)]
    while stack:
        pos, sub = stack.pop()
        yield pos, sub
        for sel, child in reversed(children(sub)):
            stack.append((pos + (sel,), child))


def navigate(t: Term, pos: Position) -> Term:
    """Subterm of ``t`` at ``pos``; raises PositionError on the first bad selector."""
    cur = t
    for i, sel in enumerate(pos):
        for s, child in children(cur):
            if s == sel:
                cur = child
                break
        else:
            raise PositionError(sel, pos[:i])
    return cur


def replace_at(t: Term, pos: Position, s: Term) -> Term:
    """``t`` with exactly the subterm at ``pos`` replaced by ``s``."""
    if not pos:
        return s
    sel = pos[0]
    if isinstance(t, App) and sel == FN:
        return App(replace_at(t.fn, pos[1:], s), t.arg)
    if isinstance(t, App) and sel == ARG:
        return App(t.fn, replace_at(t.arg, pos[1:], s))
    if isinstance(t, KWrap) and sel == KBODY:
        return KWrap(replace_at(t.body, pos[1:], s))
    if isinstance(t, Pair) and sel == LEFT:
        return Pair(replace_at(t.left, pos[1:], s), t.right)
    if isinstance(t, Pair) and sel == RIGHT:
        return Pair(t.left, replace_at(t.right, pos[1:], s))
    raise PositionError(sel, ())


def format_position(pos: Position) -> str:
    return ".".join(pos) if pos else "root"


def term_size(t: Term) -> int:
    return 1 + sum(term_size(c) for _, c in children(t))


def free_vars(t: Term) -> set[str]:
    """Names of object variables occurring in ``t``."""
    out: set[str] = set()
    for _, sub in subterms(t):
        if isinstance(sub, Var):
            out.add(sub.name)
    return out


def pattern_vars(t: Term) -> set[str]:
    out: set[str] = set()
    for _, sub in subterms(t):
        if isinstance(sub, PatVar):
            out.add(sub.name)
    return out


def defined_names(t: Term) -> set[str]:
    out: set[str] = set()
    for _, sub in subterms(t):
        if isinstance(sub, Defined):
            out.add(sub.name)
    return out


def is_closed(t: Term) -> bool:
    return not free_vars(t) and not pattern_vars(t)


def fresh_var(avoid: set[str], scheme: str = "v") -> str:
    """First name of the fixed scheme v0, v1, ... not in ``avoid``."""
    i = 0
    while f"{scheme}{i}" in avoid:
        i += 1
    return f"{scheme}{i}"


def substitute(t: Term, subst: Subst) -> Term:
    """Simultaneous replacement of bound variable / pattern-variable names."""
    if isinstance(t, Var) or isinstance(t, PatVar):
        return subst.get(t.name, t)
    if isinstance(t, App):
        return App(substitute(t.fn, subst), substitute(t.arg, subst))
    if isinstance(t, KWrap):
        return KWrap(substitute(t.body, subst))
    if isinstance(t, Pair):
        return Pair(substitute(t.left, subst), substitute(t.right, subst))
    return t


def match_pattern(pattern: Term, t: Term) -> Optional[dict[str, Term]]:
    """First-order match of ``pattern`` against ``t``.

    Pattern variables bind subterms; repeated pattern variables must match
    syntactically identical subterms.  Everything else (including object
    variables) matches literally.  Returns the binding map, or None.
    """
    bindings: dict[str, Term] = {}
    stack = [(pattern, t)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, PatVar):
            seen = bindings.get(p.name)
            if seen is None:
                bindings[p.name] = s
            elif seen != s:
                return None
        elif type(p) is not type(s):
            return None
        elif isinstance(p, (Var, Const, Defined)):
            if p.name != s.name:  # type: ignore[union-attr]
                return None
        elif isinstance(p, App):
            stack.append((p.fn, s.fn))  # type: ignore[union-attr]
            stack.append((p.arg, s.arg))  # type: ignore[union-attr]
        elif isinstance(p, KWrap):
            stack.append((p.body, s.body))  # type: ignore[union-attr]
        elif isinstance(p, Pair):
            stack.append((p.left, s.left))  # type: ignore[union-attr]
            stack.append((p.right, s.right))  # type: ignore[union-attr]
    return bindings


def to_pattern(t: Term) -> Term:
    """Copy of ``t`` with every object variable turned into a pattern variable."""
    if isinstance(t, Var):
        return PatVar("$" + t.name)
    if isinstance(t, App):
        return App(to_pattern(t.fn), to_pattern(t.arg))
    if isinstance(t, KWrap):
        return KWrap(to_pattern(t.body))
    if isinstance(t, Pair):
        return Pair(to_pattern(t.left), to_pattern(t.right))
    return t


def replace_defined(t: Term, mapping: Mapping[str, Term]) -> Term:
    """Replace declared-name occurrences by terms (one level, no recursion)."""
    if isinstance(t, Defined):
        return mapping.get(t.name, t)
    if isinstance(t, App):
        return App(replace_defined(t.fn, mapping), replace_defined(t.arg, mapping))
    if isinstance(t, KWrap):
        return KWrap(replace_defined(t.body, mapping))
    if isinstance(t, Pair):
        return Pair(replace_defined(t.left, mapping), replace_defined(t.right, mapping))
    return t


def expand_defined(t: Term, defs: Mapping[str, Term], _active: frozenset[str] = frozenset()) -> Term:
    """Recursively unfold every defined name bound in ``defs``."""
    if isinstance(t, Defined) and t.name in defs:
        if t.name in _active:
            raise TrcError(f"cyclic definition of {t.name}")
        return expand_defined(defs[t.name], defs, _active | {t.name})
    if isinstance(t, App):
        return App(expand_defined(t.fn, defs, _active), expand_defined(t.arg, defs, _active))
    if isinstance(t, KWrap):
        return KWrap(expand_defined(t.body, defs, _active))
    if isinstance(t, Pair):
        return Pair(expand_defined(t.left, defs, _active), expand_defined(t.right, defs, _active))
    return t


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def render(t: Term) -> str:
    """Canonical text with minimal parentheses; parse(render(t)) == t."""
    if isinstance(t, (Var, Const, Defined)):
        return t.name
    if isinstance(t, PatVar):
        return t.name
    if isinstance(t, KWrap):
        return f"k({render(t.body)})"
    if isinstance(t, Pair):
        return f"<{render(t.left)},{render(t.right)}>"
    if isinstance(t, App):
        fn = render(t.fn)  # left-associated: function side never needs parens
        arg = render(t.arg)
        if isinstance(t.arg, App):
            arg = f"({arg})"
        return f"{fn} {arg}"
    raise TypeError(f"not a term: {t!r}")


def render_judgement_side(t: Term) -> str:
    return render(t)


# ---------------------------------------------------------------------------
# Lexer (shared by the term grammar and the proof-script grammar)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str  # WORD, PATVAR, STRING, EOF, or the punctuation text itself
    text: str
    line: int
    col: int


_PUNCT2 = (":=", "!=", "=>")
_PUNCT1 = "()<>,[]{}:;=|"
_WORD_RE = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_.'-]*")


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("--", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        two = text[i : i + 2]
        if two in _PUNCT2:
            toks.append(Token(two, two, line, col))
            i += 2
            col += 2
            continue
        if ch in _PUNCT1:
            toks.append(Token(ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch == '"':
            j = i + 1
            while j < n and text[j] != '"':
                if text[j] == "\n":
                    raise ParseError("unterminated string", line, col)
                j += 1
            if j >= n:
                raise ParseError("unterminated string", line, col)
            toks.append(Token("STRING", text[i + 1 : j], line, col))
            col += j + 1 - i
            i = j + 1
            continue
        if ch == "$":
            m = _WORD_RE.match(text, i + 1)
            if not m:
                raise ParseError("'$' must introduce a pattern variable", line, col)
            toks.append(Token("PATVAR", "$" + m.group(0), line, col))
            col += 1 + len(m.group(0))
            i = m.end()
            continue
        m = _WORD_RE.match(text, i)
        if m:
            toks.append(Token("WORD", m.group(0), line, col))
            col += len(m.group(0))
            i = m.end()
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    toks.append(Token("EOF", "", line, col))
    return toks


class TokenStream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "EOF":
            self.i += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"got {tok.text or tok.kind!r}", tok.line, tok.col, (kind,))
        return self.next()

    def at_word(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "WORD" and tok.text == text

    def expect_word(self, text: str) -> Token:
        tok = self.peek()
        if not self.at_word(text):
            raise ParseError(f"got {tok.text or tok.kind!r}", tok.line, tok.col, (text,))
        return self.next()


_ATOM_STARTERS = ("WORD", "PATVAR", "(", "<")


def _classify_ident(name: str, tok: Token) -> Term:
    if not _IDENT_RE.fullmatch(name):
        raise ParseError(f"{name!r} is not a valid identifier", tok.line, tok.col)
    if name[0].isupper():
        return Defined(name)
    return Var(name)


def parse_atom(ts: TokenStream, pattern: bool) -> Term:
    tok = ts.peek()
    if tok.kind == "WORD":
        if tok.text == "k":
            ts.next()
            ts.expect("(")
            body = parse_term_tokens(ts, pattern)
            ts.expect(")")
            return KWrap(body)
        if tok.text in CONSTANTS:
            ts.next()
            return CONSTANTS[tok.text]
        ts.next()
        return _classify_ident(tok.text, tok)
    if tok.kind == "PATVAR":
        if not pattern:
            raise ParseError("pattern variables are only allowed in patterns", tok.line, tok.col)
        ts.next()
        return PatVar(tok.text)
    if tok.kind == "(":
        ts.next()
        t = parse_term_tokens(ts, pattern)
        ts.expect(")")
        return t
    if tok.kind == "<":
        ts.next()
        left = parse_term_tokens(ts, pattern)
        ts.expect(",")
        right = parse_term_tokens(ts, pattern)
        ts.expect(">")
        return Pair(left, right)
    raise ParseError(
        f"got {tok.text or tok.kind!r}", tok.line, tok.col,
        ("identifier", "k(", "<", "("),
    )


def parse_term_tokens(
    ts: TokenStream, pattern: bool = False, reserved: frozenset[str] = frozenset()
) -> Term:
    """Parse one term; WORD tokens in ``reserved`` end the term (script keywords)."""
    def stopped() -> bool:
        tok = ts.peek()
        return tok.kind == "WORD" and tok.text in reserved

    if stopped():
        tok = ts.peek()
        raise ParseError(f"expected a term, got keyword {tok.text!r}", tok.line, tok.col)
    t = parse_atom(ts, pattern)
    while ts.peek().kind in _ATOM_STARTERS and not stopped():
        t = App(t, parse_atom(ts, pattern))
    return t


def parse(text: str, *, pattern: bool = False) -> Term:
    """Parse a single term; raises ParseError with line/column on bad input."""
    ts = TokenStream(tokenize(text))
    t = parse_term_tokens(ts, pattern)
    tok = ts.peek()
    if tok.kind != "EOF":
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.col, ("end of input",))
    return t


def parse_pattern(text: str) -> Term:
    return parse(text, pattern=True)
