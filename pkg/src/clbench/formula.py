"""Formulas of the recurrence fragment: literals, parallel ∧/∨, branching
recurrence ``!`` (⫰) and branching corecurrence ``?`` (⫯).

Negation is kept in literal normal form; a ``~`` over a compound formula is
pushed down on input by DeMorgan and the ``!``/``?`` duality.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Optional

ATOM = "atom"
NATOM = "natom"
AND = "and"
OR = "or"
REC = "rec"      # ⫰
COREC = "corec"  # ⫯

BINARY = (AND, OR)
MODAL = (REC, COREC)
LITERAL = (ATOM, NATOM)

Position = tuple  # tuple[int, ...]


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at column {pos}: {text!r}")
        self.text = text
        self.pos = pos


@dataclass(frozen=True)
class Formula:
    kind: str
    children: tuple = ()
    name: Optional[str] = None

    def __post_init__(self):
        if self.kind in LITERAL:
            if self.children or not self.name:
                raise ValueError("literal needs a name and no children")
        elif self.kind in BINARY:
            if len(self.children) != 2:
                raise ValueError(f"{self.kind} needs exactly two children")
        elif self.kind in MODAL:
            if len(self.children) != 1:
                raise ValueError(f"{self.kind} needs exactly one child")
        else:
            raise ValueError(f"unknown formula kind {self.kind!r}")

    @property
    def is_literal(self) -> bool:
        return self.kind in LITERAL

    def __str__(self) -> str:
        return render(self)


def atom(name: str) -> Formula:
    return Formula(ATOM, (), name)


def natom(name: str) -> Formula:
    return Formula(NATOM, (), name)


def conj(a: Formula, b: Formula) -> Formula:
    return Formula(AND, (a, b))


def disj(a: Formula, b: Formula) -> Formula:
    return Formula(OR, (a, b))


def rec(a: Formula) -> Formula:
    return Formula(REC, (a,))


def corec(a: Formula) -> Formula:
    return Formula(COREC, (a,))


_DUAL = {ATOM: NATOM, NATOM: ATOM, AND: OR, OR: AND, REC: COREC, COREC: REC}


def negate(f: Formula) -> Formula:
    """Literal-normal-form negation of ``f``."""
    if f.is_literal:
        return Formula(_DUAL[f.kind], (), f.name)
    return Formula(_DUAL[f.kind], tuple(negate(c) for c in f.children))


# --- parsing ---------------------------------------------------------------

_ALIASES = {"¬": "~", "∧": "&", "∨": "|", "⫰": "!", "⫯": "?"}
_TOKEN = re.compile(r"\s*(?:([A-Z][A-Za-z0-9_]*)|([~!?&|()]))")


def _tokenize(text: str):
    norm = "".join(_ALIASES.get(ch, ch) for ch in text)
    pos = 0
    tokens = []
    while pos < len(norm):
        if norm[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(norm, pos)
        if not m:
            raise FormulaSyntaxError("unexpected character", text, pos)
        start = m.start(1) if m.group(1) else m.start(2)
        tokens.append((m.group(1) or m.group(2), start))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def where(self) -> int:
        return self.tokens[self.i][1] if self.i < len(self.tokens) else len(self.text)

    def take(self):
        tok = self.tokens[self.i][0]
        self.i += 1
        return tok

    def parse(self) -> Formula:
        if not self.tokens:
            raise FormulaSyntaxError("empty formula", self.text, 0)
        f = self.disjunction()
        if self.peek() is not None:
            raise FormulaSyntaxError(f"unexpected {self.peek()!r}", self.text, self.where())
        return f

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek() == "|":
            self.take()
            f = disj(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = conj(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if tok is None:
            raise FormulaSyntaxError("unexpected end of input", self.text, self.where())
        if tok == "~":
            self.take()
            return negate(self.unary())
        if tok == "!":
            self.take()
            return rec(self.unary())
        if tok == "?":
            self.take()
            return corec(self.unary())
        if tok == "(":
            self.take()
            f = self.disjunction()
            if self.peek() != ")":
                raise FormulaSyntaxError("expected ')'", self.text, self.where())
            self.take()
            return f
        if tok[0].isalpha():
            self.take()
            return atom(tok)
        raise FormulaSyntaxError(f"unexpected {tok!r}", self.text, self.where())


def parse_formula(text: str) -> Formula:
    return _Parser(text).parse()


# --- rendering -------------------------------------------------------------

_PREC = {OR: 1, AND: 2}
_OP = {OR: " | ", AND: " & "}
_PREFIX = {REC: "!", COREC: "?"}


def render(f: Formula) -> str:
    if f.kind == ATOM:
        return f.name
    if f.kind == NATOM:
        return "~" + f.name
    if f.kind in MODAL:
        child = f.children[0]
        inner = render(child)
        if child.kind in BINARY:
            inner = f"({inner})"
        return _PREFIX[f.kind] + inner
    left, right = f.children
    prec = _PREC[f.kind]
    ls, rs = render(left), render(right)
    # binary operators associate to the left
    if left.kind in BINARY and _PREC[left.kind] < prec:
        ls = f"({ls})"
    if right.kind in BINARY and _PREC[right.kind] <= prec:
        rs = f"({rs})"
    return ls + _OP[f.kind] + rs


# --- positions -------------------------------------------------------------

def subformula_at(f: Formula, p: Position) -> Formula:
    node = f
    for step, i in enumerate(p):
        if not 0 <= i < len(node.children):
            raise IndexError(f"path {tuple(p)} leaves the formula at step {step}")
        node = node.children[i]
    return node


def walk(f: Formula, prefix: Position = ()) -> Iterator[tuple]:
    """Preorder ``(position, subformula)`` pairs."""
    yield prefix, f
    for i, c in enumerate(f.children):
        yield from walk(c, prefix + (i,))


def politerals(f: Formula) -> list:
    return [p for p, g in walk(f) if g.is_literal]


def modal_depth(f: Formula, p: Position) -> int:
    node = f
    depth = 0
    for step, i in enumerate(p):
        if not 0 <= i < len(node.children):
            raise IndexError(f"path {tuple(p)} leaves the formula at step {step}")
        if node.kind in MODAL:
            depth += 1
        node = node.children[i]
    return depth


def atoms(f: Formula) -> set:
    return {g.name for _, g in walk(f) if g.is_literal}


def format_path(p: Position) -> str:
    return "".join(str(i) for i in p) or "e"


def parse_path(text: str) -> Position:
    if text == "e":
        return ()
    if not text or not set(text) <= {"0", "1"}:
        raise ValueError(f"bad position {text!r}")
    return tuple(int(c) for c in text)
