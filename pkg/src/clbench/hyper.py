"""Hyperatoms, hyperformulas and the finite image of a unit tree.

A politeral unit ``L`` over atom ``P`` becomes the hyperliteral
``(P, A, B)`` where ``A`` holds the numerals the adversary made in ``L`` and
``B`` those made by the counterstrategy; a unit over ``¬P`` becomes
``¬(P, B, A)``.  Opposite units therefore map to opposite hyperliterals.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator, Optional, Sequence

from .budget import DEFAULT, Budget, BudgetExceeded
from .formula import AND, ATOM, COREC, NATOM, OR, REC, Formula
from .game import BOT, TOP

POS = "pos"
NEG = "neg"
HAND = "and"
HOR = "or"


@dataclass(frozen=True, order=True)
class Hyperatom:
    name: str
    a: frozenset = frozenset()
    b: frozenset = frozenset()

    def __str__(self) -> str:
        fmt = lambda s: "{" + ",".join(map(str, sorted(s))) + "}"
        return f"{self.name} {fmt(self.a)} {fmt(self.b)}"


@dataclass(frozen=True)
class Hyperformula:
    kind: str                       # pos | neg | and | or
    atom: Optional[Hyperatom] = None
    children: tuple = ()
    origin: object = None           # UnitRef
    origin_kind: Optional[str] = None  # formula kind of the origin unit

    @property
    def is_literal(self) -> bool:
        return self.kind in (POS, NEG)

    def __str__(self) -> str:
        return to_text(self)


def lit(atom: Hyperatom, positive: bool = True, origin=None, origin_kind=None) -> Hyperformula:
    return Hyperformula(POS if positive else NEG, atom, (), origin, origin_kind)


def hand(*children, origin=None, origin_kind=None) -> Hyperformula:
    return Hyperformula(HAND, None, tuple(children), origin, origin_kind)


def hor(*children, origin=None, origin_kind=None) -> Hyperformula:
    return Hyperformula(HOR, None, tuple(children), origin, origin_kind)


def negate_literal(h: Hyperformula) -> Hyperformula:
    return replace(h, kind=NEG if h.kind == POS else POS)


def opposite(x: Hyperformula, y: Hyperformula) -> bool:
    return x.is_literal and y.is_literal and x.atom == y.atom and x.kind != y.kind


def subformulas(h: Hyperformula) -> Iterator[Hyperformula]:
    """Preorder walk."""
    yield h
    for c in h.children:
        yield from subformulas(c)


def hyperatoms(h: Hyperformula) -> list:
    seen = {}
    for n in subformulas(h):
        if n.is_literal:
            seen.setdefault(n.atom, None)
    return list(seen)


# --- building from trees ---------------------------------------------------

def literal_from_sets(f: Formula, top: frozenset, bot: frozenset,
                      origin=None) -> Hyperformula:
    if f.kind == ATOM:
        return lit(Hyperatom(f.name, top, bot), True, origin, ATOM)
    if f.kind == NATOM:
        return lit(Hyperatom(f.name, bot, top), False, origin, NATOM)
    raise ValueError("not a literal")


def hyperliteral_of(t, unit, run: Sequence) -> Hyperformula:
    """``L°`` for politeral unit ``unit`` of tree ``t`` after ``run``."""
    from .units import move_sets

    top, bot = move_sets(t, run, unit)
    return literal_from_sets(t.subformula(unit), frozenset(top), frozenset(bot), unit)


def synthetic_sets(t, pairing) -> dict:
    """Numeral sets realizing a supplied pairing without a run.

    Matched units share one hyperatom; every other unit gets a private one.
    """
    sets = {}
    fresh = 0
    for pair in sorted(pairing.pairs, key=sorted):
        l, m = sorted(pair, key=lambda u: t.kind(u) != ATOM)
        sets[l] = (frozenset({fresh}), frozenset({fresh + 1}))
        sets[m] = (frozenset({fresh + 1}), frozenset({fresh}))
        fresh += 2
    for u in t.politeral_units:
        if u not in sets:
            sets[u] = (frozenset(), frozenset({fresh}))
            fresh += 1
    return sets


_CONNECTIVE = {AND: HAND, REC: HAND, OR: HOR, COREC: HOR}


def build_hyperformula(t, run: Optional[Sequence] = None, pairing=None,
                       budget: Budget = DEFAULT) -> Hyperformula:
    """Image of tree ``t``: ∧/⫰ units become ∧, ∨/⫯ units ∨, politerals ``L°``.

    Literal content comes from ``run`` when given, otherwise from
    ``pairing`` via :func:`synthetic_sets`.
    """
    from .units import move_sets

    if run is None:
        if pairing is None:
            raise ValueError("need a run or a pairing")
        sets = synthetic_sets(t, pairing.restricted(t))
    else:
        sets = {u: tuple(map(frozenset, move_sets(t, run, u))) for u in t.politeral_units}
    budget.check("nodes", len(t))

    def go(u):
        g = t.subformula(u)
        if g.is_literal:
            return literal_from_sets(g, *sets[u], origin=u)
        kids = tuple(go(c) for c in t.children[u])
        return Hyperformula(_CONNECTIVE[g.kind], None, kids, u, g.kind)

    return go(t.root)


def is_binary(h: Hyperformula) -> bool:
    seen = set()
    for n in subformulas(h):
        if n.is_literal:
            key = (n.atom, n.kind)
            if key in seen:
                return False
            seen.add(key)
    return True


# --- semantics -------------------------------------------------------------

@dataclass(frozen=True)
class Hypermodel:
    values: dict = field(default_factory=dict)
    default: bool = False

    def __call__(self, atom: Hyperatom) -> bool:
        return self.values.get(atom, self.default)


def evaluate(h: Hyperformula, model: Hypermodel) -> bool:
    if h.kind == POS:
        return model(h.atom)
    if h.kind == NEG:
        return not model(h.atom)
    if h.kind == HAND:
        return all(evaluate(c, model) for c in h.children)
    return any(evaluate(c, model) for c in h.children)


def is_tautology(h: Hyperformula, budget: Budget = DEFAULT) -> bool:
    """Truth under every assignment, evaluated column-wise on bitmasks."""
    atoms = hyperatoms(h)
    k = len(atoms)
    if k > budget.atoms:
        raise BudgetExceeded("atoms", budget.atoms)
    rows = 1 << k
    full = (1 << rows) - 1
    column = {}
    for i, a in enumerate(atoms):
        # bit r of the column is the value of atom i in row r
        block = (1 << (1 << i)) - 1
        pattern = block << (1 << i)
        col = 0
        period = 1 << (i + 1)
        for start in range(0, rows, period):
            col |= pattern << start
        column[a] = col & full

    def go(n):
        if n.kind == POS:
            return column[n.atom]
        if n.kind == NEG:
            return full ^ column[n.atom]
        if n.kind == HAND:
            acc = full
            for c in n.children:
                acc &= go(c)
            return acc
        acc = 0
        for c in n.children:
            acc |= go(c)
        return acc

    return go(h) == full


# --- finitization ----------------------------------------------------------

class NotTautologicalError(ValueError):
    pass


def _map_node(h: Hyperformula, target: Hyperformula, new: Hyperformula) -> Hyperformula:
    if h is target:
        return new
    if not h.children:
        return h
    kids = tuple(_map_node(c, target, new) for c in h.children)
    if all(a is b for a, b in zip(kids, h.children)):
        return h
    return replace(h, children=kids)


def finitize(h: Hyperformula, minimize: bool = False,
             budget: Budget = DEFAULT) -> Hyperformula:
    """Finite disjunct selection for a tautological image.

    On a finite truncation every disjunct set is already finite, so the
    default keeps ``h`` as is.  With ``minimize`` the disjuncts of ⫯-origin
    nodes are dropped greedily, in origin order, while tautologicity
    survives; every ⫯-node keeps at least one disjunct and ∨-origin nodes
    keep both.
    """
    if not is_tautology(h, budget):
        raise NotTautologicalError("finitize needs a tautological hyperformula")
    if not minimize:
        return h
    current = h
    order = [n.origin for n in subformulas(h) if n.origin_kind == COREC]
    for origin in order:
        i = 0
        while True:
            node = next((n for n in subformulas(current) if n.origin == origin), None)
            # the node may have gone with an enclosing disjunct
            if node is None or i >= len(node.children) or len(node.children) == 1:
                break
            trial_node = replace(node, children=node.children[:i] + node.children[i + 1:])
            trial = _map_node(current, node, trial_node)
            if is_tautology(trial, budget):
                current = trial
            else:
                i += 1
    return current


def respects_finite_constraints(h: Hyperformula) -> bool:
    """Every ∨ keeps a disjunct; ∨-origin nodes keep both."""
    for n in subformulas(h):
        if n.kind == HOR and not n.children:
            return False
        if n.origin_kind == OR and len(n.children) != 2:
            return False
    return True


def is_disjunct_subtree(small: Hyperformula, big: Hyperformula) -> bool:
    """``small`` arises from ``big`` by deleting disjuncts of ∨-nodes."""
    if small.kind != big.kind or small.atom != big.atom or small.origin != big.origin:
        return False
    if small.kind == HAND or small.is_literal:
        return len(small.children) == len(big.children) and all(
            is_disjunct_subtree(a, b) for a, b in zip(small.children, big.children))
    j = 0
    for c in small.children:
        while j < len(big.children) and not is_disjunct_subtree(c, big.children[j]):
            j += 1
        if j == len(big.children):
            return False
        j += 1
    return True


# --- verdicts --------------------------------------------------------------

def verdict(f: Formula, run: Sequence, model: Hypermodel, height: int,
            budget: Budget = DEFAULT):
    """``TOP`` iff ``model`` makes the untrimmed image of ``run`` true."""
    from .units import build_tree

    t = build_tree(f, height, budget=budget)
    return TOP if evaluate(build_hyperformula(t, run, budget=budget), model) else BOT


# --- text ------------------------------------------------------------------

def to_text(h: Hyperformula, origins: bool = False) -> str:
    tag = f"#{h.origin}" if origins and h.origin is not None else ""
    if h.kind == POS:
        return f"lit {h.atom}{tag}"
    if h.kind == NEG:
        return f"~lit {h.atom}{tag}"
    inner = ", ".join(to_text(c, origins) for c in h.children)
    return f"{h.kind}{tag}({inner})"
