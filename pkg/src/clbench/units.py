"""Truncated unit trees and the structural relations on them: trimming by
resolutions, driving, strict driving, opposition, visibility and domination.

A tree of height ``h`` keeps one node per length-``h`` branch string below
every ⫰/⫯ node; each such string stands for the class of infinite branches
extending it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .budget import DEFAULT, Budget
from .formula import (
    AND,
    ATOM,
    COREC,
    LITERAL,
    MODAL,
    NATOM,
    OR,
    REC,
    Formula,
    format_path,
    modal_depth,
    parse_path,
    subformula_at,
)
from .game import (
    BOT,
    TOP,
    active_funits,
    address_text,
    format_strings,
    funit_address,
    Funit,
    numerals,
    parse_strings,
    prefix_at,
    project,
)


@dataclass(frozen=True, order=True)
class UnitRef:
    position: tuple
    branches: tuple = ()

    @property
    def bitstrings(self) -> tuple:
        return self.branches

    def __str__(self) -> str:
        return f"{format_path(self.position)}@{format_strings(self.branches)}"


def parse_unit(text: str) -> UnitRef:
    path, sep, strings = text.strip().partition("@")
    if not sep:
        raise ValueError(f"unit {text!r} lacks '@'")
    return UnitRef(parse_path(path), parse_strings(strings))


def _words(h: int) -> list:
    return ["".join(b) for b in itertools.product("01", repeat=h)]


# --- resolutions -----------------------------------------------------------

@dataclass(frozen=True)
class Resolution:
    """Chosen branch for some ⫰-units; absent units are unresolved."""

    choices: tuple = ()  # sorted ((UnitRef, bits), ...)

    @classmethod
    def of(cls, mapping=None) -> "Resolution":
        return cls(tuple(sorted((mapping or {}).items())))

    @property
    def mapping(self) -> dict:
        return dict(self.choices)

    def get(self, u: UnitRef) -> Optional[str]:
        return self.mapping.get(u)

    def __len__(self) -> int:
        return len(self.choices)

    def extends(self, other: "Resolution") -> bool:
        mine = self.mapping
        return all(mine.get(u) == w for u, w in other.choices)

    def consistent(self, other: "Resolution") -> bool:
        mine = self.mapping
        return all(mine.get(u, w) == w for u, w in other.choices)

    def union(self, other: "Resolution") -> "Resolution":
        if not self.consistent(other):
            raise ValueError("inconsistent resolutions")
        return Resolution.of({**self.mapping, **other.mapping})

    def to_text(self) -> str:
        return "".join(f"RESOLVE {u} {w or 'e'}\n" for u, w in self.choices)


TRIVIAL = Resolution()


def parse_resolution(text: str) -> Resolution:
    mapping = {}
    for line in text.splitlines():
        parts = line.split()
        if not parts or parts[0] != "RESOLVE":
            continue
        if len(parts) != 3:
            raise ValueError(f"bad RESOLVE line {line!r}")
        bits = "" if parts[2] == "e" else parts[2]
        mapping[parse_unit(parts[1])] = bits
    return Resolution.of(mapping)


# --- trees -----------------------------------------------------------------

@dataclass
class TruncUnitTree:
    formula: Formula
    height: int
    resolution: Resolution
    nodes: list
    children: dict
    _cache: dict = field(default_factory=dict, repr=False)

    def __contains__(self, u) -> bool:
        return u in self.children

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def root(self) -> UnitRef:
        return UnitRef((), ())

    def subformula(self, u: UnitRef) -> Formula:
        return subformula_at(self.formula, u.position)

    def kind(self, u: UnitRef) -> str:
        return self.subformula(u).kind

    def parent(self, u: UnitRef) -> Optional[UnitRef]:
        if not u.position:
            return None
        up = u.position[:-1]
        if subformula_at(self.formula, up).kind in MODAL:
            return UnitRef(up, u.branches[:-1])
        return UnitRef(up, u.branches)

    def ancestors(self, u: UnitRef) -> tuple:
        """``u`` followed by its proper superunits, bottom-up."""
        key = ("anc", u)
        if key not in self._cache:
            out = [u]
            while (p := self.parent(out[-1])) is not None:
                out.append(p)
            self._cache[key] = tuple(out)
        return self._cache[key]

    def is_subunit(self, a: UnitRef, b: UnitRef) -> bool:
        """Whether ``a`` is a (not necessarily proper) subunit of ``b``."""
        return b in self.ancestors(a)

    def is_proper_subunit(self, a: UnitRef, b: UnitRef) -> bool:
        return a != b and self.is_subunit(a, b)

    def descendants(self, u: UnitRef) -> list:
        out, stack = [], [u]
        while stack:
            x = stack.pop()
            out.append(x)
            stack.extend(self.children[x])
        return out

    def units_of(self, *kinds) -> list:
        return [u for u in self.nodes if self.kind(u) in kinds]

    @property
    def politeral_units(self) -> list:
        return self.units_of(ATOM, NATOM)

    @property
    def rec_units(self) -> list:
        return self.units_of(REC)

    def is_total(self) -> bool:
        return all(self.resolution.get(u) is not None for u in self.rec_units)

    def require(self, *units) -> None:
        for u in units:
            if u not in self.children:
                raise KeyError(f"unit {u} is not in the tree")

    def address(self, u: UnitRef) -> str:
        return address_text(funit_address(self.formula, u))

    # --- relations -------------------------------------------------------

    def smallest_common_superunit(self, a: UnitRef, b: UnitRef) -> UnitRef:
        self.require(a, b)
        above_a = set(self.ancestors(a))
        for x in self.ancestors(b):
            if x in above_a:
                return x
        raise AssertionError("units without a common root")

    def _between(self, e: UnitRef, h: UnitRef):
        """Proper superunits of ``e`` that are subunits of ``h``."""
        for x in self.ancestors(e)[1:]:
            if not self.is_subunit(x, h):
                break
            yield x

    def drives(self, e: UnitRef, g: UnitRef) -> Optional[UnitRef]:
        """The unit through which ``e`` drives ``g``, or ``None``."""
        key = ("drv", e, g)
        if key not in self._cache:
            h = self.smallest_common_superunit(e, g)
            ok = all(self.kind(x) != COREC for x in self._between(e, h))
            self._cache[key] = h if ok else None
        return self._cache[key]

    def strictly_drives(self, r: Resolution, e: UnitRef, g: UnitRef) -> bool:
        h = self.drives(e, g)
        if h is None:
            return False
        for x in self._between(e, h):
            if self.kind(x) == REC:
                chosen = r.get(x)
                if chosen is None or e.branches[len(x.branches)] != chosen:
                    return False
        return True


def build_tree(f: Formula, h: int, r: Resolution = TRIVIAL,
               budget: Budget = DEFAULT) -> TruncUnitTree:
    if h < 0:
        raise ValueError("height must be non-negative")
    for u, w in r.choices:
        if subformula_at(f, u.position).kind != REC:
            raise ValueError(f"resolution key {u} is not a ⫰-unit")
        if len(w) != h or len(u.branches) != modal_depth(f, u.position) \
                or any(len(b) != h for b in u.branches):
            raise ValueError(f"resolution entry {u} -> {w!r} does not fit height {h}")
    chosen = r.mapping
    words = _words(h)
    nodes, children = [], {}
    stack = [UnitRef((), ())]
    while stack:
        u = stack.pop()
        nodes.append(u)
        budget.check("nodes", len(nodes))
        g = subformula_at(f, u.position)
        if g.kind in (AND, OR):
            kids = [UnitRef(u.position + (i,), u.branches) for i in (0, 1)]
        elif g.kind in MODAL:
            pick = chosen.get(u) if g.kind == REC else None
            branch_set = [pick] if pick is not None else words
            kids = [UnitRef(u.position + (0,), u.branches + (w,)) for w in branch_set]
        else:
            kids = []
        children[u] = tuple(kids)
        stack.extend(reversed(kids))
    return TruncUnitTree(f, h, r, nodes, children)


def smallest_common_superunit(t: TruncUnitTree, a: UnitRef, b: UnitRef) -> UnitRef:
    return t.smallest_common_superunit(a, b)


def drives(t: TruncUnitTree, e: UnitRef, g: UnitRef) -> Optional[UnitRef]:
    t.require(e, g)
    return t.drives(e, g)


def strictly_drives(t: TruncUnitTree, r: Resolution, e: UnitRef, g: UnitRef) -> bool:
    t.require(e, g)
    return t.strictly_drives(r, e, g)


# --- opposition ------------------------------------------------------------

@dataclass(frozen=True)
class OppositionPairing:
    """A symmetric opposition relation on politeral units."""

    pairs: frozenset = frozenset()  # of frozenset({L, M})
    provenance: str = "supplied"

    @classmethod
    def from_pairs(cls, pairs: Iterable, provenance: str = "supplied") -> "OppositionPairing":
        return cls(frozenset(frozenset(p) for p in pairs), provenance)

    def partners(self, u: UnitRef) -> set:
        return {v for p in self.pairs if u in p for v in p if v != u}

    def is_matching(self) -> bool:
        seen = set()
        for p in self.pairs:
            for u in p:
                if u in seen:
                    return False
                seen.add(u)
        return True

    def opposite(self, u: UnitRef) -> Optional[UnitRef]:
        ps = self.partners(u)
        if len(ps) > 1:
            raise ValueError(f"{u} has {len(ps)} opposites")
        return next(iter(ps), None)

    def restricted(self, t: TruncUnitTree) -> "OppositionPairing":
        return OppositionPairing(
            frozenset(p for p in self.pairs if all(u in t for u in p)), self.provenance)

    def validate(self, f: Formula) -> None:
        """Shape checks for supplied pairings: literal-negation origins, a matching."""
        for p in self.pairs:
            if len(p) != 2:
                raise ValueError("a unit cannot be opposite to itself")
            a, b = sorted(p)
            fa, fb = subformula_at(f, a.position), subformula_at(f, b.position)
            if not (fa.is_literal and fb.is_literal and fa.name == fb.name
                    and fa.kind != fb.kind):
                raise ValueError(f"{a} and {b} do not have opposite origins")
        if not self.is_matching():
            raise ValueError("pairing is not a matching")

    def to_text(self) -> str:
        return "".join(
            "PAIR {} {}\n".format(*sorted(p)) for p in sorted(self.pairs, key=sorted))


def parse_pairing(text: str) -> OppositionPairing:
    pairs = []
    for line in text.splitlines():
        parts = line.split()
        if not parts or parts[0] != "PAIR":
            continue
        if len(parts) != 3:
            raise ValueError(f"bad PAIR line {line!r}")
        pairs.append((parse_unit(parts[1]), parse_unit(parts[2])))
    return OppositionPairing.from_pairs(pairs, "supplied")


def move_sets(t: TruncUnitTree, run: Sequence, u: UnitRef) -> tuple:
    """``(⊤ numerals, ⊥ numerals)`` in the projection of ``run`` on ``u``."""
    proj = project(run, t.formula, u)
    return numerals(proj, TOP), numerals(proj, BOT)


def opposite_pairs(t: TruncUnitTree, run: Sequence) -> OppositionPairing:
    """Opposition computed from a finite run.

    Both label sets must mirror each other and each side must carry at least
    one counterstrategy numeral, otherwise two silent units would match.
    """
    sets = {u: move_sets(t, run, u) for u in t.politeral_units}
    pos = [u for u in sets if t.kind(u) == ATOM]
    neg = [u for u in sets if t.kind(u) == NATOM]
    pairs = []
    for l in pos:
        tl, bl = sets[l]
        if not bl:
            continue
        for m in neg:
            if t.subformula(m).name != t.subformula(l).name:
                continue
            tm, bm = sets[m]
            if bm and tl == bm and bl == tm:
                pairs.append((l, m))
    return OppositionPairing.from_pairs(pairs, "computed-from-run")


# --- visibility ------------------------------------------------------------

def untrimmed(t: TruncUnitTree) -> TruncUnitTree:
    if not t.resolution.choices:
        return t
    key = ("untrimmed",)
    if key not in t._cache:
        t._cache[key] = build_tree(t.formula, t.height)
    return t._cache[key]


def visible(t: TruncUnitTree, r: Resolution, pairing: OppositionPairing,
            e: UnitRef, g: UnitRef) -> bool:
    """Strict driving, possibly relayed through a chain of opposite pairs.

    Chains may pass through units that ``r`` trims away, so the search runs
    on the untrimmed truncation; ``r`` enters only through strict driving.
    """
    t.require(e, g)
    t = untrimmed(t)
    if t.strictly_drives(r, e, g):
        return True
    pairing = pairing.restricted(t)
    heads = [u for u in t.politeral_units if pairing.partners(u)]
    seen = set()
    frontier = [e]
    while frontier:
        nxt = []
        for src in frontier:
            for head in heads:
                if not t.strictly_drives(r, src, head):
                    continue
                for tail in pairing.partners(head):
                    if tail in seen:
                        continue
                    seen.add(tail)
                    if t.strictly_drives(r, tail, g):
                        return True
                    nxt.append(tail)
        frontier = nxt
    return False


def visibility_chains(t: TruncUnitTree, r: Resolution, pairing: OppositionPairing,
                      max_pairs: int) -> list:
    """All visibility chains ``[L1, M1, ..., Ln, Mn]`` with ``n <= max_pairs``."""
    t = untrimmed(t)
    pairing = pairing.restricted(t)
    heads = [u for u in t.politeral_units if pairing.partners(u)]
    out = []
    partial = [[l, m] for l in heads for m in sorted(pairing.partners(l))]
    for _ in range(max_pairs):
        out.extend(partial)
        grown = []
        for chain in partial:
            for l in heads:
                if t.strictly_drives(r, chain[-1], l):
                    for m in sorted(pairing.partners(l)):
                        grown.append(chain + [l, m])
        partial = grown
    return out


# --- domination ------------------------------------------------------------

@dataclass(frozen=True)
class Domination:
    dominator: UnitRef
    dominated: UnitRef
    chain: tuple = ()  # ((L, M, X), ...); empty for the proper-subunit case

    @property
    def by_subunit(self) -> bool:
        return not self.chain


def dominates(t: TruncUnitTree, pairing: OppositionPairing, e: UnitRef, g: UnitRef,
              budget: Budget = DEFAULT) -> Optional[Domination]:
    """A witness that ⫰-unit ``e`` dominates ``g`` in ``t``, or ``None``.

    Chains are searched depth first.  The M-units of a chain are pairwise
    distinct (a repeated M would drive a later L), which bounds the depth.
    """
    t.require(e, g)
    if t.kind(e) != REC:
        raise ValueError(f"{e} is not a ⫰-unit")
    key = ("dom", pairing, e, g)
    if key in t._cache:
        return t._cache[key]
    if t.is_proper_subunit(g, e):
        result = Domination(e, g)
    else:
        result = _chain_search(t, pairing.restricted(t), e, g, budget)
    t._cache[key] = result
    return result


def _chain_search(t, pairing, e, g, budget):
    matched = [u for u in t.politeral_units if pairing.partners(u)]
    steps = [0]

    def extend(chain):
        steps[0] += 1
        budget.check("chain", steps[0])
        m = chain[-1][1]
        earlier = [c[1] for c in chain[:-1]]
        x = t.drives(m, g)
        if x is not None:
            # earlier M-units never drive g, or the search would have stopped there
            return tuple((l, mm, xx) for l, mm, xx in chain[:-1]) + ((chain[-1][0], m, x),)
        used = {c[1] for c in chain}
        for l in matched:
            x = t.drives(m, l)
            if x is None or any(t.drives(p, l) is not None for p in earlier):
                continue
            for m2 in sorted(pairing.partners(l)):
                if m2 in used or t.is_subunit(m2, e):
                    continue
                found = extend(chain[:-1] + [(chain[-1][0], m, x), (l, m2, None)])
                if found:
                    return found
        return None

    for l in matched:
        if not t.is_subunit(l, e):
            continue
        for m in sorted(pairing.partners(l)):
            if t.is_subunit(m, e):
                continue
            found = extend([(l, m, None)])
            if found:
                return Domination(e, g, found)
    return None


def is_domination_chain(t: TruncUnitTree, pairing: OppositionPairing, e: UnitRef,
                        g: UnitRef, chain: Sequence) -> bool:
    """Direct check of the five chain conditions, independent of the search."""
    if not chain:
        return False
    ls = [c[0] for c in chain] + [g]
    ms = [c[1] for c in chain]
    n = len(chain)
    for i, (l, m, x) in enumerate(chain):
        if m not in pairing.partners(l) or t.kind(l) not in LITERAL:
            return False
        if l not in t or m not in t:
            return False
        if t.drives(m, ls[i + 1]) != x:
            return False
        if any(t.drives(m, ls[j]) is not None for j in range(i + 2, n + 1)):
            return False
        if t.is_subunit(m, e):
            return False
    return t.is_subunit(ls[0], e)


@dataclass(frozen=True)
class AuditReport:
    root_undominated: bool
    asymmetric: bool
    transitive: bool
    relation: frozenset = frozenset()  # {(⫰-unit, unit)}

    @property
    def ok(self) -> bool:
        return self.root_undominated and self.asymmetric and self.transitive


def domination_relation(t: TruncUnitTree, pairing: OppositionPairing,
                        targets: Optional[Iterable] = None,
                        budget: Budget = DEFAULT) -> frozenset:
    targets = list(t.nodes if targets is None else targets)
    return frozenset(
        (e, g) for e in t.rec_units for g in targets
        if dominates(t, pairing, e, g, budget) is not None)


def audit_resolution(t: TruncUnitTree, pairing: OppositionPairing,
                     budget: Budget = DEFAULT) -> AuditReport:
    if not t.is_total():
        raise ValueError("audit needs a total resolution")
    rel = domination_relation(t, pairing, budget=budget)
    recs = t.rec_units
    root_ok = not any((e, t.root) in rel for e in recs)
    asym = not any((e, g) in rel and (g, e) in rel for e in recs for g in recs)
    trans = all(
        (e, h) in rel
        for e, g in rel if t.kind(g) == REC
        for g2, h in rel if g2 == g)
    return AuditReport(root_ok, asym, trans, rel)


# --- resolution search -----------------------------------------------------

def total_resolutions(f: Formula, h: int, budget: Budget = DEFAULT):
    """Trees of the total resolutions, in lexicographic order of (unit address, branch)."""
    count = [0]
    words = _words(h)

    def go(assign):
        t = build_tree(f, h, Resolution.of(assign), budget)
        pending = sorted((u for u in t.rec_units if u not in assign), key=t.address)
        if not pending:
            count[0] += 1
            budget.check("candidates", count[0])
            yield t
            return
        u = pending[0]
        for w in words:
            yield from go({**assign, u: w})

    yield from go({})


@dataclass
class SearchOutcome:
    found: Optional[tuple]  # (Resolution, OppositionPairing)
    tried: int = 0
    tautological: int = 0
    audited_ok: int = 0


def search_total_resolution(f: Formula, h: int, run: Optional[Sequence] = None,
                            pairing: Optional[OppositionPairing] = None,
                            budget: Budget = DEFAULT) -> SearchOutcome:
    from .hyper import build_hyperformula, is_tautology

    full = build_tree(f, h, TRIVIAL, budget)
    if pairing is None:
        pairing = opposite_pairs(full, run or ())
    out = SearchOutcome(None)
    for t in total_resolutions(f, h, budget):
        out.tried += 1
        local = pairing.restricted(t)
        hf = build_hyperformula(t, run, local)
        if not is_tautology(hf, budget):
            continue
        out.tautological += 1
        if not audit_resolution(t, local, budget).ok:
            continue
        out.audited_ok += 1
        out.found = (t.resolution, local)
        return out
    return out


def find_total_resolution(f: Formula, h: int, run: Optional[Sequence] = None,
                          pairing: Optional[OppositionPairing] = None,
                          budget: Budget = DEFAULT) -> Optional[tuple]:
    return search_total_resolution(f, h, run, pairing, budget).found


# --- maturity --------------------------------------------------------------

def active_height(f: Formula, run: Sequence, m: Optional[int]) -> int:
    return max((u.height for u in active_funits(f, prefix_at(run, m))), default=0)


def restrict_at(f: Formula, e: UnitRef, run: Sequence, m: Optional[int]) -> Funit:
    """Regular funital restriction of ``e`` at the greatest active height by cycle ``m``."""
    if not e.branches:
        return Funit(e.position, ())
    hm = active_height(f, run, m)
    if any(len(b) < hm for b in e.branches):
        raise ValueError(f"{e} is truncated below height {hm}")
    return Funit(e.position, tuple(b[:hm] for b in e.branches))


def incomparable(t: TruncUnitTree, a: UnitRef, b: UnitRef) -> bool:
    return not (t.is_subunit(a, b) or t.is_subunit(b, a))


def dm_incomparable(f: Formula, a: UnitRef, b: UnitRef, run: Sequence,
                    m: Optional[int]) -> bool:
    x = funit_address(f, restrict_at(f, a, run, m))
    y = funit_address(f, restrict_at(f, b, run, m))
    n = min(len(x), len(y))
    return x[:n] != y[:n]


def mature(t: TruncUnitTree, chain: Sequence, run: Sequence, m: Optional[int]) -> bool:
    ms = [c[1] for c in chain]
    for mi, mj in itertools.product(ms, repeat=2):
        for hi in t.ancestors(mi):
            for hj in t.ancestors(mj):
                if incomparable(t, hi, hj) and \
                        not dm_incomparable(t.formula, hi, hj, run, m):
                    return False
    return True
