"""Addressed moves, runs, funits and prompts, plus the counterstrategy that
plays fresh numerals in every prompt and the scheduler that runs it against
an adversary.

Runs are tuples of :class:`Labmove`.  Unless said otherwise a run is the one
*cospelled* by the counterstrategy: its own moves carry the label ``B`` (⊥)
and the adversary's moves carry ``T`` (⊤).
"""
from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .budget import DEFAULT, Budget
from .formula import (
    BINARY,
    MODAL,
    Formula,
    format_path,
    modal_depth,
    parse_path,
    politerals,
    subformula_at,
)


class Player(enum.Enum):
    TOP = "T"
    BOT = "B"

    def flip(self) -> "Player":
        return Player.BOT if self is Player.TOP else Player.TOP

    def __str__(self) -> str:
        return self.value


TOP, BOT = Player.TOP, Player.BOT

_BITS = re.compile(r"[01]*\Z")


@dataclass(frozen=True)
class Move:
    blocks: tuple
    numeral: int

    def __post_init__(self):
        if self.numeral < 0:
            raise ValueError("numerals are natural numbers")
        for b in self.blocks:
            if not _BITS.match(b):
                raise ValueError(f"block {b!r} is not a bitstring")

    def __str__(self) -> str:
        return "".join(b + "." for b in self.blocks) + str(self.numeral)


def parse_move(text: str) -> Move:
    *blocks, numeral = text.strip().split(".")
    if not numeral.isdigit() or (len(numeral) > 1 and numeral[0] == "0"):
        raise ValueError(f"move {text!r} does not end in a decimal numeral")
    return Move(tuple(blocks), int(numeral))


@dataclass(frozen=True)
class Labmove:
    player: Player
    move: Move
    cycle: Optional[int] = None

    def flipped(self) -> "Labmove":
        return Labmove(self.player.flip(), self.move, self.cycle)

    def __str__(self) -> str:
        tail = f" @{self.cycle}" if self.cycle is not None else ""
        return f"{self.player} {self.move}{tail}"


def flip_run(run: Iterable[Labmove]) -> tuple:
    return tuple(lm.flipped() for lm in run)


def prefix_at(run: Sequence[Labmove], m: Optional[int]) -> tuple:
    """The moves made at cycles not exceeding ``m`` (all of them for ``None``)."""
    if m is None:
        return tuple(run)
    return tuple(lm for lm in run if lm.cycle is not None and lm.cycle <= m)


def format_transcript(run: Iterable[Labmove]) -> str:
    return "".join(f"{lm}\n" for lm in run)


def parse_transcript(text: str) -> tuple:
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        m = re.fullmatch(r"([TB]) (\S+)(?: @(\d+))?", line)
        if not m:
            raise ValueError(f"line {lineno}: bad labmove {line!r}")
        cycle = int(m.group(3)) if m.group(3) is not None else None
        out.append(Labmove(Player(m.group(1)), parse_move(m.group(2)), cycle))
    return tuple(out)


# --- funits ----------------------------------------------------------------

def format_strings(strings: Sequence[str]) -> str:
    return ",".join(s or "e" for s in strings)


def parse_strings(text: str) -> tuple:
    if not text:
        return ()
    out = tuple("" if s == "e" else s for s in text.split(","))
    for s in out:
        if not _BITS.match(s):
            raise ValueError(f"bad bitstring {s!r}")
    return out


@dataclass(frozen=True)
class Funit:
    """An osubformula position with one finite bitstring per modal ancestor."""

    position: tuple
    bitstrings: tuple = ()

    @property
    def height(self) -> int:
        return max((len(w) for w in self.bitstrings), default=0)

    @property
    def regular(self) -> bool:
        return len({len(w) for w in self.bitstrings}) <= 1

    def __str__(self) -> str:
        return f"{format_path(self.position)}@{format_strings(self.bitstrings)}"


def parse_funit(text: str) -> Funit:
    path, sep, strings = text.partition("@")
    if not sep:
        raise ValueError(f"unit {text!r} lacks '@'")
    return Funit(parse_path(path), parse_strings(strings))


def funit_address(f: Formula, u) -> tuple:
    """Address of a funit (or unit reference) as a tuple of blocks."""
    strings = tuple(u.bitstrings)
    if len(strings) != modal_depth(f, u.position):
        raise ValueError(
            f"{len(strings)} bitstrings for modal depth {modal_depth(f, u.position)}")
    blocks = []
    node = f
    it = iter(strings)
    for i in u.position:
        if node.kind in BINARY:
            blocks.append(str(i))
        else:
            blocks.append(next(it))
        node = node.children[i]
    return tuple(blocks)


def address_text(blocks: Sequence[str]) -> str:
    return "".join(b + "." for b in blocks)


def locate(f: Formula, blocks: Sequence[str]) -> Optional[Funit]:
    """The funit whose address is ``blocks``, if any."""
    node = f
    position, strings = [], []
    for b in blocks:
        if node.kind in BINARY:
            if b not in ("0", "1"):
                return None
            position.append(int(b))
            node = node.children[int(b)]
        elif node.kind in MODAL:
            if not _BITS.match(b):
                return None
            position.append(0)
            strings.append(b)
            node = node.children[0]
        else:
            return None
    return Funit(tuple(position), tuple(strings))


def legal_move(f: Formula, m: Move) -> bool:
    u = locate(f, m.blocks)
    return u is not None and subformula_at(f, u.position).is_literal


def _ancestors(f: Formula, u: Funit):
    depth = 0
    node = f
    yield Funit((), ())
    for k, i in enumerate(u.position):
        if node.kind in MODAL:
            depth += 1
        node = node.children[i]
        yield Funit(u.position[:k + 1], u.bitstrings[:depth])


def active_funits(f: Formula, run: Iterable[Labmove]) -> set:
    """Funits hosting a move of ``run`` somewhere in their subtree."""
    out = set()
    for lm in run:
        if not legal_move(f, lm.move):
            raise ValueError(f"illegal move {lm.move} in run")
        out.update(_ancestors(f, locate(f, lm.move.blocks)))
    return out


def _sort_key(f: Formula):
    # byte order '.' < '0' < '1' matches ASCII
    return lambda u: address_text(funit_address(f, u))


def prompts(f: Formula, run: Iterable[Labmove] = (), budget: Budget = DEFAULT) -> list:
    active = active_funits(f, run)
    h = max((u.height for u in active), default=-1) + 1
    out = []
    for p in politerals(f):
        d = modal_depth(f, p)
        if d == 0:
            out.append(Funit(p, ()))
            continue
        budget.check("moves", len(out) + 2 ** (h * d))
        words = ["".join(bits) for bits in itertools.product("01", repeat=h)]
        for combo in itertools.product(words, repeat=d):
            out.append(Funit(p, combo))
    return sorted(out, key=_sort_key(f))


def _walk_target(f: Formula, target):
    strings = tuple(target.bitstrings)
    if len(strings) != modal_depth(f, target.position):
        raise ValueError("target has the wrong number of bitstrings")
    subformula_at(f, target.position)
    node = f
    it = iter(strings)
    for i in target.position:
        if node.kind in BINARY:
            yield node.kind, str(i)
        else:
            yield node.kind, next(it)
        node = node.children[i]


def project(run: Iterable[Labmove], f: Formula, target=None) -> tuple:
    """Projection of ``run`` on a funit or unit reference.

    Below a ∧/∨ node a move survives iff its next block is the child's bit;
    below a ⫰/⫯ node with branch ``y`` it survives iff its next block is a
    prefix of ``y``.  Surviving moves lose the consumed blocks.
    """
    moves = list(run)
    if target is None:
        return tuple(moves)
    for kind, want in _walk_target(f, target):
        kept = []
        for lm in moves:
            if not lm.move.blocks:
                continue
            head, rest = lm.move.blocks[0], lm.move.blocks[1:]
            ok = head == want if kind in BINARY else want.startswith(head)
            if ok:
                kept.append(Labmove(lm.player, Move(rest, lm.move.numeral), lm.cycle))
        moves = kept
    return tuple(moves)


def numerals(run: Iterable[Labmove], player: Player) -> frozenset:
    return frozenset(lm.move.numeral for lm in run if lm.player is player)


def made_in(run: Sequence[Labmove], player: Player, numeral: int, u: Funit,
            f: Formula, m: Optional[int] = None) -> bool:
    """Whether ``player`` numerically made ``numeral`` inside funit ``u`` by cycle ``m``."""
    addr = funit_address(f, u)
    n = len(addr)
    return any(
        lm.player is player and lm.move.numeral == numeral and lm.move.blocks[:n] == addr
        for lm in prefix_at(run, m))


# --- adversaries ---------------------------------------------------------------

class IllegalMoveError(ValueError):
    def __init__(self, move, run):
        super().__init__(f"adversary made an illegal move {move}")
        self.move = move
        self.run = run


class StopPlay(Exception):
    """Raised by an adversary to end the play early."""


class Silent:
    def __call__(self, position):
        return []


@dataclass
class Scripted:
    """Replays fixed batches of moves, one batch per permission grant."""

    batches: list
    _k: int = field(default=0, init=False)

    def __call__(self, position):
        batch = self.batches[self._k] if self._k < len(self.batches) else []
        self._k += 1
        return list(batch)

    @classmethod
    def from_transcript(cls, f: Formula, run: Sequence[Labmove]) -> "Scripted":
        return cls([batch for _, batch in split_passes(f, run)])


def split_passes(f: Formula, run: Sequence[Labmove]) -> list:
    """Cut a cospelled run into ``(counterstrategy moves, adversary batch)`` per pass.

    Pass boundaries are recovered by recounting the prompts at the start of
    each pass, since a pass with an empty reply leaves no trace in the labels.
    """
    passes = []
    i = 0
    run = list(run)
    while i < len(run):
        n = len(prompts(f, run[:i]))
        ours = run[i:i + n]
        if len(ours) < n or any(lm.player is not BOT for lm in ours):
            raise ValueError(f"labmove {i}: run is not a counterstrategy play")
        i += n
        batch = []
        while i < len(run) and run[i].player is TOP:
            batch.append(run[i].move)
            i += 1
        passes.append((ours, batch))
    return passes


def default_pairing(f: Formula) -> dict:
    """Involutive pairing of politeral positions: each ``P`` occurrence with the
    next unused ``~P`` occurrence, left to right."""
    lits = [(p, subformula_at(f, p)) for p in politerals(f)]
    pairing = {}
    for p, g in lits:
        if g.kind != "atom" or p in pairing:
            continue
        for q, h in lits:
            if h.kind == "natom" and h.name == g.name and q not in pairing:
                pairing[p] = q
                pairing[q] = p
                break
    return pairing


class Copycat:
    """Mirrors every counterstrategy move across a politeral pairing.

    On each grant the whole backlog of mirrored moves is returned, oldest
    first.
    """

    def __init__(self, f: Formula, pairing: Optional[dict] = None):
        self.f = f
        self.pairing = dict(default_pairing(f) if pairing is None else pairing)
        self._seen = 0

    def mirror(self, move: Move) -> Optional[Move]:
        u = locate(self.f, move.blocks)
        partner = self.pairing.get(u.position)
        if partner is None:
            return None
        d = modal_depth(self.f, partner)
        strings = (u.bitstrings + ("",) * d)[:d]
        return Move(funit_address(self.f, Funit(partner, strings)), move.numeral)

    def __call__(self, position):
        fresh = position[self._seen:]
        self._seen = len(position)
        out = []
        for lm in fresh:
            if lm.player is BOT:
                copy = self.mirror(lm.move)
                if copy is not None:
                    out.append(copy)
        return out


class Interactive:
    """Operator-driven adversary: one move or ``pass`` per grant, ``quit`` stops."""

    def __init__(self, f: Formula, read: Callable[[str], str] = input,
                 write: Callable[[str], None] = print):
        self.f = f
        self.read = read
        self.write = write

    def __call__(self, position):
        while True:
            try:
                line = self.read("move> ").strip()
            except EOFError:
                raise StopPlay()
            if line == "pass":
                return []
            if line == "quit":
                raise StopPlay()
            try:
                move = parse_move(line)
            except ValueError as e:
                self.write(f"parse error: {e}")
                continue
            if not legal_move(self.f, move):
                self.write(f"illegal move {move}")
                continue
            return [move]


def _as_moves(reply) -> list:
    if reply is None:
        return []
    if isinstance(reply, Move):
        return [reply]
    return list(reply)


@dataclass
class Play:
    run: tuple
    grants: int
    stopped: bool = False


def play(f: Formula, adversary, iterations: int, budget: Budget = DEFAULT) -> Play:
    """Run ``iterations`` passes of the counterstrategy routine.

    Each pass lists the prompts of the position reached at its start, plays
    the least numeral not yet used by either side in each of them, then
    grants the adversary one step.
    """
    if iterations < 0:
        raise ValueError("iterations must be non-negative")
    run = []
    used = set()
    grants = 0
    clock = itertools.count(1)

    def add(player, move):
        run.append(Labmove(player, move, next(clock)))
        used.add(move.numeral)
        budget.check("moves", len(run))

    for _ in range(iterations):
        for u in prompts(f, run, budget):
            a = next(n for n in itertools.count() if n not in used)
            add(BOT, Move(funit_address(f, u), a))
        grants += 1
        try:
            reply = _as_moves(adversary(tuple(run)))
        except StopPlay:
            return Play(tuple(run), grants, stopped=True)
        for move in reply:
            if not legal_move(f, move):
                raise IllegalMoveError(move, tuple(run))
            add(TOP, move)
    return Play(tuple(run), grants)


def run_counterstrategy(f: Formula, adversary, iterations: int,
                        budget: Budget = DEFAULT) -> tuple:
    return play(f, adversary, iterations, budget).run


def play_match(f: Formula, adversary, iterations: int, budget: Budget = DEFAULT):
    """Both views of one play: ``(spelled by the counterstrategy, spelled by the adversary)``.

    The adversary's view is the cospelled run; the counterstrategy sees the
    same moves with labels reversed.
    """
    omega = run_counterstrategy(f, adversary, iterations, budget)
    return flip_run(omega), omega


def pass_end_cycles(f: Formula, run: Sequence[Labmove]) -> list:
    """Cycle of the last labmove of each pass, adversary reply included."""
    ends = []
    for ours, batch in split_passes(f, run):
        last = ours[-1].cycle
        if batch:
            last += len(batch)
        ends.append(last)
    return ends
