"""CL15 cirquents, the ten rules read bottom-up, and a derivation checker.

Every rule is applied to a conclusion and yields its premise.  The checker
recomputes each premise and compares it with the stored one, with group
order free and check marks ignored.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from .formula import AND, COREC, OR, REC, Formula, negate, parse_formula, render
from .units import UnitRef, parse_unit

MASTER = "MASTER"

RULES = (
    "Exchange",
    "Weakening",
    "Contraction",
    "UndergroupDuplication",
    "OvergroupDuplication",
    "Merging",
    "ConjunctionIntroduction",
    "DisjunctionIntroduction",
    "RecurrenceIntroduction",
    "CorecurrenceIntroduction",
)

# parameter name -> type tag, per rule
_SCHEMA = {
    "Exchange": (("kind", "word"), ("i", "int")),
    "Weakening": (("slot", "int"), ("under", "int")),
    "Contraction": (("slot", "int"),),
    "UndergroupDuplication": (("index", "int"),),
    "OvergroupDuplication": (("index", "int"),),
    "Merging": (("over", "int"), ("left", "set"), ("right", "set")),
    "ConjunctionIntroduction": (("slot", "int"),),
    "DisjunctionIntroduction": (("slot", "int"),),
    "RecurrenceIntroduction": (("slot", "int"), ("label", "annotation")),
    "CorecurrenceIntroduction": (("slot", "int"), ("into", "set")),
}


class RuleError(ValueError):
    """A rule instance that does not apply to the given conclusion."""


@dataclass(frozen=True)
class Slot:
    formula: Formula
    checked: bool = False

    def __str__(self) -> str:
        return ("√" if self.checked else "") + render(self.formula)


@dataclass(frozen=True)
class Cirquent:
    slots: tuple = ()
    undergroups: tuple = ()   # of frozenset
    overgroups: tuple = ()    # of frozenset
    annotations: tuple = ()   # MASTER | UnitRef | None, one per overgroup

    @property
    def formulas(self) -> tuple:
        return tuple(s.formula for s in self.slots)

    def to_text(self) -> str:
        return format_cirquent(self)

    def __str__(self) -> str:
        return format_cirquent(self)


def cirquent(formulas: Sequence, undergroups: Sequence, overgroups: Sequence,
             annotations: Optional[Sequence] = None, checked: Sequence = ()) -> Cirquent:
    slots = tuple(Slot(f, i in set(checked)) for i, f in enumerate(formulas))
    if annotations is None:
        annotations = [None] * len(overgroups)
    return Cirquent(slots, tuple(map(frozenset, undergroups)),
                    tuple(map(frozenset, overgroups)), tuple(annotations))


def initial_cirquent(f: Formula) -> Cirquent:
    return cirquent([f], [{0}], [{0}], [MASTER])


@dataclass(frozen=True)
class RuleInstance:
    name: str
    params: tuple = ()   # ((key, value), ...) in schema order

    @classmethod
    def make(cls, name: str, **kw) -> "RuleInstance":
        if name not in _SCHEMA:
            raise ValueError(f"unknown rule {name!r}")
        keys = [k for k, _ in _SCHEMA[name]]
        if set(kw) != set(keys):
            raise ValueError(f"{name} takes parameters {keys}")
        norm = []
        for k, tag in _SCHEMA[name]:
            v = kw[k]
            norm.append((k, frozenset(v) if tag == "set" else v))
        return cls(name, tuple(norm))

    def __getitem__(self, key):
        return dict(self.params)[key]

    def to_text(self) -> str:
        parts = [self.name] + [f"{k}={_format_value(v)}" for k, v in self.params]
        return "RULE " + " ".join(parts)


def rule(name: str, **kw) -> RuleInstance:
    return RuleInstance.make(name, **kw)


# --- text format -----------------------------------------------------------

def _format_set(s) -> str:
    return "{" + ",".join(map(str, sorted(s))) + "}"


def _format_annotation(a) -> str:
    if a is None:
        return "NONE"
    return str(a)


def _format_value(v) -> str:
    if isinstance(v, frozenset):
        return _format_set(v)
    if isinstance(v, UnitRef) or v is None:
        return _format_annotation(v)
    return str(v)


def format_cirquent(c: Cirquent) -> str:
    slots = "; ".join(map(str, c.slots))
    under = " ".join(_format_set(u) for u in c.undergroups) or "-"
    over = " ".join(f"{_format_set(o)}:{_format_annotation(a)}"
                    for o, a in zip(c.overgroups, c.annotations)) or "-"
    return f"[{slots}] | {under} | {over}"


_SET = re.compile(r"\{([0-9,]*)\}")
_OVER = re.compile(r"\{([0-9,]*)\}:(\S+)")


def _parse_set(text: str) -> frozenset:
    m = _SET.fullmatch(text)
    if not m:
        raise ValueError(f"bad index set {text!r}")
    return frozenset(int(x) for x in m.group(1).split(",") if x)


def _parse_annotation(text: str):
    if text == "NONE":
        return None
    if text == MASTER:
        return MASTER
    return parse_unit(text)


def parse_cirquent(text: str) -> Cirquent:
    text = text.strip()
    if not text.startswith("[") or "]" not in text:
        raise ValueError(f"bad cirquent {text!r}")
    close = text.index("]")
    body, rest = text[1:close], text[close + 1:]
    slots = []
    for item in filter(None, (s.strip() for s in body.split(";"))):
        checked = item.startswith("√")
        slots.append(Slot(parse_formula(item[1:] if checked else item), checked))
    parts = rest.split(" | ")
    if len(parts) != 3 or parts[0] != "":
        raise ValueError(f"bad group section {rest!r}")
    under_text, over_text = parts[1].strip(), parts[2].strip()
    under = [] if under_text == "-" else [_parse_set(u) for u in under_text.split()]
    over, ann = [], []
    if over_text != "-":
        for item in over_text.split():
            m = _OVER.fullmatch(item)
            if not m:
                raise ValueError(f"bad overgroup {item!r}")
            over.append(_parse_set("{" + m.group(1) + "}"))
            ann.append(_parse_annotation(m.group(2)))
    return Cirquent(tuple(slots), tuple(under), tuple(over), tuple(ann))


def parse_rule(text: str) -> RuleInstance:
    parts = text.split()
    if len(parts) < 2 or parts[0] != "RULE" or parts[1] not in _SCHEMA:
        raise ValueError(f"bad rule line {text!r}")
    name = parts[1]
    kw = {}
    for item in parts[2:]:
        k, sep, v = item.partition("=")
        if not sep:
            raise ValueError(f"bad parameter {item!r}")
        kw[k] = v
    tags = dict(_SCHEMA[name])
    if set(kw) != set(tags):
        raise ValueError(f"{name} takes parameters {list(tags)}")
    values = {}
    for k, v in kw.items():
        tag = tags[k]
        if tag == "int":
            if not v.lstrip("-").isdigit():
                raise ValueError(f"parameter {k} must be an integer")
            values[k] = int(v)
        elif tag == "set":
            values[k] = _parse_set(v)
        elif tag == "annotation":
            values[k] = _parse_annotation(v)
        else:
            values[k] = v
    return RuleInstance.make(name, **values)


# --- invariants ------------------------------------------------------------

def violations(c: Cirquent) -> list:
    out = []
    n = len(c.slots)
    if len(c.annotations) != len(c.overgroups):
        out.append("annotation count differs from overgroup count")
    for kind, groups in (("undergroup", c.undergroups), ("overgroup", c.overgroups)):
        for i, g in enumerate(groups):
            if not g:
                out.append(f"empty group: {kind} {i}")
            bad = [k for k in g if not 0 <= k < n]
            if bad:
                out.append(f"invalid index {bad[0]} in {kind} {i}")
    for k in range(n):
        if not any(k in u for u in c.undergroups):
            out.append(f"oformula outside every undergroup: slot {k}")
        if not any(k in o for o in c.overgroups):
            out.append(f"oformula outside every overgroup: slot {k}")
        if c.slots[k].checked and c.slots[k].formula.kind != COREC:
            out.append(f"checked oformula without ⫯: slot {k}")
    for a in c.annotations:
        if not (a is None or a == MASTER or isinstance(a, UnitRef)):
            out.append(f"bad annotation {a!r}")
    return out


def is_axiom(c: Cirquent) -> bool:
    if violations(c):
        return False
    n = len(c.slots)
    for groups in (c.undergroups, c.overgroups):
        count = Counter(k for g in groups for k in g)
        if any(count[k] != 1 for k in range(n)):
            return False
        for g in groups:
            if len(g) != 2:
                return False
            a, b = sorted(g)
            if c.slots[a].formula != negate(c.slots[b].formula):
                return False
    under_of = {k: u for u in c.undergroups for k in u}
    over_of = {k: o for o in c.overgroups for k in o}
    return all(under_of[k] == over_of[k] for k in range(n))


def equivalent(a: Cirquent, b: Cirquent) -> bool:
    """Equal slots in order (marks ignored); groups equal as multisets."""
    return (a.formulas == b.formulas
            and Counter(a.undergroups) == Counter(b.undergroups)
            and Counter(zip(a.overgroups, a.annotations))
            == Counter(zip(b.overgroups, b.annotations)))


def difference(a: Cirquent, b: Cirquent) -> str:
    if a.formulas != b.formulas:
        return "oformulas differ"
    if Counter(a.undergroups) != Counter(b.undergroups):
        return "undergroups differ"
    return "overgroups differ"


# --- rules -----------------------------------------------------------------

def _shift(group: frozenset, at: int, by: int) -> frozenset:
    """Indices >= ``at`` move by ``by``."""
    return frozenset(k + by if k >= at else k for k in group)


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise RuleError(msg)


def _slot_index(c: Cirquent, s) -> int:
    _need(isinstance(s, int) and 0 <= s < len(c.slots), f"slot index {s} out of range")
    return s


def _insert_after(c: Cirquent, s: int, first: Slot, second: Slot, under, over) -> Cirquent:
    """Replace slot ``s`` by ``first, second``; ``under``/``over`` map each old group."""
    slots = c.slots[:s] + (first, second) + c.slots[s + 1:]
    ug = []
    for g in c.undergroups:
        ug.extend(under(_shift(g, s + 1, 1), s in g))
    og = []
    ann = []
    for g, a in zip(c.overgroups, c.annotations):
        for h in over(_shift(g, s + 1, 1), s in g):
            og.append(h)
            ann.append(a)
    return Cirquent(slots, tuple(ug), tuple(og), tuple(ann))


def apply_rule(c: Cirquent, r: RuleInstance) -> Cirquent:
    """The premise from which ``r`` derives conclusion ``c``."""
    p = dict(r.params)
    name = r.name

    if name == "Exchange":
        i, kind = p["i"], p["kind"]
        if kind == "slot":
            _need(0 <= i < len(c.slots) - 1, f"no adjacent slots at {i}")
            swap = {i: i + 1, i + 1: i}
            mv = lambda g: frozenset(swap.get(k, k) for k in g)
            slots = list(c.slots)
            slots[i], slots[i + 1] = slots[i + 1], slots[i]
            return Cirquent(tuple(slots), tuple(map(mv, c.undergroups)),
                            tuple(map(mv, c.overgroups)), c.annotations)
        if kind == "under":
            _need(0 <= i < len(c.undergroups) - 1, f"no adjacent undergroups at {i}")
            ug = list(c.undergroups)
            ug[i], ug[i + 1] = ug[i + 1], ug[i]
            return replace(c, undergroups=tuple(ug))
        if kind == "over":
            _need(0 <= i < len(c.overgroups) - 1, f"no adjacent overgroups at {i}")
            og, ann = list(c.overgroups), list(c.annotations)
            og[i], og[i + 1] = og[i + 1], og[i]
            ann[i], ann[i + 1] = ann[i + 1], ann[i]
            return replace(c, overgroups=tuple(og), annotations=tuple(ann))
        raise RuleError(f"unknown exchange kind {kind!r}")

    if name == "Weakening":
        s, u = _slot_index(c, p["slot"]), p["under"]
        _need(0 <= u < len(c.undergroups), f"undergroup index {u} out of range")
        _need(s in c.undergroups[u], f"slot {s} is not in undergroup {u}")
        _need(len(c.undergroups[u]) > 1, "weakening would empty the undergroup")
        ug = list(c.undergroups)
        ug[u] = ug[u] - {s}
        if any(s in g for g in ug):
            return replace(c, undergroups=tuple(ug))
        # the slot has left every undergroup: it disappears entirely
        drop = lambda g: _shift(g - {s}, s + 1, -1)
        og, ann = [], []
        for g, a in zip(c.overgroups, c.annotations):
            g2 = drop(g)
            if g2:
                og.append(g2)
                ann.append(a)
        return Cirquent(c.slots[:s] + c.slots[s + 1:], tuple(map(drop, ug)),
                        tuple(og), tuple(ann))

    if name == "Contraction":
        s = _slot_index(c, p["slot"])
        _need(c.slots[s].formula.kind == COREC, "contraction needs a ⫯ oformula")
        both = lambda g, hit: [g | {s + 1} if hit else g]
        return _insert_after(c, s, c.slots[s], c.slots[s], both, both)

    if name in ("UndergroupDuplication", "OvergroupDuplication"):
        i = p["index"]
        groups = c.undergroups if name[0] == "U" else c.overgroups
        _need(0 <= i < len(groups) - 1, f"no adjacent groups at {i}")
        _need(groups[i] == groups[i + 1], f"groups {i} and {i + 1} differ")
        if name[0] == "U":
            return replace(c, undergroups=c.undergroups[:i + 1] + c.undergroups[i + 2:])
        return replace(c, overgroups=c.overgroups[:i + 1] + c.overgroups[i + 2:],
                       annotations=c.annotations[:i + 1] + c.annotations[i + 2:])

    if name == "Merging":
        o, left, right = p["over"], p["left"], p["right"]
        _need(0 <= o < len(c.overgroups), f"overgroup index {o} out of range")
        _need(bool(left) and bool(right), "merging parts must be nonempty")
        _need(left | right == c.overgroups[o], "merging parts must cover the overgroup")
        a = c.annotations[o]
        return replace(c, overgroups=c.overgroups[:o] + (left, right) + c.overgroups[o + 1:],
                       annotations=c.annotations[:o] + (a, a) + c.annotations[o + 1:])

    if name in ("ConjunctionIntroduction", "DisjunctionIntroduction"):
        s = _slot_index(c, p["slot"])
        f = c.slots[s].formula
        want = AND if name[0] == "C" else OR
        _need(f.kind == want, f"{name} needs a {want} oformula")
        e, g = (Slot(x) for x in f.children)
        both = lambda grp, hit: [grp | {s + 1} if hit else grp]
        if want == AND:
            split = lambda grp, hit: [grp, (grp - {s}) | {s + 1}] if hit else [grp]
            return _insert_after(c, s, e, g, split, both)
        return _insert_after(c, s, e, g, both, both)

    if name == "RecurrenceIntroduction":
        s = _slot_index(c, p["slot"])
        f = c.slots[s].formula
        _need(f.kind == REC, "recurrence introduction needs a ⫰ oformula")
        slots = c.slots[:s] + (Slot(f.children[0]),) + c.slots[s + 1:]
        return Cirquent(slots, c.undergroups, c.overgroups + (frozenset({s}),),
                        c.annotations + (p["label"],))

    if name == "CorecurrenceIntroduction":
        s = _slot_index(c, p["slot"])
        f = c.slots[s].formula
        _need(f.kind == COREC, "corecurrence introduction needs a ⫯ oformula")
        into = p["into"]
        _need(all(0 <= j < len(c.overgroups) for j in into), "overgroup index out of range")
        _need(all(s not in c.overgroups[j] for j in into),
              "target overgroup already contains the slot")
        slots = c.slots[:s] + (Slot(f.children[0]),) + c.slots[s + 1:]
        og = tuple(g | {s} if j in into else g for j, g in enumerate(c.overgroups))
        return replace(c, slots=slots, overgroups=og)

    raise RuleError(f"unknown rule {name!r}")


# --- derivations -----------------------------------------------------------

@dataclass(frozen=True)
class Derivation:
    """``cirquents[0]`` is the premise end; ``rules[i]`` derives
    ``cirquents[i+1]`` from ``cirquents[i]``."""

    cirquents: tuple
    rules: tuple = ()
    formula: Optional[Formula] = None

    def __post_init__(self):
        if len(self.cirquents) != len(self.rules) + 1:
            raise ValueError("a derivation needs one more cirquent than rules")

    @property
    def premise(self) -> Cirquent:
        return self.cirquents[0]

    @property
    def conclusion(self) -> Cirquent:
        return self.cirquents[-1]

    def __len__(self) -> int:
        return len(self.rules)

    def then(self, upper: "Derivation") -> "Derivation":
        """Stack ``self`` on top of ``upper``: self's conclusion is upper's premise."""
        if not equivalent(self.conclusion, upper.premise):
            raise ValueError("derivations do not meet")
        return Derivation(self.cirquents + upper.cirquents[1:], self.rules + upper.rules,
                          self.formula or upper.formula)

    def to_text(self) -> str:
        lines = []
        if self.formula is not None:
            lines.append(f"FORMULA {render(self.formula)}")
        lines.append(f"CIRQUENT {format_cirquent(self.cirquents[0])}")
        for r, c in zip(self.rules, self.cirquents[1:]):
            lines.append(r.to_text())
            lines.append(f"CIRQUENT {format_cirquent(c)}")
        return "\n".join(lines) + "\n"


def derive_upward(conclusion: Cirquent, rules: Sequence) -> Derivation:
    """Apply ``rules`` bottom-up from ``conclusion``; returned premise first."""
    chain = [conclusion]
    for r in rules:
        chain.append(apply_rule(chain[-1], r))
    return Derivation(tuple(reversed(chain)), tuple(reversed(rules)))


def parse_derivation(text: str) -> Derivation:
    formula = None
    cirqs, rules = [], []
    expect_cirquent = True
    for n, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        head, _, rest = line.partition(" ")
        if head == "FORMULA":
            if cirqs or formula is not None:
                raise ValueError(f"line {n}: FORMULA must come first")
            formula = parse_formula(rest)
        elif head == "CIRQUENT":
            if not expect_cirquent:
                raise ValueError(f"line {n}: expected a RULE line")
            cirqs.append(parse_cirquent(rest))
            expect_cirquent = False
        elif head == "RULE":
            if expect_cirquent:
                raise ValueError(f"line {n}: expected a CIRQUENT line")
            rules.append(parse_rule(line))
            expect_cirquent = True
        else:
            raise ValueError(f"line {n}: unknown record {head!r}")
    if not cirqs or expect_cirquent:
        raise ValueError("derivation must start and end with a cirquent")
    return Derivation(tuple(cirqs), tuple(rules), formula)


@dataclass(frozen=True)
class Violation:
    step: Optional[int]   # 1-based rule index, None for endpoint problems
    message: str

    def __str__(self) -> str:
        where = "endpoints" if self.step is None else f"step {self.step}"
        return f"{where}: {self.message}"


def check_step(premise: Cirquent, conclusion: Cirquent, r: RuleInstance) -> Optional[str]:
    """``None`` when ``r`` derives ``conclusion`` from ``premise``, else a reason."""
    for who, c in (("premise", premise), ("conclusion", conclusion)):
        bad = violations(c)
        if bad:
            return f"{who}: {bad[0]}"
    try:
        expected = apply_rule(conclusion, r)
    except RuleError as e:
        return f"{r.name} not applicable: {e}"
    if not equivalent(expected, premise):
        return f"{r.name} mismatch: {difference(expected, premise)}"
    return None


def check_derivation(d: Derivation, premise: Optional[Cirquent] = None,
                     conclusion: Optional[Cirquent] = None) -> Optional[Violation]:
    if premise is not None and not equivalent(d.premise, premise):
        return Violation(None, "premise end differs")
    if conclusion is not None and not equivalent(d.conclusion, conclusion):
        return Violation(None, "conclusion end differs")
    if not d.rules:
        bad = violations(d.premise)
        return Violation(None, bad[0]) if bad else None
    for i, r in enumerate(d.rules):
        reason = check_step(d.cirquents[i], d.cirquents[i + 1], r)
        if reason:
            return Violation(i + 1, reason)
    return None


def check_proof(d: Derivation, f: Optional[Formula] = None) -> Optional[Violation]:
    f = f if f is not None else d.formula
    if f is None:
        return Violation(None, "no formula given")
    if d.formula is not None and d.formula != f:
        return Violation(None, "proof is for a different formula")
    if not is_axiom(d.premise):
        return Violation(None, "premise end is not an axiom")
    return check_derivation(d, conclusion=initial_cirquent(f))
