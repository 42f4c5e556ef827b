"""Bottom-up proof construction: procedure Derivation (Stages 1-4) from the
initial cirquent down to a literal cirquent, then the endgame down to an
axiom.  Every slot carries an image, a node of the finitized hyperformula.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from .budget import DEFAULT, Budget
from .cirquent import (
    MASTER,
    Cirquent,
    Derivation,
    Slot,
    apply_rule,
    check_proof,
    derive_upward,
    format_cirquent,
    initial_cirquent,
    is_axiom,
    rule,
)
from .formula import AND, COREC, OR, REC, Formula, subformula_at
from .hyper import (
    HAND,
    HOR,
    Hyperformula,
    build_hyperformula,
    finitize,
    is_binary,
    is_tautology,
    opposite,
    subformulas,
)
from .units import (
    OppositionPairing,
    Resolution,
    UnitRef,
    build_tree,
    dominates,
    opposite_pairs,
    search_total_resolution,
)


class PipelineError(RuntimeError):
    """A stage failed for a reason other than non-tautologicity."""

    def __init__(self, stage: str, message: str, cirquent: Optional[Cirquent] = None):
        super().__init__(f"{stage}: {message}")
        self.stage = stage
        self.message = message
        self.cirquent = cirquent


@dataclass(frozen=True)
class DominationOracle:
    relation: frozenset = frozenset()   # {(⫰-unit, unit)}

    @classmethod
    def from_tree(cls, t, pairing, f4: Hyperformula, budget: Budget = DEFAULT):
        """Domination restricted to units that are origins of ``f4`` nodes."""
        origins = {n.origin for n in subformulas(f4)}
        rel = frozenset(
            (e, g) for e in t.rec_units if e in origins
            for g in t.nodes if g in origins
            if dominates(t, pairing, e, g, budget) is not None)
        return cls(rel)

    def dominates(self, e: UnitRef, g: UnitRef) -> bool:
        return (e, g) in self.relation

    def dominators(self, g: UnitRef) -> set:
        return {e for e, x in self.relation if x == g}


@dataclass(frozen=True)
class TraceStep:
    stage: int
    rule: object            # RuleInstance, or "mark" for check-marking only
    cirquent: Cirquent      # the premise reached by this step
    images: tuple

    def to_text(self) -> str:
        what = self.rule if isinstance(self.rule, str) else self.rule.to_text()[5:]
        imgs = ", ".join(str(i.origin) for i in self.images)
        return (f"stage {self.stage}: {what}\n  {format_cirquent(self.cirquent)}\n"
                f"  images: {imgs}")


@dataclass
class FirstPhase:
    derivation: Derivation   # premise: the literal cirquent; conclusion: the initial one
    cirquent: Cirquent
    images: tuple            # slot index -> F4 node
    trace: list = field(default_factory=list)


class _Builder:
    """Grows a derivation downward, from conclusion towards premise."""

    def __init__(self, start: Cirquent, images: Sequence):
        self.chain = [start]
        self.rules = []
        self.images = list(images)
        self.trace = []

    @property
    def c(self) -> Cirquent:
        return self.chain[-1]

    def step(self, stage: int, r, images=None) -> None:
        self.chain.append(apply_rule(self.c, r))
        self.rules.append(r)
        if images is not None:
            self.images = list(images)
        self.trace.append(TraceStep(stage, r, self.c, tuple(self.images)))

    def mark(self, stage: int, slots, images) -> None:
        """Check-mark slots in place; marks are metadata, not a rule step."""
        new = list(self.c.slots)
        for s in slots:
            new[s] = Slot(new[s].formula, True)
        self.chain[-1] = replace(self.c, slots=tuple(new))
        self.images = list(images)
        self.trace.append(TraceStep(stage, "mark", self.c, tuple(self.images)))

    def derivation(self, formula=None) -> Derivation:
        return Derivation(tuple(reversed(self.chain)), tuple(reversed(self.rules)), formula)


# --- procedure Derivation --------------------------------------------------

def _stage1(b: _Builder) -> bool:
    for s, slot in enumerate(b.c.slots):
        kind = slot.formula.kind
        if kind in (AND, OR):
            img = b.images[s]
            want = HAND if kind == AND else HOR
            if img.kind != want or len(img.children) != 2:
                raise PipelineError("stages", f"slot {s} has image {img.kind} "
                                    f"with {len(img.children)} children", b.c)
            name = "ConjunctionIntroduction" if kind == AND else "DisjunctionIntroduction"
            b.step(1, rule(name, slot=s), b.images[:s] + list(img.children) + b.images[s + 1:])
            return True
    return False


def _stage2(b: _Builder) -> bool:
    for s, slot in enumerate(b.c.slots):
        if slot.formula.kind == REC:
            img = b.images[s]
            if img.kind != HAND or len(img.children) != 1:
                raise PipelineError("stages", f"⫰ slot {s} needs an image ∧{{α}}", b.c)
            b.step(2, rule("RecurrenceIntroduction", slot=s, label=img.origin),
                   b.images[:s] + [img.children[0]] + b.images[s + 1:])
            return True
    return False


def _stage3(b: _Builder) -> bool:
    for s, slot in enumerate(b.c.slots):
        if slot.formula.kind == COREC and not slot.checked:
            img = b.images[s]
            n = len(img.children)
            if img.kind != HOR or n == 0:
                raise PipelineError("stages", f"⫯ slot {s} needs an image ∨{{α1..αn}}", b.c)
            images = b.images[:s] + list(img.children) + b.images[s + 1:]
            for k in range(n - 1):
                b.step(3, rule("Contraction", slot=s),
                       b.images[:s + 1] + [img] + b.images[s + 1:])
            b.mark(3, range(s, s + n), images)
            return True
    return False


def _labels(c: Cirquent) -> dict:
    """Labeling unit -> index of the first overgroup carrying it."""
    out = {}
    for j, a in enumerate(c.annotations):
        if isinstance(a, UnitRef):
            out.setdefault(a, j)
    return out


def _stage4(b: _Builder, dom: DominationOracle) -> bool:
    labels = _labels(b.c)
    for s, slot in enumerate(b.c.slots):
        if not slot.checked:
            continue
        target = b.images[s].origin
        doms = dom.dominators(target)
        if not all(e in labels for e in doms):
            continue
        into = {labels[e] for e in doms if s not in b.c.overgroups[labels[e]]}
        b.step(4, rule("CorecurrenceIntroduction", slot=s, into=into))
        return True
    return False


def run_first(f: Formula, f4: Hyperformula, dom: DominationOracle,
              sweep_cap: Optional[int] = None) -> FirstPhase:
    """Stages 1-4 until a whole sweep changes nothing."""
    b = _Builder(initial_cirquent(f), [f4])
    cap = sweep_cap if sweep_cap is not None else 4 * sum(1 for _ in subformulas(f4)) + 8
    sweeps = 0
    while True:
        changed = False
        for stage in (_stage1, _stage2, _stage3):
            while stage(b):
                changed = True
        while _stage4(b, dom):
            changed = True
        if not changed:
            break
        sweeps += 1
        if sweeps > cap:
            raise PipelineError("stages", f"sweep cap {cap} exceeded", b.c)
    stuck = [s for s, slot in enumerate(b.c.slots) if not slot.formula.is_literal]
    if stuck:
        raise PipelineError("stages", f"slot {stuck[0]} is not a literal at the fixpoint "
                            "(domination oracle violates the audit)", b.c)
    return FirstPhase(b.derivation(f), b.c, tuple(b.images), b.trace)


# --- invariants checked by the tests ----------------------------------------

def condition_violations(f: Formula, c: Cirquent, images: Sequence) -> list:
    """Image bookkeeping: slot formula matches its image origin, images are distinct."""
    out = []
    if len({id(i) for i in images}) != len(images) or len(images) != len(c.slots):
        out.append("image map is not one-to-one")
    for s, (slot, img) in enumerate(zip(c.slots, images)):
        origin = subformula_at(f, img.origin.position)
        if slot.checked:
            parent = subformula_at(f, img.origin.position[:-1])
            if parent != slot.formula or parent.kind != COREC:
                out.append(f"checked slot {s} is not ⫯ over its image origin")
        elif origin != slot.formula:
            out.append(f"slot {s} does not match its image origin")
        kind = slot.formula.kind
        if not slot.checked:
            if kind == AND and img.kind != HAND:
                out.append(f"slot {s}: ∧ slot needs a ∧ image")
            if kind == OR and img.kind != HOR:
                out.append(f"slot {s}: ∨ slot needs a ∨ image")
            if kind == REC and not (img.kind == HAND and len(img.children) == 1):
                out.append(f"slot {s}: ⫰ slot needs an image ∧{{α}}")
            if kind == COREC and img.kind != HOR:
                out.append(f"slot {s}: ⫯ slot needs a ∨ image")
            if slot.formula.is_literal and not img.is_literal:
                out.append(f"slot {s}: literal slot needs a hyperliteral image")
    return out


def overgroup_violations(c: Cirquent, images: Sequence, dom: DominationOracle) -> list:
    """Master membership and label domination for unchecked slots."""
    out = []
    master = [j for j, a in enumerate(c.annotations) if a == MASTER]
    for s, slot in enumerate(c.slots):
        if slot.checked:
            continue
        if not any(s in c.overgroups[j] for j in master):
            out.append(f"slot {s} is outside the master overgroup")
        for j, (g, a) in enumerate(zip(c.overgroups, c.annotations)):
            if s in g and isinstance(a, UnitRef) and not dom.dominates(a, images[s].origin):
                out.append(f"label of overgroup {j} does not dominate slot {s}")
    return out


def image_of(c: Cirquent, images: Sequence) -> Hyperformula:
    """The image of a cirquent: ∧ over undergroups of ∨ over member images."""
    return Hyperformula(HAND, None, tuple(
        Hyperformula(HOR, None, tuple(images[s] for s in sorted(u)))
        for u in c.undergroups))


# --- endgame ---------------------------------------------------------------

def _move_group_next_to(rules, groups, kind, i, j, dup_name):
    """Bubble group ``j`` down to ``i+1`` with Exchanges, then deduplicate."""
    while j > i + 1:
        rules.append(rule("Exchange", kind=kind, i=j - 1))
        groups[j - 1], groups[j] = groups[j], groups[j - 1]
        j -= 1
    rules.append(rule(dup_name, index=i))
    del groups[i + 1]


def prove_literal_cirquent(d: Cirquent, images: Optional[Sequence] = None) -> Derivation:
    """A derivation from an axiom to the literal cirquent ``d``."""
    n = len(d.slots)
    if any(not s.formula.is_literal for s in d.slots):
        raise PipelineError("endgame", "cirquent has non-literal oformulas", d)

    def opp(a, b):
        if images is not None:
            return opposite(images[a], images[b])
        fa, fb = d.slots[a].formula, d.slots[b].formula
        return fa.name == fb.name and fa.kind != fb.kind

    chosen = []
    for i, u in enumerate(d.undergroups):
        members = sorted(u)
        pair = next(((a, b) for k, a in enumerate(members) for b in members[k + 1:]
                     if opp(a, b)), None)
        if pair is None:
            raise PipelineError("endgame", f"undergroup {i} has no opposite pair "
                                "(its image disjunction is not tautological)", d)
        chosen.append(frozenset(pair))

    rules = []
    c = d
    ids = list(range(n))   # current slot index -> slot of d
    keep = [set(p) for p in chosen]
    # Weakenings: strip every undergroup down to its chosen pair
    while True:
        target = next(((ids.index(x), i) for i, u in enumerate(c.undergroups)
                       for x in (ids[k] for k in sorted(u)) if x not in keep[i]), None)
        if target is None:
            break
        s, i = target
        r = rule("Weakening", slot=s, under=i)
        rules.append(r)
        before = len(c.slots)
        c = apply_rule(c, r)
        if len(c.slots) < before:
            del ids[s]
    # Undergroup Duplications
    rules_u = []
    groups = list(c.undergroups)
    i = 0
    while i < len(groups):
        j = next((j for j in range(i + 1, len(groups)) if groups[j] == groups[i]), None)
        if j is None:
            i += 1
            continue
        _move_group_next_to(rules_u, groups, "under", i, j, "UndergroupDuplication")
    for r in rules_u:
        c = apply_rule(c, r)
    rules += rules_u
    # Mergings: split overgroups into the pairs they hold
    pairs = [frozenset(ids.index(x) for x in p) for p in dict.fromkeys(map(frozenset, keep))]
    pair_of = {s: p for p in pairs for s in p}
    for j, g in enumerate(c.overgroups):
        for s in g:
            if not pair_of[s] <= g:
                raise PipelineError("endgame", f"opposite pair {sorted(pair_of[s])} "
                                    f"not co-grouped in overgroup {j}", d)
    while True:
        j = next((j for j, g in enumerate(c.overgroups) if len(g) > 2), None)
        if j is None:
            break
        g = c.overgroups[j]
        first = pair_of[min(g)]
        r = rule("Merging", over=j, left=first, right=g - first)
        rules.append(r)
        c = apply_rule(c, r)
    # Overgroup Duplications
    rules_o = []
    groups = list(c.overgroups)
    i = 0
    while i < len(groups):
        j = next((j for j in range(i + 1, len(groups)) if groups[j] == groups[i]), None)
        if j is None:
            i += 1
            continue
        _move_group_next_to(rules_o, groups, "over", i, j, "OvergroupDuplication")
    for r in rules_o:
        c = apply_rule(c, r)
    rules += rules_o
    out = derive_upward(d, rules)
    if not is_axiom(out.premise):
        raise PipelineError("endgame", "did not reach an axiom", out.premise)
    return out


# --- pipeline --------------------------------------------------------------

@dataclass
class Proof:
    derivation: Derivation
    resolution: Resolution
    pairing: OppositionPairing
    f4: Hyperformula
    dom: DominationOracle
    first: FirstPhase
    report: dict = field(default_factory=dict)


@dataclass
class NotTautological:
    stage: str
    reason: str
    report: dict = field(default_factory=dict)

    def __str__(self) -> str:
        return f"NotTautological at {self.stage}: {self.reason}"


def prove(f: Formula, height: int, run: Optional[Sequence] = None,
          pairing: Optional[OppositionPairing] = None, budget: Budget = DEFAULT,
          minimize: bool = False):
    """Full pipeline; a returned :class:`Proof` has passed :func:`check_proof`."""
    report = {"height": height}
    t = build_tree(f, height, budget=budget)
    report["tree_units"] = len(t)
    if pairing is None:
        pairing = opposite_pairs(t, run or ())
    else:
        pairing.validate(f)
    report["pairing"] = pairing.provenance
    report["pairs"] = len(pairing.pairs)
    if not pairing.is_matching():
        raise PipelineError("pairing", "computed opposition is not a matching")
    # supplied pairings get synthetic literal content
    use_run = (run or ()) if pairing.provenance != "supplied" else None
    outcome = search_total_resolution(f, height, use_run, pairing, budget)
    report.update(candidates=outcome.tried, tautological=outcome.tautological,
                  audited=outcome.audited_ok)
    if outcome.found is None:
        if outcome.tautological == 0:
            return NotTautological("tautology", "no total resolution yields a tautological "
                                   "image", report)
        return NotTautological("audit", "every tautological candidate fails the domination "
                               "audit", report)
    r, local = outcome.found
    tr = build_tree(f, height, r, budget)
    f1 = build_hyperformula(tr, use_run, local, budget)
    if not is_binary(f1):
        raise PipelineError("hyperformula", "image is not binary")
    f4 = finitize(f1, minimize=minimize, budget=budget)
    dom = DominationOracle.from_tree(tr, local, f4, budget)
    report["domination_pairs"] = len(dom.relation)
    first = run_first(f, f4, dom)
    report["stage_steps"] = len(first.derivation)
    end = prove_literal_cirquent(first.cirquent, first.images)
    report["endgame_steps"] = len(end)
    d = end.then(first.derivation)
    d = Derivation(d.cirquents, d.rules, f)
    bad = check_proof(d, f)
    if bad is not None:
        raise PipelineError("check", str(bad))
    report["steps"] = len(d)
    return Proof(d, r, local, f4, dom, first, report)
