"""Shared generators and small oracles for the test suite."""
import itertools
import random
from collections import Counter
from dataclasses import replace

from hypothesis import strategies as st

from clbench.cirquent import MASTER, Cirquent, Slot, rule

from clbench.formula import (
    AND,
    COREC,
    OR,
    REC,
    atom,
    conj,
    corec,
    disj,
    modal_depth,
    natom,
    parse_formula,
    politerals,
    rec,
)
from clbench.game import Copycat, Funit, Move, default_pairing, funit_address, run_counterstrategy
from clbench.hyper import HAND, HOR, NEG, POS, Hyperatom, hand, hor, hyperatoms, lit
from clbench.units import (
    Resolution,
    UnitRef,
    build_tree,
    dominates,
    opposite_pairs,
    visible,
)

# trees of at most 40 units at heights 0..2 (one member exceeds 40 at h=2
# and is skipped there)
CORPUS = [
    "?~P | !P",
    "!P | ?~P",
    "P | ~P",
    "!(P | ~P)",
    "?(~P & Q) | !P",
    "!P & ?~Q",
    "(?~P | !P) & (?~Q | !Q)",
    "!?P | ?!~P",
    "?~P | !P | !~P | ?P",
    "!(P | Q) | ?(~P & ~Q)",
]


def formulas(names=("P", "Q"), max_leaves=5, modal=True):
    """Random formulas in literal normal form."""
    leaf = st.sampled_from(names).flatmap(
        lambda n: st.sampled_from([atom(n), natom(n)]))

    def extend(children):
        options = [
            st.tuples(children, children).map(lambda ab: conj(*ab)),
            st.tuples(children, children).map(lambda ab: disj(*ab)),
        ]
        if modal:
            options += [children.map(rec), children.map(corec)]
        return st.one_of(options)

    return st.recursive(leaf, extend, max_leaves=max_leaves)


def random_formula(rng, names=("P", "Q"), leaves=4, max_depth=2):
    """Plain-random formula with bounded modal depth (for fuzz loops)."""
    def go(n, depth):
        if n == 1:
            lit = rng.choice(names)
            f = atom(lit) if rng.random() < 0.5 else natom(lit)
            if depth < max_depth and rng.random() < 0.4:
                f = (rec if rng.random() < 0.5 else corec)(f)
            return f
        k = rng.randint(1, n - 1)
        f = (conj if rng.random() < 0.5 else disj)(go(k, depth), go(n - k, depth))
        if depth < max_depth and rng.random() < 0.3:
            return (rec if rng.random() < 0.5 else corec)(
                (conj if rng.random() < 0.5 else disj)(go(k, depth + 1), go(n - k, depth + 1)))
        return f
    return go(rng.randint(1, leaves), 0)


def random_move(f, rng, max_len=2, numerals=12):
    p = rng.choice(politerals(f))
    d = modal_depth(f, p)
    strings = tuple("".join(rng.choice("01") for _ in range(rng.randint(0, max_len)))
                    for _ in range(d))
    return Move(funit_address(f, Funit(p, strings)), rng.randrange(numerals))


class RandomAdversary:
    """Makes zero to two random legal moves per grant."""

    def __init__(self, f, seed):
        self.f = f
        self.rng = random.Random(seed)

    def __call__(self, position):
        return [random_move(self.f, self.rng) for _ in range(self.rng.randint(0, 2))]


def truth_table_tautology(h):
    """Independent oracle: enumerate assignments with itertools, evaluate recursively."""
    atoms = hyperatoms(h)

    def ev(n, val):
        if n.kind == POS:
            return val[n.atom]
        if n.kind == NEG:
            return not val[n.atom]
        results = [ev(c, val) for c in n.children]
        return all(results) if n.kind == HAND else any(results)

    return all(ev(h, dict(zip(atoms, bits)))
               for bits in itertools.product((False, True), repeat=len(atoms)))


def _random_cover(rng, n, max_groups=3):
    """Nonempty index sets whose union is range(n)."""
    groups = [set() for _ in range(rng.randint(1, max_groups))]
    for k in range(n):
        for g in rng.sample(groups, rng.randint(1, len(groups))):
            g.add(k)
    return [frozenset(g) for g in groups if g]


def random_cirquent(rng, max_slots=4):
    n = rng.randint(1, max_slots)
    slots = []
    for _ in range(n):
        f = random_formula(rng)
        slots.append(Slot(f, f.kind == COREC and rng.random() < 0.5))
    over = _random_cover(rng, n)
    labels = [MASTER, None, UnitRef((1,), ()), UnitRef((0, 1), ("0",))]
    return Cirquent(tuple(slots), tuple(_random_cover(rng, n)), tuple(over),
                    tuple(rng.choice(labels) for _ in over))


def candidate_rules(c, rng):
    """Rule instances that may or may not apply to ``c``."""
    n, nu, no = len(c.slots), len(c.undergroups), len(c.overgroups)
    out = []
    for kind, m in (("slot", n), ("under", nu), ("over", no)):
        out += [rule("Exchange", kind=kind, i=i) for i in range(m - 1)]
    out += [rule("Weakening", slot=s, under=u) for u in range(nu) for s in c.undergroups[u]]
    for s in range(n):
        out.append(rule("Contraction", slot=s))
        out.append(rule("ConjunctionIntroduction", slot=s))
        out.append(rule("DisjunctionIntroduction", slot=s))
        out.append(rule("RecurrenceIntroduction", slot=s, label=UnitRef((s % 2,), ())))
        others = [j for j in range(no) if s not in c.overgroups[j]]
        out.append(rule("CorecurrenceIntroduction", slot=s,
                        into=set(rng.sample(others, rng.randint(0, len(others))))))
    out += [rule("UndergroupDuplication", index=i) for i in range(nu - 1)]
    out += [rule("OvergroupDuplication", index=i) for i in range(no - 1)]
    for o in range(no):
        g = sorted(c.overgroups[o])
        left = set(rng.sample(g, rng.randint(1, len(g))))
        right = set(g) - left or {g[0]}
        out.append(rule("Merging", over=o, left=left, right=right))
    return out


def partial_resolutions(f, h):
    """Every resolution of the height-``h`` tree, total or not."""
    recs = build_tree(f, h).rec_units
    words = ["".join(b) for b in itertools.product("01", repeat=h)]
    for combo in itertools.product([None] + words, repeat=len(recs)):
        yield Resolution.of({u: w for u, w in zip(recs, combo) if w is not None})


def lemma_sweep(corpus=CORPUS, heights=(0, 1, 2), max_units=40):
    """Exhaustive relation-lemma check; returns (trees checked, violation Counter, skipped)."""
    viol, trees, skipped = Counter(), 0, []
    for text in corpus:
        f = parse_formula(text)
        for h in heights:
            full = build_tree(f, h)
            if len(full) > max_units:
                skipped.append((text, h, len(full)))
                continue
            run = run_counterstrategy(f, Copycat(f, default_pairing(f)), max(2, h + 1))
            pairing = opposite_pairs(full, run)
            words = ["".join(b) for b in itertools.product("01", repeat=h)]
            for r in partial_resolutions(f, h):
                t = build_tree(f, h, r)
                trees += 1
                nodes = t.nodes
                for a, b, c in itertools.product(nodes, repeat=3):
                    if t.drives(a, b) and t.drives(b, c) and not t.drives(a, c):
                        viol["drives transitivity"] += 1
                    if (t.strictly_drives(r, a, b) and t.strictly_drives(r, b, c)
                            and not t.strictly_drives(r, a, c)):
                        viol["strict drives transitivity"] += 1
                for g in nodes:
                    ds = [e for e in nodes if t.strictly_drives(r, e, g)]
                    if len({e.position for e in ds}) != len(ds):
                        viol["strict driver origins"] += 1
                p = pairing.restricted(t)
                for e in t.rec_units:
                    for g in nodes:
                        if not dominates(t, p, e, g):
                            continue
                        if any(not dominates(t, p, e, x) for x in t.descendants(g)):
                            viol["domination subunit closure"] += 1
                        par = t.parent(g)
                        if par is None:
                            continue
                        kind = t.kind(par)
                        if kind in (AND, OR) and not dominates(t, p, e, par):
                            viol["parent propagation"] += 1
                        if kind == REC and par != e and not dominates(t, p, e, par):
                            viol["parent propagation"] += 1
                    for pair in p.pairs:
                        l, m = tuple(pair)
                        if bool(dominates(t, p, e, l)) != bool(dominates(t, p, e, m)):
                            viol["opposites share dominators"] += 1
                # one-key extensions; longer ones compose
                for u in t.rec_units:
                    if r.get(u) is not None:
                        continue
                    for w in words:
                        r2 = r.union(Resolution.of({u: w}))
                        t2 = build_tree(f, h, r2)
                        for a, b in itertools.product(t2.nodes, repeat=2):
                            if t.strictly_drives(r, a, b) and not t2.strictly_drives(r2, a, b):
                                viol["strict drive monotonicity"] += 1
                            if (visible(t, r, pairing, a, b)
                                    and not visible(t2, r2, pairing, a, b)):
                                viol["visibility monotonicity"] += 1
    return trees, viol, skipped


def all_binary(atoms):
    """Every binary hyperformula over ``atoms``: binary ∧/∨ trees over a subset of
    the literals, each literal at most once."""
    lits = [lit(a, s) for a in atoms for s in (True, False)]

    def trees(items):
        if len(items) == 1:
            yield items[0]
            return
        first, rest = items[0], items[1:]
        # split into two nonempty parts, first element on the left (unordered)
        for mask in range(1 << len(rest)):
            left = [first] + [x for i, x in enumerate(rest) if mask >> i & 1]
            right = [x for i, x in enumerate(rest) if not mask >> i & 1]
            if not right:
                continue
            for lt in trees(left):
                for rt in trees(right):
                    yield hand(lt, rt)
                    yield hor(lt, rt)

    for mask in range(1, 1 << len(lits)):
        yield from trees([x for i, x in enumerate(lits) if mask >> i & 1])


def random_hyperformula(rng, k, size):
    atoms = [Hyperatom("P", frozenset({i})) for i in range(k)]

    def go(n):
        if n == 1:
            return lit(rng.choice(atoms), rng.random() < 0.5)
        parts = rng.randint(2, min(4, n))
        cuts = sorted(rng.sample(range(1, n), parts - 1))
        sizes = [b - a for a, b in zip([0] + cuts, cuts + [n])]
        kids = tuple(go(s) for s in sizes)
        return hand(*kids) if rng.random() < 0.5 else hor(*kids)

    return go(size)


def random_tautology(rng):
    """Random ∨ of random material with one complementary pair spliced in."""
    k = rng.randint(1, 6)
    a = Hyperatom("P", frozenset({rng.randrange(k)}))
    core = hor(lit(a), lit(a, False))
    noise = [random_hyperformula(rng, k, rng.randint(1, 6)) for _ in range(rng.randint(0, 3))]
    kids = noise + [core]
    rng.shuffle(kids)
    return with_origins(hor(*kids), rng)


def with_origins(h, rng, path=()):
    kind = {HAND: "and", HOR: rng.choice(["or", "corec"])}.get(h.kind, "atom")
    kids = tuple(with_origins(c, rng, path + (i,)) for i, c in enumerate(h.children))
    if kind == "or" and len(kids) != 2:
        kind = "corec"
    return replace(h, children=kids, origin=UnitRef(path, ()), origin_kind=kind)
