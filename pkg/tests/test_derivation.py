import random
from pathlib import Path

import pytest

from clbench.cirquent import (
    MASTER,
    check_derivation,
    check_proof,
    cirquent,
    format_cirquent,
    initial_cirquent,
    is_axiom,
    parse_cirquent,
)
from clbench.formula import parse_formula
from clbench.game import Copycat, default_pairing, run_counterstrategy
from clbench.derivation import (
    DominationOracle,
    NotTautological,
    PipelineError,
    Proof,
    condition_violations,
    image_of,
    overgroup_violations,
    prove,
    prove_literal_cirquent,
    run_first,
)
from clbench.hyper import build_hyperformula, hand, is_binary, is_tautology, opposite
from clbench.units import TRIVIAL, build_tree, parse_pairing, parse_unit

from helpers import CORPUS, random_formula, truth_table_tautology

DATA = Path(__file__).parent / "data"
GOLDEN_D = "[~P; ~P; P] | {0,1,2} | {0,1,2}:MASTER {0,2}:1@"


def fm(s):
    return parse_formula(s)


@pytest.fixture(scope="module")
def golden(golden_formula, golden_run):
    return prove(golden_formula, 1, golden_run)


def copycat_run(f, k=2):
    return run_counterstrategy(f, Copycat(f, default_pairing(f)), k)


def test_golden_first_phase(golden):
    first = golden.first
    assert format_cirquent(first.cirquent) == GOLDEN_D
    assert [str(i.origin) for i in first.images] == ["00@0", "00@1", "10@0"]
    names = [r.name for r in reversed(first.derivation.rules)]
    assert names == ["DisjunctionIntroduction", "RecurrenceIntroduction", "Contraction",
                     "CorecurrenceIntroduction", "CorecurrenceIntroduction"]
    rel = {(str(a), str(b)) for a, b in golden.dom.relation}
    assert rel == {("1@", "00@0"), ("1@", "10@0")}


def test_golden_proof_text(golden):
    assert golden.derivation.to_text() == (DATA / "golden_proof.txt").read_text()


def test_golden_endgame(golden):
    end = prove_literal_cirquent(golden.first.cirquent, golden.first.images)
    assert [r.name for r in reversed(end.rules)] == ["Weakening", "OvergroupDuplication"]
    assert format_cirquent(end.premise) == "[~P; P] | {0,1} | {0,1}:MASTER"


def _settled(trace):
    """Steps not immediately followed by Stage 3's marking."""
    for s, nxt in zip(trace, trace[1:] + [None]):
        if nxt is None or nxt.rule != "mark":
            yield s


NON_TAUT = {"?(~P & Q) | !P", "!P & ?~Q"}
TAUT = [s for s in CORPUS if s not in NON_TAUT]


@pytest.mark.parametrize("text,h", [(s, h) for s in TAUT for h in (0, 1)])
def test_invariants_along_first_phase(text, h):
    f = fm(text)
    p = prove(f, h, copycat_run(f, max(2, h + 1)))
    assert isinstance(p, Proof)
    for step in _settled(p.first.trace):
        c, imgs = step.cirquent, step.images
        assert condition_violations(f, c, imgs) == [], step.to_text()
        assert overgroup_violations(c, imgs, p.dom) == [], step.to_text()
        img = image_of(c, imgs)
        assert is_tautology(img) and truth_table_tautology(img)
        # each slot counts once, however many undergroups share it
        assert is_binary(hand(*imgs))
    # at the fixpoint every labelling dominator holds the slot
    d, imgs = p.first.cirquent, p.first.images
    for s in range(len(d.slots)):
        for e in p.dom.dominators(imgs[s].origin):
            held = [g for g, a in zip(d.overgroups, d.annotations) if a == e]
            assert all(s in g for g in held)
    # opposite images sit in exactly the same overgroups as opposite literals
    for a in range(len(d.slots)):
        for b in range(len(d.slots)):
            if opposite(imgs[a], imgs[b]):
                assert d.slots[a].formula.name == d.slots[b].formula.name
                assert d.slots[a].formula.kind != d.slots[b].formula.kind
                assert [a in g for g in d.overgroups] == [b in g for g in d.overgroups]


def test_p_or_not_p_axiom_after_stage_one():
    f = fm("P | ~P")
    t = build_tree(f, 0)
    f4 = build_hyperformula(t, ())
    first = run_first(f, f4, DominationOracle())
    assert is_axiom(first.cirquent)
    assert len(first.derivation) == 1


def test_single_literal_unchanged():
    f = fm("P")
    f4 = build_hyperformula(build_tree(f, 0), ())
    first = run_first(f, f4, DominationOracle())
    assert first.cirquent == initial_cirquent(f)
    assert len(first.derivation) == 0


def test_missing_dominator_label_is_reported(golden_formula):
    f = golden_formula
    t = build_tree(f, 1)
    f4 = build_hyperformula(t, copycat_run(f))
    # a ⫯-unit can never label an overgroup, so Stage 4 never fires
    dom = DominationOracle(frozenset({(parse_unit("0@"), parse_unit("00@0"))}))
    with pytest.raises(PipelineError) as e:
        run_first(f, f4, dom)
    assert e.value.stage == "stages"


def test_endgame_axiom_is_empty():
    d = cirquent([fm("P"), fm("~P")], [{0, 1}], [{0, 1}], [MASTER])
    out = prove_literal_cirquent(d)
    assert len(out) == 0 and is_axiom(out.premise)


def test_endgame_two_undergroups():
    d = parse_cirquent("[P; ~P; Q; ~Q] | {0,1,2} {0,1,3} {2,3} | {0,1,2,3}:MASTER")
    out = prove_literal_cirquent(d)
    names = [r.name for r in out.rules]
    assert "UndergroupDuplication" in names and "Merging" in names
    assert is_axiom(out.premise)
    assert len(out.premise.undergroups) == 2
    assert check_derivation(out, conclusion=d) is None


def test_endgame_failures():
    with pytest.raises(PipelineError):
        prove_literal_cirquent(parse_cirquent("[P; Q] | {0,1} | {0,1}:MASTER"))
    with pytest.raises(PipelineError):
        # opposite pair split across overgroups
        prove_literal_cirquent(parse_cirquent("[P; ~P] | {0,1} | {0,1}:MASTER {0}:1@"))
    with pytest.raises(PipelineError):
        prove_literal_cirquent(initial_cirquent(fm("P | ~P")))


@pytest.mark.parametrize("text", ["P", "P & ~P", "!P & ?~Q", "?(~P & Q) | !P"])
@pytest.mark.parametrize("h", [0, 1])
def test_prove_negative(text, h):
    f = fm(text)
    out = prove(f, h, copycat_run(f))
    assert isinstance(out, NotTautological)
    assert out.stage == "tautology"


def test_prove_with_empty_run():
    out = prove(fm("P | ~P"), 0)
    assert isinstance(out, Proof)
    assert len(out.derivation) == 1


def test_prove_with_supplied_pairing(golden_formula):
    pairing = parse_pairing("PAIR 00@0 10@0\n")
    out = prove(golden_formula, 1, pairing=pairing)
    assert isinstance(out, Proof)
    assert check_proof(out.derivation, golden_formula) is None


def test_minimize_still_proves(golden_formula, golden_run):
    out = prove(golden_formula, 1, golden_run, minimize=True)
    assert isinstance(out, Proof)
    assert check_proof(out.derivation, golden_formula) is None


def test_random_formulas_prove_or_refuse():
    rng = random.Random(11)
    proofs = 0
    for i in range(60):
        f = random_formula(rng)
        out = prove(f, rng.randint(0, 1), copycat_run(f))
        if isinstance(out, Proof):
            proofs += 1
            assert check_proof(out.derivation, f) is None
    assert proofs > 0
