"""Fuzz the counterstrategy: freshness and legality over random formulas and adversaries."""
import argparse
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from helpers import RandomAdversary, random_formula  # noqa: E402

from clbench.game import BOT, Copycat, default_pairing, legal_move, run_counterstrategy  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--runs", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    dup = reuse = illegal = moves = 0
    for i in range(args.runs):
        rng = random.Random(args.seed + i)
        f = random_formula(rng)
        adv = RandomAdversary(f, i) if i % 2 else Copycat(f, default_pairing(f))
        run = run_counterstrategy(f, adv, rng.randint(1, 3))
        ours, theirs = set(), set()
        for lm in run:
            n = lm.move.numeral
            illegal += not legal_move(f, lm.move)
            if lm.player is BOT:
                dup += n in ours
                reuse += n in theirs
                ours.add(n)
            else:
                theirs.add(n)
        moves += len(run)
    print(f"runs={args.runs} moves={moves} duplicate={dup} reused={reuse} illegal={illegal}")
    sys.exit(1 if dup or reuse or illegal else 0)


if __name__ == "__main__":
    main()
