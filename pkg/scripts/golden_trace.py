"""Print the golden pipeline run: transcript, image, domination, stage trace, proof."""
import argparse

from clbench.derivation import NotTautological, prove
from clbench.formula import parse_formula
from clbench.game import Copycat, default_pairing, format_transcript, run_counterstrategy
from clbench.hyper import to_text


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--formula", default="?~P | !P")
    ap.add_argument("--height", type=int, default=1)
    ap.add_argument("--iterations", type=int, default=2)
    args = ap.parse_args()

    f = parse_formula(args.formula)
    run = run_counterstrategy(f, Copycat(f, default_pairing(f)), args.iterations)
    print("# transcript")
    print(format_transcript(run), end="")
    p = prove(f, args.height, run)
    if isinstance(p, NotTautological):
        print(p)
        return
    print("# resolution")
    print(p.resolution.to_text(), end="")
    print("# image")
    print(to_text(p.f4, origins=True))
    print("# domination")
    for e, g in sorted(p.dom.relation, key=str):
        print(f"{e} dominates {g}")
    print("# stages")
    for step in p.first.trace:
        print(step.to_text())
    print("# proof")
    print(p.derivation.to_text(), end="")


if __name__ == "__main__":
    main()
