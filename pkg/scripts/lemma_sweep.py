"""Exhaustive relation-lemma sweep over the test corpus."""
import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from helpers import CORPUS, lemma_sweep  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--heights", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--max-units", type=int, default=40)
    args = ap.parse_args()

    t0 = time.time()
    trees, viol, skipped = lemma_sweep(CORPUS, tuple(args.heights), args.max_units)
    print(f"trees={trees} seconds={time.time() - t0:.1f}")
    for text, h, n in skipped:
        print(f"skipped {text!r} h={h} units={n}")
    for name, count in sorted(viol.items()):
        print(f"violation {name}: {count}")
    sys.exit(1 if viol else 0)


if __name__ == "__main__":
    main()
