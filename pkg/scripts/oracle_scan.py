"""Compare Hochschild homology with the closed-form series over all positive words.

Example: python scripts/oracle_scan.py --strands 4 --letters 1 2 3 --max-len 4 --max-deg 16
"""

import argparse
import itertools
import time

from brokensym.braid import BraidWord, format_braid
from brokensym.hochschild import hochschild_homology, structural_oracle
from brokensym.soergel import BSBimodule


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--strands", type=int, default=4)
    p.add_argument("--letters", type=int, nargs="+", default=[1, 2, 3])
    p.add_argument("--max-len", type=int, default=4)
    p.add_argument("--max-deg", type=int, default=16)
    args = p.parse_args()
    start = time.perf_counter()
    total = bad = 0
    for k in range(1, args.max_len + 1):
        for letters in itertools.product(args.letters, repeat=k):
            w = BraidWord(args.strands, letters)
            hh = hochschild_homology(BSBimodule(w), args.max_deg)
            got = hh.ranks()
            exp = structural_oracle(w, args.max_deg)
            diff = sorted(key for key in set(got) | set(exp) if got.get(key, 0) != exp.get(key, 0))
            total += 1
            if diff or hh.torsion():
                bad += 1
                first = diff[0] if diff else None
                print(
                    f"{format_braid(w)}: {len(diff)} bidegrees differ, first {first}: "
                    f"computed {got.get(first, 0)}, closed form {exp.get(first, 0)}; torsion {hh.torsion()}"
                )
    print(f"{total} words, {bad} disagree ({time.perf_counter() - start:.1f} s)")


if __name__ == "__main__":
    main()
