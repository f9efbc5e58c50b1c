"""Check normalized E_2 invariance on a catalog of equivalent braid pairs."""

import argparse
import time

from brokensym.cube import invariance_check

CATALOG = [
    ("3: 1 2 1", "3: 2 1 2"),
    ("3: 1 1 2", "3: 1 2 1"),
    ("3: 1 1 2", "3: 2 1 1"),
    ("2: 1", "3: 1 2"),
    ("2: 1", "3: 1 -2"),
    ("2: 1 1 -1", "2: 1"),
    ("4: 1 3", "4: 3 1"),
]


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--max-deg", type=int, default=16)
    args = p.parse_args()
    ok = True
    for a, b in CATALOG:
        start = time.perf_counter()
        rep = invariance_check(a, b, args.max_deg)
        ok &= rep.equal
        print(f"{a}  ~  {b}: {rep} [{time.perf_counter() - start:.1f} s]")
    raise SystemExit(0 if ok else 1)


if __name__ == "__main__":
    main()
