"""Command-line front end.

Exit codes: 0 success, 1 computation error or failed check, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from .braid import MARKOV_KINDS, BraidParseError, format_braid, markov_variants, parse_braid
from .chain import ChainError
from .cube import TriplyGradedTable, compute_e2, invariance_check
from .hochschild import hochschild_homology
from .ktheory import (
    DivisionError,
    KBSPresentation,
    adams_thom_check,
    degeneration_check,
    dual_weight_exponent,
    restriction_naturality,
    root_exponent,
)
from .soergel import BSBimodule, bimodule_tensor_check, delta_hat_relation_holds
from .twisted import twisted_e2

COMMANDS = ("compute", "hh", "soergel", "twisted", "ktheory", "check")
MIN_DEG = 4


class UsageError(Exception):
    pass


@dataclass
class Job:
    command: str
    word: object
    max_deg: int = 16
    n: int | None = None
    fmt: str = "table"
    min_length: int | None = None
    out: str | None = None
    moves: tuple = MARKOV_KINDS


def build_parser():
    p = argparse.ArgumentParser(prog="brokensym", description="Exact triply graded link homology of braid closures.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("compute", "normalized E_2 table of the braid closure"),
        ("hh", "Hochschild homology of the Bott-Samelson bimodule of the positivized word"),
        ("soergel", "bimodule ranks and structure checks"),
        ("twisted", "twisted E_2 with wp(x) = x^n"),
        ("ktheory", "K-theory presentation data and checks"),
        ("check", "invariance of E_2 under Markov and braid moves"),
    ):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--word", required=True, help='braid word, e.g. "3: 1 -2 1"')
        sp.add_argument("--max-deg", type=int, default=16, help="internal degree cutoff D (>= 4)")
        sp.add_argument("--format", choices=("json", "table"), default="table")
        sp.add_argument("--out", help="write output to this path instead of stdout")
        if name in ("compute", "check"):
            sp.add_argument("--min-length", type=int, help="minimal length of the braid, enables absolute normalization")
        if name == "twisted":
            sp.add_argument("--n", type=int, required=True, help="twist exponent n >= 1")
        if name == "check":
            sp.add_argument("--moves", default=",".join(MARKOV_KINDS), help="comma-separated move kinds")
    return p


def parse_job(argv):
    args = build_parser().parse_args(argv)
    try:
        word = parse_braid(args.word)
    except BraidParseError as exc:
        raise UsageError(f"cannot parse --word {args.word!r}: {exc}") from exc
    if args.max_deg < MIN_DEG:
        raise UsageError(f"--max-deg must be at least {MIN_DEG}, got {args.max_deg}")
    n = getattr(args, "n", None)
    if n is not None and n < 1:
        raise UsageError(f"--n must be a positive integer, got {n}")
    moves = tuple(m for m in getattr(args, "moves", ",".join(MARKOV_KINDS)).split(",") if m)
    bad = [m for m in moves if m not in MARKOV_KINDS]
    if bad:
        raise UsageError(f"unknown move kind(s) {bad}; choose from {', '.join(MARKOV_KINDS)}")
    return Job(args.command, word, args.max_deg, n, args.format, getattr(args, "min_length", None), args.out, moves)


# ---------------------------------------------------------------- commands


def _emit_table(job, table):
    return table.to_json() + "\n" if job.fmt == "json" else table.to_text()


def run_compute(job):
    return _emit_table(job, compute_e2(job.word, job.max_deg, min_length=job.min_length)), 0


def run_hh(job):
    w = job.word.positivized()
    hh = hochschild_homology(BSBimodule(w), job.max_deg)
    entries = {(0, s, h): v for (s, h), v in hh.table().items()}
    table = TriplyGradedTable(entries, {"mode": "hh"}, job.max_deg, {"word": format_braid(w), "max_deg": job.max_deg})
    return _emit_table(job, table), 0


def run_soergel(job):
    w = job.word.positivized()
    bs = BSBimodule(w)
    ranks = [bs.rank(d) for d in range(0, job.max_deg + 1, 2)]
    ok_tensor, report = bimodule_tensor_check(w, job.max_deg)
    ok_hat = delta_hat_relation_holds(w)
    obj = {
        "word": format_braid(w),
        "max_deg": job.max_deg,
        "ranks": ranks,
        "tensor_check": bool(ok_tensor),
        "delta_hat_relation": bool(ok_hat),
    }
    code = 0 if ok_tensor and ok_hat else 1
    if job.fmt == "json":
        return json.dumps(obj, indent=2) + "\n", code
    lines = [f"# word: {obj['word']}", f"# max_deg: {job.max_deg}", "degree  rank"]
    lines += [f"{2 * i:>6}  {r}" for i, r in enumerate(ranks)]
    lines.append(f"tensor model check: {'PASS' if ok_tensor else 'FAIL'}")
    if not ok_tensor:
        lines.append(str(report))
    lines.append(f"delta_hat relation: {'PASS' if ok_hat else 'FAIL'}")
    return "\n".join(lines) + "\n", code


def run_twisted(job):
    return _emit_table(job, twisted_e2(job.word, job.n, job.max_deg)), 0


def run_ktheory(job):
    w = job.word.positivized()
    pres = KBSPresentation(w)
    r = pres.r
    brackets = []
    for j in range(1, pres.k + 2):
        row = {"slot": j}
        if j <= pres.k:
            row["alpha"] = pres.format(pres.alpha_bracket(j))
        for u in range(1, r):
            row[f"h{u}"] = pres.format(pres.bracket(dual_weight_exponent(u, r), j))
        brackets.append(row)
    relations_ok = all(not pres.relation(j) for j in range(1, pres.k + 1))
    nat = restriction_naturality(pres)
    deg = degeneration_check(w)
    adams_ok = {l: adams_thom_check(l) for l in (2, 3)}
    hats = {s: pres.format(pres.hat_class(s)) for s in sorted(set(w.indices))}
    obj = {
        "word": format_braid(w),
        "brackets": brackets,
        "hat_classes": {str(s): v for s, v in hats.items()},
        "relations_close": relations_ok,
        "naturality_failures": len(nat),
        "degeneration_failures": len(deg),
        "adams_thom": {str(l): v for l, v in adams_ok.items()},
        "alpha_roots": {str(s): list(root_exponent(s, r)) for s in range(1, r)},
    }
    ok = relations_ok and not nat and not deg and all(adams_ok.values())
    if job.fmt == "json":
        return json.dumps(obj, indent=2) + "\n", 0 if ok else 1
    lines = [f"# word: {obj['word']}"]
    for row in brackets:
        for key, val in row.items():
            if key != "slot":
                lines.append(f"[e^{key}]_{row['slot']} = {val}")
    for s, v in hats.items():
        lines.append(f"hat_{s} = {v}")
    lines.append(f"relations close: {'PASS' if relations_ok else 'FAIL'}")
    lines.append(f"restriction naturality: {'PASS' if not nat else 'FAIL'}")
    lines.append(f"first-order degeneration: {'PASS' if not deg else 'FAIL'}")
    for l, v in adams_ok.items():
        lines.append(f"Adams/Thom l={l}: {'PASS' if v else 'FAIL'}")
    return "\n".join(lines) + "\n", 0 if ok else 1


def run_check(job):
    lines, results = [], []
    for kind in job.moves:
        for other in markov_variants(job.word, kind):
            if other == job.word:
                continue
            rep = invariance_check(job.word, other, job.max_deg, min_length1=job.min_length)
            results.append(
                {
                    "move": kind,
                    "word": format_braid(job.word),
                    "variant": format_braid(other),
                    "equal": rep.equal,
                    "mode": rep.mode,
                    "window_s_max": rep.window[1],
                    "offset": list(rep.offset),
                    "first_discrepancy": None if rep.first_discrepancy is None else repr(rep.first_discrepancy),
                }
            )
            lines.append(f"{kind}: {format_braid(job.word)} vs {format_braid(other)}: {rep}")
    ok = all(r["equal"] for r in results)
    if job.fmt == "json":
        return json.dumps({"all_equal": ok, "results": results}, indent=2) + "\n", 0 if ok else 1
    lines.append("PASS" if ok else "FAIL")
    return "\n".join(lines) + "\n", 0 if ok else 1


RUNNERS = {
    "compute": run_compute,
    "hh": run_hh,
    "soergel": run_soergel,
    "twisted": run_twisted,
    "ktheory": run_ktheory,
    "check": run_check,
}


def run(argv=None):
    """Run one job; returns the exit code."""
    try:
        job = parse_job(argv)
    except UsageError as exc:
        print(f"brokensym: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code) if exc.code is not None else 0
    try:
        text, code = RUNNERS[job.command](job)
    except (ChainError, DivisionError, ValueError, ArithmeticError) as exc:
        print(f"brokensym: computation failed: {exc}", file=sys.stderr)
        return 1
    if job.out:
        with open(job.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
