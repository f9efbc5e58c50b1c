"""The cube of Hochschild homologies, its simplicial differential, the E_2 page,
normalization and invariance comparisons.

Cube vertices are subsets J of letter positions.  A position is "moved" in J
when it is a positive letter that was dropped or a negative letter that was
kept; the cube degree t counts moved positions.  Edges move one more position:
dropping a positive letter sets its delta to zero, keeping a negative letter
inserts the degree-2 class [alpha_s]_j + delta_j into the bimodule.  Every kept
negative letter lowers the internal degree by 2.
"""

from __future__ import annotations

import json
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

from .braid import BraidWord, coerce_word, format_braid, index_stats
from .chain import ChainError, FgAbGroup, composite_defect, homology_of_fgab_complex
from .hochschild import HHMap, check_bs_map_commutes, hochschild_homology, restriction_bs_map
from .soergel import BSBimodule, _add_into


def thread_count():
    try:
        return max(1, int(os.environ.get("BROKENSYM_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn, items):
    """Map with up to BROKENSYM_THREADS workers; results keep input order."""
    items = list(items)
    n = min(thread_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


@dataclass
class CubeVertex:
    J: frozenset
    word: BraidWord  # retained letters with signs
    t: int
    negatives: int
    hh: object = field(repr=False, default=None)

    @property
    def positive_word(self):
        return self.word.positivized()

    @property
    def shift(self):
        return -2 * self.negatives


@dataclass
class CubeEdge:
    source: frozenset
    target: frozenset
    position: int
    kind: str  # "drop" or "insert"
    slot: int  # index of the letter inside the larger of the two words
    sign: int
    hh_map: object = field(repr=False, default=None)


class Cube:
    def __init__(self, word, D, vertices, edges):
        self.word = word
        self.D = D
        self.vertices = vertices
        self.edges = edges

    def vertices_at(self, t):
        return [v for v in sorted(self.vertices.values(), key=lambda v: sorted(v.J)) if v.t == t]

    @property
    def max_t(self):
        return max(v.t for v in self.vertices.values())


def insertion_bs_map(target, j):
    """Bimodule map B(w) -> B(w with s inserted at slot j): 1 -> [alpha_s]_j + delta_j."""
    bit = 1 << (j - 1)
    low = bit - 1
    v = dict(target.alpha_table[j])
    _add_into(v, (bit, target._zero), 1)
    cache = {}

    def fmap(mask, e):
        img = cache.get(mask)
        if img is None:
            m2 = (mask & low) | ((mask & ~low) << 1)
            img = cache[mask] = target.mul_terms({(m2, target._zero): 1}, v)
        if not any(e):
            return img
        return {(mk, tuple(a + b for a, b in zip(ek, e))): c for (mk, ek), c in img.items()}

    return fmap


def _moved(word, J, p):
    positive = word.letters[p - 1] > 0
    return (p not in J) if positive else (p in J)


def build_cube(word, D, check=True):
    """All vertices with their HH modules and all edges with induced HH maps."""
    word = coerce_word(word)
    k = len(word)
    subsets = [frozenset(c) for n in range(k + 1) for c in combinations(range(1, k + 1), n)]
    vertices = {}
    need = {}
    for J in subsets:
        pos = sorted(J)
        letters = tuple(word.letters[p - 1] for p in pos)
        w = BraidWord(word.strands, letters)
        t = sum(1 for p in range(1, k + 1) if _moved(word, J, p))
        neg = sum(1 for a in letters if a < 0)
        vertices[J] = CubeVertex(J, w, t, neg)
        key = w.indices
        need[key] = max(need.get(key, 0), D + 2 * neg)

    keys = sorted(need, key=lambda ix: (len(ix), ix))

    def compute(ix):
        bs = BSBimodule(BraidWord(word.strands, ix))
        return hochschild_homology(bs, max(need[ix], 3), check=check)

    modules = dict(zip(keys, parallel_map(compute, keys)))
    for v in vertices.values():
        v.hh = modules[v.word.indices]

    edges = []
    for J, v in vertices.items():
        for p in range(1, k + 1):
            if _moved(word, J, p):
                continue
            sign = -1 if sum(1 for q in range(1, p) if _moved(word, J, q)) % 2 else 1
            if word.letters[p - 1] > 0:
                J2 = J - {p}
                slot = sorted(J).index(p) + 1
                fmap = restriction_bs_map(slot)
                kind, shift = "drop", 0
            else:
                J2 = J | {p}
                slot = sorted(J2).index(p) + 1
                fmap = insertion_bs_map(vertices[J2].hh.bs, slot)
                kind, shift = "insert", 2
            tgt = vertices[J2]
            if check:
                check_bs_map_commutes(fmap, v.hh.bs, tgt.hh.bs, min(v.hh.D, tgt.hh.D - shift))
            hmap = HHMap(v.hh, tgt.hh, fmap, s_shift=shift)
            edges.append(CubeEdge(J, J2, p, kind, slot, sign, hmap))
    cube = Cube(word, D, vertices, edges)
    if check:
        _check_faces(cube)
    return cube


def _check_faces(cube):
    """Every square of edge maps commutes on bimodule basis elements."""
    by_src = {}
    for e in cube.edges:
        by_src.setdefault(e.source, []).append(e)
    for J, outs in by_src.items():
        for e1, e2 in combinations(outs, 2):
            a = next(x for x in by_src.get(e1.target, []) if x.position == e2.position)
            b = next(x for x in by_src.get(e2.target, []) if x.position == e1.position)
            src = cube.vertices[J].hh.bs
            top = min(cube.vertices[J].hh.D, 10)
            for d in range(0, top + 1, 2):
                for mask, e in src.basis(d):
                    lhs = _compose(e1.hh_map.fmap, a.hh_map.fmap, mask, e)
                    rhs = _compose(e2.hh_map.fmap, b.hh_map.fmap, mask, e)
                    if lhs != rhs:
                        raise ChainError(
                            f"square at {sorted(J)} through positions {e1.position}, {e2.position} does not commute"
                        )


def _compose(f, g, mask, e):
    out = {}
    for (m1, e1), c in f(mask, e).items():
        for kk, c2 in g(m1, e1).items():
            _add_into(out, kk, c * c2)
    return out


# ---------------------------------------------------------------- tables


@dataclass
class TriplyGradedTable:
    entries: dict  # (t, s, h) -> (rank, torsion tuple)
    normalization: dict = field(default_factory=dict)
    s_max: int | None = None  # entries are complete for s <= s_max
    meta: dict = field(default_factory=dict)

    def nonzero(self):
        return {k: v for k, v in self.entries.items() if v[0] or v[1]}

    def poincare_ts(self):
        out = Counter()
        for (t, s, _h), (rank, _tor) in self.nonzero().items():
            if rank:
                out[(t, s)] += rank
        return dict(out)

    def poincare_s(self):
        out = Counter()
        for (_t, s, _h), (rank, _tor) in self.nonzero().items():
            if rank:
                out[s] += rank
        return dict(out)

    def torsion_ts(self):
        out = {}
        for (t, s, _h), (_rank, tor) in self.nonzero().items():
            if tor:
                out.setdefault((t, s), []).extend(tor)
        return {k: sorted(v) for k, v in out.items()}

    def columns(self):
        return sorted({t for (t, _s, _h) in self.nonzero()})

    def column_ranks(self):
        out = Counter()
        for (t, _s, _h), (rank, _tor) in self.nonzero().items():
            out[t] += rank
        return dict(out)

    def column_torsion(self):
        out = {}
        for (t, _s, _h), (_rank, tor) in self.nonzero().items():
            out.setdefault(t, []).extend(tor)
        return {t: sorted(v) for t, v in out.items() if v}

    def restricted(self, s_max):
        return TriplyGradedTable(
            {k: v for k, v in self.entries.items() if k[1] <= s_max}, dict(self.normalization), s_max, dict(self.meta)
        )

    def shifted(self, dt=0, ds=0, dh=0):
        return TriplyGradedTable(
            {(t + dt, s + ds, h + dh): v for (t, s, h), v in self.entries.items()},
            dict(self.normalization),
            None if self.s_max is None else self.s_max + ds,
            dict(self.meta),
        )

    def to_json_obj(self):
        obj = {}
        if "twist" in self.meta:
            obj["twist"] = self.meta["twist"]
        obj["word"] = self.meta.get("word")
        obj["max_deg"] = self.meta.get("max_deg")
        obj["s_max"] = self.s_max
        obj["normalization"] = self.normalization
        obj["entries"] = [
            {"t": t, "s": s, "h": h, "rank": rank, "torsion": list(tor)}
            for (t, s, h), (rank, tor) in sorted(self.nonzero().items())
        ]
        return obj

    def to_json(self):
        return json.dumps(self.to_json_obj(), indent=2, sort_keys=False)

    def to_text(self):
        lines = []
        for key in ("word", "max_deg"):
            if key in self.meta:
                lines.append(f"# {key}: {self.meta[key]}")
        if "twist" in self.meta:
            lines.append(f"# twist: n={self.meta['twist']['n']}")
        lines.append("# normalization: " + ", ".join(f"{k}={v}" for k, v in self.normalization.items()))
        if self.s_max is not None:
            lines.append(f"# complete for s <= {self.s_max}")
        rows = [("t", "s", "h", "rank", "torsion")]
        for (t, s, h), (rank, tor) in sorted(self.nonzero().items()):
            rows.append((str(t), str(s), str(h), str(rank), " ".join(f"Z/{d}" for d in tor) or "-"))
        widths = [max(len(r[i]) for r in rows) for i in range(5)]
        for r in rows:
            lines.append("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip())
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- pages


class E1Page:
    def __init__(self, cube):
        self.cube = cube
        self.D = cube.D
        self.r = cube.word.strands
        self.max_t = cube.max_t
        self.s_min = -2 * max(v.negatives for v in cube.vertices.values())
        self._groups = {}
        self._d1 = {}

    def vertex_group(self, v, s, h):
        s_pos = s + 2 * v.negatives
        if s_pos < 0 or (s_pos - h) % 2 or h > s_pos:
            return FgAbGroup([])
        return v.hh.group(s_pos, h)

    def group(self, t, s, h):
        key = (t, s, h)
        if key not in self._groups:
            orders = []
            for v in self.cube.vertices_at(t):
                orders.extend(self.vertex_group(v, s, h).orders)
            self._groups[key] = FgAbGroup(orders)
        return self._groups[key]

    def d1(self, t, s, h):
        """Matrix of d_1: E_1^{t,s,h} -> E_1^{t+1,s,h}."""
        key = (t, s, h)
        if key in self._d1:
            return self._d1[key]
        srcs = self.cube.vertices_at(t)
        tgts = self.cube.vertices_at(t + 1)
        soff, off = {}, 0
        for v in srcs:
            soff[v.J] = off
            off += self.vertex_group(v, s, h).ngens
        ncols = off
        toff, off = {}, 0
        for v in tgts:
            toff[v.J] = off
            off += self.vertex_group(v, s, h).ngens
        M = [[0] * ncols for _ in range(off)]
        for e in self.cube.edges:
            src = self.cube.vertices[e.source]
            if src.t != t:
                continue
            tgt = self.cube.vertices[e.target]
            if not self.vertex_group(src, s, h).ngens or not self.vertex_group(tgt, s, h).ngens:
                continue
            block = e.hh_map.matrix(s + 2 * src.negatives, h)
            r0, c0 = toff[e.target], soff[e.source]
            for i, row in enumerate(block):
                for j, x in enumerate(row):
                    if x:
                        M[r0 + i][c0 + j] += e.sign * x
        self._d1[key] = M
        return M

    def bidegrees(self):
        for s in range(self.s_min, self.D + 1):
            for h in range(0, self.r + 1):
                yield s, h

    def table(self):
        entries = {}
        for s, h in self.bidegrees():
            for t in range(self.max_t + 1):
                g = self.group(t, s, h)
                if not g.is_zero():
                    entries[(t, s, h)] = (g.free_rank, tuple(g.torsion))
        return TriplyGradedTable(entries, {"mode": "raw"}, self.D, {"word": format_braid(self.cube.word), "max_deg": self.D})

    def check_d1_squared(self):
        for s, h in self.bidegrees():
            for t in range(self.max_t - 1):
                j = composite_defect(self.d1(t, s, h), self.d1(t + 1, s, h), self.group(t + 2, s, h).orders)
                if j is not None:
                    raise ChainError(f"d_1 squared is nonzero at (t={t}, s={s}, h={h}) on generator {j}")


def e1_page(cube, check=True):
    page = E1Page(cube)
    if check:
        page.check_d1_squared()
    return page


def e2_page(e1):
    entries = {}
    for s, h in e1.bidegrees():
        groups = [e1.group(t, s, h) for t in range(e1.max_t + 1)]
        if all(g.ngens == 0 for g in groups):
            continue
        maps = [e1.d1(t, s, h) for t in range(e1.max_t)]
        for t, g in enumerate(homology_of_fgab_complex(groups, maps)):
            if not g.is_zero():
                entries[(t, s, h)] = (g.free_rank, tuple(g.torsion))
    return TriplyGradedTable(
        entries, {"mode": "raw"}, e1.D, {"word": format_braid(e1.cube.word), "max_deg": e1.D}
    )


def normalize(table, word, min_length=None):
    """Apply the suspension by l(w) and the filtration shift by rho.

    t -> t - rho and s -> s + l + rho, so s + t + l is preserved.  Without a
    known rho the table is shifted by l only and flagged relative.
    """
    word = coerce_word(word)
    st = index_stats(word, min_length=min_length)
    l = st.l_shift
    if st.rho is None:
        dt, ds, mode = 0, l, "relative"
    else:
        if st.rho.denominator != 1:
            raise ValueError(f"rho = {st.rho} is not an integer; check the supplied minimal length")
        rho = int(st.rho)
        dt, ds, mode = -rho, l + rho, "absolute"
    out = table.shifted(dt=dt, ds=ds)
    out.normalization = {
        "mode": mode,
        "l_shift": l,
        "rho": None if st.rho is None else int(st.rho),
        "t_offset": dt,
        "s_offset": ds,
        "strands": word.strands,
    }
    return out


def compute_e2(word, D, min_length=None, check=True):
    """Normalized E_2 table of a braid word, complete for normalized s <= table.s_max."""
    word = coerce_word(word)
    cube = build_cube(word, D, check=check)
    e1 = e1_page(cube, check=check)
    return normalize(e2_page(e1), word, min_length=min_length)


# ---------------------------------------------------------------- comparison


@dataclass
class InvarianceReport:
    equal: bool
    mode: str
    window: tuple
    offset: tuple
    first_discrepancy: object = None
    full_grading_equal: bool | None = None
    tables: tuple = ()

    def __str__(self):
        head = "PASS" if self.equal else "FAIL"
        msg = f"{head} ({self.mode}, s <= {self.window[1]}, offset (t, s, h) = {self.offset})"
        if self.first_discrepancy is not None:
            msg += f"; first discrepancy at {self.first_discrepancy}"
        return msg


def _lowest_key(table):
    keys = list(table.nonzero())
    if not keys:
        return None
    return min(keys, key=lambda k: (k[1], k[0], k[2]))


def compare_tables(a, b, exact):
    """Compare two normalized tables on their common window.

    exact: entrywise on (t, s, h) without offsets.  Otherwise one global (t, s, h)
    offset is read off the lowest nonzero entries; (t, s) Poincaré series and
    torsion multisets must then agree, and agreement of the full grading is
    reported separately.
    """
    if a.s_max is None or b.s_max is None:
        raise ValueError("tables need a completeness bound")
    if exact:
        off = (0, 0, 0)
    else:
        ka, kb = _lowest_key(a), _lowest_key(b)
        if ka is None or kb is None:
            off = (0, 0, 0)
        else:
            off = (ka[0] - kb[0], ka[1] - kb[1], ka[2] - kb[2])
    bb = b.shifted(*off)
    top = min(a.s_max, bb.s_max)
    lows = [k[1] for k in list(a.nonzero()) + list(bb.nonzero())]
    if lows and top < min(lows):
        raise ValueError(f"incomparable windows: common completeness bound s <= {top} lies below all entries")
    A = {k: v for k, v in a.nonzero().items() if k[1] <= top}
    B = {k: v for k, v in bb.nonzero().items() if k[1] <= top}
    full_equal = A == B
    if exact:
        equal, first = full_equal, None
        if not equal:
            diff = sorted(set(A) ^ set(B) | {k for k in set(A) & set(B) if A[k] != B[k]}, key=lambda k: (k[1], k[0], k[2]))
            first = (diff[0], A.get(diff[0]), B.get(diff[0]))
    else:
        pa, pb = Counter(), Counter()
        ta, tb = {}, {}
        for src, P, T in ((A, pa, ta), (B, pb, tb)):
            for (t, s, _h), (rank, tor) in src.items():
                if rank:
                    P[(t, s)] += rank
                if tor:
                    T.setdefault((t, s), []).extend(tor)
        ta = {k: sorted(v) for k, v in ta.items()}
        tb = {k: sorted(v) for k, v in tb.items()}
        equal = dict(pa) == dict(pb) and ta == tb
        first = None
        if not equal:
            keys = sorted(set(pa) | set(pb) | set(ta) | set(tb), key=lambda k: (k[1], k[0]))
            for k in keys:
                if pa.get(k) != pb.get(k) or ta.get(k) != tb.get(k):
                    first = (k, (pa.get(k, 0), ta.get(k, [])), (pb.get(k, 0), tb.get(k, [])))
                    break
    return InvarianceReport(equal, "exact" if exact else "offset", (None, top), off, first, full_equal, (a, b))


def invariance_check(w1, w2, D, min_length1=None, min_length2=None, check=True):
    """Normalized E_2 tables of two braid words compared on their common window."""
    w1, w2 = coerce_word(w1), coerce_word(w2)
    a = compute_e2(w1, D, min_length=min_length1, check=check)
    b = compute_e2(w2, D, min_length=min_length2, check=check)
    exact = (
        w1.strands == w2.strands
        and a.normalization["mode"] == "absolute"
        and b.normalization["mode"] == "absolute"
    )
    return compare_tables(a, b, exact)


__all__ = [
    "Cube",
    "CubeEdge",
    "CubeVertex",
    "E1Page",
    "InvarianceReport",
    "TriplyGradedTable",
    "build_cube",
    "compare_tables",
    "compute_e2",
    "e1_page",
    "e2_page",
    "insertion_bs_map",
    "invariance_check",
    "normalize",
    "parallel_map",
]
