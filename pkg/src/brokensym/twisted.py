"""Twisted Borel theory specialized at wp(x) = x^n.

Vertex modules are finite quotient rings presented degree by degree.  A vertex
module in internal degree p sits in total degree p + offset, where the offset is
the degree r + 2|nu| of the top exterior class gamma_* beta_* that survives the
twist.  Tables from this module carry h = 0 throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .algebra import GradedPoly, build_quotient, symmetric_sum, var_key
from .braid import BraidWord, coerce_word, format_braid, index_stats
from .chain import ChainError, FgAbGroup, composite_defect, homology_of_fgab_complex
from .cube import TriplyGradedTable, parallel_map
from .hochschild import hochschild_homology, merge_sign
from .soergel import BSBimodule, _add_into


@dataclass(frozen=True)
class TwistSpec:
    """wp(x) = x^n, i.e. b_n = 1 and every other b_i = 0."""

    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"twist exponent must be a positive integer, got {self.n!r}")

    def of_var(self, name):
        return GradedPoly.var(name) ** self.n

    def of_root(self, a, b):
        """Divided difference (wp(a) - wp(b)) / (a - b)."""
        return symmetric_sum(self.n, a, b)


def _as_spec(spec):
    return spec if isinstance(spec, TwistSpec) else TwistSpec(int(spec))


@dataclass
class TwistedVertex:
    word: BraidWord
    spec: TwistSpec
    module: object = field(repr=False)
    offset: int
    D: int

    @property
    def vars(self):
        return self.module.vars

    @property
    def parity(self):
        return self.offset % 2

    def group(self, s):
        p = s - self.offset
        if s > self.D or p < 0 or p % 2 or p not in self.module.degrees:
            return FgAbGroup([])
        return self.module.group(p)

    def degrees(self):
        return [p + self.offset for p in self.module.degrees if p + self.offset <= self.D]

    def table(self):
        out = {}
        for s in self.degrees():
            g = self.group(s)
            if not g.is_zero():
                out[s] = (g.free_rank, tuple(g.torsion))
        return out

    def total_rank(self):
        return sum(rank for rank, _ in self.table().values())

    def torsion(self):
        return sorted(d for _, tor in self.table().values() for d in tor)

    def reduce(self, poly):
        return self.module.reduce(poly)


def _build(word, spec, gens, vars, offset, D):
    top = max([g.degree() for g in gens if g] + [0])
    module = build_quotient(vars, gens, max(D - offset, top))
    return TwistedVertex(word, spec, module, offset, D)


def _delta_names(k):
    return [f"d{j}" for j in range(1, k + 1)]


def twisted_vertex_r2(k, spec, D):
    """Twisted vertex of sigma_1^k in Br(2).

    k = 0: Z[x1,x2] / (x1^n, x2^n).  k >= 1: R[d_1..d_k] / (d_1 + ... + d_k,
    d_j^2 + (x1 - x2 + 2 sum_{i<j} d_i) d_j) with R = Z[x1,x2] / (x1^n, x2^n, S(x1,x2)).
    """
    spec = _as_spec(spec)
    if k < 0:
        raise ValueError("k must be nonnegative")
    ds = _delta_names(k)
    vars = tuple(sorted(ds + ["x1", "x2"], key=var_key))
    x, y = GradedPoly.var("x1"), GradedPoly.var("x2")
    gens = [spec.of_var("x1"), spec.of_var("x2")]
    if k:
        gens.append(spec.of_root("x1", "x2"))
        d = [GradedPoly.var(n) for n in ds]
        hat = GradedPoly.const(0)
        for dj in d:
            hat = hat + dj
        gens.append(hat)
        acc = x - y
        for dj in d:
            gens.append(dj * dj + acc * dj)
            acc = acc + 2 * dj
    offset = 2 + (2 if k else 0)
    return _build(BraidWord(2, (1,) * k), spec, gens, vars, offset, D)


def twisted_hh_redundancy_free(word, spec, D):
    """Twisted HH of a word whose indices all occur once, as a quotient ring.

    Killing the deltas leaves Z[x_1..x_r]; the relations are S(x_s, x_{s+1}) for
    s in nu and x_a^n for the first index a of every orbit.
    """
    spec = _as_spec(spec)
    word = coerce_word(word)
    st = index_stats(word)
    if not st.redundancy_free:
        raise ValueError(
            "twisted vertices are only determined for redundancy-free words; repeated indices "
            "make the answer depend on a non-canonical filtration"
        )
    r = word.strands
    vars = tuple(f"x{i}" for i in range(1, r + 1))
    gens = [spec.of_root(f"x{s}", f"x{s + 1}") for s in sorted(st.nu)]
    gens += [spec.of_var(f"x{min(orbit)}") for orbit in st.orbits]
    return _build(word, spec, gens, vars, r + 2 * len(st.nu), D)


# ---------------------------------------------------------------- maps


class TwistedMap:
    """Module map given on ambient monomials: exps -> {exps: coeff} in the target variables.

    ``check`` verifies that every relation generator of the source maps into the
    target ideal; this suffices because the maps used here are ring maps followed
    by multiplication with a fixed element.
    """

    def __init__(self, source, target, mono_map, check=True):
        self.source = source
        self.target = target
        self.mono_map = mono_map
        self._cache = {}
        if check:
            self.check_well_defined()

    def image(self, poly):
        poly = poly.with_vars(self.source.vars)
        out = {}
        for e, c in poly.terms.items():
            for e2, c2 in self.mono_map(e).items():
                _add_into(out, e2, c * c2)
        return GradedPoly(self.target.vars, out)

    def check_well_defined(self):
        for g in self.source.module.gens:
            img = self.image(g)
            if not img:
                continue
            if img.degree() > self.target.module.cutoff:
                continue
            if self.target.reduce(img):
                raise ChainError(f"relation {g} does not map into the target ideal (image {img})")

    def matrix(self, s):
        if s in self._cache:
            return self._cache[s]
        src, tgt = self.source.group(s), self.target.group(s)
        p_tgt = s - self.target.offset
        cols = []
        for lift in src.lifts:
            img = self.image(GradedPoly(self.source.vars, lift))
            vec = {}
            for e, c in img.terms.items():
                if img.monomial_degree(e) != p_tgt:
                    raise ChainError(f"map is not homogeneous at total degree {s}")
                vec[e] = c
            cols.append(tgt.coords(vec) if tgt.ngens else [])
        M = [[cols[j][i] for j in range(len(cols))] for i in range(tgt.ngens)]
        self._cache[s] = M
        return M


def _drop_delta_map(source, target, i):
    """d_i -> 0, later deltas reindexed; x's unchanged."""
    src_idx = {v: n for n, v in enumerate(source.vars)}
    tgt_idx = {v: n for n, v in enumerate(target.vars)}
    k = len([v for v in source.vars if v.startswith("d")])
    rename = {}
    for j in range(1, k + 1):
        if j != i:
            rename[f"d{j}"] = f"d{j if j < i else j - 1}"
    for v in source.vars:
        if v.startswith("x"):
            rename[v] = v
    dead = src_idx[f"d{i}"]

    def mono(e):
        if e[dead]:
            return {}
        out = [0] * len(target.vars)
        for v, n in src_idx.items():
            if v in rename:
                out[tgt_idx[rename[v]]] += e[n]
        return {tuple(out): 1}

    return mono


def _last_delta_map(source, target):
    """k = 1 -> 0: d_1 -> 0 then multiply by (x1 - x2)."""
    src_idx = {v: n for n, v in enumerate(source.vars)}
    ix, iy = target.vars.index("x1"), target.vars.index("x2")
    d1 = src_idx["d1"]

    def mono(e):
        if e[d1]:
            return {}
        base = [0] * len(target.vars)
        base[ix] = e[src_idx["x1"]]
        base[iy] = e[src_idx["x2"]]
        a, b = list(base), list(base)
        a[ix] += 1
        b[iy] += 1
        return {tuple(a): 1, tuple(b): -1}

    return mono


def twisted_restriction_r2(k, i, spec, D, source=None, target=None, check=True):
    """Map from the sigma^k vertex to the sigma^{k-1} vertex dropping position i.

    i = None gives the identity of the sigma^k vertex.
    """
    spec = _as_spec(spec)
    source = source or twisted_vertex_r2(k, spec, D)
    if i is None:
        return TwistedMap(source, source, lambda e: {e: 1}, check=check)
    if not 1 <= i <= k:
        raise ValueError(f"position {i} outside 1..{k}")
    target = target or twisted_vertex_r2(k - 1, spec, D)
    mono = _drop_delta_map(source, target, i) if k > 1 else _last_delta_map(source, target)
    return TwistedMap(source, target, mono, check=check)


# ---------------------------------------------------------------- E_2


def _twisted_cube_e2(k, vertex_of, edge_map, D, check):
    """E_2 of a cube over subsets of {1..k} of positive positions, t = k - |J|.

    vertex_of(J) gives the twisted vertex; edge_map(J, p) the map dropping p.
    """
    subsets = {t: [frozenset(c) for c in combinations(range(1, k + 1), k - t)] for t in range(k + 1)}

    def d1(t, s):
        srcs, tgts = subsets[t], subsets[t + 1]
        soff, off = {}, 0
        for J in srcs:
            soff[J] = off
            off += vertex_of(J).group(s).ngens
        ncols = off
        toff, off = {}, 0
        for J in tgts:
            toff[J] = off
            off += vertex_of(J).group(s).ngens
        M = [[0] * ncols for _ in range(off)]
        for J in srcs:
            for p in sorted(J):
                sign = -1 if sum(1 for q in range(1, p) if q not in J) % 2 else 1
                block = edge_map(J, p).matrix(s)
                r0, c0 = toff[J - {p}], soff[J]
                for a, row in enumerate(block):
                    for b, x in enumerate(row):
                        if x:
                            M[r0 + a][c0 + b] += sign * x
        return M

    entries = {}
    for s in range(0, D + 1):
        groups = []
        for t in range(k + 1):
            orders = []
            for J in subsets[t]:
                orders.extend(vertex_of(J).group(s).orders)
            groups.append(FgAbGroup(orders))
        if all(g.ngens == 0 for g in groups):
            continue
        ds = [d1(t, s) for t in range(k)]
        if check:
            for t in range(k - 1):
                if composite_defect(ds[t], ds[t + 1], groups[t + 2].orders) is not None:
                    raise ChainError(f"twisted d_1 squared is nonzero at (t={t}, s={s})")
        for t, g in enumerate(homology_of_fgab_complex(groups, ds)):
            if not g.is_zero():
                entries[(t, s, 0)] = (g.free_rank, tuple(g.torsion))
    return entries


def _twisted_table(word, spec, D, entries, offsets):
    st = index_stats(word)
    return TriplyGradedTable(
        entries,
        {"mode": "raw", "l_shift": st.l_shift, "rho": int(st.rho), "vertex_offsets": offsets},
        D,
        {"word": format_braid(word), "max_deg": D, "twist": {"n": spec.n}},
    )


def twisted_e2_torus2(k, spec, D, check=True):
    """Twisted E_2 of the closure of sigma_1^k in Br(2), complete for s <= D.

    Columns are the raw cube degree t = k - |J|.
    """
    spec = _as_spec(spec)
    if k < 0:
        raise ValueError("k must be nonnegative")
    verts = dict(zip(range(k + 1), parallel_map(lambda m: twisted_vertex_r2(m, spec, D), range(k + 1))))
    maps = {}
    for m in range(1, k + 1):
        for i in range(1, m + 1):
            maps[(m, i)] = twisted_restriction_r2(m, i, spec, D, verts[m], verts[m - 1], check=check)
    entries = _twisted_cube_e2(
        k,
        lambda J: verts[len(J)],
        lambda J, p: maps[(len(J), sorted(J).index(p) + 1)],
        D,
        check,
    )
    return _twisted_table(BraidWord(2, (1,) * k), spec, D, entries, {"empty": 2, "nonempty": 4})


def twisted_restriction_redundancy_free(source, target, s, check=True):
    """Dropping the letter s between redundancy-free vertices: multiplication by x_s - x_{s+1}."""
    r = source.word.strands
    us = tuple(int(i == s - 1) for i in range(r))
    ut = tuple(int(i == s) for i in range(r))

    def mono(e):
        return {tuple(a + b for a, b in zip(e, us)): 1, tuple(a + b for a, b in zip(e, ut)): -1}

    return TwistedMap(source, target, mono, check=check)


def twisted_e2_redundancy_free(word, spec, D, check=True):
    """Twisted E_2 of a positive word whose indices are distinct; every sub-word is again such a word."""
    spec = _as_spec(spec)
    word = coerce_word(word)
    if not word.is_positive:
        raise ValueError("the twisted cube is implemented for positive words only")
    if not index_stats(word).redundancy_free:
        raise ValueError("word has repeated indices; only sigma_1^k in Br(2) is supported among those")
    k = len(word)
    subs = [frozenset(c) for m in range(k + 1) for c in combinations(range(1, k + 1), m)]

    def build(J):
        sub = BraidWord(word.strands, tuple(word.letters[p - 1] for p in sorted(J)))
        return twisted_hh_redundancy_free(sub, spec, D)

    verts = dict(zip(subs, parallel_map(build, subs)))
    maps = {}
    for J in subs:
        for p in J:
            maps[(J, p)] = twisted_restriction_redundancy_free(
                verts[J], verts[J - {p}], word.letters[p - 1], check=check
            )
    entries = _twisted_cube_e2(k, verts.__getitem__, lambda J, p: maps[(J, p)], D, check)
    return _twisted_table(word, spec, D, entries, {"formula": "r + 2|nu|"})


def twisted_e2(word, spec, D, check=True):
    """Twisted E_2 wherever every cube vertex is determined."""
    word = coerce_word(word)
    if word.strands == 2 and word.is_positive:
        return twisted_e2_torus2(len(word), spec, D, check=check)
    return twisted_e2_redundancy_free(word, spec, D, check=check)


# ---------------------------------------------------------------- second route


def koszul_product(bs, u, v):
    """Product in Λ(gamma) ⊗ B of two chain vectors."""
    out = {}
    for (g1, m1, e1), c1 in u.items():
        for (g2, m2, e2), c2 in v.items():
            sg = merge_sign(g1, g2)
            if not sg:
                continue
            for (m3, e3), c3 in bs.mul_terms({(m1, e1): 1}, {(m2, e2): 1}).items():
                _add_into(out, (g1 | g2, m3, e3), sg * c1 * c2 * c3)
    return out


def _poly_times(poly, vec, r):
    out = {}
    p = poly.with_vars(tuple(f"x{i}" for i in range(1, r + 1)))
    for e, c in p.terms.items():
        for (g, m, e2), c2 in vec.items():
            _add_into(out, (g, m, tuple(a + b for a, b in zip(e, e2))), c * c2)
    return out


def twist_cycle(hh, spec):
    """omega = sum_s S(x_s, x_{s+1}) beta_s + sum_orbits x_a^n gamma_orbit."""
    r = hh.bs.r
    omega = {}
    for s, beta in sorted(hh.beta_classes.items()):
        for k, c in _poly_times(spec.of_root(f"x{s}", f"x{s + 1}"), beta, r).items():
            _add_into(omega, k, c)
    for orbit, gamma in sorted(hh.gamma_classes.items()):
        for k, c in _poly_times(spec.of_var(f"x{min(orbit)}"), gamma, r).items():
            _add_into(omega, k, c)
    return omega


def twisted_hh_via_untwisted(word, spec, D, check=True):
    """Homology of multiplication by omega on the untwisted HH, per (s, h).

    omega has bidegree (2n + 1, 1).  Returns {(s, h): (rank, torsion)} for s <= D.
    """
    spec = _as_spec(spec)
    word = coerce_word(word)
    st = index_stats(word)
    if not st.redundancy_free:
        raise ValueError("omega is only named for redundancy-free words")
    step = 2 * spec.n + 1
    hh = hochschild_homology(BSBimodule(word), max(D + step, 3), check=check)
    omega = twist_cycle(hh, spec)
    if check and not hh.is_cycle(omega):
        raise ChainError("omega is not a cycle")
    r = word.strands
    out = {}

    def group(s, h):
        if s < 0 or h < 0 or h > r or s > hh.D:
            return FgAbGroup([])
        return hh.group(s, h)

    def mult(s, h):
        src, tgt = group(s, h), group(s + step, h + 1)
        cols = [tgt.coords(koszul_product(hh.bs, omega, lift)) if tgt.ngens else [] for lift in src.lifts]
        return [[cols[j][i] for j in range(len(cols))] for i in range(tgt.ngens)]

    for s in range(0, D + 1):
        for h in range(0, r + 1):
            mid = group(s, h)
            if mid.is_zero():
                continue
            prev = group(s - step, h - 1)
            groups = [prev, mid, group(s + step, h + 1)]
            maps = [mult(s - step, h - 1) if prev.ngens else [[] for _ in range(mid.ngens)], mult(s, h)]
            g = homology_of_fgab_complex(groups, maps)[1]
            if not g.is_zero():
                out[(s, h)] = (g.free_rank, tuple(g.torsion))
    return out


def cross_check_routes(word, spec, D, check=True):
    """Compare the quotient presentation with the omega-homology route.

    Returns (agree, quotient table {s: ...}, omega table {(s, h): ...}).  The
    omega route must be concentrated in h = r and match the quotient in every s.
    """
    word = coerce_word(word)
    q = twisted_hh_redundancy_free(word, spec, D)
    w = twisted_hh_via_untwisted(word, spec, D, check=check)
    r = word.strands
    qt = q.table()
    flat = {s: v for (s, h), v in w.items() if h == r}
    agree = all(h == r for (_s, h) in w) and flat == qt
    return agree, qt, w


__all__ = [
    "TwistSpec",
    "TwistedMap",
    "TwistedVertex",
    "cross_check_routes",
    "koszul_product",
    "twist_cycle",
    "twisted_e2",
    "twisted_e2_redundancy_free",
    "twisted_e2_torus2",
    "twisted_hh_redundancy_free",
    "twisted_hh_via_untwisted",
    "twisted_restriction_r2",
    "twisted_restriction_redundancy_free",
    "twisted_vertex_r2",
]
