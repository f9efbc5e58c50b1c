"""Koszul complexes computing Hochschild homology of Bott–Samelson bimodules.

Chain labels are triples ``(gmask, dmask, exps)``: bit m-1 of ``gmask`` is the
exterior generator gamma_m (indexed by the dual weight h_m^*), and
``(dmask, exps)`` is a normal-form basis element of the bimodule.  Gradings: the
exterior degree h = |gmask| and the internal degree s = h + 2|dmask| + 2|exps|,
so d maps (s, h) to (s + 1, h - 1).

The generators gamma_m with m outside nu(I) have zero differential, so the
complex is Λ(inactive) ⊗ K(active) and only the active factor is reduced.
"""

from __future__ import annotations

from .braid import coerce_word
from .chain import ChainComplex, ChainError, FgAbGroup, GradedComplex, smith_normal_form, diagonal
from .soergel import BSBimodule, _add_into, mask_of, positions_of


def merge_sign(left, right):
    """Sign of gamma_left * gamma_right -> gamma_{left ∪ right} (0 if they overlap)."""
    if left & right:
        return 0
    inv = 0
    for g in positions_of(left):
        inv += sum(1 for a in positions_of(right) if a < g)
    return -1 if inv % 2 else 1


class KoszulComplex:
    """Λ(gamma_1..gamma_r) ⊗ B with d(gamma_m) = delta_hat_m, truncated at internal degree D."""

    def __init__(self, bs, D, check=True):
        self.bs = bs
        self.r = bs.r
        self.D = D
        self.check = check
        self.active = tuple(s for s in range(1, self.r) if bs.positions(s))
        self.inactive = tuple(m for m in range(1, self.r + 1) if m not in self.active)
        self.active_mask = mask_of(self.active)
        self.inactive_mask = mask_of(self.inactive)
        self.graded = GradedComplex(self._build_slice, D + len(self.active))

    # full-complex differential on one label
    def d_label(self, label):
        gmask, dmask, e = label
        out = {}
        for p, m in enumerate(positions_of(gmask)):
            if not (self.active_mask >> (m - 1)) & 1:
                continue
            sign = -1 if p % 2 else 1
            g2 = gmask & ~(1 << (m - 1))
            for (mask2, e2), c in self.bs.delta_hat_times(m, dmask).items():
                _add_into(out, (g2, mask2, tuple(a + b for a, b in zip(e, e2))), sign * c)
        return out

    def d(self, v):
        out = {}
        for lab, c in v.items():
            for k2, c2 in self.d_label(lab).items():
                _add_into(out, k2, c * c2)
        return out

    def labels(self, s, h, gammas=None):
        """Basis of the chain group in bidegree (s, h), exterior part drawn from ``gammas``."""
        gammas = tuple(range(1, self.r + 1)) if gammas is None else gammas
        bsdeg = s - h
        if bsdeg < 0 or bsdeg % 2 or h > len(gammas):
            return []
        out = []
        for G in _subsets(gammas, h):
            gm = mask_of(G)
            for dm, e in self.bs.basis(bsdeg):
                out.append((gm, dm, e))
        return out

    def _build_slice(self, weight):
        """Active factor at weight s + h = weight, positioned by s."""
        bases, diffs = {}, {}
        for h in range(0, len(self.active) + 1):
            s = weight - h
            labs = self.labels(s, h, self.active)
            if labs:
                bases[s] = labs
        for s, labs in bases.items():
            if s + 1 in bases:
                diffs[s] = {lab: self.d_label(lab) for lab in labs}
        return ChainComplex(bases, diffs, check=self.check)

    def active_homology(self, s, h):
        if (s + h) % 2 or h > len(self.active) or s - h < 0:
            return FgAbGroup([])
        if s + h > self.graded.cutoff:
            raise ChainError(f"bidegree ({s}, {h}) lies above the cutoff")
        cx = self.graded.slice(s + h)
        if s not in cx.bases:
            return FgAbGroup([])
        return cx.homology(s)


def _subsets(items, size):
    from itertools import combinations

    return combinations(items, size)


def koszul(B, D, check=True):
    if not isinstance(B, BSBimodule):
        B = BSBimodule(coerce_word(B))
    return KoszulComplex(B, D, check=check)


class HHModule:
    """Hochschild homology groups HH(s, h) for s <= D, with named classes."""

    def __init__(self, kc):
        self.koszul = kc
        self.bs = kc.bs
        self.D = kc.D
        self._groups = {}
        self.gamma_classes = {}
        self.beta_classes = {}

    @property
    def word(self):
        return self.bs.word

    def group(self, s, h):
        key = (s, h)
        if key in self._groups:
            return self._groups[key]
        if s > self.D:
            raise ChainError(f"internal degree {s} is above the cutoff {self.D}")
        kc = self.koszul
        parts, sectors = [], set()
        for size in range(0, min(h, len(kc.inactive)) + 1):
            for Gi in _subsets(kc.inactive, size):
                gi = mask_of(Gi)
                sectors.add(gi)
                grp = kc.active_homology(s - size, h - size)
                if grp.ngens:
                    parts.append((gi, grp))
        orders, lifts = [], []
        for gi, grp in parts:
            orders.extend(grp.orders)
            for lift in grp.lifts:
                vec = {}
                for (ga, dm, e), c in lift.items():
                    sg = merge_sign(gi, ga)
                    vec[(gi | ga, dm, e)] = sg * c
                lifts.append(vec)
        imask = kc.inactive_mask

        def proj(v):
            split = {}
            for (g, dm, e), c in v.items():
                gi = g & imask
                ga = g & ~imask
                split.setdefault(gi, {})[(ga, dm, e)] = c * merge_sign(gi, ga)
            out = []
            for gi, grp in parts:
                part = split.pop(gi, None)
                out.extend(grp.coords(part) if part else [0] * grp.ngens)
            if any(v for gi, v in split.items() if gi not in sectors):
                raise ChainError("vector has components outside the requested bidegree")
            return out

        grp = FgAbGroup(orders, lifts, proj)
        self._groups[key] = grp
        return grp

    def bidegrees(self):
        r = self.bs.r
        for s in range(0, self.D + 1):
            for h in range(0, min(r, s) + 1):
                if (s - h) % 2 == 0:
                    yield s, h

    def table(self):
        """{(s, h): (free rank, torsion)} for all nonzero groups with s <= D."""
        out = {}
        for s, h in self.bidegrees():
            g = self.group(s, h)
            if not g.is_zero():
                out[(s, h)] = (g.free_rank, g.torsion)
        return out

    def ranks(self):
        return {k: v[0] for k, v in self.table().items()}

    def torsion(self):
        return {k: v[1] for k, v in self.table().items() if v[1]}

    def is_cycle(self, v):
        return not self.koszul.d(v)


def _gamma_vector(m, zero):
    return {(1 << (m - 1), 0, zero): 1} if m >= 1 else {}


def gamma_class(kc, orbit):
    """Cycle gamma_b - gamma_{a-1} for the orbit {a..b}; restricts to sum_{i in orbit} of x_i-duals."""
    zero = (0,) * kc.r
    a, b = min(orbit), max(orbit)
    v = dict(_gamma_vector(b, zero))
    if a > 1:
        v[(1 << (a - 2), 0, zero)] = -1
    return v


def beta_class(kc, s):
    """gamma_s (delta_hat_s + alpha_s) plus a correction in gamma ⊗ (delta-ideal) making it a cycle."""
    bs = kc.bs
    pos = bs.positions(s)
    if len(pos) != 1:
        raise ValueError(f"beta_{s} is only named when the index occurs once")
    j = pos[0]
    r = kc.r
    gs = 1 << (s - 1)
    e_s = tuple(int(i == s - 1) for i in range(r))
    e_t = tuple(int(i == s) for i in range(r))
    zero = (0,) * r
    base = {(gs, 1 << (j - 1), zero): 1, (gs, 0, e_s): 1, (gs, 0, e_t): -1}
    err = kc.d(base)
    if not err:
        return base, {}
    # correction supported on gamma_u ⊗ delta-monomials, excluding gamma_s ⊗ delta_j
    cand = [lab for lab in kc.labels(3, 1) if lab[1] and lab != (gs, 1 << (j - 1), zero)]
    rows = sorted({k for lab in cand for k in kc.d_label(lab)} | set(err))
    ridx = {k: i for i, k in enumerate(rows)}
    M = [[0] * len(cand) for _ in rows]
    for jj, lab in enumerate(cand):
        for k, c in kc.d_label(lab).items():
            M[ridx[k]][jj] = c
    y = [0] * len(rows)
    for k, c in err.items():
        y[ridx[k]] = -c
    x = _solve(M, y)
    if x is None:
        raise ChainError(f"no decomposable correction makes beta_{s} a cycle")
    corr = {cand[i]: c for i, c in enumerate(x) if c}
    out = dict(base)
    for k, c in corr.items():
        _add_into(out, k, c)
    assert not kc.d(out)
    return out, corr


def _solve(M, y):
    """Integer solution of M x = y, or None."""
    if not M:
        return [] if not any(y) else None
    U, S, V = smith_normal_form(M)
    uy = [sum(U[i][k] * y[k] for k in range(len(y))) for i in range(len(y))]
    d = diagonal(S)
    n = len(M[0])
    z = [0] * n
    for i, val in enumerate(uy):
        di = d[i] if i < len(d) else 0
        if di == 0:
            if val:
                return None
        else:
            if val % di:
                return None
            z[i] = val // di
    return [sum(V[i][k] * z[k] for k in range(n)) for i in range(n)]


def hochschild_homology(B, D, check=True):
    """HH of the bimodule up to internal degree D, with gamma_l and beta_s located."""
    kc = koszul(B, D, check=check)
    hh = HHModule(kc)
    from .braid import orbits_of

    if D < 1:
        raise ValueError("cutoff too small to contain the degree-1 classes gamma_l")
    for orbit in orbits_of(kc.r, set(kc.active)):
        hh.gamma_classes[orbit] = gamma_class(kc, orbit)
    singles = [s for s in kc.active if len(kc.bs.positions(s)) == 1]
    if singles and D < 3:
        raise ValueError("cutoff too small to contain the degree-3 classes beta_s")
    for s in singles:
        hh.beta_classes[s], _ = beta_class(kc, s)
    return hh


# ---------------------------------------------------------------- maps


def lift_bs_map(fmap):
    """Extend a map on bimodule basis labels (mask, exps) -> terms to Koszul vectors, gammas fixed."""
    cache = {}

    def f(v):
        out = {}
        for (g, dm, e), c in v.items():
            key = (dm, e)
            img = cache.get(key)
            if img is None:
                img = cache[key] = fmap(dm, e)
            for (dm2, e2), c2 in img.items():
                _add_into(out, (g, dm2, e2), c * c2)
        return out

    return f


def restriction_bs_map(j):
    """delta_j -> 0 and later deltas reindexed."""
    bit = 1 << (j - 1)
    low = bit - 1

    def fmap(mask, e):
        if mask & bit:
            return {}
        return {((mask & low) | ((mask >> 1) & ~low), e): 1}

    return fmap


def check_bs_map_commutes(fmap, src, tgt, D, degree_shift=0):
    """f(delta_hat_m b) == delta_hat_m f(b) for all m and basis b up to degree D - 2."""
    for m in range(1, src.r):
        for d in range(0, D - 1, 2):
            for mask, e in src.basis(d):
                lhs = {}
                for (mk, ek), c in src.delta_hat_times(m, mask).items():
                    for kk, c2 in fmap(mk, tuple(a + b for a, b in zip(e, ek))).items():
                        _add_into(lhs, kk, c * c2)
                rhs = {}
                for (mk, ek), c in fmap(mask, e).items():
                    for (m2, e2), c2 in tgt.delta_hat_times(m, mk).items():
                        _add_into(rhs, (m2, tuple(a + b for a, b in zip(ek, e2))), c * c2)
                if lhs != rhs:
                    raise ChainError(
                        f"map does not commute with d(gamma_{m}) on {(positions_of(mask), e)} "
                        f"({src.word} -> {tgt.word})"
                    )


class HHMap:
    """Map of HH modules induced by a bimodule-level map (gammas fixed)."""

    def __init__(self, source, target, fmap, s_shift=0):
        self.source = source
        self.target = target
        self.fmap = fmap
        self.s_shift = s_shift
        self.chain = lift_bs_map(fmap)
        self._cache = {}

    def matrix(self, s, h):
        key = (s, h)
        if key not in self._cache:
            src = self.source.group(s, h)
            tgt = self.target.group(s + self.s_shift, h)
            cols = [tgt.coords(self.chain(lift)) for lift in src.lifts]
            self._cache[key] = [[cols[j][i] for j in range(len(cols))] for i in range(tgt.ngens)]
        return self._cache[key]

    def image_of(self, v):
        return self.chain(v)


def hh_restriction(word, j, D, check=True, source=None, target=None):
    """Map HH(B(w)) -> HH(B(w without position j)); j=None gives the identity."""
    word = coerce_word(word)
    src = source or hochschild_homology(BSBimodule(word), D, check=check)
    if j is None:
        return HHMap(src, src, lambda mask, e: {(mask, e): 1})
    letters = word.letters[: j - 1] + word.letters[j:]
    from .braid import BraidWord

    tgt = target or hochschild_homology(BSBimodule(BraidWord(word.strands, letters)), D, check=check)
    fmap = restriction_bs_map(j)
    if check:
        check_bs_map_commutes(fmap, src.bs, tgt.bs, D)
    return HHMap(src, tgt, fmap)


# ---------------------------------------------------------------- oracle


def structural_oracle(word, D):
    """Expected {(s, h): rank} from the closed-form Hilbert series.

    (1+q^2)^{k-|nu|} (1+q^3 u)^{|nu|} (1+q u)^{r-|nu|} / (1-q^2)^r, with q tracking s
    and u tracking h.
    """
    word = coerce_word(word)
    r, k = word.strands, len(word)
    nu = len(set(word.indices))
    series = {(0, 0): 1}

    def mul(a, b):
        out = {}
        for (s1, h1), c1 in a.items():
            for (s2, h2), c2 in b.items():
                if s1 + s2 <= D:
                    key = (s1 + s2, h1 + h2)
                    out[key] = out.get(key, 0) + c1 * c2
        return out

    for _ in range(k - nu):
        series = mul(series, {(0, 0): 1, (2, 0): 1})
    for _ in range(nu):
        series = mul(series, {(0, 0): 1, (3, 1): 1})
    for _ in range(r - nu):
        series = mul(series, {(0, 0): 1, (1, 1): 1})
    geo = {(2 * i, 0): 1 for i in range(D // 2 + 1)}
    for _ in range(r):
        series = mul(series, geo)
    return {key: c for key, c in series.items() if c}


__all__ = [
    "HHMap",
    "HHModule",
    "KoszulComplex",
    "beta_class",
    "gamma_class",
    "hh_restriction",
    "hochschild_homology",
    "koszul",
    "structural_oracle",
]
