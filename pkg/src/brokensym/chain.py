"""Exact integer homological algebra.

Everything is over Z with Python integers.  Large complexes are first shrunk by
cancelling unit entries of the differential (a chain homotopy equivalence whose
comparison maps are recorded), and only the small residual complex is put into
Smith normal form.  Homology groups keep generator lifts in the original basis
and a projection that turns any cycle into coordinates.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass


class ChainError(RuntimeError):
    pass


# ---------------------------------------------------------------- matrices


@dataclass
class IntMatrix:
    """Dense integer matrix with optional row/column labels."""

    data: list
    row_labels: list | None = None
    col_labels: list | None = None

    def __post_init__(self):
        self.data = [list(map(int, row)) for row in self.data]
        if self.row_labels is not None and len(self.row_labels) != len(self.data):
            raise ValueError("row label count does not match the matrix")
        if self.col_labels is not None and self.data and len(self.col_labels) != len(self.data[0]):
            raise ValueError("column label count does not match the matrix")

    @property
    def shape(self):
        return (len(self.data), len(self.data[0]) if self.data else len(self.col_labels or ()))


def _as_rows(m):
    if isinstance(m, IntMatrix):
        return [row[:] for row in m.data]
    return [list(map(int, row)) for row in m]


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a, b):
    if not a:
        return []
    cols = len(b[0]) if b else 0
    sparse_b = [[(j, x) for j, x in enumerate(row) if x] for row in b]
    out = []
    for row in a:
        acc = [0] * cols
        for k, c in enumerate(row):
            if c:
                for j, x in sparse_b[k]:
                    acc[j] += c * x
        out.append(acc)
    return out


def composite_defect(A, B, orders):
    """First column j where B @ A is nonzero modulo the target orders, else None."""
    if not A or not B or not A[0]:
        return None
    C = matmul(B, A)
    for r, row in enumerate(C):
        o = orders[r]
        for j, x in enumerate(row):
            if x and (not o or x % o):
                return j
    return None


def smith_normal_form(m, inverses=False):
    """Return ``(U, S, V)`` with ``U @ m @ V == S`` diagonal, d_1 | d_2 | ..., d_i >= 0.

    With ``inverses=True`` also return ``U^{-1}`` and ``V^{-1}``.  Pivots are chosen
    by smallest absolute value to keep entries small.
    """
    a = _as_rows(m)
    nr = len(a)
    nc = len(a[0]) if nr else (m.shape[1] if isinstance(m, IntMatrix) else 0)
    U, V = identity(nr), identity(nc)
    Ui, Vi = identity(nr), identity(nc)

    def row_add(i, j, c):  # row_i += c row_j
        a[i] = [x + c * y for x, y in zip(a[i], a[j])]
        U[i] = [x + c * y for x, y in zip(U[i], U[j])]
        for row in Ui:
            row[j] -= c * row[i]

    def col_add(i, j, c):  # col_i += c col_j
        for row in a:
            row[i] += c * row[j]
        for row in V:
            row[i] += c * row[j]
        Vi[j] = [x - c * y for x, y in zip(Vi[j], Vi[i])]

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]
        for row in Ui:
            row[i], row[j] = row[j], row[i]

    def col_swap(i, j):
        for mat in (a, V):
            for row in mat:
                row[i], row[j] = row[j], row[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def row_neg(i):
        a[i] = [-x for x in a[i]]
        U[i] = [-x for x in U[i]]
        for row in Ui:
            row[i] = -row[i]

    t = 0
    while t < min(nr, nc):
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                v = a[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        if i != t:
            row_swap(i, t)
        if j != t:
            col_swap(j, t)
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, nr):
                if a[i][t]:
                    q = a[i][t] // p
                    row_add(i, t, -q)
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, nc):
                if a[t][j]:
                    q = a[t][j] // p
                    col_add(j, t, -q)
                    if a[t][j]:
                        dirty = True
            if dirty:
                best = None
                for i in range(t, nr):
                    if a[i][t] and (best is None or abs(a[i][t]) < best[0]):
                        best = (abs(a[i][t]), i, "r")
                for j in range(t, nc):
                    if a[t][j] and (best is None or abs(a[t][j]) < best[0]):
                        best = (abs(a[t][j]), j, "c")
                if best[2] == "r" and best[1] != t:
                    row_swap(best[1], t)
                elif best[2] == "c" and best[1] != t:
                    col_swap(best[1], t)
                continue
            # divisibility of the rest of the block
            bad = None
            for i in range(t + 1, nr):
                for j in range(t + 1, nc):
                    if a[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_add(t, bad, 1)
        if a[t][t] < 0:
            row_neg(t)
        t += 1
    if inverses:
        return U, a, V, Ui, Vi
    return U, a, V


def diagonal(s):
    return [s[i][i] for i in range(min(len(s), len(s[0]) if s else 0))]


def elementary_divisors(m):
    _, s, _ = smith_normal_form(m)
    return [d for d in diagonal(s) if d]


# ------------------------------------------------------------ groups


class FgAbGroup:
    """Finitely generated abelian group  ⊕ Z/orders[i]  (order 0 means Z).

    ``lifts[i]`` is an ambient vector (dict label -> int) representing generator i.
    ``coords(v)`` maps an ambient vector to generator coordinates, torsion
    coordinates reduced into [0, order).
    """

    def __init__(self, orders, lifts=None, projector=None):
        self.orders = [int(o) for o in orders]
        self.lifts = lifts if lifts is not None else [{i: 1} for i in range(len(self.orders))]
        self._projector = projector

    @property
    def ngens(self):
        return len(self.orders)

    @property
    def free_rank(self):
        return sum(1 for o in self.orders if o == 0)

    @property
    def torsion(self):
        return sorted(o for o in self.orders if o > 1)

    def is_zero(self):
        return self.free_rank == 0 and not self.torsion

    def reduce_coords(self, c):
        return [x % o if o else x for x, o in zip(c, self.orders)]

    def coords(self, v):
        if self._projector is None:
            c = [v.get(i, 0) for i in range(self.ngens)]
        else:
            c = self._projector(v)
        return self.reduce_coords(c)

    def __repr__(self):
        parts = [f"Z/{o}" for o in self.torsion] + (["Z^%d" % self.free_rank] if self.free_rank else [])
        return "FgAbGroup(" + (" + ".join(parts) or "0") + ")"


def direct_sum(groups):
    """Direct sum of groups; lifts become (summand index, label) keyed vectors."""
    orders, lifts, spans = [], [], []
    for n, g in enumerate(groups):
        spans.append((len(orders), g))
        orders.extend(g.orders)
        lifts.extend({(n, k): c for k, c in lift.items()} for lift in g.lifts)

    def proj(v):
        out = []
        for n, (_, g) in enumerate(spans):
            part = {k: c for (m, k), c in v.items() if m == n}
            out.extend(g.coords(part))
        return out

    return FgAbGroup(orders, lifts, proj)


def _cokernel_dense(rows, m):
    """Z^m / rowspan(rows) as (orders, generator vectors, projection matrix).

    Projection: coords = v @ P (row vector convention); generators are rows.
    """
    if not rows:
        return [0] * m, identity(m), identity(m)
    _, s, V, _, Vi = smith_normal_form(rows, inverses=True)
    d = diagonal(s)
    orders, gens, keep = [], [], []
    for i in range(m):
        o = d[i] if i < len(d) else 0
        if o == 1:
            continue
        orders.append(o)
        gens.append(Vi[i])
        keep.append(i)
    P = [[V[r][i] for i in keep] for r in range(m)]
    return orders, gens, P


# ------------------------------------------------------------ sparse lattice


class Lattice:
    """Integer row lattice kept in echelon form (leading coefficients positive).

    ``order`` fixes the column order; vectors are dicts label -> int.
    """

    def __init__(self, labels):
        self.labels = list(labels)
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        self.rows = {}  # lead index -> dict index -> int

    def _to_idx(self, v):
        return {self.index[k]: c for k, c in v.items() if c}

    @staticmethod
    def _axpy(v, c, w):
        for k, x in w.items():
            nv = v.get(k, 0) + c * x
            if nv:
                v[k] = nv
            else:
                v.pop(k, None)

    def insert(self, v, indexed=False):
        v = dict(v) if indexed else self._to_idx(v)
        while v:
            lead = min(v)
            b = v[lead]
            row = self.rows.get(lead)
            if row is None:
                if b < 0:
                    v = {k: -x for k, x in v.items()}
                self.rows[lead] = v
                return True
            a = row[lead]
            if b % a == 0:
                self._axpy(v, -(b // a), row)
                continue
            g, u, w = _xgcd(a, b)
            new = {}
            self._axpy(new, u, row)
            self._axpy(new, w, v)
            rest = {}
            self._axpy(rest, a // g, v)
            self._axpy(rest, -(b // g), row)
            self.rows[lead] = new
            v = rest
        return False

    @property
    def rank(self):
        return len(self.rows)

    def reduce(self, v, indexed=False):
        """Canonical representative of v modulo the lattice."""
        v = dict(v) if indexed else self._to_idx(v)
        for p in sorted(self.rows):
            c = v.get(p)
            if c:
                a = self.rows[p][p]
                q = c // a
                if q:
                    self._axpy(v, -q, self.rows[p])
        if indexed:
            return v
        return {self.labels[k]: c for k, c in v.items()}

    def cokernel(self):
        """Z^labels / lattice as an FgAbGroup (lifts and coords over the labels)."""
        unit = {p for p, row in self.rows.items() if row[p] == 1}
        hard = sorted(p for p in self.rows if p not in unit)
        free = [i for i in range(len(self.labels)) if i not in self.rows]
        keep = sorted(hard + free)
        pos = {k: n for n, k in enumerate(keep)}

        def unit_reduce(v):
            for p in sorted(unit):
                c = v.get(p)
                if c:
                    self._axpy(v, -c, self.rows[p])
            return v

        rel_rows = []
        for p in hard:
            r = unit_reduce(dict(self.rows[p]))
            vec = [0] * len(keep)
            for k, c in r.items():
                vec[pos[k]] = c
            rel_rows.append(vec)
        orders, gens, P = _cokernel_dense(rel_rows, len(keep))
        lifts = [{self.labels[keep[k]]: c for k, c in enumerate(g) if c} for g in gens]
        def proj(v):
            w = unit_reduce(self._to_idx(v))
            dense = [0] * len(keep)
            for k, c in w.items():
                dense[pos[k]] = c
            return [sum(dense[r] * P[r][i] for r in range(len(keep)) if dense[r]) for i in range(len(orders))]

        return FgAbGroup(orders, lifts, proj)


def _xgcd(a, b):
    """g = gcd(a, b) > 0 and u*a + w*b = g."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    aa, bb = a, b
    while bb:
        q = aa // bb
        aa, bb = bb, aa - q * bb
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if aa < 0:
        aa, x0, y0 = -aa, -x0, -y0
    return aa, x0, y0


# ------------------------------------------------------------ complexes


def apply_sparse(cols, v):
    """Apply a column-dict matrix {col: {row: c}} to a sparse vector."""
    out = {}
    for k, c in v.items():
        col = cols.get(k)
        if not col:
            continue
        for r, x in col.items():
            nv = out.get(r, 0) + c * x
            if nv:
                out[r] = nv
            else:
                del out[r]
    return out


@dataclass
class _Cancel:
    p: int
    a: object
    b: object
    eps: int
    gamma: dict
    delta: dict


class ChainComplex:
    """Finite cochain complex of free Z-modules; ``diffs[p]`` maps C_p -> C_{p+1}.

    ``bases[p]`` is the ordered label list of C_p; ``diffs[p]`` is a dict
    column label -> {row label: coefficient}.
    """

    def __init__(self, bases, diffs, check=True):
        self.bases = {p: list(b) for p, b in bases.items() if b}
        self.diffs = {p: {a: dict(col) for a, col in d.items() if col} for p, d in diffs.items()}
        self._reduction = None
        if check:
            self.check_d_squared()

    def positions(self):
        return sorted(self.bases)

    def d(self, p, v):
        return apply_sparse(self.diffs.get(p, {}), v)

    def check_d_squared(self):
        for p, cols in self.diffs.items():
            nxt = self.diffs.get(p + 1)
            if not nxt:
                continue
            for a, col in cols.items():
                if apply_sparse(nxt, col):
                    raise ChainError(f"d∘d != 0 on basis element {a!r} at position {p}")

    def reduction(self):
        if self._reduction is None:
            self._reduction = _Reduction(self)
        return self._reduction

    def homology(self, p):
        return self.reduction().homology(p)


class _Reduction:
    def __init__(self, cx):
        self.cx = cx
        basis = {p: dict.fromkeys(b) for p, b in cx.bases.items()}
        cols = {p: {a: dict(c) for a, c in d.items()} for p, d in cx.diffs.items()}
        rows = {}
        for p, d in cols.items():
            rp = rows.setdefault(p, {})
            for a, col in d.items():
                for b, c in col.items():
                    rp.setdefault(b, {})[a] = c
        self.events = {}
        self.records = []
        for p in sorted(cols):
            self._cancel_position(p, basis, cols, rows)
        self.basis = {p: list(b) for p, b in basis.items()}
        self.cols = cols
        self._homology = {}
        self._indices = {}

    def _cancel_position(self, p, basis, cols, rows):
        cp, rp = cols[p], rows[p]
        while True:
            heap = [(len(col), n, a) for n, (a, col) in enumerate(cp.items()) if any(abs(c) == 1 for c in col.values())]
            if not heap:
                return
            heapq.heapify(heap)
            progressed = False
            while heap:
                _, _, a = heapq.heappop(heap)
                col = cp.get(a)
                if not col:
                    continue
                best = None
                for b, c in col.items():
                    if abs(c) == 1:
                        lr = len(rp[b])
                        if best is None or lr < best[0]:
                            best = (lr, b)
                if best is None:
                    continue
                self._cancel(p, a, best[1], basis, cols, rows)
                progressed = True
            if not progressed:
                return

    def _cancel(self, p, a, b, basis, cols, rows):
        cp, rp = cols[p], rows[p]
        eps = cp[a][b]
        gamma = {k: c for k, c in cp[a].items() if k != b}
        delta = {k: c for k, c in rp[b].items() if k != a}
        for x, dx in delta.items():
            f = -eps * dx
            colx = cp[x]
            del colx[b]
            for k, g in gamma.items():
                nv = colx.get(k, 0) + f * g
                if nv:
                    colx[k] = nv
                    rp[k][x] = nv
                else:
                    colx.pop(k, None)
                    rp[k].pop(x, None)
            if not colx:
                del cp[x]
        for k in cp[a]:
            if k != b:
                rp[k].pop(a, None)
        del cp[a]
        del rp[b]
        for k in gamma:
            if k in rp and not rp[k]:
                del rp[k]
        prev_c, prev_r = cols.get(p - 1), rows.get(p - 1)
        if prev_r and a in prev_r:
            for y in prev_r.pop(a):
                cy = prev_c[y]
                cy.pop(a, None)
                if not cy:
                    del prev_c[y]
        next_c, next_r = cols.get(p + 1), rows.get(p + 1)
        if next_c and b in next_c:
            for z in next_c.pop(b):
                rz = next_r[z]
                rz.pop(b, None)
                if not rz:
                    del next_r[z]
        del basis[p][a]
        del basis[p + 1][b]
        rec = _Cancel(p, a, b, eps, gamma, delta)
        n = len(self.records)
        self.records.append(rec)
        self.events.setdefault(p, []).append((n, "a"))
        self.events.setdefault(p + 1, []).append((n, "b"))

    def _index(self, p):
        """Per-position lookup tables: b-key -> event, a-keys, delta-key -> a-events."""
        idx = self._indices.get(p)
        if idx is None:
            b_event, a_keys, users = {}, set(), {}
            for n, kind in self.events.get(p, ()):
                rec = self.records[n]
                if kind == "a":
                    a_keys.add(rec.a)
                    for x in rec.delta:
                        users.setdefault(x, []).append(n)
                else:
                    b_event[rec.b] = n
            idx = self._indices[p] = (b_event, a_keys, users)
        return idx

    def project(self, v, p):
        """Comparison map original -> residual at position p."""
        b_event, a_keys, _ = self._index(p)
        v = dict(v)
        heap = [b_event[k] for k in v if k in b_event]
        heapq.heapify(heap)
        seen = set(heap)
        while heap:
            rec = self.records[heapq.heappop(heap)]
            c = v.pop(rec.b, 0)
            if not c:
                continue
            f = -rec.eps * c
            for k, g in rec.gamma.items():
                nv = v.get(k, 0) + f * g
                if nv:
                    v[k] = nv
                    n = b_event.get(k)
                    if n is not None and n not in seen:
                        seen.add(n)
                        heapq.heappush(heap, n)
                else:
                    del v[k]
        return {k: c for k, c in v.items() if k not in a_keys}

    def lift(self, v, p):
        """Comparison map residual -> original at position p."""
        _, _, users = self._index(p)
        v = dict(v)
        heap = []
        seen = set()
        for x in v:
            for n in users.get(x, ()):
                if n not in seen:
                    seen.add(n)
                    heap.append(-n)
        heapq.heapify(heap)
        while heap:
            rec = self.records[-heapq.heappop(heap)]
            s = sum(v.get(x, 0) * c for x, c in rec.delta.items())
            if s:
                v[rec.a] = -rec.eps * s
                for n in users.get(rec.a, ()):
                    if n not in seen:
                        seen.add(n)
                        heapq.heappush(heap, -n)
        return v

    def homology(self, p):
        if p in self._homology:
            return self._homology[p]
        basis = self.basis.get(p, [])
        idx = {k: i for i, k in enumerate(basis)}
        n = len(basis)
        out_cols = self.cols.get(p, {})
        nxt = self.basis.get(p + 1, [])
        nidx = {k: i for i, k in enumerate(nxt)}
        dout = [[0] * n for _ in nxt]
        for a, col in out_cols.items():
            for b, c in col.items():
                dout[nidx[b]][idx[a]] = c
        prv = self.basis.get(p - 1, [])
        din = [[0] * len(prv) for _ in range(n)]
        for j, a in enumerate(prv):
            for b, c in self.cols.get(p - 1, {}).get(a, {}).items():
                din[idx[b]][j] = c
        orders, gens, P = _dense_homology(din, dout, n)
        lifts = []
        for g in gens:
            res = {basis[i]: c for i, c in enumerate(g) if c}
            lifts.append(self.lift(res, p))
        cx = self.cx

        def proj(v, _p=p):
            if cx.d(_p, v):
                raise ChainError(f"vector at position {_p} is not a cycle")
            w = [(idx[k], c) for k, c in self.project(v, _p).items()]
            return [sum(P[i][j] * c for j, c in w) for i in range(len(orders))]

        grp = FgAbGroup(orders, lifts, proj)
        self._homology[p] = grp
        return grp


def _dense_homology(din, dout, n):
    """Homology at the middle of Z^q --din--> Z^n --dout--> Z^m.

    Returns orders, generator vectors (length n) and a projection matrix P with
    coords = P @ z for cycles z.
    """
    if n == 0:
        return [], [], []
    zero_out = not any(any(r) for r in dout)
    zero_in = not any(any(r) for r in din)
    if zero_out and zero_in:
        return [0] * n, identity(n), identity(n)
    if zero_out:
        K, Kinv_rows, z = identity(n), identity(n), n
    else:
        _, s, V, _, Vi = smith_normal_form(dout, inverses=True)
        rho = sum(1 for d in diagonal(s) if d)
        z = n - rho
        K = [row[rho:] for row in V]  # n x z
        Kinv_rows = Vi[rho:]  # z x n
    q = len(din[0]) if din else 0
    B = matmul(Kinv_rows, din) if q else [[] for _ in range(z)]
    if q == 0 or not any(any(r) for r in B):
        U2, U2i, e = identity(z), identity(z), []
    else:
        U2, s2, _, U2i, _ = smith_normal_form(B, inverses=True)
        e = [d for d in diagonal(s2) if d]
    orders, keep = [], []
    for i in range(z):
        o = e[i] if i < len(e) else 0
        if o == 1:
            continue
        orders.append(o)
        keep.append(i)
    gens_full = matmul(K, U2i)  # n x z
    gens = [[gens_full[r][i] for r in range(n)] for i in keep]
    Pfull = matmul(U2, Kinv_rows)
    P = [Pfull[i] for i in keep]
    return orders, gens, P


class GradedComplex:
    """A family of finite complexes indexed by an internal weight, up to a cutoff."""

    def __init__(self, build, cutoff):
        self._build = build
        self.cutoff = cutoff
        self._cache = {}

    def slice(self, weight):
        if weight not in self._cache:
            self._cache[weight] = self._build(weight)
        return self._cache[weight]


def homology(c, at):
    """Homology of ``c`` at ``at`` (position, or (weight, position) for graded complexes)."""
    if isinstance(c, GradedComplex):
        weight, p = at
        if weight > c.cutoff:
            raise ChainError(f"weight {weight} lies above the cutoff {c.cutoff}")
        return c.slice(weight).homology(p)
    if at not in c.bases and (at - 1) not in c.bases and (at + 1) not in c.bases:
        raise ChainError(f"no chain data near position {at}")
    return c.homology(at)


def induced_map(f, source, target):
    """Matrix (rows: target generators, cols: source generators) induced by ``f``.

    ``f`` maps an ambient source vector to an ambient target vector.  Target
    coordinates raise ChainError when the image is not a cycle.
    """
    cols = [target.coords(f(lift)) for lift in source.lifts]
    return [[cols[j][i] for j in range(len(cols))] for i in range(target.ngens)]


def check_chain_map(f, src, tgt, positions, shift=0, sign=1):
    """Assert d∘f = sign * f∘d on basis elements of ``src`` at the given positions."""
    for p in positions:
        for a in src.bases.get(p, ()):
            lhs = tgt.d(p + shift, f({a: 1}))
            rhs = f(src.d(p, {a: 1})) if src.diffs.get(p) else {}
            if sign != 1:
                rhs = {k: sign * c for k, c in rhs.items()}
            if lhs != rhs:
                raise ChainError(f"map does not commute with differentials at {a!r} (position {p})")


# ------------------------------------------------------------ complexes of groups


def _integer_kernel(rows, ncols):
    """Basis (list of vectors) of the integer kernel of a dense matrix."""
    if ncols == 0:
        return []
    if not rows or not any(any(r) for r in rows):
        return identity(ncols)
    _, s, V = smith_normal_form(rows)
    rho = sum(1 for d in diagonal(s) if d)
    return [[V[r][i] for r in range(ncols)] for i in range(rho, ncols)]


def _echelon_basis(vectors, n):
    lat = Lattice(range(n))
    for v in vectors:
        lat.insert({i: c for i, c in enumerate(v) if c})
    return lat


def _solve_echelon(lat, v):
    """Coefficients c with sum_p c_p row_p == v (exact), keyed by lead; None if impossible."""
    w = {i: c for i, c in enumerate(v) if c}
    coeffs = {}
    for p in sorted(lat.rows):
        c = w.get(p)
        if not c:
            continue
        a = lat.rows[p][p]
        if c % a:
            return None
        coeffs[p] = c // a
        Lattice._axpy(w, -(c // a), lat.rows[p])
    return coeffs if not w else None


def homology_of_fgab_complex(groups, maps):
    """Homology of G_0 -> G_1 -> ... with ``maps[i]`` the matrix of G_i -> G_{i+1}.

    Matrices act on generator coordinates (rows index the target).  Returns one
    FgAbGroup per input group; its lifts are coordinate vectors in G_i (dicts
    index -> int) and ``coords`` accepts such vectors.
    """
    n = len(groups)
    if len(maps) != max(n - 1, 0):
        raise ValueError("need exactly one map between consecutive groups")
    for i in range(n - 2):
        j = composite_defect(maps[i], maps[i + 1], groups[i + 2].orders)
        if j is not None:
            raise ChainError(f"composite map nonzero on generator {j} of group {i}")
    if all(not o for G in groups for o in G.orders):
        return _free_complex_homology(groups, maps)
    out = []
    for i, G in enumerate(groups):
        m = G.ngens
        if m == 0:
            out.append(FgAbGroup([]))
            continue
        # cycles: x with B x in the relation lattice of G_{i+1}
        if i + 1 < n and groups[i + 1].ngens:
            B = maps[i]
            T = groups[i + 1]
            tors = [k for k, o in enumerate(T.orders) if o]
            stacked = [list(B[r]) + [(-T.orders[r] if r == k else 0) for k in tors] for r in range(T.ngens)]
            ker = _integer_kernel(stacked, m + len(tors))
            zgens = [v[:m] for v in ker]
        else:
            zgens = identity(m)
        Z = _echelon_basis(zgens, m)
        leads = sorted(Z.rows)
        # boundaries and relations
        bnd = []
        if i > 0 and groups[i - 1].ngens:
            A = maps[i - 1]
            bnd.extend([A[r][j] for r in range(m)] for j in range(groups[i - 1].ngens))
        for k, o in enumerate(G.orders):
            if o:
                bnd.append([o if r == k else 0 for r in range(m)])
        rel = []
        for v in bnd:
            c = _solve_echelon(Z, v)
            if c is None:
                raise ChainError(f"boundary in group {i} is not a cycle")
            rel.append([c.get(p, 0) for p in leads])
        orders, hgens, P = _cokernel_dense(rel, len(leads))
        lifts = []
        for g in hgens:
            vec = {}
            for coef, p in zip(g, leads):
                if coef:
                    Lattice._axpy(vec, coef, Z.rows[p])
            lifts.append(vec)

        def proj(v, Z=Z, leads=leads, P=P, m=m, i=i):
            dense = [v.get(k, 0) for k in range(m)]
            c = _solve_echelon(Z, dense)
            if c is None:
                raise ChainError(f"vector is not a cycle in group {i}")
            row = [c.get(p, 0) for p in leads]
            return [sum(row[r] * P[r][j] for r in range(len(leads))) for j in range(len(P[0]) if P else 0)]

        out.append(FgAbGroup(orders, lifts, proj))
    return out


def _free_complex_homology(groups, maps):
    """Free groups throughout: hand the complex to the cancellation engine."""
    bases = {i: list(range(G.ngens)) for i, G in enumerate(groups)}
    diffs = {}
    for i, M in enumerate(maps):
        cols = {}
        for r, row in enumerate(M):
            for j, c in enumerate(row):
                if c:
                    cols.setdefault(j, {})[r] = c
        diffs[i] = cols
    cx = ChainComplex(bases, diffs, check=False)
    return [cx.homology(i) if G.ngens else FgAbGroup([]) for i, G in enumerate(groups)]


__all__ = [
    "ChainComplex",
    "ChainError",
    "FgAbGroup",
    "GradedComplex",
    "IntMatrix",
    "Lattice",
    "apply_sparse",
    "check_chain_map",
    "composite_defect",
    "direct_sum",
    "elementary_divisors",
    "homology",
    "homology_of_fgab_complex",
    "induced_map",
    "matmul",
    "smith_normal_form",
]
