"""Graded integer polynomials, the symmetric-group action, divided differences and
degreewise-presented graded quotient modules.

Grading: every variable has degree 2 except formal coefficients ``b<i>`` which
have degree -2i.
"""

from __future__ import annotations

import itertools
import re
from functools import lru_cache

from .chain import FgAbGroup, Lattice

_NAT = re.compile(r"(\d+)")


def var_key(name):
    return tuple(int(t) if t.isdigit() else t for t in _NAT.split(name))


@lru_cache(maxsize=None)
def var_degree(name):
    m = re.fullmatch(r"b(\d+)", name)
    return -2 * int(m.group(1)) if m else 2


def x_vars(r):
    return tuple(f"x{i}" for i in range(1, r + 1))


class GradedPoly:
    """Integer polynomial as a map exponent-tuple -> coefficient over ``vars``."""

    __slots__ = ("vars", "terms")

    def __init__(self, vars=(), terms=None):
        vars = tuple(vars)
        terms = {tuple(e): int(c) for e, c in (terms or {}).items() if c}
        order = sorted(range(len(vars)), key=lambda i: var_key(vars[i]))
        if order != list(range(len(vars))):
            vars = tuple(vars[i] for i in order)
            terms = {tuple(e[i] for i in order): c for e, c in terms.items()}
        if len(set(vars)) != len(vars):
            raise ValueError("repeated variable name")
        self.vars = vars
        self.terms = terms

    # -- constructors
    @classmethod
    def const(cls, c, vars=()):
        return cls(vars, {(0,) * len(vars): c})

    @classmethod
    def var(cls, name, vars=None):
        vars = tuple(vars) if vars else (name,)
        if name not in vars:
            vars = vars + (name,)
        return cls(vars, {tuple(int(v == name) for v in vars): 1})

    @classmethod
    def from_monomials(cls, mapping):
        """``{(("x1", 2), ("x2", 1)): 3, (): 1}`` style input."""
        names = sorted({v for mono in mapping for v, _ in mono}, key=var_key)
        pos = {v: i for i, v in enumerate(names)}
        terms = {}
        for mono, c in mapping.items():
            e = [0] * len(names)
            for v, k in mono:
                e[pos[v]] += k
            terms[tuple(e)] = terms.get(tuple(e), 0) + c
        return cls(names, terms)

    # -- alignment
    def with_vars(self, vars):
        """Same polynomial expressed over a superset ``vars`` (sorted order)."""
        vars = tuple(sorted(set(vars) | set(self.vars), key=var_key))
        if vars == self.vars:
            return self
        idx = [vars.index(v) for v in self.vars]
        n = len(vars)
        terms = {}
        for e, c in self.terms.items():
            f = [0] * n
            for i, k in zip(idx, e):
                f[i] = k
            terms[tuple(f)] = c
        out = GradedPoly.__new__(GradedPoly)
        out.vars, out.terms = vars, terms
        return out

    def _pair(self, other):
        if not isinstance(other, GradedPoly):
            other = GradedPoly.const(other, self.vars)
        if other.vars == self.vars:
            return self, other
        vars = set(self.vars) | set(other.vars)
        return self.with_vars(vars), other.with_vars(vars)

    def trimmed(self):
        used = [i for i in range(len(self.vars)) if any(e[i] for e in self.terms)]
        if len(used) == len(self.vars):
            return self
        out = GradedPoly.__new__(GradedPoly)
        out.vars = tuple(self.vars[i] for i in used)
        out.terms = {tuple(e[i] for i in used): c for e, c in self.terms.items()}
        return out

    # -- arithmetic
    def __add__(self, other):
        a, b = self._pair(other)
        terms = dict(a.terms)
        for e, c in b.terms.items():
            v = terms.get(e, 0) + c
            if v:
                terms[e] = v
            else:
                terms.pop(e, None)
        out = GradedPoly.__new__(GradedPoly)
        out.vars, out.terms = a.vars, terms
        return out

    __radd__ = __add__

    def __neg__(self):
        out = GradedPoly.__new__(GradedPoly)
        out.vars, out.terms = self.vars, {e: -c for e, c in self.terms.items()}
        return out

    def __sub__(self, other):
        return self + (-other if isinstance(other, GradedPoly) else -int(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, GradedPoly):
            c = int(other)
            out = GradedPoly.__new__(GradedPoly)
            out.vars = self.vars
            out.terms = {e: c * v for e, v in self.terms.items()} if c else {}
            return out
        a, b = self._pair(other)
        terms = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                v = terms.get(e, 0) + c1 * c2
                if v:
                    terms[e] = v
                else:
                    terms.pop(e, None)
        out = GradedPoly.__new__(GradedPoly)
        out.vars, out.terms = a.vars, terms
        return out

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power")
        out = GradedPoly.const(1, self.vars)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, GradedPoly):
            try:
                other = GradedPoly.const(int(other))
            except (TypeError, ValueError):
                return NotImplemented
        a, b = self._pair(other)
        return a.terms == b.terms

    def __hash__(self):
        t = self.trimmed()
        return hash((t.vars, frozenset(t.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    # -- grading
    def monomial_degree(self, e):
        return sum(k * var_degree(v) for v, k in zip(self.vars, e))

    def degrees(self):
        return sorted({self.monomial_degree(e) for e in self.terms})

    def is_homogeneous(self):
        return len(self.degrees()) <= 1

    def degree(self):
        ds = self.degrees()
        if len(ds) > 1:
            raise ValueError("polynomial is not homogeneous")
        return ds[0] if ds else None

    def components(self):
        out = {}
        for e, c in self.terms.items():
            out.setdefault(self.monomial_degree(e), {})[e] = c
        return {d: GradedPoly(self.vars, t) for d, t in sorted(out.items())}

    def coefficient(self, **exps):
        p = self.with_vars(exps)
        key = tuple(exps.get(v, 0) for v in p.vars)
        return p.terms.get(key, 0)

    # -- substitution
    def subs(self, mapping):
        """Substitute polynomials (or ints) for variables by name."""
        out = GradedPoly.const(0, ())
        powers = {}
        for e, c in self.terms.items():
            term = GradedPoly.const(c, ())
            for v, k in zip(self.vars, e):
                if not k:
                    continue
                if v in mapping:
                    key = (v, k)
                    if key not in powers:
                        val = mapping[v]
                        val = val if isinstance(val, GradedPoly) else GradedPoly.const(val)
                        powers[key] = val**k
                    term = term * powers[key]
                else:
                    term = term * GradedPoly.var(v) ** k
            out = out + term
        return out

    # -- text
    def __str__(self):
        if not self.terms:
            return "0"
        names = self.vars

        def sort_key(item):
            e, _ = item
            return (-self.monomial_degree(e), tuple(-k for k in e))

        parts = []
        for n, (e, c) in enumerate(sorted(self.terms.items(), key=sort_key)):
            factors = [v if k == 1 else f"{v}^{k}" for v, k in zip(names, e) if k]
            mag = abs(c)
            if factors:
                body = "*".join(factors) if mag == 1 else f"{mag}*" + "*".join(factors)
            else:
                body = str(mag)
            if n == 0:
                parts.append(body if c > 0 else "-" + body)
            else:
                parts.append((" + " if c > 0 else " - ") + body)
        return "".join(parts)

    def __repr__(self):
        return f"GradedPoly({self})"


def xpoly(i, r=None):
    return GradedPoly.var(f"x{i}", x_vars(r) if r else None)


def simple_root(i, r=None):
    """alpha_i = x_i - x_{i+1}."""
    return xpoly(i, r) - xpoly(i + 1, r)


def dual_weight(i, r=None):
    """h_i^* = x_1 + ... + x_i."""
    out = GradedPoly.const(0, x_vars(r) if r else ())
    for m in range(1, i + 1):
        out = out + xpoly(m, r)
    return out


def _x_index(name):
    m = re.fullmatch(r"x(\d+)", name)
    return int(m.group(1)) if m else None


def linear_coefficients(weight):
    """{i: coefficient of x_i} for a linear form in the x-variables."""
    out = {}
    for e, c in weight.terms.items():
        nz = [(v, k) for v, k in zip(weight.vars, e) if k]
        if len(nz) != 1 or nz[0][1] != 1 or _x_index(nz[0][0]) is None:
            raise ValueError(f"{weight} is not a linear form in x-variables")
        out[_x_index(nz[0][0])] = c
    return out


def pairing(weight, u):
    """weight(h_u) with <x_u, h_u> = 1, <x_{u+1}, h_u> = -1."""
    if u < 1:
        raise ValueError("coroot index must be positive")
    co = linear_coefficients(weight)
    return co.get(u, 0) - co.get(u + 1, 0)


def weyl_action(p, s):
    """sigma_s: transposition x_s <-> x_{s+1}."""
    a, b = f"x{s}", f"x{s + 1}"
    if a not in p.vars and b not in p.vars:
        return p
    q = p.with_vars((a, b))
    i, j = q.vars.index(a), q.vars.index(b)
    terms = {}
    for e, c in q.terms.items():
        f = list(e)
        f[i], f[j] = f[j], f[i]
        terms[tuple(f)] = c
    return GradedPoly(q.vars, terms)


def reflect_weight(weight, s):
    """sigma_s(alpha) = alpha - alpha(h_s) alpha_s on linear forms."""
    return weight - simple_root(s) * pairing(weight, s)


def divided_difference(p, a, b):
    """(p(a) - p(b)) / (a - b) where p is written in the variable ``a``."""
    if b in p.vars and any(e[p.vars.index(b)] for e in p.terms):
        raise ValueError(f"{b} must not occur in p")
    q = p.with_vars((a, b))
    ia, ib = q.vars.index(a), q.vars.index(b)
    terms = {}
    for e, c in q.terms.items():
        n = e[ia]
        for i in range(n):
            f = list(e)
            f[ia], f[ib] = n - 1 - i, i
            f = tuple(f)
            v = terms.get(f, 0) + c
            if v:
                terms[f] = v
            else:
                terms.pop(f, None)
    return GradedPoly(q.vars, terms)


def demazure(p, s):
    """(p - sigma_s p) / (x_s - x_{s+1}), exact."""
    a, b = f"x{s}", f"x{s + 1}"
    q = p.with_vars((a, b))
    ia, ib = q.vars.index(a), q.vars.index(b)
    terms = {}

    def add(e, c):
        v = terms.get(e, 0) + c
        if v:
            terms[e] = v
        else:
            terms.pop(e, None)

    for e, c in q.terms.items():
        ea, eb = e[ia], e[ib]
        lo, gap = min(ea, eb), abs(ea - eb)
        sign = 1 if ea >= eb else -1
        for i in range(gap):
            f = list(e)
            f[ia], f[ib] = lo + gap - 1 - i, lo + i
            add(tuple(f), sign * c)
    return GradedPoly(q.vars, terms)


def symmetric_sum(n, a="x", b="y"):
    """S(a, b) = a^{n-1} + a^{n-2} b + ... + b^{n-1}."""
    return divided_difference(GradedPoly.var(a) ** n, a, b)


def monomials(nvars, total):
    """Exponent tuples of the given total degree (in variable count), descending lex."""
    if nvars == 0:
        return [()] if total == 0 else []
    out = []
    for first in range(total, -1, -1):
        for rest in monomials(nvars - 1, total - first):
            out.append((first,) + rest)
    return out


# ---------------------------------------------------------------- quotients


class QuotientModule:
    """Graded free module modulo a graded submodule, presented degree by degree.

    ``basis_of(d)`` lists the ambient basis labels in degree d; ``relations_of(d)``
    yields sparse vectors (dict label -> int) spanning the submodule in degree d.
    Degrees run over ``degrees`` (at most the cutoff).
    """

    def __init__(self, degrees, basis_of, relations_of, cutoff, vars=None, gens=None):
        self.cutoff = cutoff
        self.vars = vars
        self.gens = list(gens or [])
        self.degrees = [d for d in degrees if d <= cutoff]
        self._lattice = {}
        for d in self.degrees:
            lat = Lattice(basis_of(d))
            for v in relations_of(d):
                if v:
                    lat.insert(v)
            self._lattice[d] = lat
        self._groups = {}

    def ambient_basis(self, d):
        lat = self._lattice.get(d)
        return list(lat.labels) if lat else []

    def basis(self, d):
        """Labels that survive as free or torsion generators (non-unit pivots or non-pivots)."""
        lat = self._lattice[d]
        return [lab for i, lab in enumerate(lat.labels) if i not in lat.rows or lat.rows[i][i] != 1]

    def rewrite_rules(self, d):
        """label -> vector it is equivalent to, for labels eliminated by a unit pivot."""
        lat = self._lattice[d]
        out = {}
        for p, row in lat.rows.items():
            if row[p] == 1:
                out[lat.labels[p]] = {lat.labels[k]: -c for k, c in row.items() if k != p}
        return out

    def group(self, d):
        if d not in self._groups:
            lat = self._lattice.get(d)
            self._groups[d] = lat.cokernel() if lat is not None else FgAbGroup([])
        return self._groups[d]

    def rank(self, d):
        return self.group(d).free_rank if d in self._lattice else 0

    def torsion(self, d):
        return self.group(d).torsion if d in self._lattice else []

    def graded_ranks(self):
        return [self.rank(d) for d in self.degrees]

    def total_rank(self):
        return sum(self.graded_ranks())

    def relation_rank(self, d):
        return self._lattice[d].rank

    def reduce_vector(self, d, v):
        return self._lattice[d].reduce(v)

    def is_zero(self, d, v):
        return not self.reduce_vector(d, v)

    # polynomial convenience (ambient = monomials over self.vars)
    def _poly_vector(self, p):
        p = p.with_vars(self.vars)
        if p.vars != tuple(self.vars):
            raise ValueError("polynomial uses variables outside the quotient ring")
        out = {}
        for e, c in p.terms.items():
            out.setdefault(p.monomial_degree(e), {})[e] = c
        return out

    def reduce(self, p):
        """Canonical representative of a polynomial modulo the ideal (degrees <= cutoff)."""
        terms = {}
        for d, v in self._poly_vector(p).items():
            if d > self.cutoff:
                raise ValueError(f"degree {d} exceeds the cutoff {self.cutoff}")
            terms.update(self.reduce_vector(d, v) if d in self._lattice else v)
        return GradedPoly(self.vars, terms)


def build_quotient(vars, ideal_gens, D):
    """Z[vars] / (ideal_gens) realized in every even degree <= D."""
    vars = tuple(sorted(vars, key=var_key))
    for v in vars:
        if var_degree(v) != 2:
            raise ValueError(f"quotients need degree-2 variables, got {v}")
    gens = []
    for g in ideal_gens:
        g = g.with_vars(vars)
        if g.vars != vars:
            raise ValueError(f"generator {g} uses variables outside {vars}")
        if not g.is_homogeneous():
            raise ValueError(f"generator {g} is not homogeneous")
        if g:
            gens.append(g)
    if gens and D < max(g.degree() for g in gens):
        raise ValueError(f"cutoff {D} is below the generator degree {max(g.degree() for g in gens)}")
    n = len(vars)

    def basis_of(d):
        return monomials(n, d // 2)

    def relations_of(d):
        for g in gens:
            gd = g.degree()
            if gd > d:
                continue
            for m in monomials(n, (d - gd) // 2):
                yield {tuple(x + y for x, y in zip(e, m)): c for e, c in g.terms.items()}

    return QuotientModule(range(0, D + 1, 2), basis_of, relations_of, D, vars=vars, gens=gens)


def brute_force_ranks(vars, ideal_gens, D):
    """Independent oracle: dense SNF of the full relation matrix per degree."""
    from .chain import elementary_divisors

    vars = tuple(sorted(vars, key=var_key))
    gens = [g.with_vars(vars) for g in ideal_gens if g]
    out = []
    for d in range(0, D + 1, 2):
        mons = list(itertools.product(range(d // 2 + 1), repeat=len(vars)))
        mons = [m for m in mons if 2 * sum(m) == d]
        idx = {m: i for i, m in enumerate(mons)}
        rows = []
        for g in gens:
            gd = g.degree()
            if gd > d:
                continue
            for m in itertools.product(range((d - gd) // 2 + 1), repeat=len(vars)):
                if 2 * sum(m) != d - gd:
                    continue
                row = [0] * len(mons)
                for e, c in g.terms.items():
                    row[idx[tuple(x + y for x, y in zip(e, m))]] += c
                rows.append(row)
        rank = len(elementary_divisors(rows)) if rows else 0
        out.append(len(mons) - rank)
    return out
