"""Bott–Samelson Soergel bimodules in Schubert-class normal form.

An element is a left polynomial combination of square-free monomials in the
classes delta_1..delta_k (one per letter).  Internally a term is keyed by
``(mask, exps)``: bit j-1 of ``mask`` stands for delta_j and ``exps`` is the
exponent vector over x_1..x_r.  The only relation is
``delta_j^2 = -[alpha_{i_j}]_j delta_j`` where ``[alpha]_j`` involves only earlier
deltas, so rewriting terminates.
"""

from __future__ import annotations

import itertools

from .algebra import GradedPoly, monomials, x_vars
from .braid import BraidWord, coerce_word


def cartan(s, u):
    """alpha_s(h_u)."""
    if s == u:
        return 2
    if abs(s - u) == 1:
        return -1
    return 0


def x_pairing(i, u):
    """x_i(h_u)."""
    return 1 if i == u else (-1 if i == u + 1 else 0)


def _add_into(acc, key, c):
    v = acc.get(key, 0) + c
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


def _shift(exps, e):
    return tuple(a + b for a, b in zip(exps, e))


def mask_of(positions):
    m = 0
    for j in positions:
        m |= 1 << (j - 1)
    return m


def positions_of(mask):
    out, j = [], 1
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return out


class BSBimodule:
    """H*_{SU(r)}(BtS(w)) for a positive word w, with its recursion tables."""

    def __init__(self, word):
        word = coerce_word(word)
        if not word.is_positive:
            raise ValueError("Bott–Samelson bimodules need a positive word; negative letters are handled by the cube")
        self.word = word
        self.r = word.strands
        self.k = len(word)
        self.letters = word.indices
        self.vars = x_vars(self.r)
        self._zero = (0,) * self.r
        self._unit = [tuple(int(i == m) for i in range(self.r)) for m in range(self.r)]
        # [alpha_{i_j}]_j as {(mask, exps): c}
        self.alpha_table = {}
        for j in range(1, self.k + 1):
            s = self.letters[j - 1]
            el = {(0, self._unit[s - 1]): 1, (0, self._unit[s]): -1}
            for m in range(1, j):
                c = cartan(s, self.letters[m - 1])
                if c:
                    el[(1 << (m - 1), self._zero)] = c
            self.alpha_table[j] = el
        # [x_i]_j for j = 1..k+1
        self.x_table = {}
        for i in range(1, self.r + 1):
            for j in range(1, self.k + 2):
                el = {(0, self._unit[i - 1]): 1}
                for m in range(1, j):
                    c = x_pairing(i, self.letters[m - 1])
                    if c:
                        el[(1 << (m - 1), self._zero)] = c
                self.x_table[(i, j)] = el
        self._dt = {}
        self._mt = {}
        self._dh = {}
        self._rpow = {}

    # ---------------------------------------------------------- structure
    def positions(self, s):
        return [j for j, i in enumerate(self.letters, start=1) if i == s]

    def delta_times(self, j, T):
        """Normal form of delta_j * delta^T."""
        key = (j, T)
        hit = self._dt.get(key)
        if hit is not None:
            return hit
        bit = 1 << (j - 1)
        if not T & bit:
            out = {(T | bit, self._zero): 1}
        else:
            out = {}
            for (m_mask, e), c in self.alpha_table[j].items():
                if m_mask == 0:
                    _add_into(out, (T, e), -c)
                else:
                    m = m_mask.bit_length()
                    for (mask2, e2), c2 in self.delta_times(m, T).items():
                        _add_into(out, (mask2, e2), -c * c2)
        self._dt[key] = out
        return out

    def mono_times(self, S, T):
        """Normal form of delta^S * delta^T."""
        if S > T:
            S, T = T, S
        key = (S, T)
        hit = self._mt.get(key)
        if hit is not None:
            return hit
        if S == 0:
            out = {(T, self._zero): 1}
        else:
            j = S.bit_length()
            rest = self.mono_times(S & ~(1 << (j - 1)), T)
            out = {}
            for (mask, e), c in rest.items():
                for (mask2, e2), c2 in self.delta_times(j, mask).items():
                    _add_into(out, (mask2, _shift(e, e2)), c * c2)
        self._mt[key] = out
        return out

    def mul_terms(self, a, b):
        out = {}
        for (S, e1), c1 in a.items():
            for (T, e2), c2 in b.items():
                e = _shift(e1, e2)
                for (U, e3), c3 in self.mono_times(S, T).items():
                    _add_into(out, (U, _shift(e, e3)), c1 * c2 * c3)
        return out

    def delta_hat_times(self, s, T):
        """Normal form of delta_hat_s * delta^T."""
        key = (s, T)
        hit = self._dh.get(key)
        if hit is None:
            hit = {}
            for j in self.positions(s):
                for kk, c in self.delta_times(j, T).items():
                    _add_into(hit, kk, c)
            self._dh[key] = hit
        return hit

    def right_x_power(self, i, n):
        key = (i, n)
        if key not in self._rpow:
            if n == 0:
                self._rpow[key] = {(0, self._zero): 1}
            else:
                self._rpow[key] = self.mul_terms(self.right_x_power(i, n - 1), self.x_table[(i, self.k + 1)])
        return self._rpow[key]

    def right_poly_terms(self, p):
        """[p]_{k+1} = p([x_1]_{k+1}, ..., [x_r]_{k+1})."""
        p = p.with_vars(self.vars)
        if p.vars != self.vars:
            raise ValueError("right action takes polynomials in x_1..x_r only")
        out = {}
        for e, c in p.terms.items():
            term = {(0, self._zero): c}
            for i, n in enumerate(e, start=1):
                if n:
                    term = self.mul_terms(term, self.right_x_power(i, n))
            for kk, v in term.items():
                _add_into(out, kk, v)
        return out

    # ---------------------------------------------------------- elements
    def element(self, terms):
        return BSElement(self, terms)

    def one(self):
        return self.element({(0, self._zero): 1})

    def delta(self, j):
        return self.element({(1 << (j - 1), self._zero): 1})

    def delta_hat(self, s):
        return self.element({(1 << (j - 1), self._zero): 1 for j in self.positions(s)})

    def poly(self, p):
        p = p.with_vars(self.vars)
        if p.vars != self.vars:
            raise ValueError("polynomial uses variables outside x_1..x_r")
        return self.element({(0, e): c for e, c in p.terms.items()})

    def alpha(self, j):
        """[alpha_{i_j}]_j."""
        return self.element(self.alpha_table[j])

    def bracket_x(self, i, j):
        """[x_i]_j."""
        return self.element(self.x_table[(i, j)])

    def bracket(self, p, j):
        """[p]_j for a polynomial p in x-variables (ring map)."""
        p = p.with_vars(self.vars)
        out = self.element({})
        for e, c in p.terms.items():
            term = self.element({(0, self._zero): c})
            for i, n in enumerate(e, start=1):
                for _ in range(n):
                    term = term * self.bracket_x(i, j)
            out = out + term
        return out

    # ---------------------------------------------------------- bases
    def basis(self, d):
        """Normal-form basis labels (mask, exps) in degree d."""
        if d < 0 or d % 2:
            return []
        out = []
        for size in range(0, min(self.k, d // 2) + 1):
            for pos in itertools.combinations(range(1, self.k + 1), size):
                m = mask_of(pos)
                for e in monomials(self.r, d // 2 - size):
                    out.append((m, e))
        return out

    def rank(self, d):
        return len(self.basis(d))


class BSElement:
    """Normal-form element of a BSBimodule."""

    __slots__ = ("bs", "terms")

    def __init__(self, bs, terms):
        self.bs = bs
        self.terms = {k: c for k, c in terms.items() if c}

    def _other(self, other):
        if isinstance(other, BSElement):
            if other.bs is not self.bs and other.bs.word != self.bs.word:
                raise ValueError("elements of different bimodules")
            return other.terms
        if isinstance(other, GradedPoly):
            return self.bs.poly(other).terms
        return {(0, self.bs._zero): int(other)} if other else {}

    def __add__(self, other):
        out = dict(self.terms)
        for kk, c in self._other(other).items():
            _add_into(out, kk, c)
        return BSElement(self.bs, out)

    __radd__ = __add__

    def __neg__(self):
        return BSElement(self.bs, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-BSElement(self.bs, self._other(other)))

    def __mul__(self, other):
        return BSElement(self.bs, self.bs.mul_terms(self.terms, self._other(other)))

    def __rmul__(self, other):
        return BSElement(self.bs, self.bs.mul_terms(self._other(other), self.terms))

    def __eq__(self, other):
        try:
            return self.terms == self._other(other)
        except ValueError:
            return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def coefficients(self):
        """{frozenset of delta positions: GradedPoly}."""
        out = {}
        for (mask, e), c in self.terms.items():
            out.setdefault(mask, {})[e] = c
        return {frozenset(positions_of(m)): GradedPoly(self.bs.vars, t) for m, t in sorted(out.items())}

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for S, p in sorted(self.coefficients().items(), key=lambda kv: (len(kv[0]), sorted(kv[0]))):
            mono = "*".join(f"d{j}" for j in sorted(S))
            if not mono:
                parts.append(str(p))
            elif p == 1:
                parts.append(mono)
            elif p == -1:
                parts.append(f"-{mono}")
            elif p.degree() == 0 and len(p.terms) == 1:
                parts.append(f"{p}*{mono}")
            else:
                parts.append(f"({p})*{mono}")
        out = parts[0]
        for part in parts[1:]:
            out += f" - {part[1:]}" if part.startswith("-") else f" + {part}"
        return out

    __repr__ = __str__


def build_bs(word):
    return BSBimodule(word)


def multiply(a, b, B=None):
    if B is not None and a.bs.word != B.word:
        raise ValueError("element does not belong to the given bimodule")
    return a * b


def right_action(a, p, B=None):
    """a . tau*(p): substitute [x_i]_{k+1} for x_i and multiply."""
    bs = B if B is not None else a.bs
    if isinstance(a, GradedPoly):
        a = bs.poly(a)
    return BSElement(bs, bs.mul_terms(a.terms, bs.right_poly_terms(p)))


def restrict_terms(terms, j):
    """delta_j -> 0 with later deltas reindexed, on raw terms."""
    bit = 1 << (j - 1)
    low = bit - 1
    out = {}
    for (mask, e), c in terms.items():
        if mask & bit:
            continue
        _add_into(out, ((mask & low) | ((mask >> 1) & ~low), e), c)
    return out


def restrict_bs(a, j, target=None):
    """Image of ``a`` in the bimodule of the word with position j removed."""
    bs = a.bs
    if not 1 <= j <= bs.k:
        raise ValueError(f"position {j} outside 1..{bs.k}")
    if target is None:
        letters = bs.letters[: j - 1] + bs.letters[j:]
        target = BSBimodule(BraidWord(bs.r, letters))
    return BSElement(target, restrict_terms(a.terms, j))


# ---------------------------------------------------------------- tensor model


def _tensor_right_x(bs, mask, e, i):
    """Right multiplication by x_i in B_{i_1} ⊗_R ... ⊗_R B_{i_k}.

    A basis tensor is x^e (b_1 ⊗ ... ⊗ b_k) with b_j in {1, delta}.  The
    polynomial is pushed left through each factor using
    1·p = p·1 + ∂_s(p)·delta  and  delta·p = σ_s(p)·delta.
    Only the local rules of a single factor are used.
    """
    from .algebra import demazure, weyl_action, xpoly

    states = [(mask, xpoly(i, bs.r))]
    for j in range(bs.k, 0, -1):
        s = bs.letters[j - 1]
        bit = 1 << (j - 1)
        nxt = []
        for m, p in states:
            if m & bit:
                nxt.append((m, weyl_action(p, s)))
            else:
                nxt.append((m, p))
                dp = demazure(p, s)
                if dp:
                    nxt.append((m | bit, dp))
        states = nxt
    out = {}
    for m, p in states:
        p = p.with_vars(bs.vars)
        for f, c in p.terms.items():
            _add_into(out, (m, _shift(e, f)), c)
    return out


def bimodule_tensor_check(word, D):
    """Compare the normal-form model with the iterated tensor product up to degree D.

    Returns ``(ok, report)``: ranks agree degreewise and the right action of
    every x_i agrees on every basis element of degree <= D - 2.
    """
    bs = build_bs(word)
    report = []
    for d in range(0, D + 1, 2):
        tensor_rank = sum(
            len(monomials(bs.r, d // 2 - size)) * len(list(itertools.combinations(range(bs.k), size)))
            for size in range(0, min(bs.k, d // 2) + 1)
        )
        if tensor_rank != bs.rank(d):
            report.append(f"degree {d}: rank {bs.rank(d)} vs tensor rank {tensor_rank}")
    # both sides are left-linear, so the image of x^e b is x^e times the image of b
    local = {}
    for d in range(0, D - 1, 2):
        for mask, e in bs.basis(d):
            for i in range(1, bs.r + 1):
                if (mask, i) not in local:
                    local[(mask, i)] = (
                        bs.mul_terms({(mask, bs._zero): 1}, bs.x_table[(i, bs.k + 1)]),
                        _tensor_right_x(bs, mask, bs._zero, i),
                    )
                lhs, rhs = ({(m, _shift(f, e)): c for (m, f), c in side.items()} for side in local[(mask, i)])
                if lhs != rhs:
                    report.append(f"right action of x{i} differs on basis element {(positions_of(mask), e)}")
    return (not report), report


def delta_hat_relation_holds(word):
    """right_action(1, h_s*) - h_s*·1 == delta_hat_s for every s in 1..r-1 (0 when s unused)."""
    from .algebra import dual_weight

    bs = build_bs(word)
    for s in range(1, bs.r):
        h = dual_weight(s, bs.r)
        lhs = right_action(bs.one(), h) - bs.poly(h)
        if lhs != bs.delta_hat(s):
            return False
    return True
