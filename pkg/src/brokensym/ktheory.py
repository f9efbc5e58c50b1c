"""Equivariant K-theory of Bott–Samelson varieties over Z[x_1^{±1}..x_r^{±1}].

A weight lambda = sum c_i x_i is written multiplicatively as the monomial x^c.
The presentation ring is K_T[d_1..d_k] / (d_j^2 + (1 - [e^{alpha}]_j) d_j); its
elements are dicts mask -> LaurentPoly with bit j-1 of the mask standing for d_j.
"""

from __future__ import annotations

import re

from .braid import coerce_word
from .soergel import BSBimodule, _add_into


class DivisionError(ArithmeticError):
    pass


class LaurentPoly:
    __slots__ = ("r", "terms")

    def __init__(self, r, terms=None):
        self.r = r
        self.terms = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != r:
                raise ValueError(f"exponent {e} has the wrong length for {r} variables")
            if c:
                self.terms[e] = self.terms.get(e, 0) + c
                if not self.terms[e]:
                    del self.terms[e]

    @classmethod
    def const(cls, c, r):
        return cls(r, {(0,) * r: c})

    @classmethod
    def monomial(cls, e, c=1):
        return cls(len(e), {tuple(e): c})

    @classmethod
    def var(cls, i, r, power=1):
        e = [0] * r
        e[i - 1] = power
        return cls(r, {tuple(e): 1})

    def _coerce(self, other):
        if isinstance(other, LaurentPoly):
            if other.r != self.r:
                raise ValueError("Laurent polynomials in different variable counts")
            return other
        if isinstance(other, int):
            return LaurentPoly.const(other, self.r)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            _add_into(out, e, c)
        return LaurentPoly(self.r, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.r, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                _add_into(out, tuple(a + b for a, b in zip(e1, e2)), c1 * c2)
        return LaurentPoly(self.r, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            if not self.is_unit():
                raise DivisionError(f"{self} is not a unit")
            (e, c), = self.terms.items()
            return LaurentPoly(self.r, {tuple(-a * -n for a in e): c ** (-n)})
        out = LaurentPoly.const(1, self.r)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.const(other, self.r)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.r == other.r and self.terms == other.terms

    def __hash__(self):
        return hash((self.r, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_unit(self):
        return len(self.terms) == 1 and abs(next(iter(self.terms.values()))) == 1

    def adams(self, l):
        return adams(l, self)

    def exact_div(self, other):
        """Quotient q with q * other == self, or DivisionError."""
        other = self._coerce(other)
        if not other:
            raise DivisionError("division by zero")
        if not self:
            return LaurentPoly(self.r)
        lead_d = max(other.terms)
        cd = other.terms[lead_d]
        # componentwise exponent box the quotient must live in
        lo = [min(e[i] for e in self.terms) - min(e[i] for e in other.terms) for i in range(self.r)]
        hi = [max(e[i] for e in self.terms) - max(e[i] for e in other.terms) for i in range(self.r)]
        rem = LaurentPoly(self.r, self.terms)
        q = {}
        while rem:
            lead = max(rem.terms)
            c = rem.terms[lead]
            e = tuple(a - b for a, b in zip(lead, lead_d))
            if c % cd or any(not a <= x <= b for a, x, b in zip(lo, e, hi)):
                raise DivisionError(f"{self} is not divisible by {other}")
            q[e] = c // cd
            rem = rem - LaurentPoly.monomial(e, c // cd) * other
        return LaurentPoly(self.r, q)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                f"x{i}" if a == 1 else f"x{i}^{a}" for i, a in enumerate(e, start=1) if a
            )
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"LaurentPoly({self})"


_TERM = re.compile(r"^(?:(\d+)\*?)?((?:x\d+(?:\^-?\d+)?\*?)*)$")


def parse_laurent(text, r):
    """Inverse of str(): '3*x1^2*x2^-1 - x2 + 1'."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty Laurent polynomial")
    if s[0] not in "+-":
        s = "+" + s
    out = LaurentPoly(r)
    for chunk in re.split(r"(?<!\^)(?=[+-])", s):
        if not chunk:
            continue
        sign, body = chunk[0], chunk[1:]
        m = _TERM.match(body)
        if not m or not body:
            raise ValueError(f"cannot parse term {body!r}")
        coeff = int(m.group(1)) if m.group(1) else 1
        e = [0] * r
        mono = m.group(2).rstrip("*")
        if mono:
            for factor in mono.split("*"):
                name, _, power = factor.partition("^")
                i = int(name[1:])
                if not 1 <= i <= r:
                    raise ValueError(f"variable {name} outside x1..x{r}")
                e[i - 1] += int(power) if power else 1
        elif not m.group(1):
            raise ValueError(f"cannot parse term {body!r}")
        out = out + LaurentPoly.monomial(e, coeff if sign == "+" else -coeff)
    return out


def adams(l, p):
    """Ring endomorphism x_i -> x_i^l."""
    if l < 1:
        raise ValueError("Adams operations need l >= 1")
    return LaurentPoly(p.r, {tuple(l * a for a in e): c for e, c in p.terms.items()})


def root_exponent(s, r):
    """e^{alpha_s} = x_s / x_{s+1}."""
    e = [0] * r
    e[s - 1] = 1
    e[s] = -1
    return tuple(e)


def dual_weight_exponent(u, r):
    """e^{h_u^*} = x_1 ... x_u."""
    return tuple(1 if i < u else 0 for i in range(r))


def _reflect(c, u):
    c = list(c)
    c[u - 1], c[u] = c[u], c[u - 1]
    return tuple(c)


class KBSPresentation:
    """K_T[d_1..d_k] / (d_j^2 + (1 - [e^{alpha_{i_j}}]_j) d_j) for a positive word."""

    def __init__(self, word):
        word = coerce_word(word)
        if not word.is_positive:
            raise ValueError("K-theory presentations need a positive word")
        self.word = word
        self.r = word.strands
        self.letters = word.indices
        self.k = len(self.letters)
        self._zero = (0,) * self.r
        self._bracket = {}
        self._dt = {}
        self.quotients = {}  # (c, j) -> exact quotient used in the recursion

    # elements: dict mask -> LaurentPoly
    def one(self):
        return {0: LaurentPoly.const(1, self.r)}

    def scalar(self, p):
        return {0: p} if p else {}

    def partial(self, j):
        return {1 << (j - 1): LaurentPoly.const(1, self.r)}

    @staticmethod
    def add(a, b, c=1):
        out = dict(a)
        for m, p in b.items():
            q = out.get(m, LaurentPoly(p.r)) + p * c
            if q:
                out[m] = q
            else:
                out.pop(m, None)
        return out

    def scale(self, p, a):
        out = {}
        for m, q in a.items():
            q2 = p * q
            if q2:
                out[m] = q2
        return out

    def bracket(self, c, j):
        """[e^lambda]_j for the weight with exponent vector c."""
        c = tuple(c)
        key = (c, j)
        hit = self._bracket.get(key)
        if hit is not None:
            return hit
        if j < 1 or j > self.k + 1:
            raise ValueError(f"slot {j} outside 1..{self.k + 1}")
        if j == 1:
            out = {0: LaurentPoly.monomial(c)}
        else:
            u = self.letters[j - 2]
            num = LaurentPoly.monomial(c) - LaurentPoly.monomial(_reflect(c, u))
            den = 1 - LaurentPoly.monomial(root_exponent(u, self.r))
            try:
                q = num.exact_div(den)
            except DivisionError as exc:
                raise DivisionError(f"recursion step for weight {c} at slot {j} is not exact") from exc
            if q * den != num:
                raise DivisionError(f"recursion step for weight {c} at slot {j} failed to multiply back")
            self.quotients[key] = q
            out = dict(self.bracket(c, j - 1))
            if q:
                qb = self.bracket_poly(q, j - 1)
                out = self.add(out, self.mul(qb, self.partial(j - 1)))
        self._bracket[key] = out
        return out

    def bracket_poly(self, p, j):
        out = {}
        for e, c in p.terms.items():
            out = self.add(out, self.bracket(e, j), c)
        return out

    def alpha_bracket(self, j):
        return self.bracket(root_exponent(self.letters[j - 1], self.r), j)

    def _partial_times(self, j, T):
        key = (j, T)
        hit = self._dt.get(key)
        if hit is not None:
            return hit
        bit = 1 << (j - 1)
        if not T & bit:
            out = {T | bit: LaurentPoly.const(1, self.r)}
        else:
            # d_j^2 = ([e^alpha]_j - 1) d_j
            coeff = self.add(self.alpha_bracket(j), self.one(), -1)
            out = {}
            for m, p in coeff.items():
                out = self.add(out, self.scale(p, self._mono_times(m, T)))
        self._dt[key] = out
        return out

    def _mono_times(self, S, T):
        if S == 0:
            return {T: LaurentPoly.const(1, self.r)}
        j = S.bit_length()
        rest = self._mono_times(S & ~(1 << (j - 1)), T)
        out = {}
        for m, p in rest.items():
            out = self.add(out, self.scale(p, self._partial_times(j, m)))
        return out

    def mul(self, a, b):
        out = {}
        for S, p in a.items():
            for T, q in b.items():
                out = self.add(out, self.scale(p * q, self._mono_times(S, T)))
        return out

    def relation(self, j):
        """d_j^2 + (1 - [e^alpha]_j) d_j, evaluated in normal form (zero when consistent)."""
        d = self.partial(j)
        sq = self.mul(d, d)
        lin = self.mul(self.add(self.one(), self.alpha_bracket(j), -1), d)
        return self.add(sq, lin)

    def hat_class(self, s):
        """sum over positions j of s of [e^{h_s^* - alpha_s}]_j d_j."""
        h = dual_weight_exponent(s, self.r)
        a = root_exponent(s, self.r)
        c = tuple(x - y for x, y in zip(h, a))
        out = {}
        for j, i in enumerate(self.letters, start=1):
            if i == s:
                out = self.add(out, self.mul(self.bracket(c, j), self.partial(j)))
        return out

    def format(self, a):
        if not a:
            return "0"
        parts = []
        for m in sorted(a):
            ds = "*".join(f"d{j}" for j in range(1, self.k + 1) if (m >> (j - 1)) & 1)
            coeff = str(a[m])
            if not ds:
                parts.append(coeff)
            elif coeff == "1":
                parts.append(ds)
            else:
                parts.append(f"({coeff})*{ds}")
        return " + ".join(parts)


def k_presentation(word):
    return KBSPresentation(word)


def k_restriction(pres, j):
    """Map dropping position j: d_j -> 0, later d's reindexed. Returns (target, map)."""
    if not 1 <= j <= pres.k:
        raise ValueError(f"position {j} outside 1..{pres.k}")
    from .braid import BraidWord

    letters = pres.word.letters[: j - 1] + pres.word.letters[j:]
    target = KBSPresentation(BraidWord(pres.r, letters))
    bit = 1 << (j - 1)
    low = bit - 1

    def fmap(a):
        out = {}
        for m, p in a.items():
            if m & bit:
                continue
            out = KBSPresentation.add(out, {(m & low) | ((m >> 1) & ~low): p})
        return out

    return target, fmap


def restriction_naturality(pres, weights=None):
    """Images of [e^lambda]_m under every restriction equal the recomputed brackets."""
    weights = weights or default_weights(pres.r)
    failures = []
    for j in range(1, pres.k + 1):
        target, fmap = k_restriction(pres, j)
        for c in weights:
            for m in range(1, pres.k + 2):
                m2 = m if m <= j else m - 1
                if fmap(pres.bracket(c, m)) != target.bracket(c, m2):
                    failures.append((j, c, m))
    return failures


def default_weights(r):
    out = []
    for i in range(1, r + 1):
        e = [0] * r
        e[i - 1] = 1
        out.append(tuple(e))
        e[i - 1] = -1
        out.append(tuple(e))
    for s in range(1, r):
        out.append(root_exponent(s, r))
        out.append(dual_weight_exponent(s, r))
    return out


def euler_class_hopf(r=2, s=1):
    """(1 - e^{alpha}) (1 - e^{-alpha}) for alpha = alpha_s."""
    a = LaurentPoly.monomial(root_exponent(s, r))
    return (1 - a) * (1 - a ** -1)


def symmetric_power_sum(l, r=2, s=1):
    """S_l = x^{l-1} + x^{l-2} y + ... + y^{l-1} in x = x_s, y = x_{s+1}."""
    out = LaurentPoly(r)
    for a in range(l):
        e = [0] * r
        e[s - 1] = l - 1 - a
        e[s] = a
        out = out + LaurentPoly.monomial(e)
    return out


def adams_thom_check(l, r=2, s=1):
    """Psi^l(Th) (xy)^{l-1} == S_l^2 Th with Th the Euler class of the +-alpha plane."""
    th = euler_class_hopf(r, s)
    xy = [0] * r
    xy[s - 1] = 1
    xy[s] = 1
    lhs = adams(l, th) * LaurentPoly.monomial(xy) ** (l - 1)
    rhs = symmetric_power_sum(l, r, s) ** 2 * th
    return lhs == rhs


def degenerate(pres, a):
    """First-order image in the cohomology ring: x^c -> 1 + sum c_i x_i, d_j -> -delta_j.

    Returns (mask, exps) -> int keeping only terms of degree <= 2.
    """
    r = pres.r
    zero = (0,) * r
    out = {}
    for m, p in a.items():
        n = bin(m).count("1")
        if n > 1:
            continue
        sign = -1 if n else 1
        for e, c in p.terms.items():
            _add_into(out, (m, zero), sign * c)
            if n == 0:
                for i, ci in enumerate(e):
                    if ci:
                        unit = tuple(int(t == i) for t in range(r))
                        _add_into(out, (0, unit), c * ci)
    return out


def degeneration_check(word, weights=None):
    """[e^lambda]_j degenerates to 1 + [lambda]_j for every slot and weight; returns failures."""
    pres = KBSPresentation(word)
    bs = BSBimodule(pres.word)
    zero = (0,) * pres.r
    failures = []
    for c in weights or default_weights(pres.r):
        for j in range(1, pres.k + 2):
            expect = {(0, zero): 1}
            for (mask, e), coeff in _bracket_linear(bs, c, j).items():
                _add_into(expect, (mask, e), coeff)
            got = degenerate(pres, pres.bracket(c, j))
            if got != expect:
                failures.append((c, j, got, expect))
    for j in range(1, pres.k + 1):
        # relation d^2 + (1 - [e^a]) d -> delta^2 + [alpha] delta
        lhs = degenerate(pres, pres.add(pres.one(), pres.alpha_bracket(j), -1))
        expect = {}
        for key, coeff in bs.alpha_table[j].items():
            _add_into(expect, key, -coeff)
        if lhs != expect:
            failures.append(("relation", j, lhs, expect))
    return failures


def _bracket_linear(bs, c, j):
    """[sum c_i x_i]_j in the cohomology ring as raw terms."""
    out = {}
    for i, ci in enumerate(c, start=1):
        if ci:
            for key, coeff in bs.x_table[(i, j)].items():
                _add_into(out, key, ci * coeff)
    return out


__all__ = [
    "DivisionError",
    "KBSPresentation",
    "LaurentPoly",
    "adams",
    "adams_thom_check",
    "default_weights",
    "degenerate",
    "degeneration_check",
    "dual_weight_exponent",
    "euler_class_hopf",
    "k_presentation",
    "k_restriction",
    "parse_laurent",
    "restriction_naturality",
    "root_exponent",
    "symmetric_power_sum",
]
