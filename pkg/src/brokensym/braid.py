"""Braid words, their index combinatorics, and Markov-equivalent variants."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction


class BraidParseError(ValueError):
    """Malformed braid word text.  ``offset`` is the byte offset of the problem."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


@dataclass(frozen=True)
class BraidWord:
    strands: int
    letters: tuple = ()  # tuple of signed ints, |i| in [1, strands-1]

    def __post_init__(self):
        if self.strands < 1:
            raise ValueError("a braid needs at least one strand")
        letters = tuple(int(a) for a in self.letters)
        for a in letters:
            if a == 0 or abs(a) >= self.strands:
                raise ValueError(f"letter {a} out of range for {self.strands} strands")
        object.__setattr__(self, "letters", letters)

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return format_braid(self)

    @property
    def indices(self):
        return tuple(abs(a) for a in self.letters)

    @property
    def signs(self):
        return tuple(1 if a > 0 else -1 for a in self.letters)

    @property
    def is_positive(self):
        return all(a > 0 for a in self.letters)

    def positivized(self):
        return BraidWord(self.strands, self.indices)


_TOKEN = re.compile(rb"\S+")


def parse_braid(text):
    """Parse ``"r: i1 i2 -i3"``; errors carry the byte offset of the bad token."""
    raw = text.encode() if isinstance(text, str) else bytes(text)
    colon = raw.find(b":")
    if colon < 0:
        raise BraidParseError("missing ':' after strand count", len(raw))
    head = raw[:colon]
    m = _TOKEN.search(head)
    if m is None:
        raise BraidParseError("missing strand count", 0)
    if _TOKEN.search(head, m.end()) is not None:
        raise BraidParseError("unexpected text before ':'", _TOKEN.search(head, m.end()).start())
    try:
        r = int(m.group().decode())
    except ValueError:
        raise BraidParseError(f"malformed strand count {m.group().decode()!r}", m.start()) from None
    if r < 1:
        raise BraidParseError("strand count must be at least 1", m.start())
    letters = []
    for tok in _TOKEN.finditer(raw, colon + 1):
        s = tok.group().decode(errors="replace")
        if not re.fullmatch(r"[+-]?\d+", s):
            raise BraidParseError(f"malformed integer {s!r}", tok.start())
        a = int(s)
        if a == 0 or abs(a) >= r:
            raise BraidParseError(f"index {a} out of range [1, {r - 1}]", tok.start())
        letters.append(a)
    return BraidWord(r, tuple(letters))


def format_braid(word):
    if not word.letters:
        return f"{word.strands}:"
    return f"{word.strands}: " + " ".join(str(a) for a in word.letters)


def braid_from_json(obj):
    """Accept ``{"strands": r, "word": [...]}`` (dict or JSON text)."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    return BraidWord(int(obj["strands"]), tuple(obj.get("word", ())))


def coerce_word(word):
    if isinstance(word, BraidWord):
        return word
    if isinstance(word, dict):
        return braid_from_json(word)
    return parse_braid(word)


@dataclass(frozen=True)
class IndexStats:
    nu: frozenset
    counts: dict = field(hash=False)
    positions: dict = field(hash=False)
    orbits: tuple
    l_plus: int
    l_minus: int
    l_shift: int
    rho: Fraction | None
    min_length: int | None

    @property
    def redundancy_free(self):
        return all(c == 1 for c in self.counts.values())


def orbits_of(r, nu):
    """Partition {1..r} into orbits of the transpositions (s, s+1), s in nu."""
    out, cur = [], [1]
    for i in range(2, r + 1):
        if (i - 1) in nu:
            cur.append(i)
        else:
            out.append(tuple(cur))
            cur = [i]
    out.append(tuple(cur))
    return tuple(out)


def index_stats(word, min_length=None):
    """Combinatorics of the positivized index sequence plus the normalization data.

    ``rho`` needs the minimal length of the braid.  Words whose letters all have
    the same sign are geodesic, so their length is used.  On two strands the
    group is infinite cyclic and the length is the absolute exponent sum.
    Otherwise ``min_length`` must be supplied, else ``rho`` is None.
    """
    word = coerce_word(word)
    positions = {}
    for j, i in enumerate(word.indices, start=1):
        positions.setdefault(i, []).append(j)
    positions = {s: tuple(p) for s, p in sorted(positions.items())}
    counts = {s: len(p) for s, p in positions.items()}
    nu = frozenset(positions)
    l_plus = sum(1 for a in word.letters if a > 0)
    l_minus = len(word) - l_plus
    if min_length is None and (l_plus == 0 or l_minus == 0):
        min_length = len(word)
    if min_length is None and word.strands == 2:
        min_length = abs(l_plus - l_minus)
    rho = None if min_length is None else Fraction(len(word) - min_length, 2)
    return IndexStats(
        nu=nu,
        counts=counts,
        positions=positions,
        orbits=orbits_of(word.strands, nu),
        l_plus=l_plus,
        l_minus=l_minus,
        l_shift=l_minus - 2 * l_plus,
        rho=rho,
        min_length=min_length,
    )


MARKOV_KINDS = ("cyclic", "braid_relation", "far_commutation", "free_reduction", "stabilize")


def _dedup(words):
    seen, out = set(), []
    for w in words:
        if w not in seen:
            seen.add(w)
            out.append(w)
    return out


def markov_variants(word, kind):
    """Words whose closures are the same link as ``word``, one move of ``kind`` away."""
    word = coerce_word(word)
    r, a = word.strands, list(word.letters)
    k = len(a)
    if kind == "cyclic":
        if k == 0:
            return [word]
        return _dedup(BraidWord(r, tuple(a[m:] + a[:m])) for m in range(1, k + 1))
    if kind == "braid_relation":
        out = []
        for j in range(k - 2):
            x, y, z = a[j : j + 3]
            same_sign = (x > 0) == (y > 0) == (z > 0)
            if same_sign and x == z and abs(abs(x) - abs(y)) == 1:
                out.append(BraidWord(r, tuple(a[:j] + [y, x, y] + a[j + 3 :])))
        return _dedup(out)
    if kind == "far_commutation":
        out = []
        for j in range(k - 1):
            if abs(abs(a[j]) - abs(a[j + 1])) >= 2:
                out.append(BraidWord(r, tuple(a[:j] + [a[j + 1], a[j]] + a[j + 2 :])))
        return _dedup(out)
    if kind == "free_reduction":
        out = []
        for j in range(k - 1):
            if a[j] == -a[j + 1]:
                out.append(BraidWord(r, tuple(a[:j] + a[j + 2 :])))
        return _dedup(out)
    if kind == "stabilize":
        return [BraidWord(r + 1, tuple(a + [r])), BraidWord(r + 1, tuple(a + [-r]))]
    raise ValueError(f"unknown move kind {kind!r}; expected one of {MARKOV_KINDS}")
