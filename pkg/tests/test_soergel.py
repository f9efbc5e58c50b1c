import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from brokensym.algebra import GradedPoly, dual_weight, monomials, simple_root, xpoly
from brokensym.braid import BraidWord, parse_braid
from brokensym.soergel import (
    BSBimodule,
    bimodule_tensor_check,
    build_bs,
    delta_hat_relation_holds,
    multiply,
    restrict_bs,
    right_action,
)

from strategies import braid_words

x, y = xpoly(1, 2), xpoly(2, 2)


def test_alpha_recursion_hopf():
    B = build_bs("2: 1 1")
    assert B.alpha(1) == B.poly(x - y)
    assert B.alpha(2) == B.poly(x - y) + 2 * B.delta(1)


def test_x_recursion_single():
    B = build_bs("2: 1")
    assert B.bracket_x(1, 2) == B.poly(x) + B.delta(1)
    assert B.bracket_x(1, 1) == B.poly(x)


@pytest.mark.parametrize("text", ["2: 1", "3: 1 2 1", "4: 2 1 3 2", "3: 2 2 1"])
def test_central_character(text):
    B = build_bs(text)
    h = dual_weight(B.r, B.r)
    for j in range(1, B.k + 2):
        assert B.bracket(h, j) == B.poly(h)


@pytest.mark.parametrize("text", ["2: 1 1 1", "3: 1 2 1 2", "4: 1 2 3"])
def test_alpha_uses_only_earlier_deltas(text):
    B = build_bs(text)
    for j in range(1, B.k + 1):
        for mask, _ in B.alpha_table[j]:
            assert mask < (1 << (j - 1)) or mask == 0


def test_delta_squares():
    B = build_bs("2: 1")
    assert B.delta(1) * B.delta(1) == -(B.poly(x - y) * B.delta(1))
    B2 = build_bs("2: 1 1")
    d1, d2 = B2.delta(1), B2.delta(2)
    assert multiply(d2, d2, B2) == -(B2.poly(x - y) * d2) - 2 * d1 * d2
    assert B2.one() * d2 == d2


def test_right_action_examples():
    B = build_bs("2: 1")
    assert right_action(B.one(), x) == B.poly(x) + B.delta(1)
    assert right_action(B.one(), x + y) == B.poly(x + y)
    assert right_action(B.one(), x) - B.poly(x) == B.delta_hat(1)


def test_negative_word_rejected():
    with pytest.raises(ValueError):
        BSBimodule(parse_braid("2: 1 -1"))


def test_restriction_examples():
    B = build_bs("2: 1 1")
    assert not restrict_bs(B.delta(1), 1).terms
    assert restrict_bs(B.delta(2), 1) == restrict_bs(B.delta(2), 1).bs.delta(1)
    img = restrict_bs(B.alpha(2), 1)
    assert img == img.bs.alpha(1)


def _random_element(B, rnd, deg=4):
    terms = {}
    for d in range(0, deg + 1, 2):
        for lab in B.basis(d):
            if rnd.random() < 0.3:
                terms[lab] = rnd.randint(-3, 3)
    return B.element(terms)


positive_words = braid_words(max_strands=4, max_len=4, positive=True).filter(lambda w: w.strands >= 2)


@given(positive_words, st.randoms(use_true_random=False))
def test_associativity_and_commutativity(w, rnd):
    B = BSBimodule(w)
    a, b, c = (_random_element(B, rnd) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a


@given(positive_words, st.randoms(use_true_random=False))
def test_restriction_is_ring_map(w, rnd):
    if len(w) == 0:
        return
    B = BSBimodule(w)
    j = rnd.randint(1, len(w))
    a, b = _random_element(B, rnd), _random_element(B, rnd)
    ra = restrict_bs(a, j)
    rb = restrict_bs(b, j, target=ra.bs)
    assert restrict_bs(a * b, j, target=ra.bs) == ra * rb


@given(positive_words, st.randoms(use_true_random=False))
def test_restriction_recursion_naturality(w, rnd):
    if len(w) == 0:
        return
    B = BSBimodule(w)
    j = rnd.randint(1, len(w))
    T = restrict_bs(B.one(), j).bs
    for m in range(1, B.k + 1):
        if m == j:
            continue
        m2 = m if m < j else m - 1
        assert restrict_bs(B.alpha(m), j, target=T) == T.alpha(m2)


@given(positive_words, st.randoms(use_true_random=False))
def test_right_action_is_ring_map(w, rnd):
    B = BSBimodule(w)
    r = w.strands
    p = xpoly(rnd.randint(1, r), r) + 2 * xpoly(rnd.randint(1, r), r)
    q = xpoly(rnd.randint(1, r), r) ** 2 - xpoly(1, r)
    one = B.one()
    assert right_action(one, p * q) == right_action(one, p) * right_action(one, q)
    a = _random_element(B, rnd)
    # left and right actions commute: (p . a) . q == p . (a . q)
    assert right_action(B.poly(p) * a, q) == B.poly(p) * right_action(a, q)


@pytest.mark.parametrize("text", ["2: 1", "3: 1 2", "2: 1 1", "3: 2 1 2 1"])
def test_free_rank_series(text):
    B = build_bs(text)
    for d in range(0, 13, 2):
        expected = sum(
            len(list(itertools.combinations(range(B.k), n))) * len(monomials(B.r, d // 2 - n))
            for n in range(0, min(B.k, d // 2) + 1)
        )
        assert B.rank(d) == expected


@pytest.mark.parametrize("text", ["2: 1", "3: 1 2", "2: 1 1"])
def test_tensor_model(text):
    ok, report = bimodule_tensor_check(parse_braid(text), 10)
    assert ok, report


@pytest.mark.parametrize("text", ["2: 1 1", "3: 1 2 1", "4: 1 3 2 3"])
def test_delta_hat_relation(text):
    assert delta_hat_relation_holds(parse_braid(text))


def _elementary(r, m):
    out = GradedPoly.const(0)
    for c in itertools.combinations(range(1, r + 1), m):
        t = GradedPoly.const(1)
        for i in c:
            t = t * xpoly(i, r)
        out = out + t
    return out


@pytest.mark.parametrize("text", ["3: 1 2 1", "3: 2 2", "4: 3 1 2"])
def test_symmetric_polynomials_are_central(text):
    B = build_bs(text)
    for m in range(1, B.r + 1):
        e = _elementary(B.r, m)
        assert right_action(B.one(), e) == B.poly(e)


def test_simple_root_pairing_with_sigma():
    B = build_bs("3: 1 2")
    # [alpha_2]_2 = alpha_2 - delta_1 since alpha_2(h_1) = -1
    assert B.alpha(2) == B.poly(simple_root(2, 3)) - B.delta(1)


def test_elements_from_different_words_do_not_mix():
    a, b = build_bs("2: 1").one(), build_bs("2: 1 1").one()
    with pytest.raises(ValueError):
        a + b


def test_word_property():
    assert build_bs(BraidWord(3, (1, 2))).word == parse_braid("3: 1 2")


def test_tensor_check_detects_wrong_recursion(monkeypatch):
    import brokensym.soergel as soergel

    monkeypatch.setattr(soergel, "x_pairing", lambda i, u: 1 if i == u else 0)
    ok, report = bimodule_tensor_check(parse_braid("2: 1"), 6)
    assert not ok and report
