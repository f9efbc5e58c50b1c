import json

import pytest

from brokensym.braid import parse_braid
from brokensym.chain import ChainError
from brokensym.cube import (
    TriplyGradedTable,
    build_cube,
    compare_tables,
    compute_e2,
    e1_page,
    e2_page,
    insertion_bs_map,
    invariance_check,
    normalize,
    parallel_map,
)
from brokensym.hochschild import check_bs_map_commutes
from brokensym.soergel import BSBimodule


def test_vertex_degrees_mixed_word():
    cube = build_cube("2: 1 -1", 6)
    t = {tuple(sorted(J)): v.t for J, v in cube.vertices.items()}
    assert t == {(): 1, (1,): 0, (1, 2): 1, (2,): 2}
    assert cube.max_t == 2
    kinds = sorted((sorted(e.source), e.kind) for e in cube.edges)
    assert kinds == [([], "insert"), ([1], "drop"), ([1], "insert"), ([1, 2], "drop")]


def test_every_vertex_has_all_outgoing_edges():
    cube = build_cube("3: 1 -2 1", 4)
    for J, v in cube.vertices.items():
        outs = [e for e in cube.edges if e.source == J]
        assert len(outs) == 3 - v.t
        for e in outs:
            assert cube.vertices[e.target].t == v.t + 1


def test_insertion_map_image_of_one():
    tgt = BSBimodule(parse_braid("2: 1 1"))
    src = BSBimodule(parse_braid("2: 1"))
    f = insertion_bs_map(tgt, 2)
    img = tgt.element(f(0, (0, 0)))
    assert img == tgt.alpha(2) + tgt.delta(2)
    check_bs_map_commutes(f, src, tgt, 8)


def test_insertion_map_commutes_in_three_strands():
    for word, slot in (("3: 2 1", 1), ("3: 1 2 1", 2), ("3: 1 2 1", 3)):
        tgt = BSBimodule(parse_braid(word))
        letters = tgt.letters[: slot - 1] + tgt.letters[slot:]
        src = BSBimodule(parse_braid("3: " + " ".join(map(str, letters))))
        check_bs_map_commutes(insertion_bs_map(tgt, slot), src, tgt, 8)


@pytest.mark.parametrize("word", ["2: 1 1", "3: 1 2 1", "3: 1 -2 1", "2: 1 -1 1"])
def test_d1_squares_to_zero(word):
    page = e1_page(build_cube(word, 8), check=False)
    page.check_d1_squared()


def test_unknot_single_column():
    a = compute_e2("2: 1", 12)
    b = compute_e2("1:", 12)
    assert a.columns() == [1] and b.columns() == [0]
    top = min(a.s_max, b.s_max)
    sa = {s: n for s, n in a.poincare_s().items() if s <= top}
    sb = {s: n for s, n in b.poincare_s().items() if s <= top}
    # Z[x] ⊗ Λ(odd class): one class in every degree from the bottom up
    assert sorted(sb) == list(range(0, top + 1)) and set(sb.values()) == {1}
    assert sorted(sa) == list(range(min(sa), top + 1)) and set(sa.values()) == {1}


def test_normalization_preserves_total_degree():
    raw = e2_page(e1_page(build_cube("2: 1 1 1", 8)))
    norm = normalize(raw, parse_braid("2: 1 1 1"))
    l = norm.normalization["l_shift"]
    assert norm.normalization["mode"] == "absolute"
    totals_raw = sorted(t + s for (t, s, _h) in raw.nonzero())
    totals_norm = sorted(t + s - l for (t, s, _h) in norm.nonzero())
    assert totals_raw == totals_norm


def test_relative_mode_without_length():
    t = compute_e2("3: 1 -2", 6)
    assert t.normalization["mode"] == "relative" and t.normalization["rho"] is None
    t2 = compute_e2("3: 1 -2", 6, min_length=2)
    assert t2.normalization["mode"] == "absolute"


def test_half_integer_rho_rejected():
    with pytest.raises(ValueError):
        compute_e2("3: 1 -2", 6, min_length=1)


def test_braid_relation_exact():
    rep = invariance_check("3: 1 2 1", "3: 2 1 2", 10)
    assert rep.mode == "exact" and rep.equal, rep
    assert rep.offset == (0, 0, 0)


def test_conjugation_exact():
    rep = invariance_check("3: 1 2 -1", "3: 2", 10, min_length1=1)
    assert rep.equal, rep


def test_stabilization_offset_recorded():
    rep = invariance_check("2: 1", "3: 1 2", 12)
    assert rep.mode == "offset" and rep.equal, rep
    assert rep.offset == (-1, 1, -1)


def test_different_links_detected():
    rep = invariance_check("2: 1 1", "2: 1 1 1", 10)
    assert not rep.equal and rep.first_discrepancy is not None
    assert str(rep).startswith("FAIL")


def _table(entries, s_max):
    return TriplyGradedTable(entries, {"mode": "absolute"}, s_max)


def test_compare_exact_and_offset():
    a = _table({(0, 0, 0): (1, ()), (0, 2, 0): (1, (2,))}, 4)
    b = _table({(1, 1, 0): (1, ()), (1, 3, 0): (1, (2,))}, 5)
    assert not compare_tables(a, b, exact=True).equal
    rep = compare_tables(a, b, exact=False)
    assert rep.equal and rep.offset == (-1, -1, 0)


def test_compare_incomparable_windows():
    a = _table({(0, 5, 0): (1, ())}, 6)
    b = _table({(0, 5, 0): (1, ())}, 2)
    with pytest.raises(ValueError):
        compare_tables(a, b, exact=True)


def test_torsion_is_compared():
    a = _table({(0, 0, 0): (1, (2,))}, 4)
    b = _table({(0, 0, 0): (1, (3,))}, 4)
    assert not compare_tables(a, b, exact=False).equal


def test_table_views_and_text():
    t = _table({(0, 0, 0): (1, ()), (0, 0, 2): (2, ()), (1, 2, 1): (0, (2, 2))}, 4)
    assert t.poincare_ts() == {(0, 0): 3}
    assert t.torsion_ts() == {(1, 2): [2, 2]}
    assert t.column_ranks() == {0: 3, 1: 0}
    assert t.column_torsion() == {1: [2, 2]}
    obj = json.loads(t.to_json())
    assert obj["entries"][-1] == {"t": 1, "s": 2, "h": 1, "rank": 0, "torsion": [2, 2]}
    assert "Z/2 Z/2" in t.to_text()
    assert t.shifted(1, 2, 0).s_max == 6


def test_parallel_map_keeps_order(monkeypatch):
    monkeypatch.setenv("BROKENSYM_THREADS", "4")
    assert parallel_map(lambda x: x * x, range(20)) == [x * x for x in range(20)]


def test_threads_do_not_change_results(monkeypatch):
    serial = compute_e2("3: 1 2 1", 8)
    monkeypatch.setenv("BROKENSYM_THREADS", "3")
    threaded = compute_e2("3: 1 2 1", 8)
    assert serial.entries == threaded.entries


def test_face_check_catches_broken_sign(monkeypatch):
    import brokensym.cube as cube_mod

    real = cube_mod.restriction_bs_map

    def broken(j):
        f = real(j)
        return (lambda mask, e: {k: -c for k, c in f(mask, e).items()}) if j == 1 else f

    monkeypatch.setattr(cube_mod, "restriction_bs_map", broken)
    with pytest.raises(ChainError):
        build_cube("3: 1 2", 4)


def test_d1_squared_long_mixed_word():
    page = e1_page(build_cube("3: 1 -2 1 2 -1 2", 6), check=False)
    page.check_d1_squared()


def test_free_reduction_normalization_record():
    t = compute_e2("2: 1 -1", 6)
    assert t.normalization["l_shift"] == -1 and t.normalization["rho"] == 1
    t1 = compute_e2("2: 1", 6)
    assert t1.normalization["s_offset"] == -2 and t1.normalization["t_offset"] == 0
