from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from mtqc.resources import (PpoFuse, PpoLeaf, c3_tree, c3prime_tree, enc_cost, estimate, gate_overhead,
                            ghz_cost, ghz_cost_closed_form, ghz_depth, ghz_ppo_tree, ghz_table, plan_ghz,
                            ppo_cost, ppo_report, star_cost, tm_c3prime_tree)


def _fuse_all(m):
    """Independent re-implementation of the pairing recipe on bare sizes and costs."""
    items = [(3, 1)] * (m - 2)
    while len(items) > 1:
        odd = len(items) % 2
        nxt = [(a + b - 2, 2 * (ca + cb)) for (a, ca), (b, cb) in zip(items[0:len(items) - odd:2],
                                                                      items[1:len(items) - odd:2])]
        items = ([items[-1]] if odd else []) + nxt
    return items[0]


def test_plan_examples():
    assert plan_ghz(3).rounds == () and plan_ghz(3).depth == 0
    p = plan_ghz(10)
    assert p.depth == 3
    assert p.rounds == (((3, 3),) * 4, ((4, 4),) * 2, ((6, 6),))
    assert plan_ghz(9).rounds[-1] == ((6, 5),)
    with pytest.raises(ValueError):
        plan_ghz(2)


@given(st.integers(3, 300))
def test_plan_invariants(m):
    p = plan_ghz(m)
    assert p.root.size == m
    assert p.n_fusions == m - 3
    assert p.depth == ghz_depth(m) == (0 if m == 3 else (m - 3).bit_length())
    for pairs in p.rounds:
        for a, b in pairs:
            assert a >= b >= 3


def test_closed_form_equals_recursion():
    for m in range(3, 1027):
        size, cost = _fuse_all(m)
        assert size == m
        assert ghz_cost_closed_form(m) == cost
        assert ghz_cost(m) == cost


def test_lossy_examples():
    assert ghz_cost(4) == 4
    assert round(ghz_cost(4, 0.01), 2) == 4.08
    assert round(ghz_cost(10, 0.01, paper_constants=True), 2) == 68.00
    assert round(ghz_cost(9, 0.01, paper_constants=True), 2) == 55.16
    assert round(ghz_cost(18, 0.01, paper_constants=True), 2) == 277.55


@given(st.integers(4, 60), st.floats(0.0, 0.2))
def test_monotone(m, eta):
    assert ghz_cost(m + 1, eta) >= ghz_cost(m, eta)
    assert ghz_cost(m, eta + 0.01) > ghz_cost(m, eta)


def test_enc_cost():
    assert enc_cost(2, 0.0) == 96.0
    assert round(enc_cost(2, 0.01, paper_constants=True), 2) == 104.96
    vals = [enc_cost(m, 0.0) for m in range(2, 12)]
    assert all(v > 0 for v in vals) and vals == sorted(vals)


def test_star_cost():
    assert star_cost(8, 2, 0.0) == 4 * (6 * 52 + 2 * 64 + 4) == 1776
    s1 = star_cost(8, 2, 0.01, "mtqc1", paper_constants=True)
    s2 = star_cost(8, 2, 0.01, "mtqc2", paper_constants=True)
    assert round(s1) == 1962 and round(s2) == 1980
    assert s2 > s1
    assert star_cost(8, 2, 0.01, "mtqc2") > star_cost(8, 2, 0.01, "mtqc1")
    with pytest.raises(ValueError):
        star_cost(2, 2, 0.01)


def test_gate_overhead():
    g = gate_overhead(8, 2, 0.01, "mtqc1", False, 15, paper_constants=True)
    assert g == pytest.approx(7.76e7, rel=5e-3)
    assert gate_overhead(8, 2, 0.01, "mtqc1", False, 0) == 0.0
    assert gate_overhead(8, 2, 0.01, "mtqc1", False, 15) / gate_overhead(8, 2, 0.01, "mtqc1", False, 5) == pytest.approx(27)
    with pytest.raises(ValueError):
        gate_overhead(8, 2, 0.01, "mtqc1", False, -1)


@pytest.mark.parametrize("d", [3, 4, 15, 47])
def test_gate_overhead_cubic(d):
    g = lambda dd: gate_overhead(8, 2, 0.01, "mtqc2", True, dd)
    assert g(2 * d) / g(d) == pytest.approx(8, rel=1e-14)


def test_estimate_bundle():
    e = estimate(8, 2, 0.01, "mtqc1", d=15, paper_constants=True)
    assert e.N_gate == pytest.approx(e.N_star * 6 * (5 * 15 / 4) ** 3)
    assert [r[0] for r in e.N_table] == [4, 5, 9, 10]
    assert e.to_dict()["variant"] == "mtqc1"


def test_table_rows():
    rows = ghz_table(0.01, paper_constants=True)
    assert [r[1] for r in rows] == [4, 10, 16, 28, 40, 52, 64, 88, 256]


def test_ppo_totals():
    rep = ppo_report()
    assert rep["GHZ4"] == 2 and rep["GHZ9"] == 34
    assert rep["C3'(8,2,8)"] == 218 and rep["C3(8,8,8)"] == 378
    assert ppo_cost(tm_c3prime_tree()) == 4
    assert ppo_cost(ghz_ppo_tree(6)) == 10


def test_ppo_recursion_rule():
    leaf = PpoLeaf()
    assert ppo_cost(PpoFuse(leaf, leaf, 0.5)) == 2
    assert ppo_cost(PpoFuse(PpoLeaf(ppo=3), PpoLeaf(ppo=4), 0.25)) == 32
    assert ppo_cost(c3prime_tree(8, 2)) == ppo_cost(c3_tree(8, 4))
    with pytest.raises(ValueError):
        ppo_cost(PpoFuse(leaf, leaf, 0.0))
    with pytest.raises(TypeError):
        ppo_cost(("not", "a", "tree"))
