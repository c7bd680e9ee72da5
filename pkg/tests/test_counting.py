import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from statcp import FAIL, Model, propagate, solve_satisfaction
from statcp.counting import BinStructure, post_bin_counts, post_contingency, post_global_cardinality


def fixed_values(store, vs):
    assert all(store.lo[v.index] == store.hi[v.index] for v in vs)
    return [int(store.lo[v.index]) for v in vs]


def fixed_reals(m, xs):
    return [m.real(f"x{i}", x, x) for i, x in enumerate(xs)]


@pytest.mark.parametrize("decomposition", ["channel", "reified"])
def test_bin_counts_worked_example(decomposition):
    m = Model()
    xs = fixed_reals(m, [1, 1, 5, 3, 1, 2, 1, 1, 3, 1])
    bins = BinStructure((1, 3, 4, 6))
    bc = post_bin_counts(m, xs, bins, decomposition=decomposition)
    assert fixed_values(propagate(m), bc.counts) == [7, 2, 1]


@pytest.mark.parametrize("decomposition", ["channel", "reified"])
def test_contingency_table(decomposition):
    m = Model()
    pairs = [(1.0, 2.0), (3.0, 1.0), (3.0, 2.0)]
    ct = post_contingency(m, pairs, BinStructure((1, 3, 4)), BinStructure((1, 2, 4)),
                          decomposition=decomposition)
    st_ = propagate(m)
    assert [fixed_values(st_, row) for row in ct.cells] == [[0, 1], [1, 1]]
    assert fixed_values(st_, ct.rows) == [1, 2]
    assert fixed_values(st_, ct.cols) == [1, 2]


def test_single_pair_contingency():
    m = Model()
    ct = post_contingency(m, [(0.5, 0.5)], BinStructure((0, 1, 2)), BinStructure((0, 1, 2, 3)))
    st_ = propagate(m)
    assert [fixed_values(st_, row) for row in ct.cells] == [[1, 0, 0], [0, 0, 0]]
    assert fixed_values(st_, ct.rows) == [1, 0]
    assert fixed_values(st_, ct.cols) == [1, 0, 0]


def test_global_cardinality_examples():
    m = Model()
    xs = [m.integer(f"x{i}", v, v) for i, v in enumerate([1, 1, 2])]
    c = [m.integer(f"c{j}", 0, 3) for j in range(2)]
    post_global_cardinality(m, xs, [1, 2], c)
    assert fixed_values(propagate(m), c) == [2, 1]

    m = Model()
    xs = [m.integer(f"x{i}", v, v) for i, v in enumerate([1, 3, 3])]
    c = [m.integer(f"c{j}", 0, 3) for j in range(2)]
    post_global_cardinality(m, xs, [1, 2], c, closed=False)
    assert fixed_values(propagate(m), c) == [1, 0]


def test_closed_cardinality_rejects_uncounted_value():
    m = Model()
    xs = [m.integer(f"x{i}", v, v) for i, v in enumerate([1, 3])]
    c = [m.integer(f"c{j}", 0, 2) for j in range(2)]
    post_global_cardinality(m, xs, [1, 2], c, closed=True)
    assert propagate(m) is FAIL


def test_values_on_first_boundary():
    m = Model()
    bins = BinStructure.uniform(0, 3, 3)
    bc = post_bin_counts(m, fixed_reals(m, [0.0] * 4), bins)
    assert fixed_values(propagate(m), bc.counts) == [4, 0, 0]


def test_counts_drive_values():
    m = Model()
    xs = [m.real(f"x{i}", 0, 10) for i in range(3)]
    bins = BinStructure((0, 2, 10))
    bc = post_bin_counts(m, xs, bins)
    m.add(bc.counts[0] == 3)
    st_ = propagate(m)
    assert all(st_.hi[x.index] <= 2 for x in xs)


def test_bin_structure_validation():
    with pytest.raises(ValueError):
        BinStructure((1,))
    with pytest.raises(ValueError):
        BinStructure((0, 0, 1))
    with pytest.raises(ValueError):
        BinStructure((0, float("inf")))
    b = BinStructure.uniform(-10, 10, 5)
    assert b.boundaries == (-10, -6, -2, 2, 6, 10)
    assert b.locate(-10) == 1 and b.locate(10) == 0 and b.locate(2) == 4


@settings(max_examples=80, deadline=None)
@given(st.lists(st.floats(-6, 6, allow_nan=False), min_size=1, max_size=8),
       st.lists(st.floats(-5, 5, allow_nan=False), min_size=2, max_size=5, unique=True),
       st.sampled_from(["channel", "reified"]))
def test_counts_match_direct_tally(xs, edges, decomposition):
    edges = sorted(edges)
    if min(np.diff(edges)) < 1e-6:
        return
    bins = BinStructure(tuple(edges))
    m = Model()
    bc = post_bin_counts(m, fixed_reals(m, xs), bins, decomposition=decomposition)
    out = solve_satisfaction(m)
    assert [out.solution[c] for c in bc.counts] == bins.tally(xs)
