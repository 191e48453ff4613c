from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from eql import linalg
from eql.fields import RATIONALS, default_rng
from eql.fixtures import cy3_exterior
from eql.quiver import (DimVector, PathSeries, Quiver, QuiverError, Representation, a2_quiver, enumerate_paths,
                        evaluate_series, gauge_act, growth_diagnostic, loop_quiver, random_gauge,
                        random_representation, series_multiply, word)

from support import PotentialChain


def series(q, terms, order):
    return PathSeries.from_terms(q, order, [(tuple(w), c) for w, c in terms])


# construction and validation

def test_quiver_validation():
    with pytest.raises(QuiverError):
        Quiver([1], [("a", 1, 2)])
    with pytest.raises(QuiverError):
        Quiver([1, 2], [("a", 1, 2), ("a", 2, 1)])
    with pytest.raises(QuiverError):
        Quiver([1, 1], [])
    q = a2_quiver()
    with pytest.raises(QuiverError):
        DimVector(q, {1: 1})
    with pytest.raises(QuiverError):
        DimVector(q, {1: -1, 2: 0})
    with pytest.raises(QuiverError):
        word(loop_quiver(), ["e", "f"])
    with pytest.raises(QuiverError):
        Representation(q, {1: 1, 2: 2}, {"a": [[1, 2]]})
    with pytest.raises(QuiverError):
        PathSeries(q, 0, {("a",): 1})


def test_path_words_compose():
    q = Quiver([1, 2], [("a", 1, 2), ("b", 2, 1)])
    assert word(q, ["a", "b", "a"]).end(q) == 2
    with pytest.raises(QuiverError):
        word(q, ["a", "a"])


# enumerate_paths

def test_loop_paths():
    q = loop_quiver()
    got = enumerate_paths(q, 1, 1, 3)
    assert [w.edges for w in got] == [(), ("e",), ("e", "e"), ("e", "e", "e")]


def test_a2_single_path():
    assert [w.edges for w in enumerate_paths(a2_quiver(), 1, 2, 5)] == [("a",)]


def test_three_loop_count():
    q = Quiver([1], [("e1", 1, 1), ("e2", 1, 1), ("e3", 1, 1)])
    assert len(enumerate_paths(q, 1, 1, 2)) == 13


quivers = st.integers(1, 3).flatmap(
    lambda n: st.lists(st.tuples(st.integers(1, n), st.integers(1, n)), max_size=4).map(
        lambda es: Quiver(range(1, n + 1), [(f"x{k}", s, t) for k, (s, t) in enumerate(es)])))


@given(quivers, st.integers(1, 4))
def test_path_count_recurrence(q, n):
    def count(a, b, length):
        return sum(1 for w in enumerate_paths(q, a, b, length) if len(w) == length)
    for a in q.vertices:
        for b in q.vertices:
            want = sum(count(a, e.source, n - 1) for e in q.edges if e.target == b)
            assert count(a, b, n) == want


@given(quivers, st.integers(0, 3))
def test_paths_ordered_length_lex(q, n):
    for a in q.vertices:
        for b in q.vertices:
            ws = enumerate_paths(q, a, b, n)
            assert ws == sorted(ws, key=lambda w: (len(w), w.edges))


# series_multiply

def test_multiply_single_edges():
    q = loop_quiver()
    e = series(q, [(["e"], 1)], 3)
    assert series_multiply(e, e) == series(q, [(["e", "e"], 1)], 3)


def test_trivial_path_is_unit():
    q = loop_quiver()
    one = PathSeries(q, 3, {word(q, [], 1): 1})
    g = series(q, [(["e"], 2), (["e", "e", "e"], -1)], 3)
    assert series_multiply(one, g) == g


def test_two_loop_expansion():
    q = Quiver([1], [("e1", 1, 1), ("e2", 1, 1)])
    f = series(q, [(["e1"], 1), (["e2"], 1)], 2)
    g = series(q, [(["e1"], 1), (["e2"], -1)], 2)
    want = series(q, [(["e1", "e1"], 1), (["e1", "e2"], -1), (["e2", "e1"], 1), (["e2", "e2"], -1)], 2)
    assert series_multiply(f, g) == want


def test_truncation_takes_minimum_order():
    q = loop_quiver()
    f = series(q, [(["e"], 1)], 5)
    g = series(q, [(["e", "e"], 1)], 2)
    h = series_multiply(f, g)
    assert h.order == 2 and h.is_zero()


# evaluate_series

def test_evaluate_basics():
    q = loop_quiver()
    M = [[Fraction(1), Fraction(2)], [Fraction(3), Fraction(4)]]
    rep = Representation(q, {1: 2}, {"e": M})
    assert evaluate_series(PathSeries(q, 3), rep, 1, 1) == linalg.zeros(2, 2, RATIONALS)
    assert evaluate_series(series(q, [(["e"], 1)], 3), rep, 1, 1) == M


def test_geometric_series_on_jordan_block():
    q = loop_quiver()
    J = [[0, 1], [0, 0]]
    rep = Representation(q, {1: 2}, {"e": J})
    f = series(q, [(["e"] * n, 1) for n in range(1, 6)], 5)
    assert evaluate_series(f, rep, 1, 1) == [[0, 1], [0, 0]]


def test_evaluation_order():
    q = Quiver([1, 2, 3], [("a", 1, 2), ("b", 2, 3)])
    A = [[1], [2]]
    B = [[1, 1]]
    rep = Representation(q, {1: 1, 2: 2, 3: 1}, {"a": A, "b": B})
    ab = series(q, [(["a", "b"], 1)], 2)
    assert evaluate_series(ab, rep, 1, 3) == linalg.matmul(B, A, RATIONALS)


# gauge action

def test_gauge_examples():
    q = loop_quiver()
    rep = Representation(q, {1: 2}, {"e": [[1, 2], [3, 4]]})
    assert gauge_act({1: linalg.identity(2, RATIONALS)}, rep) == rep
    assert gauge_act({1: [[5, 0], [0, 5]]}, rep) == rep
    q = a2_quiver()
    rep = Representation(q, {1: 1, 2: 1}, {"a": [[1]]})
    assert gauge_act({1: [[2]], 2: [[3]]}, rep).matrix("a") == [[Fraction(2, 3)]]
    with pytest.raises(QuiverError):
        gauge_act({1: [[0]], 2: [[1]]}, rep)


def _random_series(q, rng, order):
    from eql.quiver import all_paths
    terms = [(w, RATIONALS.random(rng)) for w in all_paths(q, order) if rng.random() < 0.5]
    return PathSeries(q, order, {w: c for w, c in terms})


@given(quivers, st.integers(0, 10 ** 6))
def test_gauge_equivariance(q, seed):
    rng = default_rng(seed)
    dims = {v: rng.randint(0, 2) for v in q.vertices}
    rep = random_representation(q, dims, RATIONALS, rng)
    g = random_gauge(rep, rng)
    moved = gauge_act(g, rep)
    f = _random_series(q, rng, 3)
    for a in q.vertices:
        for b in q.vertices:
            lhs = evaluate_series(f, moved, a, b)
            ginv = linalg.inverse(g[b], RATIONALS) if dims[b] else []
            rhs = linalg.matmul(linalg.matmul(ginv, evaluate_series(f, rep, a, b), RATIONALS, inner=dims[b]),
                                g[a], RATIONALS, inner=dims[a])
            assert lhs == rhs


@given(quivers, st.integers(0, 10 ** 6))
def test_product_evaluates_as_composition(q, seed):
    rng = default_rng(seed)
    dims = {v: rng.randint(1, 2) for v in q.vertices}
    rep = random_representation(q, dims, RATIONALS, rng)
    f = _random_series(q, rng, 2)
    g = _random_series(q, rng, 2)
    # raise both orders so the product is not truncated
    f4 = PathSeries(q, 4, f.coeffs)
    g4 = PathSeries(q, 4, g.coeffs)
    fg = series_multiply(f4, g4)
    for a in q.vertices:
        for c in q.vertices:
            want = linalg.zeros(dims[c], dims[a], RATIONALS)
            for b in q.vertices:
                part = linalg.matmul(evaluate_series(g4, rep, b, c), evaluate_series(f4, rep, a, b), RATIONALS,
                                     inner=dims[b])
                want = linalg.add(want, part)
            assert evaluate_series(fg, rep, a, c) == want


# growth diagnostic

def test_growth_examples():
    q = loop_quiver()
    assert growth_diagnostic(series(q, [(["e"], 1)], 1)) == 1
    f = series(q, [(["e"] * n, 2 ** n) for n in range(1, 7)], 6)
    assert growth_diagnostic(f) == 2


def test_growth_of_cy3_potential():
    W = PotentialChain(cy3_exterior()).W
    assert growth_diagnostic(W.to_series()) <= 1


def test_json_roundtrip():
    q = a2_quiver()
    rep = Representation(q, {1: 2, 2: 1}, {"a": [[Fraction(1, 2), 3]]})
    assert Representation.from_json(q, rep.to_json()) == rep
    assert Quiver.from_json(q.to_json()).edges == q.edges
    f = series(q, [(["a"], Fraction(-2, 3))], 2)
    assert PathSeries.from_json(q, f.to_json()) == f
