import pytest
from hypothesis import given, settings, strategies as st

from eql.fields import RATIONALS, prime_field
from eql.fixtures import cy3_exterior, three_loop_quiver
from eql.ncdeform import (Equivalence, NcDeformError, NcTower, QuotientAlgebra, build_tower, check_equivalence,
                          ext_dim_via_resolution, ext_space, hull_compare, lemma_checks, nilpotent_modules,
                          projective_resolution, theta_map, universal_extension, vertex_simple)
from eql.quiver import PathSeries, Quiver, word

from support import PotentialChain, a2_algebra, commutator_algebra, loop_e3_algebra, series

F2 = prime_field(2)
TWO_LOOPS = Quiver([1], [("e1", 1, 1), ("e2", 1, 1)])


def semisimple(order, field):
    return QuotientAlgebra(Quiver([1, 2], []), [], order, field)


def r_dims(tower):
    return [lv.dim_R for lv in tower.levels]


# quotient algebras

def test_quotient_dimensions():
    assert a2_algebra(2, RATIONALS).graded_dims() == [2, 1, 0]
    assert loop_e3_algebra(5, RATIONALS).graded_dims() == [1, 1, 1, 0, 0, 0]
    assert commutator_algebra(3, RATIONALS).graded_dims() == [1, 3, 6, 10]
    assert commutator_algebra(2, F2).check().ok


def test_killed_idempotent_rejected():
    q = Quiver([1], [("e", 1, 1)])
    with pytest.raises(NcDeformError):
        QuotientAlgebra(q, [PathSeries(q, 2, {word(q, [], 1): 1})], 2)


@settings(max_examples=15)
@given(st.lists(st.tuples(st.sampled_from(["e1", "e2"]), st.sampled_from(["e1", "e2"]), st.integers(-2, 2)),
                min_size=1, max_size=4),
       st.integers(2, 3))
def test_quotients_are_associative_with_idempotents(terms, order):
    f = series(TWO_LOOPS, [((a, b), c) for a, b, c in terms], order)
    A = QuotientAlgebra(TWO_LOOPS, [f], order)
    rep = A.check()
    assert rep.ok
    assert sum(A.graded_dims()) == A.dim


# Ext and resolutions

@pytest.mark.parametrize("make", [a2_algebra, commutator_algebra, loop_e3_algebra])
def test_ext_between_simples_counts_arrows(make):
    A = make(2, RATIONALS)
    q = A.quiver
    for i in q.vertices:
        for j in q.vertices:
            arrows = sum(1 for e in q.edges if e.source == i and e.target == j)
            S, T = vertex_simple(q, i, RATIONALS), vertex_simple(q, j, RATIONALS)
            assert ext_space(A, S, T).dim == arrows
            assert ext_dim_via_resolution(A, S, T) == arrows


def test_projectives_have_no_extensions():
    A = a2_algebra(2, RATIONALS)
    q = A.quiver
    for v in q.vertices:
        P, _, _ = A.projective(v)
        assert A.is_module(P)
        assert all(ext_space(A, P, vertex_simple(q, j, RATIONALS)).dim == 0 for j in q.vertices)


def test_a2_resolutions():
    A = a2_algebra(2, RATIONALS)
    q = A.quiver
    assert projective_resolution(A, vertex_simple(q, 1, RATIONALS), 2).ranks() == [[1], [2]]
    assert projective_resolution(A, vertex_simple(q, 2, RATIONALS), 2).ranks() == [[2]]


def test_truncated_loop_resolution_is_periodic():
    A = loop_e3_algebra(4, RATIONALS)
    res = projective_resolution(A, vertex_simple(A.quiver, 1, RATIONALS), 4)
    assert res.ranks() == [[1]] * 5


def test_universal_extension():
    A = a2_algebra(2, RATIONALS)
    q = A.quiver
    ue = universal_extension(A, vertex_simple(q, 1, RATIONALS))
    assert ue.sub_dims == {1: 0, 2: 1}
    assert ue.module.dims.as_tuple() == (1, 1) and A.is_module(ue.module)
    assert ue.module.matrix("a") != [[0]]
    ue = universal_extension(A, vertex_simple(q, 2, RATIONALS))
    assert ue.sub_dims == {1: 0, 2: 0}


# towers

@pytest.mark.parametrize("field", [RATIONALS, F2])
def test_tower_dimensions(field):
    a2 = build_tower(a2_algebra(2, field), 3)
    assert r_dims(a2) == [2, 3, 3, 3] and a2.stabilized_at() == 1
    ss = build_tower(semisimple(1, field), 2)
    assert r_dims(ss) == [2, 2, 2] and ss.stabilized_at() == 0
    loop = build_tower(loop_e3_algebra(3, field), 3)
    assert r_dims(loop) == [1, 2, 3, 3]
    comm = build_tower(commutator_algebra(2, field), 2)
    assert r_dims(comm) == [1, 4, 10]
    assert comm.stabilized_at() is None


def test_hull_and_lemmas():
    for A, n in ((a2_algebra(2, RATIONALS), 3), (loop_e3_algebra(3, F2), 3), (commutator_algebra(2, RATIONALS), 2)):
        tower = build_tower(A, n)
        assert hull_compare(tower).ok
        assert lemma_checks(tower).ok


def test_theta_covers_normal_words():
    tower = build_tower(loop_e3_algebra(3, RATIONALS), 3)
    An, thetas = theta_map(tower, 2)
    assert [str(w) for w in An.basis] and len(thetas) == An.dim == 3


def test_hull_rejects_wrong_dimensions():
    tower = build_tower(loop_e3_algebra(3, RATIONALS), 3)
    q = tower.algebra.quiver
    wrong = QuotientAlgebra(q, [series(q, [(("e", "e"), 1)], 3)], 3)
    rep = hull_compare(NcTower(wrong, tower.work, tower.levels))
    assert not rep.ok and "dim_A" in rep.witness


def test_hull_rejects_wrong_products():
    # anticommutators give the same graded dimensions up to degree two
    tower = build_tower(commutator_algebra(2, RATIONALS), 2)
    q = three_loop_quiver()
    rels = [series(q, [((a, b), 1), ((b, a), 1)], 2) for a, b in (("e2", "e3"), ("e3", "e1"), ("e1", "e2"))]
    wrong = QuotientAlgebra(q, rels, 2)
    assert wrong.graded_dims() == [1, 3, 6]
    assert not hull_compare(NcTower(wrong, tower.work, tower.levels)).ok


def test_jacobian_algebra_of_cubic_potential():
    ch = PotentialChain(cy3_exterior())
    A = QuotientAlgebra(ch.quiver, ch.relations.relations, 3, RATIONALS)
    assert A.graded_dims() == [1, 3, 6, 10]
    tower = build_tower(A, 2)
    assert r_dims(tower) == [1, 4, 10]
    assert hull_compare(tower).ok


# the functors

def test_equivalence_on_semisimple_algebra():
    tower = build_tower(semisimple(1, F2), 1)
    rep = check_equivalence(tower, 3)
    # S1^a + S2^b with 1 <= a + b <= 3
    assert rep.ok and rep.details["modules"] == 2 + 3 + 4


def test_equivalence_on_a2():
    tower = build_tower(a2_algebra(3, F2), 3)
    assert check_equivalence(tower, 3).ok


def test_simples_correspond():
    tower = build_tower(a2_algebra(2, F2), 2)
    eq = Equivalence(tower)
    for v in (1, 2):
        P = eq.phi(eq.simple(v))
        assert P.jh_multiset() == {"1": int(v == 1), "2": int(v == 2)}
        assert eq.counit_is_iso(vertex_simple(tower.algebra.quiver, v, F2))


def test_module_enumeration_needs_finite_field():
    with pytest.raises(NcDeformError):
        nilpotent_modules(a2_algebra(2, RATIONALS), 2)
    # A2 nilpotent modules up to dimension 2: S1, S2, S1+S1, S2+S2, S1+S2, the nonsplit extension
    assert len(nilpotent_modules(a2_algebra(2, F2), 2)) == 6
