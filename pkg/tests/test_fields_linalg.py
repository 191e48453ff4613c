from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from eql import linalg
from eql.fields import (GAUSSIAN_RATIONALS, RATIONALS, Fp, GaussianRational, field_from_spec, format_scalar,
                        prime_field)

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)
gaussians = st.builds(GaussianRational, fractions, fractions)


def test_field_specs():
    assert field_from_spec("rationals") is RATIONALS
    assert field_from_spec("gaussian-rationals") is GAUSSIAN_RATIONALS
    assert field_from_spec("F_5").p == 5
    assert field_from_spec("GF(7)").p == 7
    with pytest.raises(ValueError):
        field_from_spec("F_4")
    with pytest.raises(ValueError):
        field_from_spec("reals")


def test_scalar_formatting():
    assert format_scalar(Fraction(3, 6)) == "1/2"
    assert format_scalar(GaussianRational(1, -2)) == {"re": "1", "im": "-2"}
    assert format_scalar(GaussianRational(5, 0)) == "5"
    assert format_scalar(Fp(7, 5)) == "2"
    assert GAUSSIAN_RATIONALS.parse({"re": "1/2", "im": "3"}) == GaussianRational(Fraction(1, 2), 3)


def test_prime_field_rejects_bad_denominator():
    F = prime_field(3)
    assert F.coerce(Fraction(1, 2)) == F.coerce(2)
    with pytest.raises(ZeroDivisionError):
        F.coerce(Fraction(1, 3))
    with pytest.raises(ValueError):
        Fp(1, 3) + Fp(1, 5)


@given(gaussians, gaussians, gaussians)
def test_gaussian_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    if a != 0:
        assert (b / a) * a == b
        assert a * a.conjugate() == GaussianRational(a.norm(), 0)


@given(st.integers(0, 12), st.integers(1, 12), st.sampled_from([2, 3, 5, 7, 11]))
def test_prime_field_inverse(a, b, p):
    F = prime_field(p)
    x, y = F.coerce(a), F.coerce(b)
    if y != 0:
        assert (x / y) * y == x


matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(st.lists(fractions, min_size=c, max_size=c), min_size=r, max_size=r)))


@given(matrices)
def test_rank_nullity(a):
    cols = len(a[0])
    assert linalg.rank(a, RATIONALS) + len(linalg.nullspace(a, RATIONALS)) == cols
    for v in linalg.nullspace(a, RATIONALS):
        assert all(x == 0 for x in linalg.matvec(a, v, RATIONALS))


@given(st.integers(1, 4), st.integers(0, 10 ** 6))
def test_inverse_roundtrip(n, seed):
    from eql.fields import default_rng
    from eql.quiver import random_invertible
    m = random_invertible(n, RATIONALS, default_rng(seed))
    assert linalg.matmul(m, linalg.inverse(m, RATIONALS), RATIONALS) == linalg.identity(n, RATIONALS)


def test_solve_and_coordinates():
    a = [[1, 2], [3, 4]]
    a = [[Fraction(x) for x in r] for r in a]
    x = linalg.solve(a, [Fraction(5), Fraction(6)], RATIONALS)
    assert linalg.matvec(a, x, RATIONALS) == [5, 6]
    with pytest.raises(ZeroDivisionError):
        linalg.inverse([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]], RATIONALS)
