from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from kqm.errors import DomainError, DuplicateNode, PositivityError, RangeError
from kqm.exact import (Poly, Q, alt_diff, binomial_row, extend_at, fmt, interpolate,
                       lemma_extension, positive_from)

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
positive = st.fractions(min_value=Fraction(1, 12), max_value=20, max_denominator=12)
polys = st.lists(rationals, max_size=5).map(lambda cs: Poly(tuple(cs)))


def test_q_rejects_floats_and_bools():
    with pytest.raises(TypeError):
        Q(0.5)
    with pytest.raises(TypeError):
        Q(True)
    assert Q("3/6") == Fraction(1, 2)


def test_fmt():
    assert fmt(Fraction(-35)) == "-35"
    assert fmt(Fraction(28, 13)) == "28/13"


def test_poly_normalizes_and_evaluates():
    p = Poly.of(1, 0, 3, 0, 0)
    assert p.coeffs == (1, 0, 3) and p.degree == 2
    assert Poly(()).degree == -1 and Poly(()).is_zero()
    assert p(2) == 13
    assert repr(p) == "Poly(1 + 3*x^2)"


@given(polys, polys, rationals)
def test_poly_ring_ops(p, q, x):
    assert (p + q)(x) == p(x) + q(x)
    assert (p - q)(x) == p(x) - q(x)
    assert (p * q)(x) == p(x) * q(x)


@given(polys, rationals, rationals)
def test_poly_shift(p, a, x):
    assert p.shift(a)(x) == p(x + a)


@given(polys, st.integers(-5, 5))
def test_interpolation_recovers_polynomial(p, start):
    nodes = range(start, start + max(p.degree, 0) + 1)
    assert interpolate(p.sample(nodes)) == p


@given(st.lists(rationals, min_size=1, max_size=6))
def test_interpolation_matches_sympy(values):
    pts = list(enumerate(values))
    ours = interpolate(pts)
    x = sympy.Symbol("x")
    theirs = sympy.Poly(sympy.interpolate([(i, sympy.Rational(v.numerator, v.denominator))
                                           for i, v in pts], x), x)
    want = [Fraction(int(c.p), int(c.q)) for c in reversed(theirs.all_coeffs())]
    while want and want[-1] == 0:
        want.pop()
    assert ours.coeffs == tuple(want)


def test_interpolation_duplicate_nodes():
    with pytest.raises(DuplicateNode):
        interpolate([(1, 2), (1, 3)])


@given(polys, st.integers(0, 4))
def test_alt_diff_vanishes_above_degree(p, n):
    m = max(p.degree, 0) + 1
    seq = [p(i) for i in range(n + m + 1)]
    assert alt_diff(seq, m, n) == 0


def test_alt_diff_range():
    with pytest.raises(RangeError):
        alt_diff([1, 2, 3], 3, 0)
    assert binomial_row(3) == [1, -3, 3, -1]


@given(polys, st.integers(-10, 10))
def test_positive_from_agrees_with_scan(p, N):
    ok, witness = positive_from(p, N)
    if ok:
        # beyond the certificate every sampled value is positive
        assert all(p(n) > 0 for n in range(N, N + 60))
    else:
        assert witness >= N and p(witness) <= 0
        assert all(p(n) > 0 for n in range(N, witness))


def test_positive_from_zero_and_negative_lead():
    assert positive_from(Poly(()), 3) == (False, 3)
    ok, w = positive_from(Poly.of(10, -1), 0)
    assert not ok and w == 10


@given(st.lists(positive, min_size=1, max_size=5))
def test_lemma_extension_auto(b):
    t, w = lemma_extension(b)
    l = len(b) - 1
    assert [w(n) for n in range(l + 1)] == list(b)
    assert w(l + 1) == t and w.degree <= l + 1
    assert positive_from(w, 0).holds


def test_lemma_extension_explicit_t():
    t, w = lemma_extension([1, 4], 13)
    assert w == Poly.of(1, 0, 3) and t == 13
    assert extend_at([1, 4], 13) == w


def test_lemma_extension_errors():
    with pytest.raises(DomainError):
        lemma_extension([1, 0])
    with pytest.raises(PositivityError) as exc:
        lemma_extension([1, 4], Fraction(1, 100))
    assert exc.value.witness >= 3
