from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from kqm.errors import DomainError, RangeError
from kqm.exact import Poly
from kqm.shift import (AltDiffNonzero, InterpolantMismatch, NonexistenceCertificate,
                       PositivityFail, ShiftCompletion, ShiftProblem, alpha_frame, beta,
                       check_shift, complete_shift)

positive = st.fractions(min_value=Fraction(1, 6), max_value=6, max_denominator=6)


def test_beta():
    assert beta([1, 3, 2], 0) == 1
    assert beta([1, 3, 2], 3) == 36
    with pytest.raises(RangeError):
        beta([1], 2)


def test_free_case_with_given_t():
    # published completion: squared weights 13/4, 28/13 and w = 3x^2 + 1
    c = complete_shift(ShiftProblem(m=3, k=2, weights=(1, 3, 2), t=13))
    assert isinstance(c, ShiftCompletion)
    assert c.w == Poly.of(1, 0, 3)
    assert c.squared_weights(5) == [1, 9, 4, Fraction(13, 4), Fraction(28, 13)]
    assert c.strict


def test_pinned_case_unique_polynomial():
    c = complete_shift(ShiftProblem(m=4, k=2, weights=(2, 5, 3, 1, 2)))
    assert c.w.coeffs == (1, Fraction(71, 3), Fraction(-43, 2), Fraction(35, 6))
    assert c.strict
    # the frame it interpolates: 1, 9, 9, 36
    assert alpha_frame((2, 5, 3, 1, 2), 2) == [1, 9, 9, 36]


def test_pinned_case_nonexistence():
    problem = ShiftProblem(m=3, k=2, weights=(2, 5, 3, 1, 2))
    cert = complete_shift(problem)
    assert cert == NonexistenceCertificate(AltDiffNonzero(0, Fraction(-35)))
    assert cert.recheck(problem)
    # hand value: 1 - 3*9 + 3*9 - 36
    assert 1 - 3 * 9 + 3 * 9 - 36 == -35


def test_positivity_failure_certificate():
    # frame 1, 4, 1 forces w = 1 + 6x - 3x^2, negative at x = 3
    problem = ShiftProblem(m=3, k=1, weights=(1, 2, Fraction(1, 2)))
    cert = complete_shift(problem)
    assert cert == NonexistenceCertificate(PositivityFail(3))
    assert cert.recheck(problem)


def test_interpolant_mismatch_certificate_recheck():
    problem = ShiftProblem(m=3, k=2, weights=(2, 5, 3, 1, 2))
    frame = alpha_frame(problem.weights, 2)
    cert = NonexistenceCertificate(InterpolantMismatch(3, frame[3], Fraction(1)))
    assert cert.recheck(problem)


def test_validation():
    with pytest.raises(DomainError):
        ShiftProblem(m=0, k=1, weights=(1,))
    with pytest.raises(DomainError):
        ShiftProblem(m=2, k=1, weights=(1, 0))
    with pytest.raises(DomainError):
        ShiftProblem(m=4, k=2, weights=(1,), filler=(1,))


def test_m1_free_case_is_constant():
    c = complete_shift(ShiftProblem(m=1, k=2, weights=(3,)))
    assert check_shift(c, 1, 2, 10) == (True, None)
    assert c.squared_weights(5) == [9, 1, 1, 1, 1]


@given(st.integers(1, 4), st.integers(1, 3), st.data())
def test_free_case_always_completes(m, k, data):
    l = data.draw(st.integers(1, k + m - 2)) if k + m - 2 >= 1 else 1
    weights = tuple(data.draw(st.lists(positive, min_size=l, max_size=l)))
    problem = ShiftProblem(m=m, k=k, weights=weights)
    if not problem.free_case:
        return
    c = complete_shift(problem)
    assert isinstance(c, ShiftCompletion)
    assert c.squared_weights(l) == [w * w for w in weights]
    assert check_shift(c, m, k, 15) == (True, None)
    assert all(c.squared_weight(s) > 0 for s in range(1, 30))


@given(st.integers(3, 5), st.integers(1, 3), st.fractions(min_value=0, max_value=5, max_denominator=4),
       st.integers(0, 3), st.lists(positive, min_size=3, max_size=3))
def test_pinned_case_recovers_square_polynomial(m, k, a, extra, head):
    # w(n) = (a n + 1)^2 has rational square-root ratios, so the weights are rational
    root = Poly.of(1, a)
    w = root * root
    weights = tuple(head[:k]) + tuple(root(n) / root(n - 1) for n in range(1, m + extra))
    problem = ShiftProblem(m=m, k=k, weights=weights)
    assert not problem.free_case
    c = complete_shift(problem)
    assert isinstance(c, ShiftCompletion)
    assert c.w == w
    assert c.strict == (w.degree == m - 1)
    assert check_shift(c, m, k, 10) == (True, None)


def test_strictness_via_shift_oracle():
    c = complete_shift(ShiftProblem(m=3, k=2, weights=(1, 3, 2), t=13))
    assert check_shift(c, 3, 2, 12) == (True, None)
    ok, first = check_shift(c, 2, 2, 12)
    assert not ok and first == 0
