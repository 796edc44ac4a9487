"""Completing a finite weight sequence to a k-quasi-m-isometric weighted shift.

Run with ``python demos/shift_completion.py``.
"""

from fractions import Fraction

from kqm.cli import sqrt_digits
from kqm.exact import fmt
from kqm.shift import ShiftProblem, alpha_frame, check_shift, complete_shift

# Three weights, m = 3, k = 2.  Only l = 3 <= k + m - 2 weights are given,
# so a completion always exists; t fixes the next moment of the tail.
problem = ShiftProblem(m=3, k=2, weights=(1, 3, 2), t=13)
c = complete_shift(problem)
print("certifying polynomial:", c.w)
print("squared weights:", [fmt(x) for x in c.squared_weights(7)])
print("strict:", c.strict)

# The moments ||S^s e_k||^2 follow w, so third differences vanish ...
print("order 3 check:", check_shift(c, 3, 2, horizon=20))
# ... but second ones do not: the completion is strict.
print("order 2 check:", check_shift(c, 2, 2, horizon=20))

# With more data the polynomial is pinned down.
c = complete_shift(ShiftProblem(m=4, k=2, weights=(2, 5, 3, 1, 2)))
print("\npinned polynomial:", c.w)
print("frame it interpolates:", [fmt(x) for x in alpha_frame((2, 5, 3, 1, 2), 2)])

# Lower the order to 3 and the same data cannot be completed: the third
# alternating difference of the frame 1, 9, 9, 36 is 1 - 27 + 27 - 36.
cert = complete_shift(ShiftProblem(m=3, k=2, weights=(2, 5, 3, 1, 2)))
print("\nno completion:", cert.failing_condition)

# Every completed weight is a square root of a rational; decimals are for display only.
sq = Fraction(13, 4)
print("lambda_4 ~", sqrt_digits(sq, 12))
