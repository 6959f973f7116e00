import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import GRID, hyperbolic_pairs
from pqlattice import asymptotics as asy
from pqlattice.lattice import layer_counts, validate_params
from pqlattice.shapes import minimal_perimeter_closed_form


@pytest.mark.parametrize("pq,value", [((7, 3), 0.4472136), ((4, 5), 1.7320508), ((3, 7), 2.2360680)])
def test_cheeger_values(pq, value):
    assert abs(asy.cheeger_constant(validate_params(*pq)) - value) <= 1e-6


@given(hyperbolic_pairs(30))
def test_cheeger_expressions_agree(pq):
    params = validate_params(*pq)
    vals = list(asy.cheeger_expressions(params).values())
    assert max(vals) - min(vals) <= 1e-9 * max(vals)
    assert asy.cheeger_squared(params) == Fraction((params.q - 2) ** 2) - Fraction(4 * (params.q - 2), params.p - 2)


@settings(deadline=None)
@given(hyperbolic_pairs(15))
def test_ball_ratios_above_and_converge(pq):
    params = validate_params(*pq)
    seq = asy.ball_ratio_sequence(params, 40)
    assert all(asy.exceeds_cheeger(params, r) for r in seq)
    ie = asy.cheeger_constant(params)
    assert abs(float(seq[-1]) - ie) / ie <= 1e-6


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(GRID), st.integers(0, 5000))
def test_minimal_ratio_above_cheeger(pq, extra):
    params = validate_params(*pq)
    N = params.p + extra
    r = Fraction(minimal_perimeter_closed_form(params, N), N)
    assert asy.exceeds_cheeger(params, r)
    assert asy.minimal_shape_ratio_sequence(params, [N]) == [r]


def test_ratio_seven_three():
    assert asy.ball_ratio_sequence(validate_params(7, 3), 1)[1] == Fraction(3, 5)


@given(hyperbolic_pairs(12))
def test_series_equals_matrix_recursion(pq):
    params = validate_params(*pq)
    f = asy.growth_function(params)
    assert asy.series_coefficients(f, 60) == asy.matrix_coefficients(params, 60)
    assert f.same_as(asy.growth_matrix_form(params))


@given(hyperbolic_pairs(12))
def test_euler_characteristic(pq):
    params = validate_params(*pq)
    p, q = pq
    assert asy.euler_characteristic(params) == Fraction(2 * q + 2 * p - p * q, 2 * p)


def test_euler_examples():
    assert asy.euler_characteristic(validate_params(7, 3)) == Fraction(-1, 14)
    assert asy.euler_characteristic(validate_params(3, 7)) == Fraction(-1, 6)


def test_layer_sizes_are_series_for_p_at_least_4():
    for pq in [(7, 3), (4, 5), (5, 4), (8, 3)]:
        params = validate_params(*pq)
        lc = layer_counts(params, 10)
        assert asy.count_sequence(params, 10) == [lc.layer_size(n) for n in range(11)]


def test_closed_form_counts(grid_params):
    seq = asy.count_sequence(grid_params, 30)
    lo = 1 if grid_params.p == 3 else 0
    for n in range(lo, 31):
        assert math.isclose(asy.animal_count_closed_form(grid_params, n), seq[n], rel_tol=1e-9)
    if grid_params.p > 3:
        assert seq[0] == grid_params.p


def test_spot_values():
    assert asy.count_sequence(validate_params(4, 5), 1)[1] == 20
    assert asy.count_sequence(validate_params(3, 7), 3)[1:] == [15, 36, 90]
    assert asy.series_coefficients(asy.growth_function(validate_params(3, 7)), 2) == [15, 33, 87]


@given(hyperbolic_pairs(25))
def test_spectrum(pq):
    sp = asy.spectral(validate_params(*pq))
    assert sp.det == 1
    assert sp.lambda_plus > 1 > sp.lambda_minus > 0
    assert math.isclose(sp.lambda_plus * sp.lambda_minus, 1, rel_tol=1e-12)
    assert math.isclose(sp.lambda_plus + sp.lambda_minus, sp.trace, rel_tol=1e-12)


def test_layer_bound_sequence():
    # above 1 and shrinking for q > 3; for q = 3 the value is below 1
    for pq in [(4, 5), (5, 4), (4, 6)]:
        seq = asy.layer_bound_sequence(validate_params(*pq), 30)
        assert all(x > 1 for x in seq) and all(a >= b for a, b in zip(seq, seq[1:]))
    assert all(x < 1 for x in asy.layer_bound_sequence(validate_params(7, 3), 30))


def test_counts_csv():
    rows = asy.counts_rows(validate_params(7, 3), 2)
    text = asy.rows_to_csv(rows)
    assert text.splitlines()[0].startswith("n,I,E,L,B,boundary")
    assert [r["boundary"] for r in rows] == [7, 21, 56]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(GRID), st.integers(0, 5), st.floats(0, 1, exclude_max=True))
def test_minimal_ratio_between_enclosing_balls(pq, n, frac):
    # for |B_n| < N < |B_{n+1}| the ratio sits above the next ball's ratio and
    # below the larger end value of (|dB_n| + 2 + c x) / (|B_n| + x)
    params = validate_params(*pq)
    lc = layer_counts(params, n + 2)
    lo_size, hi_size = lc.ball_size(n), lc.ball_size(n + 1)
    N = max(lo_size + 1 + int(frac * (hi_size - lo_size - 1)), params.p)
    if N >= hi_size:
        return
    r = Fraction(minimal_perimeter_closed_form(params, N), N)
    upper = max(Fraction(lc.ball_perimeter(n) + 2, lo_size), Fraction(lc.ball_perimeter(n + 1) + 2, hi_size))
    assert Fraction(lc.ball_perimeter(n + 1), hi_size) < r <= upper


def test_single_endpoint_upper_bound_fails():
    # (|dB_{n+1}| + 2) / |B_{n+1}| alone is not an upper bound: just past B_1
    # in (4,5) the ratio is still near |dB_1| / |B_1|
    params = validate_params(4, 5)
    lc = layer_counts(params, 3)
    N = lc.ball_size(1) + 1
    assert Fraction(minimal_perimeter_closed_form(params, N), N) > Fraction(lc.ball_perimeter(2) + 2, lc.ball_size(2))
