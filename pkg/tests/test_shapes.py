import pytest
from hypothesis import given, settings, strategies as st

from conftest import GRID
from pqlattice.lattice import build_ball, layer_counts, perimeter, validate_params
from pqlattice.shapes import (
    Membership,
    TooSmall,
    build_minimal_shape,
    classify,
    enclosing_ball_index,
    internal_flags,
    make_shape,
    minimal_perimeter_closed_form,
    o_max_in_layer,
    window_max,
)
from pqlattice.verify import strip_set


def brute_window(flags, length):
    n = len(flags)
    return max(sum(flags[(s + i) % n] for i in range(length)) for s in range(n))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(GRID), st.integers(1, 40), st.integers(1, 3))
def test_o_max_matches_window_scan(pq, length, layer):
    params = validate_params(*pq)
    flags = internal_flags(params, layer)
    if length > len(flags):
        return
    assert o_max_in_layer(params, length, layer) == brute_window(flags, length) == window_max(flags, length)[0]


def test_closed_form_at_ball_sizes(grid_params):
    lc = layer_counts(grid_params, 4)
    for n in range(4):
        assert minimal_perimeter_closed_form(grid_params, lc.ball_size(n)) == lc.ball_perimeter(n)


def test_strip_of_seven_perimeter():
    params = validate_params(4, 5)
    assert o_max_in_layer(params, 7, 2) == 5  # strip of 7 in the layer after B_1
    N = layer_counts(params, 1).ball_size(1) + 7
    assert minimal_perimeter_closed_form(params, N) == 61 == build_minimal_shape(params, N).perimeter


def test_closed_form_too_small():
    with pytest.raises(TooSmall):
        minimal_perimeter_closed_form(validate_params(7, 3), 6)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(GRID), st.integers(0, 400))
def test_canonical_shape_certified(pq, extra):
    params = validate_params(*pq)
    N = params.p + extra
    shape = build_minimal_shape(params, N)
    assert shape.N == N and shape.is_connected
    assert shape.perimeter == minimal_perimeter_closed_form(params, N)
    assert perimeter(shape.lattice, shape.members) == shape.perimeter
    assert classify(shape).in_m


@pytest.mark.parametrize("seed", [1, 2, "3:7"])
def test_variants_are_minimal(grid_params, seed):
    N = layer_counts(grid_params, 2).ball_size(1) + 5
    shape = build_minimal_shape(grid_params, N, variant_seed=seed)
    assert shape.perimeter == minimal_perimeter_closed_form(grid_params, N)
    assert classify(shape).in_m


def test_seventeen_vertex_configurations():
    params = validate_params(7, 3)
    a = build_minimal_shape(params, 17)
    b = build_minimal_shape(params, 17, variant_seed=1)
    assert a.perimeter == b.perimeter == 13
    assert a.certificate["t"] == 3
    assert b.certificate["s_e"] == 2 and b.certificate["t"] == 4


def test_long_strip_rejected():
    # B_0 plus a 23-vertex strip in layer 1: five internal vertices, o_max is 6
    params = validate_params(7, 3)
    ball = build_ball(params, 2)
    layer = list(ball.layer_vertices(1))
    flags = [ball.vclass[v] == params.internal_class for v in layer]
    start = next(s for s in range(len(layer)) if sum(flags[(s + i) % len(layer)] for i in range(23)) == 5)
    shape = strip_set(params, 0, list(range(start, start + 23)), ball)
    verdict = classify(shape)
    assert shape.perimeter > minimal_perimeter_closed_form(params, 30)
    assert verdict.status is Membership.NOT_IN_M and verdict.o_max == 6


def test_disconnected_classified():
    ball = build_ball(validate_params(7, 3), 2)
    shape = make_shape(ball, [0, *ball.layer_vertices(2)[:7]], require_connected=False)
    assert classify(shape).status is Membership.NOT_CONNECTED


def test_enclosing_index():
    params = validate_params(4, 5)
    sizes = layer_counts(params, 4).ball_sizes()
    for n in range(4):
        assert enclosing_ball_index(params, sizes[n]) == n
        assert enclosing_ball_index(params, sizes[n + 1] - 1) == n


def test_json_roundtrip():
    shape = build_minimal_shape(validate_params(4, 5), 30)
    d = shape.to_json_dict()
    assert d["N"] == 30 and len(d["members"]) == 30 and d["perimeter"] == shape.perimeter
