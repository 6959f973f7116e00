import pytest
from hypothesis import given, settings

from conftest import hyperbolic_pairs
from pqlattice.lattice import (
    HyperbolicityViolation,
    NonsenseParams,
    ResourceLimit,
    VertexClass,
    build_ball,
    layer_counts,
    perimeter,
    transfer_matrix,
    validate_params,
)


@pytest.mark.parametrize("p,q", [(4, 4), (3, 6), (6, 3), (3, 3), (5, 3), (3, 5)])
def test_non_hyperbolic_rejected(p, q):
    with pytest.raises(HyperbolicityViolation):
        validate_params(p, q)


@pytest.mark.parametrize("p,q", [(2, 9), (9, 2), (0, 0), (7.0, 3), (True, 7)])
def test_nonsense_rejected(p, q):
    with pytest.raises(NonsenseParams):
        validate_params(p, q)


@given(hyperbolic_pairs(40))
def test_transfer_matrix_unimodular(pq):
    (a, b), (c, d) = transfer_matrix(validate_params(*pq))
    assert a * d - b * c == 1


@given(hyperbolic_pairs(30))
def test_layers_grow_and_ball_sizes_add_up(pq):
    lc = layer_counts(validate_params(*pq), 12)
    sizes = [lc.layer_size(n) for n in range(13)]
    assert all(b > a for a, b in zip(sizes[1:], sizes[2:]))
    assert lc.ball_sizes() == [sum(sizes[: n + 1]) for n in range(13)]


def test_known_counts():
    lc = layer_counts(validate_params(7, 3), 3)
    assert [lc.layer_size(n) for n in range(4)] == [7, 28, 77, 203]
    assert lc.ball_perimeter(1) == 21 and lc.ball_size(1) == 35
    assert layer_counts(validate_params(4, 5), 2).internal(2) == 48
    lc = layer_counts(validate_params(3, 7), 2)
    assert lc.layer_size(1) == 12 and lc.ball_size(1) == 15 and lc.ball_perimeter(0) == 15


@settings(max_examples=25, deadline=None)
@given(hyperbolic_pairs(12))
def test_graph_matches_recursion(pq):
    params = validate_params(*pq)
    lc = layer_counts(params, 6)
    depth = max(d for d in range(1, 7) if lc.ball_size(d) <= 6000)
    ball = build_ball(params, depth)
    assert [ball.count_pair(n) for n in range(depth + 1)] == list(lc.pairs[: depth + 1])
    for n in range(depth):
        assert perimeter(ball, ball.ball_vertices(n)) == lc.ball_perimeter(n)


def test_ball_structure(grid_params):
    ball = build_ball(grid_params, 3)
    p, q = grid_params.p, grid_params.q
    assert all(len(f) == p for f in ball.faces)
    inner = ball.ball_vertices(2)
    assert all(len(ball.neighbors(v)) == q for v in inner)
    assert all(len(ball.faces_at(v)) == q for v in inner)
    # every edge lies on exactly two faces once both ends are interior
    for u in ball.ball_vertices(1):
        for w in ball.neighbors(u):
            shared = set(ball.faces_at(u)) & set(ball.faces_at(w))
            assert len(shared) == 2
    # layers differ by at most one along an edge
    assert all(abs(ball.layer[u] - ball.layer[w]) <= 1 for u, w in ball.edges())


def test_ids_stable_across_depths(grid_params):
    small, big = build_ball(grid_params, 2), build_ball(grid_params, 3)
    for v in small.ball_vertices(1):
        assert sorted(small.neighbors(v)) == sorted(big.neighbors(v))
    assert small.layer_ranges == big.layer_ranges[:3]


def test_triangulation_classes():
    ball = build_ball(validate_params(3, 7), 3)
    assert {VertexClass(c) for c in ball.vclass[:3]} == {VertexClass.L0}
    for n in (1, 2, 3):
        i1, i2 = ball.count_pair(n)
        assert i1 + i2 == len(ball.layer_vertices(n))


def test_resource_limit():
    with pytest.raises(ResourceLimit):
        build_ball(validate_params(7, 3), 10, max_vertices=1000)
