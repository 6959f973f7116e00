import pytest
from fractions import Fraction
from hypothesis import given, settings, strategies as st

from conftest import GRID
from pqlattice.embedding import DiscLattice
from pqlattice.enumeration import (
    EnumerationTask,
    VisitCapExceeded,
    bounded_min_perimeter,
    brute_force_min_perimeter,
    disconnected_minimum,
    enumerate_animals,
    finite_cheeger,
    naive_animals,
    oracle,
)
from pqlattice.lattice import build_ball, perimeter, validate_params
from pqlattice.shapes import connected

# exhaustive minima, each also equal to the closed form for N >= p
KNOWN = {
    (7, 3): [(7, 7, 3), (8, 8, 24), (9, 9, 135)],
    (4, 5): [(4, 12, 5), (5, 15, 75), (6, 16, 15)],
    (5, 4): [(5, 10, 4), (6, 12, 48), (7, 14, 420)],
    (3, 7): [(3, 15, 7), (4, 18, 14), (5, 21, 35)],
    (3, 8): [(3, 18, 8), (4, 22, 16)],
}


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(GRID), st.integers(1, 4))
def test_enumerator_matches_set_growth(pq, n):
    lat = DiscLattice(validate_params(*pq))
    fast = [frozenset(s.members) for s in enumerate_animals(EnumerationTask(lat, 0, n))]
    assert len(fast) == len(set(fast))
    assert set(fast) == naive_animals(lat, 0, n)


def test_small_animal_counts(grid_params):
    lat = DiscLattice(grid_params)
    assert len(list(enumerate_animals(EnumerationTask(lat, 0, 1)))) == 1
    assert len(list(enumerate_animals(EnumerationTask(lat, 0, 2)))) == grid_params.q


def test_animals_are_connected_and_perimeters_right():
    params = validate_params(4, 5)
    lat = DiscLattice(params)
    ball = build_ball(params, 6)
    for shape in enumerate_animals(EnumerationTask(lat, 0, 5)):
        assert 0 in shape.members and connected(lat, shape.members)
        assert shape.perimeter == params.q * 5 - 2 * lat.induced_edge_count(shape.members)
    # the same count on the explicit ball, rooted in the fundamental face
    a = sum(1 for _ in enumerate_animals(EnumerationTask(lat, 0, 4)))
    b = sum(1 for _ in enumerate_animals(EnumerationTask(ball, 0, 4)))
    assert a == b
    assert perimeter(ball, range(4)) == 12


@pytest.mark.parametrize("pq,rows", sorted(KNOWN.items()), ids=str)
def test_known_minima(pq, rows):
    params = validate_params(*pq)
    for N, best, count in rows:
        res = oracle(params, N)
        assert (res.min_perimeter, res.minimizer_count) == (best, count)
        assert res.match and res.consistent


def test_connected_minima_below_p():
    res = [oracle(validate_params(7, 3), N).min_perimeter for N in range(1, 8)]
    assert res == [3, 4, 5, 6, 7, 8, 7]


def test_parallel_equals_serial():
    params = validate_params(5, 4)
    a = oracle(params, 7, threads=1)
    b = oracle(params, 7, threads=2)
    assert a.minimizers == b.minimizers
    assert (a.min_perimeter, a.animals_visited, a.inm_count) == (b.min_perimeter, b.animals_visited, b.inm_count)


def test_centre_tie_break_irrelevant():
    params = validate_params(4, 5)
    a, b = oracle(params, 6, centers="first"), oracle(params, 6, centers="any")
    assert a.consistent and b.consistent and a.minimizers == b.minimizers


def test_bare_class_count_over_accepts():
    # counting every internal-class annulus vertex lets a non-minimal set in
    res = oracle(validate_params(3, 7), 5, supported=False)
    assert not res.all_InM_minimal
    assert oracle(validate_params(3, 7), 5).consistent


def test_visit_cap():
    with pytest.raises(VisitCapExceeded):
        oracle(validate_params(4, 5), 6, cap=100)


def test_perimeter_cap_keeps_minimum():
    params = validate_params(7, 3)
    lat = DiscLattice(params)
    full = brute_force_min_perimeter(EnumerationTask(lat, 0, 9))
    capped = brute_force_min_perimeter(EnumerationTask(lat, 0, 9, perimeter_cap=full.min_perimeter))
    assert capped.minimizers == full.minimizers
    assert capped.animals_visited < full.animals_visited


@pytest.mark.parametrize("pq,N", [((7, 3), 9), ((4, 5), 6), ((3, 7), 5), ((5, 4), 7)])
def test_compiled_search_agrees(pq, N):
    params = validate_params(*pq)
    ref = oracle(params, N)
    lat = DiscLattice(params)
    got = bounded_min_perimeter(lat, 0, N, ref.min_perimeter, keep=10**4)
    assert (got.best, got.count) == (ref.min_perimeter, ref.minimizer_count)
    assert set(got.minimizers) == set(ref.minimizers)
    assert bounded_min_perimeter(lat, 0, N, ref.min_perimeter - 1).best is None


def test_finite_cheeger():
    p73, p45 = validate_params(7, 3), validate_params(4, 5)
    assert finite_cheeger(DiscLattice(p73), 7) == (Fraction(1), Fraction(1, 3))
    assert finite_cheeger(DiscLattice(p45), 4) == (Fraction(3), Fraction(3, 5))
    assert finite_cheeger(DiscLattice(p45), 1) == (Fraction(5), Fraction(1))


def test_disconnected_minimum():
    mins = {1: 3, 2: 4, 3: 5, 4: 6}
    # splits 1+3 and 2+2 both give 8, above the connected 6
    assert disconnected_minimum(mins, 4) == 8
    assert disconnected_minimum(mins, 2) == 6
