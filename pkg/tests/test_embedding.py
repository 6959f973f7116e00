import cmath
import math

import pytest
from hypothesis import given, settings, strategies as st

from conftest import GRID
from pqlattice.embedding import (
    DiscLattice,
    EmbeddingConfig,
    Mobius,
    edge_lengths,
    embed_ball,
    generators,
    hyperbolic_distance,
)
from pqlattice.lattice import build_ball, validate_params
from pqlattice.verify import embedding_suite

disc_points = st.builds(
    lambda r, t: r * cmath.exp(1j * t), st.floats(0, 0.95), st.floats(0, 2 * math.pi)
)


def test_radius_four_five():
    cfg = EmbeddingConfig.for_params(validate_params(4, 5))
    assert math.isclose(cfg.r, math.sqrt(math.cos(9 * math.pi / 20) / math.cos(math.pi / 20)))
    assert abs(cfg.r - 0.39797) < 1e-5
    emb = embed_ball(build_ball(validate_params(4, 5), 1), cfg)
    assert all(math.isclose(abs(z), cfg.r, rel_tol=1e-12) for z in emb.coords[:4])


def test_identity_and_determinant():
    cfg = EmbeddingConfig.for_params(validate_params(7, 3))
    z = complex(cfg.r)
    assert Mobius.identity()(z) == z
    for g in generators(cfg):
        assert abs(abs(g.det()) - 1) <= 1e-12


@settings(deadline=None)
@given(disc_points, disc_points, disc_points)
def test_translations_are_isometries(w, z1, z2):
    t = Mobius.translation(w)
    assert abs(abs(t.det()) - 1) <= 1e-9
    assert math.isclose(hyperbolic_distance(t(z1), t(z2)), hyperbolic_distance(z1, z2), rel_tol=1e-7, abs_tol=1e-9)


@given(disc_points, disc_points, disc_points)
def test_composition_associative(a, b, c):
    A, B, C = (Mobius.translation(x) for x in (a, b, c))
    assert ((A @ B) @ C).is_close(A @ (B @ C), tol=1e-9)


def test_relations():
    for pq in GRID:
        params = validate_params(*pq)
        rho_a, rho_b = generators(EmbeddingConfig.for_params(params))
        ident = Mobius.identity()
        assert rho_a.power(params.p).is_close(ident)
        assert rho_b.power(params.q).is_close(ident)
        assert (rho_a @ rho_b).power(2).is_close(ident)


@pytest.mark.parametrize("pq", [(7, 3), (4, 5)])
def test_embedding_properties(pq):
    [check] = embedding_suite(validate_params(*pq), depth=2)
    assert check.passed, check.detail


def test_embedding_depth_three():
    ball = build_ball(validate_params(7, 3), 3)
    emb = embed_ball(ball)
    assert max(abs(z) for z in emb.coords) < 1
    lengths = edge_lengths(ball, emb.coords)
    assert max(lengths) - min(lengths) <= 1e-9


def test_disc_lattice_is_regular():
    lat = DiscLattice(validate_params(5, 4))
    for v in range(40):
        nb = lat.neighbors(v)
        assert len(set(nb)) == 4
        assert all(v in lat.neighbors(w) for w in nb)
        for f in lat.faces_at(v):
            assert len(lat.face(f)) == 5 and v in lat.face(f)
