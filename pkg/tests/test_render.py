import math
import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, strategies as st

from pqlattice.embedding import EmbeddingConfig
from pqlattice.lattice import build_ball, validate_params
from pqlattice.render import IoFailure, geodesic_path, layer_highlights, render_svg
from pqlattice.shapes import build_minimal_shape

SVG = "{http://www.w3.org/2000/svg}"


def test_segment_through_origin():
    assert "A" not in geodesic_path(0.5 + 0j, -0.3 + 0j, 100, 100)
    assert "A" not in geodesic_path(0j, 0.2 + 0.2j, 100, 100)


@given(st.floats(0.05, 0.9), st.floats(0, 6.2), st.floats(0.05, 0.9), st.floats(0.1, 3.0))
def test_arc_circle_is_orthogonal(r1, t1, r2, dt):
    z1 = r1 * complex(math.cos(t1), math.sin(t1))
    z2 = r2 * complex(math.cos(t1 + dt), math.sin(t1 + dt))
    scale = 1e4
    d = geodesic_path(z1, z2, scale, 0.0)
    if "A" not in d:
        return
    radius = float(d.split("A")[1].split(",")[0]) / scale
    # the circle through z1 and z2 with this radius whose centre c satisfies
    # |c|^2 = 1 + R^2 (orthogonal to the unit circle) must exist
    mid, half = (z1 + z2) / 2, abs(z2 - z1) / 2
    h = math.sqrt(max(radius**2 - half**2, 0.0))
    n = 1j * (z2 - z1) / abs(z2 - z1)
    err = min(abs(abs(mid + s * h * n) ** 2 - 1 - radius**2) for s in (1, -1))
    assert err <= 1e-3 * (1 + radius**2)


def test_plain_render(tmp_path):
    ball = build_ball(validate_params(7, 3), 2)
    out = tmp_path / "plain.svg"
    doc = render_svg(ball, path=out)
    assert out.read_text() == doc
    root = ET.fromstring(doc)
    paths = root.findall(f".//{SVG}path")
    assert len(paths) == ball.num_edges


def test_highlights_render():
    params = validate_params(7, 3)
    shape = build_minimal_shape(params, 17)
    ball = shape.lattice
    cfg = EmbeddingConfig.for_params(params)
    doc = render_svg(ball, highlights=layer_highlights(ball, cfg) + [(shape.members, "#ff0000")])
    assert doc.count('fill="#ff0000"') == 17


def test_bad_highlight_vertex():
    ball = build_ball(validate_params(4, 5), 1)
    with pytest.raises(Exception):
        render_svg(ball, highlights=[([10**6], "red")])


def test_unwritable_path(tmp_path):
    ball = build_ball(validate_params(4, 5), 1)
    with pytest.raises(IoFailure):
        render_svg(ball, path=tmp_path / "missing" / "x.svg")
