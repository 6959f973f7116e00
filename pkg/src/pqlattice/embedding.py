"""Poincare-disc realisation of {p,q} lattices.

The tiling is the orbit of the fundamental face under the group generated
by ``rho(a)`` (rotation by beta = 2 pi / p about the face centre 0) and
``rho(b)`` (rotation by alpha = 2 pi / q about the vertex z = r).  Points are
compared on the hyperboloid, where distinct lattice points stay well
separated even close to the ideal boundary.

:class:`DiscLattice` is a lazily grown lattice on that orbit; it serves the
same neighbour/face queries as :class:`~pqlattice.lattice.LatticeBall` but
has no rim, which the animal enumeration needs for large sizes.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

from .lattice import ConstructionError, LatticeBall, LatticeParams, ResourceLimit

DEFAULT_DISC_VERTICES = 2_000_000


class DedupAmbiguity(ConstructionError):
    """Two lattice points are closer than the lattice allows."""


@dataclass(frozen=True)
class Mobius:
    """Matrix [[a, b], [c, d]] acting by z -> (a z + b) / (c z + d).

    Elements of SU(1,1) have c = conj(b), d = conj(a) and determinant 1.
    """

    a: complex
    b: complex
    c: complex
    d: complex

    @classmethod
    def identity(cls) -> "Mobius":
        return cls(1, 0, 0, 1)

    @classmethod
    def rotation(cls, angle: float) -> "Mobius":
        """Rotation about 0 by ``angle`` (counter-clockwise)."""
        return cls(cmath.exp(0.5j * angle), 0, 0, cmath.exp(-0.5j * angle))

    @classmethod
    def translation(cls, w: complex) -> "Mobius":
        """The disc automorphism z -> (z + w) / (1 + conj(w) z), mapping 0 to w."""
        s = 1 / math.sqrt(1 - abs(w) ** 2)
        return cls(s, s * w, s * w.conjugate(), s)

    def __matmul__(self, other: "Mobius") -> "Mobius":
        return Mobius(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __call__(self, z: complex) -> complex:
        return (self.a * z + self.b) / (self.c * z + self.d)

    def inverse(self) -> "Mobius":
        det = self.det()
        return Mobius(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def power(self, k: int) -> "Mobius":
        base = self if k >= 0 else self.inverse()
        out = Mobius.identity()
        for _ in range(abs(k)):
            out = out @ base
        return out

    def origin_image(self) -> complex:
        return self.b / self.d

    def hyperboloid(self) -> tuple[float, float, float]:
        """Hyperboloid coordinates (x0, x1, x2) of the image of 0.

        Read off the matrix entries directly, so no cancellation happens
        when the image is close to the unit circle.
        """
        w = 2 * self.a * self.b
        return (abs(self.a) ** 2 + abs(self.b) ** 2, w.real, w.imag)

    def is_close(self, other: "Mobius", tol: float = 1e-9) -> bool:
        """Equality in PSU(1,1), i.e. up to an overall sign."""
        mine = (self.a, self.b, self.c, self.d)
        theirs = (other.a, other.b, other.c, other.d)
        scale = max(1.0, max(abs(x) for x in mine))
        return any(
            all(abs(x - sign * y) <= tol * scale for x, y in zip(mine, theirs)) for sign in (1, -1)
        )


def hyperbolic_distance(z1: complex, z2: complex) -> float:
    """Distance for ds^2 = 4 |dz|^2 / (1 - |z|^2)^2."""
    num = abs(z1 - z2)
    den = abs(1 - z1.conjugate() * z2)
    return 2 * math.atanh(min(num / den, 1.0))


@dataclass(frozen=True)
class EmbeddingConfig:
    alpha: float
    beta: float
    r: float
    dedup_tolerance: float = 1e-9
    size: int = 800
    edge_width: float = 0.8
    vertex_radius: float = 2.5
    cull_radius: float = 0.9995
    palette: tuple[str, ...] = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2")

    @classmethod
    def for_params(cls, params: LatticeParams, **kwargs) -> "EmbeddingConfig":
        alpha = 2 * math.pi / params.q
        beta = 2 * math.pi / params.p
        r2 = math.cos((alpha + beta) / 2) / math.cos((alpha - beta) / 2)
        if not 0 < r2 < 1:
            raise ValueError(f"no disc embedding for {params}: r^2 = {r2}")
        return cls(alpha=alpha, beta=beta, r=math.sqrt(r2), **kwargs)


def generators(cfg: EmbeddingConfig) -> tuple[Mobius, Mobius]:
    """rho(a): rotation by beta about 0; rho(b): rotation by alpha about r."""
    rho_a = Mobius.rotation(cfg.beta)
    ea, eb = cmath.exp(0.5j * cfg.alpha), cmath.exp(-0.5j * cfg.alpha)
    r, s = cfg.r, 1 - cfg.r**2
    rho_b = Mobius((ea - r * r * eb) / s, -r * (ea - eb) / s, r * (ea - eb) / s, (eb - r * r * ea) / s)
    return rho_a, rho_b


class _PointIndex:
    """Spatial hash on hyperboloid coordinates (x1, x2)."""

    def __init__(self, separation: float):
        self.sep = separation
        self.cell = separation / 2
        self.grid: dict[tuple[int, int], list[int]] = {}
        self.coords: list[tuple[float, float]] = []

    def find(self, x1: float, x2: float) -> int | None:
        ci, cj = round(x1 / self.cell), round(x2 / self.cell)
        hit = None
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                for k in self.grid.get((ci + di, cj + dj), ()):
                    y1, y2 = self.coords[k]
                    d = math.hypot(x1 - y1, x2 - y2)
                    if d < self.sep / 4:
                        if hit is not None:
                            raise DedupAmbiguity("two stored points match one query")
                        hit = k
                    elif d < 0.9 * self.sep:
                        raise DedupAmbiguity(f"points {d:.3g} apart, lattice spacing {self.sep:.3g}")
        return hit

    def add(self, x1: float, x2: float) -> int:
        k = len(self.coords)
        self.coords.append((x1, x2))
        self.grid.setdefault((round(x1 / self.cell), round(x2 / self.cell)), []).append(k)
        return k


class DiscLattice:
    """Lazily generated {p,q} lattice in the Poincare disc.

    Vertex ids are handed out in discovery order; the fundamental face is
    face 0 with vertices 0..p-1 (counter-clockwise, vertex 0 at z = r).
    Neighbours and incident faces of a vertex are listed counter-clockwise.
    """

    def __init__(self, params: LatticeParams, max_vertices: int = DEFAULT_DISC_VERTICES):
        self.params = params
        self.cfg = EmbeddingConfig.for_params(params)
        self.max_vertices = max_vertices
        p, q, r = params.p, params.q, self.cfg.r
        rho_a, rho_b = generators(self.cfg)
        self.rho_a, self.rho_b = rho_a, rho_b
        t_r = Mobius.translation(complex(r))
        t_inv = t_r.inverse()
        b_pow = [rho_b.power(k) for k in range(q)]
        # vertex frames are stored as g @ t_r where g(r) is the vertex
        self._to_face = [t_inv @ bk for bk in b_pow]
        self._face_vertex = [rho_a.power(j) @ t_r for j in range(p)]
        self._to_neighbor = [t_inv @ bk @ rho_a @ t_r for bk in b_pow]

        edge = hyperbolic_distance(complex(r), rho_a(complex(r)))
        centre_gap = hyperbolic_distance(0j, rho_b(0j))
        self.edge_length = edge
        self._vindex = _PointIndex(2 * math.sinh(edge / 2))
        self._findex = _PointIndex(2 * math.sinh(centre_gap / 2))

        self._frame: list[Mobius] = []
        self._nbrs: list[tuple[int, ...] | None] = []
        self._vfaces: list[tuple[int, ...] | None] = []
        self._faces: list[tuple[int, ...]] = []
        self._face_frame: list[Mobius] = []
        self._add_face(Mobius.identity())

    # -- growth -----------------------------------------------------------

    def _vertex(self, frame: Mobius) -> int:
        _, x1, x2 = frame.hyperboloid()
        hit = self._vindex.find(x1, x2)
        if hit is not None:
            return hit
        if len(self._frame) >= self.max_vertices:
            raise ResourceLimit(f"disc lattice exceeded {self.max_vertices} vertices")
        v = self._vindex.add(x1, x2)
        self._frame.append(frame)
        self._nbrs.append(None)
        self._vfaces.append(None)
        return v

    def _add_face(self, frame: Mobius) -> int:
        _, x1, x2 = frame.hyperboloid()
        hit = self._findex.find(x1, x2)
        if hit is not None:
            return hit
        f = self._findex.add(x1, x2)
        self._face_frame.append(frame)
        self._faces.append(tuple(self._vertex(frame @ m) for m in self._face_vertex))
        return f

    def _saturate(self, v: int) -> None:
        if self._nbrs[v] is not None:
            return
        g = self._frame[v]
        faces = tuple(self._add_face(g @ m) for m in self._to_face)
        nbrs = tuple(self._vertex(g @ m) for m in self._to_neighbor)
        if len(set(nbrs)) != self.params.q or len(set(faces)) != self.params.q:
            raise DedupAmbiguity(f"vertex {v} has coinciding neighbours or faces")
        self._vfaces[v] = faces
        self._nbrs[v] = nbrs

    # -- lattice view -----------------------------------------------------

    @property
    def num_vertices(self) -> int:
        return len(self._frame)

    @property
    def num_faces(self) -> int:
        return len(self._faces)

    def neighbors(self, v: int) -> tuple[int, ...]:
        self._saturate(v)
        return self._nbrs[v]  # type: ignore[return-value]

    def faces_at(self, v: int) -> tuple[int, ...]:
        self._saturate(v)
        return self._vfaces[v]  # type: ignore[return-value]

    def face(self, f: int) -> tuple[int, ...]:
        return self._faces[f]

    adjacent = neighbors
    known_faces = faces_at

    def is_saturated(self, v: int) -> bool:
        return True

    def point(self, v: int) -> complex:
        return self._frame[v].origin_image()

    def face_transform(self, f: int) -> Mobius:
        """Isometry taking the fundamental face onto face ``f`` (vertex 0 to its first vertex)."""
        return self._face_frame[f]

    def vertex_transform(self, v: int) -> Mobius:
        """An isometry taking z = r to vertex ``v``."""
        return self._frame[v] @ Mobius.translation(complex(self.cfg.r)).inverse()

    def check_vertices(self, vertices) -> None:
        from .lattice import UnknownVertex

        n = self.num_vertices
        for v in vertices:
            if not (isinstance(v, int) and 0 <= v < n):
                raise UnknownVertex(v)

    def induced_edge_count(self, vertices) -> int:
        s = vertices if isinstance(vertices, (set, frozenset)) else set(vertices)
        return sum(1 for u in s for w in self.neighbors(u) if w in s) // 2


# ---------------------------------------------------------------------------
# embedding of an explicit ball


@dataclass
class Embedding:
    params: LatticeParams
    cfg: EmbeddingConfig
    coords: list[complex]
    face_transforms: list[Mobius]
    disc_ids: list[int]


def embed_ball(ball: LatticeBall, cfg: EmbeddingConfig | None = None, disc: DiscLattice | None = None) -> Embedding:
    """Coordinates for every vertex of ``ball``.

    Faces are matched one by one against the disc lattice: a face with a
    placed counter-clockwise edge (v, w) is the unique disc face in which w
    follows v.  Any disagreement between the combinatorial and geometric
    identity of a vertex raises :class:`DedupAmbiguity`.
    """
    params = ball.params
    cfg = cfg or EmbeddingConfig.for_params(params)
    disc = disc or DiscLattice(params, max_vertices=max(DEFAULT_DISC_VERTICES, 4 * ball.num_vertices))
    p = params.p
    image = [-1] * ball.num_vertices
    preimage: dict[int, int] = {}
    face_image = [-1] * len(ball.faces)

    def place(v: int, dv: int) -> None:
        if image[v] == -1:
            if dv in preimage:
                raise DedupAmbiguity(f"vertices {preimage[dv]} and {v} land on the same point")
            image[v] = dv
            preimage[dv] = v
        elif image[v] != dv:
            raise DedupAmbiguity(f"vertex {v} placed at two different points")

    for j, v in enumerate(ball.faces[0]):
        place(v, disc.face(0)[j])
    face_image[0] = 0

    pending = list(range(1, len(ball.faces)))
    while pending:
        stalled = []
        for fi in pending:
            cyc = ball.faces[fi]
            anchor = next((j for j in range(p) if image[cyc[j]] >= 0 and image[cyc[(j + 1) % p]] >= 0), None)
            if anchor is None:
                stalled.append(fi)
                continue
            dv, dw = image[cyc[anchor]], image[cyc[(anchor + 1) % p]]
            match = None
            for df in disc.faces_at(dv):
                dcyc = disc.face(df)
                k = dcyc.index(dv)
                if dcyc[(k + 1) % p] == dw:
                    match = (df, k)
                    break
            if match is None:
                raise DedupAmbiguity(f"face {fi}: edge ({cyc[anchor]}, {cyc[(anchor + 1) % p]}) has no disc face")
            df, k = match
            dcyc = disc.face(df)
            for j in range(p):
                place(cyc[(anchor + j) % p], dcyc[(k + j) % p])
            face_image[fi] = df
        if len(stalled) == len(pending):
            raise ConstructionError("faces not reachable from the fundamental face")
        pending = stalled

    coords = [disc.point(dv) for dv in image]
    transforms = [disc.face_transform(df) for df in face_image]
    return Embedding(params, cfg, coords, transforms, image)


def edge_lengths(ball: LatticeBall, coords: Sequence[complex]) -> list[float]:
    return [hyperbolic_distance(coords[u], coords[w]) for u, w in ball.edges()]
