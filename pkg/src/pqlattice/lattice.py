"""Layer-by-layer construction of {p,q} hyperbolic lattices.

The ball ``B_n`` around the fundamental face is grown by coronas: every
vertex on the current boundary is saturated to ``q`` incident faces, and the
vertices created in that pass form the next layer.  Everything here is
integer combinatorics; the embedding lives in :mod:`pqlattice.embedding`.
"""

from __future__ import annotations

import enum
import functools
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

DEFAULT_MAX_VERTICES = 10**7


class LatticeError(Exception):
    """Base class for lattice construction errors."""


class NonsenseParams(LatticeError, ValueError):
    pass


class HyperbolicityViolation(LatticeError, ValueError):
    pass


class ResourceLimit(LatticeError):
    pass


class UnknownVertex(LatticeError, KeyError):
    pass


class DepthInsufficient(LatticeError):
    """A query needs faces or neighbours beyond the rim of the ball."""


class ConstructionError(LatticeError, RuntimeError):
    """The corona walk met a configuration a hyperbolic tiling cannot have."""


class VertexClass(enum.IntEnum):
    E = 0  # no neighbour in the previous layer (also layer 0 when p >= 4)
    I = 1  # at least one neighbour in the previous layer (p >= 4)
    I1 = 2  # exactly one neighbour in the previous layer (p == 3), I'
    I2 = 3  # exactly two neighbours in the previous layer (p == 3), I''
    L0 = 4  # root triangle (p == 3)


@dataclass(frozen=True)
class LatticeParams:
    p: int
    q: int

    @property
    def is_triangulation(self) -> bool:
        return self.p == 3

    @property
    def internal_class(self) -> VertexClass:
        """Class whose members count towards o_max."""
        return VertexClass.I2 if self.p == 3 else VertexClass.I

    def __str__(self) -> str:
        return f"{{{self.p},{self.q}}}"


def validate_params(p: int, q: int) -> LatticeParams:
    if isinstance(p, bool) or isinstance(q, bool) or not isinstance(p, int) or not isinstance(q, int):
        raise NonsenseParams(f"p and q must be integers, got {p!r}, {q!r}")
    if p < 3 or q < 3:
        raise NonsenseParams(f"need p >= 3 and q >= 3, got p={p}, q={q}")
    # 1/p + 1/q < 1/2  <=>  2(p + q) < pq
    if 2 * (p + q) >= p * q:
        kind = "Euclidean" if 2 * (p + q) == p * q else "spherical"
        raise HyperbolicityViolation(f"{{{p},{q}}} is {kind}: 1/p + 1/q >= 1/2")
    return LatticeParams(p, q)


# ---------------------------------------------------------------------------
# exact layer counts


def transfer_matrix(params: LatticeParams) -> tuple[tuple[int, int], tuple[int, int]]:
    """T1 for p >= 4, T2 for p == 3 (integer entries)."""
    p, q = params.p, params.q
    if p == 3:
        return ((1, 1), (q - 6, q - 5))
    return ((q - 3, q - 2), (8 - 3 * p - 3 * q + p * q, 5 - 2 * p - 3 * q + p * q))


def initial_vector(params: LatticeParams) -> tuple[int, int]:
    """State of layer 0 (p >= 4) or of layer 1 (p == 3)."""
    if params.p == 3:
        return (3, 3 * (params.q - 4))
    return (0, params.p)


def mat_vec(m, v):
    return (m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1])


@dataclass(frozen=True)
class LayerCounts:
    """Exact per-layer class counts.

    ``pairs[n]`` is ``(|I_n|, |E_n|)`` for p >= 4.  For p == 3 it is
    ``(|I''_n|, |I'_n|)`` -- the state vector T2 acts on, double-down
    vertices first -- and ``pairs[0] == (0, 0)`` stands for the three root
    vertices, which belong to neither class.
    """

    params: LatticeParams
    pairs: tuple[tuple[int, int], ...]

    @property
    def n_max(self) -> int:
        return len(self.pairs) - 1

    def layer_size(self, n: int) -> int:
        if self.params.p == 3 and n == 0:
            return 3
        a, b = self.pairs[n]
        return a + b

    def ball_size(self, n: int) -> int:
        return sum(self.layer_size(k) for k in range(n + 1))

    def ball_sizes(self) -> list[int]:
        out, total = [], 0
        for k in range(len(self.pairs)):
            total += self.layer_size(k)
            out.append(total)
        return out

    def down_edges(self, n: int) -> int:
        """Edges between layer n-1 and layer n."""
        a, b = self.pairs[n]
        return 2 * a + b if self.params.p == 3 else a

    def ball_perimeter(self, n: int) -> int:
        """|boundary B_n|, which equals the down-edge count of layer n+1."""
        if n + 1 > self.n_max:
            raise IndexError(f"need counts up to layer {n + 1}, have {self.n_max}")
        return self.down_edges(n + 1)

    def internal(self, n: int) -> int:
        """|I_n| (p >= 4) or |I''_n| (p == 3)."""
        return self.pairs[n][0]


def layer_counts(params: LatticeParams, n_max: int) -> LayerCounts:
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    t = transfer_matrix(params)
    if params.p == 3:
        pairs = [(0, 0)]
        v = initial_vector(params)
        for _ in range(1, n_max + 1):
            pairs.append(v)
            v = mat_vec(t, v)
    else:
        pairs = []
        v = initial_vector(params)
        for _ in range(n_max + 1):
            pairs.append(v)
            v = mat_vec(t, v)
    return LayerCounts(params, tuple(pairs))


# ---------------------------------------------------------------------------
# corona


@dataclass(frozen=True)
class CoronaFace:
    """One face of a corona, described relative to the old boundary.

    ``path`` are boundary indices (in walk order), ``first`` and ``last`` the
    indices of the bounding spokes in the global spoke list and ``inner`` the
    number of new vertices strictly between the two spoke ends.
    """

    path: tuple[int, ...]
    first: int
    last: int
    inner: int
    merged: bool  # both spokes end at the same new vertex


def corona_faces(spokes_per_vertex: Sequence[int], p: int) -> tuple[list[int], list[CoronaFace]]:
    """Faces attached outside a boundary cycle.

    ``spokes_per_vertex[i]`` is the number of new outward edges at the i-th
    boundary vertex.  Returns the flat spoke list (owner index per spoke,
    starting at the first vertex that has spokes) and the faces between
    consecutive spokes.
    """
    m = len(spokes_per_vertex)
    start = next((i for i, e in enumerate(spokes_per_vertex) if e > 0), None)
    if start is None:
        raise ConstructionError("no boundary vertex has a free slot")
    spokes: list[int] = []
    for t in range(m):
        i = (start + t) % m
        if spokes_per_vertex[i] < 0:
            raise ConstructionError(f"boundary vertex {i} is over-saturated")
        spokes.extend([i] * spokes_per_vertex[i])
    k_total = len(spokes)
    faces = []
    for k in range(k_total):
        a, b = spokes[k], spokes[(k + 1) % k_total]
        if k + 1 < k_total and a == b:
            path: tuple[int, ...] = (a,)
        else:
            span = (b - a) % m
            if span == 0:
                raise ConstructionError("a single spoke would wrap the whole boundary")
            path = tuple((a + s) % m for s in range(span + 1))
        new = p - len(path)
        if new < 1:
            raise ConstructionError(f"face along a boundary path of {len(path)} vertices cannot close")
        faces.append(CoronaFace(path, k, (k + 1) % k_total, max(new - 2, 0), new == 1))
    return spokes, faces


def _spoke_ends(faces: list[CoronaFace], k_total: int) -> list[int]:
    """Union spokes whose ends coincide; returns a representative per spoke."""
    rep = list(range(k_total))

    def find(x):
        while rep[x] != x:
            rep[x] = rep[rep[x]]
            x = rep[x]
        return x

    for f in faces:
        if f.merged:
            ra, rb = find(f.first), find(f.last)
            if ra != rb:
                rep[max(ra, rb)] = min(ra, rb)
    return [find(k) for k in range(k_total)]


def free_spokes(params: LatticeParams, cls: VertexClass) -> int:
    """Outward edges a freshly created vertex of class ``cls`` still needs."""
    faces = {VertexClass.E: 1, VertexClass.L0: 1, VertexClass.I: 2, VertexClass.I1: 2, VertexClass.I2: 3}[cls]
    return params.q - faces - 1


def next_layer_pattern(params: LatticeParams, pattern: Sequence[int]) -> list[int]:
    """Class sequence of the next layer from the class sequence of a layer.

    Same walk as :func:`build_ball`, without materialising the graph.
    """
    spokes_per = [free_spokes(params, VertexClass(c)) for c in pattern]
    spokes, faces = corona_faces(spokes_per, params.p)
    ends = _spoke_ends(faces, len(spokes))
    multiplicity: dict[int, int] = {}
    for r in ends:
        multiplicity[r] = multiplicity.get(r, 0) + 1
    out: list[int] = []
    seen: set[int] = set()
    for f in faces:
        r = ends[f.first]
        if r not in seen:
            seen.add(r)
            out.append(_end_class(params, multiplicity[r]))
        out.extend([VertexClass.E] * f.inner)
    return out


def _end_class(params: LatticeParams, down: int) -> int:
    if params.p == 3:
        if down == 1:
            return VertexClass.I1
        if down == 2:
            return VertexClass.I2
        raise ConstructionError(f"triangulation vertex with {down} down-neighbours")
    return VertexClass.I


def root_pattern(params: LatticeParams) -> list[int]:
    cls = VertexClass.L0 if params.p == 3 else VertexClass.E
    return [cls] * params.p


def layer_pattern(params: LatticeParams, n: int, max_size: int = DEFAULT_MAX_VERTICES) -> tuple[int, ...]:
    """Cyclic class sequence of layer ``n`` (construction order)."""
    size = layer_counts(params, n).layer_size(n)
    if size > max_size:
        raise ResourceLimit(f"layer {n} of {params} has {size} vertices (cap {max_size})")
    return _layer_pattern(params, n)


@functools.lru_cache(maxsize=64)
def _layer_pattern(params: LatticeParams, n: int) -> tuple[int, ...]:
    if n == 0:
        return tuple(root_pattern(params))
    return tuple(next_layer_pattern(params, _layer_pattern(params, n - 1)))


# ---------------------------------------------------------------------------
# explicit ball


@dataclass
class LatticeBall:
    params: LatticeParams
    depth: int
    adjacency: list[tuple[int, ...]]
    layer: list[int]
    vclass: list[int]
    position: list[int]
    faces: list[tuple[int, ...]]
    layer_ranges: list[tuple[int, int]]
    vertex_faces: list[tuple[int, ...]] = field(repr=False)

    @property
    def num_vertices(self) -> int:
        return len(self.adjacency)

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def layer_vertices(self, n: int) -> range:
        first, count = self.layer_ranges[n]
        return range(first, first + count)

    def ball_vertices(self, n: int) -> range:
        first, count = self.layer_ranges[n]
        return range(0, first + count)

    def class_counts(self, n: int) -> dict[VertexClass, int]:
        out: dict[VertexClass, int] = {}
        for v in self.layer_vertices(n):
            c = VertexClass(self.vclass[v])
            out[c] = out.get(c, 0) + 1
        return out

    def count_pair(self, n: int) -> tuple[int, int]:
        """Graph-side counterpart of ``LayerCounts.pairs[n]``."""
        cc = self.class_counts(n)
        if self.params.p == 3:
            if n == 0:
                return (0, 0)
            return (cc.get(VertexClass.I2, 0), cc.get(VertexClass.I1, 0))
        return (cc.get(VertexClass.I, 0), cc.get(VertexClass.E, 0))

    # lattice view shared with DiscLattice: strict, raise at the rim

    def neighbors(self, v: int) -> tuple[int, ...]:
        if self.layer[v] >= self.depth:
            raise DepthInsufficient(f"vertex {v} lies on the rim of B_{self.depth}")
        return self.adjacency[v]

    def faces_at(self, v: int) -> tuple[int, ...]:
        if self.layer[v] >= self.depth:
            raise DepthInsufficient(f"vertex {v} lies on the rim of B_{self.depth}")
        return self.vertex_faces[v]

    def face(self, f: int) -> tuple[int, ...]:
        return self.faces[f]

    def adjacent(self, v: int) -> tuple[int, ...]:
        """Neighbours present in the ball; complete unless ``v`` is on the rim."""
        return self.adjacency[v]

    def known_faces(self, v: int) -> tuple[int, ...]:
        return self.vertex_faces[v]

    def edges(self) -> Iterable[tuple[int, int]]:
        for u, nbrs in enumerate(self.adjacency):
            for w in nbrs:
                if u < w:
                    yield (u, w)

    def is_saturated(self, v: int) -> bool:
        """All q incident faces of ``v`` are present in the ball."""
        return self.layer[v] < self.depth

    def check_vertices(self, vertices: Iterable[int]) -> None:
        n = self.num_vertices
        for v in vertices:
            if not (isinstance(v, int) and 0 <= v < n):
                raise UnknownVertex(v)

    def induced_edge_count(self, vertices: Iterable[int]) -> int:
        s = vertices if isinstance(vertices, (set, frozenset)) else set(vertices)
        adj = self.adjacency
        return sum(1 for u in s for w in adj[u] if w in s) // 2

    def to_json_dict(self) -> dict:
        layers = []
        for n in range(self.depth + 1):
            layers.append(
                {
                    "index": n,
                    "size": self.layer_ranges[n][1],
                    "class_counts": {c.name: k for c, k in sorted(self.class_counts(n).items())},
                }
            )
        return {
            "p": self.params.p,
            "q": self.params.q,
            "depth": self.depth,
            "layers": layers,
            "edges": [list(e) for e in self.edges()],
            "faces": [list(f) for f in self.faces],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_json_dict(), **kwargs)


def build_ball(params: LatticeParams, depth: int, max_vertices: int = DEFAULT_MAX_VERTICES) -> LatticeBall:
    """Explicit ball ``B_depth`` around the fundamental face.

    Vertex ids are dense, layer-major and follow the counter-clockwise
    boundary walk inside each layer.  Faces are stored counter-clockwise.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    predicted = layer_counts(params, depth).ball_size(depth)
    if predicted > max_vertices:
        raise ResourceLimit(f"B_{depth} of {params} has {predicted} vertices (cap {max_vertices})")

    p, q = params.p, params.q
    root_cls = VertexClass.L0 if p == 3 else VertexClass.E
    adj: list[set[int]] = [set() for _ in range(p)]
    for i in range(p):
        adj[i].add((i + 1) % p)
        adj[(i + 1) % p].add(i)
    layer = [0] * p
    vclass = [int(root_cls)] * p
    position = list(range(p))
    faces: list[tuple[int, ...]] = [tuple(range(p))]
    faces_at = [1] * p
    layer_ranges = [(0, p)]
    boundary = list(range(p))

    for n in range(1, depth + 1):
        spokes_per = [q - faces_at[c] - 1 for c in boundary]
        spokes, cfaces = corona_faces(spokes_per, p)
        ends = _spoke_ends(cfaces, len(spokes))
        first_id = len(adj)
        end_vertex: dict[int, int] = {}
        new_boundary: list[int] = []

        def fresh() -> int:
            v = len(adj)
            adj.append(set())
            layer.append(n)
            vclass.append(int(VertexClass.E))
            position.append(v - first_id)
            faces_at.append(0)
            new_boundary.append(v)
            return v

        inner_ids: list[list[int]] = []
        for f in cfaces:
            r = ends[f.first]
            if r not in end_vertex:
                end_vertex[r] = fresh()
            inner_ids.append([fresh() for _ in range(f.inner)])

        for f, inner in zip(cfaces, inner_ids):
            e_first = end_vertex[ends[f.first]]
            e_last = end_vertex[ends[f.last]]
            cyc = [e_first, *inner]
            if not f.merged:
                cyc.append(e_last)
            cyc.extend(boundary[i] for i in reversed(f.path))
            if len(cyc) != p or len(set(cyc)) != p:
                raise ConstructionError(f"malformed face {cyc}")
            faces.append(tuple(cyc))
            for j, v in enumerate(cyc):
                w = cyc[(j + 1) % p]
                adj[v].add(w)
                adj[w].add(v)
                faces_at[v] += 1

        for c in boundary:
            if faces_at[c] != q or len(adj[c]) != q:
                raise ConstructionError(f"vertex {c} left with {faces_at[c]} faces, degree {len(adj[c])}")
        for v in new_boundary:
            down = sum(1 for w in adj[v] if layer[w] == n - 1)
            if down == 0:
                vclass[v] = int(VertexClass.E)
            else:
                vclass[v] = int(_end_class(params, down))
        layer_ranges.append((first_id, len(new_boundary)))
        boundary = new_boundary

    vertex_faces: list[list[int]] = [[] for _ in range(len(adj))]
    for fi, f in enumerate(faces):
        for v in f:
            vertex_faces[v].append(fi)
    return LatticeBall(
        params=params,
        depth=depth,
        adjacency=[tuple(sorted(a)) for a in adj],
        layer=layer,
        vclass=vclass,
        position=position,
        faces=faces,
        layer_ranges=layer_ranges,
        vertex_faces=[tuple(f) for f in vertex_faces],
    )


def perimeter(ball: LatticeBall, vertices: Iterable[int]) -> int:
    """Edge boundary of ``vertices`` in the infinite lattice.

    Uses q-regularity, so only edges inside the set are needed.
    """
    s = set(vertices)
    if not s:
        raise ValueError("perimeter of the empty set")
    ball.check_vertices(s)
    return ball.params.q * len(s) - 2 * ball.induced_edge_count(s)


def ball_perimeter_identity(params: LatticeParams, n: int, max_vertices: int = DEFAULT_MAX_VERTICES) -> tuple[int, int]:
    """(graph |boundary B_n|, recursion value) -- the two must agree."""
    if n < 0:
        raise ValueError("n must be >= 0")
    ball = build_ball(params, n + 1, max_vertices=max_vertices)
    lhs = perimeter(ball, ball.ball_vertices(n))
    rhs = layer_counts(params, n + 1).ball_perimeter(n)
    return lhs, rhs
