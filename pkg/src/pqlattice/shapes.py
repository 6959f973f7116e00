"""Minimal-perimeter shapes.

A connected vertex set ``A`` is described relative to its largest inscribed
face-centred ball ``B_max`` and the smallest concentric ball ``B_Min``
containing it.  The vertices of the annulus in between are occupied (in
``A``) or empty, and maximal runs of either kind inside one layer are
strips.  ``A`` is a minimal shape when either it is a ball (C1) or it has
empty strips and exactly ``o_max + s_e - 1`` occupied vertices of the
internal class (C2).
"""

from __future__ import annotations

import enum
import functools
import itertools
import random
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from .lattice import (
    DEFAULT_MAX_VERTICES,
    ConstructionError,
    DepthInsufficient,
    LatticeBall,
    LatticeParams,
    VertexClass,
    build_ball,
    layer_counts,
    layer_pattern,
)


class TooSmall(ValueError):
    """Fewer vertices than one face."""


class NotConnectedError(ValueError):
    pass


# ---------------------------------------------------------------------------
# shapes


@dataclass(frozen=True)
class Shape:
    lattice: Any = field(repr=False, compare=False)
    members: tuple[int, ...]
    induced_edges: int
    perimeter: int
    is_connected: bool
    certificate: dict | None = field(default=None, compare=False)

    @property
    def N(self) -> int:
        return len(self.members)

    @property
    def params(self) -> LatticeParams:
        return self.lattice.params

    def member_set(self) -> frozenset[int]:
        return frozenset(self.members)

    def to_json_dict(self) -> dict:
        out = {
            "p": self.params.p,
            "q": self.params.q,
            "N": self.N,
            "members": list(self.members),
            "perimeter": self.perimeter,
        }
        if self.certificate is not None:
            out["certificate"] = dict(self.certificate)
        return out


def connected(lattice, vertices: Iterable[int]) -> bool:
    s = set(vertices)
    if not s:
        return False
    start = next(iter(s))
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in lattice.adjacent(v):
            if w in s and w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(s)


def make_shape(lattice, vertices: Iterable[int], require_connected: bool = True, certificate: dict | None = None) -> Shape:
    members = tuple(sorted(set(vertices)))
    if not members:
        raise ValueError("a shape needs at least one vertex")
    lattice.check_vertices(members)
    edges = lattice.induced_edge_count(set(members))
    ok = connected(lattice, members)
    if require_connected and not ok:
        raise NotConnectedError("vertex set is not connected")
    q = lattice.params.q
    return Shape(lattice, members, edges, q * len(members) - 2 * edges, ok, certificate)


# ---------------------------------------------------------------------------
# face-centred layers


class FaceLayers:
    """Layers ``L_k(x)`` around face ``x``, grown on demand.

    ``layers[k]`` holds the vertices of ``L_k(x)``; ``depth_of`` maps each
    discovered vertex to its layer and ``down`` counts its neighbours in the
    previous layer.
    """

    def __init__(self, lattice, face: int):
        self.lattice = lattice
        self.center = face
        first = tuple(lattice.face(face))
        self.layers: list[tuple[int, ...]] = [first]
        self.depth_of: dict[int, int] = {v: 0 for v in first}
        self.down: dict[int, int] = {v: 0 for v in first}
        self._in_layer: list[dict[int, set[int]]] = [self._cycle_edges(first)]

    @staticmethod
    def _cycle_edges(cyc: Sequence[int]) -> dict[int, set[int]]:
        n = len(cyc)
        return {v: {cyc[(i - 1) % n], cyc[(i + 1) % n]} for i, v in enumerate(cyc)}

    def grow(self) -> tuple[int, ...]:
        """Compute the next layer (raises DepthInsufficient at a ball rim)."""
        lat = self.lattice
        k = len(self.layers)
        prev = self.layers[-1]
        new: dict[int, None] = {}
        in_layer: dict[int, set[int]] = {}
        for u in prev:
            for f in lat.faces_at(u):
                cyc = lat.face(f)
                for w in cyc:
                    if w not in self.depth_of and w not in new:
                        new[w] = None
                m = len(cyc)
                for i in range(m):
                    a, b = cyc[i], cyc[(i + 1) % m]
                    if a not in self.depth_of and b not in self.depth_of:
                        in_layer.setdefault(a, set()).add(b)
                        in_layer.setdefault(b, set()).add(a)
        down = dict.fromkeys(new, 0)
        for u in prev:
            for w in lat.neighbors(u):
                if w in down:
                    down[w] += 1
        layer = tuple(new)
        for w in layer:
            self.depth_of[w] = k
        self.down.update(down)
        self.layers.append(layer)
        self._in_layer.append({w: in_layer.get(w, set()) for w in layer})
        return layer

    def ensure(self, k: int) -> None:
        while len(self.layers) <= k:
            self.grow()

    def ball(self, k: int) -> set[int]:
        self.ensure(k)
        return set(itertools.chain.from_iterable(self.layers[: k + 1]))

    def vclass(self, v: int) -> VertexClass:
        k = self.depth_of[v]
        p = self.lattice.params.p
        if k == 0:
            return VertexClass.L0 if p == 3 else VertexClass.E
        d = self.down[v]
        if p == 3:
            if d == 1:
                return VertexClass.I1
            if d == 2:
                return VertexClass.I2
            raise ConstructionError(f"vertex {v} has {d} neighbours in the previous layer")
        return VertexClass.I if d >= 1 else VertexClass.E

    def runs(self, k: int, members: frozenset[int] | set[int]) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
        """Occupied and empty strips of layer ``k``.

        Strips are the connected pieces of the occupied (resp. empty) part
        of the layer under in-layer adjacency, so no cyclic order is assumed.
        """
        self.ensure(k)
        adj = self._in_layer[k]
        occupied, empty = [], []
        seen: set[int] = set()
        for v in self.layers[k]:
            if v in seen:
                continue
            state = v in members
            comp = [v]
            seen.add(v)
            stack = [v]
            while stack:
                u = stack.pop()
                for w in adj[u]:
                    if w not in seen and (w in members) == state:
                        seen.add(w)
                        comp.append(w)
                        stack.append(w)
            (occupied if state else empty).append(tuple(sorted(comp)))
        return occupied, empty


def _walk_contains(fl: FaceLayers, members: frozenset[int]) -> int:
    """Largest l with B_l(x) inside ``members`` (-1 if the face is not)."""
    if not all(v in members for v in fl.layers[0]):
        return -1
    lat = fl.lattice
    k = 0
    while True:
        # a rim vertex has neighbours outside the ball, hence outside A
        if not all(lat.is_saturated(v) for v in fl.layers[k]):
            return k
        fl.ensure(k + 1)
        if not all(v in members for v in fl.layers[k + 1]):
            return k
        k += 1


def complete_faces(lattice, members: Iterable[int]) -> list[int]:
    s = set(members)
    found = set()
    for v in s:
        for f in lattice.known_faces(v):
            if f not in found and all(w in s for w in lattice.face(f)):
                found.add(f)
    return sorted(found)


def inscribed_balls(shape: Shape) -> tuple[int, list[int]]:
    """(m, centres): the largest radius and every face attaining it."""
    members = shape.member_set()
    best, centres = -1, []
    for f in complete_faces(shape.lattice, members):
        m = _walk_contains(FaceLayers(shape.lattice, f), members)
        if m > best:
            best, centres = m, [f]
        elif m == best:
            centres.append(f)
    return best, centres


def max_inscribed_ball(shape: Shape) -> tuple[int, int] | None:
    """(face, radius) of the largest inscribed ball; ties go to the smallest face id."""
    m, centres = inscribed_balls(shape)
    if m < 0:
        return None
    return centres[0], m


def min_circumscribing_ball(shape: Shape, center: int) -> int:
    fl = FaceLayers(shape.lattice, center)
    return _circumscribing_radius(fl, shape.member_set())


def _circumscribing_radius(fl: FaceLayers, members: frozenset[int]) -> int:
    covered = sum(1 for v in fl.layers[0] if v in members)
    k = 0
    while covered < len(members):
        k += 1
        fl.ensure(k)
        covered += sum(1 for v in fl.layers[k] if v in members)
        if k > len(members) + 1:
            raise ConstructionError("shape not reachable from its centre")
    return k


# ---------------------------------------------------------------------------
# o_max


def window_max(flags: Sequence[int], length: int) -> tuple[int, list[int]]:
    """Maximum of a cyclic sliding-window sum and the starts attaining it."""
    m = len(flags)
    if length >= m:
        return sum(flags), [0]
    prefix = [0, *itertools.accumulate(itertools.chain(flags, flags[:length]))]
    sums = [prefix[s + length] - prefix[s] for s in range(m)]
    best = max(sums)
    return best, [s for s, x in enumerate(sums) if x == best]


def internal_flags(params: LatticeParams, layer: int, max_size: int = DEFAULT_MAX_VERTICES) -> list[int]:
    ic = params.internal_class
    return [1 if c == ic else 0 for c in layer_pattern(params, layer, max_size=max_size)]


@functools.lru_cache(maxsize=16)
def _flag_prefix(params: LatticeParams, layer: int) -> np.ndarray:
    flags = np.asarray(internal_flags(params, layer), dtype=np.int64)
    return np.concatenate(([0], np.cumsum(np.concatenate((flags, flags)))))


def o_max_in_layer(params: LatticeParams, strip_length: int, layer: int) -> int:
    if strip_length < 1:
        raise ValueError("strip_length must be >= 1")
    if layer < 1:
        raise ValueError("strips live in layers >= 1")
    prefix = _flag_prefix(params, layer)
    m = (len(prefix) - 1) // 2
    if strip_length >= m:
        return int(prefix[m])
    return int((prefix[strip_length : strip_length + m] - prefix[:m]).max())


def o_max_reference_layer(params: LatticeParams, strip_length: int) -> int:
    """Smallest layer K >= 1 with |L_K| >= strip_length + 2."""
    k = 1
    while layer_counts(params, k).layer_size(k) < strip_length + 2:
        k += 1
    return k


def o_max(params: LatticeParams, strip_length: int, layer: int | None = None) -> int:
    """Most internal-class vertices (I, or I'' when p = 3) a strip can hold.

    Without ``layer`` the strip slides along the smallest layer that leaves
    room for two empty vertices.  The count depends on the layer: deeper
    layers contain denser windows, so the membership test and the closed
    form use the layer the strip actually lives in.
    """
    if strip_length < 1:
        raise ValueError("strip_length must be >= 1")
    if layer is None:
        layer = o_max_reference_layer(params, strip_length)
    return o_max_in_layer(params, strip_length, layer)


def annulus_o_max(params: LatticeParams, inner_radius: int, occupied: int) -> int:
    """o_max for ``occupied`` annulus vertices around a ball of radius ``inner_radius``.

    The best arrangement fills whole layers outward and puts the remainder
    into one strip of the next layer; a single partial layer is the common
    case.
    """
    k = inner_radius + 1
    lc = layer_counts(params, k + occupied)
    total, rest = 0, occupied
    while rest >= lc.layer_size(k):
        total += lc.internal(k)
        rest -= lc.layer_size(k)
        k += 1
    if rest:
        total += o_max_in_layer(params, rest, k)
    return total


# ---------------------------------------------------------------------------
# annulus decomposition and membership


@dataclass
class AnnulusDecomposition:
    center: int
    inner_radius: int
    outer_radius: int
    occupied: frozenset[int]
    empty: frozenset[int]
    occupied_strips: list[tuple[int, ...]]
    empty_strips: list[tuple[int, ...]]
    t: int

    @property
    def s_e(self) -> int:
        return len(self.empty_strips)


def decompose(shape: Shape, center: int, inner_radius: int, supported: bool = True) -> AnnulusDecomposition:
    """Split the annulus around ``center`` into strips and count t.

    With ``supported`` an internal-class vertex only counts towards t when
    all its neighbours in the previous layer are members too, which is what
    the class means for a filled inner region.  ``supported=False`` counts
    the bare class.
    """
    members = shape.member_set()
    fl = FaceLayers(shape.lattice, center)
    outer = _circumscribing_radius(fl, members)
    ic = shape.params.internal_class
    occ, emp, occ_strips, emp_strips = set(), set(), [], []
    t = 0
    for k in range(inner_radius + 1, outer + 1):
        o, e = fl.runs(k, members)
        occ_strips.extend(o)
        emp_strips.extend(e)
        for v in fl.layers[k]:
            if v in members:
                occ.add(v)
                if fl.vclass(v) == ic and (not supported or _down_members(fl, v, k, members)):
                    t += 1
            else:
                emp.add(v)
    return AnnulusDecomposition(center, inner_radius, outer, frozenset(occ), frozenset(emp), occ_strips, emp_strips, t)


def _down_members(fl: FaceLayers, v: int, k: int, members: frozenset[int]) -> bool:
    prev = fl.depth_of
    return all(w in members for w in fl.lattice.neighbors(v) if prev.get(w) == k - 1)


class Membership(enum.Enum):
    IN_M = "InM_N"
    NOT_IN_M = "NotInM_N"
    NOT_CONNECTED = "NotConnected"


@dataclass
class Classification:
    status: Membership
    reason: str = ""
    condition: str | None = None
    decomposition: AnnulusDecomposition | None = None
    o_max: int | None = None

    @property
    def in_m(self) -> bool:
        return self.status is Membership.IN_M

    def summary(self) -> dict:
        d = self.decomposition
        out: dict = {"status": self.status.value, "reason": self.reason, "condition": self.condition}
        if d is not None:
            out.update(
                center=d.center,
                inner_radius=d.inner_radius,
                outer_radius=d.outer_radius,
                occupied=len(d.occupied),
                s_e=d.s_e,
                t=d.t,
                o_max=self.o_max,
            )
        return out


def _check_center(shape: Shape, center: int, m: int, supported: bool = True) -> Classification:
    dec = decompose(shape, center, m, supported)
    if dec.s_e == 0:
        if dec.outer_radius == m:
            return Classification(Membership.IN_M, "ball", "C1", dec)
        return Classification(Membership.NOT_IN_M, "annulus without empty strips", None, dec)
    om = annulus_o_max(shape.params, m, len(dec.occupied))
    if dec.t == om + dec.s_e - 1:
        return Classification(Membership.IN_M, "strips hold o_max + s_e - 1 internal vertices", "C2", dec, om)
    return Classification(
        Membership.NOT_IN_M,
        f"t = {dec.t} but o_max + s_e - 1 = {om + dec.s_e - 1}",
        None,
        dec,
        om,
    )


def classify(shape: Shape, centers: str = "first", supported: bool = True) -> Classification:
    """Decide membership in the minimal family.

    ``centers="first"`` uses the inscribed ball with the smallest face id, as
    a literal tie-break; ``centers="any"`` accepts when some maximal centre
    certifies C1 or C2.
    """
    if centers not in ("first", "any"):
        raise ValueError(f"unknown centre rule {centers!r}")
    if not shape.is_connected:
        return Classification(Membership.NOT_CONNECTED, "vertex set is not connected")
    m, found = inscribed_balls(shape)
    if m < 0:
        return Classification(Membership.NOT_IN_M, "no complete face")
    if centers == "first":
        found = found[:1]
    result = None
    for c in found:
        result = _check_center(shape, c, m, supported)
        if result.in_m:
            return result
    return result  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# constructions


def enclosing_ball_index(params: LatticeParams, N: int) -> int:
    """Largest n with |B_n| <= N."""
    n_max = 4
    while True:
        sizes = layer_counts(params, n_max).ball_sizes()
        if sizes[-1] > N:
            return max(n for n, size in enumerate(sizes) if size <= N) if sizes[0] <= N else 0
        n_max *= 2


def minimal_perimeter_closed_form(params: LatticeParams, N: int) -> int:
    """Perimeter of the minimal shapes of size N.

    For N = |B_n| this is |boundary B_n|.  Otherwise B_n is completed by a
    single strip of N - |B_n| vertices in layer n+1 holding t = o_max
    internal vertices and e = N - |B_n| - t others; with I = |I_{n+1}| the
    perimeter is I + (q-4)(t-1) + (q-2)(e+1) for p >= 4 and
    |boundary B_n| + (q-6)(t-1) + (q-4)(e+1) for p = 3.
    """
    if N < params.p:
        raise TooSmall(f"N = {N} < p = {params.p}")
    n = enclosing_ball_index(params, N)
    lc = layer_counts(params, n + 1)
    rest = N - lc.ball_size(n)
    base = lc.ball_perimeter(n)
    if rest == 0:
        return base
    q = params.q
    t = o_max_in_layer(params, rest, n + 1)
    e = rest - t
    if params.p == 3:
        return base + (q - 6) * (t - 1) + (q - 4) * (e + 1)
    return base + (q - 4) * (t - 1) + (q - 2) * (e + 1)


def _strip(start: int, length: int, m: int) -> list[int]:
    return [(start + i) % m for i in range(length)]


def _two_strip_split(flags: list[int], length: int, target: int, rng: random.Random) -> list[list[int]] | None:
    """Two non-touching strips of total ``length`` holding ``target`` internal vertices."""
    m = len(flags)
    if length < 2 or length + 2 > m:
        return None
    sizes = list(range(1, length // 2 + 1))
    rng.shuffle(sizes)
    for a in sizes:
        b = length - a
        best_a, starts_a = window_max(flags, a)
        best_b, starts_b = window_max(flags, b)
        if best_a + best_b != target or best_a == 0 or best_b == 0:
            continue
        rng.shuffle(starts_a)
        rng.shuffle(starts_b)
        for s1 in starts_a[:64]:
            for s2 in starts_b:
                gap_after = (s2 - (s1 + a)) % m
                gap_before = (s1 - (s2 + b)) % m
                if gap_after >= 1 and gap_before >= 1 and a + b + gap_after + gap_before == m:
                    return [_strip(s1, a, m), _strip(s2, b, m)]
    return None


def build_minimal_shape(
    params: LatticeParams,
    N: int,
    variant_seed: int | str = 0,
    ball: LatticeBall | None = None,
) -> Shape:
    """A member of the minimal family of size N on an explicit ball.

    Variant 0 is canonical: B_n plus one strip in layer n+1 starting at the
    smallest position that reaches o_max.  Other seeds first try a split
    into two strips with o_max + 1 internal vertices (s_e = 2), and fall
    back to another optimal single-strip placement.
    """
    if N < params.p:
        raise TooSmall(f"N = {N} < p = {params.p}")
    n = enclosing_ball_index(params, N)
    if ball is None:
        ball = build_ball(params, n + 2)
    elif ball.depth < n + 2:
        raise DepthInsufficient(f"need a ball of depth {n + 2}, got {ball.depth}")
    lc = layer_counts(params, n + 1)
    rest = N - lc.ball_size(n)
    inner = list(ball.ball_vertices(n))
    if rest == 0:
        cert = {"condition": "C1", "s_e": 0, "t": 0, "o_max": 0}
        return make_shape(ball, inner, certificate=cert)
    layer = list(ball.layer_vertices(n + 1))
    ic = params.internal_class
    flags = [1 if ball.vclass[v] == ic else 0 for v in layer]
    best, starts = window_max(flags, rest)
    strips = None
    if variant_seed != 0:
        rng = random.Random(variant_seed)
        strips = _two_strip_split(flags, rest, best + 1, rng)
        if strips is None:
            strips = [_strip(rng.choice(starts), rest, len(layer))]
    if strips is None:
        strips = [_strip(starts[0], rest, len(layer))]
    chosen = [layer[i] for s in strips for i in s]
    t = sum(flags[i] for s in strips for i in s)
    cert = {"condition": "C2", "s_e": len(strips), "t": t, "o_max": best}
    return make_shape(ball, inner + chosen, certificate=cert)
