"""Exhaustive lattice-animal search around a fixed root vertex.

The lattice is vertex-transitive, so minimising the edge boundary over all
connected N-sets containing one fixed vertex gives the global minimum.
Animals are generated with Redelmeier's method: each animal is produced
exactly once from an ordered frontier ("untried" set) and a set of vertices
that are never reconsidered in the current branch.
"""

from __future__ import annotations

import multiprocessing
import os
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .embedding import DiscLattice
from .lattice import DepthInsufficient, LatticeBall, LatticeParams
from .shapes import Shape, TooSmall, classify, minimal_perimeter_closed_form


class VisitCapExceeded(RuntimeError):
    def __init__(self, message: str, partial: "OracleResult | None" = None):
        super().__init__(message)
        self.partial = partial


@dataclass
class EnumerationTask:
    lattice: LatticeBall | DiscLattice
    root: int
    size: int
    perimeter_cap: int | None = None
    visit_cap: int | None = None

    @property
    def params(self) -> LatticeParams:
        return self.lattice.params


def prepare(task: EnumerationTask) -> None:
    """Make sure every vertex an N-animal can reach has its faces and neighbours.

    For an explicit ball this is a depth check; a disc lattice is grown
    here, before any worker starts, so vertex and face ids are fixed.
    """
    lat, n = task.lattice, task.size
    if n < 1:
        raise ValueError("animal size must be >= 1")
    if isinstance(lat, LatticeBall):
        need = lat.layer[task.root] + n - 1
        if lat.depth < need:
            raise DepthInsufficient(f"size {n} from a layer-{lat.layer[task.root]} root needs depth {need}, ball has {lat.depth}")
        return
    dist = {task.root: 0}
    todo = deque([task.root])
    while todo:
        v = todo.popleft()
        lat.faces_at(v)
        if dist[v] >= n - 1:
            continue
        for w in lat.neighbors(v):
            if w not in dist:
                dist[w] = dist[v] + 1
                todo.append(w)


# ---------------------------------------------------------------------------
# core search


class _Search:
    """Redelmeier search with incremental perimeter and complete-face count."""

    def __init__(self, lattice, root: int, size: int, cap: int | None):
        self.lat = lattice
        self.root = root
        self.size = size
        self.cap = cap
        params = lattice.params
        self.p, self.q = params.p, params.q
        self.inside: set[int] = set()
        self.order: list[int] = []
        self.seen: set[int] = {root}
        self.fcount: dict[int, int] = {}
        self.complete = 0

    def _nbrs(self, v: int) -> tuple[int, ...]:
        if self.lat.is_saturated(v):
            return self.lat.neighbors(v)
        raise DepthInsufficient(f"vertex {v} is on the rim")

    def _add(self, v: int) -> int:
        e = sum(1 for w in self.lat.adjacent(v) if w in self.inside)
        self.inside.add(v)
        self.order.append(v)
        for f in self.lat.known_faces(v):
            c = self.fcount.get(f, 0) + 1
            self.fcount[f] = c
            if c == self.p:
                self.complete += 1
        return self.q - 2 * e

    def _remove(self, v: int) -> None:
        self.inside.discard(v)
        self.order.pop()
        for f in self.lat.known_faces(v):
            c = self.fcount[f]
            if c == self.p:
                self.complete -= 1
            self.fcount[f] = c - 1

    def _bound(self, perim: int, remaining: int) -> int:
        """Lower bound on the final perimeter.

        The boundary equals the number of maximal runs of members summed
        over all tiles; a touched tile that needs more than ``remaining``
        further vertices keeps at least one run.
        """
        lb = sum(1 for f, c in self.fcount.items() if c and self.p - c > remaining)
        return lb

    def run(self, branch: int | None = None) -> Iterator[tuple[tuple[int, ...], int, int]]:
        """Yield (members, perimeter, complete_faces) for every N-animal.

        ``branch`` restricts the search to animals whose second vertex is
        the ``branch``-th one popped from the root's frontier.
        """
        root = self.root
        perim = self._add(root)
        if self.size == 1:
            yield (root,), perim, self.complete
            self._remove(root)
            return
        new = [w for w in self._nbrs(root) if w not in self.seen]
        self.seen.update(new)
        untried = list(new)
        if branch is None:
            yield from self._extend(untried, perim)
        else:
            for _ in range(branch):
                untried.pop()
            if untried:
                yield from self._extend(untried, perim, once=True)
        self._remove(root)

    def _extend(self, untried: list[int], perim: int, once: bool = False) -> Iterator[tuple[tuple[int, ...], int, int]]:
        n = len(self.order)
        cap = self.cap
        while untried:
            v = untried.pop()
            grown = perim + self._add(v)
            if n + 1 == self.size:
                if cap is None or grown <= cap:
                    yield tuple(self.order), grown, self.complete
            elif cap is None or self._bound(grown, self.size - n - 1) <= cap:
                new = [w for w in self._nbrs(v) if w not in self.seen]
                self.seen.update(new)
                yield from self._extend(untried + new, grown)
                self.seen.difference_update(new)
            self._remove(v)
            if once:
                break


def enumerate_animals(task: EnumerationTask) -> Iterator[Shape]:
    """Every connected ``task.size``-set containing ``task.root``, once each.

    With a perimeter cap only animals with perimeter <= cap are emitted;
    the cap never removes such an animal.
    """
    prepare(task)
    q = task.params.q
    count = 0
    for members, perim, _ in _Search(task.lattice, task.root, task.size, task.perimeter_cap).run():
        count += 1
        if task.visit_cap is not None and count > task.visit_cap:
            raise VisitCapExceeded(f"more than {task.visit_cap} animals")
        yield Shape(task.lattice, tuple(sorted(members)), (q * len(members) - perim) // 2, perim, True)


def naive_animals(lattice, root: int, size: int) -> set[frozenset[int]]:
    """Connected sets containing ``root`` by breadth-first set growth (independent check)."""
    level = {frozenset([root])}
    for _ in range(size - 1):
        nxt = set()
        for s in level:
            for v in s:
                for w in lattice.neighbors(v):
                    if w not in s:
                        nxt.add(s | {w})
        level = nxt
    return level


# ---------------------------------------------------------------------------
# oracle


@dataclass
class OracleResult:
    params: LatticeParams
    size: int
    min_perimeter: int
    minimizer_count: int
    sample_minimizers: list[Shape] = field(repr=False)
    all_minimizers_classified_InM: bool
    inm_count: int
    all_InM_minimal: bool
    animals_visited: int
    closed_form: int | None
    perimeter_cap: int | None = None
    wall_time_ms: float = 0.0
    minimizers: frozenset[tuple[int, ...]] = field(default=frozenset(), repr=False)
    rejected_minimizers: list[dict] = field(default_factory=list, repr=False)
    non_minimal_inm: list[dict] = field(default_factory=list, repr=False)

    @property
    def match(self) -> bool | None:
        return None if self.closed_form is None else self.closed_form == self.min_perimeter

    @property
    def consistent(self) -> bool:
        """Closed form agrees and minimizers coincide with the minimal family."""
        return bool(self.match is not False and self.all_minimizers_classified_InM and self.all_InM_minimal)

    def to_json_dict(self) -> dict:
        return {
            "p": self.params.p,
            "q": self.params.q,
            "N": self.size,
            "min_perimeter": self.min_perimeter,
            "closed_form": self.closed_form,
            "match": self.match,
            "minimizer_count": self.minimizer_count,
            "all_minimizers_InM": self.all_minimizers_classified_InM,
            "InM_count": self.inm_count,
            "all_InM_minimal": self.all_InM_minimal,
            "animals_visited": self.animals_visited,
            "perimeter_cap": self.perimeter_cap,
            "wall_time_ms": round(self.wall_time_ms, 3),
        }


@dataclass
class _Partial:
    best: int | None = None
    minimizers: list[tuple[int, ...]] = field(default_factory=list)
    visited: int = 0
    # perimeters of animals the membership test accepted, with a few witnesses
    inm: dict[int, int] = field(default_factory=dict)
    inm_witness: dict[int, list[tuple[int, ...]]] = field(default_factory=dict)
    rejected: dict[tuple[int, ...], dict] = field(default_factory=dict)

    def merge(self, other: "_Partial") -> None:
        if other.best is not None and (self.best is None or other.best < self.best):
            self.best, self.minimizers = other.best, list(other.minimizers)
        elif other.best is not None and other.best == self.best:
            self.minimizers.extend(other.minimizers)
        self.visited += other.visited
        for k, v in other.inm.items():
            self.inm[k] = self.inm.get(k, 0) + v
        for k, v in other.inm_witness.items():
            self.inm_witness.setdefault(k, []).extend(v[:4])
        self.rejected.update(other.rejected)


def _search_branch(lattice, root: int, size: int, cap: int | None, visit_cap: int | None, centers: str, branch: int | None, supported: bool = True) -> _Partial:
    q = lattice.params.q
    out = _Partial()
    for members, perim, complete in _Search(lattice, root, size, cap).run(branch):
        out.visited += 1
        if visit_cap is not None and out.visited > visit_cap:
            raise VisitCapExceeded(f"more than {visit_cap} animals")
        key = tuple(sorted(members))
        if out.best is None or perim < out.best:
            out.best, out.minimizers = perim, [key]
            out.rejected.clear()
        elif perim == out.best:
            out.minimizers.append(key)
        if complete == 0:
            # no complete face means no inscribed ball: never in the family
            if perim == out.best:
                out.rejected[key] = {"reason": "no complete face"}
            continue
        shape = Shape(lattice, key, (q * size - perim) // 2, perim, True)
        verdict = classify(shape, centers=centers, supported=supported)
        if verdict.in_m:
            out.inm[perim] = out.inm.get(perim, 0) + 1
            wit = out.inm_witness.setdefault(perim, [])
            if len(wit) < 4:
                wit.append(key)
        elif perim == out.best:
            out.rejected[key] = verdict.summary()
    # minimizers rejected before a later, smaller minimum was found are stale
    out.rejected = {k: v for k, v in out.rejected.items() if k in set(out.minimizers)}
    return out


_WORKER_LATTICE = None


def _worker(args) -> _Partial:
    return _search_branch(_WORKER_LATTICE, *args)


def brute_force_min_perimeter(
    task: EnumerationTask,
    threads: int = 1,
    centers: str = "first",
    sample_limit: int = 8,
    supported: bool = True,
) -> OracleResult:
    """Minimum boundary over all root-containing N-animals, cross-checked.

    Every minimizer is run through the membership test, and so is every
    animal that contains a complete face (the only ones that can pass it);
    the result records whether the two sets coincide.
    """
    global _WORKER_LATTICE
    start = time.perf_counter()
    prepare(task)
    lat, size = task.lattice, task.size
    params = lat.params
    degree = len(lat.neighbors(task.root)) if size > 1 else 0
    if threads > 1 and size > 2 and degree > 1:
        _WORKER_LATTICE = lat
        jobs = [(task.root, size, task.perimeter_cap, task.visit_cap, centers, b, supported) for b in range(degree)]
        ctx = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(max_workers=threads, mp_context=ctx) as pool:
            parts = list(pool.map(_worker, jobs))
        _WORKER_LATTICE = None
        total = _Partial()
        for part in parts:
            total.merge(part)
        total.rejected = {k: v for k, v in total.rejected.items() if k in set(total.minimizers)}
    else:
        total = _search_branch(lat, task.root, size, task.perimeter_cap, task.visit_cap, centers, None, supported)
    if task.visit_cap is not None and total.visited > task.visit_cap:
        raise VisitCapExceeded(f"more than {task.visit_cap} animals")
    if total.best is None:
        raise ValueError("no animal within the perimeter cap")
    try:
        closed = minimal_perimeter_closed_form(params, size)
    except TooSmall:
        closed = None
    mins = sorted(set(total.minimizers))
    q = params.q
    samples = [Shape(lat, m, (q * size - total.best) // 2, total.best, True) for m in mins[:sample_limit]]
    non_minimal = [
        {"perimeter": per, "count": cnt, "witnesses": [list(w) for w in total.inm_witness.get(per, [])]}
        for per, cnt in sorted(total.inm.items())
        if per != total.best
    ]
    return OracleResult(
        params=params,
        size=size,
        min_perimeter=total.best,
        minimizer_count=len(mins),
        sample_minimizers=samples,
        all_minimizers_classified_InM=not total.rejected,
        inm_count=sum(total.inm.values()),
        all_InM_minimal=not non_minimal,
        animals_visited=total.visited,
        closed_form=closed,
        perimeter_cap=task.perimeter_cap,
        wall_time_ms=(time.perf_counter() - start) * 1000,
        minimizers=frozenset(mins),
        rejected_minimizers=[{"members": list(k), **v} for k, v in sorted(total.rejected.items())[:8]],
        non_minimal_inm=non_minimal,
    )


def oracle(
    params: LatticeParams,
    N: int,
    threads: int = 1,
    cap: int | None = None,
    centers: str = "first",
    supported: bool = True,
) -> OracleResult:
    """Brute-force oracle on a fresh disc lattice rooted at vertex 0."""
    lat = DiscLattice(params)
    task = EnumerationTask(lat, 0, N, visit_cap=cap)
    return brute_force_min_perimeter(task, threads=threads, centers=centers, supported=supported)


def finite_cheeger(lattice, m: int, root: int = 0, visit_cap: int | None = None) -> tuple[Fraction, Fraction]:
    """(i_m, i_m^g): the least boundary-to-size ratio over m-sets, edge and geometric."""
    if m < 1:
        raise ValueError("m must be >= 1")
    best = None
    for shape in enumerate_animals(EnumerationTask(lattice, root, m, visit_cap=visit_cap)):
        if best is None or shape.perimeter < best:
            best = shape.perimeter
    q = lattice.params.q
    i_m = Fraction(best, m)
    i_geo = Fraction(best, q * m)
    assert i_m == i_geo * q
    return i_m, i_geo


def disconnected_minimum(connected_minima: dict[int, int], N: int) -> int:
    """Smallest boundary a disconnected N-set can have.

    Components of a disconnected set share no edge, so its boundary is the
    sum of the component boundaries; minimise over splittings of N.
    """
    best: dict[int, int] = {}
    # best[n] = least total over splittings of n into >= 1 parts
    for n in range(1, N + 1):
        best[n] = min([connected_minima[n]] + [best[a] + connected_minima[n - a] for a in range(1, n)])
    return min(best[a] + connected_minima[N - a] for a in range(1, N))


def default_threads() -> int:
    return max(1, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1))


# ---------------------------------------------------------------------------
# compiled bounded search


def lattice_arrays(lattice, root: int, size: int):
    """Dense neighbour/face arrays over the region an N-animal can reach.

    Returns (nbr, vface, index, ids): ``index`` maps lattice ids to rows and
    ``ids`` maps rows back.
    """
    import numpy as np

    prepare(EnumerationTask(lattice, root, size))
    q = lattice.params.q
    dist = {root: 0}
    order = [root]
    todo = deque([root])
    while todo:
        v = todo.popleft()
        if dist[v] >= size - 1:
            continue
        for w in lattice.neighbors(v):
            if w not in dist:
                dist[w] = dist[v] + 1
                order.append(w)
                todo.append(w)
    index = {v: i for i, v in enumerate(order)}
    faces: dict[int, int] = {}
    nbr = np.full((len(order), q), -1, dtype=np.int64)
    vface = np.zeros((len(order), q), dtype=np.int64)
    for i, v in enumerate(order):
        adj = lattice.adjacent(v)
        for j, w in enumerate(adj):
            nbr[i, j] = index.get(w, -1)
        fs = lattice.known_faces(v)
        if len(fs) != q:
            raise DepthInsufficient(f"vertex {v} has {len(fs)} known faces")
        for j, f in enumerate(fs):
            vface[i, j] = faces.setdefault(f, len(faces))
    return nbr, vface, index, order


@dataclass
class BoundedResult:
    params: LatticeParams
    size: int
    cap: int
    best: int | None
    count: int
    visited: int
    minimizers: list[tuple[int, ...]]
    wall_time_ms: float

    def to_json_dict(self) -> dict:
        return {
            "p": self.params.p,
            "q": self.params.q,
            "N": self.size,
            "perimeter_cap": self.cap,
            "best": self.best,
            "count_at_best": self.count,
            "animals_visited": self.visited,
            "wall_time_ms": round(self.wall_time_ms, 3),
        }


def bounded_min_perimeter(lattice, root: int, size: int, cap: int, keep: int = 64) -> BoundedResult:
    """Least perimeter among animals with perimeter <= cap (compiled search).

    ``best`` is None when no animal meets the cap, which certifies that the
    minimum exceeds it.  ``visited`` counts complete animals reached after
    pruning, so it is not the number of animals.
    """
    from . import _kernel

    start = time.perf_counter()
    nbr, vface, index, ids = lattice_arrays(lattice, root, size)
    best, count, visited, kept = _kernel.search(nbr, vface, lattice.params.p, index[root], size, cap, keep)
    found = None if best > cap else int(best)
    mins = [tuple(sorted(ids[i] for i in row)) for row in kept] if found is not None else []
    return BoundedResult(lattice.params, size, cap, found, int(count), int(visited), mins, (time.perf_counter() - start) * 1000)
