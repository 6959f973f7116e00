"""Compiled branch-and-bound search for small-perimeter animals.

Works on dense arrays: ``nbr[v]`` lists the q neighbours of v (-1 when the
neighbour lies beyond the prepared region) and ``vface[v]`` its q faces.
"""

from __future__ import annotations

import numpy as np
from numba import njit

UNSEEN, FRONTIER, MEMBER, EXCLUDED = 0, 1, 2, 3


@njit(cache=True)
def _lower_bound(perim, closed, remaining, fcount, touched, ntouched, p):
    # boundary = sum over tiles of member runs; a tile that cannot be filled
    # keeps a run.  Edges into excluded vertices never close either.
    lb = 0
    for i in range(ntouched):
        c = fcount[touched[i]]
        if c > 0 and p - c > remaining:
            lb += 1
    if closed > lb:
        lb = closed
    return lb


@njit(cache=True)
def search(nbr, vface, p, root, size, cap, keep):
    """Return (best, count_at_best, visited, kept_members).

    Only animals with perimeter <= cap are reported; best is cap + 1 when
    there are none.
    """
    nv, q = nbr.shape
    nf = 0
    for v in range(nv):
        for j in range(q):
            if vface[v, j] + 1 > nf:
                nf = vface[v, j] + 1
    status = np.zeros(nv, np.int8)
    fcount = np.zeros(nf, np.int32)
    touched = np.empty(size * q, np.int64)
    maxu = size * q + 1
    untried = np.empty((size + 1, maxu), np.int64)
    ulen = np.zeros(size + 1, np.int64)
    popped = np.empty((size + 1, maxu), np.int64)
    plen = np.zeros(size + 1, np.int64)
    added = np.empty((size + 1, q), np.int64)
    alen = np.zeros(size + 1, np.int64)
    tsave = np.zeros(size + 1, np.int64)
    members = np.empty(size, np.int64)
    perims = np.zeros(size + 1, np.int64)
    kept = np.empty((keep, size), np.int64)
    nkept = 0
    best = cap + 1
    count = 0
    visited = 0
    closed = 0
    ntouched = 0

    # place the root
    members[0] = root
    status[root] = MEMBER
    perims[1] = q
    for j in range(q):
        f = vface[root, j]
        if fcount[f] == 0:
            touched[ntouched] = f
            ntouched += 1
        fcount[f] += 1
    if size == 1:
        if q <= cap:
            kept[0, 0] = root
            return q, 1, 1, kept[:1]
        return best, 0, 1, kept[:0]
    k = 0
    for j in range(q):
        w = nbr[root, j]
        if w >= 0 and status[w] == UNSEEN:
            status[w] = FRONTIER
            untried[1, k] = w
            k += 1
    ulen[1] = k
    plen[1] = 0
    level = 1  # number of members placed; untried[level] feeds the next one
    while level >= 1:
        if ulen[level] == 0:
            # level exhausted: popped vertices go back to the frontier
            for i in range(plen[level]):
                u = popped[level, i]
                status[u] = FRONTIER
                for j in range(q):
                    w = nbr[u, j]
                    if w >= 0 and status[w] == MEMBER:
                        closed -= 1
            plen[level] = 0
            level -= 1
            if level == 0:
                break
            # undo the member placed at this level
            v = members[level]
            for j in range(q):
                w = nbr[v, j]
                if w >= 0 and status[w] == EXCLUDED:
                    closed -= 1
            for j in range(q):
                f = vface[v, j]
                fcount[f] -= 1
            ntouched = tsave[level]
            for i in range(alen[level]):
                status[added[level, i]] = UNSEEN
            alen[level] = 0
            status[v] = EXCLUDED
            for j in range(q):
                w = nbr[v, j]
                if w >= 0 and status[w] == MEMBER:
                    closed += 1
            popped[level, plen[level]] = v
            plen[level] += 1
            continue
        ulen[level] -= 1
        v = untried[level, ulen[level]]
        e = 0
        ex = 0
        for j in range(q):
            w = nbr[v, j]
            if w >= 0:
                if status[w] == MEMBER:
                    e += 1
                elif status[w] == EXCLUDED:
                    ex += 1
        grown = perims[level] + q - 2 * e
        if level + 1 == size:
            visited += 1
            if grown <= cap:
                if grown < best:
                    best = grown
                    count = 0
                    nkept = 0
                if grown == best:
                    count += 1
                    if nkept < keep:
                        for i in range(level):
                            kept[nkept, i] = members[i]
                        kept[nkept, level] = v
                        nkept += 1
            status[v] = EXCLUDED
            for j in range(q):
                w = nbr[v, j]
                if w >= 0 and status[w] == MEMBER:
                    closed += 1
            popped[level, plen[level]] = v
            plen[level] += 1
            continue
        # tentatively add v
        status[v] = MEMBER
        members[level] = v
        closed += ex
        tsave[level] = ntouched
        for j in range(q):
            f = vface[v, j]
            if fcount[f] == 0:
                touched[ntouched] = f
                ntouched += 1
            fcount[f] += 1
        remaining = size - level - 1
        if _lower_bound(grown, closed, remaining, fcount, touched, ntouched, p) <= cap:
            nxt = level + 1
            k = ulen[level]
            for i in range(k):
                untried[nxt, i] = untried[level, i]
            a = 0
            for j in range(q):
                w = nbr[v, j]
                if w >= 0 and status[w] == UNSEEN:
                    status[w] = FRONTIER
                    untried[nxt, k] = w
                    k += 1
                    added[level, a] = w
                    a += 1
            alen[level] = a
            ulen[nxt] = k
            plen[nxt] = 0
            perims[nxt] = grown
            level = nxt
            continue
        # pruned: undo immediately
        for j in range(q):
            fcount[vface[v, j]] -= 1
        ntouched = tsave[level]
        closed -= ex
        status[v] = EXCLUDED
        for j in range(q):
            w = nbr[v, j]
            if w >= 0 and status[w] == MEMBER:
                closed += 1
        popped[level, plen[level]] = v
        plen[level] += 1
    return best, count, visited, kept[:nkept]
