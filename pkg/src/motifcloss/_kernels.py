"""Compiled inner loops: edge swapping and connected-subgraph enumeration.

Everything here works on plain integer/boolean arrays; the public modules
wrap these with graph objects. Random numbers are always drawn by the caller
so that a numpy Generator fully determines the result.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def swap_edges(adj, single, mutual, kinds, picks):
    """Attempt one swap per row of ``picks``; mutates adj/single/mutual in place.

    ``kinds[i]`` selects the mutual-pair group, ``picks[i]`` holds three
    uniforms: two edge choices and an orientation flip for mutual pairs.
    Returns the number of accepted swaps.
    """
    ns = single.shape[0]
    nm = mutual.shape[0]
    accepted = 0
    for it in range(kinds.shape[0]):
        if kinds[it]:
            if nm < 2:
                continue
            i = int(picks[it, 0] * nm)
            j = int(picks[it, 1] * nm)
            if i == j:
                continue
            a, b = mutual[i, 0], mutual[i, 1]
            if picks[it, 2] < 0.5:
                c, d = mutual[j, 0], mutual[j, 1]
            else:
                c, d = mutual[j, 1], mutual[j, 0]
            if a == c or a == d or b == c or b == d:
                continue
            # a<->b, c<->d  becomes  a<->d, c<->b
            if adj[a, d] or adj[d, a] or adj[c, b] or adj[b, c]:
                continue
            adj[a, b] = False
            adj[b, a] = False
            adj[c, d] = False
            adj[d, c] = False
            adj[a, d] = True
            adj[d, a] = True
            adj[c, b] = True
            adj[b, c] = True
            mutual[i, 0], mutual[i, 1] = a, d
            mutual[j, 0], mutual[j, 1] = c, b
            accepted += 1
        else:
            if ns < 2:
                continue
            i = int(picks[it, 0] * ns)
            j = int(picks[it, 1] * ns)
            if i == j:
                continue
            a, b = single[i, 0], single[i, 1]
            c, d = single[j, 0], single[j, 1]
            # a->b, c->d  becomes  a->d, c->b
            if a == d or c == b or a == c or b == d:
                continue
            if adj[a, d] or adj[c, b]:
                continue
            # new edges must stay unreciprocated
            if adj[d, a] or adj[b, c]:
                continue
            adj[a, b] = False
            adj[c, d] = False
            adj[a, d] = True
            adj[c, b] = True
            single[i, 1] = d
            single[j, 1] = b
            accepted += 1
    return accepted


@njit(cache=True, nogil=True)
def _mask_of(adj, nodes, k):
    mask = 0
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            if adj[nodes[i], nodes[j]]:
                pos = i * (k - 1) + (j if j < i else j - 1)
                mask |= 1 << pos
    return mask


@njit(cache=True, nogil=True)
def _esu(indptr, indices, und, adj, k, lut, counts, occ, occ_fill, cap, record):
    """ESU enumeration of connected k-subsets (k in {3, 4}).

    Each connected node subset is visited exactly once: the root is its
    smallest node and extensions only add exclusive neighbours larger than
    the root. With ``record`` set, subsets are written to ``occ`` (class
    index in the last column) until a class reaches ``cap`` entries.
    """
    n = indptr.shape[0] - 1
    ext1 = np.empty(2 * n + 4, np.int64)
    ext2 = np.empty(3 * n + 4, np.int64)
    nodes = np.empty(4, np.int64)
    row = 0
    for v in range(n):
        e0 = indices[indptr[v]:indptr[v + 1]]
        nodes[0] = v
        for i in range(e0.shape[0]):
            w = e0[i]
            if w <= v:
                continue
            nodes[1] = w
            c1 = 0
            for jj in range(i + 1, e0.shape[0]):
                if e0[jj] > v:
                    ext1[c1] = e0[jj]
                    c1 += 1
            for p in range(indptr[w], indptr[w + 1]):
                u = indices[p]
                if u > v and not und[u, v]:
                    ext1[c1] = u
                    c1 += 1
            for j in range(c1):
                x = ext1[j]
                nodes[2] = x
                if k == 3:
                    cls = lut[_mask_of(adj, nodes, 3)]
                    if record:
                        if occ_fill[cls] < cap:
                            occ[row, 0] = v
                            occ[row, 1] = w
                            occ[row, 2] = x
                            occ[row, 3] = cls
                            occ_fill[cls] += 1
                            row += 1
                    else:
                        counts[cls] += 1
                    continue
                c2 = 0
                for l in range(j + 1, c1):
                    ext2[c2] = ext1[l]
                    c2 += 1
                for p in range(indptr[x], indptr[x + 1]):
                    u = indices[p]
                    if u > v and u != w and not und[u, v] and not und[u, w]:
                        ext2[c2] = u
                        c2 += 1
                for l in range(c2):
                    nodes[3] = ext2[l]
                    cls = lut[_mask_of(adj, nodes, 4)]
                    if record:
                        if occ_fill[cls] < cap:
                            occ[row, 0] = v
                            occ[row, 1] = w
                            occ[row, 2] = x
                            occ[row, 3] = ext2[l]
                            occ[row, 4] = cls
                            occ_fill[cls] += 1
                            row += 1
                    else:
                        counts[cls] += 1
    return row


def undirected_csr(adj: np.ndarray):
    """Sorted undirected neighbour lists of a boolean adjacency matrix."""
    und = adj | adj.T
    indptr = np.zeros(adj.shape[0] + 1, dtype=np.int64)
    indptr[1:] = np.cumsum(und.sum(axis=1))
    indices = np.nonzero(und)[1].astype(np.int64)
    return indptr, indices, und


def count_subgraphs(adj: np.ndarray, k: int, lut: np.ndarray, n_classes: int) -> np.ndarray:
    indptr, indices, und = undirected_csr(adj)
    counts = np.zeros(n_classes, dtype=np.int64)
    dummy = np.zeros((0, k + 1), dtype=np.int64)
    _esu(indptr, indices, und, adj, k, lut, counts, dummy,
         np.zeros(n_classes, dtype=np.int64), 0, False)
    return counts


def enumerate_subgraphs(adj: np.ndarray, k: int, lut: np.ndarray, n_classes: int, cap: int):
    """Return (counts, occurrences) where occurrences rows are node indices + class index."""
    indptr, indices, und = undirected_csr(adj)
    counts = np.zeros(n_classes, dtype=np.int64)
    dummy = np.zeros((0, k + 1), dtype=np.int64)
    _esu(indptr, indices, und, adj, k, lut, counts, dummy,
         np.zeros(n_classes, dtype=np.int64), 0, False)
    total = int(np.minimum(counts, cap).sum())
    occ = np.empty((total, k + 1), dtype=np.int64)
    fill = np.zeros(n_classes, dtype=np.int64)
    _esu(indptr, indices, und, adj, k, lut, counts, occ, fill, cap, True)
    return counts, occ
