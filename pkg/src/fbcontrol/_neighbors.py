"""Radius neighbour search returning CSR lists (shared by geometry/meshless)."""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree


def neighbors_csr(src_pos, query_pos, radii, min_count=0, tree=None):
    """Neighbours of each query point within per-query radius, CSR layout.

    Lists are sorted by index for determinism.  When a query yields fewer
    than ``min_count`` hits, the radius is ignored for that query and the
    ``min_count`` nearest sources are taken instead.

    Returns ``(indptr, indices, tree)``.
    """
    src_pos = np.asarray(src_pos, dtype=np.float64)
    query_pos = np.asarray(query_pos, dtype=np.float64)
    if tree is None:
        tree = cKDTree(src_pos)
    radii = np.broadcast_to(np.asarray(radii, dtype=np.float64), (query_pos.shape[0],))
    lists = tree.query_ball_point(query_pos, radii)
    counts = np.fromiter((len(l) for l in lists), dtype=np.int64, count=len(lists))
    if min_count > 0 and np.any(counts < min_count):
        k = min(min_count, src_pos.shape[0])
        short = np.where(counts < min_count)[0]
        _, knn = tree.query(query_pos[short], k=k)
        knn = np.atleast_2d(knn)
        for row, i in enumerate(short):
            lists[i] = list(knn[row])
    indptr = np.zeros(len(lists) + 1, dtype=np.int64)
    for i, l in enumerate(lists):
        l.sort()
        indptr[i + 1] = indptr[i] + len(l)
    indices = np.fromiter(
        (j for l in lists for j in l), dtype=np.int64, count=indptr[-1]
    )
    return indptr, indices, tree
