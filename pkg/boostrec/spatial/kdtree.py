#!/usr/bin/python3

from typing import List, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from boostrec.cloud.datatypes import PointCloud, XyzLike, as_xyz
from boostrec.exceptions import EmptyCloudError

Neighbors = List[Tuple[int, float]]


class KdTree3:

    """Exact nearest-neighbour and radius queries over the valid points of a cloud.

    Returned indices refer to the source cloud. Results are sorted by ascending
    distance, ties by ascending index."""

    def __init__(self, cloud: PointCloud) -> None:
        indices = cloud.valid_indices
        if not len(indices):
            raise EmptyCloudError("Cannot build a tree over a cloud without valid points")
        self.cloud = cloud
        self.indices = indices
        self.points = np.ascontiguousarray(cloud.xyz[indices])
        self._tree = cKDTree(self.points, balanced_tree=True, compact_nodes=True)

    def __len__(self) -> int:
        return len(self.indices)

    def __repr__(self) -> str:
        return f"<KdTree3 {len(self)} points>"

    def _sorted(self, local: np.ndarray, query: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        # distances are recomputed so equal points give bitwise equal keys
        local = np.asarray(local, dtype=np.int64)
        dist = np.linalg.norm(self.points[local] - query, axis=1)
        order = np.lexsort((self.indices[local], dist))
        return self.indices[local][order], dist[order]

    def radius_indices(self, query: XyzLike, r: float) -> Tuple[np.ndarray, np.ndarray]:
        """Array form of ``radius_search``: (indices, distances)."""
        if r <= 0:
            raise ValueError(f"radius must be positive, got {r}")
        q = as_xyz(query)
        local = self._tree.query_ball_point(q, r)
        index, dist = self._sorted(local, q)
        # query_ball_point uses a slightly inflated bound
        keep = dist <= r
        return index[keep], dist[keep]

    def radius_search(self, query: XyzLike, r: float) -> Neighbors:
        index, dist = self.radius_indices(query, r)
        return list(zip(index.tolist(), dist.tolist()))

    def knn_indices(self, query: XyzLike, k: int) -> Tuple[np.ndarray, np.ndarray]:
        """Array form of ``knn``: (indices, distances)."""
        if k < 1:
            raise ValueError(f"k must be at least 1, got {k}")
        q = as_xyz(query)
        k = min(k, len(self))
        # over-fetch so that ties at the k-th distance are resolved by index
        fetch = min(len(self), k + 8)
        while True:
            dist, local = self._tree.query(q, k=fetch)
            local = np.atleast_1d(local)
            index, dist = self._sorted(local, q)
            if fetch == len(self) or dist[-1] > dist[k - 1]:
                return index[:k], dist[:k]
            fetch = min(len(self), fetch * 2)

    def knn(self, query: XyzLike, k: int) -> Neighbors:
        index, dist = self.knn_indices(query, k)
        return list(zip(index.tolist(), dist.tolist()))

    def knn_many(self, queries: np.ndarray, k: int) -> np.ndarray:
        """Indices of the k nearest points for many queries, shape (m, min(k, len))."""
        if k < 1:
            raise ValueError(f"k must be at least 1, got {k}")
        queries = np.asarray(queries, dtype=np.float64).reshape(-1, 3)
        k = min(k, len(self))
        if not len(queries):
            return np.empty((0, k), dtype=np.int64)
        fetch = min(len(self), k + 8)
        _, local = self._tree.query(queries, k=fetch)
        local = np.asarray(local, dtype=np.int64).reshape(len(queries), fetch)
        dist = np.linalg.norm(self.points[local] - queries[:, None, :], axis=2)
        order = np.lexsort((self.indices[local], dist), axis=-1)
        index = np.take_along_axis(self.indices[local], order, axis=1)
        dist = np.take_along_axis(dist, order, axis=1)
        result = index[:, :k].copy()
        if fetch < len(self):
            for row in np.flatnonzero(dist[:, -1] <= dist[:, k - 1]):
                result[row] = self.knn_indices(queries[row], k)[0]
        return result

    def radius_many(self, queries: np.ndarray, r: float) -> List[np.ndarray]:
        """Index arrays of the points within ``r`` of each query, sorted as ``radius_search``."""
        if r <= 0:
            raise ValueError(f"radius must be positive, got {r}")
        queries = np.asarray(queries, dtype=np.float64).reshape(-1, 3)
        if not len(queries):
            return []
        local = [np.asarray(i, dtype=np.int64) for i in self._tree.query_ball_point(queries, r)]
        offsets, flat = gather(local)
        owner = np.repeat(np.arange(len(queries)), np.diff(offsets))
        dist = np.linalg.norm(self.points[flat] - queries[owner], axis=1)
        order = np.lexsort((self.indices[flat], dist, owner))
        index, dist, owner = self.indices[flat][order], dist[order], owner[order]
        keep = dist <= r
        counts = np.bincount(owner[keep], minlength=len(queries))
        return np.split(index[keep], np.cumsum(counts)[:-1])

    def count_within(self, queries: np.ndarray, r: float) -> np.ndarray:
        """Number of indexed points within ``r`` of each query."""
        queries = np.asarray(queries, dtype=np.float64).reshape(-1, 3)
        return np.array([len(i) for i in self.radius_many(queries, r)], dtype=np.int64)


def build_tree(cloud: PointCloud) -> KdTree3:
    return KdTree3(cloud)


def radius_search(tree: KdTree3, query: XyzLike, r: float) -> Neighbors:
    return tree.radius_search(query, r)


def knn(tree: KdTree3, query: XyzLike, k: int) -> Neighbors:
    return tree.knn(query, k)


def gather(neighborhoods: Sequence[np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    """Flattens a list of neighbour arrays into CSR form (offsets, indices)."""
    sizes = np.array([len(i) for i in neighborhoods], dtype=np.int64)
    offsets = np.zeros(len(sizes) + 1, dtype=np.int64)
    np.cumsum(sizes, out=offsets[1:])
    flat = np.concatenate(neighborhoods) if len(neighborhoods) else np.empty(0, np.int64)
    return offsets, flat.astype(np.int64)
