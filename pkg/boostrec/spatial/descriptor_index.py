#!/usr/bin/python3

from concurrent.futures import ThreadPoolExecutor
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

from boostrec.exceptions import DimensionMismatch, EmptyIndex

Provenance = Tuple[str, str, int]

# rows of a query chunk matched in one matrix product
CHUNK_SIZE = 256


class DescriptorIndex:

    """Exact Euclidean nearest-neighbour search over a matrix of descriptors.

    Each row carries a (model id, view id, keypoint id) provenance. Rows are kept
    sorted by provenance so the lowest row index on a distance tie is also the
    lexicographically smallest provenance."""

    def __init__(self, vectors: Any, provenance: Sequence[Provenance]) -> None:
        matrix = np.asarray(vectors, dtype=np.float64)
        if matrix.ndim != 2:
            raise DimensionMismatch(f"Expected a 2-D descriptor matrix, got shape {matrix.shape}")
        if len(provenance) != len(matrix):
            raise ValueError(f"{len(matrix)} descriptors but {len(provenance)} provenance entries")
        order = sorted(range(len(matrix)), key=lambda i: _as_prov(provenance[i]))
        self.provenance: List[Provenance] = [_as_prov(provenance[i]) for i in order]
        self.vectors = np.ascontiguousarray(matrix[order])
        self.vectors.flags.writeable = False
        self._sq_norms = np.einsum("ij,ij->i", self.vectors, self.vectors)

    def __len__(self) -> int:
        return len(self.vectors)

    def __repr__(self) -> str:
        return f"<DescriptorIndex {len(self)}x{self.dim}>"

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def _check(self, queries: np.ndarray) -> np.ndarray:
        if not len(self):
            raise EmptyIndex("Descriptor index holds no rows")
        queries = np.asarray(queries, dtype=np.float64)
        if queries.shape[-1] != self.dim:
            raise DimensionMismatch(
                f"Query has dimension {queries.shape[-1]}, index has dimension {self.dim}"
            )
        return queries

    def nearest_rows(self, queries: Any, workers: int = 1) -> Tuple[np.ndarray, np.ndarray]:
        """Row index and exact distance of the nearest row for each query."""
        queries = self._check(queries).reshape(-1, self.dim)
        rows = np.empty(len(queries), dtype=np.int64)
        dist = np.empty(len(queries), dtype=np.float64)
        chunks = [slice(i, i + CHUNK_SIZE) for i in range(0, len(queries), CHUNK_SIZE)]

        def _run(chunk: slice) -> None:
            rows[chunk], dist[chunk] = self._nearest_chunk(queries[chunk])

        if workers > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                list(executor.map(_run, chunks))
        else:
            for chunk in chunks:
                _run(chunk)
        return rows, dist

    def _nearest_chunk(self, queries: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        q_norms = np.einsum("ij,ij->i", queries, queries)
        approx = q_norms[:, None] - 2 * queries @ self.vectors.T + self._sq_norms[None, :]
        best = approx.min(axis=1)
        # slack covers the rounding of the expanded form
        slack = 1e-9 * (q_norms + self._sq_norms.max()) + 1e-12
        rows = np.empty(len(queries), dtype=np.int64)
        dist = np.empty(len(queries), dtype=np.float64)
        for i, query in enumerate(queries):
            candidates = np.flatnonzero(approx[i] <= best[i] + slack[i])
            exact = np.linalg.norm(self.vectors[candidates] - query, axis=1)
            pick = int(np.argmin(exact))
            rows[i] = candidates[pick]
            dist[i] = exact[pick]
        return rows, dist

    def nearest(self, query: Any) -> Tuple[Provenance, float]:
        query = self._check(query)
        if query.ndim != 1:
            raise DimensionMismatch("nearest() expects a single descriptor, use nearest_many()")
        rows, dist = self.nearest_rows(query[None, :])
        return self.provenance[rows[0]], float(dist[0])

    def nearest_many(
        self, queries: Any, workers: int = 1
    ) -> List[Tuple[Provenance, float]]:
        rows, dist = self.nearest_rows(queries, workers)
        return [(self.provenance[r], float(d)) for r, d in zip(rows, dist)]


def _as_prov(value: Sequence) -> Provenance:
    model, view, keypoint = value
    return (str(model), str(view), int(keypoint))


def build_descriptor_index(
    vectors: Any, provenance: Sequence[Provenance], dim: Optional[int] = None
) -> DescriptorIndex:
    """Builds an index, optionally asserting the descriptor length."""
    index = DescriptorIndex(vectors, provenance)
    if dim is not None and len(index) and index.dim != dim:
        raise DimensionMismatch(f"Descriptors have length {index.dim}, expected {dim}")
    return index


def nearest_descriptor(index: DescriptorIndex, query: Any) -> Tuple[Provenance, float]:
    return index.nearest(query)
