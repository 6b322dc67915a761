"""Coverage recall and kernel-distance fidelity over precomputed embeddings.

Both metrics consume EmbeddingMatrix rows; what the rows embed (full frames,
object crops) is the caller's concern. Distances are plain L2; the kernel
distance uses the degree-3 polynomial kernel with the unbiased MMD^2
estimator over repeated seeded subsets.

Accumulation note: all reductions are whole-array numpy sums over arrays
whose layout is fixed by the inputs, so every result is independent of any
worker partitioning a caller might add upstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IntegrityError
from .rng import SplitMix64, derive_seed
from .tensorio import EmbeddingMatrix

_ROW_CHUNK = 1024  # bounds the pairwise-distance working set


@dataclass(frozen=True)
class RecallParams:
    k: int = 3

    def __post_init__(self):
        if self.k < 1:
            raise IntegrityError(f"k must be >= 1, got {self.k}")


@dataclass(frozen=True)
class KidParams:
    subset_size: int
    n_subsets: int
    seed: int

    def __post_init__(self):
        if self.subset_size < 2:
            raise IntegrityError(f"subset_size must be >= 2, got {self.subset_size}")
        if self.n_subsets < 1:
            raise IntegrityError(f"n_subsets must be >= 1, got {self.n_subsets}")


def _sq_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact-zero-preserving squared L2 distances, |a| x |b|.

    Computed from per-pair differences (not the expanded dot-product form),
    so identical rows give exactly 0.0 and results never go negative.
    """
    diff = a[:, None, :].astype(np.float64) - b[None, :, :].astype(np.float64)
    return np.einsum("ijk,ijk->ij", diff, diff)


def _knn_radii_sq(d: EmbeddingMatrix, k: int) -> np.ndarray:
    """Squared distance from each row to its k-th nearest *other* row."""
    n = d.count
    if n < k + 1:
        raise IntegrityError(f"need at least {k + 1} rows for k={k}, got {n}")
    rows = d.rows
    radii_sq = np.empty(n, dtype=np.float64)
    for start in range(0, n, _ROW_CHUNK):
        stop = min(start + _ROW_CHUNK, n)
        sq = _sq_distances(rows[start:stop], rows)
        for i in range(start, stop):
            sq[i - start, i] = np.inf  # exclude self
        # k-th smallest of the remaining n-1 squared distances
        radii_sq[start:stop] = np.partition(sq, k - 1, axis=1)[:, k - 1]
    return radii_sq


def knn_radii(d: EmbeddingMatrix, k: int) -> np.ndarray:
    """Distance from each row to its k-th nearest *other* row."""
    return np.sqrt(_knn_radii_sq(d, k))


def recall(u: EmbeddingMatrix, d: EmbeddingMatrix, p: RecallParams = RecallParams()) -> float:
    """Fraction of u's rows within the k-NN radius ball of some row of d.

    A row I of u is covered when d(I, I') <= radius(I') for at least one row
    I' of d (inclusive comparison); the radius is I''s distance to its k-th
    nearest other row within d. The comparison happens on squared distances
    (monotone-equivalent), avoiding a lossy sqrt round-trip at exact ties.
    """
    if u.dim != d.dim:
        raise IntegrityError(f"dimension mismatch: u is {u.dim}-d, d is {d.dim}-d")
    radii_sq = _knn_radii_sq(d, p.k)
    covered = 0
    for start in range(0, u.count, _ROW_CHUNK):
        stop = min(start + _ROW_CHUNK, u.count)
        sq = _sq_distances(u.rows[start:stop], d.rows)
        covered += int((sq <= radii_sq[None, :]).any(axis=1).sum())
    return covered / u.count


def _poly_kernel(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    dim = a.shape[1]
    return (a.astype(np.float64) @ b.astype(np.float64).T / dim + 1.0) ** 3


def _mmd2_unbiased(x: np.ndarray, y: np.ndarray) -> float:
    """Unbiased MMD^2: off-diagonal self terms plus the full cross term."""
    m, n = len(x), len(y)
    kxx = _poly_kernel(x, x)
    kyy = _poly_kernel(y, y)
    kxy = _poly_kernel(x, y)
    sum_xx = float(kxx.sum() - np.trace(kxx))
    sum_yy = float(kyy.sum() - np.trace(kyy))
    return (
        sum_xx / (m * (m - 1))
        + sum_yy / (n * (n - 1))
        - 2.0 * float(kxy.sum()) / (m * n)
    )


def kid_subset_indices(p: KidParams, x_count: int, y_count: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """The seeded without-replacement index draws kid() will evaluate.

    Each subset uses an independent stream derived from (seed, subset number),
    so changing n_subsets never disturbs earlier draws.
    """
    if x_count < p.subset_size or y_count < p.subset_size:
        raise IntegrityError(
            f"subset_size {p.subset_size} exceeds a set size ({x_count}, {y_count})"
        )
    draws = []
    for s in range(p.n_subsets):
        rng = SplitMix64(derive_seed(p.seed, s))
        ix = np.array(rng.sample_indices(x_count, p.subset_size), dtype=np.intp)
        iy = np.array(rng.sample_indices(y_count, p.subset_size), dtype=np.intp)
        draws.append((ix, iy))
    return draws


def kid(
    x: EmbeddingMatrix,
    y: EmbeddingMatrix,
    p: KidParams,
    draws: list[tuple[np.ndarray, np.ndarray]] | None = None,
) -> tuple[float, float]:
    """Mean and population std of unbiased MMD^2 over seeded subset pairs.

    The estimator is unbiased and may legitimately go negative; values are
    returned unclamped. Pass explicit draws to pin the subsets (testing).
    """
    if x.dim != y.dim:
        raise IntegrityError(f"dimension mismatch: x is {x.dim}-d, y is {y.dim}-d")
    if draws is None:
        draws = kid_subset_indices(p, x.count, y.count)
    values = [
        _mmd2_unbiased(x.rows[ix], y.rows[iy]) for ix, iy in draws
    ]
    mean = sum(values) / len(values)
    var = sum((v - mean) ** 2 for v in values) / len(values)
    return mean, var**0.5


def coverage_report(
    u: EmbeddingMatrix,
    d: EmbeddingMatrix,
    recall_params: RecallParams,
    kid_params: KidParams,
) -> dict:
    """JSON-ready combined report: {recall, kid_mean, kid_std, params}."""
    kid_mean, kid_std = kid(u, d, kid_params)
    return {
        "recall": recall(u, d, recall_params),
        "kid_mean": kid_mean,
        "kid_std": kid_std,
        "params": {
            "k": recall_params.k,
            "subset_size": kid_params.subset_size,
            "n_subsets": kid_params.n_subsets,
            "seed": kid_params.seed,
        },
    }
