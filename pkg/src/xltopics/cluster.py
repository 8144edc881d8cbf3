"""Seeded K-means over refined embeddings, plus partition-agreement metrics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin

from .validation import as_float_matrix, check_bilingual_labels

KMEANS_MAX_ITER = 300
KMEANS_REL_TOL = 1e-4


@dataclass
class ClusterAssignment:
    """Result of one K-means run.

    ``inertia_history`` records the cost after every Lloyd iteration so the
    non-increase guarantee is checkable; ``initial_centroids`` lets a run be
    replayed from the same starting set.
    """

    labels: np.ndarray
    n_clusters: int
    centroids: np.ndarray
    inertia: float
    iterations_run: int
    seed: int
    initial_centroids: np.ndarray = field(repr=False, default=None)
    inertia_history: tuple[float, ...] = field(repr=False, default=())

    def to_json_dict(self) -> dict:
        return {
            "K": self.n_clusters,
            "seed": self.seed,
            "labels": self.labels.astype(int).tolist(),
            "inertia": self.inertia,
            "iterations_run": self.iterations_run,
        }


def _squared_distances(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    d2 = (
        (X * X).sum(axis=1)[:, None]
        - 2.0 * (X @ C.T)
        + (C * C).sum(axis=1)[None, :]
    )
    np.maximum(d2, 0.0, out=d2)
    return d2


def _kmeans_pp_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Seeded greedy k-means++.

    Each step draws 2 + floor(ln k) candidates by D^2 sampling (cumulative
    sum in row order) and keeps the one that lowers the total potential the
    most; ties go to the earlier draw.  Greedy selection avoids most of the
    two-centers-in-one-blob inits a single draw produces.
    """
    m = X.shape[0]
    n_candidates = 2 + int(np.log(k)) if k > 1 else 1
    chosen = [int(rng.integers(m))]
    d2 = ((X - X[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = float(d2.sum())
        if total <= 0.0:
            # Remaining points coincide with chosen centers; take the lowest
            # unchosen row so K distinct centroid slots still get filled.
            taken = set(chosen)
            nxt = next(i for i in range(m) if i not in taken)
            chosen.append(nxt)
            d2 = np.minimum(d2, ((X - X[nxt]) ** 2).sum(axis=1))
            continue
        cum = np.cumsum(d2)
        draws = rng.random(n_candidates) * total
        candidates = np.minimum(
            np.searchsorted(cum, draws, side="right"), m - 1
        )
        best = None
        best_d2 = None
        best_potential = np.inf
        for cand in candidates:
            trial = np.minimum(d2, ((X - X[int(cand)]) ** 2).sum(axis=1))
            potential = float(trial.sum())
            if potential < best_potential:
                best, best_d2, best_potential = int(cand), trial, potential
        chosen.append(best)
        d2 = best_d2
    return np.asarray(chosen, dtype=int)


def kmeans_fit(
    X,
    n_clusters: int,
    seed: int,
    max_iter: int = KMEANS_MAX_ITER,
    rel_tol: float = KMEANS_REL_TOL,
    init_centroids: np.ndarray | None = None,
) -> ClusterAssignment:
    """Lloyd's algorithm with seeded k-means++ initialization.

    Stops when the relative inertia improvement drops below ``rel_tol`` or
    after ``max_iter`` iterations.  Clusters emptied by an assignment step
    are repaired by moving the point currently farthest from its own
    centroid (only from clusters that keep at least one point), so every
    cluster in the result is non-empty.  Deterministic given
    ``(X, n_clusters, seed)``.
    """
    X = as_float_matrix(X)
    m = X.shape[0]
    if n_clusters < 1:
        raise ValueError(f"n_clusters must be >= 1, got {n_clusters}")
    if n_clusters > m:
        raise ValueError(f"n_clusters={n_clusters} exceeds number of points m={m}")

    rng = np.random.default_rng(seed)
    if init_centroids is None:
        centroids = X[_kmeans_pp_init(X, n_clusters, rng)].copy()
    else:
        centroids = np.array(init_centroids, dtype=np.float64, copy=True)
        if centroids.shape != (n_clusters, X.shape[1]):
            raise ValueError(
                f"init_centroids shape {centroids.shape} != ({n_clusters}, {X.shape[1]})"
            )
    initial_centroids = centroids.copy()

    labels = np.zeros(m, dtype=int)
    history: list[float] = []
    prev_inertia = np.inf
    iterations = 0
    for iterations in range(1, max_iter + 1):
        d2 = _squared_distances(X, centroids)
        labels = d2.argmin(axis=1)
        point_d2 = d2[np.arange(m), labels]

        counts = np.bincount(labels, minlength=n_clusters)
        for k in np.flatnonzero(counts == 0):
            movable = counts[labels] > 1
            far = int(np.flatnonzero(movable)[point_d2[movable].argmax()])
            counts[labels[far]] -= 1
            labels[far] = k
            counts[k] = 1
            point_d2[far] = 0.0

        for k in range(n_clusters):
            centroids[k] = X[labels == k].mean(axis=0)

        inertia = float(((X - centroids[labels]) ** 2).sum())
        history.append(inertia)
        if np.isfinite(prev_inertia) and prev_inertia - inertia <= rel_tol * prev_inertia:
            break
        prev_inertia = inertia

    return ClusterAssignment(
        labels=labels,
        n_clusters=n_clusters,
        centroids=centroids,
        inertia=history[-1],
        iterations_run=iterations,
        seed=seed,
        initial_centroids=initial_centroids,
        inertia_history=tuple(history),
    )


def adjusted_rand_index(labels_a: Sequence[int], labels_b: Sequence[int]) -> float:
    """Chance-corrected agreement between two partitions, in [-1, 1].

    Computed from the pair-counting contingency table; 1.0 for identical
    partitions up to relabeling.  Both trivial-partition edge cases (single
    cluster or all singletons on both sides) return 1.0.
    """
    a = np.asarray(labels_a)
    b = np.asarray(labels_b)
    if a.shape != b.shape:
        raise ValueError(f"label length mismatch: {a.shape} vs {b.shape}")
    n = a.size
    if n < 2:
        raise ValueError("need at least 2 points")

    _, a_idx = np.unique(a, return_inverse=True)
    _, b_idx = np.unique(b, return_inverse=True)
    n_a = a_idx.max() + 1
    n_b = b_idx.max() + 1
    table = np.zeros((n_a, n_b), dtype=np.int64)
    np.add.at(table, (a_idx, b_idx), 1)

    def comb2(x):
        return x * (x - 1) // 2

    sum_ij = comb2(table).sum()
    sum_a = comb2(table.sum(axis=1)).sum()
    sum_b = comb2(table.sum(axis=0)).sum()
    total = comb2(n)
    expected = sum_a * sum_b / total
    max_index = (sum_a + sum_b) / 2.0
    if max_index == expected:
        return 1.0
    return float((sum_ij - expected) / (max_index - expected))


def cluster_language_balance(
    assignment: ClusterAssignment, labels: Sequence[str]
) -> np.ndarray:
    """Normalized language entropy per cluster: 0 monolingual, 1 balanced."""
    arr, (l1, l2) = check_bilingual_labels(labels, assignment.labels.size)
    entropies = np.empty(assignment.n_clusters, dtype=np.float64)
    for k in range(assignment.n_clusters):
        mask = assignment.labels == k
        size = int(mask.sum())
        if size == 0:
            raise ValueError(f"cluster {k} is empty")
        p1 = float((arr[mask] == l1).sum()) / size
        h = 0.0
        for p in (p1, 1.0 - p1):
            if p > 0.0:
                h -= p * np.log(p)
        entropies[k] = h / np.log(2.0)
    return entropies


class SeededKMeans(BaseEstimator, ClusterMixin):
    """Sklearn-style estimator wrapping :func:`kmeans_fit`.

    Attributes set by fit: ``labels_``, ``cluster_centers_``, ``inertia_``,
    ``n_iter_``.
    """

    def __init__(self, n_clusters: int = 50, seed: int = 0):
        self.n_clusters = n_clusters
        self.seed = seed

    def fit(self, X, y=None):
        result = kmeans_fit(X, self.n_clusters, self.seed)
        self.assignment_ = result
        self.labels_ = result.labels
        self.cluster_centers_ = result.centroids
        self.inertia_ = result.inertia
        self.n_iter_ = result.iterations_run
        return self

    def predict(self, X):
        if not hasattr(self, "cluster_centers_"):
            raise ValueError("SeededKMeans is not fitted yet")
        X = as_float_matrix(X)
        return _squared_distances(X, self.cluster_centers_).argmin(axis=1)
