"""Generation-evaluation metrics over embedding vectors.

All metrics operate on plain (N, D) embedding matrices; the encoders that
produce the embeddings are external inputs. A mean-pooling clip embedder
is provided for feature sequences so clip-level distances can run without
any trained network.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


class MetricsError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GaussianStats:
    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64)
        cov = np.asarray(self.covariance, dtype=np.float64)
        if cov.shape != (mean.shape[0], mean.shape[0]):
            raise MetricsError("covariance shape must match the mean dimension")
        if np.abs(cov - cov.T).max() > 1e-9:
            raise MetricsError("covariance must be symmetric")
        if np.linalg.eigvalsh(cov).min() < -1e-8:
            raise MetricsError("covariance must be positive semi-definite")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)

    @property
    def dim(self):
        return self.mean.shape[0]


def as_embedding_matrix(vectors):
    matrix = np.asarray(vectors, dtype=np.float64)
    if matrix.ndim != 2:
        raise MetricsError("embeddings must form an (N, D) matrix")
    return matrix


def gaussian_fit(vectors) -> GaussianStats:
    """Sample mean and unbiased sample covariance of an embedding set."""
    matrix = as_embedding_matrix(vectors)
    if matrix.shape[0] < 2:
        raise MetricsError("need at least 2 vectors to fit a Gaussian")
    mean = matrix.mean(axis=0)
    centered = matrix - mean
    cov = centered.T @ centered / (matrix.shape[0] - 1)
    cov = 0.5 * (cov + cov.T)
    return GaussianStats(mean, cov)


def _psd_sqrt(matrix):
    values, vectors = np.linalg.eigh(matrix)
    values = np.clip(values, 0.0, None)
    return (vectors * np.sqrt(values)) @ vectors.T


def frechet_distance(a: GaussianStats, b: GaussianStats) -> float:
    """||mu_a - mu_b||^2 + Tr(S_a + S_b - 2 (S_a S_b)^(1/2)).

    The cross term uses the symmetrized product sqrt(S_a)^T S_b sqrt(S_a)
    with negative eigenvalues clipped, and the result is clipped at zero.
    """
    if a.dim != b.dim:
        raise MetricsError(f"dimension mismatch: {a.dim} vs {b.dim}")
    diff = a.mean - b.mean
    root_a = _psd_sqrt(a.covariance)
    inner = root_a @ b.covariance @ root_a
    inner = 0.5 * (inner + inner.T)
    cross = np.sqrt(np.clip(np.linalg.eigvalsh(inner), 0.0, None)).sum()
    value = float(diff @ diff + np.trace(a.covariance) + np.trace(b.covariance) - 2.0 * cross)
    return max(value, 0.0)


# ---------------------------------------------------------------------------
# Clip-level distance
# ---------------------------------------------------------------------------

EVAL_CLIP_LEN = 40
EVAL_CLIP_STRIDE = 10


def extract_eval_clips(features, clip_len=EVAL_CLIP_LEN, stride=EVAL_CLIP_STRIDE):
    """Overlapping clips starting at 0, stride, 2*stride, ... while they fit.

    Accepts a FeatureSequence or a raw (T, D) array; inputs shorter than
    clip_len yield no clips.
    """
    if clip_len <= 0 or stride <= 0:
        raise MetricsError("clip_len and stride must be positive")
    data = getattr(features, "data", features)
    data = np.asarray(data, dtype=np.float64)
    return [data[s : s + clip_len] for s in range(0, data.shape[0] - clip_len + 1, stride)]


def mean_pool_embedder(clip):
    """Training-free clip embedding: per-channel mean over frames."""
    return np.asarray(clip, dtype=np.float64).mean(axis=0)


def fid_clips(generated, reference, embed=mean_pool_embedder,
              clip_len=EVAL_CLIP_LEN, stride=EVAL_CLIP_STRIDE) -> float:
    """Frechet distance between embedded clip pools of two sequence sets."""
    pools = []
    for name, sequences in (("generated", generated), ("reference", reference)):
        clips = [c for seq in sequences for c in extract_eval_clips(seq, clip_len, stride)]
        if len(clips) < 2:
            raise MetricsError(f"{name} pool yields {len(clips)} clips; need at least 2")
        pools.append(np.stack([embed(c) for c in clips]))
    return frechet_distance(gaussian_fit(pools[0]), gaussian_fit(pools[1]))


# ---------------------------------------------------------------------------
# Retrieval metrics
# ---------------------------------------------------------------------------


def r_precision(text_embs, motion_embs, pool_size=32, seed=0):
    """Top-1/2/3 retrieval accuracy in pools of one match plus mismatches.

    For each pair, the matched motion competes against pool_size - 1
    seeded distinct mismatches, ranked by Euclidean distance to the text
    embedding; distance ties are broken by a seeded random ordering.
    """
    texts = as_embedding_matrix(text_embs)
    motions = as_embedding_matrix(motion_embs)
    if texts.shape != motions.shape:
        raise MetricsError("text and motion embeddings must pair up")
    n = texts.shape[0]
    if n < pool_size:
        raise MetricsError(f"need at least pool_size={pool_size} pairs, got {n}")
    rng = np.random.default_rng(seed)
    hits = np.zeros(3)
    others = np.empty(n - 1, dtype=np.int64)
    for i in range(n):
        others[:i] = np.arange(i)
        others[i:] = np.arange(i + 1, n)
        mismatches = rng.choice(others, size=pool_size - 1, replace=False)
        pool = np.concatenate([[i], mismatches])
        distances = np.linalg.norm(motions[pool] - texts[i], axis=1)
        tiebreak = rng.permutation(pool_size)
        order = np.lexsort((tiebreak, distances))
        rank = int(np.nonzero(order == 0)[0][0])
        for k in range(3):
            hits[k] += rank <= k
    top1, top2, top3 = hits / n
    return float(top1), float(top2), float(top3)


def mm_dist(text_embs, motion_embs) -> float:
    """Mean Euclidean distance over matched text/motion pairs."""
    texts = as_embedding_matrix(text_embs)
    motions = as_embedding_matrix(motion_embs)
    if texts.shape != motions.shape:
        raise MetricsError("text and motion embeddings must pair up")
    return float(np.linalg.norm(texts - motions, axis=1).mean())


def diversity(vectors, n_pairs=300, seed=0, with_replacement=False) -> float:
    """Mean distance over seeded random pairs of distinct set elements.

    Without replacement 2 * n_pairs distinct rows are drawn and paired
    off; with replacement each side of every pair is an independent draw.
    """
    matrix = as_embedding_matrix(vectors)
    n = matrix.shape[0]
    rng = np.random.default_rng(seed)
    if with_replacement:
        first = rng.integers(0, n, size=n_pairs)
        second = rng.integers(0, n, size=n_pairs)
    else:
        if n < 2 * n_pairs:
            raise MetricsError(
                f"need at least {2 * n_pairs} vectors for {n_pairs} disjoint pairs"
            )
        chosen = rng.choice(n, size=2 * n_pairs, replace=False)
        first, second = chosen[:n_pairs], chosen[n_pairs:]
    return float(np.linalg.norm(matrix[first] - matrix[second], axis=1).mean())


def multimodality(groups, n_pairs=100, seed=0) -> float:
    """Mean over groups of mean pairwise distance within the group.

    Each group holds repeated generations for one text; n_pairs ordered
    index pairs (i != j) are sampled per group.
    """
    if not groups:
        raise MetricsError("need at least one group")
    rng = np.random.default_rng(seed)
    means = []
    for g, group in enumerate(groups):
        matrix = as_embedding_matrix(group)
        m = matrix.shape[0]
        if m < 2:
            raise MetricsError(f"group {g} has {m} generations; need at least 2")
        first = rng.integers(0, m, size=n_pairs)
        offset = rng.integers(1, m, size=n_pairs)
        second = (first + offset) % m
        means.append(np.linalg.norm(matrix[first] - matrix[second], axis=1).mean())
    return float(np.mean(means))


# ---------------------------------------------------------------------------
# Repeat-and-report protocol
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MetricEntry:
    mean: float
    ci_halfwidth: float
    repetitions: int

    def formatted(self):
        return f"{self.mean:.3f}^{{±{self.ci_halfwidth:.3f}}}"


def repeat_with_ci(metric, repetitions=20, seed=0) -> MetricEntry:
    """Run a seeded metric closure repeatedly; report mean and 95% CI.

    The closure receives a per-repetition Generator split off the seed.
    The halfwidth is 1.96 * sample std / sqrt(n).
    """
    if repetitions < 2:
        raise MetricsError("need at least 2 repetitions")
    values = np.array(
        [float(metric(np.random.default_rng([seed, rep]))) for rep in range(repetitions)]
    )
    halfwidth = float(1.96 * values.std(ddof=1) / np.sqrt(repetitions))
    return MetricEntry(float(values.mean()), halfwidth, repetitions)


@dataclass(frozen=True)
class MetricReport:
    entries: dict

    def to_json(self):
        return json.dumps(
            {
                name: {
                    "mean": e.mean,
                    "ci_halfwidth": e.ci_halfwidth,
                    "repetitions": e.repetitions,
                }
                for name, e in self.entries.items()
            },
            indent=2,
        )

    def to_table(self):
        """Aligned text table in the mean^{+-halfwidth} style."""
        names = list(self.entries)
        width = max(len(n) for n in names) if names else 0
        lines = [f"{'Metric'.ljust(width)}  Value"]
        for name in names:
            lines.append(f"{name.ljust(width)}  {self.entries[name].formatted()}")
        return "\n".join(lines) + "\n"
