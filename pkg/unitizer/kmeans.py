from typing import Sequence
from typing_extensions import override

import numpy as np
from pydantic import ConfigDict, Field

from core.action_schema import ActionSchema
from core.errors import DimensionError, InsufficientDataError, NumericalError
from core.log import get_logger

logger = get_logger(__name__)

CHUNK_FRAMES = 2048


class QuantizerModel(ActionSchema):
    """
    A fitted K-means quantizer.

    Attributes:
        k (int): Number of clusters.
        centroids (np.ndarray): k x F centroid matrix.
        seed (int): Seed used for k-means++ seeding.
        inertia_history (list[float]): Inertia after each assignment step.
    """
    model_config = ConfigDict(arbitrary_types_allowed = True)

    k: int = Field(description = "Number of clusters.", ge = 1)
    centroids: np.ndarray = Field(description = "k x F centroid matrix.")
    seed: int = Field(description = "Seed used for k-means++ seeding.", default = 0)
    inertia_history: list[float] = Field(description = "Inertia after each assignment step.", default_factory = list)

    @property
    def feature_dim(self) -> int:
        return int(self.centroids.shape[1])

    @classmethod
    @override
    def description(cls) -> str:
        return "A fitted K-means quantizer."


def squared_distances(frames: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """Exact squared Euclidean distances, T x k, computed by differences so equal distances compare equal."""
    out = np.empty((frames.shape[0], centroids.shape[0]), dtype = np.float64)
    for start in range(0, frames.shape[0], CHUNK_FRAMES):
        block = frames[start:start + CHUNK_FRAMES, None, :] - centroids[None, :, :]
        out[start:start + CHUNK_FRAMES] = (block * block).sum(axis = 2)
    return out


def kmeans_plusplus(frames: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: each new centroid drawn with probability proportional to squared distance."""
    centroids = np.empty((k, frames.shape[1]), dtype = np.float64)
    centroids[0] = frames[rng.integers(0, frames.shape[0])]
    closest = squared_distances(frames, centroids[:1])[:, 0]
    for index in range(1, k):
        total = closest.sum()
        if total > 0:
            chosen = rng.choice(frames.shape[0], p = closest / total)
        else:
            chosen = rng.integers(0, frames.shape[0])
        centroids[index] = frames[chosen]
        closest = np.minimum(closest, squared_distances(frames, centroids[index:index + 1])[:, 0])
    return centroids


def kmeans_fit(features: Sequence[np.ndarray], k: int, max_iters: int = 100, seed: int = 0) -> QuantizerModel:
    """
    Lloyd's algorithm with k-means++ seeding over all frames of all feature matrices.
    Stops after max_iters or once assignments stop changing. Empty clusters keep their previous centroid.

    Args:
        features (Sequence[np.ndarray]): T x F matrices; T may be zero.
        k (int): Number of clusters.
        max_iters (int): Iteration cap.
        seed (int): Seed for k-means++.

    Raises:
        InsufficientDataError: If there are fewer frames than k.
        DimensionError: If feature widths disagree.
        NumericalError: If inertia increases between iterations.
    """
    widths = {matrix.shape[1] for matrix in features if matrix.ndim == 2}
    if len(widths) > 1 or any(matrix.ndim != 2 for matrix in features):
        raise DimensionError(f"feature matrices must share one width, got {sorted(widths)}")
    frames = np.concatenate([np.asarray(matrix, dtype = np.float64) for matrix in features]) if features else np.empty((0, 1))
    if k < 1 or frames.shape[0] < k:
        raise InsufficientDataError(f"{frames.shape[0]} frames cannot fit {k} clusters")

    rng = np.random.default_rng(seed)
    centroids = kmeans_plusplus(frames, k, rng)
    assignments: np.ndarray | None = None
    history: list[float] = []
    for iteration in range(max_iters):
        distances = squared_distances(frames, centroids)
        new_assignments = distances.argmin(axis = 1)
        inertia = float(distances[np.arange(frames.shape[0]), new_assignments].sum())
        if history and inertia > history[-1] * (1 + 1e-9) + 1e-12:
            raise NumericalError(f"k-means inertia increased at iteration {iteration}: {history[-1]} -> {inertia}")
        history.append(inertia)
        if assignments is not None and np.array_equal(assignments, new_assignments):
            break
        assignments = new_assignments
        for cluster in range(k):
            members = frames[assignments == cluster]
            if len(members):
                centroids[cluster] = members.mean(axis = 0)
    logger.debug("k-means fit k=%d frames=%d iterations=%d inertia=%.6g", k, frames.shape[0], len(history), history[-1])
    return QuantizerModel(k = k, centroids = centroids, seed = seed, inertia_history = history)


def quantize(model: QuantizerModel, features: np.ndarray) -> list[int]:
    """
    Maps every frame to its nearest centroid; ties go to the lowest cluster index.

    Raises:
        DimensionError: If the feature width differs from the model's.
    """
    if features.ndim != 2 or features.shape[1] != model.feature_dim:
        raise DimensionError(f"features {features.shape} do not match centroid width {model.feature_dim}")
    if features.shape[0] == 0:
        return []
    distances = squared_distances(np.asarray(features, dtype = np.float64), model.centroids)
    return [int(unit) for unit in distances.argmin(axis = 1)]
