"""2D maps of elections: force-directed embedding of a distance matrix.

The layout is a force-directed scheme over the complete graph with a
per-pair ideal length proportional to the input distance: pairs attract
with dist^2/ideal and repel with ideal^2/dist, so every pair is at
equilibrium exactly at its ideal length, and a linearly cooled step cap
drives the system to a fixed point in a fixed number of iterations (no
early exit, so runs are bit-stable per seed). Initial positions are a hash
of (seed, label), never of list position, and the internal computation
orders points by label, so the result is independent of input order.

``MapEmbedding`` follows the sklearn estimator protocol for precomputed
dissimilarities (fit / fit_transform / get_params), so it can slot into
pipelines anywhere an MDS-like embedding is expected.
"""

from __future__ import annotations

import hashlib
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array

from .metrics import DistanceMatrix

__all__ = [
    "MapPoint",
    "EmbeddingConfig",
    "MapEmbedding",
    "embed",
    "stress",
    "map_points_to_csv",
    "map_points_from_csv",
]


@dataclass(frozen=True)
class MapPoint:
    """One embedded election: 2D coordinates plus statistic values used for
    coloring."""

    label: str
    x: float
    y: float
    stats: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite coordinates for {self.label!r}")


@dataclass
class EmbeddingConfig:
    """Layout knobs. The algorithm's source gives no parameters, so these
    defaults were chosen for reproducibility and exposed rather than baked
    in."""

    iterations: int = 1000
    edge_length_scale: float = 1.0
    initial_temperature: float = 0.1
    anchor_label: str | None = "empty"

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.edge_length_scale <= 0:
            raise ValueError("edge_length_scale must be positive")
        if self.initial_temperature <= 0:
            raise ValueError("initial_temperature must be positive")


def _initial_positions(labels: list[str], seed: int) -> np.ndarray:
    """Seeded positions in the unit square, one per label, independent of
    list order (hash of seed and label, not of position)."""
    coords = np.empty((len(labels), 2), dtype=float)
    for i, label in enumerate(labels):
        digest = hashlib.sha256(f"{seed}:{label}".encode("utf-8")).digest()
        coords[i, 0] = int.from_bytes(digest[:8], "big") / 2**64
        coords[i, 1] = int.from_bytes(digest[8:16], "big") / 2**64
    return coords


def _check_square_distances(x: np.ndarray) -> np.ndarray:
    x = check_array(x, ensure_2d=True, dtype=float)
    if x.shape[0] != x.shape[1]:
        raise ValueError(f"distance matrix must be square, got {x.shape}")
    if not np.allclose(x, x.T, atol=1e-9):
        raise ValueError("distance matrix must be symmetric")
    if np.any(x < 0):
        raise ValueError("distances must be non-negative")
    return x


def _force_layout(
    distances: np.ndarray,
    labels: list[str],
    iterations: int,
    edge_length_scale: float,
    initial_temperature: float,
    anchor_label: str | None,
    seed: int,
) -> np.ndarray:
    n = distances.shape[0]
    if n == 1:
        return np.zeros((1, 2))

    # label-sorted internal order makes the result independent of how the
    # caller happened to arrange the matrix
    order = sorted(range(n), key=lambda i: labels[i])
    d = distances[np.ix_(order, order)]
    sorted_labels = [labels[i] for i in order]

    dmax = float(d.max())
    if dmax == 0.0:
        warnings.warn("all input distances are zero; placing every point at the origin")
        return np.zeros((n, 2))

    ideal = (d / dmax) * edge_length_scale
    np.fill_diagonal(ideal, 1.0)
    ideal = np.maximum(ideal, 1e-6 * edge_length_scale)

    pos = _initial_positions(sorted_labels, seed) * edge_length_scale
    temperature0 = initial_temperature * edge_length_scale
    eye = np.eye(n, dtype=bool)
    for it in range(iterations):
        delta = pos[:, None, :] - pos[None, :, :]
        dist = np.sqrt((delta**2).sum(axis=2))
        np.maximum(dist, 1e-12, out=dist)
        force = ideal**2 / dist - dist**2 / ideal
        force[eye] = 0.0
        disp = (force / dist)[:, :, None] * delta
        disp = disp.sum(axis=1)
        step = np.sqrt((disp**2).sum(axis=1))
        temperature = temperature0 * (1.0 - it / iterations)
        factor = np.where(step > 0, np.minimum(1.0, temperature / np.maximum(step, 1e-12)), 0.0)
        pos += disp * factor[:, None]

    # uniform rescale minimizing sum (d - a*e)^2: back to input units, and
    # exact for configurations the plane can realize perfectly
    tri = np.triu_indices(n, k=1)
    embedded = np.sqrt(((pos[:, None, :] - pos[None, :, :]) ** 2).sum(axis=2))[tri]
    denom = float((embedded**2).sum())
    if denom > 0:
        pos *= float((d[tri] * embedded).sum()) / denom

    if anchor_label is not None and anchor_label in sorted_labels:
        pos = _rotate_anchor_down(pos, sorted_labels.index(anchor_label))

    out = np.empty_like(pos)
    out[order] = pos
    return out


def _rotate_anchor_down(pos: np.ndarray, anchor: int) -> np.ndarray:
    """Rigid rotation about the centroid placing the anchor at the bottom;
    cosmetic compass orientation only."""
    centroid = pos.mean(axis=0)
    v = pos[anchor] - centroid
    if np.hypot(v[0], v[1]) < 1e-12:
        return pos
    angle = -math.pi / 2 - math.atan2(v[1], v[0])
    rot = np.array(
        [[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]]
    )
    return centroid + (pos - centroid) @ rot.T


class MapEmbedding(BaseEstimator):
    """Force-directed 2D embedding of a precomputed distance matrix.

    Mirrors the sklearn embedding API (``fit`` stores ``embedding_``,
    ``fit_transform`` returns it). ``labels`` feed the order-independent
    initialization; they default to row indices.

    Parameters
    ----------
    iterations : fixed number of layout sweeps (no early exit).
    edge_length_scale : ideal length of the largest input distance.
    initial_temperature : starting step cap, cooled linearly to zero.
    anchor_label : label rotated to the bottom of the map, if present.
    seed : stream for the initial positions.
    """

    def __init__(
        self,
        iterations: int = 1000,
        edge_length_scale: float = 1.0,
        initial_temperature: float = 0.1,
        anchor_label: str | None = "empty",
        seed: int = 0,
    ):
        self.iterations = iterations
        self.edge_length_scale = edge_length_scale
        self.initial_temperature = initial_temperature
        self.anchor_label = anchor_label
        self.seed = seed

    def _config(self) -> EmbeddingConfig:
        return EmbeddingConfig(
            iterations=self.iterations,
            edge_length_scale=self.edge_length_scale,
            initial_temperature=self.initial_temperature,
            anchor_label=self.anchor_label,
        )

    def fit(self, X, y=None, labels=None) -> "MapEmbedding":
        X = _check_square_distances(X)
        if X.shape[0] < 2:
            raise ValueError("need at least 2 points to embed")
        cfg = self._config()
        if labels is None:
            labels = [f"{i}" for i in range(X.shape[0])]
        labels = [str(lb) for lb in labels]
        if len(labels) != X.shape[0]:
            raise ValueError("label count does not match matrix size")
        self.labels_ = list(labels)
        self.embedding_ = _force_layout(
            X,
            labels,
            cfg.iterations,
            cfg.edge_length_scale,
            cfg.initial_temperature,
            cfg.anchor_label,
            self.seed,
        )
        self.stress_ = _stress_arrays(X, self.embedding_)
        return self

    def fit_transform(self, X, y=None, labels=None) -> np.ndarray:
        return self.fit(X, y=y, labels=labels).embedding_


def embed(
    dm: DistanceMatrix, config: EmbeddingConfig | None = None, seed: int = 0
) -> list[MapPoint]:
    """Embed a labeled distance matrix; deterministic per seed."""
    cfg = config or EmbeddingConfig()
    estimator = MapEmbedding(
        iterations=cfg.iterations,
        edge_length_scale=cfg.edge_length_scale,
        initial_temperature=cfg.initial_temperature,
        anchor_label=cfg.anchor_label,
        seed=seed,
    )
    coords = estimator.fit_transform(np.asarray(dm.values), labels=list(dm.labels))
    return [
        MapPoint(label=label, x=float(xy[0]), y=float(xy[1]))
        for label, xy in zip(dm.labels, coords)
    ]


def _stress_arrays(distances: np.ndarray, coords: np.ndarray) -> float:
    tri = np.triu_indices(distances.shape[0], k=1)
    d = distances[tri]
    e = np.sqrt(((coords[:, None, :] - coords[None, :, :]) ** 2).sum(axis=2))[tri]
    d_norm = float((d**2).sum())
    if d_norm == 0.0:
        return 0.0 if float((e**2).sum()) == 0.0 else math.inf
    return math.sqrt(float(((d - e) ** 2).sum()) / d_norm)


def stress(dm: DistanceMatrix, points: list[MapPoint]) -> float:
    """Normalized Kruskal stress between input distances and the embedded
    Euclidean distances; 0 means the layout realizes the metric exactly."""
    by_label = {pt.label: pt for pt in points}
    if set(by_label) != set(dm.labels):
        raise ValueError("point labels do not match distance matrix labels")
    coords = np.array([[by_label[lb].x, by_label[lb].y] for lb in dm.labels])
    return _stress_arrays(np.asarray(dm.values), coords)


def map_points_to_csv(points: list[MapPoint]) -> str:
    """CSV with label,x,y then one column per statistic (union, sorted)."""
    stat_names = sorted({name for pt in points for name in pt.stats})
    lines = ["label,x,y" + ("," + ",".join(stat_names) if stat_names else "")]
    for pt in points:
        cells = [pt.label, repr(pt.x), repr(pt.y)]
        cells += [
            repr(pt.stats[name]) if name in pt.stats else "" for name in stat_names
        ]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def map_points_from_csv(text: str) -> list[MapPoint]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty map point CSV")
    header = lines[0].split(",")
    if header[:3] != ["label", "x", "y"]:
        raise ValueError("map point CSV must start with label,x,y")
    stat_names = header[3:]
    points = []
    for ln in lines[1:]:
        cells = ln.split(",")
        stats = {
            name: float(cell)
            for name, cell in zip(stat_names, cells[3:])
            if cell != ""
        }
        points.append(
            MapPoint(label=cells[0], x=float(cells[1]), y=float(cells[2]), stats=stats)
        )
    return points
