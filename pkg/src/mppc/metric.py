"""Distance, cost and travel-time matrices over the depot and the sites."""

from __future__ import annotations

import json
import math
from typing import TYPE_CHECKING

import numpy as np

from .errors import IncompleteCacheError, MetricError, ParseError

if TYPE_CHECKING:
    from .instance import Instance, Source

EARTH_RADIUS_KM = 6371.0
METRIC_TOL = 1e-9


class DistanceMatrix:
    """Symmetric (n+1)x(n+1) distances; index 0 is the depot, site i is i+1."""

    def __init__(self, distances, speed: float = 1.0):
        arr = np.array(distances, dtype=float)
        arr.setflags(write=False)
        self.array = arr
        self.speed = float(speed)
        # nested lists index ~10x faster than numpy scalars in the solver loops
        self.d = arr.tolist()

    @property
    def size(self) -> int:
        return self.array.shape[0]

    def cost(self, i: int, j: int) -> float:
        return self.d[i][j]

    def time(self, i: int, j: int) -> float:
        return self.d[i][j] / self.speed

    def check(self, tol: float = METRIC_TOL) -> None:
        """Raise MetricError unless the matrix is a (pseudo)metric within ``tol``."""
        a = self.array
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise MetricError(f"matrix must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise MetricError("matrix has non-finite entries")
        if np.any(a < 0):
            i, j = np.argwhere(a < 0)[0]
            raise MetricError(f"negative distance d({i},{j})={a[i, j]}", (int(i), int(j), int(j)))
        diag = np.abs(np.diag(a))
        if np.any(diag > tol):
            i = int(np.argmax(diag))
            raise MetricError(f"nonzero diagonal d({i},{i})={a[i, i]}", (i, i, i))
        asym = np.abs(a - a.T)
        if np.any(asym > tol):
            i, j = np.unravel_index(int(np.argmax(asym)), a.shape)
            raise MetricError(f"asymmetric d({i},{j})={a[i, j]} vs d({j},{i})={a[j, i]}", (int(i), int(j), int(i)))
        for k in range(a.shape[0]):
            via = a[:, k, None] + a[None, k, :]
            bad = a - via > tol * (1.0 + np.abs(a))
            if np.any(bad):
                i, j = np.argwhere(bad)[0]
                raise MetricError(
                    f"triangle inequality fails: d({i},{j})={a[i, j]} > d({i},{k})+d({k},{j})={via[i, j]}",
                    (int(i), int(j), int(k)))

    def __eq__(self, other):
        return isinstance(other, DistanceMatrix) and np.array_equal(self.array, other.array)

    def __repr__(self):
        return f"DistanceMatrix(size={self.size}, speed={self.speed})"


def _points(inst: "Instance") -> np.ndarray:
    return np.array([inst.depot] + [(s.x, s.y) for s in inst.sites], dtype=float)


def euclidean_matrix(points) -> np.ndarray:
    p = np.asarray(points, dtype=float)
    diff = p[:, None, :] - p[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def haversine_matrix(points) -> np.ndarray:
    """Great-circle distances (km); points are (longitude, latitude) in degrees."""
    p = np.radians(np.asarray(points, dtype=float))
    lon, lat = p[:, 0], p[:, 1]
    dlat = lat[:, None] - lat[None, :]
    dlon = lon[:, None] - lon[None, :]
    h = np.sin(dlat / 2) ** 2 + np.cos(lat)[:, None] * np.cos(lat)[None, :] * np.sin(dlon / 2) ** 2
    out = 2 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.clip(h, 0.0, 1.0)))
    np.fill_diagonal(out, 0.0)
    return out


def build_metric(inst: "Instance") -> DistanceMatrix:
    if inst.metric_mode == "euclidean":
        return DistanceMatrix(euclidean_matrix(_points(inst)), inst.speed)
    if inst.metric_mode == "haversine":
        return DistanceMatrix(haversine_matrix(_points(inst)), inst.speed)
    if inst.metric_mode == "matrix":
        dm = DistanceMatrix(inst.matrix, inst.speed)
        if dm.size != inst.n + 1:
            raise MetricError(f"matrix is {dm.size}x{dm.size}, expected {inst.n + 1}")
        dm.check()
        return dm
    raise MetricError(f"unknown metric mode {inst.metric_mode!r}")


def shortest_path_closure(distances) -> np.ndarray:
    """All-pairs shortest paths (Floyd-Warshall); ``inf`` marks missing edges."""
    d = np.array(distances, dtype=float)
    for k in range(d.shape[0]):
        np.minimum(d, d[:, k, None] + d[None, k, :], out=d)
    return d


def _node_of(value, n: int) -> int:
    if isinstance(value, str):
        if value.lower() in ("d", "depot"):
            return 0
        try:
            value = int(value)
        except ValueError:
            raise ParseError(f"bad node reference {value!r}") from None
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"bad node reference {value!r}")
    if value == -1:
        return 0
    if not 0 <= value < n:
        raise ParseError(f"unknown site id {value} in directions cache")
    return value + 1


def import_directions_cache(source: "Source", inst: "Instance") -> DistanceMatrix:
    """Assemble a metric from an offline list of pairwise directions.

    Entries are ``{"from", "to", "distance_km", "duration_min"}`` where
    from/to are site ids or ``"depot"`` (``-1`` also accepted).  Conflicting
    directions keep the shorter distance; gaps and triangle violations are
    resolved by shortest-path closure.  Durations are informational only:
    travel time is always distance / speed.
    """
    from .instance import _read_text

    try:
        doc = json.loads(_read_text(source))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"directions cache is not JSON: {exc}") from exc
    entries = doc["entries"] if isinstance(doc, dict) else doc
    if not isinstance(entries, list):
        raise ParseError("directions cache must be a list of entries")
    size = inst.n + 1
    d = np.full((size, size), math.inf)
    np.fill_diagonal(d, 0.0)
    for e in entries:
        try:
            a = _node_of(e.get("from", e.get("from_id")), inst.n)
            b = _node_of(e.get("to", e.get("to_id")), inst.n)
            dist = float(e["distance_km"])
        except (KeyError, TypeError, AttributeError, ValueError) as exc:
            raise ParseError(f"malformed cache entry {e!r}") from exc
        if dist < 0 or not math.isfinite(dist):
            raise ParseError(f"bad distance in cache entry {e!r}")
        if a == b:
            continue
        d[a, b] = d[b, a] = min(d[a, b], dist)
    d = shortest_path_closure(d)
    if np.isinf(d).any():
        i, j = np.argwhere(np.isinf(d))[0]
        raise IncompleteCacheError((_label(int(i)), _label(int(j))))
    return DistanceMatrix(d, inst.speed)


def _label(node: int):
    return "depot" if node == 0 else node - 1
