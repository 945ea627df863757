"""
Reference spaces and space-file ingestion.

Kinds:
  euclidean_grid  uniform lattice in [0,1]^dim, equal weights summing to 1
  weighted_grid   lattice on [-extent, extent]^dim weighted by the radial
                  density  |x|^alpha (|x| <= 1)  /  |x|^beta (|x| > 1),
                  each point carrying density * cell volume
  cantor          middle-thirds midpoints at a given depth, equal weights
  snowflake       euclidean lattice with distances raised to a power e
  file            the JSON space-file format (see load_space)

The weighted lattice drops the exact origin whenever alpha != 0: for
alpha < 0 the density is singular there, for alpha > 0 it vanishes and a
zero-mass point would break the positive-measure contract. alpha = 0
keeps the origin with density 1.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from homspace.space import FiniteHomSpace, validate_quasi_metric

KINDS = ("euclidean_grid", "weighted_grid", "cantor", "snowflake", "file")

MAX_POINTS = 20_000


@dataclass(frozen=True)
class GallerySpec:
    kind: str
    n: int = 64                 # points per axis for lattice kinds
    dim: int = 1
    depth: int = 6              # cantor recursion depth
    alpha: float = 0.0          # weighted-grid exponent inside the unit ball
    beta: float = 0.0           # weighted-grid exponent outside
    e: float = 1.0              # snowflake distance exponent, in (0, 1]
    extent: float = 1.0         # weighted-grid half-width
    path: Optional[str] = None


def _lattice(n: int, dim: int, lo: float, hi: float) -> np.ndarray:
    axis = np.linspace(lo, hi, n)
    grids = np.meshgrid(*([axis] * dim), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _euclidean_dist(coords: np.ndarray) -> np.ndarray:
    diff = coords[:, None, :] - coords[None, :, :]
    d = np.sqrt((diff**2).sum(axis=2))
    np.fill_diagonal(d, 0.0)
    return d


def cantor_points(depth: int) -> np.ndarray:
    """Midpoints of the 2^depth surviving middle-thirds intervals."""
    intervals = [(0.0, 1.0)]
    for _ in range(depth):
        nxt = []
        for a, b in intervals:
            third = (b - a) / 3.0
            nxt.append((a, a + third))
            nxt.append((b - third, b))
        intervals = nxt
    return np.array([(a + b) / 2.0 for a, b in intervals])


def radial_density(r, alpha: float, beta: float):
    """|x|^alpha for |x| <= 1 and |x|^beta beyond, with 0^0 = 1."""
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    small = r <= 1.0
    pos = small & (r > 0)
    out[pos] = r[pos] ** alpha
    out[small & (r == 0.0)] = 1.0 if alpha == 0.0 else 0.0
    out[~small] = r[~small] ** beta
    return out


def build(spec: GallerySpec) -> FiniteHomSpace:
    if spec.kind not in KINDS:
        raise ValueError(f"unknown gallery kind {spec.kind!r}")

    if spec.kind == "file":
        if not spec.path:
            raise ValueError("file kind requires a path")
        return load_space(spec.path)

    if spec.kind == "cantor":
        if not (1 <= spec.depth <= 14):
            raise ValueError("cantor depth must lie in [1, 14]")
        coords = cantor_points(spec.depth)[:, None]
        m = coords.shape[0]
        weights = np.full(m, 1.0 / m)
        space = FiniteHomSpace(
            dist=_euclidean_dist(coords), weight=weights, coords=coords,
            declared_omega=math.log(2) / math.log(3),
        )
        _check_gallery(space)
        return space

    if spec.n < 2:
        raise ValueError("lattice kinds need n >= 2 points per axis")
    if spec.dim < 1:
        raise ValueError("dim must be >= 1")
    total = spec.n ** spec.dim
    if total > MAX_POINTS:
        raise ValueError(f"lattice of {total} points exceeds the {MAX_POINTS} cap")

    if spec.kind == "euclidean_grid":
        coords = _lattice(spec.n, spec.dim, 0.0, 1.0)
        weights = np.full(total, 1.0 / total)
        space = FiniteHomSpace(dist=_euclidean_dist(coords), weight=weights,
                               coords=coords, declared_omega=float(spec.dim))
        _check_gallery(space)
        return space

    if spec.kind == "snowflake":
        if not (0 < spec.e <= 1):
            raise ValueError("snowflake exponent must lie in (0, 1]")
        coords = _lattice(spec.n, spec.dim, 0.0, 1.0)
        weights = np.full(total, 1.0 / total)
        space = FiniteHomSpace(dist=_euclidean_dist(coords) ** spec.e,
                               weight=weights, coords=coords,
                               declared_omega=float(spec.dim) / spec.e)
        _check_gallery(space)
        return space

    # weighted_grid
    if spec.extent <= 0:
        raise ValueError("extent must be positive")
    if spec.alpha <= -spec.dim:
        raise ValueError(f"alpha must exceed -dim = {-spec.dim} for an integrable density")
    coords = _lattice(spec.n, spec.dim, -spec.extent, spec.extent)
    radii = np.sqrt((coords**2).sum(axis=1))
    if spec.alpha != 0.0:
        keep = radii > 0
        coords, radii = coords[keep], radii[keep]
    h = 2.0 * spec.extent / (spec.n - 1)
    weights = radial_density(radii, spec.alpha, spec.beta) * h**spec.dim
    space = FiniteHomSpace(dist=_euclidean_dist(coords), weight=weights,
                           coords=coords, declared_omega=float(spec.dim))
    _check_gallery(space)
    return space


def _check_gallery(space: FiniteHomSpace) -> None:
    result = validate_quasi_metric(space)
    if not result.ok:
        raise AssertionError(f"gallery space failed validation: {result.violations[0]}")


# ---------------------------------------------------------------------------
# Space files
# ---------------------------------------------------------------------------

def load_space(path: str) -> FiniteHomSpace:
    """Parse and fully validate a JSON space file.

    Schema: {"points": [[...]] or "dist": [[...]], "weights": [...],
    "metric": "euclidean" | "snowflake:<e>" | "explicit",
    "declared_A0": optional, "declared_omega": optional}.
    """
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: malformed JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ValueError(f"{path}: space file must be a JSON object")

    weights = data.get("weights")
    if weights is None:
        raise ValueError(f"{path}: missing 'weights'")
    weights = np.asarray(weights, dtype=float)
    for i, w in enumerate(weights):
        if not (math.isfinite(w) and w > 0):
            raise ValueError(f"{path}: invalid measure: weights[{i}] = {w!r}")

    metric = data.get("metric", "euclidean" if "points" in data else "explicit")
    coords = None
    if metric == "explicit":
        table = data.get("dist")
        if table is None:
            raise ValueError(f"{path}: metric 'explicit' requires a 'dist' table")
        dist = np.asarray(table, dtype=float)
        if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
            raise ValueError(f"{path}: 'dist' must be a square table")
        if dist.shape[0] != weights.size:
            raise ValueError(f"{path}: dist has {dist.shape[0]} rows but {weights.size} weights")
        asym = np.argwhere(dist != dist.T)
        if asym.size:
            i, j = (int(v) for v in asym[0])
            raise ValueError(
                f"{path}: asymmetric dist at ({i}, {j}): {dist[i, j]!r} != {dist[j, i]!r}"
            )
    else:
        pts = data.get("points")
        if pts is None:
            raise ValueError(f"{path}: metric {metric!r} requires 'points'")
        coords = np.asarray(pts, dtype=float)
        if coords.ndim == 1:
            coords = coords[:, None]
        if coords.shape[0] != weights.size:
            raise ValueError(f"{path}: {coords.shape[0]} points but {weights.size} weights")
        dist = _euclidean_dist(coords)
        if metric.startswith("snowflake:"):
            try:
                e = float(metric.split(":", 1)[1])
            except ValueError:
                raise ValueError(f"{path}: bad snowflake exponent in {metric!r}") from None
            if not (0 < e <= 1):
                raise ValueError(f"{path}: snowflake exponent {e} outside (0, 1]")
            dist = dist**e
        elif metric != "euclidean":
            raise ValueError(f"{path}: unknown metric {metric!r}")

    space = FiniteHomSpace(
        dist=dist, weight=weights, coords=coords,
        declared_A0=data.get("declared_A0"),
        declared_omega=data.get("declared_omega"),
    )
    result = validate_quasi_metric(space)
    if not result.ok:
        v = result.violations[0]
        raise ValueError(f"{path}: invalid space: {v}")
    return space


def space_to_dict(space: FiniteHomSpace, metric: str = "explicit") -> dict:
    """Serialize a space back to the space-file schema."""
    out: dict = {"weights": [float(w) for w in space.weight]}
    if metric == "explicit" or space.coords is None:
        out["metric"] = "explicit"
        out["dist"] = [[float(v) for v in row] for row in space.dist]
    else:
        out["metric"] = metric
        out["points"] = [[float(v) for v in row] for row in space.coords]
    if space.declared_A0 is not None:
        out["declared_A0"] = float(space.declared_A0)
    if space.declared_omega is not None:
        out["declared_omega"] = float(space.declared_omega)
    return out


# ---------------------------------------------------------------------------
# Standard dyadic grid on a box in R^n
# ---------------------------------------------------------------------------

@dataclass
class RnDyadicGrid:
    """Point cloud in R^n carved by the standard half-open dyadic cubes.

    Level-j cubes are the sets {x : floor(2^j x) = k}, k in Z^n, so the
    scale base is 1/2. Each point carries a mass (density * cell volume);
    cube masses are their sums.
    """

    points: np.ndarray            # (m, dim)
    weights: np.ndarray           # (m,)
    j_min: int
    j_max: int
    cell: dict                    # level -> (m, dim) int cell indices
    masses: dict                  # level -> {kvec tuple: mass}

    delta: float = 0.5

    @property
    def levels(self) -> range:
        return range(self.j_min, self.j_max + 1)

    def cubes(self, j: int) -> list:
        return sorted(self.masses[j].keys())

    def mass(self, j: int, kvec) -> float:
        try:
            return self.masses[j][tuple(int(v) for v in kvec)]
        except KeyError:
            raise KeyError(f"no dyadic cube (j={j}, k={tuple(kvec)}) meets the box") from None

    def members(self, j: int, kvec) -> np.ndarray:
        key = np.asarray(tuple(int(v) for v in kvec), dtype=int)
        return np.flatnonzero((self.cell[j] == key).all(axis=1))


def build_rn_dyadic_grid(points, weights, j_min: int = 0, j_max: int = 6) -> RnDyadicGrid:
    if j_min > j_max:
        raise ValueError("empty level range")
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    weights = np.asarray(weights, dtype=float)
    if np.any(weights <= 0):
        raise ValueError("invalid measure: grid weights must be positive")
    cell: dict = {}
    masses: dict = {}
    for j in range(j_min, j_max + 1):
        idx = np.floor(points * 2.0**j).astype(int)
        cell[j] = idx
        acc: dict = {}
        for row, w in zip(map(tuple, idx), weights):
            acc[row] = acc.get(row, 0.0) + float(w)
        masses[j] = acc
    return RnDyadicGrid(points=points, weights=weights, j_min=j_min, j_max=j_max,
                        cell=cell, masses=masses)


def unit_dyadic_lattice(j_points: int, dim: int = 1, density=None) -> RnDyadicGrid:
    """Left-aligned lattice of 2^j_points per axis on [0,1)^dim; handy for
    the Lebesgue sanity cases where level-j cubes carry mass exactly 2^-j*dim."""
    m = 2**j_points
    axis = np.arange(m) / m
    grids = np.meshgrid(*([axis] * dim), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    vol = (1.0 / m) ** dim
    dens = np.ones(pts.shape[0]) if density is None else np.asarray(density(pts), dtype=float)
    return build_rn_dyadic_grid(pts, dens * vol, j_min=0, j_max=j_points)
