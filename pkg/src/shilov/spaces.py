"""Finite point sets and rasterized plane regions.

Finite spaces carry labels, optional planar coordinates and an optional
metric (Euclidean by default when coordinates exist).  Raster regions are
boolean bitmaps with a guaranteed one-pixel empty margin, so the unbounded
complement component always touches the border; holes are filled by flood
fill from that border.  All bitmap operations use 4-connectivity.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage

from .reports import (
    ValidationReport,
    complex_to_pair,
    pair_to_complex,
)

METRIC_TOL = 1e-12
FOUR_CONNECTED = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


class EmptySampleError(ValueError):
    """A sampling strategy produced no admissible points."""


@dataclass(frozen=True)
class FiniteSpace:
    """A finite compact space: labelled points, optional coords and metric."""

    points: tuple[str, ...]
    coords: np.ndarray | None = None
    metric: np.ndarray | None = None

    def __post_init__(self):
        points = tuple(str(p) for p in self.points)
        if len(points) == 0:
            raise ValueError("a finite space needs at least one point")
        if len(set(points)) != len(points):
            raise ValueError("point labels must be distinct")
        object.__setattr__(self, "points", points)
        if self.coords is not None:
            coords = np.asarray(self.coords, dtype=complex).reshape(len(points))
            coords.setflags(write=False)
            object.__setattr__(self, "coords", coords)
        if self.metric is not None:
            metric = np.asarray(self.metric, dtype=float).reshape(len(points), len(points))
            metric.setflags(write=False)
            object.__setattr__(self, "metric", metric)

    @property
    def size(self) -> int:
        return len(self.points)

    def index(self, label: str) -> int:
        try:
            return self.points.index(label)
        except ValueError:
            raise KeyError(f"unknown point {label!r}") from None

    def distance_matrix(self) -> np.ndarray:
        """The stored metric, or Euclidean distances derived from coords."""
        if self.metric is not None:
            return self.metric
        if self.coords is None:
            raise ValueError("space has neither metric nor coords")
        diff = self.coords[:, None] - self.coords[None, :]
        return np.abs(diff)

    def to_dict(self) -> dict:
        data: dict = {"points": list(self.points)}
        if self.coords is not None:
            data["coords"] = [complex_to_pair(z) for z in self.coords]
        if self.metric is not None:
            data["metric"] = [[float(x) for x in row] for row in self.metric]
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "FiniteSpace":
        coords = None
        if data.get("coords") is not None:
            coords = np.array([pair_to_complex(p) for p in data["coords"]])
        metric = None
        if data.get("metric") is not None:
            metric = np.asarray(data["metric"], dtype=float)
        return cls(tuple(data["points"]), coords, metric)


def validate_metric(X: FiniteSpace) -> ValidationReport:
    """Symmetry, vanishing diagonal, positivity off-diagonal, triangle inequality."""
    report = ValidationReport(subject=f"metric on {X.size} points")
    if X.metric is None:
        report.add("present", False, detail="no metric stored")
        return report
    d = X.metric
    n = X.size

    sym = np.abs(d - d.T).max()
    report.add("symmetry", bool(sym <= METRIC_TOL), float(sym))

    diag = np.abs(np.diagonal(d)).max()
    report.add("zero_diagonal", bool(diag <= METRIC_TOL), float(diag))

    off = d + np.eye(n)  # mask the diagonal
    min_off = float(off.min())
    bad = np.unravel_index(np.argmin(off), off.shape)
    report.add(
        "positivity",
        bool(min_off > 0.0),
        0.0 if min_off > 0 else abs(min_off),
        "" if min_off > 0 else f"d({X.points[bad[0]]},{X.points[bad[1]]}) <= 0",
    )

    # d(a,c) <= d(a,b) + d(b,c) for every triple
    via = d[:, :, None] + d[None, :, :]  # via[a,b,c] = d(a,b)+d(b,c)
    slack = d[:, None, :] - via  # positive entries violate
    worst = float(slack.max())
    detail = ""
    if worst > METRIC_TOL:
        a, b, c = np.unravel_index(np.argmax(slack), slack.shape)
        detail = f"({X.points[a]},{X.points[b]},{X.points[c]})"
    report.add("triangle", bool(worst <= METRIC_TOL), max(worst, 0.0), detail)
    return report


def combine_spaces(*spaces: FiniteSpace, relabel: bool = True) -> FiniteSpace:
    """Concatenate coordinate-bearing spaces into one (labels made unique)."""
    labels: list[str] = []
    coords: list[complex] = []
    for k, sp in enumerate(spaces):
        if sp.coords is None:
            raise ValueError("combine_spaces needs coordinate-bearing spaces")
        for lab, z in zip(sp.points, sp.coords):
            labels.append(f"s{k}:{lab}" if relabel else lab)
            coords.append(z)
    return FiniteSpace(tuple(labels), np.array(coords))


# ---------------------------------------------------------------------------
# Plane shapes and rasters


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def contains(self, z: np.ndarray) -> np.ndarray:
        return np.abs(z - self.center) <= self.radius

    def bounding_box(self) -> tuple[float, float, float, float]:
        c, r = self.center, self.radius
        return (c.real - r, c.imag - r, c.real + r, c.imag + r)


@dataclass(frozen=True)
class Annulus:
    center: complex
    inner: float
    outer: float

    def __post_init__(self):
        if not (self.outer > self.inner > 0):
            raise ValueError("annulus needs outer > inner > 0")

    def contains(self, z: np.ndarray) -> np.ndarray:
        r = np.abs(z - self.center)
        return (r >= self.inner) & (r <= self.outer)

    def bounding_box(self) -> tuple[float, float, float, float]:
        c, r = self.center, self.outer
        return (c.real - r, c.imag - r, c.real + r, c.imag + r)


@dataclass(frozen=True)
class RasterRegion:
    """A bitmap region: grid[row, col] set means the pixel belongs to the set.

    Pixel (row, col) has center origin + (col + 0.5 + (row + 0.5) i) * pixel_size.
    The border ring of the grid is always empty (one-pixel margin).
    """

    grid: np.ndarray
    origin: complex
    pixel_size: float

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=bool)
        if grid.ndim != 2 or grid.size == 0:
            raise ValueError("grid must be a nonempty 2-d boolean array")
        if not grid.any():
            raise ValueError("raster region must contain at least one set pixel")
        border = np.concatenate([grid[0], grid[-1], grid[:, 0], grid[:, -1]])
        if border.any():
            raise ValueError("raster region must keep a one-pixel empty margin")
        if not self.pixel_size > 0:
            raise ValueError("pixel_size must be positive")
        grid.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "origin", complex(self.origin))
        object.__setattr__(self, "pixel_size", float(self.pixel_size))

    @property
    def shape(self) -> tuple[int, int]:
        return self.grid.shape

    def pixel_centers(self) -> np.ndarray:
        rows, cols = self.grid.shape
        cc, rr = np.meshgrid(np.arange(cols), np.arange(rows))
        return self.origin + (cc + 0.5 + 1j * (rr + 0.5)) * self.pixel_size

    def set_pixel_centers(self) -> np.ndarray:
        return self.pixel_centers()[self.grid]

    def pixel_of(self, z: complex) -> tuple[int, int]:
        w = (complex(z) - self.origin) / self.pixel_size
        return int(math.floor(w.imag)), int(math.floor(w.real))

    def contains_point(self, z: complex) -> bool:
        """Strict membership: the pixel containing z is set."""
        r, c = self.pixel_of(z)
        rows, cols = self.grid.shape
        return 0 <= r < rows and 0 <= c < cols and bool(self.grid[r, c])

    def near_region(self, z: complex, slack_pixels: float = 2.0) -> bool:
        """Loose membership: within ``slack_pixels * pixel_size`` of a set center.

        Exact geometric samples (e.g. circle points on the region's metric
        boundary) can straddle pixel edges; raster membership for them is
        decided up to raster resolution.
        """
        dist = np.abs(self.set_pixel_centers() - complex(z))
        return bool(dist.min() <= slack_pixels * self.pixel_size)


def raster_from_shape(shapes, resolution: int) -> RasterRegion:
    """Rasterize a disk, annulus, or union of them at ``resolution`` px/unit.

    A pixel is set iff its center lies in (the closed) shape.
    """
    if resolution < 8:
        raise ValueError("resolution must be at least 8 pixels per unit")
    if isinstance(shapes, (Disk, Annulus)):
        shapes = [shapes]
    shapes = list(shapes)
    if not shapes:
        raise ValueError("need at least one shape")

    boxes = [s.bounding_box() for s in shapes]
    xmin = min(b[0] for b in boxes)
    ymin = min(b[1] for b in boxes)
    xmax = max(b[2] for b in boxes)
    ymax = max(b[3] for b in boxes)

    size = 1.0 / resolution
    origin = complex(xmin - size, ymin - size)  # one-pixel margin all around
    cols = int(math.ceil((xmax - origin.real) / size)) + 1
    rows = int(math.ceil((ymax - origin.imag) / size)) + 1

    grid = np.zeros((rows, cols), dtype=bool)
    cc, rr = np.meshgrid(np.arange(cols), np.arange(rows))
    centers = origin + (cc + 0.5 + 1j * (rr + 0.5)) * size
    for s in shapes:
        grid |= s.contains(centers)
    grid[0, :] = grid[-1, :] = grid[:, 0] = grid[:, -1] = False
    return RasterRegion(grid, origin, size)


def polynomial_hull_raster(R: RasterRegion) -> RasterRegion:
    """Fill every bounded complement component ("filling in the holes").

    The complement is flood-filled (4-connectivity) from the border margin;
    unset pixels the flood never reaches are holes and become set.
    """
    complement = ~R.grid
    labels, _ = ndimage.label(complement, structure=FOUR_CONNECTED)
    border_labels = np.unique(
        np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]])
    )
    border_labels = border_labels[border_labels != 0]
    unbounded = np.isin(labels, border_labels)
    filled = R.grid | (complement & ~unbounded)
    return RasterRegion(filled, R.origin, R.pixel_size)


def rational_hull_raster(R: RasterRegion) -> RasterRegion:
    """Identity on plane sets: the rationally convex hull adds nothing in C."""
    return RasterRegion(R.grid.copy(), R.origin, R.pixel_size)


def boundary_mask(R: RasterRegion) -> np.ndarray:
    """Set pixels with at least one unset 4-neighbor."""
    g = R.grid
    padded = np.pad(g, 1, constant_values=False)
    interior = (
        padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
    )
    return g & ~interior


def topological_boundary_raster(R: RasterRegion) -> np.ndarray:
    """Centers of the boundary pixels, ordered row-major."""
    return R.pixel_centers()[boundary_mask(R)]


# ---------------------------------------------------------------------------
# Sampling strategies


@dataclass(frozen=True)
class CircleSample:
    """n exact points center + radius * exp(2 pi i k / n); k = 0..n-1."""

    center: complex
    radius: float
    count: int


@dataclass(frozen=True)
class InteriorGrid:
    """Lattice points (offset half a step) strictly inside the region.

    A point qualifies when its containing pixel and that pixel's four
    neighbors are all set: the point then lies in the convex hull of set
    pixel centers, so for convex shape pieces it is genuinely interior and
    never sneaks past the metric boundary through a rim pixel.
    """

    step: float


@dataclass(frozen=True)
class BoundaryUniform:
    """Approximately equally spaced boundary pixel centers (greedy k-center)."""

    count: int


def _farthest_point_subset(points: np.ndarray, n: int) -> np.ndarray:
    """Greedy k-center picks, seeded at the lexicographically smallest point."""
    order = np.lexsort((points.imag, points.real))
    pts = points[order]
    chosen = [0]
    dist = np.abs(pts - pts[0])
    while len(chosen) < n:
        nxt = int(np.argmax(dist))
        chosen.append(nxt)
        dist = np.minimum(dist, np.abs(pts - pts[nxt]))
    return pts[np.array(sorted(chosen))]


def sample_raster(R: RasterRegion, strategy) -> FiniteSpace:
    """Extract a FiniteSpace of planar points from a raster region."""
    if isinstance(strategy, CircleSample):
        if strategy.count < 1:
            raise EmptySampleError("circle sample needs count >= 1")
        angles = 2.0 * np.pi * np.arange(strategy.count) / strategy.count
        pts = strategy.center + strategy.radius * np.exp(1j * angles)
        for z in pts:
            if not R.near_region(z):
                raise EmptySampleError(
                    f"circle point {z:.4g} does not lie in the raster region"
                )
        labels = tuple(f"c{k}" for k in range(strategy.count))
        return FiniteSpace(labels, pts)

    if isinstance(strategy, InteriorGrid):
        if strategy.step <= 0:
            raise EmptySampleError("interior grid step must be positive")
        eroded = ndimage.binary_erosion(R.grid, structure=FOUR_CONNECTED)
        rows, cols = R.grid.shape
        x0, y0 = R.origin.real, R.origin.imag
        xs = x0 + strategy.step * (0.5 + np.arange(int(cols * R.pixel_size / strategy.step) + 2))
        ys = y0 + strategy.step * (0.5 + np.arange(int(rows * R.pixel_size / strategy.step) + 2))
        pts = []
        for y in ys:
            for x in xs:
                r, c = R.pixel_of(complex(x, y))
                if 0 <= r < rows and 0 <= c < cols and eroded[r, c]:
                    pts.append(complex(x, y))
        if not pts:
            raise EmptySampleError("interior grid hit no interior pixel")
        labels = tuple(f"g{k}" for k in range(len(pts)))
        return FiniteSpace(labels, np.array(pts))

    if isinstance(strategy, BoundaryUniform):
        centers = topological_boundary_raster(R)
        if strategy.count < 1 or strategy.count > centers.size:
            raise EmptySampleError(
                f"requested {strategy.count} boundary points, have {centers.size}"
            )
        pts = _farthest_point_subset(centers, strategy.count)
        labels = tuple(f"b{k}" for k in range(strategy.count))
        return FiniteSpace(labels, pts)

    raise TypeError(f"unknown sampling strategy {strategy!r}")


# ---------------------------------------------------------------------------
# PGM + JSON persistence

PGM_SET = 255
PGM_UNSET = 0


def write_pgm(path, R: RasterRegion) -> None:
    """Plain P2 PGM (0 = unset, 255 = set) plus a JSON geometry sidecar."""
    path = Path(path)
    rows = []
    for row in R.grid[::-1]:  # top of the image = largest imaginary part
        rows.append(" ".join(str(PGM_SET if v else PGM_UNSET) for v in row))
    text = f"P2\n{R.grid.shape[1]} {R.grid.shape[0]}\n255\n" + "\n".join(rows) + "\n"
    path.write_text(text)
    sidecar = {
        "origin": complex_to_pair(R.origin),
        "pixel_size": R.pixel_size,
    }
    path.with_suffix(path.suffix + ".json").write_text(
        json.dumps(sidecar, sort_keys=True) + "\n"
    )


def read_pgm(path) -> RasterRegion:
    path = Path(path)
    tokens: list[str] = []
    for line in path.read_text().splitlines():
        line = line.split("#", 1)[0]
        tokens.extend(line.split())
    if tokens[0] != "P2":
        raise ValueError("only plain P2 PGM files are supported")
    cols, rows, _maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    values = np.array(tokens[4 : 4 + rows * cols], dtype=int).reshape(rows, cols)
    sidecar = json.loads(path.with_suffix(path.suffix + ".json").read_text())
    return RasterRegion(
        (values > 127)[::-1],
        pair_to_complex(sidecar["origin"]),
        float(sidecar["pixel_size"]),
    )
