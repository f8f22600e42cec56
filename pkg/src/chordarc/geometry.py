"""Closed planar polygons: frames, curvature, length, area, resampling, embeddedness.

A curve is a positively or negatively oriented closed polygon with N >= 8
vertices.  All quantities use the convention that the outward normal is the
tangent rotated by -90 degrees, nu = (tau_y, -tau_x), so a positively
oriented (counterclockwise) circle of radius R has curvature +1/R.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import CuspError, DegenerateEdgeError, OrientationError

log = logging.getLogger(__name__)

MIN_VERTICES = 8

# Edge-length spread (max/min - 1) accepted as "uniform" by the resampler.
RESAMPLE_TOL = 1e-11
# Relative scale below which a near-degenerate segment contact counts as a hit.
EMBED_EPS_REL = 1e-13


@dataclass(frozen=True)
class Point2:
    """A point in the plane; both coordinates must be finite."""

    x: float
    y: float

    def __post_init__(self):
        if not (np.isfinite(self.x) and np.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")


@dataclass(frozen=True)
class DiscreteCurve:
    """Closed oriented polygon, vertices as an (N, 2) float64 array.

    The vertex array is copied and frozen on construction; every derived
    quantity is cached, so instances are immutable values that are safe to
    share between threads.
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=np.float64, copy=True, order="C")
        if v.ndim != 2 or v.shape[1] != 2:
            raise ValueError(f"expected (N, 2) vertex array, got shape {v.shape}")
        if v.shape[0] < MIN_VERTICES:
            raise ValueError(f"need at least {MIN_VERTICES} vertices, got {v.shape[0]}")
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite vertex coordinates")
        edges = np.roll(v, -1, axis=0) - v
        if np.any(np.hypot(edges[:, 0], edges[:, 1]) == 0.0):
            raise ValueError("consecutive vertices coincide (zero-length edge)")
        v.flags.writeable = False
        object.__setattr__(self, "vertices", v)

    @property
    def n(self) -> int:
        return self.vertices.shape[0]

    @cached_property
    def edge_vectors(self) -> np.ndarray:
        """Edge k runs from vertex k to vertex k+1 (mod N)."""
        e = np.roll(self.vertices, -1, axis=0) - self.vertices
        e.flags.writeable = False
        return e

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        e = np.hypot(self.edge_vectors[:, 0], self.edge_vectors[:, 1])
        e.flags.writeable = False
        return e

    @cached_property
    def arc_positions(self) -> np.ndarray:
        """Cumulative arc length of each vertex from vertex 0 (length N)."""
        c = np.concatenate(([0.0], np.cumsum(self.edge_lengths[:-1])))
        c.flags.writeable = False
        return c

    @cached_property
    def length(self) -> float:
        return float(np.sum(self.edge_lengths))

    @cached_property
    def signed_area(self) -> float:
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        xn, yn = np.roll(x, -1), np.roll(y, -1)
        return float(0.5 * np.sum(x * yn - xn * y))

    @property
    def orientation(self) -> int:
        """+1 for counterclockwise, -1 for clockwise."""
        a = self.signed_area
        if a == 0.0:
            raise OrientationError("degenerate polygon: signed area is zero")
        return 1 if a > 0.0 else -1

    @cached_property
    def turning(self) -> np.ndarray:
        """Signed exterior angle at each vertex, each in (-pi, pi)."""
        u = self.edge_vectors / self.edge_lengths[:, None]
        up = np.roll(u, 1, axis=0)
        cross = up[:, 0] * u[:, 1] - up[:, 1] * u[:, 0]
        dot = up[:, 0] * u[:, 0] + up[:, 1] * u[:, 1]
        phi = np.arctan2(cross, dot)
        if np.any(np.abs(phi) >= np.pi - 1e-12):
            k = int(np.argmax(np.abs(phi)))
            raise CuspError(f"turning angle {phi[k]:+.6f} at vertex {k} is a cusp")
        phi.flags.writeable = False
        return phi

    def reversed(self) -> "DiscreteCurve":
        """Opposite orientation, keeping vertex 0 in place."""
        v = self.vertices
        return DiscreteCurve(np.vstack((v[:1], v[:0:-1])))

    def translated(self, dx: float, dy: float) -> "DiscreteCurve":
        return DiscreteCurve(self.vertices + np.array([dx, dy]))

    def scaled(self, factor: float) -> "DiscreteCurve":
        """Homothety about the vertex centroid."""
        c = self.vertices.mean(axis=0)
        return DiscreteCurve(c + factor * (self.vertices - c))


@dataclass(frozen=True)
class VertexFrame:
    """Unit tangent, outward unit normal and curvature at one vertex."""

    tangent: np.ndarray
    normal: np.ndarray
    curvature: float


@dataclass(frozen=True)
class Frames:
    """Per-vertex frames as arrays: tangent (N,2), normal (N,2), kappa (N,)."""

    tangent: np.ndarray
    normal: np.ndarray
    kappa: np.ndarray

    def __len__(self) -> int:
        return self.kappa.shape[0]

    def __getitem__(self, i: int) -> VertexFrame:
        return VertexFrame(self.tangent[i], self.normal[i], float(self.kappa[i]))


def total_length(curve: DiscreteCurve) -> float:
    """Perimeter of the polygon."""
    return curve.length


def enclosed_area(curve: DiscreteCurve) -> float:
    """Shoelace signed area; positive iff positively oriented."""
    return curve.signed_area


def positive_area(curve: DiscreteCurve) -> float:
    """Signed area, raising if the caller's positive-orientation requirement fails."""
    a = curve.signed_area
    if a <= 0.0:
        raise OrientationError(f"non-positive enclosed area {a:.6g}")
    return a


def turning_angles(curve: DiscreteCurve) -> np.ndarray:
    """Signed exterior angles; their sum is 2*pi*orientation."""
    return curve.turning


def vertex_frames(curve: DiscreteCurve) -> Frames:
    """Tangents from central differences, nu = (tau_y, -tau_x), kappa = angle/ds.

    The curvature at vertex i is the turning angle divided by the average of
    the two adjacent edge lengths.  On a regular inscribed polygon this makes
    kappa, the area form and the length form mutually consistent, so circles
    are exactly stationary under the conserved forcing families.
    """
    L = curve.length
    lo = float(np.min(curve.edge_lengths))
    if lo < 1e-14 * L:
        k = int(np.argmin(curve.edge_lengths))
        raise DegenerateEdgeError(f"edge {k} has length {lo:.3e} < 1e-14 * L")
    phi = curve.turning
    chord = np.roll(curve.vertices, -1, axis=0) - np.roll(curve.vertices, 1, axis=0)
    norm = np.hypot(chord[:, 0], chord[:, 1])
    if np.any(norm == 0.0):
        raise DegenerateEdgeError("central chord vanished (fold-back vertex)")
    tangent = chord / norm[:, None]
    normal = np.column_stack((tangent[:, 1], -tangent[:, 0]))
    ds = 0.5 * (np.roll(curve.edge_lengths, 1) + curve.edge_lengths)
    kappa = phi / ds
    for a in (tangent, normal, kappa):
        a.flags.writeable = False
    return Frames(tangent, normal, kappa)


def vertex_ds(curve: DiscreteCurve) -> np.ndarray:
    """Vertex-centred arc measure: half the sum of the adjacent edge lengths."""
    return 0.5 * (np.roll(curve.edge_lengths, 1) + curve.edge_lengths)


def area_form(curve: DiscreteCurve) -> np.ndarray:
    """Weights w with dA = sum_i w_i <v_i, nu_i> exact for vertex velocities v.

    w_i is half the distance between the two neighbours of vertex i, which is
    the exact gradient of the shoelace area projected on the outward normal.
    """
    chord = np.roll(curve.vertices, -1, axis=0) - np.roll(curve.vertices, 1, axis=0)
    return 0.5 * np.hypot(chord[:, 0], chord[:, 1])


def length_form(curve: DiscreteCurve) -> np.ndarray:
    """Weights w with dL = sum_i w_i <v_i, nu_i> exact for vertex velocities v."""
    u = curve.edge_vectors / curve.edge_lengths[:, None]
    diff = np.roll(u, 1, axis=0) - u
    frames = vertex_frames(curve)
    return diff[:, 0] * frames.normal[:, 0] + diff[:, 1] * frames.normal[:, 1]


def total_curvature(curve: DiscreteCurve) -> float:
    """Discrete integral of kappa ds; equals 2*pi*orientation exactly."""
    return float(np.sum(curve.turning))


def integral_kappa_squared(curve: DiscreteCurve) -> float:
    """Discrete integral of kappa^2 ds over the curve."""
    frames = vertex_frames(curve)
    return float(np.sum(frames.kappa**2 * vertex_ds(curve)))


def edge_ratio(curve: DiscreteCurve) -> float:
    """max edge length / min edge length."""
    e = curve.edge_lengths
    return float(np.max(e) / np.min(e))


def ensure_positive_orientation(curve: DiscreteCurve) -> DiscreteCurve:
    """Reverse a clockwise curve, logging a notice; no-op when already CCW."""
    if curve.orientation > 0:
        return curve
    log.info("input curve was negatively oriented; reversing vertex order")
    return curve.reversed()


def _place_along(pts: np.ndarray, n: int) -> np.ndarray:
    """n points at equal cumulative arc spacing along the closed polygon pts."""
    closed = np.vstack((pts, pts[:1]))
    seg = np.diff(closed, axis=0)
    seglen = np.hypot(seg[:, 0], seg[:, 1])
    cum = np.concatenate(([0.0], np.cumsum(seglen)))
    total = cum[-1]
    targets = np.arange(n) * (total / n)
    idx = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, len(seglen) - 1)
    frac = (targets - cum[idx]) / seglen[idx]
    return closed[idx] + frac[:, None] * seg[idx]


def resample_uniform(curve: DiscreteCurve, n: int, *, max_iter: int = 64) -> DiscreteCurve:
    """Redistribute to n vertices with equal edge lengths, preserving length.

    Placement at equal cumulative arc spacing along the current polygon is
    iterated to a fixed point (uniform chords), starting from vertex 0, then
    the result is rescaled about its centroid so the total length matches the
    input exactly.  Uniform input at the same n is returned unchanged.
    """
    if n < MIN_VERTICES:
        raise ValueError(f"resample target n={n} below minimum {MIN_VERTICES}")
    L0 = curve.length
    pts = curve.vertices

    def spread(p: np.ndarray) -> float:
        closed = np.vstack((p, p[:1]))
        e = np.hypot(*(np.diff(closed, axis=0).T))
        return float((e.max() - e.min()) / e.mean())

    if n == curve.n and spread(pts) <= RESAMPLE_TOL:
        return curve

    for _ in range(max_iter):
        pts = _place_along(pts, n)
        if spread(pts) <= RESAMPLE_TOL:
            break

    closed = np.vstack((pts, pts[:1]))
    e = np.hypot(*(np.diff(closed, axis=0).T))
    factor = L0 / float(e.sum())
    if factor != 1.0:
        c = pts.mean(axis=0)
        pts = c + factor * (pts - c)
    return DiscreteCurve(pts)


def is_embedded(curve: DiscreteCurve) -> tuple[bool, tuple[int, int] | None]:
    """Whether no two non-adjacent edges intersect; witness pair on failure.

    Segment tests use sign-of-orientation predicates on doubles with an
    epsilon of 1e-13 * L; touching configurations count as not embedded.
    """
    eps = EMBED_EPS_REL * curve.length
    ok, i, j = _kernels.embedded_sweep(curve.vertices, eps)
    if ok:
        return True, None
    return False, (int(i), int(j))


def segments_intersect(p1, q1, p2, q2, eps: float) -> bool:
    """Single segment pair test with the same semantics as is_embedded."""
    return bool(
        _kernels.segments_hit(
            float(p1[0]), float(p1[1]), float(q1[0]), float(q1[1]),
            float(p2[0]), float(p2[1]), float(q2[0]), float(q2[1]), float(eps),
        )
    )


def write_curve(path: str | Path, curve: DiscreteCurve) -> None:
    """Plain text: header 'N <count> closed', then one 'x y' line per vertex."""
    with open(path, "w") as fh:
        fh.write(f"N {curve.n} closed\n")
        for x, y in curve.vertices:
            fh.write(f"{x:.17g} {y:.17g}\n")


def read_curve(path: str | Path) -> DiscreteCurve:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 3 or header[0] != "N" or header[2] != "closed":
            raise ValueError(f"{path}: bad curve header {header!r}")
        count = int(header[1])
        rows = [line.split() for line in fh if line.strip()]
    if len(rows) != count:
        raise ValueError(f"{path}: header says {count} vertices, found {len(rows)}")
    return DiscreteCurve(np.array(rows, dtype=np.float64))
