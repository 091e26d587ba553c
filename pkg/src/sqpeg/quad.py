"""Quadrilaterals in R^n: square-likeness (equal sides, equal diagonals),
the apex half-angle theta, and the turning of the open three-edge chain."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .curve import angle_between

__all__ = ["Quad", "QuadMetrics", "make_square_like"]

QUARTER_PI = math.pi / 4.0

# row k lists the vertex triple omitting vertex k
_TRIPLES = np.array([[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]])


@dataclass(frozen=True, eq=False)
class Quad:
    """Four pairwise-distinct points p, q, r, s of the same dimension."""

    p: np.ndarray
    q: np.ndarray
    r: np.ndarray
    s: np.ndarray

    def __post_init__(self):
        pts = [np.asarray(x, dtype=float) for x in (self.p, self.q, self.r, self.s)]
        dim = pts[0].shape
        if any(x.shape != dim or x.ndim != 1 for x in pts):
            raise ValueError("all four points must share one dimension")
        for i in range(4):
            for j in range(i + 1, 4):
                if np.array_equal(pts[i], pts[j]):
                    raise ValueError("quad points must be pairwise distinct")
        object.__setattr__(self, "p", pts[0])
        object.__setattr__(self, "q", pts[1])
        object.__setattr__(self, "r", pts[2])
        object.__setattr__(self, "s", pts[3])

    @classmethod
    def from_points(cls, points) -> "Quad":
        pts = np.asarray(points, dtype=float)
        if pts.shape[0] != 4:
            raise ValueError("need exactly four points")
        return cls(pts[0], pts[1], pts[2], pts[3])

    @cached_property
    def points(self) -> np.ndarray:
        return np.stack([self.p, self.q, self.r, self.s])

    # -- elementary measurements ------------------------------------------

    @cached_property
    def _squared_measures(self):
        """(squared sides, squared diagonals), computed once per quad."""
        pts = self.points
        edges = np.roll(pts, -1, axis=0) - pts
        side_sq = np.einsum("ij,ij->i", edges, edges)
        d1 = self.r - self.p
        d2 = self.s - self.q
        diag_sq = np.array([float(d1 @ d1), float(d2 @ d2)])
        return side_sq, diag_sq

    def side_lengths(self) -> np.ndarray:
        """|pq|, |qr|, |rs|, |sp|."""
        return np.sqrt(self._squared_measures[0])

    def diagonal_lengths(self) -> np.ndarray:
        """|pr|, |qs|."""
        return np.sqrt(self._squared_measures[1])

    def residual(self) -> np.ndarray:
        """(|pq|^2-|qr|^2, |qr|^2-|rs|^2, |rs|^2-|sp|^2, |pr|^2-|qs|^2).

        All four components vanish exactly when the quad has equal sides and
        equal diagonals.  Squared distances keep the map smooth in the vertex
        coordinates, which the refinement solver relies on.
        """
        sq, dq = self._squared_measures
        return np.array([sq[0] - sq[1], sq[1] - sq[2], sq[2] - sq[3], dq[0] - dq[1]])

    def residual_norm(self) -> float:
        """max |residual component| / (mean side)^2, dimensionless."""
        mean_side = float(np.mean(self.side_lengths()))
        return float(np.max(np.abs(self.residual()))) / (mean_side * mean_side)

    def is_square_like(self, tol: float) -> bool:
        """True iff max |residual| <= tol * mean squared side."""
        if tol < 0.0:
            raise ValueError("tol must be nonnegative")
        mean_sq = float(np.mean(self.side_lengths() ** 2))
        return bool(np.max(np.abs(self.residual())) <= tol * mean_sq)

    def theta(self, tol: float = 1e-9) -> float:
        """Apex half-angle: arcsin(mean diagonal / (2 * mean side)).

        For an exact square-like quad the diagonal is 2*sin(theta) times the
        side, so this inverts the relation; clamped to [0, pi/2].
        """
        mean_side = float(np.mean(self.side_lengths()))
        mean_diag = float(np.mean(self.diagonal_lengths()))
        if mean_side <= 0.0:
            raise ValueError("degenerate quad: zero mean side")
        ratio = mean_diag / (2.0 * mean_side)
        if ratio > 1.0 + tol:
            raise ValueError(f"diagonal/(2*side) = {ratio:.6g} > 1: not realizable")
        return math.asin(min(ratio, 1.0))

    def open_turning(self) -> float:
        """Turning at q plus turning at r along the open chain p->q->r->s.

        For an exact square-like quad this equals 2*pi - 4*theta, which is at
        least pi, with equality exactly for a planar square.
        """
        return angle_between(self.q - self.p, self.r - self.q) + angle_between(
            self.r - self.q, self.s - self.r
        )

    def planarity_defect(self) -> float:
        """Distance of the fourth point from the affine span of the other three.

        The most-spread triple (largest triangle area) is used as the base, so
        the measure stays robust when three points are nearly collinear.
        In dimension 2 the defect is 0 by convention.
        """
        if self.p.shape[0] == 2:
            return 0.0
        pts = self.points
        if self.p.shape[0] == 3:
            tri = pts[_TRIPLES]
            u = tri[:, 1] - tri[:, 0]
            w = tri[:, 2] - tri[:, 0]
            normals = np.cross(u, w)
            norms_sq = np.einsum("ij,ij->i", normals, normals)
            k = int(np.argmax(norms_sq))  # row k is the triple omitting point k
            nk = math.sqrt(float(norms_sq[k]))
            if nk <= 1e-14:
                return self._defect_by_projection(tri[k], pts[k])
            gap = pts[k] - tri[k, 0]
            return float(abs(gap @ normals[k]) / nk)
        best_area = -1.0
        best = None
        for drop in range(4):
            tri = np.delete(pts, drop, axis=0)
            u = tri[1] - tri[0]
            w = tri[2] - tri[0]
            g = np.dot(u, u) * np.dot(w, w) - np.dot(u, w) ** 2
            area = math.sqrt(max(g, 0.0))
            if area > best_area:
                best_area = area
                best = (tri, pts[drop])
        tri, other = best
        return self._defect_by_projection(tri, other)

    def _defect_by_projection(self, tri, other) -> float:
        u = tri[1] - tri[0]
        w = tri[2] - tri[0]
        # orthonormalize {u, w}, dropping a near-degenerate second direction
        e1 = u / np.linalg.norm(u)
        w_perp = w - np.dot(w, e1) * e1
        nw = np.linalg.norm(w_perp)
        d = other - tri[0]
        proj = np.dot(d, e1) * e1
        if nw > 1e-14 * np.linalg.norm(w):
            e2 = w_perp / nw
            proj = proj + np.dot(d, e2) * e2
        return float(np.linalg.norm(d - proj))

    def is_planar_square(self, tol: float) -> bool:
        """Square-like, flat, and with theta at the planar extreme pi/4."""
        if tol < 0.0:
            raise ValueError("tol must be nonnegative")
        if not self.is_square_like(tol):
            return False
        mean_side = float(np.mean(self.side_lengths()))
        if self.planarity_defect() > tol * mean_side:
            return False
        try:
            th = self.theta()
        except ValueError:
            return False
        return abs(th - QUARTER_PI) <= tol

    def metrics(self) -> "QuadMetrics":
        sides = self.side_lengths()
        diags = self.diagonal_lengths()
        ratio = float(np.mean(diags)) / (2.0 * float(np.mean(sides)))
        theta = math.asin(min(ratio, 1.0)) if ratio <= 1.0 + 1e-9 else float("nan")
        return QuadMetrics(
            sides=sides,
            diagonals=diags,
            theta=theta,
            open_turning=self.open_turning(),
            planarity_defect=self.planarity_defect(),
            residual_norm=self.residual_norm(),
        )

    def transformed(self, rotation=None, translation=None) -> "Quad":
        """Apply a rigid motion x -> R x + t to all four points."""
        pts = self.points
        if rotation is not None:
            pts = pts @ np.asarray(rotation, dtype=float).T
        if translation is not None:
            pts = pts + np.asarray(translation, dtype=float)
        return Quad.from_points(pts)

    def to_json_dict(self) -> dict:
        return {"points": [[float(x) for x in row] for row in self.points]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "Quad":
        if not isinstance(data, dict) or "points" not in data:
            raise ValueError("quad JSON must be an object with a 'points' key")
        return cls.from_points(np.asarray(data["points"], dtype=float))


@dataclass(frozen=True)
class QuadMetrics:
    sides: np.ndarray
    diagonals: np.ndarray
    theta: float
    open_turning: float
    planarity_defect: float
    residual_norm: float


def make_square_like(theta: float, side: float = 1.0, dim: int = 3,
                     rotation=None, translation=None) -> Quad:
    """Construct an exact square-like quadrilateral with apex half-angle theta.

    Canonical placement before the optional rigid motion: the midpoint of qs
    at the origin, q = (0, sin theta, 0), s = (0, -sin theta, 0),
    p = (cos theta, 0, 0) and r = cos theta * (cos phi, 0, sin phi) with
    cos phi = 1 - 2 tan^2(theta); everything scales by `side`.  At
    theta = pi/4 the figure degenerates to the planar square (phi = pi).

    dim=2 is only available for the planar case theta = pi/4.
    """
    if not (0.0 < theta <= QUARTER_PI + 1e-12):
        raise ValueError("theta must lie in (0, pi/4]")
    if side <= 0.0:
        raise ValueError("side must be positive")

    c = math.cos(theta)
    s = math.sin(theta)
    tan_sq = math.tan(theta) ** 2
    cphi = 1.0 - 2.0 * tan_sq
    if cphi <= -1.0 + 1e-12:
        cphi, sphi = -1.0, 0.0  # planar square, snapped to keep the defect exact
    else:
        sphi = math.sqrt(max(1.0 - cphi * cphi, 0.0))

    if dim == 2:
        if sphi != 0.0:
            raise ValueError("dim=2 requires the planar case theta = pi/4")
        pts = side * np.array([[c, 0.0], [0.0, s], [-c, 0.0], [0.0, -s]])
    elif dim == 3:
        pts = side * np.array(
            [
                [c, 0.0, 0.0],
                [0.0, s, 0.0],
                [c * cphi, 0.0, c * sphi],
                [0.0, -s, 0.0],
            ]
        )
    else:
        raise ValueError("dim must be 2 or 3")

    quad = Quad.from_points(pts)
    if rotation is not None or translation is not None:
        quad = quad.transformed(rotation, translation)
    return quad
