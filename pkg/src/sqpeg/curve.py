"""Polygonal curves in R^n: arclength parametrization, turning angles,
total curvature as a sum of vertex atoms, cusp detection, embeddedness."""

from __future__ import annotations

import math
from functools import cached_property

import numpy as np

__all__ = ["PolyCurve", "angle_between", "segment_to_segments_distance"]

_EPS = 1e-12


def angle_between(u, v) -> float:
    """Angle in [0, pi] between two vectors, accurate near both 0 and pi.

    Uses 2*atan2(|a-b|, |a+b|) on the normalized vectors; acos(dot) loses
    precision exactly at the extremes, which cusp detection cares about.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("angle undefined for zero vector")
    a = u / nu
    b = v / nv
    return 2.0 * math.atan2(float(np.linalg.norm(a - b)), float(np.linalg.norm(a + b)))


def segment_to_segments_distance(p0, p1, q0, q1):
    """Minimum distances between segment (p0,p1) and a batch of segments.

    p0, p1: (n,) endpoints of a single segment.
    q0, q1: (k, n) endpoints of k segments.
    Returns (dist, s, t): distances and the clamped parameters of the
    closest points, p0 + s*(p1-p0) and q0 + t*(q1-q0).  Segments must have
    positive length.
    """
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    q0 = np.atleast_2d(np.asarray(q0, dtype=float))
    q1 = np.atleast_2d(np.asarray(q1, dtype=float))

    d1 = p1 - p0
    d2 = q1 - q0
    r = p0 - q0
    a = float(np.dot(d1, d1))
    e = np.einsum("ij,ij->i", d2, d2)
    b = d2 @ d1
    c = r @ d1
    f = np.einsum("ij,ij->i", d2, r)

    denom = a * e - b * b
    s = np.where(denom > _EPS, (b * f - c * e) / np.where(denom > _EPS, denom, 1.0), 0.0)
    s = np.clip(s, 0.0, 1.0)
    t = (b * s + f) / e
    t_clamped = np.clip(t, 0.0, 1.0)
    s = np.where(t != t_clamped, np.clip((t_clamped * b - c) / a, 0.0, 1.0), s)
    t = t_clamped

    cp = p0 + s[:, None] * d1
    cq = q0 + t[:, None] * d2
    dist = np.linalg.norm(cp - cq, axis=1)
    return dist, s, t


class PolyCurve:
    """Ordered vertex chain in R^n, open or closed, with cached arclength table.

    Parameters on a closed curve are real numbers taken modulo the total
    length L; every public operation normalizes first.
    """

    def __init__(self, vertices, closed: bool):
        v = np.array(vertices, dtype=float)
        if v.ndim != 2:
            raise ValueError("vertices must be a 2-d array of shape (m, n)")
        if v.shape[1] < 2:
            raise ValueError("dimension must be at least 2")
        if not np.all(np.isfinite(v)):
            raise ValueError("vertices must be finite")
        minimum = 3 if closed else 2
        if v.shape[0] < minimum:
            raise ValueError(f"need at least {minimum} vertices ({'closed' if closed else 'open'})")

        if closed:
            edges = np.roll(v, -1, axis=0) - v
        else:
            edges = v[1:] - v[:-1]
        lens = np.linalg.norm(edges, axis=1)
        if np.any(lens <= 0.0):
            bad = int(np.argmin(lens))
            raise ValueError(f"coincident consecutive vertices at index {bad}")

        self.vertices = v
        self.closed = bool(closed)
        self._edge_vecs = edges
        self._edge_lens = lens
        # arclength at each vertex; _knots appends the full length for closed
        self.cum_len = np.concatenate(([0.0], np.cumsum(lens)))[: v.shape[0]]
        self.length = float(np.sum(lens))
        self._knots = np.concatenate((self.cum_len, [self.length]))

    # -- basic attributes ------------------------------------------------

    @property
    def dimension(self) -> int:
        return self.vertices.shape[1]

    @property
    def num_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def num_edges(self) -> int:
        return self.num_vertices if self.closed else self.num_vertices - 1

    def __repr__(self):
        kind = "closed" if self.closed else "open"
        return f"PolyCurve({self.num_vertices} vertices, {kind}, n={self.dimension}, L={self.length:.6g})"

    # -- parametrization -------------------------------------------------

    def normalize_param(self, s):
        """Map parameters into [0, L) for closed curves; validate for open."""
        s = np.asarray(s, dtype=float)
        if self.closed:
            return np.mod(s, self.length)
        if np.any(s < -0.0) or np.any(s > self.length):
            raise ValueError(f"parameter out of range [0, {self.length}] on open curve")
        return s

    def point_at(self, s):
        """Point at arclength s (linear interpolation on the containing edge).

        Accepts a scalar or an array of parameters; closed curves wrap
        modulo L.  point_at(cum_len[i]) reproduces vertices[i] exactly.
        """
        scalar = np.isscalar(s) or np.ndim(s) == 0
        s = np.atleast_1d(self.normalize_param(s))
        idx = np.searchsorted(self._knots, s, side="right") - 1
        idx = np.clip(idx, 0, self.num_edges - 1)
        local = s - self.cum_len[idx]
        frac = local / self._edge_lens[idx]
        pts = self.vertices[idx] + frac[:, None] * self._edge_vecs[idx]
        if not self.closed:
            # exact hit of the far endpoint
            at_end = s == self.length
            if np.any(at_end):
                pts[at_end] = self.vertices[-1]
        exact = frac == 0.0
        if np.any(exact):
            pts[exact] = self.vertices[idx[exact]]
        return pts[0] if scalar else pts

    def arc_length(self, a: float, b: float) -> float:
        """Length of the directed arc from a forward to b (wrapping if closed)."""
        if self.closed:
            a = float(np.mod(a, self.length))
            b = float(np.mod(b, self.length))
            return float(np.mod(b - a, self.length))
        a = float(self.normalize_param(a))
        b = float(self.normalize_param(b))
        if b < a:
            raise ValueError("on an open curve the arc must run forward (a <= b)")
        return b - a

    # -- curvature -------------------------------------------------------

    def turning_angle(self, i: int) -> float:
        """Exterior angle in [0, pi] between the edges meeting at vertex i."""
        m = self.num_vertices
        if self.closed:
            i = i % m
            e_in = self._edge_vecs[(i - 1) % m]
            e_out = self._edge_vecs[i]
        else:
            if i <= 0 or i >= m - 1:
                raise ValueError("turning angle undefined at an open-curve endpoint")
            e_in = self._edge_vecs[i - 1]
            e_out = self._edge_vecs[i]
        return angle_between(e_in, e_out)

    @cached_property
    def _atoms(self):
        """(positions, angles) of the curvature atoms, one per corner vertex."""
        if self.closed:
            e_in = np.roll(self._edge_vecs, 1, axis=0)
            e_out = self._edge_vecs
            pos = self.cum_len
        else:
            e_in = self._edge_vecs[:-1]
            e_out = self._edge_vecs[1:]
            pos = self.cum_len[1:-1]
        u = e_in / np.linalg.norm(e_in, axis=1)[:, None]
        w = e_out / np.linalg.norm(e_out, axis=1)[:, None]
        ang = 2.0 * np.arctan2(np.linalg.norm(u - w, axis=1), np.linalg.norm(u + w, axis=1))
        return pos, ang

    @cached_property
    def _atom_prefix(self):
        pos, ang = self._atoms
        return np.concatenate(([0.0], np.cumsum(ang)))

    def total_curvature(self) -> float:
        """Sum of turning angles over all corners (interior corners if open)."""
        _, ang = self._atoms
        return float(np.sum(ang))

    def _atom_mass_between(self, x: float, y: float) -> float:
        """Mass of atoms with position strictly inside (x, y), 0 <= x <= y <= L."""
        pos, _ = self._atoms
        prefix = self._atom_prefix
        lo = np.searchsorted(pos, x, side="right")
        hi = np.searchsorted(pos, y, side="left")
        if hi <= lo:
            return 0.0
        return float(prefix[hi] - prefix[lo])

    def subarc_curvature(self, a: float, b: float) -> float:
        """Curvature mass of the open directed arc (a, b).

        Only atoms strictly interior to the arc contribute; a parameter that
        lands exactly on a vertex excludes that vertex's atom.
        """
        if self.closed:
            a = float(np.mod(a, self.length))
            span = float(np.mod(b - a, self.length))
            if span == 0.0:
                return 0.0
            b = a + span
            if b <= self.length:
                return self._atom_mass_between(a, b)
            total = self._atom_mass_between(a, self.length)
            # the seam vertex sits at position 0 == L
            pos, ang = self._atoms
            if pos[0] == 0.0 and b - self.length > 0.0:
                total += float(ang[0])
            return total + self._atom_mass_between(0.0, b - self.length)
        a = float(self.normalize_param(a))
        b = float(self.normalize_param(b))
        if b < a:
            raise ValueError("on an open curve the arc must run forward (a <= b)")
        return self._atom_mass_between(a, b)

    def detect_cusps(self, tol: float):
        """Vertex indices whose turning angle is within tol of a full reversal."""
        if tol <= 0.0:
            raise ValueError("tol must be positive")
        _, ang = self._atoms
        hits = np.nonzero(ang >= math.pi - tol)[0]
        if not self.closed:
            hits = hits + 1  # atoms are indexed from the first interior vertex
        return [int(i) for i in hits]

    # -- embeddedness ----------------------------------------------------

    def is_embedded(self, clearance: float = 0.0) -> bool:
        """True iff no two non-adjacent edges approach within `clearance`.

        Adjacent edges (sharing a vertex) are exempt.  A self-crossing curve
        fails at any clearance >= 0.
        """
        if clearance < 0.0:
            raise ValueError("clearance must be nonnegative")
        E = self.num_edges
        v = self.vertices
        starts = v[: E]
        ends = starts + self._edge_vecs
        for i in range(E - 2):
            j_hi = E if not (self.closed and i == 0) else E - 1
            j_lo = i + 2
            if j_lo >= j_hi:
                continue
            dist, _, _ = segment_to_segments_distance(
                starts[i], ends[i], starts[j_lo:j_hi], ends[j_lo:j_hi]
            )
            if np.any(dist <= clearance):
                return False
        return True

    # -- interchange format ----------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "closed": self.closed,
            "vertices": [[float(x) for x in row] for row in self.vertices],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "PolyCurve":
        if not isinstance(data, dict):
            raise ValueError("curve JSON must be an object")
        for key in ("dimension", "closed", "vertices"):
            if key not in data:
                raise ValueError(f"curve JSON missing required key '{key}'")
        verts = np.asarray(data["vertices"], dtype=float)
        if verts.ndim != 2 or verts.shape[1] != int(data["dimension"]):
            raise ValueError("curve JSON 'vertices' does not match 'dimension'")
        return cls(verts, bool(data["closed"]))
