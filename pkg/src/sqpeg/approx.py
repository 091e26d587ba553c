"""Curve approximation machinery: arclength-equispaced inscribed polygons,
curvature-preserving corner rounding, discrete Frechet distance, the
Frechet/total-curvature length bound, and convergence measurements."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .curve import PolyCurve

__all__ = [
    "Segment",
    "Arc",
    "SmoothedCurve",
    "ConvergenceReport",
    "inscribe_polygon",
    "fillet_smooth",
    "discrete_frechet",
    "verify_length_bound",
    "convergence_report",
]


def inscribe_polygon(curve: PolyCurve, n: int) -> PolyCurve:
    """Polygon with n vertices on `curve`, equally spaced by arclength.

    Vertices sit at arclengths k*L/n (phase 0).  Inscription never increases
    total curvature.
    """
    minimum = 3 if curve.closed else 2
    if n < minimum:
        raise ValueError(f"need at least {minimum} vertices")
    if curve.closed:
        params = np.arange(n) * (curve.length / n)
    else:
        params = np.linspace(0.0, curve.length, n)
    return PolyCurve(curve.point_at(params), curve.closed)


# ---------------------------------------------------------------------------
# corner rounding
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    start: np.ndarray
    end: np.ndarray

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.end - self.start))

    def point(self, s: float) -> np.ndarray:
        d = self.end - self.start
        return self.start + (s / self.length) * d

    def to_json_dict(self) -> dict:
        return {
            "type": "seg",
            "start": [float(x) for x in self.start],
            "end": [float(x) for x in self.end],
        }


@dataclass(frozen=True)
class Arc:
    """Circular arc in the plane spanned by (e1, e2) about `center`.

    point(w) = center + radius*(cos(w)*e1 + sin(w)*e2) for w in [0, turning];
    the tangent rotates by exactly `turning` from e2.
    """

    center: np.ndarray
    radius: float
    e1: np.ndarray
    e2: np.ndarray
    turning: float

    @property
    def length(self) -> float:
        return self.radius * self.turning

    def point(self, s: float) -> np.ndarray:
        w = s / self.radius
        return self.center + self.radius * (math.cos(w) * self.e1 + math.sin(w) * self.e2)

    @property
    def start(self) -> np.ndarray:
        return self.center + self.radius * self.e1

    @property
    def end(self) -> np.ndarray:
        w = self.turning
        return self.center + self.radius * (math.cos(w) * self.e1 + math.sin(w) * self.e2)

    def to_json_dict(self) -> dict:
        return {
            "type": "arc",
            "center": [float(x) for x in self.center],
            "radius": float(self.radius),
            "e1": [float(x) for x in self.e1],
            "e2": [float(x) for x in self.e2],
            "turning": float(self.turning),
        }


@dataclass
class SmoothedCurve:
    """Tangent-continuous alternation of line segments and circular fillets."""

    pieces: list
    closed: bool
    max_trim: float = 0.0
    dropped_turning: float = 0.0  # exact-zero corners carry no arc

    def total_curvature(self) -> float:
        return float(
            sum(p.turning for p in self.pieces if isinstance(p, Arc)) + self.dropped_turning
        )

    def length(self) -> float:
        return float(sum(p.length for p in self.pieces))

    def sample(self, step: float) -> PolyCurve:
        """Polygonal sampling at arclength spacing <= step."""
        if step <= 0.0:
            raise ValueError("step must be positive")
        pts = []
        for piece in self.pieces:
            plen = piece.length
            nsub = max(1, math.ceil(plen / step))
            for j in range(nsub):
                pts.append(piece.point(plen * j / nsub))
        if not self.closed:
            pts.append(self.pieces[-1].end)
        pts = np.asarray(pts)
        keep = np.concatenate(([True], np.linalg.norm(np.diff(pts, axis=0), axis=1) > 1e-15))
        pts = pts[keep]
        minimum = 3 if self.closed else 2
        if pts.shape[0] < minimum:
            warnings.warn("step exceeds curve length; emitting a minimal coarse sample")
            total = self.length()
            params = [total * k / minimum for k in range(minimum)]
            pts = np.asarray([self.point_at(t) for t in params])
        return PolyCurve(pts, self.closed)

    def point_at(self, s: float) -> np.ndarray:
        acc = 0.0
        for piece in self.pieces:
            if s <= acc + piece.length:
                return piece.point(s - acc)
            acc += piece.length
        return self.pieces[-1].end

    def to_json_dict(self) -> dict:
        return {
            "closed": self.closed,
            "max_trim": float(self.max_trim),
            "pieces": [p.to_json_dict() for p in self.pieces],
        }


def _fillet_corner(v_prev, v, v_next, radius):
    """Arc replacing the corner at v, plus the trim length taken off each edge."""
    e_in = v - v_prev
    e_out = v_next - v
    len_in = np.linalg.norm(e_in)
    len_out = np.linalg.norm(e_out)
    d1 = e_in / len_in
    d2 = e_out / len_out
    alpha = 2.0 * math.atan2(float(np.linalg.norm(d2 - d1)), float(np.linalg.norm(d2 + d1)))
    if alpha >= math.pi - 1e-9:
        raise ValueError("cusp")
    if alpha < 1e-15:
        return None, 0.0, alpha

    half = alpha / 2.0
    r = min(radius, 0.49 * min(len_in, len_out) / 2.0 / math.tan(half))
    trim = r * math.tan(half)
    t1 = v - trim * d1
    bis = d2 - d1
    w = bis / np.linalg.norm(bis)
    center = v + (r / math.cos(half)) * w
    e1 = t1 - center
    e1 = e1 / np.linalg.norm(e1)
    arc = Arc(center=center, radius=r, e1=e1, e2=d1, turning=alpha)
    return arc, trim, alpha


def fillet_smooth(poly: PolyCurve, radius: float) -> SmoothedCurve:
    """Round every corner with a tangent circular arc turning exactly the
    corner's exterior angle, so total curvature is preserved.

    The radius is clamped per corner to 0.49*min(adjacent half-edge-lengths)
    / tan(angle/2), which keeps the two trims on any edge from overlapping.
    Corners within 1e-9 of a full reversal (cusps) cannot be rounded.
    """
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    v = poly.vertices
    m = poly.num_vertices

    if poly.closed:
        corner_ids = list(range(m))
    else:
        corner_ids = list(range(1, m - 1))

    arcs = {}
    trims = {}
    dropped = 0.0
    for i in corner_ids:
        prev_v = v[(i - 1) % m]
        next_v = v[(i + 1) % m]
        try:
            arc, trim, alpha = _fillet_corner(prev_v, v[i], next_v, radius)
        except ValueError:
            raise ValueError(f"cannot fillet a cusp at vertex {i}") from None
        arcs[i] = arc
        trims[i] = trim
        if arc is None:
            dropped += alpha

    pieces = []

    def add_segment(a, b):
        if np.linalg.norm(b - a) <= 1e-15:
            return
        if pieces and isinstance(pieces[-1], Segment):
            last = pieces[-1]
            da = b - last.start
            db = last.end - last.start
            # merge collinear continuations (arises at exact-zero corners)
            if np.linalg.norm(da / np.linalg.norm(da) - db / np.linalg.norm(db)) < 1e-12:
                pieces[-1] = Segment(last.start, b)
                return
        pieces.append(Segment(np.asarray(a, float), np.asarray(b, float)))

    def corner_entry(i):
        return v[i] - trims[i] * (v[i] - v[(i - 1) % m]) / np.linalg.norm(
            v[i] - v[(i - 1) % m]
        ) if arcs[i] is not None else v[i]

    def corner_exit(i):
        return arcs[i].end if arcs[i] is not None else v[i]

    if poly.closed:
        for i in range(m):
            if arcs[i] is not None:
                pieces.append(arcs[i])
            nxt = (i + 1) % m
            add_segment(corner_exit(i), corner_entry(nxt))
        # rotate so the list starts with a segment when one exists
        if pieces and isinstance(pieces[0], Arc):
            for k, p in enumerate(pieces):
                if isinstance(p, Segment):
                    pieces = pieces[k:] + pieces[:k]
                    break
    else:
        cursor = v[0]
        for i in range(1, m - 1):
            add_segment(cursor, corner_entry(i))
            if arcs[i] is not None:
                pieces.append(arcs[i])
            cursor = corner_exit(i)
        add_segment(cursor, v[m - 1])

    max_trim = max(trims.values()) if trims else 0.0
    return SmoothedCurve(pieces=pieces, closed=poly.closed, max_trim=float(max_trim),
                         dropped_turning=float(dropped))


# ---------------------------------------------------------------------------
# discrete Frechet distance and the length bound
# ---------------------------------------------------------------------------

def _dfd_from_matrix(dist) -> float:
    """Coupled-traversal dynamic program over a precomputed distance matrix."""
    rows = dist.tolist()
    k = len(rows[0])
    prev = rows[0][:]
    for j in range(1, k):
        prev[j] = max(prev[j - 1], prev[j])
    for i in range(1, len(rows)):
        row = rows[i]
        cur = [0.0] * k
        cur[0] = max(prev[0], row[0])
        for j in range(1, k):
            best = prev[j]
            if prev[j - 1] < best:
                best = prev[j - 1]
            if cur[j - 1] < best:
                best = cur[j - 1]
            cur[j] = best if best > row[j] else row[j]
        prev = cur
    return float(prev[-1])


def discrete_frechet(a: PolyCurve, b: PolyCurve) -> float:
    """Discrete Frechet distance between the vertex sequences of two curves.

    Both curves must be open or both closed; the closed case minimizes over
    cyclic shifts of the second vertex sequence.  The result is symmetric and
    upper-bounds the continuous Frechet distance up to the max edge length.
    """
    if a.closed != b.closed:
        raise ValueError("curves must be both open or both closed")
    if a.dimension != b.dimension:
        raise ValueError("curves must share one ambient dimension")
    pa, pb = a.vertices, b.vertices
    # shift the smaller sequence: the distance is symmetric and relative
    if a.closed and pa.shape[0] < pb.shape[0]:
        pa, pb = pb, pa
    diff = pa[:, None, :] - pb[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    if not a.closed:
        return _dfd_from_matrix(dist)
    best = math.inf
    for shift in range(pb.shape[0]):
        val = _dfd_from_matrix(np.roll(dist, -shift, axis=1))
        if val < best:
            best = val
    return best


def verify_length_bound(a: PolyCurve, b: PolyCurve) -> dict:
    """Check |Len(A) - Len(B)| <= delta(A,B) * (pi * max(TC) + 2).

    Uses the discrete Frechet distance, which dominates the continuous one,
    so a true inequality is never falsely reported violated.
    """
    delta = discrete_frechet(a, b)
    tc_a = a.total_curvature()
    tc_b = b.total_curvature()
    lhs = abs(a.length - b.length)
    rhs = delta * (math.pi * max(tc_a, tc_b) + 2.0)
    return {
        "len_a": a.length,
        "len_b": b.length,
        "len_diff": lhs,
        "frechet": delta,
        "tc_a": tc_a,
        "tc_b": tc_b,
        "bound": rhs,
        "holds": lhs <= rhs,
    }


# ---------------------------------------------------------------------------
# convergence in position / arclength / total curvature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceReport:
    index: int
    position_err: float
    length_err: float
    curvature_err: float


def convergence_report(target: PolyCurve, approximant: PolyCurve,
                       dyadic_depth: int = 6, position_samples: int = 4096,
                       index: int = 0) -> ConvergenceReport:
    """Measure how closely `approximant` tracks `target` in position,
    arclength, and curvature mass under arclength-fraction matching.

    Parameter a on the target corresponds to a * L_approx / L_target on the
    approximant.  position_err is the sup over `position_samples` parameters;
    the arc errors are maximized over all dyadic fraction pairs
    [j/2^d, k/2^d] at the deepest level d = dyadic_depth.
    """
    if dyadic_depth < 1:
        raise ValueError("dyadic_depth must be at least 1")
    if position_samples < 2:
        raise ValueError("position_samples must be at least 2")
    if target.closed != approximant.closed:
        raise ValueError("curves must be both open or both closed")
    lt, la = target.length, approximant.length

    if target.closed:
        fr = np.arange(position_samples) / position_samples
    else:
        fr = np.linspace(0.0, 1.0, position_samples)
    gap = target.point_at(fr * lt) - approximant.point_at(fr * la)
    position_err = float(np.max(np.linalg.norm(gap, axis=1)))

    denom = 2 ** dyadic_depth
    fracs = np.arange(denom + 1) / denom
    length_err = 0.0
    curvature_err = 0.0
    for j in range(denom):
        for k in range(j + 1, denom + 1):
            if target.closed and k - j == denom:
                continue  # a full wrap is parameter-identical, not a subarc
            f1, f2 = fracs[j], fracs[k]
            dlen = abs(target.arc_length(f1 * lt, f2 * lt)
                       - approximant.arc_length(f1 * la, f2 * la))
            dkap = abs(target.subarc_curvature(f1 * lt, f2 * lt)
                       - approximant.subarc_curvature(f1 * la, f2 * la))
            if dlen > length_err:
                length_err = dlen
            if dkap > curvature_err:
                curvature_err = dkap
    return ConvergenceReport(
        index=index,
        position_err=position_err,
        length_err=float(length_err),
        curvature_err=float(curvature_err),
    )
