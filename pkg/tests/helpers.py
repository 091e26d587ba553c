"""Shared construction helpers for the test suite."""

from __future__ import annotations

import numpy as np

from sqpeg.curve import PolyCurve


def random_rotation(dim: int, rng) -> np.ndarray:
    """Haar-ish random rotation matrix (det +1) from a QR factorization."""
    m = rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(m)
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_star_polygon(rng, n_min=10, n_max=200, z_jitter=0.0) -> PolyCurve:
    """Random closed embedded polygon: star-shaped about the origin.

    Strictly increasing vertex angles with positive radii give a simple
    polygon by construction; optional small z jitter lifts it to 3D.
    """
    n = int(rng.integers(n_min, n_max + 1))
    angles = np.sort(rng.uniform(0.0, 2.0 * np.pi, n))
    # enforce distinct angles so consecutive vertices never coincide
    while np.min(np.diff(angles, append=angles[0] + 2 * np.pi)) < 1e-4:
        angles = np.sort(rng.uniform(0.0, 2.0 * np.pi, n))
    radii = rng.uniform(0.5, 1.5, n)
    pts = np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])
    if z_jitter > 0.0:
        pts = np.column_stack([pts, z_jitter * rng.uniform(-1.0, 1.0, n)])
    return PolyCurve(pts, closed=True)


def random_cusp_free_polygon(rng, n_min=6, n_max=50, max_turn=2.6) -> PolyCurve:
    """Random closed polygon whose turning angles all stay below max_turn."""
    while True:
        poly = random_star_polygon(rng, n_min, n_max)
        _, ang = poly._atoms
        if np.max(ang) < max_turn:
            return poly


def point_to_polyline_distance(point, curve: PolyCurve) -> float:
    """Distance from a point to the polygonal chain of `curve`."""
    E = curve.num_edges
    starts = curve.vertices[:E]
    d = curve._edge_vecs
    p = np.asarray(point, dtype=float)
    t = np.einsum("ij,ij->i", p - starts, d) / np.einsum("ij,ij->i", d, d)
    proj = starts + np.clip(t, 0.0, 1.0)[:, None] * d
    return float(np.min(np.linalg.norm(p - proj, axis=1)))
