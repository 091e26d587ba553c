"""Search for inscribed square-like quadrilaterals on a closed curve.

Pipeline: seed the 4-parameter configuration space on an arclength grid,
refine each seed by damped least squares on the equal-side/equal-diagonal
residual, validate, and deduplicate modulo the order-8 relabeling symmetry
of the quadrilateral (cyclic shifts and reversal).
"""

from __future__ import annotations

import itertools
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .curve import PolyCurve
from .pidist import verify_quad_arc_curvature
from .quad import Quad

__all__ = [
    "SolverConfig",
    "QuadSolution",
    "SolutionSet",
    "seed_grid",
    "refine",
    "find_quads",
    "brute_force_oracle",
    "parity_report",
]

_SEED_KEEP_QUANTILE = 25.0  # percentile of the residual prefilter
_ARC_KAPPA_TOL = 1e-6


@dataclass
class SolverConfig:
    """Knobs for the inscribed-quad search.  Length-scale fields left as None
    are resolved against the curve: dedup_tol = L/grid_m, gap_min = L/512,
    min_side = L/1000, fd_step = L/(16*grid_m)."""

    grid_m: int = 24
    max_iter: int = 60
    residual_tol: float = 1e-9
    dedup_tol: Optional[float] = None
    gap_min: Optional[float] = None
    min_side: Optional[float] = None
    fd_step: Optional[float] = None

    def resolved(self, curve: PolyCurve) -> "SolverConfig":
        L = curve.length
        cfg = SolverConfig(
            grid_m=self.grid_m,
            max_iter=self.max_iter,
            residual_tol=self.residual_tol,
            dedup_tol=self.dedup_tol if self.dedup_tol is not None else L / self.grid_m,
            gap_min=self.gap_min if self.gap_min is not None else L / 512.0,
            min_side=self.min_side if self.min_side is not None else L / 1000.0,
            fd_step=self.fd_step if self.fd_step is not None else L / (16.0 * self.grid_m),
        )
        if cfg.grid_m < 8:
            raise ValueError("grid_m must be at least 8")
        for name in ("max_iter", "residual_tol", "dedup_tol", "gap_min", "min_side", "fd_step"):
            if getattr(cfg, name) <= 0:
                raise ValueError(f"{name} must be positive")
        return cfg


@dataclass(frozen=True)
class QuadSolution:
    params: np.ndarray
    points: np.ndarray
    sides: np.ndarray
    diagonals: np.ndarray
    theta: float
    open_turning: float
    residual: np.ndarray
    residual_norm: float
    arc_kappa_ok: bool

    def to_json_dict(self) -> dict:
        return {
            "params": [float(t) for t in self.params],
            "points": [[float(x) for x in row] for row in self.points],
            "sides": [float(x) for x in self.sides],
            "diagonals": [float(x) for x in self.diagonals],
            "theta": float(self.theta),
            "open_turning": float(self.open_turning),
            "residual": float(self.residual_norm),
            "arc_kappa_ok": bool(self.arc_kappa_ok),
        }


@dataclass
class SolutionSet:
    solutions: list
    raw_count: int
    parity_note: str
    non_generic: bool = False
    resolution: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "solutions": [s.to_json_dict() for s in self.solutions],
            "raw_count": self.raw_count,
            "parity_note": self.parity_note,
            "non_generic": self.non_generic,
            "resolution": self.resolution,
        }


# ---------------------------------------------------------------------------
# residual evaluation
# ---------------------------------------------------------------------------

def _residuals_of_points(pts) -> tuple[np.ndarray, np.ndarray]:
    """Residual 4-vector and mean side length for batched quads (k, 4, n)."""
    pts = np.asarray(pts, dtype=float)
    sides = np.roll(pts, -1, axis=1) - pts
    side_sq = np.einsum("kij,kij->ki", sides, sides)
    d1 = pts[:, 2] - pts[:, 0]
    d2 = pts[:, 3] - pts[:, 1]
    diag_sq1 = np.einsum("ki,ki->k", d1, d1)
    diag_sq2 = np.einsum("ki,ki->k", d2, d2)
    res = np.stack(
        [
            side_sq[:, 0] - side_sq[:, 1],
            side_sq[:, 1] - side_sq[:, 2],
            side_sq[:, 2] - side_sq[:, 3],
            diag_sq1 - diag_sq2,
        ],
        axis=1,
    )
    mean_side = np.mean(np.sqrt(side_sq), axis=1)
    return res, mean_side


def _eval_batch(curve: PolyCurve, params) -> tuple[np.ndarray, np.ndarray]:
    """params (k, 4) -> (residuals (k, 4), mean sides (k,))."""
    params = np.atleast_2d(np.asarray(params, dtype=float))
    pts = curve.point_at(params.reshape(-1)).reshape(params.shape[0], 4, -1)
    return _residuals_of_points(pts)


def _norms(res, mean_side) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.max(np.abs(res), axis=1) / (mean_side * mean_side)
    return np.where(mean_side > 0.0, out, np.inf)


# ---------------------------------------------------------------------------
# seeding
# ---------------------------------------------------------------------------

def seed_grid(curve: PolyCurve, config: Optional[SolverConfig] = None) -> np.ndarray:
    """Cyclically ordered 4-tuples on a grid_m-point equispaced arclength grid.

    Sorted index 4-subsets fix t1 to the first grid cell of each cyclic class,
    so rotation duplicates never enter.  Tuples failing the minimum cyclic gap
    are dropped, then a cheap residual prefilter keeps the best quartile.
    """
    cfg = (config or SolverConfig()).resolved(curve)
    m = cfg.grid_m
    L = curve.length
    grid = np.arange(m) * (L / m)
    combos = np.array(list(itertools.combinations(range(m), 4)), dtype=int)
    params = grid[combos]

    gaps = np.diff(np.column_stack([params, params[:, :1] + L]), axis=1)
    keep = np.min(gaps, axis=1) >= cfg.gap_min
    combos, params = combos[keep], params[keep]
    if params.shape[0] == 0:
        return params

    pts = curve.point_at(grid)
    res, mean_side = _residuals_of_points(pts[combos])
    norms = _norms(res, mean_side)
    cut = np.percentile(norms, _SEED_KEEP_QUANTILE)
    return params[norms <= cut]


# ---------------------------------------------------------------------------
# refinement
# ---------------------------------------------------------------------------

def _cyclic_gaps(params, L) -> np.ndarray:
    t = np.mod(params, L)
    return np.mod(np.roll(t, -1) - t, L)


def refine(curve: PolyCurve, seed, config: Optional[SolverConfig] = None):
    """Damped least-squares refinement of one seed tuple.

    Returns (params, "converged") with params sorted ascending in [0, L), or
    (None, reason) with reason in {diverged, collapsed, ordering_broken,
    small_side}.  The Jacobian uses central finite differences: the residual
    is only piecewise smooth in the parameters on a polygonal curve, and the
    smoothing step keeps damping stable across edge crossings.
    """
    cfg = (config or SolverConfig()).resolved(curve)
    L = curve.length
    t = np.mod(np.asarray(seed, dtype=float), L)

    res, ms = _eval_batch(curve, t)
    res = res[0]
    norm = float(_norms(res[None, :], ms)[0])
    lam = 1e-3
    h = cfg.fd_step
    target = 0.1 * cfg.residual_tol

    for _ in range(cfg.max_iter):
        if norm <= target:
            break
        probe = np.repeat(t[None, :], 8, axis=0)
        for i in range(4):
            probe[2 * i, i] += h
            probe[2 * i + 1, i] -= h
        pres, _ = _eval_batch(curve, probe)
        jac = np.empty((4, 4))
        for i in range(4):
            jac[:, i] = (pres[2 * i] - pres[2 * i + 1]) / (2.0 * h)

        jtj = jac.T @ jac
        g = jac.T @ res
        diag = np.diag(np.maximum(np.diag(jtj), 1e-30))
        accepted = False
        for _trial in range(10):
            try:
                delta = np.linalg.solve(jtj + lam * diag, -g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            t_new = np.mod(t + delta, L)
            res_new, ms_new = _eval_batch(curve, t_new)
            norm_new = float(_norms(res_new, ms_new)[0])
            if norm_new < norm:
                t, res, norm = t_new, res_new[0], norm_new
                lam = max(lam / 3.0, 1e-12)
                accepted = True
                break
            lam *= 10.0
        if not accepted:
            break
        if float(np.max(np.abs(delta))) < 1e-15 * L:
            break

    if norm > cfg.residual_tol:
        return None, "diverged"
    gaps = _cyclic_gaps(t, L)
    if np.any(gaps == 0.0) or not math.isclose(float(np.sum(gaps)), L, rel_tol=1e-9):
        return None, "ordering_broken"
    if float(np.min(gaps)) < cfg.gap_min:
        return None, "collapsed"
    _, mean_side = _eval_batch(curve, t)
    if float(mean_side[0]) < cfg.min_side:
        return None, "small_side"
    return np.sort(np.mod(t, L)), "converged"


def _refine_batch(curve: PolyCurve, seeds: np.ndarray, cfg: SolverConfig) -> list:
    """Vectorized refinement of many seeds at once.

    Runs the same damped least-squares update as refine() for every seed in
    lock step (per-seed damping, acceptance, and stopping), so results match
    the per-seed path; it only amortizes the array overhead.
    """
    K = seeds.shape[0]
    if K == 0:
        return []
    L = curve.length
    h = cfg.fd_step
    target = 0.1 * cfg.residual_tol

    t = np.mod(np.asarray(seeds, dtype=float), L)
    res, ms = _eval_batch(curve, t)
    norm = _norms(res, ms)
    lam = np.full(K, 1e-3)
    active = np.ones(K, dtype=bool)

    for _ in range(cfg.max_iter):
        active &= norm > target
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        ta = t[idx]
        probe = np.repeat(ta[:, None, :], 8, axis=1)
        for i in range(4):
            probe[:, 2 * i, i] += h
            probe[:, 2 * i + 1, i] -= h
        pres, _ = _eval_batch(curve, probe.reshape(-1, 4))
        pres = pres.reshape(idx.size, 8, 4)
        jac = np.empty((idx.size, 4, 4))
        for i in range(4):
            jac[:, :, i] = (pres[:, 2 * i] - pres[:, 2 * i + 1]) / (2.0 * h)

        jt = jac.transpose(0, 2, 1)
        jtj = jt @ jac
        g = np.einsum("aij,aj->ai", jt, res[idx])
        diag = np.maximum(np.einsum("aii->ai", jtj), 1e-30)

        pending = np.ones(idx.size, dtype=bool)
        accepted_step = np.zeros(idx.size)
        for _trial in range(10):
            p = np.nonzero(pending)[0]
            if p.size == 0:
                break
            damp = jtj[p] + lam[idx[p], None, None] * (diag[p, :, None] * np.eye(4))
            delta = np.empty((p.size, 4))
            try:
                delta = np.linalg.solve(damp, -g[p][..., None])[..., 0]
                bad = ~np.all(np.isfinite(delta), axis=1)
            except np.linalg.LinAlgError:
                bad = np.zeros(p.size, dtype=bool)
                for j in range(p.size):
                    try:
                        delta[j] = np.linalg.solve(damp[j], -g[p[j]])
                    except np.linalg.LinAlgError:
                        bad[j] = True
            t_new = np.mod(ta[p] + delta, L)
            res_new, ms_new = _eval_batch(curve, t_new)
            norm_new = _norms(res_new, ms_new)
            improved = (norm_new < norm[idx[p]]) & ~bad

            acc = p[improved]
            if acc.size:
                rows = idx[acc]
                t[rows] = t_new[improved]
                res[rows] = res_new[improved]
                norm[rows] = norm_new[improved]
                lam[rows] = np.maximum(lam[rows] / 3.0, 1e-12)
                accepted_step[acc] = np.max(np.abs(delta[improved]), axis=1)
                pending[acc] = False
            rej = p[~improved]
            lam[idx[rej]] *= 10.0

        # seeds with no accepted trial have stalled; tiny accepted steps stop
        stalled = pending | (accepted_step < 1e-15 * L)
        active[idx[stalled]] = False

    out = []
    for k in range(K):
        if norm[k] > cfg.residual_tol:
            out.append((None, "diverged"))
            continue
        tk = t[k]
        gaps = _cyclic_gaps(tk, L)
        if np.any(gaps == 0.0) or not math.isclose(float(np.sum(gaps)), L, rel_tol=1e-9):
            out.append((None, "ordering_broken"))
        elif float(np.min(gaps)) < cfg.gap_min:
            out.append((None, "collapsed"))
        elif float(_eval_batch(curve, tk)[1][0]) < cfg.min_side:
            out.append((None, "small_side"))
        else:
            out.append((np.sort(np.mod(tk, L)), "converged"))
    return out


# ---------------------------------------------------------------------------
# symmetry dedup and grid canonicalization
# ---------------------------------------------------------------------------

def _symmetry_images(t: np.ndarray) -> list:
    rev = t[::-1]
    return [np.roll(t, -r) for r in range(4)] + [np.roll(rev, -r) for r in range(4)]

def _circ_dist(a, b, L) -> np.ndarray:
    d = np.mod(a - b, L)
    return np.minimum(d, L - d)


def symmetry_distance(a, b, L: float) -> float:
    """min over the 8 relabeling images of the max cyclic parameter distance."""
    a = np.asarray(a, dtype=float)
    best = math.inf
    for img in _symmetry_images(np.asarray(b, dtype=float)):
        d = float(np.max(_circ_dist(a, img, L)))
        if d < best:
            best = d
    return best


def _snap_to_grid(curve: PolyCurve, params: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    """Replace a solution by its grid-rounded tuple when that tuple is itself
    a valid solution.  On solution continua (e.g. every square of a circle)
    this pins the reported representatives to grid-aligned members, keeping
    output stable across reruns and resolutions; isolated solutions reject
    the rounded tuple through the residual test and pass through unchanged."""
    L = curve.length
    g = L / cfg.grid_m
    snapped = np.sort(np.mod(np.round(params / g) * g, L))
    if np.any(np.diff(snapped) == 0.0):
        return params
    gaps = _cyclic_gaps(snapped, L)
    if float(np.min(gaps)) < cfg.gap_min or not math.isclose(float(np.sum(gaps)), L, rel_tol=1e-9):
        return params
    res, ms = _eval_batch(curve, snapped)
    if float(ms[0]) < cfg.min_side:
        return params
    if float(_norms(res, ms)[0]) > cfg.residual_tol:
        return params
    return snapped


def _dedup(cands: list, L: float, tol: float) -> list:
    """Greedy dedup in (t1, t2, t3, t4) sort order; first member represents
    each class under the symmetry-reduced metric."""
    cands = sorted(cands, key=lambda c: tuple(c[0]))
    reps = []
    for params, norm in cands:
        if any(symmetry_distance(params, rp, L) < tol for rp, _ in reps):
            continue
        reps.append((params, norm))
    return reps


# ---------------------------------------------------------------------------
# top-level search
# ---------------------------------------------------------------------------

def _attach(curve: PolyCurve, params: np.ndarray) -> QuadSolution:
    pts = curve.point_at(params)
    quad = Quad.from_points(pts)
    met = quad.metrics()
    try:
        arc_ok = verify_quad_arc_curvature(curve, params, _ARC_KAPPA_TOL)
    except ValueError:
        arc_ok = False
    return QuadSolution(
        params=params,
        points=pts,
        sides=met.sides,
        diagonals=met.diagonals,
        theta=met.theta,
        open_turning=met.open_turning,
        residual=quad.residual(),
        residual_norm=met.residual_norm,
        arc_kappa_ok=arc_ok,
    )


def _detect_non_generic(reps, L, tol) -> bool:
    """A long chain of classes packed at the dedup resolution signals a
    solution continuum (circles), where counting is not meaningful."""
    if len(reps) < 4:
        return False
    dists = [
        symmetry_distance(reps[i][0], reps[j][0], L)
        for i in range(len(reps))
        for j in range(i + 1, len(reps))
    ]
    return min(dists) <= 2.0 * tol


def _parity_text(count: int, non_generic: bool) -> str:
    if non_generic:
        return (f"count {count} from a non-generic solution family; "
                "parity is not meaningful here")
    if count == 0:
        return ("count 0, even: no quadrilaterals found at this resolution; "
                "tighten the grid before trusting the count")
    word = "odd" if count % 2 == 1 else "even"
    return (f"count {count}, {word}; coincident solution classes in "
            "degenerate limits can break parity")


def parity_report(solutions: SolutionSet) -> str:
    """Human-readable count/parity line for a solution set."""
    return _parity_text(len(solutions.solutions), solutions.non_generic)


def find_quads(curve: PolyCurve, config: Optional[SolverConfig] = None,
               threads: int = 1) -> SolutionSet:
    """Full search: seed, refine, validate, snap, deduplicate, annotate.

    The curve must be closed; a warning (not an error) is issued when it is
    not embedded, since the search itself needs no embeddedness.
    """
    if not curve.closed:
        raise ValueError("find_quads requires a closed curve")
    cfg = (config or SolverConfig()).resolved(curve)
    if not curve.is_embedded(0.0):
        warnings.warn("curve is not embedded; results are best-effort")

    seeds = seed_grid(curve, cfg)
    if threads > 1 and len(seeds) > 0:
        chunks = np.array_split(seeds, threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda ch: _refine_batch(curve, ch, cfg), chunks))
        outcomes = [o for part in parts for o in part]
    else:
        outcomes = _refine_batch(curve, np.asarray(seeds, dtype=float).reshape(-1, 4), cfg)

    accepted = []
    for params, reason in outcomes:
        if reason != "converged":
            continue
        snapped = _snap_to_grid(curve, params, cfg)
        res, ms = _eval_batch(curve, snapped)
        accepted.append((snapped, float(_norms(res, ms)[0])))

    reps = _dedup(accepted, curve.length, cfg.dedup_tol)
    solutions = [_attach(curve, params) for params, _ in reps]
    non_generic = _detect_non_generic(reps, curve.length, cfg.dedup_tol)
    note = _parity_text(len(solutions), non_generic)
    return SolutionSet(
        solutions=solutions,
        raw_count=len(accepted),
        parity_note=note,
        non_generic=non_generic,
        resolution={
            "grid_m": cfg.grid_m,
            "dedup_tol": cfg.dedup_tol,
            "residual_tol": cfg.residual_tol,
        },
    )


# ---------------------------------------------------------------------------
# exhaustive oracle
# ---------------------------------------------------------------------------

def brute_force_oracle(curve: PolyCurve, m: int = 24, tol: float = 0.3,
                       config: Optional[SolverConfig] = None) -> SolutionSet:
    """Pure grid search: every cyclically ordered 4-tuple on an m-point
    equispaced grid, keeping grid-local minima of the normalized residual
    with norm <= tol.  No refinement; used to cross-check find_quads.

    A genuine solution sitting between grid points can carry a normalized
    residual up to ~(L/m)/side, so tol must stay loose at coarse m; the
    default suits m = 24 on curves whose quadrilaterals span the curve.
    """
    if m > 48:
        raise ValueError("oracle grid capped at m = 48 (O(m^4) tuples)")
    if m < 8:
        raise ValueError("oracle grid needs m >= 8")
    cfg = (config or SolverConfig()).resolved(curve)
    L = curve.length
    grid = np.arange(m) * (L / m)
    pts = curve.point_at(grid)

    combos = np.array(list(itertools.combinations(range(m), 4)), dtype=int)
    res, mean_side = _residuals_of_points(pts[combos])
    norms = _norms(res, mean_side)
    norms = np.where(mean_side >= cfg.min_side, norms, np.inf)

    cube = np.full((m + 2,) * 4, np.inf)
    idx = tuple(combos[:, i] + 1 for i in range(4))
    cube[idx] = norms

    core = cube[1:-1, 1:-1, 1:-1, 1:-1]
    neighbor_min = np.full_like(core, np.inf)
    for axis in range(4):
        for off in (0, 2):
            sl = [slice(1, -1)] * 4
            sl[axis] = slice(off, off + m)
            neighbor_min = np.minimum(neighbor_min, cube[tuple(sl)])

    mask = (core <= tol) & (core <= neighbor_min)
    hits = np.argwhere(mask)
    cands = [(grid[h], float(core[tuple(h)])) for h in hits]
    cands = [(p, nv) for p, nv in cands if float(np.min(_cyclic_gaps(p, L))) >= cfg.gap_min]

    # cluster plateau ties under the same symmetry-reduced metric,
    # keeping the lowest-residual member of each cluster
    cands.sort(key=lambda c: (c[1], tuple(c[0])))
    reps = []
    for params, norm in cands:
        if any(symmetry_distance(params, rp, L) < cfg.dedup_tol for rp, _ in reps):
            continue
        reps.append((params, norm))
    reps.sort(key=lambda c: tuple(c[0]))

    solutions = [_attach(curve, params) for params, _ in reps]
    non_generic = _detect_non_generic(reps, L, cfg.dedup_tol)
    return SolutionSet(
        solutions=solutions,
        raw_count=len(cands),
        parity_note="oracle scan: " + _parity_text(len(solutions), non_generic),
        non_generic=non_generic,
        resolution={"oracle_m": m, "tol": tol, "dedup_tol": cfg.dedup_tol},
    )
