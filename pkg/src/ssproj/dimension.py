"""Dimension estimators for weighted point clouds.

Box counting and cube entropy share one grid profile: for each radius r
of a geometric ladder the cloud is binned into half-open cubes of side r,
averaged over random grid translations. The dimension is the slope of
log N(r) (or H_r) against log(1/r), fitted jointly with a term linear in r
that absorbs the boundary excess of finite sets at coarse scales.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import InsufficientScales, OutsideSupport
from .ifs import PointCloud, philox

PER_OCTAVE = 4
MIN_OCCUPANCY = 10
# Ball counts below ~50 points make log-mass noise (about 1/sqrt(n)) dominate local slopes.
MIN_BALL_POINTS = 50
FROSTMAN_OCCUPANCY = 100
DEFAULT_OFFSETS = 8
MIN_FIT_SCALES = 4
MAX_SCALES = 160
PAIR_BUDGET = 10**6
EXACT_LIMIT = 2 * 10**4
PILOT = 200
MIN_OUTER = 200
CLIP = 1e-300


def _as_cloud(cloud):
    return cloud if isinstance(cloud, PointCloud) else PointCloud(np.asarray(cloud, dtype=float))


@dataclass
class ScaleLadder:
    """Decreasing radii; ``window`` is the [start, stop) index range fitted."""

    radii: np.ndarray
    window: tuple

    def __post_init__(self):
        self.radii = np.asarray(self.radii, dtype=float)
        if np.any(self.radii <= 0) or np.any(np.diff(self.radii) >= 0):
            raise ValueError("radii must be positive and strictly decreasing")
        start, stop = self.window
        stop = min(stop, len(self.radii))
        if stop - start < MIN_FIT_SCALES:
            raise InsufficientScales(f"only {max(0, stop - start)} scales in the fit window")
        self.window = (int(start), int(stop))

    @property
    def fit_radii(self):
        return self.radii[self.window[0] : self.window[1]]


def geometric_radii(top, count, per_octave=PER_OCTAVE):
    return top * 2.0 ** (-np.arange(count) / per_octave)


@dataclass
class DimensionEstimate:
    value: float
    stderr: float
    r2: float
    ladder: ScaleLadder | None
    method: str
    seed: int | None = None
    profile: list = field(default_factory=list)
    stderr_ols: float | None = None

    def to_json(self):
        lad = self.ladder
        return {
            "method": self.method,
            "value": self.value,
            "stderr": self.stderr,
            "stderr_ols": self.stderr_ols,
            "r2": self.r2,
            "radii": [] if lad is None else lad.radii.tolist(),
            "window": [] if lad is None else list(lad.window),
            "seed": self.seed,
            "profile": list(self.profile),
        }


def _atom_estimate(method, seed):
    return DimensionEstimate(0.0, 0.0, 1.0, None, method, seed)


@dataclass
class SlopeFit:
    value: float
    stderr: float
    r2: float
    stderr_ols: float
    stderr_block: float


def _ols(x, y):
    coef, *_ = np.linalg.lstsq(x, y, rcond=None)
    return coef, y - x @ coef


def fit_slope(radii, y, scale=1.0, per_octave=PER_OCTAVE):
    """Fit y = c + D log(1/r) + b r / scale by least squares.

    Residuals along a scale ladder are strongly correlated, so the plain
    OLS standard error understates the uncertainty of D. The reported
    stderr adds in quadrature a jackknife over octave blocks (scales
    grouped ``per_octave`` at a time; single scales when the window spans
    fewer than three octaves).
    """
    radii = np.asarray(radii, dtype=float)
    y = np.asarray(y, dtype=float)
    x = np.column_stack([np.log(1.0 / radii), np.ones_like(radii), radii / scale])
    coef, resid = _ols(x, y)
    n, p = x.shape
    rss = float(resid @ resid)
    tss = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - rss / tss if tss > 0 else 1.0
    if n <= p:
        return SlopeFit(float(coef[0]), float("inf"), r2, float("inf"), float("inf"))
    cov = rss / (n - p) * np.linalg.pinv(x.T @ x)
    se_ols = float(np.sqrt(max(cov[0, 0], 0.0)))
    size = per_octave if n >= 3 * per_octave else 1
    blocks = np.arange(n) // size
    nb = int(blocks.max()) + 1
    se_block = 0.0
    if nb >= 3 and n - size > p:
        jk = np.array([_ols(x[blocks != b], y[blocks != b])[0][0] for b in range(nb)])
        se_block = float(np.sqrt((nb - 1) / nb * ((jk - jk.mean()) ** 2).sum()))
    return SlopeFit(float(coef[0]), float(np.hypot(se_ols, se_block)), r2, se_ols, se_block)


# ---------------------------------------------------------------- cells


def _cell_masses(points, mass, r, origin):
    """Masses of the occupied half-open cubes origin + r (n + [0, 1)^k)."""
    idx = np.floor((points - origin) / r).astype(np.int64)
    idx -= idx.min(axis=0)
    span = idx.max(axis=0) + 1
    if np.prod(span.astype(float)) < 2.0**62:
        key = np.zeros(len(idx), dtype=np.int64)
        for j in range(idx.shape[1]):
            key = key * span[j] + idx[:, j]
    else:
        key = np.ascontiguousarray(idx).view(np.dtype((np.void, idx.dtype.itemsize * idx.shape[1]))).ravel()
    _, inv = np.unique(key, return_inverse=True)
    w = np.bincount(inv.ravel(), weights=mass)
    return w[w > 0]


def _shannon(w):
    w = w[w > 0]
    if len(w) <= 1:
        return 0.0
    return float(-(w * np.log(w)).sum())


def entropy(cloud, r, offset=None):
    """Shannon entropy (natural log) over half-open cubes of side r shifted by offset."""
    if r <= 0:
        raise ValueError("r must be positive")
    cloud = _as_cloud(cloud)
    origin = np.zeros(cloud.dim) if offset is None else np.asarray(offset, dtype=float)
    return _shannon(_cell_masses(cloud.points, cloud.mass(), r, origin))


def distinct_count(points):
    return len(np.unique(points, axis=0))


def _depth_tolerance(cloud):
    return float(cloud.meta.get("depth_tolerance", 0.0)) if isinstance(cloud, PointCloud) else 0.0


def grid_profile(cloud, ladder=None, offsets=DEFAULT_OFFSETS, seed=0, per_octave=PER_OCTAVE, min_occupancy=MIN_OCCUPANCY):
    """Offset-averaged occupied-cube counts and entropies along a ladder.

    Without a ladder, radii start at a quarter of the largest axis extent
    and decrease by 2^{1/per_octave} until cubes hold fewer than
    ``min_occupancy`` distinct points on average or r < 4 depth_tolerance.
    Returns (ladder, counts, entropies), or None for a one-point support.
    """
    cloud = _as_cloud(cloud)
    pts, mass = cloud.points, cloud.mass()
    lo = pts.min(axis=0)
    extent = float((pts.max(axis=0) - lo).max())
    if extent == 0.0:
        return None
    rng = philox(seed, 0)
    k = cloud.dim

    def stats_at(r):
        ns, hs = [], []
        for _ in range(offsets):
            w = _cell_masses(pts, mass, r, lo - rng.random(k) * r)
            ns.append(len(w))
            hs.append(_shannon(w))
        return float(np.mean(ns)), float(np.mean(hs))

    if ladder is not None:
        res = [stats_at(r) for r in ladder.radii]
        return ladder, np.array([a for a, _ in res]), np.array([b for _, b in res])
    n_distinct = distinct_count(pts)
    floor_r = 4.0 * _depth_tolerance(cloud)
    radii, counts, ents = [], [], []
    for r in geometric_radii(extent / 4.0, MAX_SCALES, per_octave):
        if r < floor_r:
            break
        n, h = stats_at(r)
        if n_distinct / n < min_occupancy:
            break
        radii.append(r)
        counts.append(n)
        ents.append(h)
    if len(radii) < MIN_FIT_SCALES:
        raise InsufficientScales(f"only {len(radii)} usable scales; the cloud is too small or too atomic")
    return ScaleLadder(radii, (0, len(radii))), np.array(counts), np.array(ents)


def _fit_profile(ladder, y, method, seed, extent):
    a, b = ladder.window
    fit = fit_slope(ladder.radii[a:b], y[a:b], extent)
    profile = [[float(r), float(v)] for r, v in zip(ladder.radii, y)]
    return DimensionEstimate(fit.value, fit.stderr, fit.r2, ladder, method, seed, profile, fit.stderr_ols)


def _extent(cloud):
    pts = _as_cloud(cloud).points
    return float((pts.max(axis=0) - pts.min(axis=0)).max())


def box_count_dimension(cloud, ladder=None, offsets=DEFAULT_OFFSETS, seed=0):
    """Slope of log N(r) against log(1/r), N averaged over random grid offsets."""
    prof = grid_profile(cloud, ladder, offsets, seed)
    if prof is None:
        return _atom_estimate("box", seed)
    lad, counts, _ = prof
    return _fit_profile(lad, np.log(counts), "box", seed, _extent(cloud))


def entropy_dimension(cloud, ladder=None, offsets=DEFAULT_OFFSETS, seed=0):
    """Slope of the offset-averaged cube entropy H_r against log(1/r)."""
    prof = grid_profile(cloud, ladder, offsets, seed)
    if prof is None:
        return _atom_estimate("entropy", seed)
    lad, _, ents = prof
    return _fit_profile(lad, ents, "entropy", seed, _extent(cloud))


def estimate(cloud, method="box", ladder=None, offsets=DEFAULT_OFFSETS, seed=0):
    if method == "box":
        return box_count_dimension(cloud, ladder, offsets, seed)
    if method == "entropy":
        return entropy_dimension(cloud, ladder, offsets, seed)
    raise ValueError(f"unknown estimator {method!r}")


# ------------------------------------------------------- smoothed entropy


def bump(t):
    """C^2 bump: 1 on |t| <= 1, 0 on |t| >= 2, quintic smoothstep between."""
    u = np.clip(np.abs(np.asarray(t, dtype=float)) - 1.0, 0.0, 1.0)
    return 1.0 - u**3 * (10.0 - 15.0 * u + 6.0 * u**2)


def _psi_sums(outer, inner, inner_mass, r, tree=None):
    """sum_j w_j psi(|x_i - y_j| / r) for every outer point x_i."""
    if tree is None:
        out = np.empty(len(outer))
        for s in range(0, len(outer), 256):
            d = np.linalg.norm(outer[s : s + 256, None, :] - inner[None, :, :], axis=-1)
            out[s : s + 256] = bump(d / r) @ inner_mass
        return out
    lists = tree.query_ball_point(outer, 2.0 * r)
    lens = np.fromiter((len(x) for x in lists), dtype=np.int64, count=len(lists))
    rows = np.repeat(np.arange(len(outer)), lens)
    cols = np.concatenate([np.asarray(x, dtype=np.int64) for x in lists]) if lens.sum() else np.zeros(0, np.int64)
    d = np.linalg.norm(outer[rows] - inner[cols], axis=1)
    return np.bincount(rows, weights=bump(d / r) * inner_mass[cols], minlength=len(outer))


@dataclass
class SmoothedEntropy:
    value: float
    stderr: float
    outer: int
    inner: int
    exact: bool

    def __float__(self):
        return self.value


def smoothed_entropy(cloud, r, mode="auto", pairs=PAIR_BUDGET, seed=0):
    """int log(1 / int psi((x - y) / r) dmu(y)) dmu(x) on the empirical measure.

    ``mode="exact"`` sums over all pairs (allowed for N <= 20000).
    Otherwise the inner integral is still exact over the whole cloud and
    only the outer integral is sampled: about ``pairs / occupancy`` points
    drawn by mass, where the occupancy of radius-2r balls comes from a
    pilot. Subsampling the inner measure instead would bias the log of
    sparse ball sums. The Monte Carlo standard error of the outer average
    is returned alongside the value.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    cloud = _as_cloud(cloud)
    pts, mass = cloud.points, cloud.mass()
    n = len(pts)
    if _extent(cloud) == 0.0:
        # psi(0) = 1 for every pair of an atom
        return SmoothedEntropy(0.0, 0.0, n, n, True)
    if mode == "exact" or (mode == "auto" and n * n <= pairs):
        if n > EXACT_LIMIT:
            raise ValueError(f"exact mode needs N <= {EXACT_LIMIT}")
        sums = _psi_sums(pts, pts, mass, r)
        vals = -np.log(np.clip(sums, CLIP, 1.0))
        return SmoothedEntropy(float(vals @ mass), 0.0, n, n, True)
    rng = philox(seed, 1)
    tree = cKDTree(pts)
    pilot = pts[rng.choice(n, size=min(n, PILOT), p=mass)]
    occupancy = float(np.mean(tree.query_ball_point(pilot, 2.0 * r, return_length=True)))
    m = int(min(n, max(MIN_OUTER, pairs / occupancy)))
    outer = pts[rng.choice(n, size=m, p=mass)]
    # Neighbour lists stop paying off once a ball holds a sizable share of the cloud.
    sums = _psi_sums(outer, pts, mass, r, None if occupancy > n / 8 else tree)
    vals = -np.log(np.clip(sums, CLIP, 1.0))
    return SmoothedEntropy(float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(m)), m, n, False)


# ------------------------------------------------------ local statistics


def _ball_ladder(cloud, ladder, per_octave=PER_OCTAVE):
    if ladder is not None:
        return ladder.radii
    return geometric_radii(_extent(cloud) / 4.0, MAX_SCALES, per_octave)


def local_dimension(cloud, x, ladder=None, min_points=MIN_BALL_POINTS, seed=None):
    """Slope of log mu(B(x, r)) against log r.

    The default window keeps radii whose ball holds at least
    ``min_points / N_distinct`` of the mass and r >= 4 depth_tolerance.
    """
    cloud = _as_cloud(cloud)
    x = np.asarray(x, dtype=float)
    dist = np.linalg.norm(cloud.points - x, axis=1)
    if _extent(cloud) == 0.0:
        if dist.min() > 0:
            raise OutsideSupport("x is away from the atom")
        return _atom_estimate("local", seed)
    radii = _ball_ladder(cloud, ladder)
    if dist.min() > radii[0]:
        raise OutsideSupport(f"nearest sample point is {dist.min():.3g} away")
    order = np.argsort(dist)
    cum = np.cumsum(cloud.mass()[order])
    pos = np.searchsorted(dist[order], radii, side="right")
    ball = np.where(pos > 0, cum[np.maximum(pos - 1, 0)], 0.0)
    if ladder is None:
        keep = (ball >= min_points / distinct_count(cloud.points)) & (radii >= 4 * _depth_tolerance(cloud))
        stop = int(np.argmin(keep)) if not keep.all() else len(keep)
        ladder = ScaleLadder(radii[:stop], (0, stop))
        ball = ball[:stop]
    a, b = ladder.window
    if np.any(ball[a:b] <= 0):
        raise InsufficientScales("empty balls inside the fit window")
    fit = fit_slope(ladder.radii[a:b], -np.log(ball[a:b]), _extent(cloud))
    prof = [[float(r), float(m)] for r, m in zip(ladder.radii, ball)]
    return DimensionEstimate(fit.value, fit.stderr, fit.r2, ladder, "local", seed, prof, fit.stderr_ols)


def frostman_diagnostic(cloud, alpha, ladder=None, centers=200, seed=0, growth_tol=0.1):
    """Empirical Frostman constants max_x mu(B(x, r)) / r^alpha along a ladder.

    Centers are drawn from the cloud. The default ladder stops while grid
    cubes still hold ~100 points, since the max over centers of small noisy
    ball counts creeps upward on its own. The constant is flagged as
    diverging when log C(r) grows faster than ``growth_tol`` per unit of
    log(1/r).
    """
    cloud = _as_cloud(cloud)
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    rng = philox(seed, 2)
    idx = rng.choice(len(cloud), size=min(centers, len(cloud)), p=cloud.mass())
    xs = cloud.points[idx]
    if ladder is None:
        prof = grid_profile(cloud, None, 1, seed, min_occupancy=FROSTMAN_OCCUPANCY)
        if prof is None:
            return {"alpha": alpha, "radii": [], "constants": [], "max_constant": 0.0, "growth": 0.0, "diverging": False}
        radii = prof[0].radii
    else:
        radii = ladder.fit_radii
    tree = cKDTree(cloud.points)
    mass = cloud.mass()
    consts = []
    for r in radii:
        balls = tree.query_ball_point(xs, r)
        consts.append(max(mass[b].sum() for b in balls) / r**alpha)
    consts = np.array(consts)
    slope = float(np.polyfit(np.log(1.0 / radii), np.log(consts), 1)[0])
    return {
        "alpha": float(alpha),
        "radii": radii.tolist(),
        "constants": consts.tolist(),
        "max_constant": float(consts.max()),
        "growth": slope,
        "diverging": slope > growth_tol,
    }
