"""Weighted iterated function systems of similarities and their measures.

Words are tuples of 0-based symbol indices. A word ``u = (u_1, ..., u_j)``
acts as ``f_u = f_{u_1} o ... o f_{u_j}``.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ExplosionGuard, WordTooShort
from .linalg import ORTHO_TOL, is_orthogonal

CUT_SET_CAP = 10**7
CHUNK = 16384
# Relative slack used for the "<=" comparisons on products of ratios.
RATIO_SLACK = 1e-12


def philox(seed, stream=0):
    """Counter-based Philox generator keyed by ``(seed, stream)``."""
    key = (int(seed) & 0xFFFFFFFFFFFFFFFF) | ((int(stream) & 0xFFFFFFFFFFFFFFFF) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def thread_count():
    try:
        return max(1, int(os.environ.get("SSPROJ_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class SimilarityMap:
    """x -> ratio * rotation @ x + translation."""

    ratio: float
    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rotation", np.array(self.rotation, dtype=float))
        object.__setattr__(self, "translation", np.array(self.translation, dtype=float).reshape(-1))

    @property
    def dim(self):
        return self.translation.shape[0]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.ratio * x @ self.rotation.T + self.translation

    def compose(self, other):
        """self o other."""
        return SimilarityMap(
            self.ratio * other.ratio,
            self.rotation @ other.rotation,
            self(other.translation),
        )


@dataclass(frozen=True)
class WeightedIFS:
    maps: tuple
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        object.__setattr__(self, "weights", np.array(self.weights, dtype=float).reshape(-1))

    @classmethod
    def from_parts(cls, ratios, rotations, translations, weights=None):
        n = len(ratios)
        if weights is None:
            weights = np.full(n, 1.0 / n)
        maps = [SimilarityMap(r, h, t) for r, h, t in zip(ratios, rotations, translations)]
        return cls(tuple(maps), weights)

    @property
    def n(self):
        return len(self.maps)

    @property
    def dim(self):
        return self.maps[0].dim

    @property
    def ratios(self):
        return np.array([m.ratio for m in self.maps])

    @property
    def rotations(self):
        return np.array([m.rotation for m in self.maps])

    @property
    def translations(self):
        return np.array([m.translation for m in self.maps])

    @property
    def rmax(self):
        return float(self.ratios.max())

    def word_map(self, word):
        """The similarity f_u for a finite word u."""
        d = self.dim
        out = SimilarityMap(1.0, np.eye(d), np.zeros(d))
        for s in word:
            out = out.compose(self.maps[s])
        return out

    def attractor_radius(self):
        """R with the attractor inside the closed ball B(0, R)."""
        r = self.ratios
        return float(np.max(np.linalg.norm(self.translations, axis=1) / (1.0 - r)))


def validate(ifs):
    """Return a list of violated invariants; an empty list means valid."""
    problems = []
    if ifs.n < 2:
        problems.append(f"need at least 2 maps, got {ifs.n}")
    dims = {m.dim for m in ifs.maps}
    if len(dims) > 1:
        problems.append(f"maps have mixed ambient dimensions {sorted(dims)}")
    for i, m in enumerate(ifs.maps):
        if not 0.0 < m.ratio < 1.0:
            problems.append(f"map {i}: ratio {m.ratio} not in (0, 1)")
        if m.rotation.shape != (m.dim, m.dim):
            problems.append(f"map {i}: rotation has shape {m.rotation.shape}")
        elif not is_orthogonal(m.rotation, ORTHO_TOL):
            problems.append(f"map {i}: rotation is not orthogonal")
        if not np.all(np.isfinite(m.translation)):
            problems.append(f"map {i}: translation not finite")
    w = ifs.weights
    if w.shape != (ifs.n,):
        problems.append(f"expected {ifs.n} weights, got {w.shape[0]}")
    else:
        if np.any(w <= 0):
            problems.append("weights must be strictly positive")
        if abs(w.sum() - 1.0) > 1e-12:
            problems.append(f"weight sum {w.sum():.15g} != 1")
    return problems


def coding_map(ifs, word, tolerance=None):
    """f_{u_1} o ... o f_{u_m}(0).

    The limit point of any infinite extension of ``word`` lies within
    ``r_u * R`` of the returned value, R being :meth:`attractor_radius`.
    Raises :class:`WordTooShort` when that bound exceeds ``tolerance``.
    """
    x = np.zeros(ifs.dim)
    ratio = 1.0
    for s in reversed(tuple(word)):
        x = ifs.maps[s](x)
    for s in word:
        ratio *= ifs.maps[s].ratio
    if tolerance is not None:
        bound = ratio * ifs.attractor_radius()
        if bound > tolerance:
            raise WordTooShort(f"error bound {bound:.3g} exceeds tolerance {tolerance:.3g}")
    return x


@dataclass
class PointCloud:
    """Weighted empirical measure; ``weights=None`` means uniform."""

    points: np.ndarray
    weights: np.ndarray | None = None
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        self.points = pts
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float).reshape(-1)
            if w.shape[0] != pts.shape[0]:
                raise ValueError("one weight per point required")
            if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
                raise ValueError("weights must be nonnegative and sum to 1")
            self.weights = w
        if not np.all(np.isfinite(pts)):
            raise ValueError("point cloud contains non-finite coordinates")

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    def mass(self):
        if self.weights is None:
            return np.full(len(self), 1.0 / len(self))
        return self.weights

    def transformed(self, g):
        """Push-forward under the linear map g."""
        return PointCloud(self.points @ np.asarray(g).T, self.weights, self.seed, dict(self.meta))

    def diameter_bound(self):
        """Diagonal of the bounding box (upper bound for the diameter)."""
        return float(np.linalg.norm(self.points.max(axis=0) - self.points.min(axis=0)))


def _sample_chunk(ifs, count, log_tol, seed, stream, prefix_map):
    rng = philox(seed, stream)
    logr = np.log(ifs.ratios)
    depth = int(np.ceil(log_tol / np.log(ifs.rmax) * (1 + RATIO_SLACK))) + 1
    words = rng.choice(ifs.n, size=(count, depth), p=ifs.weights)
    cum = np.cumsum(logr[words], axis=1)
    # Number of symbols used: first j with r_{w_1..w_j} <= tol.
    used = np.argmax(cum <= log_tol + RATIO_SLACK * abs(log_tol), axis=1) + 1
    x = np.zeros((count, ifs.dim))
    lin = [m.ratio * m.rotation.T for m in ifs.maps]
    for j in range(depth - 1, -1, -1):
        active = used > j
        col = words[:, j]
        for s in range(ifs.n):
            sel = active & (col == s)
            if sel.any():
                x[sel] = x[sel] @ lin[s] + ifs.maps[s].translation
    if prefix_map is not None:
        x = prefix_map(x)
    return x


def sample_measure(ifs, count, depth_tolerance=1e-6, seed=0, prefix=()):
    """Sample ``count`` points from the self-similar measure.

    Each point is the coding-map image of an independent Bernoulli(p) word
    truncated at the first prefix whose contraction is <= ``depth_tolerance``.
    With a nonempty ``prefix`` u the sample is from the cylinder measure
    f_u(nu), truncation being relative to the cylinder's own scale.

    Chunks of points use independent Philox streams (seed, chunk index), so
    the output does not depend on ``SSPROJ_THREADS``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if not 0.0 < depth_tolerance < 1.0:
        raise ValueError("depth_tolerance must be in (0, 1)")
    log_tol = np.log(depth_tolerance)
    prefix = tuple(int(s) for s in prefix)
    prefix_map = ifs.word_map(prefix) if prefix else None
    sizes = [min(CHUNK, count - start) for start in range(0, count, CHUNK)]

    def job(i):
        return _sample_chunk(ifs, sizes[i], log_tol, seed, i, prefix_map)

    threads = thread_count()
    if threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(job, range(len(sizes))))
    else:
        parts = [job(i) for i in range(len(sizes))]
    meta = {
        "generator": "philox4x64",
        "seed": int(seed),
        "count": int(count),
        "depth_tolerance": float(depth_tolerance),
        "prefix": list(prefix),
    }
    return PointCloud(np.concatenate(parts), None, int(seed), meta)


def cut_set(ifs, q, cap=CUT_SET_CAP):
    """Words u with r_{u minus last symbol} > rmax**q >= r_u.

    Ties r_u == rmax**q (up to a relative 1e-12) count as reached.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    threshold = ifs.rmax**q * (1.0 + RATIO_SLACK)
    ratios = ifs.ratios
    out = []
    stack = [((), 1.0)]
    while stack:
        word, r = stack.pop()
        for s in range(ifs.n - 1, -1, -1):
            child = word + (s,)
            rc = r * ratios[s]
            if rc <= threshold:
                out.append(child)
                if len(out) > cap:
                    raise ExplosionGuard(f"cut set for q={q} exceeds {cap} words")
            else:
                stack.append((child, rc))
    out.sort()
    return out


def word_probability(ifs, word):
    return float(np.prod(ifs.weights[list(word)])) if word else 1.0


def cut_set_ifs(ifs, q, cap=CUT_SET_CAP):
    """The iterated system {(f_u, p_u) : u in cut_set(q)}; same measure."""
    words = cut_set(ifs, q, cap)
    maps = tuple(ifs.word_map(u) for u in words)
    weights = np.array([word_probability(ifs, u) for u in words])
    return WeightedIFS(maps, weights / weights.sum()), words


def similarity_dimension(ifs):
    """sum p log p / sum p log r (the dimension of nu under strong separation)."""
    p = ifs.weights
    return float(np.sum(p * np.log(p)) / np.sum(p * np.log(ifs.ratios)))


def strong_separation_margin(ifs):
    """min_{i != j} |c_i - c_j| - r_i R - r_j R for the ball cover B(c_i, r_i R).

    Positive margin certifies the strong separation condition, where
    c_i = f_i(0) and R bounds the attractor around 0 (sufficient, not
    necessary).
    """
    big_r = ifs.attractor_radius()
    c = ifs.translations
    r = ifs.ratios
    best = np.inf
    for i in range(ifs.n):
        for j in range(i + 1, ifs.n):
            best = min(best, np.linalg.norm(c[i] - c[j]) - (r[i] + r[j]) * big_r)
    return float(best)
