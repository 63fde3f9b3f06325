"""The skew product (omega, g) -> (shift omega, h_{omega_1} g) and entropy averages along it."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dimension import entropy, estimate, smoothed_entropy
from .grassmann import project
from .group import REORTH_EVERY, GeneratorSet, sample_group
from .ifs import cut_set, philox, sample_measure, thread_count
from .linalg import nearest_orthogonal

SYMBOL_BLOCK = 4096


class SymbolStream:
    """Lazily generated i.i.d. symbols with law p, counter-based and seekable."""

    def __init__(self, weights, seed):
        self.weights = np.asarray(weights, dtype=float)
        self.seed = int(seed)
        self._cache = {}

    def block(self, b):
        if b not in self._cache:
            if len(self._cache) > 64:
                self._cache.clear()
            rng = philox(self.seed, b)
            self._cache[b] = rng.choice(len(self.weights), size=SYMBOL_BLOCK, p=self.weights)
        return self._cache[b]

    def __getitem__(self, n):
        return int(self.block(n // SYMBOL_BLOCK)[n % SYMBOL_BLOCK])

    def take(self, start, count):
        return np.array([self[n] for n in range(start, start + count)], dtype=np.int64)


@dataclass(frozen=True)
class SkewState:
    """A point (omega, g): omega is ``stream`` read from ``position`` on."""

    stream: SymbolStream
    position: int
    g: np.ndarray

    @property
    def first_symbol(self):
        return self.stream[self.position]


def skew_step(state, rotations):
    """(omega, g) -> (shift omega, h_{omega_1} g); ``rotations`` are the h_i."""
    g = rotations[state.first_symbol] @ state.g
    if (state.position + 1) % REORTH_EVERY == 0:
        g = nearest_orthogonal(g)
    return SkewState(state.stream, state.position + 1, g)


def skew_orbit(ifs, g0, steps, seed=0):
    """States F^n(omega, g0) for n = 0..steps with omega ~ Bernoulli(p)."""
    state = SkewState(SymbolStream(ifs.weights, seed), 0, np.asarray(g0, dtype=float))
    rots = ifs.rotations
    out = [state]
    for _ in range(steps):
        state = skew_step(state, rots)
        out.append(state)
    return out


def entropy_scale(ifs, q):
    return ifs.rmax**q


@dataclass
class EqEstimate:
    q: int
    value: float
    stderr: float
    samples: int
    values: list


def _projected(plane, cloud, g):
    return project(plane, cloud.transformed(g))


def estimate_Eq(ifs, plane, q, g_samples=32, cloud_size=20000, seed=0, word_length=256):
    """Average over sampled h of H~_{rbar^q}(pi h nu) / (q log(1/rbar)).

    rbar is the largest contraction ratio and H~ the smoothed entropy.
    """
    cut_set(ifs, q)  # enforces the size guard on the iterated system
    r = entropy_scale(ifs, q)
    norm = q * np.log(1.0 / ifs.rmax)
    cloud = sample_measure(ifs, cloud_size, seed=seed)
    hs = sample_group(GeneratorSet.from_ifs(ifs), g_samples, word_length, seed).elements

    def one(h):
        return smoothed_entropy(_projected(plane, cloud, h), r, seed=seed).value / norm

    vals = np.array(_pmap(one, hs))
    err = float(vals.std(ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else 0.0
    return EqEstimate(int(q), float(vals.mean()), err, len(vals), vals.tolist())


def _pmap(fn, items):
    threads = thread_count()
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def parse_cut_words(ifs, symbols, q, count):
    """Split a symbol sequence into ``count`` consecutive cut-set words for q."""
    threshold = ifs.rmax**q * (1.0 + 1e-12)
    ratios = ifs.ratios
    words, cur, r, pos = [], [], 1.0, 0
    while len(words) < count:
        s = int(symbols[pos])
        pos += 1
        cur.append(s)
        r *= ratios[s]
        if r <= threshold:
            words.append(tuple(cur))
            cur, r = [], 1.0
    return words


def _entropy_of(cloud, r, kind, seed):
    if kind == "plain":
        return entropy(cloud, r)
    if kind == "smoothed":
        return smoothed_entropy(cloud, r, seed=seed).value
    raise ValueError(f"unknown entropy kind {kind!r}")


@dataclass
class LocalAverage:
    value: float
    terms: list
    words: list


def local_entropy_average(ifs, plane, q, word_seed, g, depth=64, cloud_size=10000, kind="plain", seed=0):
    """(1/N) sum_j H_{rho_j}(pi g h_{u_1..u_j} nu) / (q log(1/rbar)).

    u_1, u_2, ... are the consecutive cut-set words of a Bernoulli(p)
    sequence drawn from ``word_seed``. The j-th term is the entropy of the
    projected cylinder measure pi g f_{u_1..u_j} nu at scale rbar^{q(j+1)},
    computed through the rescaling identity: that measure is a translate of
    r_u (pi g h_u nu), so the term equals the entropy of pi g h_u nu at
    rho_j = rbar^{q(j+1)} / r_u (equal to rbar^q for equal ratios). Each
    term uses a freshly sampled cloud.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    cut_set(ifs, q)
    rbar = ifs.rmax
    norm = q * np.log(1.0 / rbar)
    stream = SymbolStream(ifs.weights, word_seed)
    max_len = len(max(cut_set(ifs, q), key=len))
    symbols = stream.take(0, depth * max_len + 1)
    words = parse_cut_words(ifs, symbols, q, depth)
    g = np.asarray(g, dtype=float)
    rots = ifs.rotations
    h = np.eye(ifs.dim)
    log_ru = 0.0
    terms = []
    for j, u in enumerate(words):
        for s in u:
            h = h @ rots[s]
            log_ru += np.log(ifs.ratios[s])
        h = nearest_orthogonal(h)
        rho = np.exp(q * (j + 2) * np.log(rbar) - log_ru)
        cloud = sample_measure(ifs, cloud_size, seed=_term_seed(seed, j))
        terms.append(_entropy_of(_projected(plane, cloud, g @ h), rho, kind, seed) / norm)
    return LocalAverage(float(np.mean(terms)), terms, words)


def _term_seed(seed, j):
    return (int(seed) << 20) + j + 1


def cylinder_entropy_pair(ifs, plane, q, words, g, cloud_size=10000, seed=0):
    """Both sides of the rescaling identity for the cylinder u = u_1..u_m.

    Returns (H_{rbar^{q(m+1)}}(pi g f_u nu), H_{rbar^q}(pi g h_u nu)), the
    first computed from a cloud sampled inside the cylinder.
    """
    u = tuple(s for w in words for s in w)
    m = len(words)
    rbar = ifs.rmax
    g = np.asarray(g, dtype=float)
    cyl = sample_measure(ifs, cloud_size, seed=seed, prefix=u)
    left = entropy(_projected(plane, cyl, g), rbar ** (q * (m + 1)))
    hu = ifs.word_map(u).rotation
    base = sample_measure(ifs, cloud_size, seed=seed)
    right = entropy(_projected(plane, base, g @ hu), rbar**q)
    return left, right


def orbit_constancy_experiment(ifs, plane, g_samples=50, cloud_size=50000, ladder=None, seed=0, method="box", word_length=256):
    """Dimension of pi g nu for sampled g on one shared cloud.

    Flags ``spread_flag`` when the sample standard deviation of the
    estimates exceeds 3x the pooled (root mean square) fit stderr, and
    ``min_flag`` when some estimate falls below mean - 3x pooled stderr.
    """
    cloud = sample_measure(ifs, cloud_size, seed=seed)
    gs = sample_group(GeneratorSet.from_ifs(ifs), g_samples, word_length, seed).elements

    def one(g):
        return estimate(_projected(plane, cloud, g), method, ladder, seed=seed)

    ests = _pmap(one, gs)
    vals = np.array([e.value for e in ests])
    errs = np.array([e.stderr for e in ests])
    pooled = float(np.sqrt(np.mean(errs**2)))
    mean = float(vals.mean())
    spread = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
    return {
        "method": method,
        "seed": int(seed),
        "cloud_size": int(cloud_size),
        "g_samples": int(g_samples),
        "mean": mean,
        "spread": spread,
        "min": float(vals.min()),
        "pooled_stderr": pooled,
        "spread_flag": spread > 3 * pooled,
        "min_flag": float(vals.min()) < mean - 3 * pooled,
        "estimates": [e.to_json() for e in ests],
    }


def orbit_csv(report):
    """One row per sampled g: index, value, stderr, window bounds."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["g_index", "value", "stderr", "r2", "window_start", "window_stop", "r_max", "r_min"])
    for i, e in enumerate(report["estimates"]):
        win = e["window"] or [0, 0]
        radii = e["radii"] or [float("nan")]
        fit = radii[win[0] : win[1]] or radii
        w.writerow([i, e["value"], e["stderr"], e["r2"], win[0], win[1], fit[0], fit[-1]])
    return buf.getvalue()
