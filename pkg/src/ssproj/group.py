"""The closed group generated by the rotation parts of an IFS.

Haar measure on the closure is approximated by long random words in the
generators and their inverses (a symmetric random walk on the group).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import ZeroVector
from .ifs import philox
from .linalg import is_orthogonal, krylov_matrix, nearest_orthogonal, numerical_rank

DEFAULT_WORD_LENGTH = 256
REORTH_EVERY = 32
RANK_TOL = 1e-8


def _dedupe(mats, tol=1e-12):
    out = []
    for m in mats:
        if not any(np.abs(m - o).max() <= tol for o in out):
            out.append(m)
    return out


@dataclass(frozen=True)
class GeneratorSet:
    generators: tuple

    def __post_init__(self):
        gens = [np.array(g, dtype=float) for g in self.generators]
        if not gens:
            raise ValueError("need at least one generator")
        for g in gens:
            if not is_orthogonal(g, 1e-10):
                raise ValueError("generators must be orthogonal")
        object.__setattr__(self, "generators", tuple(_dedupe(gens)))

    @classmethod
    def from_ifs(cls, ifs):
        return cls(tuple(m.rotation for m in ifs.maps))

    @property
    def d(self):
        return self.generators[0].shape[0]

    def alphabet(self):
        """Generators together with their inverses, duplicates removed."""
        return np.array(_dedupe(list(self.generators) + [g.T for g in self.generators]))


@dataclass
class GroupSample:
    elements: np.ndarray
    word_length: int
    seed: int

    def __len__(self):
        return self.elements.shape[0]


def _walk(alphabet, choices):
    count, length = choices.shape
    d = alphabet.shape[1]
    m = np.broadcast_to(np.eye(d), (count, d, d)).copy()
    for j in range(length):
        m = m @ alphabet[choices[:, j]]
        if (j + 1) % REORTH_EVERY == 0:
            m = nearest_orthogonal(m)
    return nearest_orthogonal(m) if length % REORTH_EVERY else m


def sample_group(gen, count, length=DEFAULT_WORD_LENGTH, seed=0):
    """``count`` random words of ``length`` letters from generators and inverses.

    Sample i uses the Philox stream (seed, i + 1), so the first m samples do
    not depend on ``count``.
    """
    if length < 1:
        raise ValueError("word length must be >= 1")
    alpha = gen.alphabet()
    choices = np.array(
        [philox(seed, i + 1).integers(0, len(alpha), size=length) for i in range(count)],
        dtype=np.int64,
    ).reshape(count, length)
    return GroupSample(_walk(alpha, choices), int(length), int(seed))


def random_element(gen, length=DEFAULT_WORD_LENGTH, seed=0):
    return sample_group(gen, 1, length, seed).elements[0]


def haar_convergence_check(gen, count=400, length=DEFAULT_WORD_LENGTH, seed=0, alpha=0.01):
    """Compare matrix-entry marginals at word lengths L and 2L.

    Two-sample KS test per entry with a Bonferroni correction. Returns the
    smallest p-value and whether it clears ``alpha / d**2``.
    """
    a = sample_group(gen, count, length, seed).elements
    b = sample_group(gen, count, 2 * length, seed + 7919).elements
    d = gen.d
    pvals = []
    for i in range(d):
        for j in range(d):
            if np.ptp(a[:, i, j]) == 0 and np.ptp(b[:, i, j]) == 0:
                pvals.append(1.0 if a[0, i, j] == b[0, i, j] else 0.0)
                continue
            pvals.append(stats.ks_2samp(a[:, i, j], b[:, i, j]).pvalue)
    pmin = float(min(pvals))
    return {"min_pvalue": pmin, "passed": pmin > alpha / d**2, "word_length": length}


def cyclic_vector_check(a, v, tol=RANK_TOL):
    """True iff v, Av, ..., A^{d-1} v span R^d."""
    v = np.asarray(v, dtype=float)
    if np.linalg.norm(v) == 0:
        raise ZeroVector("v must be nonzero")
    v = v / np.linalg.norm(v)
    return numerical_rank(krylov_matrix(a, v), tol) == v.shape[0]


def orbit_line_span(gen, v, samples=64, seed=0, tol=RANK_TOL):
    """Dimension of span{g v} over sampled g, the generators, and the identity."""
    v = np.asarray(v, dtype=float)
    if np.linalg.norm(v) == 0:
        raise ZeroVector("v must be nonzero")
    cols = [v] + [g @ v for g in gen.generators]
    if samples > 0:
        cols += list(sample_group(gen, samples, seed=seed).elements @ v)
    return numerical_rank(np.column_stack(cols), tol)


def orbit_plane_sample(gen, plane, samples=64, seed=0, length=DEFAULT_WORD_LENGTH):
    """Planes g . plane for sampled g."""
    elems = sample_group(gen, samples, length, seed).elements
    return [plane.transformed(g) for g in elems]


def rotation_angle(m):
    """Angle of a 2x2 rotation (or of the leading 2x2 block) in [0, 2 pi)."""
    return float(np.mod(np.arctan2(m[1, 0], m[0, 0]), 2 * np.pi))
