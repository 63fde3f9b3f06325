"""Small dense linear algebra for ambient dimensions 2 <= d <= 8.

Everything here works on plain numpy arrays. Matrices are never mutated in
place; every function returns a fresh array.
"""

from math import factorial

import numpy as np

from .errors import DegenerateSpan

ORTHO_TOL = 1e-10
DERIVED_TOL = 1e-8
SKEW_TOL = 1e-12

# Diagonal Pade(6, 6) numerator coefficients; the denominator uses the same
# coefficients with alternating signs.
_PADE_ORDER = 6
_PADE = np.array(
    [
        factorial(2 * _PADE_ORDER - k)
        * factorial(_PADE_ORDER)
        / (factorial(2 * _PADE_ORDER) * factorial(k) * factorial(_PADE_ORDER - k))
        for k in range(_PADE_ORDER + 1)
    ]
)
# Largest 1-norm at which Pade(6) is accurate to double precision.
_PADE_THETA = 0.5


def singular_values(m, sweeps=60, tol=1e-15):
    """Singular values of ``m`` in decreasing order (one-sided Jacobi).

    Columns are rotated pairwise until all of them are mutually orthogonal;
    the singular values are then the column norms.
    """
    a = np.array(m, dtype=float, copy=True)
    if a.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    if a.shape[0] < a.shape[1]:
        a = a.T.copy()
    # Work at unit scale so products of column norms cannot underflow.
    big = np.abs(a).max() if a.size else 0.0
    if big == 0.0 or not np.isfinite(big):
        return np.sort(np.linalg.norm(a, axis=0))[::-1]
    a /= big
    n = a.shape[1]
    for _ in range(sweeps):
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                ai, aj = a[:, i], a[:, j]
                alpha = ai @ ai
                beta = aj @ aj
                gamma = ai @ aj
                if gamma == 0.0:
                    continue
                scale = np.sqrt(alpha * beta)
                if scale == 0.0:
                    continue
                off = max(off, abs(gamma) / scale)
                if abs(gamma) <= tol * scale:
                    continue
                zeta = (beta - alpha) / (2.0 * gamma)
                t = np.sign(zeta) / (abs(zeta) + np.hypot(1.0, zeta))
                if zeta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                new_i = c * ai - s * aj
                new_j = s * ai + c * aj
                a[:, i] = new_i
                a[:, j] = new_j
        if off <= tol:
            break
    return big * np.sort(np.linalg.norm(a, axis=0))[::-1]


def numerical_rank(m, tol=1e-10):
    """Count singular values above ``tol`` times the largest one."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    sv = singular_values(m)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


def gram_schmidt(vectors, tol=1e-10):
    """Orthonormalize the rows of ``vectors`` (shape ``(count, d)``).

    Modified Gram-Schmidt with one re-orthogonalization pass. Raises
    :class:`DegenerateSpan` when the rows are dependent at relative
    tolerance ``tol``.
    """
    v = np.atleast_2d(np.asarray(vectors, dtype=float))
    count = v.shape[0]
    scale = np.abs(v).max(axis=1, keepdims=True)
    v = v / np.where(scale > 0, scale, 1.0)
    if count > v.shape[1] or numerical_rank(v, tol) < count:
        raise DegenerateSpan(f"{count} vectors span fewer than {count} dimensions")
    out = np.zeros_like(v)
    for i in range(count):
        w = v[i].copy()
        for _ in range(2):
            for j in range(i):
                w -= (out[j] @ w) * out[j]
        out[i] = w / np.linalg.norm(w)
    return out


def expm(m):
    """Matrix exponential by scaling and squaring with a Pade(6) approximant."""
    a = np.asarray(m, dtype=float)
    n = a.shape[0]
    norm = np.abs(a).sum(axis=0).max() if a.size else 0.0
    s = 0
    if norm > _PADE_THETA:
        s = int(np.ceil(np.log2(norm / _PADE_THETA)))
    a = a / 2.0**s
    ident = np.eye(n)
    num = _PADE[0] * ident
    den = _PADE[0] * ident
    power = ident
    for k in range(1, _PADE_ORDER + 1):
        power = power @ a
        num = num + _PADE[k] * power
        den = den + (-1) ** k * _PADE[k] * power
    e = np.linalg.solve(den, num)
    for _ in range(s):
        e = e @ e
    return e


def is_skew(a, tol=SKEW_TOL):
    a = np.asarray(a, dtype=float)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and np.abs(a + a.T).max() <= tol


def is_orthogonal(q, tol=ORTHO_TOL):
    q = np.asarray(q, dtype=float)
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        return False
    return np.abs(q.T @ q - np.eye(q.shape[0])).max() <= tol


def expm_skew(a):
    """exp(A) for skew-symmetric A; the result is a rotation (det +1)."""
    a = np.asarray(a, dtype=float)
    if not is_skew(a):
        raise ValueError("matrix is not skew-symmetric")
    return expm(a)


def nearest_orthogonal(q):
    """Polar factor of ``q`` (works on stacks of matrices too)."""
    u, _, vt = np.linalg.svd(q)
    return u @ vt


def rotation2(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def plane_rotation(d, i, j, angle):
    """Rotation of R^d by ``angle`` in the (e_i, e_j) coordinate plane."""
    r = np.eye(d)
    c, s = np.cos(angle), np.sin(angle)
    r[i, i] = c
    r[j, j] = c
    r[i, j] = -s
    r[j, i] = s
    return r


def block_skew(rates, d=None):
    """Block-diagonal skew matrix with 2x2 blocks [[0, -l], [l, 0]].

    With ``rates = (l1, l2)`` this is the maximal-torus generator of so(4).
    A trailing zero row/column is added when ``d`` is odd or larger.
    """
    rates = list(rates)
    d = 2 * len(rates) if d is None else d
    if d < 2 * len(rates):
        raise ValueError("dimension too small for the number of blocks")
    a = np.zeros((d, d))
    for b, lam in enumerate(rates):
        a[2 * b + 1, 2 * b] = lam
        a[2 * b, 2 * b + 1] = -lam
    return a


def block_rotation(angles, d=None):
    """Block-diagonal rotation with 2x2 rotation blocks by ``angles``."""
    angles = list(angles)
    d = 2 * len(angles) if d is None else d
    r = np.eye(d)
    for b, ang in enumerate(angles):
        r[2 * b : 2 * b + 2, 2 * b : 2 * b + 2] = rotation2(ang)
    return r


def krylov_matrix(a, v, count=None):
    """Columns v, Av, ..., A^(count-1) v."""
    a = np.asarray(a, dtype=float)
    v = np.asarray(v, dtype=float)
    count = a.shape[0] if count is None else count
    cols = [v]
    for _ in range(count - 1):
        cols.append(a @ cols[-1])
    return np.column_stack(cols)
