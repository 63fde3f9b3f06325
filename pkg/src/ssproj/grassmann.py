"""k-planes of R^d stored as orthonormal frames."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, FullSpace
from .ifs import PointCloud
from .linalg import gram_schmidt


@dataclass(frozen=True)
class KPlane:
    """A k-dimensional subspace with a column-orthonormal d x k basis."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.array(self.basis, dtype=float)
        if b.ndim == 1:
            b = b[:, None]
        if np.abs(b.T @ b - np.eye(b.shape[1])).max() > 1e-10:
            raise ValueError("basis columns are not orthonormal")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def d(self):
        return self.basis.shape[0]

    @property
    def k(self):
        return self.basis.shape[1]

    @property
    def projector(self):
        return self.basis @ self.basis.T

    def transformed(self, g):
        """The plane g . P, re-orthonormalized."""
        return span_plane((np.asarray(g) @ self.basis).T)

    def contains(self, v, tol=1e-9):
        v = np.asarray(v, dtype=float)
        return np.linalg.norm(v - self.projector @ v) <= tol * max(1.0, np.linalg.norm(v))


def span_plane(vectors, tol=1e-10):
    """Plane spanned by the rows of ``vectors``."""
    return KPlane(gram_schmidt(vectors, tol).T)


def coordinate_plane(d, axes):
    return KPlane(np.eye(d)[:, list(axes)])


def project(plane, cloud):
    """Intrinsic k-coordinates basis^T x of every point; weights kept."""
    if isinstance(cloud, PointCloud):
        if cloud.dim != plane.d:
            raise DimensionMismatch(f"cloud in R^{cloud.dim}, plane in R^{plane.d}")
        meta = dict(cloud.meta)
        meta["projected_to_k"] = plane.k
        return PointCloud(cloud.points @ plane.basis, cloud.weights, cloud.seed, meta)
    pts = np.asarray(cloud, dtype=float)
    if pts.shape[-1] != plane.d:
        raise DimensionMismatch(f"points in R^{pts.shape[-1]}, plane in R^{plane.d}")
    return pts @ plane.basis


def orthocomplement(plane):
    if plane.k >= plane.d:
        raise FullSpace("the full space has no proper orthocomplement")
    # Left singular vectors beyond rank k span the complement.
    u, _, _ = np.linalg.svd(plane.basis, full_matrices=True)
    comp = u[:, plane.k :]
    # Re-orthonormalize to keep the frame invariant tight.
    return KPlane(np.linalg.qr(comp)[0])


def plane_distance(p, q):
    """Operator-norm distance between orthogonal projectors, in [0, 1]."""
    if p.d != q.d or p.k != q.k:
        raise DimensionMismatch("planes must share d and k")
    diff = p.projector - q.projector
    return float(min(1.0, np.linalg.norm(diff, 2)))


def random_plane(d, k, rng):
    """Haar-distributed k-plane: a Haar O(d) element applied to span(e_1..e_k)."""
    return KPlane(random_orthogonal(d, rng)[:, :k])


def random_orthogonal(d, rng):
    """Haar-distributed element of O(d) (QR of a Gaussian matrix, sign fixed)."""
    z = rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    return q * np.sign(np.diag(r))


def torus_plane(x, lam):
    """span{x, (-x2, x1, -lam x4, lam x3)} in R^4."""
    x = np.asarray(x, dtype=float)
    y = np.array([-x[1], x[0], -lam * x[3], lam * x[2]])
    return span_plane([x, y])
