"""Smooth curves in R^d: osculating planes, Frenet frames, reversal.

A curve carries either closed-form derivatives or falls back on central
finite differences with one Richardson step.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import make_interp_spline

from .errors import DegenerateOsculation, DegenerateSpan, NotUnitSpeed, VanishingCurvature, ZeroVector
from .grassmann import plane_distance, span_plane
from .linalg import expm, is_skew, nearest_orthogonal

OSC_TOL = 1e-8
SPEED_TOL = 1e-6
SPLINE_DEGREE = 7


def _central_weights(j):
    """Second-order central stencil for the j-th derivative on offsets -m..m."""
    m = (j + 1) // 2
    offs = np.arange(-m, m + 1, dtype=float)
    vander = np.array([offs**n / factorial(n) for n in range(2 * m + 1)])
    rhs = np.zeros(2 * m + 1)
    rhs[j] = 1.0
    return offs, np.linalg.solve(vander, rhs)


def default_step(theta, j):
    # Balances the O(h^4) Richardson truncation against eps / h^j roundoff.
    return max(1e-4, 10.0 ** (-16.0 / (j + 4))) * (1.0 + abs(theta))


class SmoothCurve:
    """theta -> R^d, optionally with closed-form derivatives.

    ``derivative(theta, j)`` must return the j-th derivative (j >= 0) when
    given; otherwise derivatives come from finite differences of ``func``.
    """

    def __init__(self, func, derivative=None, domain=(-np.inf, np.inf), name="curve", max_order=None):
        self.func = func
        self._deriv = derivative
        self.domain = (float(domain[0]), float(domain[1]))
        self.name = name
        self.max_order = max_order

    @property
    def closed_form(self):
        return self._deriv is not None

    @property
    def dim(self):
        return np.atleast_1d(self(self._mid())).shape[0]

    def _mid(self):
        a, b = self.domain
        if np.isfinite(a) and np.isfinite(b):
            return 0.5 * (a + b)
        return 0.0 if a <= 0.0 <= b else (a + 1.0 if np.isfinite(a) else b - 1.0)

    def __call__(self, theta):
        return np.asarray(self.func(theta), dtype=float)

    def fd_derivative(self, theta, j, h=None, richardson=True):
        """Central finite difference of order 2, optionally Richardson-improved."""
        if j == 0:
            return self(theta)
        h = default_step(theta, j) if h is None else h
        offs, w = _central_weights(j)

        def diff(step):
            vals = np.array([self(theta + o * step) for o in offs])
            return w @ vals / step**j

        if not richardson:
            return diff(h)
        return (4.0 * diff(h / 2) - diff(h)) / 3.0

    def derivative(self, theta, j):
        if self._deriv is not None:
            return np.asarray(self._deriv(theta, j), dtype=float)
        return self.fd_derivative(theta, j)

    def derivatives(self, theta, count):
        """Rows gamma'(theta), ..., gamma^(count)(theta)."""
        return np.array([self.derivative(theta, j) for j in range(1, count + 1)])

    def transformed(self, g):
        g = np.asarray(g, dtype=float)
        deriv = None if self._deriv is None else (lambda t, j: g @ self._deriv(t, j))
        return SmoothCurve(lambda t: g @ self(t), deriv, self.domain, f"g.{self.name}", self.max_order)

    def negated(self):
        return self.transformed(-np.eye(self.dim))


# ---------------------------------------------------------------- built-ins


def circle(radius=1.0):
    """Planar circle of the given radius, unit speed when radius is 1."""

    def deriv(t, j):
        c = np.array([np.cos(t), np.sin(t)])
        s = np.array([-np.sin(t), np.cos(t)])
        return radius * [c, s, -c, -s][j % 4]

    return SmoothCurve(lambda t: deriv(t, 0), deriv, name="circle")


def planar_circle_3d():
    """(cos t, sin t, 0): a circle sitting in a plane of R^3."""

    def deriv(t, j):
        return np.append(circle().derivative(t, j), 0.0)

    return SmoothCurve(lambda t: deriv(t, 0), deriv, name="planar_circle_3d")


def helix(a=1.0, b=1.0):
    """Unit-speed helix (a cos(s/c), a sin(s/c), b s/c) with c = sqrt(a^2 + b^2).

    Its curvature is a / c^2 and its torsion b / c^2.
    """
    c = np.hypot(a, b)

    def deriv(s, j):
        u = s / c
        trig = [np.array([np.cos(u), np.sin(u)]), np.array([-np.sin(u), np.cos(u)])]
        xy = a * (1 - 2 * ((j // 2) % 2)) * trig[j % 2] / c**j
        z = b * u if j == 0 else (b / c if j == 1 else 0.0)
        return np.append(xy, z)

    return SmoothCurve(lambda s: deriv(s, 0), deriv, name=f"helix({a},{b})")


def sphere_curve():
    """(cos t, sin t, 1) / sqrt 2, the circle of unit vectors at 45 degrees to e_3."""

    def deriv(t, j):
        xy = circle().derivative(t, j)
        return np.append(xy, 1.0 if j == 0 else 0.0) / np.sqrt(2)

    return SmoothCurve(lambda t: deriv(t, 0), deriv, name="sphere_curve")


def model_curve_s2():
    """The curve whose velocity is :func:`sphere_curve`: (sin t, -cos t, t) / sqrt 2.

    Every tangent line lies in the z-rotation orbit of span{(1, 0, 1)}, and
    the first three derivatives have determinant 2^{-3/2} everywhere.
    """
    vel = sphere_curve()

    def deriv(t, j):
        if j == 0:
            return np.array([np.sin(t), -np.cos(t), t]) / np.sqrt(2)
        return vel.derivative(t, j - 1)

    return SmoothCurve(lambda t: deriv(t, 0), deriv, name="model_curve_s2")


def line(direction, origin=None):
    v = np.asarray(direction, dtype=float)
    x0 = np.zeros_like(v) if origin is None else np.asarray(origin, dtype=float)

    def deriv(t, j):
        return x0 + t * v if j == 0 else (v if j == 1 else np.zeros_like(v))

    return SmoothCurve(lambda t: deriv(t, 0), deriv, name="line")


def tabulated(thetas, points, degree=SPLINE_DEGREE, name="tabulated"):
    """Interpolating spline through sampled points (rows of ``points``)."""
    thetas = np.asarray(thetas, dtype=float)
    spl = make_interp_spline(thetas, np.asarray(points, dtype=float), k=degree)

    def deriv(t, j):
        return spl(t, nu=j) if j <= degree else np.zeros(spl.c.shape[1])

    return SmoothCurve(lambda t: spl(t), deriv, (thetas[0], thetas[-1]), name, max_order=degree)


def one_param_curve(a, v):
    """gamma(t) = int_0^t e^{sA} v ds, so that gamma^(j)(t) = e^{tA} A^{j-1} v."""
    a = np.asarray(a, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.linalg.norm(v) == 0:
        raise ZeroVector("v must be nonzero")
    if not is_skew(a):
        raise ValueError("A must be skew-symmetric")
    d = v.shape[0]
    aug = np.zeros((d + 1, d + 1))
    aug[:d, :d] = a
    aug[:d, d] = v

    def deriv(t, j):
        if j == 0:
            return expm(t * aug)[:d, d]
        return expm(t * a) @ np.linalg.matrix_power(a, j - 1) @ v

    return SmoothCurve(lambda t: deriv(t, 0), deriv, name="one_param")


def arc_length_reparametrize(c, theta0=0.0, tol=1e-10):
    """Unit-speed reparametrization s -> c(theta(s)) with theta(0) = theta0.

    Arc length is integrated adaptively and inverted with Brent's method.
    Derivatives of the result come from finite differences.
    """

    def speed(t):
        return np.linalg.norm(c.derivative(t, 1))

    def arc(t):
        return integrate.quad(speed, theta0, t, epsabs=tol, epsrel=tol, limit=200)[0]

    def theta_of(s):
        if s == 0:
            return theta0
        v0 = speed(theta0)
        guess = theta0 + s / v0
        lo, hi = min(theta0, guess), max(theta0, guess)
        while arc(lo) > s:
            lo -= abs(hi - lo) + 1e-3
        while arc(hi) < s:
            hi += abs(hi - lo) + 1e-3
        return optimize.brentq(lambda t: arc(t) - s, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps)

    return SmoothCurve(lambda s: c(theta_of(s)), None, name=f"unit({c.name})")


# ------------------------------------------------------------- operations


def osculating_plane(c, theta, k, tol=OSC_TOL):
    """span{gamma'(theta), ..., gamma^(k)(theta)}."""
    try:
        return span_plane(c.derivatives(theta, k), tol)
    except DegenerateSpan as exc:
        raise DegenerateOsculation(f"first {k} derivatives dependent at theta={theta}") from exc


def nondegeneracy_check(c, grid, tol=OSC_TOL):
    """|det[gamma', ..., gamma^(d)]| on ``grid``; passes when the minimum exceeds ``tol``."""
    d = c.dim
    dets = np.array([abs(np.linalg.det(c.derivatives(t, d))) for t in grid])
    return {"dets": dets.tolist(), "min_abs_det": float(dets.min()), "tol": tol, "passed": bool(dets.min() > tol)}


def adapted_check(c, orbit, k, grid, tol=1e-2):
    """Max over grid of the distance from the k-th osculating plane to the sampled orbit.

    A sampled necessary condition only: a coarse orbit sample inflates the
    distances, so the report records the sample size.
    """
    if not orbit:
        raise ValueError("orbit sample is empty")
    gaps = []
    for t in grid:
        p = osculating_plane(c, t, k)
        gaps.append(min(plane_distance(p, o) for o in orbit))
    worst = float(max(gaps))
    return {"gaps": gaps, "max_gap": worst, "orbit_size": len(orbit), "tol": tol, "passed": worst <= tol}


@dataclass
class FrenetFrame:
    frame: np.ndarray  # rows e_1..e_d
    curvatures: np.ndarray  # kappa_1..kappa_{d-1}; the last one is signed
    theta: float


def frenet_frame(c, theta, speed_tol=SPEED_TOL, tol=OSC_TOL):
    """Frenet frame and curvatures of a unit-speed curve.

    e_1..e_{d-1} come from a QR factorization of the derivatives with a
    positive diagonal, e_d completes a positively oriented frame. Since
    gamma^(j) = (kappa_1 ... kappa_{j-1}) e_j + lower terms, the curvatures
    are ratios of consecutive diagonal entries of R.
    """
    d = c.dim
    der = c.derivatives(theta, d)
    speed = np.linalg.norm(der[0])
    if abs(speed - 1.0) > speed_tol:
        raise NotUnitSpeed(f"|gamma'({theta})| = {speed:.9g}")
    if d > 1:
        try:
            span_plane(der[: d - 1], tol)
        except DegenerateSpan as exc:
            raise DegenerateOsculation(f"first {d - 1} derivatives dependent at theta={theta}") from exc
    q, r = np.linalg.qr(der.T)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    q = q * signs
    r = r * signs[:, None]
    if np.linalg.det(q) < 0:
        q[:, -1] *= -1
        r[-1] *= -1
    diag = np.diag(r)
    kappa = diag[1:] / diag[:-1]
    return FrenetFrame(q.T.copy(), kappa, float(theta))


def frenet_residual(c, theta, h=1e-5):
    """max_i |e_i' - (-kappa_{i-1} e_{i-1} + kappa_i e_{i+1})| with e_i' by central differences."""
    f0 = frenet_frame(c, theta)
    de = (frenet_frame(c, theta + h).frame - frenet_frame(c, theta - h).frame) / (2 * h)
    return float(np.abs(de - _frenet_rhs(f0.frame, f0.curvatures)).max())


def _frenet_rhs(frame, kappa):
    """Right-hand side of e_i' = -kappa_{i-1} e_{i-1} + kappa_i e_{i+1} (rows)."""
    d = frame.shape[0]
    k = np.zeros((d, d))
    for i, kap in enumerate(kappa):
        k[i, i + 1] = kap
        k[i + 1, i] = -kap
    return k @ frame


def reversed_curve(c, theta0=0.0, steps=2000, h=1e-3, curvature_tol=1e-8):
    """Curve whose tangent is the last Frenet vector e_d of ``c``.

    The Frenet ODE of ``c`` is integrated with RK4 from ``theta0`` over
    ``steps`` steps of size ``h`` (frame re-orthonormalized after each
    step), together with gamma~' = e_d. The reversed curve has Frenet frame
    e~_i = (-1)^{i+1} e_{d+1-i} and curvatures kappa~_i = kappa_{d-i}; the
    span of its first d-1 derivatives is e_1^perp.

    If the signed last curvature is negative, -gamma is used instead (for
    even d, where negation keeps the sign, the first coordinate is
    reflected). Returns a degree-7 spline through the integrated samples on
    [theta0, theta0 + steps h].
    """
    d = c.dim
    f0 = frenet_frame(c, theta0)
    if f0.curvatures[-1] < 0:
        flip = -np.eye(d)
        if d % 2 == 0:
            flip[0, 0] = 1.0
        c = c.transformed(flip)
        f0 = frenet_frame(c, theta0)

    def kappas(t):
        kap = frenet_frame(c, t).curvatures
        if np.any(kap <= curvature_tol):
            raise VanishingCurvature(f"curvatures {kap} at theta={t}")
        return kap

    def rhs(frame, kap):
        return _frenet_rhs(frame, kap), frame[-1]

    frame = f0.frame.copy()
    kappas(theta0)
    pos = np.zeros(d)
    ts = theta0 + h * np.arange(steps + 1)
    pts = [pos.copy()]
    k_prev = kappas(ts[0])
    for n in range(steps):
        k_mid = kappas(ts[n] + h / 2)
        k_next = kappas(ts[n + 1])
        a1, b1 = rhs(frame, k_prev)
        a2, b2 = rhs(frame + h / 2 * a1, k_mid)
        a3, b3 = rhs(frame + h / 2 * a2, k_mid)
        a4, b4 = rhs(frame + h * a3, k_next)
        frame = nearest_orthogonal(frame + h / 6 * (a1 + 2 * a2 + 2 * a3 + a4))
        pos = pos + h / 6 * (b1 + 2 * b2 + 2 * b3 + b4)
        pts.append(pos.copy())
        k_prev = k_next
    out = tabulated(ts, np.array(pts), name=f"reversed({c.name})")
    out.source = c
    return out
