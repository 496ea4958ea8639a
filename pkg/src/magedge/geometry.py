"""Sampled closed boundary curves: arclength, curvature, enclosed area.

A curve enters as an ordered point list and is represented by a periodic
cubic spline in the cumulative-chord parameter.  Arclength and enclosed
area are integrals over the spline (Gauss-Legendre per segment), which
keeps both accurate to the spline interpolation error rather than to the
polygonal one.  Curvature is read off the spline derivatives at the
sample nodes.  Sign convention: positive curvature for a counterclockwise
convex boundary, so the tubular Jacobian 1 - t*k(s) stays positive for
small t on the interior side.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import GeometryError

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def _cross2(u, v):
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def _segments_intersect(p, q):
    """Vectorized proper-intersection test between all segment pairs.

    p, q: arrays (n, 2) of segment start/end points.  Adjacent segments
    (sharing an endpoint) are skipped.
    """
    n = len(p)
    d = q - p
    # orientation of point c relative to segment (a, a+ab)
    for i in range(n - 2):
        js = np.arange(i + 2, n if i > 0 else n - 1)
        if len(js) == 0:
            continue
        a, ab = p[i], d[i]
        c, cd = p[js], d[js]
        r1 = _cross2(ab, c - a)
        r2 = _cross2(ab, c + cd - a)
        r3 = _cross2(cd, a - c)
        r4 = _cross2(cd, a + ab - c)
        hit = (r1 * r2 < 0) & (r3 * r4 < 0)
        if np.any(hit):
            return True
    return False


@dataclass
class BoundaryCurve:
    """Closed sampled curve with arclength, curvature and area data.

    Attributes
    ----------
    points : (n, 2) sample positions, ordered along the curve.
    arclength : (n,) cumulative arclength of each sample, starting at 0.
    curvature : (n,) signed curvature at each sample.
    length : total length.
    enclosed_area : positive enclosed area.
    orientation : +1 for counterclockwise traversal, -1 for clockwise.
    closed : always True for curves built here.
    """

    points: np.ndarray
    arclength: np.ndarray
    curvature: np.ndarray
    length: float
    enclosed_area: float
    orientation: int
    closed: bool = True
    _xs: CubicSpline = field(default=None, repr=False, compare=False)
    _ys: CubicSpline = field(default=None, repr=False, compare=False)
    _tau: np.ndarray = field(default=None, repr=False, compare=False)

    def __len__(self):
        return len(self.points)

    def total_turning(self) -> float:
        """Total turning of the tangent, i.e. the integral of k ds.

        Computed as the sum of exterior angles of the sample polygon, which
        telescopes to 2*pi times the turning number for a simple closed
        curve; this is the discrete Gauss-Bonnet identity and is exact up
        to rounding.
        """
        ch = np.diff(np.vstack([self.points, self.points[:2]]), axis=0)
        ang = np.arctan2(ch[:, 1], ch[:, 0])
        d = np.diff(ang)
        d = (d + np.pi) % (2.0 * np.pi) - np.pi
        return float(np.sum(d))

    def curvature_integral(self) -> float:
        """Trapezoid integral of the sampled curvature field over arclength."""
        k = self.curvature
        s = self.arclength
        ds = np.empty_like(s)
        ds[1:-1] = (s[2:] - s[:-2]) / 2.0
        ds[0] = (s[1] + self.length - s[-1]) / 2.0
        ds[-1] = (self.length + s[0] - s[-2]) / 2.0
        return float(np.sum(k * ds))

    def _param_of_arclength(self, s):
        s = np.mod(s, self.length)
        return np.interp(s, self.arclength, self._tau[:-1])

    def position_at(self, s):
        """Point on the spline at arclength s (periodic)."""
        tau = self._param_of_arclength(s)
        return np.stack([self._xs(tau), self._ys(tau)], axis=-1)

    def inward_normal_at(self, s):
        """Unit normal pointing to the side where 1 - t*k(s) > 0 holds."""
        tau = self._param_of_arclength(s)
        tx, ty = self._xs(tau, 1), self._ys(tau, 1)
        speed = np.hypot(tx, ty)
        tx, ty = tx / speed, ty / speed
        return self.orientation * np.stack([-ty, tx], axis=-1)

    def tubular_point(self, s, t):
        """Map boundary coordinates (s, t) to the plane, t measured inward."""
        p = self.position_at(s)
        n = self.inward_normal_at(s)
        t = np.asarray(t, dtype=float)
        return p + t[..., None] * n

    def curvature_at(self, s):
        """Signed curvature at arclength s from the spline derivatives."""
        tau = self._param_of_arclength(s)
        xp, yp = self._xs(tau, 1), self._ys(tau, 1)
        xpp, ypp = self._xs(tau, 2), self._ys(tau, 2)
        return (xp * ypp - yp * xpp) / np.hypot(xp, yp) ** 3


def curve_from_parametrization(points, closed=True) -> BoundaryCurve:
    """Build a BoundaryCurve from ordered samples of a simple closed curve.

    Parameters
    ----------
    points : array-like (n, 2), n >= 16, no repeated closing point.
    closed : must be True; open curves are not supported.

    Raises
    ------
    GeometryError for too few points, repeated points, or self-intersection.
    """
    if not closed:
        raise GeometryError("only closed curves are supported")
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise GeometryError("points must be an (n, 2) array")
    if len(pts) < 16:
        raise GeometryError(f"need at least 16 points, got {len(pts)}")
    closing = np.linalg.norm(pts[-1] - pts[0])
    if closing == 0.0:
        pts = pts[:-1]  # tolerate an explicitly repeated closing point
    chord = np.linalg.norm(np.diff(np.vstack([pts, pts[:1]]), axis=0), axis=1)
    if np.any(chord == 0.0):
        raise GeometryError("repeated consecutive points")
    if _segments_intersect(pts, np.vstack([pts[1:], pts[:1]])):
        raise GeometryError("self-intersection detected")

    tau = np.concatenate([[0.0], np.cumsum(chord)])
    xs = CubicSpline(tau, np.append(pts[:, 0], pts[0, 0]), bc_type="periodic")
    ys = CubicSpline(tau, np.append(pts[:, 1], pts[0, 1]), bc_type="periodic")

    # per-segment Gauss-Legendre for arclength and the Green area integral
    t0, t1 = tau[:-1], tau[1:]
    mid = 0.5 * (t0 + t1)
    half = 0.5 * (t1 - t0)
    tn = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    xp, yp = xs(tn, 1), ys(tn, 1)
    speed = np.hypot(xp, yp)
    seg_len = (speed * _GL_WEIGHTS).sum(axis=1) * half
    s = np.concatenate([[0.0], np.cumsum(seg_len)])
    length = float(s[-1])
    x, y = xs(tn), ys(tn)
    signed_area = 0.5 * float(np.sum(((x * yp - y * xp) * _GL_WEIGHTS).sum(axis=1)
                                     * half))
    orientation = 1 if signed_area >= 0 else -1

    xp1, yp1 = xs(tau[:-1], 1), ys(tau[:-1], 1)
    xp2, yp2 = xs(tau[:-1], 2), ys(tau[:-1], 2)
    curv = (xp1 * yp2 - yp1 * xp2) / np.hypot(xp1, yp1) ** 3

    curve = BoundaryCurve(
        points=pts,
        arclength=s[:-1],
        curvature=curv,
        length=length,
        enclosed_area=abs(signed_area),
        orientation=orientation,
        closed=True,
        _xs=xs,
        _ys=ys,
        _tau=tau,
    )
    if curve.length <= 0 or curve.enclosed_area <= 0:
        raise GeometryError("degenerate curve: nonpositive length or area")
    return curve


def circle(radius, n=512, center=(0.0, 0.0)) -> BoundaryCurve:
    """Counterclockwise circle, the workhorse test domain."""
    th = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    pts = np.c_[center[0] + radius * np.cos(th), center[1] + radius * np.sin(th)]
    return curve_from_parametrization(pts)


def ellipse(a, b_axis, n=512, center=(0.0, 0.0)) -> BoundaryCurve:
    """Counterclockwise ellipse with semi-axes a (x) and b_axis (y)."""
    th = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    pts = np.c_[center[0] + a * np.cos(th), center[1] + b_axis * np.sin(th)]
    return curve_from_parametrization(pts)


def load_curve_points(path):
    """Read a plain-text table of x, y points (one whitespace-separated pair
    per line, decimal point); the format the command line documents."""
    pts = np.loadtxt(path, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise GeometryError(f"{path}: expected two columns of x y pairs")
    return pts
