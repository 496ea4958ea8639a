"""Half-line Neumann oscillator family and the constant Theta0.

The family of operators is -d^2/dt^2 + (t - xi)^2 on the half line t > 0
with a Neumann condition at t = 0, either posed on a long truncated
interval standing in for [0, infinity) or with a hard Dirichlet wall at a
finite t = T.  Its band functions mu_j(xi) drive every semiclassical
coefficient in this package; the infimum of the first band over xi is the
universal constant Theta0 in (0, 1).

Discretization: uniform grid, second-order three-point stencil, Neumann
at t = 0 through a mirrored ghost point.  The ghost row is symmetrized by
the diagonal similarity diag(1/sqrt(2), 1, 1, ...), which leaves the
spectrum untouched and yields a symmetric tridiagonal matrix.  The
right end is a Dirichlet row deletion.  Eigenvalue error is O(step^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import eigh_tridiagonal

from .errors import ConfigError, DomainError, NumericsError

# Default numerical-infinity and grid resolution for the half-line problem.
DEFAULT_T_MAX = 12.0
DEFAULT_N_POINTS = 4000
# Margin keeping Dirichlet truncation error below the grid error for mu <= 10.
LOCALIZATION_MARGIN = 8.0


@dataclass(frozen=True)
class DeGennesConfig:
    """Grid and boundary setup for one value of the momentum parameter xi.

    Exactly one of ``t_max`` (numerical truncation of the half line) and
    ``dirichlet_T`` (hard Dirichlet wall of the model problem) is set.
    """

    xi: float
    n_points: int = DEFAULT_N_POINTS
    t_max: float | None = None
    dirichlet_T: float | None = None

    def __post_init__(self):
        if self.n_points < 16:
            raise ConfigError(f"n_points={self.n_points} below minimum 16")
        if (self.t_max is None) == (self.dirichlet_T is None):
            raise ConfigError("set exactly one of t_max and dirichlet_T")
        if self.t_max is not None:
            if self.t_max <= 0:
                raise ConfigError("t_max must be positive")
            if self.t_max < self.xi + LOCALIZATION_MARGIN:
                raise ConfigError(
                    f"t_max={self.t_max} too short for xi={self.xi}: "
                    f"need t_max >= xi + {LOCALIZATION_MARGIN}"
                )
        if self.dirichlet_T is not None and self.dirichlet_T <= 0:
            raise ConfigError("dirichlet_T must be positive")

    @classmethod
    def infinite(cls, xi, n_points=DEFAULT_N_POINTS, t_max=None):
        """Half-line setup with automatic truncation max(12, xi + 8)."""
        if t_max is None:
            t_max = max(DEFAULT_T_MAX, xi + LOCALIZATION_MARGIN)
        return cls(xi=xi, n_points=n_points, t_max=t_max)

    @classmethod
    def truncated(cls, xi, T, n_points=DEFAULT_N_POINTS):
        """Mixed Neumann/Dirichlet setup on (0, T)."""
        return cls(xi=xi, n_points=n_points, dirichlet_T=T)

    @property
    def right_end(self) -> float:
        return self.t_max if self.t_max is not None else self.dirichlet_T


@dataclass(frozen=True)
class Mode1D:
    """One eigenpair of the half-line family on its grid.

    ``samples`` holds the real eigenfunction at t_i = i * grid_step,
    normalized to unit discrete L2 norm (trapezoid weights) with a
    positive value at t = 0.
    """

    index: int
    eigenvalue: float
    samples: np.ndarray
    grid_step: float
    _spline: CubicSpline | None = field(default=None, repr=False, compare=False)

    @property
    def grid(self) -> np.ndarray:
        return np.arange(len(self.samples)) * self.grid_step

    @property
    def t_max(self) -> float:
        return (len(self.samples) - 1) * self.grid_step

    def interpolator(self) -> CubicSpline:
        """Cubic interpolant of the samples; valid on [0, t_max] only."""
        if self._spline is None:
            object.__setattr__(self, "_spline", CubicSpline(self.grid, self.samples))
        return self._spline

    def value_at(self, t):
        """Evaluate the eigenfunction; refuses to extrapolate beyond the grid."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0.0) or np.any(t > self.t_max + 1e-12):
            raise DomainError(
                f"evaluation outside [0, {self.t_max:.3f}]: extrapolation refused"
            )
        return self.interpolator()(t)


def _tridiagonal(config: DeGennesConfig):
    """Symmetric tridiagonal (diag, offdiag) for the configured operator."""
    n = config.n_points
    step = config.right_end / n
    t = np.arange(n) * step
    diag = 2.0 / step**2 + (t - config.xi) ** 2
    off = np.full(n - 1, -1.0 / step**2)
    off[0] = -math.sqrt(2.0) / step**2  # symmetrized Neumann ghost row
    return diag, off, step


def solve_de_gennes(config: DeGennesConfig, num_modes: int) -> list[Mode1D]:
    """Lowest eigenpairs of the configured half-line operator.

    Parameters
    ----------
    config : DeGennesConfig
    num_modes : int
        How many modes to return; must not exceed n_points / 4.

    Returns
    -------
    list of Mode1D, eigenvalues strictly increasing.
    """
    if num_modes < 1:
        raise ConfigError("num_modes must be >= 1")
    if num_modes > config.n_points // 4:
        raise ConfigError(
            f"num_modes={num_modes} too large for n_points={config.n_points}"
        )
    diag, off, step = _tridiagonal(config)
    try:
        vals, vecs = eigh_tridiagonal(
            diag, off, select="i", select_range=(0, num_modes - 1)
        )
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericsError(
            f"eigensolver failed for xi={config.xi}, n={config.n_points}: {exc}"
        ) from exc
    modes = []
    for j in range(num_modes):
        u = vecs[:, j].copy()
        u[0] *= math.sqrt(2.0)  # undo the ghost-row similarity
        u /= math.sqrt(step)    # unit trapezoid-weighted L2 norm
        if u[0] < 0.0:
            u = -u
        modes.append(Mode1D(index=j + 1, eigenvalue=float(vals[j]),
                            samples=u, grid_step=step))
    return modes


def eigenvalues_below(config: DeGennesConfig, cutoff: float) -> np.ndarray:
    """All eigenvalues of the configured operator below ``cutoff``, sorted."""
    diag, off, _ = _tridiagonal(config)
    vals = eigh_tridiagonal(diag, off, eigvals_only=True, select="v",
                            select_range=(0.0, cutoff))
    return np.sort(vals[vals < cutoff])


def mu1(xi, n_points=DEFAULT_N_POINTS, t_max=None) -> float:
    """First band function mu_1(xi) on the half line."""
    cfg = DeGennesConfig.infinite(xi, n_points=n_points, t_max=t_max)
    diag, off, _ = _tridiagonal(cfg)
    vals = eigh_tridiagonal(diag, off, eigvals_only=True, select="i",
                            select_range=(0, 0))
    return float(vals[0])


def mu1_truncated(xi, T, n_points=DEFAULT_N_POINTS) -> float:
    """Lowest eigenvalue mu_1(xi; T) with the Dirichlet wall at t = T."""
    cfg = DeGennesConfig.truncated(xi, T, n_points=n_points)
    diag, off, _ = _tridiagonal(cfg)
    vals = eigh_tridiagonal(diag, off, eigvals_only=True, select="i",
                            select_range=(0, 0))
    return float(vals[0])


def mu2_gap(xi_grid, n_points=3000) -> float:
    """Minimum of the second band mu_2 over the given xi grid.

    Certifies numerically that the second band stays above 1.
    """
    xi_grid = np.atleast_1d(np.asarray(xi_grid, dtype=float))
    if xi_grid.size == 0:
        raise ConfigError("xi_grid must be non-empty")
    best = math.inf
    for xi in xi_grid:
        cfg = DeGennesConfig.infinite(xi, n_points=n_points)
        diag, off, _ = _tridiagonal(cfg)
        vals = eigh_tridiagonal(diag, off, eigvals_only=True, select="i",
                                select_range=(1, 1))
        best = min(best, float(vals[0]))
    return best


class Theta0Result(NamedTuple):
    theta0: float
    xi_star: float


def _golden_minimize(f, a, b, xtol=1e-8):
    """Plain golden-section minimization on [a, b]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def _validate_unimodal(values, what="scan", noise=0.0):
    """Error out unless the sampled values decrease to one minimum then
    increase, up to the declared noise floor.

    The noise floor matters where the band is flat to solver precision
    (the far tail, where mu_1 approaches 1 exponentially fast).
    """
    values = np.asarray(values)
    i = int(np.argmin(values))
    if i == 0 or i == len(values) - 1:
        raise NumericsError(f"failed to bracket a minimum on the {what} interval")
    if np.any(np.diff(values[: i + 1]) >= noise) \
            or np.any(np.diff(values[i:]) <= -noise):
        raise NumericsError(f"{what} values are not unimodal")
    return i


def theta0(refinement=1e-6, n_points=2000, scan=(0.0, 3.0, 0.05),
           xtol=1e-8) -> Theta0Result:
    """Locate Theta0 = inf over xi of mu_1(xi) and its minimizer.

    A coarse scan over ``scan`` = (lo, hi, step) brackets the minimum and is
    validated for unimodality; golden-section then refines the minimizer to
    ``xtol`` in xi.  The minimization runs on the grid with ``n_points``
    and again on the doubled grid; the two values are Richardson-combined
    (the stencil is second order) and the procedure errors out if the pair
    disagrees beyond ``refinement``, so the result is stable to the
    requested tolerance under grid refinement.
    """
    if refinement <= 0:
        raise ConfigError("refinement tolerance must be positive")
    lo, hi, step = scan
    xi_scan = np.arange(lo, hi + step / 2, step)
    coarse = np.array([mu1(x, n_points=n_points) for x in xi_scan])
    i = _validate_unimodal(coarse)
    a, b = xi_scan[i - 1], xi_scan[i + 1]

    xi_c, v_c = _golden_minimize(lambda x: mu1(x, n_points=n_points), a, b, xtol)
    xi_f, v_f = _golden_minimize(lambda x: mu1(x, n_points=2 * n_points), a, b, xtol)
    if abs(v_f - v_c) / 3.0 > refinement:
        raise NumericsError(
            f"theta0 not stable under grid refinement: |delta|={abs(v_f - v_c):.3e}"
        )
    value = (4.0 * v_f - v_c) / 3.0
    if not 0.0 < value < 1.0:
        raise NumericsError(f"theta0={value} outside (0, 1): solver inconsistency")
    return Theta0Result(theta0=value, xi_star=xi_f)


class Mu1Table:
    """Tabulated first band mu_1 on a uniform xi grid with cubic interpolation.

    Shared by the moment integrals and the boundary coefficients so that
    curve quadrature stays cheap.  The table records whether the sampled
    band is unimodal; level-set measures fall back to fine-grid counting
    when it is not.
    """

    def __init__(self, xi_min=-6.0, xi_max=6.0, step=0.01, n_points=None):
        if xi_max <= xi_min or step <= 0:
            raise ConfigError("need xi_min < xi_max and step > 0")
        t_max = max(DEFAULT_T_MAX, xi_max + LOCALIZATION_MARGIN)
        if n_points is None:
            n_points = int(round(t_max / 0.003))
        self.xi = np.arange(xi_min, xi_max + step / 2, step)
        self.values = np.array([mu1(x, n_points=n_points, t_max=t_max)
                                for x in self.xi])
        self.step = step
        self.n_points = n_points
        self._spline = CubicSpline(self.xi, self.values)
        try:
            # noise floor: grid error scale of the underlying band solver
            i = _validate_unimodal(self.values, what="table", noise=1e-7)
            self.unimodal = True
        except NumericsError:
            self.unimodal = False
            i = int(np.argmin(self.values))
        a, b = self.xi[max(i - 1, 0)], self.xi[min(i + 1, len(self.xi) - 1)]
        self.xi_star, self.theta0 = _golden_minimize(self._spline, a, b, 1e-10)

    @property
    def xi_min(self):
        return self.xi[0]

    @property
    def xi_max(self):
        return self.xi[-1]

    def mu1(self, xi):
        """Interpolated mu_1; arguments must stay inside the table range."""
        xi = np.asarray(xi, dtype=float)
        if np.any(xi < self.xi_min - 1e-12) or np.any(xi > self.xi_max + 1e-12):
            raise DomainError(
                f"xi outside table range [{self.xi_min}, {self.xi_max}]"
            )
        return self._spline(xi)

    def tail_bound(self) -> float:
        """Bound on the neglected integral of (1 - mu_1) beyond the table.

        |mu_1 - 1| decays at least like exp(-xi^2 / 2) for large xi, so the
        dropped tail of any moment integral is below this number.
        """
        c = self.xi_max
        return math.exp(-c * c / 2.0) / c

    def _bisect_root(self, c, a, b, tol=1e-12):
        """Bisection for mu_1 = c on a monotone branch [a, b]."""
        fa = self._spline(a) - c
        fb = self._spline(b) - c
        if fa * fb > 0:
            raise NumericsError(f"root of mu1={c} not bracketed in [{a}, {b}]")
        for _ in range(80):
            m = 0.5 * (a + b)
            fm = self._spline(m) - c
            if fa * fm <= 0:
                b = m
            else:
                a, fa = m, fm
            if b - a < tol:
                break
        return 0.5 * (a + b)

    def level_interval(self, c):
        """Endpoints of {xi : mu_1(xi) < c} for Theta0 < c <= 1.

        The band is unimodal, so the set is one interval.  When c exceeds
        the band value at the right table edge the interval is truncated
        there (the neglected part is covered by ``tail_bound``).
        """
        if c > 1.0:
            raise DomainError(f"level c={c} > 1 is outside the admissible range")
        if c <= self.theta0:
            return None
        if not self.unimodal:
            return self._level_interval_by_counting(c)
        left = self._bisect_root(c, self.xi_min, self.xi_star)
        if self._spline(self.xi_max) < c:
            right = self.xi_max
        else:
            right = self._bisect_root(c, self.xi_star, self.xi_max)
        return left, right

    def _level_interval_by_counting(self, c, step=1e-3):
        # fallback when the scan is not unimodal: measure by fine counting
        g = np.arange(self.xi_min, self.xi_max, step)
        mask = self._spline(g) < c
        if not np.any(mask):
            return None
        idx = np.nonzero(mask)[0]
        return g[idx[0]], g[idx[-1]] + step

    def level_measure(self, c) -> float:
        """Measure of {xi : mu_1(xi) < c}; zero below Theta0."""
        iv = self.level_interval(c)
        if iv is None:
            return 0.0
        if not self.unimodal:
            g = np.arange(self.xi_min, self.xi_max, 1e-3)
            return float(np.sum(self._spline(g) < c) * 1e-3)
        return iv[1] - iv[0]

    def moment(self, c, n_nodes=200) -> float:
        """Edge moment m(c) = integral over xi of the positive part of c - mu_1.

        Gauss-Legendre on the level interval; the integrand vanishes at both
        endpoints so the quadrature converges fast.  For c = 1 the interval
        is truncated at the right table edge with the exponential tail bound
        accounted separately (``tail_bound``).
        """
        iv = self.level_interval(c)
        if iv is None:
            return 0.0
        a, b = iv
        x, w = _leggauss_cached(n_nodes)
        nodes = 0.5 * (a + b) + 0.5 * (b - a) * x
        return float(np.sum(np.maximum(c - self._spline(nodes), 0.0) * w)
                     * 0.5 * (b - a))


@lru_cache(maxsize=8)
def _leggauss_cached(n):
    return np.polynomial.legendre.leggauss(n)


@lru_cache(maxsize=4)
def _cached_table(xi_min, xi_max, step, n_points):
    return Mu1Table(xi_min=xi_min, xi_max=xi_max, step=step, n_points=n_points)


def default_table() -> Mu1Table:
    """Process-wide shared table on [-6, 6] with step 0.01."""
    return _cached_table(-6.0, 6.0, 0.01, None)
