"""Semiclassical coefficients: edge moments and boundary integrals.

These are the limit values that the model-operator spectra are compared
against: the edge moment m(c), the boundary energy coefficient, the
boundary counting coefficient, and the boundary/bulk split of the shifted
energy.  All boundary integrals run over a sampled closed curve with the
periodic trapezoid rule, which is spectrally accurate for smooth data.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .degennes import Mu1Table, default_table
from .errors import ConfigError, DomainError
from .geometry import BoundaryCurve


@dataclass
class FieldProfile:
    """Magnetic field strength along a boundary curve.

    ``b`` is the infimum of the field over the closed domain and
    ``b_prime`` the infimum over the boundary; the two are stored
    independently because neither dominates the other in general.
    """

    boundary_values: np.ndarray
    b: float
    b_prime: float = None

    def __post_init__(self):
        self.boundary_values = np.asarray(self.boundary_values, dtype=float)
        if np.any(self.boundary_values <= 0.0):
            raise ConfigError("field must be positive at every boundary sample")
        if self.b_prime is None:
            self.b_prime = float(np.min(self.boundary_values))
        if self.b <= 0.0:
            raise ConfigError("b must be positive")

    @classmethod
    def constant(cls, curve: BoundaryCurve, b: float):
        return cls(boundary_values=np.full(len(curve), float(b)), b=float(b))

    @classmethod
    def from_function(cls, curve: BoundaryCurve, fn, b: float):
        """Sample B at the curve points; b (infimum over the closure) is the
        caller's responsibility since boundary samples cannot determine it."""
        vals = np.array([fn(p) for p in curve.points], dtype=float)
        return cls(boundary_values=vals, b=float(b))

    def hyp_ok(self, theta0: float | None = None) -> bool:
        """Hypothesis flag b > Theta0 * b_prime > 0."""
        if theta0 is None:
            theta0 = default_table().theta0
        return self.b > theta0 * self.b_prime > 0.0


def _boundary_integral(curve: BoundaryCurve, values) -> float:
    """Integral of sampled data over the closed curve.

    Periodic cubic spline in arclength, integrated exactly; fourth-order
    accurate even when the samples are not equally spaced in arclength.
    """
    from scipy.interpolate import CubicSpline

    s = np.append(curve.arclength, curve.length + curve.arclength[0])
    v = np.append(values, values[0])
    spline = CubicSpline(s, v, bc_type="periodic")
    return float(spline.integrate(s[0], s[-1]))


def edge_moment(c, table: Mu1Table | None = None) -> float:
    """Edge moment m(c): integral over xi of the positive part of c - mu_1.

    Defined for c in (0, 1]; vanishes for c <= Theta0 because the first
    band never drops below Theta0.  The xi integral is truncated at the
    table edge, with the exponentially small tail covered by the table's
    ``tail_bound``.
    """
    if table is None:
        table = default_table()
    if c > 1.0:
        raise DomainError(f"edge moment needs c <= 1, got c={c}")
    if c <= 0.0:
        raise DomainError(f"edge moment needs c > 0, got c={c}")
    return table.moment(c)


def boundary_energy_coefficient(curve: BoundaryCurve, field: FieldProfile,
                                table: Mu1Table | None = None) -> float:
    """Leading boundary energy coefficient.

    (1/2pi) times the boundary integral of B(x)^{3/2} m(b / B(x)).
    Requires the field hypothesis b > Theta0 * b_prime > 0.
    """
    if table is None:
        table = default_table()
    if len(field.boundary_values) != len(curve):
        raise ConfigError("field samples do not match curve samples")
    if not field.hyp_ok(table.theta0):
        raise DomainError(
            f"field hypothesis violated: need b > Theta0*b_prime > 0, "
            f"got b={field.b}, Theta0*b_prime={table.theta0 * field.b_prime:.6g}"
        )
    B = field.boundary_values
    vals = B ** 1.5 * np.array([table.moment(field.b / Bi) for Bi in B])
    return _boundary_integral(curve, vals) / (2.0 * np.pi)


def counting_coefficient(curve: BoundaryCurve, field: FieldProfile, lam,
                         table: Mu1Table | None = None) -> float:
    """Boundary coefficient of the eigenvalue counting function at level lam*h.

    (1/2pi) times the boundary integral of B^{1/2} times the measure of
    {xi : mu_1(xi) < lam / B(x)}.  Requires 0 < lam < b strictly; an empty
    level set gives 0, not an error.
    """
    if table is None:
        table = default_table()
    if not 0.0 < lam < field.b:
        raise DomainError(f"need 0 < lambda < b={field.b} strictly, got {lam}")
    B = field.boundary_values
    meas = np.array([table.level_measure(lam / Bi) for Bi in B])
    return _boundary_integral(curve, np.sqrt(B) * meas) / (2.0 * np.pi)


def bulk_boundary_split(curve: BoundaryCurve, b, a,
                        table: Mu1Table | None = None):
    """Boundary and bulk terms of the shifted-energy limit at constant field.

    boundary term: |boundary| b^{3/2} / (2pi) times the integral of the
    negative part of mu_1 - 1, which equals m(1);
    bulk term: |domain| b / (2pi) times the positive part of a.

    Returns (boundary_term, bulk_term).
    """
    if table is None:
        table = default_table()
    if not curve.closed:
        raise DomainError("bulk term requires a closed interior domain")
    boundary = curve.length * b ** 1.5 / (2.0 * np.pi) * table.moment(1.0)
    bulk = curve.enclosed_area * b / (2.0 * np.pi) * max(a, 0.0)
    return boundary, bulk


def level_set_derivative_check(c, table: Mu1Table | None = None, dc=1e-5):
    """Centered difference of m at c, for the energy/counting duality test."""
    if table is None:
        table = default_table()
    return (table.moment(c + dc) - table.moment(c - dc)) / (2.0 * dc)
