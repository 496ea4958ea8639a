"""Spectral toolkit for magnetic Neumann boundary states.

Computes the half-line oscillator band functions and the constant Theta0,
evaluates whole-plane and half-plane projector kernels, assembles the
semiclassical boundary/bulk coefficients over sampled curves, solves the
cylinder and disk model operators exactly, and verifies the limiting
energy and counting laws by h-sweeps.
"""

from .degennes import (DeGennesConfig, Mode1D, Mu1Table, Theta0Result,
                       default_table, mu1, mu1_truncated, mu2_gap,
                       solve_de_gennes, theta0)
from .errors import (ConfigError, DomainError, GeometryError,
                     IncompleteSpectrumError, MagedgeError, NumericsError)
from .geometry import (BoundaryCurve, circle, curve_from_parametrization,
                       ellipse, load_curve_points)
from .harness import (DEFAULT_H_LIST, ConvergenceTable, DiskTemplate,
                      ExtrapolationResult, TableRow, VariationalCheckResult,
                      extrapolate, variational_check, verify_counting,
                      verify_theorem1, verify_theorem2)
from .models2d import (CylinderEnergy, CylinderSpec, DiskSpec, SpectrumResult,
                       counting_function, cylinder_energy_bound,
                       cylinder_energy_exact, disk_spectrum, riesz_mean)
from .projectors import (IntertwiningResult, ProjectorKernel, TestFunction,
                         halfplane_kernel_eval, halfplane_mode, laguerre,
                         landau_kernel_eval, verify_intertwining,
                         verify_resolution_identity)
from .semiclassics import (FieldProfile, boundary_energy_coefficient,
                           bulk_boundary_split, counting_coefficient,
                           edge_moment)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
