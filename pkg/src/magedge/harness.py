"""h-sweep harness: model spectra against semiclassical coefficients.

Each verification produces a ConvergenceTable of rows (h, lhs, rhs, ratio,
abs_err) with truncation certificates attached to every row; a row without
certificates is rejected.  Tables extrapolate with a least-squares power
fit over the last rows, with the fitted rate reported as a diagnostic
only (the limit theorems state no finite-h rate).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .degennes import Mu1Table, default_table
from .errors import ConfigError, DomainError
from .geometry import circle
from .models2d import DiskSpec, counting_function, disk_spectrum, riesz_mean
from .semiclassics import (FieldProfile, boundary_energy_coefficient,
                           bulk_boundary_split, counting_coefficient)

DEFAULT_H_LIST = (0.02, 0.01, 0.005, 0.0025)


@dataclass(frozen=True)
class DiskTemplate:
    """Disk parameters shared across an h sweep; ``at(h)`` fills in h."""

    R: float = 1.0
    b: float = 1.0
    n_radial: int = 0  # 0 = resolve the boundary layer with ~48 points
    m_margin: int = 5
    exterior: bool = False

    def at(self, h) -> DiskSpec:
        n = self.n_radial or max(400, int(48.0 * self.R
                                          * math.sqrt(self.b / h)))
        return DiskSpec(R=self.R, b=self.b, h=h, n_radial=n,
                        m_margin=self.m_margin, exterior=self.exterior)


@dataclass
class TableRow:
    h: float
    lhs: float
    rhs: float
    certificates: dict = field(default_factory=dict, repr=False)

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs != 0.0 else float("nan")

    @property
    def abs_err(self) -> float:
        return abs(self.lhs - self.rhs)


@dataclass
class ConvergenceTable:
    """Rows of an h sweep, h strictly decreasing, certificates mandatory."""

    experiment: str
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add_row(self, h, lhs, rhs, certificates):
        if not certificates:
            raise ConfigError("a table row without truncation certificates "
                              "is invalid")
        if self.rows and h >= self.rows[-1].h:
            raise ConfigError("rows must have strictly decreasing h")
        self.rows.append(TableRow(h=h, lhs=lhs, rhs=rhs,
                                  certificates=certificates))

    @property
    def h(self):
        return np.array([r.h for r in self.rows])

    @property
    def lhs(self):
        return np.array([r.lhs for r in self.rows])

    @property
    def rhs(self):
        return np.array([r.rhs for r in self.rows])

    def error_trend_flags(self, noise_floor=0.0):
        """Row indices where |lhs-rhs| grew beyond the noise floor."""
        err = np.abs(self.lhs - self.rhs)
        return [i for i in range(1, len(err))
                if err[i] > err[i - 1] + noise_floor]


@dataclass
class ExtrapolationResult:
    limit_estimate: float
    fitted_rate: float | None
    residual: float


def extrapolate(table: ConvergenceTable, window=3) -> ExtrapolationResult:
    """Fit lhs(h) = L + C h^p over the last ``window`` rows.

    The leading-order theory makes early rows unreliable, so only the tail
    of the sweep enters.  Constant rows return that constant with the rate
    marked unavailable; an ill-conditioned fit falls back to the last lhs.
    """
    if len(table.rows) < 3:
        raise ConfigError("extrapolation needs at least 3 rows")
    rows = table.rows[-window:] if window < len(table.rows) else table.rows
    h = np.array([r.h for r in rows])
    y = np.array([r.lhs for r in rows])
    if np.allclose(y, y[0], rtol=0.0, atol=1e-14 * max(1.0, abs(y[0]))):
        return ExtrapolationResult(limit_estimate=float(y[0]),
                                   fitted_rate=None, residual=0.0)

    def fit_at(p):
        A = np.column_stack([np.ones_like(h), h ** p])
        coef, res, rank, _ = np.linalg.lstsq(A, y, rcond=None)
        resid = float(np.sqrt(res[0])) if res.size else float(
            np.linalg.norm(A @ coef - y))
        return coef, resid, rank

    # golden-section on the fit residual over the rate
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = 0.05, 4.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = fit_at(c)[1]
    fd = fit_at(d)[1]
    while b - a > 1e-9:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fit_at(c)[1]
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fit_at(d)[1]
    p = c if fc < fd else d
    coef, resid, rank = fit_at(p)
    if rank < 2 or not np.isfinite(coef).all():
        return ExtrapolationResult(limit_estimate=float(y[-1]),
                                   fitted_rate=None, residual=float("inf"))
    return ExtrapolationResult(limit_estimate=float(coef[0]),
                               fitted_rate=float(p), residual=resid)


def _sweep(h_list, row_fn, experiment, metadata, threads=1):
    h_list = sorted(set(float(h) for h in h_list), reverse=True)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(row_fn, h_list))
    else:
        rows = [row_fn(h) for h in h_list]
    table = ConvergenceTable(experiment=experiment, metadata=metadata)
    for h, lhs, rhs, certs in rows:
        table.add_row(h, lhs, rhs, certs)
    return table


def verify_theorem1(template: DiskTemplate, h_list=DEFAULT_H_LIST,
                    table: Mu1Table | None = None, curve_points=512,
                    threads=1) -> ConvergenceTable:
    """Boundary-energy sweep for the constant-field disk.

    lhs(h) = h^{-1/2} sum of [e_j - b h]_- over the spectrum below b h;
    rhs = boundary energy coefficient of the circle, independent of h.
    """
    if table is None:
        table = default_table()
    curve = circle(template.R, n=curve_points)
    fld = FieldProfile.constant(curve, template.b)
    rhs = boundary_energy_coefficient(curve, fld, table)

    def row(h):
        spec = template.at(h)
        res = disk_spectrum(spec, threshold=template.b * h)
        lhs = riesz_mean(res, template.b * h) / math.sqrt(h)
        certs = dict(res.certificates)
        certs["xi_tail_bound"] = table.tail_bound()
        return h, lhs, rhs, certs

    meta = {"template": template, "rhs_formula": "boundary energy coefficient",
            "curve_points": curve_points}
    return _sweep(h_list, row, "thm1-energy", meta, threads)


def verify_theorem2(template: DiskTemplate, a, h_list=DEFAULT_H_LIST,
                    table: Mu1Table | None = None, curve_points=512,
                    threads=1) -> ConvergenceTable:
    """Shifted-energy sweep isolating the bulk term.

    Primary rows compare the differenced quantity
    h^{-1/2} (sum [e - bh - a h^{3/2}]_- minus sum [e - bh]_-) against the
    pure bulk term; the shared boundary term cancels in the difference, so
    the bulk contribution shows at much coarser h.  The undifferenced
    comparison (lhs vs boundary + bulk) is kept in the metadata.

    Restricted to bounded domains when a > 0: outside a bounded domain the
    essential spectrum starts at b h and the shifted sum diverges.
    """
    if template.exterior and a > 0:
        raise DomainError(
            "bulk isolation with a > 0 needs a bounded domain: the shifted "
            "sum diverges for the exterior problem"
        )
    if table is None:
        table = default_table()
    curve = circle(template.R, n=curve_points)
    boundary_term, bulk_term = bulk_boundary_split(curve, template.b, a, table)
    undiff = []

    def row(h):
        b = template.b
        spec = template.at(h)
        shift = b * h + a * h ** 1.5
        threshold = b * h + max(a, 0.0) * h ** 1.5 + 0.02 * b * h
        res = disk_spectrum(spec, threshold=threshold)
        lhs_a = riesz_mean(res, shift) / math.sqrt(h)
        lhs_0 = riesz_mean(res, b * h) / math.sqrt(h)
        undiff.append((h, lhs_a, boundary_term + bulk_term))
        certs = dict(res.certificates)
        certs["xi_tail_bound"] = table.tail_bound()
        return h, lhs_a - lhs_0, bulk_term, certs

    meta = {"template": template, "a": a,
            "boundary_term": boundary_term, "bulk_term": bulk_term}
    t = _sweep(h_list, row, "thm2-bulk", meta, threads)
    t.metadata["undifferenced_rows"] = sorted(undiff, reverse=True)
    return t


def verify_counting(template: DiskTemplate, lambda_frac,
                    h_list=DEFAULT_H_LIST, table: Mu1Table | None = None,
                    curve_points=512, threads=1) -> ConvergenceTable:
    """Counting-function sweep at the level lambda_frac * b * h.

    Requires lambda_frac strictly below 1 (the level-set measure diverges
    at the lowest Landau level); fractions at or below Theta0 give an
    empty level set and both sides converge to zero.
    """
    if not 0.0 < lambda_frac < 1.0:
        raise DomainError(
            f"lambda_frac must lie strictly inside (0, 1), got {lambda_frac}"
        )
    if table is None:
        table = default_table()
    lam = lambda_frac * template.b
    curve = circle(template.R, n=curve_points)
    fld = FieldProfile.constant(curve, template.b)
    rhs = counting_coefficient(curve, fld, lam, table)

    def row(h):
        spec = template.at(h)
        threshold = min((lambda_frac + 0.02) * template.b * h,
                        template.b * h)
        res = disk_spectrum(spec, threshold=threshold)
        lhs = math.sqrt(h) * counting_function(res, lam * h)
        certs = dict(res.certificates)
        certs["xi_tail_bound"] = table.tail_bound()
        return h, lhs, rhs, certs

    meta = {"template": template, "lambda_frac": lambda_frac}
    return _sweep(h_list, row, "counting", meta, threads)


@dataclass
class VariationalCheckResult:
    passed: bool
    trials: int
    violations: list

    def __bool__(self):
        return self.passed


def variational_check(seed: int, trials: int, tol=1e-10) -> VariationalCheckResult:
    """Finite-matrix check of the trace variational principles.

    For random Hermitian H (sizes 2 to 12) and random contractions
    0 <= gamma <= 1: tr(H gamma) never drops below the sum of the negative
    eigenvalues, with equality when gamma is the spectral projector onto
    the negative part; random orthonormal families never beat the spectral
    value either.  Violations are returned with the offending matrices.
    """
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    violations = []
    for trial in range(trials):
        n = int(rng.integers(2, 13))
        M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        H = (M + M.conj().T) / 2.0
        w, V = np.linalg.eigh(H)
        neg_sum = float(np.sum(w[w < 0.0]))
        scale = float(np.max(np.abs(w))) + 1.0

        # random contraction via random eigenbasis and [0, 1] eigenvalues
        Q, _ = np.linalg.qr(rng.standard_normal((n, n))
                            + 1j * rng.standard_normal((n, n)))
        g_eigs = rng.uniform(0.0, 1.0, n)
        gamma = (Q * g_eigs[None, :]) @ Q.conj().T
        tr_gamma = float(np.trace(H @ gamma).real)
        if tr_gamma < neg_sum - tol * scale:
            violations.append({"trial": trial, "kind": "contraction",
                               "H": H, "gamma": gamma,
                               "tr": tr_gamma, "neg_sum": neg_sum})

        # spectral projector saturates the bound
        proj = (V * (w < 0.0)[None, :]) @ V.conj().T
        tr_proj = float(np.trace(H @ proj).real)
        if abs(tr_proj - neg_sum) > 1e-12 * scale:
            violations.append({"trial": trial, "kind": "projector",
                               "H": H, "tr": tr_proj, "neg_sum": neg_sum})

        # random orthonormal family of random size
        k = int(rng.integers(1, n + 1))
        F, _ = np.linalg.qr(rng.standard_normal((n, k))
                            + 1j * rng.standard_normal((n, k)))
        fam = float(np.trace(F.conj().T @ H @ F).real)
        if fam < neg_sum - tol * scale:
            violations.append({"trial": trial, "kind": "family",
                               "H": H, "F": F, "sum": fam,
                               "neg_sum": neg_sum})
    return VariationalCheckResult(passed=not violations, trials=trials,
                                  violations=violations)
