"""Independent numerical oracles used by the tests.

These deliberately avoid the library's own computational paths: the
cylinder oracle discretizes the full 2D operator on a grid (no separation
of variables), curve lengths come from adaptive quadrature of the exact
speed, and tubular integrals are done in polar coordinates.
"""

import numpy as np
import scipy.sparse as sp
from scipy.integrate import quad
from scipy.sparse.linalg import eigsh

# 8th-order central difference coefficients (second and first derivative)
_C2 = np.array([-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72,
                8 / 5, -1 / 5, 8 / 315, -1 / 560])
_C1 = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0,
                4 / 5, -1 / 5, 4 / 105, -1 / 280])
_OFFS = np.arange(-4, 5)


def _circulant(coefs, n):
    data, rows, cols = [], [], []
    idx = np.arange(n)
    for o, c in zip(_OFFS, coefs):
        if c == 0.0:
            continue
        rows.append(idx)
        cols.append((idx + o) % n)
        data.append(np.full(n, c))
    return sp.csr_matrix((np.concatenate(data),
                          (np.concatenate(rows), np.concatenate(cols))),
                         shape=(n, n))


def cylinder_fd_energy(lam, b, S, T, h, ns, nt, k0=16):
    """Shifted energy of the cylinder from a genuine 2D discretization.

    Operator -(h d/ds + i b t)^2 - h^2 d^2/dt^2 on [0,S] x (0, sqrt(h) T),
    periodic in s (8th-order stencils), Neumann at t = 0 via a symmetrized
    ghost row, Dirichlet at the top.  All eigenvalues below h b (1 + lam)
    are collected with a shift-invert Lanczos run whose basis size doubles
    until an eigenvalue beyond the threshold certifies completeness.
    """
    ds = S / ns
    height = np.sqrt(h) * T
    dt = height / nt
    t = np.arange(nt) * dt
    D2s = _circulant(_C2 / ds ** 2, ns)
    D1s = _circulant(_C1 / ds, ns)
    Is = sp.identity(ns)
    main = np.full(nt, -2.0)
    od = np.ones(nt - 1)
    od[0] = np.sqrt(2.0)  # Neumann ghost, symmetrized
    L_t = (sp.diags([od, main, od], [-1, 0, 1]) / dt ** 2).tocsr()
    X2 = sp.diags(t)
    A = (sp.kron(sp.identity(nt), -h * h * D2s)
         - sp.kron(X2, 2j * b * h * D1s)
         + sp.kron(X2.power(2) * b * b, Is)
         - h * h * sp.kron(L_t, Is)).tocsc()
    thr = h * b * (1 + lam)
    k = k0
    while True:
        vals = np.sort(eigsh(A, k=k, sigma=0, which="LM",
                             return_eigenvectors=False).real)
        if vals[-1] > thr:
            break
        k *= 2
        if k > 512:
            raise RuntimeError("oracle could not certify completeness")
    below = vals[vals < thr]
    return float(np.sum(thr - below))


def cylinder_fd_energy_extrapolated(lam, b, S, T, h, ns, nt):
    """Richardson value from the (ns, nt) and (2ns, 2nt) grids.

    The t-stencil is second order, so doubling divides its error by four.
    Returns (extrapolated, coarse, fine).
    """
    e1 = cylinder_fd_energy(lam, b, S, T, h, ns, nt)
    e2 = cylinder_fd_energy(lam, b, S, T, h, 2 * ns, 2 * nt)
    return (4.0 * e2 - e1) / 3.0, e1, e2


def ellipse_length_quad(a, b_axis):
    """Adaptive quadrature of the exact ellipse speed."""
    val, _ = quad(lambda t: np.hypot(a * np.sin(t), b_axis * np.cos(t)),
                  0.0, 2.0 * np.pi, epsabs=1e-13, epsrel=1e-13)
    return val


def annulus_integral_polar(fn, r_lo, r_hi, n_r=96, n_theta=1024):
    """Integral of fn(x, y) over the annulus r_lo < r < r_hi.

    Gauss-Legendre in r, periodic trapezoid in theta; independent of any
    boundary-coordinate machinery.
    """
    gx, gw = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * (r_lo + r_hi) + 0.5 * (r_hi - r_lo) * gx
    wr = 0.5 * (r_hi - r_lo) * gw
    th = np.linspace(0.0, 2.0 * np.pi, n_theta, endpoint=False)
    R, TH = np.meshgrid(r, th, indexing="ij")
    X, Y = R * np.cos(TH), R * np.sin(TH)
    vals = fn(X, Y)
    return float(np.sum(vals * (wr * r)[:, None]) * (2.0 * np.pi / n_theta))


def dense_tridiag_mu(xi, n, t_max):
    """Lowest eigenvalue by full dense symmetric-tridiagonal
    diagonalization; the slow but simple cross-check of the band solver."""
    from scipy.linalg import eigh_tridiagonal

    dt = t_max / n
    t = np.arange(n) * dt
    diag = 2.0 / dt ** 2 + (t - xi) ** 2
    off = np.full(n - 1, -1.0 / dt ** 2)
    off[0] = -np.sqrt(2.0) / dt ** 2
    return float(eigh_tridiagonal(diag, off, eigvals_only=True)[0])
