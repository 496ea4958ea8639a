import numpy as np
import pytest

from magedge import (ConfigError, CylinderSpec, DiskSpec,
                     IncompleteSpectrumError, NumericsError,
                     counting_function, cylinder_energy_bound,
                     cylinder_energy_exact, disk_spectrum, riesz_mean)
from oracles import cylinder_fd_energy_extrapolated


def test_cylinder_bound_holds():
    spec = CylinderSpec(S=1.0, T=5.0, b=1.0, lam=0.05, h=0.01)
    res = cylinder_energy_exact(spec)
    assert res.value <= cylinder_energy_bound(spec)
    assert res.value > 0.0
    certs = res.certificates
    assert certs["mu1_at_window_edges"][0] > 1.05
    assert certs["mu1_at_window_edges"][1] > 1.05
    assert certs["bands_per_fiber_max"] >= 1


def test_cylinder_empty_sum_when_wall_close():
    # T = 1 pushes the kinetic floor (pi/2)^2 above 1 + lam
    spec = CylinderSpec(S=1.0, T=1.0, b=1.0, lam=0.05, h=0.01)
    assert cylinder_energy_exact(spec).value == 0.0


def test_cylinder_against_2d_oracle():
    spec = CylinderSpec(S=1.0, T=5.0, b=1.0, lam=0.05, h=0.01)
    ex = cylinder_energy_exact(spec).value
    fd, coarse, fine = cylinder_fd_energy_extrapolated(
        0.05, 1.0, 1.0, 5.0, 0.01, 48, 192)
    assert abs(coarse - fine) < 5e-4 * fd  # oracle self-consistency
    assert abs(ex - fd) < 1e-4 * fd


def test_cylinder_against_2d_oracle_off_unit_field():
    # the scaled Dirichlet wall is T * sqrt(b); the oracle arbitrates
    spec = CylinderSpec(S=1.0, T=4.0, b=2.0, lam=0.05, h=0.01)
    ex = cylinder_energy_exact(spec).value
    fd, coarse, fine = cylinder_fd_energy_extrapolated(
        0.05, 2.0, 1.0, 4.0, 0.01, 96, 256)
    assert abs(ex - fd) < 2e-4 * fd


def test_cylinder_spec_validation():
    with pytest.raises(ConfigError):
        CylinderSpec(S=0.0, T=1.0, b=1.0, lam=0.1, h=0.01)
    with pytest.raises(ConfigError):
        CylinderSpec(S=1.0, T=1.0, b=1.0, lam=1.2, h=0.01)


def test_disk_ground_state_window():
    spec = DiskSpec(R=1.0, b=1.0, h=0.005, n_radial=680)
    res = disk_spectrum(spec, threshold=0.005)
    e1 = res.eigenvalues[0] / 0.005
    assert 0.55 < e1 < 0.65


def test_disk_counting_matches_boundary_coefficient():
    # at h = 0.005 the scaled count below 0.8 b h sits within 15% of the
    # boundary counting coefficient of the circle
    from magedge import (FieldProfile, circle, counting_coefficient,
                         default_table)

    h = 0.005
    res = disk_spectrum(DiskSpec(R=1.0, b=1.0, h=h, n_radial=680),
                        threshold=0.85 * h)
    lhs = np.sqrt(h) * counting_function(res, 0.8 * h)
    curve = circle(1.0, n=512)
    rhs = counting_coefficient(curve, FieldProfile.constant(curve, 1.0), 0.8,
                               default_table())
    assert abs(lhs - rhs) < 0.15 * rhs


def test_disk_spectrum_structure():
    spec = DiskSpec(R=1.0, b=1.0, h=0.01, n_radial=480)
    res = disk_spectrum(spec, threshold=0.01)
    assert np.all(np.diff(res.eigenvalues) >= 0)
    assert np.all(res.eigenvalues < res.threshold)
    assert len(res.sector_labels) == len(res.eigenvalues)
    assert res.certificates["excluded_above_bound"] > res.threshold
    assert res.certificates["excluded_below_bound"] > res.threshold
    # nothing sits within the 1e-10 * b * h flagging band here
    assert res.near_threshold == 0


def test_disk_determinism():
    spec = DiskSpec(R=1.0, b=1.0, h=0.01, n_radial=400)
    a = disk_spectrum(spec, threshold=0.01)
    b2 = disk_spectrum(spec, threshold=0.01)
    assert np.array_equal(a.eigenvalues, b2.eigenvalues)
    c = disk_spectrum(spec, threshold=0.01, threads=4)
    assert np.array_equal(a.eigenvalues, c.eigenvalues)
    assert np.array_equal(a.sector_labels, c.sector_labels)


def test_disk_dilation_scaling():
    # (h, b) -> (4h, 4b) at fixed R scales the spectrum by exactly 16
    s1 = DiskSpec(R=1.0, b=1.0, h=0.01, n_radial=480)
    s2 = DiskSpec(R=1.0, b=4.0, h=0.04, n_radial=480)
    r1 = disk_spectrum(s1, threshold=0.01)
    r2 = disk_spectrum(s2, threshold=0.16)
    assert len(r1) == len(r2)
    assert np.allclose(r2.eigenvalues, 16.0 * r1.eigenvalues, rtol=1e-6)


def test_disk_gauge_twist_invariance():
    base = DiskSpec(R=1.0, b=1.0, h=0.01, n_radial=400)
    twisted = DiskSpec(R=1.0, b=1.0, h=0.01, n_radial=400, gauge_twist=3)
    ra = disk_spectrum(base, threshold=0.01)
    rb = disk_spectrum(twisted, threshold=0.01)
    assert np.allclose(ra.eigenvalues, rb.eigenvalues, rtol=1e-8, atol=0.0)
    # sectors relabel by exactly the twist
    assert np.array_equal(rb.sector_labels, ra.sector_labels + 3)


def test_disk_radial_convergence_second_order():
    h = 0.01
    vals = []
    for n in (300, 600, 1200):
        res = disk_spectrum(DiskSpec(R=1.0, b=1.0, h=h, n_radial=n),
                            threshold=h, validate_grid=False)
        vals.append(res.eigenvalues[0])
    ratio = (vals[0] - vals[1]) / (vals[1] - vals[2])
    assert abs(ratio - 4.0) < 0.5


def test_disk_grid_check_raises_when_coarse():
    spec = DiskSpec(R=1.0, b=1.0, h=0.0025, n_radial=200)
    with pytest.raises(NumericsError):
        disk_spectrum(spec, threshold=0.0025)


def test_exterior_monotone_in_truncation_radius():
    # aligned grids: the smaller annulus is a Dirichlet restriction of the
    # larger one, so each eigenvalue can only drop as R_out grows
    h, b, R = 0.01, 1.0, 1.0
    dr = 1.0 / 640
    prev = None
    for width in (1.0, 1.4, 1.8):
        spec = DiskSpec(R=R, b=b, h=h, exterior=True, R_out=R + width,
                        n_radial=int(round(width / dr)))
        res = disk_spectrum(spec, threshold=0.85 * b * h)
        if prev is not None:
            n = min(len(prev), len(res.eigenvalues))
            assert np.all(res.eigenvalues[:n] <= prev[:n] + 1e-8)
            assert len(res.eigenvalues) >= len(prev)
        prev = res.eigenvalues
    assert prev is not None and len(prev) > 0


def test_exterior_requires_margin_and_threshold():
    with pytest.raises(ConfigError):
        DiskSpec(R=1.0, b=1.0, h=0.01, exterior=True, R_out=1.05)
    spec = DiskSpec(R=1.0, b=1.0, h=0.01, exterior=True)
    with pytest.raises(ConfigError):
        disk_spectrum(spec, threshold=0.011)  # at/above essential spectrum


def test_riesz_counting_consistency():
    spec = DiskSpec(R=1.0, b=1.0, h=0.01, n_radial=480)
    res = disk_spectrum(spec, threshold=0.01)
    E = 0.95 * 0.01
    # order-1 Riesz mean equals the integral of the counting function;
    # N is piecewise constant between eigenvalues, so the integral is an
    # exact finite sum over the breakpoints
    ev = res.eigenvalues[res.eigenvalues < E]
    breaks = np.concatenate([ev, [E]])
    integral = float(np.sum(np.arange(1, len(ev) + 1) * np.diff(breaks)))
    assert riesz_mean(res, E) == pytest.approx(integral, abs=1e-14)


def test_riesz_mean_arithmetic():
    res_like = disk_spectrum(DiskSpec(R=1.0, b=1.0, h=0.01, n_radial=400),
                             threshold=0.01)
    res_like.eigenvalues = np.array([0.5, 0.9]) * 0.01
    res_like.threshold = 0.01
    assert riesz_mean(res_like, 0.01) == pytest.approx(0.006)
    assert counting_function(res_like, 0.008) == 1
    assert counting_function(res_like, 0.004) == 0


def test_completeness_guard():
    spec = DiskSpec(R=1.0, b=1.0, h=0.01, n_radial=400)
    res = disk_spectrum(spec, threshold=0.009)
    with pytest.raises(IncompleteSpectrumError):
        riesz_mean(res, 0.01)
    with pytest.raises(IncompleteSpectrumError):
        counting_function(res, 0.0095)


def test_empty_spectrum_riesz_zero():
    spec = DiskSpec(R=1.0, b=1.0, h=0.01, n_radial=400)
    res = disk_spectrum(spec, threshold=0.01)
    res.eigenvalues = np.array([])
    assert riesz_mean(res, 0.005) == 0.0
    assert counting_function(res, 0.005) == 0
