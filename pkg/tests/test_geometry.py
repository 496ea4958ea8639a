import numpy as np
import pytest

from magedge import GeometryError, circle, curve_from_parametrization, ellipse
from oracles import ellipse_length_quad


def test_circle_closed_forms():
    c = circle(1.0, n=256)
    assert abs(c.length - 2 * np.pi) < 1e-6
    assert abs(c.enclosed_area - np.pi) < 1e-6
    assert np.max(np.abs(c.curvature - 1.0)) < 1e-4


def test_circle_scaled_radius():
    c = circle(2.5, n=256)
    assert abs(c.length - 5 * np.pi) < 1e-6
    assert abs(c.enclosed_area - np.pi * 6.25) < 1e-6
    assert np.max(np.abs(c.curvature - 0.4)) < 1e-4


def test_gauss_bonnet_turning():
    for curve in (circle(1.0, n=256), ellipse(2.0, 1.0, n=512)):
        assert abs(curve.total_turning() - 2 * np.pi) < 1e-6
    # the sampled curvature field integrates to the same value at its own
    # (second-order) accuracy
    c = circle(1.0, n=512)
    assert abs(c.curvature_integral() - 2 * np.pi) < 1e-3


def test_clockwise_orientation():
    th = np.linspace(0, 2 * np.pi, 256, endpoint=False)
    pts = np.c_[np.cos(-th), np.sin(-th)]
    c = curve_from_parametrization(pts)
    assert c.orientation == -1
    assert abs(c.total_turning() + 2 * np.pi) < 1e-6
    # curvature flips sign so that 1 - t k > 0 still holds on the inward side
    assert np.max(np.abs(c.curvature + 1.0)) < 1e-4
    assert abs(c.enclosed_area - np.pi) < 1e-6


def test_ellipse_curvature_at_vertex():
    # curvature a / b^2 at the point (a, 0), which is the first sample
    c = ellipse(2.0, 1.0, n=512)
    assert abs(c.curvature[0] - 2.0) < 1e-3


def test_ellipse_length_against_quadrature():
    c = ellipse(2.0, 1.0, n=512)
    assert abs(c.length - ellipse_length_quad(2.0, 1.0)) < 1e-6
    assert abs(c.enclosed_area - 2.0 * np.pi) < 1e-6


def test_reparametrization_invariance():
    c1 = ellipse(2.0, 1.0, n=512)
    c2 = ellipse(2.0, 1.0, n=1024)
    assert abs(c1.length - c2.length) < 1e-6
    assert abs(c1.enclosed_area - c2.enclosed_area) < 1e-6


def test_arclength_strictly_increasing():
    c = ellipse(2.0, 1.0, n=256)
    assert np.all(np.diff(c.arclength) > 0)
    assert c.arclength[0] == 0.0
    assert c.arclength[-1] < c.length


def test_tubular_map_circle():
    c = circle(1.0, n=256)
    # inward normal points to the center: |x - t n| traces radius 1 - t
    p = c.tubular_point(np.array([0.3, 1.7]), np.array([0.2, 0.2]))
    assert np.allclose(np.hypot(p[:, 0], p[:, 1]), 0.8, atol=1e-6)


def test_curvature_at_interpolates():
    c = circle(1.0, n=512)
    s = np.linspace(0, c.length, 37, endpoint=False)
    assert np.max(np.abs(c.curvature_at(s) - 1.0)) < 1e-4


def test_too_few_points_rejected():
    th = np.linspace(0, 2 * np.pi, 8, endpoint=False)
    with pytest.raises(GeometryError):
        curve_from_parametrization(np.c_[np.cos(th), np.sin(th)])


def test_self_intersection_rejected():
    # figure eight
    t = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    pts = np.c_[np.sin(2 * t), np.sin(t)]
    with pytest.raises(GeometryError):
        curve_from_parametrization(pts)


def test_repeated_points_rejected():
    th = np.linspace(0, 2 * np.pi, 32, endpoint=False)
    pts = np.c_[np.cos(th), np.sin(th)]
    pts[5] = pts[4]
    with pytest.raises(GeometryError):
        curve_from_parametrization(pts)
