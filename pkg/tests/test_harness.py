import numpy as np
import pytest

from magedge import (ConfigError, ConvergenceTable, DiskTemplate, DomainError,
                     extrapolate, variational_check, verify_counting,
                     verify_theorem1, verify_theorem2)


def _synthetic_table(hs, values):
    t = ConvergenceTable(experiment="synthetic")
    for h, v in zip(hs, values):
        t.add_row(h, v, 1.0, certificates={"synthetic": True})
    return t


def test_table_requires_certificates_and_order():
    t = ConvergenceTable(experiment="x")
    with pytest.raises(ConfigError):
        t.add_row(0.01, 1.0, 1.0, certificates={})
    t.add_row(0.01, 1.0, 1.0, certificates={"ok": 1})
    with pytest.raises(ConfigError):
        t.add_row(0.02, 1.0, 1.0, certificates={"ok": 1})


def test_extrapolate_recovers_sqrt_law():
    hs = [0.02, 0.01, 0.005, 0.0025]
    L, C = 0.7, 0.31
    t = _synthetic_table(hs, [L + C * h ** 0.5 for h in hs])
    fit = extrapolate(t)
    assert abs(fit.limit_estimate - L) < 1e-8
    assert fit.fitted_rate == pytest.approx(0.5, abs=1e-6)
    assert fit.residual < 1e-10


def test_extrapolate_constant_rows():
    t = _synthetic_table([0.02, 0.01, 0.005], [0.3, 0.3, 0.3])
    fit = extrapolate(t)
    assert fit.limit_estimate == 0.3
    assert fit.fitted_rate is None


def test_extrapolate_needs_three_rows():
    t = _synthetic_table([0.02, 0.01], [1.0, 1.1])
    with pytest.raises(ConfigError):
        extrapolate(t)


def test_error_trend_flags():
    t = _synthetic_table([0.02, 0.01, 0.005], [1.3, 1.1, 1.2])
    assert t.error_trend_flags() == [2]


def test_variational_check_passes_seeded():
    res = variational_check(seed=2024, trials=200)
    assert res.passed
    assert res.trials == 200
    assert res.violations == []


def test_variational_check_trivial_cases():
    rng = np.random.default_rng(3)
    M = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    H = (M + M.conj().T) / 2
    w, V = np.linalg.eigh(H)
    neg = np.sum(w[w < 0])
    # gamma = 0 gives trace 0 >= sum of negatives
    assert 0.0 >= neg
    # spectral projector saturates
    proj = (V * (w < 0)[None, :]) @ V.conj().T
    assert np.trace(H @ proj).real == pytest.approx(neg, abs=1e-12)


def test_variational_check_determinism():
    a = variational_check(seed=9, trials=50)
    b = variational_check(seed=9, trials=50)
    assert a.passed == b.passed == True  # noqa: E712


@pytest.mark.slow
def test_verify_theorem1_short_sweep(mu1_table):
    t = verify_theorem1(DiskTemplate(R=1.0, b=1.0), h_list=(0.02, 0.01),
                        table=mu1_table)
    assert len(t.rows) == 2
    assert t.rows[0].h == 0.02
    for r in t.rows:
        assert r.certificates["n_radial"] >= 400
        assert "xi_tail_bound" in r.certificates
        assert abs(r.ratio - 1.0) < 0.05
    # error shrinks with h
    assert t.rows[1].abs_err < t.rows[0].abs_err


@pytest.mark.slow
def test_verify_theorem2_signs(mu1_table):
    t = verify_theorem2(DiskTemplate(R=1.0, b=1.0), a=-2.0,
                        h_list=(0.02, 0.01), table=mu1_table)
    assert t.metadata["bulk_term"] == 0.0
    for r in t.rows:
        assert r.lhs <= 0.0  # negative shift can only lower the sum
    assert "undifferenced_rows" in t.metadata


@pytest.mark.slow
def test_verify_counting_empty_level_set(mu1_table):
    t = verify_counting(DiskTemplate(R=1.0, b=1.0), 0.5,
                        h_list=(0.02, 0.01), table=mu1_table)
    for r in t.rows:
        assert r.rhs == 0.0
        assert r.lhs == 0.0


def test_verify_counting_rejects_bad_fraction(mu1_table):
    with pytest.raises(DomainError):
        verify_counting(DiskTemplate(), 1.0, h_list=(0.02,), table=mu1_table)


def test_verify_theorem2_rejects_exterior_positive_shift(mu1_table):
    with pytest.raises(DomainError):
        verify_theorem2(DiskTemplate(exterior=True), a=1.0,
                        h_list=(0.02,), table=mu1_table)


def test_sweep_determinism(mu1_table):
    a = verify_theorem1(DiskTemplate(), h_list=(0.02,), table=mu1_table)
    b = verify_theorem1(DiskTemplate(), h_list=(0.02,), table=mu1_table,
                        threads=3)
    assert a.rows[0].lhs == b.rows[0].lhs
    assert a.rows[0].rhs == b.rows[0].rhs
