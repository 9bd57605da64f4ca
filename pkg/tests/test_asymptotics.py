import math
import random

import numpy as np
import pytest

import mlcounts.asymptotics as asym
from mlcounts.asymptotics import (
    F_func,
    G_func,
    bulk_cumulant_coeffs,
    edge_cumulant_coeffs,
    edge_mean_coeffs,
    edge_var_coeffs,
    outside_cumulant_coeffs,
    predict_log_mgf,
    theorem_coefficients,
    zn_expansion,
)
from mlcounts.exact import Disk, DiskSystem, EnsembleParams, log_mgf_exact, log_partition_exact

import oracles


# --- kernel functions ---------------------------------------------------------


def test_F_trivia():
    for t in (-3.0, 0.0, 1.7):
        assert F_func(t, 1.0) == 0.0
    assert F_func(0.0, 2.5) == pytest.approx(math.log(1.75), rel=1e-14)
    assert F_func(-9.0, 3.0) == pytest.approx(math.log(3.0), rel=1e-10)


def test_G_trivia():
    assert G_func(0.3, 1.0) == 0.0
    assert abs(G_func(7.0, 2.0)) < 1e-20
    assert abs(G_func(-7.0, 2.0)) < 1e-20


def test_F_G_domain():
    with pytest.raises(ValueError):
        F_func(0.0, 0.0)
    with pytest.raises(ValueError):
        G_func(0.0, -1.0)


def test_G_is_t_derivative_of_F():
    rng = random.Random(3)
    h = 1e-6
    for _ in range(100):
        t = rng.uniform(-4, 4)
        s = math.exp(rng.uniform(-1.5, 1.5))
        fd = (F_func(t + h, s) - F_func(t - h, s)) / (2 * h)
        assert fd == pytest.approx(G_func(t, s), abs=1e-9)


def test_u_parity_of_symmetrized_F():
    # odd u-derivatives of F(t,e^u) + F(t,e^-u) vanish identically
    from mlcounts.asymptotics import _UDerivatives

    rng = random.Random(4)
    for _ in range(50):
        d = _UDerivatives(rng.uniform(-4, 4))
        for j in (1, 3, 5):
            assert d.f_plus[j] + d.f_minus[j] == 0.0
        for j in (2, 4, 6):
            assert d.f_plus[j] - d.f_minus[j] == 0.0


def test_u_derivative_series_vs_complex_step():
    # order-1 derivative of F(t, e^u) via complex step
    from mlcounts.asymptotics import _UDerivatives

    h = 1e-20
    for t in (-2.0, 0.0, 0.8, 3.0):
        d = _UDerivatives(t)
        cs = complex(np.log(1 + (np.exp(1j * h) - 1) * math.erfc(t) / 2)).imag / h
        assert d.f_plus[1] == pytest.approx(cs, rel=1e-12, abs=1e-15)
        # and the G-series order 0 must equal G itself
        assert d.g[0] == pytest.approx(G_func(t, 1.0), abs=1e-15)


# --- theorem coefficients -----------------------------------------------------


def test_coeffs_zero_at_u_zero():
    params = EnsembleParams(b=1.0, alpha=0.0, n=100)
    disks = DiskSystem([Disk.fixed(0.4), Disk.edge(0.2), Disk.fixed(1.4)])
    C = theorem_coefficients(params, disks)
    assert (C.C1, C.C2, C.C3, C.C4) == (0.0, 0.0, 0.0, 0.0)


def test_c1_formula_and_linearity():
    params = EnsembleParams(b=1.0, alpha=0.0, n=10)
    C = theorem_coefficients(params, DiskSystem([Disk.fixed(0.6, 1.0)]))
    assert C.C1 == pytest.approx(0.36, rel=1e-14)
    C2x = theorem_coefficients(params, DiskSystem([Disk.fixed(0.6, 2.0)]))
    assert C2x.C1 == pytest.approx(0.72, rel=1e-14)
    # outside and edge disks contribute u itself
    Cmix = theorem_coefficients(
        params, DiskSystem([Disk.fixed(0.6, 0.5), Disk.edge(0.3, 0.25), Disk.fixed(1.5, -0.75)])
    )
    assert Cmix.C1 == pytest.approx(1.0 * 0.36 * 0.5 + 0.25 - 0.75, rel=1e-12)


def test_outside_only_prediction_is_un():
    params = EnsembleParams(b=1.0, alpha=0.0, n=500)
    disks = DiskSystem([Disk.fixed(1.5, 0.7)])
    C = theorem_coefficients(params, disks)
    assert (C.C2, C.C3, C.C4) == (0.0, 0.0, 0.0)
    assert predict_log_mgf(params, disks) == pytest.approx(0.7 * 500)
    assert log_mgf_exact(params, disks) == pytest.approx(0.7 * 500, abs=1e-6)


def test_per_disk_breakdown_sums_to_totals():
    params = EnsembleParams(b=2.0, alpha=0.5, n=100)
    disks = DiskSystem(
        [Disk.fixed(0.45, 0.3), Disk.fixed(0.55, -0.2), Disk.edge(0.3, 0.3), Disk.fixed(1.2, 0.3)]
    )
    C = theorem_coefficients(params, disks)
    assert len(C.per_disk) == 4
    for attr in ("C1", "C2", "C3", "C4"):
        assert getattr(C, attr) == pytest.approx(
            math.fsum(getattr(d, attr) for d in C.per_disk), abs=1e-14
        )
    kinds = [d.kind for d in C.per_disk]
    assert kinds == ["bulk", "bulk", "edge", "outside"]


def test_c2_second_derivative_is_bulk_variance_coeff():
    # d^2 C2/du^2 at u=0 equals b r^b / sqrt(pi)
    b, alpha, r = 1.0, 0.0, 0.6
    params = EnsembleParams(b=b, alpha=alpha, n=10)
    h = 1e-3

    def c2(u):
        return theorem_coefficients(params, DiskSystem([Disk.fixed(r, u)])).C2

    fd = (c2(h) - 2 * c2(0.0) + c2(-h)) / h**2
    assert fd == pytest.approx(b * r**b / math.sqrt(math.pi), abs=1e-7)


def test_theorem_prediction_vs_exact_bulk():
    params = EnsembleParams(b=1.0, alpha=0.0, n=4000)
    disks = DiskSystem([Disk.fixed(0.6, 1.0)])
    resid = log_mgf_exact(params, disks) - predict_log_mgf(params, disks)
    assert abs(resid) < 5e-6


def test_theorem_prediction_vs_exact_full_configuration():
    params = EnsembleParams(b=2.0, alpha=0.5, n=4000)
    disks = DiskSystem(
        [Disk.fixed(0.45, 0.3), Disk.fixed(0.55, 0.3), Disk.edge(0.3, 0.3), Disk.fixed(1.2, 0.3)]
    )
    resid = log_mgf_exact(params, disks) - predict_log_mgf(params, disks)
    assert abs(resid) < 5e-6


def test_quadrature_convergence(monkeypatch):
    params = EnsembleParams(b=1.3, alpha=0.2, n=10)
    disks = DiskSystem([Disk.fixed(0.5, 0.8), Disk.edge(-0.4, 0.6)])
    base = theorem_coefficients(params, disks)
    monkeypatch.setattr(asym, "TAIL_T", asym.TAIL_T * 2.0)
    monkeypatch.setattr(asym, "QUAD_EPSABS", asym.QUAD_EPSABS / 10.0)
    refined = theorem_coefficients(params, disks)
    for attr in ("C1", "C2", "C3", "C4"):
        assert abs(getattr(base, attr) - getattr(refined, attr)) <= max(
            base.quad_error, 1e-13
        )


def test_rejects_two_edge_like_disks():
    params = EnsembleParams(b=1.0, alpha=0.0, n=100)
    disks = DiskSystem([Disk.fixed(1.0, 0.1), Disk.edge(0.5, 0.1)])  # fixed r = rstar
    with pytest.raises(ValueError):
        theorem_coefficients(params, disks)


# --- cumulant coefficient series ----------------------------------------------


def test_bulk_mean_closed_form():
    # kappa_1 = b r^(2b) n + (b-1-2alpha)/2
    for b, alpha, r in ((1.0, 0.0, 0.6), (2.0, 0.5, 0.5), (0.5, -0.2, 0.9)):
        s1 = bulk_cumulant_coeffs(1, b, alpha, r)
        assert s1.leading == pytest.approx(b * r ** (2 * b), rel=1e-14)
        assert s1.c == pytest.approx(0.0, abs=1e-12)
        assert s1.d == pytest.approx((b - 1 - 2 * alpha) / 2.0, abs=1e-10)
        assert s1.e == pytest.approx(0.0, abs=1e-10)


def test_bulk_variance_closed_form():
    for b, alpha, r in ((1.0, 0.0, 0.6), (2.0, 0.5, 0.5)):
        s2 = bulk_cumulant_coeffs(2, b, alpha, r)
        assert s2.leading == 0.0
        assert s2.c == pytest.approx(b * r**b / math.sqrt(math.pi), rel=1e-11)
        assert s2.d == pytest.approx(0.0, abs=1e-12)
        assert s2.e == pytest.approx(-b / (16 * math.sqrt(math.pi) * r**b), rel=1e-9)


def test_bulk_parity_structure():
    s3 = bulk_cumulant_coeffs(3, 1.0, 0.0, 0.6)
    assert s3.c == 0.0 and abs(s3.e) <= 1e-12
    assert s3.d != 0.0
    s4 = bulk_cumulant_coeffs(4, 2.0, 0.5, 0.5)
    assert abs(s4.d) <= 1e-12
    assert s4.c != 0.0


def test_bulk_rejects_bad_inputs():
    with pytest.raises(ValueError):
        bulk_cumulant_coeffs(7, 1.0, 0.0, 0.5)
    with pytest.raises(ValueError):
        bulk_cumulant_coeffs(1, 1.0, 0.0, 1.2)  # outside the bulk


def test_expansion_derivatives_match_cumulant_series():
    # u-derivatives of C2(u), C3(u), C4(u) for one bulk disk reproduce
    # (c_j, d_j, e_j); derivatives taken by Cauchy-circle integration
    b, alpha, r = 1.4, 0.3, 0.55
    for j in (1, 2, 3, 4):
        want = bulk_cumulant_coeffs(j, b, alpha, r)
        dc2, dc3, dc4 = oracles.bulk_coeff_derivatives(b, alpha, r, j)
        assert dc2 == pytest.approx(want.c, abs=1e-8)
        assert dc3 == pytest.approx(want.d, abs=1e-8)
        assert dc4 == pytest.approx(want.e, abs=1e-8)


def test_edge_closed_forms_at_zero():
    # displayed mean/variance coefficients at s = 0
    b, alpha = 1.0, 0.0
    c1, d1, e1 = edge_mean_coeffs(b, alpha, 0.0)
    assert c1 == pytest.approx(-1.0 / math.sqrt(2 * math.pi), rel=1e-14)
    assert d1 == pytest.approx((b - 1 - 2 * alpha) / 4.0, abs=1e-15)
    assert e1 == pytest.approx(1.0 / (12 * math.sqrt(2 * math.pi)), rel=1e-14)
    c2, d2, e2 = edge_var_coeffs(b, alpha, 0.0)
    assert c2 == pytest.approx(1.0 / (2 * math.sqrt(math.pi)), rel=1e-14)
    assert d2 == pytest.approx((1 + 2 * alpha - b) / 8.0 - b / (12 * math.pi), rel=1e-14)
    assert e2 == pytest.approx(-1.0 / (32 * math.sqrt(math.pi)), rel=1e-14)


def test_edge_c1_negative_c2_positive():
    for s in (-2.0, -0.5, 0.0, 0.7, 2.5):
        c1, _, _ = edge_mean_coeffs(1.3, 0.1, s)
        c2, _, _ = edge_var_coeffs(1.3, 0.1, s)
        assert c1 < 0.0
        assert c2 > 0.0


def test_edge_quadrature_matches_closed_forms():
    for s in (-1.0, 0.0, 0.7):
        for b, alpha in ((1.0, 0.0), (2.0, 0.5)):
            got1 = edge_cumulant_coeffs(1, b, alpha, s)
            c1, d1, e1 = edge_mean_coeffs(b, alpha, s)
            assert got1.leading == 1.0
            assert got1.c == pytest.approx(c1, abs=1e-9)
            assert got1.d == pytest.approx(d1, abs=1e-9)
            assert got1.e == pytest.approx(e1, abs=1e-9)
            got2 = edge_cumulant_coeffs(2, b, alpha, s)
            c2, d2, e2 = edge_var_coeffs(b, alpha, s)
            assert got2.leading == 0.0
            assert got2.c == pytest.approx(c2, abs=1e-9)
            assert got2.d == pytest.approx(d2, abs=1e-9)
            assert got2.e == pytest.approx(e2, abs=1e-9)


def test_extreme_edge_parameter_is_flagged():
    import warnings

    with pytest.warns(RuntimeWarning) as record:
        series = edge_cumulant_coeffs(1, 1.0, 0.0, 7.5)
    assert any("edge parameter" in str(w.message) for w in record)
    assert math.isfinite(series.c)  # predictions still returned
    params = EnsembleParams(b=1.0, alpha=0.0, n=10000)
    with pytest.warns(RuntimeWarning), warnings.catch_warnings():
        warnings.simplefilter("always")
        theorem_coefficients(params, DiskSystem([Disk.edge(-6.5, 0.4)]))


def test_edge_series_evaluate():
    s1 = edge_cumulant_coeffs(1, 1.0, 0.0, 0.0)
    n = 10000
    want = n + s1.c * math.sqrt(n) + s1.d + s1.e / math.sqrt(n)
    assert s1.evaluate(n) == pytest.approx(want, rel=1e-15)


def test_outside_series():
    assert outside_cumulant_coeffs(1).leading == 1.0
    s = outside_cumulant_coeffs(3)
    assert (s.leading, s.c, s.d, s.e) == (0.0, 0.0, 0.0, 0.0)


# --- partition expansion --------------------------------------------------------


def test_zn_constant_ginibre_is_zeta_prime():
    from mlcounts.specfun import ZETA_PRIME_MINUS_ONE

    z = zn_expansion(EnsembleParams(b=1.0, alpha=0.0, n=100))
    assert z.includes_constant
    assert (z.n1, z.n2) == (1, 1)
    assert z.constant == pytest.approx(ZETA_PRIME_MINUS_ONE, rel=1e-12)


def test_zn_residual_small_for_b1():
    for n in (250, 1000):
        params = EnsembleParams(b=1.0, alpha=0.0, n=n)
        resid = log_partition_exact(params) - zn_expansion(params).value
        assert abs(resid) <= 5.0 / n**2


def test_zn_expansion_matches_mp_oracle():
    for b, alpha, n1, n2 in ((1.0, 0.0, 1, 1), (0.5, 0.0, 1, 2), (1.5, 0.25, 3, 2)):
        params = EnsembleParams(b=b, alpha=alpha, n=500)
        z = zn_expansion(params)
        assert z.includes_constant and (z.n1, z.n2) == (n1, n2)
        truth = float(oracles.mp_zn_expansion(b, alpha, 500, n1, n2))
        # absolute tolerance scaled to the value's own float noise floor
        assert z.value == pytest.approx(truth, abs=1e-15 * abs(truth) + 1e-10)


def test_zn_irrational_b_flag():
    z = zn_expansion(EnsembleParams(b=math.pi / 3.0, alpha=0.0, n=100))
    assert not z.includes_constant
    assert z.constant is None


def test_zn_constant_fit_from_exact():
    # fit the constant from exact log Z_n at large n; must match the formula
    b, alpha = 1.0, 0.0
    fits = []
    for n in (500, 1000, 2000):
        params = EnsembleParams(b=b, alpha=alpha, n=n)
        z = zn_expansion(params)
        fits.append(z.constant + log_partition_exact(params) - z.value)
    for f in fits:
        assert f == pytest.approx(zn_expansion(EnsembleParams(b=b, alpha=alpha, n=500)).constant, abs=1e-6)
