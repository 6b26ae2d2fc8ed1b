import math

import numpy as np
import pytest

from landaukit import (
    GaugeChoice,
    NonFreeCoefficients,
    PhysicalParams,
    QuantumNumbers,
    eval_landau,
    eval_nonfree,
    eval_nonfree_term,
    field_norm,
    make_grid,
    overlap,
    psi_n,
    sample_field,
)
from landaukit.errors import DomainError, EvaluationError, GridMismatchError

P = PhysicalParams()
GX = GaugeChoice.LANDAU_X
GY = GaugeChoice.LANDAU_Y


def test_free_ground_state_at_origin():
    assert eval_landau(P, GX, 0, 0.0, 0.0, 0.0) == pytest.approx(math.pi**-0.25, rel=1e-15)


def test_free_gaussian_centered_at_k_over_beta():
    # |psi| peaks on the line y = k/beta with the ground-state peak value
    xs = np.linspace(-3, 3, 13)
    vals = np.abs(eval_landau(P, GX, 0, 1.0, xs, 1.0))
    np.testing.assert_allclose(vals, math.pi**-0.25, rtol=1e-14)
    off_line = np.abs(eval_landau(P, GX, 0, 1.0, 0.0, np.array([0.0, 2.0, 3.0])))
    assert np.all(off_line < math.pi**-0.25)


def test_free_modulus_independent_of_x():
    for x in (0.0, 3.0, -7.5):
        v = eval_landau(P, GX, 0, 0.0, x, 0.0)
        assert abs(v) == pytest.approx(math.pi**-0.25, rel=1e-15)


def test_strip_term_trivials():
    assert eval_nonfree_term(P, GX, 0, 0.0, 0.0, 0.0) == pytest.approx(math.pi**-0.25)
    ys = np.linspace(-4, 4, 9)
    assert np.max(np.abs(eval_nonfree_term(P, GX, 1, 0.0, 0.0, ys))) == 0.0


def test_strip_term_centered_at_kprime_over_beta():
    ys = np.linspace(-3, 3, 13)
    on_line = np.abs(eval_nonfree_term(P, GX, 0, 2.0, 2.0, ys))
    np.testing.assert_allclose(on_line, math.pi**-0.25, rtol=1e-14)
    off = abs(eval_nonfree_term(P, GX, 0, 2.0, 0.5, 0.0))
    assert off < math.pi**-0.25


def test_nonfree_coefficient_projections():
    qn = QuantumNumbers(1, 0.7, -0.3)
    x, y = 0.4, -1.1
    only_plane = eval_nonfree(P, GX, qn, NonFreeCoefficients(1, 0), x, y)
    assert only_plane == eval_landau(P, GX, 1, 0.7, x, y)
    only_strip = eval_nonfree(P, GX, qn, NonFreeCoefficients(0, 1), x, y)
    assert only_strip == eval_nonfree_term(P, GX, 1, -0.3, x, y)


def test_nonfree_doubles_at_origin():
    qn = QuantumNumbers(0, 0.0, 0.0)
    v = eval_nonfree(P, GX, qn, NonFreeCoefficients(1, 1), 0.0, 0.0)
    assert v == pytest.approx(2.0 * math.pi**-0.25, rel=1e-15)


def test_coefficients_not_both_zero():
    with pytest.raises(DomainError):
        NonFreeCoefficients(0, 0)


def test_gauge_mirror_pointwise():
    grid = make_grid((-4, 4, -4, 4), 33, 33)
    X, Y = grid.meshgrid()
    for n, k in ((0, 0.0), (2, 0.7)):
        a = eval_landau(P, GY, n, k, X, Y)
        b = eval_landau(P, GX, n, k, Y, X)
        np.testing.assert_array_equal(a, b)
        a = eval_nonfree_term(P, GY, n, k, X, Y)
        b = eval_nonfree_term(P, GX, n, k, Y, X)
        np.testing.assert_array_equal(a, b)


def test_strip_vs_free_transpose_moduli():
    # the strip term sampled then transposed has the same modulus pattern as
    # the free solution (phases differ by the xy winding)
    grid = make_grid((-5, 5, -5, 5), 41, 41)
    free = sample_field(lambda X, Y: eval_landau(P, GX, 1, 0.0, X, Y), grid)
    strip = sample_field(lambda X, Y: eval_nonfree_term(P, GX, 1, 0.0, X, Y), grid)
    np.testing.assert_allclose(np.abs(strip.values.T), np.abs(free.values), atol=1e-14)


def test_sympy_eigenfunction_oracle():
    # symbolic check that both families solve H psi = E_n psi exactly:
    # H = ((-i d/dx - y)^2 + (-i d/dy)^2) / 2 in natural units
    import sympy as sp

    x, y = sp.symbols("x y", real=True)
    k, kp = sp.Rational(1, 2), sp.Rational(-1, 3)
    for n in (0, 1, 2):
        herm = sp.hermite(n, y - k)
        free = sp.exp(sp.I * k * x) * herm * sp.exp(-((y - k) ** 2) / 2)
        herm2 = sp.hermite(n, x - kp)
        strip = sp.exp(sp.I * (x - kp) * y) * herm2 * sp.exp(-((x - kp) ** 2) / 2)
        for psi in (free, strip, free + strip):
            px = -sp.I * sp.diff(psi, x)
            hpsi = (
                (-sp.I * sp.diff(px - y * psi, x) - y * (px - y * psi))
                - sp.diff(psi, y, 2)
            ) / 2
            resid = sp.simplify(hpsi - (n + sp.Rational(1, 2)) * psi)
            assert resid == 0


def test_sample_field_zero_and_broadcast():
    grid = make_grid((-1, 1, -1, 1), 9, 9)
    f = sample_field(lambda X, Y: 0.0, grid)
    assert np.all(f.values == 0)


def test_sample_field_reports_bad_point():
    grid = make_grid((-1, 1, -1, 1), 9, 9)

    def bad(X, Y):
        v = np.ones_like(X, dtype=complex)
        v[2, 3] = np.inf
        return v

    with pytest.raises(EvaluationError, match=r"\(2, 3\)"):
        sample_field(bad, grid)


def test_overlap_of_field_with_itself_is_norm_squared():
    grid = make_grid((-6, 6, -6, 6), 101, 101)
    f = sample_field(lambda X, Y: eval_landau(P, GX, 1, 0.0, X, Y), grid)
    assert overlap(f, f).real == pytest.approx(field_norm(f) ** 2, rel=1e-12)
    assert abs(overlap(f, f).imag) < 1e-15 * field_norm(f) ** 2


def test_overlap_grid_mismatch():
    f = sample_field(lambda X, Y: 0 * X + 1.0, make_grid((-1, 1, -1, 1), 9, 9))
    g = sample_field(lambda X, Y: 0 * X + 1.0, make_grid((-1, 1, -1, 1), 11, 11))
    with pytest.raises(GridMismatchError):
        overlap(f, g)


def test_orthogonality_between_levels():
    # oracle: 1-D oscillator orthogonality; the shared plane-wave factor
    # cancels so the 2-D overlap reduces to the 1-D integral times the box
    grid = make_grid((-10, 10, -10, 10), 257, 257)
    k = 2.0 * math.pi * 3.0 / 20.0  # same k in both states
    f0 = sample_field(lambda X, Y: eval_landau(P, GX, 0, k, X, Y), grid)
    f1 = sample_field(lambda X, Y: eval_landau(P, GX, 1, k, X, Y), grid)
    norm = field_norm(f0) * field_norm(f1)
    assert abs(overlap(f0, f1)) / norm < 1e-8


def test_orthogonality_between_box_momenta():
    # oracle: plane waves with k quantized as 2 pi j / L are exactly
    # orthogonal over the box; the oscillator factors share n = 0
    grid = make_grid((-10, 10, -10, 10), 257, 257)
    k2 = 2.0 * math.pi * 4.0 / 20.0
    f0 = sample_field(lambda X, Y: eval_landau(P, GX, 0, 0.0, X, Y), grid)
    f4 = sample_field(lambda X, Y: eval_landau(P, GX, 0, k2, X, Y), grid)
    norm = field_norm(f0) * field_norm(f4)
    assert abs(overlap(f0, f4)) / norm < 1e-8


def test_column_norms_match_one_dimensional_norm():
    # each constant-x column of the free ground state carries the 1-D
    # oscillator norm (= 1), scaled only by the plane-wave modulus
    from landaukit.wavefunctions import column_norms

    grid = make_grid((-10, 10, -10, 10), 257, 257)
    f = sample_field(lambda X, Y: eval_landau(P, GX, 0, 0.0, X, Y), grid)
    np.testing.assert_allclose(column_norms(f), 1.0, atol=1e-8)
