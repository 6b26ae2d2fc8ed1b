import math
import warnings

import numpy as np
import pytest

from landaukit import (
    ComplexField,
    DiscreteOperator,
    GaugeChoice,
    NonFreeCoefficients,
    OperatorKind,
    PhysicalParams,
    QuantumNumbers,
    apply,
    assemble_hamiltonian,
    commutator_apply,
    conserved_operator_check,
    eigen_residual,
    eval_landau,
    eval_nonfree,
    hamiltonian_via_canonical,
    interior_norm,
    make_grid,
    sample_field,
    spectrum,
)
from landaukit.errors import ContaminationError, DomainError, SolverError

P = PhysicalParams()
GX = GaugeChoice.LANDAU_X
GY = GaugeChoice.LANDAU_Y


def gaussian_field(grid, sigma=1.3, poly=None):
    X, Y = grid.meshgrid()
    g = np.exp(-(X**2 + Y**2) / (2 * sigma**2))
    if poly is not None:
        g = poly(X, Y) * g
    return ComplexField(grid, g.astype(complex))


def landau_field(n, k, h, half=10.0, kprime=None):
    npts = int(round(2 * half / h)) + 1
    grid = make_grid((-half, half, -half, half), npts, npts)
    if kprime is None:
        return sample_field(lambda X, Y: eval_landau(P, GX, n, k, X, Y), grid)
    qn = QuantumNumbers(n, k, kprime)
    return sample_field(
        lambda X, Y: eval_nonfree(P, GX, qn, NonFreeCoefficients(), X, Y), grid)


def test_px_of_constant_vanishes_in_interior():
    grid = make_grid((-2, 2, -2, 2), 41, 41)
    f = ComplexField(grid, np.ones((41, 41), dtype=complex))
    out = apply(DiscreteOperator(OperatorKind.PX, P), f)
    assert interior_norm(out, 2) < 1e-13


def test_px_plane_wave_eigenvalue():
    grid = make_grid((-4, 4, -4, 4), 401, 401)  # h = 0.02
    X, _ = grid.meshgrid()
    f = ComplexField(grid, np.exp(1j * X))
    out = apply(DiscreteOperator(OperatorKind.PX, P), f)
    dev = ComplexField(grid, out.values - 1.0 * f.values)
    assert interior_norm(dev, 2) / interior_norm(f, 2) < 1e-9  # O(h^4)


def test_hamiltonian_on_ground_state():
    f = landau_field(0, 0.0, 0.05, half=8.0)
    out = apply(DiscreteOperator(OperatorKind.HAMILTONIAN, P), f)
    dev = ComplexField(f.grid, out.values - 0.5 * f.values)
    assert interior_norm(dev, 2) / interior_norm(f, 2) < 1e-6


def test_operator_linearity():
    grid = make_grid((-3, 3, -3, 3), 61, 61)
    rng = np.random.default_rng(1)
    f = ComplexField(grid, rng.standard_normal((61, 61)) + 1j * rng.standard_normal((61, 61)))
    g = ComplexField(grid, rng.standard_normal((61, 61)) + 1j * rng.standard_normal((61, 61)))
    alpha = 1.7 - 0.4j
    for kind in OperatorKind:
        op = DiscreteOperator(kind, P)
        lhs = apply(op, ComplexField(grid, alpha * f.values + g.values)).values
        rhs = alpha * apply(op, f).values + apply(op, g).values
        np.testing.assert_allclose(lhs, rhs, atol=1e-11)


def test_self_commutator_exactly_zero():
    grid = make_grid((-3, 3, -3, 3), 81, 81)
    f = gaussian_field(grid)
    out = commutator_apply(DiscreteOperator(OperatorKind.PX, P),
                           DiscreteOperator(OperatorKind.PX, P), f)
    assert np.max(np.abs(out.values)) == 0.0


def test_canonical_commutator_qp():
    grid = make_grid((-8, 8, -8, 8), 801, 801)  # h = 0.02
    f = gaussian_field(grid, sigma=1.3)
    c = commutator_apply(DiscreteOperator(OperatorKind.Q, P),
                         DiscreteOperator(OperatorKind.P, P), f)
    dev = ComplexField(grid, c.values - 1j * f.values)
    assert interior_norm(dev, 4) / interior_norm(f, 4) < 1e-8


def test_vanishing_commutator_q_qbar():
    grid = make_grid((-8, 8, -8, 8), 801, 801)
    f = gaussian_field(grid, sigma=1.3, poly=lambda X, Y: X * Y)
    c = commutator_apply(DiscreteOperator(OperatorKind.Q, P),
                         DiscreteOperator(OperatorKind.QBAR, P), f)
    assert interior_norm(c, 4) / interior_norm(f, 4) < 1e-7


def test_conserved_operators_and_control():
    grid = make_grid((-8, 8, -8, 8), 801, 801)
    f = gaussian_field(grid, sigma=1.3)
    assert conserved_operator_check(P, GX, OperatorKind.PBAR, f) < 1e-7
    assert conserved_operator_check(P, GX, OperatorKind.QBAR, f) < 1e-7
    # control: x is not conserved
    h_op = DiscreteOperator(OperatorKind.HAMILTONIAN, P)
    x_op = DiscreteOperator(OperatorKind.MULT_X, P)
    c = commutator_apply(h_op, x_op, f)
    assert interior_norm(c, 2) / interior_norm(f, 2) > 1e-2
    with pytest.raises(DomainError):
        conserved_operator_check(P, GX, OperatorKind.MULT_X, f)


def test_hermiticity_inner_product():
    from landaukit import field_norm, overlap

    grid = make_grid((-8, 8, -8, 8), 401, 401)
    f = gaussian_field(grid, sigma=1.2, poly=lambda X, Y: 1 + 0.3 * X)
    g = gaussian_field(grid, sigma=1.1, poly=lambda X, Y: 1 - 0.2j * Y)
    h_op = DiscreteOperator(OperatorKind.HAMILTONIAN, P)
    lhs = overlap(f, apply(h_op, g))
    rhs = np.conj(overlap(g, apply(h_op, f)))
    assert abs(lhs - rhs) < 1e-9 * field_norm(f) * field_norm(g)


def test_eigen_residual_free_family():
    f = landau_field(2, 0.5, 0.02)
    assert eigen_residual(P, GX, f, 2.5) < 1e-6


def test_eigen_residual_detects_wrong_energy():
    f = landau_field(2, 0.5, 0.05)
    r = eigen_residual(P, GX, f, 2.6)
    assert 0.05 < r < 0.2  # dominated by the 0.1 energy offset


def test_eigen_residual_fourth_order_free():
    r_coarse = eigen_residual(P, GX, landau_field(2, 0.5, 0.04), 2.5)
    r_fine = eigen_residual(P, GX, landau_field(2, 0.5, 0.02), 2.5)
    assert 12.0 < r_coarse / r_fine < 20.0


def test_eigen_residual_nonfree_family():
    # both summands are exact eigenfunctions (see the symbolic oracle in
    # test_wavefunctions); the discrete residual is limited by the strip
    # term's phase frequency beta*x*y/hbar, which grows linearly in |y|,
    # so at h = 0.02 on [-10, 10]^2 the truncation floor sits near 1e-3
    f = landau_field(1, 0.0, 0.02, kprime=0.0)
    assert eigen_residual(P, GX, f, 1.5) < 2e-3
    r_coarse = eigen_residual(P, GX, landau_field(1, 0.0, 0.04, kprime=0.0), 1.5)
    r_fine = eigen_residual(P, GX, landau_field(1, 0.0, 0.02, kprime=0.0), 1.5)
    assert 12.0 < r_coarse / r_fine < 20.0


def test_eigen_residual_rejects_zero_field():
    grid = make_grid((-2, 2, -2, 2), 21, 21)
    with pytest.raises(DomainError):
        eigen_residual(P, GX, ComplexField(grid, np.zeros((21, 21))), 0.5)


def test_mirrored_gauge_residual():
    grid = make_grid((-8, 8, -8, 8), 321, 321)
    f = sample_field(lambda X, Y: eval_landau(P, GY, 1, 0.5, X, Y), grid)
    assert eigen_residual(P, GY, f, 1.5) < 1e-4


def test_hamiltonian_form_equivalence():
    grid = make_grid((-10, 10, -10, 10), 1001, 1001)
    X, Y = grid.meshgrid()
    f = ComplexField(grid, (np.exp(-(X**2 + Y**2) / (2 * 1.6**2)) * (1 + 0.3 * X)).astype(complex))
    for gauge in (GX, GY):
        expanded = apply(DiscreteOperator(OperatorKind.HAMILTONIAN, P, gauge), f)
        composed = hamiltonian_via_canonical(P, gauge, f)
        dev = ComplexField(grid, expanded.values - composed.values)
        assert interior_norm(dev, 4) / interior_norm(expanded, 4) < 1e-8


def test_boundary_check_raises_on_plane_wave():
    grid = make_grid((-4, 4, -4, 4), 41, 41)
    X, _ = grid.meshgrid()
    f = ComplexField(grid, np.exp(1j * X))
    with pytest.raises(ContaminationError, match="grid index"):
        apply(DiscreteOperator(OperatorKind.PX, P), f, check_boundary=True)
    # decaying fields pass the strict check
    apply(DiscreteOperator(OperatorKind.PX, P), gaussian_field(grid, sigma=0.5),
          check_boundary=True)


def test_order_two_stencils():
    grid = make_grid((-6, 6, -6, 6), 241, 241)
    f = sample_field(lambda X, Y: eval_landau(P, GX, 0, 0.0, X, Y), grid)
    r4 = eigen_residual(P, GX, f, 0.5, order=4)
    r2 = eigen_residual(P, GX, f, 0.5, order=2)
    assert r2 > 10.0 * r4  # second order is much less accurate at this h
    with pytest.raises(DomainError):
        DiscreteOperator(OperatorKind.PX, P, order=3)


def test_assembled_matrix_matches_matrix_free_apply():
    grid = make_grid((-6, 6, -6, 6), 61, 61)
    X, Y = grid.meshgrid()
    v = np.exp(-(X**2 + Y**2) / 0.8) * (1 + 0.5j * X)
    pad = 8
    v[:pad, :] = v[-pad:, :] = v[:, :pad] = v[:, -pad:] = 0.0
    f = ComplexField(grid, v)
    for gauge in (GX, GY):
        H = assemble_hamiltonian(P, gauge, grid)
        lhs = (H @ v[1:-1, 1:-1].ravel()).reshape(59, 59)
        rhs = apply(DiscreteOperator(OperatorKind.HAMILTONIAN, P, gauge), f).values[1:-1, 1:-1]
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_assembled_matrix_is_hermitian():
    grid = make_grid((-6, 6, -6, 6), 33, 33)
    for gauge in (GX, GY):
        H = assemble_hamiltonian(P, gauge, grid)
        assert abs(H - H.getH()).max() == 0.0


def test_spectrum_small_grid_ground_cluster():
    grid = make_grid((-8, 8, -8, 8), 97, 97)
    res = spectrum(P, GX, grid, n_eigs=8, seed=0)
    assert np.all(np.abs(res.eigenvalues - 0.5) < 1e-2)
    assert np.all(res.residual_norms < 1e-8)
    assert np.all(np.diff(res.eigenvalues) >= 0)
    means = [m for m, _ in res.clusters()]
    assert any(abs(m - 0.5) < 1e-2 for m in means)


def test_spectrum_scales_with_field():
    grid = make_grid((-8, 8, -8, 8), 97, 97)
    res = spectrum(PhysicalParams(field=2.0), GX, grid, n_eigs=4, seed=0)
    assert np.all(np.abs(res.eigenvalues - 1.0) < 1e-2)


def test_spectrum_deterministic_given_seed():
    grid = make_grid((-8, 8, -8, 8), 65, 65)
    a = spectrum(P, GX, grid, n_eigs=6, seed=42)
    b = spectrum(P, GX, grid, n_eigs=6, seed=42)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)


def test_spectrum_gauge_independent():
    grid = make_grid((-8, 8, -8, 8), 65, 65)
    a = spectrum(P, GX, grid, n_eigs=6, seed=0)
    b = spectrum(P, GY, grid, n_eigs=6, seed=0)
    tol = 2.0 * max(a.tol, float(np.max(a.residual_norms)), float(np.max(b.residual_norms)))
    assert np.max(np.abs(a.eigenvalues - b.eigenvalues)) < tol


def test_spectrum_warns_on_small_domain():
    grid = make_grid((-3, 3, -3, 3), 33, 33)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = spectrum(P, GX, grid, n_eigs=2, seed=0)
    assert res.warnings and "magnetic length" in res.warnings[0]
    assert any("magnetic length" in str(w.message) for w in caught)


def test_spectrum_nonconvergence_raises_solver_error():
    grid = make_grid((-8, 8, -8, 8), 65, 65)
    with pytest.raises(SolverError):
        spectrum(P, GX, grid, n_eigs=30, seed=0, maxiter=1)


def test_spectrum_rejects_bad_neigs():
    grid = make_grid((-4, 4, -4, 4), 12, 12)
    with pytest.raises(DomainError):
        spectrum(P, GX, grid, n_eigs=0)
