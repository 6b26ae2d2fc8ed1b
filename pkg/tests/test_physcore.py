import math

import numpy as np
import pytest

from landaukit import ComplexField, derive_params, field_norm, make_grid, psi_n
from landaukit.errors import DomainError
from landaukit.physcore import QuantumNumbers


def test_derive_params_natural_units():
    p = derive_params(1, 1, 1, 1, 1)
    assert p.omega_c == 1.0
    assert p.beta == 1.0
    assert p.mag_length == 1.0


def test_derive_params_strong_field():
    p = derive_params(1, 1, 1, 1, 4)
    assert p.omega_c == 4.0
    assert p.beta == 4.0
    assert p.mag_length == 0.5


def test_derive_params_heavy_mass():
    p = derive_params(1, 2, 1, 1, 1)
    assert p.omega_c == 0.5
    assert p.beta == 1.0
    assert p.mag_length == 1.0


@pytest.mark.parametrize("bad", [
    dict(hbar=0.0), dict(mass=-1.0), dict(field=0.0), dict(light_speed=-2.0),
])
def test_derive_params_rejects_nonpositive(bad):
    with pytest.raises(DomainError):
        derive_params(**bad)


def test_scale_covariance_in_b():
    base = derive_params(field=1.0)
    doubled = derive_params(field=2.0)
    assert doubled.omega_c == 2.0 * base.omega_c
    assert doubled.beta == 2.0 * base.beta
    assert doubled.mag_length == pytest.approx(base.mag_length / math.sqrt(2.0), rel=1e-15)


def test_level_energy():
    p = derive_params()
    assert p.level_energy(0) == 0.5
    assert p.level_energy(3) == 3.5
    with pytest.raises(DomainError):
        p.level_energy(-1)


def test_make_grid_spacings():
    g = make_grid((-1, 1, -1, 1), 9, 9)
    assert g.hx == 0.25 and g.hy == 0.25
    g = make_grid((0, 1, 0, 2), 11, 21)
    assert g.hx == pytest.approx(0.1) and g.hy == pytest.approx(0.1)
    g = make_grid((-8, 8, -8, 8), 8, 8)
    assert g.hx == 16.0 / 7.0


def test_make_grid_rejects_degenerate():
    with pytest.raises(DomainError):
        make_grid((1, 1, -1, 1), 9, 9)
    with pytest.raises(DomainError):
        make_grid((-1, 1, -1, 1), 7, 9)


def test_grid_coordinates_linear_and_endpoints_exact():
    g = make_grid((-10, 10, -10, 10), 257, 257)
    xs = g.xs()
    assert xs[0] == -10.0 and xs[-1] == 10.0
    assert np.array_equal(xs, -10.0 + np.arange(257) * g.hx)


def test_quantum_numbers_validation():
    QuantumNumbers(0, 0.0, 0.0)
    with pytest.raises(DomainError):
        QuantumNumbers(-1)
    with pytest.raises(DomainError):
        QuantumNumbers(0, math.nan)


def test_field_norm_zero_and_constant():
    g = make_grid((0, 1, 0, 1), 21, 21)
    zero = ComplexField(g, np.zeros((21, 21)))
    assert field_norm(zero) == 0.0
    # trapezoid is exact for constants on the unit square
    one = ComplexField(g, np.ones((21, 21)))
    assert field_norm(one) == pytest.approx(1.0, abs=1e-15)


def test_field_norm_gaussian_product():
    # oracle: the ground-state pair is exactly unit-normalized on the plane,
    # and its tail beyond |10| is far below the tolerance
    g = make_grid((-10, 10, -10, 10), 257, 257)
    X, Y = g.meshgrid()
    f = ComplexField(g, (psi_n(0, X) * psi_n(0, Y)).astype(complex))
    assert abs(field_norm(f) - 1.0) < 1e-8


def test_field_norm_absolutely_homogeneous():
    g = make_grid((-3, 3, -3, 3), 33, 33)
    rng = np.random.default_rng(0)
    v = rng.standard_normal((33, 33)) + 1j * rng.standard_normal((33, 33))
    f = ComplexField(g, v)
    alpha = -2.5 + 1.25j
    assert field_norm(ComplexField(g, alpha * v)) == pytest.approx(
        abs(alpha) * field_norm(f), rel=1e-15)


def test_field_validation():
    g = make_grid((-1, 1, -1, 1), 9, 9)
    with pytest.raises(DomainError):
        ComplexField(g, np.zeros((8, 9)))
    bad = np.zeros((9, 9), dtype=complex)
    bad[3, 4] = np.nan
    with pytest.raises(DomainError):
        ComplexField(g, bad)


def test_field_values_read_only():
    g = make_grid((-1, 1, -1, 1), 9, 9)
    f = ComplexField(g, np.zeros((9, 9)))
    with pytest.raises(ValueError):
        f.values[0, 0] = 1.0
