"""Closed-form eigenfunctions of the magnetic Hamiltonian, and field helpers.

Two families share the energy E_n = hbar * omega_c * (n + 1/2).  In the
default gauge (LANDAU_X), with s = sqrt(beta/hbar):

* free:      exp(i k x / hbar) * psi_n(s * (y - k/beta))
  -- a plane wave along x times an oscillator strip centered at y = k/beta;
* non-free term: exp(i (beta/hbar) (x - k'/beta) y) * psi_n(s * (x - k'/beta))
  -- an oscillator strip centered at x = k'/beta whose phase winds in y.

The non-free wavefunction is the coefficient-weighted sum of the two (both
coefficients default to 1).  Under LANDAU_Y every formula has x and y
swapped.  Plane-wave factors are kept unnormalized (delta-normalized in k);
overlap tests quantize k as 2 pi hbar j / L on a box of side L.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EvaluationError, GridMismatchError
from .hermite import psi_n
from .physcore import ComplexField, GaugeChoice, Grid2D, PhysicalParams, QuantumNumbers

__all__ = [
    "NonFreeCoefficients",
    "eval_landau",
    "eval_nonfree_term",
    "eval_nonfree",
    "sample_field",
    "overlap",
]


@dataclass(frozen=True)
class NonFreeCoefficients:
    """Weights of the plane-wave and oscillator-strip terms of the sum."""

    c_plane: complex = 1.0 + 0.0j
    c_delta: complex = 1.0 + 0.0j

    def __post_init__(self):
        if self.c_plane == 0 and self.c_delta == 0:
            raise DomainError("coefficients must not both be zero")


def _oriented(gauge: GaugeChoice, x, y):
    """Coordinates in the gauge's natural order: (plane-wave axis, oscillator axis)."""
    if gauge is GaugeChoice.LANDAU_X:
        return x, y
    return y, x


def eval_landau(params: PhysicalParams, gauge: GaugeChoice, n: int, k: float, x, y):
    """Free solution: plane wave along one axis, oscillator along the other."""
    if n < 0:
        raise DomainError(f"level must be >= 0, got {n}")
    u, v = _oriented(gauge, np.asarray(x), np.asarray(y))
    s = np.sqrt(params.beta / params.hbar)
    return np.exp(1j * k * u / params.hbar) * psi_n(n, s * (v - k / params.beta))


def eval_nonfree_term(params: PhysicalParams, gauge: GaugeChoice, n: int, kprime: float, x, y):
    """Oscillator-strip term: the strip runs along the plane-wave axis of the gauge."""
    if n < 0:
        raise DomainError(f"level must be >= 0, got {n}")
    u, v = _oriented(gauge, np.asarray(x), np.asarray(y))
    s = np.sqrt(params.beta / params.hbar)
    shifted = u - kprime / params.beta
    return np.exp(1j * (params.beta / params.hbar) * shifted * v) * psi_n(n, s * shifted)


def eval_nonfree(
    params: PhysicalParams,
    gauge: GaugeChoice,
    qn: QuantumNumbers,
    coeffs: NonFreeCoefficients = NonFreeCoefficients(),
    x=0.0,
    y=0.0,
):
    """Coefficient-weighted sum of the free solution and the strip term, same n."""
    total = 0.0
    if coeffs.c_plane != 0:
        total = coeffs.c_plane * eval_landau(params, gauge, qn.n, qn.k, x, y)
    if coeffs.c_delta != 0:
        total = total + coeffs.c_delta * eval_nonfree_term(params, gauge, qn.n, qn.kprime, x, y)
    return total


def sample_field(evaluator, grid: Grid2D) -> ComplexField:
    """Pointwise samples of evaluator(X, Y) on the grid.

    Raises EvaluationError naming the first offending grid index if any
    sample is non-finite.
    """
    X, Y = grid.meshgrid()
    values = np.asarray(evaluator(X, Y), dtype=np.complex128)
    if values.shape != X.shape:
        values = np.broadcast_to(values, X.shape).copy()
    bad = ~(np.isfinite(values.real) & np.isfinite(values.imag))
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise EvaluationError(
            f"non-finite sample at grid index ({i}, {j}), "
            f"(x, y) = ({grid.xs()[i]:g}, {grid.ys()[j]:g})"
        )
    return ComplexField(grid, values)


def overlap(f: ComplexField, g: ComplexField) -> complex:
    """Trapezoid approximation of the inner product integral conj(f) * g."""
    if f.grid != g.grid:
        raise GridMismatchError("overlap requires identical grids")
    gr = f.grid
    s = np.sum(gr.trapezoid_weights() * np.conj(f.values) * g.values)
    return complex(s * gr.hx * gr.hy)


def oscillator_center_in_grid(params: PhysicalParams, gauge: GaugeChoice, qn: QuantumNumbers,
                              grid: Grid2D, which: str) -> bool:
    """Whether the oscillator-strip center of the given term lies inside the grid.

    `which` is "plane" (center k/beta on the oscillator axis) or "delta"
    (center k'/beta on the plane-wave axis).  Centers outside the grid do
    not stop any evaluation, but residual checks on such fields measure a
    boundary-dominated tail and callers should surface a warning.
    """
    if which == "plane":
        center = qn.k / params.beta
        lo, hi = (grid.y_min, grid.y_max) if gauge is GaugeChoice.LANDAU_X else (grid.x_min, grid.x_max)
    elif which == "delta":
        center = qn.kprime / params.beta
        lo, hi = (grid.x_min, grid.x_max) if gauge is GaugeChoice.LANDAU_X else (grid.y_min, grid.y_max)
    else:
        raise DomainError(f"which must be 'plane' or 'delta', got {which!r}")
    return lo <= center <= hi


def column_norms(field: ComplexField) -> np.ndarray:
    """1-D trapezoid norm of each constant-x column, for strip-structure checks."""
    g = field.grid
    wy = np.ones(g.ny)
    wy[0] = wy[-1] = 0.5
    return np.sqrt(np.sum(wy * np.abs(field.values) ** 2, axis=1) * g.hy)
