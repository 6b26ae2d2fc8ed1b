"""Physical parameters, gauges, grids, and complex fields shared by all modules.

Conventions fixed here and relied on everywhere else:

* natural units by default (hbar = m = e = c = B = 1, so omega_c = beta = 1
  and the magnetic length is 1); every constant stays configurable,
* field values are stored as an (nx, ny) complex array with the y index
  varying fastest (C order), entry [i, j] sampling (x_i, y_j),
* L2 norms and overlaps use trapezoid weights on the rectangular grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
import math

import numpy as np

from .errors import DomainError

__all__ = [
    "PhysicalParams",
    "GaugeChoice",
    "QuantumNumbers",
    "Grid2D",
    "ComplexField",
    "derive_params",
    "make_grid",
    "field_norm",
]


class GaugeChoice(Enum):
    """Orientation of the linear vector potential.

    LANDAU_X is the default: A = (-B y, 0, 0).  LANDAU_Y is the x <-> y
    mirrored problem, the configuration reached from the alternative
    potential A = (0, B x, 0) by reversing the field direction; it swaps
    the plane-wave and oscillator axes of every closed form while leaving
    the spectrum untouched.
    """

    LANDAU_X = "landau-x"
    LANDAU_Y = "landau-y"


@dataclass(frozen=True)
class PhysicalParams:
    """Dimensional constants of the problem plus the derived scales."""

    hbar: float = 1.0
    mass: float = 1.0
    charge: float = 1.0
    light_speed: float = 1.0
    field: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "mass", "charge", "light_speed", "field"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be a positive finite number, got {v!r}")

    @property
    def omega_c(self) -> float:
        """Cyclotron frequency e B / (m c)."""
        return self.charge * self.field / (self.mass * self.light_speed)

    @property
    def beta(self) -> float:
        """Momentum-per-length scale m * omega_c."""
        return self.mass * self.omega_c

    @property
    def mag_length(self) -> float:
        """Magnetic length sqrt(hbar / beta), the width of the localized states."""
        return math.sqrt(self.hbar / self.beta)

    def level_energy(self, n: int) -> float:
        """Energy of the n-th equally spaced level, hbar * omega_c * (n + 1/2)."""
        if n < 0:
            raise DomainError(f"level index must be >= 0, got {n}")
        return self.hbar * self.omega_c * (n + 0.5)


def derive_params(hbar=1.0, mass=1.0, charge=1.0, light_speed=1.0, field=1.0) -> PhysicalParams:
    """Build a validated PhysicalParams from the five dimensional inputs."""
    return PhysicalParams(hbar, mass, charge, light_speed, field)


@dataclass(frozen=True)
class QuantumNumbers:
    """Labels (n, k, k') of the closed-form eigenfunctions.

    n is the oscillator level.  k is the momentum carried by the plane-wave
    factor of the free solution.  k' locates the oscillator strip of the
    non-free term: the strip center sits at k'/beta along the oscillator
    axis.
    """

    n: int
    k: float = 0.0
    kprime: float = 0.0

    def __post_init__(self):
        if self.n < 0:
            raise DomainError(f"oscillator level must be >= 0, got {self.n}")
        if not (math.isfinite(self.k) and math.isfinite(self.kprime)):
            raise DomainError("momenta k and k' must be finite")


@dataclass(frozen=True)
class Grid2D:
    """Uniform rectangular grid including both endpoints on each axis."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int

    def __post_init__(self):
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise DomainError("grid bounds must be well ordered")
        if self.nx < 8 or self.ny < 8:
            raise DomainError(f"need nx, ny >= 8, got {self.nx} x {self.ny}")

    @property
    def hx(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def hy(self) -> float:
        return (self.y_max - self.y_min) / (self.ny - 1)

    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    def ys(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.ny)

    def meshgrid(self):
        """(X, Y) arrays of shape (nx, ny), entry [i, j] = (x_i, y_j)."""
        return np.meshgrid(self.xs(), self.ys(), indexing="ij")

    def trapezoid_weights(self) -> np.ndarray:
        """Outer product of the 1-D trapezoid weights (1/2 on edges)."""
        wx = np.ones(self.nx)
        wx[0] = wx[-1] = 0.5
        wy = np.ones(self.ny)
        wy[0] = wy[-1] = 0.5
        return np.outer(wx, wy)

    def interior(self, margin: int) -> "Grid2D":
        """Sub-grid with `margin` cells stripped from every edge."""
        if margin == 0:
            return self
        if margin < 0 or 2 * margin + 8 > min(self.nx, self.ny):
            raise DomainError(f"margin {margin} leaves fewer than 8 points per axis")
        xs, ys = self.xs(), self.ys()
        return Grid2D(
            xs[margin], xs[-1 - margin], ys[margin], ys[-1 - margin],
            self.nx - 2 * margin, self.ny - 2 * margin,
        )


def make_grid(bounds, nx: int, ny: int) -> Grid2D:
    """Grid from bounds (x_min, x_max, y_min, y_max) and point counts."""
    x_min, x_max, y_min, y_max = bounds
    return Grid2D(float(x_min), float(x_max), float(y_min), float(y_max), int(nx), int(ny))


@dataclass(frozen=True)
class ComplexField:
    """Complex samples on a Grid2D; immutable after construction."""

    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.complex128)
        if v.shape != (self.grid.nx, self.grid.ny):
            raise DomainError(
                f"values shape {v.shape} does not match grid {(self.grid.nx, self.grid.ny)}"
            )
        if not np.all(np.isfinite(v.real)) or not np.all(np.isfinite(v.imag)):
            raise DomainError("field values must all be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def crop(self, margin: int) -> "ComplexField":
        """Field restricted to the margin-stripped interior sub-grid."""
        if margin == 0:
            return self
        sub = self.grid.interior(margin)
        return ComplexField(sub, self.values[margin:-margin, margin:-margin])

    def boundary_max(self) -> float:
        """Largest modulus on the four grid edges."""
        v = self.values
        return max(
            float(np.max(np.abs(v[0, :]))),
            float(np.max(np.abs(v[-1, :]))),
            float(np.max(np.abs(v[:, 0]))),
            float(np.max(np.abs(v[:, -1]))),
        )


def field_norm(field: ComplexField) -> float:
    """Trapezoid-weighted L2 norm sqrt(sum w |psi|^2 hx hy)."""
    g = field.grid
    s = np.sum(g.trapezoid_weights() * np.abs(field.values) ** 2)
    return float(np.sqrt(s * g.hx * g.hy))
