"""Classical cyclotron motion and the harmonic flow of the canonical pair.

The magnetic force F = -(e/c) v x B with B along z gives

    dvx/dt = -omega_c * vy,    dvy/dt = +omega_c * vx,

uniform circular motion at the cyclotron frequency.  Two combinations are
exactly conserved along every orbit,

    c1 = m vx + beta y,        c2 = m vy - beta x,

and they coincide (for the default gauge) with the canonical momentum px
and with py - beta x: the classical shadows of the two conserved operators.
Orbits are integrated with classic fixed-step fourth-order Runge-Kutta; the
system is linear, so fixed stepping keeps the conservation drift flat and
predictable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .physcore import GaugeChoice, PhysicalParams

__all__ = [
    "ClassicalState",
    "ConservedPair",
    "CanonicalMomenta",
    "lorentz_rhs",
    "integrate_orbit",
    "conserved_pair",
    "canonical_momenta",
    "heisenberg_flow",
]


@dataclass(frozen=True)
class ClassicalState:
    x: float
    y: float
    vx: float
    vy: float
    t: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.vx, self.vy, self.t)):
            raise DomainError("state components must be finite")


@dataclass(frozen=True)
class ConservedPair:
    """c1 = m vx + beta y and c2 = m vy - beta x."""
    c1: float
    c2: float


@dataclass(frozen=True)
class CanonicalMomenta:
    px: float
    py: float


def lorentz_rhs(params: PhysicalParams, s: ClassicalState):
    """(dx, dy, dvx, dvy)/dt under the magnetic force."""
    w = params.omega_c
    return (s.vx, s.vy, -w * s.vy, +w * s.vx)


def _rhs_vec(w: float, u: np.ndarray) -> np.ndarray:
    return np.array([u[2], u[3], -w * u[3], w * u[2]])


def integrate_orbit(params: PhysicalParams, s0: ClassicalState, dt: float, steps: int):
    """Fixed-step RK4 trajectory of steps+1 states starting at s0."""
    if dt <= 0:
        raise DomainError(f"dt must be positive, got {dt}")
    if steps < 1:
        raise DomainError(f"steps must be >= 1, got {steps}")
    w = params.omega_c
    u = np.array([s0.x, s0.y, s0.vx, s0.vy], dtype=float)
    out = [s0]
    t = s0.t
    for _ in range(steps):
        k1 = _rhs_vec(w, u)
        k2 = _rhs_vec(w, u + 0.5 * dt * k1)
        k3 = _rhs_vec(w, u + 0.5 * dt * k2)
        k4 = _rhs_vec(w, u + dt * k3)
        u = u + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        t += dt
        out.append(ClassicalState(u[0], u[1], u[2], u[3], t))
    return out


def conserved_pair(params: PhysicalParams, s: ClassicalState) -> ConservedPair:
    m, beta = params.mass, params.beta
    return ConservedPair(m * s.vx + beta * s.y, m * s.vy - beta * s.x)


def canonical_momenta(params: PhysicalParams, gauge: GaugeChoice, s: ClassicalState) -> CanonicalMomenta:
    """Canonical momentum components for the gauge.

    LANDAU_X: px = m vx + beta y (conserved, identical to c1), py = m vy.
    LANDAU_Y mirrors the roles: py = m vy + beta x, px = m vx.
    """
    m, beta = params.mass, params.beta
    if gauge is GaugeChoice.LANDAU_X:
        return CanonicalMomenta(m * s.vx + beta * s.y, m * s.vy)
    return CanonicalMomenta(m * s.vx, m * s.vy + beta * s.x)


def heisenberg_flow(params: PhysicalParams, Q0: float, P0: float, t):
    """Harmonic evolution of the oscillating canonical pair.

    Q(t) = Q0 cos(w t) + (P0/beta) sin(w t),
    P(t) = P0 cos(w t) - beta Q0 sin(w t);

    the barred pair is constant in time.  Evaluating the commutator with
    the transformed Hamiltonian gives dQ/dt = P/m and dP/dt = -(beta^2/m) Q
    once the i*hbar from the evolution equation is divided out; these are
    the dimensionally consistent rates and the discrete commutator check in
    the operators module confirms them.
    """
    w = params.omega_c
    beta = params.beta
    t = np.asarray(t, dtype=float)
    c, s = np.cos(w * t), np.sin(w * t)
    qt = Q0 * c + (P0 / beta) * s
    pt = P0 * c - beta * Q0 * s
    if t.ndim == 0:
        return float(qt), float(pt)
    return qt, pt
