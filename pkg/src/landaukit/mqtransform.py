"""Phase-space integral transform mapping oscillator-variable solutions to (x, y).

The kernel is the pure phase

    K(Q, Qbar; x, y) = (beta / 2 pi) * exp[i (beta/hbar) (Q Qbar + x y - x Q - y Qbar)]

applied as T f(x, y) = integral of K * f(Q, Qbar) dQ dQbar.  Two inputs have
closed-form images:

* plane wave  psi_n(sqrt(beta/hbar) Q) * exp(i k Qbar / hbar)
  -> hbar * exp(i k x / hbar) * psi_n(sqrt(beta/hbar) (y - k/beta));
  `transform_planewave` returns the conventional constant-free form, and
  the overall hbar (invisible in natural units) is exposed as
  `plane_prefactor`.
* delta line  psi_n(sqrt(beta/hbar) Q) * delta(Qbar - k'/beta)
  -> C_n * exp(i (beta/hbar)(x - k'/beta) y) * psi_n(sqrt(beta/hbar)(x - k'/beta))
  with C_n = (-i)**n * sqrt(beta hbar / (2 pi)), exposed as `delta_prefactor`.

`transform_numeric` evaluates the double integral directly.  The Qbar
integral of the plane-wave branch is only distributionally convergent, so a
Gaussian damping factor exp(-(eps * qbar)^2 / 2) is applied over a schedule
of shrinking eps and the results are polynomially extrapolated in eps^2 to
zero; the delta line is realized as a normalized Gaussian of the same
shrinking width.  The smoothing error is even in eps, so a short schedule
already extrapolates far below the quadrature target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import DivergenceError, DomainError
from .hermite import psi_n
from .physcore import PhysicalParams

__all__ = [
    "PlaneWave",
    "DeltaLine",
    "CustomInput",
    "TransformInput",
    "RegulatorSchedule",
    "mq_kernel",
    "plane_prefactor",
    "delta_prefactor",
    "transform_planewave",
    "transform_delta",
    "transform_numeric",
]


@dataclass(frozen=True)
class PlaneWave:
    """Oscillator level n along Q times plane wave exp(i k Qbar / hbar)."""
    n: int
    k: float = 0.0

    def __post_init__(self):
        if self.n < 0:
            raise DomainError(f"level must be >= 0, got {self.n}")


@dataclass(frozen=True)
class DeltaLine:
    """Oscillator level n along Q times delta(Qbar - kprime/beta)."""
    n: int
    kprime: float = 0.0

    def __post_init__(self):
        if self.n < 0:
            raise DomainError(f"level must be >= 0, got {self.n}")


@dataclass(frozen=True)
class CustomInput:
    """Absolutely integrable sampled input; func(Q, Qbar) must broadcast."""
    func: Callable


TransformInput = Union[PlaneWave, DeltaLine, CustomInput]


@dataclass(frozen=True)
class RegulatorSchedule:
    """Damping widths and quadrature resolution for the numeric transform.

    epsilons: strictly decreasing dimensionless damping parameters (the
    damping factor is exp(-(eps*qbar)^2/2) in units of the magnetic
    length); at least three are required for the extrapolation.
    half_width: truncation of the oscillator-variable integral in the same
    units; None selects max(8, sqrt(2n+1) + 6), the classically allowed
    region plus tail.
    nodes_per_unit: base sampling density of the oscillator axis.
    """

    epsilons: tuple = (0.2, 0.14, 0.1, 0.07)
    half_width: float | None = None
    nodes_per_unit: int = 50

    def __post_init__(self):
        eps = tuple(float(e) for e in self.epsilons)
        if len(eps) < 3:
            raise DomainError("schedule needs at least 3 epsilons")
        if any(e <= 0 for e in eps):
            raise DomainError("epsilons must be positive")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise DomainError("epsilons must be strictly decreasing")
        if self.half_width is not None and self.half_width <= 0:
            raise DomainError("half_width must be positive")
        if self.nodes_per_unit < 4:
            raise DomainError("nodes_per_unit must be at least 4")
        object.__setattr__(self, "epsilons", eps)


def mq_kernel(params: PhysicalParams, Q, Qbar, x, y):
    """Kernel value; modulus is beta/(2 pi) everywhere."""
    c = params.beta / params.hbar
    phase = c * (np.asarray(Q) * Qbar + np.asarray(x) * y - np.asarray(x) * Q - np.asarray(y) * Qbar)
    return params.beta / (2.0 * math.pi) * np.exp(1j * phase)


def plane_prefactor(params: PhysicalParams) -> float:
    """Constant by which the integral exceeds the printed plane-wave image."""
    return params.hbar


def delta_prefactor(params: PhysicalParams, n: int) -> complex:
    """C_n = (-i)**n sqrt(beta hbar / (2 pi)) carried by the delta-line image."""
    if n < 0:
        raise DomainError(f"level must be >= 0, got {n}")
    return (-1j) ** n * math.sqrt(params.beta * params.hbar / (2.0 * math.pi))


def transform_planewave(params: PhysicalParams, n: int, k: float, x, y):
    """Closed-form image of the plane-wave input (constant-free convention).

    The Qbar integral collapses to a delta pinning Q = y - k/beta, leaving
    exp(i k x / hbar) * psi_n(sqrt(beta/hbar)(y - k/beta)).
    """
    if n < 0:
        raise DomainError(f"level must be >= 0, got {n}")
    s = math.sqrt(params.beta / params.hbar)
    return np.exp(1j * k * np.asarray(x) / params.hbar) * psi_n(n, s * (np.asarray(y) - k / params.beta))


def transform_delta(params: PhysicalParams, n: int, kprime: float, x, y):
    """Closed-form image of the delta-line input, including C_n.

    The delta pins Qbar = k'/beta and the remaining Q integral is the
    Fourier transform of psi_n, whence the (-i)**n in the prefactor.
    """
    if n < 0:
        raise DomainError(f"level must be >= 0, got {n}")
    s = math.sqrt(params.beta / params.hbar)
    shifted = np.asarray(x) - kprime / params.beta
    body = np.exp(1j * (params.beta / params.hbar) * shifted * np.asarray(y)) * psi_n(n, s * shifted)
    return delta_prefactor(params, n) * body


def _extrapolate_to_zero(ts, vals):
    """Neville tableau at t = 0; returns (estimate, spread of the last step)."""
    rows = [list(vals)]
    for level in range(1, len(vals)):
        prev = rows[-1]
        cur = []
        for i in range(len(prev) - 1):
            t0, t1 = ts[i], ts[i + level]
            cur.append((t1 * prev[i] - t0 * prev[i + 1]) / (t1 - t0))
        rows.append(cur)
    estimate = rows[-1][0]
    spread = abs(rows[-1][0] - rows[-2][0]) if len(rows) > 1 else math.inf
    return estimate, spread


def _check_monotone(eps, raw, scale):
    """Raise DivergenceError if the schedule values stop approaching a limit."""
    diffs = [abs(b - a) for a, b in zip(raw, raw[1:])]
    floor = 1e-12 * max(scale, 1e-300)
    for j in range(len(diffs) - 1):
        if diffs[j] > floor and diffs[j + 1] > 1.5 * diffs[j]:
            raise DivergenceError(
                f"schedule values diverge between eps={eps[j + 1]:g} and eps={eps[j + 2]:g}",
                sequence=list(raw),
            )


def _qbar_spacing(a_max: float) -> float:
    # trapezoid aliasing images sit at 2*pi/spacing; keep them 8 units past
    # the largest oscillation rate of exp(i * qbar * a)
    return min(0.25, 2.0 * math.pi / (a_max + 8.0))


def transform_numeric(params: PhysicalParams, tinput: TransformInput, x, y,
                      schedule: RegulatorSchedule = RegulatorSchedule()):
    """Regulated quadrature of the transform at probe points (x, y).

    x and y broadcast; returns (values, error_estimates) with the
    extrapolation spread as the error estimate (scalars for scalar probes).
    Raises DivergenceError carrying the raw schedule sequence if the
    damped values fail to settle.
    """
    lam = params.mag_length
    xi = np.atleast_1d(np.asarray(x, dtype=float) / lam)
    eta = np.atleast_1d(np.asarray(y, dtype=float) / lam)
    xi, eta = np.broadcast_arrays(xi, eta)
    shape = xi.shape
    xi, eta = xi.ravel(), eta.ravel()

    if isinstance(tinput, (PlaneWave, DeltaLine)):
        n = tinput.n
    else:
        n = 0
    w_half = schedule.half_width if schedule.half_width is not None else max(
        8.0, math.sqrt(2.0 * n + 1.0) + 6.0)

    per_eps = []
    for eps in schedule.epsilons:
        per_eps.append(_numeric_at_eps(params, tinput, xi, eta, eps, w_half,
                                       schedule.nodes_per_unit))
    raw = np.stack(per_eps)  # (n_eps, n_probes)

    ts = [e * e for e in schedule.epsilons]
    values = np.empty(len(xi), dtype=complex)
    errors = np.empty(len(xi), dtype=float)
    for p in range(len(xi)):
        seq = raw[:, p]
        _check_monotone(schedule.epsilons, seq, float(np.max(np.abs(seq))))
        values[p], errors[p] = _extrapolate_to_zero(ts, seq)
    if shape == ():
        return complex(values[0]), float(errors[0])
    return values.reshape(shape), errors.reshape(shape)


def _numeric_at_eps(params, tinput, xi, eta, eps, w_half, nodes_per_unit):
    """One damped quadrature pass; xi/eta are flat dimensionless probe arrays."""
    hbar = params.hbar
    lam = params.mag_length
    kappa = 0.0
    if isinstance(tinput, PlaneWave):
        kappa = tinput.k / math.sqrt(params.beta * hbar)
        hq = min(1.0 / nodes_per_unit, eps / 3.0)
        q = np.arange(-w_half, w_half + hq / 2, hq)
        qb_half = 7.5 / eps
        hqb = _qbar_spacing(w_half + float(np.max(np.abs(eta))) + abs(kappa))
        qb = np.arange(-qb_half, qb_half + hqb / 2, hqb)
        along_qb = np.exp(-0.5 * (eps * qb) ** 2 + 1j * kappa * qb)
        f_q = psi_n(tinput.n, q)
        prefactor = hbar / (2.0 * math.pi)
    elif isinstance(tinput, DeltaLine):
        kappa_p = tinput.kprime / math.sqrt(params.beta * hbar)
        hq = 1.0 / nodes_per_unit
        q = np.arange(-w_half, w_half + hq / 2, hq)
        hqb = eps / 6.0
        qb = np.arange(kappa_p - 8.0 * eps, kappa_p + 8.0 * eps + hqb / 2, hqb)
        along_qb = np.exp(-0.5 * ((qb - kappa_p) / eps) ** 2) / (eps * math.sqrt(2.0 * math.pi))
        f_q = psi_n(tinput.n, q)
        prefactor = hbar / (2.0 * math.pi * lam)
    elif isinstance(tinput, CustomInput):
        hq = 1.0 / nodes_per_unit
        q = np.arange(-w_half, w_half + hq / 2, hq)
        qb = q
        hqb = hq
        along_qb = np.exp(-0.5 * (eps * qb) ** 2)
        f_q = None
        prefactor = hbar / (2.0 * math.pi)
    else:
        raise DomainError(f"unsupported transform input {type(tinput).__name__}")

    # coupling matrix exp(i q qbar) weighted along qbar; probe dependence is
    # factored into two thin matrices so one pass covers all probes
    if f_q is not None:
        M = np.exp(1j * np.outer(q, qb)) * (along_qb * hqb)
        U = np.exp(1j * np.outer(-eta, qb))          # exp(-i eta qbar)
        inner = M @ U.T                              # (Nq, Np)
        V = np.exp(-1j * np.outer(xi, q))            # exp(-i xi q)
        sums = np.einsum("pq,q,qp->p", V, f_q * hq, inner, optimize=True)
    else:
        G = np.asarray(tinput.func(lam * q[:, None], lam * qb[None, :]), dtype=complex)
        core = np.exp(1j * np.outer(q, qb)) * G * (along_qb * hqb) * hq
        U = np.exp(-1j * np.outer(eta, qb))
        V = np.exp(-1j * np.outer(xi, q))
        sums = np.einsum("pq,qr,pr->p", V, core, U, optimize=True)
    return np.exp(1j * xi * eta) * prefactor * sums
