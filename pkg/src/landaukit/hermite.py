"""Harmonic-oscillator eigenfunctions and Gauss-Hermite quadrature.

The eigenfunctions are unit L2-normalized with weight exp(-s^2/2):

    psi_0(s) = pi**-0.25 * exp(-s**2/2)
    psi_{j+1}(s) = sqrt(2/(j+1)) * s * psi_j(s) - sqrt(j/(j+1)) * psi_{j-1}(s)

The recurrence acts on the normalized functions directly, which keeps every
intermediate bounded near one; raw Hermite polynomials would overflow
around degree 150.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import AccuracyError, DomainError

__all__ = ["QuadratureRule", "psi_n", "gauss_hermite", "fourier_of_psi"]

MAX_ORDER = 200

# exp(-s^2/2) is flushed to exactly zero past this point so that downstream
# norms are reproducible instead of accumulating subnormal noise
_UNDERFLOW_S = 60.0


def psi_n(n: int, s):
    """Normalized oscillator eigenfunction psi_n at s (scalar or array).

    Values where the Gaussian envelope underflows (|s| >= 60) are exactly 0.
    """
    if n < 0:
        raise DomainError(f"level must be >= 0, got {n}")
    s_arr = np.asarray(s, dtype=float)
    scalar = s_arr.ndim == 0
    s_arr = np.atleast_1d(s_arr)

    alive = np.abs(s_arr) < _UNDERFLOW_S
    sa = np.where(alive, s_arr, 0.0)
    p_prev = np.where(alive, np.pi ** -0.25 * np.exp(-0.5 * sa * sa), 0.0)
    if n == 0:
        out = p_prev
    else:
        p_cur = math.sqrt(2.0) * sa * p_prev
        for j in range(1, n):
            p_next = math.sqrt(2.0 / (j + 1)) * sa * p_cur - math.sqrt(j / (j + 1)) * p_prev
            p_prev, p_cur = p_cur, p_next
        out = np.where(alive, p_cur, 0.0)
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite nodes with raw and decay-compensated weights.

    `weights` integrate poly(s) * exp(-s^2) exactly up to degree
    2*order - 1.  `modified_weights` are weights * exp(+s^2): they apply to
    integrands that already carry their own Gaussian decay, which is the
    form every oscillator-eigenfunction integral takes here.
    """

    order: int
    nodes: np.ndarray
    weights: np.ndarray
    modified_weights: np.ndarray

    def integrate(self, values) -> complex:
        """Sum modified weights against integrand samples at the nodes."""
        values = np.asarray(values)
        if values.shape[-1] != self.order:
            raise DomainError(
                f"expected {self.order} samples along the last axis, got {values.shape}"
            )
        return values @ self.modified_weights


@lru_cache(maxsize=None)
def gauss_hermite(order: int) -> QuadratureRule:
    """Gauss-Hermite rule of the given order (1..200), cached.

    Nodes are the eigenvalues of the symmetric tridiagonal Jacobi matrix
    (off-diagonal sqrt(j/2)).  Weights use the Christoffel identity on the
    normalized eigenfunctions,

        modified_weight_i = 1 / sum_{j < order} psi_j(node_i)^2,

    which stays O(1) at every node; the eigenvector-based form underflows
    to zero at the extreme nodes of high orders.  Raw weights follow as
    modified * exp(-node^2).
    """
    if not (1 <= order <= MAX_ORDER):
        raise DomainError(f"order must be in [1, {MAX_ORDER}], got {order}")
    if order == 1:
        nodes = np.zeros(1)
    else:
        off = np.sqrt(np.arange(1, order) / 2.0)
        nodes = eigh_tridiagonal(np.zeros(order), off, eigvals_only=True)

    total = np.zeros_like(nodes)
    p_prev = np.pi ** -0.25 * np.exp(-0.5 * nodes**2)
    total += p_prev**2
    if order > 1:
        p_cur = math.sqrt(2.0) * nodes * p_prev
        total += p_cur**2
        for j in range(1, order - 1):
            p_next = math.sqrt(2.0 / (j + 1)) * nodes * p_cur - math.sqrt(j / (j + 1)) * p_prev
            p_prev, p_cur = p_cur, p_next
            total += p_cur**2
    modified = 1.0 / total
    weights = modified * np.exp(-(nodes**2))
    for a in (nodes, weights, modified):
        a.setflags(write=False)
    return QuadratureRule(order, nodes, weights, modified)


def fourier_of_psi(n: int, t: float, rule: QuadratureRule) -> complex:
    """(1/sqrt(2 pi)) * integral of psi_n(s) exp(-i t s) ds by quadrature.

    psi_n is an eigenfunction of this transform with eigenvalue (-i)**n, so
    the result must be purely real (n even) or purely imaginary (n odd).
    The parity-forbidden component is monitored; exceeding 1e-10 signals an
    unusable rule and raises AccuracyError.
    """
    if rule.order < 2 * n + 20:
        raise DomainError(
            f"rule order {rule.order} is below the required 2n+20 = {2 * n + 20}"
        )
    samples = psi_n(n, rule.nodes) * np.exp(-1j * t * rule.nodes)
    val = complex(rule.integrate(samples)) / math.sqrt(2.0 * math.pi)
    forbidden = abs(val.imag) if n % 2 == 0 else abs(val.real)
    if forbidden > 1e-10:
        raise AccuracyError(
            f"parity-forbidden component {forbidden:.3e} exceeds 1e-10 "
            f"(n={n}, t={t}, order={rule.order})"
        )
    return val
