"""Numerically exact reference density matrix on a grid.

The Hamiltonian ``H = -d^2/dq^2 + V(q)`` is discretized with a sinc
discrete-variable representation, which is spectrally accurate for smooth
potentials. The thermal density matrix follows from a full symmetric
eigendecomposition; a split-step matrix-squaring propagator serves as an
independent cross-check.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import eigh, eigvalsh

from .density import DEFAULT_KAPPA, position_distribution
from .model import BarrierParams, DomainError, NumericalFailure, scaled_force, scaled_potential

logger = logging.getLogger(__name__)

BOLTZMANN_CUTOFF = 46.0
PI2_OVER_3 = np.pi ** 2 / 3.0


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid of ``points`` nodes on ``[-half_width, half_width]``."""

    half_width: float
    points: int

    def __post_init__(self):
        if self.points < 3 or not self.half_width > 0.0:
            raise ValueError("grid needs at least 3 points and a positive half width")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / (self.points - 1)

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.points)


@dataclass(frozen=True)
class CappedPotential:
    """Barrier potential continued by upward parabolas beyond ``+-q_match``.

    The continuation removes the remote wells of the full potential while
    leaving the barrier region untouched; value and slope are continuous at
    the seams.
    """

    base: BarrierParams
    q_match: float = 8.0
    k_c: float = 1.0

    def __post_init__(self):
        if not self.q_match > 0.0:
            raise ValueError("q_match must be positive")

    def __call__(self, q):
        q = np.asarray(q, dtype=float)
        out = scaled_potential(self.base, np.clip(q, -self.q_match, self.q_match))
        out = np.asarray(out, dtype=float).copy()
        for side in (1.0, -1.0):
            qm = side * self.q_match
            mask = side * q > self.q_match
            if np.any(mask):
                dq = q[mask] - qm
                out[mask] = scaled_potential(self.base, qm) + scaled_force(self.base, qm) * dq + 0.5 * self.k_c * dq * dq
        return out[()] if out.ndim == 0 else out

    def lower_bound(self) -> float:
        """Vertex bound on the continuation pieces."""
        vals = []
        for qm in (self.q_match, -self.q_match):
            vals.append(scaled_potential(self.base, qm) - scaled_force(self.base, qm) ** 2 / (2.0 * self.k_c))
        return float(min(vals))


def build_capped_potential(params: BarrierParams, q_match: float = 8.0, k_c: float = 1.0) -> CappedPotential:
    return CappedPotential(params, float(q_match), float(k_c))


@dataclass(frozen=True)
class ExactDensityGrid:
    """Thermal density matrix ``sum_n exp(-theta (E_n - E_0)) psi_n(q) psi_n(q')``."""

    theta: float
    grid: GridSpec
    rho_shifted: np.ndarray
    E0: float
    energies: np.ndarray | None = None

    def diagonal(self) -> np.ndarray:
        return np.diag(self.rho_shifted).copy()

    def at(self, q):
        """Diagonal ``rho(q, q)`` interpolated by a cubic spline."""
        q = np.asarray(q, dtype=float)
        if np.any(np.abs(q) > self.grid.half_width):
            raise DomainError("requested point lies outside the grid")
        return CubicSpline(self.grid.nodes, self.diagonal())(q)


def dvr_kinetic(grid: GridSpec) -> np.ndarray:
    """Sinc-DVR matrix of ``-d^2/dq^2`` on a uniform grid."""
    h = grid.spacing
    n = np.arange(grid.points)
    d = n[:, None] - n[None, :]
    with np.errstate(divide="ignore"):
        T = 2.0 * np.where(d % 2 == 0, 1.0, -1.0) / (h * h * d * d)
    np.fill_diagonal(T, PI2_OVER_3 / (h * h))
    return T


def _sample(pot: Callable, q):
    return np.asarray(pot(q), dtype=float)


def exact_density(grid: GridSpec, pot: Callable, theta: float, cutoff: float = BOLTZMANN_CUTOFF) -> ExactDensityGrid:
    """Reference density matrix by full diagonalization.

    Parameters
    ----------
    grid : GridSpec
    pot : callable
        Potential ``V(q)``; typically a :class:`CappedPotential`.
    theta : float
        Dimensionless inverse temperature.
    cutoff : float
        Levels with ``theta (E_n - E_0)`` above this are dropped.
    """
    if not theta > 0.0:
        raise DomainError("theta must be positive")
    q = grid.nodes
    H = dvr_kinetic(grid) + np.diag(_sample(pot, q))
    try:
        w, v = eigh(H)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigensolver failed: {exc}") from exc
    E0 = float(w[0])
    keep = theta * (w - E0) <= cutoff
    weights = np.exp(-theta * (w[keep] - E0))
    psi = v[:, keep] / np.sqrt(grid.spacing)
    edge = np.sqrt(weights) * np.maximum(np.abs(psi[0]), np.abs(psi[-1]))
    if np.max(edge) > 1e-8:
        warnings.warn(f"retained eigenfunctions reach the grid edge (amplitude {np.max(edge):.2e}); enlarge the grid",
                      RuntimeWarning, stacklevel=2)
    rho = (psi * weights) @ psi.T
    rho = 0.5 * (rho + rho.T)
    logger.debug("exact density: %d of %d levels kept, E0=%.12g", int(keep.sum()), len(w), E0)
    return ExactDensityGrid(float(theta), grid, rho, E0, w[keep])


def trotter_density(grid: GridSpec, pot: Callable, theta: float, slices: int) -> ExactDensityGrid:
    """Density matrix by symmetric split-step matrix squaring.

    The short-time kernel ``exp(-tau V/2) exp(-tau T) exp(-tau V/2)`` with
    ``tau = theta/slices`` is squared ``log2(slices)`` times, rescaling at each
    step. The kinetic factor is exact within the DVR, so the only error is the
    splitting error of order ``tau^2``. The ground energy is estimated from
    the largest eigenvalue of the result.
    """
    if slices < 2 or slices & (slices - 1):
        raise ValueError("slices must be a power of two >= 2")
    if not theta > 0.0:
        raise DomainError("theta must be positive")
    tau = theta / slices
    V = _sample(pot, grid.nodes)
    wT, vT = eigh(dvr_kinetic(grid))
    expT = (vT * np.exp(-tau * wT)) @ vT.T
    half = np.exp(-0.5 * tau * (V - V.min()))
    K = half[:, None] * expT * half[None, :]
    log_scale = -tau * V.min()
    s = np.max(np.abs(K))
    K /= s
    log_scale += np.log(s)
    for _ in range(int(np.log2(slices))):
        K = K @ K
        K = 0.5 * (K + K.T)
        s = np.max(np.abs(K))
        if not np.isfinite(s) or s == 0.0:
            raise NumericalFailure("matrix squaring lost all precision")
        K /= s
        log_scale = 2.0 * log_scale + np.log(s)
    mu = eigvalsh(K)[-1]
    E0 = -(np.log(mu) + log_scale) / theta
    rho = K / (mu * grid.spacing)
    return ExactDensityGrid(float(theta), grid, rho, float(E0))


def mehler_kernel(theta: float, q, qprime):
    """Thermal kernel of the stable well ``q^2/4`` with ``H = -d^2/dq^2 + q^2/4``."""
    q = np.asarray(q, dtype=float)
    qprime = np.asarray(qprime, dtype=float)
    r = 0.5 * (q + qprime)
    z = q - qprime
    return np.exp(-0.5 * r * r * np.tanh(0.5 * theta) - z * z / (8.0 * np.tanh(0.5 * theta))) / np.sqrt(
        4.0 * np.pi * np.sinh(theta))


@dataclass(frozen=True)
class DistributionComparison:
    q: np.ndarray
    semiclassical: np.ndarray
    exact: np.ndarray
    rel_error: np.ndarray
    max_rel: float
    mean_rel: float


def compare_distributions(semiclassical, exact: ExactDensityGrid, window: tuple[float, float]) -> DistributionComparison:
    """Compare position distributions after normalizing each at ``q = 0``.

    Parameters
    ----------
    semiclassical : sequence of (q, P) pairs
        Must contain ``q = 0``.
    exact : ExactDensityGrid
    window : (float, float)
    """
    pairs = np.asarray(semiclassical, dtype=float)
    q, P = pairs[:, 0], pairs[:, 1]
    lo, hi = window
    if lo > hi or max(abs(lo), abs(hi)) > exact.grid.half_width:
        raise DomainError("comparison window lies outside the grid")
    zero = np.flatnonzero(q == 0.0)
    if zero.size == 0:
        raise ValueError("semiclassical samples must include q = 0")
    m = (q >= lo) & (q <= hi)
    sc = P[m] / P[zero[0]]
    ex = exact.at(q[m]) / exact.at(0.0)
    rel = np.abs(sc - ex) / np.abs(ex)
    return DistributionComparison(q[m], sc, ex, rel, float(rel.max()), float(rel.mean()))


def compare_with_semiclassical(params: BarrierParams, theta: float, grid: GridSpec | None = None,
                               q_match: float = 8.0, window: tuple[float, float] = (-1.0, 1.0),
                               n_points: int = 41, kappa: float = DEFAULT_KAPPA,
                               k_c: float = 1.0) -> DistributionComparison:
    """Semiclassical ``P(q)`` against the capped-potential oracle."""
    if all(v == 0.0 for v in params.a.values()):
        raise DomainError("the inverted oscillator has no confined oracle; use the harmonic closed form instead")
    grid = grid or GridSpec(15.0, 1500)
    exact = exact_density(grid, build_capped_potential(params, q_match, k_c), theta)
    qs = np.linspace(window[0], window[1], n_points)
    if not np.any(qs == 0.0):
        qs = np.sort(np.append(qs, 0.0))
    P = [position_distribution(params, theta, float(x), kappa) for x in qs]
    return compare_distributions(list(zip(qs, P)), exact, window)


__all__ = [
    "GridSpec", "CappedPotential", "build_capped_potential", "ExactDensityGrid", "dvr_kinetic", "exact_density",
    "trotter_density", "mehler_kernel", "DistributionComparison", "compare_distributions",
    "compare_with_semiclassical",
]
