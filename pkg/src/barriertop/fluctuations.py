"""Quantum fluctuations about classical paths.

The lowest fluctuation mode becomes soft near the crossover temperature and
is integrated exactly in a quartic potential; all other modes are Gaussian
and summed into an analytic prefactor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma

from .classical import ModeVector, critical_point, overlap_coefficient
from .model import BarrierParams, DomainError, NumericalFailure, lambda1_from_theta

PI = np.pi
TAIL_LEVEL = 46.0  # exp(-46) ~ 1e-20


def lambda1_coeff(params: BarrierParams, lambda1: float, Q: float) -> float:
    """Curvature ``Lambda_1(Q)`` of the soft mode about the path with amplitude ``Q``.

    Equal to ``lambda1 - lambda_c + 9 a4 eps^(2/3) (Q - Q_c)^2``; evaluated in
    the expanded form ``lambda1 + 9 a4 eps^(2/3) Q (Q - 2 Q_c)``, which is
    exact at ``Q = 0``.
    """
    cd = critical_point(params)
    return float(lambda1 + 9.0 * params.a4 * params.epsilon ** (2.0 / 3.0) * Q * (Q - 2.0 * cd.Q_c))


@dataclass(frozen=True)
class FluctuationPotentialSpec:
    """Quartic potential ``c2 Y^2 + c3 Y^3 + c4 Y^4`` of the soft mode."""

    theta: float
    lambda1: float
    Q: float
    c2: float
    c3: float
    c4: float

    @property
    def Lambda1(self) -> float:
        return 8.0 * self.theta * self.c2


def fluctuation_spec(params: BarrierParams, theta: float, Q: float, Lambda1: float | None = None) -> FluctuationPotentialSpec:
    """Assemble the soft-mode potential about amplitude ``Q``.

    ``Lambda1`` overrides the curvature, e.g. with an exact zero on a
    degenerate root.
    """
    lam1 = lambda1_from_theta(theta)
    cd = critical_point(params)
    eps = params.epsilon
    a4 = params.a4
    L = lambda1_coeff(params, lam1, Q) if Lambda1 is None else float(Lambda1)
    c2 = L / (8.0 * theta)
    c3 = 3.0 * a4 * eps ** (4.0 / 3.0) * (Q - cd.Q_c) / (8.0 * theta ** 2)
    c4 = 3.0 * a4 * eps ** 2 / (64.0 * theta ** 3)
    return FluctuationPotentialSpec(float(theta), lam1, float(Q), c2, c3, c4)


def fluc_potential(spec: FluctuationPotentialSpec, Y1):
    Y = np.asarray(Y1, dtype=float)
    v = Y * Y * (spec.c2 + Y * (spec.c3 + Y * spec.c4))
    return v[()] if v.ndim == 0 else v


def fluc_potential_slope(spec: FluctuationPotentialSpec, Y1):
    Y = np.asarray(Y1, dtype=float)
    d = Y * (2.0 * spec.c2 + Y * (3.0 * spec.c3 + 4.0 * spec.c4 * Y))
    return d[()] if d.ndim == 0 else d


def fluc_extrema(spec: FluctuationPotentialSpec) -> list[float]:
    """Stationary points of the soft-mode potential, ascending, always including 0."""
    a, b, c = 4.0 * spec.c4, 3.0 * spec.c3, 2.0 * spec.c2
    out = [0.0]
    if a == 0.0:
        if b != 0.0:
            out.append(-c / b)
        return sorted(out)
    rad = b * b - 4.0 * a * c
    if rad >= 0.0:
        s = np.sqrt(rad)
        # avoid cancellation in the smaller root
        qq = -0.5 * (b + np.copysign(s, b)) if b != 0.0 else -0.5 * s
        if qq != 0.0:
            out.extend([qq / a, c / qq])
        else:
            out.append(0.0)
    return sorted(set(float(y) for y in out))


@dataclass(frozen=True)
class MarginalIntegral:
    """Soft-mode integral ``K(Q)`` with its numerical audit trail.

    ``log_value`` is kept alongside ``value`` because deep side wells can
    push ``K`` past the floating point range while ``K exp(-S)`` stays finite.
    """

    value: float
    quadrature_error: float
    truncation_bound: float
    log_value: float


def _truncation_bound(spec, start):
    B = max(start, 1.0)
    for _ in range(200):
        if fluc_potential(spec, B) >= TAIL_LEVEL and fluc_potential(spec, -B) >= TAIL_LEVEL:
            return B
        B *= 1.25
    raise NumericalFailure("could not bracket the soft-mode integrand")


def marginal_integral(spec: FluctuationPotentialSpec, rtol: float = 1e-10) -> MarginalIntegral:
    """``K = (8 pi theta)^(-1/2) int exp(-V(Y)) dY`` by adaptive quadrature.

    The integral is split at the stationary points of ``V`` and truncated
    where ``V >= 46``. Without quartic and cubic terms the Gaussian closed
    form ``Lambda_1^(-1/2)`` is returned.
    """
    c2, c3, c4 = spec.c2, spec.c3, spec.c4
    norm = 1.0 / np.sqrt(8.0 * PI * spec.theta)
    if c4 == 0.0:
        if c3 == 0.0 and c2 > 0.0:
            val = 1.0 / np.sqrt(spec.Lambda1)
            return MarginalIntegral(val, 0.0, np.inf, float(np.log(val)))
        raise DomainError("soft-mode integral diverges without a positive quartic term")
    if c4 < 0.0:
        raise DomainError("soft-mode integral diverges for c4 < 0")

    ext = fluc_extrema(spec)
    vmin = min(fluc_potential(spec, y) for y in ext)
    width = max(abs(e) for e in ext)
    if c2 > 0.0:
        width += np.sqrt(1.0 / c2)
    width += (1.0 / c4) ** 0.25
    B = _truncation_bound(spec, width)
    pts = [-B] + [y for y in ext if -B < y < B] + [B]

    def f(y):
        return np.exp(-(fluc_potential(spec, y) - vmin))

    total = 0.0
    err = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        if hi <= lo:
            continue
        val, e = quad(f, lo, hi, epsabs=0.0, epsrel=1e-13, limit=400)
        total += val
        err += e
    if not (total > 0.0 and err <= rtol * total):
        raise NumericalFailure(f"soft-mode quadrature error {err:.3g} exceeds tolerance")
    log_value = float(np.log(norm * total) - vmin)
    scale = np.exp(-vmin) if -vmin < 700.0 else np.inf
    return MarginalIntegral(float(norm * total * scale), float(norm * err * scale), float(B), log_value)


def quartic_marginal_integral(theta: float, c4: float) -> float:
    """Closed form of ``K`` for a pure quartic potential ``c4 Y^4``."""
    return float(2.0 * gamma(1.25) * c4 ** -0.25 / np.sqrt(8.0 * PI * theta))


def harmonic_prefactor(theta: float) -> float:
    """Fluctuation prefactor ``(4 pi sin theta)^(-1/2)`` above the crossover."""
    if not 0.0 < theta < PI:
        raise DomainError("harmonic prefactor needs 0 < theta < pi")
    return float(1.0 / np.sqrt(4.0 * PI * np.sin(theta)))


def critical_prefactor(theta: float) -> float:
    """Prefactor ``sqrt(lambda1 / (4 pi sin theta))`` regular through ``theta = pi``.

    Written as ``sqrt((pi + theta) / (4 pi theta^2) * d / sin d)`` with
    ``d = pi - theta``, whose value at ``theta = pi`` is ``1/(pi sqrt 2)``.
    """
    if not 0.0 < theta < 2.0 * PI:
        raise DomainError("prefactor needs 0 < theta < 2 pi")
    d = PI - theta
    ratio = 1.0 / np.sinc(d / PI)  # d / sin d
    return float(np.sqrt((PI + theta) / (4.0 * PI * theta ** 2) * ratio))


def frechet2_coefficient(params: BarrierParams, theta: float, modes: ModeVector) -> float:
    """Quadratic soft-mode coefficient (times ``8 theta``) from a full mode vector.

    Includes the cubic and quartic anharmonic contractions over all stored
    modes.
    """
    lam1 = lambda1_from_theta(theta)
    Q = np.asarray(modes.amplitudes, dtype=float)
    k = np.arange(1, len(Q) + 1)
    g = params.epsilon / theta
    out = lam1
    a3, a4 = params.a3, params.a4
    if a3 != 0.0:
        d3 = np.array([overlap_coefficient((kk, 1, 1)) for kk in k])
        out += 2.0 * a3 * g * float(d3 @ Q)
    if a4 != 0.0:
        n = len(Q)
        d4 = np.empty((n, n))
        for i in range(n):
            for j in range(i, n):
                d4[i, j] = d4[j, i] = overlap_coefficient((k[i], k[j], 1, 1))
        out += 3.0 * a4 * g * g * float(Q @ d4 @ Q)
    return float(out)


__all__ = [
    "lambda1_coeff", "FluctuationPotentialSpec", "fluctuation_spec", "fluc_potential", "fluc_potential_slope",
    "fluc_extrema", "MarginalIntegral", "marginal_integral", "quartic_marginal_integral", "harmonic_prefactor",
    "critical_prefactor", "frechet2_coefficient",
]
