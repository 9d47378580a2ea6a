"""Dimensionless barrier model: parameters, scaled potential and coordinates."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np


class DomainError(ValueError):
    """An argument lies outside the domain where a formula is defined."""


class NumericalFailure(RuntimeError):
    """An iterative or adaptive numerical procedure failed to converge."""


@dataclass(frozen=True)
class BarrierParams:
    """Anharmonicity coefficients and expansion parameter of the barrier.

    Parameters
    ----------
    a : mapping of int to float
        Coefficients ``a_n`` for ``n >= 3``. Orders that are not stored are
        exactly zero.
    epsilon : float
        Small expansion parameter, the ratio of the thermal length to the
        anharmonic length scale.

    Notes
    -----
    The closed-form order-1 action only uses ``a_3`` to ``a_6``; higher
    coefficients enter the scaled potential and the full mode solver only.
    """

    a: Mapping[int, float] = field(default_factory=dict)
    epsilon: float = 0.01

    def __post_init__(self):
        items = {int(n): float(v) for n, v in dict(self.a).items()}
        if any(n < 3 for n in items):
            raise ValueError("anharmonic orders must satisfy n >= 3")
        # freeze as a sorted tuple-backed dict copy so instances stay immutable
        object.__setattr__(self, "a", dict(sorted(items.items())))
        object.__setattr__(self, "epsilon", float(self.epsilon))

    def coeff(self, n: int) -> float:
        return self.a.get(n, 0.0)

    @property
    def a3(self) -> float:
        return self.coeff(3)

    @property
    def a4(self) -> float:
        return self.coeff(4)

    @property
    def max_order(self) -> int:
        nonzero = [n for n, v in self.a.items() if v != 0.0]
        return max(nonzero) if nonzero else 2

    def __hash__(self):
        return hash((tuple(self.a.items()), self.epsilon))


def validate(params: BarrierParams, allow_strong_asymmetry: bool = False) -> list[str]:
    """Return the list of violated parameter invariants (empty if valid)."""
    out = []
    eps = params.epsilon
    if not (0.0 < eps < 1.0):
        out.append("epsilon: must lie in (0, 1)")
    if not params.a4 > 0.0:
        out.append("a4-positive: quartic coefficient a4 must be > 0")
    if params.a3 < 0.0:
        out.append("a3-nonnegative: cubic coefficient a3 must be >= 0")
    if not allow_strong_asymmetry and params.a3 ** 3 > eps:
        out.append(f"weak-asymmetry: a3^3 = {params.a3 ** 3:.6g} exceeds epsilon = {eps:.6g}")
    for n, v in params.a.items():
        if abs(v) > 1.0:
            out.append(f"coefficient-bound: |a{n}| = {abs(v):.6g} exceeds 1")
    return out


def scaled_potential(params: BarrierParams, q):
    """Scaled barrier potential ``-q^2/4 + (1/2) sum_n (a_n/n) eps^(n-2) q^n``."""
    q = np.asarray(q, dtype=float)
    v = -0.25 * q * q
    for n, an in params.a.items():
        if an != 0.0:
            v = v + 0.5 * (an / n) * params.epsilon ** (n - 2) * q ** n
    return v[()] if v.ndim == 0 else v


def scaled_force(params: BarrierParams, q):
    """First derivative of :func:`scaled_potential`."""
    q = np.asarray(q, dtype=float)
    d = -0.5 * q
    for n, an in params.a.items():
        if an != 0.0:
            d = d + 0.5 * an * params.epsilon ** (n - 2) * q ** (n - 1)
    return d[()] if d.ndim == 0 else d


def theta_from_lambda1(lambda1: float) -> float:
    """Inverse temperature for a given lowest fluctuation eigenvalue."""
    if not lambda1 > -1.0:
        raise DomainError(f"lambda1 must exceed -1, got {lambda1}")
    return float(np.pi / np.sqrt(1.0 + lambda1))


def lambda1_from_theta(theta: float) -> float:
    """Lowest fluctuation eigenvalue ``(pi/theta)^2 - 1``."""
    if not theta > 0.0:
        raise DomainError(f"theta must be positive, got {theta}")
    return float((np.pi / theta) ** 2 - 1.0)


@dataclass(frozen=True)
class ThermoPoint:
    """Inverse temperature together with the equivalent eigenvalue."""

    theta: float
    lambda1: float

    @classmethod
    def from_theta(cls, theta: float) -> "ThermoPoint":
        return cls(float(theta), lambda1_from_theta(theta))

    @classmethod
    def from_lambda1(cls, lambda1: float) -> "ThermoPoint":
        return cls(theta_from_lambda1(lambda1), float(lambda1))


@dataclass(frozen=True)
class Endpoints:
    """Path endpoints stored both as ``(q, q')`` and as ``(r, z)``.

    Use :meth:`from_qq` or :meth:`from_rz`; the direct constructor checks
    that the two representations agree.
    """

    q: float
    qprime: float
    r: float
    z: float

    def __post_init__(self):
        tol = 1e-12 * max(1.0, abs(self.q), abs(self.qprime))
        if abs(self.r - 0.5 * (self.q + self.qprime)) > tol or abs(self.z - (self.q - self.qprime)) > tol:
            raise ValueError("inconsistent endpoint representations")

    @classmethod
    def from_qq(cls, q: float, qprime: float) -> "Endpoints":
        q, qprime = float(q), float(qprime)
        return cls(q, qprime, 0.5 * (q + qprime), q - qprime)

    @classmethod
    def from_rz(cls, r: float, z: float) -> "Endpoints":
        r, z = float(r), float(z)
        return cls(r + 0.5 * z, r - 0.5 * z, r, z)
