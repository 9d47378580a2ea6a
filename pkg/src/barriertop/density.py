"""Semiclassical density matrix near the barrier top.

Each evaluation is attributed to exactly one regime formula; there is no
blending across regime seams. All values use the ``Z = 1`` convention.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from .classical import BranchSet, CubicSolution, Stability, classical_action, harmonic_action, solve_cubic
from .fluctuations import critical_prefactor, fluctuation_spec, harmonic_prefactor, lambda1_coeff, marginal_integral
from .model import BarrierParams, DomainError, lambda1_from_theta

PI = np.pi
DEFAULT_KAPPA = 10.0


class Regime(str, enum.Enum):
    HIGH_TEMPERATURE = "high_temperature"
    GAUSSIAN_SINGLE = "gaussian_single"
    CRITICAL = "critical"
    TWO_BRANCH = "two_branch"
    DOMINANT_BRANCH = "dominant_branch"


@dataclass(frozen=True)
class SemiclassicalDensity:
    """Density matrix element together with the parts it was built from.

    Attributes
    ----------
    value : float
        ``rho_theta(z, r)`` with ``Z = 1``.
    regime : Regime
    prefactor : float
        Temperature prefactor common to all branches.
    actions : tuple of (Q, S_cl)
        Branches that contribute, with their classical actions.
    K_value : float or None
        Soft-mode integral, critical regime only.
    curvatures : tuple of float
        Soft-mode curvature ``Lambda_1`` of each contributing branch
        (Gaussian regimes only).
    """

    value: float
    regime: Regime
    prefactor: float
    actions: tuple
    K_value: float | None = None
    curvatures: tuple = ()
    log_K: float | None = field(default=None, repr=False)

    def recompute(self) -> float:
        """Re-evaluate the regime formula from the stored parts."""
        if self.regime is Regime.HIGH_TEMPERATURE:
            return self.prefactor * np.exp(-self.actions[0][1])
        if self.regime is Regime.CRITICAL:
            return self.prefactor * np.exp(self.log_K - self.actions[0][1])
        logs = [-0.5 * np.log(L) - S for (_, S), L in zip(self.actions, self.curvatures)]
        return self.prefactor * np.exp(np.logaddexp.reduce(logs))


def branch_curvature(params: BarrierParams, theta: float, branch: CubicSolution) -> float:
    """Soft-mode curvature of a branch; exactly zero on a degenerate root."""
    if branch.stability is Stability.MARGINAL:
        return 0.0
    return lambda1_coeff(params, lambda1_from_theta(theta), branch.Q)


def rho_high_t(theta: float, z: float, r: float) -> SemiclassicalDensity:
    """Inverted-oscillator density matrix, valid well above the crossover."""
    pref = harmonic_prefactor(theta)
    S = harmonic_action(theta, z, r)
    return SemiclassicalDensity(float(pref * np.exp(-S)), Regime.HIGH_TEMPERATURE, pref, ((None, S),))


def rho_critical(params: BarrierParams, theta: float, z: float, r: float, branch: CubicSolution) -> SemiclassicalDensity:
    """Density matrix with the soft mode integrated non-perturbatively.

    Finite through the caustics where the Gaussian formulas diverge.
    """
    pref = critical_prefactor(theta)
    L = branch_curvature(params, theta, branch)
    K = marginal_integral(fluctuation_spec(params, theta, branch.Q, Lambda1=L))
    S = classical_action(params, theta, z, r, branch.Q)
    value = float(pref * np.exp(K.log_value - S))
    return SemiclassicalDensity(value, Regime.CRITICAL, pref, ((branch.Q, S),), K.value, (L,), K.log_value)


def _gaussian(params, theta, z, r, branches, regime):
    pref = critical_prefactor(theta)
    acts, curv, logs = [], [], []
    for br in branches:
        L = branch_curvature(params, theta, br)
        if not L > 0.0:
            raise DomainError(f"Gaussian formula needs Lambda_1 > 0, got {L:.3g} at Q = {br.Q:.6g}")
        S = classical_action(params, theta, z, r, br.Q)
        acts.append((br.Q, S))
        curv.append(L)
        logs.append(-0.5 * np.log(L) - S)
    value = float(pref * np.exp(np.logaddexp.reduce(logs)))
    return SemiclassicalDensity(value, regime, pref, tuple(acts), None, tuple(curv))


def rho_gaussian(params: BarrierParams, theta: float, z: float, r: float, branch: CubicSolution) -> SemiclassicalDensity:
    """Single-path density matrix with Gaussian soft-mode fluctuations."""
    return _gaussian(params, theta, z, r, [branch], Regime.GAUSSIAN_SINGLE)


def rho_two_branch(params: BarrierParams, theta: float, z: float, r: float,
                   qs1: CubicSolution, qs2: CubicSolution) -> SemiclassicalDensity:
    """Sum of the Gaussian contributions of two stable paths."""
    for br in (qs1, qs2):
        if br.stability is not Stability.STABLE:
            raise DomainError("two-branch formula needs two stable paths")
    return _gaussian(params, theta, z, r, [qs1, qs2], Regime.TWO_BRANCH)


def rho_dominant(params: BarrierParams, theta: float, z: float, r: float, branches: BranchSet) -> SemiclassicalDensity:
    """Gaussian contribution of the stable path with the smaller action."""
    stable = branches.stable()
    if len(stable) != 2:
        raise DomainError("dominant-branch formula needs two stable paths")
    acts = [classical_action(params, theta, z, r, b.Q) for b in stable]
    if abs(acts[0] - acts[1]) < 1.0:
        raise DomainError("dominant-branch formula needs an action gap of at least 1")
    best = stable[int(np.argmin(acts))]
    return _gaussian(params, theta, z, r, [best], Regime.DOMINANT_BRANCH)


@dataclass(frozen=True)
class RegimeChoice:
    """Outcome of :func:`select_regime` with the data used to decide it."""

    regime: Regime
    branches: BranchSet
    curvatures: tuple
    actions: tuple

    def stable_branches(self) -> list:
        return self.branches.stable()

    def lowest_action_branch(self) -> CubicSolution:
        """Stable (else any) branch with the smallest classical action."""
        cands = [i for i, s in enumerate(self.branches.solutions) if s.stability is Stability.STABLE]
        if not cands:
            cands = list(range(len(self.branches)))
        i = min(cands, key=lambda j: self.actions[j])
        return self.branches.solutions[i]


def select_regime(params: BarrierParams, theta: float, z: float, r: float, kappa: float = DEFAULT_KAPPA) -> RegimeChoice:
    """Choose the density-matrix formula valid at ``(theta, z, r)``.

    A curvature ``|Lambda_1| <= kappa * eps`` on any path selects the
    critical formula; ties at thresholds resolve toward it.
    """
    if not kappa > 0.0:
        raise ValueError("kappa must be positive")
    if not 0.0 < theta < 2.0 * PI:
        raise DomainError("supported window is 0 < theta < 2 pi")
    bs = solve_cubic(params, theta, r)
    curv = tuple(branch_curvature(params, theta, s) for s in bs.solutions)
    acts = tuple(classical_action(params, theta, z, r, s.Q) for s in bs.solutions)
    thr = kappa * params.epsilon
    if len(bs) == 1 and theta < 0.5 * PI and curv[0] > thr:
        regime = Regime.HIGH_TEMPERATURE
    elif any(abs(L) <= thr for L in curv):
        regime = Regime.CRITICAL
    elif len(bs) == 1:
        regime = Regime.GAUSSIAN_SINGLE
    else:
        idx = [i for i, s in enumerate(bs.solutions) if s.stability is Stability.STABLE]
        gap = abs(acts[idx[0]] - acts[idx[1]])
        regime = Regime.TWO_BRANCH if gap < 1.0 else Regime.DOMINANT_BRANCH
    return RegimeChoice(regime, bs, curv, acts)


def density(params: BarrierParams, theta: float, z: float, r: float, kappa: float = DEFAULT_KAPPA) -> SemiclassicalDensity:
    """Semiclassical ``rho_theta(z, r)`` from the formula valid at that point."""
    choice = select_regime(params, theta, z, r, kappa)
    reg = choice.regime
    if reg is Regime.HIGH_TEMPERATURE:
        return rho_high_t(theta, z, r)
    if reg is Regime.CRITICAL:
        return rho_critical(params, theta, z, r, choice.lowest_action_branch())
    if reg is Regime.GAUSSIAN_SINGLE:
        return rho_gaussian(params, theta, z, r, choice.branches.solutions[0])
    if reg is Regime.TWO_BRANCH:
        s1, s2 = choice.stable_branches()
        return rho_two_branch(params, theta, z, r, s1, s2)
    return rho_dominant(params, theta, z, r, choice.branches)


def position_distribution(params: BarrierParams, theta: float, q: float, kappa: float = DEFAULT_KAPPA) -> float:
    """Diagonal element ``P(q) = rho_theta(z=0, r=q)``."""
    return density(params, theta, 0.0, q, kappa).value


def continuation_branch(branches: BranchSet) -> CubicSolution:
    """Path that continues the single high-temperature path.

    At ``r = 0`` this is the root nearest zero. Otherwise it is the stable
    root with the sign of ``r`` nearest zero, falling back to the stable
    root nearest zero.
    """
    sols = list(branches.solutions)
    r = branches.r
    if r == 0.0:
        return min(sols, key=lambda s: abs(s.Q))
    stable = [s for s in sols if s.stability is not Stability.UNSTABLE]
    same = [s for s in stable if s.Q * r >= 0.0]
    pool = same or stable or sols
    return min(pool, key=lambda s: abs(s.Q))


def normalize_on_window(q, P, window: tuple[float, float]) -> np.ndarray:
    """Divide ``P`` by its trapezoidal integral over ``window``.

    For oracle comparisons only; the density itself always uses ``Z = 1``.
    """
    q = np.asarray(q, dtype=float)
    P = np.asarray(P, dtype=float)
    m = (q >= window[0]) & (q <= window[1])
    if m.sum() < 2:
        raise ValueError("window must contain at least two points")
    return P / trapezoid(P[m], q[m])


__all__ = [
    "Regime", "SemiclassicalDensity", "branch_curvature", "rho_high_t", "rho_critical", "rho_gaussian",
    "rho_two_branch", "rho_dominant", "RegimeChoice", "select_regime", "density", "position_distribution",
    "continuation_branch", "normalize_on_window",
]
