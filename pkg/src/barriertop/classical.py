"""Classical paths in the inverted barrier.

The path between the endpoints is expanded in sine modes. Near the
crossover temperature the lowest mode obeys a cubic amplitude equation,
which this module solves together with the bifurcation geometry, the
closed-form action to order one, and a full mode-space Newton solver used
for cross-validation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from .model import BarrierParams, DomainError, Endpoints, NumericalFailure, lambda1_from_theta, theta_from_lambda1

PI = np.pi
DEGENERATE_BAND = 1e-12


def mode_eigenvalue(theta: float, k):
    """Eigenvalue ``(pi k / theta)^2 - 1`` of the k-th fluctuation mode."""
    if not theta > 0.0:
        raise DomainError("theta must be positive")
    k = np.asarray(k, dtype=float)
    out = (PI * k / theta) ** 2 - 1.0
    return out[()] if out.ndim == 0 else out


def mode_source(theta: float, ep: Endpoints, k):
    """Boundary source ``(2 pi k / theta) [q - (-1)^k q']`` of mode k."""
    if not theta > 0.0:
        raise DomainError("theta must be positive")
    k = np.asarray(k)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    out = (2.0 * PI * k / theta) * (ep.q - sign * ep.qprime)
    return out[()] if out.ndim == 0 else out


# --- overlap coefficients ---------------------------------------------------

@lru_cache(maxsize=65536)
def _overlap_sorted(indices: tuple) -> float:
    # Expand prod sin(pi k_j x) into single sines/cosines of integer
    # multiples of pi x. Keys are (m, kind), kind 0 = sin, 1 = cos.
    terms = {(indices[0], 0): 1.0}
    for k in indices[1:]:
        new: dict = {}
        for (m, kind), c in terms.items():
            if kind == 0:
                # sin(m) sin(k) = [cos(m-k) - cos(m+k)]/2
                for f, s in ((m - k, 0.5), (m + k, -0.5)):
                    key = (abs(f), 1)
                    new[key] = new.get(key, 0.0) + s * c
            else:
                # cos(m) sin(k) = [sin(k+m) + sin(k-m)]/2
                for f, s in ((k + m, 0.5), (k - m, 0.5)):
                    if f == 0:
                        continue
                    key = (abs(f), 0)
                    new[key] = new.get(key, 0.0) + s * c * (1.0 if f > 0 else -1.0)
        terms = new
    total = 0.0
    for (m, kind), c in terms.items():
        if kind == 0 and m % 2 == 1:
            total += c * 2.0 / (PI * m)
        elif kind == 1 and m == 0:
            total += c
    return 2.0 * total


def overlap_coefficient(indices: Sequence[int]) -> float:
    """Overlap ``2 int_0^1 prod_j sin(pi k_j x) dx`` of sine modes.

    Evaluated exactly by expanding the product into a signed sum of single
    sines or cosines and integrating term by term.
    """
    idx = tuple(sorted(int(k) for k in indices))
    if len(idx) < 2 or idx[0] < 1:
        raise ValueError("need at least two positive mode indices")
    return _overlap_sorted(idx)


# --- critical point and bifurcation geometry -------------------------------

@dataclass(frozen=True)
class CriticalData:
    """Location of the cusp where the two extra classical paths are born."""

    lambda_c: float
    r_c: float
    Q_c: float
    lambda_0: float
    Q_0: float
    theta: float


def _policy_theta(lambda_c: float, theta_policy, lambda1: float | None) -> float:
    if theta_policy == "critical":
        return theta_from_lambda1(lambda_c)
    if theta_policy == "query":
        if lambda1 is None:
            raise ValueError("theta_policy='query' needs lambda1")
        return theta_from_lambda1(lambda1)
    return float(theta_policy)


def critical_point(params: BarrierParams, theta_policy="critical", lambda1: float | None = None) -> CriticalData:
    """Critical eigenvalue, amplitude and endpoint of the cubic equation.

    Parameters
    ----------
    params : BarrierParams
    theta_policy : {"critical", "query"} or float
        Inverse temperature at which the ``theta^2`` factor of ``r_c`` is
        evaluated: at ``theta(lambda_c)``, at ``theta(lambda1)`` of the query
        point, or at an explicit value.
    lambda1 : float, optional
        Query eigenvalue, required by the ``"query"`` policy.
    """
    a3, a4, eps = params.a3, params.a4, params.epsilon
    if a3 == 0.0:
        lam_c = 0.0
        Q_c = 0.0
    else:
        if not a4 > 0.0:
            raise DomainError("critical point requires a4 > 0")
        lam_c = (4.0 / 3.0) ** 4 * a3 * a3 / (a4 * PI ** 2)
        Q_c = -16.0 * a3 / (27.0 * PI * a4) * eps ** (-1.0 / 3.0)
    th = _policy_theta(lam_c, theta_policy, lambda1)
    r_c = 3.0 * a4 * th ** 2 / (2.0 * PI) * Q_c ** 3
    return CriticalData(lam_c, r_c, Q_c, 0.75 * lam_c, 1.5 * Q_c, th)


def bifurcation_boundaries(params: BarrierParams, lambda1: float, theta_policy="query") -> tuple[float, float]:
    """Endpoints ``(r_minus, r_plus)`` bounding the three-path region.

    The default evaluates ``r_c`` at ``theta(lambda1)``, which makes the
    curves coincide exactly with the vanishing discriminant of the cubic.
    """
    if not lambda1 > -1.0:
        raise DomainError("lambda1 must exceed -1")
    cd = critical_point(params, theta_policy, lambda1)
    if cd.lambda_c == 0.0:
        if lambda1 > 0.0:
            raise DomainError("no three-path region for lambda1 > lambda_c")
        return 0.0, 0.0
    x = lambda1 / cd.lambda_c
    if x > 1.0:
        raise DomainError("no three-path region for lambda1 > lambda_c")
    root = 2.0 * (1.0 - x) ** 1.5
    base = 3.0 * x - 2.0
    return cd.r_c * (base - root), cd.r_c * (base + root)


def line_re(params: BarrierParams, lambda1: float, theta_policy="query") -> float:
    """Endpoint ``r_e(lambda1)`` along which ``Q_c`` solves the cubic."""
    cd = critical_point(params, theta_policy, lambda1)
    if cd.lambda_c == 0.0:
        return 0.0
    return cd.r_c * (3.0 * lambda1 / cd.lambda_c - 2.0)


# --- cubic amplitude equation ----------------------------------------------

class Stability(str, enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"  # degenerate root on a bifurcation curve


@dataclass(frozen=True)
class CubicSolution:
    Q: float
    stability: Stability


@dataclass(frozen=True)
class BranchSet:
    """Real roots of the cubic at ``(theta, r)``, sorted ascending."""

    theta: float
    r: float
    solutions: tuple

    @property
    def roots(self) -> np.ndarray:
        return np.array([s.Q for s in self.solutions])

    def stable(self) -> list:
        return [s for s in self.solutions if s.stability is Stability.STABLE]

    def __len__(self):
        return len(self.solutions)


def cubic_coefficients(params: BarrierParams, theta: float, r: float) -> np.ndarray:
    """Coefficients ``[A, B, C, D]`` of ``A Q^3 + B Q^2 + C Q + D = 0``."""
    eps = params.epsilon
    lam1 = lambda1_from_theta(theta)
    return np.array([
        3.0 * params.a4,
        16.0 / (3.0 * PI) * params.a3 * eps ** (-1.0 / 3.0),
        lam1 * eps ** (-2.0 / 3.0),
        -2.0 * PI / theta ** 2 * r,
    ])


def _depressed(coef):
    A, B, C, D = coef
    b, c, d = B / A, C / A, D / A
    p = c - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * c / 3.0 + d
    return b, p, q


def cubic_discriminant(params: BarrierParams, theta: float, r: float, normalized: bool = True) -> float:
    """Discriminant of the cubic, positive inside the three-root region.

    The normalized value ``-(4p^3 + 27q^2)/(4|p|^3 + 27q^2)`` of the
    depressed cubic lies in ``[-1, 1]``.
    """
    _, p, q = _depressed(cubic_coefficients(params, theta, r))
    disc = -(4.0 * p ** 3 + 27.0 * q * q)
    if not normalized:
        return disc
    scale = 4.0 * abs(p) ** 3 + 27.0 * q * q
    return disc / scale if scale > 0.0 else 0.0


def _polish(coef, x):
    A, B, C, D = coef
    f = lambda t: ((A * t + B) * t + C) * t + D
    best, fb = x, abs(f(x))
    for _ in range(4):
        d = (3.0 * A * best + 2.0 * B) * best + C
        if d == 0.0 or fb == 0.0:
            break
        cand = best - f(best) / d
        fc = abs(f(cand))
        if fc >= fb:
            break
        best, fb = cand, fc
    return best


def _residual_ok(coef, x, tol=1e-12):
    A, B, C, D = coef
    res = ((A * x + B) * x + C) * x + D
    scale = abs(A) * abs(x) ** 3 + abs(B) * x * x + abs(C) * abs(x) + abs(D)
    return abs(res) <= tol * max(scale, np.finfo(float).tiny)


def _roots_with_zero(coef) -> tuple:
    # r = 0: Q = 0 is an exact root and the rest solve A Q^2 + B Q + C = 0
    A, B, C, _ = coef
    if C == 0.0:
        sols = [CubicSolution(0.0, Stability.MARGINAL)]
        if B != 0.0:
            sols.append(CubicSolution(-B / A, Stability.STABLE))
        return tuple(sorted(sols, key=lambda s: s.Q))
    disc = B * B - 4.0 * A * C
    if abs(disc) <= DEGENERATE_BAND * (B * B + 4.0 * abs(A * C)):
        double = -B / (2.0 * A)
        return tuple(sorted([CubicSolution(0.0, Stability.STABLE), CubicSolution(double, Stability.MARGINAL)],
                            key=lambda s: s.Q))
    if disc < 0.0:
        return (CubicSolution(0.0, Stability.STABLE),)
    s = np.sqrt(disc)
    qq = -0.5 * (B + np.copysign(s, B)) if B != 0.0 else -0.5 * s
    xs = sorted([0.0, qq / A, C / qq])
    labels = (Stability.STABLE, Stability.UNSTABLE, Stability.STABLE)
    return tuple(CubicSolution(float(x), lab) for x, lab in zip(xs, labels))


def solve_cubic(params: BarrierParams, theta: float, r: float) -> BranchSet:
    """All real roots of the cubic amplitude equation with stability labels.

    Closed-form roots (trigonometric for three real roots, Cardano
    otherwise) followed by a Newton polish. Inside a ``1e-12`` band of the
    normalized discriminant the double root is reported once and labelled
    marginal.
    """
    if not theta > 0.0:
        raise DomainError("theta must be positive")
    coef = cubic_coefficients(params, theta, r)
    A, B, C, D = coef
    if A == 0.0:
        if B != 0.0:
            raise DomainError("cubic equation needs a4 > 0 when a3 != 0")
        if C == 0.0:
            if D != 0.0:
                raise DomainError("no amplitude solves the equation at lambda1 = 0 with a4 = 0")
            return BranchSet(theta, r, (CubicSolution(0.0, Stability.MARGINAL),))
        stab = Stability.STABLE if C > 0.0 else Stability.UNSTABLE
        return BranchSet(theta, r, (CubicSolution(-D / C, stab),))

    if D == 0.0:
        return BranchSet(theta, r, _roots_with_zero(coef))

    b, p, q = _depressed(coef)
    shift = -b / 3.0
    scale = 4.0 * abs(p) ** 3 + 27.0 * q * q
    disc = -(4.0 * p ** 3 + 27.0 * q * q) / scale if scale > 0.0 else 0.0

    # relative size of the depressed coefficients decides a triple root, since
    # the normalized discriminant is pure rounding noise there
    size = max(b * b, abs(C / A), abs(D / A) ** (2.0 / 3.0))
    if scale == 0.0 or (abs(p) <= DEGENERATE_BAND * size and abs(q) <= DEGENERATE_BAND * size ** 1.5):
        return BranchSet(theta, r, (CubicSolution(shift, Stability.MARGINAL),))

    if abs(disc) <= DEGENERATE_BAND:
        t_double = -1.5 * q / p
        t_simple = 3.0 * q / p
        double = CubicSolution(t_double + shift, Stability.MARGINAL)
        simple = CubicSolution(_polish(coef, t_simple + shift), Stability.STABLE)
        sols = sorted([double, simple], key=lambda s: s.Q)
        return BranchSet(theta, r, tuple(sols))

    if disc > 0.0:
        m = 2.0 * np.sqrt(-p / 3.0)
        arg = np.clip(3.0 * q / (p * m), -1.0, 1.0)
        phi = np.arccos(arg) / 3.0
        ts = [m * np.cos(phi - 2.0 * PI * j / 3.0) for j in range(3)]
        xs = sorted(_polish(coef, t + shift) for t in ts)
        labels = (Stability.STABLE, Stability.UNSTABLE, Stability.STABLE)
    else:
        s = np.sqrt(q * q / 4.0 + p ** 3 / 27.0)
        u = np.cbrt(-0.5 * q - np.copysign(s, q)) if q != 0.0 else np.cbrt(s)
        t = u - p / (3.0 * u) if u != 0.0 else 0.0
        xs = [_polish(coef, t + shift)]
        labels = (Stability.STABLE,)
    for x in xs:
        if not _residual_ok(coef, x):
            raise NumericalFailure(f"cubic root polish did not converge at theta={theta}, r={r}")
    return BranchSet(theta, r, tuple(CubicSolution(float(x), lab) for x, lab in zip(xs, labels)))


def cubic_slope(params: BarrierParams, theta: float, Q: float) -> float:
    """Derivative of the cubic's left-hand side with respect to ``Q``."""
    A, B, C, _ = cubic_coefficients(params, theta, 0.0)
    return (3.0 * A * Q + 2.0 * B) * Q + C


# --- mode vectors -----------------------------------------------------------

@dataclass(frozen=True)
class ModeVector:
    """Fourier amplitudes ``Q_1 .. Q_kmax`` of a path at inverse temperature theta."""

    theta: float
    amplitudes: np.ndarray

    @property
    def kmax(self) -> int:
        return len(self.amplitudes)


def amplitude_to_mode(params: BarrierParams, theta: float, Q: float) -> float:
    """Convert the scaled cubic amplitude to the first Fourier amplitude."""
    return 2.0 * theta * Q * params.epsilon ** (-2.0 / 3.0)


def mode_to_amplitude(params: BarrierParams, theta: float, Q1: float) -> float:
    return params.epsilon ** (2.0 / 3.0) * Q1 / (2.0 * theta)


def higher_modes(params: BarrierParams, theta: float, ep: Endpoints, Q1: float, kmax: int) -> ModeVector:
    """Slave the modes ``k >= 2`` to a given first amplitude ``Q1``."""
    k = np.arange(1, kmax + 1)
    lam = mode_eigenvalue(theta, k)
    if np.any(np.abs(lam[1:]) < 1e-14):
        raise DomainError("a higher mode eigenvalue vanishes at this theta")
    b = mode_source(theta, ep, k)
    g = params.epsilon / theta
    d3 = np.array([overlap_coefficient((1, 1, kk)) for kk in k])
    d4 = np.array([overlap_coefficient((1, 1, 1, kk)) for kk in k])
    amps = np.empty(kmax)
    amps[0] = Q1
    if kmax > 1:
        amps[1:] = (b[1:] - params.a3 * g * d3[1:] * Q1 ** 2 - params.a4 * g * g * d4[1:] * Q1 ** 3) / lam[1:]
    return ModeVector(float(theta), amps)


# --- closed-form action to order one ---------------------------------------

def _one_over_x_minus_cot(x):
    # 1/x - cot(x), regular at x = 0
    if abs(x) < 0.1:
        x2 = x * x
        return x * (1.0 / 3.0 + x2 * (1.0 / 45.0 + x2 * (2.0 / 945.0 + x2 * (1.0 / 4725.0 + x2 * 2.0 / 93555.0))))
    return 1.0 / x - 1.0 / np.tan(x)


def action_coefficients(theta: float) -> tuple[float, float, float, float]:
    """Temperature-dependent coefficients of the order-1 action.

    Returns ``(Lam, Om, Gam, lambda3)``. The removable singularities at
    ``theta = pi`` are cancelled analytically, so the functions are smooth
    through the crossover temperature.
    """
    if not 0.0 < theta < 2.0 * PI:
        raise DomainError("action coefficients need 0 < theta < 2 pi")
    t = theta / PI
    delta = PI - theta
    g = _one_over_x_minus_cot(0.5 * delta)
    lam = (3.0 * PI - delta) / (2.0 * PI - delta) + 0.5 * theta * g
    om = theta / 8.0 / np.tan(0.5 * theta)
    four = 4.0 - t * t
    f = 16.0 / (PI * t * four ** 2)
    poly = (((((2.0 * t + 2.0) * t - 14.0) * t - 14.0) * t + 18.0) * t + 18.0) * t + 9.0
    gam = -0.75 + 1.0 / four - f * g + 32.0 / (9.0 * PI ** 2) * poly / (t * (1.0 + t) * four ** 2)
    lam3 = (3.0 * PI / theta) ** 2 - 1.0
    return float(lam), float(om), float(gam), float(lam3)


def classical_action(params: BarrierParams, theta: float, z: float, r: float, Q: float) -> float:
    """Minimal action of the path with scaled amplitude ``Q``, to order one.

    Only ``a_3`` to ``a_6`` enter; higher coefficients are ignored here.
    """
    if not 0.0 < theta < 2.0 * PI:
        raise DomainError("classical action needs 0 < theta < 2 pi")
    a3, a4, a5, a6 = (params.coeff(n) for n in (3, 4, 5, 6))
    e13 = params.epsilon ** (-1.0 / 3.0)
    e23 = e13 * e13
    lam, om, gam, lam3 = action_coefficients(theta)
    th = theta
    Q2 = Q * Q
    Q3 = Q2 * Q
    Q4 = Q2 * Q2
    s = r * r * lam / th + z * z * om / th - PI * r / th * e23 * Q
    s -= (8.0 * a3 * th / (9.0 * PI) * e13 * Q3 + 0.75 * a4 * th * Q4) * e23
    if a3 != 0.0:
        s -= 16.0 * a3 * r / (3.0 * th * (4.0 * PI ** 2 - th ** 2)) * (2.0 * th ** 2 + 3.0 * PI ** 2 * (lam - 2.0)) * e13 * Q2
        s -= 2.0 * a3 * a3 * th * gam * e23 * Q4
        s -= 16.0 * a3 * a4 * th / (15.0 * PI * lam3) * e13 * Q4 * Q
    s -= 6.0 * PI * a4 * r / (th * lam3) * Q3
    s -= a4 * a4 * th / (2.0 * lam3) * Q3 * Q3
    s += 256.0 * a5 * th / (75.0 * PI) * e13 * Q4 * Q + 5.0 * a6 * th / 3.0 * Q3 * Q3
    return float(s)


def harmonic_action(theta: float, z: float, r: float) -> float:
    """Action ``-(r^2/2) tan(theta/2) + (z^2/8) cot(theta/2)`` of the inverted oscillator."""
    if not 0.0 < theta < PI:
        raise DomainError("harmonic action needs 0 < theta < pi")
    return float(-0.5 * r * r * np.tan(0.5 * theta) + z * z / 8.0 / np.tan(0.5 * theta))


# --- full mode space --------------------------------------------------------

class ModeSpace:
    """Truncated sine-mode representation of the action and its derivatives.

    Anharmonic contractions ``sum D_{k...} Q_k ...`` are evaluated as
    ``2 int_0^1 u(x)^n dx`` with ``u = sum_k Q_k sin(pi k x)``, using a
    Gauss-Legendre rule fine enough to be exact to rounding.
    """

    def __init__(self, params: BarrierParams, theta: float, ep: Endpoints, kmax: int):
        if kmax < 1:
            raise ValueError("kmax must be >= 1")
        self.params = params
        self.theta = float(theta)
        self.ep = ep
        self.k = np.arange(1, kmax + 1)
        self.lam = mode_eigenvalue(theta, self.k)
        self.b = mode_source(theta, ep, self.k)
        self.jump = ep.q - np.where(self.k % 2 == 0, 1.0, -1.0) * ep.qprime
        self.orders = [(n, an) for n, an in params.a.items() if an != 0.0]
        if self.orders:
            nmax = max(n for n, _ in self.orders)
            x, w = leggauss(2 * nmax * kmax + 64)
            self.x = 0.5 * (x + 1.0)
            self.w = 0.5 * w
            self.basis = np.sin(PI * np.outer(self.x, self.k))

    def _g(self, n):
        return (self.params.epsilon / self.theta) ** (n - 2)

    def action(self, amps) -> float:
        Q = np.asarray(amps, dtype=float)
        val = self.ep.z ** 2 + 0.5 * np.sum(self.lam * Q * Q - 2.0 * self.b * Q + 4.0 * self.jump ** 2)
        if self.orders:
            u = self.basis @ Q
            for n, an in self.orders:
                val += an / n * self._g(n) * 2.0 * np.sum(self.w * u ** n)
        return float(val / (4.0 * self.theta))

    def gradient(self, amps) -> np.ndarray:
        """Residual of the mode equations of motion (``4 theta`` times dS/dQ)."""
        Q = np.asarray(amps, dtype=float)
        g = self.lam * Q - self.b
        if self.orders:
            u = self.basis @ Q
            for n, an in self.orders:
                g = g + an * self._g(n) * 2.0 * (self.basis.T @ (self.w * u ** (n - 1)))
        return g

    def jacobian(self, amps) -> np.ndarray:
        Q = np.asarray(amps, dtype=float)
        J = np.diag(self.lam)
        if self.orders:
            u = self.basis @ Q
            for n, an in self.orders:
                J = J + an * (n - 1) * self._g(n) * 2.0 * (self.basis.T * (self.w * u ** (n - 2))) @ self.basis
        return J

    def harmonic_tail(self) -> float:
        """Action of the harmonic modes beyond kmax, summed in closed form."""
        th = self.theta
        odd = self.k % 2 == 1
        inv = 1.0 / (PI ** 2 * self.k ** 2 - th ** 2)
        # sum over odd k of 1/(pi^2 k^2 - th^2) is tan(th/2)/(4 th)
        s_odd = np.tan(0.5 * th) / (4.0 * th) - np.sum(inv[odd])
        s_even = 0.25 * (2.0 / th ** 2 - 1.0 / (np.tan(0.5 * th) * th)) - np.sum(inv[~odd])
        return float(-0.5 * th * ((2.0 * self.ep.r) ** 2 * s_odd + self.ep.z ** 2 * s_even))


def action_functional(params: BarrierParams, theta: float, ep: Endpoints, modes: ModeVector,
                      harmonic_tail: bool = False) -> float:
    """Action of a truncated mode vector.

    Parameters
    ----------
    harmonic_tail : bool
        Add the closed-form contribution of the harmonic modes above
        ``kmax``. Without it the truncation error is ``O(1/kmax)``.
    """
    space = ModeSpace(params, theta, ep, modes.kmax)
    s = space.action(modes.amplitudes)
    if harmonic_tail:
        s += space.harmonic_tail()
    return s


def initial_modes(params: BarrierParams, theta: float, ep: Endpoints, Q: float, kmax: int) -> ModeVector:
    """Mode vector seeded from a cubic root, for :func:`solve_full_modes`."""
    return higher_modes(params, theta, ep, amplitude_to_mode(params, theta, Q), kmax)


def solve_full_modes(params: BarrierParams, theta: float, ep: Endpoints, kmax: int, init: ModeVector,
                     tol: float = 1e-10, max_iter: int = 60) -> ModeVector:
    """Newton solution of the truncated mode equations of motion."""
    space = ModeSpace(params, theta, ep, kmax)
    Q = np.zeros(kmax)
    n0 = min(kmax, init.kmax)
    Q[:n0] = init.amplitudes[:n0]
    for _ in range(max_iter):
        g = space.gradient(Q)
        if np.max(np.abs(g)) <= tol:
            return ModeVector(float(theta), Q)
        try:
            step = np.linalg.solve(space.jacobian(Q), g)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure(f"singular mode Jacobian: {exc}") from exc
        Q = Q - step
        if not np.all(np.isfinite(Q)):
            break
    raise NumericalFailure("mode Newton iteration did not converge")


__all__ = [
    "mode_eigenvalue", "mode_source", "overlap_coefficient", "CriticalData", "critical_point",
    "bifurcation_boundaries", "line_re", "Stability", "CubicSolution", "BranchSet", "cubic_coefficients",
    "cubic_discriminant", "solve_cubic", "cubic_slope", "ModeVector", "higher_modes", "amplitude_to_mode",
    "mode_to_amplitude", "action_coefficients", "classical_action", "harmonic_action", "ModeSpace",
    "action_functional", "initial_modes", "solve_full_modes",
]
