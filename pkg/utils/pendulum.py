"""
Pendulum Module
Covectors of the initial cylinder, pendulum dynamics, strata and the
elliptic coordinates (phi, k)
"""

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from config import Config
from utils.elliptic import Modulus, amplitude, complete_K, jacobi
from utils.errors import DomainError, StratumError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
FLOW_TOL = 1e-13


def normalize_angle(angle: float) -> float:
    """Reduce an angle to [0, 2*pi)"""
    reduced = float(np.mod(angle, TWO_PI))
    return 0.0 if reduced == TWO_PI else reduced


def wrap_angle(angle: float) -> float:
    """Reduce an angle to (-pi, pi]"""
    wrapped = float(np.pi - np.mod(np.pi - angle, TWO_PI))
    return wrapped


class Stratum(str, Enum):
    """The seven strata of the initial cylinder"""

    C1 = "C1"  # inflectional elasticae
    C2 = "C2"  # non-inflectional elasticae
    C3 = "C3"  # critical elasticae
    C4 = "C4"  # stable equilibrium, straight lines
    C5 = "C5"  # unstable equilibrium, straight lines
    C6 = "C6"  # circles
    C7 = "C7"  # free straight lines

    @property
    def has_finite_cut_time(self) -> bool:
        return self in (Stratum.C1, Stratum.C2, Stratum.C6)


@dataclass(frozen=True)
class Covector:
    """
    Point (theta, c, alpha, beta) of the initial cylinder

    theta and beta are stored reduced to [0, 2*pi); alpha must be >= 0.
    """

    theta: float
    c: float
    alpha: float
    beta: float = 0.0

    def __post_init__(self):
        values = (self.theta, self.c, self.alpha, self.beta)
        if not all(np.isfinite(value) for value in values):
            raise DomainError(f"covector components must be finite, got {values}")
        if self.alpha < 0.0:
            raise DomainError(f"alpha must be non-negative, got {self.alpha}")
        object.__setattr__(self, "theta", normalize_angle(self.theta))
        object.__setattr__(self, "beta", normalize_angle(self.beta))
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "alpha", float(self.alpha))

    @classmethod
    def from_signed(cls, theta: float, c: float, alpha: float, beta: float) -> "Covector":
        """
        Build a covector allowing alpha < 0

        (theta, c, -a, beta) and (theta, c, a, beta + pi) generate the same
        pendulum, so negative alpha is folded onto the cylinder.
        """
        if alpha < 0.0:
            return cls(theta, c, -alpha, beta + np.pi)
        return cls(theta, c, alpha, beta)

    def as_array(self) -> np.ndarray:
        return np.array([self.theta, self.c, self.alpha, self.beta])

    def with_state(self, theta: float, c: float) -> "Covector":
        return replace(self, theta=theta, c=c)


@dataclass(frozen=True)
class EllipticCoords:
    """Elliptic coordinates (phi, k, alpha, beta) on C1, C2, C3"""

    phi: float
    k: Modulus
    alpha: float
    beta: float


def energy(covector: Covector) -> float:
    """
    Pendulum energy E = c^2/2 - alpha*cos(theta - beta)

    Args:
        covector: Point of the cylinder

    Returns:
        float: Energy, a first integral of the pendulum flow
    """
    return 0.5 * covector.c ** 2 - covector.alpha * np.cos(covector.theta - covector.beta)


def classify(covector: Covector, tol: Optional[float] = None) -> Stratum:
    """
    Stratum of a covector

    With tol = 0 the stratum equalities are tested exactly. A positive tol
    widens the measure-zero strata into bands: alpha <= tol, |c| <= tol and
    |E -/+ alpha| <= tol * max(1, alpha).

    Args:
        covector: Point of the cylinder
        tol: Band width (defaults to Config.STRATUM_TOL)

    Returns:
        Stratum: The unique stratum containing the covector
    """
    tol = Config.STRATUM_TOL if tol is None else tol
    if tol < 0.0:
        raise DomainError(f"stratum tolerance must be non-negative, got {tol}")

    alpha, c = covector.alpha, covector.c
    if alpha <= tol:
        return Stratum.C7 if abs(c) <= tol else Stratum.C6

    e = energy(covector)
    band = tol * max(1.0, alpha)
    if abs(e - alpha) <= band:
        return Stratum.C5 if abs(c) <= tol else Stratum.C3
    if e + alpha <= band:
        return Stratum.C4
    return Stratum.C1 if e < alpha else Stratum.C2


def modulus(covector: Covector, stratum: Optional[Stratum] = None) -> Modulus:
    """
    Elliptic modulus k of a covector in C1, C2 or C3

    Raises:
        StratumError: For covectors in C4-C7
    """
    stratum = stratum or classify(covector)
    e, alpha = energy(covector), covector.alpha

    if stratum == Stratum.C1:
        ratio = (e + alpha) / (2.0 * alpha)
    elif stratum == Stratum.C2:
        ratio = 2.0 * alpha / (e + alpha)
    elif stratum == Stratum.C3:
        return Modulus(1.0)
    else:
        raise StratumError(f"modulus is undefined on {stratum.value}")

    return Modulus(float(np.sqrt(min(max(ratio, 0.0), 1.0))))


def _rhs(alpha: float, beta: float):
    def rhs(t, y):
        return [y[1], -alpha * np.sin(y[0] - beta)]
    return rhs


def pendulum_flow(covector: Covector, t: float, tol: float = FLOW_TOL) -> Covector:
    """
    Flow the pendulum theta' = c, c' = -alpha*sin(theta - beta) for time t

    Args:
        covector: Initial point
        t: Flow time (any sign)
        tol: Relative and absolute integrator tolerance

    Returns:
        Covector: (theta_t, c_t, alpha, beta)
    """
    if t == 0.0:
        return covector

    sol = solve_ivp(
        _rhs(covector.alpha, covector.beta),
        (0.0, t),
        [covector.theta, covector.c],
        method="DOP853",
        rtol=tol,
        atol=tol,
    )
    theta_t, c_t = sol.y[:, -1]
    return covector.with_state(theta_t, c_t)


def period(covector: Covector, stratum: Optional[Stratum] = None) -> float:
    """
    Period of the pendulum motion in time

    C1: 4K/sqrt(alpha) (one oscillation); C2: 2kK/sqrt(alpha) (theta
    advances by 2*pi); C6: 2*pi/|c|; infinite elsewhere.
    """
    stratum = stratum or classify(covector)
    if stratum == Stratum.C1:
        k = modulus(covector, stratum)
        return 4.0 * complete_K(k) / np.sqrt(covector.alpha)
    if stratum == Stratum.C2:
        k = modulus(covector, stratum)
        return 2.0 * k.k * complete_K(k) / np.sqrt(covector.alpha)
    if stratum == Stratum.C6:
        return TWO_PI / abs(covector.c)
    return float("inf")


def normalization(covector: Covector, stratum: Optional[Stratum] = None) -> float:
    """
    Dilation factor mu that gives the elastica a unit-length period

    Raises:
        StratumError: Outside C1, C2, C6
    """
    stratum = stratum or classify(covector)
    if not stratum.has_finite_cut_time:
        raise StratumError(f"no normalization on {stratum.value}")
    return 1.0 / period(covector, stratum)


def phase(covector: Covector) -> EllipticCoords:
    """
    Elliptic coordinates of a covector in C1 or C2

    phi is the least flow time from the reference point to the covector.
    The reference point has theta - beta = 0 (mod 2*pi); on C1 it also has
    c > 0, on C2 the sign of c is that of the covector. phi is found by
    flowing backward and detecting the first passage.

    Raises:
        StratumError: Outside C1 and C2
    """
    stratum = classify(covector)
    if stratum not in (Stratum.C1, Stratum.C2):
        raise StratumError(f"phase is defined on C1 and C2, got {stratum.value}")

    k = modulus(covector, stratum)
    full_period = period(covector, stratum)
    beta = covector.beta

    def passage(t, y):
        return np.sin(0.5 * (y[0] - beta))

    at_reference = abs(passage(0.0, [covector.theta])) < 1e-15
    if at_reference and (stratum == Stratum.C2 or covector.c > 0.0):
        return EllipticCoords(0.0, k, covector.alpha, beta)

    sol = solve_ivp(
        _rhs(covector.alpha, beta),
        (0.0, -1.05 * full_period),
        [covector.theta, covector.c],
        method="DOP853",
        rtol=FLOW_TOL,
        atol=FLOW_TOL,
        events=passage,
    )
    candidates = [
        -t_event
        for t_event, y_event in zip(sol.t_events[0], sol.y_events[0])
        if stratum == Stratum.C2 or y_event[1] > 0.0
    ]
    if not candidates:
        raise DomainError(f"no reference passage found within one period for {covector}")

    phi = float(np.mod(min(candidates), full_period))
    logger.debug("phase of %s: phi=%.12g (period %.12g)", covector, phi, full_period)
    return EllipticCoords(phi, k, covector.alpha, beta)


def from_elliptic(coords: EllipticCoords, stratum: Stratum, sign: int = 1) -> Covector:
    """
    Covector with the given elliptic coordinates

    C1: sin((theta - beta)/2) = k*sn(sqrt(alpha)*phi), c = 2k*sqrt(alpha)*cn(...)
    C2: theta - beta = 2*sign*am(sqrt(alpha)*phi/k), c = sign*(2*sqrt(alpha)/k)*dn(...)

    Args:
        coords: (phi, k, alpha, beta)
        stratum: C1 or C2
        sign: Direction of rotation on C2 (ignored on C1)

    Raises:
        StratumError: For any other stratum
    """
    k = coords.k.k
    root_alpha = np.sqrt(coords.alpha)

    if stratum == Stratum.C1:
        values = jacobi(root_alpha * coords.phi, k)
        theta = coords.beta + 2.0 * np.arcsin(k * values.sn)
        c = 2.0 * k * root_alpha * values.cn
    elif stratum == Stratum.C2:
        u = root_alpha * coords.phi / k
        sign = 1 if sign >= 0 else -1
        theta = coords.beta + 2.0 * sign * amplitude(u, k)
        c = sign * 2.0 * root_alpha / k * jacobi(u, k).dn
    else:
        raise StratumError(f"elliptic coordinates cover C1 and C2, got {stratum.value}")

    return Covector(theta, c, coords.alpha, coords.beta)


def sample_covector(
    rng: np.random.Generator, stratum: Stratum, k: Optional[float] = None
) -> Covector:
    """
    Random covector of C1, C2 or C6

    k is drawn from (0.05, 0.95) unless given, alpha log-uniformly from
    [1/4, 4], beta and the phase uniformly; C6 draws |c| from [1/2, 4].
    """
    if stratum == Stratum.C6:
        c = rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 4.0)
        return Covector(rng.uniform(0.0, TWO_PI), c, 0.0, rng.uniform(0.0, TWO_PI))
    if stratum not in (Stratum.C1, Stratum.C2):
        raise StratumError(f"sampling covers C1, C2 and C6, got {stratum.value}")

    k = rng.uniform(0.05, 0.95) if k is None else k
    alpha = float(np.exp(rng.uniform(np.log(0.25), np.log(4.0))))
    beta = rng.uniform(0.0, TWO_PI)
    sign = int(rng.choice([-1, 1]))

    quarter = complete_K(k)
    orbit_period = 4.0 * quarter if stratum == Stratum.C1 else 2.0 * k * quarter
    phi = rng.uniform(0.0, orbit_period / np.sqrt(alpha))
    return from_elliptic(EllipticCoords(phi, Modulus(k), alpha, beta), stratum, sign)
