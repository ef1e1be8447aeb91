"""
Exponential Map Module
Integrates normal extremals of the Cartan group, applies dilations and
rotations, and projects everything onto the Engel group
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp

from config import Config
from utils.errors import DomainError
from utils.pendulum import Covector, normalize_angle

logger = logging.getLogger(__name__)

TRAJECTORY_COLUMNS = ["t", "x", "y", "z", "v", "w", "theta"]


@dataclass(frozen=True)
class GroupPoint:
    """Point q = (x, y, z, v, w) of the Cartan group"""

    x: float
    y: float
    z: float
    v: float
    w: float

    @classmethod
    def identity(cls) -> "GroupPoint":
        return cls(0.0, 0.0, 0.0, 0.0, 0.0)

    @classmethod
    def from_array(cls, values) -> "GroupPoint":
        x, y, z, v, w = (float(value) for value in values)
        return cls(x, y, z, v, w)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z, self.v, self.w])

    @property
    def V(self) -> float:
        """Rotation invariant V = x*v + y*w - (x^2 + y^2)*z/2"""
        return self.x * self.v + self.y * self.w - 0.5 * (self.x ** 2 + self.y ** 2) * self.z

    @property
    def zV(self) -> float:
        return self.z * self.V

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.as_array())))


@dataclass(frozen=True)
class EngelCovector:
    """Covector (theta, c, alpha) of the Engel problem, alpha >= 0"""

    theta: float
    c: float
    alpha: float

    def __post_init__(self):
        if self.alpha < 0.0:
            object.__setattr__(self, "theta", self.theta + np.pi)
            object.__setattr__(self, "alpha", -self.alpha)
        object.__setattr__(self, "theta", normalize_angle(self.theta))


@dataclass(frozen=True)
class EngelPoint:
    """Point (x, y, z, v) of the Engel group"""

    x: float
    y: float
    z: float
    v: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z, self.v])


@dataclass
class Trajectory:
    """Uniformly sampled extremal trajectory"""

    t: np.ndarray
    points: np.ndarray  # shape (samples, 5): x, y, z, v, w
    theta: np.ndarray
    covector: Covector
    tol: float

    def point(self, index: int) -> GroupPoint:
        return GroupPoint.from_array(self.points[index])

    @property
    def end(self) -> GroupPoint:
        return self.point(-1)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.points, columns=["x", "y", "z", "v", "w"])
        frame.insert(0, "t", self.t)
        frame["theta"] = self.theta
        return frame[TRAJECTORY_COLUMNS]


def _cartan_rhs(alpha, beta):
    """Hamiltonian vector field on (theta, c, x, y, z, v, w); works column-wise"""

    def rhs(t, y):
        theta, c, x, yy = y[0], y[1], y[2], y[3]
        dx, dy = np.cos(theta), np.sin(theta)
        r2 = 0.5 * (x * x + yy * yy)
        return np.array([
            c,
            -alpha * np.sin(theta - beta),
            dx,
            dy,
            0.5 * (-dx * yy + dy * x),
            dy * r2,
            -dx * r2,
        ])

    return rhs


def _check_tol(tol: float):
    if not tol > 0.0:
        raise DomainError(f"integrator tolerance must be positive, got {tol}")


def _check_time(t: float):
    if not np.isfinite(t) or t < 0.0:
        raise DomainError(f"time must be finite and non-negative, got {t}")


def exp(covector: Covector, t: float, tol: Optional[float] = None) -> GroupPoint:
    """
    Exponential map Exp(lambda, t)

    Args:
        covector: Initial covector on the cylinder
        t: Arc length, t >= 0
        tol: Local error tolerance of the integrator (default Config.TOL)

    Returns:
        GroupPoint: End point of the extremal starting at the identity
    """
    tol = Config.TOL if tol is None else tol
    _check_tol(tol)
    _check_time(t)
    if t == 0.0:
        return GroupPoint.identity()

    y0 = [covector.theta, covector.c, 0.0, 0.0, 0.0, 0.0, 0.0]
    sol = solve_ivp(
        _cartan_rhs(covector.alpha, covector.beta),
        (0.0, t),
        y0,
        method="DOP853",
        rtol=tol,
        atol=tol,
    )
    if not sol.success:
        raise DomainError(f"integration failed for {covector}, t={t}: {sol.message}")
    return GroupPoint.from_array(sol.y[2:, -1])


def trajectory(covector: Covector, t: float, samples: Optional[int] = None, tol: Optional[float] = None) -> Trajectory:
    """
    Extremal trajectory sampled on a uniform time grid

    Args:
        covector: Initial covector
        t: Final time, t > 0
        samples: Number of grid points including both ends
        tol: Integrator tolerance

    Returns:
        Trajectory: Samples (t, q, theta) with q(0) the identity
    """
    samples = Config.TRAJECTORY_SAMPLES if samples is None else samples
    tol = Config.TOL if tol is None else tol
    _check_tol(tol)
    _check_time(t)
    if t == 0.0 or samples < 2:
        raise DomainError("trajectory needs t > 0 and at least two samples")

    grid = np.linspace(0.0, t, samples)
    y0 = [covector.theta, covector.c, 0.0, 0.0, 0.0, 0.0, 0.0]
    sol = solve_ivp(
        _cartan_rhs(covector.alpha, covector.beta),
        (0.0, t),
        y0,
        method="DOP853",
        t_eval=grid,
        rtol=tol,
        atol=tol,
    )
    logger.debug("trajectory of %s: %d samples, %d rhs evaluations", covector, samples, sol.nfev)
    return Trajectory(
        t=grid,
        points=sol.y[2:].T.copy(),
        theta=sol.y[0].copy(),
        covector=covector,
        tol=tol,
    )


def exp_batch(params: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    """
    Exponential map for many (theta, c, alpha, beta, t) at once

    All columns are integrated together over sigma in [0, 1], each column's
    vector field scaled by its own final time t. alpha may be negative here;
    the vector field is the same as for (beta + pi, -alpha).

    Args:
        params: Array of shape (n, 5) with rows (theta, c, alpha, beta, t)
        tol: Integrator tolerance

    Returns:
        np.ndarray: End points, shape (n, 5) with rows (x, y, z, v, w)
    """
    tol = Config.TOL if tol is None else tol
    _check_tol(tol)
    params = np.atleast_2d(np.asarray(params, dtype=float))
    if params.shape[1] != 5 or not np.all(np.isfinite(params)):
        raise DomainError("exp_batch expects finite rows (theta, c, alpha, beta, t)")

    n = params.shape[0]
    theta0, c0, alpha, beta, t_final = params.T
    field = _cartan_rhs(alpha, beta)

    def rhs(sigma, flat):
        return (field(sigma, flat.reshape(7, n)) * t_final).ravel()

    y0 = np.zeros((7, n))
    y0[0], y0[1] = theta0, c0
    sol = solve_ivp(rhs, (0.0, 1.0), y0.ravel(), method="DOP853", rtol=tol, atol=tol)
    if not sol.success:
        raise DomainError(f"batched integration failed: {sol.message}")
    return sol.y[:, -1].reshape(7, n)[2:].T.copy()


def dilate(mu: float, q: GroupPoint) -> GroupPoint:
    """Dilation with weights (1, 1, 2, 3, 3)"""
    if not mu > 0.0:
        raise DomainError(f"dilation factor must be positive, got {mu}")
    return GroupPoint(mu * q.x, mu * q.y, mu ** 2 * q.z, mu ** 3 * q.v, mu ** 3 * q.w)


def dilate_cov(mu: float, covector: Covector, t: float) -> Tuple[Covector, float]:
    """Action of the dilation on (lambda, t): c/mu, alpha/mu^2, mu*t"""
    if not mu > 0.0:
        raise DomainError(f"dilation factor must be positive, got {mu}")
    scaled = Covector(covector.theta, covector.c / mu, covector.alpha / mu ** 2, covector.beta)
    return scaled, mu * t


def _rotate_pair(eta: float, a, b):
    cos_eta, sin_eta = np.cos(eta), np.sin(eta)
    return a * cos_eta + b * sin_eta, b * cos_eta - a * sin_eta


def rotate(eta: float, q: GroupPoint) -> GroupPoint:
    """Rotation by -eta of the (x, y) and (v, w) planes; z is fixed"""
    x, y = _rotate_pair(eta, q.x, q.y)
    v, w = _rotate_pair(eta, q.v, q.w)
    return GroupPoint(float(x), float(y), q.z, float(v), float(w))


def rotate_cov(eta: float, covector: Covector) -> Covector:
    return Covector(covector.theta - eta, covector.c, covector.alpha, covector.beta - eta)


def project_engel_covector(covector: Covector) -> EngelCovector:
    """Engel covector (theta - beta + pi/2, c, alpha)"""
    return EngelCovector(covector.theta - covector.beta + 0.5 * np.pi, covector.c, covector.alpha)


def project_engel_point(q: GroupPoint, beta: float = 0.5 * np.pi) -> EngelPoint:
    """Rotate by beta - pi/2 and drop w"""
    rotated = rotate(beta - 0.5 * np.pi, q)
    return EngelPoint(rotated.x, rotated.y, rotated.z, rotated.v)


def _engel_rhs(alpha):
    def rhs(t, y):
        theta, c, x, yy = y[0], y[1], y[2], y[3]
        dx, dy = np.cos(theta), np.sin(theta)
        return np.array([
            c,
            alpha * np.cos(theta),
            dx,
            dy,
            0.5 * (-dx * yy + dy * x),
            0.5 * dy * (x * x + yy * yy),
        ])

    return rhs


def engel_exp(covector: EngelCovector, t: float, tol: Optional[float] = None) -> EngelPoint:
    """
    Exponential map of the Engel problem

    The pendulum c' = alpha*cos(theta) has its stable equilibrium at
    theta = pi/2 when alpha > 0.
    """
    tol = Config.TOL if tol is None else tol
    _check_tol(tol)
    _check_time(t)
    if t == 0.0:
        return EngelPoint(0.0, 0.0, 0.0, 0.0)

    sol = solve_ivp(
        _engel_rhs(covector.alpha),
        (0.0, t),
        [covector.theta, covector.c, 0.0, 0.0, 0.0, 0.0],
        method="DOP853",
        rtol=tol,
        atol=tol,
    )
    x, y, z, v = sol.y[2:, -1]
    return EngelPoint(float(x), float(y), float(z), float(v))


def normalized_zv(q: GroupPoint, t: float) -> float:
    """|zV| / t^6, invariant under dilations of (q, t)"""
    if not t > 0.0:
        raise DomainError(f"normalized zV needs t > 0, got {t}")
    return abs(q.zV) / t ** 6
