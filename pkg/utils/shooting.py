"""
Shooting Module
Solves Exp(lambda, t) = q for targets with zV != 0 and returns the unique
minimizer and the sub-Riemannian distance
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import least_squares

from config import CLI_TEXT, Config
from utils.elliptic import Modulus, complete_K
from utils.errors import CartanError, ConvergenceError, DomainError
from utils.expmap import GroupPoint, dilate_cov, exp_batch, rotate_cov
from utils.maxwell import cut_time, normalized_cut_time, resolve_workers
from utils.pendulum import Covector, EllipticCoords, Stratum, classify, from_elliptic

logger = logging.getLogger(__name__)

SEED_TOL = 1e-10

RESULT_COLUMNS = [
    "x", "y", "z", "v", "w", "status", "stratum", "theta", "c", "alpha", "beta", "t",
    "distance", "residual", "homogeneous_residual", "iterations", "starts_tried", "flags", "message",
]


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and budgets of one shooting run"""

    tol: float = Config.SHOOT_TOL
    max_starts: int = Config.MAX_STARTS
    max_iter: int = Config.MAX_ITER
    integrator_tol: float = Config.SHOOT_INTEGRATOR_TOL
    fd_step: float = Config.FD_STEP
    ill_conditioned_zv: float = Config.ILL_CONDITIONED_ZV


@dataclass
class ShootResult:
    """Minimizer (lambda, t) reaching a target"""

    covector: Covector
    t: float
    residual: float
    homogeneous_residual: float
    iterations: int
    starts_tried: int
    stratum: Stratum
    flags: List[str] = field(default_factory=list)

    @property
    def distance(self) -> float:
        return self.t

    def to_dict(self) -> dict:
        return {
            "theta": self.covector.theta,
            "c": self.covector.c,
            "alpha": self.covector.alpha,
            "beta": self.covector.beta,
            "t": self.t,
            "distance": self.distance,
            "residual": self.residual,
            "homogeneous_residual": self.homogeneous_residual,
            "iterations": self.iterations,
            "starts_tried": self.starts_tried,
            "stratum": self.stratum.value,
            "flags": list(self.flags),
        }


def homogeneous_norm(delta) -> float:
    """max(|dx|, |dy|, |dz|^(1/2), |dv|^(1/3), |dw|^(1/3))"""
    dx, dy, dz, dv, dw = np.abs(np.asarray(delta, dtype=float))
    return float(max(dx, dy, np.sqrt(dz), np.cbrt(dv), np.cbrt(dw)))


def _canonical_arrays(points: np.ndarray):
    """
    Rotation angle, dilation factor and canonical (z, v, w) of many points

    Rows of points are (x, y, z, v, w) with (x, y) != (0, 0).
    """
    x, y, z, v, w = np.asarray(points, dtype=float).T
    eta = np.arctan2(-x, y)
    mu = 1.0 / np.hypot(x, y)
    cos_eta, sin_eta = np.cos(eta), np.sin(eta)
    v_rot = v * cos_eta + w * sin_eta
    w_rot = w * cos_eta - v * sin_eta
    return eta, mu, np.column_stack((mu ** 2 * z, mu ** 3 * v_rot, mu ** 3 * w_rot))


def _canonical_v(invariants: np.ndarray) -> np.ndarray:
    # V at x = 0, y = 1
    return invariants[..., 2] - 0.5 * invariants[..., 0]


def canonicalize(q: GroupPoint) -> Tuple[GroupPoint, float, float]:
    """
    Canonical representative of the orbit of q under rotations and dilations

    Args:
        q: Target with zV != 0

    Returns:
        (q', eta, mu): q' = dilate(mu, rotate(eta, q)) has x = 0 and y = 1

    Raises:
        DomainError: If zV = 0
    """
    if not q.is_finite():
        raise DomainError(f"target must be finite, got {q}")
    if q.zV == 0.0:
        raise DomainError(CLI_TEXT["error_not_in_domain"].format(zv=q.zV))

    eta, mu, invariants = _canonical_arrays(q.as_array()[None, :])
    z, v, w = invariants[0]
    return GroupPoint(0.0, 1.0, float(z), float(v), float(w)), float(eta[0]), float(mu[0])


@dataclass(frozen=True)
class SeedTable:
    """Forward-mapped normalized geodesics in canonical form"""

    params: np.ndarray      # (n, 5) canonical theta, c, alpha, beta, t
    invariants: np.ndarray  # (n, 3) canonical z, v, w

    def __len__(self) -> int:
        return len(self.params)


def _seed_rows() -> List[Tuple[float, float, float, float, float]]:
    times = [(j + 1) / (Config.SEED_TIMES + 1) for j in range(Config.SEED_TIMES)]
    phases = [i / Config.SEED_PHASES for i in range(Config.SEED_PHASES)]
    rows = []

    # Every chart is normalized to period 1, so the cut time is the normalized one
    for k in Config.SEED_MODULI:
        modulus = Modulus(k)
        quarter = complete_K(modulus)
        charts = [
            (Stratum.C1, 16.0 * quarter ** 2, 1),
            (Stratum.C2, 4.0 * (k * quarter) ** 2, 1),
            (Stratum.C2, 4.0 * (k * quarter) ** 2, -1),
        ]
        for stratum, alpha, sign in charts:
            t_cut = normalized_cut_time(k, stratum)
            for phi in phases:
                covector = from_elliptic(EllipticCoords(phi, modulus, alpha, 0.0), stratum, sign)
                rows.extend((covector.theta, covector.c, alpha, 0.0, u * t_cut) for u in times)

    return rows


@lru_cache(maxsize=1)
def seed_table() -> SeedTable:
    """
    Seed table, built once per process

    Each seed (lambda, t) is mapped forward, and both the end point and the
    covector are moved to the canonical scale of that end point.
    """
    params = np.array(_seed_rows())
    ends = exp_batch(params, tol=SEED_TOL)
    eta, mu, invariants = _canonical_arrays(ends)

    canonical = params.copy()
    canonical[:, 0] -= eta
    canonical[:, 3] -= eta
    canonical[:, 1] /= mu
    canonical[:, 2] /= mu ** 2
    canonical[:, 4] *= mu

    keep = np.all(np.isfinite(invariants), axis=1) & (
        np.abs(invariants[:, 0] * _canonical_v(invariants)) > Config.ZERO_ZV
    )
    logger.info("seed table: %d of %d seeds kept", int(keep.sum()), len(params))
    return SeedTable(params=canonical[keep], invariants=invariants[keep])


def _starts(target: GroupPoint, table: SeedTable, count: int) -> np.ndarray:
    """Indices of the seeds nearest to the target within its (sign z, sign V) component"""
    wanted = np.array([target.z, target.v, target.w])
    same_component = (np.sign(table.invariants[:, 0]) == np.sign(target.z)) & (
        np.sign(_canonical_v(table.invariants)) == np.sign(target.V)
    )
    candidates = np.flatnonzero(same_component)
    if not candidates.size:
        candidates = np.arange(len(table))

    distances = np.linalg.norm(table.invariants[candidates] - wanted, axis=1)
    return candidates[np.argsort(distances, kind="stable")][:count]


def _restore(covector: Covector, t: float, eta: float, mu: float) -> Tuple[Covector, float]:
    # Undo canonicalize: dilate by 1/mu, then rotate by -eta
    covector, t = dilate_cov(1.0 / mu, covector, t)
    return rotate_cov(-eta, covector), t


def solve(q: GroupPoint, cfg: Optional[SolverConfig] = None) -> ShootResult:
    """
    Unique minimizer from the identity to q

    The target is canonicalized, then Levenberg-Marquardt runs on the five
    unknowns (theta, c, alpha, beta, t) from the nearest seeds. The first
    root with t not beyond the cut time of its covector is the minimizer.

    Args:
        q: Target point with zV != 0
        cfg: Solver configuration

    Returns:
        ShootResult: Covector, time (= distance) and residuals

    Raises:
        DomainError: If zV = 0
        ConvergenceError: If no start reaches the tolerance
    """
    cfg = cfg or SolverConfig()
    target, eta, mu = canonicalize(q)
    if abs(target.zV) <= Config.ZERO_ZV:
        raise DomainError(CLI_TEXT["error_not_in_domain"].format(zv=target.zV))

    flags = []
    if abs(target.zV) < cfg.ill_conditioned_zv:
        flags.append(CLI_TEXT["warning_ill_conditioned"])
        logger.warning("target %s: %s (canonical zV = %.3e)", q, flags[-1], target.zV)

    goal = target.as_array()

    def residual(xi):
        return exp_batch(xi[None, :], tol=cfg.integrator_tol)[0] - goal

    def jacobian(xi):
        h = cfg.fd_step * np.maximum(1.0, np.abs(xi))
        stencil = np.vstack((xi + np.diag(h), xi - np.diag(h)))
        ends = exp_batch(stencil, tol=cfg.integrator_tol)
        return (ends[:5] - ends[5:]).T / (2.0 * h)

    table = seed_table()
    starts = _starts(target, table, cfg.max_starts)
    best = float("inf")

    # max_nfev counts residual evaluations, not LM iterations
    budget = cfg.max_iter * (table.params.shape[1] + 1)

    for tried, index in enumerate(starts, start=1):
        fit = least_squares(
            residual,
            table.params[index],
            jac=jacobian,
            method="lm",
            xtol=1e-15,
            ftol=1e-15,
            gtol=1e-15,
            max_nfev=budget,
        )
        error = float(np.linalg.norm(fit.fun))
        best = min(best, error)
        theta, c, alpha, beta, t = fit.x
        logger.debug("start %d (seed %d): residual %.3e, t=%.9g, nfev=%d", tried, index, error, t, fit.nfev)

        if error > cfg.tol or t <= 0.0:
            continue

        covector = Covector.from_signed(theta, c, alpha, beta)
        bound = cut_time(covector)
        if t > bound + cfg.tol * max(1.0, bound):
            logger.debug("start %d reached the target beyond the cut time (%.9g > %.9g)", tried, t, bound)
            continue

        stratum = classify(covector)
        covector, t = _restore(covector, float(t), eta, mu)
        return ShootResult(
            covector=covector,
            t=t,
            residual=error,
            homogeneous_residual=homogeneous_norm(fit.fun),
            iterations=int(fit.nfev),
            starts_tried=tried,
            stratum=stratum,
            flags=flags,
        )

    raise ConvergenceError(
        CLI_TEXT["error_convergence"].format(starts=len(starts), residual=best), best_residual=best
    )


def distance(q: GroupPoint, cfg: Optional[SolverConfig] = None) -> float:
    """Sub-Riemannian distance d(Id, q) for q with zV != 0"""
    return solve(q, cfg).t


def _solve_row(args) -> dict:
    values, cfg = args
    row = dict(zip(["x", "y", "z", "v", "w"], values))
    try:
        result = solve(GroupPoint.from_array(values), cfg)
    except CartanError as error:
        row.update(status="error", message=f"{type(error).__name__}: {error}")
        return row

    outcome = result.to_dict()
    outcome["flags"] = "; ".join(outcome["flags"])
    row.update(outcome, status="ok", message="")
    return row


def solve_many(
    targets: pd.DataFrame, cfg: Optional[SolverConfig] = None, workers: Optional[int] = None
) -> pd.DataFrame:
    """
    Shoot every row of a target table

    Args:
        targets: DataFrame with columns x, y, z, v, w
        cfg: Solver configuration shared by all rows
        workers: Process count (1 = sequential, 0 = one per physical core)

    Returns:
        pd.DataFrame: One row per target in input order; failed rows carry
        status "error" and the error text
    """
    cfg = cfg or SolverConfig()
    jobs = [(row, cfg) for row in targets[["x", "y", "z", "v", "w"]].to_numpy(dtype=float)]
    workers = resolve_workers(workers)

    if workers == 1 or len(jobs) < 2:
        rows = [_solve_row(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_solve_row, jobs))

    failed = sum(row["status"] != "ok" for row in rows)
    logger.info("shot %d targets, %d failed", len(rows), failed)
    return pd.DataFrame(rows, columns=RESULT_COLUMNS)
