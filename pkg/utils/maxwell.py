"""
Maxwell Times Module
Root equations of the first Maxwell times, the critical moduli k0 and k1,
the cut time of a covector and the Maxwell/FIX predicates
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Callable, Dict, Iterable, Optional, Tuple

import mpmath
import numpy as np
import pandas as pd
import psutil
from scipy.optimize import brentq

from config import CLI_TEXT, Config
from utils.elliptic import Modulus, complete_K, jacobi
from utils.errors import NoRootError, StratumError
from utils.expmap import exp, normalized_zv
from utils.pendulum import Covector, Stratum, classify, modulus, phase

logger = logging.getLogger(__name__)

INF = float("inf")


def _k(k) -> float:
    return k.k if isinstance(k, Modulus) else float(k)


def _quarter_period(k: float) -> float:
    return np.pi / 2.0 if k == 0.0 else complete_K(k)


def f1z(p, k):
    """sn p dn p - g1(p) cn p with g1(p) = 2E(p) - p"""
    values = jacobi(p, _k(k))
    g1 = 2.0 * values.eps - np.asarray(p, dtype=float)
    return values.sn * values.dn - g1 * values.cn


def f1v(p, k):
    """Maxwell-time function of the second reflection on inflectional elasticae"""
    k = _k(k)
    k2 = k * k
    values = jacobi(p, k)
    sn, cn, dn = values.sn, values.cn, values.dn
    p = np.asarray(p, dtype=float)
    g1 = 2.0 * values.eps - p

    bracket = (
        g1 ** 3
        - p
        - 2.0 * g1 * (1.0 - (2.0 - 6.0 * cn ** 2) * k2)
        + 8.0 * k2 * sn * cn * dn
    )
    return 4.0 / 3.0 * dn * sn * bracket + 4.0 * cn * g1 ** 2 * (1.0 - 2.0 * k2 * sn ** 2)


def f2v_trigonometric(p):
    """f2v at k = 0, where the elliptic expression vanishes identically"""
    p = np.asarray(p, dtype=float)
    value = (32.0 * p ** 2 - 1.0) * np.cos(2.0 * p) - 8.0 * p * np.sin(2.0 * p) + np.cos(6.0 * p)
    return value / 512.0


def _f2v_precise(p: float, k: float) -> float:
    """f2v in extended precision; the double expression cancels down to O(k^8)"""
    digits = Config.F2V_DIGITS + int(np.ceil(-8.0 * np.log10(k)))
    with mpmath.workdps(digits):
        m = mpmath.mpf(k) ** 2
        u = mpmath.mpf(p)
        sn = mpmath.ellipfun("sn", u, m=m)
        cn = mpmath.ellipfun("cn", u, m=m)
        dn = mpmath.ellipfun("dn", u, m=m)

        # am u = am r + n*pi with r = u - 2nK in [-K, K], where cn r >= 0
        n = int(mpmath.nint(u / (2 * mpmath.ellipk(m))))
        sign = -1 if n % 2 else 1
        eps = mpmath.ellipe(mpmath.atan2(sign * sn, sign * cn), m) + 2 * n * mpmath.ellipe(m)
        g2 = 2 * eps - (2 - m) * u

        first = dn * (8 * m * cn ** 2 * sn ** 2 + g2 ** 2 * (3 - 6 * sn ** 2))
        second = cn * sn * (g2 ** 3 - m * m * u - 2 * g2 * (4 + m * (1 - 6 * sn ** 2)))
        return float(mpmath.mpf(4) / 3 * (first + second))


def f2v(p, k):
    """Maxwell-time function of the second reflection on non-inflectional elasticae"""
    k = _k(k)
    if k == 0.0:
        return f2v_trigonometric(p)
    if k < Config.F2V_PRECISE_K:
        values = np.vectorize(_f2v_precise, otypes=[float])(p, k)
        return float(values) if np.ndim(p) == 0 else values

    k2 = k * k
    values = jacobi(p, k)
    sn, cn, dn = values.sn, values.cn, values.dn
    p = np.asarray(p, dtype=float)
    g2 = 2.0 * values.eps - (2.0 - k2) * p

    first = dn * (8.0 * k2 * cn ** 2 * sn ** 2 + g2 ** 2 * (3.0 - 6.0 * sn ** 2))
    second = cn * sn * (g2 ** 3 - k2 * k2 * p - 2.0 * g2 * (4.0 + k2 * (1.0 - 6.0 * sn ** 2)))
    return 4.0 / 3.0 * (first + second)


ROOT_FUNCTIONS: Dict[str, Callable] = {"f1z": f1z, "f1v": f1v, "f2v": f2v}


def first_root(f, k, samples: Optional[int] = None, tol: Optional[float] = None) -> float:
    """
    Smallest positive root of f(., k) in the window (0, ROOT_WINDOW * K]

    The window is sampled uniformly from ROOT_SCAN_START * K on; every f
    vanishes to high order at p = 0, so samples closer to the origin only
    pick up rounding noise. The first sign change is polished with Brent's
    method. f2v below F2V_PRECISE_K runs in extended precision and is
    scanned on the coarser F2V_PRECISE_SAMPLES grid.

    Args:
        f: One of f1z, f1v, f2v, or its name
        k: Modulus in [0, 1)
        samples: Number of bracketing samples
        tol: Relative tolerance of the polished root

    Returns:
        float: First positive root p

    Raises:
        NoRootError: If no sign change is found in the window
    """
    name = f if isinstance(f, str) else f.__name__
    func = ROOT_FUNCTIONS[name]
    k = _k(k)
    precise = name == "f2v" and 0.0 < k < Config.F2V_PRECISE_K
    samples = samples or (Config.F2V_PRECISE_SAMPLES if precise else Config.ROOT_SAMPLES)
    tol = tol or Config.ROOT_TOL
    quarter = _quarter_period(Modulus(k).k)

    grid = np.linspace(Config.ROOT_SCAN_START * quarter, Config.ROOT_WINDOW * quarter, samples)
    values = func(grid, k)

    exact = np.flatnonzero(values == 0.0)
    changes = np.flatnonzero(values[:-1] * values[1:] < 0.0)
    if exact.size and (not changes.size or exact[0] <= changes[0]):
        return float(grid[exact[0]])
    if not changes.size:
        raise NoRootError(CLI_TEXT["error_no_root"].format(name=name, window=Config.ROOT_WINDOW, k=k))

    i = changes[0]
    root = brentq(lambda p: float(func(p, k)), grid[i], grid[i + 1], xtol=1e-15, rtol=tol)
    logger.debug("first root of %s at k=%.12g: p=%.15g (p/K=%.12g)", name, k, root, root / quarter)
    return float(root)


@lru_cache(maxsize=4096)
def _cached_root(name: str, k: float) -> float:
    return first_root(name, k)


@dataclass(frozen=True)
class MaxwellTimes:
    """Normalized first Maxwell times; fields undefined on a stratum are None"""

    t1z: Optional[float] = None
    t1v: Optional[float] = None
    t2v: Optional[float] = None
    combined: float = INF

    def to_dict(self) -> dict:
        return asdict(self)


def t1z(k) -> float:
    k = _k(k)
    return _cached_root("f1z", k) / (2.0 * _quarter_period(k))


def t1v(k) -> float:
    k = _k(k)
    return _cached_root("f1v", k) / (2.0 * _quarter_period(k))


def t2v(k) -> float:
    k = _k(k)
    return _cached_root("f2v", k) / _quarter_period(k)


def normalized_times(k, stratum: Stratum) -> MaxwellTimes:
    """
    Normalized first Maxwell times for a modulus and stratum

    C1: t1z = p1z/(2K), t1v = p1v/(2K), combined = min of both
    C2: t2v = p2v/K
    C6: t2v(0) = 2 p2v(0)/pi

    Raises:
        StratumError: Outside C1, C2, C6
    """
    if stratum == Stratum.C1:
        z_time, v_time = t1z(k), t1v(k)
        return MaxwellTimes(t1z=z_time, t1v=v_time, combined=min(z_time, v_time))
    if stratum == Stratum.C2:
        v_time = t2v(k)
        return MaxwellTimes(t2v=v_time, combined=v_time)
    if stratum == Stratum.C6:
        v_time = t2v(0.0)
        return MaxwellTimes(t2v=v_time, combined=v_time)
    raise StratumError(f"Maxwell times are defined on C1, C2, C6, got {stratum.value}")


def normalized_cut_time(k, stratum: Stratum) -> float:
    """mu * t_cut: t1 on C1, t2v on C2, t2v(0) on C6, infinite elsewhere"""
    if not stratum.has_finite_cut_time:
        return INF
    return normalized_times(k, stratum).combined


def _branch_gap(k: float) -> float:
    return t1z(k) - t1v(k)


@lru_cache(maxsize=1)
def critical_moduli(grid_size: int = 96) -> Tuple[float, float]:
    """
    Moduli where the t1z and t1v branches cross

    Returns:
        (k0, k1): k0 ~ 0.909 where both times equal 1 and k1 ~ 0.802
    """
    ks = np.linspace(0.05, 0.99, grid_size)
    gaps = np.array([_branch_gap(k) for k in ks])
    crossings = []
    for i in np.flatnonzero(gaps[:-1] * gaps[1:] < 0.0):
        crossings.append(brentq(_branch_gap, ks[i], ks[i + 1], xtol=1e-12))

    if len(crossings) != 2:
        raise NoRootError(f"expected two branch crossings of t1z - t1v, found {len(crossings)}")
    k1, k0 = sorted(crossings)
    logger.info("critical moduli: k0=%.9f, k1=%.9f", k0, k1)
    return float(k0), float(k1)


def cut_time(covector: Covector) -> float:
    """
    Cut time of the extremal with initial covector lambda

    C1: 4K t1(k)/sqrt(alpha); C2: 2kK t2v(k)/sqrt(alpha); C6: 2*pi t2v(0)/|c|;
    infinite on C3, C4, C5, C7.
    """
    stratum = classify(covector)
    if stratum == Stratum.C1:
        k = modulus(covector, stratum).k
        return 4.0 * complete_K(k) * normalized_cut_time(k, stratum) / np.sqrt(covector.alpha)
    if stratum == Stratum.C2:
        k = modulus(covector, stratum).k
        return 2.0 * k * complete_K(k) * normalized_cut_time(k, stratum) / np.sqrt(covector.alpha)
    if stratum == Stratum.C6:
        return 2.0 * np.pi * t2v(0.0) / abs(covector.c)
    return INF


def in_cut_candidate_set(covector: Covector, t: float, tol: float = 1e-9) -> bool:
    """True when Exp(lambda, t) lies on zV = 0 (|zV|/t^6 <= tol)"""
    if t == 0.0:
        return True
    return normalized_zv(exp(covector, t), t) <= tol


def fix_predicate(covector: Covector, t: float, tol: float = 1e-9) -> bool:
    """
    sn(tau) cn(tau) = 0 with tau = sqrt(alpha)(phi + t/2) on C1 and
    tau = (sqrt(alpha)/k)(phi + t/2) on C2

    Raises:
        StratumError: Outside C1 and C2
    """
    coords = phase(covector)
    k = coords.k.k
    stratum = classify(covector)
    tau = np.sqrt(coords.alpha) * (coords.phi + 0.5 * t)
    if stratum == Stratum.C2:
        tau /= k
    values = jacobi(tau, k)
    return abs(values.sn * values.cn) <= tol


def t2v0_trigonometric() -> float:
    """
    t2v(0) as the root of cos(pi t)(2 pi^2 t^2 - sin^2(pi t)) = pi t sin(pi t)
    """

    def equation(t):
        s = np.pi * t
        return np.cos(s) * (2.0 * s * s - np.sin(s) ** 2) - s * np.sin(s)

    return float(brentq(equation, 1.0, 1.5, xtol=1e-15, rtol=Config.ROOT_TOL))


def _grid_row(k: float) -> dict:
    row = {"k": float(k)}
    c1 = normalized_times(k, Stratum.C1)
    row.update(t1z=c1.t1z, t1v=c1.t1v, t1=c1.combined, t2v=t2v(k))
    return row


def resolve_workers(workers: Optional[int] = None) -> int:
    """Worker count; 0 means one per physical core"""
    workers = Config.WORKERS if workers is None else workers
    if workers <= 0:
        workers = psutil.cpu_count(logical=False) or 1
    return workers


def maxwell_times_grid(ks: Iterable[float], workers: Optional[int] = None) -> pd.DataFrame:
    """
    Normalized Maxwell times on a k-grid

    Args:
        ks: Moduli in [0, 1)
        workers: Process count (1 = sequential, 0 = one per physical core)

    Returns:
        pd.DataFrame: Columns k, t1z, t1v, t2v, t1 in the order of ks
    """
    ks = [float(k) for k in ks]
    workers = resolve_workers(workers)
    if workers == 1 or len(ks) < 2:
        rows = [_grid_row(k) for k in ks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_grid_row, ks, chunksize=max(1, len(ks) // (4 * workers))))

    logger.info("Maxwell times computed on %d moduli with %d worker(s)", len(ks), workers)
    return pd.DataFrame(rows, columns=["k", "t1z", "t1v", "t2v", "t1"])
