"""
Engel Comparison Module
Cut times of the Engel problem and the constant zeta bounding the ratio of
Cartan to Engel cut times
"""

import logging
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from config import CLI_TEXT, Config
from utils.elliptic import Modulus, complete_K
from utils.errors import ViolationError
from utils.expmap import EngelCovector, project_engel_covector
from utils.maxwell import INF, cut_time, t1z, t2v
from utils.pendulum import Covector, Stratum, classify, modulus

logger = logging.getLogger(__name__)

# Slack for the two inequalities of compare(); both sides carry root-finding error
COMPARE_RTOL = 1e-9


def _as_cartan(covector: EngelCovector) -> Covector:
    # The Engel pendulum is the Cartan one with beta = pi/2
    return Covector(covector.theta, covector.c, covector.alpha, 0.5 * np.pi)


def engel_energy(covector: EngelCovector) -> float:
    """E = c^2/2 - alpha*sin(theta)"""
    return 0.5 * covector.c ** 2 - covector.alpha * np.sin(covector.theta)


def engel_classify(covector: EngelCovector, tol: Optional[float] = None) -> Stratum:
    return classify(_as_cartan(covector), tol)


def engel_modulus(covector: EngelCovector) -> Modulus:
    return modulus(_as_cartan(covector))


def engel_normalized_cut_time(k, stratum: Stratum) -> float:
    """mu * t_cut in the Engel group: min(1, t1z) on C1, 1 on C2 and C6"""
    if stratum == Stratum.C1:
        return min(1.0, t1z(k))
    if stratum in (Stratum.C2, Stratum.C6):
        return 1.0
    return INF


def engel_cut_time(covector: EngelCovector) -> float:
    """
    Cut time of an Engel extremal

    Args:
        covector: Engel covector (negative alpha already folded by the type)

    Returns:
        float: C1: 4K min(1, t1z)/sqrt(alpha); C2: 2kK/sqrt(alpha);
        C6: 2*pi/|c|; infinite on the other strata
    """
    stratum = engel_classify(covector)
    if stratum == Stratum.C1:
        k = engel_modulus(covector).k
        return 4.0 * complete_K(k) * engel_normalized_cut_time(k, stratum) / np.sqrt(covector.alpha)
    if stratum == Stratum.C2:
        k = engel_modulus(covector).k
        return 2.0 * k * complete_K(k) / np.sqrt(covector.alpha)
    if stratum == Stratum.C6:
        return 2.0 * np.pi / abs(covector.c)
    return INF


@dataclass(frozen=True)
class ZetaCertificate:
    """Maxima of both normalized Cartan cut-time branches"""

    value: float
    t1z_max: float
    t1z_argmax: float
    t2v_max: float
    t2v_argmax: float
    below_two: bool

    def to_dict(self) -> dict:
        return asdict(self)


def _branch_maximum(branch: Callable[[float], float], ks: np.ndarray) -> Tuple[float, float]:
    values = np.array([branch(k) for k in ks])
    i = int(np.argmax(values))
    best_k, best = float(ks[i]), float(values[i])

    # A maximum on the grid boundary is kept as sampled
    if 0 < i < len(ks) - 1:
        polished = minimize_scalar(
            lambda k: -branch(k), bounds=(ks[i - 1], ks[i + 1]), method="bounded", options={"xatol": 1e-10}
        )
        if -polished.fun > best:
            best_k, best = float(polished.x), float(-polished.fun)
    return best, best_k


@lru_cache(maxsize=4)
def zeta(grid_size: Optional[int] = None) -> ZetaCertificate:
    """
    zeta = max(max t1z, max t2v) over k in [0, 1)

    Both branches are sampled on a uniform k-grid and the best sample is
    polished by a bounded scalar search between its neighbours.
    """
    grid_size = grid_size or Config.GRID_SIZE
    ks = np.linspace(0.0, 0.995, grid_size)

    t1z_max, t1z_argmax = _branch_maximum(t1z, ks)
    t2v_max, t2v_argmax = _branch_maximum(t2v, ks)
    value = max(t1z_max, t2v_max)

    certificate = ZetaCertificate(
        value=value,
        t1z_max=t1z_max,
        t1z_argmax=t1z_argmax,
        t2v_max=t2v_max,
        t2v_argmax=t2v_argmax,
        below_two=value < 2.0,
    )
    if certificate.below_two:
        logger.info(CLI_TEXT["report_zeta_ok"].format(zeta=value))
    else:
        logger.error(CLI_TEXT["report_zeta_fail"].format(zeta=value))
    return certificate


def compare(covector: Covector) -> Tuple[float, float, float]:
    """
    Engel and Cartan cut times of the same geodesic

    Args:
        covector: Cartan covector; its Engel counterpart is the projection

    Returns:
        (t_engel, t_cartan, ratio) with ratio = nan when both are infinite

    Raises:
        ViolationError: Unless t_engel <= t_cartan <= zeta * t_engel
    """
    t_engel = engel_cut_time(project_engel_covector(covector))
    t_cartan = cut_time(covector)

    if np.isinf(t_engel) and np.isinf(t_cartan):
        return t_engel, t_cartan, float("nan")

    bound = zeta().value
    ratio = t_cartan / t_engel
    if not (t_engel <= t_cartan * (1.0 + COMPARE_RTOL) and ratio <= bound * (1.0 + COMPARE_RTOL)):
        raise ViolationError(
            CLI_TEXT["error_violation"].format(
                covector=covector, t_engel=t_engel, t_cartan=t_cartan, zeta=bound
            )
        )
    return t_engel, t_cartan, float(ratio)
