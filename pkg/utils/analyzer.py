"""
Cut Time Analyzer Module
Builds the Maxwell-time, cut-time and elastica tables and checks them
against the known bounds
"""

import logging
from typing import Any, Dict, Iterable, List, Optional

import numpy as np
import pandas as pd

from config import CLI_TEXT, Config
from utils.elliptic import Modulus, complete_K
from utils.engel import compare, engel_normalized_cut_time, zeta
from utils.expmap import trajectory
from utils.maxwell import (
    critical_moduli,
    maxwell_times_grid,
    normalized_cut_time,
    t1z,
    t2v,
    t2v0_trigonometric,
)
from utils.pendulum import Covector, EllipticCoords, Stratum, from_elliptic, sample_covector

logger = logging.getLogger(__name__)

FAMILIES = {Stratum.C1: "inflectional", Stratum.C2: "non-inflectional"}

# Rows this close to k0 are skipped by the t1z range check; both bounds meet there
K0_MARGIN = 1e-3


def default_moduli(grid_size: Optional[int] = None) -> np.ndarray:
    """Uniform grid k = i/n, i = 0..n-1"""
    grid_size = grid_size or Config.GRID_SIZE
    return np.arange(grid_size) / grid_size


def normalized_covector(k: float, stratum: Stratum, phi: float = 0.0) -> Covector:
    """Covector with modulus k, beta = 0 and a unit pendulum period"""
    quarter = complete_K(k)
    alpha = 16.0 * quarter ** 2 if stratum == Stratum.C1 else 4.0 * (k * quarter) ** 2
    return from_elliptic(EllipticCoords(phi, Modulus(k), alpha, 0.0), stratum)


class CutTimeAnalyzer:
    """
    Cut time analysis engine
    Tabulates normalized Maxwell and cut times on a k-grid
    """

    def __init__(self, ks: Optional[Iterable[float]] = None, workers: Optional[int] = None):
        """
        Initialize analyzer with a modulus grid

        Args:
            ks: Moduli in [0, 1); defaults to Config.GRID_SIZE uniform points
            workers: Process count for the grid sweep
        """
        self.ks = default_moduli() if ks is None else np.asarray(list(ks), dtype=float)
        self.workers = workers
        self._maxwell: Optional[pd.DataFrame] = None

    def get_maxwell_table(self) -> pd.DataFrame:
        """
        Normalized first Maxwell times on the grid

        Returns:
            pd.DataFrame: Columns k, t1z, t1v, t2v, t1_combined
        """
        if self._maxwell is None:
            grid = maxwell_times_grid(self.ks, workers=self.workers)
            self._maxwell = grid.rename(columns={"t1": "t1_combined"})
        return self._maxwell.copy()

    def get_cut_time_table(self) -> pd.DataFrame:
        """
        Normalized Engel and Cartan cut times of both elastica families

        Returns:
            pd.DataFrame: Columns family, k, mu_t_cut_engel, mu_t_cut_cartan
        """
        maxwell = self.get_maxwell_table()
        inflectional = pd.DataFrame({
            "family": FAMILIES[Stratum.C1],
            "k": maxwell["k"],
            "mu_t_cut_engel": np.minimum(1.0, maxwell["t1z"]),
            "mu_t_cut_cartan": maxwell["t1_combined"],
        })
        non_inflectional = pd.DataFrame({
            "family": FAMILIES[Stratum.C2],
            "k": maxwell["k"],
            "mu_t_cut_engel": 1.0,
            "mu_t_cut_cartan": maxwell["t2v"],
        })
        return pd.concat([inflectional, non_inflectional], ignore_index=True)

    def get_elastica_family(self, ks: Iterable[float], samples: Optional[int] = None) -> pd.DataFrame:
        """
        Normalized elasticae up to their Cartan cut time

        Every curve starts at phi = 0. Rows up to the Engel cut time are
        tagged arc = "engel", the remaining ones arc = "cartan".

        Args:
            ks: Moduli in (0, 1)
            samples: Points per curve

        Returns:
            pd.DataFrame: Columns family, k, arc, t, x, y, z, v, w, theta
        """
        frames = []
        for k in ks:
            for stratum, family in FAMILIES.items():
                covector = normalized_covector(float(k), stratum)
                t_engel = engel_normalized_cut_time(k, stratum)
                t_cartan = normalized_cut_time(k, stratum)

                frame = trajectory(covector, t_cartan, samples).to_frame()
                frame.insert(0, "arc", np.where(frame["t"] <= t_engel * (1.0 + 1e-12), "engel", "cartan"))
                frame.insert(0, "k", float(k))
                frame.insert(0, "family", family)
                frames.append(frame)

        logger.info("elastica family: %d curves", len(frames))
        return pd.concat(frames, ignore_index=True)

    def get_summary_stats(self) -> Dict[str, Any]:
        """
        Constants of the synthesis

        Returns:
            Dict: k0, k1, t1z0, t2v0, t2v0_trigonometric, zeta and the zeta < 2 flag
        """
        k0, k1 = critical_moduli()
        certificate = zeta()
        return {
            "k0": k0,
            "k1": k1,
            "t1z0": t1z(0.0),
            "t2v0": t2v(0.0),
            "t2v0_trigonometric": t2v0_trigonometric(),
            "zeta": certificate.value,
            "zeta_t1z_branch": certificate.t1z_max,
            "zeta_t2v_branch": certificate.t2v_max,
            "zeta_below_two": certificate.below_two,
        }

    def run_comparison_sweep(self, count: int, seed: Optional[int] = None) -> pd.DataFrame:
        """
        Engel/Cartan cut times of random covectors cycling through C1, C2, C6

        Args:
            count: Number of covectors
            seed: Seed of the numpy Generator (default Config.SEED)

        Returns:
            pd.DataFrame: One row per covector with t_engel, t_cartan, ratio

        Raises:
            ViolationError: If any covector breaks t_engel <= t_cartan <= zeta * t_engel
        """
        rng = np.random.default_rng(Config.SEED if seed is None else seed)
        strata = [Stratum.C1, Stratum.C2, Stratum.C6]
        rows = []
        for i in range(count):
            stratum = strata[i % len(strata)]
            covector = sample_covector(rng, stratum)
            t_engel, t_cartan, ratio = compare(covector)
            rows.append({
                "stratum": stratum.value,
                "theta": covector.theta,
                "c": covector.c,
                "alpha": covector.alpha,
                "beta": covector.beta,
                "t_engel": t_engel,
                "t_cartan": t_cartan,
                "ratio": ratio,
            })
        return pd.DataFrame(rows)

    def detect_anomalies(self) -> List[str]:
        """
        Rows of the tables breaking the known bounds

        Checks t1z in (1, 3/2) below k0 and in (1/2, 1) above it, t1v in
        (1, 2), t2v in [1, 2), and Cartan >= Engel cut time row by row.

        Returns:
            List[str]: Messages; empty for a healthy grid
        """
        insights = []
        maxwell = self.get_maxwell_table()
        if maxwell.empty:
            return insights

        k0, _ = critical_moduli()

        def check(k, name, value, low, high, closed_low=False):
            inside = (low <= value if closed_low else low < value) and value < high
            if not inside:
                bounds = f"{'[' if closed_low else '('}{low:g}, {high:g})"
                insights.append(CLI_TEXT["anomaly_range"].format(k=k, name=name, value=value, bounds=bounds))

        for row in maxwell.itertuples(index=False):
            if row.k < k0 - K0_MARGIN:
                check(row.k, "t1z", row.t1z, 1.0, 1.5)
            elif row.k > k0 + K0_MARGIN:
                check(row.k, "t1z", row.t1z, 0.5, 1.0)
            check(row.k, "t1v", row.t1v, 1.0, 2.0)
            check(row.k, "t2v", row.t2v, 1.0, 2.0, closed_low=True)

        cut_times = self.get_cut_time_table()
        dominated = cut_times[cut_times["mu_t_cut_cartan"] < cut_times["mu_t_cut_engel"]]
        for row in dominated.itertuples(index=False):
            insights.append(
                CLI_TEXT["anomaly_dominance"].format(
                    k=row.k, family=row.family, cartan=row.mu_t_cut_cartan, engel=row.mu_t_cut_engel
                )
            )

        if insights:
            logger.warning("%d anomalies in the cut-time tables", len(insights))
        return insights
