"""
Configuration file for Cartan Synthesis
Contains all CLI text and numerical settings
"""

import os
from dotenv import load_dotenv

load_dotenv()

# CLI Text Configuration
CLI_TEXT = {
    # Errors
    "error_domain": "Input outside the operation's domain: {message}",
    "error_convergence": "Shooting did not converge after {starts} starts (best residual {residual:.3e})",
    "error_no_root": "No sign change of {name} in (0, {window:g}K] for k = {k}",
    "error_not_in_domain": "Target has zV = {zv:.3e}; uniqueness of the minimizer is not guaranteed",
    "error_missing_columns": "Your file is missing required columns: {columns}",
    "error_invalid_format": "Invalid file format. Please use a .xlsx or .csv file",
    "error_violation": "Cut-time comparison violated for {covector}: tE={t_engel}, tC={t_cartan}, zeta={zeta}",

    # Warnings
    "warning_zero_zv": "Row {row}: zV = 0, the target lies on the Maxwell set and will be reported as an error",
    "warning_small_zv": "Row {row}: |zV| = {zv:.2e} on canonical scale, expect slow convergence",
    "warning_ill_conditioned": "ill-conditioned: near Maxwell set",

    # Reports
    "report_zeta_ok": "zeta = {zeta:.6f} < 2",
    "report_zeta_fail": "zeta = {zeta:.6f} is NOT below 2",
    "anomaly_dominance": "k = {k:.6f} ({family}): Cartan time {cartan:.6f} below Engel time {engel:.6f}",
    "anomaly_range": "k = {k:.6f}: {name} = {value:.6f} outside {bounds}",
}


class Config:
    """Numerical and runtime configuration"""

    # Integration
    TOL = float(os.getenv("CARTAN_TOL", "1e-12"))

    # First-root search
    ROOT_TOL = float(os.getenv("CARTAN_ROOT_TOL", "1e-12"))
    ROOT_SAMPLES = int(os.getenv("CARTAN_ROOT_SAMPLES", "1024"))
    ROOT_WINDOW = 4.0       # search window (0, ROOT_WINDOW * K]
    ROOT_SCAN_START = 0.125  # sampling starts at ROOT_SCAN_START * K
    F2V_PRECISE_K = 0.5      # f2v below this modulus is evaluated in extended precision
    F2V_DIGITS = 24          # base decimal digits, raised by 8 per decade of 1/k
    F2V_PRECISE_SAMPLES = int(os.getenv("CARTAN_F2V_PRECISE_SAMPLES", "128"))

    # Strata
    STRATUM_TOL = float(os.getenv("CARTAN_STRATUM_TOL", "0.0"))
    K_ONE_THRESHOLD = 1e-12  # 1 - k below this is treated as k = 1

    # Tables and sweeps
    GRID_SIZE = int(os.getenv("CARTAN_GRID_SIZE", "200"))
    SEED = int(os.getenv("CARTAN_SEED", "0"))
    WORKERS = int(os.getenv("CARTAN_WORKERS", "1"))
    TRAJECTORY_SAMPLES = int(os.getenv("CARTAN_TRAJECTORY_SAMPLES", "201"))
    CSV_DIGITS = 15

    # Shooting
    SHOOT_TOL = float(os.getenv("CARTAN_SHOOT_TOL", "1e-9"))
    MAX_STARTS = int(os.getenv("CARTAN_MAX_STARTS", "24"))
    MAX_ITER = int(os.getenv("CARTAN_MAX_ITER", "60"))  # LM iterations; each buys n + 1 evaluations
    SHOOT_INTEGRATOR_TOL = 1e-12
    FD_STEP = 1e-6
    ILL_CONDITIONED_ZV = 1e-8
    ZERO_ZV = 1e-10  # canonical |zV| at or below this is treated as zV = 0
    SEED_MODULI = tuple(round(0.05 + 0.1 * i, 2) for i in range(10))
    SEED_PHASES = 8
    SEED_TIMES = 8

    # Logging
    LOG_LEVEL = os.getenv("CARTAN_LOG_LEVEL", "WARNING")

    # Batch input
    REQUIRED_COLUMNS = ["x", "y", "z", "v", "w"]

    # Column Mappings (accepted spellings for batch targets)
    COLUMN_MAPPINGS = {
        'x': ['x', 'X', 'q_x', 'qx', 'x1'],
        'y': ['y', 'Y', 'q_y', 'qy', 'x2'],
        'z': ['z', 'Z', 'q_z', 'qz', 'x3'],
        'v': ['v', 'q_v', 'qv', 'x4'],
        'w': ['w', 'W', 'q_w', 'qw', 'x5'],
    }
