"""
Numeric constants and environment settings shared by every module.
"""

import logging
import os

DEFAULT_SEED = 42

# linalg
HERMITIAN_TOL = 1e-12
EIGEN_RESIDUAL_TOL = 1e-9
SIGN_TOL = 1e-10
JACOBI_OFFDIAG_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
SVD_TRUNCATION = 1e-10
MAJORIZATION_TOL = 1e-9

# states
NORM_TOL = 1e-9
TRACE_TOL = 1e-9
PPT_TOL = 1e-10
RANK_TOL = 1e-10
BALL_MARGIN = 1e-12

# blockpos
SEESAW_RESTARTS = 64
SEESAW_MAX_ITER = 500
SEESAW_CONVERGENCE = 1e-12
BLOCKPOS_NEGATIVE_TOL = 1e-9
BLOCKPOS_ZERO_TOL = 1e-12
BLOCKPOS_MIN_CONVERGED = 32
BLOCKPOS_MAX_SPREAD = 1e-8
SUBSPACE_HIT_TOL = 1e-10
ZERO_BLOCK_TOL = 1e-10
NONZERO_BLOCK_TOL = 1e-9

# witness
BOUND_MARGIN = 1e-9
DETECTION_TOL = 1e-9
EPSILON_FLOOR = 1e-7
EPSILON_MIN_RESTARTS = 64
EDGE_RESTARTS = 128
EPSILON_AGREEMENT = 1e-6
KERNEL_TOL = 1e-9
SCHMIDT_TOL = 1e-8
ORTHOGONALITY_TOL = 1e-10
BOOST_SAFETY = 2.0
DEFAULT_Z = 1.0
DEFAULT_DELTA = 0.5
DETECTION_EDGE_B = 0.5

# verify
BOUND_SAMPLES = 10_000
UNITARY_SAMPLES = 1_000
NONATTAINMENT_GAP = 1e-6

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def threads() -> int:
    """
    Worker cap for restart and sample pools.

    Returns:
        EWS_THREADS when set to a positive integer, else the machine parallelism
    """
    value = os.environ.get("EWS_THREADS")
    if value:
        try:
            count = int(value)
        except ValueError:
            logging.getLogger(__name__).warning(
                "ignoring non-integer EWS_THREADS=%r", value
            )
        else:
            if count > 0:
                return count
    return os.cpu_count() or 1


def log_level() -> str:
    """Logging level name from EWS_LOG_LEVEL, WARNING when unset."""
    return os.environ.get("EWS_LOG_LEVEL", "WARNING").upper()
