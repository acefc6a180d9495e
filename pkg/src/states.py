"""
Concrete bipartite states: pure states in Schmidt form with their partial
transpose spectra, maximally entangled families, absolutely separable and
absolutely PPT reference states, PPT edge states, and PPT predicates.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

import config
from errors import (
    BadParam,
    BadRank,
    BadSpectrum,
    IndexOutOfRange,
    NormViolation,
    RankTooLarge,
    TraceViolation,
    UnknownState,
)
from linalg import (
    BipartiteOperator,
    eigvals,
    embed_local,
    frobenius_sq,
    partial_transpose,
    scale,
    svd,
)

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class PureState:
    """
    Bipartite unit vector sum_j schmidt[j] |basis_a[:, j]> (x) |basis_b[:, j]>.
    """

    dim_a: int
    dim_b: int
    schmidt: np.ndarray
    basis_a: np.ndarray
    basis_b: np.ndarray

    @property
    def rank(self) -> int:
        return len(self.schmidt)


@dataclass(frozen=True)
class CanonicalStateId:
    name: str
    params: Dict[str, float] = field(default_factory=dict)


def dense_vector(psi: PureState) -> np.ndarray:
    vector = np.zeros(psi.dim_a * psi.dim_b, dtype=complex)
    for coefficient, a, b in zip(psi.schmidt, psi.basis_a.T, psi.basis_b.T):
        vector += coefficient * np.kron(a, b)
    return vector


def projector(psi: PureState) -> BipartiteOperator:
    vector = dense_vector(psi)
    return BipartiteOperator(psi.dim_a, psi.dim_b, np.outer(vector, vector.conj()))


def pure_from_schmidt(coeffs: Sequence[float], m: int, n: int, normalize: bool = False) -> PureState:
    """
    Pure state with the given Schmidt coefficients on the standard bases.

    With normalize=True the coefficients are rescaled to unit norm instead of
    being rejected, which lets rounded published values be used directly.
    """
    coeffs = np.asarray(coeffs, dtype=float).ravel()
    if coeffs.size == 0 or np.any(coeffs <= 0):
        raise NormViolation(f"Schmidt coefficients must be positive, got {coeffs.tolist()}")
    if coeffs.size > min(m, n):
        raise RankTooLarge(f"{coeffs.size} coefficients exceed min(m, n) = {min(m, n)}")
    norm_sq = float(np.sum(coeffs ** 2))
    if not normalize and abs(norm_sq - 1.0) > config.NORM_TOL:
        raise NormViolation(f"sum of squared coefficients is {norm_sq!r}, not 1")
    coeffs = np.sort(coeffs / math.sqrt(norm_sq))[::-1]
    d = coeffs.size
    return PureState(
        m, n, coeffs, np.eye(m, d, dtype=complex), np.eye(n, d, dtype=complex)
    )


def max_entangled(m: int, n: int, j: int = 1) -> PureState:
    """(1/sqrt(m)) sum_i |i, i + (j-1) m>, one of floor(n/m) disjoint copies."""
    if m < 1 or not 1 <= j <= n // m:
        raise IndexOutOfRange(f"j={j} outside 1..{n // m} for m={m}, n={n}")
    basis_b = np.zeros((n, m), dtype=complex)
    for i in range(m):
        basis_b[i + (j - 1) * m, i] = 1.0
    return PureState(
        m, n, np.full(m, 1 / math.sqrt(m)), np.eye(m, dtype=complex), basis_b
    )


def max_entangled_rank(d: int, m: int, n: int) -> PureState:
    """(1/sqrt(d)) sum_{i<d} |ii> inside C^m (x) C^n."""
    return pure_from_schmidt(np.full(d, 1 / math.sqrt(d)), m, n)


def schmidt_decompose(vector: np.ndarray, m: int, n: int, tol: float = config.SVD_TRUNCATION) -> PureState:
    vector = np.asarray(vector, dtype=complex).ravel()
    norm = float(np.linalg.norm(vector))
    if vector.size != m * n or abs(norm - 1.0) > config.NORM_TOL:
        raise NormViolation(f"expected a unit vector of length {m * n}, norm {norm!r}")
    u, sigma, v = svd(vector.reshape(m, n))
    keep = sigma > tol
    return PureState(m, n, sigma[keep], u[:, keep], v[:, keep].conj())


def schmidt_rank(vector: np.ndarray, m: int, n: int, tol: float = config.SCHMIDT_TOL) -> int:
    sigma = svd(np.asarray(vector, dtype=complex).reshape(m, n))[1]
    return int(np.count_nonzero(sigma > tol))


def pt_spectrum_pure(psi: PureState) -> np.ndarray:
    """
    Eigenvalues of the partial transpose of |psi><psi| from the Schmidt data:
    a_j^2, +-a_i a_j for i < j, and mn - d^2 zeros, in non-increasing order.
    """
    a = psi.schmidt
    d = a.size
    values = list(a ** 2)
    for i in range(d):
        for j in range(i + 1, d):
            values.extend((a[i] * a[j], -a[i] * a[j]))
    values.extend([0.0] * (psi.dim_a * psi.dim_b - d * d))
    return np.sort(np.asarray(values))[::-1]


def pt_eigenvectors_pure(psi: PureState) -> List[Tuple[float, np.ndarray]]:
    """
    Eigenpairs of the partial transpose of |psi><psi| on its support:
    |b_i*> (x) |c_i> for a_i^2 and |b_i*> (x) |c_j> +- |b_j*> (x) |c_i> for +-a_i a_j.
    """
    pairs = []
    b, c, a = psi.basis_a.conj(), psi.basis_b, psi.schmidt
    for i in range(psi.rank):
        pairs.append((float(a[i] ** 2), np.kron(b[:, i], c[:, i])))
        for j in range(i + 1, psi.rank):
            for sign in (1.0, -1.0):
                vector = np.kron(b[:, i], c[:, j]) + sign * np.kron(b[:, j], c[:, i])
                pairs.append((float(sign * a[i] * a[j]), vector / SQRT2))
    return pairs


def _diagonal_state(diagonal: Sequence[float], m: int, n: int, normalized: bool = True) -> BipartiteOperator:
    diagonal = np.asarray(diagonal, dtype=float)
    if normalized:
        diagonal = diagonal / diagonal.sum()
    return BipartiteOperator(m, n, np.diag(diagonal).astype(complex))


def _dims(params: Dict[str, float], default_m: Optional[int] = None, default_n: Optional[int] = None) -> Tuple[int, int]:
    m = params.get("m", default_m)
    n = params.get("n", default_n if default_n is not None else m)
    if m is None or n is None:
        raise BadParam("parameters m and n are required")
    if m != int(m) or n != int(n) or m < 2 or n < 2:
        raise BadParam(f"m, n must be integers >= 2, got m={m}, n={n}")
    return int(m), int(n)


def _unit_interval(params: Dict[str, float], key: str) -> float:
    if key not in params:
        raise BadParam(f"parameter {key} is required")
    value = float(params[key])
    if not 0.0 < value < 1.0:
        raise BadParam(f"{key}={value} outside (0, 1)")
    return value


def zeta1(m: int, l: int) -> BipartiteOperator:
    """c * diag((m+1)/(m-1) x l, 1 x (m^2 - l)) on C^m (x) C^m."""
    if m < 2 or not 1 <= l <= m * m:
        raise BadParam(f"need m >= 2 and 1 <= l <= m^2, got m={m}, l={l}")
    return _diagonal_state([(m + 1) / (m - 1)] * l + [1.0] * (m * m - l), m, m)


def zeta2(m: int, n: int) -> BipartiteOperator:
    return _diagonal_state([3.0] + [1.0] * (m * n - 1), m, n)


def rho1(m: int, n: int, normalized: bool = True) -> BipartiteOperator:
    return _diagonal_state([SQRT2 + 1] * 2 + [1.0] * (m * n - 2), m, n, normalized)


def rho2(m: int, n: int, normalized: bool = True) -> BipartiteOperator:
    return _diagonal_state([2.0] * 3 + [1.0] * (m * n - 3), m, n, normalized)


def rho_b(b: float) -> BipartiteOperator:
    """2x4 PPT edge state with parameter b in (0, 1)."""
    if not 0.0 < b < 1.0:
        raise BadParam(f"b={b} outside (0, 1)")
    matrix = np.zeros((8, 8))
    for i in range(4):
        matrix[i, i] = b
    for i in range(5, 8):
        matrix[i, i] = b
    for i, j in ((0, 5), (1, 6), (2, 7)):
        matrix[i, j] = matrix[j, i] = b
    matrix[4, 4] = matrix[7, 7] = (1 + b) / 2
    matrix[4, 7] = matrix[7, 4] = math.sqrt(1 - b * b) / 2
    return BipartiteOperator(2, 4, matrix / (7 * b + 1))


def flipped_rho_b(b: float) -> BipartiteOperator:
    """(diag(-1, 1) (x) I_4) rho_b^G (diag(-1, 1) (x) I_4), a 2x4 PPT edge state."""
    f = np.kron(np.diag([-1.0, 1.0]), np.eye(4))
    flipped = partial_transpose(rho_b(b)).matrix
    return BipartiteOperator(2, 4, f @ flipped @ f)


def rho_a(a: float) -> BipartiteOperator:
    """3x3 PPT edge state with parameter a in (0, 1)."""
    if not 0.0 < a < 1.0:
        raise BadParam(f"a={a} outside (0, 1)")
    matrix = np.diag([a] * 6 + [(1 + a) / 2, a, (1 + a) / 2])
    for i, j in ((0, 4), (0, 8), (4, 8)):
        matrix[i, j] = matrix[j, i] = a
    matrix[6, 8] = matrix[8, 6] = math.sqrt(1 - a * a) / 2
    return BipartiteOperator(3, 3, matrix / (8 * a + 1))


GAMMA_ENTRIES = np.array(
    [
        [1, 0, 0, 0, 0, 0, 0, 0, -1],
        [0, 2, 0, -1, 0, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0, 1, 0, 0],
        [0, -1, 0, 1, 0, 0, 0, 0, 1],
        [0, 0, 0, 0, 1, 0, 1, 0, 0],
        [0, 0, 0, 0, 0, 1, 0, -1, 0],
        [0, 0, 1, 0, 1, 0, 2, 0, 0],
        [0, 0, 0, 0, 0, -1, 0, 1, 0],
        [-1, 0, 0, 1, 0, 0, 0, 0, 3],
    ],
    dtype=float,
)

SIGN_FLIP = np.diag([-1.0, -1.0, 1.0])
CYCLIC_SHIFT = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=float)
ANTI_DIAGONAL = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=float)


def gamma() -> BipartiteOperator:
    """Two-qutrit PPT entangled state with integer entries over 13."""
    return BipartiteOperator(3, 3, GAMMA_ENTRIES / GAMMA_ENTRIES.trace())


def _rotated_gamma(u: np.ndarray) -> BipartiteOperator:
    f = np.kron(u, ANTI_DIAGONAL)
    return partial_transpose(gamma().with_matrix(f @ gamma().matrix @ f.conj().T))


def gamma_prime() -> BipartiteOperator:
    return _rotated_gamma(SIGN_FLIP)


def gamma1() -> BipartiteOperator:
    return _rotated_gamma(CYCLIC_SHIFT)


def gamma2() -> BipartiteOperator:
    return _rotated_gamma(SIGN_FLIP)


def tiles_upb_vectors() -> List[Tuple[np.ndarray, np.ndarray]]:
    e = np.eye(3)
    return [
        (e[0], (e[0] - e[1]) / SQRT2),
        (e[2], (e[1] - e[2]) / SQRT2),
        ((e[0] - e[1]) / SQRT2, e[2]),
        ((e[1] - e[2]) / SQRT2, e[0]),
        (np.ones(3) / math.sqrt(3), np.ones(3) / math.sqrt(3)),
    ]


def upb_projector(pairs: Sequence[Tuple[np.ndarray, np.ndarray]]) -> np.ndarray:
    total = np.zeros((9, 9), dtype=complex)
    for a, b in pairs:
        vector = np.kron(a, b)
        total += np.outer(vector, vector.conj())
    return total


def tiles_upb_state() -> BipartiteOperator:
    """Normalized projector onto the complement of the Tiles product basis (rank 4)."""
    sigma = np.eye(9) - upb_projector(tiles_upb_vectors())
    return BipartiteOperator(3, 3, sigma / np.trace(sigma).real)


def max_ball_center(m: int, n: int) -> BipartiteOperator:
    return BipartiteOperator(m, n, np.eye(m * n, dtype=complex) / (m * n))


def tail_as_state(n: int, k: int, normalized: bool = False) -> BipartiteOperator:
    """diag(3 x (2n - k + 1), 1 x (k - 1)) on C^2 (x) C^n."""
    if n < 2 or not 4 <= k <= 2 * n:
        raise BadParam(f"need n >= 2 and 4 <= k <= 2n, got n={n}, k={k}")
    threes = 2 * n - k + 1
    return _diagonal_state([3.0] * threes + [1.0] * (2 * n - threes), 2, n, normalized)


def _padded(state: BipartiteOperator, params: Dict[str, float]) -> BipartiteOperator:
    if "m" not in params and "n" not in params:
        return state
    m, n = _dims(params, state.dim_a, state.dim_b)
    return embed_local(state, m, n)


def canonical_state(state_id: Union[CanonicalStateId, str], params: Optional[Dict[str, float]] = None) -> BipartiteOperator:
    """
    Builds a named reference state, normalized to unit trace unless
    params["normalized"] == 0 for rho1 / rho2.
    """
    if isinstance(state_id, str):
        state_id = CanonicalStateId(state_id, dict(params or {}))
    name, p = state_id.name, state_id.params
    logger.info("building canonical state %s with %s", name, p)

    if name == "zeta1":
        m, _ = _dims(p)
        if "l" not in p or p["l"] != int(p["l"]):
            raise BadParam("zeta1 needs an integer parameter l")
        return zeta1(m, int(p["l"]))
    if name == "zeta2":
        return zeta2(*_dims(p))
    if name in ("rho1", "rho2"):
        m, n = _dims(p)
        builder = rho1 if name == "rho1" else rho2
        return builder(m, n, normalized=bool(p.get("normalized", 1)))
    if name == "rho_b":
        return _padded(rho_b(_unit_interval(p, "b")), p)
    if name == "rho_a":
        return _padded(rho_a(_unit_interval(p, "a")), p)
    if name in _GAMMA_FAMILY:
        return _padded(_GAMMA_FAMILY[name](), p)
    if name == "tiles_upb":
        return tiles_upb_state()
    if name == "max_ball_center":
        return max_ball_center(*_dims(p))
    raise UnknownState(f"unknown state {name!r}; known: {', '.join(STATE_NAMES)}")


_GAMMA_FAMILY = {
    "gamma": gamma,
    "gamma_prime": gamma_prime,
    "gamma1": gamma1,
    "gamma2": gamma2,
}

STATE_NAMES = (
    "zeta1",
    "zeta2",
    "rho1",
    "rho2",
    "rho_b",
    "rho_a",
    "gamma",
    "gamma_prime",
    "gamma1",
    "gamma2",
    "tiles_upb",
    "max_ball_center",
)


def _require_unit_trace(rho: BipartiteOperator):
    if abs(rho.trace() - 1.0) > config.TRACE_TOL:
        raise TraceViolation(f"trace {rho.trace()!r} is not 1")


def ball_purity(rho: BipartiteOperator) -> float:
    return frobenius_sq(rho)


def is_in_maximal_ball(rho: BipartiteOperator) -> bool:
    _require_unit_trace(rho)
    return ball_purity(rho) <= 1.0 / (rho.order - 1) + config.BALL_MARGIN


def as_2xn_test(spectrum: Sequence[float], n: Optional[int] = None) -> bool:
    """
    Spectral criterion for absolute separability (equivalently absolute PPT)
    in 2 x n: lambda_1 <= lambda_{2n-1} + 2 sqrt(lambda_{2n-2} lambda_{2n}).
    """
    values = np.sort(np.asarray(spectrum, dtype=float).ravel())[::-1]
    if values.size < 4 or values.size % 2:
        raise BadSpectrum(f"expected a spectrum of even length 2n >= 4, got {values.size}")
    if n is not None and values.size != 2 * n:
        raise BadSpectrum(f"expected {2 * n} eigenvalues for n={n}, got {values.size}")
    if values[-1] < -config.TRACE_TOL or abs(values.sum() - 1.0) > config.TRACE_TOL:
        raise BadSpectrum("spectrum must be non-negative and sum to 1")
    values = np.clip(values, 0.0, None)
    bound = values[-2] + 2 * math.sqrt(values[-3] * values[-1])
    return bool(values[0] <= bound + config.BALL_MARGIN)


def pt_min_eigenvalue(rho: BipartiteOperator) -> float:
    return float(eigvals(partial_transpose(rho))[-1])


def is_ppt(rho: BipartiteOperator, tol: float = config.PPT_TOL) -> bool:
    return pt_min_eigenvalue(rho) >= -tol * scale(rho)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary from the QR factorization of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / SQRT2
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_state(kind: str, m: int, n: int, rank: int = 1, seed: int = config.DEFAULT_SEED) -> Union[BipartiteOperator, PureState]:
    if kind not in ("pure_haar", "density_wishart"):
        raise BadParam(f"unknown sampling kind {kind!r}")
    if not 1 <= rank <= m * n:
        raise BadRank(f"rank {rank} outside 1..{m * n}")
    rng = np.random.default_rng(seed)
    if kind == "pure_haar":
        vector = random_unitary(m * n, rng)[:, 0]
        return schmidt_decompose(vector / np.linalg.norm(vector), m, n)
    g = rng.standard_normal((m * n, rank)) + 1j * rng.standard_normal((m * n, rank))
    gram = g @ g.conj().T
    gram = (gram + gram.conj().T) / 2
    return BipartiteOperator(m, n, gram / np.trace(gram).real)
