"""
Dense complex matrix foundation: Hermitian eigendecomposition by cyclic Jacobi
sweeps, SVD, Kronecker products, partial transpose, norms and majorization.

Bipartite index convention: the basis vector |i>|j> of C^m (x) C^n sits at
row i*n + j (0-based), which is also the ordering produced by numpy.kron.
"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

import config
from errors import LengthMismatch, MalformedMatrix, NoConvergence, NotHermitian

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BipartiteOperator:
    """Square Hermitian matrix acting on C^dim_a (x) C^dim_b."""

    dim_a: int
    dim_b: int
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)
        order = self.dim_a * self.dim_b
        if self.dim_a < 1 or self.dim_b < 1 or matrix.shape != (order, order):
            raise MalformedMatrix(
                f"matrix of shape {matrix.shape} does not act on "
                f"C^{self.dim_a} (x) C^{self.dim_b}"
            )
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def order(self) -> int:
        return self.dim_a * self.dim_b

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def with_matrix(self, matrix: np.ndarray) -> "BipartiteOperator":
        return BipartiteOperator(self.dim_a, self.dim_b, matrix)

    def normalized(self) -> "BipartiteOperator":
        return self.with_matrix(self.matrix / self.trace())

    def scaled(self, factor: float) -> "BipartiteOperator":
        return self.with_matrix(self.matrix * factor)


@dataclass(frozen=True)
class Spectrum:
    values: np.ndarray
    vectors: np.ndarray


MatrixLike = Union[np.ndarray, BipartiteOperator]


def as_matrix(x: MatrixLike) -> np.ndarray:
    if isinstance(x, BipartiteOperator):
        return x.matrix
    matrix = np.asarray(x, dtype=complex)
    if matrix.ndim != 2:
        raise MalformedMatrix(f"expected a 2-D matrix, got shape {matrix.shape}")
    return matrix


def frobenius(x: MatrixLike) -> float:
    return float(np.linalg.norm(as_matrix(x)))


def scale(x: MatrixLike) -> float:
    return max(1.0, frobenius(x))


def hermiticity_defect(x: MatrixLike) -> float:
    matrix = as_matrix(x)
    if matrix.shape[0] != matrix.shape[1]:
        return math.inf
    if matrix.size == 0:
        return 0.0
    return float(np.max(np.abs(matrix - matrix.conj().T)))


def is_hermitian(x: MatrixLike, tol: float = config.HERMITIAN_TOL) -> bool:
    return hermiticity_defect(x) <= tol * scale(x)


def require_hermitian(x: MatrixLike, tol: float = config.HERMITIAN_TOL) -> np.ndarray:
    matrix = as_matrix(x)
    defect = hermiticity_defect(matrix)
    if defect > tol * scale(matrix):
        raise NotHermitian(
            f"max |H[i][j] - conj(H[j][i])| = {defect:.3e} exceeds {tol:g} * max(1, |H|_F)"
        )
    return matrix


def hermitian_part(x: MatrixLike) -> np.ndarray:
    matrix = as_matrix(x)
    return (matrix + matrix.conj().T) / 2


def _offdiag_norm(a: np.ndarray) -> float:
    # Frobenius norm of the off-diagonal part taken directly; the difference
    # of total and diagonal sums cancels below sqrt(machine eps) * |a|.
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def _rotate(a: np.ndarray, v: np.ndarray, p: int, q: int):
    """
    Annihilates a[p, q] with a phase-adjusted Givens rotation J, a <- J^H a J.
    """
    apq = a[p, q]
    r = abs(apq)
    phase = np.conj(apq / r)
    theta = 0.5 * math.atan2(2 * r, a[q, q].real - a[p, p].real)
    c, s = math.cos(theta), math.sin(theta)
    rotation = np.array([[c, s], [-s * phase, c * phase]])

    pair = [p, q]
    a[:, pair] = a[:, pair] @ rotation
    a[pair, :] = rotation.conj().T @ a[pair, :]
    a[p, q] = a[q, p] = 0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real
    v[:, pair] = v[:, pair] @ rotation


def eig_hermitian(h: MatrixLike) -> Spectrum:
    """
    Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    The sweep order is fixed (row-major over the strict upper triangle), so
    identical input gives identical output.

    Returns:
        Spectrum with values in non-increasing order and matching
        orthonormal eigenvector columns
    """
    a = np.array(require_hermitian(h), dtype=complex)
    size = a.shape[0]
    v = np.eye(size, dtype=complex)
    norm = float(np.linalg.norm(a))
    if size == 0 or norm == 0.0:
        return Spectrum(np.zeros(size), v)

    target = config.JACOBI_OFFDIAG_TOL * norm
    negligible = 1e-18 * norm
    for sweep in range(config.JACOBI_MAX_SWEEPS + 1):
        if _offdiag_norm(a) < target:
            break
        if sweep == config.JACOBI_MAX_SWEEPS:
            raise NoConvergence(
                f"off-diagonal norm {_offdiag_norm(a):.3e} above {target:.3e} "
                f"after {config.JACOBI_MAX_SWEEPS} sweeps"
            )
        for p in range(size - 1):
            for q in range(p + 1, size):
                if abs(a[p, q]) > negligible:
                    _rotate(a, v, p, q)
    logger.debug("jacobi order %d converged after %d sweeps", size, sweep)

    values = np.diag(a).real.copy()
    order = np.argsort(-values, kind="stable")
    return Spectrum(values[order], v[:, order])


def eigvals(h: MatrixLike) -> np.ndarray:
    return eig_hermitian(h).values


def _orthonormal_completion(basis: np.ndarray, total: int) -> np.ndarray:
    rows = basis.shape[0]
    columns = [basis[:, j] for j in range(basis.shape[1])]
    for e in np.eye(rows, dtype=complex):
        if len(columns) >= total:
            break
        w = e.copy()
        for _ in range(2):
            for column in columns:
                w -= column * np.vdot(column, w)
        length = np.linalg.norm(w)
        if length > 1e-8:
            columns.append(w / length)
    if not columns:
        return np.zeros((rows, 0), dtype=complex)
    return np.column_stack(columns)


def svd(m: MatrixLike, full: bool = False) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Singular value decomposition through the eigendecomposition of M^H M.

    Singular values below SVD_TRUNCATION * |M|_F are set to zero.

    Returns:
        (U, sigma, V) with M = U[:, :k] diag(sigma) V[:, :k]^H, k = min(rows, cols).
        With full=True, U is rows x rows and V is cols x cols.
    """
    matrix = as_matrix(m)
    rows, cols = matrix.shape
    k = min(rows, cols)
    gram = matrix.conj().T @ matrix
    spectrum = eig_hermitian((gram + gram.conj().T) / 2)
    v = spectrum.vectors

    sigma = np.sqrt(np.clip(spectrum.values[:k], 0.0, None))
    norm = float(np.linalg.norm(matrix))
    sigma[sigma < config.SVD_TRUNCATION * norm] = 0.0

    rank = int(np.count_nonzero(sigma))
    u = np.zeros((rows, 0), dtype=complex)
    if rank:
        raw = matrix @ v[:, :rank] / sigma[:rank]
        q, r = np.linalg.qr(raw)
        diagonal = np.diag(r)
        phases = diagonal / np.where(np.abs(diagonal) > 0, np.abs(diagonal), 1.0)
        u = q * phases
    u = _orthonormal_completion(u, rows if full else k)
    return u, sigma, (v if full else v[:, :k])


def singular_values(m: MatrixLike) -> np.ndarray:
    return svd(m)[1]


def kron(a: MatrixLike, b: MatrixLike) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def pt_matrix(matrix: np.ndarray, dim_a: int, dim_b: int) -> np.ndarray:
    """Transpose on the first factor: block (i, j) <-> block (j, i)."""
    blocks = np.asarray(matrix).reshape(dim_a, dim_b, dim_a, dim_b)
    return np.ascontiguousarray(blocks.transpose(2, 1, 0, 3)).reshape(
        dim_a * dim_b, dim_a * dim_b
    )


def partial_transpose(x: BipartiteOperator) -> BipartiteOperator:
    return x.with_matrix(pt_matrix(x.matrix, x.dim_a, x.dim_b))


def trace_norm(m: MatrixLike) -> float:
    return float(np.sum(singular_values(m)))


def frobenius_sq(h: MatrixLike) -> float:
    matrix = as_matrix(h)
    return float(np.sum(np.abs(matrix) ** 2))


def negative_threshold(h: MatrixLike) -> float:
    return config.SIGN_TOL * scale(h)


def negativity(h: MatrixLike) -> float:
    """Absolute value of the sum of the negative eigenvalues."""
    values = eigvals(h)
    negative = values[values < -negative_threshold(h)]
    return float(-np.sum(negative))


def trace_product(a: MatrixLike, b: MatrixLike) -> float:
    return float(np.trace(as_matrix(a) @ as_matrix(b)).real)


def _check_lengths(x: Sequence[float], y: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise LengthMismatch(f"vectors of length {x.size} and {y.size}")
    return x, y


def majorizes(y: Sequence[float], x: Sequence[float], tol: float = config.MAJORIZATION_TOL) -> bool:
    """True iff y majorizes x."""
    y, x = _check_lengths(y, x)
    if x.size == 0:
        return True
    partial_y = np.cumsum(np.sort(y)[::-1])
    partial_x = np.cumsum(np.sort(x)[::-1])
    if abs(partial_x[-1] - partial_y[-1]) > tol:
        return False
    return bool(np.all(partial_x[:-1] <= partial_y[:-1] + tol))


def inner_product_lower_bound(spec_a: Sequence[float], spec_b: Sequence[float]) -> float:
    """
    Smallest possible tr(A B) over Hermitian A, B with the given spectra:
    the largest eigenvalues of A paired with the smallest of B.
    """
    spec_a, spec_b = _check_lengths(spec_a, spec_b)
    return float(np.dot(np.sort(spec_a)[::-1], np.sort(spec_b)))


def embed_local(x: BipartiteOperator, dim_a: int, dim_b: int) -> BipartiteOperator:
    """Zero-pads x into C^dim_a (x) C^dim_b, keeping its local block structure."""
    if dim_a < x.dim_a or dim_b < x.dim_b:
        raise MalformedMatrix(
            f"cannot embed {x.dim_a}x{x.dim_b} operator into {dim_a}x{dim_b}"
        )
    padded = np.zeros((dim_a, dim_b, dim_a, dim_b), dtype=complex)
    padded[: x.dim_a, : x.dim_b, : x.dim_a, : x.dim_b] = x.matrix.reshape(
        x.dim_a, x.dim_b, x.dim_a, x.dim_b
    )
    return BipartiteOperator(dim_a, dim_b, padded.reshape(dim_a * dim_b, dim_a * dim_b))


def embed_vector(vector: np.ndarray, dims: Tuple[int, int], new_dims: Tuple[int, int]) -> np.ndarray:
    padded = np.zeros(new_dims, dtype=complex)
    padded[: dims[0], : dims[1]] = np.asarray(vector, dtype=complex).reshape(dims)
    return padded.ravel()


def local_congruence(x: BipartiteOperator, a: np.ndarray, b: np.ndarray) -> BipartiteOperator:
    """(A (x) B) X (A (x) B)^H."""
    f = np.kron(a, b)
    product = f @ x.matrix @ f.conj().T
    return x.with_matrix((product + product.conj().T) / 2)


def weyl_lower_bound(spec_a: Sequence[float], spec_b: Sequence[float], i: int) -> float:
    """lambda_i(A) + lambda_n(B), a lower bound on lambda_i(A + B) (1-based i)."""
    spec_a, spec_b = _check_lengths(spec_a, spec_b)
    if not 1 <= i <= spec_a.size:
        raise LengthMismatch(f"index {i} outside 1..{spec_a.size}")
    return float(np.sort(spec_a)[::-1][i - 1] + np.min(spec_b))
