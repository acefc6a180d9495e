"""
Optimization over product vectors <a,b|W|a,b> by alternating eigenvector
(see-saw) updates with seeded multi-start, plus structural checks that every
block-positive operator must pass.

The see-saw value is a heuristic: a minimum reported here is an upper bound on
the true infimum over product vectors, never a certificate.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

import config
from errors import NoConvergedRestart
from linalg import (
    BipartiteOperator,
    as_matrix,
    eig_hermitian,
    eigvals,
    partial_transpose,
    require_hermitian,
    scale,
)

logger = logging.getLogger(__name__)

MIN, MAX = "min", "max"

YES = "yes"
YES_HEURISTIC = "yes-heuristic"
NO = "no"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class OptResult:
    value: float
    vec_a: np.ndarray
    vec_b: np.ndarray
    restarts_tried: int
    restarts_converged: int
    spread: float
    mode: str = MIN
    restart_values: Tuple[float, ...] = ()
    history: Tuple[float, ...] = ()

    def agreeing_restarts(self, tol: float) -> int:
        return sum(1 for v in self.restart_values if abs(v - self.value) <= tol)


@dataclass(frozen=True)
class BlockPositivityVerdict:
    status: str
    method: str
    counterexample: Optional[Tuple[np.ndarray, np.ndarray, float]] = None
    budget: dict = field(default_factory=dict)
    optimum: Optional[OptResult] = None


@dataclass(frozen=True)
class _Restart:
    index: int
    value: float
    vec_a: np.ndarray
    vec_b: np.ndarray
    converged: bool
    iterations: int
    history: Tuple[float, ...]


def product_expectation(w: BipartiteOperator, a: np.ndarray, b: np.ndarray) -> float:
    vector = np.kron(a, b)
    return float(np.vdot(vector, w.matrix @ vector).real)


def _unit(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def _extreme_vector(h: np.ndarray, mode: str) -> Tuple[float, np.ndarray]:
    spectrum = eig_hermitian((h + h.conj().T) / 2)
    k = -1 if mode == MIN else 0
    return float(spectrum.values[k]), spectrum.vectors[:, k]


def _seesaw(blocks: np.ndarray, index: int, seed: int, mode: str, tol: float) -> _Restart:
    """One restart: alternate exact local updates from a Haar-random start."""
    m, n = blocks.shape[0], blocks.shape[1]
    rng = np.random.default_rng(seed ^ index)
    a, b = _unit(rng, m), _unit(rng, n)
    value = float(np.einsum("i,j,ijkl,k,l->", a.conj(), b.conj(), blocks, a, b).real)
    history = [value]
    for iteration in range(1, config.SEESAW_MAX_ITER + 1):
        _, b = _extreme_vector(np.einsum("i,ijkl,k->jl", a.conj(), blocks, a), mode)
        new_value, a = _extreme_vector(np.einsum("j,ijkl,l->ik", b.conj(), blocks, b), mode)
        history.append(new_value)
        if abs(new_value - value) < tol:
            return _Restart(index, new_value, a, b, True, iteration, tuple(history))
        value = new_value
    return _Restart(index, value, a, b, False, config.SEESAW_MAX_ITER, tuple(history))


def _optimize(w: BipartiteOperator, restarts: int, seed: int, mode: str) -> OptResult:
    require_hermitian(w)
    m, n = w.dim_a, w.dim_b
    blocks = w.matrix.reshape(m, n, m, n)
    tol = config.SEESAW_CONVERGENCE * scale(w)

    with ThreadPoolExecutor(max_workers=max(1, min(config.threads(), restarts))) as pool:
        runs = list(pool.map(lambda i: _seesaw(blocks, i, seed, mode, tol), range(restarts)))

    converged = [run for run in runs if run.converged]
    for run in runs:
        logger.debug(
            "restart %d: value %.12g after %d iterations (converged=%s)",
            run.index, run.value, run.iterations, run.converged,
        )
    if not converged:
        raise NoConvergedRestart(
            f"none of {restarts} see-saw restarts converged",
            best=_summarize(w, runs, restarts, 0, mode) if runs else None,
        )
    return _summarize(w, converged, restarts, len(converged), mode)


def _summarize(w: BipartiteOperator, runs: List[_Restart], restarts: int, converged: int, mode: str) -> OptResult:
    sign = 1.0 if mode == MIN else -1.0
    best = min(runs, key=lambda run: (sign * run.value, run.index))
    values = tuple(run.value for run in runs)
    return OptResult(
        value=product_expectation(w, best.vec_a, best.vec_b),
        vec_a=best.vec_a,
        vec_b=best.vec_b,
        restarts_tried=restarts,
        restarts_converged=converged,
        spread=float(max(values) - min(values)),
        mode=mode,
        restart_values=values,
        history=best.history,
    )


def product_expectation_min(w: BipartiteOperator, restarts: int = config.SEESAW_RESTARTS, seed: int = config.DEFAULT_SEED) -> OptResult:
    """
    Smallest <a,b|W|a,b> over unit product vectors found by see-saw.

    Args:
        w: Hermitian operator on C^m (x) C^n
        restarts: number of Haar-random starts
        seed: restart i draws its start from default_rng(seed ^ i)

    Returns:
        OptResult of the best converged restart, ties going to the lowest index
    """
    return _optimize(w, restarts, seed, MIN)


def product_expectation_max(w: BipartiteOperator, restarts: int = config.SEESAW_RESTARTS, seed: int = config.DEFAULT_SEED) -> OptResult:
    return _optimize(w, restarts, seed, MAX)


def is_block_positive(w: BipartiteOperator, restarts: int = config.SEESAW_RESTARTS, seed: int = config.DEFAULT_SEED) -> BlockPositivityVerdict:
    """
    Block-positivity verdict. Only a PSD operator gets a plain "yes". An
    operator with PSD partial transpose is reported "yes-heuristic" through
    the "pt-psd" method without running the optimizer; otherwise the see-saw
    minimum decides, and a "yes-heuristic" answer from it is not a proof.
    """
    require_hermitian(w)
    floor = -config.SIGN_TOL * scale(w)
    if eigvals(w)[-1] >= floor:
        return BlockPositivityVerdict(YES, "psd")
    if eigvals(partial_transpose(w))[-1] >= floor:
        return BlockPositivityVerdict(YES_HEURISTIC, "pt-psd")

    budget = {"restarts": restarts, "max_iterations": config.SEESAW_MAX_ITER}
    try:
        best = product_expectation_min(w, restarts, seed)
    except NoConvergedRestart as exc:
        if exc.best is None:
            return BlockPositivityVerdict(INCONCLUSIVE, "seesaw", budget=budget)
        best = exc.best
        logger.warning("no converged see-saw restart; judging from the best unconverged run")

    budget["converged"] = best.restarts_converged
    # any product vector with a negative value is a counterexample, converged or not
    if best.value < -config.BLOCKPOS_NEGATIVE_TOL * scale(w):
        counterexample = (best.vec_a, best.vec_b, best.value)
        return BlockPositivityVerdict(NO, "seesaw", counterexample, budget, best)
    if (
        best.value >= -config.BLOCKPOS_ZERO_TOL * scale(w)
        and best.restarts_converged >= config.BLOCKPOS_MIN_CONVERGED
        and best.spread < config.BLOCKPOS_MAX_SPREAD
    ):
        return BlockPositivityVerdict(YES_HEURISTIC, "seesaw", None, budget, best)
    logger.warning(
        "block-positivity inconclusive: min %.3e, %d converged, spread %.3e",
        best.value, best.restarts_converged, best.spread,
    )
    return BlockPositivityVerdict(INCONCLUSIVE, "seesaw", None, budget, best)


def product_vector_in_subspace(
    basis: np.ndarray,
    m: int,
    n: int,
    restarts: int = config.SEESAW_RESTARTS,
    seed: int = config.DEFAULT_SEED,
) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """
    Searches span(basis) for a product vector by minimizing the distance
    <a,b|(I - P_V)|a,b>.

    Returns:
        (a, b) when the residual falls below SUBSPACE_HIT_TOL, else None
    """
    basis = np.asarray(basis, dtype=complex).reshape(m * n, -1)
    complement = np.eye(m * n) - basis @ basis.conj().T
    try:
        best = product_expectation_min(BipartiteOperator(m, n, complement), restarts, seed)
    except NoConvergedRestart as exc:
        if exc.best is None:
            return None
        best = exc.best
    if best.value < config.SUBSPACE_HIT_TOL:
        return best.vec_a, best.vec_b
    logger.info("no product vector found in subspace (residual %.3e)", best.value)
    return None


def zero_pattern_check(w: BipartiteOperator) -> List[str]:
    """
    Necessary zero patterns of a block-positive operator:
    a vanishing diagonal block W_kk forces row k and column k of blocks to
    vanish, and an index k zero on the diagonal of every W_ii forces the k-th
    row and column of every block to vanish.
    """
    require_hermitian(w)
    m, n = w.dim_a, w.dim_b
    blocks = w.matrix.reshape(m, n, m, n).transpose(0, 2, 1, 3)
    violations = []
    for k in range(m):
        if np.linalg.norm(blocks[k, k]) >= config.ZERO_BLOCK_TOL:
            continue
        for j in range(m):
            if j != k and np.linalg.norm(blocks[k, j]) > config.NONZERO_BLOCK_TOL:
                violations.append(f"block ({k + 1},{j + 1}) nonzero but block ({k + 1},{k + 1}) vanishes")

    for k in range(n):
        if any(abs(blocks[i, i, k, k]) >= config.ZERO_BLOCK_TOL for i in range(m)):
            continue
        for i in range(m):
            for j in range(m):
                row, column = blocks[i, j, k, :], blocks[i, j, :, k]
                if max(np.max(np.abs(row)), np.max(np.abs(column))) > config.NONZERO_BLOCK_TOL:
                    violations.append(
                        f"row/column {k + 1} of block ({i + 1},{j + 1}) nonzero but "
                        f"entry ({k + 1},{k + 1}) vanishes in every diagonal block"
                    )
    return violations


def _range_projector(h: np.ndarray) -> np.ndarray:
    spectrum = eig_hermitian(h)
    keep = np.abs(spectrum.values) > config.KERNEL_TOL * scale(h)
    vectors = spectrum.vectors[:, keep]
    return vectors @ vectors.conj().T


def reduced_range_check(w: BipartiteOperator) -> Tuple[bool, float]:
    """
    Whether range(W) sits inside range(W_A) (x) range(W_B), where W_A and W_B
    are the two partial traces.

    Returns:
        (holds, residual) with residual = |(I - P_A (x) P_B) W|_F
    """
    matrix = as_matrix(require_hermitian(w))
    m, n = w.dim_a, w.dim_b
    blocks = matrix.reshape(m, n, m, n)
    reduced_a = np.einsum("ijkj->ik", blocks)
    reduced_b = np.einsum("ijil->jl", blocks)
    projector = np.kron(_range_projector(reduced_a), _range_projector(reduced_b))
    residual = float(np.linalg.norm(matrix - projector @ matrix))
    return residual <= config.NONZERO_BLOCK_TOL * scale(w), residual
