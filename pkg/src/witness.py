"""
Entanglement witness construction and analysis.

Decomposable witnesses come from the parametric family, pure partial
transposes and random P + Q^G samples; nondecomposable ones from PPT edge
states through their kernel projectors. Every NPT state beyond 2x2 and 2x3 is
detected by pulling a boosted edge-state witness back through local filters.
"""

import logging
import math
from collections import OrderedDict
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

import config
from blockpos import (
    YES,
    YES_HEURISTIC,
    OptResult,
    is_block_positive,
    product_expectation_max,
    product_expectation_min,
)
from errors import (
    BadParam,
    BadParams,
    BoostDenominatorZero,
    CertificationError,
    EpsilonVanishes,
    FullRank,
    IsPPT,
    NoConvergedRestart,
    NotHermitian,
    NotPPT,
    OptFailed,
    OrthogonalityFail,
    ProductState,
    TraceViolation,
)
from linalg import (
    BipartiteOperator,
    eig_hermitian,
    embed_local,
    frobenius_sq,
    negative_threshold,
    partial_transpose,
    scale,
    svd,
    trace_norm,
)
from states import (
    PureState,
    dense_vector,
    flipped_rho_b,
    gamma1,
    gamma2,
    is_ppt,
    max_entangled,
    max_entangled_rank,
    projector,
    random_state,
    schmidt_decompose,
)

logger = logging.getLogger(__name__)

DEW = "DEW-by-construction"
NDEW = "NDEW-certified"
UNCLASSIFIED = "EW-unclassified"

PASS, FAIL, ATTAINED, NOT_APPLICABLE = "pass", "fail", "attained", "n/a"

MIRROR_EW = "mirror-EW"
MIRROR_PSD = "mirror-PSD"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class NdewParams:
    z: float = config.DEFAULT_Z
    delta: float = config.DEFAULT_DELTA
    epsilon_estimate: Optional[float] = None
    t: Optional[float] = None

    def __post_init__(self):
        if self.z <= 0 or self.delta <= 0:
            raise BadParams(f"z and delta must be positive, got z={self.z}, delta={self.delta}")
        if self.t is not None and self.t < 0:
            raise BadParams(f"boost weight t={self.t} must be non-negative")


@dataclass(frozen=True)
class Witness:
    op: BipartiteOperator
    class_tag: str = UNCLASSIFIED
    provenance: Tuple[str, ...] = ()
    normalized: bool = True
    detected: Optional[BipartiteOperator] = None
    ndew: Optional[NdewParams] = None

    def __post_init__(self):
        if self.normalized and abs(self.op.trace() - 1.0) > config.TRACE_TOL:
            raise TraceViolation(f"witness trace {self.op.trace()!r} is not 1")
        if self.class_tag == NDEW and self.detected is None:
            raise CertificationError("an NDEW certificate needs the PPT state it detects")

    @property
    def dims(self) -> Tuple[int, int]:
        return self.op.dim_a, self.op.dim_b

    def step(self, note: str) -> Tuple[str, ...]:
        return self.provenance + (note,)


@dataclass(frozen=True)
class FamilyParams:
    a: float
    b: float
    c: float
    d: float
    m: int
    n: int

    def __post_init__(self):
        weights = (self.a, self.b, self.c, self.d)
        if any(not 0.0 <= w <= 1.0 for w in weights):
            raise BadParams(f"weights {weights} must lie in [0, 1]")
        if abs(sum(weights) - 1.0) > 1e-12:
            raise BadParams(f"weights {weights} must sum to 1")
        if self.m < 2 or self.m > self.n or self.m * self.n < 4:
            raise BadParams(f"need 2 <= m <= n, got m={self.m}, n={self.n}")


@dataclass(frozen=True)
class SpectrumReport:
    lambdas: np.ndarray
    lambda1: float
    lambda_min: float
    negativity: float
    fro_sq: float
    neg_count: int
    verdicts: "OrderedDict[str, str]"

    @property
    def is_ew(self) -> bool:
        return self.verdicts["is_ew"] == PASS

    @property
    def failures(self) -> List[str]:
        return [name for name, verdict in self.verdicts.items() if verdict == FAIL]

    def scalars(self) -> Dict[str, float]:
        return OrderedDict(
            lambda1=self.lambda1,
            lambda_min=self.lambda_min,
            negativity=self.negativity,
            fro_sq=self.fro_sq,
            neg_count=self.neg_count,
        )


@dataclass(frozen=True)
class MirrorResult:
    mu: float
    w_m: BipartiteOperator
    verdict: str
    opt_trail: OptResult


@dataclass(frozen=True)
class LocalFilter:
    """Invertible A, B with (A (x) B)|Psi_d> = |psi>."""

    a: np.ndarray
    b: np.ndarray
    d: int

    def congruence(self) -> np.ndarray:
        """F = conj(A) (x) B, which carries the PT of |Psi_d><Psi_d| onto the PT of |psi><psi|."""
        return np.kron(self.a.conj(), self.b)

    def residual(self, psi: PureState) -> float:
        psi_d = max_entangled_rank(self.d, psi.dim_a, psi.dim_b)
        return float(np.linalg.norm(np.kron(self.a, self.b) @ dense_vector(psi_d) - dense_vector(psi)))


@dataclass(frozen=True)
class DetectionCertificate:
    witness: Witness
    expectation: float
    pipeline: Tuple[str, ...]
    filters: LocalFilter
    branch: str
    t: float
    schmidt_rank: int


def expectation(w: BipartiteOperator, rho: BipartiteOperator) -> float:
    """tr(W rho) for Hermitian W and rho."""
    value = np.trace(w.matrix @ rho.matrix)
    if abs(value.imag) > config.EIGEN_RESIDUAL_TOL * scale(w) * scale(rho):
        raise NotHermitian(f"tr(W rho) has imaginary part {value.imag:.3e}")
    return float(value.real)


def _pt_projector(psi: PureState) -> BipartiteOperator:
    return partial_transpose(projector(psi))


def w_family(p: FamilyParams) -> Witness:
    """
    a (I - |Omega><Omega|)/(mn - 1) + b |Psi_2><Psi_2|^G + c |11><11| + d |Psi_m><Psi_m|^G
    with Omega = (|12> - |21>)/sqrt(2).
    """
    m, n = p.m, p.n
    order = m * n
    omega = np.zeros(order, dtype=complex)
    omega[1], omega[n] = 1 / math.sqrt(2), -1 / math.sqrt(2)
    corner = np.zeros((order, order), dtype=complex)
    corner[0, 0] = 1.0

    matrix = (
        p.a * (np.eye(order) - np.outer(omega, omega.conj())) / (order - 1)
        + p.b * _pt_projector(max_entangled_rank(2, m, n)).matrix
        + p.c * corner
        + p.d * _pt_projector(max_entangled(m, n)).matrix
    )
    logger.info("w_family a=%g b=%g c=%g d=%g on %dx%d", p.a, p.b, p.c, p.d, m, n)
    return Witness(
        BipartiteOperator(m, n, matrix),
        DEW,
        (f"w_family(a={p.a:g}, b={p.b:g}, c={p.c:g}, d={p.d:g}, m={m}, n={n})",),
    )


def pure_pt_witness(psi: PureState) -> Witness:
    if psi.rank < 2:
        raise ProductState("a Schmidt-rank-1 state has a PSD partial transpose")
    coefficients = ", ".join(f"{a:.6g}" for a in psi.schmidt)
    return Witness(_pt_projector(psi), DEW, (f"pure_pt_witness(schmidt=[{coefficients}])",))


def nearest_pure_pt_witness(w: Witness) -> Tuple[Witness, float]:
    """
    Rank-one projection of W^G: the pure PT witness built from the top
    eigenvector of W^G, with its trace distance to W. A normalized DEW with
    tr(W^2) close to 1 lies close to the returned witness.

    Raises:
        ProductState when that eigenvector is a product vector
    """
    m, n = w.dims
    spectrum = eig_hermitian(partial_transpose(w.op))
    nearest = pure_pt_witness(schmidt_decompose(spectrum.vectors[:, 0], m, n, tol=config.SCHMIDT_TOL))
    distance = trace_norm(w.op.matrix - nearest.op.matrix) / 2
    logger.debug("nearest pure PT witness at trace distance %.3e", distance)
    return nearest, distance


def sample_dew(m: int, n: int, x: float, rank_p: int, rank_q: int, seed: int = config.DEFAULT_SEED) -> Witness:
    """
    x P + (1 - x) Q^G with P, Q unit-trace Wishart densities of the given ranks.
    """
    if not 0.0 <= x < 1.0:
        raise BadParams(f"mixing weight x={x} must lie in [0, 1)")
    seed_p, seed_q = (int(s) for s in np.random.SeedSequence(seed).generate_state(2))
    q = random_state("density_wishart", m, n, rank_q, seed_q)
    matrix = (1 - x) * partial_transpose(q).matrix
    if x > 0:
        matrix = matrix + x * random_state("density_wishart", m, n, rank_p, seed_p).matrix
    return Witness(
        BipartiteOperator(m, n, matrix),
        DEW,
        (f"sample_dew(m={m}, n={n}, x={x:.6g}, rank_p={rank_p}, rank_q={rank_q}, seed={seed})",),
    )


def antisymmetric_witness(m: int) -> Witness:
    """(1/m)(I - 2 P_anti) on C^m (x) C^m, the swap operator over m."""
    if m < 2:
        raise BadParam(f"m={m} must be at least 2")
    swap = np.eye(m * m).reshape(m, m, m, m).transpose(0, 1, 3, 2).reshape(m * m, m * m)
    return Witness(BipartiteOperator(m, m, swap / m), DEW, (f"antisymmetric_witness(m={m})",))


def phi_mixture_witness(m: int, n: int, weights: Sequence[float]) -> Witness:
    weights = np.asarray(weights, dtype=float)
    if weights.size == 0 or weights.size > n // m:
        raise BadParams(f"expected between 1 and {n // m} weights, got {weights.size}")
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
        raise BadParams("weights must be non-negative and sum to 1")
    matrix = sum(
        w * _pt_projector(max_entangled(m, n, j)).matrix
        for j, w in enumerate(weights, start=1)
    )
    return Witness(
        BipartiteOperator(m, n, matrix),
        DEW,
        (f"phi_mixture_witness(m={m}, n={n}, weights={weights.tolist()})",),
    )


def _bounded_below(value: float, bound: float) -> str:
    if value < bound - config.BOUND_MARGIN:
        return FAIL
    return ATTAINED if abs(value - bound) <= config.BOUND_MARGIN else PASS


def _bounded_above(value: float, bound: float) -> str:
    if value > bound + config.BOUND_MARGIN:
        return FAIL
    return ATTAINED if abs(value - bound) <= config.BOUND_MARGIN else PASS


def _combine(*verdicts: str) -> str:
    if FAIL in verdicts:
        return FAIL
    return ATTAINED if ATTAINED in verdicts else PASS


def spectral_report(w: Witness) -> SpectrumReport:
    """
    Spectrum, negativity, purity and the verdict of every eigenvalue bound a
    normalized witness must satisfy. Rows that do not apply to the local
    dimensions or witness class are marked "n/a".
    """
    m, n = w.dims
    order = m * n
    values = eig_hermitian(w.op).values
    threshold = negative_threshold(w.op)
    negative = values[values < -threshold]
    lambda1, lambda_min = float(values[0]), float(values[-1])
    negativity = float(-negative.sum())

    verdicts = OrderedDict()
    verdicts["is_ew"] = PASS if negative.size else FAIL
    rows = (
        "lambda1_range",
        "lambda_min_range",
        "fro_sq_range",
        "neg_count",
        "qubit_pair_sum",
        "qubit_tail3",
        "qubit_tail_k",
        "negativity_cap",
        "two_smallest",
        "three_smallest",
    )
    for row in rows:
        verdicts[row] = NOT_APPLICABLE

    fro_sq = frobenius_sq(w.op)
    if negative.size:
        floor = 1.0 / (order - 1)
        verdicts["lambda1_range"] = (
            PASS if floor - config.BOUND_MARGIN < lambda1 < 1 + config.BOUND_MARGIN else FAIL
        )
        verdicts["lambda_min_range"] = _bounded_below(lambda_min, -0.5)
        verdicts["fro_sq_range"] = (
            _bounded_above(fro_sq, 1.0) if fro_sq > floor - config.BOUND_MARGIN else FAIL
        )
        verdicts["neg_count"] = PASS if negative.size <= (m - 1) * (n - 1) else FAIL
        if m == 2:
            verdicts["qubit_pair_sum"] = _bounded_below(values[1] + values[-1], 0.0)
            verdicts["qubit_tail3"] = _bounded_below(values[2:].sum(), -1 / (2 + 2 * math.sqrt(2)))
            verdicts["qubit_tail_k"] = _combine(
                *(_bounded_below(values[k - 1:].sum(), -0.5) for k in range(4, order + 1))
            )
        if m == n or w.class_tag == DEW:
            verdicts["negativity_cap"] = _bounded_above(negativity, (m - 1) / 2)
        if w.class_tag == DEW and m >= 3:
            verdicts["two_smallest"] = _bounded_below(values[-2:].sum(), -math.sqrt(2) / 2)
            verdicts["three_smallest"] = _bounded_below(values[-3:].sum(), -1.0)

    report = SpectrumReport(
        lambdas=values,
        lambda1=lambda1,
        lambda_min=lambda_min,
        negativity=negativity,
        fro_sq=fro_sq,
        neg_count=int(negative.size),
        verdicts=verdicts,
    )
    if not negative.size:
        logger.info("operator has no negative eigenvalue: not an EW")
    return report


def mirror(w: Witness, restarts: int = config.SEESAW_RESTARTS, seed: int = config.DEFAULT_SEED) -> MirrorResult:
    """
    W_M = mu I - W with mu the largest product-vector expectation of W.
    """
    try:
        best = product_expectation_max(w.op, restarts, seed)
    except NoConvergedRestart as exc:
        raise OptFailed(str(exc)) from exc

    mu = best.value
    w_m = w.op.with_matrix(mu * np.eye(w.op.order) - w.op.matrix)
    lambda1 = float(eig_hermitian(w.op).values[0])
    if eig_hermitian(w_m).values[-1] >= -config.SIGN_TOL * scale(w_m):
        verdict = MIRROR_PSD
    elif lambda1 > mu + config.BOUND_MARGIN and is_block_positive(w_m, restarts, seed).status in (YES, YES_HEURISTIC):
        verdict = MIRROR_EW
    else:
        verdict = INCONCLUSIVE
    logger.info("mirror: mu=%.12g lambda1=%.12g verdict=%s", mu, lambda1, verdict)
    return MirrorResult(mu, w_m, verdict, best)


def _kernel_projector(h: BipartiteOperator) -> np.ndarray:
    spectrum = eig_hermitian(h)
    kernel = spectrum.vectors[:, spectrum.values < config.KERNEL_TOL * np.linalg.norm(h.matrix)]
    return kernel @ kernel.conj().T


def ndew_from_edge(
    sigma: BipartiteOperator,
    params: Optional[NdewParams] = None,
    restarts: int = config.EDGE_RESTARTS,
    seed: int = config.DEFAULT_SEED,
    projectors: Optional[Tuple[np.ndarray, np.ndarray]] = None,
) -> Witness:
    """
    Nondecomposable witness (z P + Q^G - delta I)/norm detecting the PPT edge
    state sigma, with P and Q the projectors onto ker(sigma) and ker(sigma^G).

    Args:
        projectors: explicit (P, Q) replacing the kernel projectors

    Raises:
        NotPPT, FullRank, EpsilonVanishes when the see-saw infimum of
        z P + Q^G over product vectors is not certifiably positive
    """
    params = params or NdewParams()
    if not is_ppt(sigma):
        raise NotPPT("edge-state witness construction needs a PPT state")
    m, n = sigma.dim_a, sigma.dim_b

    if projectors is None:
        p = _kernel_projector(sigma)
        q = _kernel_projector(partial_transpose(sigma))
    else:
        p, q = (np.asarray(x, dtype=complex) for x in projectors)
    rank_p = int(round(np.trace(p).real))
    rank_q = int(round(np.trace(q).real))
    if rank_p == 0 or rank_q == 0:
        raise FullRank(f"kernel ranks ({rank_p}, {rank_q}): sigma and sigma^G both need a kernel")

    base = BipartiteOperator(m, n, params.z * p + partial_transpose(BipartiteOperator(m, n, q)).matrix)
    try:
        best = product_expectation_min(base, restarts, seed)
    except NoConvergedRestart as exc:
        raise OptFailed(str(exc)) from exc
    epsilon = best.value
    agreeing = best.agreeing_restarts(config.EPSILON_AGREEMENT)
    logger.info(
        "edge witness: kernel ranks (%d, %d), epsilon estimate %.6e from %d converged restarts (%d agreeing)",
        rank_p, rank_q, epsilon, best.restarts_converged, agreeing,
    )
    if epsilon <= config.EPSILON_FLOOR:
        raise EpsilonVanishes(
            f"product-vector infimum {epsilon:.3e} of zP + Q^G is not above {config.EPSILON_FLOOR:g}"
        )
    if agreeing < config.EPSILON_MIN_RESTARTS:
        raise OptFailed(
            f"epsilon estimate not reproduced: {agreeing} of {best.restarts_converged} converged restarts "
            f"agree within {config.EPSILON_AGREEMENT:g}, need {config.EPSILON_MIN_RESTARTS}"
        )

    delta = min(params.delta, epsilon / 2)
    norm = params.z * rank_p + rank_q - m * n * delta
    matrix = (base.matrix - delta * np.eye(m * n)) / norm
    detected = sigma.normalized()
    op = BipartiteOperator(m, n, matrix)
    value = expectation(op, detected)
    if value >= -config.DETECTION_TOL:
        raise EpsilonVanishes(f"witness expectation {value:.3e} on sigma is not negative")

    return Witness(
        op,
        NDEW,
        (
            f"ndew_from_edge(z={params.z:g}, delta={delta:.6e}, kernel ranks=({rank_p}, {rank_q}))",
            f"epsilon={epsilon:.6e} is a see-saw estimate of the product-vector infimum",
        ),
        detected=detected,
        ndew=replace(params, delta=delta, epsilon_estimate=epsilon),
    )


def _recheck(w: BipartiteOperator, detected: Optional[BipartiteOperator], tag: str) -> str:
    if tag != NDEW:
        return tag
    if expectation(w, detected) < -config.DETECTION_TOL:
        return NDEW
    logger.warning("witness no longer detects its stored state; dropping NDEW tag")
    return UNCLASSIFIED


def boost_witness(w: Witness, psi: PureState, t: Optional[float] = None) -> Witness:
    """
    (t |psi><psi|^G + W)/(1 + t), which keeps detecting the stored state as
    long as that state is orthogonal to |psi><psi|^G.
    """
    if w.detected is None:
        raise OrthogonalityFail("boosting needs a witness with a stored detected state")
    t = 1.0 if t is None else float(t)
    if t < 0:
        raise BadParam(f"boost weight t={t} must be non-negative")
    pt = _pt_projector(psi)
    overlap = expectation(pt, w.detected)
    if overlap > config.ORTHOGONALITY_TOL:
        raise OrthogonalityFail(f"tr(|psi><psi|^G rho) = {overlap:.3e} exceeds tolerance")
    if t == 0:
        return w

    op = w.op.with_matrix((t * pt.matrix + w.op.matrix) / (1 + t))
    return Witness(
        op,
        _recheck(op, w.detected, w.class_tag),
        w.step(f"boost_witness(t={t:.6g})"),
        detected=w.detected,
        ndew=replace(w.ndew, t=t) if w.ndew else None,
    )


def shift_witness(w: Witness, eps: float) -> Witness:
    """(W + eps I)/(1 + eps mn)."""
    if eps < 0:
        raise BadParam(f"shift eps={eps} must be non-negative")
    order = w.op.order
    op = w.op.with_matrix((w.op.matrix + eps * np.eye(order)) / (1 + eps * order))
    return replace(w, op=op, class_tag=_recheck(op, w.detected, w.class_tag), provenance=w.step(f"shift_witness(eps={eps:g})"))


def blend_toward_pure(w: Witness, psi: np.ndarray, p: float) -> Witness:
    """(1 - p) W + p |psi><psi| for a unit vector psi in the kernel of the detected state."""
    if not 0.0 <= p < 1.0:
        raise BadParam(f"blend weight p={p} must lie in [0, 1)")
    vector = np.asarray(psi, dtype=complex).ravel()
    vector = vector / np.linalg.norm(vector)
    pure = np.outer(vector, vector.conj())
    if w.detected is not None:
        overlap = float(np.vdot(vector, w.detected.matrix @ vector).real)
        if overlap > config.ORTHOGONALITY_TOL:
            raise OrthogonalityFail(f"<psi|rho|psi> = {overlap:.3e} exceeds tolerance")
    op = w.op.with_matrix((1 - p) * w.op.matrix + p * pure)
    return replace(w, op=op, class_tag=_recheck(op, w.detected, w.class_tag), provenance=w.step(f"blend_toward_pure(p={p:g})"))


def local_filter_to_max_entangled(psi: PureState) -> LocalFilter:
    """
    A = U diag(sqrt(d) s_1, ..., sqrt(d) s_d, 1, ..., 1) and B = conj(V) from the
    full SVD M = U diag(s) V^H of the coefficient matrix of psi.
    """
    m, n, d = psi.dim_a, psi.dim_b, psi.rank
    u, sigma, v = svd(dense_vector(psi).reshape(m, n), full=True)
    stretch = np.ones(m)
    stretch[:d] = math.sqrt(d) * sigma[:d]
    a = u * stretch
    b = v.conj()
    logger.info(
        "local filter for Schmidt rank %d: cond(A)=%.3e cond(B)=%.3e",
        d, np.linalg.cond(a), np.linalg.cond(b),
    )
    return LocalFilter(a, b, d)


@lru_cache(maxsize=None)
def _base_ndew(branch: str, restarts: int, seed: int) -> Witness:
    seeds = {
        "qubit": lambda: flipped_rho_b(config.DETECTION_EDGE_B),
        "schmidt2": gamma1,
        "schmidt3": gamma2,
    }
    return ndew_from_edge(seeds[branch](), NdewParams(), restarts, seed)


def _padded(w: Witness, m: int, n: int) -> Witness:
    if w.dims == (m, n):
        return w
    return replace(
        w,
        op=embed_local(w.op, m, n),
        detected=embed_local(w.detected, m, n),
        provenance=w.step(f"padded to {m}x{n}"),
    )


def detect_npt(rho: BipartiteOperator, restarts: int = config.EDGE_RESTARTS, seed: int = config.DEFAULT_SEED) -> DetectionCertificate:
    """
    Builds a witness detecting the NPT state rho.

    The most negative eigenvector psi of rho^G has Schmidt rank d >= 2. Local
    filters carry Psi_d onto psi; the filtered state rho' is detected by a
    PPT-edge-state witness boosted with t |Psi_d><Psi_d|^G, and the result is
    pulled back through the filters.
    """
    m, n = rho.dim_a, rho.dim_b
    if m * n <= 6:
        raise BadParam(f"detection needs mn > 6, got {m}x{n}")
    if is_ppt(rho):
        raise IsPPT("state has a positive partial transpose")
    if m > n:
        raise BadParam(f"expected m <= n, got {m}x{n}")

    spectrum = eig_hermitian(partial_transpose(rho))
    psi = schmidt_decompose(spectrum.vectors[:, -1], m, n, tol=config.SCHMIDT_TOL)
    d = psi.rank
    pipeline = [f"lambda_min(rho^G)={spectrum.values[-1]:.6e}", f"schmidt rank d={d}"]

    filters = local_filter_to_max_entangled(psi)
    f = filters.congruence()
    filtered = f.conj().T @ rho.matrix @ f
    filtered = rho.with_matrix((filtered + filtered.conj().T) / 2).normalized()

    if m == 2:
        branch, boost_rank = "qubit", 2
    elif d == 2:
        branch, boost_rank = "schmidt2", 2
    else:
        branch, boost_rank = "schmidt3", d
    base = _padded(_base_ndew(branch, restarts, seed), m, n)
    pipeline.append(f"base witness from {branch} edge state")

    psi_boost = max_entangled_rank(boost_rank, m, n)
    denominator = expectation(_pt_projector(psi_boost), filtered)
    if denominator >= -config.ORTHOGONALITY_TOL:
        raise BoostDenominatorZero(
            f"tr(|Psi_{boost_rank}><Psi_{boost_rank}|^G rho') = {denominator:.3e} is not negative"
        )
    t = config.BOOST_SAFETY * abs(expectation(base.op, filtered)) / abs(denominator) + 1.0
    boosted = boost_witness(base, psi_boost, t)
    pipeline.append(f"boost t={t:.6e}")

    pulled = f @ boosted.op.matrix @ f.conj().T
    pulled = (pulled + pulled.conj().T) / 2
    op = rho.with_matrix(pulled / np.trace(pulled).real)

    f_inverse = np.linalg.inv(f)
    moved = f_inverse.conj().T @ boosted.detected.matrix @ f_inverse
    detected = rho.with_matrix((moved + moved.conj().T) / 2).normalized()
    value = expectation(op, rho)
    if value >= -config.DETECTION_TOL:
        raise OptFailed(f"pulled-back witness gives tr(W rho) = {value:.3e}")

    tag = _recheck(op, detected, NDEW)
    witness = Witness(
        op,
        tag,
        base.provenance + tuple(pipeline) + ("pulled back through local filters",),
        detected=detected if tag == NDEW else None,
        ndew=replace(base.ndew, t=t) if base.ndew else None,
    )
    logger.info("detect_npt: branch=%s d=%d t=%.4g tr(W rho)=%.6e", branch, d, t, value)
    return DetectionCertificate(witness, value, tuple(pipeline), filters, branch, t, d)
