"""
Matrix JSON interchange: {"m": m, "n": n, "entries": [[re, im], ...]} with
(m*n)^2 row-major entries.
"""

import json
import logging
from typing import IO, Any, Dict, Union

import numpy as np

import config
from errors import MalformedMatrix, NotHermitian
from linalg import BipartiteOperator, hermiticity_defect, scale

logger = logging.getLogger(__name__)

PathOrStream = Union[str, IO[str]]


def operator_to_dict(op: BipartiteOperator) -> Dict[str, Any]:
    flat = op.matrix.ravel()
    return {
        "m": op.dim_a,
        "n": op.dim_b,
        "entries": [[float(z.real), float(z.imag)] for z in flat],
    }


def _dimension(value: Any) -> int:
    # bool is an int subclass; 2.0 is accepted, 1.5 is not
    if isinstance(value, bool) or not isinstance(value, (int, float)) or value != int(value):
        raise ValueError(f"dimension {value!r} is not an integer")
    return int(value)


def operator_from_dict(data: Dict[str, Any], allow_non_hermitian: bool = False) -> BipartiteOperator:
    try:
        m, n = _dimension(data["m"]), _dimension(data["n"])
        entries = np.asarray(data["entries"], dtype=float)
    except (KeyError, TypeError, ValueError, OverflowError) as exc:
        raise MalformedMatrix(f"matrix JSON needs integer m, n and numeric entries: {exc}") from exc

    order = m * n
    if m < 1 or n < 1:
        raise MalformedMatrix(f"local dimensions must be positive, got m={m}, n={n}")
    if entries.shape != (order * order, 2):
        raise MalformedMatrix(
            f"expected {order * order} [re, im] pairs for m={m}, n={n}, got shape {entries.shape}"
        )
    if not np.all(np.isfinite(entries)):
        raise MalformedMatrix("entries contain NaN or infinity")

    matrix = (entries[:, 0] + 1j * entries[:, 1]).reshape(order, order)
    defect = hermiticity_defect(matrix)
    if defect > config.HERMITIAN_TOL * scale(matrix):
        if not allow_non_hermitian:
            raise NotHermitian(f"input matrix has Hermiticity defect {defect:.3e}")
        logger.warning("accepting non-Hermitian input (defect %.3e)", defect)
    return BipartiteOperator(m, n, matrix)


def load_operator(filepath: PathOrStream, allow_non_hermitian: bool = False) -> BipartiteOperator:
    try:
        if isinstance(filepath, str):
            with open(filepath, encoding="utf-8") as handle:
                data = json.load(handle)
        else:
            data = json.load(filepath)
    except json.JSONDecodeError as exc:
        raise MalformedMatrix(f"not valid JSON: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise MalformedMatrix(f"not UTF-8 text: {exc}") from exc
    if not isinstance(data, dict):
        raise MalformedMatrix("matrix JSON must be an object")
    return operator_from_dict(data, allow_non_hermitian=allow_non_hermitian)


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=False) + "\n"


def write_json(data: Any, filepath: PathOrStream):
    text = dumps(data)
    if isinstance(filepath, str):
        with open(filepath, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        filepath.write(text)


def save_operator(op: BipartiteOperator, filepath: PathOrStream):
    write_json(operator_to_dict(op), filepath)
