import io
import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from errors import MalformedMatrix, NotHermitian
from linalg import BipartiteOperator
from matrix_io import dumps, load_operator, operator_from_dict, operator_to_dict, save_operator


def _entries(matrix):
    return [[float(z.real), float(z.imag)] for z in np.asarray(matrix, dtype=complex).ravel()]


def test_save_and_load(tmp_path):
    matrix = np.array([[1, 1j, 0, 0], [-1j, 2, 0, 0], [0, 0, 0, 0.5], [0, 0, 0.5, 1]])
    op = BipartiteOperator(2, 2, matrix)
    path = str(tmp_path / "op.json")
    save_operator(op, path)
    loaded = load_operator(path)
    assert (loaded.dim_a, loaded.dim_b) == (2, 2)
    assert_allclose(loaded.matrix, matrix)


def test_layout_is_row_major():
    op = BipartiteOperator(1, 2, np.array([[1, 2 - 1j], [2 + 1j, 3]]))
    data = operator_to_dict(op)
    assert data == {"m": 1, "n": 2, "entries": [[1.0, 0.0], [2.0, -1.0], [2.0, 1.0], [3.0, 0.0]]}


def test_dumps_ends_with_newline():
    assert dumps({"a": 1}).endswith("}\n")


class TestRejections:
    def test_wrong_entry_count(self):
        with pytest.raises(MalformedMatrix):
            operator_from_dict({"m": 2, "n": 2, "entries": _entries(np.eye(3))})

    def test_missing_key(self):
        with pytest.raises(MalformedMatrix):
            operator_from_dict({"m": 2, "entries": _entries(np.eye(4))})

    def test_non_finite(self):
        entries = _entries(np.eye(4))
        entries[0][0] = float("nan")
        with pytest.raises(MalformedMatrix):
            operator_from_dict({"m": 2, "n": 2, "entries": entries})

    def test_not_json(self):
        with pytest.raises(MalformedMatrix):
            load_operator(io.StringIO("{not json"))

    def test_not_an_object(self):
        with pytest.raises(MalformedMatrix):
            load_operator(io.StringIO(json.dumps([1, 2, 3])))

    def test_non_hermitian(self):
        data = {"m": 1, "n": 2, "entries": _entries([[0, 1], [0, 0]])}
        with pytest.raises(NotHermitian):
            operator_from_dict(data)
        op = operator_from_dict(data, allow_non_hermitian=True)
        assert_allclose(op.matrix, [[0, 1], [0, 0]])

    @pytest.mark.parametrize("m", [1.5, "2", True, None, float("inf")])
    def test_non_integer_dimension(self, m):
        with pytest.raises(MalformedMatrix):
            operator_from_dict({"m": m, "n": 2, "entries": _entries(np.eye(4))})

    def test_integral_float_dimension(self):
        op = operator_from_dict({"m": 2.0, "n": 2, "entries": _entries(np.eye(4))})
        assert (op.dim_a, op.dim_b) == (2, 2)

    def test_not_utf8(self, tmp_path):
        path = tmp_path / "latin1.json"
        path.write_bytes(b'{"m": 1, "n": 1, "entries": [[1, 0]], "note": "\xe9\xff"}')
        with pytest.raises(MalformedMatrix):
            load_operator(str(path))
