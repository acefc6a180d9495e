import numpy as np
import pytest

from linalg import BipartiteOperator


@pytest.fixture(autouse=True)
def few_threads(monkeypatch):
    monkeypatch.setenv("EWS_THREADS", "2")


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def random_hermitian(rng, size):
    g = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    return (g + g.conj().T) / 2


def bell(m=2, n=2):
    """(|00> + |11>)/sqrt(2) as a dense vector in C^m (x) C^n."""
    vector = np.zeros(m * n, dtype=complex)
    vector[0] = vector[n + 1] = 1 / np.sqrt(2)
    return vector


def operator_of(vector, m, n):
    return BipartiteOperator(m, n, np.outer(vector, vector.conj()))
