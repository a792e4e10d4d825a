"""Shared helpers: small random SPD problems and operator wrappers."""

import numpy as np
import pytest

from oscmodes import ExplicitOperator, SparseSymMatrix


def dense_spd(rng, n, margin=0.5):
    """Random dense SPD matrix with a moderate condition number."""
    a = rng.standard_normal((n, n))
    s = a @ a.T / n + margin * np.eye(n)
    return 0.5 * (s + s.T)


def sparse_spd(rng, n, margin=0.5):
    return SparseSymMatrix.from_dense(dense_spd(rng, n, margin))


def operator_pair(k_dense, t_dense):
    return (ExplicitOperator(SparseSymMatrix.from_dense(k_dense)),
            ExplicitOperator(SparseSymMatrix.from_dense(t_dense)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
