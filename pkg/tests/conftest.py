"""Shared test helpers: independent oracles and random-object generators.

Oracles here deliberately avoid the library code paths they are used to
check (explicit index loops instead of reshapes, scipy.linalg.expm instead
of the eigendecomposition exponential, and so on).
"""

import numpy as np
import pytest


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def ginibre_density(n: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


def ptrace_loop(mat: np.ndarray, dims, keep: int) -> np.ndarray:
    """Partial trace by explicit index arithmetic (oracle path)."""
    dims = tuple(dims)
    dk = dims[keep]
    out = np.zeros((dk, dk), dtype=complex)
    strides = []
    acc = 1
    for d in reversed(dims):
        strides.append(acc)
        acc *= d
    strides = strides[::-1]

    def flat(indices):
        return sum(i * s for i, s in zip(indices, strides))

    import itertools

    other = [i for i in range(len(dims)) if i != keep]
    for a in range(dk):
        for b in range(dk):
            total = 0.0 + 0.0j
            for rest in itertools.product(*(range(dims[i]) for i in other)):
                ia = [0] * len(dims)
                ib = [0] * len(dims)
                ia[keep], ib[keep] = a, b
                for pos, val in zip(other, rest):
                    ia[pos] = ib[pos] = val
                total += mat[flat(ia), flat(ib)]
            out[a, b] = total
    return out


def channel_superoperator(kraus_ops) -> np.ndarray:
    """Row-major-vectorized superoperator: S vec(rho) = vec(sum A rho A^dag)
    with vec = reshape(-1), using vec(A X B) = (A (x) B^T) vec(X)."""
    d = kraus_ops[0].shape[0]
    s = np.zeros((d * d, d * d), dtype=complex)
    for a in kraus_ops:
        s += np.kron(a, a.conj())
    return s


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
