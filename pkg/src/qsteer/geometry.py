"""Cartan (KAK) decomposition of two-qubit unitaries and Weyl-chamber
coordinates.

A two-qubit unitary factors as

    U = exp(i gamma) (k1a (x) k1b) A(c) (k2a (x) k2b),
    A(c) = exp(i/2 (c1 XX + c2 YY + c3 ZZ)),

with the locals in U(2).  Coordinates are reported in radians and
canonicalized into the cell

    0 <= |c3| <= c2 <= c1 <= pi/2,   c3 >= 0 when c1 = pi/2.

This cell is one fundamental domain of local equivalence; the full [0, pi]
tetrahedron folds onto it via (c1, c2, c3) -> (pi - c1, c2, -c3).  Landmark
points: CNOT/CPHASE(pi) at (pi/2, 0, 0), the maximally entangling
iSWAP-class point at (pi/2, pi/2, 0), SWAP at (pi/2, pi/2, pi/2).  A
steering operator with coupling J sits at (J, J, 0).

The constructive algorithm conjugates into the magic (Bell) basis, where the
local group becomes SO(4) and A(c) becomes diagonal; degenerate spectra
(e.g. c1 = c2 on the steering line) are handled by simultaneous
diagonalization of the real and imaginary parts of U^T U.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, NumericalError
from .linalg import ComplexMatrix, kron, phase_invariant_distance, require_unitary
from .states import SX, SY, SZ

MAGIC = (
    np.array(
        [[1, 0, 0, 1j], [0, 1j, 1, 0], [0, 1j, -1, 0], [1, 0, 0, -1j]], dtype=complex
    )
    / math.sqrt(2.0)
)
MAGIC_DAG = MAGIC.conj().T

# Maps magic-basis eigenphases (t1..t4) to (w, x, y, z) in A = e^{iw} exp(i(x XX + y YY + z ZZ)).
_GAMMA = np.array(
    [[1, 1, 1, 1], [1, 1, -1, -1], [-1, 1, -1, 1], [1, -1, -1, 1]], dtype=float
) / 4.0
# Inverse direction: phases from (x, y, z).
_THETA_OF_XYZ = np.array(
    [[1, -1, 1], [1, 1, -1], [-1, -1, -1], [-1, 1, 1]], dtype=float
)

CNOT_GATE = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
SWAP_GATE = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


def cphase_gate(angle: float) -> ComplexMatrix:
    """diag(1, 1, 1, e^{i angle}); CPHASE(pi) is the CZ gate."""
    return np.diag([1.0, 1.0, 1.0, np.exp(1j * angle)]).astype(complex)


def canonical_a_matrix(c) -> ComplexMatrix:
    """A(c) = exp(i/2 (c1 XX + c2 YY + c3 ZZ)), evaluated exactly in the
    magic basis where it is diagonal."""
    xyz = np.asarray(c, dtype=float) / 2.0
    theta = _THETA_OF_XYZ @ xyz
    return MAGIC @ np.diag(np.exp(1j * theta)) @ MAGIC_DAG


@dataclass(frozen=True)
class KakDecomposition:
    """U = e^{i global_phase} (k1_local[0] (x) k1_local[1]) A(c) (k2_local[0] (x) k2_local[1])."""

    k1_local: tuple[ComplexMatrix, ComplexMatrix]
    k2_local: tuple[ComplexMatrix, ComplexMatrix]
    c: np.ndarray
    global_phase: float

    def reassemble(self) -> ComplexMatrix:
        left = kron(self.k1_local[0], self.k1_local[1])
        right = kron(self.k2_local[0], self.k2_local[1])
        return np.exp(1j * self.global_phase) * (left @ canonical_a_matrix(self.c) @ right)


def _check_two_qubit_unitary(u: ComplexMatrix, tol: float) -> ComplexMatrix:
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4):
        raise DimensionMismatchError(f"expected a 4x4 matrix, got {u.shape}")
    require_unitary(u, tol)
    return u


def _diag_unitary_symmetric(m: ComplexMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Diagonalize a symmetric unitary with a real orthogonal eigenbasis.

    Writes m = x + i y with commuting real symmetric x, y and diagonalizes a
    generic linear combination; several mixing coefficients are tried so that
    accidental eigenvalue collisions of the combination do not spoil the
    basis.  Returns (complex eigenvalues, real orthogonal column matrix).
    """
    x, y = m.real, m.imag
    best: tuple[float, np.ndarray, np.ndarray] | None = None
    for t in (0.7390851332151607, 1.2360679774997896, 0.5477225575051661, 2.6457513110645907):
        _, p = np.linalg.eigh(x + t * y)
        rx = p.T @ x @ p
        ry = p.T @ y @ p
        off = max(
            float(np.max(np.abs(rx - np.diag(np.diag(rx))))),
            float(np.max(np.abs(ry - np.diag(np.diag(ry))))),
        )
        if best is None or off < best[0]:
            best = (off, np.diag(rx) + 1j * np.diag(ry), p)
        if off < 1e-11:
            break
    assert best is not None
    if best[0] > 1e-8:
        raise NumericalError(f"simultaneous diagonalization residual {best[0]:.3e}")
    return best[1], best[2]


def _kron_factor(m: ComplexMatrix) -> tuple[complex, ComplexMatrix, ComplexMatrix]:
    """Split m = g * (f1 (x) f2) with unit-determinant 2x2 factors."""
    a, b = max(
        ((i, j) for i in range(4) for j in range(4)), key=lambda t: abs(m[t[0], t[1]])
    )
    f1 = np.zeros((2, 2), dtype=complex)
    f2 = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            f1[(a >> 1) ^ i, (b >> 1) ^ j] = m[a ^ (i << 1), b ^ (j << 1)]
            f2[(a & 1) ^ i, (b & 1) ^ j] = m[a ^ i, b ^ j]
    f1 /= np.sqrt(np.linalg.det(f1)) or 1
    f2 /= np.sqrt(np.linalg.det(f2)) or 1
    g = m[a, b] / (f1[a >> 1, b >> 1] * f2[a & 1, b & 1])
    if g.real < 0:
        f1 *= -1
        g = -g
    if not np.allclose(m, g * np.kron(f1, f2), atol=1e-8):
        raise NumericalError("matrix does not factor as a Kronecker product")
    return g, f1, f2


_AXES = (SX, SY, SZ)


def _canonicalize_interaction(x: float, y: float, z: float, atol: float = 1e-9):
    """Fold interaction angles into the canonical cell, tracking the local
    fixups.  Maintains A(x0,y0,z0) = phase (l0 (x) l1) A(v) (r0 (x) r1)."""
    v = [x, y, z]
    l0 = np.eye(2, dtype=complex)
    l1 = np.eye(2, dtype=complex)
    r0 = np.eye(2, dtype=complex)
    r1 = np.eye(2, dtype=complex)
    phase = [1.0 + 0j]

    def shift(k: int, step: int) -> None:
        nonlocal r0, r1
        v[k] += step * math.pi / 2
        phase[0] *= (-1j) ** step
        if step % 2:
            r0 = _AXES[k] @ r0
            r1 = _AXES[k] @ r1

    def negate(k1: int, k2: int) -> None:
        nonlocal l0, r0
        v[k1] *= -1
        v[k2] *= -1
        s = _AXES[3 - k1 - k2]
        l0 = l0 @ s
        r0 = s @ r0

    def swap(k1: int, k2: int) -> None:
        nonlocal l0, l1, r0, r1
        v[k1], v[k2] = v[k2], v[k1]
        h = (_AXES[k1] + _AXES[k2]) / math.sqrt(2.0)
        l0 = l0 @ h
        l1 = l1 @ h
        r0 = h @ r0
        r1 = h @ r1

    def canonical_shift(k: int) -> None:
        while v[k] <= -math.pi / 4:
            shift(k, +1)
        while v[k] > math.pi / 4:
            shift(k, -1)

    for k in range(3):
        canonical_shift(k)
    if abs(v[0]) < abs(v[1]):
        swap(0, 1)
    if abs(v[1]) < abs(v[2]):
        swap(1, 2)
    if abs(v[0]) < abs(v[1]):
        swap(0, 1)
    if v[0] < 0:
        negate(0, 2)
    if v[1] < 0:
        negate(1, 2)
    canonical_shift(2)
    if v[0] > math.pi / 4 - atol and v[2] < 0:
        shift(0, -1)
        negate(0, 2)
    return np.array(v), (l0, l1), (r0, r1), phase[0]


def kak_decompose(u: ComplexMatrix, tol: float = 1e-10) -> KakDecomposition:
    """Constructive KAK decomposition of a 4x4 unitary."""
    u = _check_two_qubit_unitary(u, tol)
    det = np.linalg.det(u)
    gamma = float(np.angle(det)) / 4.0
    su = u * np.exp(-1j * gamma)
    ub = MAGIC_DAG @ su @ MAGIC
    m = ub.T @ ub

    d, p = _diag_unitary_symmetric(m)
    if np.linalg.det(p) < 0:
        p = p.copy()
        p[:, 0] = -p[:, 0]
    theta = np.angle(d) / 2.0
    # det F must be +1 so both orthogonal factors land in SO(4)
    total = float(np.sum(theta))
    residue = total - 2.0 * math.pi * round(total / (2.0 * math.pi))
    if abs(residue) > math.pi / 2:
        theta[0] -= math.copysign(math.pi, residue)
    o2 = p.T
    o1 = ub @ p @ np.diag(np.exp(-1j * theta))
    if float(np.max(np.abs(o1.imag))) > 1e-8:
        raise NumericalError("left orthogonal factor has a complex residue")
    o1 = o1.real

    k1 = MAGIC @ o1 @ MAGIC_DAG
    k2 = MAGIC @ o2 @ MAGIC_DAG
    w, x, y, z = _GAMMA @ theta

    v, (l0, l1), (r0, r1), fold_phase = _canonicalize_interaction(x, y, z)
    g1, a0, a1 = _kron_factor(k1)
    g2, b0, b1 = _kron_factor(k2)
    phase = gamma + w + float(np.angle(g1 * g2 * fold_phase))
    return KakDecomposition(
        k1_local=(a0 @ l0, a1 @ l1),
        k2_local=(r0 @ b0, r1 @ b1),
        c=2.0 * v,
        global_phase=phase,
    )


def _canonicalize_k_vector(k: np.ndarray, atol: float = 1e-9) -> np.ndarray:
    k = np.mod(k + math.pi / 4, math.pi / 2) - math.pi / 4
    order = np.argsort(np.abs(k))[::-1]
    k = k[order]
    if k[0] < 0:
        k[0], k[2] = -k[0], -k[2]
    if k[1] < 0:
        k[1], k[2] = -k[1], -k[2]
    if k[0] > math.pi / 4 - atol and k[2] < 0:
        k[2] = -k[2]
    return k


def canonicalize_weyl_vector(c) -> np.ndarray:
    """Canonical representative of interaction coordinates (radians)."""
    return 2.0 * _canonicalize_k_vector(np.asarray(c, dtype=float) / 2.0)


def weyl_coordinates(u: ComplexMatrix, tol: float = 1e-10) -> np.ndarray:
    """Canonical Weyl coordinates from the magic-basis spectrum of U^T U.

    Independent of :func:`kak_decompose` (eigenvalues only, no eigenvectors).
    """
    u = _check_two_qubit_unitary(u, tol)
    ub = MAGIC_DAG @ u @ MAGIC
    m = ub.T @ ub
    evals = np.linalg.eigvals(m)
    # U(4) -> SU(4) phase correction applied on the spectrum
    det_phase = np.log(-1j * np.linalg.det(u)).imag + math.pi / 2
    evals = evals * np.exp(-1j * det_phase / 2.0)
    s2 = np.sort(np.log(-1j * evals).imag + math.pi / 2)[::-1]
    n_shift = int(round(s2.sum() / (2.0 * math.pi)))
    if n_shift > 0:
        s2[:n_shift] -= 2.0 * math.pi
    elif n_shift == -1:
        s2[:3] += 2.0 * math.pi
    k = (_GAMMA @ s2)[1:] / 2.0
    return 2.0 * _canonicalize_k_vector(k)


def locally_equivalent(u: ComplexMatrix, v: ComplexMatrix, tol: float = 1e-8) -> bool:
    """True iff u and v differ only by single-qubit rotations and phase."""
    cu = weyl_coordinates(u)
    cv = weyl_coordinates(v)
    return bool(np.max(np.abs(cu - cv)) <= tol)


def reassembly_distance(u: ComplexMatrix, dec: KakDecomposition) -> float:
    """Phase-invariant distance between u and the reassembled decomposition."""
    return phase_invariant_distance(u, dec.reassemble())
