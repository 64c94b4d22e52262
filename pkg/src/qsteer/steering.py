"""Steering operators: entangling Hamiltonians built from target states, their
unitaries and Kraus sets, one averaged channel step, and the steering
(monotone fidelity) check.

Conventions used throughout:

* Joint spaces are ordered ancilla (x) system; the ancilla is always a qubit.
* The ancilla reset state defaults to |0>.  With that convention one averaged
  step at theta=pi/2, phi=0, J=pi/2 maps every input to |+><+| exactly.
* ``SteeringOperator.hamiltonian`` has the coupling J already folded in, and
  ``unitary = exp(-i H)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionMismatchError
from .linalg import ComplexMatrix, dagger, expm_i_herm, kron, partial_trace
from .states import (
    DensityState,
    QubitTarget,
    QutritTarget,
    QUTRIT_EQUAL_KET,
    pauli_string_matrix,
    target_ket,
)

KET0 = np.array([1.0, 0.0], dtype=complex)


@dataclass(frozen=True)
class TargetSpec:
    """A steering task: the desired pure state plus the coupling strength J."""

    target: QubitTarget | QutritTarget
    coupling: float
    label: str | None = None

    @property
    def system_dim(self) -> int:
        return 2 if isinstance(self.target, QubitTarget) else 3


@dataclass(frozen=True)
class KrausSet:
    """Channel operators indexed by ancilla outcome; sum_k A_k^dag A_k = I."""

    operators: tuple[ComplexMatrix, ...]

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def completeness_defect(self) -> float:
        d = self.dim
        acc = sum(dagger(a) @ a for a in self.operators)
        return float(np.max(np.abs(acc - np.eye(d))))


@dataclass(frozen=True)
class SteeringOperator:
    """Entangling generator H, its unitary U = exp(-i H), and ancilla data."""

    hamiltonian: ComplexMatrix
    unitary: ComplexMatrix
    ancilla_init: np.ndarray
    ancilla_dim: int
    system_dim: int
    coupling: float
    target: np.ndarray
    label: str | None = None


def build_qubit_hamiltonian(theta: float, phi: float, coupling: float) -> ComplexMatrix:
    """Steering generator for a qubit target, from its Pauli operator form:

        H = (J/2) (-cos(phi)cos(theta) XX - cos(phi) YY + sin(phi) YX
                   + sin(theta) XZ - sin(phi)cos(theta) XY)

    (first letter ancilla, second system).  Equivalently, the explicit matrix
    with alpha = sin(theta), beta_pm = e^{i phi}(cos(theta) +- 1) on the
    anti-diagonal 2x2 blocks.
    """
    QubitTarget(theta, phi)  # range validation
    h = (
        -math.cos(phi) * math.cos(theta) * pauli_string_matrix("XX")
        - math.cos(phi) * pauli_string_matrix("YY")
        + math.sin(phi) * pauli_string_matrix("YX")
        + math.sin(theta) * pauli_string_matrix("XZ")
        - math.sin(phi) * math.cos(theta) * pauli_string_matrix("XY")
    )
    return (coupling / 2.0) * h


def qutrit_complement_basis(target: QutritTarget) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(psi, perp1, perp2): the target ket and an orthonormal basis of its
    orthogonal complement.

    The equal superposition uses the cube-root-phase vectors
    (1, nu, nu*)/sqrt(3) and (1, nu*, nu)/sqrt(3) with nu = exp(i 2pi/3), so
    the resulting Hamiltonian matrix is bit-exact in its 2/3 and -1/3 entries;
    other targets use Gram-Schmidt against the canonical basis.
    """
    psi = target_ket(target)
    if np.allclose(psi, QUTRIT_EQUAL_KET, atol=1e-12):
        nu = np.exp(2j * math.pi / 3)
        perp1 = np.array([1.0, nu, nu.conjugate()], dtype=complex) / math.sqrt(3.0)
        perp2 = np.array([1.0, nu.conjugate(), nu], dtype=complex) / math.sqrt(3.0)
        return QUTRIT_EQUAL_KET, perp1, perp2
    basis = [psi]
    for k in range(3):
        cand = np.zeros(3, dtype=complex)
        cand[k] = 1.0
        for b in basis:
            cand = cand - (b.conj() @ cand) * b
        norm = np.linalg.norm(cand)
        if norm > 1e-8:
            basis.append(cand / norm)
        if len(basis) == 3:
            break
    return psi, basis[1], basis[2]


def build_qutrit_hamiltonian(target: QutritTarget) -> ComplexMatrix:
    """Steering generator for a qutrit target with a qubit ancilla:

        H = sigma^+ (x) (|perp1><psi| + |perp2><psi|) + h.c.

    with sigma^+ = |0><1| on the ancilla.  For the equal-superposition target
    this is exactly the 6x6 matrix with 2/3 and -1/3 entries on the
    off-diagonal blocks.  The block coupling an ancilla-ground complement
    component to the excited-ancilla target has singular value sqrt(2) for
    every target, so convergence rates are comparable across targets.
    """
    psi, perp1, perp2 = qutrit_complement_basis(target)
    raising = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|
    coupling = np.outer(perp1 + perp2, psi.conj())
    h = kron(raising, coupling)
    return h + dagger(h)


def make_steering_operator(
    spec: TargetSpec, ancilla_init: np.ndarray | None = None
) -> SteeringOperator:
    """Build the full steering operator for a target spec.

    For qubit targets H = build_qubit_hamiltonian(theta, phi, J); for qutrit
    targets H = J * build_qutrit_hamiltonian(target).
    """
    if isinstance(spec.target, QubitTarget):
        h = build_qubit_hamiltonian(spec.target.theta, spec.target.phi, spec.coupling)
        system_dim = 2
    elif isinstance(spec.target, QutritTarget):
        h = spec.coupling * build_qutrit_hamiltonian(spec.target)
        system_dim = 3
    else:
        raise ConfigError(f"unsupported target {type(spec.target).__name__}")
    anc = KET0 if ancilla_init is None else np.asarray(ancilla_init, dtype=complex)
    if anc.shape != (2,) or abs(np.linalg.norm(anc) - 1.0) > 1e-12:
        raise ConfigError("ancilla_init must be a normalized qubit ket")
    return SteeringOperator(
        hamiltonian=h,
        unitary=expm_i_herm(h),
        ancilla_init=anc,
        ancilla_dim=2,
        system_dim=system_dim,
        coupling=spec.coupling,
        target=target_ket(spec.target),
        label=spec.label,
    )


def kraus_from_unitary(op: SteeringOperator) -> KrausSet:
    """Kraus operators A_k = <k|_A U |psi_A>, indexed by ancilla outcome."""
    da, ds = op.ancilla_dim, op.system_dim
    u = op.unitary.reshape(da, ds, da, ds)
    blocks = np.tensordot(u, op.ancilla_init, axes=([2], [0]))
    ops = tuple(np.ascontiguousarray(blocks[k]) for k in range(da))
    return KrausSet(operators=ops)


def averaged_step(rho: DensityState, kraus: KrausSet) -> DensityState:
    """One blind protocol step: rho -> sum_k A_k rho A_k^dagger."""
    mat = rho.matrix if isinstance(rho, DensityState) else np.asarray(rho, dtype=complex)
    if mat.shape[0] != kraus.dim:
        raise DimensionMismatchError(
            f"state dim {mat.shape[0]} does not match Kraus dim {kraus.dim}"
        )
    out = sum(a @ mat @ dagger(a) for a in kraus.operators)
    if isinstance(rho, DensityState):
        return DensityState(matrix=out, dims=rho.dims)
    return out


def joint_step(rho: DensityState, op: SteeringOperator) -> DensityState:
    """One step evaluated the long way: Tr_A[ U (rho_A (x) rho) U^dagger ]."""
    anc = np.outer(op.ancilla_init, op.ancilla_init.conj())
    joint = op.unitary @ kron(anc, rho.matrix) @ dagger(op.unitary)
    out = partial_trace(joint, keep=1, dims=(op.ancilla_dim, op.system_dim))
    return DensityState(matrix=out, dims=rho.dims)


def steering_inequality_holds(
    fidelities, tol: float = 1e-12
) -> tuple[bool, int | None]:
    """Check monotone nondecrease of the fidelity sequence.

    Returns (True, None) if f[n+1] >= f[n] - tol for all n, else
    (False, index of the first violating step).
    """
    f = list(fidelities)
    for n in range(len(f) - 1):
        if f[n + 1] < f[n] - tol:
            return False, n
    return True, None


def analytic_plus_trajectory(s0, coupling: float, steps: int) -> np.ndarray:
    """Closed-form Bloch vector after ``steps`` averaged steps toward |+>.

    s_x(n) = 1 - cos^{2n}(J) (1 - s_x(0)), s_y(n) = cos^n(J) s_y(0),
    s_z(n) = cos^n(J) s_z(0); converges to (1, 0, 0) for 0 < J < pi.
    """
    if not 0.0 < coupling < math.pi:
        raise ConfigError(f"coupling {coupling} outside (0, pi)")
    if steps < 0:
        raise ConfigError("steps must be nonnegative")
    s0 = np.asarray(s0, dtype=float)
    c = math.cos(coupling)
    return np.array(
        [
            1.0 - c ** (2 * steps) * (1.0 - s0[0]),
            c**steps * s0[1],
            c**steps * s0[2],
        ]
    )
