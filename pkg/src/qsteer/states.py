"""Target-state parametrizations, density states, Bloch/Gell-Mann coordinates,
the single-qubit stabilizer catalog, and fidelity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DimensionMismatchError
from .linalg import ComplexMatrix, hermiticity_defect
from .tolerances import TOL

TWO_PI = 2.0 * math.pi

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = {"I": I2, "X": SX, "Y": SY, "Z": SZ}

# Standard Gell-Mann ordering: symmetric (1,4,6), antisymmetric (2,5,7),
# diagonal (3,8); Tr(l_a l_b) = 2 delta_ab.
GELL_MANN = (
    np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=complex),
    np.array([[0, -1j, 0], [1j, 0, 0], [0, 0, 0]], dtype=complex),
    np.array([[1, 0, 0], [0, -1, 0], [0, 0, 0]], dtype=complex),
    np.array([[0, 0, 1], [0, 0, 0], [1, 0, 0]], dtype=complex),
    np.array([[0, 0, -1j], [0, 0, 0], [1j, 0, 0]], dtype=complex),
    np.array([[0, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=complex),
    np.array([[0, 0, 0], [0, 0, -1j], [0, 1j, 0]], dtype=complex),
    np.diag([1, 1, -2]).astype(complex) / math.sqrt(3),
)


def pauli_string_matrix(label: str) -> ComplexMatrix:
    """Tensor product of single-qubit Paulis, e.g. "XZ" -> X (x) Z."""
    out = np.array([[1.0 + 0j]])
    for ch in label:
        try:
            out = np.kron(out, PAULIS[ch])
        except KeyError:
            raise ConfigError(f"unknown Pauli letter {ch!r} in {label!r}") from None
    return out


@dataclass(frozen=True)
class QubitTarget:
    """Pure qubit target cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>."""

    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ConfigError(f"theta={self.theta} outside [0, pi]")
        if not 0.0 <= self.phi < TWO_PI:
            raise ConfigError(f"phi={self.phi} outside [0, 2pi)")


@dataclass(frozen=True)
class QutritTarget:
    """Pure qutrit target parametrized by (xi, theta, phi01, phi02).

    Amplitudes: sin(xi/2)cos(theta/2), e^{i phi01} sin(xi/2)sin(theta/2),
    e^{i phi02} cos(xi/2).  Phases are accepted on the closed interval
    [0, 2pi] and 2pi is canonicalized to 0.
    """

    xi: float
    theta: float
    phi01: float
    phi02: float

    def __post_init__(self):
        for name in ("xi", "theta"):
            v = getattr(self, name)
            if not 0.0 <= v <= math.pi:
                raise ConfigError(f"{name}={v} outside [0, pi]")
        for name in ("phi01", "phi02"):
            v = getattr(self, name)
            if not 0.0 <= v <= TWO_PI:
                raise ConfigError(f"{name}={v} outside [0, 2pi]")
            if v == TWO_PI:
                object.__setattr__(self, name, 0.0)


def target_ket(spec: QubitTarget | QutritTarget) -> np.ndarray:
    """Unit-norm ket for a target spec, global phase fixed so the first
    nonzero amplitude is real nonnegative."""
    if isinstance(spec, QubitTarget):
        ket = np.array(
            [math.cos(spec.theta / 2), np.exp(1j * spec.phi) * math.sin(spec.theta / 2)],
            dtype=complex,
        )
    elif isinstance(spec, QutritTarget):
        ket = np.array(
            [
                math.sin(spec.xi / 2) * math.cos(spec.theta / 2),
                np.exp(1j * spec.phi01) * math.sin(spec.xi / 2) * math.sin(spec.theta / 2),
                np.exp(1j * spec.phi02) * math.cos(spec.xi / 2),
            ],
            dtype=complex,
        )
    else:
        raise ConfigError(f"unsupported target spec {type(spec).__name__}")
    for amp in ket:
        if abs(amp) > 1e-15:
            ket = ket * np.exp(-1j * np.angle(amp))
            break
    ket.setflags(write=False)
    return ket


@dataclass(frozen=True)
class DensityState:
    """Positive semidefinite unit-trace matrix with declared subsystem dims."""

    matrix: ComplexMatrix
    dims: tuple[int, ...]

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        total = int(np.prod(self.dims))
        if mat.shape != (total, total):
            raise DimensionMismatchError(
                f"dims {self.dims} do not match matrix shape {mat.shape}"
            )
        if abs(np.trace(mat) - 1.0) > 1e-10:
            raise DimensionMismatchError(f"trace {np.trace(mat)} is not 1 within 1e-10")
        if hermiticity_defect(mat) > TOL.hermiticity:
            raise DimensionMismatchError("density matrix is not Hermitian within 1e-12")
        if float(np.min(np.linalg.eigvalsh(mat))) < -1e-9:
            raise DimensionMismatchError("density matrix has eigenvalue below -1e-9")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def pure_state(ket: np.ndarray, dims: tuple[int, ...] | None = None) -> DensityState:
    """|ket><ket| as a DensityState."""
    ket = np.asarray(ket, dtype=complex)
    if dims is None:
        dims = (ket.shape[0],)
    return DensityState(matrix=np.outer(ket, ket.conj()), dims=dims)


def bloch_vector(rho: DensityState) -> np.ndarray:
    """Bloch coordinates s_k = Tr(rho sigma_k) of a single-qubit state."""
    if rho.dim != 2:
        raise DimensionMismatchError("bloch_vector needs a single-qubit state")
    m = rho.matrix
    return np.array([np.trace(m @ p).real for p in (SX, SY, SZ)])


def from_bloch_vector(s) -> DensityState:
    """rho = (I + s . sigma) / 2."""
    s = np.asarray(s, dtype=float)
    if s.shape != (3,):
        raise DimensionMismatchError("bloch vector must have 3 components")
    if np.linalg.norm(s) > 1.0 + 1e-9:
        raise DimensionMismatchError(f"bloch vector norm {np.linalg.norm(s)} exceeds 1")
    m = 0.5 * (I2 + s[0] * SX + s[1] * SY + s[2] * SZ)
    return DensityState(matrix=m, dims=(2,))


def gellmann_vector(rho: DensityState) -> np.ndarray:
    """Coordinates n_i = Tr(rho l_i) / 2 of a single-qutrit state."""
    if rho.dim != 3:
        raise DimensionMismatchError("gellmann_vector needs a single-qutrit state")
    m = rho.matrix
    return np.array([0.5 * np.trace(m @ l).real for l in GELL_MANN])


def from_gellmann_vector(n) -> DensityState:
    """rho = I/3 + n . lambda."""
    n = np.asarray(n, dtype=float)
    if n.shape != (8,):
        raise DimensionMismatchError("gell-mann vector must have 8 components")
    m = np.eye(3, dtype=complex) / 3
    for ni, li in zip(n, GELL_MANN):
        m = m + ni * li
    return DensityState(matrix=m, dims=(3,))


def fidelity(rho: DensityState | ComplexMatrix, ket: np.ndarray) -> float:
    """<ket| rho |ket>, clamped to [0, 1]."""
    mat = rho.matrix if isinstance(rho, DensityState) else np.asarray(rho, dtype=complex)
    ket = np.asarray(ket, dtype=complex)
    if mat.shape[0] != ket.shape[0]:
        raise DimensionMismatchError(
            f"state dim {mat.shape[0]} does not match ket dim {ket.shape[0]}"
        )
    val = float((ket.conj() @ mat @ ket).real)
    return min(1.0, max(0.0, val))


def random_density(dim: int, seed: int) -> DensityState:
    """Ginibre-distributed random density matrix, deterministic per seed.

    Uses the Philox counter PRNG so draws replay across platforms.
    """
    if dim not in (2, 3, 4, 6):
        raise DimensionMismatchError(f"unsupported dimension {dim}")
    rng = np.random.Generator(np.random.Philox(key=seed))
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = g @ g.conj().T
    m = m / np.trace(m).real
    dims = {2: (2,), 3: (3,), 4: (2, 2), 6: (2, 3)}[dim]
    return DensityState(matrix=m, dims=dims)


@dataclass(frozen=True)
class StabilizerEntry:
    """One row of the single-qubit stabilizer catalog.

    ``hamiltonian_terms`` is the signed Pauli-string pair (sign, "AB") such
    that the steering generator is (J/2) * sum(sign * sigma_A^a sigma_S^b).
    """

    label: str
    theta: float
    phi: float
    bloch: tuple[float, float, float]
    hamiltonian_terms: tuple[tuple[float, str], tuple[float, str]]

    target: QubitTarget = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "target", QubitTarget(self.theta, self.phi))


_CATALOG = (
    StabilizerEntry("0", 0.0, 0.0, (0.0, 0.0, 1.0), ((-1.0, "XX"), (-1.0, "YY"))),
    StabilizerEntry("1", math.pi, 0.0, (0.0, 0.0, -1.0), ((1.0, "XX"), (-1.0, "YY"))),
    StabilizerEntry("+", math.pi / 2, 0.0, (1.0, 0.0, 0.0), ((1.0, "XZ"), (-1.0, "YY"))),
    StabilizerEntry("-", math.pi / 2, math.pi, (-1.0, 0.0, 0.0), ((1.0, "XZ"), (1.0, "YY"))),
    StabilizerEntry("i", math.pi / 2, math.pi / 2, (0.0, 1.0, 0.0), ((1.0, "YX"), (1.0, "XZ"))),
    StabilizerEntry(
        "-i", math.pi / 2, 3 * math.pi / 2, (0.0, -1.0, 0.0), ((-1.0, "YX"), (1.0, "XZ"))
    ),
)


def stabilizer_catalog() -> tuple[StabilizerEntry, ...]:
    """The six single-qubit stabilizer states with their steering data."""
    return _CATALOG


# Exact equal-superposition qutrit target (|0>+|1>+|2>)/sqrt(3); the canonical
# amplitude vector is stored and the (xi, theta) parameters are derived from it
# to avoid re-deriving 1/sqrt(3) through trigonometry in hot paths.
QUTRIT_EQUAL_LABEL = "qutrit-equal"
QUTRIT_EQUAL_KET = np.full(3, 1.0 / math.sqrt(3.0), dtype=complex)
QUTRIT_EQUAL_KET.setflags(write=False)
QUTRIT_EQUAL_TARGET = QutritTarget(
    xi=2.0 * math.atan(math.sqrt(2.0)), theta=math.pi / 2, phi01=0.0, phi02=0.0
)
