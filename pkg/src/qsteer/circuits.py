"""Gate-level circuit IR, steering-circuit synthesis, evaluation, and a
QASM-like text format.

Wire dimensions are explicit because qutrit wires exist.  On a dim-3 wire the
plain ``rx``/``rz``/``u3`` gates act on the {|0>, |1>} subspace and leave |2>
untouched; ``rx12``/``rz12`` act on the {|1>, |2>} subspace.  The qubit-qutrit
entangler ``cx23`` follows its hardware truth table: identity on every basis
state except |1>|2> -> i |1>|2>.

Global phase is tracked as a scalar per circuit (emitted as a trailing
``phase(g);`` line) so that phase-sensitive verification stays honest.

Text format (UTF-8, LF line endings, floats printed with 17 significant
digits), EBNF::

    circuit   = header , { wiredecl } , { gateline } , phaseline ;
    header    = "wires: " , int , ";\n" ;
    wiredecl  = "wire w" , int , ": dim " , ( "2" | "3" ) , ";\n" ;
    gateline  = name , [ "(" , float , { ", " , float } , ")" ] ,
                [ " w" , int , { ", w" , int } ] , ";\n" ;
    phaseline = "phase(" , float , ");\n" ;
    name      = "rx" | "rz" | "u3" | "cx" | "cx23" | "rx12" | "rz12" | "phase" ;
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NumericalError
from .geometry import CNOT_GATE, kak_decompose
from .linalg import ComplexMatrix, dagger, expm_i_herm, phase_invariant_distance
from .states import QubitTarget, QutritTarget
from .steering import TargetSpec, build_qubit_hamiltonian, build_qutrit_hamiltonian, qutrit_complement_basis

RX = "rx"
RZ = "rz"
U3 = "u3"
CNOT = "cx"
QUBIT_QUTRIT_CNOT = "cx23"
SUBSPACE_RX12 = "rx12"
SUBSPACE_RZ12 = "rz12"
PHASE = "phase"

# kind -> (n_params, n_wires)
_GATE_ARITY = {
    RX: (1, 1),
    RZ: (1, 1),
    U3: (3, 1),
    CNOT: (0, 2),
    QUBIT_QUTRIT_CNOT: (0, 2),
    SUBSPACE_RX12: (1, 1),
    SUBSPACE_RZ12: (1, 1),
    PHASE: (1, 0),
}

CX23_GATE = np.diag([1, 1, 1, 1, 1, 1j]).astype(complex)


@dataclass(frozen=True)
class Gate:
    kind: str
    params: tuple[float, ...] = ()
    wires: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in _GATE_ARITY:
            raise ConfigError(f"unknown gate kind {self.kind!r}")
        n_params, n_wires = _GATE_ARITY[self.kind]
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        object.__setattr__(self, "wires", tuple(int(w) for w in self.wires))
        if len(self.params) != n_params:
            raise ConfigError(f"{self.kind} takes {n_params} params, got {len(self.params)}")
        if len(self.wires) != n_wires:
            raise ConfigError(f"{self.kind} takes {n_wires} wires, got {len(self.wires)}")
        if len(set(self.wires)) != len(self.wires):
            raise ConfigError(f"{self.kind} wires must be distinct")
        if not all(math.isfinite(p) for p in self.params):
            raise ConfigError(f"{self.kind} has non-finite parameter")


@dataclass(frozen=True)
class Circuit:
    wire_dims: tuple[int, ...]
    gates: tuple[Gate, ...]
    global_phase: float = 0.0
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "wire_dims", tuple(int(d) for d in self.wire_dims))
        object.__setattr__(self, "gates", tuple(self.gates))
        if not all(d in (2, 3) for d in self.wire_dims):
            raise ConfigError(f"wire dims must be 2 or 3, got {self.wire_dims}")
        for g in self.gates:
            self._check_gate(g)

    def _check_gate(self, g: Gate) -> None:
        for w in g.wires:
            if not 0 <= w < len(self.wire_dims):
                raise ConfigError(f"gate {g.kind} uses undeclared wire w{w}")
        if g.kind in (SUBSPACE_RX12, SUBSPACE_RZ12) and self.wire_dims[g.wires[0]] != 3:
            raise ConfigError(f"{g.kind} requires a dim-3 wire")
        if g.kind == CNOT:
            if any(self.wire_dims[w] != 2 for w in g.wires):
                raise ConfigError("cx requires two dim-2 wires")
        if g.kind == QUBIT_QUTRIT_CNOT:
            if self.wire_dims[g.wires[0]] != 2 or self.wire_dims[g.wires[1]] != 3:
                raise ConfigError("cx23 requires (dim-2 control, dim-3 target) wires")

    @property
    def dim(self) -> int:
        return int(np.prod(self.wire_dims))

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates if g.kind == kind)


def rx_matrix(a: float) -> ComplexMatrix:
    c, s = math.cos(a / 2), math.sin(a / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def ry_matrix(a: float) -> ComplexMatrix:
    c, s = math.cos(a / 2), math.sin(a / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz_matrix(a: float) -> ComplexMatrix:
    return np.diag([np.exp(-1j * a / 2), np.exp(1j * a / 2)])


def u3_matrix(theta: float, phi: float, lam: float) -> ComplexMatrix:
    """U3(theta, phi, lam) = RZ(phi) RY(theta) RZ(lam)."""
    return rz_matrix(phi) @ ry_matrix(theta) @ rz_matrix(lam)


def _embed_subspace(m2: ComplexMatrix, dim: int, lo: int) -> ComplexMatrix:
    out = np.eye(dim, dtype=complex)
    out[lo : lo + 2, lo : lo + 2] = m2
    return out


def _gate_local_matrix(g: Gate, dims: tuple[int, ...]) -> ComplexMatrix:
    """Operator on the gate's own wires, in gate wire order."""
    if g.kind == RX:
        return _embed_subspace(rx_matrix(g.params[0]), dims[0], 0)
    if g.kind == RZ:
        return _embed_subspace(rz_matrix(g.params[0]), dims[0], 0)
    if g.kind == U3:
        return _embed_subspace(u3_matrix(*g.params), dims[0], 0)
    if g.kind == SUBSPACE_RX12:
        return _embed_subspace(rx_matrix(g.params[0]), 3, 1)
    if g.kind == SUBSPACE_RZ12:
        return _embed_subspace(rz_matrix(g.params[0]), 3, 1)
    if g.kind == CNOT:
        return CNOT_GATE
    if g.kind == QUBIT_QUTRIT_CNOT:
        return CX23_GATE
    raise ConfigError(f"gate {g.kind} has no local matrix")


def _embed(op: ComplexMatrix, wires: tuple[int, ...], wire_dims: tuple[int, ...]) -> ComplexMatrix:
    """Embed an operator acting on ``wires`` (in that order) into the full space."""
    n = len(wire_dims)
    rest = [i for i in range(n) if i not in wires]
    order = list(wires) + rest
    rest_dim = int(np.prod([wire_dims[i] for i in rest])) if rest else 1
    full = np.kron(op, np.eye(rest_dim, dtype=complex))
    dims_ordered = [wire_dims[i] for i in order]
    tensor = full.reshape(dims_ordered + dims_ordered)
    perm = [order.index(i) for i in range(n)]
    tensor = tensor.transpose(perm + [p + n for p in perm])
    d = int(np.prod(wire_dims))
    return np.ascontiguousarray(tensor.reshape(d, d))


def evaluate_circuit(circuit: Circuit) -> ComplexMatrix:
    """Unitary of the circuit: gates applied in sequence order, times the
    global phase."""
    d = circuit.dim
    total = np.eye(d, dtype=complex)
    for g in circuit.gates:
        if g.kind == PHASE:
            total = np.exp(1j * g.params[0]) * total
            continue
        dims = tuple(circuit.wire_dims[w] for w in g.wires)
        total = _embed(_gate_local_matrix(g, dims), g.wires, circuit.wire_dims) @ total
    return np.exp(1j * circuit.global_phase) * total


def zyz_angles(u: ComplexMatrix) -> tuple[float, float, float, float]:
    """(theta, phi, lam, phase) with u = e^{i phase} U3(theta, phi, lam)."""
    u = np.asarray(u, dtype=complex)
    g = 0.5 * float(np.angle(np.linalg.det(u)))
    su = u * np.exp(-1j * g)
    theta = 2.0 * math.atan2(abs(su[1, 0]), abs(su[0, 0]))
    if abs(su[1, 0]) < 1e-12:
        phi, lam = 2.0 * float(np.angle(su[1, 1])), 0.0
    elif abs(su[0, 0]) < 1e-12:
        phi, lam = 2.0 * float(np.angle(su[1, 0])), 0.0
    else:
        phi = float(np.angle(su[1, 1]) + np.angle(su[1, 0]))
        lam = float(np.angle(su[1, 1]) - np.angle(su[1, 0]))
    return theta, phi, lam, g


def zxz_angles(u: ComplexMatrix) -> tuple[float, float, float, float]:
    """(alpha, beta, xi, phase) with u = e^{i phase} RZ(alpha) RX(beta) RZ(xi)."""
    u = np.asarray(u, dtype=complex)
    g = 0.5 * float(np.angle(np.linalg.det(u)))
    su = u * np.exp(-1j * g)
    beta = 2.0 * math.atan2(abs(su[1, 0]), abs(su[0, 0]))
    if abs(su[1, 0]) < 1e-12:
        alpha, xi = 2.0 * float(np.angle(su[1, 1])), 0.0
    elif abs(su[0, 0]) < 1e-12:
        alpha, xi = 2.0 * float(np.angle(su[1, 0])) + math.pi, 0.0
    else:
        alpha = float(np.angle(su[1, 1]) + np.angle(su[1, 0])) + math.pi / 2
        xi = float(np.angle(su[1, 1]) - np.angle(su[1, 0])) - math.pi / 2
    return alpha, beta, xi, g


def _reconcile_phase(circuit: Circuit, target: ComplexMatrix, tol: float) -> Circuit:
    """Set the circuit's global phase so it matches ``target`` exactly, and
    verify the phase-invariant distance meets ``tol``."""
    raw = evaluate_circuit(
        Circuit(circuit.wire_dims, circuit.gates, 0.0, dict(circuit.metadata))
    )
    dist = phase_invariant_distance(raw, target)
    if dist > tol:
        raise NumericalError(f"synthesized circuit distance {dist:.3e} exceeds {tol:.1e}")
    phase = float(np.angle(np.trace(dagger(raw) @ target)))
    return Circuit(circuit.wire_dims, circuit.gates, phase, dict(circuit.metadata))


def _u3_gate(u: ComplexMatrix, wire: int) -> Gate:
    theta, phi, lam, _ = zyz_angles(u)
    return Gate(U3, (theta, phi, lam), (wire,))


def synth_kak_circuit(spec: TargetSpec) -> Circuit:
    """Two-CNOT circuit for a qubit steering operator.

    Structure: local U3 pair, CNOT, RX(J) and RZ(J) (the X^(t)/Z^(t) powers of
    the optimized decomposition, with their scalar phases folded into the
    circuit phase), CNOT, local U3 pair.
    """
    if not isinstance(spec.target, QubitTarget):
        raise ConfigError("synth_kak_circuit handles qubit targets; use synth_qutrit_circuit")
    h = build_qubit_hamiltonian(spec.target.theta, spec.target.phi, spec.coupling)
    u = expm_i_herm(h)
    dec = kak_decompose(u)
    if abs(dec.c[0] - dec.c[1]) > 1e-9 or abs(dec.c[2]) > 1e-9:
        raise NumericalError(f"steering operator has unexpected Weyl coordinates {dec.c}")
    cc = float(dec.c[0])

    mid_gates = (
        Gate(CNOT, (), (0, 1)),
        Gate(RX, (cc,), (0,)),
        Gate(RZ, (cc,), (1,)),
        Gate(CNOT, (), (0, 1)),
    )
    mid = evaluate_circuit(Circuit((2, 2), mid_gates))
    mdec = kak_decompose(mid)
    if float(np.max(np.abs(mdec.c - dec.c))) > 1e-9:
        raise NumericalError("two-CNOT core does not reach the required Weyl point")

    pre0 = dagger(mdec.k2_local[0]) @ dec.k2_local[0]
    pre1 = dagger(mdec.k2_local[1]) @ dec.k2_local[1]
    post0 = dec.k1_local[0] @ dagger(mdec.k1_local[0])
    post1 = dec.k1_local[1] @ dagger(mdec.k1_local[1])
    gates = (
        _u3_gate(pre0, 0),
        _u3_gate(pre1, 1),
        *mid_gates,
        _u3_gate(post0, 0),
        _u3_gate(post1, 1),
    )
    meta = {"target": spec.label or f"qubit({spec.target.theta}, {spec.target.phi})", "J": spec.coupling}
    return _reconcile_phase(Circuit((2, 2), gates, 0.0, meta), u, 1e-9)


_BASIS_CHANGE = {
    # V with V P V^dag = Z: pre-gate V, post-gate V^dag
    "X": ((U3, (-math.pi / 2, 0.0, 0.0)), (U3, (math.pi / 2, 0.0, 0.0))),
    "Y": ((RX, (math.pi / 2,)), (RX, (-math.pi / 2,))),
}


def _pauli_exp_block(theta: float, string: str) -> tuple[list[Gate], float]:
    """Gates for exp(-i theta P), plus a global-phase contribution."""
    active = [(w, ch) for w, ch in enumerate(string) if ch != "I"]
    if not active:
        return [], -theta
    pre: list[Gate] = []
    post: list[Gate] = []
    for w, ch in active:
        if ch in _BASIS_CHANGE:
            (vk, vp), (wk, wp) = _BASIS_CHANGE[ch]
            pre.append(Gate(vk, vp, (w,)))
            post.append(Gate(wk, wp, (w,)))
    core: list[Gate] = []
    if len(active) == 1:
        core = [Gate(RZ, (2.0 * theta,), (active[0][0],))]
    else:
        core = [
            Gate(CNOT, (), (active[0][0], active[1][0])),
            Gate(RZ, (2.0 * theta,), (active[1][0],)),
            Gate(CNOT, (), (active[0][0], active[1][0])),
        ]
    return pre + core + list(reversed(post)), 0.0


def _strings_commute(p: str, q: str) -> bool:
    anti = sum(1 for a, b in zip(p, q) if a != "I" and b != "I" and a != b)
    return anti % 2 == 0


def synth_pauli_string_circuit(
    terms, trotter_steps: int | None = None
) -> Circuit:
    """Circuit for exp(-i sum_j coeff_j P_j) over two qubits.

    ``terms`` is a sequence of (coefficient, string) pairs with strings over
    {I, X, Y, Z}^2.  Pairwise-commuting families are synthesized exactly as a
    product of string exponentials; otherwise first-order Trotterization with
    ``trotter_steps`` slices (default 256) is used.
    """
    parsed = []
    for coeff, s in terms:
        s = str(s).upper()
        if len(s) != 2 or any(ch not in "IXYZ" for ch in s):
            raise ConfigError(f"bad Pauli string {s!r}")
        parsed.append((float(coeff), s))
    if not parsed:
        raise ConfigError("need at least one term")
    commuting = all(
        _strings_commute(a[1], b[1]) for i, a in enumerate(parsed) for b in parsed[i + 1 :]
    )
    reps = 1 if commuting else int(trotter_steps or 256)
    if reps < 1:
        raise ConfigError("trotter_steps must be positive")
    gates: list[Gate] = []
    phase = 0.0
    for _ in range(reps):
        for coeff, s in parsed:
            block, dphase = _pauli_exp_block(coeff / reps, s)
            gates.extend(block)
            phase += dphase
    h = sum(c * _pauli_matrix_2q(s) for c, s in parsed)
    target = expm_i_herm(h)
    circuit = Circuit((2, 2), tuple(gates), phase, {"terms": list(parsed), "trotter_steps": reps})
    if commuting:
        return _reconcile_phase(circuit, target, 1e-9)
    # Trotterized: align the phase but accept the method error
    raw = evaluate_circuit(Circuit(circuit.wire_dims, circuit.gates, 0.0))
    tr = np.trace(dagger(raw) @ target)
    adj = float(np.angle(tr)) if abs(tr) > 1e-12 else 0.0
    return Circuit(circuit.wire_dims, circuit.gates, adj, circuit.metadata)


def _pauli_matrix_2q(s: str) -> ComplexMatrix:
    from .states import pauli_string_matrix

    return pauli_string_matrix(s)


# ---------------------------------------------------------------------------
# qubit-qutrit synthesis


def _su2_block_gates_01(u: ComplexMatrix, wire: int, dim: int = 3) -> tuple[list[Gate], float]:
    """Gates for u acting on the (01) levels of ``wire``.

    On a dim-3 wire a determinant phase of u cannot be a global phase (it
    must not touch |2>), so it is realized as an rz/rz12 diagonal pair.
    """
    theta, phi, lam, g = zyz_angles(u)
    gates = [Gate(U3, (theta, phi, lam), (wire,))]
    if dim == 2 or abs(g) < 1e-15:
        return gates, g
    # diag(e^{ig}, e^{ig}, 1) = e^{i 2g/3} rz(-2g/3) rz12(-4g/3)
    gates += [
        Gate(RZ, (-2.0 * g / 3.0,), (wire,)),
        Gate(SUBSPACE_RZ12, (-4.0 * g / 3.0,), (wire,)),
    ]
    return gates, 2.0 * g / 3.0


def _su2_block_gates_12(u: ComplexMatrix, wire: int) -> tuple[list[Gate], float]:
    """Gates for u acting on the (12) levels of ``wire`` (|0> untouched)."""
    alpha, beta, xi, g = zxz_angles(u)
    gates = [
        Gate(SUBSPACE_RZ12, (xi,), (wire,)),
        Gate(SUBSPACE_RX12, (beta,), (wire,)),
        Gate(SUBSPACE_RZ12, (alpha,), (wire,)),
    ]
    if abs(g) < 1e-15:
        return gates, 0.0
    # diag(1, e^{ig}, e^{ig}) = e^{i 2g/3} rz(4g/3) rz12(2g/3)
    gates += [
        Gate(RZ, (4.0 * g / 3.0,), (wire,)),
        Gate(SUBSPACE_RZ12, (2.0 * g / 3.0,), (wire,)),
    ]
    return gates, 2.0 * g / 3.0


def _givens_rotation(a: complex, b: complex) -> ComplexMatrix:
    """2x2 unitary u with u @ (a, b) = (r, 0), r >= 0."""
    n = math.hypot(abs(a), abs(b))
    if n < 1e-300 or abs(b) < 1e-15 * max(1.0, abs(a)):
        return np.eye(2, dtype=complex)
    return np.array([[a.conjugate(), b.conjugate()], [-b, a]], dtype=complex) / n


def _local_qutrit_gates(w3: ComplexMatrix, wire: int) -> tuple[list[Gate], float]:
    """Gate sequence implementing an arbitrary 3x3 unitary on one qutrit wire
    via a Givens chain of (01) and (12) subspace rotations."""
    m = np.asarray(w3, dtype=complex).copy()
    rotations: list[tuple[str, ComplexMatrix]] = []

    def apply(sub: str, lo: int, r0: int, r1: int) -> None:
        g = _givens_rotation(m[r0, lo], m[r1, lo])
        m[[r0, r1], :] = g @ m[[r0, r1], :]
        rotations.append((sub, g))

    apply("12", 0, 1, 2)  # zero m[2,0]
    apply("01", 0, 0, 1)  # zero m[1,0]
    apply("12", 1, 1, 2)  # zero m[2,1]
    if float(np.max(np.abs(m - np.diag(np.diag(m))))) > 1e-10:
        raise NumericalError("Givens reduction left off-diagonal residue")
    delta = np.angle(np.diag(m))
    gm = float(np.mean(delta))
    a = 2.0 * (gm - delta[0])
    b = 2.0 * (delta[2] - gm)
    gates: list[Gate] = [
        Gate(RZ, (a,), (wire,)),
        Gate(SUBSPACE_RZ12, (b,), (wire,)),
    ]
    phase = gm
    for sub, g in reversed(rotations):
        maker = _su2_block_gates_01 if sub == "01" else _su2_block_gates_12
        extra, dphase = maker(dagger(g), wire)
        gates.extend(extra)
        phase += dphase
    return gates, phase


def _h12_gates(wire: int) -> tuple[list[Gate], float]:
    h = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)
    return _su2_block_gates_12(h, wire)


def _ha_gates(wire: int) -> tuple[list[Gate], float]:
    h = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)
    return _su2_block_gates_01(h, wire, dim=2)


def _cx_a12_gates(anc: int, system: int) -> tuple[list[Gate], float]:
    """Ancilla-controlled X on the system's (12) subspace, from two cx23
    applications (a controlled Z on |2>) conjugated by (12) Hadamards."""
    h1, p1 = _h12_gates(system)
    h2, p2 = _h12_gates(system)
    gates = h1 + [Gate(QUBIT_QUTRIT_CNOT, (), (anc, system)), Gate(QUBIT_QUTRIT_CNOT, (), (anc, system))] + h2
    return gates, p1 + p2


def _cx_12a_gates(anc: int, system: int) -> tuple[list[Gate], float]:
    """X on the ancilla controlled by the system being in |2>."""
    ha1, q1 = _ha_gates(anc)
    h121, q2 = _h12_gates(system)
    mid, q3 = _cx_a12_gates(anc, system)
    ha2, q4 = _ha_gates(anc)
    h122, q5 = _h12_gates(system)
    return ha1 + h121 + mid + ha2 + h122, q1 + q2 + q3 + q4 + q5


def _crx_12a_gates(anc: int, system: int, angle: float) -> tuple[list[Gate], float]:
    """RX(angle) on the ancilla controlled by the system being in |2>."""
    cx1, p1 = _cx_12a_gates(anc, system)
    cx2, p2 = _cx_12a_gates(anc, system)
    gates = (
        [Gate(RZ, (math.pi / 2,), (anc,))]
        + cx1
        + [Gate(U3, (-angle / 2, 0.0, 0.0), (anc,))]
        + cx2
        + [Gate(U3, (angle / 2, 0.0, 0.0), (anc,)), Gate(RZ, (-math.pi / 2,), (anc,))]
    )
    return gates, p1 + p2


def synth_qutrit_circuit(spec: TargetSpec) -> Circuit:
    """Qubit-qutrit steering circuit.

    The steering unitary is a single entangling rotation between the
    ancilla-ground complement direction and the excited-ancilla target, so it
    is synthesized exactly: rotate the system so that direction becomes |2>
    and the target becomes |1>, route |1,1> to |1,2> with a cx23-based
    controlled X on the (12) subspace, apply a controlled ancilla rotation,
    and undo the conjugation.
    """
    if not isinstance(spec.target, QutritTarget):
        raise ConfigError("synth_qutrit_circuit handles qutrit targets")
    psi, perp1, perp2 = qutrit_complement_basis(spec.target)
    w_bright = (perp1 + perp2) / math.sqrt(2.0)
    w_dark = (perp1 - perp2) / math.sqrt(2.0)
    w3 = np.vstack([w_dark.conj(), psi.conj(), w_bright.conj()])

    h = spec.coupling * build_qutrit_hamiltonian(spec.target)
    target_u = expm_i_herm(h)
    angle = 2.0 * math.sqrt(2.0) * spec.coupling

    gates: list[Gate] = []
    phase = 0.0
    for part, dphase in (
        _local_qutrit_gates(w3, 1),
        _cx_a12_gates(0, 1),
        _crx_12a_gates(0, 1, angle),
        _cx_a12_gates(0, 1),
        _local_qutrit_gates(dagger(w3), 1),
    ):
        gates.extend(part)
        phase += dphase
    meta = {"target": spec.label or "qutrit", "J": spec.coupling}
    return _reconcile_phase(Circuit((2, 3), tuple(gates), 0.0, meta), target_u, 1e-6)


# ---------------------------------------------------------------------------
# text format


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def emit_text(circuit: Circuit) -> str:
    """Deterministic line-per-gate text form; ends with the global phase."""
    lines = [f"wires: {len(circuit.wire_dims)};"]
    for i, d in enumerate(circuit.wire_dims):
        lines.append(f"wire w{i}: dim {d};")
    for g in circuit.gates:
        params = ", ".join(_fmt(p) for p in g.params)
        wires = ", ".join(f"w{w}" for w in g.wires)
        if g.params and g.wires:
            lines.append(f"{g.kind}({params}) {wires};")
        elif g.params:
            lines.append(f"{g.kind}({params});")
        else:
            lines.append(f"{g.kind} {wires};")
    lines.append(f"phase({_fmt(circuit.global_phase)});")
    return "\n".join(lines) + "\n"


_HEADER_RE = re.compile(r"^wires:\s*(\d+);$")
_WIRE_RE = re.compile(r"^wire w(\d+): dim (\d+);$")
_GATE_RE = re.compile(r"^([a-z][a-z0-9]*)(?:\(([^)]*)\))?(?:\s+([w\d,\s]+))?;$")


def parse_text(text: str) -> Circuit:
    """Inverse of :func:`emit_text`."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ConfigError("empty circuit text")
    m = _HEADER_RE.match(lines[0])
    if not m:
        raise ConfigError(f"bad header line {lines[0]!r}")
    n = int(m.group(1))
    dims = [0] * n
    for i in range(n):
        wm = _WIRE_RE.match(lines[1 + i])
        if not wm or int(wm.group(1)) != i:
            raise ConfigError(f"bad wire declaration {lines[1 + i]!r}")
        dims[i] = int(wm.group(2))
    gates: list[Gate] = []
    global_phase = 0.0
    body = lines[1 + n :]
    for idx, ln in enumerate(body):
        gm = _GATE_RE.match(ln.strip())
        if not gm:
            raise ConfigError(f"bad gate line {ln!r}")
        kind = gm.group(1)
        params = tuple(float(p) for p in gm.group(2).split(",")) if gm.group(2) else ()
        wires = (
            tuple(int(w.strip().lstrip("w")) for w in gm.group(3).split(","))
            if gm.group(3)
            else ()
        )
        if kind == PHASE and idx == len(body) - 1:
            if len(params) != 1 or wires:
                raise ConfigError(f"bad phase line {ln!r}")
            global_phase = params[0]
        else:
            gates.append(Gate(kind, params, wires))
    if not body or not body[-1].strip().startswith("phase("):
        raise ConfigError("circuit text must end with a phase(...) line")
    return Circuit(tuple(dims), tuple(gates), global_phase)
