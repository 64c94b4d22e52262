"""Full steering protocol runs.

Blind runs iterate the averaged channel (a deterministic CPTP map), so they
need no randomness at all.  Non-blind runs sample one ancilla readout per
cycle; the true projection acts on the state, the classical record may be
corrupted by a readout confusion matrix, and the run stops at the first
recorded "1".

Randomness model: every trajectory owns an independent stream of the Philox
counter PRNG keyed by (seed, trajectory index).  Batched execution therefore
produces bit-identical results to running the same trajectories one at a
time, in any order.

Noise channels (depolarizing, then amplitude damping) act on the system only,
after each entangle-measure-reset cycle.  Ancilla reset is perfect unless
``reset_infidelity`` is set, in which case the ancilla re-enters each cycle
in the classical mixture (1 - eps)|0><0| + eps|1><1|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionMismatchError, OutcomeImpossibleError
from .linalg import dagger, kron, partial_trace
from .states import DensityState, fidelity
from .steering import KrausSet, SteeringOperator, averaged_step, kraus_from_unitary


@dataclass(frozen=True)
class NoiseConfig:
    """Per-cycle noise model applied during protocol execution."""

    depolarizing_p: float = 0.0
    amplitude_damping_gamma: float = 0.0
    readout_confusion: np.ndarray | None = None
    reset_infidelity: float = 0.0

    def __post_init__(self):
        for name in ("depolarizing_p", "amplitude_damping_gamma", "reset_infidelity"):
            v = float(getattr(self, name))
            object.__setattr__(self, name, v)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name}={v} outside [0, 1]")
        if self.readout_confusion is not None:
            c = np.asarray(self.readout_confusion, dtype=float)
            object.__setattr__(self, "readout_confusion", c)
            if c.ndim != 2 or c.shape[0] != c.shape[1]:
                raise ConfigError("readout confusion must be square")
            if np.any(c < -1e-12):
                raise ConfigError("readout confusion has negative entries")
            if np.max(np.abs(c.sum(axis=1) - 1.0)) > 1e-12:
                raise ConfigError("readout confusion rows must sum to 1")

    def is_trivial(self) -> bool:
        return (
            self.depolarizing_p == 0.0
            and self.amplitude_damping_gamma == 0.0
            and self.reset_infidelity == 0.0
        )


NO_NOISE = NoiseConfig()


@dataclass(frozen=True)
class RunRecord:
    """Outcome of one protocol execution."""

    seed: int
    mode: str
    fidelities: tuple[float, ...]
    outcomes: tuple[int, ...] | None
    repetitions_to_success: int | None
    coupling: float
    target_label: str | None
    trajectory_index: int = 0


def depolarizing_apply(mat: np.ndarray, p: float) -> np.ndarray:
    """rho -> (1 - p) rho + p I/d; acts on the last two axes of a batch."""
    d = mat.shape[-1]
    eye = np.eye(d, dtype=complex)
    tr = np.trace(mat, axis1=-2, axis2=-1)
    if mat.ndim == 2:
        return (1.0 - p) * mat + p * tr * eye / d
    return (1.0 - p) * mat + p * tr[..., None, None] * eye / d


def amplitude_damping_kraus(dim: int, gamma: float) -> tuple[np.ndarray, ...]:
    """Damping operators: each level decays one step down at rate gamma."""
    root = math.sqrt(max(0.0, 1.0 - gamma))
    k0 = np.diag([1.0] + [root] * (dim - 1)).astype(complex)
    ops = [k0]
    for level in range(1, dim):
        k = np.zeros((dim, dim), dtype=complex)
        k[level - 1, level] = math.sqrt(gamma)
        ops.append(k)
    return tuple(ops)


def apply_noise(mat: np.ndarray, noise: NoiseConfig) -> np.ndarray:
    """System-only noise for one cycle: depolarizing, then amplitude damping."""
    d = mat.shape[-1]
    out = mat
    if noise.depolarizing_p > 0.0:
        out = depolarizing_apply(out, noise.depolarizing_p)
    if noise.amplitude_damping_gamma > 0.0:
        ops = amplitude_damping_kraus(d, noise.amplitude_damping_gamma)
        out = sum(np.einsum("ij,...jk,lk->...il", k, out, k.conj()) for k in ops)
    return out


def _cycle_kraus(op: SteeringOperator, noise: NoiseConfig) -> tuple[tuple[np.ndarray, ...], ...]:
    """Kraus operators per ancilla outcome, with reset infidelity folded in.

    Returns a tuple indexed by outcome k; each element is the tuple of
    operators sqrt(p_i) <k| U |psi_i> over the ancilla mixture components.
    """
    eps = noise.reset_infidelity
    base = kraus_from_unitary(op).operators
    if eps == 0.0:
        return tuple((a,) for a in base)
    flipped = np.zeros(op.ancilla_dim, dtype=complex)
    flipped[1] = 1.0
    alt = kraus_from_unitary(
        SteeringOperator(
            hamiltonian=op.hamiltonian,
            unitary=op.unitary,
            ancilla_init=flipped,
            ancilla_dim=op.ancilla_dim,
            system_dim=op.system_dim,
            coupling=op.coupling,
            target=op.target,
            label=op.label,
        )
    ).operators
    w0, w1 = math.sqrt(1.0 - eps), math.sqrt(eps)
    return tuple((w0 * base[k], w1 * alt[k]) for k in range(op.ancilla_dim))


def run_blind(
    rho0: DensityState,
    op: SteeringOperator,
    steps: int,
    noise: NoiseConfig = NO_NOISE,
    seed: int = 0,
) -> RunRecord:
    """Deterministic averaged-channel iteration for ``steps`` cycles.

    The record holds steps + 1 fidelities, including the initial state's.
    """
    if steps < 1:
        raise ConfigError("steps must be >= 1")
    if rho0.dim != op.system_dim:
        raise DimensionMismatchError("initial state does not match the system dimension")
    groups = _cycle_kraus(op, noise)
    flat = KrausSet(operators=tuple(a for grp in groups for a in grp))
    fids = [fidelity(rho0, op.target)]
    state = rho0
    for _ in range(steps):
        state = averaged_step(state, flat)
        mat = apply_noise(state.matrix, noise)
        state = DensityState(matrix=mat, dims=state.dims)
        fids.append(fidelity(state, op.target))
    return RunRecord(
        seed=seed,
        mode="blind",
        fidelities=tuple(fids),
        outcomes=None,
        repetitions_to_success=None,
        coupling=op.coupling,
        target_label=op.label,
    )


def measure_ancilla(joint: DensityState, outcome: int) -> tuple[DensityState, float]:
    """Project the ancilla of an ancilla (x) system state onto ``outcome``.

    Returns the renormalized post-measurement system state and the outcome
    probability p_k = Tr[Pi_k rho].  Conditioning on an outcome with
    probability below 1e-14 raises OutcomeImpossibleError.
    """
    if len(joint.dims) != 2:
        raise DimensionMismatchError("joint state must declare (ancilla, system) dims")
    da, ds = joint.dims
    if not 0 <= outcome < da:
        raise ConfigError(f"outcome {outcome} out of range for ancilla dim {da}")
    proj_a = np.zeros((da, da), dtype=complex)
    proj_a[outcome, outcome] = 1.0
    proj = kron(proj_a, np.eye(ds, dtype=complex))
    p = float(np.trace(proj @ joint.matrix).real)
    if p < 1e-14:
        raise OutcomeImpossibleError(f"outcome {outcome} has probability {p:.3e}")
    post = partial_trace(proj @ joint.matrix @ proj, keep=1, dims=(da, ds)) / p
    return DensityState(matrix=post, dims=(ds,)), p


def _trajectory_generator(seed: int, index: int) -> np.random.Generator:
    # disjoint 128-bit Philox keys per (seed, trajectory)
    return np.random.Generator(np.random.Philox(key=((seed + 1) << 64) + index))


def _sample(probs: np.ndarray, u: float) -> int:
    return int(np.searchsorted(np.cumsum(probs), u, side="right"))


def run_nonblind(
    rho0: DensityState,
    op: SteeringOperator,
    max_steps: int,
    noise: NoiseConfig = NO_NOISE,
    seed: int = 0,
    trajectory_index: int = 0,
    early_stop: bool = True,
    stop_fidelity: float | None = None,
) -> RunRecord:
    """One stochastic trajectory with per-cycle ancilla readout.

    The readout confusion corrupts only the recorded outcome; the state
    conditioning always uses the true projection.  The run stops at the first
    recorded "1" (unless ``early_stop`` is off) and reports the 1-based cycle
    index as ``repetitions_to_success``, or None if the budget is exhausted.
    ``stop_fidelity`` optionally ends the run once the conditioned state
    crosses a fidelity threshold instead; it is off by default.
    """
    if max_steps < 1:
        raise ConfigError("max_steps must be >= 1")
    if stop_fidelity is not None and not 0.0 <= stop_fidelity <= 1.0:
        raise ConfigError("stop_fidelity must lie in [0, 1]")
    if rho0.dim != op.system_dim:
        raise DimensionMismatchError("initial state does not match the system dimension")
    groups = _cycle_kraus(op, noise)
    confusion = noise.readout_confusion
    if confusion is not None and confusion.shape[0] != op.ancilla_dim:
        raise ConfigError("readout confusion size does not match ancilla dim")
    uniforms = _trajectory_generator(seed, trajectory_index).random((max_steps, 2))
    fids = [fidelity(rho0, op.target)]
    outcomes: list[int] = []
    reps: int | None = None
    mat = rho0.matrix
    for step in range(max_steps):
        branches = [sum(a @ mat @ dagger(a) for a in grp) for grp in groups]
        probs = np.array([float(np.trace(b).real) for b in branches])
        probs = probs / probs.sum()
        true_k = _sample(probs, uniforms[step, 0])
        mat = branches[true_k] / max(float(np.trace(branches[true_k]).real), 1e-300)
        mat = apply_noise(mat, noise)
        if confusion is None:
            recorded = true_k
        else:
            recorded = _sample(confusion[true_k], uniforms[step, 1])
        outcomes.append(recorded)
        fids.append(fidelity(mat, op.target))
        if recorded == 1 and reps is None:
            reps = step + 1
            if early_stop and stop_fidelity is None:
                break
        if stop_fidelity is not None and fids[-1] >= stop_fidelity:
            break
    return RunRecord(
        seed=seed,
        mode="nonblind",
        fidelities=tuple(fids),
        outcomes=tuple(outcomes),
        repetitions_to_success=reps,
        coupling=op.coupling,
        target_label=op.label,
        trajectory_index=trajectory_index,
    )


@dataclass(frozen=True)
class TrajectoryBatch:
    """Vectorized non-blind trajectories (identical to per-trajectory runs)."""

    final_states: np.ndarray  # (n, d, d), state when the trajectory ended
    recorded_outcomes: np.ndarray  # (n, max_steps), -1 after an early stop
    repetitions: np.ndarray  # (n,), 0 means no recorded success
    seed: int

    @property
    def n_trajectories(self) -> int:
        return self.final_states.shape[0]


def run_nonblind_batch(
    rho0: DensityState,
    op: SteeringOperator,
    max_steps: int,
    n_trajectories: int,
    noise: NoiseConfig = NO_NOISE,
    seed: int = 0,
    early_stop: bool = True,
) -> TrajectoryBatch:
    """Sample many non-blind trajectories at once.

    Each trajectory i consumes exactly the stream of run_nonblind(seed,
    trajectory_index=i), so the batch is reproducible and order-insensitive.
    """
    if max_steps < 1 or n_trajectories < 1:
        raise ConfigError("max_steps and n_trajectories must be >= 1")
    groups = _cycle_kraus(op, noise)
    confusion = noise.readout_confusion
    n, d = n_trajectories, op.system_dim
    uniforms = np.empty((n, max_steps, 2))
    for i in range(n):
        uniforms[i] = _trajectory_generator(seed, i).random((max_steps, 2))
    states = np.broadcast_to(rho0.matrix, (n, d, d)).copy()
    recorded = np.full((n, max_steps), -1, dtype=np.int64)
    reps = np.zeros(n, dtype=np.int64)
    active = np.ones(n, dtype=bool)
    for step in range(max_steps):
        if not np.any(active):
            break
        branches = np.stack(
            [
                sum(np.einsum("ij,njk,lk->nil", a, states, a.conj()) for a in grp)
                for grp in groups
            ],
            axis=1,
        )  # (n, outcomes, d, d)
        probs = np.einsum("nkii->nk", branches).real
        probs = probs / probs.sum(axis=1, keepdims=True)
        cum = np.cumsum(probs, axis=1)
        u0 = uniforms[:, step, 0]
        true_k = (u0[:, None] >= cum).sum(axis=1)
        chosen = branches[np.arange(n), true_k]
        norm = np.einsum("nii->n", chosen).real
        new_states = chosen / norm[:, None, None]
        new_states = apply_noise(new_states, noise)
        if confusion is None:
            rec_k = true_k
        else:
            ccum = np.cumsum(confusion, axis=1)
            u1 = uniforms[:, step, 1]
            rec_k = (u1[:, None] >= ccum[true_k]).sum(axis=1)
        states[active] = new_states[active]
        recorded[active, step] = rec_k[active]
        hit = active & (rec_k == 1) & (reps == 0)
        reps[hit] = step + 1
        if early_stop:
            active = active & ~hit
    return TrajectoryBatch(
        final_states=states, recorded_outcomes=recorded, repetitions=reps, seed=seed
    )


@dataclass(frozen=True)
class SweepRow:
    target_label: str
    coupling: float
    step: int
    mean_fidelity: float
    std_fidelity: float
    stabilizer_average: float | None = None


def sweep(
    targets,
    couplings,
    steps: int,
    noise: NoiseConfig = NO_NOISE,
    repeats: int = 1,
    initial_state: DensityState | None = None,
) -> list[SweepRow]:
    """Blind-run fidelity grid over (target, J, step).

    ``targets`` is a sequence of (label, QubitTarget | QutritTarget) pairs.
    Blind runs are deterministic, so repeats reproduce the same sequence; the
    parameter exists for interface parity with stochastic pipelines.  Each
    row also carries the across-target average fidelity of its (J, step)
    cell, which is the stabilizer average when the six stabilizer targets
    are swept.
    """
    from .steering import TargetSpec, make_steering_operator

    targets = list(targets)
    couplings = list(couplings)
    if not targets or not couplings:
        raise ConfigError("sweep needs nonempty target and coupling grids")
    if repeats < 1:
        raise ConfigError("repeats must be >= 1")
    rows: list[SweepRow] = []
    table: dict[tuple[float, int], list[float]] = {}
    runs: dict[tuple[str, float], list[tuple[float, ...]]] = {}
    for label, target in targets:
        for coupling in couplings:
            op = make_steering_operator(TargetSpec(target, coupling, label))
            rho0 = initial_state
            if rho0 is None:
                d = op.system_dim
                rho0 = DensityState(matrix=np.eye(d, dtype=complex) / d, dims=(d,))
            fid_runs = [
                run_blind(rho0, op, steps, noise).fidelities for _ in range(repeats)
            ]
            runs[(label, coupling)] = fid_runs
            for n in range(steps + 1):
                vals = [fr[n] for fr in fid_runs]
                table.setdefault((coupling, n), []).append(float(np.mean(vals)))
    for label, target in targets:
        for coupling in couplings:
            fid_runs = runs[(label, coupling)]
            for n in range(steps + 1):
                vals = [fr[n] for fr in fid_runs]
                cell = table[(coupling, n)]
                agg = float(np.mean(cell)) if len(cell) == len(targets) else None
                rows.append(
                    SweepRow(
                        target_label=label,
                        coupling=coupling,
                        step=n,
                        mean_fidelity=float(np.mean(vals)),
                        std_fidelity=float(np.std(vals)),
                        stabilizer_average=agg,
                    )
                )
    return rows


@dataclass(frozen=True)
class RepetitionStats:
    counts: dict[int, int]
    cdf: tuple[tuple[int, float], ...]
    mean_repetitions: float | None
    n_failures: int
    n_records: int


def repetition_stats(records) -> RepetitionStats:
    """Histogram, empirical CDF and mean of repetitions-to-success.

    Accepts RunRecords or a TrajectoryBatch.  Failures (no recorded success)
    are counted separately and excluded from the mean and CDF.
    """
    if isinstance(records, TrajectoryBatch):
        reps = [int(r) if r > 0 else None for r in records.repetitions]
    else:
        reps = [r.repetitions_to_success for r in records]
    n_records = len(reps)
    if n_records == 0:
        raise ConfigError("no records given")
    successes = sorted(r for r in reps if r is not None)
    n_failures = n_records - len(successes)
    counts: dict[int, int] = {}
    for r in successes:
        counts[r] = counts.get(r, 0) + 1
    cdf = []
    acc = 0
    for value in sorted(counts):
        acc += counts[value]
        cdf.append((value, acc / len(successes)))
    mean = float(np.mean(successes)) if successes else None
    return RepetitionStats(
        counts=counts,
        cdf=tuple(cdf),
        mean_repetitions=mean,
        n_failures=n_failures,
        n_records=n_records,
    )
