"""Shot-based measurement emulation with readout and gate noise.

Each Pauli mean is estimated from standard-basis counts taken after a
basis pre-rotation. Readout noise flips each recorded bit independently.
Gate noise is simulated by stochastic Pauli trajectories.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .circuit import Circuit, GateKind, GateOp, build_preparation_circuit, simulate
from .errors import ParseError, ValidationError
from .graph import Graph
from .statevector import PrepParams, StateVector, _apply_1q_inplace, rx, ry

AXES = ("x", "y", "z")
DEFAULT_SHOTS = 8192
BUNDLED_CALIBRATION = "ibmq_athens_2021-06-09.calib"

_SEED_MASK = (1 << 64) - 1


def _check_probability(p: float, name: str) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"{name} must be a probability in [0, 1], got {p}")
    return p


@dataclass(frozen=True)
class ShotCounts:
    shots: int
    n0: int
    n1: int

    def __post_init__(self):
        if self.shots < 1:
            raise ValidationError(f"shots must be positive, got {self.shots}")
        if self.n0 < 0 or self.n1 < 0 or self.n0 + self.n1 != self.shots:
            raise ValidationError(f"counts {self.n0}+{self.n1} do not add up to {self.shots} shots")


@dataclass(frozen=True)
class SampledEstimate:
    value: float
    stderr: float
    shots: int


@dataclass(frozen=True)
class NoiseModel:
    """Per-qubit readout and gate error rates, per-pair two-qubit error rates.

    Qubits absent from ``readout_flip`` or ``single_gate_error`` are noiseless.
    Pairs absent from ``two_qubit_gate_error`` use ``default_two_qubit_error``,
    which when left as None is the largest calibrated pair rate (a CP between
    qubits without a direct coupler needs extra routing, so it is at least
    as noisy as any calibrated pair).
    """

    readout_flip: dict[int, float] = field(default_factory=dict)
    single_gate_error: dict[int, float] = field(default_factory=dict)
    two_qubit_gate_error: dict[tuple[int, int], float] = field(default_factory=dict)
    default_two_qubit_error: float | None = None

    def __post_init__(self):
        for q, p in self.readout_flip.items():
            _check_probability(p, f"readout_flip[{q}]")
        for q, p in self.single_gate_error.items():
            _check_probability(p, f"single_gate_error[{q}]")
        pairs = {}
        for (i, j), p in self.two_qubit_gate_error.items():
            if i == j:
                raise ValidationError(f"two-qubit error for pair ({i}, {j}) needs distinct qubits")
            pairs[(min(i, j), max(i, j))] = _check_probability(p, f"two_qubit_gate_error[{i}_{j}]")
        object.__setattr__(self, "two_qubit_gate_error", pairs)
        if self.default_two_qubit_error is not None:
            _check_probability(self.default_two_qubit_error, "default_two_qubit_error")

    def readout(self, q: int) -> float:
        return self.readout_flip.get(q, 0.0)

    def gate1(self, q: int) -> float:
        return self.single_gate_error.get(q, 0.0)

    def gate2(self, i: int, j: int) -> float:
        key = (min(i, j), max(i, j))
        if key in self.two_qubit_gate_error:
            return self.two_qubit_gate_error[key]
        if self.default_two_qubit_error is not None:
            return self.default_two_qubit_error
        return max(self.two_qubit_gate_error.values(), default=0.0)

    def without_gate_noise(self) -> NoiseModel:
        return NoiseModel(readout_flip=dict(self.readout_flip))


_CALIB_LINE = re.compile(r"^(readout|gate1)\.(\d+)$|^gate2\.(\d+)_(\d+)$|^gate2\.default$")


def parse_calibration(text: str) -> NoiseModel:
    """Parse ``readout.<q>=p``, ``gate1.<q>=p``, ``gate2.<i>_<j>=p`` lines.

    Directional duplicates of a pair must agree. ``gate2.default=p`` sets the
    rate for uncalibrated pairs.
    """
    readout: dict[int, float] = {}
    gate1: dict[int, float] = {}
    gate2: dict[tuple[int, int], float] = {}
    default2 = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise ParseError(f"expected key=value, got {line!r}", lineno)
        try:
            p = float(value)
        except ValueError:
            raise ParseError(f"not a number: {value.strip()!r}", lineno) from None
        if not 0.0 <= p <= 1.0:
            raise ParseError(f"probability out of [0, 1]: {p}", lineno)
        m = _CALIB_LINE.match(key)
        if m is None:
            raise ParseError(f"unknown calibration key {key!r}", lineno)
        if m.group(1) == "readout":
            readout[int(m.group(2))] = p
        elif m.group(1) == "gate1":
            gate1[int(m.group(2))] = p
        elif m.group(3) is not None:
            i, j = int(m.group(3)), int(m.group(4))
            if i == j:
                raise ParseError(f"pair {key!r} needs two distinct qubits", lineno)
            pair = (min(i, j), max(i, j))
            if pair in gate2 and gate2[pair] != p:
                raise ParseError(f"{key} = {p} conflicts with earlier value {gate2[pair]} for the same pair", lineno)
            gate2[pair] = p
        else:
            default2 = p
    return NoiseModel(readout, gate1, gate2, default2)


def load_calibration(path: str | Path) -> NoiseModel:
    return parse_calibration(Path(path).read_text(encoding="utf-8"))


def bundled_calibration_text() -> str:
    return resources.files("graphent").joinpath("data", BUNDLED_CALIBRATION).read_text(encoding="utf-8")


def bundled_calibration() -> NoiseModel:
    """Calibration snapshot of the 5-qubit device used in the reference experiment."""
    return parse_calibration(bundled_calibration_text())


def pre_rotation(axis: str) -> np.ndarray:
    """Unitary mapping sigma^axis onto sigma^z: <psi|s_a|psi> = <u psi|s_z|u psi>."""
    if axis == "x":
        return ry(-math.pi / 2)  # exp(+i pi sigma^y / 4)
    if axis == "y":
        return rx(math.pi / 2)  # exp(-i pi sigma^x / 4)
    if axis == "z":
        return np.eye(2, dtype=complex)
    raise ValidationError(f"axis must be one of x, y, z; got {axis!r}")


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(int(seed) & _SEED_MASK)


def prob_zero(s: StateVector, q: int, axis: str) -> float:
    """Probability of reading 0 on ``q`` after the ``axis`` pre-rotation."""
    rotated = s.copy()
    _apply_1q_inplace(rotated, q, pre_rotation(axis))
    p0 = float(np.sum(np.abs(rotated._split(q)[:, 0, :]) ** 2))
    return min(max(p0, 0.0), 1.0)


def sample_from_probability(p0: float, shots: int, seed: int, readout_flip: float = 0.0) -> ShotCounts:
    """Draw ``shots`` standard-basis outcomes, then flip each with ``readout_flip``."""
    if shots < 1:
        raise ValidationError(f"shots must be positive, got {shots}")
    rng = _rng(seed)
    n0 = int(rng.binomial(shots, p0))
    n1 = shots - n0
    if readout_flip > 0.0:
        flipped_0 = int(rng.binomial(n0, readout_flip))
        flipped_1 = int(rng.binomial(n1, readout_flip))
        n0, n1 = n0 - flipped_0 + flipped_1, n1 - flipped_1 + flipped_0
    return ShotCounts(shots, n0, n1)


def sample_counts(
    s: StateVector, q: int, axis: str, shots: int, seed: int, noise: NoiseModel | None = None
) -> ShotCounts:
    if shots < 1:
        raise ValidationError(f"shots must be positive, got {shots}")
    flip = noise.readout(q) if noise is not None else 0.0
    return sample_from_probability(prob_zero(s, q, axis), shots, seed, flip)


def estimate_pauli(c: ShotCounts) -> SampledEstimate:
    value = (c.n0 - c.n1) / c.shots
    return SampledEstimate(value, math.sqrt(max(1.0 - value * value, 0.0) / c.shots), c.shots)


def entanglement_from_estimates(estimates: dict[str, SampledEstimate]) -> tuple[float, float]:
    """Plug-in entanglement and its first-order standard error."""
    values = [estimates[a].value for a in AXES]
    errors = [estimates[a].stderr for a in AXES]
    norm = math.sqrt(sum(v * v for v in values))
    e_est = 0.5 * (1.0 - norm)
    max_err = max(errors)
    if norm < max_err or norm == 0.0:
        # gradient of the norm is undefined near the origin
        return e_est, 0.5 * max_err
    return e_est, 0.5 * math.sqrt(sum((v * e) ** 2 for v, e in zip(values, errors))) / norm


def estimate_entanglement(
    s: StateVector,
    q: int,
    shots_per_axis: int = DEFAULT_SHOTS,
    seed: int = 0,
    noise: NoiseModel | None = None,
) -> tuple[float, float]:
    """Sampled entanglement of ``q``; axes x, y, z use seeds seed, seed+1, seed+2."""
    estimates = {
        axis: estimate_pauli(sample_counts(s, q, axis, shots_per_axis, seed + k, noise))
        for k, axis in enumerate(AXES)
    }
    return entanglement_from_estimates(estimates)


_PAULI_KINDS = (GateKind.X_, GateKind.Y_, GateKind.Z_)


def gate_noise_channel(c: Circuit, noise: NoiseModel, seed: int) -> Circuit:
    """One stochastic Pauli trajectory of ``c``.

    After each single-qubit gate a uniformly random X, Y or Z is inserted on
    its target with that qubit's gate error probability. After each CP one of
    the 15 non-identity two-qubit Paulis is inserted with the pair's error
    probability; identity factors are omitted. Measurements are untouched.
    """
    rng = _rng(seed)
    ops: list[GateOp] = []
    for op in c.ops:
        ops.append(op)
        if op.kind is GateKind.MEASURE or op.kind in _PAULI_KINDS:
            continue
        if op.kind is GateKind.CP:
            i, j = op.targets
            p = noise.gate2(i, j)
            if p > 0.0 and rng.random() < p:
                # index 1..15 over {I,X,Y,Z}^2 minus II
                k = int(rng.integers(1, 16))
                for target, code in ((i, k // 4), (j, k % 4)):
                    if code:
                        ops.append(GateOp(_PAULI_KINDS[code - 1], (), (target,)))
        else:
            (t,) = op.targets
            p = noise.gate1(t)
            if p > 0.0 and rng.random() < p:
                ops.append(GateOp(_PAULI_KINDS[int(rng.integers(0, 3))], (), (t,)))
    return Circuit(c.n_qubits, tuple(ops))


def _trajectory_seeds(seed: int, trajectories: int) -> list[int]:
    ss = np.random.SeedSequence([int(seed) & _SEED_MASK, 0x7A7])
    return [int(x) for x in ss.generate_state(trajectories, dtype=np.uint64)]


def trajectory_prob_zero(
    c: Circuit, q: int, noise: NoiseModel, trajectories: int, seed: int
) -> dict[str, float]:
    """Readout-free probability of 0 per axis, averaged over noisy trajectories.

    Outcome probabilities are linear in the state, so the average over
    trajectories equals the probability under the averaged (mixed) state.
    """
    if trajectories < 1:
        raise ValidationError(f"trajectories must be positive, got {trajectories}")
    totals = dict.fromkeys(AXES, 0.0)
    for traj_seed in _trajectory_seeds(seed, trajectories):
        state = simulate(gate_noise_channel(c, noise, traj_seed))
        for axis in AXES:
            totals[axis] += prob_zero(state, q, axis)
    return {axis: totals[axis] / trajectories for axis in AXES}


def trajectory_mean_spin(
    c: Circuit, q: int, noise: NoiseModel, trajectories: int, seed: int
) -> tuple[float, float, float]:
    p0 = trajectory_prob_zero(c, q, noise, trajectories, seed)
    return tuple(2.0 * p0[a] - 1.0 for a in AXES)


def estimate_entanglement_noisy(
    g: Graph,
    p: PrepParams,
    q: int,
    shots_per_axis: int = DEFAULT_SHOTS,
    seed: int = 0,
    noise: NoiseModel | None = None,
    trajectories: int = 100,
) -> tuple[float, float]:
    """Sampled entanglement with gate noise on the preparation circuit and readout noise.

    Shots for each axis are drawn from the trajectory-averaged outcome
    probability, using the same per-axis seed offsets as the noiseless path.
    """
    noise = noise if noise is not None else NoiseModel()
    p0 = trajectory_prob_zero(build_preparation_circuit(g, p), q, noise, trajectories, seed)
    estimates = {
        axis: estimate_pauli(sample_from_probability(p0[axis], shots_per_axis, seed + k, noise.readout(q)))
        for k, axis in enumerate(AXES)
    }
    return entanglement_from_estimates(estimates)
