"""Preparation and measurement circuits, their simulation, and OpenQASM 2.0 export."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import ExportError, ValidationError
from .graph import Graph
from .statevector import (
    HADAMARD,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    PrepParams,
    StateVector,
    _apply_1q_inplace,
    _apply_cp_inplace,
    ry,
    rz,
)


class GateKind(str, Enum):
    RY = "RY"
    RZ = "RZ"
    H = "H"
    CP = "CP"
    X_ = "X_"
    Y_ = "Y_"
    Z_ = "Z_"
    MEASURE = "MEASURE"


NOISE_KINDS = frozenset({GateKind.X_, GateKind.Y_, GateKind.Z_})
_PARAM_COUNT = {GateKind.RY: 1, GateKind.RZ: 1, GateKind.CP: 1}


@dataclass(frozen=True)
class GateOp:
    kind: GateKind
    params: tuple[float, ...] = ()
    targets: tuple[int, ...] = ()

    def __post_init__(self):
        kind = GateKind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        want_targets = 2 if kind is GateKind.CP else 1
        if len(self.targets) != want_targets:
            raise ValidationError(f"{kind.value} takes {want_targets} target(s), got {self.targets}")
        if len(set(self.targets)) != len(self.targets):
            raise ValidationError(f"{kind.value} targets must be distinct, got {self.targets}")
        if len(self.params) != _PARAM_COUNT.get(kind, 0):
            raise ValidationError(f"{kind.value} takes {_PARAM_COUNT.get(kind, 0)} parameter(s), got {self.params}")

    @property
    def is_unitary(self) -> bool:
        return self.kind is not GateKind.MEASURE


@dataclass(frozen=True)
class Circuit:
    """Immutable gate list. Unitaries may not follow a measurement on the same qubit."""

    n_qubits: int
    ops: tuple[GateOp, ...] = field(default=())

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValidationError(f"circuit needs at least one qubit, got {self.n_qubits}")
        ops = tuple(self.ops)
        object.__setattr__(self, "ops", ops)
        measured: set[int] = set()
        for op in ops:
            for t in op.targets:
                if not 0 <= t < self.n_qubits:
                    raise ValidationError(f"target {t} out of range [0, {self.n_qubits})")
                if t in measured:
                    raise ValidationError(f"qubit {t} already measured; cannot apply {op.kind.value}")
            if op.kind is GateKind.MEASURE:
                measured.add(op.targets[0])

    def with_ops(self, *ops: GateOp) -> Circuit:
        return Circuit(self.n_qubits, self.ops + ops)

    def count(self, kind: GateKind) -> int:
        return sum(1 for op in self.ops if op.kind is kind)

    @property
    def measured_qubits(self) -> list[int]:
        return [op.targets[0] for op in self.ops if op.kind is GateKind.MEASURE]


def build_preparation_circuit(g: Graph, p: PrepParams) -> Circuit:
    """Single-qubit layer (H for |+>, else RY then optional RZ), then CP per sorted edge."""
    ops = []
    plus = p.theta == math.pi / 2 and p.alpha == 0.0
    for q in range(g.n_vertices):
        if plus:
            ops.append(GateOp(GateKind.H, (), (q,)))
            continue
        ops.append(GateOp(GateKind.RY, (p.theta,), (q,)))
        if p.alpha != 0.0:
            ops.append(GateOp(GateKind.RZ, (p.alpha,), (q,)))
    ops.extend(GateOp(GateKind.CP, (p.phi,), (i, j)) for i, j in g.sorted_edges())
    return Circuit(g.n_vertices, tuple(ops))


# basis change before a z measurement, as (kind, angle) in time order
_PRE_ROTATION_OPS = {
    "x": ((GateKind.RY, -math.pi / 2),),
    "y": ((GateKind.RZ, math.pi / 2), (GateKind.RY, math.pi / 2), (GateKind.RZ, -math.pi / 2)),
    "z": (),
}


def append_measurement(c: Circuit, q: int, axis: str) -> Circuit:
    if axis not in _PRE_ROTATION_OPS:
        raise ValidationError(f"axis must be one of x, y, z; got {axis!r}")
    if not 0 <= q < c.n_qubits:
        raise ValidationError(f"qubit {q} out of range [0, {c.n_qubits})")
    if q in c.measured_qubits:
        raise ValidationError(f"qubit {q} is already measured")
    ops = [GateOp(kind, (angle,), (q,)) for kind, angle in _PRE_ROTATION_OPS[axis]]
    ops.append(GateOp(GateKind.MEASURE, (), (q,)))
    return c.with_ops(*ops)


_FIXED_MATRICES = {GateKind.H: HADAMARD, GateKind.X_: PAULI_X, GateKind.Y_: PAULI_Y, GateKind.Z_: PAULI_Z}


def simulate(c: Circuit, initial: StateVector | None = None) -> StateVector:
    """Run the unitary part of ``c`` from |0...0> (or ``initial``); MEASURE ops are skipped."""
    s = StateVector(c.n_qubits) if initial is None else initial.copy()
    if s.n_qubits != c.n_qubits:
        raise ValidationError(f"initial state has {s.n_qubits} qubits, circuit has {c.n_qubits}")
    for op in c.ops:
        kind = op.kind
        if kind is GateKind.MEASURE:
            continue
        if kind is GateKind.CP:
            _apply_cp_inplace(s, op.targets[0], op.targets[1], op.params[0])
        elif kind is GateKind.RY:
            _apply_1q_inplace(s, op.targets[0], ry(op.params[0]))
        elif kind is GateKind.RZ:
            _apply_1q_inplace(s, op.targets[0], rz(op.params[0]))
        else:
            _apply_1q_inplace(s, op.targets[0], _FIXED_MATRICES[kind])
    return s


def _angle(x: float) -> str:
    return format(x, ".17g")


def export_openqasm(c: Circuit, cp_name: str = "cu1") -> str:
    """OpenQASM 2.0 text. ``cp_name`` selects ``cu1`` (default) or ``cp``."""
    if cp_name not in ("cu1", "cp"):
        raise ValidationError(f"cp_name must be 'cu1' or 'cp', got {cp_name!r}")
    noisy = [op.kind.value for op in c.ops if op.kind in NOISE_KINDS]
    if noisy:
        raise ExportError(f"noise operations cannot be exported: {sorted(set(noisy))}")
    n_meas = c.count(GateKind.MEASURE)
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{c.n_qubits}];"]
    if n_meas:
        lines.append(f"creg c[{n_meas}];")
    cbit = 0
    for op in c.ops:
        t = op.targets
        if op.kind is GateKind.H:
            lines.append(f"h q[{t[0]}];")
        elif op.kind is GateKind.RY:
            lines.append(f"ry({_angle(op.params[0])}) q[{t[0]}];")
        elif op.kind is GateKind.RZ:
            lines.append(f"rz({_angle(op.params[0])}) q[{t[0]}];")
        elif op.kind is GateKind.CP:
            lines.append(f"{cp_name}({_angle(op.params[0])}) q[{t[0]}],q[{t[1]}];")
        else:
            lines.append(f"measure q[{t[0]}] -> c[{cbit}];")
            cbit += 1
    return "\n".join(lines) + "\n"
