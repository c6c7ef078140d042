"""Dense statevector simulation of graph-state preparation.

Amplitude index bit ``k`` (least significant first) is the basis label of
qubit ``k``. Gate functions return new states and leave their input intact.
"""
from __future__ import annotations

import math
import os
import struct
from dataclasses import dataclass
from typing import BinaryIO

import numpy as np

from .errors import ResourceError, ValidationError
from .graph import Graph

DEFAULT_MAX_QUBITS = 24
MAX_QUBITS_ENV = "GRAPHENT_MAX_QUBITS"

UNITARY_ATOL = 1e-10

I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
PAULIS = {"x": PAULI_X, "y": PAULI_Y, "z": PAULI_Z}


def rx(theta: float) -> np.ndarray:
    """exp(-i theta X / 2)"""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def ry(theta: float) -> np.ndarray:
    """exp(-i theta Y / 2)"""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    """exp(-i theta Z / 2)"""
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex)


def max_qubits() -> int:
    """Size cap, overridable through the ``GRAPHENT_MAX_QUBITS`` variable."""
    raw = os.environ.get(MAX_QUBITS_ENV)
    if raw is None or not raw.strip():
        return DEFAULT_MAX_QUBITS
    try:
        cap = int(raw)
    except ValueError:
        raise ValidationError(f"{MAX_QUBITS_ENV} must be an integer, got {raw!r}") from None
    if cap < 1:
        raise ValidationError(f"{MAX_QUBITS_ENV} must be positive, got {cap}")
    return cap


def check_size(n: int) -> None:
    cap = max_qubits()
    if n > cap:
        raise ResourceError(
            f"{n} qubits exceeds the statevector cap of {cap} (set {MAX_QUBITS_ENV} to raise it)"
        )


@dataclass(frozen=True)
class PrepParams:
    """Gate angle ``phi`` and one-qubit state angles ``alpha``, ``theta``.

    Values are reduced on construction to theta in [0, pi], phi in [0, 2pi]
    and alpha in [0, 2pi). A theta beyond pi is reflected and the resulting
    sign is absorbed into alpha (shift by pi), which changes the product
    state only by a global phase. In-range values are kept bit-for-bit.
    """

    phi: float
    alpha: float
    theta: float

    def __post_init__(self):
        phi, alpha, theta = (float(v) for v in (self.phi, self.alpha, self.theta))
        if not all(math.isfinite(v) for v in (phi, alpha, theta)):
            raise ValidationError(f"angles must be finite, got phi={phi}, alpha={alpha}, theta={theta}")
        two_pi = 2 * math.pi
        if not 0.0 <= theta <= math.pi:
            theta %= two_pi
            if theta > math.pi:
                theta = two_pi - theta
                alpha += math.pi
        if not 0.0 <= phi <= two_pi:
            phi %= two_pi
        if not 0.0 <= alpha < two_pi:
            alpha %= two_pi
            if alpha >= two_pi:
                alpha = 0.0
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "theta", theta)


class StateVector:
    """Pure state of ``n_qubits`` qubits as ``2**n_qubits`` complex amplitudes."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits: int, amplitudes=None):
        if n_qubits < 0:
            raise ValidationError(f"qubit count must be nonnegative, got {n_qubits}")
        check_size(n_qubits)
        dim = 1 << n_qubits
        if amplitudes is None:
            amplitudes = np.zeros(dim, dtype=complex)
            amplitudes[0] = 1.0
        else:
            amplitudes = np.array(amplitudes, dtype=complex).reshape(-1)
            if amplitudes.size != dim:
                raise ValidationError(f"expected {dim} amplitudes for {n_qubits} qubits, got {amplitudes.size}")
        self.n_qubits = n_qubits
        self.amplitudes = amplitudes

    def copy(self) -> StateVector:
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __repr__(self):
        return f"StateVector(n_qubits={self.n_qubits})"

    def _split(self, q: int) -> np.ndarray:
        """View as (high bits, bit q, low bits)."""
        _check_qubit(self, q)
        return self.amplitudes.reshape(1 << (self.n_qubits - q - 1), 2, 1 << q)


def _check_qubit(s: StateVector, q: int) -> None:
    if not 0 <= q < s.n_qubits:
        raise ValidationError(f"qubit {q} out of range [0, {s.n_qubits})")


def check_unitary(u) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ValidationError(f"expected a 2x2 matrix, got shape {u.shape}")
    if np.max(np.abs(u.conj().T @ u - I2)) > UNITARY_ATOL:
        raise ValidationError("matrix is not unitary")
    return u


def init_product_state(n: int, p: PrepParams) -> StateVector:
    """``n`` copies of cos(theta/2)|0> + e^{i alpha} sin(theta/2)|1>."""
    if n < 1:
        raise ValidationError(f"need at least one qubit, got {n}")
    check_size(n)
    one = np.array(
        [math.cos(p.theta / 2), np.exp(1j * p.alpha) * math.sin(p.theta / 2)], dtype=complex
    )
    amps = np.ones(1, dtype=complex)
    for _ in range(n):
        # new qubit becomes the most significant bit; all factors are identical
        amps = np.kron(one, amps)
    return StateVector(n, amps)


def _apply_1q_inplace(s: StateVector, q: int, u: np.ndarray) -> None:
    view = s._split(q)
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :]
    view[:, 0, :] = u[0, 0] * a0 + u[0, 1] * a1
    view[:, 1, :] = u[1, 0] * a0 + u[1, 1] * a1


def apply_single_qubit(s: StateVector, q: int, u) -> StateVector:
    u = check_unitary(u)
    out = s.copy()
    _apply_1q_inplace(out, q, u)
    return out


def _both_set_mask(n: int, i: int, j: int) -> np.ndarray:
    idx = np.arange(1 << n)
    return ((idx >> i) & 1).astype(bool) & ((idx >> j) & 1).astype(bool)


def _apply_cp_inplace(s: StateVector, i: int, j: int, phi: float) -> None:
    _check_qubit(s, i)
    _check_qubit(s, j)
    if i == j:
        raise ValidationError(f"controlled phase needs two distinct qubits, got {i} twice")
    s.amplitudes[_both_set_mask(s.n_qubits, i, j)] *= np.exp(1j * phi)


def apply_controlled_phase(s: StateVector, i: int, j: int, phi: float) -> StateVector:
    """Multiply every amplitude with bits ``i`` and ``j`` both set by e^{i phi}."""
    out = s.copy()
    _apply_cp_inplace(out, i, j, phi)
    return out


def prepare_graph_state(g: Graph, p: PrepParams, edge_order=None) -> StateVector:
    """Product state followed by one CP(phi) per edge.

    ``edge_order`` only exists to exercise commutation of the diagonal gates;
    it must be a permutation of the graph's edges.
    """
    check_size(g.n_vertices)
    s = init_product_state(g.n_vertices, p)
    edges = g.sorted_edges() if edge_order is None else list(edge_order)
    if edge_order is not None and sorted(tuple(sorted(e)) for e in edges) != g.sorted_edges():
        raise ValidationError("edge_order must be a permutation of the graph's edges")
    for i, j in edges:
        _apply_cp_inplace(s, i, j, p.phi)
    return s


def pauli_expectation(s: StateVector, q: int, axis: str) -> float:
    """Exact <psi| sigma^axis_q |psi> by direct amplitude summation."""
    if axis not in PAULIS:
        raise ValidationError(f"axis must be one of x, y, z; got {axis!r}")
    view = s._split(q)
    a0, a1 = view[:, 0, :], view[:, 1, :]
    if axis == "z":
        return float(np.sum(np.abs(a0) ** 2) - np.sum(np.abs(a1) ** 2))
    m = PAULIS[axis]
    b0 = m[0, 0] * a0 + m[0, 1] * a1
    b1 = m[1, 0] * a0 + m[1, 1] * a1
    value = np.vdot(a0, b0) + np.vdot(a1, b1)
    if abs(value.imag) >= UNITARY_ATOL:
        raise ArithmeticError(f"Hermitian form has imaginary part {value.imag:.3e}; state not normalized?")
    return float(value.real)


def mean_spin(s: StateVector, q: int) -> tuple[float, float, float]:
    return tuple(pauli_expectation(s, q, a) for a in "xyz")


def reduced_density_matrix(s: StateVector, q: int) -> np.ndarray:
    """Partial trace over every qubit except ``q``; rho[a, b] = sum psi_a conj(psi_b)."""
    view = s._split(q)
    return np.einsum("iaj,ibj->ab", view, view.conj())


def exact_entanglement(s: StateVector, q: int) -> float:
    """Geometric measure of qubit ``q`` against the rest, from its mean spin."""
    sx, sy, sz = mean_spin(s, q)
    return 0.5 * (1.0 - math.sqrt(sx * sx + sy * sy + sz * sz))


def entanglement_from_rdm(s: StateVector, q: int) -> float:
    """1 - largest eigenvalue of the one-qubit reduced state.

    This is the minimal squared Fubini-Study distance to product states for
    the bipartition (q | rest), independent of the mean-spin route.
    """
    return float(1.0 - np.linalg.eigvalsh(reduced_density_matrix(s, q))[-1])


def dump_state(s: StateVector, fh: BinaryIO) -> None:
    """u32 qubit count then little-endian (real, imag) float64 pairs."""
    fh.write(struct.pack("<I", s.n_qubits))
    fh.write(np.asarray(s.amplitudes, dtype="<c16").tobytes())


def load_state(fh: BinaryIO) -> StateVector:
    header = fh.read(4)
    if len(header) != 4:
        raise ValidationError("truncated statevector dump header")
    (n,) = struct.unpack("<I", header)
    check_size(n)
    payload = fh.read(16 << n)
    if len(payload) != 16 << n:
        raise ValidationError(f"truncated statevector dump: expected {16 << n} bytes, got {len(payload)}")
    return StateVector(n, np.frombuffer(payload, dtype="<c16").astype(complex))
