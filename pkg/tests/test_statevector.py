import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from conftest import random_angles, random_graph, random_state
from graphent.analytic import analytic_entanglement, analytic_pauli_means
from graphent.errors import ResourceError, ValidationError
from graphent.graph import degree, generate_named
from graphent.statevector import (
    HADAMARD,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    PrepParams,
    StateVector,
    apply_controlled_phase,
    apply_single_qubit,
    dump_state,
    entanglement_from_rdm,
    exact_entanglement,
    init_product_state,
    load_state,
    pauli_expectation,
    prepare_graph_state,
    reduced_density_matrix,
    ry,
    rz,
)

PI = math.pi
angles = st.floats(-20, 20, allow_nan=False)


class TestPrepParams:
    def test_in_range_kept_exactly(self):
        p = PrepParams(phi=2 * PI, alpha=PI / 3, theta=PI)
        assert (p.phi, p.alpha, p.theta) == (2 * PI, PI / 3, PI)

    def test_alpha_wraps(self):
        assert PrepParams(0, 2 * PI, 0).alpha == 0.0
        assert PrepParams(0, -0.5, 0).alpha == pytest.approx(2 * PI - 0.5)

    def test_theta_reflection_shifts_alpha(self):
        p = PrepParams(phi=0.3, alpha=0.2, theta=PI + 0.4)
        assert p.theta == pytest.approx(PI - 0.4)
        assert p.alpha == pytest.approx(0.2 + PI)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValidationError):
            PrepParams(float("nan"), 0, 0)

    @given(angles, angles, angles)
    def test_canonical_ranges(self, phi, alpha, theta):
        p = PrepParams(phi, alpha, theta)
        assert 0 <= p.theta <= PI
        assert 0 <= p.phi <= 2 * PI
        assert 0 <= p.alpha < 2 * PI

    @given(angles, angles, angles)
    @settings(max_examples=50)
    def test_canonicalization_changes_only_global_phase(self, phi, alpha, theta):
        p = PrepParams(phi, alpha, theta)
        raw = oracles.graph_state(3, [(0, 1), (1, 2)], phi, alpha, theta)
        got = prepare_graph_state(generate_named("chain", 3), p).amplitudes
        assert abs(abs(np.vdot(raw, got)) - 1.0) < 1e-10


class TestInitProductState:
    def test_ground(self):
        np.testing.assert_allclose(init_product_state(1, PrepParams(0, 0, 0)).amplitudes, [1, 0], atol=1e-15)

    def test_plus(self):
        s = init_product_state(1, PrepParams(0, 0, PI / 2))
        np.testing.assert_allclose(s.amplitudes, [1 / math.sqrt(2)] * 2, atol=1e-15)

    def test_two_qubits_with_phase(self):
        # oracle: kron of (|0> + i|1>)/sqrt2 with itself
        expected = oracles.product_state(2, PI / 2, PI / 2)
        np.testing.assert_allclose(expected, [0.5, 0.5j, 0.5j, -0.5], atol=1e-15)
        s = init_product_state(2, PrepParams(1.0, PI / 2, PI / 2))
        np.testing.assert_allclose(s.amplitudes, expected, atol=1e-15)

    def test_size_cap(self, monkeypatch):
        monkeypatch.setenv("GRAPHENT_MAX_QUBITS", "4")
        with pytest.raises(ResourceError):
            init_product_state(5, PrepParams(0, 0, 0))
        assert init_product_state(4, PrepParams(0, 0, 0)).n_qubits == 4

    def test_default_cap(self):
        with pytest.raises(ResourceError):
            init_product_state(25, PrepParams(0, 0, 0))

    def test_zero_qubits_rejected(self):
        with pytest.raises(ValidationError):
            init_product_state(0, PrepParams(0, 0, 0))


class TestSingleQubit:
    def test_hadamard(self):
        out = apply_single_qubit(StateVector(1), 0, HADAMARD)
        np.testing.assert_allclose(out.amplitudes, [1 / math.sqrt(2)] * 2, atol=1e-15)

    def test_rotations_prepare_state_up_to_phase(self):
        alpha, theta = 0.9, 1.3
        s = apply_single_qubit(apply_single_qubit(StateVector(1), 0, ry(theta)), 0, rz(alpha))
        target = oracles.product_state(1, alpha, theta)
        np.testing.assert_allclose(s.amplitudes, np.exp(-0.5j * alpha) * target, atol=1e-15)

    def test_identity(self, rng):
        s = StateVector(3, random_state(rng, 3))
        np.testing.assert_array_equal(apply_single_qubit(s, 1, np.eye(2)).amplitudes, s.amplitudes)

    def test_non_unitary(self):
        with pytest.raises(ValidationError):
            apply_single_qubit(StateVector(1), 0, [[1, 1], [0, 1]])

    def test_out_of_range(self):
        with pytest.raises(ValidationError):
            apply_single_qubit(StateVector(2), 2, HADAMARD)

    def test_matches_full_operator(self, rng):
        s = StateVector(4, random_state(rng, 4))
        u = ry(0.4) @ rz(1.1) @ HADAMARD
        for q in range(4):
            got = apply_single_qubit(s, q, u).amplitudes
            np.testing.assert_allclose(got, oracles.embed(u, q, 4) @ s.amplitudes, atol=1e-12)

    def test_input_not_mutated(self, rng):
        s = StateVector(2, random_state(rng, 2))
        before = s.amplitudes.copy()
        apply_single_qubit(s, 0, HADAMARD)
        np.testing.assert_array_equal(s.amplitudes, before)


class TestControlledPhase:
    def test_cz_on_11(self):
        s = StateVector(2, [0, 0, 0, 1])
        np.testing.assert_allclose(apply_controlled_phase(s, 0, 1, PI).amplitudes, [0, 0, 0, -1], atol=1e-15)

    def test_zero_angle(self, rng):
        s = StateVector(3, random_state(rng, 3))
        np.testing.assert_array_equal(apply_controlled_phase(s, 0, 2, 0.0).amplitudes, s.amplitudes)

    def test_quarter_turn(self):
        s = StateVector(2, [0.5] * 4)
        expected = oracles.cp_diagonal(2, [(0, 1)], PI / 2) * 0.5
        np.testing.assert_allclose(expected, [0.5, 0.5, 0.5, 0.5j], atol=1e-15)
        np.testing.assert_allclose(apply_controlled_phase(s, 0, 1, PI / 2).amplitudes, expected, atol=1e-15)

    def test_symmetric(self, rng):
        s = StateVector(4, random_state(rng, 4))
        a = apply_controlled_phase(s, 1, 3, 0.77).amplitudes
        b = apply_controlled_phase(s, 3, 1, 0.77).amplitudes
        np.testing.assert_array_equal(a, b)

    def test_same_qubit(self):
        with pytest.raises(ValidationError):
            apply_controlled_phase(StateVector(2), 1, 1, PI)


class TestGraphState:
    def test_two_qubit_cluster(self):
        s = prepare_graph_state(generate_named("chain", 2), PrepParams(PI, 0, PI / 2))
        np.testing.assert_allclose(s.amplitudes, np.array([1, 1, 1, -1]) / 2, atol=1e-15)

    def test_zero_phi_is_product(self, rng):
        g = random_graph(rng, 5)
        p = PrepParams(0.0, 0.4, 1.2)
        np.testing.assert_array_equal(prepare_graph_state(g, p).amplitudes, init_product_state(5, p).amplitudes)

    def test_chain5_z_means_vanish(self):
        s = prepare_graph_state(generate_named("chain", 5), PrepParams(PI, 0, PI / 2))
        for q in range(5):
            assert abs(pauli_expectation(s, q, "z")) < 1e-12

    def test_matches_oracle(self, rng):
        for _ in range(10):
            n = int(rng.integers(2, 7))
            g = random_graph(rng, n)
            phi, alpha, theta = random_angles(rng)
            s = prepare_graph_state(g, PrepParams(phi, alpha, theta))
            expected = oracles.graph_state(n, g.sorted_edges(), phi, alpha, theta)
            np.testing.assert_allclose(s.amplitudes, expected, atol=1e-12)

    def test_edge_order_must_be_permutation(self):
        with pytest.raises(ValidationError):
            prepare_graph_state(generate_named("chain", 3), PrepParams(1, 0, 1), edge_order=[(0, 1)])

    def test_edge_order_commutes(self, rng):
        for _ in range(10):
            g = random_graph(rng, 6, 0.6)
            p = PrepParams(*random_angles(rng))
            edges = g.sorted_edges()
            shuffled = [tuple(reversed(e)) if rng.random() < 0.5 else e for e in rng.permutation(edges).tolist()]
            a = prepare_graph_state(g, p).amplitudes
            b = prepare_graph_state(g, p, edge_order=shuffled).amplitudes
            assert np.max(np.abs(a - b)) <= 1e-12

    def test_norm_preserved(self, rng):
        for _ in range(10):
            g = random_graph(rng, 7, 0.4)
            s = prepare_graph_state(g, PrepParams(*random_angles(rng)))
            assert abs(s.norm_squared() - 1) < 1e-10


class TestExpectations:
    def test_ground_z(self):
        assert pauli_expectation(StateVector(1), 0, "z") == 1.0

    def test_plus(self):
        s = init_product_state(1, PrepParams(0, 0, PI / 2))
        assert pauli_expectation(s, 0, "x") == pytest.approx(1.0, abs=1e-15)
        assert pauli_expectation(s, 0, "y") == pytest.approx(0.0, abs=1e-15)

    def test_chain5_matches_closed_form(self):
        phi, alpha, theta = PI / 2, 0.7, PI / 3
        s = prepare_graph_state(generate_named("chain", 5), PrepParams(phi, alpha, theta))
        expected = analytic_pauli_means(1, phi, alpha, theta)
        got = [pauli_expectation(s, 0, a) for a in "xyz"]
        np.testing.assert_allclose(got, expected, atol=1e-10)

    def test_matches_full_operator(self, rng):
        for _ in range(5):
            s = StateVector(4, random_state(rng, 4))
            for q in range(4):
                for axis in "xyz":
                    want = oracles.expectation(s.amplitudes, q, axis)
                    assert abs(want.imag) < 1e-12
                    assert pauli_expectation(s, q, axis) == pytest.approx(want.real, abs=1e-12)

    def test_bad_axis(self):
        with pytest.raises(ValidationError):
            pauli_expectation(StateVector(1), 0, "w")


class TestReducedDensityMatrix:
    def test_product_state_is_pure(self):
        s = init_product_state(3, PrepParams(0, 0.3, 1.1))
        evals = np.linalg.eigvalsh(reduced_density_matrix(s, 1))
        np.testing.assert_allclose(evals, [0, 1], atol=1e-12)

    def test_cluster_pair_maximally_mixed(self):
        s = prepare_graph_state(generate_named("chain", 2), PrepParams(PI, 0, PI / 2))
        np.testing.assert_allclose(reduced_density_matrix(s, 0), np.eye(2) / 2, atol=1e-15)

    def test_bloch_decomposition(self, rng):
        for _ in range(10):
            n = int(rng.integers(1, 6))
            s = StateVector(n, random_state(rng, n))
            for q in range(n):
                rho = reduced_density_matrix(s, q)
                assert np.allclose(rho, rho.conj().T, atol=1e-12)
                assert abs(np.trace(rho) - 1) < 1e-10
                evals = np.linalg.eigvalsh(rho)
                assert evals.min() > -1e-12 and evals.max() < 1 + 1e-12
                sx, sy, sz = (pauli_expectation(s, q, a) for a in "xyz")
                bloch = (np.eye(2) + sx * PAULI_X + sy * PAULI_Y + sz * PAULI_Z) / 2
                np.testing.assert_allclose(rho, bloch, atol=1e-10)
                for axis, m in (("x", PAULI_X), ("y", PAULI_Y), ("z", PAULI_Z)):
                    assert np.trace(rho @ m).real == pytest.approx(pauli_expectation(s, q, axis), abs=1e-10)


class TestEntanglement:
    def test_product_state(self):
        s = init_product_state(4, PrepParams(2.0, 1.0, 0.6))
        for q in range(4):
            assert exact_entanglement(s, q) == pytest.approx(0, abs=1e-12)

    def test_cluster_pair(self):
        s = prepare_graph_state(generate_named("chain", 2), PrepParams(PI, 0, PI / 2))
        assert exact_entanglement(s, 0) == pytest.approx(0.5, abs=1e-12)

    def test_cluster_pair_tilted(self):
        s = prepare_graph_state(generate_named("chain", 2), PrepParams(PI, 0, PI / 4))
        expected = 0.5 * (1 - math.sqrt(3) / 2)
        assert oracles.schmidt_entanglement(s.amplitudes, 0) == pytest.approx(expected, abs=1e-12)
        assert analytic_entanglement(1, PI, PI / 4) == pytest.approx(expected, abs=1e-12)
        assert exact_entanglement(s, 0) == pytest.approx(expected, abs=1e-12)
        assert entanglement_from_rdm(s, 0) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.066987, abs=1e-6)

    def test_three_routes_agree(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 11))
            g = random_graph(rng, n, rng.uniform(0.2, 0.8))
            s = prepare_graph_state(g, PrepParams(*random_angles(rng)))
            for q in range(n):
                e = exact_entanglement(s, q)
                assert e == pytest.approx(entanglement_from_rdm(s, q), abs=1e-10)
                if n <= 8:
                    assert e == pytest.approx(oracles.schmidt_entanglement(s.amplitudes, q), abs=1e-10)

    def test_alpha_invariance(self, rng):
        for _ in range(10):
            g = random_graph(rng, 5)
            phi, _, theta = random_angles(rng)
            for q in range(5):
                values = [
                    exact_entanglement(prepare_graph_state(g, PrepParams(phi, a, theta)), q)
                    for a in (0, 0.7, PI / 3, 5.1)
                ]
                assert max(values) - min(values) <= 1e-10


class TestDump:
    def test_round_trip(self, rng):
        s = StateVector(3, random_state(rng, 3))
        buf = io.BytesIO()
        dump_state(s, buf)
        raw = buf.getvalue()
        assert len(raw) == 4 + 16 * 8
        assert raw[:4] == b"\x03\x00\x00\x00"
        assert np.frombuffer(raw[4:12], "<f8")[0] == s.amplitudes[0].real
        loaded = load_state(io.BytesIO(raw))
        np.testing.assert_array_equal(loaded.amplitudes, s.amplitudes)

    def test_truncated(self):
        with pytest.raises(ValidationError):
            load_state(io.BytesIO(b"\x02\x00\x00\x00" + b"\x00" * 10))


def test_state_vector_rejects_wrong_size():
    with pytest.raises(ValidationError):
        StateVector(2, [1, 0, 0])


def test_degree_drives_entanglement(rng):
    g = random_graph(rng, 6)
    p = PrepParams(1.3, 0.2, 0.8)
    s = prepare_graph_state(g, p)
    for q in range(6):
        assert exact_entanglement(s, q) == pytest.approx(analytic_entanglement(degree(g, q), p.phi, p.theta), abs=1e-10)
