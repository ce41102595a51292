import numpy as np
import pytest

from qsynth.ir import Circuit, Gate, lower
from qsynth.sim import (apply, equiv, gate_matrix, random_state,
                        rx_mat, ry_mat, rz_mat, spectral_distance,
                        unitary_of)

from conftest import H, X, ctrl_u, random_su2


def test_x_on_single_qubit():
    U = unitary_of(Circuit(1, [Gate("X", (0,))]))
    assert np.array_equal(U, X)


def test_little_endian_convention():
    # X on qubit 0 of a 2-qubit register flips the LSB of the index
    U = unitary_of(Circuit(2, [Gate("X", (0,))]))
    assert np.abs(U - np.kron(np.eye(2), X)).max() < 1e-15
    # and on qubit 1 the MSB
    U = unitary_of(Circuit(2, [Gate("X", (1,))]))
    assert np.abs(U - np.kron(X, np.eye(2))).max() < 1e-15


def test_cx_matches_oracle():
    U = unitary_of(Circuit(2, [Gate("CX", (0, 1))]))
    assert np.abs(U - ctrl_u(2, [0], 1, X)).max() < 1e-15
    U = unitary_of(Circuit(2, [Gate("CX", (1, 0))]))
    assert np.abs(U - ctrl_u(2, [1], 0, X)).max() < 1e-15


def test_ccx_matches_oracle():
    U = unitary_of(Circuit(3, [Gate("CCX", (0, 2, 1))]))
    assert np.abs(U - ctrl_u(3, [0, 2], 1, X)).max() < 1e-13


def test_rotations():
    for mk, mat in (("Rx", rx_mat), ("Ry", ry_mat), ("Rz", rz_mat)):
        U = unitary_of(Circuit(1, [Gate(mk, (0,), angle=0.37)]))
        assert np.abs(U - mat(0.37)).max() < 1e-15


def test_apply_consistent_with_unitary(rng):
    gates = [Gate("H", (0,)), Gate("CX", (0, 2)),
             Gate("CU2", (1, 0), matrix=random_su2(rng)),
             Gate("Rz", (2,), angle=1.1), Gate("RCCX", (2, 0, 1))]
    c = Circuit(3, gates)
    psi = random_state(3, rng)
    assert np.abs(apply(c, psi) - unitary_of(c) @ psi).max() < 1e-12


def test_caps_enforced():
    with pytest.raises(ValueError):
        unitary_of(Circuit(14, []))
    with pytest.raises(ValueError):
        apply(Circuit(23, []), np.zeros(2 ** 23, dtype=complex))


def test_equiv_exact_and_global_phase():
    A = unitary_of(Circuit(2, [Gate("CX", (0, 1))]))
    r = equiv(A, A, "exact")
    assert r.passed and r.distance == 0.0
    B = np.exp(0.42j) * A
    assert not equiv(A, B, "exact").passed
    r = equiv(A, B, "global_phase")
    assert r.passed and r.distance < 1e-12
    assert bool(r) is True


def test_equiv_diagonal():
    ccx = unitary_of(Circuit(3, [Gate("CCX", (0, 1, 2))]))
    rccx = unitary_of(Circuit(3, [Gate("RCCX", (0, 1, 2))]))
    assert equiv(rccx, ccx, "diagonal", 1e-12).passed
    h3 = unitary_of(Circuit(3, [Gate("H", (2,))]))
    assert not equiv(h3, ccx, "diagonal").passed


def test_equiv_clean_subspace():
    # CX(0,1) with a spectator qubit 2 doing a self-cancelling pair
    c = Circuit(3, [Gate("CX", (0, 2)), Gate("CX", (0, 1)),
                    Gate("CX", (0, 2))])
    A = unitary_of(c)
    B = ctrl_u(3, [0], 1, X)
    assert equiv(A, B, "clean_subspace", 1e-12, ancillas=(2,)).passed
    # a circuit that leaks into the ancilla must fail
    bad = unitary_of(Circuit(3, [Gate("CX", (0, 2)), Gate("CX", (0, 1))]))
    assert not equiv(bad, B, "clean_subspace", 1e-9, ancillas=(2,)).passed


def test_equiv_tensor_identity():
    A = unitary_of(Circuit(3, [Gate("CX", (0, 1))]))
    B = ctrl_u(3, [0], 1, X)
    assert equiv(A, B, "tensor_identity", 1e-12, ancillas=(2,)).passed
    # acting on the "ancilla" breaks the tensor split
    A2 = unitary_of(Circuit(3, [Gate("CX", (0, 1)), Gate("H", (2,))]))
    assert not equiv(A2, B, "tensor_identity", 1e-9, ancillas=(2,)).passed


def test_equiv_rejects_mismatch():
    with pytest.raises(ValueError):
        equiv(np.eye(2), np.eye(4), "exact")
    with pytest.raises(ValueError):
        equiv(np.eye(2), np.eye(2), "sideways")
    with pytest.raises(ValueError):
        equiv(np.eye(4), np.eye(4), "clean_subspace")


def test_spectral_distance_phase_invariant(rng):
    A = unitary_of(Circuit(2, [Gate("H", (0,)), Gate("CX", (0, 1))]))
    assert spectral_distance(A, np.exp(1.3j) * A) < 1e-12
    # Rz(theta) vs identity: eigenphases +-theta/2, so the aligned
    # distance sits between 2 sin(theta/4) and 2 sin(theta/2)
    th = 0.8
    d = spectral_distance(rz_mat(th), np.eye(2))
    assert 2 * np.sin(th / 4) - 1e-12 <= d <= 2 * np.sin(th / 2) + 1e-12


def test_random_state_properties(rng):
    psi = random_state(4, rng)
    assert abs(np.linalg.norm(psi) - 1) < 1e-12
    p = random_state(3, rng, product=True)
    assert abs(np.linalg.norm(p) - 1) < 1e-12
    # product state has rank-1 splits across every bipartition
    m = p.reshape(2, 4)
    s = np.linalg.svd(m, compute_uv=False)
    assert s[1] < 1e-12


def test_gate_matrix_first_operand_msb():
    M = gate_matrix(Gate("CX", (0, 1)))
    # within a gate's own matrix the first operand is the high bit
    assert np.array_equal(M, np.array([[1, 0, 0, 0], [0, 1, 0, 0],
                                       [0, 0, 0, 1], [0, 0, 1, 0]],
                                      dtype=complex))
