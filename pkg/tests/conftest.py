import numpy as np
import pytest

# ---------------------------------------------------------------------------
# independent oracles: plain index arithmetic, no circuit machinery involved

X = np.array([[0, 1], [1, 0]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def ctrl_u(nq, ctrls, target, W):
    """Unitary of W on `target` controlled on `ctrls`, little-endian."""
    dim = 1 << nq
    cm = sum(1 << c for c in ctrls)
    tb = 1 << target
    M = np.eye(dim, dtype=complex)
    for i in range(dim):
        if (i & cm) == cm and not (i & tb):
            j = i | tb
            M[i, i], M[j, i] = W[0, 0], W[1, 0]
            M[i, j], M[j, j] = W[0, 1], W[1, 1]
    return M


def cnx(nq, n, target=None):
    """C^nX over nq qubits, controls 0..n-1, target defaults to qubit n."""
    return ctrl_u(nq, range(n), n if target is None else target, X)


def mcmt_oracle(nq, n, targets, Ws):
    """Product of controlled gates, one W per target, shared controls."""
    M = np.eye(1 << nq, dtype=complex)
    for t, W in zip(targets, Ws):
        M = ctrl_u(nq, range(n), t, W) @ M
    return M


def random_su2(rng):
    """Haar-ish SU(2) sample from a normalized quaternion."""
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    return np.array([[q[0] - 1j * q[3], -q[2] - 1j * q[1]],
                     [q[2] - 1j * q[1], q[0] + 1j * q[3]]], dtype=complex)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
