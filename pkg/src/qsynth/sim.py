"""Dense unitary and statevector simulation: the correctness oracle.

Everything here uses the global little-endian convention: the bit of qubit
``q`` in a basis-state index ``i`` is ``(i >> q) & 1``.  ``unitary_of`` is
capped at 13 qubits (dimension 8192), ``apply`` at 22 qubits.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .ir import Circuit, Gate, lower, _rccx_template

UNITARY_CAP = 13
APPLY_CAP = 22

_SQ = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
    "T": np.array([[1, 0], [0, cmath.exp(1j * math.pi / 4)]], dtype=complex),
    "Tdg": np.array([[1, 0], [0, cmath.exp(-1j * math.pi / 4)]],
                    dtype=complex),
}


def rx_mat(a):
    c, s = math.cos(a / 2), math.sin(a / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def ry_mat(a):
    c, s = math.cos(a / 2), math.sin(a / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz_mat(a):
    return np.array([[cmath.exp(-0.5j * a), 0], [0, cmath.exp(0.5j * a)]],
                    dtype=complex)


def _controlled(U):
    """4x4 controlled-U; index ordering (control, target), control first."""
    m = np.eye(4, dtype=complex)
    m[2:, 2:] = U
    return m


_CX = _controlled(_SQ["X"])

_CCX = np.eye(8, dtype=complex)
_CCX[6:, 6:] = _SQ["X"]


@lru_cache(maxsize=1)
def rccx_matrix():
    """8x8 matrix of the relative-phase Toffoli, computed from its network."""
    # operands (a, b, t) with a as the most significant local index bit,
    # matching the gate_matrix ordering: under the global little-endian
    # convention that means a = qubit 2, b = qubit 1, t = qubit 0
    c = Circuit(3, _rccx_template(2, 1, 0))
    return unitary_of(c)


def gate_matrix(g: Gate) -> np.ndarray:
    """Dense matrix of one gate over its own operands.

    Index ordering inside the matrix follows the operand list: the first
    operand is the most significant bit of the local index.
    """
    if g.kind in _SQ:
        return _SQ[g.kind]
    if g.kind == "Rx":
        return rx_mat(g.angle)
    if g.kind == "Ry":
        return ry_mat(g.angle)
    if g.kind == "Rz":
        return rz_mat(g.angle)
    if g.kind == "U2":
        return np.asarray(g.matrix, dtype=complex)
    if g.kind == "CX":
        return _CX
    if g.kind == "CU2":
        return _controlled(np.asarray(g.matrix, dtype=complex))
    if g.kind == "CCX":
        return _CCX
    if g.kind == "RCCX":
        return rccx_matrix()
    raise ValueError("no matrix for kind %r" % (g.kind,))


def _apply_tensor(tensor, circuit):
    """Apply circuit gates to an array shaped [2]*n (+ trailing axes)."""
    n = circuit.num_qubits
    extra = tensor.ndim - n
    for g in circuit.gates:
        k = len(g.qubits)
        m = gate_matrix(g).reshape((2,) * (2 * k))
        # axis for qubit q is n-1-q (little-endian)
        axes = [n - 1 - q for q in g.qubits]
        tensor = np.tensordot(m, tensor, axes=(range(k, 2 * k), axes))
        # tensordot puts the gate axes in front; move them back
        tensor = np.moveaxis(tensor, range(k), axes)
    return tensor


def apply(circuit: Circuit, state: np.ndarray) -> np.ndarray:
    """Apply the circuit to a statevector, gate by gate."""
    n = circuit.num_qubits
    if n > APPLY_CAP:
        raise ValueError("apply capped at %d qubits, got %d"
                         % (APPLY_CAP, n))
    state = np.asarray(state, dtype=complex)
    if state.shape != (2 ** n,):
        raise ValueError("state dimension mismatch")
    t = _apply_tensor(state.reshape((2,) * n), circuit)
    return t.reshape(2 ** n)


def unitary_of(circuit: Circuit) -> np.ndarray:
    """Full unitary of the circuit: product of gate embeddings in order."""
    n = circuit.num_qubits
    if n > UNITARY_CAP:
        raise ValueError("unitary_of capped at %d qubits, got %d"
                         % (UNITARY_CAP, n))
    dim = 2 ** n
    t = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
    t = _apply_tensor(t, circuit)
    return t.reshape(dim, dim)


@dataclass(frozen=True)
class EquivResult:
    """Distance plus pass/fail verdict from an equivalence check."""
    distance: float
    passed: bool
    mode: str

    def __bool__(self):
        return self.passed


def _global_phase_dist(A, B):
    D = B.conj().T @ A
    k = np.unravel_index(np.abs(D).argmax(), D.shape)
    phi = cmath.phase(D[k])
    return float(np.abs(A - cmath.exp(1j * phi) * B).max())


def _split_ancilla(M, n, ancillas):
    """Reshape a 2^n matrix into blocks indexed by ancilla bit patterns.

    Returns an array B[a_out, a_in] of (2^r x 2^r) blocks, r = n - #anc.
    """
    anc = sorted(ancillas)
    rest = [q for q in range(n) if q not in anc]
    dim_a, dim_r = 2 ** len(anc), 2 ** len(rest)
    T = M.reshape((2,) * n + (2,) * n)
    # output axes: qubit q -> axis n-1-q; input axes shifted by n
    out_a = [n - 1 - q for q in anc]
    out_r = [n - 1 - q for q in rest]
    in_a = [2 * n - 1 - q for q in anc]
    in_r = [2 * n - 1 - q for q in rest]
    T = np.transpose(T, out_a + out_r + in_a + in_r)
    return T.reshape(dim_a, dim_r, dim_a, dim_r).transpose(0, 2, 1, 3)


def equiv(A, B, mode, tol=1e-9, ancillas=()) -> EquivResult:
    """Compare two unitaries under the requested equivalence mode.

    Modes: 'exact' (max-norm), 'global_phase', 'diagonal' (B^dag A diagonal
    with unit-modulus entries), 'clean_subspace' (listed ancillae start in
    |0>, are preserved, and the restricted blocks agree), 'tensor_identity'
    (A equals B' tensor identity over the listed ancillae, up to global
    phase).  Returns distance and verdict.
    """
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.shape != B.shape or A.shape[0] != A.shape[1]:
        raise ValueError("dimension mismatch")
    n = int(round(math.log2(A.shape[0])))
    if 2 ** n != A.shape[0]:
        raise ValueError("dimension is not a power of two")

    if mode == "exact":
        d = float(np.abs(A - B).max())
        return EquivResult(d, d <= tol, mode)

    if mode == "global_phase":
        d = _global_phase_dist(A, B)
        return EquivResult(d, d <= tol, mode)

    if mode == "diagonal":
        D = B.conj().T @ A
        off = D - np.diag(np.diag(D))
        d = max(float(np.abs(off).max()),
                float(np.abs(np.abs(np.diag(D)) - 1).max()))
        return EquivResult(d, d <= tol, mode)

    if mode == "clean_subspace":
        if not ancillas:
            raise ValueError("clean_subspace needs ancilla indices")
        BA = _split_ancilla(A, n, ancillas)
        BB = _split_ancilla(B, n, ancillas)
        # columns with ancillae |0> must come back with ancillae |0> ...
        leak = float(np.abs(BA[1:, 0]).max()) if BA.shape[0] > 1 else 0.0
        # ... and the restricted blocks must agree
        d = max(leak, float(np.abs(BA[0, 0] - BB[0, 0]).max()))
        return EquivResult(d, d <= tol, mode)

    if mode == "tensor_identity":
        if not ancillas:
            raise ValueError("tensor_identity needs ancilla indices")
        BA = _split_ancilla(A, n, ancillas)
        da = BA.shape[0]
        offdiag = 0.0
        if da > 1:
            mask = ~np.eye(da, dtype=bool)
            offdiag = float(np.abs(BA[mask]).max())
        # every diagonal block must equal the a=0 block exactly, and that
        # block must match B's restricted action up to one global phase
        block = BA[0, 0]
        same = max(float(np.abs(BA[a, a] - block).max())
                   for a in range(da))
        BB = _split_ancilla(B, n, ancillas)[0, 0]
        d = max(offdiag, same, _global_phase_dist(block, BB))
        return EquivResult(d, d <= tol, mode)

    raise ValueError("unknown mode %r" % (mode,))


def _largest_singular_value(D):
    if D.shape[0] <= 256:
        return float(np.linalg.norm(D, 2))
    # matrix-free power iteration on D^dag D; a full SVD at dimension 4096
    # costs minutes while two matvecs per step cost milliseconds
    v = np.full(D.shape[0], 1.0 / math.sqrt(D.shape[0]), dtype=complex)
    sigma = 0.0
    for _ in range(500):
        w = D.conj().T @ (D @ v)
        nrm = float(np.linalg.norm(w))
        if nrm == 0.0:
            return 0.0
        v = w / nrm
        nxt = math.sqrt(nrm)
        if abs(nxt - sigma) <= 1e-10 * max(nxt, 1.0):
            return nxt
        sigma = nxt
    return sigma


def spectral_distance(A, B) -> float:
    """Largest singular value of A - e^{i phi} B after phase alignment."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    D = B.conj().T @ A
    k = np.unravel_index(np.abs(D).argmax(), D.shape)
    phi = cmath.phase(D[k])
    return _largest_singular_value(A - cmath.exp(1j * phi) * B)


def random_state(n, rng, product=False):
    """Haar-ish random statevector; product=True gives a product state."""
    if product:
        amps = np.array([1.0], dtype=complex)
        for _ in range(n):
            v = rng.normal(size=2) + 1j * rng.normal(size=2)
            v /= np.linalg.norm(v)
            amps = np.kron(v, amps)
        return amps
    v = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    return v / np.linalg.norm(v)
