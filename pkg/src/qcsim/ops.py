"""Unitary gates and their application to selected qubits of a state.

Y here is the real matrix ((0, 1), (-1, 0)) = ZX, not the Pauli Y with
imaginary entries. Dense coding and teleportation tables depend on that
sign convention.
"""

from __future__ import annotations

import enum
from functools import lru_cache
from typing import Sequence

import numpy as np

from qcsim.config import TOL
from qcsim.errors import DomainError
from qcsim.qstate import StateVector

_S2 = 1.0 / np.sqrt(2.0)


class GateName(enum.Enum):
    I = "i"
    X = "x"
    Y = "y"
    Z = "z"
    H = "h"
    CNOT = "cnot"
    SWAP = "swap"
    TOFFOLI = "toffoli"
    FREDKIN = "fredkin"


class UnitaryOp:
    """Immutable ``2**k x 2**k`` complex matrix acting on k qubits."""

    __slots__ = ("_m", "arity", "name")

    def __init__(self, matrix, name: str | None = None, check: bool = True):
        m = np.array(matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError(f"matrix must be square, got shape {m.shape}")
        dim = m.shape[0]
        if dim == 0 or dim & (dim - 1):
            raise DomainError(f"dimension {dim} is not a power of two")
        if check and not is_unitary(m):
            raise DomainError(f"matrix {name or ''} is not unitary".replace("  ", " "))
        m.flags.writeable = False
        self._m = m
        self.arity = dim.bit_length() - 1
        self.name = name

    @property
    def matrix(self) -> np.ndarray:
        return self._m

    @property
    def dim(self) -> int:
        return self._m.shape[0]

    def __matmul__(self, other):
        if isinstance(other, UnitaryOp):
            return UnitaryOp(self._m @ other._m, check=False)
        if isinstance(other, StateVector):
            if other.n_qubits != self.arity:
                raise DomainError("operator and state sizes differ")
            return StateVector._wrap(self._m @ other.amplitudes)
        return NotImplemented

    def dagger(self) -> "UnitaryOp":
        name = f"{self.name}^-1" if self.name else None
        return UnitaryOp(self._m.conj().T, name=name, check=False)

    def allclose(self, other: "UnitaryOp", atol: float = TOL) -> bool:
        return self._m.shape == other._m.shape and bool(np.allclose(self._m, other._m, rtol=0, atol=atol))

    def __eq__(self, other):
        if not isinstance(other, UnitaryOp):
            return NotImplemented
        return bool(np.array_equal(self._m, other._m))

    __hash__ = None

    def __repr__(self) -> str:
        return f"UnitaryOp({self.name or '?'}, arity={self.arity})"


def is_unitary(u, atol: float = TOL) -> bool:
    """True iff every entry of U U* is within ``atol`` of the identity."""
    m = u.matrix if isinstance(u, UnitaryOp) else np.asarray(u, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    dev = m @ m.conj().T - np.eye(m.shape[0])
    return float(np.max(np.abs(dev))) < atol


_FIXED = {
    GateName.I: ((1, 0), (0, 1)),
    GateName.X: ((0, 1), (1, 0)),
    GateName.Y: ((0, 1), (-1, 0)),
    GateName.Z: ((1, 0), (0, -1)),
    GateName.H: ((_S2, _S2), (_S2, -_S2)),
    GateName.CNOT: ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0)),
    GateName.SWAP: ((1, 0, 0, 0), (0, 0, 1, 0), (0, 1, 0, 0), (0, 0, 0, 1)),
}


@lru_cache(maxsize=None)
def standard_gate(name: GateName | str) -> UnitaryOp:
    name = GateName(name) if isinstance(name, str) else name
    if name is GateName.TOFFOLI:
        return UnitaryOp(controlled(standard_gate(GateName.CNOT)).matrix, name="toffoli")
    if name is GateName.FREDKIN:
        return UnitaryOp(controlled(standard_gate(GateName.SWAP)).matrix, name="fredkin")
    return UnitaryOp(_FIXED[name], name=name.value)


def controlled(u: UnitaryOp) -> UnitaryOp:
    """|0><0| ⊗ I + |1><1| ⊗ U, control on the new leading qubit."""
    d = u.dim
    m = np.zeros((2 * d, 2 * d), dtype=np.complex128)
    m[:d, :d] = np.eye(d)
    m[d:, d:] = u.matrix
    return UnitaryOp(m, name=f"c-{u.name}" if u.name else None, check=False)


def rotation(alpha: float) -> UnitaryOp:
    c, s = np.cos(alpha), np.sin(alpha)
    return UnitaryOp(((c, s), (-s, c)), name=f"rot({alpha!r})", check=False)


def phase(alpha: float) -> UnitaryOp:
    return UnitaryOp(np.diag([np.exp(1j * alpha), np.exp(-1j * alpha)]), name=f"phase({alpha!r})", check=False)


def cphase(theta: float) -> UnitaryOp:
    """diag(1, 1, 1, e^{i theta}): the two-qubit phase gate used by the QFT."""
    return UnitaryOp(np.diag([1, 1, 1, np.exp(1j * theta)]), name=f"cphase({theta!r})", check=False)


def identity(k: int) -> UnitaryOp:
    return UnitaryOp(np.eye(1 << k), name=f"I{k}", check=False)


def tensor_op(a: UnitaryOp, b: UnitaryOp) -> UnitaryOp:
    """Kronecker product; ``a`` acts on the leading (more significant) qubits."""
    name = f"{a.name}⊗{b.name}" if a.name and b.name else None
    return UnitaryOp(np.kron(a.matrix, b.matrix), name=name, check=False)


def walsh(n: int) -> UnitaryOp:
    """W_n with entries (-1)^{popcount(r & s)} / sqrt(2^n)."""
    if n < 1:
        raise DomainError("walsh needs n >= 1")
    idx = np.arange(1 << n)
    common = idx[:, None] & idx[None, :]
    parity = np.zeros_like(common)
    while np.any(common):
        parity ^= common & 1
        common >>= 1
    m = (1 - 2 * parity) / np.sqrt(1 << n)
    return UnitaryOp(m, name=f"W{n}", check=False)


def check_targets(targets: Sequence[int], n: int) -> tuple[int, ...]:
    t = tuple(int(q) for q in targets)
    if len(set(t)) != len(t):
        raise DomainError(f"duplicate target qubits {t}")
    for q in t:
        if not 0 <= q < n:
            raise DomainError(f"qubit {q} out of range for {n} qubits")
    return t


def apply_matrix(m: np.ndarray, targets: Sequence[int], amps: np.ndarray, n: int) -> np.ndarray:
    """Apply a ``2**k`` square matrix to the given qubits of a raw amplitude array.

    The array is viewed as an n-axis tensor (axis q is qubit q), the target
    axes are moved to the front, and the gate multiplies a
    ``2**k x 2**(n-k)`` slab. Cost is O(2^n 2^k); nothing of size 4^n is built.
    """
    k = len(targets)
    if k == 0:
        return amps.copy()
    psi = amps.reshape((2,) * n)
    front = list(range(k))
    psi = np.moveaxis(psi, targets, front)
    shape = psi.shape
    out = m @ psi.reshape(1 << k, -1)
    out = np.moveaxis(out.reshape(shape), front, targets)
    return np.ascontiguousarray(out).reshape(-1)


def apply(u: UnitaryOp, targets: Sequence[int], state: StateVector) -> StateVector:
    """Apply ``u`` to ``targets`` of ``state``; targets[0] maps to u's leading qubit."""
    t = check_targets(targets, state.n_qubits)
    if len(t) != u.arity:
        raise DomainError(f"{u!r} needs {u.arity} targets, got {len(t)}")
    return StateVector._wrap(apply_matrix(u.matrix, t, state.amplitudes, state.n_qubits))


def apply_walsh(state: StateVector, qubits: Sequence[int]) -> StateVector:
    """H on each listed qubit, one at a time (the Walsh transform on that register)."""
    t = check_targets(qubits, state.n_qubits)
    h = standard_gate(GateName.H).matrix
    amps = state.amplitudes
    for q in t:
        amps = apply_matrix(h, (q,), amps, state.n_qubits)
    return StateVector._wrap(amps if amps is not state.amplitudes else amps.copy())


def operator_on(u: UnitaryOp, targets: Sequence[int], n: int) -> UnitaryOp:
    """Full ``2**n`` matrix of ``u`` embedded on ``targets``; for small n only."""
    t = check_targets(targets, n)
    cols = [apply_matrix(u.matrix, t, np.eye(1 << n, dtype=np.complex128)[:, j], n) for j in range(1 << n)]
    return UnitaryOp(np.stack(cols, axis=1), check=False)
