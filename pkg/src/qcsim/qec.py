"""Error models, syndrome extraction and recovery for small quantum codes.

A code maps n_data qubits into n_code qubits. Syndromes are computed into a
fresh ancilla register by a classical permutation |x, a> -> |x, a ^ s(x)>, the
ancilla is measured (which collapses a superposition of errors onto one
term), and the inverse of the tabulated error is applied.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from qcsim import ops
from qcsim.circuit import ClassicalOracle, apply_oracle, oracle_permutation
from qcsim.config import TOL
from qcsim.errors import DomainError, UncorrectableError
from qcsim.measure import Distribution, measure, probabilities
from qcsim.qstate import StateVector, basis_state, tensor
from qcsim.rng import RngStream


def pauli_string(word: str) -> ops.UnitaryOp:
    """Tensor product of single-qubit gates, e.g. "XII" = X⊗I⊗I (leftmost acts on qubit 0)."""
    if not word:
        raise DomainError("empty operator word")
    m = np.ones((1, 1), dtype=np.complex128)
    for ch in word:
        m = np.kron(m, ops.standard_gate(ch.lower()).matrix)
    return ops.UnitaryOp(m, name="⊗".join(word.upper()), check=False)


@dataclass(frozen=True)
class ErrorOperator:
    """sum_i e_i E_i with sum |e_i|^2 = 1 and every E_i unitary of the same arity."""

    terms: tuple[tuple[complex, ops.UnitaryOp], ...]

    def __post_init__(self):
        terms = tuple((complex(e), op) for e, op in self.terms)
        if not terms:
            raise DomainError("error operator needs at least one term")
        arities = {op.arity for _, op in terms}
        if len(arities) != 1:
            raise DomainError("error terms act on different numbers of qubits")
        weight = sum(abs(e) ** 2 for e, _ in terms)
        if abs(weight - 1.0) > TOL:
            raise DomainError(f"squared weights sum to {weight}, not 1")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def single(cls, op: ops.UnitaryOp) -> "ErrorOperator":
        return cls(((1.0, op),))

    @property
    def arity(self) -> int:
        return self.terms[0][1].arity

    def matrix(self) -> np.ndarray:
        return sum(e * op.matrix for e, op in self.terms)


def apply_error(e: ErrorOperator, state: StateVector) -> StateVector:
    """Apply sum_i e_i E_i; renormalize (with a warning) if the images were not orthogonal."""
    if e.arity != state.n_qubits:
        raise DomainError(f"error acts on {e.arity} qubits, state has {state.n_qubits}")
    out = sum(c * (op @ state).amplitudes for c, op in e.terms)
    norm = float(np.linalg.norm(out))
    if norm < TOL:
        raise DomainError("error operator annihilates the state")
    if abs(norm - 1.0) > TOL:
        warnings.warn(f"error image has norm {norm:.6g}; renormalizing", RuntimeWarning, stacklevel=2)
        out = out / norm
    return StateVector._wrap(out)


@dataclass(frozen=True)
class QuantumCode:
    """Encoder, syndrome function and correction table of a non-degenerate code.

    ``codewords`` has one column per data basis state. ``syndrome`` maps a code
    basis index to an ``n_anc``-bit value. The correction table is derived from
    ``errors`` at construction: each error must give one fixed syndrome on every
    encoded basis state, and no two errors may share a syndrome.
    """

    n_data: int
    n_code: int
    n_anc: int
    codewords: np.ndarray = field(repr=False)
    syndrome: Callable[[int], int] = field(repr=False, compare=False)
    errors: tuple[ops.UnitaryOp, ...] = field(repr=False)
    correction_table: dict[int, ops.UnitaryOp] = field(init=False, repr=False)

    def __post_init__(self):
        cw = np.array(self.codewords, dtype=np.complex128)
        if cw.shape != (1 << self.n_code, 1 << self.n_data):
            raise DomainError("codeword matrix has the wrong shape")
        if not np.allclose(cw.conj().T @ cw, np.eye(1 << self.n_data), rtol=0, atol=TOL):
            raise DomainError("encoder is not an isometry")
        cw.flags.writeable = False
        object.__setattr__(self, "codewords", cw)
        object.__setattr__(self, "errors", tuple(self.errors))
        table: dict[int, ops.UnitaryOp] = {}
        for err in self.errors:
            if err.arity != self.n_code:
                raise DomainError(f"{err!r} does not act on {self.n_code} code qubits")
            syn = self._syndrome_of(err)
            if syn in table:
                raise DomainError(f"errors {table[syn]!r} and {err!r} share syndrome {syn}: degenerate code")
            table[syn] = err
        object.__setattr__(self, "correction_table", table)

    def _syndrome_of(self, err: ops.UnitaryOp) -> int:
        seen = set()
        for x in range(1 << self.n_data):
            img = err @ self.encode(basis_state(self.n_data, x))
            dist = syndrome_distribution(self, img)
            support = dist.support(cutoff=TOL)
            if len(support) != 1:
                raise DomainError(f"{err!r} does not produce a definite syndrome")
            seen.add(support[0])
        if len(seen) != 1:
            raise DomainError(f"syndrome of {err!r} depends on the data")
        return seen.pop()

    def oracle(self) -> ClassicalOracle:
        return ClassicalOracle(self.n_code, self.n_anc, self.syndrome, name="S")

    def syndrome_op(self) -> ops.UnitaryOp:
        """The syndrome permutation on n_code + n_anc qubits as an explicit matrix."""
        n = self.n_code + self.n_anc
        perm = oracle_permutation(self.oracle(), n, range(self.n_code), range(self.n_code, n))
        m = np.zeros((1 << n, 1 << n))
        m[perm, np.arange(1 << n)] = 1.0
        return ops.UnitaryOp(m, name="S", check=False)

    def encode(self, state: StateVector) -> StateVector:
        if state.n_qubits != self.n_data:
            raise DomainError(f"code takes {self.n_data} data qubits")
        return StateVector._wrap(self.codewords @ state.amplitudes)


def _bitflip_syndrome(x: int) -> int:
    x0, x1, x2 = (x >> 2) & 1, (x >> 1) & 1, x & 1
    return ((x0 ^ x1) << 2) | ((x0 ^ x2) << 1) | (x1 ^ x2)


def bitflip_code() -> QuantumCode:
    """|0> -> |000>, |1> -> |111>; corrects no error or one X on any qubit."""
    cw = np.zeros((8, 2))
    cw[0b000, 0] = 1.0
    cw[0b111, 1] = 1.0
    errs = [pauli_string(w) for w in ("III", "XII", "IXI", "IIX")]
    return QuantumCode(1, 3, 3, cw, _bitflip_syndrome, errs)


def syndrome_distribution(code: QuantumCode, corrupted: StateVector) -> Distribution:
    """Exact distribution of the ancilla readout, computed on the padded state."""
    padded = _extract(code, corrupted)
    n = code.n_code + code.n_anc
    return probabilities(padded, range(code.n_code, n))


def _extract(code: QuantumCode, corrupted: StateVector) -> StateVector:
    if corrupted.n_qubits != code.n_code:
        raise DomainError(f"expected {code.n_code} code qubits, got {corrupted.n_qubits}")
    n = code.n_code + code.n_anc
    padded = tensor(corrupted, basis_state(code.n_anc, 0))
    return apply_oracle(code.oracle(), padded, range(code.n_code), range(code.n_code, n))


@dataclass(frozen=True)
class RecoveryReport:
    syndrome: int
    syndrome_probability: float
    applied_correction: str
    final_state: StateVector
    fidelity_to_encoded: float | None

    def syndrome_bits(self, n_anc: int) -> str:
        return format(self.syndrome, f"0{n_anc}b")


def recover(code: QuantumCode, corrupted: StateVector, rng: RngStream, expected: StateVector | None = None) -> RecoveryReport:
    """Extract and measure the syndrome, then undo the tabulated error.

    ``expected`` is the encoded state before corruption; when given, the
    report carries |<expected|final>|.
    """
    n = code.n_code + code.n_anc
    padded = _extract(code, corrupted)
    m = measure(padded, range(code.n_code, n), rng)
    if m.outcome not in code.correction_table:
        raise UncorrectableError(f"syndrome {format(m.outcome, f'0{code.n_anc}b')} is not in the correction table")
    # the ancilla is now a definite basis state; read the data block off it
    data = m.post_state.amplitudes.reshape(1 << code.n_code, 1 << code.n_anc)[:, m.outcome]
    err = code.correction_table[m.outcome]
    fixed = err.dagger() @ StateVector(data)
    fid = None if expected is None else min(1.0, fixed.fidelity(expected))
    return RecoveryReport(m.outcome, m.probability, err.name or "?", fixed, fid)


def random_mixture(errors: Sequence[ops.UnitaryOp], rng: RngStream) -> ErrorOperator:
    """Error with random complex weights over ``errors``, normalized."""
    w = np.array([complex(rng.uniform() - 0.5, rng.uniform() - 0.5) for _ in errors])
    w /= np.linalg.norm(w)
    return ErrorOperator(tuple(zip(w, errors)))


def worked_example() -> tuple[StateVector, ErrorOperator]:
    """Data (|0> - |1>)/sqrt(2) and error 0.8 X⊗I⊗I + 0.6 I⊗X⊗I."""
    psi = StateVector([2 ** -0.5, -(2 ** -0.5)])
    e = ErrorOperator(((0.8, pauli_string("XII")), (0.6, pauli_string("IXI"))))
    return psi, e


def correctable_words(code: QuantumCode) -> Iterable[tuple[str, str]]:
    """(syndrome bits, correction name) rows of the table in syndrome order."""
    for syn in sorted(code.correction_table):
        yield format(syn, f"0{code.n_anc}b"), code.correction_table[syn].name or "?"
