"""Key distribution, dense coding and teleportation on top of the core primitives."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from qcsim.errors import DomainError, IntegrityError
from qcsim.measure import measure, probabilities, project
from qcsim.ops import GateName, apply, standard_gate
from qcsim.qstate import StateVector, basis_state, tensor
from qcsim.rng import RngStream

_S2 = 1.0 / np.sqrt(2.0)

# value -> Alice's transform for dense coding; also Bob's teleport correction table
_PAULI = (GateName.I, GateName.X, GateName.Y, GateName.Z)
_TELEPORT_FIX = {0b00: GateName.I, 0b01: GateName.X, 0b10: GateName.Z, 0b11: GateName.Y}
# (first bit after H, second bit after CNOT) -> encoded value
_DENSE_DECODE = {(0, 0): 0, (0, 1): 1, (1, 1): 2, (1, 0): 3}


def epr_pair() -> StateVector:
    """(|00> + |11>) / sqrt(2)."""
    return StateVector([_S2, 0, 0, _S2])


# -- BB84 ---------------------------------------------------------------------

@dataclass(frozen=True)
class Bb84Report:
    n_sent: int
    sifted_indices: tuple[int, ...]
    sifted_fraction: float
    disagreement_rate: float
    eve_present: bool
    alice_key: tuple[int, ...] = ()
    bob_key: tuple[int, ...] = ()

    def lines(self) -> list[str]:
        return [
            f"n_sent: {self.n_sent}",
            f"eve_present: {str(self.eve_present).lower()}",
            f"sifted_bits: {len(self.sifted_indices)}",
            f"sifted_fraction: {self.sifted_fraction:.6f}",
            f"disagreement_rate: {self.disagreement_rate:.6f}",
        ]


def _prepare(bit: int, diagonal: int) -> StateVector:
    s = basis_state(1, bit)
    return apply(standard_gate(GateName.H), [0], s) if diagonal else s


def _read(state: StateVector, diagonal: int, rng: RngStream) -> int:
    if diagonal:
        state = apply(standard_gate(GateName.H), [0], state)
    return measure(state, [0], rng).outcome


def bb84(n_bits: int, eve: bool, rng: RngStream) -> Bb84Report:
    """Simulate BB84 one photon at a time, optionally with intercept-resend Eve.

    Basis 0 is rectilinear (|0>, |1>); basis 1 is diagonal, prepared and read
    through H. Eve measures in her own random basis and resends what she saw
    in that basis.
    """
    if n_bits < 1:
        raise DomainError("bb84 needs at least one bit")
    sifted: list[int] = []
    a_key: list[int] = []
    b_key: list[int] = []
    for i in range(n_bits):
        bit = rng.bit()
        a_basis = rng.bit()
        photon = _prepare(bit, a_basis)
        if eve:
            e_basis = rng.bit()
            photon = _prepare(_read(photon, e_basis, rng), e_basis)
        b_basis = rng.bit()
        got = _read(photon, b_basis, rng)
        if a_basis == b_basis:
            sifted.append(i)
            a_key.append(bit)
            b_key.append(got)
    errors = sum(a != b for a, b in zip(a_key, b_key))
    return Bb84Report(
        n_sent=n_bits,
        sifted_indices=tuple(sifted),
        sifted_fraction=len(sifted) / n_bits,
        disagreement_rate=errors / len(sifted) if sifted else 0.0,
        eve_present=eve,
        alice_key=tuple(a_key),
        bob_key=tuple(b_key),
    )


# -- dense coding -----------------------------------------------------------------

def dense_encode(value: int, pair: StateVector | None = None) -> StateVector:
    """Alice applies I, X, Y or Z to her (first) qubit of the EPR pair."""
    if value not in (0, 1, 2, 3):
        raise DomainError(f"dense coding carries a value in 0..3, got {value}")
    pair = epr_pair() if pair is None else pair
    return apply(standard_gate(_PAULI[value]), [0], pair)


def _point_mass(state: StateVector, qubit: int) -> int:
    dist = probabilities(state, [qubit])
    for bit in (0, 1):
        if abs(dist[bit] - 1.0) < 1e-9:
            return bit
    raise IntegrityError(f"qubit {qubit} is not in a definite state; input is not a dense-coding state")


def dense_decode(state: StateVector) -> int:
    """CNOT, read the second qubit, H on the first, read it; map the pair to 0..3.

    For valid inputs both readouts are certain, so no randomness is needed.
    Any readout that is not certain raises ``IntegrityError``.
    """
    if state.n_qubits != 2:
        raise DomainError("dense_decode needs a 2-qubit state")
    s = apply(standard_gate(GateName.CNOT), [0, 1], state)
    second = _point_mass(s, 1)
    s = apply(standard_gate(GateName.H), [0], s)
    first = _point_mass(s, 0)
    return _DENSE_DECODE[(first, second)]


# -- teleportation -----------------------------------------------------------------

class TeleportResult(NamedTuple):
    bits: tuple[int, int]
    bob_final: StateVector


def _alice_side(phi: StateVector) -> StateVector:
    if phi.n_qubits != 1:
        raise DomainError("teleport sends a single qubit")
    s = tensor(phi, epr_pair())
    s = apply(standard_gate(GateName.CNOT), [0, 1], s)
    return apply(standard_gate(GateName.H), [0], s)


def _bob_qubit(post: StateVector, outcome: int) -> StateVector:
    # after measuring qubits 0,1 the state is |outcome> ⊗ bob
    return StateVector(post.amplitudes[2 * outcome: 2 * outcome + 2])


def teleport_branches(phi: StateVector) -> dict[int, tuple[float, StateVector]]:
    """Outcome -> (probability, Bob's uncorrected qubit) for all four outcomes."""
    s = _alice_side(phi)
    out = {}
    for outcome in range(4):
        m = project(s, [0, 1], outcome)
        out[outcome] = (m.probability, _bob_qubit(m.post_state, outcome))
    return out


def teleport(phi: StateVector, rng: RngStream) -> TeleportResult:
    """Teleport ``phi``; ``bob_final`` equals ``phi`` up to global phase."""
    s = _alice_side(phi)
    m = measure(s, [0, 1], rng)
    bob = _bob_qubit(m.post_state, m.outcome)
    bob = apply(standard_gate(_TELEPORT_FIX[m.outcome]), [0], bob)
    return TeleportResult((m.outcome >> 1, m.outcome & 1), bob)
