"""Standard-basis measurement of qubit subsets.

Outcomes over a subset are encoded with the first listed qubit as the most
significant bit, mirroring the ket bit order of the full register.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from qcsim.errors import DomainError
from qcsim.ops import check_targets
from qcsim.qstate import StateVector
from qcsim.rng import RngStream


@dataclass(frozen=True)
class Distribution:
    """Outcome probabilities over ``n_bits`` measured bits, stored densely."""

    n_bits: int
    probs: np.ndarray

    def __post_init__(self):
        p = self.probs
        if p.shape != (1 << self.n_bits,):
            raise DomainError("probability table has the wrong length")
        if np.any(p < 0) or abs(float(p.sum()) - 1.0) > 1e-9:
            raise DomainError("probabilities must be non-negative and sum to 1")
        p.flags.writeable = False

    def __getitem__(self, outcome: int) -> float:
        return float(self.probs[outcome])

    def __len__(self) -> int:
        return self.probs.shape[0]

    def as_dict(self, cutoff: float = 0.0) -> dict[int, float]:
        """Outcome -> probability for outcomes above ``cutoff``."""
        return {int(i): float(self.probs[i]) for i in np.flatnonzero(self.probs > cutoff)}

    def support(self, cutoff: float = 1e-12) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.probs > cutoff)]

    def total_variation(self, other: "Distribution") -> float:
        return 0.5 * float(np.abs(self.probs - other.probs).sum())


@dataclass(frozen=True)
class MeasurementOutcome:
    outcome: int
    probability: float
    post_state: StateVector


def _marginal(state: StateVector, subset: tuple[int, ...]) -> np.ndarray:
    n = state.n_qubits
    p = np.abs(state.amplitudes) ** 2
    if not subset:
        return np.array([p.sum()])
    t = p.reshape((2,) * n)
    rest = tuple(q for q in range(n) if q not in subset)
    if rest:
        t = t.sum(axis=rest)
    # remaining axes are in ascending qubit order; reorder to subset order
    order = sorted(subset)
    t = np.transpose(t, [order.index(q) for q in subset])
    return t.reshape(-1)


def probabilities(state: StateVector, subset: Sequence[int] | None = None) -> Distribution:
    """Marginal distribution of the listed qubits (all qubits when ``subset`` is None)."""
    n = state.n_qubits
    sub = tuple(range(n)) if subset is None else check_targets(subset, n)
    p = _marginal(state, sub)
    return Distribution(len(sub), p / p.sum())


def _collapse(state: StateVector, sub: tuple[int, ...], outcome: int, p: float) -> MeasurementOutcome:
    n = state.n_qubits
    t = state.amplitudes.reshape((2,) * n)
    out = np.zeros_like(t)
    # index the measured axes at their outcome bits, keep every other axis whole
    sel = [slice(None)] * n
    for i, q in enumerate(sub):
        sel[q] = (outcome >> (len(sub) - 1 - i)) & 1
    out[tuple(sel)] = t[tuple(sel)] / np.sqrt(p)
    return MeasurementOutcome(outcome, p, StateVector._wrap(out.reshape(-1)))


def project(state: StateVector, subset: Sequence[int], outcome: int) -> MeasurementOutcome:
    """Post-measurement state for a given outcome, without sampling."""
    sub = check_targets(subset, state.n_qubits)
    if not 0 <= outcome < (1 << len(sub)):
        raise DomainError(f"outcome {outcome} out of range")
    p = float(_marginal(state, sub)[outcome])
    if p <= 0.0:
        raise DomainError(f"outcome {outcome} has probability zero")
    return _collapse(state, sub, outcome, p)


def measure(state: StateVector, subset: Sequence[int], rng: RngStream) -> MeasurementOutcome:
    """Sample an outcome and collapse the state onto it."""
    sub = check_targets(subset, state.n_qubits)
    p = _marginal(state, sub)
    outcome = rng.choice_index(p)
    return _collapse(state, sub, outcome, float(p[outcome]))


def measure_all(state: StateVector, rng: RngStream) -> int:
    """Sample a full-register outcome; the collapsed state is just |outcome>."""
    return rng.choice_index(probabilities(state).probs)


def format_probability(p: float) -> str:
    """Plain decimal, 10 significant digits, no exponent."""
    if p < 1e-15:
        return "0"
    return np.format_float_positional(p, precision=10, unique=False, fractional=False, trim="-")


def distribution_csv(dist: Distribution) -> str:
    """``index,probability`` rows for every outcome, LF line endings."""
    rows = ["index,probability"]
    rows += [f"{i},{format_probability(float(p))}" for i, p in enumerate(dist.probs)]
    return "\n".join(rows) + "\n"
