"""Amplitude amplification over an unstructured predicate.

The phase-flip ancilla is taken to be (|0> - |1>) / sqrt(2); the unnormalized
"1/sqrt(2) |0> - |1>" reading cannot be a qubit state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from qcsim import ops
from qcsim.circuit import ClassicalOracle, apply_oracle
from qcsim.config import TOL
from qcsim.errors import DomainError, IntegrityError
from qcsim.measure import format_probability, measure_all
from qcsim.qstate import StateVector, tensor, uniform_state
from qcsim.rng import RngStream

MAX_QUBITS = 24


@dataclass(frozen=True)
class Predicate:
    """Total boolean function on [0, 2**n).

    ``vectorized`` marks ``p`` as accepting a numpy index array and returning
    a boolean array, which avoids a Python-level loop for large n.
    """

    n: int
    p: Callable = field(compare=False)
    vectorized: bool = False

    @classmethod
    def from_solutions(cls, n: int, solutions: Iterable[int]) -> "Predicate":
        sols = np.array(sorted(set(solutions)), dtype=np.int64)
        if sols.size and (sols[0] < 0 or sols[-1] >= (1 << n)):
            raise DomainError("solution outside the search space")
        return cls(n, lambda xs: np.isin(xs, sols), vectorized=True)

    def mask(self) -> np.ndarray:
        xs = np.arange(1 << self.n, dtype=np.int64)
        if self.vectorized:
            return np.asarray(self.p(xs), dtype=bool)
        return np.fromiter((bool(self.p(int(x))) for x in xs), dtype=bool, count=xs.size)

    def __call__(self, x: int) -> bool:
        if self.vectorized:
            return bool(np.asarray(self.p(np.array([x])))[0])
        return bool(self.p(x))

    def as_oracle(self) -> ClassicalOracle:
        m = self.mask()
        return ClassicalOracle(self.n, 1, lambda x: int(m[x]), name="P")


def flip_sign(p: Predicate, state: StateVector, via_ancilla: bool = False) -> StateVector:
    """Negate the amplitude of every |x> with p(x) true.

    The default path multiplies by a sign mask. ``via_ancilla=True`` instead
    appends the ancilla (|0> - |1>)/sqrt(2), applies U_P: |x, b> -> |x, b ^ P(x)>,
    checks that the ancilla factors back out unchanged, and drops it.
    """
    if state.n_qubits != p.n:
        raise DomainError(f"predicate is over {p.n} bits, state has {state.n_qubits}")
    if not via_ancilla:
        signs = np.where(p.mask(), -1.0, 1.0)
        return StateVector._wrap(state.amplitudes * signs)
    minus = StateVector([1 / math.sqrt(2), -1 / math.sqrt(2)])
    joint = apply_oracle(p.as_oracle(), tensor(state, minus), range(p.n), [p.n])
    pairs = joint.amplitudes.reshape(-1, 2)
    if not np.allclose(pairs[:, 1], -pairs[:, 0], rtol=0, atol=TOL):
        raise IntegrityError("ancilla did not factor out as (|0> - |1>)/sqrt(2)")
    return StateVector(pairs[:, 0] * math.sqrt(2))


def inversion_matrix(n: int) -> np.ndarray:
    """R = diag(1, -1, ..., -1)."""
    r = -np.ones(1 << n)
    r[0] = 1.0
    return np.diag(r)


def diffusion(n: int) -> ops.UnitaryOp:
    """Inversion about the average as the product W R W."""
    if n < 1:
        raise DomainError("diffusion needs n >= 1")
    w = ops.walsh(n).matrix
    return ops.UnitaryOp(w @ inversion_matrix(n) @ w, name=f"D{n}", check=False)


def invert_about_average(state: StateVector) -> StateVector:
    """a_i -> 2A - a_i with A the mean amplitude; same map as ``diffusion``."""
    a = state.amplitudes
    return StateVector._wrap(2.0 * a.mean() - a)


def default_iterations(n: int) -> int:
    return math.floor(math.pi / 4 * math.sqrt(1 << n))


def analytic_success(k: int, n_solutions: int, n: int) -> float:
    """sin^2((2k+1) theta) with sin(theta) = sqrt(s / 2^n)."""
    theta = math.asin(math.sqrt(n_solutions / (1 << n)))
    return math.sin((2 * k + 1) * theta) ** 2


@dataclass(frozen=True)
class GroverRun:
    """``success_probability_curve[k]`` is the solution mass after k iterations (k = 0 included)."""

    iterations: int
    success_probability_curve: tuple[float, ...]
    result: int
    is_solution: bool

    @property
    def failure_rate(self) -> float:
        return 1.0 - self.success_probability_curve[-1]


def grover_search(p: Predicate, iterations: int | None = None, rng: RngStream | None = None) -> GroverRun:
    """Uniform start, then ``iterations`` rounds of sign flip and inversion about the average."""
    if p.n > MAX_QUBITS:
        raise DomainError(f"grover_search supports n <= {MAX_QUBITS}")
    rng = rng or RngStream(0)
    k = default_iterations(p.n) if iterations is None else iterations
    if k < 0:
        raise DomainError("iterations must be non-negative")
    mask = p.mask()
    signs = np.where(mask, -1.0, 1.0)
    amps = uniform_state(p.n).amplitudes.copy()
    curve = [float(np.sum(np.abs(amps[mask]) ** 2))]
    for _ in range(k):
        amps *= signs
        amps = 2.0 * amps.mean() - amps
        curve.append(float(np.sum(np.abs(amps[mask]) ** 2)))
    x = measure_all(StateVector._wrap(amps), rng)
    return GroverRun(k, tuple(curve), x, bool(mask[x]))


def curve_csv(curve: Iterable[float]) -> str:
    lines = ["iteration,probability"]
    lines += [f"{k},{format_probability(p)}" for k, p in enumerate(curve)]
    return "\n".join(lines) + "\n"
