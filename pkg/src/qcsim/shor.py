"""Period finding and factoring by the quantum Fourier transform.

Register layout for the period-finding state: qubits ``0..m-1`` hold the
exponent x (qubit 0 most significant), qubits ``m..m+k-1`` hold a^x mod M
with ``k = bit_length(M - 1)``.

QFT convention: U|x> = 2^{-m/2} sum_c exp(2 pi i c x / 2^m) |c>. The gate
decomposition applies, for j = 0..m-1, H on qubit j followed by the phase
gates S_{j,k} (k > j, angle pi / 2^(k-j)), then reverses the register with
swaps of qubits i and m-1-i. That ordering is pinned against ``qft_matrix``
in the test suite.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from qcsim import ops
from qcsim.circuit import Circuit, ClassicalOracle, GateInstr, apply_oracle
from qcsim.errors import CapacityError, DomainError
from qcsim.measure import Distribution, measure, probabilities, project
from qcsim.qstate import StateVector, basis_state
from qcsim.rng import RngStream

QFT_MATRIX_MAX_BITS = 14
DEFAULT_MAX_M = 64
HARD_MAX_M = 512


class NoPeriodInformation(DomainError):
    """The measured value carries no information about the period (v = 0)."""


def choose_m(M: int) -> int:
    """The unique m with M^2 <= 2^m < 2 M^2."""
    if M < 2:
        raise DomainError("choose_m needs M >= 2")
    return (M * M - 1).bit_length()


def output_bits(M: int) -> int:
    """Bits needed to hold a value in [0, M); equals ceil(log2 M) for M >= 2."""
    return (M - 1).bit_length()


# -- quantum Fourier transform -------------------------------------------------

def qft_matrix(m: int) -> ops.UnitaryOp:
    if m < 1:
        raise DomainError("qft needs m >= 1")
    if m > QFT_MATRIX_MAX_BITS:
        raise CapacityError(f"dense QFT matrix limited to m <= {QFT_MATRIX_MAX_BITS}, got {m}")
    n = 1 << m
    idx = np.arange(n)
    # reduce c*x mod n in integers first so large products keep full phase precision
    phase = (np.outer(idx, idx) % n) * (2 * np.pi / n)
    return ops.UnitaryOp(np.exp(1j * phase) / np.sqrt(n), name=f"QFT{m}", check=False)


def qft_circuit(m: int, offset: int = 0, n_qubits: int | None = None) -> Circuit:
    """H / controlled-phase decomposition on qubits ``offset..offset+m-1``.

    Contains exactly m(m+1)/2 H and cphase gates, followed by floor(m/2)
    swaps for the bit reversal.
    """
    if m < 1:
        raise DomainError("qft needs m >= 1")
    instrs: list[GateInstr] = []
    for j in range(m):
        instrs.append(GateInstr("h", (offset + j,)))
        for k in range(j + 1, m):
            instrs.append(GateInstr("cphase", (offset + j, offset + k), param=math.pi / (1 << (k - j))))
    for i in range(m // 2):
        instrs.append(GateInstr("swap", (offset + i, offset + m - 1 - i)))
    return Circuit(offset + m if n_qubits is None else n_qubits, tuple(instrs))


def apply_qft(state: StateVector, register: Sequence[int]) -> StateVector:
    """U_QFT on ``register`` (tensored with identity elsewhere), via an FFT.

    numpy's inverse FFT with orthonormal scaling computes exactly
    2^{-m/2} sum_x g(x) exp(+2 pi i c x / 2^m).
    """
    n = state.n_qubits
    reg = ops.check_targets(register, n)
    m = len(reg)
    psi = np.moveaxis(state.amplitudes.reshape((2,) * n), reg, range(m))
    shape = psi.shape
    out = np.fft.ifft(psi.reshape(1 << m, -1), axis=0, norm="ortho")
    out = np.moveaxis(out.reshape(shape), range(m), reg)
    return StateVector._wrap(np.ascontiguousarray(out).reshape(-1))


# -- period finding state --------------------------------------------------------

def modexp_oracle(a: int, M: int, m: int) -> ClassicalOracle:
    """x -> a^x mod M; Python's three-argument pow is square-and-multiply."""
    return ClassicalOracle(m, output_bits(M), lambda x: pow(a, x, M), name="modexp")


def period_state(a: int, M: int, m: int) -> StateVector:
    """2^{-m/2} sum_x |x, a^x mod M>, built with Walsh-Hadamard then U_f."""
    if math.gcd(a, M) != 1:
        raise DomainError(f"gcd({a}, {M}) = {math.gcd(a, M)} is already a factor")
    k = output_bits(M)
    s = basis_state(m + k, 0)
    s = ops.apply_walsh(s, range(m))
    return apply_oracle(modexp_oracle(a, M, m), s, range(m), range(m, m + k))


def multiplicative_order(a: int, M: int) -> int:
    """Smallest r > 0 with a^r = 1 mod M, found classically (for diagnostics)."""
    if math.gcd(a, M) != 1:
        raise DomainError("order only defined for a coprime to M")
    r, x = 1, a % M
    while x != 1:
        x = x * a % M
        r += 1
    return r


# -- continued fractions ----------------------------------------------------------

@dataclass(frozen=True)
class CfRow:
    i: int
    a: int
    p: int
    q: int
    eps: Fraction

    def as_tuple(self) -> tuple[int, int, int, int, float]:
        return (self.i, self.a, self.p, self.q, float(self.eps))


@dataclass(frozen=True)
class ContinuedFractionState:
    """Expansion of v / 2^m, stopped at the first q_n < M <= q_{n+1}."""

    v: int
    m: int
    M: int
    rows: tuple[CfRow, ...]
    q: int

    def table(self) -> list[str]:
        out = ["i\ta_i\tp_i\tq_i\teps_i"]
        for r in self.rows:
            out.append(f"{r.i}\t{r.a}\t{r.p}\t{r.q}\t{float(r.eps):.7g}")
        return out


def continued_fraction(v: int, m: int, M: int) -> ContinuedFractionState:
    """Run the a / eps / p / q recurrences on v / 2^m with exact rationals.

    Stops when the next denominator reaches M (reporting the previous one,
    while keeping the overshooting row in the trace) or when the expansion
    terminates, whichever comes first.
    """
    if not 0 <= v < (1 << m):
        raise DomainError(f"v = {v} out of range for m = {m}")
    x = Fraction(v, 1 << m)
    a = math.floor(x)
    eps = x - a
    p_prev, p = 1, a          # p_{-1}, p_0
    q_prev, q = 0, 1          # q_{-1}, q_0
    rows = [CfRow(0, a, p, q, eps)]
    result = q
    i = 0
    while eps != 0:
        i += 1
        inv = 1 / eps
        a = math.floor(inv)
        eps = inv - a
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        rows.append(CfRow(i, a, p, q, eps))
        if q >= M:
            break
        result = q
    return ContinuedFractionState(v, m, M, tuple(rows), result)


def extract_period(v: int, m: int, M: int) -> int:
    """Period guess q from a measured v; raises NoPeriodInformation for v = 0."""
    if v == 0:
        raise NoPeriodInformation("v = 0 carries no period information")
    return continued_fraction(v, m, M).q


# -- factoring loop ----------------------------------------------------------------

class Outcome(enum.Enum):
    FACTOR = "factor"
    GCD_SHORTCUT = "gcd-shortcut"
    NO_INFORMATION = "v=0, no information"
    V_NOT_CLOSE = "v not close to a multiple of 2^m/r"
    Q_DIVIDES_PERIOD = "q is a proper factor of the period"
    TRIVIAL_FACTOR = "only the trivial factor M was found"
    ODD_PERIOD = "period is odd"


@dataclass
class FactoringConfig:
    M: int
    seed: int = 0
    max_attempts: int = 32
    skip_step2_measurement: bool = False
    a: int | None = None
    u: int | None = None
    v: int | None = None
    allow_large: bool = False


@dataclass(frozen=True)
class AttemptRecord:
    a: int
    outcome: Outcome
    u: int | None = None
    v: int | None = None
    q: int | None = None
    cf: ContinuedFractionState | None = None
    factors: frozenset[int] = frozenset()


@dataclass
class FactoringTrace:
    M: int
    m: int
    a: int | None = None
    u: int | None = None
    v: int | None = None
    q: int | None = None
    cf: ContinuedFractionState | None = None
    factors: frozenset[int] = frozenset()
    attempt_log: list[AttemptRecord] = field(default_factory=list)
    # exact distributions of the last quantum attempt, for CSV export
    step2_dist: Distribution | None = None
    qft_dist: Distribution | None = None

    @property
    def success(self) -> bool:
        return bool(self.factors)

    def lines(self) -> list[str]:
        out = [f"M = {self.M}", f"m = {self.m}", f"attempts = {len(self.attempt_log)}"]
        for n, rec in enumerate(self.attempt_log, start=1):
            parts = [f"attempt {n}: a = {rec.a}"]
            if rec.u is not None:
                parts.append(f"u = {rec.u}")
            if rec.v is not None:
                parts.append(f"v = {rec.v}")
            if rec.q is not None:
                parts.append(f"q = {rec.q}")
            parts.append(f"-> {rec.outcome.value}")
            out.append(", ".join(parts))
        if self.cf is not None:
            out.append("continued fraction of v/2^m:")
            out.extend("  " + row for row in self.cf.table())
        if self.q is not None:
            out.append(f"period = {self.q}")
        if self.factors:
            out.append("factors = " + ", ".join(str(f) for f in sorted(self.factors)))
        else:
            out.append("factors = none (attempts exhausted)")
        return out


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def _prime_power_base(n: int) -> int | None:
    for b in range(2, n.bit_length() + 1):
        r = round(n ** (1.0 / b))
        for cand in (r - 1, r, r + 1):
            if cand > 1 and cand ** b == n and _is_prime(cand):
                return cand
    return None


def validate_modulus(M: int, allow_large: bool = False) -> None:
    if M < 3:
        raise DomainError("M must be at least 3")
    if M % 2 == 0:
        raise DomainError(f"M = {M} is even; 2 is a factor")
    if _is_prime(M):
        raise DomainError(f"M = {M} is prime")
    base = _prime_power_base(M)
    if base is not None:
        raise DomainError(f"M = {M} is a power of the prime {base}")
    limit = HARD_MAX_M if allow_large else DEFAULT_MAX_M
    if M > limit:
        hint = "" if allow_large else " (pass allow_large for up to 512)"
        raise CapacityError(f"M = {M} exceeds the state-vector budget of {limit}{hint}")


def _nontrivial(vals: Sequence[int], M: int) -> frozenset[int]:
    found = {g for g in vals if 1 < g < M}
    found |= {M // g for g in found}
    return frozenset(found)


def _classify(a: int, q: int, M: int, got: frozenset[int]) -> Outcome:
    if got:
        return Outcome.FACTOR
    if pow(a, q, M) != 1:
        r = multiplicative_order(a, M)
        return Outcome.Q_DIVIDES_PERIOD if r % q == 0 else Outcome.V_NOT_CLOSE
    if q % 2:
        return Outcome.ODD_PERIOD
    return Outcome.TRIVIAL_FACTOR


def _quantum_attempt(a: int, M: int, m: int, cfg: FactoringConfig, rng: RngStream, trace: FactoringTrace):
    k = output_bits(M)
    x_reg = list(range(m))
    out_reg = list(range(m, m + k))
    state = period_state(a, M, m)
    u = None
    if not cfg.skip_step2_measurement:
        if cfg.u is not None:
            try:
                state = project(state, out_reg, cfg.u).post_state
            except DomainError:
                raise DomainError(f"u = {cfg.u} is not a value of {a}^x mod {M}") from None
            u = cfg.u
        else:
            mo = measure(state, out_reg, rng)
            state, u = mo.post_state, mo.outcome
    trace.step2_dist = probabilities(state, x_reg)
    state = apply_qft(state, x_reg)
    trace.qft_dist = probabilities(state, x_reg)
    if cfg.v is not None:
        if not 0 <= cfg.v < (1 << m):
            raise DomainError(f"v = {cfg.v} out of range for m = {m}")
        v = cfg.v
    else:
        v = rng.choice_index(trace.qft_dist.probs)
    return u, v


def factor(cfg: FactoringConfig) -> FactoringTrace:
    """Repeat the period-finding attempt until a nontrivial factor appears.

    Forced ``a``, ``u`` and ``v`` in the config replace the corresponding
    random draws in every attempt.
    """
    M = cfg.M
    validate_modulus(M, cfg.allow_large)
    if cfg.a is not None and not 2 <= cfg.a < M:
        raise DomainError(f"a must lie in [2, {M - 1}]")
    rng = RngStream(cfg.seed)
    m = choose_m(M)
    trace = FactoringTrace(M=M, m=m)
    for _ in range(cfg.max_attempts):
        a = cfg.a if cfg.a is not None else rng.randint(2, M - 1)
        trace.a = a
        g = math.gcd(a, M)
        if g != 1:
            rec = AttemptRecord(a, Outcome.GCD_SHORTCUT, factors=_nontrivial([g], M))
            trace.attempt_log.append(rec)
            trace.factors = rec.factors
            return trace
        u, v = _quantum_attempt(a, M, m, cfg, rng, trace)
        trace.u, trace.v = u, v
        if v == 0:
            trace.attempt_log.append(AttemptRecord(a, Outcome.NO_INFORMATION, u=u, v=v))
            continue
        cf = continued_fraction(v, m, M)
        q = cf.q
        trace.cf, trace.q = cf, q
        got: frozenset[int] = frozenset()
        if q % 2 == 0:
            h = pow(a, q // 2, M)
            # gcd(a^{q/2} -/+ 1, M) computed on residues; same gcd as on the full powers
            got = _nontrivial([math.gcd(h - 1, M), math.gcd(h + 1, M)], M)
        outcome = _classify(a, q, M, got)
        trace.attempt_log.append(AttemptRecord(a, outcome, u=u, v=v, q=q, cf=cf, factors=got))
        if got:
            trace.factors = got
            return trace
    return trace


# -- exact distributions ------------------------------------------------------------

def step2_distribution(a: int, M: int, u: int | None = None) -> Distribution:
    """x-register distribution after the output register is fixed to ``u``."""
    m = choose_m(M)
    k = output_bits(M)
    s = period_state(a, M, m)
    if u is not None:
        s = project(s, range(m, m + k), u).post_state
    return probabilities(s, range(m))


def qft_distribution(a: int, M: int, u: int | None = None) -> Distribution:
    """x-register distribution after the QFT; u=None skips the Step-2 measurement."""
    m = choose_m(M)
    k = output_bits(M)
    s = period_state(a, M, m)
    if u is not None:
        s = project(s, range(m, m + k), u).post_state
    return probabilities(apply_qft(s, range(m)), range(m))


def v_distribution_with_step2(a: int, M: int) -> np.ndarray:
    """Marginal of v when Step 2 is measured: sum_u P(u) P(v | u)."""
    m = choose_m(M)
    k = output_bits(M)
    s = period_state(a, M, m)
    pu = probabilities(s, range(m, m + k))
    total = np.zeros(1 << m)
    for u in pu.support():
        total += pu[u] * qft_distribution(a, M, u).probs
    return total
