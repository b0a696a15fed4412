"""Structured search over the lattice of variable assignments.

Atoms are (variable, value) pairs enumerated variable-major: for 2 variables
with values {0, 1} the order is (v0=0, v0=1, v1=0, v1=1). Atom ``i`` is qubit
``i``, the ``i``-th ket character from the left, so the set {v0=0} is |1000>.
A basis index is the inclusion bitmask of a set of atoms.

Amplitude starts on the empty set |0...0> and is moved up the lattice by a
unitary "up move", alternating with a phase adjustment of sets that violate a
constraint.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from qcsim import ops
from qcsim.errors import CapacityError, DomainError
from qcsim.grover import Predicate, flip_sign
from qcsim.measure import measure_all
from qcsim.qstate import StateVector, basis_state
from qcsim.rng import RngStream

Atom = tuple[int, int]
Constraint = Callable[[frozenset], bool]

MAX_ATOMS = 16
MAX_SVD_ATOMS = 4
SVD_TOL = 1e-12


class PhasePolicy(enum.Enum):
    INVERT_BAD = "invert"
    RANDOM_PHASE_BAD = "random"
    NONE = "none"


@dataclass(frozen=True)
class LatticeBasis:
    """Bijection between sets of (variable, value) atoms and basis indices."""

    n_vars: int
    n_vals: int

    def __post_init__(self):
        if self.n_vars < 1 or self.n_vals < 1:
            raise DomainError("need at least one variable and one value")
        if self.n_atoms > MAX_ATOMS:
            raise CapacityError(f"lattice of {self.n_atoms} atoms exceeds {MAX_ATOMS}")

    @property
    def n_atoms(self) -> int:
        return self.n_vars * self.n_vals

    def atoms(self) -> list[Atom]:
        return [(v, x) for v in range(self.n_vars) for x in range(self.n_vals)]

    def mask_to_set(self, mask: int) -> frozenset[Atom]:
        n = self.n_atoms
        if not 0 <= mask < (1 << n):
            raise DomainError(f"mask {mask} out of range")
        return frozenset(a for i, a in enumerate(self.atoms()) if (mask >> (n - 1 - i)) & 1)

    def set_to_mask(self, atoms) -> int:
        n, k = self.n_atoms, self.n_vals
        mask = 0
        for v, x in atoms:
            if not (0 <= v < self.n_vars and 0 <= x < k):
                raise DomainError(f"{(v, x)} is not an atom of this lattice")
            mask |= 1 << (n - 1 - (v * k + x))
        return mask

    def ket(self, mask: int) -> str:
        return "|" + format(mask, f"0{self.n_atoms}b") + ">"


@dataclass(frozen=True)
class CspInstance:
    """Variables 0..n_vars-1 over values 0..n_vals-1.

    Each constraint returns True when a set of atoms satisfies it. Sets that
    fail any constraint are "bad". Consistency (one value per variable) is not
    implied; add ``at_most_one_value`` constraints to enforce it.
    """

    n_vars: int
    n_vals: int
    constraints: tuple[Constraint, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "basis", LatticeBasis(self.n_vars, self.n_vals))

    @property
    def n_atoms(self) -> int:
        return self.basis.n_atoms

    def mask_to_set(self, mask: int) -> frozenset[Atom]:
        return self.basis.mask_to_set(mask)

    def set_to_mask(self, atoms) -> int:
        return self.basis.set_to_mask(atoms)

    def is_bad(self, mask: int) -> bool:
        s = self.mask_to_set(mask)
        return not all(c(s) for c in self.constraints)

    def is_solution(self, mask: int) -> bool:
        """Complete, consistent, and satisfying every constraint."""
        per_var = [0] * self.n_vars
        for v, _ in self.mask_to_set(mask):
            per_var[v] += 1
        return all(c == 1 for c in per_var) and not self.is_bad(mask)

    def bad_mask(self) -> np.ndarray:
        return np.array([self.is_bad(m) for m in range(1 << self.n_atoms)], dtype=bool)

    def solution_mask(self) -> np.ndarray:
        return np.array([self.is_solution(m) for m in range(1 << self.n_atoms)], dtype=bool)


def nogood(*atoms: Atom) -> Constraint:
    """Constraint violated by every set containing all of ``atoms``."""
    ng = frozenset(atoms)
    return lambda s: not ng <= s


def at_most_one_value(var: int) -> Constraint:
    """Violated by sets that give ``var`` two or more values."""
    return lambda s: sum(1 for v, _ in s if v == var) <= 1


def consistency_csp(n_vars: int, n_vals: int) -> CspInstance:
    """Only the one-value-per-variable constraints; every complete assignment solves it."""
    return CspInstance(n_vars, n_vals, tuple(at_most_one_value(v) for v in range(n_vars)))


def demo_csp() -> CspInstance:
    """2 variables, 2 values, consistency plus nogoods leaving only {v0=0, v1=1}."""
    return CspInstance(2, 2, (
        at_most_one_value(0),
        at_most_one_value(1),
        nogood((0, 0), (1, 0)),
        nogood((0, 1), (1, 0)),
        nogood((0, 1), (1, 1)),
    ))


# -- singular value decomposition -------------------------------------------------

def jacobi_svd(a: np.ndarray, tol: float = SVD_TOL, max_sweeps: int = 100):
    """One-sided (Hestenes) Jacobi SVD of a square matrix: a = U diag(s) V^H.

    Columns are rotated pairwise until every pair is orthogonal to within
    ``tol`` relative to their norms. Left singular vectors belonging to zero
    singular values are completed to an orthonormal basis by Gram-Schmidt on
    the standard basis, so U is always unitary.
    """
    w = np.array(a, dtype=np.complex128)
    n = w.shape[1]
    v = np.eye(n, dtype=np.complex128)
    for _ in range(max_sweeps):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                alpha = float(np.vdot(w[:, i], w[:, i]).real)
                beta = float(np.vdot(w[:, j], w[:, j]).real)
                gamma = complex(np.vdot(w[:, i], w[:, j]))
                g = abs(gamma)
                if g <= tol * math.sqrt(alpha * beta) or g == 0.0:
                    continue
                rotated = True
                # make the pair's inner product real, then do a real rotation
                ph = gamma / g
                w[:, j] *= np.conj(ph)
                v[:, j] *= np.conj(ph)
                zeta = (beta - alpha) / (2.0 * g)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                wi, wj = w[:, i].copy(), w[:, j].copy()
                w[:, i] = c * wi - s * wj
                w[:, j] = s * wi + c * wj
                vi, vj = v[:, i].copy(), v[:, j].copy()
                v[:, i] = c * vi - s * vj
                v[:, j] = s * vi + c * vj
        if not rotated:
            break
    sigma = np.linalg.norm(w, axis=0)
    scale = sigma.max() if sigma.size else 0.0
    u = np.zeros_like(w)
    live = sigma > tol * max(scale, 1.0)
    u[:, live] = w[:, live] / sigma[live]
    basis = iter(np.eye(w.shape[0], dtype=np.complex128).T)
    for k in np.flatnonzero(~live):
        while True:
            cand = next(basis)
            others = u[:, [c for c in range(n) if c != k and (live[c] or c < k)]]
            cand = cand - others @ (others.conj().T @ cand)
            norm = np.linalg.norm(cand)
            if norm > 1e-6:
                u[:, k] = cand / norm
                break
        sigma[k] = 0.0
    return u, sigma, v


def nearest_unitary(a: np.ndarray) -> np.ndarray:
    """Polar factor U V^H of ``a``, the unitary closest to it in Frobenius norm."""
    u, _, v = jacobi_svd(a)
    return u @ v.conj().T


# -- up moves ------------------------------------------------------------------

def raw_up_matrix(n_atoms: int, top: str = "wrap") -> np.ndarray:
    """Spread each set's amplitude evenly over its immediate supersets.

    Column s has 1/sqrt(d) on each of the d sets obtained by adding one atom
    to s. The full set has no supersets: with ``top="wrap"`` it maps to the
    empty set, as in the 3-atom example matrix; ``top="fixed"`` maps it to
    itself.
    """
    if top not in ("wrap", "fixed"):
        raise DomainError("top must be 'wrap' or 'fixed'")
    size = 1 << n_atoms
    full = size - 1
    m = np.zeros((size, size))
    for s in range(size):
        if s == full:
            m[0 if top == "wrap" else full, s] = 1.0
            continue
        ups = [s | (1 << b) for b in range(n_atoms) if not (s >> b) & 1]
        for t in ups:
            m[t, s] = 1.0 / math.sqrt(len(ups))
    return m


def up_move_method1(n_atoms: int, top: str = "wrap") -> ops.UnitaryOp:
    """Closest unitary (via SVD) to the raw superset-spreading matrix."""
    if n_atoms > MAX_SVD_ATOMS:
        raise CapacityError(f"dense SVD path supports at most {MAX_SVD_ATOMS} atoms")
    return ops.UnitaryOp(nearest_unitary(raw_up_matrix(n_atoms, top)), name=f"up1[{n_atoms}]", check=False)


def default_d_entries(n_atoms: int) -> list[complex]:
    """Placeholder phases e^{i pi s / n_atoms} by set size s; not an optimized choice."""
    return [complex(np.exp(1j * math.pi * s / n_atoms)) for s in range(n_atoms + 1)]


def _popcounts(n_atoms: int) -> np.ndarray:
    idx = np.arange(1 << n_atoms)
    return np.array([bin(i).count("1") for i in idx])


def _check_d(n_atoms: int, d_entries: Sequence[complex] | None) -> np.ndarray:
    d = np.asarray(default_d_entries(n_atoms) if d_entries is None else d_entries, dtype=np.complex128)
    if d.shape != (n_atoms + 1,):
        raise DomainError(f"need {n_atoms + 1} diagonal entries, one per set size")
    if np.any(np.abs(np.abs(d) - 1.0) > 1e-10):
        raise DomainError("diagonal entries must have modulus 1")
    return d


def up_move_method2(n_atoms: int, d_entries: Sequence[complex] | None = None) -> ops.UnitaryOp:
    """W D W with D diagonal and D[b] depending only on popcount(b)."""
    d = _check_d(n_atoms, d_entries)
    w = ops.walsh(n_atoms).matrix
    diag = d[_popcounts(n_atoms)]
    return ops.UnitaryOp(w @ (diag[:, None] * w), name=f"up2[{n_atoms}]", check=False)


def _apply_method2(amps: np.ndarray, n_atoms: int, diag: np.ndarray) -> np.ndarray:
    h = ops.standard_gate(ops.GateName.H).matrix
    for q in range(n_atoms):
        amps = ops.apply_matrix(h, (q,), amps, n_atoms)
    amps = amps * diag
    for q in range(n_atoms):
        amps = ops.apply_matrix(h, (q,), amps, n_atoms)
    return amps


# -- phase policies and search ----------------------------------------------------

def apply_phase_policy(policy: PhasePolicy, csp: CspInstance, state: StateVector, rng: RngStream | None = None) -> StateVector:
    if state.n_qubits != csp.n_atoms:
        raise DomainError("state does not match the lattice size")
    policy = PhasePolicy(policy)
    if policy is PhasePolicy.NONE:
        return state
    bad = csp.bad_mask()
    if policy is PhasePolicy.INVERT_BAD:
        return flip_sign(Predicate(csp.n_atoms, lambda xs: bad[xs], vectorized=True), state)
    if rng is None:
        raise DomainError("random phases need an RngStream")
    phases = np.ones(bad.shape[0], dtype=np.complex128)
    for i in np.flatnonzero(bad):
        phases[i] = np.exp(2j * math.pi * rng.uniform())
    return StateVector._wrap(state.amplitudes * phases)


class HoggResult(NamedTuple):
    assignment: frozenset
    solution_probability: float


def hogg_evolve(
    csp: CspInstance,
    steps: int,
    method: int = 1,
    policy: PhasePolicy | str = PhasePolicy.INVERT_BAD,
    rng: RngStream | None = None,
    d_entries: Sequence[complex] | None = None,
    top: str = "wrap",
) -> StateVector:
    """Start at the empty set; each step moves amplitude up, then applies the phase policy."""
    if steps < 0:
        raise DomainError("steps must be non-negative")
    if method not in (1, 2):
        raise DomainError("method is 1 or 2")
    policy = PhasePolicy(policy)
    n = csp.n_atoms
    state = basis_state(n, 0)
    if method == 1:
        up = up_move_method1(n, top).matrix
    else:
        diag = _check_d(n, d_entries)[_popcounts(n)]
    for _ in range(steps):
        if method == 1:
            amps = up @ state.amplitudes
        else:
            amps = _apply_method2(state.amplitudes, n, diag)
        state = apply_phase_policy(policy, csp, StateVector._wrap(amps), rng)
    return state


def hogg_search(
    csp: CspInstance,
    steps: int,
    method: int = 1,
    policy: PhasePolicy | str = PhasePolicy.INVERT_BAD,
    rng: RngStream | None = None,
    d_entries: Sequence[complex] | None = None,
    top: str = "wrap",
) -> HoggResult:
    """Run ``hogg_evolve``, report the exact solution mass, then measure once."""
    rng = rng or RngStream(0)
    state = hogg_evolve(csp, steps, method, policy, rng, d_entries, top)
    probs = np.abs(state.amplitudes) ** 2
    p_sol = float(probs[csp.solution_mask()].sum())
    return HoggResult(csp.mask_to_set(measure_all(state, rng)), p_sol)
