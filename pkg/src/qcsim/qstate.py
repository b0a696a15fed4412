"""Complex amplitude vectors over n qubits.

Bit order: a ket string is read left to right as a binary number, so the
leftmost character is the most significant bit of the amplitude index.
Qubit ``q`` of an ``n``-qubit register is the ``q``-th character from the
left, i.e. bit ``n - 1 - q`` of the index. Every matrix layout in the package
follows from this.
"""

from __future__ import annotations

import re

import numpy as np

from qcsim.config import NORMALIZE_LIMIT, TOL
from qcsim.errors import DomainError

_MINUS = "−"


class StateVector:
    """Immutable normalized amplitude vector of length ``2**n_qubits``.

    The constructor accepts any complex sequence whose squared norm is within
    ``NORMALIZE_LIMIT`` of 1; drift larger than ``TOL`` is rescaled away and
    anything further off is rejected.
    """

    __slots__ = ("_amps", "_n")

    def __init__(self, amplitudes):
        amps = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        size = amps.shape[0]
        if size == 0 or size & (size - 1):
            raise DomainError(f"amplitude count {size} is not a power of two")
        if not np.all(np.isfinite(amps)):
            raise DomainError("amplitudes must be finite")
        norm_sq = float(np.vdot(amps, amps).real)
        dev = abs(norm_sq - 1.0)
        if dev > NORMALIZE_LIMIT:
            raise DomainError(f"state norm^2 {norm_sq!r} is not 1")
        if dev > TOL:
            amps /= np.sqrt(norm_sq)
        amps.flags.writeable = False
        self._amps = amps
        self._n = size.bit_length() - 1

    @classmethod
    def _wrap(cls, amps: np.ndarray) -> "StateVector":
        # Internal fast path: caller guarantees a fresh, normalized complex128 array.
        obj = cls.__new__(cls)
        amps.flags.writeable = False
        obj._amps = amps
        obj._n = amps.shape[0].bit_length() - 1
        return obj

    @classmethod
    def normalized(cls, amplitudes) -> "StateVector":
        """Build a state from an arbitrary nonzero vector by rescaling it."""
        amps = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0 or not np.isfinite(norm):
            raise DomainError("cannot normalize a zero or non-finite vector")
        return cls(amps / norm)

    @property
    def n_qubits(self) -> int:
        return self._n

    @property
    def amplitudes(self) -> np.ndarray:
        """Read-only view of the amplitudes."""
        return self._amps

    def __len__(self) -> int:
        return self._amps.shape[0]

    def __getitem__(self, index):
        return self._amps[index]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._amps.copy()
        return self._amps.astype(dtype)

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self._amps, self._amps).real))

    def inner(self, other: "StateVector") -> complex:
        """<self|other>."""
        return complex(np.vdot(self._amps, other._amps))

    def fidelity(self, other: "StateVector") -> float:
        """|<self|other>|, which ignores global phase."""
        return abs(self.inner(other))

    def allclose(self, other: "StateVector", atol: float = TOL) -> bool:
        """Component-wise equality, phase included."""
        return self._n == other._n and bool(np.allclose(self._amps, other._amps, rtol=0, atol=atol))

    def equal_up_to_phase(self, other: "StateVector", atol: float = 1e-9) -> bool:
        return self._n == other._n and abs(self.fidelity(other) - 1.0) <= atol

    def __eq__(self, other):
        if not isinstance(other, StateVector):
            return NotImplemented
        return self._n == other._n and bool(np.array_equal(self._amps, other._amps))

    __hash__ = None

    def __repr__(self) -> str:
        return f"StateVector({format_dirac(self, 1e-6) or '0'})"


def basis_state(n: int, x: int) -> StateVector:
    """The computational basis state |x> on n qubits."""
    if n < 0:
        raise DomainError("qubit count must be non-negative")
    if not 0 <= x < (1 << n):
        raise DomainError(f"basis index {x} out of range for {n} qubits")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[x] = 1.0
    return StateVector._wrap(amps)


def uniform_state(n: int) -> StateVector:
    size = 1 << n
    return StateVector._wrap(np.full(size, 1.0 / np.sqrt(size), dtype=np.complex128))


def tensor(v: StateVector, w: StateVector) -> StateVector:
    """v ⊗ w: amplitude at ``x * 2**n_w + y`` is ``v[x] * w[y]``."""
    return StateVector._wrap(np.kron(v.amplitudes, w.amplitudes))


def tensor_all(*states: StateVector) -> StateVector:
    out = states[0]
    for s in states[1:]:
        out = tensor(out, s)
    return out


def is_product_state_2q(v: StateVector) -> bool:
    """Determinant test: a two-qubit state factorizes iff a00*a11 - a01*a10 == 0."""
    if v.n_qubits != 2:
        raise DomainError("is_product_state_2q needs a 2-qubit state")
    a = v.amplitudes
    return abs(a[0] * a[3] - a[1] * a[2]) < TOL


def random_state(n: int, rng) -> StateVector:
    """Haar-distributed state drawn from an RngStream (Box-Muller on its uniforms)."""
    size = 1 << n
    vals = np.empty(2 * size)
    for i in range(0, 2 * size, 2):
        u1 = 1.0 - rng.uniform()
        u2 = rng.uniform()
        r = np.sqrt(-2.0 * np.log(u1))
        vals[i] = r * np.cos(2 * np.pi * u2)
        vals[i + 1] = r * np.sin(2 * np.pi * u2)
    return StateVector.normalized(vals[0::2] + 1j * vals[1::2])


def _fmt_real(x: float) -> str:
    s = f"{x:.4f}".rstrip("0").rstrip(".")
    return "0" if s in ("", "-0") else s


def _fmt_coeff(c: complex) -> tuple[bool, str]:
    """Return (negative, magnitude text) for a ket coefficient."""
    re_, im_ = c.real, c.imag
    if abs(im_) < TOL:
        return re_ < 0, _fmt_real(abs(re_))
    if abs(re_) < TOL:
        neg = im_ < 0
        return neg, _fmt_real(abs(im_)) + "i"
    sign = "+" if im_ >= 0 else "-"
    return False, f"({_fmt_real(re_)}{sign}{_fmt_real(abs(im_))}i)"


def format_dirac(v: StateVector, threshold: float = 0.0) -> str:
    """Render ``v`` as a sum of kets in basis-index order.

    Terms with ``|amplitude| < threshold`` are dropped; amplitudes that are
    zero to within ``TOL`` are always dropped. Returns "" if nothing remains.
    """
    if threshold < 0:
        raise DomainError("threshold must be non-negative")
    n = v.n_qubits
    cut = max(threshold, TOL)
    parts: list[str] = []
    for idx in np.flatnonzero(np.abs(v.amplitudes) >= cut):
        neg, mag = _fmt_coeff(complex(v.amplitudes[idx]))
        label = format(int(idx), f"0{n}b") if n else ""
        term = f"{mag}|{label}⟩"
        if not parts:
            parts.append(_MINUS + term if neg else term)
        else:
            parts.append((f" {_MINUS} " if neg else " + ") + term)
    return "".join(parts)


_KET = re.compile(r"^\|?([01]*)(?:⟩|>)?$")
_TERM = re.compile(
    r"\s*([+\-−])?\s*"
    r"(\([^)]*\)|[0-9]*\.?[0-9]*(?:[eE][+\-]?[0-9]+)?i?)?"
    r"\s*\|([01]*)(?:⟩|>)"
)


def parse_ket(text: str) -> StateVector:
    """Parse a single basis label such as ``11000``, ``|01>`` or ``|01⟩``."""
    m = _KET.match(text.strip())
    if not m or not m.group(1):
        raise DomainError(f"not a ket label: {text!r}")
    bits = m.group(1)
    return basis_state(len(bits), int(bits, 2))


def _parse_coeff(tok: str | None) -> complex:
    if not tok:
        return 1.0
    if tok.startswith("("):
        return complex(tok[1:-1].replace("i", "j"))
    if tok.endswith("i"):
        return complex(0, float(tok[:-1] or 1))
    return complex(float(tok))


def parse_dirac(text: str) -> StateVector:
    """Inverse of ``format_dirac``; rescales because printed amplitudes are rounded."""
    text = text.strip()
    pos = 0
    terms: list[tuple[str, complex]] = []
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise DomainError(f"cannot parse ket sum at offset {pos}: {text!r}")
        sign, coeff, label = m.groups()
        c = _parse_coeff(coeff)
        if sign in ("-", _MINUS):
            c = -c
        terms.append((label, c))
        pos = m.end()
    if not terms:
        raise DomainError("empty ket sum")
    n = len(terms[0][0])
    if any(len(lbl) != n for lbl, _ in terms):
        raise DomainError("ket labels have different lengths")
    amps = np.zeros(1 << n, dtype=np.complex128)
    for lbl, c in terms:
        amps[int(lbl, 2) if lbl else 0] += c
    return StateVector.normalized(amps)
