"""Gate-array IR, classical-function oracles and a line-oriented text format.

Text format, one instruction per line after a ``qubits N`` header::

    qubits 5
    # comment
    h 0
    rot 1 0.25
    phase 2 -1.5
    cnot 0 1
    cphase 0 1 1.5707963267948966
    swap 0 2
    toffoli 0 1 2
    fredkin 0 1 2
    oracle f in=0,1 out=2

``#`` starts a comment anywhere on a line. Controls are always value-1
controls. Oracles are stored by name and looked up in a registry at run time.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from qcsim import ops
from qcsim.errors import DomainError
from qcsim.qstate import StateVector

_ARITY = {
    "i": 1, "x": 1, "y": 1, "z": 1, "h": 1,
    "rot": 1, "phase": 1,
    "cnot": 2, "cphase": 2, "swap": 2,
    "toffoli": 3, "fredkin": 3,
}
_PARAM_KINDS = {"rot", "phase", "cphase"}
_FLOAT = re.compile(r"^[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?$")
_INT = re.compile(r"^\d+$")


class CircuitError(DomainError):
    """Base for circuit text errors; carries a 1-based line and column."""

    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        where = f"line {line}, col {col}: " if line else ""
        super().__init__(where + msg)


class CircuitSyntaxError(CircuitError):
    pass


class ArityError(CircuitError):
    pass


class QubitRangeError(CircuitError):
    pass


@dataclass(frozen=True)
class ClassicalOracle:
    """Total function f: [0, 2**n_in) -> [0, 2**n_out), embedded as U_f."""

    n_in: int
    n_out: int
    f: Callable[[int], int] = field(compare=False)
    name: str = ""

    def table(self) -> np.ndarray:
        vals = np.fromiter((self.f(x) for x in range(1 << self.n_in)), dtype=np.int64, count=1 << self.n_in)
        if np.any(vals < 0) or np.any(vals >= (1 << self.n_out)):
            raise DomainError(f"oracle {self.name or ''} returns values outside {self.n_out} bits")
        return vals


def _register_values(n: int, qubits: Sequence[int]) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    out = np.zeros_like(idx)
    for q in qubits:
        out = (out << 1) | ((idx >> (n - 1 - q)) & 1)
    return out


def _scatter(values: np.ndarray, n: int, qubits: Sequence[int]) -> np.ndarray:
    """Inverse of _register_values: place the bits of ``values`` onto ``qubits``."""
    k = len(qubits)
    out = np.zeros_like(values)
    for i, q in enumerate(qubits):
        out |= ((values >> (k - 1 - i)) & 1) << (n - 1 - q)
    return out


def oracle_permutation(o: ClassicalOracle, n: int, in_qubits: Sequence[int], out_qubits: Sequence[int]) -> np.ndarray:
    """perm[i] is the basis index that |i> is sent to by U_f."""
    if len(in_qubits) != o.n_in or len(out_qubits) != o.n_out:
        raise DomainError("register sizes do not match the oracle")
    ops.check_targets(list(in_qubits) + list(out_qubits), n)
    x = _register_values(n, in_qubits)
    fx = o.table()[x]
    return np.arange(1 << n, dtype=np.int64) ^ _scatter(fx, n, out_qubits)


def apply_oracle(o: ClassicalOracle, state: StateVector, in_qubits: Sequence[int], out_qubits: Sequence[int]) -> StateVector:
    """|x, y, rest> -> |x, y XOR f(x), rest>, as a permutation of amplitudes."""
    try:
        perm = oracle_permutation(o, state.n_qubits, in_qubits, out_qubits)
    except DomainError:
        if set(in_qubits) & set(out_qubits):
            raise DomainError("input and output registers overlap") from None
        raise
    out = np.empty_like(state.amplitudes)
    out[perm] = state.amplitudes
    return StateVector._wrap(out)


@dataclass(frozen=True)
class GateInstr:
    kind: str
    targets: tuple[int, ...]
    param: float | None = None
    oracle: str | None = None
    in_qubits: tuple[int, ...] = ()
    out_qubits: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind == "oracle":
            qs = self.in_qubits + self.out_qubits
            if not self.oracle or not self.in_qubits or not self.out_qubits:
                raise DomainError("oracle instruction needs a name and both registers")
            object.__setattr__(self, "targets", qs)
        elif self.kind not in _ARITY:
            raise DomainError(f"unknown gate kind {self.kind!r}")
        elif len(self.targets) != _ARITY[self.kind]:
            raise DomainError(f"{self.kind} takes {_ARITY[self.kind]} qubits, got {len(self.targets)}")
        elif (self.kind in _PARAM_KINDS) != (self.param is not None):
            raise DomainError(f"{self.kind}: parameter presence mismatch")
        elif self.param is not None and not math.isfinite(self.param):
            raise DomainError(f"{self.kind}: angle must be finite")
        if len(set(self.targets)) != len(self.targets):
            raise DomainError(f"{self.kind}: targets must be distinct")

    def unitary(self) -> ops.UnitaryOp:
        if self.kind == "rot":
            return ops.rotation(self.param)
        if self.kind == "phase":
            return ops.phase(self.param)
        if self.kind == "cphase":
            return ops.cphase(self.param)
        if self.kind == "oracle":
            raise DomainError("oracle instructions have no fixed matrix")
        return ops.standard_gate(self.kind)


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    instrs: tuple[GateInstr, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "instrs", tuple(self.instrs))
        for ins in self.instrs:
            for q in ins.targets:
                if not 0 <= q < self.n_qubits:
                    raise DomainError(f"qubit {q} out of range for {self.n_qubits} qubits")

    def __len__(self) -> int:
        return len(self.instrs)

    def count(self, *kinds: str) -> int:
        return sum(1 for ins in self.instrs if ins.kind in kinds)


def run(c: Circuit, initial: StateVector, oracles: Mapping[str, ClassicalOracle] | None = None) -> StateVector:
    """Apply the instructions of ``c`` left to right."""
    if initial.n_qubits != c.n_qubits:
        raise DomainError(f"circuit has {c.n_qubits} qubits, state has {initial.n_qubits}")
    n = c.n_qubits
    amps = initial.amplitudes
    for ins in c.instrs:
        if ins.kind == "oracle":
            if not oracles or ins.oracle not in oracles:
                raise DomainError(f"oracle {ins.oracle!r} is not in the registry")
            perm = oracle_permutation(oracles[ins.oracle], n, ins.in_qubits, ins.out_qubits)
            nxt = np.empty_like(amps)
            nxt[perm] = amps
            amps = nxt
        else:
            amps = ops.apply_matrix(ins.unitary().matrix, ins.targets, amps, n)
    return StateVector._wrap(amps if amps is not initial.amplitudes else amps.copy())


def full_adder() -> Circuit:
    """One-bit full adder on qubits (c, x, y, s, c'), with s and c' starting at 0.

    Carry c' = xy ^ cx ^ cy via three Toffolis, then s = c ^ x ^ y via three CNOTs.
    """
    return Circuit(5, (
        GateInstr("toffoli", (1, 2, 4)),
        GateInstr("toffoli", (0, 1, 4)),
        GateInstr("toffoli", (0, 2, 4)),
        GateInstr("cnot", (0, 3)),
        GateInstr("cnot", (1, 3)),
        GateInstr("cnot", (2, 3)),
    ))


# -- text format ---------------------------------------------------------------

def _fmt_float(x: float) -> str:
    return repr(float(x))


def serialize(c: Circuit) -> str:
    lines = [f"qubits {c.n_qubits}"]
    for ins in c.instrs:
        if ins.kind == "oracle":
            lines.append(
                f"oracle {ins.oracle} in={','.join(map(str, ins.in_qubits))} "
                f"out={','.join(map(str, ins.out_qubits))}"
            )
        elif ins.kind == "cphase":
            lines.append(f"cphase {ins.targets[0]} {ins.targets[1]} {_fmt_float(ins.param)}")
        elif ins.kind in _PARAM_KINDS:
            lines.append(f"{ins.kind} {ins.targets[0]} {_fmt_float(ins.param)}")
        else:
            lines.append(" ".join([ins.kind, *map(str, ins.targets)]))
    return "\n".join(lines) + "\n"


def _tokens(line: str) -> list[tuple[int, str]]:
    body = line.split("#", 1)[0]
    return [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", body)]


def _qubit(tok: tuple[int, str], n: int, lineno: int) -> int:
    col, s = tok
    if not _INT.match(s):
        raise CircuitSyntaxError(f"expected qubit index, got {s!r}", lineno, col)
    q = int(s)
    if q >= n:
        raise QubitRangeError(f"qubit {q} out of range for {n} qubits", lineno, col)
    return q


def _qubit_list(tok: tuple[int, str], key: str, n: int, lineno: int) -> tuple[int, ...]:
    col, s = tok
    if not s.startswith(key + "="):
        raise CircuitSyntaxError(f"expected {key}=<q,...>, got {s!r}", lineno, col)
    items = s[len(key) + 1:].split(",")
    if not items or any(not _INT.match(i) for i in items):
        raise CircuitSyntaxError(f"bad qubit list {s!r}", lineno, col)
    qs = tuple(int(i) for i in items)
    for q in qs:
        if q >= n:
            raise QubitRangeError(f"qubit {q} out of range for {n} qubits", lineno, col)
    return qs


def parse(text: str) -> Circuit:
    """Parse the text format; errors report 1-based line and column."""
    n: int | None = None
    instrs: list[GateInstr] = []
    for lineno, raw in enumerate(text.replace("\r\n", "\n").split("\n"), start=1):
        toks = _tokens(raw)
        if not toks:
            continue
        col, word = toks[0]
        if n is None:
            if word != "qubits" or len(toks) != 2 or not _INT.match(toks[1][1]):
                raise CircuitSyntaxError("first statement must be 'qubits N'", lineno, col)
            n = int(toks[1][1])
            continue
        args = toks[1:]
        if word == "qubits":
            raise CircuitSyntaxError("duplicate 'qubits' header", lineno, col)
        if word == "oracle":
            if len(args) != 3:
                raise ArityError("oracle takes: name in=<q,...> out=<q,...>", lineno, col)
            name_col, name = args[0]
            if not re.match(r"^[A-Za-z_][A-Za-z0-9_]*$", name):
                raise CircuitSyntaxError(f"bad oracle name {name!r}", lineno, name_col)
            ins_q = _qubit_list(args[1], "in", n, lineno)
            out_q = _qubit_list(args[2], "out", n, lineno)
            if len(set(ins_q + out_q)) != len(ins_q + out_q):
                raise ArityError("oracle registers must be distinct qubits", lineno, col)
            instrs.append(GateInstr("oracle", (), oracle=name, in_qubits=ins_q, out_qubits=out_q))
            continue
        if word not in _ARITY:
            raise CircuitSyntaxError(f"unknown instruction {word!r}", lineno, col)
        n_q = _ARITY[word]
        n_args = n_q + (1 if word in _PARAM_KINDS else 0)
        if len(args) != n_args:
            raise ArityError(f"{word} takes {n_args} operands, got {len(args)}", lineno, col)
        qs = tuple(_qubit(t, n, lineno) for t in args[:n_q])
        if len(set(qs)) != len(qs):
            raise ArityError(f"{word} operands must be distinct qubits", lineno, col)
        param = None
        if word in _PARAM_KINDS:
            pcol, ptxt = args[-1]
            if not _FLOAT.match(ptxt):
                raise CircuitSyntaxError(f"expected a decimal real, got {ptxt!r}", lineno, pcol)
            param = float(ptxt)
        instrs.append(GateInstr(word, qs, param=param))
    if n is None:
        raise CircuitSyntaxError("missing 'qubits N' header", 1, 1)
    return Circuit(n, tuple(instrs))
