import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcsim.circuit import (
    ArityError,
    Circuit,
    CircuitSyntaxError,
    ClassicalOracle,
    GateInstr,
    QubitRangeError,
    apply_oracle,
    full_adder,
    oracle_permutation,
    parse,
    run,
    serialize,
)
from qcsim.errors import DomainError
from qcsim.ops import is_unitary
from qcsim.qstate import StateVector, basis_state, random_state, tensor, uniform_state
from qcsim.rng import RngStream


def test_and_oracle_matches_toffoli():
    land = ClassicalOracle(2, 1, lambda x: int(x == 3), "and")
    s = tensor(uniform_state(2), basis_state(1, 0))
    got = apply_oracle(land, s, [0, 1], [2])
    want = np.zeros(8)
    want[[0b000, 0b010, 0b100, 0b111]] = 0.5
    assert np.allclose(got.amplitudes, want)


def test_oracle_is_involution():
    o = ClassicalOracle(3, 2, lambda x: (5 * x + 1) % 4, "f")
    s = random_state(5, RngStream(1))
    twice = apply_oracle(o, apply_oracle(o, s, [0, 2, 4], [1, 3]), [0, 2, 4], [1, 3])
    assert twice == s


def test_oracle_overlap_and_size_errors():
    o = ClassicalOracle(1, 1, lambda x: x)
    s = basis_state(2, 0)
    with pytest.raises(DomainError):
        apply_oracle(o, s, [0], [0])
    with pytest.raises(DomainError):
        apply_oracle(o, s, [0, 1], [1])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 4), st.integers(1, 4))
def test_oracle_matches_explicit_permutation(seed, m, k):
    # brute force: build the (2^(m+k))-dimensional permutation matrix from |x, y> -> |x, y ^ f(x)>
    r = RngStream(seed)
    table = [r.randbelow(1 << k) for _ in range(1 << m)]
    o = ClassicalOracle(m, k, lambda x: table[x])
    n = m + k
    mat = np.zeros((1 << n, 1 << n))
    for x, y in itertools.product(range(1 << m), range(1 << k)):
        mat[(x << k) | (y ^ table[x]), (x << k) | y] = 1
    assert is_unitary(mat)
    s = random_state(n, r)
    got = apply_oracle(o, s, list(range(m)), list(range(m, n)))
    assert np.allclose(got.amplitudes, mat @ s.amplitudes)


def test_period_state_step1_size():
    f = ClassicalOracle(9, 5, lambda x: pow(11, x, 21), "modexp")
    s = apply_oracle(f, tensor(uniform_state(9), basis_state(5, 0)), range(9), range(9, 14))
    assert s.n_qubits == 14
    amps = s.amplitudes.reshape(512, 32)
    for x in (0, 1, 100, 511):
        assert abs(amps[x, pow(11, x, 21)]) == pytest.approx(1 / math.sqrt(512))


def test_empty_circuit():
    s = random_state(2, RngStream(0))
    assert run(Circuit(2), s) == s


def test_full_adder_truth_table():
    c = full_adder()
    for cin, x, y in itertools.product((0, 1), repeat=3):
        inp = (cin << 4) | (x << 3) | (y << 2)
        s = cin ^ x ^ y
        carry = (cin & x) | (cin & y) | (x & y)
        out = run(c, basis_state(5, inp))
        assert out == basis_state(5, inp | (s << 1) | carry)
    assert run(c, basis_state(5, 0b11000)) == basis_state(5, 0b11001)


def test_parse_examples():
    c = parse("qubits 2\ncnot 0 1")
    assert c == Circuit(2, (GateInstr("cnot", (0, 1)),))
    r = parse("qubits 1\nrot 0 0.0")
    assert r.instrs[0].unitary().allclose(GateInstr("i", (0,)).unitary())
    hh = parse("qubits 2\nh 0\nh 0\n")
    assert run(hh, basis_state(2, 0)).allclose(basis_state(2, 0))


def test_parse_comments_and_crlf():
    c = parse("# adder\r\nqubits 3 # header\r\n\r\n  x 2  # flip\r\n")
    assert c == Circuit(3, (GateInstr("x", (2,)),))


@pytest.mark.parametrize(
    "text, exc, line, col",
    [
        ("h 0", CircuitSyntaxError, 1, 1),
        ("qubits 2\nfoo 0", CircuitSyntaxError, 2, 1),
        ("qubits 2\ncnot 0", ArityError, 2, 1),
        ("qubits 2\nh 0 1", ArityError, 2, 1),
        ("qubits 2\nh 5", QubitRangeError, 2, 3),
        ("qubits 2\nrot 0 abc", CircuitSyntaxError, 2, 7),
        ("qubits 2\ncnot 1 1", ArityError, 2, 1),
        ("qubits 3\noracle f in=0 out=3", QubitRangeError, 2, 15),
        ("qubits 3\noracle f in=0 ot=1", CircuitSyntaxError, 2, 15),
        ("", CircuitSyntaxError, 1, 1),
    ],
)
def test_parse_errors(text, exc, line, col):
    with pytest.raises(exc) as info:
        parse(text)
    assert (info.value.line, info.value.col) == (line, col)


def test_error_kinds_are_distinct():
    assert len({CircuitSyntaxError, ArityError, QubitRangeError}) == 3
    assert not issubclass(ArityError, QubitRangeError) and not issubclass(QubitRangeError, ArityError)


_KINDS = ["i", "x", "y", "z", "h", "rot", "phase", "cnot", "cphase", "swap", "toffoli", "fredkin", "oracle"]


@st.composite
def circuits(draw):
    n = draw(st.integers(3, 5))
    instrs = []
    for kind in draw(st.lists(st.sampled_from(_KINDS), max_size=25)):
        qs = draw(st.permutations(range(n)))
        if kind == "oracle":
            instrs.append(GateInstr("oracle", (), oracle="f", in_qubits=tuple(qs[:2]), out_qubits=(qs[2],)))
            continue
        arity = {"cnot": 2, "cphase": 2, "swap": 2, "toffoli": 3, "fredkin": 3}.get(kind, 1)
        param = None
        if kind in ("rot", "phase", "cphase"):
            param = draw(st.floats(-1e6, 1e6, allow_nan=False))
        instrs.append(GateInstr(kind, tuple(qs[:arity]), param=param))
    return Circuit(n, tuple(instrs))


@settings(max_examples=60, deadline=None)
@given(circuits())
def test_round_trip(c):
    text = serialize(c)
    again = parse(text)
    assert again == c
    assert serialize(again) == text
    assert text.endswith("\n") and "\r" not in text


@settings(max_examples=30, deadline=None)
@given(circuits(), st.integers(0, 2**32))
def test_run_preserves_norm(c, seed):
    oracles = {"f": ClassicalOracle(2, 1, lambda x: x & 1, "f")}
    s = random_state(c.n_qubits, RngStream(seed))
    assert abs(run(c, s, oracles).norm() - 1) < 1e-9


def test_long_circuit_norm():
    r = RngStream(77)
    kinds = ["h", "rot", "phase", "cnot", "toffoli", "fredkin", "cphase", "y"]
    instrs = []
    for _ in range(200):
        kind = kinds[r.randbelow(len(kinds))]
        arity = {"cnot": 2, "cphase": 2, "toffoli": 3, "fredkin": 3}.get(kind, 1)
        pool = list(range(6))
        qs = tuple(pool.pop(r.randbelow(len(pool))) for _ in range(arity))
        param = r.uniform() * 7 if kind in ("rot", "phase", "cphase") else None
        instrs.append(GateInstr(kind, qs, param=param))
    s = random_state(6, r)
    assert abs(run(Circuit(6, instrs), s).norm() - 1) < 1e-9


def test_missing_oracle_and_size_mismatch():
    c = parse("qubits 3\noracle f in=0,1 out=2")
    with pytest.raises(DomainError):
        run(c, basis_state(3, 0))
    with pytest.raises(DomainError):
        run(c, basis_state(2, 0))
    with pytest.raises(DomainError):
        GateInstr("rot", (0,), param=math.inf)


def test_oracle_permutation_is_permutation():
    o = ClassicalOracle(2, 2, lambda x: (3 * x) % 4)
    perm = oracle_permutation(o, 5, [4, 1], [0, 3])
    assert sorted(perm) == list(range(32))


def test_adder_file():
    from pathlib import Path

    text = (Path(__file__).resolve().parents[1] / "circuits" / "adder.qc").read_text()
    assert parse(text) == full_adder()
