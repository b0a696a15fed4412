import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcsim import shor
from qcsim.circuit import ClassicalOracle, apply_oracle, run
from qcsim.errors import CapacityError, DomainError
from qcsim.measure import Distribution, probabilities
from qcsim.ops import apply_walsh, is_unitary, standard_gate
from qcsim.qstate import basis_state, random_state
from qcsim.rng import RngStream


@pytest.mark.parametrize("M, m", [(21, 9), (2, 2), (15, 8), (33, 11), (35, 11), (64, 12)])
def test_choose_m(M, m):
    assert shor.choose_m(M) == m
    assert M * M <= 2**m < 2 * M * M


def _qft_definition(m):
    n = 2**m
    return np.array([[cmath.exp(2j * cmath.pi * c * x / n) / math.sqrt(n) for x in range(n)] for c in range(n)])


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_qft_matrix_definition(m):
    assert np.allclose(shor.qft_matrix(m).matrix, _qft_definition(m), atol=1e-12)
    assert is_unitary(shor.qft_matrix(m))


def test_qft_matrix_small_and_limits():
    assert shor.qft_matrix(1).allclose(standard_gate("h"))
    with pytest.raises(CapacityError):
        shor.qft_matrix(15)
    with pytest.raises(DomainError):
        shor.qft_matrix(0)


@pytest.mark.parametrize("m", range(1, 9))
def test_qft_circuit_matches_matrix(m):
    c = shor.qft_circuit(m)
    u = shor.qft_matrix(m).matrix
    cols = np.stack([run(c, basis_state(m, x)).amplitudes for x in range(1 << m)], axis=1)
    assert np.max(np.abs(cols - u)) < 1e-9
    assert c.count("h", "cphase") == m * (m + 1) // 2
    assert c.count("swap") == m // 2


def test_qft_circuit_details():
    one = shor.qft_circuit(1)
    assert [i.kind for i in one.instrs] == ["h"]
    out = run(shor.qft_circuit(3), basis_state(3, 0)).amplitudes
    assert np.allclose(out, 1 / math.sqrt(8)) and np.all(out.real > 0)
    assert shor.qft_circuit(4).count("h", "cphase") == 10


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 5), st.integers(0, 3))
def test_fft_path_matches_circuit(seed, m, pad):
    # FFT fast path against the independent gate-level route on an embedded register
    r = RngStream(seed)
    n = m + pad
    offset = r.randbelow(pad + 1)
    s = random_state(n, r)
    via_circuit = run(shor.qft_circuit(m, offset=offset, n_qubits=n), s)
    via_fft = shor.apply_qft(s, range(offset, offset + m))
    assert np.allclose(via_circuit.amplitudes, via_fft.amplitudes, atol=1e-10)


@pytest.mark.parametrize("r, m", [(2, 4), (4, 4), (8, 6)])
def test_qft_support_on_multiples(r, m):
    k = max(1, (r - 1).bit_length())
    f = ClassicalOracle(m, k, lambda x: x % r)
    s = apply_oracle(f, apply_walsh(basis_state(m + k, 0), range(m)), range(m), range(m, m + k))
    dist = probabilities(shor.apply_qft(s, range(m)), range(m))
    step = 2**m // r
    assert dist.support() == list(range(0, 2**m, step))


def test_period_state_shape():
    s = shor.period_state(11, 21, 9)
    assert s.n_qubits == 14
    with pytest.raises(DomainError):
        shor.period_state(7, 21, 9)


def test_step2_arithmetic_progression():
    d = shor.step2_distribution(11, 21, 8)
    support = d.support()
    assert support == [x for x in range(512) if x % 6 == 3]
    assert len(support) == 85
    assert np.allclose(d.probs[support], 1 / 85)
    assert max(d.probs) < 0.012


def test_qft_peaks_for_worked_example():
    d = shor.qft_distribution(11, 21, 8)
    near = {(c + k) % 512 for c in (0, 85, 171, 256, 341, 427) for k in range(-2, 3)}
    assert sum(d[i] for i in near) > 0.9


def test_continued_fraction_table():
    cf = shor.continued_fraction(427, 9, 21)
    assert [(r.i, r.a, r.p, r.q) for r in cf.rows] == [(0, 0, 0, 1), (1, 1, 1, 1), (2, 5, 5, 6), (3, 42, 211, 253)]
    assert [r.eps for r in cf.rows] == [Fraction(427, 512), Fraction(85, 427), Fraction(2, 85), Fraction(1, 2)]
    assert cf.table()[1:] == [
        "0\t0\t0\t1\t0.8339844",
        "1\t1\t1\t1\t0.1990632",
        "2\t5\t5\t6\t0.02352941",
        "3\t42\t211\t253\t0.5",
    ]
    assert cf.q == 6


def test_continued_fraction_small_cases():
    assert shor.extract_period(256, 9, 21) == 2
    with pytest.raises(shor.NoPeriodInformation):
        shor.extract_period(0, 9, 21)
    with pytest.raises(DomainError):
        shor.continued_fraction(512, 9, 21)


@settings(max_examples=200, deadline=None)
@given(st.integers(3, 64), st.data())
def test_extract_period_exact_within_bound(M, data):
    m = shor.choose_m(M)
    r = data.draw(st.integers(2, M - 1))
    j = data.draw(st.integers(1, r - 1).filter(lambda j: math.gcd(j, r) == 1))
    v = round(Fraction(j * 2**m, r))
    if abs(Fraction(v, 2**m) - Fraction(j, r)) >= Fraction(1, 2 * 2**m):
        return
    assert shor.extract_period(v, m, M) == r


def test_exact_multiple():
    # v = j 2^m / r exactly
    assert shor.extract_period(3 * 64, 8, 15) == 4
    assert shor.extract_period(64, 8, 15) == 4


def test_worked_example_factoring():
    tr = shor.factor(shor.FactoringConfig(21, a=11, v=427))
    assert tr.success and tr.factors == frozenset({3, 7}) and tr.q == 6
    assert math.gcd(21, 11**3 - 1) == 7 and math.gcd(21, 11**3 + 1) == 3
    assert len(tr.attempt_log) == 1


def test_forced_u_is_used():
    tr = shor.factor(shor.FactoringConfig(21, a=11, u=8, v=427))
    assert tr.u == 8 and tr.step2_dist.support()[:2] == [3, 9]
    with pytest.raises(DomainError):
        shor.factor(shor.FactoringConfig(21, a=11, u=3))


def test_m15_seeded():
    tr = shor.factor(shor.FactoringConfig(15, seed=7, max_attempts=20))
    assert tr.factors == frozenset({3, 5})


def test_skip_step2():
    tr = shor.factor(shor.FactoringConfig(21, seed=2, skip_step2_measurement=True))
    assert tr.u is None
    assert tr.factors in (frozenset(), frozenset({3, 7}))
    assert "u =" not in "\n".join(tr.lines())


def test_skip_step2_same_v_distribution_exact():
    for a in (2, 11):
        skipped = shor.qft_distribution(a, 21).probs
        measured = shor.v_distribution_with_step2(a, 21)
        assert np.abs(skipped - measured).max() < 1e-12


def test_skip_step2_same_v_distribution_sampled():
    skipped = shor.qft_distribution(11, 21)
    measured = Distribution(9, shor.v_distribution_with_step2(11, 21))
    r = RngStream(5)
    counts = np.zeros(512)
    for _ in range(100_000):
        counts[r.choice_index(skipped.probs)] += 1
    empirical = Distribution(9, counts / counts.sum())
    assert empirical.total_variation(measured) < 0.02


@pytest.mark.parametrize("M", [2, 4, 13, 25, 27, 49])
def test_invalid_moduli(M):
    with pytest.raises(DomainError):
        shor.validate_modulus(M)


def test_capacity_limits():
    with pytest.raises(CapacityError):
        shor.validate_modulus(65)
    shor.validate_modulus(65, allow_large=True)
    with pytest.raises(CapacityError):
        shor.validate_modulus(515, allow_large=True)


def test_gcd_shortcut_counts():
    tr = shor.factor(shor.FactoringConfig(21, a=14))
    assert tr.factors == frozenset({3, 7})
    assert tr.attempt_log[0].outcome is shor.Outcome.GCD_SHORTCUT


def test_failure_classification():
    # v = 0 never helps
    tr = shor.factor(shor.FactoringConfig(21, a=11, v=0, max_attempts=3))
    assert not tr.success and len(tr.attempt_log) == 3
    assert all(r.outcome is shor.Outcome.NO_INFORMATION for r in tr.attempt_log)
    # v = 171 ~ 512/3 gives q = 3, a proper divisor of the period 6 of 11
    tr = shor.factor(shor.FactoringConfig(21, a=11, v=171, max_attempts=1))
    assert tr.attempt_log[0].outcome is shor.Outcome.Q_DIVIDES_PERIOD
    # a = 20 = -1 has period 2 and a^{1} + 1 = 0 mod 21: only the trivial factor
    tr = shor.factor(shor.FactoringConfig(21, a=20, v=256, max_attempts=1))
    assert tr.attempt_log[0].outcome is shor.Outcome.TRIVIAL_FACTOR
    # a = 4 has period 3 (odd)
    tr = shor.factor(shor.FactoringConfig(21, a=4, v=171, max_attempts=1))
    assert tr.attempt_log[0].outcome is shor.Outcome.ODD_PERIOD
    # v far from any j/r
    tr = shor.factor(shor.FactoringConfig(21, a=11, v=40, max_attempts=1))
    assert tr.attempt_log[0].outcome is shor.Outcome.V_NOT_CLOSE


def test_multiplicative_order():
    assert shor.multiplicative_order(11, 21) == 6
    assert shor.multiplicative_order(2, 15) == 4
