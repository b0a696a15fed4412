import math
import warnings
from fractions import Fraction

import numpy as np
import pytest

from qcsim import qec
from qcsim.errors import DomainError, UncorrectableError
from qcsim.measure import probabilities
from qcsim.ops import identity, is_unitary, standard_gate
from qcsim.qstate import StateVector, basis_state, random_state, tensor
from qcsim.rng import RngStream

S2 = 1 / math.sqrt(2)


@pytest.fixture(scope="module")
def code():
    return qec.bitflip_code()


def test_encoder(code):
    psi = StateVector([S2, -S2])
    assert code.encode(psi).allclose(StateVector([S2, 0, 0, 0, 0, 0, 0, -S2]))
    assert code.encode(basis_state(1, 1)) == basis_state(3, 7)


def test_correction_table(code):
    assert dict(qec.correctable_words(code)) == {
        "000": "I⊗I⊗I", "110": "X⊗I⊗I", "101": "I⊗X⊗I", "011": "I⊗I⊗X",
    }
    for syn, e in code.correction_table.items():
        assert np.allclose(e.matrix @ e.matrix, np.eye(8))


def test_syndrome_op_is_permutation(code):
    s = code.syndrome_op().matrix
    assert set(np.unique(s)) <= {0, 1}
    assert np.all(s.sum(axis=0) == 1) and np.all(s.sum(axis=1) == 1)
    assert is_unitary(s)


def test_syndrome_map_brute_force(code):
    # |x0 x1 x2, 000> -> |x0 x1 x2, x0^x1, x0^x2, x1^x2>
    s = code.syndrome_op()
    for x in range(8):
        x0, x1, x2 = (x >> 2) & 1, (x >> 1) & 1, x & 1
        want = (x << 3) | ((x0 ^ x1) << 2) | ((x0 ^ x2) << 1) | (x1 ^ x2)
        assert (s @ basis_state(6, x << 3)) == basis_state(6, want)


def test_single_error_syndromes(code):
    enc = code.encode(StateVector([0.6, 0.8]))
    for word, syn in [("III", 0b000), ("XII", 0b110), ("IXI", 0b101), ("IIX", 0b011)]:
        bad = qec.apply_error(qec.ErrorOperator.single(qec.pauli_string(word)), enc)
        assert qec.syndrome_distribution(code, bad)[syn] == pytest.approx(1.0)


def test_worked_example_error_state(code):
    psi, err = qec.worked_example()
    bad = qec.apply_error(err, code.encode(psi))
    want = np.zeros(8)
    a, b = 4 / (5 * math.sqrt(2)), 3 / (5 * math.sqrt(2))
    want[0b100], want[0b011] = a, -a
    want[0b010], want[0b101] = b, -b
    assert np.allclose(bad.amplitudes, want)


def test_worked_example_syndrome_probabilities(code):
    psi, err = qec.worked_example()
    bad = qec.apply_error(err, code.encode(psi))
    dist = qec.syndrome_distribution(code, bad)
    # oracle: squared weights in exact arithmetic, and the padded-state marginal
    weights = [Fraction(4, 5) ** 2, Fraction(3, 5) ** 2]
    assert weights == [Fraction(16, 25), Fraction(9, 25)]
    assert dist[0b110] == pytest.approx(float(weights[0]), abs=1e-12)
    assert dist[0b101] == pytest.approx(float(weights[1]), abs=1e-12)
    padded = code.syndrome_op() @ tensor(bad, basis_state(3, 0))
    assert np.allclose(probabilities(padded, [3, 4, 5]).probs, dist.probs)


def test_worked_example_both_branches(code):
    psi, err = qec.worked_example()
    enc = code.encode(psi)
    bad = qec.apply_error(err, enc)
    seen = {}
    for seed in range(40):
        rep = qec.recover(code, bad, RngStream(seed), expected=enc)
        seen[rep.syndrome] = rep
        assert abs(rep.fidelity_to_encoded - 1) < 1e-9
    assert set(seen) == {0b110, 0b101}
    assert seen[0b110].applied_correction == "X⊗I⊗I"
    assert seen[0b110].final_state.allclose(enc)


def test_no_error(code):
    enc = code.encode(random_state(1, RngStream(5)))
    rep = qec.recover(code, enc, RngStream(0), expected=enc)
    assert rep.syndrome == 0 and rep.applied_correction == "I⊗I⊗I"
    assert rep.final_state.allclose(enc)
    assert qec.recover(code, enc, RngStream(0)).fidelity_to_encoded is None


def test_identity_and_single_flip_errors(code):
    enc = code.encode(random_state(1, RngStream(6)))
    assert qec.apply_error(qec.ErrorOperator.single(identity(3)), enc) == enc
    flipped = qec.apply_error(qec.ErrorOperator.single(qec.pauli_string("XII")), enc)
    assert flipped.allclose(qec.pauli_string("XII") @ enc)


def test_every_state_every_single_error(code):
    r = RngStream(10)
    for _ in range(20):
        enc = code.encode(random_state(1, r))
        for word in ("III", "XII", "IXI", "IIX"):
            bad = qec.apply_error(qec.ErrorOperator.single(qec.pauli_string(word)), enc)
            for seed in range(4):
                rep = qec.recover(code, bad, RngStream(seed), expected=enc)
                assert abs(rep.fidelity_to_encoded - 1) < 1e-9


def test_random_mixtures(code):
    r = RngStream(11)
    for _ in range(10):
        enc = code.encode(random_state(1, r))
        err = qec.random_mixture(code.errors, r)
        bad = qec.apply_error(err, enc)
        for seed in range(4):
            assert abs(qec.recover(code, bad, RngStream(seed), expected=enc).fidelity_to_encoded - 1) < 1e-9


def test_uncorrectable(code):
    enc = code.encode(basis_state(1, 0))
    bad = qec.apply_error(qec.ErrorOperator.single(qec.pauli_string("XXI")), enc)
    # two flips look like one flip on the third qubit: silently miscorrected
    assert qec.recover(code, bad, RngStream(0), expected=enc).fidelity_to_encoded < 1e-9
    small = qec.QuantumCode(1, 3, 3, code.codewords, code.syndrome, [qec.pauli_string("III")])
    one_flip = qec.apply_error(qec.ErrorOperator.single(qec.pauli_string("XII")), enc)
    with pytest.raises(UncorrectableError):
        qec.recover(small, one_flip, RngStream(0))


def test_error_operator_validation():
    x = qec.pauli_string("XII")
    with pytest.raises(DomainError):
        qec.ErrorOperator(((0.5, x),))
    with pytest.raises(DomainError):
        qec.ErrorOperator(((S2, x), (S2, standard_gate("x"))))
    with pytest.raises(DomainError):
        qec.apply_error(qec.ErrorOperator.single(x), basis_state(2, 0))


def test_non_orthogonal_terms_renormalize_with_warning():
    e = qec.ErrorOperator(((S2, identity(1)), (S2, standard_gate("z"))))
    with pytest.warns(RuntimeWarning):
        out = qec.apply_error(e, basis_state(1, 0))
    assert out.allclose(basis_state(1, 0))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        qec.apply_error(qec.worked_example()[1], qec.bitflip_code().encode(basis_state(1, 0)))


def test_degenerate_code_rejected(code):
    with pytest.raises(DomainError):
        qec.QuantumCode(1, 3, 3, code.codewords, code.syndrome, [qec.pauli_string("XII"), qec.pauli_string("IXX")])


def test_data_dependent_syndrome_rejected(code):
    # reading the code bits directly gives 000 for |000> but 111 for |111>
    with pytest.raises(DomainError):
        qec.QuantumCode(1, 3, 3, code.codewords, lambda x: x & 0b111, [qec.pauli_string("III")])
