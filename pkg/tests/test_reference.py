import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracle
from qpa.core import PermutationSpec
from qpa.reference import (
    CountingOracle, basis_oracle, classical_parity, dft_matrix, expected_qpa_outcome,
    permutation_matrix, permute_index, principal_phase, reference_qpa,
)

specs = st.integers(2, 16).flatmap(
    lambda d: st.builds(PermutationSpec, st.just(d), st.integers(0, d - 1), st.sampled_from([1, -1]))
)


@given(specs)
def test_permutation_matrix_matches_oracle(spec):
    np.testing.assert_array_equal(permutation_matrix(spec), oracle.permutation(spec.d, spec.m, spec.parity))


@pytest.mark.parametrize("d", [2, 3, 4, 8, 16])
def test_dft_matches_oracle(d):
    np.testing.assert_allclose(dft_matrix(d), oracle.dft(d), atol=1e-12)


def test_small_examples():
    # P_1^+ on d=4 maps |0>->|1>, P_1^- maps |2>->|3>
    assert permute_index(PermutationSpec(4, 1, 1), 0) == 1
    assert permute_index(PermutationSpec(4, 1, -1), 2) == 3
    assert principal_phase(-1) == pytest.approx(math.pi)
    assert principal_phase(cmath.exp(-1j * math.pi)) == pytest.approx(math.pi)


@pytest.mark.parametrize(
    "d,m,parity,k,angle",
    [
        (4, 0, 1, 1, 0.0),
        (4, 1, -1, 3, math.pi / 2),
        (8, 5, 1, 1, -5 * math.pi / 4),
        (2, 1, 1, 1, math.pi),
    ],
)
def test_reference_examples(d, m, parity, k, angle):
    # dense products: the phase is e^{-2 pi i m/d} (+) or e^{2 pi i m/d} (-)
    got_k, ph = reference_qpa(PermutationSpec(d, m, parity))
    assert got_k == k
    assert abs(ph - cmath.exp(1j * angle)) < 1e-9


def test_dft_of_one_d4():
    np.testing.assert_allclose(dft_matrix(4)[:, 1], 0.5 * np.array([1, 1j, -1, -1j]), atol=1e-12)


@given(specs)
def test_reference_outcome_closed_form(spec):
    k, ph = reference_qpa(spec)
    k2, ph2 = expected_qpa_outcome(spec)
    assert k == k2 == (1 if spec.positive else spec.d - 1)
    assert abs(ph - ph2) < 1e-9


@given(specs)
def test_reference_against_oracle_state(spec):
    f = oracle.dft(spec.d)
    state = f.conj().T @ oracle.permutation(spec.d, spec.m, spec.parity) @ f[:, 1]
    k, ph = reference_qpa(spec)
    assert abs(state[k] - ph) < 1e-9


@given(specs)
def test_classical_parity_two_queries(spec):
    counter = CountingOracle(basis_oracle(spec))
    parity, used = classical_parity(counter, spec.d)
    assert used == 2 == counter.queries
    reported = PermutationSpec(spec.d, spec.m, parity)
    # for d = 2 the two parities are the same map
    np.testing.assert_array_equal(permutation_matrix(reported), permutation_matrix(spec))
    if spec.d > 2:
        assert parity == spec.parity


def test_one_query_cannot_decide():
    # |0> alone: P_m^+ and P_m^- agree on it, so a single classical query is insufficient
    for d in range(3, 17):
        for m in range(d):
            assert permute_index(PermutationSpec(d, m, 1), 0) == permute_index(PermutationSpec(d, m, -1), 0)
