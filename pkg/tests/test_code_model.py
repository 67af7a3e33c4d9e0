import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import gf2_rank, gf2_syndrome
from surfbench.code_model import (
    Classification,
    build_code,
    classify_residual,
    code_to_dict,
    iter_weight_patterns,
    logical_parity,
    syndrome_of,
    syndromes_of_array,
    weight,
    x_stabilizer_generators,
)

FIG2B_QUBITS = (11, 13)  # two data qubits on the third row of the d=5 patch
FIG2B_ERROR = (1 << 11) | (1 << 13)


def test_d3_counts(code3):
    assert code3.num_data == 9
    assert code3.num_checks == 4
    assert len(code3.logical_z_support) == 3


def test_d5_counts(code5):
    assert code5.num_data == 25
    assert code5.num_checks == 12
    assert code5.num_errors == 33_554_432
    assert code5.num_syndromes == 4096


@pytest.mark.parametrize("distance", [0, 1, 2, 4, 6, -3])
def test_bad_distance_rejected(distance):
    with pytest.raises(ValueError):
        build_code(distance)


def test_check_sizes_and_count(code5):
    sizes = sorted(len(s) for s in code5.z_checks)
    assert set(sizes) <= {2, 4}
    assert sizes.count(2) == 4  # weight-2 checks on two boundaries
    assert len(code5.z_checks) == (25 - 1) // 2


def test_parity_matrix_full_rank(code3, code5):
    for code in (code3, code5):
        assert gf2_rank(code.parity_matrix) == code.num_checks


def test_deterministic_construction():
    a, b = build_code(5), build_code(5)
    assert a.z_checks == b.z_checks
    assert a.logical_z_support == b.logical_z_support
    assert np.array_equal(a.parity_matrix, b.parity_matrix)


def test_zero_error_zero_syndrome(code3):
    assert syndrome_of(code3, 0) == 0


def test_all_ones_zero_syndrome(code3, code5):
    # Derived via the dense GF(2) oracle: every check support is even.
    for code in (code3, code5):
        all_ones = code.num_errors - 1
        assert gf2_syndrome(code.parity_matrix, all_ones) == 0
        assert syndrome_of(code, all_ones) == 0


def test_fig2b_error_flips_four_checks(code5):
    syndrome = syndrome_of(code5, FIG2B_ERROR)
    assert weight(syndrome) == 4
    # The complementary three errors on the same row share the syndrome.
    complement = (1 << 10) | (1 << 12) | (1 << 14)
    assert syndrome_of(code5, complement) == syndrome


def test_syndrome_matches_gf2_oracle(code3):
    for error in range(code3.num_errors):
        assert syndrome_of(code3, error) == gf2_syndrome(code3.parity_matrix, error)


def test_syndrome_array_matches_scalar(code5):
    rng = np.random.default_rng(11)
    errors = rng.integers(0, code5.num_errors, size=500, dtype=np.uint64)
    vec = syndromes_of_array(code5, errors)
    for e, s in zip(errors.tolist(), vec.tolist()):
        assert syndrome_of(code5, e) == s


def test_length_validation(code3):
    with pytest.raises(ValueError):
        syndrome_of(code3, 1 << 9)
    with pytest.raises(ValueError):
        classify_residual(code3, -1)


@settings(max_examples=60, deadline=None)
@given(e1=st.integers(0, 2**9 - 1), e2=st.integers(0, 2**9 - 1))
def test_syndrome_linearity(e1, e2):
    code = build_code(3)
    assert syndrome_of(code, e1 ^ e2) == syndrome_of(code, e1) ^ syndrome_of(code, e2)


def test_classify_zero_residual(code3):
    assert classify_residual(code3, 0) is Classification.SUCCESS


def test_classify_nonzero_syndrome(code3):
    assert classify_residual(code3, 1) is Classification.SYNDROME_NONZERO


def test_full_x_stabilizer_group_classifies_success(code3):
    # Enumerate the whole group generated by the X-type generators.
    group = {0}
    for support in x_stabilizer_generators(code3):
        mask = sum(1 << q for q in support)
        group |= {g ^ mask for g in group}
    assert len(group) == 2 ** len(x_stabilizer_generators(code3))
    for g in group:
        assert syndrome_of(code3, g) == 0
        assert classify_residual(code3, g) is Classification.SUCCESS


def test_x_generators_commute_with_checks(code3, code5):
    for code in (code3, code5):
        for x_support in x_stabilizer_generators(code):
            for z_support in code.z_checks:
                assert len(set(x_support) & set(z_support)) % 2 == 0


def test_logical_support_properties(code3, code5):
    for code in (code3, code5):
        d = code.distance
        assert len(code.logical_z_support) == d
        # Stabilizer-invariant classification: the logical support must
        # overlap every X generator evenly.
        for x_support in x_stabilizer_generators(code):
            overlap = len(set(x_support) & set(code.logical_z_support))
            assert overlap % 2 == 0
        # A full lattice row is a zero-syndrome logical representative.
        row = sum(1 << q for q in range(d))
        assert syndrome_of(code, row) == 0
        assert classify_residual(code, row) is Classification.LOGICAL_FAILURE
        assert logical_parity(code, row) == 1


def test_weight_examples():
    assert weight(0) == 0
    assert weight((1 << 9) - 1) == 9
    assert weight(FIG2B_ERROR) == 2
    arr = np.array([0, 3, 7], dtype=np.uint64)
    assert np.array_equal(weight(arr), np.array([0, 2, 3]))


def test_per_weight_error_counts_d3(code3):
    counts = [0] * 10
    for error in range(code3.num_errors):
        counts[weight(error)] += 1
    for w in range(10):
        assert counts[w] == math.comb(9, w)


def test_iter_weight_patterns_ascending():
    seen = list(iter_weight_patterns(9, 2))
    assert seen == sorted(seen)
    assert len(seen) == math.comb(9, 2)
    assert all(weight(v) == 2 for v in seen)
    assert list(iter_weight_patterns(9, 0)) == [0]
    assert list(iter_weight_patterns(3, 5)) == []


def test_code_json_export(code3):
    payload = code_to_dict(code3)
    assert payload["distance"] == 3
    assert len(payload["checks"]) == 4
    assert payload["logical"] == [0, 3, 6]
    assert len(payload["coords"]) == 9
    assert json.dumps(payload)  # JSON ready
