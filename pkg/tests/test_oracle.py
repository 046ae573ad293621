"""Plaintext reference algorithms: consistency, selection sweep, information."""

import random

import numpy as np
import pytest

from ocwc import (
    Dataset,
    UsageError,
    cwc_select,
    gen_dataset,
    is_consistent,
    minimal_consistent_bruteforce,
    mutual_information,
)


def test_consistency_known_subsets(table2):
    assert is_consistent(table2, (1, 1, 1, 1, 1))
    assert not is_consistent(table2, (1, 1, 0, 0, 0))
    assert is_consistent(table2, (0, 0, 0, 1, 1))
    # class is not constant, so the empty subset cannot be consistent
    assert not is_consistent(table2, (0, 0, 0, 0, 0))


def test_consistency_mask_length_checked(table2):
    with pytest.raises(UsageError):
        is_consistent(table2, (1, 1))


def test_mutual_information_reference_values(table2):
    expect = [0.189, 0.189, 0.049, 0.0, 0.0]
    got = [mutual_information(table2, i) for i in range(1, 6)]
    assert got == pytest.approx(expect, abs=5e-4)


def test_mutual_information_bounds_and_validation(table2):
    for i in range(1, 6):
        assert 0.0 <= mutual_information(table2, i) <= 1.0
    with pytest.raises(UsageError):
        mutual_information(table2, 0)
    with pytest.raises(UsageError):
        mutual_information(table2, 6)


def test_low_information_features_still_selected(table2):
    # the ranking by information keeps f1, f2, f3 yet that subset is not
    # consistent, while the zero-information pair f4, f5 determines the class
    ranked = sorted(range(1, 6), key=lambda i: -mutual_information(table2, i))
    top3 = tuple(1 if i + 1 in ranked[:3] else 0 for i in range(5))
    assert top3 == (1, 1, 1, 0, 0)
    assert not is_consistent(table2, top3)
    assert is_consistent(table2, (0, 0, 0, 1, 1))


def test_selection_sweep_table2_both_orders(table2):
    desc = cwc_select(table2)
    assert desc.mask == (1, 1, 0, 1, 0)
    assert desc.input_consistent
    assert desc.selected_indices == (0, 1, 3)
    asc = cwc_select(table2, order=(1, 2, 3, 4, 5))
    assert asc.mask == (0, 0, 0, 1, 1)


def test_selection_sweep_table3(table3_upper):
    result = cwc_select(table3_upper)
    assert result.mask == (1, 0, 0, 1, 0)
    assert result.input_consistent


def test_selection_order_validated(table2):
    with pytest.raises(UsageError):
        cwc_select(table2, order=(1, 2, 3))
    with pytest.raises(UsageError):
        cwc_select(table2, order=(1, 1, 2, 3, 4))


def test_inconsistent_input_keeps_everything():
    ds = Dataset(
        ("a", "b"),
        "C",
        np.array([[1, 0], [1, 0], [0, 1]], dtype=np.uint8),
        np.array([0, 1, 0], dtype=np.uint8),
    )
    result = cwc_select(ds)
    assert not result.input_consistent
    assert result.mask == (1, 1)


def test_consistency_monotone_random():
    rng = random.Random(17)
    for trial in range(40):
        ds = gen_dataset(n=10, k=6, seed=trial)
        mask = tuple(rng.randint(0, 1) for _ in range(6))
        if not is_consistent(ds, mask):
            continue
        wider = tuple(b | rng.randint(0, 1) for b in mask)
        assert is_consistent(ds, wider)


def test_sweep_result_is_minimal_consistent():
    hits = 0
    for seed in range(30):
        ds = gen_dataset(n=8, k=6, seed=seed, planted=3)
        result = cwc_select(ds)
        if not result.input_consistent:
            continue
        hits += 1
        assert result.mask in minimal_consistent_bruteforce(ds)
    assert hits == 30  # planted datasets are consistent by construction


def test_nonconstant_class_never_selects_empty():
    for seed in range(20):
        ds = gen_dataset(n=12, k=5, seed=seed, planted=2)
        if (ds.classes == ds.classes[0]).all():
            continue
        assert any(cwc_select(ds).mask)


def test_bruteforce_guard():
    ds = gen_dataset(n=4, k=21, seed=0)
    with pytest.raises(UsageError):
        minimal_consistent_bruteforce(ds)
