"""Fixed-weight bitmask bases: enumeration, ranking, occupations."""

import math

import numpy as np
import pytest

from cavityspin.basis import SectorBasis, enumerate_masks, sector_dimension
from cavityspin.geometry import ArrayGeometry


def test_enumeration_is_sorted_complete_and_weighted():
    for n, k in [(1, 0), (1, 1), (5, 2), (6, 3), (9, 4), (10, 0), (10, 10)]:
        masks = enumerate_masks(n, k)
        assert len(masks) == math.comb(n, k) == sector_dimension(n, k)
        assert np.all(np.diff(masks) > 0) or len(masks) == 1
        assert all(int(m).bit_count() == k for m in masks)
        # brute-force oracle: same set as filtering all integers by weight
        ref = [m for m in range(1 << n) if bin(m).count("1") == k]
        assert list(masks) == ref


def test_enumeration_guards():
    with pytest.raises(ValueError):
        enumerate_masks(4, 5)
    with pytest.raises(ValueError):
        enumerate_masks(4, -1)
    with pytest.raises(ValueError):
        enumerate_masks(63, 1)


def test_rank_unrank_round_trip():
    basis = SectorBasis(ArrayGeometry(3, 3), 4)
    for i, m in enumerate(basis.states):
        assert basis.rank(int(m)) == i
        assert basis.unrank(i) == int(m)
    with pytest.raises(ValueError):
        basis.rank(0b111)  # wrong weight
    with pytest.raises(IndexError):
        basis.unrank(basis.dim)


def test_bulk_rank_matches_scalar_rank():
    rng = np.random.default_rng(3)
    basis = SectorBasis(ArrayGeometry(4, 3), 5)
    idx = rng.permutation(basis.dim)[:200]
    masks = basis.states[idx]
    assert np.array_equal(basis.bulk_rank(masks), idx)
    with pytest.raises(ValueError):
        basis.bulk_rank(np.array([0b11, 0b101], dtype=np.int64))


def test_occupations_columns_follow_site_indexing():
    geom = ArrayGeometry(3, 2)
    basis = SectorBasis(geom, 2)
    occ = basis.occupations()
    assert occ.shape == (basis.dim, geom.n_sites)
    assert np.array_equal(occ.sum(axis=1), np.full(basis.dim, 2))
    i = basis.rank(0b000011)  # sites 0 and 1 excited
    assert list(occ[i]) == [1, 1, 0, 0, 0, 0]
