import itertools
import math

import numpy as np
import pytest
from scipy import integrate

from branchforge.modes import (
    FUNDAMENTAL,
    ModeIndex,
    ModeSet,
    cos_overlap,
    diagonal_truncation,
    parse_modes,
    sin_overlap,
)

ODD = list(range(1, 16, 2))


@pytest.mark.parametrize("args,value", [((1, 1, 1, 1), 3), ((1, 3, 5, 1), 1), ((1, 1, 3, 9), 0)])
def test_cos_overlap_examples(args, value):
    assert cos_overlap(*args) == value


@pytest.mark.parametrize("args,value", [((1, 1, 1, 1), 3), ((1, 3, 5, 9), -1), ((1, 1, 3, 9), 0)])
def test_sin_overlap_examples(args, value):
    assert sin_overlap(*args) == value


@pytest.mark.parametrize("bad", [(0, 1, 1, 1), (2, 1, 1, 1), (-1, 1, 1, 1), (1, 1, 1, 4)])
def test_overlaps_reject_even_or_nonpositive(bad):
    with pytest.raises(ValueError):
        cos_overlap(*bad)
    with pytest.raises(ValueError):
        sin_overlap(*bad)


def test_permutation_symmetry_exhaustive():
    odd = range(1, 10, 2)
    for args in itertools.combinations_with_replacement(odd, 4):
        c, s = cos_overlap(*args), sin_overlap(*args)
        for perm in set(itertools.permutations(args)):
            assert cos_overlap(*perm) == c
            assert sin_overlap(*perm) == s


def quad(f, i, j, k, l):
    val, _ = integrate.quad(lambda x: f(i * x) * f(j * x) * f(k * x) * f(l * x), 0, math.pi,
                            limit=200, epsabs=1e-13, epsrel=0)
    return val


def test_quadrature_oracle():
    worst = 0.0
    for args in itertools.combinations_with_replacement(ODD, 4):
        worst = max(worst, abs(quad(np.cos, *args) - cos_overlap(*args) * math.pi / 8))
        worst = max(worst, abs(quad(np.sin, *args) - sin_overlap(*args) * math.pi / 8))
    assert worst < 1e-12


def test_diagonal_truncation_examples():
    assert list(diagonal_truncation(1)) == [FUNDAMENTAL]
    assert diagonal_truncation(2).as_pairs() == [[0, 0], [0, 1], [1, 0], [1, 1]]
    n3 = diagonal_truncation(3)
    assert len(n3) == 9 and n3[-1] == ModeIndex(2, 2)
    for N in range(1, 12):
        assert len(diagonal_truncation(N)) == N * N
    with pytest.raises(ValueError):
        diagonal_truncation(0)


def test_mode_index_invariants():
    x = ModeIndex(2, 3)
    assert (x.temporal, x.spatial) == (5, 7)
    assert x.transposed() == ModeIndex(3, 2)
    assert x.linear_frequency == pytest.approx(7 / 5)
    with pytest.raises(ValueError):
        ModeIndex(-1, 0)


def test_mode_set_canonical_and_distinct():
    s = ModeSet([(1, 2), (0, 0), (0, 1)])
    assert s.as_pairs() == [[0, 0], [0, 1], [1, 2]]
    assert ModeSet(s) == s
    with pytest.raises(ValueError):
        ModeSet([(0, 0), (1, 2), (0, 0)])


def test_parse_modes():
    assert parse_modes("(0,0), (1,2)") == ModeSet([(0, 0), (1, 2)])
    with pytest.raises(ValueError):
        parse_modes("(0,0),(1,2),(0,1),(1,2)")
    with pytest.raises(ValueError):
        parse_modes("0,0")
