import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from heatstab import DomainSpec, enumerate_modes, eval_eigenfunction, select_N
from heatstab.errors import InvalidDomainError, TruncationError
from heatstab.spectral import Mode

from conftest import sine_mode


def brute_force(lengths, M):
    kmax = {1: 60, 2: 25, 3: 12}[len(lengths)]
    cands = []
    for idx in itertools.product(range(1, kmax + 1), repeat=len(lengths)):
        cands.append((sum((k * np.pi / L) ** 2 for k, L in zip(idx, lengths)), idx))
    cands.sort()
    return cands[:M]


def test_1d_closed_form():
    ms = enumerate_modes(DomainSpec.box([np.pi]), 3)
    np.testing.assert_allclose(ms.tau, [1.0, 4.0, 9.0], rtol=1e-14)
    assert [m.index for m in ms.modes] == [(1,), (2,), (3,)]


def test_2d_square_with_tie_order():
    ms = enumerate_modes(DomainSpec.box([1.0, 1.0]), 4)
    np.testing.assert_allclose(ms.tau / np.pi**2, [2, 5, 5, 8], rtol=1e-14)
    assert ms.indices.tolist() == [[1, 1], [1, 2], [2, 1], [2, 2]]


def test_shift_gives_effective_eigenvalues():
    ms = enumerate_modes(DomainSpec.box([np.pi]), 2, c=-2.0)
    np.testing.assert_allclose(ms.effective, [-1.0, 2.0], rtol=1e-14)
    np.testing.assert_allclose(ms.tau, [1.0, 4.0], rtol=1e-14)


@pytest.mark.parametrize(
    "lengths,M",
    [([1.0], 40), ([1.0, 1.0], 30), ([1.0, 2.5], 50), ([1.0, 1.0, 1.0], 40), ([0.7, 1.3, 2.0], 25)],
)
def test_matches_brute_force(lengths, M):
    ms = enumerate_modes(DomainSpec.box(lengths), M)
    ref = brute_force(lengths, M)
    np.testing.assert_allclose(ms.tau, [t for t, _ in ref], rtol=1e-13)
    assert np.all(np.diff(ms.tau) >= 0)


def test_exact_ties_lexicographic():
    # 1 + 49 = 25 + 25 = 49 + 1 on the unit square
    ms = enumerate_modes(DomainSpec.box([1.0, 1.0]), 40)
    tie = [tuple(k) for k in ms.indices if k[0] ** 2 + k[1] ** 2 == 50]
    assert tie == sorted(tie) == [(1, 7), (5, 5), (7, 1)]


def test_deterministic():
    dom = DomainSpec.box([1.0, 1.3])
    assert enumerate_modes(dom, 25) == enumerate_modes(dom, 25)


def test_invalid_domains():
    with pytest.raises(InvalidDomainError):
        enumerate_modes(DomainSpec.box([1.0]), 0)
    with pytest.raises(InvalidDomainError):
        DomainSpec.box([-1.0])
    with pytest.raises(InvalidDomainError):
        DomainSpec.box([1.0], [(0.5, 0.5)])
    with pytest.raises(InvalidDomainError):
        DomainSpec.box([1.0], [(0.2, 1.5)])
    with pytest.raises(InvalidDomainError):
        DomainSpec.box([1.0] * 4)


def test_select_N_examples():
    ms = enumerate_modes(DomainSpec.box([1.0]), 5)
    assert select_N(ms, 50.0) == 2
    assert select_N(enumerate_modes(DomainSpec.box([np.pi]), 3), 0.5) == 1
    assert select_N(enumerate_modes(DomainSpec.box([1.0, 1.0]), 6), 60.0) == 3


def test_select_N_uses_effective_eigenvalues():
    ms = enumerate_modes(DomainSpec.box([1.0]), 8, c=-15.0)
    assert select_N(ms, 5.0) == 1
    assert select_N(ms, 30.0) == 2


def test_select_N_truncation_error():
    ms = enumerate_modes(DomainSpec.box([1.0]), 2)
    with pytest.raises(TruncationError, match="increase M"):
        select_N(ms, 100.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 800.0), st.floats(0.1, 800.0))
def test_select_N_monotone(a, b):
    ms = enumerate_modes(DomainSpec.box([1.0, 1.2]), 80)
    lo, hi = sorted((a, b))
    assert select_N(ms, lo) <= select_N(ms, hi)


def test_eval_eigenfunction():
    dom = DomainSpec.box([np.pi])
    assert eval_eigenfunction(Mode((1,), 1.0), dom, [np.pi / 2]) == pytest.approx(np.sqrt(2 / np.pi), rel=1e-15)
    dom2 = DomainSpec.box([1.0, 1.0])
    assert eval_eigenfunction((1, 1), dom2, [0.5, 0.5]) == pytest.approx(2.0, rel=1e-15)
    for x in ([0.0, 0.3], [1.0, 0.3], [0.4, 1.0]):
        assert eval_eigenfunction((3, 2), dom2, x) == 0.0
    with pytest.raises(InvalidDomainError):
        eval_eigenfunction((1, 1), dom2, [1.2, 0.5])


def test_orthonormality_by_quadrature(rng):
    dom = DomainSpec.box([1.0, 1.7])
    ms = enumerate_modes(dom, 12)
    for _ in range(6):
        i, j = rng.integers(0, ms.M, size=2)
        fi = sine_mode(ms.indices[i], dom.lengths)
        fj = sine_mode(ms.indices[j], dom.lengths)
        val, _ = integrate.nquad(lambda x, y: fi(x, y) * fj(x, y), [[0, 1.0], [0, 1.7]], opts={"epsabs": 1e-12})
        assert val == pytest.approx(float(i == j), abs=1e-8)
