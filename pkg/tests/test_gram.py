import numpy as np
import pytest
from scipy import integrate

from heatstab import DomainSpec, enumerate_modes, gram_matrix, sine_overlap, spectral_constant
from heatstab.errors import DegenerateSubdomainError

from conftest import sine_mode

C_HALF = 0.5 - 4 / (3 * np.pi)


def quad_overlap(k, l, a, b, L):
    return integrate.quad(
        lambda x: (2 / L) * np.sin(k * np.pi * x / L) * np.sin(l * np.pi * x / L), a, b, epsabs=1e-14, epsrel=1e-14
    )[0]


def test_sine_overlap_examples():
    assert sine_overlap(1, 1, 0.0, 0.5, 1.0) == pytest.approx(0.5, abs=1e-15)
    assert sine_overlap(1, 2, 0.0, 0.5, 1.0) == pytest.approx(4 / (3 * np.pi), abs=1e-15)
    for L in (0.3, 1.0, 7.5):
        assert sine_overlap(1, 1, 0.0, L, L) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("k,l", [(1, 1), (1, 2), (3, 7), (8, 8), (5, 12), (20, 3)])
@pytest.mark.parametrize("a,b,L", [(0.0, 0.5, 1.0), (0.13, 0.41, 1.0), (0.5, 2.0, 3.0)])
def test_sine_overlap_matches_quadrature(k, l, a, b, L):
    assert sine_overlap(k, l, a, b, L) == pytest.approx(quad_overlap(k, l, a, b, L), abs=1e-12)


def test_sine_overlap_rejects_empty_interval():
    with pytest.raises(ValueError):
        sine_overlap(1, 1, 0.5, 0.5, 1.0)


def test_full_omega_gives_identity():
    dom = DomainSpec.box([1.0, 2.0])
    G = gram_matrix(enumerate_modes(dom, 10), dom)
    np.testing.assert_array_equal(G.entries, np.eye(10))
    assert spectral_constant(G, 7).value == 1.0


def test_half_interval_2x2(half_interval):
    G = gram_matrix(enumerate_modes(half_interval, 2), half_interval)
    c = 4 / (3 * np.pi)
    np.testing.assert_allclose(G.entries, [[0.5, c], [c, 0.5]], atol=1e-15)
    assert spectral_constant(G, 2).value == pytest.approx(C_HALF, abs=1e-14)
    assert spectral_constant(G, 1).value == pytest.approx(0.5, abs=1e-15)


def test_2d_tensor_entry():
    dom = DomainSpec.box([1.0, 1.0], [(0.0, 0.5), (0.0, 1.0)])
    ms = enumerate_modes(dom, 3)
    G = gram_matrix(ms, dom)
    i = ms.indices.tolist().index([1, 1])
    j = ms.indices.tolist().index([2, 1])
    assert G.entries[i, j] == pytest.approx(4 / (3 * np.pi), abs=1e-15)


def test_structure(rng):
    dom = DomainSpec.box([1.0, 1.4], [(0.1, 0.6), (0.3, 1.1)])
    G = gram_matrix(enumerate_modes(dom, 40), dom).entries
    assert np.array_equal(G, G.T)
    d = np.diag(G)
    assert np.all(d > 0) and np.all(d <= 1 + 1e-15)
    assert np.linalg.eigvalsh(G).min() > -1e-12


def test_2d_entries_match_nquad():
    dom = DomainSpec.box([1.0, 1.5], [(0.2, 0.7), (0.1, 0.9)])
    ms = enumerate_modes(dom, 6)
    G = gram_matrix(ms, dom).entries
    for i in range(ms.M):
        for j in range(i, ms.M):
            fi = sine_mode(ms.indices[i], dom.lengths)
            fj = sine_mode(ms.indices[j], dom.lengths)
            ref, _ = integrate.nquad(
                lambda x, y: fi(x, y) * fj(x, y), [[0.2, 0.7], [0.1, 0.9]], opts={"epsabs": 1e-13, "epsrel": 1e-13}
            )
            assert G[i, j] == pytest.approx(ref, abs=1e-10)


def test_quadratic_form_and_spectral_inequality(rng):
    dom = DomainSpec.box([1.0], [(0.25, 0.6)])
    ms = enumerate_modes(dom, 6)
    G = gram_matrix(ms, dom)
    N = 4
    C = spectral_constant(G, N).value
    x, w = np.polynomial.legendre.leggauss(80)
    xs = 0.25 + (x + 1) * 0.35 / 2
    ws = w * 0.35 / 2
    E = np.sqrt(2) * np.sin(np.outer(xs, ms.indices[:N, 0]) * np.pi)
    for _ in range(200):
        a = rng.standard_normal(N)
        form = a @ G.block(N) @ a
        assert abs(form - ws @ (E @ a) ** 2) <= 1e-8
        assert form >= C * (a @ a) - 1e-10


def test_shrinking_omega_never_increases_constant():
    vals = []
    for hi in (0.9, 0.7, 0.5, 0.35, 0.2):
        dom = DomainSpec.box([1.0, 1.0], [(0.1, hi), (0.0, hi)])
        ms = enumerate_modes(dom, 12)
        vals.append(spectral_constant(gram_matrix(ms, dom), 5).value)
    assert all(b <= a + 1e-14 for a, b in zip(vals, vals[1:]))


def test_degenerate_subdomain():
    dom = DomainSpec.box([1.0], [(0.0, 1e-4)])
    ms = enumerate_modes(dom, 8)
    with pytest.raises(DegenerateSubdomainError):
        spectral_constant(gram_matrix(ms, dom), 8)


def test_csv_export_roundtrip(half_interval):
    G = gram_matrix(enumerate_modes(half_interval, 5), half_interval)
    back = np.loadtxt(G.to_csv().splitlines(), delimiter=",")
    np.testing.assert_array_equal(back, G.entries)
