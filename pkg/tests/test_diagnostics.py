import numpy as np
import pytest

from heatstab import DomainSpec, SimConfig, certificate_check, design, fit_decay, lyapunov, run
from heatstab.diagnostics import norm_ratio
from heatstab.errors import NoFitError
from heatstab.gram import SpectralConstant


class FakeTrajectory:
    def __init__(self, times, V, r=None, norm_y=None):
        self.times = np.asarray(times, dtype=float)
        self.diagnostics = {
            "V": np.asarray(V, dtype=float),
            "r": np.ones_like(self.times) if r is None else np.asarray(r, dtype=float),
            "norm_y": np.sqrt(V) if norm_y is None else np.asarray(norm_y, dtype=float),
        }

    def __getitem__(self, key):
        return self.diagnostics[key]


P = design(3.0, SpectralConstant(0.5, 1), D=1.0, sigma=1e-3)


def test_lyapunov_examples():
    p = design(10.0, SpectralConstant(0.5, 1))
    assert lyapunov([1.0, 0.0], p) == 4.0
    assert lyapunov(np.zeros(5), p) == 0.0
    q = design(1.0, SpectralConstant(1.0, 2))
    y = np.array([0.3, -1.2, 2.0])
    assert lyapunov(y, q) == pytest.approx(y @ y, rel=1e-15)


def test_fit_exact_exponential():
    t = np.linspace(0, 2, 101)
    rep = fit_decay(FakeTrajectory(t, np.exp(-3 * t)), P)
    assert rep.fitted_rate == pytest.approx(3.0, rel=1e-9)
    assert rep.fit_window == (0.0, 2.0)
    assert rep.floor_norm is None


def test_fit_constant():
    t = np.linspace(0, 1, 20)
    assert fit_decay(FakeTrajectory(t, np.full(20, 2.5)), P).fitted_rate == pytest.approx(0.0, abs=1e-12)


def test_window_excludes_floor():
    t = np.linspace(0, 2, 101)
    V = np.exp(-3 * t)
    r = np.where(t < 1.0, 1.0, 1e-6)
    V[t >= 1.0] = 1e-3  # stagnation plateau must not bias the fit
    rep = fit_decay(FakeTrajectory(t, V, r), P)
    assert rep.fitted_rate == pytest.approx(3.0, rel=1e-9)
    assert rep.fit_window[1] < 1.0
    assert rep.floor_norm == pytest.approx(np.sqrt(1e-3))


def test_no_fit_inside_floor():
    t = np.linspace(0, 1, 50)
    with pytest.raises(NoFitError, match="stagnation floor"):
        fit_decay(FakeTrajectory(t, np.full(50, 1e-12), r=np.zeros(50)), P)


def test_certificate_on_synthetic():
    t = np.linspace(0, 1, 101)
    ok, margin = certificate_check(FakeTrajectory(t, np.exp(-3.5 * t)), P, tol=0.0)
    assert ok and margin == pytest.approx(-0.5, rel=1e-9)
    ok, margin = certificate_check(FakeTrajectory(t, np.exp(-2.5 * t)), P, tol=0.1)
    assert not ok and margin == pytest.approx(0.5, rel=1e-9)


def test_norm_ratio_identity():
    for C in (0.05, 0.3, 1.0):
        p = design(2.0, SpectralConstant(C, 1))
        assert norm_ratio(p) == pytest.approx(max(C, 1 / C), rel=1e-14)


def test_linear_full_actuation_rate_at_least_lambda():
    traj = run(SimConfig(DomainSpec.box([1.0]), M=16, lam=1.0, dt=1e-3, t_end=2.0, y0="random_unit"))
    p = traj.plant.params
    assert fit_decay(traj, p).fitted_rate >= 1.0
    assert certificate_check(traj, p, 0.05)[0]


def test_margin_converges_under_refinement():
    dom = DomainSpec.box([1.0], [(0.0, 0.5)])
    margins = []
    for dt in (4e-3, 2e-3, 1e-3, 5e-4):
        traj = run(SimConfig(dom, M=32, lam=5.0, dt=dt, t_end=1.0, y0="bump"))
        margins.append(certificate_check(traj, traj.plant.params)[1])
    diffs = np.abs(np.diff(margins))
    assert np.all(diffs[1:] < diffs[:-1])
