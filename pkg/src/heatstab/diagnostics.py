"""Decay-rate fitting and the discrete Lyapunov certificate."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .controller import ControllerParams
from .errors import NoFitError

V_FLOOR = 1e-280


def lyapunov(y, params: ControllerParams) -> float:
    """``mu ||P_N y||^2 + ||P_N^perp y||^2``."""
    y = np.asarray(y, dtype=float)
    N = params.N
    return float(params.mu * (y[:N] @ y[:N]) + y[N:] @ y[N:])


@dataclass(frozen=True)
class DecayReport:
    fitted_rate: float
    fit_window: tuple[float, float]
    r_floor: float
    certificate_margin: float
    floor_norm: float | None
    n_points: int

    def to_dict(self) -> dict:
        out = asdict(self)
        out["fit_window"] = list(self.fit_window)
        return out


def valid_mask(traj, params: ControllerParams) -> np.ndarray:
    """Logged points inside the guarantee regime.

    With ``D > 0`` this is ``r >= sigma``; with ``D = 0`` the linear
    feedback alone carries the guarantee and every point counts. Points
    whose ``V`` has underflowed are dropped either way.
    """
    V = np.asarray(traj["V"])
    mask = V >= V_FLOOR
    if params.D > 0:
        mask &= np.asarray(traj["r"]) >= params.sigma
    return mask


def slopes(traj, params: ControllerParams) -> tuple[np.ndarray, np.ndarray]:
    """Discrete ``d log V / dt`` between consecutive valid logged points."""
    t = np.asarray(traj.times)
    V = np.asarray(traj["V"])
    mask = valid_mask(traj, params)
    pair = mask[:-1] & mask[1:]
    with np.errstate(divide="ignore"):
        s = np.diff(np.log(np.where(V > 0, V, 1.0))) / np.diff(t)
    return s[pair], t[:-1][pair]


def floor_norm(traj, params: ControllerParams) -> float | None:
    """Largest ``||y||`` from the first time ``r < sigma`` on, if ever."""
    r = np.asarray(traj["r"])
    below = np.flatnonzero(r < params.sigma)
    if params.D == 0 or below.size == 0:
        return None
    return float(np.max(traj["norm_y"][below[0]:]))


def fit_decay(traj, params: ControllerParams, min_points: int = 10) -> DecayReport:
    """Least-squares rate of ``log V`` over the valid window."""
    t = np.asarray(traj.times)
    mask = valid_mask(traj, params)
    idx = np.flatnonzero(mask)
    if idx.size < min_points:
        raise NoFitError(
            f"only {idx.size} logged points satisfy r >= sigma={params.sigma:.3g} "
            f"(need {min_points}); the run may start inside the stagnation floor"
        )
    # window is the leading contiguous stretch of valid points
    stop = idx[0]
    while stop + 1 < len(mask) and mask[stop + 1]:
        stop += 1
    win = np.arange(idx[0], stop + 1)
    if win.size < min_points:
        win = idx
    tw = t[win]
    lv = np.log(np.asarray(traj["V"])[win])
    slope = np.polyfit(tw, lv, 1)[0]
    s, _ = slopes(traj, params)
    margin = float(np.max(s) + params.lam) if s.size else float("nan")
    r = np.asarray(traj["r"])[win]
    return DecayReport(
        fitted_rate=float(-slope),
        fit_window=(float(tw[0]), float(tw[-1])),
        r_floor=float(np.min(r)),
        certificate_margin=margin,
        floor_norm=floor_norm(traj, params),
        n_points=int(win.size),
    )


def certificate_check(traj, params: ControllerParams, tol: float | None = None) -> tuple[bool, float]:
    """Pass iff every discrete slope of ``log V`` is at most ``-lam + tol``.

    ``tol`` defaults to ``0.05 * lam``. Returns ``(passed, margin)`` where
    ``margin = max(slope) + lam``.
    """
    tol = 0.05 * params.lam if tol is None else tol
    s, _ = slopes(traj, params)
    if s.size == 0:
        return False, float("nan")
    margin = float(np.max(s) + params.lam)
    return margin <= tol, margin


def norm_ratio(params: ControllerParams) -> float:
    """``beta / alpha`` in ``||y(t)|| <= (beta/alpha) exp(-lam t/2) ||y0||``."""
    return params.beta / params.alpha
