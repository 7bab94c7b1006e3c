"""Feedback synthesis and evaluation in modal coordinates.

The control is ``u = u_lin + u_sign`` with

* ``u_lin = -gamma * P_N y`` (low-mode damping), and
* ``u_sign = -D * w / max(r, sigma)`` where ``w = mu P_N y + P_N^perp y``
  and ``r = ||chi_omega w||`` (regularised multivalued sign).

Only ``chi_omega u`` enters the dynamics; its modal coefficients are
``G @ u``. Norms of actuated fields are therefore taken in the ``G``
quadratic form.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import InfeasibleRateError, NumericFaultError
from .gram import GramMatrix, SpectralConstant
from .spectral import ModeSet


@dataclass(frozen=True)
class ControllerParams:
    lam: float
    D: float
    C_lambda: float
    gamma: float
    mu: float
    sigma: float
    N: int
    shift: float = 0.0
    tau1_eff: float | None = None  # set when the shifted gain law was used

    @property
    def shifted(self) -> bool:
        return self.tau1_eff is not None

    @property
    def alpha(self) -> float:
        return min(1.0, float(np.sqrt(self.mu)))

    @property
    def beta(self) -> float:
        return max(1.0, float(np.sqrt(self.mu)))

    def report(self) -> dict:
        out = asdict(self)
        out["lambda"] = out.pop("lam")
        out["beta_over_alpha"] = self.beta / self.alpha
        return out


def default_sigma(D: float) -> float:
    return 1e-6 * D if D > 0 else 1e-6


def design(lam, C: SpectralConstant, D=0.0, sigma=None, modes: ModeSet | None = None) -> ControllerParams:
    """Fix the gains for decay rate ``lam``.

    Unshifted: ``gamma = lam / C`` and ``mu = 1 / C**2``. When ``modes``
    carries a potential shift that makes some effective eigenvalue
    non-positive, ``gamma = (lam - tau1) / C`` and
    ``mu = (lam - tau1)**2 / (lam * C)**2`` with ``tau1`` the smallest
    effective eigenvalue. Any ``lam > 0`` is feasible: the extra damping
    ``-tau1 / C`` in ``gamma`` absorbs the unstable modes.
    """
    lam = float(lam)
    if not lam > 0:
        raise InfeasibleRateError(f"decay rate must be positive, got {lam}")
    if D < 0:
        raise ValueError(f"disturbance bound must be nonnegative, got {D}")
    sigma = default_sigma(D) if sigma is None else float(sigma)
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    c = C.value
    shift = 0.0 if modes is None else modes.shift
    tau1 = None if modes is None else float(modes.effective[0])
    if tau1 is not None and shift != 0.0 and tau1 <= 0.0:
        gamma = (lam - tau1) / c
        mu = (lam - tau1) ** 2 / (lam**2 * c**2)
    else:
        tau1 = None
        gamma = lam / c
        mu = 1.0 / c**2
    return ControllerParams(lam, float(D), c, gamma, mu, sigma, C.N, shift, tau1)


def weights(params: ControllerParams, M: int) -> np.ndarray:
    """Diagonal of the weighting operator ``mu P_N + P_N^perp``."""
    out = np.ones(M)
    out[: params.N] = params.mu
    return out


def weighted_state(params: ControllerParams, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    out = y.copy()
    out[: params.N] *= params.mu
    return out


def unweighted_state(params: ControllerParams, w) -> np.ndarray:
    """Inverse of :func:`weighted_state`."""
    w = np.asarray(w, dtype=float)
    out = w.copy()
    out[: params.N] /= params.mu
    return out


def mu_inner(params: ControllerParams, u, v) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    N = params.N
    return float(params.mu * (u[:N] @ v[:N]) + u[N:] @ v[N:])


def linear_feedback(params: ControllerParams, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    out[: params.N] = -params.gamma * y[: params.N]
    return out


def localized_norm(G: GramMatrix | np.ndarray, v) -> float:
    """``||chi_omega v||_{L2(Omega)}`` for a field with modal coefficients ``v``."""
    G = G.entries if isinstance(G, GramMatrix) else G
    v = np.asarray(v, dtype=float)
    return float(np.sqrt(max(v @ G @ v, 0.0)))


def sign_feedback(params: ControllerParams, y, G: GramMatrix) -> np.ndarray:
    """Modal coefficients of the regularised sign control.

    Saturated (``r >= sigma``) it equals ``-D chi_omega w / ||chi_omega w||``
    on ``omega``; below ``sigma`` it ramps linearly to zero. The actuated
    field always has norm at most ``D``.
    """
    w = weighted_state(params, y)
    if params.D == 0.0:
        return np.zeros_like(w)
    r = localized_norm(G, w)
    if not np.isfinite(r):
        raise NumericFaultError("non-finite state in sign feedback")
    return -params.D * w / max(r, params.sigma)


def operator(params: ControllerParams, y, G: GramMatrix, modes: ModeSet) -> np.ndarray:
    """Closed-loop operator ``A y`` so that ``y' + A y = chi_omega d``."""
    y = np.asarray(y, dtype=float)
    Gm = G.entries
    Py = np.zeros_like(y)
    Py[: params.N] = y[: params.N]
    return modes.effective * y + params.gamma * (Gm @ Py) - Gm @ sign_feedback(params, y, G)


def monotone_gap(params: ControllerParams, y1, y2, G: GramMatrix, modes: ModeSet) -> float:
    """``<A y1 - A y2, y1 - y2>_mu``; nonnegative for a monotone closed loop."""
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    dA = operator(params, y1, G, modes) - operator(params, y2, G, modes)
    return mu_inner(params, dA, y1 - y2)
