"""Bounded disturbances ``d(t)`` in modal coordinates.

Every kind has the form ``amplitude * s(t) * profile`` with
``|s(t)| <= 1`` and ``||profile|| = 1``, except ``adversarial`` which
reads the controller's weighted state and pushes against the rejection
term. All kinds satisfy ``||d(t)||_{L2(Omega)} <= amplitude``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .controller import ControllerParams, localized_norm, weighted_state
from .errors import ConfigError, DisturbanceBoundError
from .gram import GramMatrix
from .spectral import ModeSet

KINDS = ("zero", "constant", "sinusoid", "square_wave", "random_bounded", "adversarial")
PROFILES = ("first_mode", "flat", "random")


@dataclass(frozen=True)
class DisturbanceSpec:
    kind: str = "zero"
    amplitude: float | None = None  # None: equal to the controller's bound D
    profile: str | tuple[float, ...] = "flat"
    frequency: float = 1.0
    seed: int = 0
    switch_period: float = 0.05

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown disturbance kind {self.kind!r}; choose from {KINDS}")
        if isinstance(self.profile, str):
            if self.profile not in PROFILES:
                raise ConfigError(f"unknown profile {self.profile!r}; choose from {PROFILES}")
        else:
            object.__setattr__(self, "profile", tuple(float(v) for v in self.profile))
        if self.amplitude is not None and not self.amplitude >= 0:
            raise ConfigError(f"disturbance amplitude must be nonnegative, got {self.amplitude}")
        if self.kind == "random_bounded" and not self.switch_period > 0:
            raise ConfigError("switch_period must be positive")

    def to_dict(self) -> dict:
        prof = self.profile if isinstance(self.profile, str) else list(self.profile)
        return {
            "kind": self.kind,
            "amplitude": self.amplitude,
            "profile": prof,
            "frequency": self.frequency,
            "seed": self.seed,
            "switch_period": self.switch_period,
        }


def profile_vector(spec: DisturbanceSpec, modes: ModeSet) -> np.ndarray:
    """Unit modal profile ``p``."""
    M = modes.M
    if isinstance(spec.profile, tuple):
        p = np.zeros(M)
        n = min(M, len(spec.profile))
        p[:n] = spec.profile[:n]
    elif spec.profile == "first_mode":
        p = np.zeros(M)
        p[0] = 1.0
    elif spec.profile == "flat":
        # coefficients of the constant function: prod over axes of the 1D integrals
        k = modes.indices
        p = np.prod(np.where(k % 2 == 1, 2.0 / (k * np.pi), 0.0), axis=1)
    else:
        p = np.random.default_rng([spec.seed, 7]).standard_normal(M)
    nrm = np.linalg.norm(p)
    if nrm == 0:
        raise ConfigError("disturbance profile has zero norm on the retained modes")
    return p / nrm


def amplitude(spec: DisturbanceSpec, params: ControllerParams) -> float:
    amp = params.D if spec.amplitude is None else float(spec.amplitude)
    if amp > params.D * (1 + 1e-12):
        raise DisturbanceBoundError(
            f"disturbance amplitude {amp:.6g} exceeds the controller bound D={params.D:.6g}"
        )
    return amp


def _switch(spec: DisturbanceSpec, t: float) -> float:
    if spec.kind == "constant":
        return 1.0
    if spec.kind == "sinusoid":
        return float(np.sin(2 * np.pi * spec.frequency * t))
    if spec.kind == "square_wave":
        return float(np.sign(np.sin(2 * np.pi * spec.frequency * t)))
    if spec.kind == "random_bounded":
        slot = int(np.floor(t / spec.switch_period))
        return float(np.random.default_rng([spec.seed, slot]).uniform(-1.0, 1.0))
    return 0.0


def eval_disturbance(
    spec: DisturbanceSpec,
    t: float,
    y,
    params: ControllerParams,
    G: GramMatrix,
    profile: np.ndarray | None = None,
    amp: float | None = None,
) -> np.ndarray:
    """Modal coefficients of ``d(t, .)``.

    ``profile`` and ``amp`` may be passed precomputed (the simulator does);
    otherwise ``profile`` is unused for ``adversarial`` and required for
    the other nonzero kinds.
    """
    y = np.asarray(y, dtype=float)
    amp = amplitude(spec, params) if amp is None else amp
    if spec.kind == "zero" or amp == 0.0:
        return np.zeros_like(y)
    if spec.kind == "adversarial":
        # worst case under ||d|| <= amp: the projection of +amp chi_omega w / ||chi_omega w||
        w = weighted_state(params, y)
        Gw = G.entries @ w
        r = localized_norm(G, w)
        return amp * Gw / max(r, params.sigma)
    if profile is None:
        raise ValueError("profile vector required")
    return amp * _switch(spec, t) * profile
