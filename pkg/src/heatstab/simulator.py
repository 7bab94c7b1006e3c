"""Closed-loop time integration in modal coordinates.

The truncated closed loop is

    y' = -tau_eff * y + G (u_lin(y) + u_sign(y) + d(t, y))

with ``tau_eff`` the shifted eigenvalues. The diagonal decay is handled
exactly (``exponential_euler``) or implicitly (``imex_euler``); the linear
feedback and the disturbance are explicit, evaluated at the start of the
step.

The sign term is stiff below ``sigma`` (its gain is ``D / sigma``) and a
forward step makes it chatter with amplitude ``~ D * dt``. By default it is
therefore taken implicitly: the backward step for the regularised sign
reduces to one scalar equation for the gain ``kappa = D / max(r, sigma)``
after a generalised eigendecomposition of ``G`` that is computed once per
run. ``sign_treatment="explicit"`` keeps the plain forward evaluation.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate, linalg, optimize

from .controller import (
    ControllerParams,
    design,
    linear_feedback,
    localized_norm,
    sign_feedback,
    weighted_state,
    weights,
)
from .disturbance import DisturbanceSpec, amplitude, eval_disturbance, profile_vector
from .errors import ConfigError, InfeasibleRateError, NumericFaultError
from .gram import GramMatrix, gram_matrix, spectral_constant
from .spectral import DomainSpec, ModeSet, eigenfunction_values, enumerate_modes, select_N

SCHEMES = ("exponential_euler", "imex_euler")
SIGN_TREATMENTS = ("implicit", "explicit")
INITIAL_PROFILES = ("first_mode", "random_unit", "bump", "zero")
DIAGNOSTICS = ("V", "norm_y", "norm_PN", "norm_Pperp", "norm_u_lin", "norm_u_sign", "norm_d", "r")


@dataclass(frozen=True)
class SimConfig:
    domain: DomainSpec
    M: int = 64
    lam: float = 1.0
    D: float = 0.0
    sigma: float | None = None
    c: float = 0.0
    dt: float | None = None
    t_end: float | None = None
    scheme: str = "exponential_euler"
    sign_treatment: str = "implicit"
    y0: str | tuple[float, ...] = "bump"
    disturbance: DisturbanceSpec = field(default_factory=DisturbanceSpec)
    log_every: int = 1
    seed: int = 0
    open_loop: bool = False

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")
        if self.sign_treatment not in SIGN_TREATMENTS:
            raise ConfigError(f"unknown sign_treatment {self.sign_treatment!r}")
        if isinstance(self.y0, str):
            if self.y0 not in INITIAL_PROFILES:
                raise ConfigError(f"unknown initial profile {self.y0!r}; choose from {INITIAL_PROFILES}")
        else:
            object.__setattr__(self, "y0", tuple(float(v) for v in self.y0))
        if int(self.M) != self.M or self.M < 1:
            raise ConfigError(f"M must be a positive integer, got {self.M}")
        if not np.isfinite(self.lam):
            raise ConfigError(f"lambda must be finite, got {self.lam}")
        if not self.lam > 0:
            raise InfeasibleRateError(f"decay rate must be positive, got {self.lam}")
        if not self.D >= 0:
            raise ConfigError(f"D must be nonnegative, got {self.D}")
        if self.sigma is not None and not self.sigma > 0:
            raise ConfigError(f"sigma must be positive, got {self.sigma}")
        if self.dt is not None and not self.dt > 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.t_end is not None and not self.t_end > 0:
            raise ConfigError(f"t_end must be positive, got {self.t_end}")
        if self.dt is not None and self.t_end is not None and self.t_end < self.dt:
            raise ConfigError("t_end must be at least dt")
        if int(self.log_every) != self.log_every or self.log_every < 1:
            raise ConfigError("log_every must be a positive integer")


@dataclass(frozen=True, eq=False)
class Plant:
    """Everything a run needs that is fixed before time stepping starts."""

    cfg: SimConfig
    modes: ModeSet
    G: GramMatrix
    params: ControllerParams
    dt: float
    t_end: float
    n_steps: int
    profile: np.ndarray
    amp: float


def build_plant(cfg: SimConfig) -> Plant:
    modes = enumerate_modes(cfg.domain, cfg.M, cfg.c)
    N = select_N(modes, cfg.lam)
    G = gram_matrix(modes, cfg.domain)
    C = spectral_constant(G, N)
    params = design(cfg.lam, C, cfg.D, cfg.sigma, modes)
    dt = cfg.dt if cfg.dt is not None else min(0.1 / params.lam, 0.1 / params.gamma)
    t_end = cfg.t_end if cfg.t_end is not None else 8.0 / params.lam
    if t_end < dt:
        raise ConfigError(f"t_end={t_end} is shorter than dt={dt}")
    n_steps = int(round(t_end / dt))
    if abs(n_steps * dt - t_end) > 1e-9 * t_end:
        n_steps = int(np.ceil(t_end / dt))
    amp = amplitude(cfg.disturbance, params)
    prof = profile_vector(cfg.disturbance, modes) if cfg.disturbance.kind not in ("zero", "adversarial") else np.zeros(modes.M)
    return Plant(cfg, modes, G, params, dt, n_steps * dt, n_steps, prof, amp)


def _bump_1d(L: float, k: np.ndarray) -> np.ndarray:
    """Coefficients of a smooth bump centred in (0, L) against sqrt(2/L) sin(k pi x/L)."""
    a, b = 0.2 * L, 0.7 * L

    def bump(x):
        s = (2 * x - a - b) / (b - a)
        return np.exp(-1.0 / (1.0 - s * s)) if abs(s) < 1 else 0.0

    out = np.empty(len(k))
    for n, kk in enumerate(k):
        out[n] = integrate.quad(
            lambda x: bump(x) * np.sqrt(2 / L) * np.sin(kk * np.pi * x / L), a, b, limit=200, epsabs=1e-14
        )[0]
    return out


def initial_state(cfg: SimConfig, modes: ModeSet) -> np.ndarray:
    M = modes.M
    if isinstance(cfg.y0, tuple):
        y = np.zeros(M)
        n = min(M, len(cfg.y0))
        y[:n] = cfg.y0[:n]
        return y
    if cfg.y0 == "zero":
        return np.zeros(M)
    if cfg.y0 == "first_mode":
        y = np.zeros(M)
        y[0] = 1.0
        return y
    if cfg.y0 == "random_unit":
        y = np.random.default_rng(cfg.seed).standard_normal(M)
        return y / np.linalg.norm(y)
    # separable bump: product of 1D projections, cached per axis
    y = np.ones(M)
    for j, L in enumerate(modes.lengths):
        kj = modes.indices[:, j]
        uniq, inv = np.unique(kj, return_inverse=True)
        y *= _bump_1d(L, uniq)[inv]
    return y / np.linalg.norm(y)


@dataclass(frozen=True, eq=False)
class _ImplicitSign:
    """Backward step ``H y + dt * kappa * G w = b`` with ``w = Cy`` and
    ``kappa = D / max(||w||_G, sigma)``.

    With ``Q = H / c`` (``c`` the weights), ``G V = Q V Lam``, ``V^T Q V = I``
    gives ``w = V (V^T b) / (1 + dt kappa Lam)`` and a closed form for
    ``||w||_G`` as a function of ``kappa``.
    """

    V: np.ndarray
    lam: np.ndarray
    H: np.ndarray
    cw: np.ndarray
    dt: float
    D: float
    sigma: float

    @classmethod
    def build(cls, params: ControllerParams, G: GramMatrix, H: np.ndarray, dt: float):
        cw = weights(params, G.size)
        Q = H / cw
        s = 1.0 / np.sqrt(Q)
        lam, U = linalg.eigh(s[:, None] * G.entries * s[None, :])
        return cls(s[:, None] * U, np.clip(lam, 0.0, None), H, cw, dt, params.D, params.sigma)

    def solve(self, b: np.ndarray) -> np.ndarray:
        c = self.V.T @ b
        gc2 = self.lam * c * c
        dt, D, sigma = self.dt, self.D, self.sigma

        def r_of(kappa):
            return float(np.sqrt(np.sum(gc2 / (1.0 + dt * kappa * self.lam) ** 2)))

        kmax = D / sigma
        if r_of(kmax) <= sigma:
            kappa = kmax
        else:
            kappa = optimize.brentq(lambda k: k * max(r_of(k), sigma) - D, 0.0, kmax, xtol=1e-300, rtol=1e-15)
        w = self.V @ (c / (1.0 + dt * kappa * self.lam))
        return w / self.cw


def phi1(z):
    """``(exp(z) - 1) / z`` with the removable singularity at 0."""
    z = np.asarray(z, dtype=float)
    safe = np.where(z == 0.0, 1.0, z)
    return np.where(z == 0.0, 1.0, np.expm1(safe) / safe)


class Stepper:
    """One-step map ``y_n -> y_{n+1}`` for a fixed plant."""

    def __init__(self, plant: Plant):
        self.plant = plant
        p = plant.params
        tau = plant.modes.effective
        dt = plant.dt
        cfg = plant.cfg
        self.scheme = cfg.scheme
        self.open_loop = cfg.open_loop
        self.implicit_sign = cfg.sign_treatment == "implicit" and p.D > 0 and not cfg.open_loop
        if self.scheme == "exponential_euler":
            self.decay = np.exp(-tau * dt)
            self.gain = phi1(-tau * dt) * dt
            H = np.ones_like(tau)
        else:
            H = 1.0 + tau * dt
            if np.any(H <= 0):
                raise ConfigError("imex_euler needs dt < 1/|tau| for negative effective eigenvalues")
            self.decay = 1.0 / H
            self.gain = dt / H
        self.sign_solver = _ImplicitSign.build(p, plant.G, H, dt) if self.implicit_sign else None

    def forcing(self, y, t):
        """Explicit part of ``G (u + d)``."""
        plant = self.plant
        p = plant.params
        d = eval_disturbance(plant.cfg.disturbance, t, y, p, plant.G, plant.profile, plant.amp)
        if self.open_loop:
            return plant.G.entries @ d
        u = linear_feedback(p, y)
        if not self.implicit_sign:
            u = u + sign_feedback(p, y, plant.G)
        return plant.G.entries @ (u + d)

    def __call__(self, y, t):
        F = self.forcing(y, t)
        if self.scheme == "exponential_euler":
            z = self.decay * y + self.gain * F
            return self.sign_solver.solve(z) if self.implicit_sign else z
        b = y + self.plant.dt * F
        return self.sign_solver.solve(b) if self.implicit_sign else b / (1.0 + self.plant.modes.effective * self.plant.dt)


def step(y, t, plant: Plant) -> np.ndarray:
    """Single step from state ``y`` at time ``t`` (builds a fresh stepper)."""
    return Stepper(plant)(np.asarray(y, dtype=float), t)


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (n_logged, M)
    diagnostics: dict  # name -> (n_logged,) array, keys as DIAGNOSTICS
    plant: Plant

    def __len__(self):
        return len(self.times)

    def __getitem__(self, name):
        return self.diagnostics[name]

    def to_csv(self) -> str:
        cols = [self.times] + [self.diagnostics[k] for k in DIAGNOSTICS]
        lines = [",".join(("t",) + DIAGNOSTICS)]
        for row in zip(*cols):
            lines.append(",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"


def state_diagnostics(y, t, plant: Plant) -> tuple:
    p = plant.params
    N = p.N
    G = plant.G
    low = float(y[:N] @ y[:N])
    high = float(y[N:] @ y[N:])
    d = eval_disturbance(plant.cfg.disturbance, t, y, p, G, plant.profile, plant.amp)
    if plant.cfg.open_loop:
        ul = us = 0.0
    else:
        ul = localized_norm(G, linear_feedback(p, y))
        us = localized_norm(G, sign_feedback(p, y, G))
    r = localized_norm(G, weighted_state(p, y))
    return (
        p.mu * low + high,
        np.sqrt(low + high),
        np.sqrt(low),
        np.sqrt(high),
        ul,
        us,
        float(np.linalg.norm(d)),
        r,
    )


def run(cfg: SimConfig, plant: Plant | None = None) -> Trajectory:
    plant = build_plant(cfg) if plant is None else plant
    stepper = Stepper(plant)
    y = initial_state(cfg, plant.modes)
    dt = plant.dt
    times, states, diags = [0.0], [y.copy()], [state_diagnostics(y, 0.0, plant)]
    for n in range(plant.n_steps):
        t = n * dt
        try:
            with np.errstate(over="raise", invalid="raise"):
                y = stepper(y, t)
                if (n + 1) % cfg.log_every == 0 or n + 1 == plant.n_steps:
                    tn = (n + 1) * dt
                    row = state_diagnostics(y, tn, plant)
                    times.append(tn)
                    states.append(y.copy())
                    diags.append(row)
        except FloatingPointError as exc:
            raise NumericFaultError(f"overflow in time stepping ({exc})", step=n + 1) from None
        if not np.all(np.isfinite(y)):
            raise NumericFaultError("non-finite modal state", step=n + 1)
    diag = np.array(diags)
    if not np.all(np.isfinite(diag)):
        raise NumericFaultError("non-finite diagnostics")
    return Trajectory(
        np.array(times),
        np.array(states),
        {k: diag[:, i] for i, k in enumerate(DIAGNOSTICS)},
        plant,
    )


def reconstruct_field(y, modes: ModeSet, domain: DomainSpec, grid) -> tuple[list[np.ndarray], np.ndarray]:
    """Sample ``sum y_i e_i`` on a uniform grid that includes the boundary.

    Returns the per-axis coordinates and an array of shape ``grid``.
    """
    grid = [int(g) for g in np.atleast_1d(grid)]
    if len(grid) == 1 and domain.dim > 1:
        grid = grid * domain.dim
    if len(grid) != domain.dim or min(grid) < 2:
        raise ValueError("need at least 2 grid points on every axis")
    axes = [np.linspace(0.0, L, g) for L, g in zip(domain.lengths, grid)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    vals = eigenfunction_values(modes, pts) @ np.asarray(y, dtype=float)
    on_boundary = np.zeros(len(pts), dtype=bool)
    for j, L in enumerate(domain.lengths):
        on_boundary |= (pts[:, j] == 0.0) | (pts[:, j] == L)
    vals[on_boundary] = 0.0
    return axes, vals.reshape(grid)
