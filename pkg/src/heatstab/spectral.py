"""Dirichlet eigenpairs of the Laplacian on boxes.

On ``Omega = prod (0, L_k)`` the eigenfunctions are tensor products of
sines, ``e(x) = prod sqrt(2/L_k) sin(k_j pi x_j / L_j)``, with eigenvalue
``sum (k_j pi / L_j)**2``. Modes are ordered by eigenvalue, ties broken by
the lexicographic order of the index tuple.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidDomainError, TruncationError


@dataclass(frozen=True)
class DomainSpec:
    """Box ``Omega`` and the actuated sub-box ``omega``."""

    lengths: tuple[float, ...]
    omega_lo: tuple[float, ...]
    omega_hi: tuple[float, ...]

    def __post_init__(self):
        lengths = tuple(float(v) for v in self.lengths)
        lo = tuple(float(v) for v in self.omega_lo)
        hi = tuple(float(v) for v in self.omega_hi)
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "omega_lo", lo)
        object.__setattr__(self, "omega_hi", hi)
        if len(lengths) not in (1, 2, 3):
            raise InvalidDomainError(f"dimension must be 1, 2 or 3, got {len(lengths)}")
        if len(lo) != len(lengths) or len(hi) != len(lengths):
            raise InvalidDomainError("omega bounds must have one entry per axis")
        for k, (L, a, b) in enumerate(zip(lengths, lo, hi)):
            if not (L > 0 and math.isfinite(L)):
                raise InvalidDomainError(f"axis {k}: length must be positive, got {L}")
            if not (0.0 <= a < b <= L):
                raise InvalidDomainError(
                    f"axis {k}: need 0 <= omega_lo < omega_hi <= L, got ({a}, {b}) with L={L}"
                )

    @classmethod
    def box(cls, lengths, omega=None):
        """Build from side lengths and optional ``[(lo, hi), ...]`` per axis.

        ``omega=None`` means actuation on the whole domain.
        """
        lengths = tuple(np.atleast_1d(np.asarray(lengths, dtype=float)))
        if omega is None:
            omega = [(0.0, L) for L in lengths]
        omega = [tuple(b) for b in omega]
        return cls(lengths, tuple(b[0] for b in omega), tuple(b[1] for b in omega))

    @property
    def dim(self) -> int:
        return len(self.lengths)

    @property
    def omega_measure(self) -> float:
        return float(np.prod(np.subtract(self.omega_hi, self.omega_lo)))

    @property
    def omega_is_full(self) -> bool:
        return all(a == 0.0 and b == L for a, b, L in zip(self.omega_lo, self.omega_hi, self.lengths))

    def to_dict(self) -> dict:
        return {
            "lengths": list(self.lengths),
            "omega": [[a, b] for a, b in zip(self.omega_lo, self.omega_hi)],
        }


@dataclass(frozen=True)
class Mode:
    index: tuple[int, ...]
    eigenvalue: float


@dataclass(frozen=True, eq=False)
class ModeSet:
    """The ``M`` lowest Dirichlet modes of a box, sorted.

    ``tau`` holds the unshifted Laplacian eigenvalues; ``shift`` is a
    constant potential ``c`` so the generator is ``-Laplacian + c``.
    """

    indices: np.ndarray  # (M, dim) int
    tau: np.ndarray  # (M,)
    lengths: tuple[float, ...]
    shift: float = 0.0

    def __post_init__(self):
        self.indices.setflags(write=False)
        self.tau.setflags(write=False)

    def __len__(self) -> int:
        return len(self.tau)

    @property
    def M(self) -> int:
        return len(self.tau)

    @property
    def effective(self) -> np.ndarray:
        return self.tau + self.shift

    @property
    def modes(self) -> list[Mode]:
        return [Mode(tuple(int(k) for k in idx), float(t)) for idx, t in zip(self.indices, self.tau)]

    def __eq__(self, other):
        if not isinstance(other, ModeSet):
            return NotImplemented
        return (
            self.lengths == other.lengths
            and self.shift == other.shift
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.tau, other.tau)
        )

    __hash__ = None


def _eigenvalues(indices: np.ndarray, lengths: Sequence[float]) -> np.ndarray:
    scale = (np.pi / np.asarray(lengths, dtype=float)) ** 2
    return (indices.astype(float) ** 2 * scale).sum(axis=1)


def enumerate_modes(domain: DomainSpec, M: int, c: float = 0.0) -> ModeSet:
    """Return the ``M`` smallest eigenpairs of ``-Laplacian + c`` on the box."""
    if int(M) != M or M < 1:
        raise InvalidDomainError(f"M must be a positive integer, got {M}")
    M = int(M)
    lengths = domain.lengths
    dim = domain.dim
    K = math.ceil(M ** (1.0 / dim)) + 2
    base = (np.pi / np.asarray(lengths)) ** 2
    while True:
        grid = np.array(list(itertools.product(range(1, K + 1), repeat=dim)), dtype=np.int64)
        tau = _eigenvalues(grid, lengths)
        # np.lexsort uses the last key as primary: eigenvalue first, then index tuple
        keys = [grid[:, j] for j in reversed(range(dim))]
        order = np.lexsort(keys + [tau])
        # eigenvalues equal up to rounding form one tie group
        ts = tau[order]
        group = np.empty(len(ts), dtype=np.int64)
        group[order] = np.concatenate([[0], np.cumsum(np.diff(ts) > 1e-12 * ts[1:])])
        order = np.lexsort(keys + [group])
        if len(order) >= M:
            tau_M = tau[order[M - 1]]
            # smallest eigenvalue of any index with some k_j = K + 1
            outside = min((K + 1) ** 2 * base[j] + base.sum() - base[j] for j in range(dim))
            if tau_M < outside:
                break
        K *= 2
    sel = order[:M]
    return ModeSet(grid[sel].copy(), tau[sel].copy(), tuple(lengths), float(c))


def select_N(modes: ModeSet, lam: float) -> int:
    """Count of (effective) eigenvalues ``<= lam``, floored at 1."""
    if not lam > 0:
        raise ValueError(f"decay rate must be positive, got {lam}")
    ev = modes.effective
    if ev[-1] < lam:
        raise TruncationError(
            f"largest retained eigenvalue {ev[-1]:.6g} is below lambda={lam:.6g}; increase M"
        )
    return max(1, int(np.count_nonzero(ev <= lam)))


def eval_eigenfunction(mode, domain: DomainSpec, x) -> float:
    """Value of the orthonormal eigenfunction of ``mode`` at point ``x``."""
    index = mode.index if isinstance(mode, Mode) else tuple(mode)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    L = np.asarray(domain.lengths)
    if x.shape != L.shape:
        raise InvalidDomainError(f"point has {x.size} coordinates, domain has {L.size}")
    if np.any(x < 0) or np.any(x > L):
        raise InvalidDomainError(f"point {x.tolist()} lies outside the closed domain")
    k = np.asarray(index, dtype=float)
    val = np.prod(np.sqrt(2.0 / L) * np.sin(k * np.pi * x / L))
    # sin(k pi) is ~1e-16, not 0; boundary values are exactly zero
    if np.any(x == 0) or np.any(x == L):
        return 0.0
    return float(val)


def eigenfunction_values(modes: ModeSet, points: np.ndarray) -> np.ndarray:
    """Matrix ``E[p, i] = e_i(points[p])`` for an array of points ``(P, dim)``."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    L = np.asarray(modes.lengths)
    out = np.ones((points.shape[0], modes.M))
    for j in range(len(L)):
        arg = np.outer(points[:, j], modes.indices[:, j]) * (np.pi / L[j])
        out *= np.sqrt(2.0 / L[j]) * np.sin(arg)
    return out
