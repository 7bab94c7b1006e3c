"""Gram matrix of eigenfunctions restricted to the actuated region.

Entries ``G_ij = (e_i, e_j)_{L2(omega)}`` factor into per-axis sine
overlaps, which have closed-form antiderivatives, so assembly is exact up
to rounding. The leading ``N x N`` block is ``J_N``; its smallest
eigenvalue is the weak spectral constant.
"""
from __future__ import annotations

import hashlib
import io
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import DegenerateSubdomainError
from .spectral import DomainSpec, ModeSet

DEGENERACY_TOL = 1e-12


def sine_overlap(k, l, a, b, L):
    """``(2/L) * int_a^b sin(k pi x/L) sin(l pi x/L) dx``.

    Vectorised over ``k`` and ``l`` (broadcast against each other).
    """
    if not a < b:
        raise ValueError(f"empty interval: a={a} >= b={b}")
    k = np.asarray(k, dtype=float)
    l = np.asarray(l, dtype=float)
    w = np.pi / L
    ua, ub = w * a, w * b
    kk, ll = np.broadcast_arrays(k, l)
    same = kk == ll
    d = np.where(same, 1.0, kk - ll)  # placeholder avoids 0/0 on the diagonal
    s = kk + ll
    # sin A sin B = (cos(A-B) - cos(A+B)) / 2; the prefactor 2/L and 1/w cancel to 2/pi
    off = (np.sin(d * ub) - np.sin(d * ua)) / d - (np.sin(s * ub) - np.sin(s * ua)) / s
    diag = (ub - ua) - (np.sin(s * ub) - np.sin(s * ua)) / s
    out = np.where(same, diag, off) / np.pi
    return out if out.ndim else float(out)


@dataclass(frozen=True, eq=False)
class GramMatrix:
    entries: np.ndarray
    domain_hash: str

    def __post_init__(self):
        self.entries.setflags(write=False)

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def block(self, N: int) -> np.ndarray:
        """``J_N``: the leading ``N x N`` block."""
        return self.entries[:N, :N]

    def to_csv(self) -> str:
        buf = io.StringIO()
        np.savetxt(buf, self.entries, delimiter=",", fmt="%.17g")
        return buf.getvalue()


@dataclass(frozen=True)
class SpectralConstant:
    value: float
    N: int


def domain_hash(modes: ModeSet, domain: DomainSpec) -> str:
    h = hashlib.sha256()
    h.update(repr(domain.to_dict()).encode())
    h.update(np.ascontiguousarray(modes.indices).tobytes())
    return h.hexdigest()[:16]


def gram_matrix(modes: ModeSet, domain: DomainSpec) -> GramMatrix:
    idx = modes.indices
    G = np.ones((modes.M, modes.M))
    for j, (L, a, b) in enumerate(zip(domain.lengths, domain.omega_lo, domain.omega_hi)):
        k = idx[:, j]
        G *= sine_overlap(k[:, None], k[None, :], a, b, L)
    iu = np.triu_indices(modes.M, 1)
    G[(iu[1], iu[0])] = G[iu]
    if domain.omega_is_full:
        G = np.eye(modes.M)
    return GramMatrix(G, domain_hash(modes, domain))


def spectral_constant(G: GramMatrix, N: int) -> SpectralConstant:
    """Smallest eigenvalue of ``J_N``."""
    if not 1 <= N <= G.size:
        raise ValueError(f"N must lie in [1, {G.size}], got {N}")
    c = float(linalg.eigh(G.block(N), eigvals_only=True, subset_by_index=[0, 0])[0])
    if c <= DEGENERACY_TOL:
        raise DegenerateSubdomainError(
            f"smallest eigenvalue of J_{N} is {c:.3e}; omega is too small to observe {N} modes"
        )
    return SpectralConstant(min(c, 1.0), N)
