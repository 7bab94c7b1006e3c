"""Gains for a target decay rate, and what they cost."""
from heatstab import DomainSpec, design, enumerate_modes, gram_matrix, select_N, spectral_constant

domain = DomainSpec.box([1.0], [(0.0, 0.5)])
modes = enumerate_modes(domain, 64)
G = gram_matrix(modes, domain)

# Faster targets pull more modes into the controlled block, which lowers C
# and drives both the feedback gain and the low-mode weight up.
print(f"{'lambda':>8} {'N':>3} {'C':>10} {'gamma':>12} {'mu':>12} {'beta/alpha':>11}")
for lam in (1.0, 5.0, 20.0, 50.0, 100.0):
    N = select_N(modes, lam)
    p = design(lam, spectral_constant(G, N), D=1.0, modes=modes)
    print(f"{lam:8.1f} {N:3d} {p.C_lambda:10.5f} {p.gamma:12.3f} {p.mu:12.3f} {p.beta / p.alpha:11.3f}")

# With an unstable potential the gain absorbs the growing modes as well.
shifted = enumerate_modes(domain, 64, c=-15.0)
p = design(5.0, spectral_constant(G, select_N(shifted, 5.0)), modes=shifted)
print("c=-15: smallest effective eigenvalue", round(p.tau1_eff, 4), "gamma", round(p.gamma, 3), "mu", round(p.mu, 3))
