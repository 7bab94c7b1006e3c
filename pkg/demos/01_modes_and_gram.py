"""Eigenmodes of the unit interval and how a half-interval actuator sees them."""
import numpy as np

from heatstab import DomainSpec, enumerate_modes, gram_matrix, spectral_constant

domain = DomainSpec.box([1.0], [(0.0, 0.5)])
modes = enumerate_modes(domain, 8)
print("first eigenvalues:", np.round(modes.tau, 3))

# Overlaps of the sine modes on the actuated half. The diagonal is 1/2 by
# symmetry; odd/even pairs couple, same-parity pairs do not.
G = gram_matrix(modes, domain)
print(np.round(G.entries[:4, :4], 4))

# Smallest eigenvalue of the leading block: how well the first N modes can
# be observed (and pushed) from the actuated region alone.
for N in (1, 2, 4, 8):
    print(f"N={N}: C = {spectral_constant(G, N).value:.6f}")
print("closed form for N=2:", 0.5 - 4 / (3 * np.pi))

# A square with an off-centre actuated patch.
square = DomainSpec.box([1.0, 1.0], [(0.1, 0.4), (0.3, 0.8)])
sq_modes = enumerate_modes(square, 10)
print("2D mode indices:", [tuple(int(k) for k in i) for i in sq_modes.indices])
print("C for N=3:", spectral_constant(gram_matrix(sq_modes, square), 3).value)
