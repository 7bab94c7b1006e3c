"""A reaction term that destabilizes the first mode, and the controller that fixes it."""
import numpy as np

from heatstab import DomainSpec, SimConfig, run
from heatstab.diagnostics import certificate_check

domain = DomainSpec.box([1.0], [(0.0, 0.5)])

# c = -15 leaves the first effective eigenvalue at pi^2 - 15, about -5.13.
free = run(SimConfig(domain, M=64, lam=5.0, c=-15.0, dt=1e-3, open_loop=True))
print("open loop growth rate:", np.polyfit(free.times[200:], np.log(free["norm_y"][200:]), 1)[0])

for D in (0.0, 0.5):
    traj = run(SimConfig(domain, M=64, lam=5.0, D=D, c=-15.0, dt=1e-3))
    p = traj.plant.params
    ok, margin = certificate_check(traj, p)
    print(f"closed loop, D={D}: gamma={p.gamma:.3f}, mu={p.mu:.3f}, certificate {'pass' if ok else 'FAIL'} "
          f"(margin {margin:.3f}), final ||y|| {traj['norm_y'][-1]:.2e}")
