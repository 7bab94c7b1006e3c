"""The smoothing width sigma sets the residual level the state settles to."""
from heatstab import DisturbanceSpec, DomainSpec, SimConfig, run
from heatstab.diagnostics import floor_norm

domain = DomainSpec.box([1.0], [(0.0, 0.5)])

# Start at rest and let a sinusoidal disturbance push. Once the weighted
# localized state drops below sigma the sign feedback turns linear and
# can no longer cancel the push exactly.
for sigma in (1e-1, 1e-2, 1e-3, 1e-4, 1e-6):
    cfg = SimConfig(domain, M=64, lam=5.0, D=1.0, sigma=sigma, dt=1e-3, y0="zero",
                    disturbance=DisturbanceSpec("sinusoid", frequency=2.0))
    traj = run(cfg)
    print(f"sigma={sigma:7.0e}  floor ||y|| = {floor_norm(traj, traj.plant.params):.3e}")

# Below about 1e-4 the floor is set by the time step rather than sigma:
# each step the disturbance acts for dt before the feedback answers.
for dt in (2e-3, 1e-3, 5e-4):
    cfg = SimConfig(domain, M=64, lam=5.0, D=1.0, sigma=1e-6, dt=dt, y0="zero",
                    disturbance=DisturbanceSpec("sinusoid", frequency=2.0))
    traj = run(cfg)
    print(f"dt={dt:.0e}  floor ||y|| = {floor_norm(traj, traj.plant.params):.3e}")
