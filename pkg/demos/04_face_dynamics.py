"""Orbits on the invariant face q = 0 and the stabilizers of their tails."""
from cml4.explore import SimulationConfig, face_dynamics

cfg = SimulationConfig(eps=0.3, steps=20_000, burn_in=2_000, orbit_count=60, rng_seed=3)
for eps in (0.30, 0.36, 0.42, 0.445):
    rep = face_dynamics("q0", eps, cfg, hulls=False)
    types = ", ".join(f"{k}: {n}" for k, n in sorted(rep.stabilizer_types.items()))
    print(f"eps = {eps:.3f}  off-face drift {rep.fixed_coordinate_max:.0e}  {types}")
