"""
Both sides of the envelope formula
==================================

The disc envelope (an infimum over discs) and the largest omega-psh
minorant (a supremum over functions) should agree. The optimizer gives an
upper bound for the first, the grid oracle an over-estimate of the second;
their gap measures the combined numerical error.
"""

import numpy as np

from plurienv import (CurrentSpec, DomainSpec, GridSettings, OptimizerSettings, Weight, const,
                      envelope_field, normsq, omega_envelope_oracle)

dom = DomainSpec.unit_disc()
omega = CurrentSpec(const(0.0), normsq())   # omega = -dd^c |z|^2
w = Weight(const(0.0))
# exact answer on both sides: |x|^2 - 1

opt = OptimizerSettings(families=(("moebius", 1),), restarts=2, seed=1)
xs = np.linspace(0.0, 0.8, 9)
discs = envelope_field(xs, omega, w, dom, opt)

grid = omega_envelope_oracle(omega, w, dom, GridSettings(res=96))
print(f"oracle: {grid.iteration_count} sweeps, residual {grid.residual:.1e}")

print("   x    optimizer   oracle    exact")
for x, est in zip(xs, discs):
    o = grid.interpolate(np.array([x]))
    print(f"{x:5.2f}  {est.value.value:9.4f} {o:9.4f} {x * x - 1:8.4f}")
