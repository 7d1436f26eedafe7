"""
The Riesz potential of a pulled-back current
============================================

For a disc f and a smooth potential psi, the Green-kernel integral of
Laplacian(psi o f) over the unit disc can be computed two ways: as an
area integral against G(0, .) or, by the Riesz formula, from boundary
values only.
"""

from plurienv import QuadratureConfig, green_disc, linear_disc, logabs, normsq, riesz_area, riesz_boundary

# G(0, w) = log|w| / 2pi
print("G(0, 0.5) =", green_disc(0.0, 0.5))

# psi = |z|^2 along f(t) = 0.2 + 0.3 t: the potential is -|b|^2 = -0.09
f = linear_disc(0.2, 0.3)
print("boundary route:", riesz_boundary(normsq(), f))

# the area route converges at a bit under second order on the polar grid
for m in (16, 32, 64, 128):
    q = QuadratureConfig(n_radial=m, n_angular=2 * m)
    err = riesz_area(normsq(), f, q) + 0.09
    print(f"area route {m:4d} x {2 * m:4d}: error {err: .2e}")

# a pluriharmonic potential carries no mass
print("log|z - 3|:", riesz_boundary(logabs(1.0, -3.0), f))
