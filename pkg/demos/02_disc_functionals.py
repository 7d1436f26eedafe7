"""
Disc functionals and the potential shift
========================================

The omega-functional of a disc is the Poisson mean of the weight minus the
Riesz potential of the current. Adding psi(f(0)) turns it into the plain
Poisson functional of phi + psi.
"""

from plurienv import (CurrentSpec, Weight, const, global_potential_shift, linear_disc, moebius_disc, normsq,
                      omega_functional, poisson_functional)

# omega = -dd^c |z|^2 and phi = 0 on the unit disc
omega = CurrentSpec(const(0.0), normsq())
w = Weight(const(0.0))

f = moebius_disc(0.5)                       # disc automorphism with f(0) = 0.5
h = omega_functional(omega, w, f)
print("H(f) =", h.value.value, "(|x|^2 - 1 = -0.75)")

# shift: H_{omega,phi}(f) + psi(f(0)) = H_{phi + psi}(f), with psi = -|z|^2 here
_, shifted = global_potential_shift(omega, w)
print("H(f) + psi(0.5) =", h.value.value - 0.25)
print("H_{phi+psi}(f)  =", poisson_functional(shifted, f).value.value)

# straight discs 0.5 + b t stay above -0.75: their value is -|b|^2 with |b| <= 0.5
for b in (0.1, 0.3, 0.5):
    g = linear_disc(0.5, b)
    print(f"b = {b}: {omega_functional(omega, w, g).value.value:.4f}")
