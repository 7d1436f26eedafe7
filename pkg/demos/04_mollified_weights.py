"""
Smoothing the weight
====================

phi_delta is phi convolved with a radial bump at scale delta. Its envelope
lives on the shrunk domain X_delta, and it bounds the envelope of phi from
above there. For the bowl 1 - |z|^2 on the unit disc both are explicit:
the envelope of phi is 0, and on the disc of radius 1 - delta the smoothed
bowl has envelope 1 - (1 - delta)^2 - delta^2 s.
"""

from plurienv import DomainSpec, OptimizerSettings, Weight, const, mollified_envelope_check, normsq
from plurienv.mollify import discrete_second_moment, kernel_constants

c1, s1 = kernel_constants(1)
print(f"kernel on C: c = {c1:.6f}, second moment s = {s1:.6f}")

dom = DomainSpec.unit_disc()
bowl = Weight(const(1.0) - normsq())
opt = OptimizerSettings(families=(("moebius", 1),), restarts=2, seed=7)
rep = mollified_envelope_check(bowl, dom, 0.5, [0.2, 0.1, 0.05], opt)

s = discrete_second_moment(1, 21)
print(f"EH_phi(0.5) = {rep.base.value.value:.4f}")
for r in rep.rows:
    exact = 1 - (1 - r.delta) ** 2 - r.delta ** 2 * s
    print(f"delta {r.delta:4.2f}: EH = {r.value:.4f}  closed form {exact:.4f}  lower bound ok: {r.lower_bound_ok}")
# the gap shrinks like 2 delta, not delta^2, because the domain shrinks too
