"""Disc functionals: the Poisson functional of a weight and its
current-corrected version ``-R_{f^*omega}(0) + mean_T phi o f``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .disc import AnalyticDisc, circle_values
from .errors import SingularCenterError
from .extreal import ExtReal
from .potentials import Const, CurrentSpec, Weight
from .riesz import DEFAULT_QUADRATURE, QuadratureConfig, riesz_current

REJECTION_FRACTION = 1.0 / 8.0


@dataclass(frozen=True)
class FunctionalResult:
    value: ExtReal
    n_rejected_boundary_nodes: int
    quadrature_used: QuadratureConfig

    @property
    def reliable(self) -> bool:
        if self.value.is_undefined:
            return False
        return self.n_rejected_boundary_nodes < self.quadrature_used.n_circle * REJECTION_FRACTION

    def __float__(self):
        return self.value.value


def poisson_functional(w: Weight, f: AnalyticDisc, q: QuadratureConfig = DEFAULT_QUADRATURE) -> FunctionalResult:
    """Boundary mean of ``phi o f``.

    ``w`` may be any object with a ``boundary_values(Z) -> (values, bad)``
    method (e.g. a mollified weight). Nodes where the weight is ``-inf`` are
    dropped from the mean; if every node is dropped the value is undefined.
    """
    Z = circle_values(f, q.n_circle)
    vals, bad = w.boundary_values(Z)
    n_bad = int(np.count_nonzero(bad))
    if n_bad == q.n_circle:
        return FunctionalResult(ExtReal.undefined(), n_bad, q)
    return FunctionalResult(ExtReal(float(np.mean(vals[~bad]))), n_bad, q)


def omega_functional(omega: CurrentSpec, w: Weight, f: AnalyticDisc,
                     q: QuadratureConfig = DEFAULT_QUADRATURE) -> FunctionalResult:
    """``-R_{f^*omega}(0) + mean_T phi o f``; raises if ``f(0)`` is in sing(omega)."""
    if omega.in_singular_set(f.center):
        raise SingularCenterError()
    p = poisson_functional(w, f, q)
    if omega.is_zero:
        return p
    r = riesz_current(omega, f, q)
    return FunctionalResult(p.value - r, p.n_rejected_boundary_nodes, q)


def global_potential_shift(omega: CurrentSpec, w: Weight):
    """Fold the potentials of ``omega`` into the weight.

    Returns ``(zero current, Weight(phi1 + psi1, phi2 + psi2))``; for every
    disc, ``omega_functional(omega, w, f) + psi(f(0))`` equals the Poisson
    functional of the shifted weight.
    """
    return CurrentSpec(), Weight(w.phi1 + omega.psi1, w.phi2 + omega.psi2)


def absorb_phi2(omega: CurrentSpec, w: Weight):
    """Move the psh part of the weight into the current.

    ``(omega, phi1 - phi2) -> (omega - dd^c phi2, phi1)``. Envelopes satisfy
    ``EH[omega, phi1 - phi2] = EH[omega - dd^c phi2, phi1] - phi2``.
    """
    return CurrentSpec(omega.psi1, omega.psi2 + w.phi2), Weight(w.phi1, Const(0.0))


def potential_value(omega: CurrentSpec, z) -> float:
    """``psi(z) = psi1(z) - psi2(z)`` at one point."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))[None, :]
    return float(omega.psi1.value(z)[0] - omega.psi2.value(z)[0])
