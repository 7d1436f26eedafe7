"""Green function of the unit disc and Riesz potentials of pulled-back currents.

The Riesz potential at the origin is computed two ways:

* :func:`riesz_boundary` -- from the representation
  ``psi(f(0)) = R(0) + mean_T psi o f`` (reference route, no Hessian needed);
* :func:`riesz_area` -- by integrating the Green kernel against the density
  ``Laplacian(psi o f)`` on a polar midpoint grid (independent check).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .disc import AnalyticDisc, circle_values, disc_derivative, eval_disc
from .errors import DomainError, InfeasibleDiscError, SingularCenterError
from .extreal import ExtReal
from .potentials import CurrentSpec, Expr


@dataclass(frozen=True)
class QuadratureConfig:
    n_circle: int = 256
    n_radial: int = 64
    n_angular: int = 128

    def __post_init__(self):
        if self.n_circle < 16 or self.n_radial < 8 or self.n_angular < 16:
            raise ValueError("quadrature needs n_circle >= 16, n_radial >= 8, n_angular >= 16")

    def to_json(self):
        return {"n_circle": self.n_circle, "n_radial": self.n_radial, "n_angular": self.n_angular}


DEFAULT_QUADRATURE = QuadratureConfig()


def green_disc(z, w):
    """``G(z, w) = (1/2pi) log(|z - w| / |1 - z conj(w)|)``; ``-inf`` on the diagonal."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if np.any(np.abs(z) >= 1) or np.any(np.abs(w) >= 1):
        raise DomainError("Green function arguments must lie in the open unit disc")
    with np.errstate(divide="ignore"):
        g = np.log(np.abs(z - w) / np.abs(1 - z * np.conj(w))) / (2 * np.pi)
    return float(g) if g.ndim == 0 else g


def pullback_density(psi: Expr, f: AnalyticDisc, t):
    """``Laplacian_t (psi o f)(t) = 4 f'(t)^* H(f(t)) f'(t)``."""
    t = np.asarray(t, dtype=complex)
    H = psi.hessian(eval_disc(f, t))
    d = disc_derivative(f, t)
    lap = 4.0 * np.einsum("...j,...jk,...k->...", np.conj(d), H, d)
    lap = np.real(lap)
    return float(lap) if lap.ndim == 0 else lap


def boundary_mean(e: Expr, f: AnalyticDisc, n_circle: int):
    """Trapezoidal mean of ``e o f`` on the unit circle with the -inf policy.

    Returns ``(mean, n_rejected)``. If any node hits ``-inf`` the rule is
    redone once on ``2 n_circle`` nodes shifted by half a step; a second
    hit makes the disc infeasible.
    """
    vals = e.value(circle_values(f, n_circle))
    hits = np.isneginf(vals)
    if not hits.any():
        return float(np.mean(vals)), 0
    vals2 = e.value(circle_values(f, 2 * n_circle, 0.5))
    if np.isneginf(vals2).any():
        raise InfeasibleDiscError("boundary samples repeatedly hit the -inf set")
    return float(np.mean(vals2)), int(hits.sum())


def riesz_boundary(psi: Expr, f: AnalyticDisc, q: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """``R_{f^* dd^c psi}(0) = psi(f(0)) - mean_T psi o f``."""
    center = float(psi.value(f.center[None, :])[0])
    if np.isneginf(center):
        raise SingularCenterError()
    mean, _ = boundary_mean(psi, f, q.n_circle)
    return center - mean


def riesz_area(psi: Expr, f: AnalyticDisc, q: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Green-kernel integral of the pullback density over a polar midpoint grid."""
    dr = 1.0 / q.n_radial
    dth = 2 * np.pi / q.n_angular
    r = (np.arange(1, q.n_radial + 1) - 0.5) * dr
    th = (np.arange(q.n_angular) + 0.5) * dth
    t = r[:, None] * np.exp(1j * th[None, :])
    pts = eval_disc(f, t)
    if np.any(np.isneginf(psi.value(pts))):
        raise InfeasibleDiscError("area grid hits the singular set of the potential")
    dens = pullback_density(psi, f, t)
    kernel = np.log(r)[:, None] / (2 * np.pi)
    return float(np.sum(kernel * dens * r[:, None]) * dr * dth)


def riesz_current(omega: CurrentSpec, f: AnalyticDisc, q: QuadratureConfig = DEFAULT_QUADRATURE) -> ExtReal:
    """``R_{f^* omega}(0)`` for ``omega = dd^c psi1 - dd^c psi2``."""
    if omega.in_singular_set(f.center):
        raise SingularCenterError()
    return ExtReal(riesz_boundary(omega.psi1, f, q)) - ExtReal(riesz_boundary(omega.psi2, f, q))
