"""Upper bounds for the disc envelope ``inf{ H_{omega,phi}(f) : f(0) = x }``
by multi-start Nelder-Mead over finite-dimensional disc families."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .disc import MOEBIUS, POLYNOMIAL, AnalyticDisc, DiscTemplate, circle_values, constant_disc
from .domains import DomainSpec
from .errors import (DomainError, InfeasibleDiscError, OptimizerExhaustedError,
                     PlurienvError, SingularCenterError)
from .extreal import ExtReal
from .functionals import omega_functional
from .potentials import CurrentSpec, Weight, combined_weight
from .riesz import QuadratureConfig

log = logging.getLogger(__name__)

ALIASING_TOL = 1e-10
DEFAULT_FAMILIES = tuple((kind, d) for kind in (POLYNOMIAL, MOEBIUS) for d in (1, 2, 4, 8))


@dataclass(frozen=True)
class OptimizerSettings:
    """Knobs of the multi-start search.

    ``disc_radius`` is the definition radius given to candidate discs; the
    image of both ``|t| = 1`` and ``|t| = disc_radius`` must stay strictly
    inside the domain.
    """

    families: tuple = DEFAULT_FAMILIES
    restarts: int = 8
    max_fev: int = 2000
    penalty: float = 1e6
    seed: int = 0
    n_circle: int = 256
    disc_radius: float = 1.001
    xatol: float = 1e-7
    fatol: float = 1e-10

    def __post_init__(self):
        fams = tuple((str(k), int(d)) for k, d in self.families)
        for k, d in fams:
            if k not in (POLYNOMIAL, MOEBIUS) or d < 1:
                raise ValueError(f"bad disc family {(k, d)!r}")
        object.__setattr__(self, "families", fams)
        if self.restarts < 1 or self.max_fev < 1:
            raise ValueError("restarts and max_fev must be positive")
        if not self.disc_radius > 1:
            raise ValueError("disc_radius must exceed 1")

    @property
    def quadrature(self) -> QuadratureConfig:
        return QuadratureConfig(n_circle=self.n_circle)

    def to_json(self):
        return {"families": [list(f) for f in self.families], "restarts": self.restarts,
                "max_fev": self.max_fev, "penalty": self.penalty, "seed": str(self.seed),
                "n_circle": self.n_circle, "disc_radius": self.disc_radius,
                "xatol": self.xatol, "fatol": self.fatol}


@dataclass
class EnvelopeEstimate:
    value: ExtReal
    best_disc: AnalyticDisc
    trace: list = field(default_factory=list)
    starts_used: int = 0
    feasibility_margin: float = float("nan")
    n_evaluations: int = 0
    best_family: tuple | None = None

    def __float__(self):
        return self.value.value


@dataclass
class PointError:
    point: np.ndarray
    error: Exception


def feasibility_margin(f: AnalyticDisc, dom: DomainSpec, n_circle: int) -> float:
    """Smallest signed distance to the complement over ``|t| = 1`` and ``|t| = r``."""
    # stay a hair inside the definition radius so evaluation is legal
    r = f.radius * (1 - 1e-12)
    inner = dom.signed_distance(circle_values(f, 2 * n_circle))
    outer = dom.signed_distance(circle_values(f, 2 * n_circle, radius=r))
    return float(min(inner.min(), outer.min()))


def embed_disc(f: AnalyticDisc, template: DiscTemplate):
    """Parameters of ``f`` inside a larger family, or ``None`` if it does not fit."""
    if f.degree == 0 or f.degree > template.degree:
        return None
    if f.kind == MOEBIUS and template.kind == POLYNOMIAL:
        return None
    coeffs = np.zeros((template.degree + 1, f.dim), dtype=complex)
    coeffs[: f.degree + 1] = f.coeffs
    g = AnalyticDisc(coeffs, kind=template.kind, warp=f.warp, radius=template.radius)
    return template.pack(g)


def warp_limit(n_circle: int, tol: float = ALIASING_TOL) -> float:
    """Largest ``|c|`` whose warp the ``n_circle``-node rule still resolves.

    The trapezoid error on ``m_c`` decays like ``|c|**n_circle``; beyond this
    the optimizer can exploit aliasing and report values below the true
    functional.
    """
    return float(tol ** (1.0 / n_circle))


def _family_key(kind, degree):
    return (0 if kind == POLYNOMIAL else 1) * 1000 + degree


class _Objective:
    """Penalized functional with bookkeeping of the best strictly feasible disc."""

    def __init__(self, template, omega, w, dom, opt, ceiling, counter):
        self.template = template
        self.omega, self.w, self.dom, self.opt = omega, w, dom, opt
        self.q = opt.quadrature
        self.ceiling = ceiling
        self.counter = counter
        self.best = (np.inf, None, None)
        self.c_max = warp_limit(opt.n_circle)

    def __call__(self, theta):
        self.counter["fev"] += 1
        try:
            f = self.template.unpack(theta)
        except PlurienvError:
            return self.ceiling + self.opt.penalty
        margin = feasibility_margin(f, self.dom, self.opt.n_circle)
        if f.kind == MOEBIUS:
            margin = min(margin, self.c_max - abs(f.warp))
        value = np.nan
        try:
            res = omega_functional(self.omega, self.w, f, self.q)
            if res.reliable:
                value = res.value.value
        except (InfeasibleDiscError, SingularCenterError):
            pass
        ok = np.isfinite(value)
        if margin > 0 and ok:
            if value < self.best[0]:
                self.best = (value, f, margin)
                self.counter["trace"].append((self.counter["fev"], value))
            return value
        depth = max(-margin, 0.0) + 1e-9
        base = value if ok else self.ceiling
        return base + self.opt.penalty * depth


def envelope_at(x, omega: CurrentSpec, w: Weight, dom: DomainSpec,
                opt: OptimizerSettings = OptimizerSettings()) -> EnvelopeEstimate:
    """Best (smallest) functional value found over discs centered at ``x``.

    The constant disc is always a candidate, so the result never exceeds
    the weight at ``x``. The value is an upper bound for the envelope.
    """
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    if not dom.contains(x):
        raise DomainError(f"point {x} is not in the domain")
    if omega.in_singular_set(x):
        raise SingularCenterError(f"point {x} lies in sing(omega)")
    q = opt.quadrature
    dist = float(dom.signed_distance(x))
    const = constant_disc(x, radius=opt.disc_radius)
    counter = {"fev": 0, "trace": []}

    best_value, best_disc, best_family = np.inf, None, None
    cres = omega_functional(omega, w, const, q)
    if cres.reliable:
        best_value, best_disc = cres.value.value, const
        counter["trace"].append((0, best_value))
    ceiling = best_value
    if not np.isfinite(ceiling):
        ceiling = combined_weight(w, x).value
    if not np.isfinite(ceiling):
        ceiling = 0.0

    scale = 0.5 * dist
    starts = 0
    for kind, degree in opt.families:
        template = DiscTemplate(dim=x.size, kind=kind, degree=degree, center=tuple(x),
                                radius=opt.disc_radius)
        rng = np.random.default_rng([int(opt.seed), _family_key(kind, degree)])
        obj = _Objective(template, omega, w, dom, opt, ceiling, counter)
        n_coef = 2 * x.size * degree
        step = scale / np.sqrt(n_coef)
        seeds = []
        warm = embed_disc(best_disc, template) if best_disc is not None else None
        if warm is not None:
            seeds.append((warm, 0.1 * step))
        for _ in range(opt.restarts):
            theta0 = np.zeros(template.n_params)
            theta0[:n_coef] = rng.normal(0.0, step, n_coef)
            if kind == MOEBIUS:
                c = rng.normal(0.0, 0.5, 2)
                c *= min(1.0, 0.9 / max(np.hypot(*c), 1e-12))
                theta0[-2:] = c
            seeds.append((theta0, step))
        for theta0, h in seeds:
            starts += 1
            steps = np.full(template.n_params, h)
            if kind == MOEBIUS:
                steps[-2:] = 0.25 if h == step else 0.02
            simplex = np.vstack([theta0, theta0 + np.diag(steps)])
            minimize(obj, theta0, method="Nelder-Mead",
                     options={"maxfev": opt.max_fev, "xatol": opt.xatol, "fatol": opt.fatol,
                              "initial_simplex": simplex, "adaptive": template.n_params > 4})
        if obj.best[0] < best_value:
            best_value, best_disc, best_family = obj.best[0], obj.best[1], (kind, degree)

    if best_disc is None:
        raise OptimizerExhaustedError(f"no feasible disc found at {x}")
    # re-evaluate so the reported value is exactly the functional of best_disc
    final = omega_functional(omega, w, best_disc, q).value
    margin = dist if best_disc.degree == 0 else feasibility_margin(best_disc, dom, opt.n_circle)
    log.debug("envelope at %s: %.6g after %d evaluations", x, final.value, counter["fev"])
    return EnvelopeEstimate(value=final, best_disc=best_disc, trace=counter["trace"],
                            starts_used=starts, feasibility_margin=margin,
                            n_evaluations=counter["fev"], best_family=best_family)


def envelope_field(points, omega: CurrentSpec, w: Weight, dom: DomainSpec,
                   opt: OptimizerSettings = OptimizerSettings()) -> list:
    """:func:`envelope_at` for each point; failures become :class:`PointError` entries."""
    out = []
    for p in points:
        try:
            out.append(envelope_at(p, omega, w, dom, opt))
        except PlurienvError as exc:
            out.append(PointError(np.atleast_1d(np.asarray(p, dtype=complex)), exc))
    return out
