"""Radial convolution smoothing of weights and the approximation checks
that go with it."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy import integrate
from scipy.special import gamma

from .domains import DomainSpec
from .envelope import EnvelopeEstimate, OptimizerSettings, envelope_at
from .errors import DomainError, PlurienvError
from .potentials import CurrentSpec, Weight

NORMALIZATION_TOL = 1e-6
CHUNK_BYTES = 96 * 1024


def _bump(r2):
    r2 = np.asarray(r2, dtype=float)
    out = np.zeros_like(r2)
    inside = r2 < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
    return out


def _sphere_area(d):
    return 2 * np.pi ** (d / 2) / gamma(d / 2)


@lru_cache(maxsize=None)
def kernel_constants(n: int):
    """``(c_n, s_n)``: normalizer of the bump on the unit ball of ``R^{2n}`` and
    its radial second moment ``int |y|^2 rho``."""
    d = 2 * n
    mass, _ = integrate.quad(lambda r: r ** (d - 1) * np.exp(-1 / (1 - r * r)), 0, 1, epsabs=0, epsrel=1e-13)
    c = 1.0 / (_sphere_area(d) * mass)
    mom, _ = integrate.quad(lambda r: r ** (d + 1) * np.exp(-1 / (1 - r * r)), 0, 1, epsabs=0, epsrel=1e-13)
    return c, c * _sphere_area(d) * mom


def kernel_mass(n: int, nodes: int = 400) -> float:
    """Total mass of the normalized kernel by Gauss-Legendre in the radius
    (independent of the adaptive rule used for the normalizer)."""
    c, _ = kernel_constants(n)
    d = 2 * n
    x, wts = np.polynomial.legendre.leggauss(nodes)
    r = 0.5 * (x + 1)
    return float(c * _sphere_area(d) * 0.5 * np.sum(wts * r ** (d - 1) * _bump(r * r)))


def check_normalization(n: int) -> float:
    m = kernel_mass(n)
    if abs(m - 1.0) > NORMALIZATION_TOL:
        raise RuntimeError(f"mollifier kernel mass {m} is not 1 within {NORMALIZATION_TOL}")
    return m


@dataclass(frozen=True)
class MollifierConfig:
    delta: float
    n_quad: int = 21

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if self.n_quad < 3:
            raise ValueError("n_quad must be at least 3")

    def nodes_per_axis(self, n: int) -> int:
        return self.n_quad if n == 1 else min(self.n_quad, 11)


@lru_cache(maxsize=32)
def ball_rule(n: int, per_axis: int):
    """Midpoint tensor rule for the kernel on the unit ball of C^n.

    Returns complex offsets ``y`` (K, n) and weights summing to 1.
    """
    check_normalization(n)
    c, _ = kernel_constants(n)
    g = (np.arange(per_axis) + 0.5) * (2.0 / per_axis) - 1.0
    mesh = np.meshgrid(*([g] * (2 * n)), indexing="ij")
    P = np.stack([m.ravel() for m in mesh], axis=-1)
    r2 = np.sum(P ** 2, axis=-1)
    keep = r2 < 1.0
    P, r2 = P[keep], r2[keep]
    w = c * _bump(r2) * (2.0 / per_axis) ** (2 * n)
    w = w / w.sum()
    Y = P[:, 0::2] + 1j * P[:, 1::2]
    Y.setflags(write=False)
    w.setflags(write=False)
    return Y, w


def discrete_second_moment(n: int, per_axis: int) -> float:
    Y, w = ball_rule(n, per_axis)
    return float(np.sum(w * np.sum(np.abs(Y) ** 2, axis=-1)))


class MollifiedWeight:
    """``phi_delta(x) = int phi(x - delta y) rho(y) dy`` as a weight object.

    Samples where the weight is ``-inf`` are dropped and the remaining
    kernel weights renormalized.
    """

    def __init__(self, w: Weight, cfg: MollifierConfig):
        self.w = w
        self.cfg = cfg
        n = w.dim or 1
        self._n = n
        self.Y, self.kw = ball_rule(n, cfg.nodes_per_axis(n))

    @property
    def dim(self):
        return self.w.dim

    def boundary_values(self, Z):
        Z = np.atleast_2d(np.asarray(Z, dtype=complex))
        # keep temporaries under glibc's mmap threshold; large ones are
        # returned to the OS and page-faulted back in on every call
        step = max(1, CHUNK_BYTES // (16 * self.Y.size))
        if len(Z) > step:
            parts = [self._values(Z[i:i + step]) for i in range(0, len(Z), step)]
            return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])
        return self._values(Z)

    def _values(self, Z):
        S = Z[:, None, :] - self.cfg.delta * self.Y[None, :, :]
        v, bad = self.w.boundary_values(S.reshape(-1, Z.shape[-1]))
        v = v.reshape(S.shape[:2])
        if not bad.any():
            return v @ self.kw, np.zeros(len(Z), dtype=bool)
        bad = bad.reshape(S.shape[:2])
        kw = np.where(bad, 0.0, self.kw[None, :])
        mass = kw.sum(axis=1)
        none = mass == 0
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.sum(np.where(bad, 0.0, v) * kw, axis=1) / mass
        out[none] = np.nan
        return out, none


def mollify_value(w: Weight, x, m: MollifierConfig, dom: DomainSpec | None = None) -> float:
    """``phi_delta(x)``; with ``dom`` given, ``x`` must lie in ``X_delta``."""
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    if dom is not None and not dom.signed_distance(x) > m.delta:
        raise DomainError(f"{x} is not in X_delta for delta={m.delta}")
    v, bad = MollifiedWeight(w, m).boundary_values(x[None, :])
    if bad[0]:
        raise DomainError("weight is -inf on the whole mollifier support")
    return float(v[0])


@dataclass
class MollifyRow:
    delta: float
    value: float
    base: float
    lower_bound_ok: bool
    ordering_ok: bool
    error: str = ""

    @property
    def gap(self) -> float:
        return self.value - self.base


@dataclass
class MollifyReport:
    x: np.ndarray
    base: EnvelopeEstimate
    rows: list = field(default_factory=list)
    tolerance: float = 0.01
    limit_tolerance: float = 0.05

    @property
    def lower_bound_holds(self) -> bool:
        return all(r.lower_bound_ok for r in self.rows)

    @property
    def limit_holds(self) -> bool:
        return bool(self.rows) and abs(self.rows[-1].gap) <= self.limit_tolerance

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            write_report_rows(fh, self.rows)


def write_report_rows(fh, rows):
    wr = csv.writer(fh)
    wr.writerow(["delta", "eh_delta", "eh", "gap", "lower_bound_ok", "ordering_ok", "error"])
    for r in rows:
        wr.writerow([f"{r.delta:.17g}", f"{r.value:.17g}", f"{r.base:.17g}", f"{r.gap:.17g}",
                     int(r.lower_bound_ok), int(r.ordering_ok), r.error])


def mollified_envelope_check(w: Weight, dom: DomainSpec, x, deltas,
                             opt: OptimizerSettings = OptimizerSettings(),
                             omega: CurrentSpec | None = None, n_quad: int = 21,
                             tolerance: float = 0.01, limit_tolerance: float = 0.05,
                             base: EnvelopeEstimate | None = None) -> MollifyReport:
    """Envelopes of ``phi_delta`` (discs in ``X_delta``) against the envelope of ``phi``.

    For each delta, records whether ``EH_phi(x) <= EH_{phi_delta}(x) + tolerance``
    and whether the values are nonincreasing as delta shrinks (up to
    ``2 * tolerance``). ``limit_holds`` checks the smallest delta against
    ``limit_tolerance``.
    """
    omega = omega or CurrentSpec()
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    deltas = [float(d) for d in deltas]
    if deltas and not dom.signed_distance(x) > max(deltas):
        raise DomainError(f"{x} is not in X_delta for delta={max(deltas)}")
    if base is None:
        base = envelope_at(x, omega, w, dom, opt)
    report = MollifyReport(x, base, tolerance=tolerance, limit_tolerance=limit_tolerance)
    prev = np.inf
    for d in deltas:
        try:
            est = envelope_at(x, omega, MollifiedWeight(w, MollifierConfig(d, n_quad)), dom.shrink(d), opt)
            v = est.value.value
            row = MollifyRow(d, v, base.value.value, base.value.value <= v + tolerance,
                             v <= prev + 2 * tolerance)
            prev = v
        except PlurienvError as exc:
            row = MollifyRow(d, np.nan, base.value.value, False, False, str(exc))
        report.rows.append(row)
    return report
