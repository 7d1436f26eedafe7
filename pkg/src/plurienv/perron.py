"""Largest plurisubharmonic minorant of an obstacle on a lattice.

The discrete scheme is the monotone Jacobi iteration

    u_{k+1}(z) = min( g(z), min_w mean_theta u_k(z + rho e^{i theta} w) )

over a fixed set of complex directions ``w``, with multilinear
interpolation between lattice nodes. Starting from ``u_0 = g`` the iterates
decrease nodewise; the limit over-estimates the true minorant and improves
under refinement. Lattice nodes outside the domain are ghost nodes frozen at
the obstacle value of the nearest boundary point.
"""

from __future__ import annotations

import csv
import itertools
import json
import logging
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .domains import DomainSpec
from .errors import OracleIllPosedError
from .potentials import CurrentSpec, Weight

log = logging.getLogger(__name__)

EXCEPTIONAL_FRACTION = 0.01


@dataclass(frozen=True)
class GridSettings:
    res: int = 128
    n_dirs: int | None = None
    rho: float = 2.0
    n_circle: int = 16
    tol: float = 1e-6
    max_iter: int = 20000
    checkpoint_every: int = 50

    def __post_init__(self):
        if self.res < 4:
            raise ValueError("need at least 4 grid points per axis")
        if not self.rho > 0:
            raise ValueError("rho must be positive")

    def directions_for(self, n: int) -> int:
        if n == 1:
            return 1
        return self.n_dirs if self.n_dirs is not None else 8

    def to_json(self):
        return asdict(self)


@dataclass
class GridFunction:
    """Values of a minorant on the lattice (ghost nodes included).

    ``values`` has shape ``lattice_shape`` (``2n`` real axes, ordered
    ``Re z_1, Im z_1, Re z_2, ...``); ``inside`` marks nodes in the domain.
    """

    dom: DomainSpec
    resolution: int
    origin: np.ndarray
    spacing: np.ndarray
    values: np.ndarray
    inside: np.ndarray
    iteration_count: int = 0
    residual: float = float("inf")
    residual_history: list = field(default_factory=list)
    n_exceptional: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.dom.dim

    def node_points(self) -> np.ndarray:
        """Complex coordinates of all lattice nodes, shape ``lattice_shape + (n,)``."""
        axes = [self.origin[a] + self.spacing[a] * np.arange(s)
                for a, s in enumerate(self.values.shape)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([mesh[2 * j] + 1j * mesh[2 * j + 1] for j in range(self.dim)], axis=-1)

    def interpolate(self, z):
        """Multilinear interpolation at points ``z`` of shape ``(..., n)``."""
        z = np.asarray(z, dtype=complex)
        single = z.ndim == 1
        Z = np.atleast_2d(z)
        idx, wts = _interp_stencil(_realify(Z), self.origin, self.spacing, self.values.shape)
        out = np.sum(self.values.ravel()[idx] * wts, axis=-1)
        return float(out[0]) if single else out

    def interior_values(self, radius_fraction: float = 1.0):
        """``(points, values)`` for in-domain nodes within a shrunk copy of the domain."""
        pts = self.node_points()
        keep = self.inside.copy()
        if radius_fraction < 1.0:
            shrink = self.dom.inradius * (1.0 - radius_fraction)
            keep &= self.dom.signed_distance(pts) > shrink
        return pts[keep], self.values[keep]

    def metadata(self) -> dict:
        return {
            "schema": "plurienv/1",
            "domain": self.dom.to_json(),
            "resolution": self.resolution,
            "origin": self.origin.tolist(),
            "spacing": self.spacing.tolist(),
            "lattice_shape": list(self.values.shape),
            "iteration_count": self.iteration_count,
            "residual": self.residual,
            "residual_history": self.residual_history,
            "n_exceptional": self.n_exceptional,
            **self.meta,
        }

    def write(self, csv_path, json_path=None):
        """CSV of in-domain nodes (coordinates + value) and a JSON metadata sidecar."""
        csv_path = Path(csv_path)
        json_path = Path(json_path) if json_path else csv_path.with_suffix(".json")
        pts, vals = self.interior_values()
        with open(csv_path, "w", newline="") as fh:
            wr = csv.writer(fh)
            header = []
            for j in range(self.dim):
                header += [f"re_z{j + 1}", f"im_z{j + 1}"]
            wr.writerow(header + ["value"])
            for p, v in zip(pts, vals):
                row = []
                for c in p:
                    row += [f"{c.real:.17g}", f"{c.imag:.17g}"]
                wr.writerow(row + [f"{v:.17g}"])
        json_path.write_text(json.dumps(self.metadata(), indent=2))
        return csv_path, json_path


def _realify(Z):
    Z = np.asarray(Z, dtype=complex)
    out = np.empty(Z.shape[:-1] + (2 * Z.shape[-1],))
    out[..., 0::2] = Z.real
    out[..., 1::2] = Z.imag
    return out


def _interp_stencil(P, origin, h, shape):
    """Flat corner indices and multilinear weights for real points ``P`` (K, D)."""
    P = np.asarray(P, dtype=float)
    D = P.shape[-1]
    s = (P - origin) / h
    base = np.floor(s).astype(np.int64)
    shape_arr = np.asarray(shape)
    base = np.clip(base, 0, shape_arr - 2)
    frac = np.clip(s - base, 0.0, 1.0)
    strides = np.array([int(np.prod(shape[a + 1:])) for a in range(D)], dtype=np.int64)
    corners = np.array(list(itertools.product((0, 1), repeat=D)), dtype=np.int64)  # (2^D, D)
    idx = (base[:, None, :] + corners[None, :, :]) @ strides
    w = np.prod(np.where(corners[None, :, :] == 1, frac[:, None, :], 1.0 - frac[:, None, :]), axis=-1)
    return idx, w


def complex_directions(n: int, n_dirs: int) -> np.ndarray:
    """Deterministic unit vectors in C^n spanning distinct complex lines."""
    if n == 1:
        return np.ones((1, 1), dtype=complex)
    dirs = [np.eye(n, dtype=complex)[j] for j in range(n)]
    phases = [1, 1j, -1, -1j]
    for j, k in itertools.combinations(range(n), 2):
        for ph in phases:
            v = np.zeros(n, dtype=complex)
            v[j], v[k] = 1.0, ph
            dirs.append(v / math.sqrt(2))
    rng = np.random.default_rng(20240611)
    while len(dirs) < n_dirs:
        v = rng.normal(size=n) + 1j * rng.normal(size=n)
        dirs.append(v / np.linalg.norm(v))
    return np.array(dirs[:n_dirs])


def _lattice(dom: DomainSpec, res: int, pad: int):
    n = dom.dim
    half = dom.half_extent()
    origin = np.empty(2 * n)
    h = np.empty(2 * n)
    for j in range(n):
        step = 2 * half[j] / (res - 1)
        c = dom.center[j]
        origin[2 * j] = c.real - half[j] - pad * step
        origin[2 * j + 1] = c.imag - half[j] - pad * step
        h[2 * j] = h[2 * j + 1] = step
    shape = (res + 2 * pad,) * (2 * n)
    return origin, h, shape


def _average_operators(points, free, directions, rho, m, origin, h, shape):
    n_total = int(np.prod(shape))
    theta = 2 * np.pi * np.arange(m) / m
    Zf = points.reshape(-1, points.shape[-1])[free.ravel()]
    rows = np.repeat(np.arange(Zf.shape[0]), m)
    ops = []
    for w in directions:
        S = Zf[:, None, :] + rho * np.exp(1j * theta)[None, :, None] * w[None, None, :]
        idx, wts = _interp_stencil(_realify(S.reshape(-1, S.shape[-1])), origin, h, shape)
        k = idx.shape[1]
        M = sp.csr_matrix((wts.ravel() / m, (np.repeat(rows, k), idx.ravel())),
                          shape=(Zf.shape[0], n_total))
        M.sum_duplicates()
        ops.append(M)
    return ops


def largest_psh_minorant(obstacle, dom: DomainSpec, settings: GridSettings = GridSettings()) -> GridFunction:
    """Monotone obstacle iteration for the largest psh minorant of ``obstacle``.

    Parameters
    ----------
    obstacle : callable
        Maps complex points of shape ``(K, n)`` to real values (``-inf``
        allowed on a small exceptional set).
    dom : DomainSpec
    settings : GridSettings
        ``rho`` is measured in grid spacings.
    """
    n = dom.dim
    if n not in (1, 2):
        raise ValueError("the grid oracle supports n = 1 and n = 2 only")
    res = settings.res
    pad = int(math.ceil(settings.rho)) + 2
    origin, h, shape = _lattice(dom, res, pad)
    gf = GridFunction(dom, res, origin, h, np.zeros(shape), np.zeros(shape, dtype=bool))
    pts = gf.node_points()
    inside = dom.signed_distance(pts) > 0
    gf.inside = inside

    flat = pts.reshape(-1, n)
    # ghost nodes carry the larger of the obstacle there and at the nearest
    # boundary point; raising ghosts only raises the (over-)estimate
    proj = np.where(inside.reshape(-1, 1), flat, dom.project_inside(flat, eps=1e-9 * dom.inradius))
    g = np.asarray(obstacle(proj), dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        g_out = np.asarray(obstacle(flat), dtype=float)
    g = np.where(inside.ravel(), g, np.fmax(g, g_out))
    bad = ~np.isfinite(g) & ~(g == np.inf)
    n_bad_inside = int(np.count_nonzero(bad & inside.ravel()))
    if n_bad_inside > EXCEPTIONAL_FRACTION * inside.sum():
        raise OracleIllPosedError(
            f"obstacle is -inf/undefined on {n_bad_inside} of {int(inside.sum())} grid nodes")
    if bad.any():
        floor = np.min(g[np.isfinite(g)])
        g = np.where(bad, floor, g)

    rho = settings.rho * h[0]
    dirs = complex_directions(n, settings.directions_for(n))
    ops = _average_operators(pts, inside, dirs, rho, settings.n_circle, origin, h, shape)
    free = inside.ravel()
    g_free = g[free]
    u = g.copy()
    history = []
    residual = np.inf
    k = 0
    while k < settings.max_iter:
        avg = ops[0] @ u
        for M in ops[1:]:
            np.minimum(avg, M @ u, out=avg)
        new = np.minimum(g_free, avg)
        with np.errstate(invalid="ignore"):
            residual = float(np.max(np.abs(u[free] - new)))
        u[free] = new
        k += 1
        if k % settings.checkpoint_every == 0 or residual < settings.tol:
            history.append((k, residual))
        if residual < settings.tol:
            break
    log.debug("perron iteration: %d sweeps, residual %.3g", k, residual)
    gf.values = u.reshape(shape)
    gf.iteration_count = k
    gf.residual = residual
    gf.residual_history = history
    gf.n_exceptional = int(np.count_nonzero(bad))
    gf.meta = {"settings": settings.to_json(), "rho_abs": rho, "n_dirs": len(dirs)}
    return gf


def obstacle_for(omega: CurrentSpec, w: Weight):
    """``(phi1 + psi1) - (phi2 + psi2)`` as a batch callable."""
    def g(Z):
        a = w.phi1.value(Z) + omega.psi1.value(Z)
        b = w.phi2.value(Z) + omega.psi2.value(Z)
        with np.errstate(invalid="ignore"):
            return a - b
    return g


def omega_envelope_oracle(omega: CurrentSpec, w: Weight, dom: DomainSpec,
                          settings: GridSettings = GridSettings()) -> GridFunction:
    """Grid estimate of ``sup{u omega-psh : u <= phi}``.

    Solves the classical minorant problem for ``phi + psi`` and subtracts the
    potential ``psi = psi1 - psi2`` nodewise.
    """
    gf = largest_psh_minorant(obstacle_for(omega, w), dom, settings)
    if omega.is_zero:
        return gf
    pts = gf.node_points().reshape(-1, dom.dim)
    at = np.where(gf.inside.reshape(-1, 1), pts, dom.project_inside(pts, eps=1e-9 * dom.inradius))
    with np.errstate(invalid="ignore"):
        psi = omega.psi1.value(at) - omega.psi2.value(at)
        gf.values = gf.values - psi.reshape(gf.values.shape)
    return gf
