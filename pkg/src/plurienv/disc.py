"""Closed analytic discs: polynomial maps, optionally precomposed with a
disc automorphism ``m_c(t) = (t + c) / (1 + conj(c) t)``."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, DomainError

POLYNOMIAL = "polynomial"
MOEBIUS = "moebius"
KINDS = (POLYNOMIAL, MOEBIUS)

DEFAULT_RADIUS = 1.05
DEFAULT_N_CIRCLE = 256
WARP_CLAMP = 1.0 - 1e-6


class AnalyticDisc:
    """A holomorphic map from ``D_r`` (``r > 1``) into ``C^n``.

    Parameters
    ----------
    coeffs : array_like, shape (d + 1, n)
        Polynomial coefficients ``a_0 .. a_d``; row ``k`` multiplies ``t**k``.
    kind : {"polynomial", "moebius"}
    warp : complex
        Automorphism parameter ``c`` (moebius kind only), ``|c| < 1``.
    radius : float
        Definition radius. Shrunk automatically so that ``|c| r < 1``.
    """

    __slots__ = ("coeffs", "kind", "warp", "radius", "_circle_cache")

    def __init__(self, coeffs, kind=POLYNOMIAL, warp=0.0, radius=DEFAULT_RADIUS):
        a = np.asarray(coeffs, dtype=complex)
        if a.ndim == 1:
            a = a[:, None]
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise DimensionMismatch("coefficients must have shape (degree + 1, n)")
        if not np.all(np.isfinite(a)):
            raise ValueError("disc coefficients must be finite")
        if kind not in KINDS:
            raise ValueError(f"unknown disc kind {kind!r}")
        r = float(radius)
        c = complex(warp) if kind == MOEBIUS else 0.0j
        if abs(c) >= 1.0:
            raise DomainError(f"warp parameter |c| = {abs(c)} must be < 1")
        if abs(c) * r >= 1.0:
            r = 0.5 * (1.0 + 1.0 / abs(c))
        if not r > 1.0:
            raise DomainError("definition radius must exceed 1")
        a.setflags(write=False)
        object.__setattr__(self, "coeffs", a)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "warp", c)
        object.__setattr__(self, "radius", r)
        object.__setattr__(self, "_circle_cache", {})

    def __setattr__(self, name, value):
        raise AttributeError("AnalyticDisc is immutable")

    @property
    def dim(self) -> int:
        return self.coeffs.shape[1]

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def center(self) -> np.ndarray:
        return eval_disc(self, 0.0)

    def _inner(self, t):
        if self.kind == MOEBIUS:
            c = self.warp
            return (t + c) / (1.0 + np.conj(c) * t)
        return t

    def _poly(self, s):
        out = np.zeros(np.shape(s) + (self.dim,), dtype=complex)
        s = np.asarray(s)[..., None]
        for a_k in self.coeffs[::-1]:
            out = out * s + a_k
        return out

    def _dpoly(self, s):
        d = self.degree
        out = np.zeros(np.shape(s) + (self.dim,), dtype=complex)
        if d == 0:
            return out
        s = np.asarray(s)[..., None]
        for k in range(d, 0, -1):
            out = out * s + k * self.coeffs[k]
        return out

    def __call__(self, t):
        return eval_disc(self, t)

    def __eq__(self, other):
        if not isinstance(other, AnalyticDisc):
            return NotImplemented
        return (self.kind == other.kind and self.coeffs.shape == other.coeffs.shape
                and np.array_equal(self.coeffs, other.coeffs)
                and self.warp == other.warp and self.radius == other.radius)

    def __hash__(self):
        return hash((self.kind, self.coeffs.tobytes(), self.warp, self.radius))

    def __repr__(self):
        extra = f", warp={self.warp:.4g}" if self.kind == MOEBIUS else ""
        return f"AnalyticDisc(n={self.dim}, degree={self.degree}, kind={self.kind}{extra}, r={self.radius:.4g})"

    def to_json(self) -> dict:
        out = {"kind": self.kind, "radius": self.radius,
               "coeffs": [[[v.real, v.imag] for v in row] for row in self.coeffs]}
        if self.kind == MOEBIUS:
            out["warp"] = [self.warp.real, self.warp.imag]
        return out


def _check_domain(f: AnalyticDisc, t):
    t = np.asarray(t, dtype=complex)
    if np.any(np.abs(t) >= f.radius):
        raise DomainError(f"|t| must be < {f.radius} (definition radius)")
    return t


def eval_disc(f: AnalyticDisc, t):
    """``f(t)``; returns shape ``t.shape + (n,)``."""
    t = _check_domain(f, t)
    return f._poly(f._inner(t))


def disc_derivative(f: AnalyticDisc, t):
    """Componentwise complex derivative ``f'(t)``."""
    t = _check_domain(f, t)
    s = f._inner(t)
    dp = f._dpoly(s)
    if f.kind == MOEBIUS:
        c = f.warp
        dm = (1.0 - abs(c) ** 2) / (1.0 + np.conj(c) * t) ** 2
        dp = dp * np.asarray(dm)[..., None]
    return dp


@lru_cache(maxsize=64)
def circle_nodes(N: int, offset: float = 0.0) -> np.ndarray:
    """``exp(2 pi i (j + offset) / N)`` for ``j = 0..N-1`` (read-only, cached)."""
    t = np.exp(2j * np.pi * (np.arange(N) + offset) / N)
    t.setflags(write=False)
    return t


def circle_values(f: AnalyticDisc, N: int, offset: float = 0.0, radius: float = 1.0) -> np.ndarray:
    """``f`` on ``radius * circle_nodes(N, offset)``, memoized on the disc."""
    key = (N, offset, radius)
    cache = f._circle_cache
    if key not in cache:
        Z = eval_disc(f, radius * circle_nodes(N, offset))
        Z.setflags(write=False)
        cache[key] = Z
    return cache[key]


def boundary_samples(f: AnalyticDisc, N: int = DEFAULT_N_CIRCLE, offset: float = 0.0) -> np.ndarray:
    """Values of ``f`` at ``N`` equispaced points of the unit circle, shape ``(N, n)``.

    The plain mean of any function of these samples is the trapezoidal
    rule for the normalized arc-length integral over the circle.
    """
    if N < 4:
        raise ValueError("need at least 4 boundary samples")
    return circle_values(f, N, offset)


# constructors -------------------------------------------------------------

def constant_disc(x, radius=DEFAULT_RADIUS) -> AnalyticDisc:
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    return AnalyticDisc(x[None, :], radius=radius)


def linear_disc(x, b, radius=DEFAULT_RADIUS) -> AnalyticDisc:
    """``t -> x + b t``."""
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    return AnalyticDisc(np.stack([x, b]), radius=radius)


def moebius_disc(x, scale=1.0, radius=DEFAULT_RADIUS) -> AnalyticDisc:
    """One-variable automorphism ``t -> scale * (t + x') / (1 + conj(x') t)`` with center ``x``.

    With ``scale = 1`` this is the disc automorphism sending 0 to ``x``.
    """
    x = complex(x)
    c = x / scale
    return AnalyticDisc([[0.0], [scale]], kind=MOEBIUS, warp=c, radius=radius)


# optimizer parametrization -------------------------------------------------

@dataclass(frozen=True)
class DiscTemplate:
    """Fixes dimension, kind and degree of a disc family.

    With ``center`` set, ``a_0`` is not a free parameter: it is solved from
    ``f(0) = center``.
    """

    dim: int
    kind: str = POLYNOMIAL
    degree: int = 1
    center: tuple | None = None
    radius: float = DEFAULT_RADIUS

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown disc kind {self.kind!r}")
        if self.degree < 0 or self.dim < 1:
            raise ValueError("degree must be >= 0 and dim >= 1")
        if self.center is not None:
            c = tuple(complex(v) for v in np.atleast_1d(np.asarray(self.center, dtype=complex)))
            if len(c) != self.dim:
                raise DimensionMismatch("center dimension does not match template")
            object.__setattr__(self, "center", c)

    @property
    def n_params(self) -> int:
        first = 1 if self.center is not None else 0
        k = 2 * self.dim * (self.degree + 1 - first)
        return k + (2 if self.kind == MOEBIUS else 0)

    def pack(self, f: AnalyticDisc) -> np.ndarray:
        return parameter_pack(f, self)

    def unpack(self, theta) -> AnalyticDisc:
        return parameter_unpack(theta, self)


def _interleave(z):
    z = np.asarray(z, dtype=complex).ravel()
    out = np.empty(2 * z.size)
    out[0::2] = z.real
    out[1::2] = z.imag
    return out


def parameter_pack(f: AnalyticDisc, template: DiscTemplate) -> np.ndarray:
    """Real parameter vector (real and imaginary parts interleaved)."""
    if f.dim != template.dim or f.kind != template.kind or f.degree != template.degree:
        raise DimensionMismatch(f"{f!r} does not match template {template}")
    first = 1 if template.center is not None else 0
    theta = _interleave(f.coeffs[first:])
    if template.kind == MOEBIUS:
        theta = np.concatenate([theta, [f.warp.real, f.warp.imag]])
    return theta


def parameter_unpack(theta, template: DiscTemplate) -> AnalyticDisc:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (template.n_params,):
        raise DimensionMismatch(f"expected {template.n_params} parameters, got {theta.shape}")
    n, d = template.dim, template.degree
    c = 0.0j
    if template.kind == MOEBIUS:
        c = complex(theta[-2], theta[-1])
        if abs(c) > WARP_CLAMP:
            c *= WARP_CLAMP / abs(c)
        theta = theta[:-2]
    z = theta[0::2] + 1j * theta[1::2]
    if template.center is None:
        coeffs = z.reshape(d + 1, n)
    else:
        higher = z.reshape(d, n)
        x = np.asarray(template.center)
        powers = c ** np.arange(1, d + 1)
        a0 = x - powers @ higher if d else x
        coeffs = np.vstack([a0[None, :], higher])
    return AnalyticDisc(coeffs, kind=template.kind, warp=c, radius=template.radius)
