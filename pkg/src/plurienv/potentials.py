"""Closed expression algebra for scalar fields on C^n.

Every node evaluates on batches of points ``Z`` of shape ``(..., n)`` and
knows its holomorphic gradient ``de/dz_j`` and its complex Hessian. The
Hessian convention is ``H[j, k] = d^2 e / (dzbar_j dz_k)`` so that the Levi
form in the direction ``w`` is ``w^* H w`` and affine precomposition acts by
the congruence ``A^* H A``.

Plurisubharmonicity is tracked structurally (``expr.psh``): it holds for
constants, moduli squared and log-moduli of affine maps, and is preserved by
sums, non-negative scaling, max, smooth-max and affine precomposition.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NonDifferentiableError
from .extreal import NEG_INF_SENTINEL, ExtReal

DEFAULT_SMOOTH_EPS = 1e-3


def _as_points(Z, dim):
    Z = np.asarray(Z, dtype=complex)
    if Z.ndim == 0:
        Z = Z.reshape(1)
    if dim is not None and Z.shape[-1] != dim:
        raise DimensionMismatch(f"expected points in C^{dim}, got trailing dimension {Z.shape[-1]}")
    return Z


def _merge_dims(*dims):
    known = {d for d in dims if d is not None}
    if len(known) > 1:
        raise DimensionMismatch(f"inconsistent dimensions {sorted(known)}")
    return known.pop() if known else None


class Expr:
    """Base node. Subclasses implement ``_value``, ``_grad`` and ``_hess``."""

    dim: int | None = None
    psh: bool = False

    def value(self, Z) -> np.ndarray:
        Z = _as_points(Z, self.dim)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            v = self._value(Z)
        if v.size == 0 or v.min() > NEG_INF_SENTINEL:
            return v
        return np.where(v <= NEG_INF_SENTINEL, -np.inf, v)

    def grad(self, Z) -> np.ndarray:
        Z = _as_points(Z, self.dim)
        return self._grad(Z)

    def hessian(self, Z) -> np.ndarray:
        Z = _as_points(Z, self.dim)
        return self._hess(Z)

    def __call__(self, z) -> ExtReal:
        """Evaluate at a single point and return an :class:`ExtReal`."""
        v = self.value(np.atleast_1d(np.asarray(z, dtype=complex)))
        return ExtReal(float(v))

    @property
    def declared_psh(self) -> bool:
        return self.psh

    @property
    def is_constant(self) -> bool:
        return False

    def __add__(self, other):
        return Sum(self, as_expr(other))

    def __radd__(self, other):
        return Sum(as_expr(other), self)

    def __sub__(self, other):
        return Diff(self, as_expr(other))

    def __rsub__(self, other):
        return Diff(as_expr(other), self)

    def __mul__(self, lam):
        return Scale(float(lam), self)

    __rmul__ = __mul__

    def __neg__(self):
        return Scale(-1.0, self)

    def to_json(self) -> dict:
        raise NotImplementedError


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    return Const(float(x))


def _zeros_grad(Z):
    return np.zeros(Z.shape, dtype=complex)


def _zeros_hess(Z):
    n = Z.shape[-1]
    return np.zeros(Z.shape[:-1] + (n, n), dtype=complex)


@dataclass(frozen=True, eq=False)
class Const(Expr):
    k: float

    psh = True

    @property
    def is_constant(self):
        return True

    def _value(self, Z):
        return np.full(Z.shape[:-1], float(self.k))

    def _grad(self, Z):
        return _zeros_grad(Z)

    def _hess(self, Z):
        return _zeros_hess(Z)

    def to_json(self):
        return {"op": "const", "value": self.k}

    def __repr__(self):
        return f"{self.k!r}"


@dataclass(frozen=True, eq=False)
class ModSq(Expr):
    """``|z_j|^2`` for one coordinate."""

    index: int

    psh = True

    def _value(self, Z):
        return np.abs(Z[..., self.index]) ** 2

    def _grad(self, Z):
        g = _zeros_grad(Z)
        g[..., self.index] = np.conj(Z[..., self.index])
        return g

    def _hess(self, Z):
        H = _zeros_hess(Z)
        H[..., self.index, self.index] = 1.0
        return H

    def to_json(self):
        return {"op": "modsq", "index": self.index}

    def __repr__(self):
        return f"|z{self.index}|^2"


@dataclass(frozen=True, eq=False)
class NormSq(Expr):
    """``|z|^2 = sum_j |z_j|^2``."""

    psh = True

    def _value(self, Z):
        return np.sum(Z.real ** 2 + Z.imag ** 2, axis=-1)

    def _grad(self, Z):
        return np.conj(Z)

    def _hess(self, Z):
        n = Z.shape[-1]
        return np.broadcast_to(np.eye(n, dtype=complex), Z.shape[:-1] + (n, n)).copy()

    def to_json(self):
        return {"op": "normsq"}

    def __repr__(self):
        return "|z|^2"


class LogAbs(Expr):
    """``log|a . z + b|``; equals ``-inf`` exactly on the affine zero set."""

    psh = True

    def __init__(self, a, b=0.0):
        self.a = np.atleast_1d(np.asarray(a, dtype=complex))
        self.b = complex(b)
        if not np.any(self.a != 0):
            raise ValueError("log-modulus needs a non-constant affine map")
        self.dim = self.a.size

    def affine(self, Z):
        return Z @ self.a + self.b

    def _value(self, Z):
        return np.log(np.abs(self.affine(Z)))

    def _check(self, ell):
        if np.any(ell == 0):
            raise NonDifferentiableError(f"{self!r} is singular at the requested point")

    def _grad(self, Z):
        ell = self.affine(Z)
        self._check(ell)
        return self.a / (2.0 * ell[..., None])

    def _hess(self, Z):
        self._check(self.affine(Z))
        return _zeros_hess(Z)

    def to_json(self):
        return {"op": "logabs", "affine": {"A": _cjson(self.a), "b": _cjson(self.b)}}

    def __repr__(self):
        return f"log|{np.array2string(self.a, precision=3)}.z + {self.b:.3g}|"


@dataclass(frozen=True, eq=False)
class Sum(Expr):
    left: Expr
    right: Expr

    def __post_init__(self):
        object.__setattr__(self, "dim", _merge_dims(self.left.dim, self.right.dim))
        object.__setattr__(self, "psh", self.left.psh and self.right.psh)

    @property
    def is_constant(self):
        return self.left.is_constant and self.right.is_constant

    def _value(self, Z):
        return self.left._value(Z) + self.right._value(Z)

    def _grad(self, Z):
        return self.left._grad(Z) + self.right._grad(Z)

    def _hess(self, Z):
        return self.left._hess(Z) + self.right._hess(Z)

    def to_json(self):
        return {"op": "sum", "args": [self.left.to_json(), self.right.to_json()]}

    def __repr__(self):
        return f"({self.left!r} + {self.right!r})"


@dataclass(frozen=True, eq=False)
class Diff(Expr):
    left: Expr
    right: Expr

    def __post_init__(self):
        object.__setattr__(self, "dim", _merge_dims(self.left.dim, self.right.dim))
        object.__setattr__(self, "psh", self.left.psh and self.right.is_constant)

    @property
    def is_constant(self):
        return self.left.is_constant and self.right.is_constant

    def _value(self, Z):
        return self.left._value(Z) - self.right._value(Z)

    def _grad(self, Z):
        return self.left._grad(Z) - self.right._grad(Z)

    def _hess(self, Z):
        return self.left._hess(Z) - self.right._hess(Z)

    def to_json(self):
        return {"op": "diff", "args": [self.left.to_json(), self.right.to_json()]}

    def __repr__(self):
        return f"({self.left!r} - {self.right!r})"


@dataclass(frozen=True, eq=False)
class Scale(Expr):
    lam: float
    arg: Expr

    def __post_init__(self):
        object.__setattr__(self, "dim", self.arg.dim)
        object.__setattr__(self, "psh", self.arg.is_constant or (self.lam >= 0 and self.arg.psh))

    @property
    def is_constant(self):
        return self.arg.is_constant

    def _value(self, Z):
        v = self.arg._value(Z)
        if self.lam == 0.0:
            return np.zeros_like(v)
        return self.lam * v

    def _grad(self, Z):
        return self.lam * self.arg._grad(Z)

    def _hess(self, Z):
        return self.lam * self.arg._hess(Z)

    def to_json(self):
        return {"op": "scale", "factor": self.lam, "arg": self.arg.to_json()}

    def __repr__(self):
        return f"{self.lam:g}*{self.arg!r}"


@dataclass(frozen=True, eq=False)
class Max(Expr):
    left: Expr
    right: Expr

    def __post_init__(self):
        object.__setattr__(self, "dim", _merge_dims(self.left.dim, self.right.dim))
        object.__setattr__(self, "psh", self.left.psh and self.right.psh)

    def _value(self, Z):
        return np.maximum(self.left._value(Z), self.right._value(Z))

    def _branch(self, Z):
        a = self.left._value(Z)
        b = self.right._value(Z)
        tied = np.abs(a - b) <= 1e-12 * (1.0 + np.abs(a))
        if np.any(tied | (np.isneginf(a) & np.isneginf(b))):
            raise NonDifferentiableError(f"max node {self!r} has tied arguments")
        return a > b

    def _grad(self, Z):
        pick = self._branch(Z)[..., None]
        return np.where(pick, self.left._grad(Z), self.right._grad(Z))

    def _hess(self, Z):
        pick = self._branch(Z)[..., None, None]
        return np.where(pick, self.left._hess(Z), self.right._hess(Z))

    def to_json(self):
        return {"op": "max", "args": [self.left.to_json(), self.right.to_json()]}

    def __repr__(self):
        return f"max({self.left!r}, {self.right!r})"


@dataclass(frozen=True, eq=False)
class SmoothMax(Expr):
    """``eps * log(exp(a/eps) + exp(b/eps))``, evaluated overflow-safely."""

    left: Expr
    right: Expr
    eps: float = DEFAULT_SMOOTH_EPS

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("smooth-max needs eps > 0")
        object.__setattr__(self, "dim", _merge_dims(self.left.dim, self.right.dim))
        object.__setattr__(self, "psh", self.left.psh and self.right.psh)

    def _weights(self, a, b):
        # softmax weight of the left argument; robust to -inf entries
        with np.errstate(invalid="ignore", over="ignore"):
            p = 0.5 * (1.0 + np.tanh((a - b) / (2.0 * self.eps)))
        p = np.where(np.isneginf(b), 1.0, p)
        p = np.where(np.isneginf(a), 0.0, p)
        return p

    def _value(self, Z):
        a = self.left._value(Z)
        b = self.right._value(Z)
        m = np.maximum(a, b)
        safe = np.where(np.isfinite(m), m, 0.0)
        s = safe + self.eps * np.log(np.exp((a - safe) / self.eps) + np.exp((b - safe) / self.eps))
        return np.where(np.isneginf(m), -np.inf, s)

    def _grad(self, Z):
        a, b = self.left._value(Z), self.right._value(Z)
        p = self._weights(a, b)[..., None]
        return p * self.left._grad(Z) + (1 - p) * self.right._grad(Z)

    def _hess(self, Z):
        a, b = self.left._value(Z), self.right._value(Z)
        if np.any(np.isneginf(a) & np.isneginf(b)):
            raise NonDifferentiableError(f"smooth-max node {self!r} is -inf")
        p = self._weights(a, b)
        d = self.left._grad(Z) - self.right._grad(Z)
        rank_one = np.conj(d)[..., :, None] * d[..., None, :]
        P = p[..., None, None]
        return (P * self.left._hess(Z) + (1 - P) * self.right._hess(Z)
                + (P * (1 - P) / self.eps) * rank_one)

    def to_json(self):
        return {"op": "smoothmax", "eps": self.eps,
                "args": [self.left.to_json(), self.right.to_json()]}

    def __repr__(self):
        return f"smax_{self.eps:g}({self.left!r}, {self.right!r})"


class Precompose(Expr):
    """``e(A z + b)`` for a complex affine map ``A: C^n -> C^m``."""

    def __init__(self, arg: Expr, A, b=None):
        self.arg = arg
        self.A = np.atleast_2d(np.asarray(A, dtype=complex))
        m, n = self.A.shape
        self.b = np.zeros(m, dtype=complex) if b is None else np.atleast_1d(np.asarray(b, dtype=complex))
        if self.b.shape != (m,):
            raise DimensionMismatch("translation vector does not match A")
        if arg.dim is not None and arg.dim != m:
            raise DimensionMismatch(f"inner expression lives on C^{arg.dim}, A maps into C^{m}")
        self.dim = n
        self.psh = arg.psh

    @property
    def is_constant(self):
        return self.arg.is_constant

    def _map(self, Z):
        return Z @ self.A.T + self.b

    def _value(self, Z):
        return self.arg._value(self._map(Z))

    def _grad(self, Z):
        return self.arg._grad(self._map(Z)) @ self.A

    def _hess(self, Z):
        H = self.arg._hess(self._map(Z))
        return np.einsum("lj,...lm,mk->...jk", np.conj(self.A), H, self.A)

    def to_json(self):
        return {"op": "precompose", "A": [_cjson(row) for row in self.A],
                "b": _cjson(self.b), "arg": self.arg.to_json()}

    def __repr__(self):
        return f"({self.arg!r})o(Az+b)"


# constructors -------------------------------------------------------------

def const(k) -> Const:
    return Const(float(k))


def modsq(index: int) -> ModSq:
    return ModSq(int(index))


def normsq() -> NormSq:
    return NormSq()


def logabs(a, b=0.0) -> LogAbs:
    return LogAbs(a, b)


def emax(a, b) -> Max:
    return Max(as_expr(a), as_expr(b))


def smoothmax(a, b, eps=DEFAULT_SMOOTH_EPS) -> SmoothMax:
    return SmoothMax(as_expr(a), as_expr(b), float(eps))


def precompose(arg: Expr, A, b=None) -> Precompose:
    return Precompose(arg, A, b)


def translate(arg: Expr, shift) -> Expr:
    """``z -> arg(z - shift)``."""
    shift = np.atleast_1d(np.asarray(shift, dtype=complex))
    n = shift.size
    if isinstance(arg, Const):
        return arg
    return Precompose(arg, np.eye(n), -shift)


# currents and weights -----------------------------------------------------

@dataclass(frozen=True)
class CurrentSpec:
    """``omega = dd^c psi1 - dd^c psi2`` with global psh potentials."""

    psi1: Expr = field(default_factory=lambda: Const(0.0))
    psi2: Expr = field(default_factory=lambda: Const(0.0))

    def __post_init__(self):
        for name in ("psi1", "psi2"):
            e = getattr(self, name)
            if not e.psh:
                raise ValueError(f"{name} must be plurisubharmonic, got {e!r}")
        _merge_dims(self.psi1.dim, self.psi2.dim)

    @property
    def dim(self):
        return _merge_dims(self.psi1.dim, self.psi2.dim)

    @property
    def potential(self) -> Expr:
        return Diff(self.psi1, self.psi2)

    @property
    def is_zero(self) -> bool:
        return self.psi1.is_constant and self.psi2.is_constant

    def in_singular_set(self, z) -> bool:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return bool(np.isneginf(self.psi1.value(z)) or np.isneginf(self.psi2.value(z)))

    def to_json(self):
        return {"psi1": self.psi1.to_json(), "psi2": self.psi2.to_json()}


@dataclass(frozen=True)
class Weight:
    """``phi = phi1 - phi2`` with ``phi1`` usc and ``phi2`` psh."""

    phi1: Expr = field(default_factory=lambda: Const(0.0))
    phi2: Expr = field(default_factory=lambda: Const(0.0))

    def __post_init__(self):
        if not self.phi2.psh:
            raise ValueError(f"phi2 must be plurisubharmonic, got {self.phi2!r}")
        _merge_dims(self.phi1.dim, self.phi2.dim)

    @property
    def dim(self):
        return _merge_dims(self.phi1.dim, self.phi2.dim)

    def boundary_values(self, Z):
        """``phi1 - phi2`` on a batch of points, with a mask of -inf hits.

        Points where either part is ``-inf`` are flagged and carry ``nan``;
        callers drop them from quadratures.
        """
        a = self.phi1.value(Z)
        b = self.phi2.value(Z)
        bad = np.isneginf(a) | np.isneginf(b)
        if not bad.any():
            return a - b, bad
        with np.errstate(invalid="ignore"):
            v = np.where(bad, np.nan, a - b)
        return v, bad

    def to_json(self):
        return {"phi1": self.phi1.to_json(), "phi2": self.phi2.to_json()}


N_PROBES = 16


def combined_weight(w: Weight, z, probe_radius: float = 1e-3) -> ExtReal:
    """Value of ``phi1 - phi2`` at one point.

    Where ``phi2(z) = -inf`` the limsup is replaced by the maximum over a ring
    of 16 probes at distance ``probe_radius``; see :func:`probe_limited`.
    """
    if not probe_radius > 0:
        raise ValueError("probe_radius must be positive")
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    p2 = float(w.phi2.value(z))
    if not np.isneginf(p2):
        return ExtReal(float(w.phi1.value(z)) - p2)
    n = z.size
    angles = 2 * np.pi * np.arange(N_PROBES) / N_PROBES
    probes = np.repeat(z[None, :], N_PROBES, axis=0)
    for k, th in enumerate(angles):
        probes[k, k % n] += probe_radius * np.exp(1j * th)
    v, bad = w.boundary_values(probes)
    if np.all(bad):
        return ExtReal.undefined()
    return ExtReal(float(np.max(v[~bad])))


def probe_limited(w: Weight, z) -> bool:
    """True when :func:`combined_weight` at ``z`` falls back to the probe ring."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    return bool(np.isneginf(w.phi2.value(z)))


# JSON expression syntax ---------------------------------------------------

def _cjson(x):
    x = np.asarray(x, dtype=complex)
    if x.ndim == 0:
        c = complex(x)
        return c.real if c.imag == 0 else [c.real, c.imag]
    return [_cjson(v) for v in x]


def parse_complex(obj, where="value") -> complex:
    if isinstance(obj, (int, float)):
        return complex(float(obj))
    if isinstance(obj, str):
        return complex(obj.replace(" ", ""))
    if isinstance(obj, (list, tuple)) and len(obj) == 2 and all(isinstance(v, (int, float, str)) for v in obj):
        return complex(float(obj[0]), float(obj[1]))
    if isinstance(obj, dict) and set(obj) <= {"re", "im"}:
        return complex(float(obj.get("re", 0.0)), float(obj.get("im", 0.0)))
    raise ValueError(f"{where}: cannot read complex number from {obj!r}")


def parse_cvector(obj, where="vector") -> np.ndarray:
    if not isinstance(obj, (list, tuple)):
        return np.array([parse_complex(obj, where)])
    # a bare [re, im] pair is ambiguous; vectors of length 2 must be written
    # as [[re, im], [re, im]] or as plain reals
    return np.array([parse_complex(v, f"{where}[{i}]") for i, v in enumerate(obj)])


def expr_from_json(obj, where="expr") -> Expr:
    """Build an expression from the nested tagged-object syntax."""
    if isinstance(obj, (int, float)):
        return Const(float(obj))
    if not isinstance(obj, dict) or "op" not in obj:
        raise ValueError(f"{where}: expected an object with an 'op' field")
    op = obj["op"]

    def args(count):
        a = obj.get("args")
        if not isinstance(a, list) or (count is not None and len(a) != count):
            raise ValueError(f"{where}.args: expected {count or 'a list of'} sub-expressions")
        return [expr_from_json(x, f"{where}.args[{i}]") for i, x in enumerate(a)]

    if op == "const":
        return Const(float(obj["value"]))
    if op == "modsq":
        return ModSq(int(obj["index"]))
    if op == "normsq":
        return NormSq()
    if op == "logabs":
        aff = obj.get("affine")
        if not isinstance(aff, dict) or "A" not in aff:
            raise ValueError(f"{where}.affine: expected {{'A': ..., 'b': ...}}")
        return LogAbs(parse_cvector(aff["A"], f"{where}.affine.A"), parse_complex(aff.get("b", 0.0), f"{where}.affine.b"))
    if op == "sum":
        parts = args(None)
        if not parts:
            raise ValueError(f"{where}.args: empty sum")
        out = parts[0]
        for p in parts[1:]:
            out = Sum(out, p)
        return out
    if op == "diff":
        a, b = args(2)
        return Diff(a, b)
    if op == "scale":
        return Scale(float(obj["factor"]), expr_from_json(obj["arg"], f"{where}.arg"))
    if op == "max":
        a, b = args(2)
        return Max(a, b)
    if op == "smoothmax":
        a, b = args(2)
        return SmoothMax(a, b, float(obj.get("eps", DEFAULT_SMOOTH_EPS)))
    if op == "precompose":
        A = np.array([parse_cvector(r, f"{where}.A[{i}]") for i, r in enumerate(obj["A"])])
        b = parse_cvector(obj["b"], f"{where}.b") if "b" in obj else None
        return Precompose(expr_from_json(obj["arg"], f"{where}.arg"), A, b)
    raise ValueError(f"{where}.op: unknown operation {op!r}")


def sub_mean_defect(e: Expr, z, w, rho: float, m: int = 64) -> float:
    """Circle mean of ``t -> e(z + t w)`` over ``|t| = rho`` minus ``e(z)``."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    t = rho * np.exp(2j * np.pi * np.arange(m) / m)
    ring = z[None, :] + t[:, None] * w[None, :]
    return float(np.mean(e.value(ring)) - e.value(z[None, :])[0])


def levi_form(e: Expr, z, w) -> float:
    """``w^* H w`` at ``z``."""
    H = e.hessian(np.asarray(z, dtype=complex)[None, :])[0]
    w = np.asarray(w, dtype=complex)
    return float(np.real(np.conj(w) @ H @ w))


__all__ = [
    "Expr", "Const", "ModSq", "NormSq", "LogAbs", "Sum", "Diff", "Scale", "Max",
    "SmoothMax", "Precompose", "const", "modsq", "normsq", "logabs", "emax",
    "smoothmax", "precompose", "translate", "as_expr", "CurrentSpec", "Weight",
    "combined_weight", "probe_limited", "expr_from_json", "parse_complex",
    "parse_cvector", "sub_mean_defect", "levi_form",
]
