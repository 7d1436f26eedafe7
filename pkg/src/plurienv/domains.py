"""Model domains in C^n: balls and polydiscs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

BALL = "ball"
POLYDISC = "polydisc"


@dataclass(frozen=True)
class DomainSpec:
    kind: str
    center: tuple
    radii: tuple

    def __post_init__(self):
        c = tuple(complex(v) for v in np.atleast_1d(np.asarray(self.center, dtype=complex)))
        r = tuple(float(v) for v in np.atleast_1d(np.asarray(self.radii, dtype=float)))
        if self.kind not in (BALL, POLYDISC):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.kind == BALL and len(r) != 1:
            raise ValueError("a ball has a single radius")
        if self.kind == POLYDISC and len(r) == 1:
            r = r * len(c)
        if self.kind == POLYDISC and len(r) != len(c):
            raise ValueError("polydisc needs one radius per coordinate")
        if any(v <= 0 for v in r):
            raise ValueError("radii must be positive")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radii", r)

    @classmethod
    def ball(cls, center=0.0, radius=1.0):
        return cls(BALL, center, radius)

    @classmethod
    def polydisc(cls, center, radii):
        return cls(POLYDISC, center, radii)

    @classmethod
    def unit_disc(cls):
        return cls(BALL, (0.0,), (1.0,))

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def inradius(self) -> float:
        return min(self.radii)

    def signed_distance(self, Z):
        """Distance to the complement (positive inside, negative outside)."""
        Z = np.asarray(Z, dtype=complex)
        d = Z - np.asarray(self.center)
        if self.kind == BALL:
            return self.radii[0] - np.sqrt(np.sum(np.abs(d) ** 2, axis=-1))
        return np.min(np.asarray(self.radii) - np.abs(d), axis=-1)

    def contains(self, z) -> bool:
        return bool(self.signed_distance(np.atleast_1d(np.asarray(z, dtype=complex))) > 0)

    def shrink(self, delta: float) -> DomainSpec:
        """``X_delta = {x : dist(x, complement) > delta}``."""
        if not 0 <= delta < self.inradius:
            raise DomainError(f"delta={delta} must be below the inradius {self.inradius}")
        return DomainSpec(self.kind, self.center, tuple(r - delta for r in self.radii))

    def translate(self, v) -> DomainSpec:
        v = np.atleast_1d(np.asarray(v, dtype=complex))
        return DomainSpec(self.kind, tuple(np.asarray(self.center) + v), self.radii)

    def project_inside(self, Z, eps=1e-9):
        """Nearest point of the closed domain shrunk by ``eps`` (identity inside)."""
        Z = np.asarray(Z, dtype=complex)
        c = np.asarray(self.center)
        d = Z - c
        if self.kind == BALL:
            R = self.radii[0] - eps
            norm = np.sqrt(np.sum(np.abs(d) ** 2, axis=-1, keepdims=True))
            scale = np.where(norm > R, R / np.where(norm > 0, norm, 1.0), 1.0)
            return c + d * scale
        R = np.asarray(self.radii) - eps
        mod = np.abs(d)
        scale = np.where(mod > R, R / np.where(mod > 0, mod, 1.0), 1.0)
        return c + d * scale

    def half_extent(self) -> np.ndarray:
        """Per-coordinate radius of the bounding polydisc."""
        if self.kind == BALL:
            return np.full(self.dim, self.radii[0])
        return np.asarray(self.radii)

    def to_json(self):
        return {"kind": self.kind,
                "center": [[c.real, c.imag] for c in self.center],
                "radii": list(self.radii)}
