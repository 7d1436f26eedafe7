"""Extended reals with an explicit undefined state.

Internally every quantity is a plain float: ``+inf``/``-inf`` are the
infinite states and ``nan`` is "undefined" (``inf - inf``). IEEE arithmetic
already implements the required table; :class:`ExtReal` only names the
states and applies the ``-inf`` sentinel rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: Values at or below this are treated as ``-inf`` (log underflow guard).
NEG_INF_SENTINEL = -1e30

FINITE = "finite"
POS_INF = "+inf"
NEG_INF = "-inf"
UNDEFINED = "undefined"


def clip_sentinel(values):
    """Map values at or below the sentinel to ``-inf`` (array or scalar)."""
    v = np.asarray(values, dtype=float)
    out = np.where(v <= NEG_INF_SENTINEL, -np.inf, v)
    if out.ndim == 0:
        return float(out)
    return out


def state_of(x: float) -> str:
    if math.isnan(x):
        return UNDEFINED
    if x == math.inf:
        return POS_INF
    if x == -math.inf or x <= NEG_INF_SENTINEL:
        return NEG_INF
    return FINITE


@dataclass(frozen=True)
class ExtReal:
    """A value in [-inf, +inf] or undefined."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if not math.isnan(v) and v <= NEG_INF_SENTINEL:
            v = -math.inf
        object.__setattr__(self, "value", v)

    @classmethod
    def undefined(cls) -> ExtReal:
        return cls(math.nan)

    @property
    def state(self) -> str:
        return state_of(self.value)

    @property
    def is_finite(self) -> bool:
        return self.state == FINITE

    @property
    def is_undefined(self) -> bool:
        return self.state == UNDEFINED

    def _coerce(self, other) -> float:
        if isinstance(other, ExtReal):
            return other.value
        return float(other)

    def __add__(self, other) -> ExtReal:
        return ExtReal(self.value + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other) -> ExtReal:
        return ExtReal(self.value - self._coerce(other))

    def __rsub__(self, other) -> ExtReal:
        return ExtReal(self._coerce(other) - self.value)

    def __neg__(self) -> ExtReal:
        return ExtReal(-self.value)

    def __mul__(self, scalar) -> ExtReal:
        s = self._coerce(scalar)
        # 0 * inf stays 0 for scaling by non-negative constants of a potential
        if s == 0.0 and not math.isnan(self.value):
            return ExtReal(0.0)
        return ExtReal(self.value * s)

    __rmul__ = __mul__

    def __float__(self) -> float:
        return self.value

    def __repr__(self) -> str:
        if self.is_finite:
            return f"ExtReal({self.value!r})"
        return f"ExtReal({self.state})"
