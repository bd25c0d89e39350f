"""
Scalar information-rate functions used by every region definition.

Rates are in bits/symbol (base-2 logarithms, real-valued channel model).
Every function takes an Snr, a plain float, or a numpy array-like; scalar
inputs return a float, array inputs return an ndarray of the same shape.
"""

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.typing import ArrayLike

from twrc.helper.exceptions import DomainError, PreconditionError

HALF_BIT = 0.5
# sup over x >= 0 of C(x) - D(x), attained at x = 1/2
CD_GAP_MAX = 0.5 * math.log2(1.5)


@dataclass(frozen=True)
class Snr:
    """Linear, dimensionless power ratio. Finite and non-negative."""
    value: float

    def __post_init__(self):
        try:
            value = float(self.value)
        except (TypeError, ValueError):
            raise DomainError(f"SNR must be a real number, got {self.value!r}")
        if not math.isfinite(value) or value < 0:
            raise DomainError(f"SNR must be finite and >= 0, got {value!r}")
        object.__setattr__(self, "value", value)

    def __float__(self):
        return self.value


SnrLike = Union[Snr, float, ArrayLike]


def _checked(x: SnrLike, name: str = "snr") -> np.ndarray:
    if isinstance(x, Snr):
        return np.asarray(x.value)
    try:
        arr = np.asarray(x, dtype=float)
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be numeric, got {x!r}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite, got {x!r}")
    if np.any(arr < 0):
        raise DomainError(f"{name} must be >= 0, got {x!r}")
    return arr


def _out(arr: np.ndarray):
    return float(arr) if np.ndim(arr) == 0 else arr


def capacity_c(x: SnrLike):
    """C(x) = 1/2 log2(1 + x)."""
    return _out(0.5 * np.log2(1.0 + _checked(x)))


def lattice_rate_d(x: SnrLike):
    """D(x) = 1/2 max{0, log2(1/2 + x)}; zero for every x <= 1/2."""
    v = _checked(x)
    return _out(0.5 * np.maximum(0.0, np.log2(0.5 + v)))


def gamma(p1: SnrLike, p2: SnrLike):
    """Gamma = C(2 p1) + C(p2) - C(p1 + p2), defined for p1 <= p2."""
    a, b = _checked(p1, "p1"), _checked(p2, "p2")
    if np.any(a > b):
        raise PreconditionError(f"gamma needs p1 <= p2, got p1={p1!r}, p2={p2!r}")
    return _out(0.5 * (np.log2(1.0 + 2.0 * a) + np.log2(1.0 + b) - np.log2(1.0 + a + b)))


def cd_gap(p1: SnrLike):
    """C(p1) - D(p1), always within [0, CD_GAP_MAX]."""
    v = _checked(p1, "p1")
    return _out(0.5 * np.log2(1.0 + v) - 0.5 * np.maximum(0.0, np.log2(0.5 + v)))


def scheme2_private_rate(p1: SnrLike, p2: SnrLike):
    """Rate of the superposed Gaussian stream: C((p2 - p1) / (1 + 2 p1)), p1 <= p2."""
    a, b = _checked(p1, "p1"), _checked(p2, "p2")
    if np.any(a > b):
        raise PreconditionError(f"scheme-2 rate needs p1 <= p2, got p1={p1!r}, p2={p2!r}")
    return _out(0.5 * np.log2(1.0 + (b - a) / (1.0 + 2.0 * a)))


def mac_bounds(p1: SnrLike, p2: SnrLike):
    """(C(p1), C(p2), C(p1 + p2)): the classical two-user Gaussian MAC bounds."""
    a, b = _checked(p1, "p1"), _checked(p2, "p2")
    return capacity_c(a), capacity_c(b), capacity_c(a + b)
