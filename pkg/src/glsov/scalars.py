"""Coefficient rings used throughout the package.

Two rings are supported: exact rationals (``gmpy2.mpq`` entries, stored in
numpy ``object`` arrays) and complex floating point (``complex128``).
Exact mode is the default for operator identities.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Number

import gmpy2
import numpy as np

mpq = gmpy2.mpq

EXACT = "exact"
FLOAT = "float"


@dataclass(frozen=True)
class RingTag:
    kind: str = EXACT
    tol: float = 1e-10

    def __post_init__(self):
        if self.kind not in (EXACT, FLOAT):
            raise ValueError(f"unknown ring kind {self.kind!r}")
        if self.tol < 0:
            raise ValueError("tolerance must be non-negative")

    @property
    def exact(self) -> bool:
        return self.kind == EXACT

    @property
    def dtype(self):
        return object if self.exact else np.complex128

    def scalar(self, x):
        return to_exact(x) if self.exact else complex(x)

    def zeros(self, shape):
        if self.exact:
            out = np.empty(shape, dtype=object)
            out.fill(mpq(0))
            return out
        return np.zeros(shape, dtype=np.complex128)

    def eye(self, n):
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self.scalar(1)
        return out

    def asarray(self, a):
        a = np.asarray(a)
        if self.exact:
            return to_exact_array(a)
        return a.astype(np.complex128)

    def is_zero(self, x, scale=1.0) -> bool:
        if self.exact:
            return x == 0
        return abs(x) <= self.tol * max(1.0, scale)


EXACT_RING = RingTag(EXACT)
FLOAT_RING = RingTag(FLOAT)


def to_exact(x):
    """Convert ints, fractions, decimal strings or ``"p/q"`` strings to mpq."""
    if isinstance(x, type(mpq(0))):
        return x
    if isinstance(x, (int, np.integer)):
        return mpq(int(x))
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        f = Fraction(x.strip())
        return mpq(f.numerator, f.denominator)
    if isinstance(x, (float, np.floating)):
        if not float(x).is_integer():
            raise TypeError(f"refusing to silently rationalise float {x!r}; pass a string")
        return mpq(int(x))
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def to_exact_array(a):
    a = np.asarray(a, dtype=object)
    out = np.empty(a.shape, dtype=object)
    for idx, v in np.ndenumerate(a):
        out[idx] = to_exact(v)
    return out


def is_exact_scalar(x) -> bool:
    return isinstance(x, (type(mpq(0)), int, Fraction, np.integer))


def is_exact_array(a) -> bool:
    return isinstance(a, np.ndarray) and a.dtype == object


def to_complex_array(a):
    if is_exact_array(a):
        return np.array([complex(v) for v in a.ravel()], dtype=np.complex128).reshape(a.shape)
    return np.asarray(a, dtype=np.complex128)


def fmt_scalar(x):
    """Serialise a scalar: exact rationals as ``"p/q"``, complex as ``[re, im]``."""
    if is_exact_scalar(x):
        q = to_exact(x)
        if q.denominator == 1:
            return str(q.numerator)
        return f"{q.numerator}/{q.denominator}"
    if isinstance(x, Number):
        c = complex(x)
        return [c.real, c.imag]
    raise TypeError(f"cannot serialise {type(x).__name__}")


def parse_scalar(v):
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return to_exact(v)


def max_abs(a):
    """Max-norm of an array; exact arrays give an exact rational."""
    a = np.asarray(a)
    if a.size == 0:
        return mpq(0) if a.dtype == object else 0.0
    if a.dtype == object:
        return max(abs(v) for v in a.ravel())
    return float(np.max(np.abs(a)))
