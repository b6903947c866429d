"""Univariate polynomials in the spectral parameter ``u``.

Coefficients are stored dense and ascending.  Exact polynomials hold mpq
coefficients; floating polynomials hold complex numbers.
"""
from __future__ import annotations

from math import comb
from typing import Iterable, Sequence

import numpy as np

from .scalars import is_exact_scalar, mpq, to_exact


def _norm(c):
    return to_exact(c) if is_exact_scalar(c) else complex(c)


class Poly:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [_norm(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    # construction helpers
    @classmethod
    def const(cls, c):
        return cls([c])

    @classmethod
    def x(cls):
        return cls([0, 1])

    @property
    def exact(self) -> bool:
        return all(is_exact_scalar(c) for c in self.coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self):
        return self.coeffs[-1] if self.coeffs else mpq(0)

    def __call__(self, u):
        if is_exact_scalar(u) and self.exact:
            acc = mpq(0)
            for c in reversed(self.coeffs):
                acc = acc * u + c
            return acc
        u = complex(u)
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * u + complex(c)
        return acc

    def __eq__(self, other):
        if not isinstance(other, Poly):
            other = Poly([other])
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({list(self.coeffs)!r})"

    def __add__(self, other):
        other = other if isinstance(other, Poly) else Poly([other])
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return Poly([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-(other if isinstance(other, Poly) else Poly([other])))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly([c * other for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = Poly([1])
        for _ in range(n):
            out = out * self
        return out

    def divmod(self, other: "Poly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        quot = [0] * max(len(rem) - dq, 0)
        lead = other.lead
        for k in range(len(rem) - dq - 1, -1, -1):
            c = rem[k + dq] / lead
            quot[k] = c
            for i, b in enumerate(other.coeffs):
                rem[k + i] = rem[k + i] - c * b
        return Poly(quot), Poly(rem[:dq])

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def monic(self) -> "Poly":
        if self.is_zero():
            raise ValueError("zero polynomial has no monic normalisation")
        return self * (1 / self.lead) if not self.exact else self * (mpq(1) / self.lead)

    def roots(self) -> np.ndarray:
        if self.degree < 1:
            return np.empty(0, dtype=np.complex128)
        c = np.array([complex(v) for v in reversed(self.coeffs)])
        return np.roots(c)

    def to_complex(self) -> "Poly":
        return Poly([complex(c) for c in self.coeffs])


def shift(p: Poly, n: int, hbar=1) -> Poly:
    """Return q with q(u) = p(u + n*hbar)."""
    if p.exact and not is_exact_scalar(hbar):
        raise ValueError("ring mismatch: exact polynomial shifted by a floating hbar")
    h = to_exact(hbar) if is_exact_scalar(hbar) else complex(hbar)
    a = h * n
    out = [0] * len(p.coeffs)
    for k, c in enumerate(p.coeffs):
        # c (u + a)^k
        apow = 1
        for j in range(k, -1, -1):
            out[j] = out[j] + c * comb(k, j) * apow
            apow = apow * a
    return Poly(out)


def q_theta(theta: Sequence) -> Poly:
    """Monic polynomial prod_a (u - theta_a)."""
    out = Poly([1])
    for t in theta:
        out = out * Poly([-_norm(t), 1])
    return out


def interpolate(points: Sequence[tuple]) -> Poly:
    """Minimal-degree polynomial through ``(u_k, value_k)`` (Newton form)."""
    xs = [_norm(p[0]) for p in points]
    if len(set(xs)) != len(xs):
        raise ValueError("duplicate abscissae in interpolation data")
    coef = [_norm(p[1]) for p in points]
    n = len(xs)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    out = Poly([coef[-1]]) if n else Poly()
    for i in range(n - 2, -1, -1):
        out = out * Poly([-xs[i], 1]) + coef[i]
    return out


def shifted_product(factors: dict, base: Poly, hbar=1) -> Poly:
    """prod_r base(u - r*hbar)^e_r for a mapping ``{r: e_r}`` with e_r >= 0."""
    out = Poly([1])
    for r, e in sorted(factors.items()):
        if e < 0:
            raise ValueError("negative multiplicity: not a polynomial")
        if e:
            out = out * shift(base, -r, hbar) ** e
    return out
