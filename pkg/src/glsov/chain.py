"""Chain parameters: rank, representation, inhomogeneities, hbar and twist."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .scalars import EXACT_RING, FLOAT_RING, RingTag, fmt_scalar, to_exact

DEFAULT_THETA = ("0", "1/3", "7/5", "-5/7", "11/13", "-2/9")
DEFAULT_Z = (2, 3, 5, 7, 11, 13)


def _scal(x, ring: RingTag):
    if ring.exact:
        return to_exact(x)
    if isinstance(x, str):
        x = to_exact(x)
    return complex(x)


@dataclass(frozen=True)
class ChainSpec:
    """A gl(N) chain of L sites carrying the representation (S^A) or a general nu.

    ``nu`` overrides the rectangular weight when given; A and S are then
    ignored for the representation but kept for bookkeeping.
    """

    N: int
    L: int
    A: int = 1
    S: int = 1
    theta: Optional[Sequence] = None
    hbar: object = 1
    z: Optional[Sequence] = None
    nu: Optional[Sequence[int]] = None
    ring: RingTag = field(default=EXACT_RING)

    def __post_init__(self):
        N, L = self.N, self.L
        if not isinstance(N, int) or N < 1:
            raise ValueError("N must be a positive integer")
        if not isinstance(L, int) or L < 0:
            raise ValueError("L must be a non-negative integer")
        ring = self.ring
        if self.nu is not None:
            nu = tuple(int(v) for v in self.nu)
            nu = nu + (0,) * (N - len(nu))
            if len(nu) > N or any(nu[i] < nu[i + 1] for i in range(N - 1)) or nu[-1] < 0:
                raise ValueError(f"nu={self.nu} is not a partition with at most N parts")
            object.__setattr__(self, "nu", nu)
        else:
            if N < 2 or not (1 <= self.A <= N - 1):
                raise ValueError("A must lie in [1, N-1]")
            if self.S < 1:
                raise ValueError("S must be a positive integer")
        theta = self.theta
        if theta is None:
            if L > len(DEFAULT_THETA):
                raise ValueError("supply theta explicitly for L > 6")
            theta = DEFAULT_THETA[:L]
        if len(theta) != L:
            raise ValueError(f"expected {L} inhomogeneities, got {len(theta)}")
        theta = tuple(_scal(t, ring) for t in theta)
        hbar = _scal(self.hbar, ring)
        if hbar == 0:
            raise ValueError("hbar must be nonzero")
        for a in range(L):
            for b in range(a + 1, L):
                d = (theta[a] - theta[b]) / hbar
                if d == 0:
                    raise ValueError("inhomogeneities must be pairwise distinct")
                if ring.exact and d.denominator == 1:
                    raise ValueError(f"theta_{a+1} - theta_{b+1} is an integer multiple of hbar")
                if not ring.exact and abs(d.imag) < ring.tol and abs(d.real - round(d.real)) < ring.tol:
                    raise ValueError(f"theta_{a+1} - theta_{b+1} is an integer multiple of hbar")
        z = self.z
        if z is None:
            if N > len(DEFAULT_Z):
                raise ValueError("supply z explicitly for N > 6")
            z = DEFAULT_Z[:N]
        if len(z) != N:
            raise ValueError(f"expected {N} twist eigenvalues, got {len(z)}")
        z = tuple(_scal(v, ring) for v in z)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "hbar", hbar)
        object.__setattr__(self, "z", z)

    @property
    def weight(self) -> tuple:
        if self.nu is not None:
            return self.nu
        return (self.S,) * self.A + (0,) * (self.N - self.A)

    @property
    def rectangular(self) -> bool:
        w = self.weight
        head = [v for v in w if v != 0]
        return len(head) >= 1 and len(set(head)) == 1 and len(head) < self.N

    @property
    def rect_AS(self) -> tuple:
        """(A, S) read off from the weight; only meaningful when rectangular."""
        w = self.weight
        head = [v for v in w if v != 0]
        return len(head), (head[0] if head else 0)

    def with_z(self, z) -> "ChainSpec":
        return ChainSpec(self.N, self.L, self.A, self.S, self.theta, self.hbar, z, self.nu, self.ring)

    def with_ring(self, ring: RingTag) -> "ChainSpec":
        def conv(v):
            return complex(v) if not ring.exact else v
        if ring.exact and not self.ring.exact:
            raise ValueError("cannot convert a floating spec to exact arithmetic")
        return ChainSpec(self.N, self.L, self.A, self.S, tuple(conv(t) for t in self.theta),
                         conv(self.hbar), tuple(conv(v) for v in self.z), self.nu, ring)

    def null_twist(self) -> "ChainSpec":
        return self.with_z([0] * self.N)

    def to_dict(self, include_z: bool = True) -> dict:
        d = {
            "N": self.N,
            "L": self.L,
            "weight": list(self.weight),
            "theta": [fmt_scalar(t) for t in self.theta],
            "hbar": fmt_scalar(self.hbar),
            "ring": self.ring.kind,
        }
        if include_z:
            d["z"] = [fmt_scalar(v) for v in self.z]
        return d

    def hash(self, include_z: bool = True) -> str:
        blob = json.dumps(self.to_dict(include_z), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def float_spec(spec: ChainSpec, tol: float = 1e-10) -> ChainSpec:
    ring = FLOAT_RING if tol == FLOAT_RING.tol else RingTag("float", tol)
    return spec.with_ring(ring)

