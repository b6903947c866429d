"""On-disk operator cache.

Each record is one file::

    b"GLSV" | u16 format | u32 header length | header JSON | u64 payload length | payload | sha256(payload)

The header stores the spec hash, object id and code version; the payload is a
small tagged binary encoding of nested lists, dicts, exact rationals and numpy
arrays. A record that fails to parse, has the wrong version or a bad digest
is treated as a miss and rebuilt.
"""
from __future__ import annotations

import fcntl
import hashlib
import io
import json
import logging
import os
import struct
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .scalars import is_exact_scalar, mpq

log = logging.getLogger(__name__)

MAGIC = b"GLSV"
FORMAT = 1
CODE_VERSION = f"{__version__}+f{FORMAT}"


class CacheError(Exception):
    pass


# tagged encoding ---------------------------------------------------------------

def _wint(buf, n: int):
    b = int(n).to_bytes((int(n).bit_length() + 8) // 8 or 1, "little", signed=True)
    buf.write(struct.pack("<I", len(b)))
    buf.write(b)


def _rint(buf) -> int:
    (k,) = struct.unpack("<I", _take(buf, 4))
    return int.from_bytes(_take(buf, k), "little", signed=True)


def _take(buf, k: int) -> bytes:
    b = buf.read(k)
    if len(b) != k:
        raise CacheError("truncated record")
    return b


def _enc(buf, x):
    if x is None:
        buf.write(b"N")
    elif isinstance(x, bool):
        buf.write(b"T" if x else b"F")
    elif isinstance(x, (int, np.integer)):
        buf.write(b"i")
        _wint(buf, int(x))
    elif is_exact_scalar(x):
        q = mpq(x)
        buf.write(b"q")
        _wint(buf, int(q.numerator))
        _wint(buf, int(q.denominator))
    elif isinstance(x, (complex, np.complexfloating)):
        buf.write(b"c" + struct.pack("<dd", x.real, x.imag))
    elif isinstance(x, (float, np.floating)):
        buf.write(b"f" + struct.pack("<d", x))
    elif isinstance(x, str):
        b = x.encode()
        buf.write(b"s" + struct.pack("<I", len(b)) + b)
    elif isinstance(x, (list, tuple)):
        buf.write(b"l" + struct.pack("<I", len(x)))
        for y in x:
            _enc(buf, y)
    elif isinstance(x, dict):
        buf.write(b"d" + struct.pack("<I", len(x)))
        for k, v in x.items():
            _enc(buf, str(k))
            _enc(buf, v)
    elif isinstance(x, np.ndarray):
        buf.write(b"a")
        buf.write(struct.pack("<B", x.ndim) + struct.pack(f"<{x.ndim}I", *x.shape))
        if x.dtype == object:
            buf.write(b"o")
            for y in x.ravel():
                _enc(buf, y)
        else:
            arr = np.ascontiguousarray(x, dtype=complex)
            buf.write(b"c")
            buf.write(arr.tobytes())
    else:
        raise TypeError(f"cannot cache {type(x).__name__}")


def _dec(buf):
    tag = _take(buf, 1)
    if tag == b"N":
        return None
    if tag in (b"T", b"F"):
        return tag == b"T"
    if tag == b"i":
        return _rint(buf)
    if tag == b"q":
        return mpq(_rint(buf), _rint(buf))
    if tag == b"c":
        re, im = struct.unpack("<dd", _take(buf, 16))
        return complex(re, im)
    if tag == b"f":
        return struct.unpack("<d", _take(buf, 8))[0]
    if tag == b"s":
        (k,) = struct.unpack("<I", _take(buf, 4))
        return _take(buf, k).decode()
    if tag == b"l":
        (k,) = struct.unpack("<I", _take(buf, 4))
        return [_dec(buf) for _ in range(k)]
    if tag == b"d":
        (k,) = struct.unpack("<I", _take(buf, 4))
        out = {}
        for _ in range(k):
            key = _dec(buf)
            out[key] = _dec(buf)
        return out
    if tag == b"a":
        (nd,) = struct.unpack("<B", _take(buf, 1))
        shape = struct.unpack(f"<{nd}I", _take(buf, 4 * nd))
        n = int(np.prod(shape)) if nd else 1
        kind = _take(buf, 1)
        if kind == b"o":
            arr = np.empty(n, dtype=object)
            for i in range(n):
                arr[i] = _dec(buf)
            return arr.reshape(shape)
        if kind == b"c":
            return np.frombuffer(_take(buf, 16 * n), dtype=complex).reshape(shape).copy()
    raise CacheError(f"unknown tag {tag!r}")


def encode(obj) -> bytes:
    buf = io.BytesIO()
    _enc(buf, obj)
    return buf.getvalue()


def decode(data: bytes):
    buf = io.BytesIO(data)
    out = _dec(buf)
    if buf.read(1):
        raise CacheError("trailing bytes")
    return out


def write_record(path: Path, header: dict, payload) -> None:
    body = encode(payload)
    hb = json.dumps(header, sort_keys=True).encode()
    blob = (MAGIC + struct.pack("<HI", FORMAT, len(hb)) + hb + struct.pack("<Q", len(body))
            + body + hashlib.sha256(body).digest())
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    with os.fdopen(fd, "wb") as f:
        f.write(blob)
    os.replace(tmp, path)


def read_record(path: Path):
    """Return (header, payload); CacheError on any inconsistency."""
    with open(path, "rb") as f:
        if f.read(4) != MAGIC:
            raise CacheError("bad magic")
        fmt, hlen = struct.unpack("<HI", _take(f, 6))
        if fmt != FORMAT:
            raise CacheError(f"format {fmt} != {FORMAT}")
        header = json.loads(_take(f, hlen))
        (plen,) = struct.unpack("<Q", _take(f, 8))
        body = _take(f, plen)
        if hashlib.sha256(body).digest() != _take(f, 32):
            raise CacheError("digest mismatch")
    return header, decode(body)


# cache ---------------------------------------------------------------------------

class OperatorCache:
    """Content-addressed by (spec hash, object id, code version); hits and misses are logged."""

    def __init__(self, root, enabled: bool = True):
        self.root = Path(root)
        self.enabled = enabled
        self.events: list = []

    def key(self, spec, obj_id: str, include_z: bool = True) -> str:
        blob = f"{spec.hash(include_z)}|{obj_id}|{CODE_VERSION}"
        return hashlib.sha256(blob.encode()).hexdigest()[:24]

    def path(self, spec, obj_id: str, include_z: bool = True) -> Path:
        return self.root / f"{obj_id}-{self.key(spec, obj_id, include_z)}.bin"

    @contextmanager
    def _lock(self):
        self.root.mkdir(parents=True, exist_ok=True)
        with open(self.root / ".lock", "w") as f:
            fcntl.flock(f, fcntl.LOCK_EX)
            try:
                yield
            finally:
                fcntl.flock(f, fcntl.LOCK_UN)

    def get_or_build(self, spec, obj_id: str, build: Callable, to_payload: Callable,
                     from_payload: Callable, include_z: bool = True):
        if not self.enabled:
            return build()
        p = self.path(spec, obj_id, include_z)
        header = {"spec": spec.hash(include_z), "id": obj_id, "version": CODE_VERSION}
        if p.exists():
            try:
                h, payload = read_record(p)
                if h != header:
                    raise CacheError("header mismatch")
                obj = from_payload(payload)
                self.events.append((obj_id, "hit"))
                log.debug("cache hit %s", p.name)
                return obj
            except (CacheError, OSError, ValueError, KeyError, TypeError) as exc:
                self.events.append((obj_id, f"rebuild: {exc}"))
                log.info("cache rebuild %s (%s)", p.name, exc)
        else:
            self.events.append((obj_id, "miss"))
        obj = build()
        with self._lock():
            write_record(p, header, to_payload(obj))
        return obj

    def summary(self) -> dict:
        out = {"hit": 0, "miss": 0, "rebuild": 0}
        for _, ev in self.events:
            out[ev.split(":")[0]] += 1
        return out


# payload adapters for the cached objects -----------------------------------------

def b_payload(b) -> dict:
    return {"full": list(b.full.coeffs), "beta": list(b.beta.coeffs),
            "dynamical": list(b.dynamical.coeffs), "scale": b.scale}


def b_from_payload(ring):
    from .boperator import BOperator
    from .poly import Poly
    from .yangian import OperatorPoly

    def load(d):
        return BOperator(OperatorPoly(d["full"], ring), Poly(d["beta"]),
                         OperatorPoly(d["dynamical"], ring), d["scale"])
    return load


def basis_payload(basis) -> dict:
    return {"entries": [basis.entries[t].coords for t in basis.tuples],
            "normalized": [basis.normalized[t].coords for t in basis.tuples]}


def basis_from_payload(spec):
    from .sov import Covector, SoVBasis
    from .young import enumerate_tuples

    def load(d):
        A, S = spec.rect_AS
        tuples = enumerate_tuples(spec.N, A, S, spec.L)
        if len(tuples) != len(d["entries"]):
            raise CacheError("tuple count mismatch")
        basis = SoVBasis(spec, tuples)
        for t, e, n in zip(tuples, d["entries"], d["normalized"]):
            basis.entries[t] = Covector(e, tuple(t))
            basis.normalized[t] = Covector(n, tuple(t))
        return basis
    return load
