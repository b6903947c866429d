"""Run configurations, verification suites, reports and the reference configurations."""
from __future__ import annotations

import csv
import io
import json
import logging
import platform
import time
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from . import __version__
from .boperator import build_B, spectrum_check
from .cache import (OperatorCache, b_from_payload, b_payload, basis_from_payload,
                    basis_payload)
from .chain import ChainSpec
from .qsystem import (basis_pairing, b_product_state, degree_bookkeeping, diagonalize_bethe,
                      generate_state, overlap_defect, q_system, qq_residual, slater_wavefunction,
                      wronskian_defect)
from .scalars import EXACT_RING, FLOAT_RING, fmt_scalar, is_exact_scalar, max_abs, mpq
from .sov import (b_eigen_residual, build_sov_basis, default_sigma, n2_ladder_check, omega_state,
                  schur_overlap_prediction, shortening_suite, twist_independence_check)
from .transfer import fused_transfer, hirota_residual, wronskian_transfer
from .yangian import build_monodromy, commutator, companion_twist, rtt_residual
from .young import Partition, partitions_in_box

log = logging.getLogger(__name__)

SUITES = ("rtt", "b-spectrum", "sov-basis", "twist-independence", "hirota", "shortening",
          "qsystem", "wavefunction", "overlap", "ladder-n2", "b-product")

# exact suites compare against 0; in float mode they use FLOAT_EXACT_TOL
TOLERANCES = {"rtt": 0, "b-spectrum": 0, "sov-basis": 0, "twist-independence": 0, "hirota": 0,
              "shortening": 0, "ladder-n2": 0, "overlap": 1e-10, "qsystem": 1e-8,
              "wavefunction": 1e-8, "b-product": 1e-8}
FLOAT_EXACT_TOL = 1e-8
FLOAT_SUITES = ("qsystem", "wavefunction", "b-product")


def _schema() -> dict:
    return json.loads(resources.files("glsov").joinpath("config_schema.json").read_text())


@dataclass
class RunConfig:
    spec: dict
    ring: str = "exact"
    suites: list = field(default_factory=lambda: ["all"])
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    cache_dir: Optional[str] = None
    output: Optional[str] = None
    name: str = ""

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        jsonschema.validate(d, _schema())
        return cls(**d)

    def to_dict(self) -> dict:
        return {"name": self.name, "spec": self.spec, "ring": self.ring, "suites": list(self.suites),
                "seed": self.seed, "tolerances": dict(self.tolerances), "cache_dir": self.cache_dir,
                "output": self.output}

    def chain_spec(self, exact: bool = False) -> ChainSpec:
        kw = dict(self.spec)
        kw["ring"] = EXACT_RING if exact or self.ring == "exact" else FLOAT_RING
        return ChainSpec(**kw)

    def suite_list(self) -> list:
        if "all" in self.suites:
            return list(SUITES)
        return [s for s in SUITES if s in self.suites]

    def tolerance(self, suite: str) -> float:
        if suite in self.tolerances:
            return self.tolerances[suite]
        if self.ring == "float" and suite not in FLOAT_SUITES and TOLERANCES[suite] == 0:
            return FLOAT_EXACT_TOL
        return TOLERANCES[suite]


def load_configs(path) -> list:
    """A config file holds one run object or {"runs": [...]}."""
    data = json.loads(Path(path).read_text())
    runs = data["runs"] if isinstance(data, dict) and "runs" in data else (
        data if isinstance(data, list) else [data])
    return [RunConfig.from_dict(r) for r in runs]


@dataclass
class SuiteResult:
    name: str
    status: str                 # pass, fail or skip
    residuals: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)
    wall_time: float = 0.0
    note: str = ""

    def to_dict(self) -> dict:
        d = {"name": self.name, "status": self.status, "residuals": _jsonable(self.residuals),
             "counts": _jsonable(self.counts)}
        if self.note:
            d["note"] = self.note
        return d


@dataclass
class Report:
    config: dict
    suites: list
    environment: dict
    cache: dict
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(s.status != "fail" for s in self.suites)

    def to_dict(self, timing: bool = True) -> dict:
        d = {"config": _jsonable(self.config), "environment": self.environment,
             "passed": self.passed, "suites": [s.to_dict() for s in self.suites], "cache": self.cache}
        if timing:
            d["timing"] = {s.name: round(s.wall_time, 4) for s in self.suites}
        return d


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if is_exact_scalar(x):
        return fmt_scalar(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (float, np.floating)):
        return float(x)
    return x


class Skip(Exception):
    pass


class Context:
    """Lazily built objects shared by the suites of one run."""

    def __init__(self, cfg: RunConfig, cache: OperatorCache):
        self.cfg = cfg
        self.cache = cache
        self.spec = cfg.chain_spec()
        self.exact_spec = cfg.chain_spec(exact=True)
        self.rng = np.random.default_rng(cfg.seed)
        self.extra: dict = {}

    def rationals(self, n: int, avoid=()) -> list:
        out = []
        while len(out) < n:
            q = mpq(int(self.rng.integers(-40, 41)), int(self.rng.integers(1, 13)))
            if q not in out and q not in avoid:
                out.append(q)
        return [self.spec.ring.scalar(q) for q in out]

    @cached_property
    def monodromy(self):
        return build_monodromy(self.spec)

    @cached_property
    def exact_monodromy(self):
        return self.monodromy if self.spec.ring.exact else build_monodromy(self.exact_spec)

    @cached_property
    def B(self):
        m = self.monodromy
        return self.cache.get_or_build(self.spec, "B", lambda: build_B(m), b_payload,
                                       b_from_payload(self.spec.ring), include_z=False)

    @cached_property
    def basis(self):
        if not self.spec.rectangular:
            raise Skip("SoV basis needs a rectangular representation")
        m = self.monodromy
        return self.cache.get_or_build(self.spec, "sov-basis", lambda: build_sov_basis(m),
                                       basis_payload, basis_from_payload(self.spec), include_z=False)

    @cached_property
    def exact_basis(self):
        if not self.spec.rectangular:
            raise Skip("SoV basis needs a rectangular representation")
        if self.spec.ring.exact:
            return self.basis
        spec = self.exact_spec
        m = self.exact_monodromy
        return self.cache.get_or_build(spec, "sov-basis", lambda: build_sov_basis(m),
                                       basis_payload, basis_from_payload(spec), include_z=False)

    @cached_property
    def eigen(self):
        if not self.spec.rectangular:
            raise Skip("Q-system suites need a rectangular representation")
        return diagonalize_bethe(self.exact_monodromy, seed=self.cfg.seed)

    @cached_property
    def qsystems(self):
        spec = self.exact_spec
        return [q_system(e, spec) for e in self.eigen]


def _rel(ctx: Context, res, *ops):
    """Float mode reports residuals relative to the operand size; exact mode keeps them raw."""
    if ctx.spec.ring.exact:
        return res
    return res / max(1.0, *(max_abs(o) for o in ops))


def _le(x, tol) -> bool:
    return bool(x <= tol) if not is_exact_scalar(x) or tol != 0 else x == 0


# suites -------------------------------------------------------------------------

def suite_rtt(ctx: Context) -> tuple:
    worst = mpq(0) if ctx.spec.ring.exact else 0.0
    m = ctx.monodromy
    for _ in range(5):
        u, v = ctx.rationals(2)
        scale = max(max_abs(x) for row in m.at(u) for x in row) * max(max_abs(x) for row in m.at(v) for x in row)
        worst = max(worst, _rel(ctx, rtt_residual(m, u, v), scale))
    return {"rtt": worst}, {"pairs": 5}


def suite_b_spectrum(ctx: Context) -> tuple:
    b = ctx.B
    u0, v0, p1, p2 = ctx.rationals(4)
    bu, bv = b(u0), b(v0)
    comm = _rel(ctx, max_abs(commutator(bu, bv)), max_abs(bu) * max_abs(bv))
    rep = spectrum_check(b, ctx.spec, [p1, p2])
    counts = {"matched": rep.matched, "unmatched": rep.unmatched, "states": rep.total,
              "dim": ctx.monodromy.dim}
    ok = rep.ok and rep.total == ctx.monodromy.dim
    return {"commutator": comm, "spectrum_mismatch": 0 if ok else 1}, counts


def suite_sov_basis(ctx: Context) -> tuple:
    basis = ctx.basis
    pts = ctx.rationals(3)
    res = b_eigen_residual(basis, ctx.B, pts)
    rank = basis.rank()
    dim = ctx.monodromy.dim
    return ({"b_eigen": res, "rank_deficit": dim - rank},
            {"tuples": len(basis.tuples), "rank": rank, "dim": dim})


def _alt_z(spec: ChainSpec) -> list:
    pool = [17, 19, 23, 29, 31, 37, 41]
    return [spec.ring.scalar(v) for v in pool[:spec.N]]


def suite_twist(ctx: Context) -> tuple:
    if not ctx.spec.rectangular:
        raise Skip("SoV basis needs a rectangular representation")
    r = twist_independence_check(ctx.monodromy, _alt_z(ctx.spec))
    return {"max_difference": r["max_difference"]}, {"covectors": r["count"], "twists": 3}


def suite_hirota(ctx: Context) -> tuple:
    m = ctx.monodromy
    G = companion_twist(ctx.spec.z)
    A, S = ctx.spec.rect_AS if ctx.spec.rectangular else (1, max(ctx.spec.weight))
    worst = mpq(0) if ctx.spec.ring.exact else 0.0
    pts = ctx.rationals(2)
    for s in range(1, S + 2):
        for u in pts:
            res = hirota_residual(m, G, s, u)
            if not ctx.spec.ring.exact:
                res = _rel(ctx, res, fused_transfer(m, G, Partition([s + 1]), u))
            worst = max(worst, res)
    return {"hirota": worst}, {"levels": S + 1, "points": len(pts)}


def _flatten(d, prefix=""):
    out = {}
    for k, v in d.items():
        if isinstance(v, dict):
            out.update(_flatten(v, f"{prefix}{k}."))
        elif k != "steps":
            out[prefix + k] = v
    return out


def suite_shortening(ctx: Context) -> tuple:
    spec = ctx.spec
    if not spec.rectangular:
        raise Skip("shortening conditions are stated for rectangular representations")
    A, _ = spec.rect_AS
    if A >= spec.N:
        raise Skip("A = N has no shortening conditions")
    from .young import enumerate_tuples
    tuples = enumerate_tuples(spec.N, A, spec.rect_AS[1], spec.L)
    picks = sorted({0, len(tuples) // 2, len(tuples) - 1})
    pts = ctx.rationals(2)
    G = companion_twist(spec.z)
    worst: dict = {}
    for i in picks:
        t = tuples[i]
        steps = [[t[a].rows[k] for a in range(spec.L)] for k in reversed(range(spec.N - A))]
        flat = _flatten(shortening_suite(ctx.monodromy, G, steps[:1], pts))
        flat.update({f"full.{k}": v for k, v in _flatten(shortening_suite(ctx.monodromy, G, steps, pts)).items()})
        for k, v in flat.items():
            worst[k] = max(worst.get(k, 0), v)
    return worst, {"tuples": len(picks)}


def suite_qsystem(ctx: Context) -> tuple:
    spec = ctx.exact_spec
    A, S = spec.rect_AS
    m = ctx.exact_monodromy
    G = companion_twist(spec.z)
    shapes = [mu for mu in partitions_in_box(A, S) if mu.size]
    fused = {(mu, a): np.array(fused_transfer(m, G, mu, th), dtype=complex)
             for mu in shapes for a, th in enumerate(spec.theta)}
    wr, wr_fused, qq, eig, books = 0.0, 0.0, 0.0, 0.0, 0
    rows = []
    for e, q in zip(ctx.eigen, ctx.qsystems):
        v = e.vector
        wr = max(wr, wronskian_defect(q, e))
        meas = {k: np.vdot(v, M @ v) / np.vdot(v, v) for k, M in fused.items()}
        scale = max(1e-300, max(abs(x) for x in meas.values()))
        for (mu, a), x in meas.items():
            pred = wronskian_transfer(q, mu, complex(spec.theta[a]))
            wr_fused = max(wr_fused, abs(pred - x) / scale)
        qq = max(qq, qq_residual(q))
        eig = max(eig, e.residual)
        books += int(degree_bookkeeping(m, e, q))
        rows.append({"state": e.label, "degrees": q.degrees(),
                     "t1": [e.t[1](complex(th)) for th in spec.theta]})
    ctx.extra["eigen_table"] = rows
    n = len(ctx.eigen)
    return ({"wronskian": wr, "wronskian_fused_theta": wr_fused, "qq": qq, "eigen": eig,
             "missing_states": m.dim - n, "bookkeeping_failures": n - books},
            {"states": n, "dim": m.dim, "shapes": len(shapes)})


def suite_wavefunction(ctx: Context) -> tuple:
    spec = ctx.exact_spec
    A, _ = spec.rect_AS
    basis = ctx.exact_basis
    rep = ctx.exact_monodromy.rep
    sets = [tuple(range(A)), tuple(range(spec.N - A, spec.N))]
    spread, gen, vac = 0.0, 0.0, 0.0
    vecs = []
    for e, q in zip(ctx.eigen, ctx.qsystems):
        pair = basis_pairing(basis, e.vector)
        consts = []
        for I in sets:
            sl = np.array([slater_wavefunction(q, t, I) for t in basis.tuples])
            r = pair / sl
            spread = max(spread, float(np.max(np.abs(r - r[0])) / abs(r[0])))
            consts.append(r[0])
        vecs.append(pair / np.linalg.norm(pair))
        tau = generate_state(q, default_sigma(spec.N), sets[0], basis, rep)
        gen = max(gen, overlap_defect(tau, e.vector))
        vac = max(vac, abs(basis_pairing(basis, tau)[0] - 1))
    W = np.array(vecs)
    gram = np.abs(W.conj() @ W.T) - np.eye(len(vecs))
    separating = float(np.max(gram)) < 1 - 1e-6 if len(vecs) > 1 else True
    return ({"ratio_spread": spread, "generation": gen, "vacuum_normalisation": vac,
             "non_separating": 0 if separating else 1},
            {"states": len(vecs), "tuples": len(basis.tuples), "index_sets": len(sets)})


def _sigmas(N: int) -> list:
    first = default_sigma(N)
    second = tuple([first[-1]] + list(first[:-1]))
    return [first, second]


def suite_overlap(ctx: Context) -> tuple:
    spec = ctx.exact_spec
    basis = ctx.exact_basis
    rep = ctx.exact_monodromy.rep
    X = basis.matrix(normalized=True)
    worst = mpq(0)
    for sigma in _sigmas(spec.N):
        omega, _ = omega_state(sigma, spec, rep)
        ov = X.dot(omega)
        for r, t in enumerate(basis.tuples):
            pred = schur_overlap_prediction(t, spec, sigma)
            worst = max(worst, abs(ov[r] - pred) / max(abs(pred), mpq(1)))
    return {"relative": worst}, {"tuples": len(basis.tuples), "sigmas": 2}


def suite_ladder(ctx: Context) -> tuple:
    if ctx.spec.N != 2:
        raise Skip("ladder identities are for N = 2")
    r = n2_ladder_check(ctx.monodromy)
    return r, {"levels": ctx.spec.rect_AS[1]}


def suite_b_product(ctx: Context) -> tuple:
    spec = ctx.exact_spec
    if not spec.rectangular or spec.rect_AS[0] != 1:
        raise Skip("B-product generation needs A = 1")
    b = build_B(ctx.exact_monodromy) if not ctx.spec.ring.exact else ctx.B
    rep = ctx.exact_monodromy.rep
    worst = 0.0
    checked = 0
    for e, q in zip(ctx.eigen, ctx.qsystems):
        for i in range(1, spec.N + 1):
            worst = max(worst, overlap_defect(b_product_state(q, i, b, rep), e.vector))
            checked += 1
    return {"alignment": worst}, {"states": len(ctx.eigen), "products": checked}


SUITE_FUNCS = {"rtt": suite_rtt, "b-spectrum": suite_b_spectrum, "sov-basis": suite_sov_basis,
               "twist-independence": suite_twist, "hirota": suite_hirota,
               "shortening": suite_shortening, "qsystem": suite_qsystem,
               "wavefunction": suite_wavefunction, "overlap": suite_overlap,
               "ladder-n2": suite_ladder, "b-product": suite_b_product}


def run_suite(cfg: RunConfig, cache: Optional[OperatorCache] = None) -> Report:
    """Run the requested suites in dependency order; failures are recorded, not raised."""
    if isinstance(cfg, dict):
        cfg = RunConfig.from_dict(cfg)
    cache = cache or OperatorCache(cfg.cache_dir or ".glsov-cache", enabled=cfg.cache_dir is not None)
    ctx = Context(cfg, cache)
    results = []
    for name in cfg.suite_list():
        t0 = time.perf_counter()
        try:
            residuals, counts = SUITE_FUNCS[name](ctx)
            tol = cfg.tolerance(name)
            ok = all(_le(v, tol) for v in residuals.values())
            res = SuiteResult(name, "pass" if ok else "fail", residuals, counts)
        except Skip as exc:
            res = SuiteResult(name, "skip", note=str(exc))
        except Exception as exc:  # noqa: BLE001  reported, suite continues
            log.exception("suite %s failed", name)
            res = SuiteResult(name, "fail", note=f"{type(exc).__name__}: {exc}")
        res.wall_time = time.perf_counter() - t0
        results.append(res)
    env = {"version": __version__, "seed": cfg.seed, "ring": cfg.ring,
           "python": platform.python_version(), "numpy": np.__version__}
    return Report(cfg.to_dict(), results, env, cache.summary(), ctx.extra)


# output -------------------------------------------------------------------------

def report_text(reports) -> str:
    lines = []
    for r in reports:
        name = r.config.get("name") or json.dumps(r.config["spec"], sort_keys=True)
        for s in r.suites:
            worst = ", ".join(f"{k}={_short(v)}" for k, v in s.residuals.items())
            lines.append(f"{name:<28} {s.name:<19} {s.status.upper():<5} {worst or s.note}")
    return "\n".join(lines) + "\n"


def _short(v):
    if is_exact_scalar(v):
        return fmt_scalar(v)
    if isinstance(v, float):
        return f"{v:.2e}"
    return str(v)


def report_json(reports, timing: bool = True) -> str:
    return json.dumps([r.to_dict(timing) for r in reports], indent=2)


def report_csv(reports) -> dict:
    """Two tables: one row per suite, and one row per eigenstate where a Q-system suite ran."""
    suites = io.StringIO()
    w = csv.writer(suites, lineterminator="\n")
    w.writerow(["config", "suite", "status", "residual", "value"])
    for r in reports:
        name = r.config.get("name", "")
        for s in r.suites:
            for k, v in (s.residuals or {"": ""}).items():
                w.writerow([name, s.name, s.status, k, _short(v)])
    states = io.StringIO()
    w = csv.writer(states, lineterminator="\n")
    w.writerow(["config", "state", "degrees", "t1_at_theta"])
    for r in reports:
        for row in r.extra.get("eigen_table", []):
            w.writerow([r.config.get("name", ""), row["state"], " ".join(map(str, row["degrees"])),
                        " ".join(f"{c.real:.12g}{c.imag:+.12g}j" for c in row["t1"])])
    return {"suites.csv": suites.getvalue(), "states.csv": states.getvalue()}


def emit_report(reports, fmt: str, out_dir) -> list:
    """Write report files (json, csv or text) into out_dir; returns the paths."""
    if isinstance(reports, Report):
        reports = [reports]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt == "json":
        files = {"report.json": report_json(reports)}
    elif fmt == "csv":
        files = report_csv(reports)
    elif fmt == "text":
        files = {"summary.txt": report_text(reports)}
    else:
        raise ValueError(f"unknown format {fmt!r}")
    for name, body in files.items():
        p = out / name
        p.write_text(body)
        written.append(p)
    return written


# reference configurations ---------------------------------------------------------

DEFINING_32 = {"N": 3, "L": 2, "A": 1, "S": 1, "theta": ["0", "1/3"], "z": [2, 3, 5]}


def reference_configs() -> list:
    """The desk-scale configurations behind the acceptance criteria."""
    runs = [
        ("N2-L2-S1", {"N": 2, "L": 2, "S": 1}, ["rtt", "b-spectrum", "sov-basis", "twist-independence",
                                                "hirota", "ladder-n2", "qsystem", "wavefunction",
                                                "overlap", "b-product"]),
        ("N3-L2-defining", DEFINING_32, ["rtt", "b-spectrum", "sov-basis", "twist-independence",
                                         "hirota", "shortening", "qsystem", "wavefunction",
                                         "overlap", "b-product"]),
        ("N3-L1-nu210", {"N": 3, "L": 1, "nu": [2, 1, 0]}, ["rtt", "b-spectrum", "hirota"]),
        ("N4-L1-S1", {"N": 4, "L": 1, "S": 1}, ["rtt", "b-spectrum", "sov-basis", "twist-independence"]),
        ("N3-L1-S2", {"N": 3, "L": 1, "S": 2}, ["b-spectrum", "sov-basis", "twist-independence",
                                                 "hirota", "shortening", "qsystem", "wavefunction"]),
        ("N2-L2-S2", {"N": 2, "L": 2, "S": 2}, ["b-spectrum", "sov-basis", "twist-independence",
                                                 "hirota", "ladder-n2", "qsystem", "wavefunction",
                                                 "overlap", "b-product"]),
        ("N3-L2-A2", {"N": 3, "L": 2, "A": 2, "S": 1}, ["sov-basis", "twist-independence", "hirota",
                                                        "shortening", "qsystem", "wavefunction",
                                                        "overlap"]),
    ]
    return [RunConfig.from_dict({"name": n, "spec": s, "suites": su}) for n, s, su in runs]
