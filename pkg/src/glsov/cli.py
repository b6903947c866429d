"""Command line entry point: ``glsov {build,spectrum,sov,qsolve,verify,report}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from .harness import (SUITES, RunConfig, emit_report, load_configs, reference_configs, report_text,
                      run_suite)

SUBCOMMAND_SUITES = {
    "build": [],
    "spectrum": ["b-spectrum"],
    "sov": ["sov-basis", "twist-independence"],
    "qsolve": ["qsystem"],
}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="glsov", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in [("build", "build and cache the monodromy, B and the SoV basis"),
                        ("spectrum", "B spectrum against the Gelfand-Tsetlin prediction"),
                        ("sov", "SoV basis checks"),
                        ("qsolve", "diagonalise, solve for Q-functions and export them"),
                        ("verify", "run verification suites"),
                        ("report", "reformat a saved report.json")]:
        s = sub.add_parser(name, help=help_)
        if name == "report":
            s.add_argument("report", help="path to report.json")
            s.add_argument("--format", choices=["text", "json", "csv"], default="text")
            s.add_argument("--out", default=None)
            continue
        s.add_argument("--config", help="JSON run config (one run or {\"runs\": [...]}); "
                                        "defaults to the reference configurations")
        s.add_argument("--suite", action="append", choices=list(SUITES) + ["all"],
                       help="suite to run (repeatable)")
        s.add_argument("--ring", choices=["exact", "float"], default=None)
        s.add_argument("--seed", type=int, default=None)
        s.add_argument("--out", default=None, help="output directory for json/csv/text reports")
        s.add_argument("--cache-dir", default=None)
        s.add_argument("-v", "--verbose", action="store_true")
    return p


def _configs(args) -> list:
    cfgs = load_configs(args.config) if args.config else reference_configs()
    out = []
    for c in cfgs:
        d = c.to_dict()
        if args.ring:
            d["ring"] = args.ring
        if args.seed is not None:
            d["seed"] = args.seed
        if args.cache_dir:
            d["cache_dir"] = args.cache_dir
        if args.command in SUBCOMMAND_SUITES:
            d["suites"] = SUBCOMMAND_SUITES[args.command] or ["rtt"]
        elif args.suite:
            d["suites"] = args.suite
        out.append(RunConfig.from_dict({k: v for k, v in d.items() if v is not None and v != ""}))
    return out


def _build(cfg: RunConfig):
    from .cache import OperatorCache
    from .harness import Context, Skip
    ctx = Context(cfg, OperatorCache(cfg.cache_dir or ".glsov-cache"))
    _ = ctx.monodromy, ctx.B
    try:
        _ = ctx.basis
    except Skip:
        pass
    return ctx.cache.summary()


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "report":
        data = json.loads(Path(args.report).read_text())
        passed = all(r["passed"] for r in data)
        if args.format == "text" or not args.out:
            for r in data:
                name = r["config"].get("name") or json.dumps(r["config"]["spec"])
                for s in r["suites"]:
                    print(f"{name:<28} {s['name']:<19} {s['status'].upper()}")
        else:
            Path(args.out).mkdir(parents=True, exist_ok=True)
            (Path(args.out) / "report.json").write_text(json.dumps(data, indent=2))
        return 0 if passed else 1

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    cfgs = _configs(args)
    if args.command == "build":
        for c in cfgs:
            print(c.name or c.spec, _build(c))
        return 0

    t0 = time.perf_counter()
    reports = [run_suite(c) for c in cfgs]
    sys.stdout.write(report_text(reports))
    out = args.out or (cfgs[0].output if cfgs and cfgs[0].output else None)
    if out:
        for fmt in ("json", "csv", "text"):
            emit_report(reports, fmt, out)
        if args.command == "qsolve":
            _export_q(reports, cfgs, out)
    passed = all(r.passed for r in reports)
    print(f"{'PASS' if passed else 'FAIL'} ({time.perf_counter() - t0:.1f} s)")
    return 0 if passed else 1


def _export_q(reports, cfgs, out):
    from .harness import Context
    from .cache import OperatorCache
    from .qsystem import export_qsystems, qq_residual, wronskian_defect
    for c in cfgs:
        ctx = Context(c, OperatorCache(".", enabled=False))
        if not ctx.spec.rectangular:
            continue
        items = [(q, {"wronskian": wronskian_defect(q, e), "qq": qq_residual(q)})
                 for e, q in zip(ctx.eigen, ctx.qsystems)]
        name = c.name or ctx.spec.hash()
        (Path(out) / f"qsystem-{name}.json").write_text(export_qsystems(items))


if __name__ == "__main__":
    sys.exit(main())
