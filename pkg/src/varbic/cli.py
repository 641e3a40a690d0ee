"""``varbic``: command-line verification harness.

Exit codes: 0 when every entry passes, 1 when any identity fails, 2 for
configuration or parse errors.
"""
from __future__ import annotations

import argparse
import json
import multiprocessing
import os
import sys
from typing import Sequence

from .dsl import DSLError, parse_polynomial, parse_program
from .jetscalar import JetOrderError
from .suites import SUITES, RunConfig, plan, run_entry

__all__ = ["main", "run", "build_report", "render_text", "ConfigError", "SCHEMA_VERSION"]

SCHEMA_VERSION = 1
MAX_CAP = 12
GR_SUITES = {"verify-gr", "verify-linfty", "verify-covariance", "verify-divergence", "verify-bicomplex",
             "oracle-audit"}


# smallest (jet cap, vsym cap) with which each suite's constructions stay in range
MIN_CAPS = {
    "verify-gr": (4, 3),
    "verify-linfty": (3, 3),
    "verify-covariance": (3, 3),
    "verify-divergence": (2, 1),
    "verify-bicomplex": (4, 1),
    "oracle-audit": (4, 3),
    "verify-mech": (2, 1),
}


class ConfigError(ValueError):
    pass


def _read_field_arg(value: str) -> str:
    if os.path.isfile(value):
        with open(value, encoding="utf-8") as fh:
            return fh.read()
    return value


def validate(config: RunConfig) -> None:
    """Raise :class:`ConfigError` before any computation happens."""
    if config.command not in SUITES:
        raise ConfigError(f"unknown suite {config.command!r}")
    if config.command in GR_SUITES:
        if not 1 <= config.dim <= 4:
            raise ConfigError(f"--dim must be between 1 and 4, got {config.dim}")
        if config.dim == 4 and not config.allow_large:
            raise ConfigError("suites at --dim 4 are long-running; pass --allow-large to run them")
    min_jet, min_vsym = MIN_CAPS[config.command]
    if not min_jet <= config.jet_cap <= MAX_CAP:
        raise ConfigError(f"--jet-cap must be between {min_jet} and {MAX_CAP} for {config.command}")
    if not min_vsym <= config.vsym_cap <= MAX_CAP:
        raise ConfigError(f"--vsym-cap must be between {min_vsym} and {MAX_CAP} for {config.command}")
    if config.points < 1:
        raise ConfigError("--points must be positive")
    if config.jobs < 1:
        raise ConfigError("--jobs must be positive")
    if config.samples < 1:
        raise ConfigError("--samples must be positive")
    if config.command == "verify-linfty":
        k = config.k if config.k is not None else config.dim
        if not 1 <= k <= config.dim:
            raise ConfigError(f"--k must be between 1 and the dimension {config.dim}, got {k}")
    if config.command == "verify-mech":
        if not 1 <= config.particles <= 6:
            raise ConfigError("--particles must be between 1 and 6")
        try:
            parse_polynomial(config.potential, [f"q{i}" for i in range(1, config.particles + 1)])
        except DSLError as exc:
            raise ConfigError(f"--potential: {exc}") from None


def _worker(args):
    config, entry_id = args
    return run_entry(config, entry_id)


def _prepare(config: RunConfig) -> None:
    """Build the shared theory once so forked workers inherit it."""
    if config.command in GR_SUITES:
        from .gr import gr_theory
        gr_theory(config.dim, config.jet_cap, config.vsym_cap)


def execute(config: RunConfig, isolate: bool = True) -> list[dict]:
    """Run every entry of the configured suite; records come back in plan order.

    With ``isolate`` each entry runs in a fresh forked worker (``--jobs`` of them at
    a time), which keeps peak memory bounded by the largest single entry.
    """
    ids = [e.id for e in plan(config)]
    if not isolate or "fork" not in multiprocessing.get_all_start_methods():
        return [run_entry(config, i) for i in ids]
    _prepare(config)
    mp = multiprocessing.get_context("fork")
    with mp.Pool(config.jobs, maxtasksperchild=1) as pool:
        return pool.map(_worker, [(config, i) for i in ids], chunksize=1)


def build_report(config: RunConfig, records: list[dict]) -> dict:
    entries = []
    for r in records:
        r = dict(r)
        seconds = r.pop("seconds", None)
        if config.timings:
            r["seconds"] = seconds
        entries.append(r)
    failed = [e["id"] for e in entries if e["status"] != "pass"]
    return {
        "schema": SCHEMA_VERSION,
        "suite": config.command,
        "config": config.public(),
        "summary": {
            "entries": len(entries),
            "passed": len(entries) - len(failed),
            "failed": len(failed),
            "oracle_disagreements": sum(e["oracle"]["disagreements"] for e in entries),
            "printed_display_discrepancies": sum(1 for e in entries
                                                 if e.get("printed_display", {}).get("matches") is False),
        },
        "entries": entries,
    }


def render_text(report: dict) -> str:
    cfg = ", ".join(f"{k}={v}" for k, v in report["config"].items())
    lines = [f"varbic {report['suite']} ({cfg})"]
    width = max((len(e["id"]) for e in report["entries"]), default=0)
    for e in report["entries"]:
        o = e["oracle"]
        oracle = f"oracle: {o['points']} points"
        if o["disagreements"]:
            oracle += f", {o['disagreements']} DISAGREEMENTS"
        line = f"{e['status'].upper():4}  {e['id']:{width}}  {e['description']}  [claims: {e['claims']}; {oracle}]"
        if "seconds" in e:
            line += f" {e['seconds']:.2f}s"
        lines.append(line)
        if e["residual"]:
            res = e["residual"]
            lines.append(f"      residual of {res['claim']} ({res['monomials']} monomials): {res['text']}")
        if o["failing_seed"] is not None:
            lines.append(f"      oracle: first nonzero evaluation at point seed {o['failing_seed']}")
        pd = e.get("printed_display")
        if pd is not None and not pd["matches"]:
            degs = ", ".join(f"({p},{q})" for p, q in pd["difference_bidegrees"])
            lines.append(f"      printed display differs in bidegrees {degs}: {pd['note']}")
    s = report["summary"]
    lines.append(f"summary: {s['entries']} entries, {s['passed']} passed, {s['failed']} failed, "
                 f"{s['oracle_disagreements']} oracle disagreements, "
                 f"{s['printed_display_discrepancies']} printed-display discrepancies")
    return "\n".join(lines) + "\n"


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, ensure_ascii=False) + "\n"
    return render_text(report)


def run(config: RunConfig, isolate: bool = True) -> tuple[dict, int]:
    """Validate, execute and assemble the report; returns ``(report, exit_code)``."""
    validate(config)
    records = execute(config, isolate=isolate)
    report = build_report(config, records)
    return report, 0 if report["summary"]["failed"] == 0 else 1


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=int, default=2, help="spacetime dimension n (1-4)")
    common.add_argument("--jet-cap", type=int, default=6, help="maximal jet order of the metric")
    common.add_argument("--vsym-cap", type=int, default=5, help="maximal derivative order of formal vector fields")
    common.add_argument("--points", type=int, default=20, help="oracle evaluation points per claim")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=20, help="random instances per property entry")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--allow-large", action="store_true", help="permit long-running suites at --dim 4")
    common.add_argument("--field", action="append", default=[],
                        help="vector field definition (DSL string or file); repeatable")
    common.add_argument("--timings", action="store_true", help="include wall times (reports stop being byte-stable)")

    p = argparse.ArgumentParser(prog="varbic", description="Machine-check identities of the variational bicomplex.")
    sub = p.add_subparsers(dest="command", required=True)
    descriptions = {
        "verify-gr": "split identity, Euler operator, Lepage invariance, Noether currents, ∇G = 0",
        "verify-linfty": "homotopy momentum map and L∞ bracket identities",
        "verify-mech": "particle in a polynomial potential",
        "verify-covariance": "covariance of g, δg, g^-1, vol, Γ and ∇δg under diffeomorphisms",
        "verify-divergence": "divergence formulas on random index families",
        "verify-bicomplex": "δ² = 0, d² = 0, δd + dδ = 0 and Leibniz rules on random forms",
        "oracle-audit": "agreement of canonical and randomised zero tests",
    }
    for name in SUITES:
        sp = sub.add_parser(name, parents=[common], help=descriptions[name])
        if name == "verify-linfty":
            sp.add_argument("--k", type=int, help="highest arity checked (default: the dimension)")
        if name == "verify-mech":
            sp.add_argument("--potential", default="0", help="polynomial in q1..qm, e.g. 'q1^2/2'")
            sp.add_argument("--particles", type=int, default=1, help="number of coordinates q^i")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    specs = []
    for value in args.field:
        specs.extend(parse_program(_read_field_arg(value), args.dim))
    names = [s.name for s in specs]
    if len(set(names)) != len(names):
        raise ConfigError("--field defines the same name twice")
    return RunConfig(
        command=args.command, dim=args.dim, jet_cap=args.jet_cap, vsym_cap=args.vsym_cap,
        points=args.points, seed=args.seed, jobs=args.jobs, fmt=args.format,
        allow_large=args.allow_large, k=getattr(args, "k", None), fields=tuple(specs),
        potential=getattr(args, "potential", "0"), particles=getattr(args, "particles", 1),
        samples=args.samples, timings=args.timings,
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        if config.command == "verify-linfty" and config.k is None:
            config.k = config.dim
        report, code = run(config)
    except (ConfigError, DSLError) as exc:
        print(f"varbic: error: {exc}", file=sys.stderr)
        return 2
    except JetOrderError as exc:
        print(f"varbic: error: {exc} (raise --jet-cap or --vsym-cap)", file=sys.stderr)
        return 2
    text = render(report, config.fmt)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
