"""Command-line interface.

    fpdesign optimize --config run.json [--out design.json]
    fpdesign compare  --config run.json
    fpdesign tables   t3 [--strict]
    fpdesign catalog  --family equally_spaced --k 4 --metric-alpha -1/2 --n 12

Exit codes: 0 success, 1 search failure (or ``--strict`` table misses),
2 invalid configuration or arguments.
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys

from . import catalog
from .config import (ConfigError, RunConfig, design_document, dump_design, load_config,
                     run_search)
from .criterion import efficiency_from_values
from .information import SingularInformation
from .onefactor import FactorRange, as_power
from .report import FORMATS, DesignRow, Table, design_table, fmt_levels, fmt_reps, fmt_value
from .tables import TABLE_IDS, run_table

class SearchFailure(RuntimeError):
    """The search finished without a usable (nonsingular) design."""


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("FPDESIGN_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"FPDESIGN_THREADS must be an integer, got {env!r}")
    return 1


def _load(args) -> RunConfig:
    if not args.config:
        raise ConfigError("--config is required")
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    return cfg


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _search(cfg: RunConfig, threads: int):
    objective = cfg.objective()
    try:
        result = run_search(cfg, objective, threads)
    except SingularInformation as exc:
        raise SearchFailure(str(exc)) from exc
    if not math.isfinite(result.value):
        raise SearchFailure("search ended on a design that is singular for every draw")
    return objective, result


def cmd_optimize(args) -> int:
    cfg = _load(args)
    _, result = _search(cfg, _threads(args))
    doc = design_document(result.design, cfg, result.value)
    out = args.out or cfg.raw.get("output")
    if out:
        path = out if os.path.isabs(out) or args.out else os.path.join(cfg.base_dir, out)
        with open(path, "w") as fh:
            fh.write(dump_design(doc))
    table = Table(f"optimal design: {cfg.model_name}, n={cfg.n}, {cfg.kind}",
                  ["levels", "reps", "criterion", "tries"])
    table.add(fmt_levels(result.design), fmt_reps(result.design), fmt_value(result.value),
              " ".join(fmt_value(v) for v in result.per_try_values))
    table.data = {"design": doc, "per_try_values": [float(v) for v in result.per_try_values]}
    if out:
        table.notes.append(f"design written to {out}")
    _emit(table.render(args.format), None)
    return 0


def _candidates(cfg: RunConfig, spec) -> list:
    out = []
    for i, entry in enumerate(spec):
        if not isinstance(entry, dict):
            raise ConfigError(f"candidate {i} must be an object")
        label = entry.get("label", f"candidate {i + 1}")
        ref = entry.get("design", {k: v for k, v in entry.items() if k != "label"})
        out.append((label, cfg.resolve_design(ref)))
    return out


def cmd_compare(args) -> int:
    cfg = _load(args)
    spec = cfg.raw.get("compare")
    if not isinstance(spec, dict):
        raise ConfigError("compare needs a 'compare' section with 'reference' and 'candidates'")
    candidates = _candidates(cfg, spec.get("candidates", []))
    reference = spec.get("reference", "optimal")
    if reference == "optimal":
        objective, result = _search(cfg, _threads(args))
        ref_design, ref_label = result.design, "optimal (search)"
    else:
        objective = cfg.objective()
        ref_design = cfg.resolve_design(reference)
        ref_label = reference.get("label", "reference") if isinstance(reference, dict) else "reference"
    rows = compare_rows(cfg, objective, ref_design, candidates, ref_label)
    table = design_table(f"efficiency comparison: {cfg.model_name}, n={cfg.n}, {cfg.kind}", rows)
    table.data = {"rows": [{"label": r.label, **r.design.to_dict(), "criterion": r.value
                            if math.isfinite(r.value) else None,
                            "efficiency": r.efficiency, "singular": r.singular}
                           for r in rows]}
    _emit(table.render(args.format), args.out)
    return 0


def compare_rows(cfg: RunConfig, objective, reference, candidates: list,
                 ref_label: str = "reference") -> list:
    """Shared-draw rows: the reference at 100, singular candidates at 0."""
    p = cfg.model.n_params
    ref_value = objective.report(reference).value
    if not math.isfinite(ref_value):
        raise ConfigError("the reference design is singular")
    rows = [DesignRow(ref_label, reference, ref_value, 100.0, False, True)]
    for label, d in candidates:
        v = objective.report(d).value
        singular = not math.isfinite(v)
        eff = 0.0 if singular else efficiency_from_values(v, ref_value, cfg.kind, p)
        rows.append(DesignRow(label, d, v, eff, singular))
    return rows


def cmd_tables(args) -> int:
    ids = TABLE_IDS if args.id == "all" else (args.id,)
    if args.id != "all" and args.id not in TABLE_IDS:
        raise ConfigError(f"unknown table id {args.id!r}; choose from t1..t18 or 'all'")
    threads = _threads(args)
    text, missed = [], 0
    for tid in ids:
        result = run_table(tid, threads=threads, seed=args.seed, tries=args.tries)
        missed += len(result.cells) - result.n_ok
        text.append(result.render(args.format))
    _emit("\n".join(text) if args.format == "text" else "".join(text), args.out)
    return 1 if args.strict and missed else 0


def cmd_catalog(args) -> int:
    rng = FactorRange(args.x_min)
    alpha = as_power(args.metric_alpha)
    try:
        if args.family == "equally_spaced":
            design = catalog.equally_spaced(args.k, alpha, args.n, rng)
        elif args.family == "ccd3_projection":
            design = catalog.ccd_projection(3, alpha, args.n, rng)
        elif args.family == "ccd5_projection":
            design = catalog.ccd_projection(5, alpha, args.n, rng)
        else:
            raise ConfigError("locally_optimal designs need a prior; use compare with a config")
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    table = Table(f"{args.family} (metric alpha={args.metric_alpha}, n={args.n}, x_min={args.x_min})",
                  ["level", "reps"])
    for x, r in zip(design.levels, design.reps):
        table.add(f"{x:.4f}", str(int(r)))
    table.data = {"design": {**design.to_dict(), "model": "fp1", "range": {"x_min": args.x_min}}}
    _emit(table.render(args.format), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--seed", type=int, help="override the draw and search seeds")
    common.add_argument("--threads", type=int, help="worker cap (default: $FPDESIGN_THREADS or 1)")
    common.add_argument("--verbose", "-v", action="store_true", help="log search progress")
    common.add_argument("--format", choices=FORMATS, default="text")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")

    parser = argparse.ArgumentParser(prog="fpdesign", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("optimize", parents=[common], help="search for an optimal design")
    sub.add_parser("compare", parents=[common], help="efficiency table for candidate designs")
    p = sub.add_parser("tables", parents=[common], help="rebuild a stored regression table")
    p.add_argument("id", help="t1..t18 or 'all'")
    p.add_argument("--tries", type=int, help="override the number of search tries")
    p.add_argument("--strict", action="store_true", help="exit 1 if any cell is out of tolerance")
    p = sub.add_parser("catalog", parents=[common], help="print a standard comparison design")
    p.add_argument("--family", choices=catalog.FAMILIES, required=True)
    p.add_argument("--k", type=int, default=3, help="number of levels (equally_spaced)")
    p.add_argument("--metric-alpha", default="1", help="spacing metric power, e.g. -1/2")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x-min", type=float, default=0.1)
    return parser


COMMANDS = {"optimize": cmd_optimize, "compare": cmd_compare, "tables": cmd_tables,
            "catalog": cmd_catalog}


def _join_negative_powers(argv: list) -> list:
    # argparse reads "-1/2" as an option; glue it to --metric-alpha instead
    out = []
    for tok in argv:
        if out and out[-1] == "--metric-alpha" and tok.startswith("-"):
            out[-1] = f"--metric-alpha={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_join_negative_powers(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"fpdesign: error: {exc}", file=sys.stderr)
        return 2
    except (SearchFailure, SingularInformation) as exc:
        print(f"fpdesign: search failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
