"""Regression harness: rebuild the published design tables from stored configs.

Each fixture in ``data/tables/tN.json`` holds a run configuration, the rows
or grid to rebuild, the printed numbers and per-cell tolerances.  Kinds:

``sensitivity``
    re-optimise under several priors/weights; compare levels with print.
``roster``
    shared-draw efficiencies of catalog designs against the optimum.
``local_grid``
    two-factor locally D-optimal designs scored across true powers.
``priors``
    echo of the discrete power priors.
``bayes_grid`` / ``bayes_local``
    pseudo-Bayesian two-factor designs scored under each prior.

Efficiency references are the best design known for the scoring prior:
the search result, or any design in the table that beats it.
"""
from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .config import ConfigError, RunConfig, parse_config, run_search
from .criterion import Objective, efficiency_from_values
from .information import Design
from .onefactor import as_power
from .report import Table, fmt_eff, fmt_level, fmt_levels, fmt_reps
from .search import coordinate_exchange

TABLE_IDS = tuple(f"t{i}" for i in range(1, 19))


@dataclass
class Cell:
    row: str
    column: str
    value: float
    paper: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return math.isfinite(self.value) and abs(self.value - self.paper) <= self.tolerance + 1e-9


@dataclass
class TableResult:
    id: str
    table: Table
    cells: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def n_ok(self) -> int:
        return sum(c.ok for c in self.cells)

    def summary(self) -> str:
        return f"{self.id}: cells within tolerance {self.n_ok}/{len(self.cells)}"

    def render(self, fmt: str) -> str:
        self.table.data = {"cells": [dict(row=c.row, column=c.column, value=_round(c.value),
                                          paper=c.paper, tolerance=c.tolerance, ok=c.ok)
                                     for c in self.cells], **self.data}
        return self.table.render(fmt)


def _round(x, nd=6):
    return round(float(x), nd) if math.isfinite(x) else None


def load_fixture(table_id: str) -> dict:
    if table_id not in TABLE_IDS:
        raise ConfigError(f"unknown table id {table_id!r}; choose from t1..t18")
    text = resources.files("fpdesign").joinpath("data", "tables", f"{table_id}.json").read_text()
    return json.loads(text)


def _with_overrides(raw: dict, seed=None, tries=None) -> dict:
    raw = copy.deepcopy(raw)
    if seed is not None:
        raw.setdefault("prior", {}).setdefault("draws", {})["seed"] = int(seed)
        raw.setdefault("search", {})["seed"] = int(seed)
    if tries is not None:
        raw.setdefault("search", {})["tries"] = int(tries)
    return raw


# Search results are cached per process: table pairs share their configs.
_CACHE: dict = {}


def _key(*parts) -> str:
    return json.dumps(parts, sort_keys=True, default=str)


def optimum(cfg: RunConfig, threads: int = 1):
    """Configured search on the configured prior (cached)."""
    k = _key("opt", cfg.raw)
    if k not in _CACHE:
        obj = cfg.objective()
        _CACHE[k] = (obj, run_search(cfg, obj, threads))
    return _CACHE[k]


def clear_cache():
    _CACHE.clear()


def run_table(table_id: str, threads: int = 1, seed: int | None = None,
              tries: int | None = None) -> TableResult:
    """Rebuild one table and diff it against the printed values."""
    fx = load_fixture(table_id)
    runner = _RUNNERS[fx["kind"]]
    result = runner(fx, threads, seed, tries)
    result.table.notes.append(result.summary())
    return result


# ---------------------------------------------------------------- one factor

def group_levels(design: Design, targets) -> list:
    """Rep-weighted mean level of the design points nearest to each target.

    Adjacent grid points that split one support point are merged this way
    before comparison with printed levels; a target that attracts no design
    point gets ``nan``.
    """
    targets = np.asarray(targets, dtype=float)
    sums = np.zeros(len(targets))
    reps = np.zeros(len(targets))
    for x, r in zip(design.levels, design.reps):
        j = int(np.argmin(np.abs(targets - x)))
        sums[j] += r * x
        reps[j] += r
    with np.errstate(invalid="ignore", divide="ignore"):
        return list(np.where(reps > 0, sums / np.where(reps > 0, reps, 1), np.nan))


def _sensitivity(fx, threads, seed, tries):
    base = _with_overrides(fx["config"], seed, tries)
    tol = fx["tolerance"]["level"]
    table = Table(fx["title"], ["case", "levels", "reps", "criterion", "paper levels",
                                "paper reps", "max level diff"])
    cells, designs = [], []
    for case in fx["cases"]:
        raw = copy.deepcopy(base)
        raw["n"] = case["n"]
        raw["prior"]["gamma"] = case["gamma"]
        raw["criterion"]["weights"] = case["weights"]
        cfg = parse_config(raw)
        _, res = optimum(cfg, threads)
        printed = case["paper"]["levels"]
        grouped = group_levels(res.design, printed)
        diffs = []
        for target, got in zip(printed[1:-1], grouped[1:-1]):
            cells.append(Cell(case["label"], f"level {target}", got, target, tol))
            diffs.append(abs(got - target) if math.isfinite(got) else math.inf)
        designs.append({"label": case["label"], "levels": [float(x) for x in res.design.levels],
                        "reps": [int(r) for r in res.design.reps],
                        "grouped": [_round(g, 4) for g in grouped]})
        table.add(case["label"], fmt_levels(res.design), fmt_reps(res.design), f"{res.value:.10g}",
                  " ".join(fmt_level(x) for x in printed),
                  " ".join(str(r) for r in case["paper"]["reps"]), f"{max(diffs):.4f}")
    return TableResult(fx["id"], table, cells, {"designs": designs})


def _roster(fx, threads, seed, tries):
    cfg = parse_config(_with_overrides(fx["config"], seed, tries))
    obj, res = optimum(cfg, threads)
    tol = fx["tolerance"]["efficiency"]
    p = cfg.model.n_params
    entries = []
    for row in fx["rows"]:
        d = cfg.resolve_design(row["design"])
        entries.append((row, d, obj.report(d).value))
    values = [res.value] + [v for _, _, v in entries]
    ref = min(values) if cfg.kind != "D" else max(values)
    table = Table(fx["title"], ["design", "levels", "reps", "criterion", "efficiency", "paper",
                                "diff", "flag"])
    table.add("optimal (this run)", fmt_levels(res.design), fmt_reps(res.design),
              f"{res.value:.10g}", fmt_eff(efficiency_from_values(res.value, ref, cfg.kind, p)),
              "", "", "reference" if res.value == ref else "")
    cells, rows = [], []
    for row, d, v in entries:
        eff = efficiency_from_values(v, ref, cfg.kind, p)
        printed = row["paper"]["efficiency"]
        flags = []
        if not math.isfinite(v):
            flags.append("singular")
        if not _same_design(d, row["paper"]):
            flags.append("levels differ from print")
        cells.append(Cell(row["label"], "efficiency", eff, printed, tol))
        rows.append({"label": row["label"], "efficiency": _round(eff, 4), "paper": printed})
        table.add(row["label"], fmt_levels(d), fmt_reps(d), f"{v:.10g}", fmt_eff(eff),
                  fmt_eff(printed), f"{eff - printed:+.2f}", "; ".join(flags))
    data = {"optimum": {"levels": [float(x) for x in res.design.levels],
                        "reps": [int(r) for r in res.design.reps], "value": res.value},
            "rows": rows}
    if "note" in fx:
        table.notes.append("note: " + fx["note"])
    return TableResult(fx["id"], table, cells, data)


def _same_design(d: Design, printed: dict, tol: float = 5e-4) -> bool:
    lv = np.asarray(printed["levels"], dtype=float)
    return (len(lv) == d.k and np.all(np.abs(d.levels - lv) <= tol)
            and list(d.reps) == list(printed["reps"]))


# ---------------------------------------------------------------- two factors

def _pair_label(a, b) -> str:
    return f"({_alpha_str(a)},{_alpha_str(b)})"


def _alpha_str(a) -> str:
    return {-0.5: "-1/2", 0.5: "1/2"}.get(float(as_power(a)), f"{float(as_power(a)):g}")


def _local_objective(cfg: RunConfig, a1, a2) -> Objective:
    theta = cfg.model.make_params(cfg.prior_means(), [as_power(a1), as_power(a2)])
    return Objective(cfg.model, [theta], "D")


def local_design(cfg: RunConfig, a1, a2, threads: int = 1):
    """Locally D-optimal two-factor design at powers ``(a1, a2)`` (cached)."""
    k = _key("local", cfg.raw, float(as_power(a1)), float(as_power(a2)))
    if k not in _CACHE:
        obj = _local_objective(cfg, a1, a2)
        _CACHE[k] = coordinate_exchange(cfg.search_config(obj, threads))
    return _CACHE[k]


def prior_config(raw: dict, support, priors: dict, name: str) -> RunConfig:
    """Config with the two power priors named like ``U1S2`` (factor 1: U, factor 2: S)."""
    raw = copy.deepcopy(raw)
    raw["prior"]["alpha"] = [{"support": support, "mass": priors[name[0]]},
                             {"support": support, "mass": priors[name[2]]}]
    return parse_config(raw)


def _grid_table(fx, columns, row_labels, grid, paper_grid, tol, extra_cells=()):
    table = Table(fx["title"], ["truth/prior"] + columns)
    cells = []
    for label, vals, pvals in zip(row_labels, grid, paper_grid):
        table.add(label, *[f"{v:.1f} ({p:.1f})" for v, p in zip(vals, pvals)])
        for c, v, pv in zip(columns, vals, pvals):
            cells.append(Cell(label, c, v, pv, tol))
    for name, vals, pvals, t in extra_cells:
        table.add(name, *[f"{v:.1f} ({p:.1f})" for v, p in zip(vals, pvals)])
        for c, v, pv in zip(columns, vals, pvals):
            cells.append(Cell(name, c, v, pv, t))
    table.notes.append("cells: this run (printed)")
    return table, cells


def _losses(grid):
    loss = 100.0 - np.asarray(grid)
    return loss.mean(axis=0), loss.max(axis=0)


def _local_grid(fx, threads, seed, tries):
    cfg = parse_config(_with_overrides(fx["config"], seed, tries))
    alphas = fx["design_alphas"]
    designs = [local_design(cfg, a, a, threads).design for a in alphas]
    p = cfg.model.n_params
    grid = []
    for a1, a2 in fx["truths"]:
        obj = _local_objective(cfg, a1, a2)
        vals = [obj.report(d).value for d in designs]
        ref = max(vals + [local_design(cfg, a1, a2, threads).value])
        grid.append([efficiency_from_values(v, ref, "D", p) for v in vals])
    mean_loss, max_loss = _losses(grid)
    tol = fx["tolerance"]["efficiency"]
    columns = [f"alpha={_alpha_str(a)}" for a in alphas]
    paper = fx["paper"]
    table, cells = _grid_table(
        fx, columns, [_pair_label(*t) for t in fx["truths"]], grid, paper["grid"], tol,
        [("mean loss", mean_loss, paper["mean_loss"], tol), ("max loss", max_loss, paper["max_loss"], tol)])
    data = {"grid": np.round(grid, 6).tolist(), "mean_loss": np.round(mean_loss, 6).tolist(),
            "max_loss": np.round(max_loss, 6).tolist(),
            "designs": {str(a): d.to_dict() for a, d in zip(alphas, designs)}}
    return TableResult(fx["id"], table, cells, data)


def _priors(fx, threads, seed, tries):
    support = [_alpha_str(a) for a in fx["support"]]
    table = Table(fx["title"], ["prior"] + [f"alpha={s}" for s in support])
    cells = []
    for name, mass in fx["priors"].items():
        table.add(name, *[f"{m:.2f}" for m in mass])
        for s, m, pm in zip(support, mass, fx["paper"]["priors"][name]):
            cells.append(Cell(name, s, m, pm, fx["tolerance"]["mass"]))
    return TableResult(fx["id"], table, cells, {"priors": fx["priors"]})


def bayes_design(raw: dict, support, priors, name, threads: int = 1):
    """Pseudo-Bayesian D-optimal design under the named prior pair (cached)."""
    k = _key("bayes", raw, support, priors, name)
    if k not in _CACHE:
        cfg = prior_config(raw, support, priors, name)
        obj = cfg.objective()
        _CACHE[k] = (obj, run_search(cfg, obj, threads))
    return _CACHE[k]


def _bayes_grid(fx, threads, seed, tries):
    raw = _with_overrides(fx["config"], seed, tries)
    sup, pri = fx["support"], fx["priors"]
    designs = [bayes_design(raw, sup, pri, nm, threads)[1].design for nm in fx["designs"]]
    p = parse_config(raw).model.n_params
    grid = []
    for row in fx["rows"]:
        obj, res = bayes_design(raw, sup, pri, row, threads)
        vals = [obj.report(d).value for d in designs]
        ref = max(vals + [res.value])
        grid.append([efficiency_from_values(v, ref, "D", p) for v in vals])
    return _bayes_result(fx, fx["designs"], grid)


def _bayes_local(fx, threads, seed, tries):
    raw = _with_overrides(fx["config"], seed, tries)
    cfg = parse_config(raw)
    sup, pri = fx["support"], fx["priors"]
    alphas = fx["design_alphas"]
    designs = [local_design(cfg, a, a, threads).design for a in alphas]
    grid = []
    for row in fx["rows"]:
        obj, res = bayes_design(raw, sup, pri, row, threads)
        vals = [obj.report(d).value for d in designs]
        ref = max(vals + [res.value])
        grid.append([efficiency_from_values(v, ref, "D", cfg.model.n_params) for v in vals])
    return _bayes_result(fx, [f"alpha={_alpha_str(a)}" for a in alphas], grid)


def _bayes_result(fx, columns, grid):
    tol = fx["tolerance"]
    paper = fx["paper"]
    mean_loss, max_loss = _losses(grid)
    table, cells = _grid_table(
        fx, list(columns), fx["rows"], grid, paper["grid"], tol["efficiency"],
        [("mean loss", mean_loss, paper["mean_loss"], tol.get("mean_loss", tol["efficiency"])),
         ("max loss", max_loss, paper["max_loss"], tol.get("max_loss", tol["efficiency"]))])
    data = {"grid": np.round(grid, 6).tolist(), "mean_loss": np.round(mean_loss, 6).tolist(),
            "max_loss": np.round(max_loss, 6).tolist()}
    return TableResult(fx["id"], table, cells, data)


_RUNNERS = {"sensitivity": _sensitivity, "roster": _roster, "local_grid": _local_grid,
            "priors": _priors, "bayes_grid": _bayes_grid, "bayes_local": _bayes_local}


__all__ = ["TABLE_IDS", "Cell", "TableResult", "load_fixture", "run_table", "group_levels",
           "local_design", "bayes_design", "optimum", "clear_cache"]
