"""Exact-design optimisers.

All searches minimise ``Objective.loss`` on draws fixed for the whole search,
so the objective is a deterministic function and every run is reproducible
from ``(config, seed)``.  Exchanges accept the best strict improvement for
the run being visited; among equal candidates the lowest candidate index
(the smallest level) wins.
"""
from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .criterion import Objective
from .information import Design
from .priors import make_generator

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10 ** 8


def level_grid(x_min: float, step: float, x_max: float = 1.0) -> np.ndarray:
    """Equally spaced levels from ``x_min`` to ``x_max`` inclusive."""
    m = int(round((x_max - x_min) / step))
    if m < 1 or abs(x_min + m * step - x_max) > 1e-9:
        raise ValueError(f"step {step} does not divide [{x_min}, {x_max}]")
    return np.round(x_min + step * np.arange(m + 1), 10)


@dataclass
class SearchConfig:
    objective: Objective
    n: int
    level_grid: object = None
    tries: int = 3
    seed: int = 0
    max_levels: int | None = None
    min_levels: int | None = None
    fix_endpoints: bool = False
    budget: int = DEFAULT_BUDGET
    threads: int = 1
    max_passes: int = 100

    def __post_init__(self):
        if self.tries < 1:
            raise ValueError("tries must be at least 1")
        if self.n < 1:
            raise ValueError("n must be positive")

    def candidates(self) -> np.ndarray:
        """Candidate points ``(C, q)``: the grid itself or its Cartesian product."""
        grid = self.level_grid
        if grid is None:
            raise ValueError("search needs a level grid")
        if isinstance(grid, (list, tuple)) and grid and np.ndim(grid[0]) == 1:
            return np.array(list(itertools.product(*grid)), dtype=float)
        return np.asarray(grid, dtype=float).reshape(-1, 1)

    def factor_grids(self) -> list:
        grid = self.level_grid
        if isinstance(grid, (list, tuple)) and grid and np.ndim(grid[0]) == 1:
            return [np.asarray(g, dtype=float) for g in grid]
        return [np.asarray(grid, dtype=float)]


@dataclass
class SearchResult:
    design: Design
    value: float
    per_try_values: list
    evaluations: int
    loss: float = math.nan
    histories: list = field(default_factory=list, repr=False)


def _improves(new: float, cur: float) -> bool:
    if not math.isfinite(cur):
        return math.isfinite(new) or new < cur
    return new < cur - 1e-12 * max(1.0, abs(cur))


def _outer(g):
    return g[..., :, None] * g[..., None, :]


def _finish(obj: Objective, design: Design, per_try, evaluations, histories) -> SearchResult:
    report = obj.report(design)
    return SearchResult(design, report.value, per_try, evaluations, report.loss, histories)


def _exchange_runs(obj, gg, runs, max_passes, label=""):
    """Single-point exchange over candidates until a pass brings no gain."""
    runs = np.array(runs)
    m = gg[:, runs].sum(axis=1)
    cur = float(obj.loss_of_info(m))
    history = [cur]
    evaluations = 1
    for npass in range(max_passes):
        improved = False
        for i in range(len(runs)):
            trial = (m - gg[:, runs[i]])[:, None] + gg
            losses = obj.loss_of_info(np.swapaxes(trial, 0, 1))
            evaluations += len(losses)
            b = int(np.argmin(losses))
            if b != runs[i] and _improves(float(losses[b]), cur):
                runs[i] = b
                m = trial[:, b]
                cur = float(losses[b])
                improved = True
        history.append(cur)
        log.info("%s pass %d loss %.10g", label, npass + 1, cur)
        if not improved:
            break
    return runs, cur, history, evaluations


def _initial_runs(gen, cand, n, p):
    c = len(cand)
    fixed = []
    if cand.shape[1] == 1:
        fixed = [int(np.argmin(cand[:, 0])), int(np.argmax(cand[:, 0]))]
        fixed = fixed[:min(n, 2)]
    runs = None
    for _ in range(100):
        runs = np.concatenate([fixed, gen.integers(c, size=n - len(fixed))]).astype(int)
        if len(np.unique(runs)) >= min(p, c):
            break
    return runs


def _run_tries(fn, tries, threads):
    if threads and threads > 1 and tries > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, range(tries)))
    return [fn(t) for t in range(tries)]


def point_exchange(config: SearchConfig, candidates=None, start: Design | None = None) -> SearchResult:
    """Best design over ``config.tries`` random starts, improved by exchanges.

    Each start puts the two end levels in at least one run (one-factor case)
    and fills the rest at random from the candidate set.
    """
    obj = config.objective
    cand = config.candidates() if candidates is None else np.asarray(candidates, float).reshape(len(candidates), -1)
    gg = _outer(obj.sensitivities(cand))

    def one_try(t):
        if start is not None and t == 0:
            runs = _match_runs(start, cand)
        else:
            runs = _initial_runs(make_generator(config.seed + t), cand, config.n, obj.p)
        return _exchange_runs(obj, gg, runs, config.max_passes, label=f"try {t}")

    results = _run_tries(one_try, config.tries, config.threads)
    losses = [r[1] for r in results]
    best = int(np.argmin(losses))
    design = Design.from_runs(cand[results[best][0]])
    per_try = [(-l if obj.kind == "D" else l) for l in losses]
    return _finish(obj, design, per_try, sum(r[3] for r in results), [r[2] for r in results])


def _match_runs(design: Design, cand):
    runs = []
    for pt in design.runs():
        d = np.abs(cand - pt).max(axis=1)
        j = int(np.argmin(d))
        if d[j] > 1e-9:
            raise ValueError(f"design point {pt} is not in the candidate set")
        runs.append(j)
    return np.array(runs)


def compositions(n: int, k: int) -> np.ndarray:
    """All ways to write ``n`` as an ordered sum of ``k`` positive integers."""
    if k < 1 or k > n:
        return np.zeros((0, k), dtype=int)
    rows = []
    for cuts in itertools.combinations(range(1, n), k - 1):
        bounds = (0,) + cuts + (n,)
        rows.append([bounds[i + 1] - bounds[i] for i in range(k)])
    return np.array(rows, dtype=int)


def complete_search(config: SearchConfig) -> SearchResult:
    """Exhaustive search over level subsets and their replication patterns.

    Subsets have between ``min_levels`` (default: number of parameters) and
    ``max_levels`` levels; with ``fix_endpoints`` the first and last grid
    levels are always included.
    """
    obj = config.objective
    if config.max_levels is None:
        raise ValueError("complete search needs max_levels")
    cand = config.candidates()
    n_cand = len(cand)
    lo = config.min_levels or min(obj.p, config.n)
    hi = min(config.max_levels, config.n, n_cand)
    fixed = (0, n_cand - 1) if config.fix_endpoints else ()
    free = [i for i in range(n_cand) if i not in fixed]

    size = 0
    for k in range(lo, hi + 1):
        if k < len(fixed):
            continue
        size += math.comb(len(free), k - len(fixed)) * math.comb(config.n - 1, k - 1)
    if size > config.budget:
        raise ValueError(f"complete search would evaluate {size} designs (budget {config.budget}); "
                         "use a coarser grid, fix the end levels, or use point_exchange")

    gg = _outer(obj.sensitivities(cand))
    best = (math.inf, None)
    evaluations = 0
    for k in range(lo, hi + 1):
        if k < len(fixed):
            continue
        comps = compositions(config.n, k).astype(float)
        if not len(comps):
            continue
        for sub in itertools.combinations(free, k - len(fixed)):
            idx = tuple(sorted(fixed + sub))
            m = np.einsum("ck,dkpq->cdpq", comps, gg[:, idx])
            losses = obj.loss_of_info(m)
            evaluations += len(losses)
            j = int(np.argmin(losses))
            if losses[j] < best[0]:
                best = (float(losses[j]), (idx, comps[j].astype(int)))
    if best[1] is None:
        raise ValueError("no nonsingular design found")
    idx, reps = best[1]
    design = Design(cand[list(idx)], reps)
    result = _finish(obj, design, [], evaluations, [])
    result.per_try_values = [result.value]
    return result


def refine(design: Design, config: SearchConfig, window: float, step: float) -> SearchResult:
    """Exchange over a fine grid around the interior levels of ``design``.

    The candidate set holds the end levels plus ``step``-spaced points within
    ``window`` of every interior level; the exchange starts from ``design``.
    """
    obj = config.objective
    if window <= 0:
        return _finish(obj, design, [obj.report(design).value], 1, [])
    grid = config.factor_grids()[0]
    lo, hi = float(grid.min()), float(grid.max())
    m = int(round(window / step))
    pts = {round(lo, 10), round(hi, 10)}
    for v in design.levels:
        pts.add(round(float(v), 10))
        if lo < v < hi:
            for j in range(-m, m + 1):
                x = round(float(v) + j * step, 10)
                if lo <= x <= hi:
                    pts.add(x)
    cand = np.array(sorted(pts))[:, None]
    sub = SearchConfig(obj, design.n, cand[:, 0], tries=1, seed=config.seed,
                       max_passes=config.max_passes)
    result = point_exchange(sub, candidates=cand, start=design)
    if result.loss > obj.loss(design):
        return _finish(obj, design, result.per_try_values, result.evaluations, result.histories)
    return result


def coordinate_exchange(config: SearchConfig) -> SearchResult:
    """Coordinate exchange for multi-factor designs.

    Each try starts from a random design on the grid, then repeatedly visits
    every run and factor, line-searching that coordinate over its grid with
    the others held fixed, until a full cycle changes nothing.
    """
    obj = config.objective
    grids = config.factor_grids()
    q = len(grids)

    def one_try(t):
        gen = make_generator(config.seed + t)
        idx = np.stack([gen.integers(len(g), size=config.n) for g in grids], axis=1)
        pts = np.stack([grids[j][idx[:, j]] for j in range(q)], axis=1)
        f = obj.sensitivities(pts)
        m = np.einsum("dnp,dnq->dpq", f, f)
        cur = float(obj.loss_of_info(m))
        history = [cur]
        evaluations = 1
        for npass in range(config.max_passes):
            changed = False
            for i in range(config.n):
                for j in range(q):
                    trial_pts = np.repeat(pts[i][None, :], len(grids[j]), axis=0)
                    trial_pts[:, j] = grids[j]
                    g_new = obj.sensitivities(trial_pts)
                    trial = (m - _outer(f[:, i]))[:, None] + _outer(g_new)
                    losses = obj.loss_of_info(np.swapaxes(trial, 0, 1))
                    evaluations += len(losses)
                    b = int(np.argmin(losses))
                    if b != idx[i, j] and _improves(float(losses[b]), cur):
                        idx[i, j] = b
                        pts[i, j] = grids[j][b]
                        f[:, i] = g_new[:, b]
                        m = trial[:, b]
                        cur = float(losses[b])
                        changed = True
            history.append(cur)
            log.info("try %d cycle %d loss %.10g", t, npass + 1, cur)
            if not changed:
                break
        return pts, cur, history, evaluations

    results = _run_tries(one_try, config.tries, config.threads)
    losses = [r[1] for r in results]
    best = int(np.argmin(losses))
    design = Design.from_runs(results[best][0])
    per_try = [(-l if obj.kind == "D" else l) for l in losses]
    return _finish(obj, design, per_try, sum(r[3] for r in results), [r[2] for r in results])
