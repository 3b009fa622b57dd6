"""JSON run configurations.

A run configuration is one JSON document::

    {
      "model": "fp1",                       # fp1 | fp2 | fp2x2
      "range": {"x_min": 0.1},              # fp2x2: {"x1_min": .., "x2_min": ..}
      "n": 12,
      "criterion": {"kind": "weighted-As", "weights": [1, 1]},
      "prior": {
        "alpha": {"support": [-2, -1, "-1/2", 0, "1/2", 1, 2],
                  "mass": [0.15, 0.25, 0.25, 0.15, 0.10, 0.07, 0.03]},
        "gamma": {"gamma1": {"normal": [2.5, 1.5]}},
        "draws": {"method": "sample", "r": 200, "seed": 0, "rng": "philox"}
      },
      "search": {"method": "point_exchange", "grid_step": 0.01, "tries": 3,
                 "seed": 0, "refine": {"window": 0.01, "step": 0.001}},
      "output": "design.json",
      "compare": {"reference": "optimal", "candidates": [ ... ]}
    }

Two-factor models take a list of two ``alpha`` priors.  Gamma priors are
``{"normal": [mean, sd]}`` or ``{"point": value}``.  ``draws.method`` is
``sample`` (Monte Carlo with stratified powers) or ``quadrature``.

Design references inside ``compare`` are either explicit
(``{"levels": [...], "reps": [...]}``), a file (``{"file": "path"}``), a
catalog family (``{"family": "equally_spaced", "k": 4, "metric_alpha": "-1/2"}``,
``ccd3_projection``, ``ccd5_projection``, ``locally_optimal`` with ``alpha``
and optional ``gamma`` point values) or the string ``"optimal"``.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from . import catalog
from .criterion import KINDS, Objective, WeightSpec
from .information import Design
from .onefactor import FactorRange, FirstOrderFP, SecondOrderFP, as_power
from .priors import AlphaPrior, GammaPrior, PriorSpec, quadrature_draws, sample_draws
from .search import (SearchConfig, SearchResult, complete_search, coordinate_exchange,
                     level_grid, point_exchange, refine)
from .twofactor import TwoFactorFP, TwoFactorRange

MODELS = {"fp1": FirstOrderFP, "fp2": SecondOrderFP, "fp2x2": TwoFactorFP}
SEARCH_METHODS = ("point_exchange", "complete", "coordinate_exchange")


class ConfigError(ValueError):
    """The configuration is malformed or asks for something infeasible."""


@dataclass
class RunConfig:
    raw: dict
    model: object
    n: int
    kind: str
    weights: WeightSpec
    prior: PriorSpec
    draw_method: str = "sample"
    hermite_nodes: int = 3
    search: dict = field(default_factory=dict)
    base_dir: str = "."

    @property
    def model_name(self) -> str:
        return self.model.label

    def range_dict(self) -> dict:
        r = self.model.range
        if isinstance(r, TwoFactorRange):
            return {"x1_min": r.x1_min, "x2_min": r.x2_min}
        return {"x_min": r.x_min}

    def draws(self) -> list:
        if self.draw_method == "quadrature":
            return quadrature_draws(self.prior, self.model, self.hermite_nodes)
        return sample_draws(self.prior, self.model)

    def objective(self, draws=None) -> Objective:
        return Objective(self.model, self.draws() if draws is None else draws, self.kind,
                         self.weights)

    def grid(self):
        step = float(self.search.get("grid_step", 0.01))
        if self.model.n_factors == 2:
            return [level_grid(x, step) for x in self.model.lower]
        return level_grid(self.model.range.x_min, step)

    def search_config(self, objective: Objective, threads: int = 1) -> SearchConfig:
        s = self.search
        try:
            return SearchConfig(
                objective, self.n, self.grid(),
                tries=int(s.get("tries", 3)),
                seed=int(s.get("seed", 0)),
                max_levels=s.get("max_levels"),
                min_levels=s.get("min_levels"),
                fix_endpoints=bool(s.get("fix_endpoints", False)),
                budget=int(s.get("budget", 10 ** 8)),
                threads=threads,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def with_seed(self, seed: int) -> "RunConfig":
        """Copy with both the draw seed and the search seed replaced."""
        raw = json.loads(json.dumps(self.raw))
        raw.setdefault("prior", {}).setdefault("draws", {})["seed"] = int(seed)
        raw.setdefault("search", {})["seed"] = int(seed)
        return parse_config(raw, self.base_dir)

    def resolve_design(self, ref) -> Design:
        """Turn a design reference from ``compare`` into a :class:`Design`."""
        if isinstance(ref, Design):
            return ref
        if not isinstance(ref, dict):
            raise ConfigError(f"cannot interpret design reference {ref!r}")
        try:
            if "levels" in ref:
                return Design(ref["levels"], ref["reps"])
            if "file" in ref:
                path = os.path.join(self.base_dir, ref["file"])
                return load_design(path)
            if "family" in ref:
                return self._family(ref)
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"incomplete design reference {ref!r}: {exc}") from exc
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc
        raise ConfigError(f"design reference needs levels, file or family: {ref!r}")

    def _family(self, ref):
        fam = ref["family"]
        n = int(ref.get("n", self.n))
        if fam == "equally_spaced":
            return catalog.equally_spaced(int(ref["k"]), as_power(ref.get("metric_alpha", 1)), n,
                                          self.model.range)
        if fam in ("ccd3_projection", "ccd5_projection"):
            return catalog.ccd_projection(3 if fam == "ccd3_projection" else 5,
                                          as_power(ref.get("metric_alpha", 1)), n, self.model.range)
        if fam == "locally_optimal":
            alpha = ref["alpha"]
            alphas = [as_power(a) for a in (alpha if isinstance(alpha, list) else [alpha])]
            gammas = dict(self.prior_means())
            gammas.update({k: float(v) for k, v in ref.get("gamma", {}).items()})
            theta = self.model.make_params(gammas, alphas)
            kind = ref.get("criterion", self.kind)
            obj = Objective(self.model, [theta], kind, self.weights)
            tries = int(ref.get("tries", self.search.get("tries", 3)))
            seed = int(ref.get("seed", self.search.get("seed", 0)))
            sc = SearchConfig(obj, n, self.grid(), tries=tries, seed=seed)
            return (coordinate_exchange(sc) if self.model.n_factors == 2 else point_exchange(sc)).design
        raise ConfigError(f"unknown design family {fam!r}; choose from {catalog.FAMILIES}")

    def prior_means(self) -> dict:
        return {k: g.mean for k, g in self.prior.gamma_priors.items()}


def run_search(cfg: RunConfig, objective: Objective, threads: int = 1) -> SearchResult:
    """Run the configured search (and optional refinement) on ``objective``."""
    sc = cfg.search_config(objective, threads)
    method = cfg.search["method"]
    if method == "coordinate_exchange":
        return coordinate_exchange(sc)
    if method == "complete":
        try:
            result = complete_search(sc)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    else:
        result = point_exchange(sc)
    ref = cfg.search.get("refine")
    if ref:
        result = refine(result.design, sc, float(ref.get("window", 0.01)),
                        float(ref.get("step", 0.001)))
    return result


def _gamma_prior(name, spec) -> GammaPrior:
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ConfigError(f"gamma prior for {name} must be {{'normal': [m, sd]}} or {{'point': v}}")
    (kind, val), = spec.items()
    if kind == "normal":
        mean, sd = val
        return GammaPrior.normal(mean, sd)
    if kind == "point":
        return GammaPrior.point(val)
    raise ConfigError(f"unknown gamma prior kind {kind!r} for {name}")


def _alpha_prior(spec) -> AlphaPrior:
    if "point" in spec:
        return AlphaPrior.point(as_power(spec["point"]))
    return AlphaPrior(tuple(spec["support"]), tuple(spec["mass"]))


def parse_config(raw: dict, base_dir: str = ".") -> RunConfig:
    """Validate a configuration dictionary and build the run objects."""
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    try:
        name = raw.get("model", "fp1")
        if name not in MODELS:
            raise ConfigError(f"unknown model {name!r}; choose from {sorted(MODELS)}")
        rng = raw.get("range", {})
        if name == "fp2x2":
            model = TwoFactorFP(TwoFactorRange(float(rng.get("x1_min", 0.1)),
                                               float(rng.get("x2_min", 0.1))))
        else:
            model = MODELS[name](FactorRange(float(rng.get("x_min", 0.1))))

        n = int(raw.get("n", 0))
        if n < model.n_params:
            raise ConfigError(f"infeasible run count: n={n} is below the {model.n_params} "
                              f"parameters of {name}")

        crit = raw.get("criterion", {})
        kind = crit.get("kind", "D" if name == "fp2x2" else "weighted-As")
        if kind not in KINDS:
            raise ConfigError(f"criterion kind must be one of {KINDS}")
        weights = WeightSpec(tuple(crit.get("weights", (1.0, 1.0, 1.0) if name == "fp2" else (1.0, 1.0))))

        prior = raw.get("prior", {})
        alpha = prior.get("alpha")
        if alpha is None:
            raise ConfigError("prior.alpha is required")
        alphas = alpha if isinstance(alpha, list) else [alpha]
        if len(alphas) != model.n_factors:
            raise ConfigError(f"{name} needs {model.n_factors} alpha prior(s), got {len(alphas)}")
        gamma = prior.get("gamma", {})
        missing = [g for g in model.gamma_names if g not in gamma]
        if missing:
            raise ConfigError(f"missing gamma priors: {', '.join(missing)}")
        extra = [g for g in gamma if g not in model.gamma_names]
        if extra:
            raise ConfigError(f"gamma priors not in {name}: {', '.join(extra)}")
        draws = prior.get("draws", {})
        method = draws.get("method", "sample")
        if method not in ("sample", "quadrature"):
            raise ConfigError("draws.method must be 'sample' or 'quadrature'")
        spec = PriorSpec(
            tuple(_alpha_prior(a) for a in alphas),
            {g: _gamma_prior(g, gamma[g]) for g in model.gamma_names},
            r=int(draws.get("r", 200)),
            seed=int(draws.get("seed", 0)),
            rng=draws.get("rng", "philox"),
            gamma_order=tuple(model.gamma_names),
        )

        search = dict(raw.get("search", {}))
        smethod = search.get("method", "coordinate_exchange" if name == "fp2x2" else "point_exchange")
        if smethod not in SEARCH_METHODS:
            raise ConfigError(f"search.method must be one of {SEARCH_METHODS}")
        if smethod == "coordinate_exchange" and model.n_factors != 2:
            raise ConfigError("coordinate_exchange is for two-factor models")
        if smethod != "coordinate_exchange" and model.n_factors == 2:
            raise ConfigError("two-factor models are searched with coordinate_exchange")
        search["method"] = smethod
        cfg = RunConfig(raw, model, n, kind, weights, spec, method,
                        int(draws.get("hermite_nodes", 3)), search, base_dir)
        cfg.grid()
        return cfg
    except ConfigError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(raw, os.path.dirname(os.path.abspath(path)))


def design_document(design: Design, cfg: RunConfig, value: float | None = None) -> dict:
    """Design file contents: levels, reps, n, model and range (plus the criterion)."""
    doc = design.to_dict()
    doc["model"] = cfg.model_name
    doc["range"] = cfg.range_dict()
    if value is not None:
        doc["criterion"] = {"kind": cfg.kind, "value": value}
    return doc


def dump_design(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_design(path: str) -> Design:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read design file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"design file {path} is not valid JSON: {exc}") from exc
    try:
        return Design.from_dict(doc)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad design file {path}: {exc}") from exc
