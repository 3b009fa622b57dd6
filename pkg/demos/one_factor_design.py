"""
Pseudo-Bayesian design for a first-order fractional polynomial
===============================================================

Twelve runs on x in [0.1, 1] for y = b0 + g1 * (x^a - 0.1^a) / (1 - 0.1^a),
with the power a unknown.  The prior puts most mass on negative powers and
g1 ~ N(2.5, 1.5^2); the criterion is the prior-averaged weighted trace of the
covariance of (g1, a).
"""

import numpy as np

from fpdesign.catalog import ccd_projection, equally_spaced
from fpdesign.criterion import Objective, WeightSpec
from fpdesign.onefactor import FirstOrderFP
from fpdesign.priors import AlphaPrior, GammaPrior, PriorSpec, sample_draws
from fpdesign.search import SearchConfig, level_grid, point_exchange, refine

# the prior: seven candidate powers and a normal range-change parameter
model = FirstOrderFP()
prior = PriorSpec(
    (AlphaPrior((-2, -1, "-1/2", 0, "1/2", 1, 2), (0.15, 0.25, 0.25, 0.15, 0.10, 0.07, 0.03)),),
    {"gamma1": GammaPrior.normal(2.5, 1.5)},
    r=200, seed=4)

# one fixed set of 200 draws defines the objective for every candidate design
objective = Objective(model, sample_draws(prior, model), "weighted-As", WeightSpec((1, 1)))

# point exchange on a 0.01 grid, then a 0.001 refinement around the support
search = SearchConfig(objective, n=12, level_grid=level_grid(0.1, 0.01), tries=3, seed=4)
best = point_exchange(search)
print("exchange:", best.design.levels, best.design.reps, f"{best.value:.6f}")
fine = refine(best.design, search, window=0.01, step=0.001)
print("refined: ", fine.design.levels, fine.design.reps, f"{fine.value:.6f}")

# efficiencies of standard designs against the optimum, on the same draws
candidates = {
    "4 levels, equally spaced in x^-1/2": equally_spaced(4, -0.5, 12),
    "4 levels, equally spaced in log x": equally_spaced(4, 0, 12),
    "3 levels, equally spaced in x": equally_spaced(3, 1, 12),
    "5-level CCD projection, raw scale": ccd_projection(5, 1, 12),
}
for label, design in candidates.items():
    value = objective.loss(design)
    print(f"{label:38s} {np.round(design.levels, 4)}  efficiency {100 * fine.value / value:6.2f}")
