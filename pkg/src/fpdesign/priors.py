"""Prior specifications and the parameter draws used to average criteria.

Power priors are discrete.  With sampling, each power atom gets a fixed number
of draws in proportion to its mass; only the gamma values are random.  With
quadrature, every combination of atoms and nodes gets an explicit weight.
"""
from __future__ import annotations

import itertools
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from .onefactor import FirstOrderFP, SecondOrderFP, as_power
from .twofactor import TwoFactorFP

log = logging.getLogger(__name__)

MAX_QUADRATURE_NODES = 10 ** 6
RNG_NAMES = ("philox", "pcg64")


@dataclass(frozen=True)
class AlphaPrior:
    support: tuple
    mass: tuple

    def __post_init__(self):
        support = tuple(as_power(a) for a in self.support)
        mass = tuple(float(p) for p in self.mass)
        if len(support) != len(mass) or not support:
            raise ValueError("support and mass must be non-empty and the same length")
        if len(set(support)) != len(support):
            raise ValueError("support entries must be distinct")
        if any(p < 0 for p in mass) or abs(sum(mass) - 1.0) > 1e-12:
            raise ValueError(f"masses must be non-negative and sum to 1, got {sum(mass)!r}")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "mass", mass)

    @classmethod
    def point(cls, alpha) -> "AlphaPrior":
        return cls((alpha,), (1.0,))


@dataclass(frozen=True)
class GammaPrior:
    kind: str
    mean: float
    sd: float = 0.0

    def __post_init__(self):
        if self.kind not in ("normal", "point"):
            raise ValueError(f"unknown gamma prior kind {self.kind!r}")
        if self.kind == "normal" and not self.sd > 0:
            raise ValueError("normal prior needs sd > 0")

    @classmethod
    def normal(cls, mean, sd) -> "GammaPrior":
        return cls("normal", float(mean), float(sd))

    @classmethod
    def point(cls, value) -> "GammaPrior":
        return cls("point", float(value))


@dataclass(frozen=True)
class PriorSpec:
    alpha_priors: tuple
    gamma_priors: dict
    r: int = 200
    seed: int = 0
    rng: str = "philox"
    gamma_order: tuple = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha_priors", tuple(self.alpha_priors))
        if self.r < 1:
            raise ValueError("need at least one draw")
        if self.rng not in RNG_NAMES:
            raise ValueError(f"rng must be one of {RNG_NAMES}")
        if not self.gamma_order:
            object.__setattr__(self, "gamma_order", tuple(self.gamma_priors))

    def model_class(self):
        names = set(self.gamma_priors)
        if len(self.alpha_priors) == 2:
            return TwoFactorFP
        if "gamma11" in names:
            return SecondOrderFP
        return FirstOrderFP


def make_generator(seed: int, name: str = "philox") -> np.random.Generator:
    """Counter-based Philox by default so streams are portable across platforms."""
    bitgen = np.random.Philox(seed) if name == "philox" else np.random.PCG64(seed)
    return np.random.Generator(bitgen)


def allocate(r: int, mass) -> np.ndarray:
    """Largest-remainder allocation of ``r`` draws to atoms with masses ``mass``.

    >>> allocate(200, [0.15, 0.25, 0.25, 0.15, 0.10, 0.07, 0.03]).tolist()
    [30, 50, 50, 30, 20, 14, 6]
    """
    mass = np.asarray(mass, dtype=float)
    # round() first so exact products like 200 * 0.07 are not truncated to 13
    quota = np.round(r * mass, 9)
    counts = np.floor(quota).astype(int)
    short = r - counts.sum()
    if short:
        order = np.argsort(-(quota - counts), kind="stable")
        counts[order[:short]] += 1
    return counts


def _joint_atoms(alpha_priors):
    supports = [p.support for p in alpha_priors]
    masses = [p.mass for p in alpha_priors]
    atoms = list(itertools.product(*supports))
    mass = [float(np.prod(m)) for m in itertools.product(*masses)]
    return atoms, mass


def sample_draws(spec: PriorSpec, model=None) -> list:
    """``spec.r`` parameter points, power atoms replicated in proportion to mass.

    The intercept is fixed at zero: no criterion here depends on it.
    """
    model = model or spec.model_class()()
    atoms, mass = _joint_atoms(spec.alpha_priors)
    counts = allocate(spec.r, mass)
    positive = sum(1 for m in mass if m > 0)
    if spec.r < positive:
        warnings.warn(f"r={spec.r} is smaller than the {positive} power atoms with positive mass")
    for atom, m, c in zip(atoms, mass, counts):
        if m > 0 and c == 0:
            log.info("power atom %s receives no draws", atom)

    gen = make_generator(spec.seed, spec.rng)
    names = [g for g in spec.gamma_order]
    z = gen.standard_normal((spec.r, len(names)))
    draws = []
    j = 0
    for atom, c in zip(atoms, counts):
        for _ in range(c):
            gammas = {}
            for col, name in enumerate(names):
                prior = spec.gamma_priors[name]
                gammas[name] = prior.mean + prior.sd * z[j, col] if prior.kind == "normal" else prior.mean
            draws.append(model.make_params(gammas, atom))
            j += 1
    return draws


def quadrature_draws(spec: PriorSpec, model=None, hermite_nodes: int = 3) -> list:
    """Weighted parameter points over the product of power atoms.

    Normal gamma priors are replaced by a ``hermite_nodes``-point
    Gauss-Hermite rule each; point priors contribute one node.
    """
    model = model or spec.model_class()()
    atoms, mass = _joint_atoms(spec.alpha_priors)
    z, w = np.polynomial.hermite_e.hermegauss(hermite_nodes)
    w = w / w.sum()
    per_gamma = []
    for name in spec.gamma_order:
        prior = spec.gamma_priors[name]
        if prior.kind == "normal":
            per_gamma.append([(prior.mean + prior.sd * zi, wi) for zi, wi in zip(z, w)])
        else:
            per_gamma.append([(prior.mean, 1.0)])
    size = len(atoms) * int(np.prod([len(g) for g in per_gamma]))
    if size > MAX_QUADRATURE_NODES:
        raise ValueError(f"quadrature grid has {size} nodes (limit {MAX_QUADRATURE_NODES})")
    out = []
    for atom, m in zip(atoms, mass):
        if m == 0:
            continue
        for combo in itertools.product(*per_gamma):
            gammas = {name: v for name, (v, _) in zip(spec.gamma_order, combo)}
            weight = m * float(np.prod([wi for _, wi in combo]))
            out.append((model.make_params(gammas, atom), weight))
    return out
