"""Verification rigs: sample generators, tail-bound Monte Carlo, exhaustive enumeration.

Per-trial randomness is counter based: trial ``i`` of a run seeded with
``master_seed`` draws from ``numpy.random.default_rng([master_seed, i])``, so
the values seen by a trial never depend on which other trials ran or in what
order.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from . import estimator
from .errors import CapacityError, DomainError, ValidationError
from .zkp.envelopes import PAIRS, build_envelopes, pair_view, simulate_from_pq, simulator_plan

DEFAULT_BUDGET = 10**7
SIGMA_MARGIN = 3.0


def trial_rng(master_seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([master_seed, index])


# -- generators -------------------------------------------------------------------

def gen_chebyshev_extremal(mean: float, b: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Two-point law: ``mean + b`` w.p. ``1/(b^2+1)``, else ``mean - 1/b``.

    Mean ``mean``, variance 1, and ``P(X - mean >= b) = 1/(b^2+1)``, which is
    Cantelli's bound with equality.
    """
    if not b > 1:
        raise DomainError(f"extremal generator needs b > 1, got {b!r}")
    high = rng.random(size) < 1.0 / (b * b + 1.0)
    return np.where(high, mean + b, mean - 1.0 / b)


def gen_student_t(mean: float, df: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Student-t rescaled to unit variance."""
    if not df >= 3:
        raise DomainError(f"Student-t generator needs df >= 3 for finite variance, got {df!r}")
    return mean + rng.standard_t(df, size) * math.sqrt((df - 2.0) / df)


def gen_constant(mean: float, size: int, rng: np.random.Generator) -> np.ndarray:
    return np.full(size, float(mean))


def _generate(spec: "TrialSpec", rng: np.random.Generator) -> np.ndarray:
    p = spec.params
    scale = float(p.get("scale", 1.0))
    mirror = -1.0 if p.get("mirror") else 1.0
    if spec.generator == "chebyshev":
        x = gen_chebyshev_extremal(0.0, float(p.get("b", math.sqrt(6))), spec.batch_size, rng)
    elif spec.generator == "student_t":
        x = gen_student_t(0.0, float(p.get("df", 3)), spec.batch_size, rng)
    elif spec.generator == "constant":
        x = gen_constant(0.0, spec.batch_size, rng)
    else:
        raise ValidationError(f"unknown generator {spec.generator!r}")
    return spec.true_mean + mirror * scale * x


GENERATORS = ("chebyshev", "student_t", "constant")


@dataclass(frozen=True)
class TrialSpec:
    """One Monte Carlo experiment.

    Generators emit ``true_mean + mirror * scale * X`` with ``X`` of mean 0 and
    variance 1, so the matching inverse-std bound is ``1/scale``.
    """

    generator: str
    true_mean: float = 0.0
    trials: int = 10_000
    master_seed: int = 0
    batch_size: int = 60
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise ValidationError(f"unknown generator {self.generator!r}; choose from {GENERATORS}")
        if self.trials < 1 or self.batch_size < 1:
            raise ValidationError("trials and batch_size must be positive")

    @property
    def inv_std_bound(self) -> float:
        return 1.0 / float(self.params.get("scale", 1.0))


@dataclass(frozen=True)
class EstimatorConfig:
    epsilon: float = 1.0
    mode: estimator.Mode = "tight"
    inv_std_bound: float | None = None  # default: the generator's exact bound


@dataclass(frozen=True)
class TailReport:
    empirical_failures: int
    trials: int
    bound: float
    std_error: float
    k: float
    n: int

    @property
    def rate(self) -> float:
        return self.empirical_failures / self.trials

    @property
    def passed(self) -> bool:
        return self.rate <= self.bound + SIGMA_MARGIN * self.std_error

    def to_dict(self) -> dict:
        return {
            "empirical_failures": self.empirical_failures,
            "trials": self.trials,
            "rate": self.rate,
            "bound": self.bound,
            "std_error": self.std_error,
            "k": self.k,
            "n": self.n,
            "pass": self.passed,
        }


def binomial_se(p: float, trials: int) -> float:
    return math.sqrt(p * (1.0 - p) / trials)


def run_tail_trials(spec: TrialSpec, config: EstimatorConfig = EstimatorConfig()) -> TailReport:
    """Count trials where ``|M - true_mean| >= epsilon``."""
    b = config.inv_std_bound if config.inv_std_bound is not None else spec.inv_std_bound
    bounds = [b] * spec.batch_size
    probe = estimator.SampleBatch([spec.true_mean] * spec.batch_size, bounds, config.epsilon)
    weights = probe.normalized_weights()
    plan = estimator.plan_from_weights(weights, config.mode)  # the plan ignores values

    failures = 0
    for i in range(spec.trials):
        values = _generate(spec, trial_rng(spec.master_seed, i)).tolist()
        res = estimator.estimate_with_plan(values, weights, config.epsilon, plan)
        if abs(res.m_hat - spec.true_mean) >= config.epsilon:
            failures += 1
    bound = estimator.failure_bound(plan.k, plan.n)
    return TailReport(failures, spec.trials, bound, binomial_se(bound, spec.trials), plan.k, plan.n)


def load_trial_spec(doc: dict) -> tuple[TrialSpec, EstimatorConfig]:
    if not isinstance(doc, dict) or "generator" not in doc:
        raise ValidationError("trial spec needs at least 'generator'")
    known = {"generator", "true_mean", "trials", "master_seed", "batch_size", "params"}
    est_keys = {"epsilon", "mode", "inv_std_bound"}
    unknown = set(doc) - known - est_keys
    if unknown:
        raise ValidationError(f"unknown trial spec keys {sorted(unknown)}")
    spec = TrialSpec(**{k: doc[k] for k in known if k in doc})
    config = EstimatorConfig(**{k: doc[k] for k in est_keys if k in doc})
    estimator.threshold_sq(config.mode)
    return spec, config


# -- exhaustive enumeration ---------------------------------------------------------

@dataclass(frozen=True)
class Space:
    """A finite space with a declared size and a canonical visiting order."""

    size: int
    items: Callable[[], Iterable[Any]]


def permutation_space(n: int) -> Space:
    return Space(math.factorial(n), lambda: itertools.permutations(range(n)))


def product_space(*spaces: Space) -> Space:
    return Space(math.prod(s.size for s in spaces), lambda: itertools.product(*(s.items() for s in spaces)))


def range_space(n: int) -> Space:
    return Space(n, lambda: range(n))


def enumerate_exact(
    space: Space,
    reducer: Callable[[Any], Any],
    budget: int = DEFAULT_BUDGET,
    channels: int | None = None,
) -> Counter | list[Counter]:
    """Tally ``reducer(item)`` over every item of ``space``.

    With ``channels`` set, ``reducer`` returns that many keys per item and one
    table per channel is returned.
    """
    if space.size > budget:
        raise CapacityError(space.size, budget)
    if channels is None:
        table = Counter(reducer(x) for x in space.items())
        seen = table.total()
    else:
        tables = [Counter() for _ in range(channels)]
        seen = 0
        for x in space.items():
            for t, key in zip(tables, reducer(x)):
                t[key] += 1
            seen += 1
    if seen != space.size:
        raise ValidationError(f"space declared {space.size} items but produced {seen}")
    return table if channels is None else tables


# -- zero-knowledge exactness ---------------------------------------------------------

@dataclass
class ZkEnumeration:
    """Exact opened-pair distributions (as count tables) for each coloring and the simulator."""

    space_size: int
    honest: list[dict]  # one {pair: Counter} per coloring
    simulated: dict

    def identical_across_colorings(self) -> dict:
        return {pair: all(h[pair] == self.honest[0][pair] for h in self.honest) for pair in PAIRS}

    def identical_to_simulator(self) -> dict:
        return {pair: all(h[pair] == self.simulated[pair] for h in self.honest) for pair in PAIRS}

    def to_dict(self) -> dict:
        across = self.identical_across_colorings()
        sim = self.identical_to_simulator()
        return {
            "space_size": self.space_size,
            "colorings": len(self.honest),
            "pairs": {
                f"{a}{b}": {
                    "support": len(self.simulated[(a, b)]),
                    "identical_across_colorings": across[(a, b)],
                    "identical_to_simulator": sim[(a, b)],
                }
                for a, b in across
            },
            "zero_knowledge": all(across.values()) and all(sim.values()),
        }


def zk_enumerate(graph, colorings: Sequence[Sequence[int]], budget: int = DEFAULT_BUDGET) -> ZkEnumeration:
    """Enumerate every ``(p, q)`` for each coloring and for the simulator."""
    space = product_space(permutation_space(graph.node_count), permutation_space(graph.edge_label_count))
    if space.size > budget:
        raise CapacityError(space.size, budget)
    honest = []
    for colors in colorings:
        def reduce(pq, colors=colors):
            t = build_envelopes(graph, colors, pq[0], pq[1])
            return tuple(pair_view(t, pair) for pair in PAIRS)

        honest.append(dict(zip(PAIRS, enumerate_exact(space, reduce, budget, channels=3))))
    plan = simulator_plan(graph)
    simulated = dict(
        zip(
            PAIRS,
            enumerate_exact(
                space,
                lambda pq: tuple(simulate_from_pq(plan, pair, pq[0], pq[1]) for pair in PAIRS),
                budget,
                channels=3,
            ),
        )
    )
    return ZkEnumeration(space.size, honest, simulated)
