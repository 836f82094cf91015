"""Robust mean estimation for independent samples with known variance bounds.

Samples are normalized so the accuracy target becomes 1, packed greedily into
groups whose combined inverse-std bound ``b`` clears a threshold, averaged
per group with ``(B_i eps)^2`` weights, and combined by a ``log b``-weighted
median.  The result carries a two-sided failure certificate
``2**-k * sqrt(5/n)`` where ``k`` is the summed group height.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Sequence

from .errors import DomainError, InsufficientDataError, ValidationError

Mode = Literal["tight", "simple"]

TIGHT_THRESHOLD_SQ = 6.0
SIMPLE_B = math.sqrt(2.0) + 1.0
SIMPLE_THRESHOLD_SQ = 3.0 + 2.0 * math.sqrt(2.0)  # (sqrt2 + 1)^2
SIMPLE_HEIGHT = 0.5
# absorbs rounding in weights like sqrt(6)**2 == 5.999999999999999
REL_TOL = 1e-12


def height(b: float) -> float:
    """Height ``log2((b + 1/b) / 2)`` of a group with inverse-std bound ``b``."""
    if not math.isfinite(b) or b <= 0:
        raise DomainError(f"height needs a positive finite b, got {b!r}")
    return math.log2((b + 1.0 / b) / 2.0)


def threshold_sq(mode: Mode) -> float:
    if mode == "tight":
        return TIGHT_THRESHOLD_SQ
    if mode == "simple":
        return SIMPLE_THRESHOLD_SQ
    raise ValidationError(f"unknown mode {mode!r}; expected 'tight' or 'simple'")


def failure_bound(k: float, n: int) -> float:
    """Bound on ``P(M - m >= eps) + P(m - M >= eps)``."""
    return 2.0 ** (-k) * math.sqrt(5.0 / n)


@dataclass(frozen=True)
class SampleBatch:
    values: tuple[float, ...]
    inv_std_bounds: tuple[float, ...]
    epsilon: float

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        bounds = tuple(float(b) for b in self.inv_std_bounds)
        if not values:
            raise ValidationError("sample batch is empty")
        if len(values) != len(bounds):
            raise ValidationError(
                f"{len(values)} values but {len(bounds)} inverse-std bounds"
            )
        if not all(math.isfinite(v) for v in values):
            raise ValidationError("sample values must be finite")
        if not all(math.isfinite(b) and b > 0 for b in bounds):
            raise ValidationError("inverse-std bounds must be positive and finite")
        eps = float(self.epsilon)
        if not (math.isfinite(eps) and eps > 0):
            raise ValidationError(f"epsilon must be positive and finite, got {self.epsilon!r}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "inv_std_bounds", bounds)
        object.__setattr__(self, "epsilon", eps)

    def __len__(self) -> int:
        return len(self.values)

    def normalized_weights(self) -> list[float]:
        """``(B_i * eps)^2`` for each sample."""
        return [(b * self.epsilon) ** 2 for b in self.inv_std_bounds]


@dataclass(frozen=True)
class GroupPlan:
    groups: tuple[tuple[int, ...], ...]
    b: tuple[float, ...]
    h: tuple[float, ...]
    k: float
    mode: Mode

    @property
    def n(self) -> int:
        return len(self.groups)

    def median_weights(self) -> list[float]:
        # simple mode replaces every b_j by sqrt2 + 1, so the median is unweighted
        if self.mode == "simple":
            return [math.log2(SIMPLE_B)] * self.n
        return [math.log2(bj) for bj in self.b]

    def to_dict(self) -> dict:
        return {
            "groups": [list(g) for g in self.groups],
            "b": list(self.b),
            "h": list(self.h),
            "k": self.k,
            "n": self.n,
            "mode": self.mode,
        }


@dataclass(frozen=True)
class EstimateResult:
    m_hat: float
    epsilon: float
    k: float
    n: int
    failure_bound: float
    group_means: tuple[float, ...]
    mode: Mode
    plan: GroupPlan = field(repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "m_hat": self.m_hat,
            "epsilon": self.epsilon,
            "k": self.k,
            "n": self.n,
            "failure_bound": self.failure_bound,
            "group_means": list(self.group_means),
            "mode": self.mode,
            "plan": self.plan.to_dict(),
        }


def plan_from_weights(weights: Sequence[float], mode: Mode = "tight") -> GroupPlan:
    """Greedy left-to-right packing of normalized weights ``(B_i eps)^2``.

    A group closes as soon as its summed weight reaches the mode threshold; a
    trailing remainder that never reaches it joins the last closed group.
    """
    thr = threshold_sq(mode)
    total = math.fsum(weights)
    if total < thr * (1 - REL_TOL):
        raise InsufficientDataError(total, thr)

    groups: list[list[int]] = []
    current: list[int] = []
    acc: list[float] = []
    for i, w in enumerate(weights):
        current.append(i)
        acc.append(w)
        if math.fsum(acc) >= thr * (1 - REL_TOL):
            groups.append(current)
            current, acc = [], []
    if current:
        groups[-1].extend(current)

    b = tuple(math.sqrt(math.fsum(weights[i] for i in g)) for g in groups)
    if mode == "tight":
        h = tuple(height(bj) for bj in b)
    else:
        h = tuple(SIMPLE_HEIGHT for _ in b)
    return GroupPlan(
        groups=tuple(tuple(g) for g in groups),
        b=b,
        h=h,
        k=math.fsum(h),
        mode=mode,
    )


def plan_groups(batch: SampleBatch, mode: Mode = "tight") -> GroupPlan:
    return plan_from_weights(batch.normalized_weights(), mode)


def group_mean(values: Sequence[float], weights: Sequence[float]) -> float:
    if len(values) == 0:
        raise DomainError("group_mean of an empty group")
    if len(values) != len(weights):
        raise ValidationError("values and weights differ in length")
    if any(not (w > 0) for w in weights):
        raise DomainError("group weights must be positive")
    return math.fsum(w * x for w, x in zip(weights, values)) / math.fsum(weights)


def weighted_median(points: Sequence[float], weights: Sequence[float]) -> float:
    """Smallest point whose cumulative weight reaches half the total.

    Cumulative sums are exact (rational), so ties at exactly one half are
    resolved the same way regardless of summation order.
    """
    if len(points) == 0:
        raise DomainError("weighted_median of an empty sequence")
    if len(points) != len(weights):
        raise ValidationError("points and weights differ in length")
    if any(not (math.isfinite(w) and w > 0) for w in weights):
        raise DomainError("median weights must be positive and finite")

    order = sorted(range(len(points)), key=lambda i: points[i])
    exact = [Fraction(w) for w in weights]
    half = sum(exact) / 2
    acc = Fraction(0)
    for i in order:
        acc += exact[i]
        if acc >= half:
            return points[i]
    return points[order[-1]]  # unreachable: acc ends at the total


def estimate_with_plan(
    values: Sequence[float],
    weights: Sequence[float],
    epsilon: float,
    plan: GroupPlan,
) -> EstimateResult:
    """Estimate from a precomputed plan (``weights`` are the normalized ones)."""
    scaled = [v / epsilon for v in values]
    means = [
        group_mean([scaled[i] for i in g], [weights[i] for i in g]) for g in plan.groups
    ]
    m = weighted_median(means, plan.median_weights())
    return EstimateResult(
        m_hat=m * epsilon,
        epsilon=epsilon,
        k=plan.k,
        n=plan.n,
        failure_bound=failure_bound(plan.k, plan.n),
        group_means=tuple(x * epsilon for x in means),
        mode=plan.mode,
        plan=plan,
    )


def estimate(batch: SampleBatch, mode: Mode = "tight") -> EstimateResult:
    weights = batch.normalized_weights()
    plan = plan_from_weights(weights, mode)
    return estimate_with_plan(batch.values, weights, batch.epsilon, plan)


def load_samples(records: Sequence[dict], epsilon: float) -> SampleBatch:
    """Build a batch from ``[{"value": x, "b": B}, ...]`` records."""
    if not isinstance(records, list):
        raise ValidationError("sample file must hold a JSON array")
    try:
        values = [r["value"] for r in records]
        bounds = [r["b"] for r in records]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"sample records need 'value' and 'b': {exc}") from None
    return SampleBatch(values, bounds, epsilon)
