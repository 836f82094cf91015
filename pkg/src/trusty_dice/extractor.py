"""Leftover-hash extraction over explicit finite sources.

A :class:`SourceModel` is an explicit distribution ``G`` on ``n``-bit strings.
A :class:`HashFamily` is a keyed map ``f_h: {0,1}^n -> {0,1}^k`` with ``t``
key bits.  :func:`joint_distribution` builds ``P(h, a) = 2^-t G(f_h^-1(a))``
exactly, and :func:`distances` compares it with the uniform law on
``t + k`` bits in both L1 and (scaled) L2.

All probabilities are held as integers over a common denominator, so the
inequalities ``L1 <= L2`` and ``L2 < 2^-(m-k-1)/2`` are decided exactly.
Bit strings are big-endian: the first character is the most significant bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Literal, Mapping, Sequence

import numpy as np

from .errors import CapacityError, DomainError, ValidationError

MAX_KEY_BITS = 24
DEFAULT_BUDGET = 10**7
_INT64_SAFE = 2**62


# -- bit strings --------------------------------------------------------------

def bits_to_int(bits: str, width: int | None = None) -> int:
    if not bits or any(c not in "01" for c in bits):
        raise ValidationError(f"not a bit string: {bits!r}")
    if width is not None and len(bits) != width:
        raise ValidationError(f"bit string {bits!r} has length {len(bits)}, expected {width}")
    return int(bits, 2)


def int_to_bits(value: int, width: int) -> str:
    return format(value, f"0{width}b") if width else ""


def _to_fraction(p) -> Fraction:
    if isinstance(p, bool):
        raise ValidationError("probabilities must be numbers")
    if isinstance(p, float):
        if not math.isfinite(p):
            raise ValidationError("probabilities must be finite")
        # decimal reading: "0.1" in a file means 1/10, not the nearest double
        return Fraction(repr(p))
    try:
        return Fraction(p)
    except (TypeError, ValueError):
        raise ValidationError(f"not a probability: {p!r}") from None


# -- sources --------------------------------------------------------------------

@dataclass(frozen=True)
class SourceModel:
    """Distribution on ``n``-bit strings, zero entries omitted.

    ``probs`` maps integer-encoded strings to exact fractions summing to one.
    Inputs within 1e-12 of normalized are renormalized exactly.
    """

    n: int
    probs: Mapping[int, Fraction]

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValidationError(f"bit length must be a positive integer, got {self.n!r}")
        clean: dict[int, Fraction] = {}
        for x, p in self.probs.items():
            if not (isinstance(x, int) and 0 <= x < 2**self.n):
                raise ValidationError(f"string {x!r} is not an {self.n}-bit value")
            q = _to_fraction(p)
            if q < 0:
                raise ValidationError(f"negative probability {p!r}")
            if q:
                clean[x] = q
        total = sum(clean.values(), Fraction(0))
        if not clean or abs(total - 1) > Fraction(1, 10**12):
            raise ValidationError(f"probabilities sum to {float(total)!r}, not 1")
        if total != 1:
            clean = {x: q / total for x, q in clean.items()}
        object.__setattr__(self, "probs", dict(sorted(clean.items())))

    @classmethod
    def from_bitstrings(cls, n: int, probs: Mapping[str, object]) -> "SourceModel":
        return cls(n, {bits_to_int(s, n): p for s, p in probs.items()})

    @classmethod
    def flat(cls, n: int, support: Iterable[int]) -> "SourceModel":
        support = sorted(set(support))
        p = Fraction(1, len(support))
        return cls(n, {x: p for x in support})

    @classmethod
    def from_weights(cls, n: int, weights: Mapping[int, int]) -> "SourceModel":
        total = sum(weights.values())
        return cls(n, {x: Fraction(w, total) for x, w in weights.items()})

    @property
    def support(self) -> list[int]:
        return list(self.probs)

    def integer_weights(self) -> tuple[list[int], list[int], int]:
        """Support, integer weights and their common denominator."""
        denom = 1
        for q in self.probs.values():
            denom = denom * q.denominator // math.gcd(denom, q.denominator)
        xs = list(self.probs)
        ws = [int(q * denom) for q in self.probs.values()]
        return xs, ws, denom

    def collision_probability(self) -> Fraction:
        return sum((q * q for q in self.probs.values()), Fraction(0))

    @property
    def renyi(self) -> float:
        return renyi_entropy(self)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "probs": {int_to_bits(x, self.n): float(q) for x, q in self.probs.items()},
        }


def renyi_entropy(source: SourceModel) -> float:
    """Order-2 Renyi entropy ``-log2 sum G(x)^2`` in bits."""
    c = source.collision_probability()
    return math.log2(c.denominator) - math.log2(c.numerator)


# -- hash families --------------------------------------------------------------

Evaluator = Callable[[int, int], int]
TableFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class HashFamily:
    n: int
    k: int
    t: int
    kind: Literal["toeplitz", "xor_shift", "custom"]
    evaluator: Evaluator = field(repr=False)
    table_fn: TableFn | None = field(default=None, repr=False, compare=False)

    def __call__(self, h: int, x: int) -> int:
        return self.evaluator(h, x)

    @property
    def key_count(self) -> int:
        return 1 << self.t

    def table(self, keys: np.ndarray, xs: np.ndarray) -> np.ndarray:
        """Outputs ``f_h(x)`` with shape ``(len(keys), len(xs))``."""
        keys = np.asarray(keys, dtype=np.int64)
        xs = np.asarray(xs, dtype=np.int64)
        if self.table_fn is not None:
            return self.table_fn(keys, xs)
        out = np.empty((len(keys), len(xs)), dtype=np.int64)
        for a, h in enumerate(keys.tolist()):
            for b, x in enumerate(xs.tolist()):
                out[a, b] = self.evaluator(h, x)
        return out


def toeplitz(n: int, k: int) -> HashFamily:
    """Toeplitz matrix over GF(2) plus an affine offset.

    The key holds ``n + k - 1`` diagonal bits (high part) and ``k`` offset bits
    (low part).  Row ``r`` of the matrix, read against the big-endian input,
    is the ``n``-bit window ``diag >> r``; output bit ``r`` is big-endian too.
    """
    if n < 1 or k < 1:
        raise ValidationError("toeplitz family needs n >= 1 and k >= 1")
    t = n + 2 * k - 1
    mask_n = (1 << n) - 1
    mask_k = (1 << k) - 1

    def evaluate(h: int, x: int) -> int:
        diag, out = h >> k, 0
        for r in range(k):
            out = (out << 1) | (((diag >> r) & mask_n & x).bit_count() & 1)
        return out ^ (h & mask_k)

    def table(keys: np.ndarray, xs: np.ndarray) -> np.ndarray:
        diag = keys >> k
        out = np.zeros((len(keys), len(xs)), dtype=np.int64)
        for r in range(k):
            row = (diag >> r) & mask_n
            bit = np.bitwise_count(row[:, None] & xs[None, :]).astype(np.int64) & 1
            out = (out << 1) | bit
        return out ^ (keys & mask_k)[:, None]

    return HashFamily(n, k, t, "toeplitz", evaluate, table)


def xor_shift(n: int) -> HashFamily:
    """``f_h(x) = x XOR h`` with ``n = k = t``: a bijection for every key."""
    if n < 1:
        raise ValidationError("xor family needs n >= 1")

    def table(keys: np.ndarray, xs: np.ndarray) -> np.ndarray:
        return keys[:, None] ^ xs[None, :]

    return HashFamily(n, n, n, "xor_shift", lambda h, x: h ^ x, table)


def custom(n: int, k: int, t: int, evaluator: Evaluator) -> HashFamily:
    if min(n, k, t) < 1:
        raise ValidationError("custom family needs positive n, k, t")
    mask_k = (1 << k) - 1

    def checked(h: int, x: int) -> int:
        a = evaluator(h, x)
        if not (isinstance(a, (int, np.integer)) and 0 <= a <= mask_k):
            raise ValidationError(f"custom evaluator returned {a!r}, not a {k}-bit value")
        return int(a)

    return HashFamily(n, k, t, "custom", checked)


def make_family(kind: str, n: int, k: int | None = None) -> HashFamily:
    if kind == "toeplitz":
        if k is None:
            raise ValidationError("toeplitz family needs k")
        return toeplitz(n, k)
    if kind == "xor_shift":
        if k is not None and k != n:
            raise ValidationError("xor_shift family has k = n")
        return xor_shift(n)
    raise ValidationError(f"unknown hash family {kind!r}")


def _check_key_bits(family: HashFamily) -> None:
    if family.t > MAX_KEY_BITS:
        raise CapacityError(1 << family.t, 1 << MAX_KEY_BITS, "key enumeration")


def collision_fraction(family: HashFamily, x: int, y: int) -> Fraction:
    """Exact fraction of keys ``h`` with ``f_h(x) == f_h(y)``."""
    if x == y:
        raise DomainError("collision fraction needs x != y")
    _check_key_bits(family)
    keys = np.arange(family.key_count, dtype=np.int64)
    out = family.table(keys, np.array([x, y], dtype=np.int64))
    return Fraction(int(np.count_nonzero(out[:, 0] == out[:, 1])), family.key_count)


def max_collision_fraction(family: HashFamily, budget: int = DEFAULT_BUDGET) -> Fraction:
    """Worst collision fraction over all pairs ``x != y`` of ``n``-bit strings."""
    _check_key_bits(family)
    size = 1 << family.n
    work = size * size * family.key_count // 2
    if work > budget:
        raise CapacityError(work, budget, "pairwise collision scan")
    keys = np.arange(family.key_count, dtype=np.int64)
    tab = family.table(keys, np.arange(size, dtype=np.int64))
    worst = 0
    for x in range(size - 1):
        hits = np.count_nonzero(tab[:, x + 1 :] == tab[:, [x]], axis=0)
        worst = max(worst, int(hits.max()))
    return Fraction(worst, family.key_count)


def satisfies_family_condition(family: HashFamily, m: float, budget: int = DEFAULT_BUDGET) -> bool:
    """Collision fraction at most ``2^-k + 2^-m`` for every pair."""
    return float(max_collision_fraction(family, budget)) <= 2.0**-family.k + 2.0**-m


# -- joint distribution and distances -------------------------------------------

@dataclass(frozen=True)
class JointDistribution:
    """``P(h, a) = counts[h, a] / (2^t * total)``."""

    t: int
    k: int
    total: int
    counts: np.ndarray = field(repr=False)

    @property
    def i(self) -> int:
        return self.t + self.k

    def prob(self, h: int, a: int) -> Fraction:
        return Fraction(int(self.counts[h, a]), self.total << self.t)

    @property
    def probs(self) -> dict[tuple[int, int], Fraction]:
        hs, as_ = np.nonzero(self.counts)
        return {(int(h), int(a)): self.prob(h, a) for h, a in zip(hs, as_)}

    def key_marginals(self) -> list[Fraction]:
        return [Fraction(int(s), self.total << self.t) for s in self.counts.sum(axis=1)]


def joint_distribution(
    source: SourceModel, family: HashFamily, budget: int = DEFAULT_BUDGET
) -> JointDistribution:
    if source.n != family.n:
        raise ValidationError(f"source has n={source.n}, family has n={family.n}")
    _check_key_bits(family)
    xs, ws, total = source.integer_weights()
    cells = family.key_count << family.k
    work = max(len(xs) * family.key_count, cells)
    if work > budget:
        raise CapacityError(work, budget, "joint distribution")

    big = total >= _INT64_SAFE >> family.k
    counts = np.zeros((family.key_count, 1 << family.k), dtype=object if big else np.int64)
    x_arr = np.array(xs, dtype=np.int64)
    w_arr = np.array(ws, dtype=object if big else np.int64)
    chunk = max(1, (1 << 20) // max(1, len(xs)))
    for start in range(0, family.key_count, chunk):
        keys = np.arange(start, min(start + chunk, family.key_count), dtype=np.int64)
        out = family.table(keys, x_arr)
        rows = np.repeat(keys, len(xs))
        np.add.at(counts, (rows, out.ravel()), np.tile(w_arr, len(keys)))
    return JointDistribution(family.t, family.k, total, counts)


@dataclass(frozen=True)
class DistanceReport:
    l1: float
    l2: float
    s: float
    bound: float
    holds: bool
    l1_le_l2: bool
    exact: bool

    def to_dict(self) -> dict:
        return {
            "l1": self.l1,
            "l2": self.l2,
            "s": self.s,
            "bound": self.bound,
            "holds": self.holds,
            "l1_le_l2": self.l1_le_l2,
            "exact": self.exact,
        }


def _deviation_sums(joint: JointDistribution) -> tuple[int, int]:
    """``sum |d|`` and ``sum d^2`` for ``d = count * 2^k - total`` over all cells."""
    k, total = joint.k, joint.total
    flat = joint.counts.ravel()
    nonzero = flat[flat != 0]
    zeros = flat.size - nonzero.size
    worst = total << k
    if worst * worst * flat.size < _INT64_SAFE and nonzero.dtype != object:
        d = nonzero.astype(np.int64) * (1 << k) - total
        abs_sum = int(np.abs(d).sum())
        sq_sum = int((d * d).sum())
    else:
        d = [int(c) * (1 << k) - total for c in nonzero]
        abs_sum = sum(abs(v) for v in d)
        sq_sum = sum(v * v for v in d)
    return abs_sum + zeros * total, sq_sum + zeros * total * total


def distances(joint: JointDistribution, source: SourceModel | float) -> DistanceReport:
    """L1 and L2 distance of ``joint`` from uniform on ``t + k`` bits.

    With a :class:`SourceModel` the comparisons are exact integer arithmetic;
    with a bare entropy value ``m`` they fall back to floating point.
    """
    cells = 1 << joint.i
    abs_sum, sq_sum = _deviation_sums(joint)
    scale = cells * joint.total  # L1 = abs_sum / scale
    l1 = float(Fraction(abs_sum, scale))
    l2 = math.sqrt(Fraction(sq_sum, cells * joint.total * joint.total))
    l1_le_l2 = abs_sum * abs_sum <= cells * sq_sum

    if isinstance(source, SourceModel):
        m = source.renyi
        xs, ws, wtotal = source.integer_weights()
        if wtotal != joint.total:
            raise ValidationError("source does not match the joint distribution")
        # L2^2 < 2^(k+1) * sum G^2  <=>  S < 2^(t+2k+1) * sum w^2
        strict = sq_sum < (sum(w * w for w in ws) << (joint.t + 2 * joint.k + 1))
        exact = True
    else:
        m = float(source)
        strict = l2 < 2.0 ** (-(m - joint.k - 1) / 2)
        exact = False
    s = m - joint.k - 1
    return DistanceReport(
        l1=l1,
        l2=l2,
        s=s,
        bound=2.0 ** (-s / 2),
        holds=bool(l1_le_l2 and strict),
        l1_le_l2=bool(l1_le_l2),
        exact=exact,
    )


def verify_lemma(source: SourceModel, family: HashFamily, budget: int = DEFAULT_BUDGET) -> DistanceReport:
    return distances(joint_distribution(source, family, budget), source)


# -- streaming ------------------------------------------------------------------

def extract_stream(family: HashFamily, h: int, xs: Sequence[str]) -> list[str]:
    """Apply ``f_h`` to every ``n``-bit string; the same key serves all inputs."""
    if not (isinstance(h, int) and 0 <= h < family.key_count):
        raise ValidationError(f"key {h!r} is not a {family.t}-bit value")
    return [int_to_bits(family(h, bits_to_int(x, family.n)), family.k) for x in xs]


def load_source(doc: dict) -> SourceModel:
    try:
        n, probs = doc["n"], doc["probs"]
    except (KeyError, TypeError):
        raise ValidationError("source file needs keys 'n' and 'probs'") from None
    if not isinstance(probs, dict):
        raise ValidationError("'probs' must map bit strings to numbers")
    return SourceModel.from_bitstrings(n, probs)
