"""Post-poll lottery with win chances proportional to a power of the vote count.

Probabilities are exact :class:`~fractions.Fraction` values; floats appear only
in rendered output.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .errors import DomainError, ValidationError


@dataclass(frozen=True)
class Tally:
    entries: tuple[tuple[str, int], ...]

    def __post_init__(self):
        entries = tuple((str(c), v) for c, v in self.entries)
        if not entries:
            raise ValidationError("tally has no candidates")
        ids = [c for c, _ in entries]
        if len(set(ids)) != len(ids):
            raise ValidationError("candidate ids must be unique")
        for c, v in entries:
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 0:
                raise ValidationError(f"votes for {c!r} must be a nonnegative integer, got {v!r}")
        entries = tuple((c, int(v)) for c, v in entries)
        if not any(v for _, v in entries):
            raise DomainError("tally has no votes")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_mapping(cls, votes: Mapping[str, int]) -> "Tally":
        if not isinstance(votes, Mapping):
            raise ValidationError("tally file must hold a JSON object {candidate: votes}")
        return cls(tuple(votes.items()))

    @classmethod
    def from_counts(cls, counts: Iterable[int]) -> "Tally":
        return cls(tuple((f"c{i + 1}", v) for i, v in enumerate(counts)))

    @property
    def candidates(self) -> list[str]:
        return [c for c, _ in self.entries]

    @property
    def votes(self) -> list[int]:
        return [v for _, v in self.entries]

    @property
    def total(self) -> int:
        return sum(self.votes)

    def to_dict(self) -> dict[str, int]:
        return dict(self.entries)


@dataclass(frozen=True)
class OddsTable:
    entries: tuple[tuple[str, Fraction], ...]
    exponent: int
    weights: tuple[int, ...]

    @property
    def total_weight(self) -> int:
        return sum(self.weights)

    def probability(self, candidate: str) -> Fraction:
        for c, p in self.entries:
            if c == candidate:
                return p
        raise KeyError(candidate)

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.entries)


def power_odds(tally: Tally, exponent: int = 2) -> OddsTable:
    """Chance of each candidate is ``votes**exponent / sum(votes**exponent)``."""
    if isinstance(exponent, bool) or not isinstance(exponent, int) or exponent < 1:
        raise DomainError(f"exponent must be a positive integer, got {exponent!r}")
    weights = tuple(v**exponent for v in tally.votes)
    total = sum(weights)
    return OddsTable(
        entries=tuple((c, Fraction(w, total)) for c, w in zip(tally.candidates, weights)),
        exponent=exponent,
        weights=weights,
    )


def draw(odds: OddsTable, seed: int) -> str:
    """Pick a winner with an integer threshold over the common denominator."""
    ticket = random.Random(seed).randrange(odds.total_weight)
    for (candidate, _), w in zip(odds.entries, odds.weights):
        if ticket < w:
            return candidate
        ticket -= w
    raise AssertionError("ticket outside total weight")


def noise_smooth(tally: Tally, seed: int) -> Tally:
    """Discard ``floor(total/2)`` ballots chosen uniformly from the pooled votes."""
    total = tally.total
    if total < 2:
        raise DomainError("noise smoothing needs at least two votes")
    keep = total - total // 2
    rng = np.random.default_rng(seed)
    kept = rng.multivariate_hypergeometric(np.array(tally.votes, dtype=np.int64), keep)
    return Tally(tuple(zip(tally.candidates, (int(v) for v in kept))))


def odds_report(odds: OddsTable, tally: Tally) -> dict:
    """JSON-ready summary with exact fractions, decimals and per-vote-count tiers."""
    rows = [
        {
            "candidate": c,
            "votes": v,
            "weight": w,
            "probability": str(p),
            "decimal": float(p),
        }
        for (c, p), v, w in zip(odds.entries, tally.votes, odds.weights)
    ]
    tiers: dict[int, list] = {}
    for (c, p), v in zip(odds.entries, tally.votes):
        tiers.setdefault(v, [0, Fraction(0)])
        tiers[v][0] += 1
        tiers[v][1] += p
    return {
        "exponent": odds.exponent,
        "total_weight": odds.total_weight,
        "odds": rows,
        "tiers": [
            {"votes": v, "candidates": n, "combined": str(p), "decimal": float(p)}
            for v, (n, p) in sorted(tiers.items(), reverse=True)
        ],
    }
