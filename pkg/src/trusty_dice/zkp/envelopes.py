"""Three envelopes for a balanced 3-coloring, their pairwise checks and simulators.

The prover's random string is a *tape* ``omega`` in ``[0, v! * |g|!)``.  It
decodes (lexicographic permutation ranks) to a node enumeration ``p`` and an
edge enumeration ``q``; ``q[j]`` is the label of the ``j``-th directed edge in
the graph's canonical edge order.  Enumerating every tape therefore visits
every ``(p, q)`` pair exactly once.

Envelope payloads (plain JSON types):

* E1 ``{"p": [...], "r": [...]}`` -- ``p[a]`` is the new name of node ``a``;
  ``r[label]`` is the label of the reciprocal edge.
* E2 ``{"sources": [...]}`` -- permuted source node of each label.
* E3 ``{"colors": [...]}`` -- color of the source node of each label.
"""
from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from ..errors import DomainError
from .graph import COLORS, Graph, canonical_balanced_coloring, is_balanced, is_proper

Pair = tuple[int, int]
PAIRS: tuple[Pair, ...] = ((1, 2), (1, 3), (2, 3))


def tape_space(g: Graph) -> int:
    return math.factorial(g.node_count) * math.factorial(g.edge_label_count)


def unrank_permutation(index: int, n: int) -> tuple[int, ...]:
    """Permutation of ``range(n)`` with lexicographic rank ``index``."""
    items = list(range(n))
    out = []
    for i in range(n, 0, -1):
        j, index = divmod(index, math.factorial(i - 1))
        out.append(items.pop(j))
    return tuple(out)


def decode_tape(g: Graph, omega: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    tq = math.factorial(g.edge_label_count)
    ip, iq = divmod(omega, tq)
    return unrank_permutation(ip, g.node_count), unrank_permutation(iq, g.edge_label_count)


def draw_tape(g: Graph, rng: random.Random) -> int:
    return rng.randrange(tape_space(g))


@dataclass(frozen=True)
class EnvelopeTriple:
    p: tuple[int, ...]
    r: tuple[int, ...]
    e2: tuple[int, ...]
    e3: tuple[int, ...]

    def payload(self, which: int) -> dict:
        if which == 1:
            return {"p": list(self.p), "r": list(self.r)}
        if which == 2:
            return {"sources": list(self.e2)}
        if which == 3:
            return {"colors": list(self.e3)}
        raise ValueError(f"no envelope {which}")

    def payloads(self) -> dict[int, dict]:
        return {i: self.payload(i) for i in (1, 2, 3)}

    @classmethod
    def from_payloads(cls, payloads: Mapping[int, dict]) -> "EnvelopeTriple":
        return cls(
            tuple(payloads[1]["p"]),
            tuple(payloads[1]["r"]),
            tuple(payloads[2]["sources"]),
            tuple(payloads[3]["colors"]),
        )


def build_envelopes(
    g: Graph, colors: Sequence[int], p: Sequence[int], q: Sequence[int]
) -> EnvelopeTriple:
    T = g.edge_label_count
    r = [0] * T
    e2 = [0] * T
    e3 = [0] * T
    rev = g.reverse_index
    for j, a in enumerate(g.sources):
        label = q[j]
        r[label] = q[rev[j]]
        e2[label] = p[a]
        e3[label] = colors[a]
    return EnvelopeTriple(tuple(p), tuple(r), tuple(e2), tuple(e3))


def envelopes_from_tape(g: Graph, colors: Sequence[int], omega: int) -> EnvelopeTriple:
    p, q = decode_tape(g, omega)
    return build_envelopes(g, colors, p, q)


def validate_witness(g: Graph, colors: Sequence[int]) -> None:
    """Honest provers only commit to proper balanced colorings."""
    if len(colors) != g.node_count or any(c not in COLORS for c in colors):
        raise DomainError("refusing to commit: coloring is malformed")
    if not is_proper(g, colors):
        raise DomainError("refusing to commit: coloring is not proper")
    if not is_balanced(g, colors):
        raise DomainError("refusing to commit: coloring is not balanced")


# -- verification ---------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    accepted: bool
    rule: str | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {"accepted": self.accepted, "rule": self.rule, "detail": self.detail}


ACCEPT = Verdict(True)


class _Reject(Exception):
    def __init__(self, rule: str, detail: str = ""):
        self.rule, self.detail = rule, detail


def _int_list(value, length: int, allowed, rule: str) -> list[int]:
    if not isinstance(value, (list, tuple)) or len(value) != length:
        raise _Reject(rule, f"expected a list of length {length}")
    if any(isinstance(x, bool) or not isinstance(x, int) or x not in allowed for x in value):
        raise _Reject(rule, "entry out of range")
    return list(value)


def _field(payload, key: str, rule: str):
    if not isinstance(payload, Mapping) or key not in payload:
        raise _Reject(rule, f"missing {key!r}")
    return payload[key]


def _read_e1(g: Graph, payload) -> tuple[list[int], list[int]]:
    v, T = g.node_count, g.edge_label_count
    p = _int_list(_field(payload, "p", "E1.format"), v, range(v), "E1.format")
    if len(set(p)) != v:
        raise _Reject("E1.p-bijection", "p repeats a node")
    r = _int_list(_field(payload, "r", "E1.format"), T, range(T), "E1.format")
    for e in range(T):
        if r[e] == e or r[r[e]] != e:
            raise _Reject("E1.r-involution", f"label {e}")
    return p, r


def _read_e2(g: Graph, payload) -> list[int]:
    v, T = g.node_count, g.edge_label_count
    return _int_list(_field(payload, "sources", "E2.format"), T, range(v), "E2.format")


def _read_e3(g: Graph, payload) -> list[int]:
    return _int_list(_field(payload, "colors", "E3.format"), g.edge_label_count, COLORS, "E3.format")


def _degree_classes(g: Graph) -> Counter:
    return Counter(d for d in g.degrees if d > 0)


def _check_12(g: Graph, e1, e2) -> None:
    p, r = _read_e1(g, e1)
    src = _read_e2(g, e2)
    seen = {(src[e], src[r[e]]) for e in range(len(src))}
    expected = {(p[a], p[b]) for a, b in g.edges}
    if len(seen) != len(src) or seen != expected:
        raise _Reject("E12.edge-set", "labels do not enumerate the permuted edges")


def _check_13(g: Graph, e1, e3) -> None:
    _, r = _read_e1(g, e1)
    col = _read_e3(g, e3)
    for e in range(len(col)):
        if col[e] == col[r[e]]:
            raise _Reject("E13.reciprocal-colors", f"labels {e} and {r[e]} share color {col[e]}")
    # a balanced coloring puts sum_d d * n_d / 3 labels on each color
    classes = _degree_classes(g)
    if any(n % 3 for n in classes.values()):
        raise _Reject("E13.color-counts", "degree classes admit no balanced coloring")
    per_color = sum(d * n // 3 for d, n in classes.items())
    counts = Counter(col)
    if any(counts[c] != per_color for c in COLORS):
        raise _Reject("E13.color-counts", f"color counts {dict(counts)}, expected {per_color} each")


def _check_23(g: Graph, e2, e3) -> None:
    src = _read_e2(g, e2)
    col = _read_e3(g, e3)
    node_color: dict[int, int] = {}
    for s, c in zip(src, col):
        if node_color.setdefault(s, c) != c:
            raise _Reject("E23.source-colors", f"node {s} carries two colors")
    mult = Counter(src)
    if Counter(mult.values()) != _degree_classes(g):
        raise _Reject("E23.degree-sequence", "out-degrees differ from the graph")
    per_degree: dict[int, Counter] = {}
    for node, d in mult.items():
        per_degree.setdefault(d, Counter())[node_color[node]] += 1
    for d, counts in per_degree.items():
        if len({counts[c] for c in COLORS}) != 1:
            raise _Reject("E23.degree-balance", f"degree {d} colors {dict(counts)}")


_CHECKS = {(1, 2): _check_12, (1, 3): _check_13, (2, 3): _check_23}


def check_pair(g: Graph, pair: Pair, opened: Mapping[int, object]) -> Verdict:
    """Consistency of two opened envelopes with the graph and with each other."""
    pair = tuple(pair)
    if pair not in _CHECKS:
        raise ValueError(f"unknown envelope pair {pair!r}")
    try:
        _CHECKS[pair](g, opened[pair[0]], opened[pair[1]])
    except _Reject as rej:
        return Verdict(False, rej.rule, rej.detail)
    return ACCEPT


def pair_verdicts(g: Graph, triple: EnvelopeTriple) -> dict[Pair, Verdict]:
    payloads = triple.payloads()
    return {pair: check_pair(g, pair, payloads) for pair in PAIRS}


def extract_coloring(g: Graph, triple: EnvelopeTriple) -> tuple[int, ...] | None:
    """Read a node coloring back through ``p``; ``None`` if it is not well defined."""
    if sorted(triple.p) != list(range(g.node_count)):
        return None
    inverse = {y: a for a, y in enumerate(triple.p)}
    colors: dict[int, int] = {}
    for y, c in zip(triple.e2, triple.e3):
        if y not in inverse or colors.setdefault(inverse[y], c) != c:
            return None
    if len(colors) != g.node_count:
        return None
    return tuple(colors[a] for a in range(g.node_count))


def pair_view(triple: EnvelopeTriple, pair: Pair) -> tuple:
    """Hashable content of the two opened envelopes."""
    if pair == (1, 2):
        return (triple.p, triple.r, triple.e2)
    if pair == (1, 3):
        return (triple.p, triple.r, triple.e3)
    if pair == (2, 3):
        return (triple.e2, triple.e3)
    raise ValueError(f"unknown envelope pair {pair!r}")


# -- simulation from the graph alone ----------------------------------------------

class _SimulatorPlan:
    """Per-graph data the simulator derives without any coloring."""

    def __init__(self, g: Graph):
        T = g.edge_label_count
        if T % 6:
            raise DomainError("simulation needs |g| divisible by 6 (three-component graphs)")
        self.graph = g
        self.fake_colors = canonical_balanced_coloring(g)
        # T/2 reciprocal label pairs, T/6 for each color class {1,2}, {1,3}, {2,3}
        sixth = T // 6
        src_color, rev = [], []
        for u, (c1, c2) in enumerate(((1, 2),) * sixth + ((1, 3),) * sixth + ((2, 3),) * sixth):
            src_color += [c1, c2]
            rev += [2 * u + 1, 2 * u]
        self.pair_colors = tuple(src_color)
        self.pair_reverse = tuple(rev)


def simulator_plan(g: Graph) -> _SimulatorPlan:
    return _SimulatorPlan(g)


def simulate_from_tape(plan: _SimulatorPlan, pair: Pair, omega: int) -> tuple:
    g = plan.graph
    p, q = decode_tape(g, omega)
    return simulate_from_pq(plan, pair, p, q)


def simulate_from_pq(plan: _SimulatorPlan, pair: Pair, p: Sequence[int], q: Sequence[int]) -> tuple:
    g = plan.graph
    if pair == (1, 2):
        # E1 and E2 never involve the coloring
        t = build_envelopes(g, plan.fake_colors, p, q)
        return (t.p, t.r, t.e2)
    if pair == (1, 3):
        T = len(q)
        r = [0] * T
        e3 = [0] * T
        for j in range(T):
            r[q[j]] = q[plan.pair_reverse[j]]
            e3[q[j]] = plan.pair_colors[j]
        return (tuple(p), tuple(r), tuple(e3))
    if pair == (2, 3):
        t = build_envelopes(g, plan.fake_colors, p, q)
        return (t.e2, t.e3)
    raise ValueError(f"unknown envelope pair {pair!r}")


def simulate_pair(g: Graph, pair: Pair, seed: int) -> dict[int, dict]:
    """Opened contents of ``pair`` sampled from the graph alone."""
    plan = simulator_plan(g)
    view = simulate_from_tape(plan, tuple(pair), draw_tape(g, random.Random(seed)))
    if pair == (1, 2):
        p, r, e2 = view
        return {1: {"p": list(p), "r": list(r)}, 2: {"sources": list(e2)}}
    if pair == (1, 3):
        p, r, e3 = view
        return {1: {"p": list(p), "r": list(r)}, 3: {"colors": list(e3)}}
    e2, e3 = view
    return {2: {"sources": list(e2)}, 3: {"colors": list(e3)}}
