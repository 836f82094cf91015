"""Graph isomorphism (knowledge of an isomorphism) and non-isomorphism protocols.

Node maps are lists: ``sigma[a]`` is the image of node ``a``.
"""
from __future__ import annotations

import random
from functools import lru_cache
from typing import Sequence

import networkx as nx

from ..errors import DomainError
from .graph import Graph, disjoint_union, load_graph
from .transcript import Transcript

SAME, SWAPPED = "same", "swapped"


def random_permutation(n: int, rng: random.Random) -> list[int]:
    perm = list(range(n))
    rng.shuffle(perm)
    return perm


def inverse(perm: Sequence[int]) -> list[int]:
    inv = [0] * len(perm)
    for a, b in enumerate(perm):
        inv[b] = a
    return inv


def is_isomorphism(src: Graph, dst: Graph, sigma) -> bool:
    """Edge-exact check that ``sigma`` maps ``src`` onto ``dst``."""
    n = src.node_count
    if dst.node_count != n or not isinstance(sigma, (list, tuple)) or len(sigma) != n:
        return False
    if any(isinstance(x, bool) or not isinstance(x, int) for x in sigma):
        return False
    if sorted(sigma) != list(range(n)):
        return False
    return {(sigma[a], sigma[b]) for a, b in src.edges} == dst.edges


@lru_cache(maxsize=65536)
def isomorphic(a: Graph, b: Graph) -> bool:
    if a.node_count != b.node_count or len(a.edges) != len(b.edges):
        return False
    return nx.is_isomorphic(a.to_networkx(), b.to_networkx())


def find_isomorphism(g1: Graph, g2: Graph) -> list[int] | None:
    if g1.node_count != g2.node_count or len(g1.edges) != len(g2.edges):
        return None
    matcher = nx.algorithms.isomorphism.GraphMatcher(g1.to_networkx(), g2.to_networkx())
    if not matcher.is_isomorphic():
        return None
    return [matcher.mapping[a] for a in range(g1.node_count)]


# -- isomorphism protocol ---------------------------------------------------------

class IsoProver:
    """Knows ``phi: g1 -> g2``; sends a random relabeling of ``g1`` each round."""

    def __init__(self, g1: Graph, g2: Graph, phi: Sequence[int], rng: random.Random):
        if not is_isomorphism(g1, g2, list(phi)):
            raise DomainError("refusing to prove: witness is not an isomorphism g1 -> g2")
        self.g1, self.g2, self.phi = g1, g2, list(phi)
        self.rng = rng
        self._pi: list[int] = []

    def commit(self) -> Graph:
        self._pi = random_permutation(self.g1.node_count, self.rng)
        return self.g1.relabel(self._pi)

    def answer(self, i: int) -> list[int]:
        back = inverse(self._pi)  # h -> g1
        if i == 1:
            return back
        return [self.phi[a] for a in back]


class GuessingIsoProver:
    """No witness: relabels a guessed ``g_j`` and can answer only challenge ``j``."""

    def __init__(self, g1: Graph, g2: Graph, rng: random.Random):
        self.graphs = {1: g1, 2: g2}
        self.rng = rng
        self._guess = 1
        self._pi: list[int] = []

    def commit(self) -> Graph:
        self._guess = self.rng.choice((1, 2))
        g = self.graphs[self._guess]
        self._pi = random_permutation(g.node_count, self.rng)
        return g.relabel(self._pi)

    def answer(self, i: int) -> list[int]:
        return inverse(self._pi)


def _run_iso(g1: Graph, g2: Graph, prover, v_rng: random.Random, rounds: int, tr: Transcript) -> Transcript:
    verdict = "accept"
    targets = {1: g1, 2: g2}
    for r in range(rounds):
        h = prover.commit()
        tr.add("commit", round=r, graph=h.to_dict())
        i = v_rng.choice((1, 2))
        tr.add("challenge", round=r, index=i)
        sigma = prover.answer(i)
        tr.add("answer", round=r, mapping=list(sigma) if isinstance(sigma, (list, tuple)) else sigma)
        ok = is_isomorphism(h, targets[i], sigma)
        tr.add("check", round=r, accepted=ok)
        if not ok:
            verdict = "reject"
            break
    tr.verdict = verdict
    tr.add("verdict", verdict=verdict)
    return tr


def iso_protocol(
    g1: Graph,
    g2: Graph,
    isomorphism: Sequence[int] | None = None,
    rounds: int = 20,
    prover_seed: int = 0,
    verifier_seed: int = 1,
    prover=None,
) -> Transcript:
    """Each round: prover sends ``h``, verifier picks ``i``, prover maps ``h`` onto ``g_i``.

    ``prover`` may be an object with ``commit()``/``answer(i)`` or a callable
    taking the prover RNG.  Without one, an :class:`IsoProver` is built from
    ``isomorphism``, or a :class:`GuessingIsoProver` if none is given.
    """
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    p_rng = random.Random(prover_seed)
    if prover is None:
        prover = (
            IsoProver(g1, g2, isomorphism, p_rng)
            if isomorphism is not None
            else GuessingIsoProver(g1, g2, p_rng)
        )
    elif callable(prover) and not hasattr(prover, "commit"):
        prover = prover(p_rng)
    tr = Transcript("iso", {"g1": g1.to_dict(), "g2": g2.to_dict(), "rounds": rounds})
    return _run_iso(g1, g2, prover, random.Random(verifier_seed), rounds, tr)


def replay_iso(tr: Transcript) -> bool:
    targets = {1: load_graph(tr.params["g1"]), 2: load_graph(tr.params["g2"])}
    overall = "accept"
    for events in tr.rounds():
        by = {ev["type"]: ev for ev in events}
        ok = is_isomorphism(load_graph(by["commit"]["graph"]), targets[by["challenge"]["index"]], by["answer"]["mapping"])
        if ok != by["check"]["accepted"]:
            return False
        if not ok:
            overall = "reject"
    return overall == tr.verdict


# -- non-isomorphism protocol -------------------------------------------------------

class NonisoVerifier:
    """Secretly keeps or swaps the two halves of ``g1 + g2`` and relabels within each half."""

    def __init__(self, g1: Graph, g2: Graph, rng: random.Random):
        self.n = g1.node_count
        self.g = disjoint_union(g1, g2)
        self.rng = rng
        self.secret = SAME
        self.witness: list[int] = []

    def challenge(self) -> Graph:
        n = self.n
        swap = self.rng.random() < 0.5
        s1 = random_permutation(n, self.rng)
        s2 = random_permutation(n, self.rng)
        first = [n + x for x in s1] if swap else s1
        second = s2 if swap else [n + x for x in s2]
        self.secret = SWAPPED if swap else SAME
        self.witness = first + second  # isomorphism g -> h
        return self.g.relabel(self.witness)

    def subproof_prover(self, h: Graph) -> IsoProver | GuessingIsoProver:
        return IsoProver(self.g, h, self.witness, self.rng)


class NonisoProver:
    """Unbounded prover: decides which original graph sits on the first half of ``h``."""

    def __init__(self, g1: Graph, g2: Graph, rng: random.Random):
        self.g1, self.g2, self.n = g1, g2, g1.node_count
        self.rng = rng

    def answer(self, h: Graph) -> str:
        first = h.induced(range(self.n))
        like1, like2 = isomorphic(first, self.g1), isomorphic(first, self.g2)
        if like1 and not like2:
            return SAME
        if like2 and not like1:
            return SWAPPED
        return self.rng.choice((SAME, SWAPPED))


def noniso_protocol(
    g1: Graph,
    g2: Graph,
    rounds: int = 10,
    prover_seed: int = 0,
    verifier_seed: int = 1,
    subrounds: int = 20,
    prover=None,
    verifier=None,
) -> Transcript:
    """Prover convinces the verifier that ``g1`` and ``g2`` are not isomorphic.

    Every round the verifier first proves, with ``subrounds`` rounds of the
    isomorphism protocol (roles swapped), that it knows a map from
    ``g1 + g2`` onto its challenge graph; if that fails the run is aborted.
    """
    if rounds < 1 or subrounds < 1:
        raise ValueError("rounds and subrounds must be at least 1")
    tr = Transcript(
        "noniso",
        {"g1": g1.to_dict(), "g2": g2.to_dict(), "rounds": rounds, "subrounds": subrounds},
    )
    if g1.node_count != g2.node_count or len(g1.edges) != len(g2.edges):
        tr.add("trivial", reason="node or edge counts differ")
        tr.verdict = "accept"
        tr.add("verdict", verdict="accept")
        return tr
    if not (g1.is_connected() and g2.is_connected()):
        raise DomainError("non-isomorphism protocol expects connected graphs")

    p_rng = random.Random(prover_seed)
    v_rng = random.Random(verifier_seed)
    prover = prover(p_rng) if callable(prover) and not hasattr(prover, "answer") else prover
    verifier = verifier(v_rng) if callable(verifier) and not hasattr(verifier, "challenge") else verifier
    prover = prover or NonisoProver(g1, g2, p_rng)
    verifier = verifier or NonisoVerifier(g1, g2, v_rng)
    g = disjoint_union(g1, g2)

    verdict = "accept"
    for r in range(rounds):
        h = verifier.challenge()
        tr.add("challenge", round=r, graph=h.to_dict())
        sub = Transcript("iso", {"rounds": subrounds})
        _run_iso(g, h, verifier.subproof_prover(h), p_rng, subrounds, sub)
        tr.add("subproof", round=r, events=sub.events, verdict=sub.verdict)
        if not sub.accepted:
            tr.add("abort", round=r, reason="verifier unproven")
            verdict = "aborted"
            break
        claim = prover.answer(h)
        ok = claim == verifier.secret
        tr.add("answer", round=r, claim=claim)
        tr.add("check", round=r, secret=verifier.secret, accepted=ok)
        if not ok:
            verdict = "reject"
            break
    tr.verdict = verdict
    tr.add("verdict", verdict=verdict)
    return tr


def replay_noniso(tr: Transcript) -> bool:
    g1, g2 = load_graph(tr.params["g1"]), load_graph(tr.params["g2"])
    if any(ev["type"] == "trivial" for ev in tr.events):
        return tr.verdict == "accept" and (
            g1.node_count != g2.node_count or len(g1.edges) != len(g2.edges)
        )
    g = disjoint_union(g1, g2)
    overall = "accept"
    for events in tr.rounds():
        by = {ev["type"]: ev for ev in events}
        h = load_graph(by["challenge"]["graph"])
        sub = Transcript("iso", {"g1": g.to_dict(), "g2": h.to_dict()}, by["subproof"]["events"], by["subproof"]["verdict"])
        if not replay_iso(sub):
            return False
        if "abort" in by:
            overall = "aborted"
            break
        ok = by["answer"]["claim"] == by["check"]["secret"]
        if ok != by["check"]["accepted"]:
            return False
        if not ok:
            overall = "reject"
            break
    return overall == tr.verdict
