"""Repeated three-envelope rounds between a prover and a verifier."""
from __future__ import annotations

import random
from typing import Callable, Sequence

from .commitment import CommitMode, Commitment, Opening, commit, verify_opening
from .envelopes import (
    PAIRS,
    EnvelopeTriple,
    Pair,
    Verdict,
    check_pair,
    draw_tape,
    envelopes_from_tape,
    validate_witness,
)
from .graph import Graph, load_graph
from .transcript import Transcript


def prover_commit(
    g: Graph, colors: Sequence[int], seed: int, mode: CommitMode = "hash"
) -> tuple[EnvelopeTriple, list[Commitment], list[Opening]]:
    """Envelopes for a fresh random string drawn from ``seed``, each committed."""
    validate_witness(g, colors)
    rng = random.Random(seed)
    triple = envelopes_from_tape(g, colors, draw_tape(g, rng))
    sealed = [commit(triple.payload(i), mode, rng) for i in (1, 2, 3)]
    return triple, [c for c, _ in sealed], [o for _, o in sealed]


class Prover:
    """Commits to one triple per round and reveals the openings on request.

    Subclasses override :meth:`triple` (what to commit) and may override
    :meth:`reveal` to tamper with an opening after committing.
    """

    def __init__(self, g: Graph, rng: random.Random):
        self.g = g
        self.rng = rng

    def triple(self, round_index: int) -> EnvelopeTriple:
        raise NotImplementedError

    def reveal(self, which: int, opening: Opening) -> Opening:
        return opening


class FixedColoringProver(Prover):
    """Honest envelope construction around an arbitrary (possibly invalid) coloring."""

    def __init__(self, g: Graph, colors: Sequence[int], rng: random.Random):
        super().__init__(g, rng)
        self.colors = tuple(colors)

    def triple(self, round_index: int) -> EnvelopeTriple:
        return envelopes_from_tape(self.g, self.colors, draw_tape(self.g, self.rng))


class HonestProver(FixedColoringProver):
    def __init__(self, g: Graph, colors: Sequence[int], rng: random.Random):
        validate_witness(g, colors)
        super().__init__(g, colors, rng)


class StrategyProver(Prover):
    """Commits whatever ``strategy(round_index, rng)`` returns."""

    def __init__(self, g: Graph, strategy: Callable[[int, random.Random], EnvelopeTriple], rng: random.Random):
        super().__init__(g, rng)
        self.strategy = strategy

    def triple(self, round_index: int) -> EnvelopeTriple:
        return self.strategy(round_index, self.rng)


def _opening_event(opening: Opening) -> dict:
    out = {"payload": opening.payload}
    if opening.nonce is not None:
        out["nonce"] = opening.nonce
    return out


def run_coloring_protocol(
    g: Graph,
    colors: Sequence[int] | None = None,
    rounds: int = 1,
    prover_seed: int = 0,
    verifier_seed: int = 1,
    commit_mode: CommitMode = "hash",
    prover: Prover | Callable[[random.Random], Prover] | None = None,
    stop_on_reject: bool = True,
) -> Transcript:
    """Run ``rounds`` rounds; accept iff every round's pair check accepts.

    Without an explicit ``prover`` an honest one is built from ``colors``
    (and refuses invalid witnesses).  A callable ``prover`` is given the
    prover RNG and must return a :class:`Prover`.
    """
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    p_rng = random.Random(prover_seed)
    v_rng = random.Random(verifier_seed)
    if prover is None:
        if colors is None:
            raise ValueError("an honest run needs a coloring")
        prover = HonestProver(g, colors, p_rng)
    elif not isinstance(prover, Prover):
        prover = prover(p_rng)

    tr = Transcript(
        "coloring",
        {"graph": g.to_dict(), "rounds": rounds, "commit_mode": commit_mode},
    )
    verdict = "accept"
    for i in range(rounds):
        triple = prover.triple(i)
        sealed = [commit(triple.payload(w), commit_mode, p_rng) for w in (1, 2, 3)]
        for w, (c, _) in zip((1, 2, 3), sealed):
            tr.add("commit", round=i, envelope=w, commitment=c.public())
        pair: Pair = v_rng.choice(PAIRS)
        tr.add("challenge", round=i, pair=list(pair))

        opened = {}
        binding_ok = True
        for w in pair:
            c, opening = sealed[w - 1]
            if commit_mode == "ideal":
                opening = Opening(c.escrow.open())
            else:
                opening = prover.reveal(w, opening)
            tr.add("open", round=i, envelope=w, **_opening_event(opening))
            binding_ok &= verify_opening(c, opening)
            opened[w] = opening.payload
        if binding_ok:
            v = check_pair(g, pair, opened)
        else:
            v = Verdict(False, "binding", "opening does not match commitment")
        tr.add("check", round=i, **v.to_dict())
        if not v.accepted:
            verdict = "reject"
            if stop_on_reject:
                break
    tr.verdict = verdict
    tr.add("verdict", verdict=verdict)
    return tr


def replay_coloring(tr: Transcript) -> bool:
    """Recheck every recorded opening; true iff all recorded verdicts reproduce."""
    g = load_graph(tr.params["graph"])
    overall = "accept"
    for events in tr.rounds():
        commits = {ev["envelope"]: ev["commitment"] for ev in events if ev["type"] == "commit"}
        challenge = next(ev for ev in events if ev["type"] == "challenge")
        opens = [ev for ev in events if ev["type"] == "open"]
        recorded = next(ev for ev in events if ev["type"] == "check")
        opened, binding_ok = {}, True
        for ev in opens:
            opening = Opening(ev["payload"], ev.get("nonce"))
            binding_ok &= verify_opening(commits[ev["envelope"]], opening)
            opened[ev["envelope"]] = ev["payload"]
        if binding_ok:
            v = check_pair(g, tuple(challenge["pair"]), opened)
        else:
            v = Verdict(False, "binding", "opening does not match commitment")
        if v.accepted != recorded["accepted"] or v.rule != recorded["rule"]:
            return False
        if not v.accepted:
            overall = "reject"
    return overall == tr.verdict
