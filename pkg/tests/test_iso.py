import json
import math
import random

import pytest

from trusty_dice.errors import DomainError
from trusty_dice.zkp import Graph, Transcript, replay
from trusty_dice.zkp.iso import (
    GuessingIsoProver,
    IsoProver,
    NonisoVerifier,
    find_isomorphism,
    inverse,
    is_isomorphism,
    iso_protocol,
    noniso_protocol,
)

PATH4 = Graph.from_undirected(4, [(0, 1), (1, 2), (2, 3)])
STAR4 = Graph.from_undirected(4, [(0, 1), (0, 2), (0, 3)])
C6 = Graph.from_undirected(6, [(i, (i + 1) % 6) for i in range(6)])
TWO_TRIANGLES_BRIDGED = Graph.from_undirected(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3)])
TADPOLE = Graph.from_undirected(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5)])
PATH6 = Graph.from_undirected(6, [(i, i + 1) for i in range(5)])


def shuffled(g, seed):
    perm = list(range(g.node_count))
    random.Random(seed).shuffle(perm)
    return g.relabel(perm), perm


def test_inverse_and_isomorphism_check():
    h, perm = shuffled(C6, 1)
    assert is_isomorphism(C6, h, perm)
    assert is_isomorphism(h, C6, inverse(perm))
    assert not is_isomorphism(C6, h, [0] * 6)
    assert not is_isomorphism(C6, h, "nope")
    assert find_isomorphism(PATH4, STAR4) is None
    phi = find_isomorphism(C6, h)
    assert is_isomorphism(C6, h, phi)


def test_honest_iso_accepts_and_replays():
    h, perm = shuffled(TWO_TRIANGLES_BRIDGED, 2)
    tr = iso_protocol(TWO_TRIANGLES_BRIDGED, h, perm, rounds=30, prover_seed=3, verifier_seed=4)
    assert tr.accepted
    assert replay(Transcript.from_dict(json.loads(tr.to_json())))


def test_iso_prover_refuses_bad_witness():
    with pytest.raises(DomainError):
        IsoProver(PATH4, STAR4, [0, 1, 2, 3], random.Random(0))


def test_guessing_prover_escapes_half_per_round():
    runs = 4000
    wins = sum(iso_protocol(PATH4, STAR4, rounds=1, prover_seed=s, verifier_seed=50_000 + s).accepted for s in range(runs))
    assert abs(wins / runs - 0.5) <= 3 * math.sqrt(0.25 / runs)


def test_guessing_prover_twenty_rounds():
    wins = sum(iso_protocol(PATH4, STAR4, rounds=20, prover_seed=s, verifier_seed=s + 1).accepted for s in range(2000))
    # expected 2000 / 2**20 ~ 0.002
    assert wins <= 1


def test_rejected_iso_transcript_replays():
    tr = iso_protocol(PATH4, STAR4, rounds=20)
    assert tr.verdict == "reject"
    assert replay(tr)


def test_noniso_honest_accepts_nonisomorphic():
    for s in range(20):
        tr = noniso_protocol(C6, TADPOLE, rounds=10, subrounds=5, prover_seed=s, verifier_seed=s + 100)
        assert tr.accepted
        assert not any(e["type"] == "trivial" for e in tr.events)
    assert replay(tr)


def test_noniso_on_isomorphic_inputs_half_per_round():
    h, _ = shuffled(C6, 5)
    runs = 2000
    acc = sum(noniso_protocol(C6, h, rounds=1, subrounds=2, prover_seed=s, verifier_seed=s + 7).accepted for s in range(runs))
    assert abs(acc / runs - 0.5) <= 3 * math.sqrt(0.25 / runs)


def test_noniso_trivial_when_sizes_differ():
    tr = noniso_protocol(C6, PATH6, rounds=3)
    assert tr.accepted
    assert any(e["type"] == "trivial" for e in tr.events)
    assert replay(tr)


def test_noniso_requires_connected_graphs():
    disc = Graph.from_undirected(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
    with pytest.raises(DomainError):
        noniso_protocol(disc, C6)


class BogusVerifier(NonisoVerifier):
    """Claims a map it does not have: its subproof prover guesses."""

    def subproof_prover(self, h):
        return GuessingIsoProver(self.g, self.g.relabel(list(range(self.g.node_count))[::-1]), self.rng)


def test_unproven_verifier_aborts():
    tr = noniso_protocol(
        C6, TADPOLE, rounds=3, subrounds=20,
        verifier=lambda rng: BogusVerifier(C6, TADPOLE, rng),
    )
    assert tr.verdict == "aborted"
    assert not any(e["type"] == "answer" for e in tr.events)
    assert replay(tr)
