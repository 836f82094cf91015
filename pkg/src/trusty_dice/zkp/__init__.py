"""Three-envelope zero-knowledge 3-coloring proofs and graph (non-)isomorphism games."""
from .coloring import (
    FixedColoringProver,
    HonestProver,
    Prover,
    StrategyProver,
    prover_commit,
    replay_coloring,
    run_coloring_protocol,
)
from .commitment import Commitment, Escrow, Opening, commit, verify_opening
from .envelopes import (
    PAIRS,
    EnvelopeTriple,
    Verdict,
    build_envelopes,
    check_pair,
    decode_tape,
    envelopes_from_tape,
    extract_coloring,
    pair_verdicts,
    pair_view,
    simulate_pair,
    tape_space,
)
from .graph import (
    Graph,
    ThreeComponentGraph,
    as_three_component,
    balance_coloring,
    is_balanced,
    is_proper,
    load_graph,
    make_three_component,
)
from .iso import iso_protocol, noniso_protocol, replay_iso, replay_noniso
from .transcript import Transcript


def replay(tr: Transcript) -> bool:
    """Recompute every check in a stored transcript and compare verdicts."""
    return {"coloring": replay_coloring, "iso": replay_iso, "noniso": replay_noniso}[tr.protocol](tr)
