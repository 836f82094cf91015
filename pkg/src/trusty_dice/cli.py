"""``trusty-dice`` command line: one entry point over every module.

Exit codes: 0 success or accept, 1 honest negative verdict (protocol
rejected, bound violated), 2 usage or input error, 3 over the work budget.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import FORMAT_VERSION, __version__, estimator, extractor, harness, lottery
from .errors import CapacityError, DomainError, TrustyDiceError, ValidationError
from .zkp import coloring, graph as graphs, iso
from .zkp.envelopes import validate_witness

EXIT_OK, EXIT_REJECT, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3
SEED_ENV = "TRUSTY_DICE_SEED"
SEED_LIMIT = 1 << 64


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= value < SEED_LIMIT:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _json_default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, (set, frozenset, tuple)):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def render(doc, style: str) -> str:
    if style == "pretty":
        return json.dumps(doc, sort_keys=True, indent=2, default=_json_default)
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), default=_json_default)


def read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from None


def derived_seeds(seed: int, count: int) -> list[int]:
    rng = random.Random(seed)
    return [rng.getrandbits(64) for _ in range(count)]


# -- handlers: each returns (document, exit code) --------------------------------

def cmd_estimate(args):
    batch = estimator.load_samples(read_json(args.input), args.epsilon)
    return estimator.estimate(batch, args.mode).to_dict(), EXIT_OK


def cmd_extract_verify(args):
    source = extractor.load_source(read_json(args.source))
    family = extractor.make_family(args.family, source.n, args.k)
    report = extractor.verify_lemma(source, family, args.budget)
    doc = {"family": args.family, "n": family.n, "k": family.k, "t": family.t, **report.to_dict()}
    return doc, EXIT_OK if report.holds else EXIT_REJECT


def cmd_extract_run(args):
    try:
        lines = [ln.strip() for ln in Path(args.input).read_text().splitlines() if ln.strip()]
    except OSError as exc:
        raise ValidationError(f"cannot read {args.input}: {exc.strerror}") from None
    n = args.n if args.n is not None else (len(lines[0]) if lines else None)
    if n is None:
        raise ValidationError("no input bit strings and no --n given")
    family = extractor.make_family(args.family, n, args.k)
    try:
        key = int(args.key, 16)
    except ValueError:
        raise ValidationError(f"key must be hexadecimal, got {args.key!r}") from None
    outputs = extractor.extract_stream(family, key, lines)
    return {"family": args.family, "n": n, "k": family.k, "key": args.key, "outputs": outputs}, EXIT_OK


def _load_tally(path):
    return lottery.Tally.from_mapping(read_json(path))


def cmd_lottery_odds(args):
    tally = _load_tally(args.tally)
    return lottery.odds_report(lottery.power_odds(tally, args.exponent), tally), EXIT_OK


def cmd_lottery_draw(args):
    tally = _load_tally(args.tally)
    doc = {"seed": args.seed, "exponent": args.exponent, "smoothed": args.smooth}
    if args.smooth:
        tally = lottery.noise_smooth(tally, args.seed)
        doc["smoothed_tally"] = tally.to_dict()
    odds = lottery.power_odds(tally, args.exponent)
    doc["winner"] = lottery.draw(odds, args.seed)
    doc["winner_probability"] = str(odds.probability(doc["winner"]))
    return doc, EXIT_OK


def _coloring_doc(doc):
    colors = doc.get("colors") if isinstance(doc, dict) else doc
    if not isinstance(colors, list):
        raise ValidationError("coloring file must hold a list of colors or {\"colors\": [...]}")
    return colors


def _three_component(g: graphs.Graph, colors: list | None):
    """Use ``g`` as is if it already has three isomorphic components, else triple it."""
    if g.is_connected():
        tc = graphs.make_three_component(g)
        if colors is not None and len(colors) == g.node_count:
            colors = graphs.balance_coloring(tc, colors)
        return tc, colors
    return graphs.as_three_component(g), colors


def _verdict_exit(tr) -> int:
    return EXIT_OK if tr.accepted else EXIT_REJECT


def cmd_zk_color(args):
    g = graphs.load_graph(read_json(args.graph))
    tc, colors = _three_component(g, _coloring_doc(read_json(args.coloring)))
    prover_seed, verifier_seed = derived_seeds(args.seed, 2)
    tr = coloring.run_coloring_protocol(
        tc.graph, colors, rounds=args.rounds, prover_seed=prover_seed,
        verifier_seed=verifier_seed, commit_mode=args.commit,
    )
    return tr.to_dict(), _verdict_exit(tr)


def cmd_zk_iso(args):
    g1 = graphs.load_graph(read_json(args.g1))
    g2 = graphs.load_graph(read_json(args.g2))
    phi = read_json(args.witness) if args.witness else iso.find_isomorphism(g1, g2)
    prover_seed, verifier_seed = derived_seeds(args.seed, 2)
    tr = iso.iso_protocol(g1, g2, phi, args.rounds, prover_seed, verifier_seed)
    return tr.to_dict(), _verdict_exit(tr)


def cmd_zk_noniso(args):
    g1 = graphs.load_graph(read_json(args.g1))
    g2 = graphs.load_graph(read_json(args.g2))
    prover_seed, verifier_seed = derived_seeds(args.seed, 2)
    tr = iso.noniso_protocol(g1, g2, args.rounds, prover_seed, verifier_seed, args.subrounds)
    return tr.to_dict(), _verdict_exit(tr)


def cmd_bench_tail(args):
    spec, config = harness.load_trial_spec(read_json(args.spec))
    report = harness.run_tail_trials(spec, config)
    return report.to_dict(), EXIT_OK if report.passed else EXIT_REJECT


def cmd_bench_zk(args):
    g = graphs.load_graph(read_json(args.graph))
    tc, _ = _three_component(g, None)
    colorings = [_coloring_doc(read_json(p)) for p in args.coloring or []]
    colorings = [graphs.balance_coloring(tc, c) if len(c) == tc.base.node_count else c for c in colorings]
    if not colorings:
        base = graphs.proper_colorings(tc.base)
        if not base:
            raise DomainError("base graph has no proper 3-coloring")
        colorings = [graphs.balance_coloring(tc, c) for c in base[: args.max_colorings]]
    for c in colorings:
        validate_witness(tc.graph, c)
    res = harness.zk_enumerate(tc.graph, colorings, args.budget)
    doc = res.to_dict()
    return doc, EXIT_OK if doc["zero_knowledge"] else EXIT_REJECT


# -- parser -----------------------------------------------------------------------

def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # leaf parsers repeat the globals so they may follow the subcommand
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--seed", type=_seed, default=default(None), help=f"RNG seed (env {SEED_ENV}, default 0)")
    parser.add_argument("--budget", type=_positive, default=default(harness.DEFAULT_BUDGET), help="enumeration work cap")
    parser.add_argument("--output", choices=("json", "pretty"), default=default("json"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trusty-dice", description="Verifiable randomness and proof toolkit.")
    parser.add_argument(
        "--version", action="version", version=f"trusty-dice {__version__} (format {FORMAT_VERSION})"
    )
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", metavar="{estimate,extract,lottery,zk,bench}")

    def leaf(group, name, handler, help_text):
        p = group.add_parser(name, help=help_text)
        _global_options(p, suppress=True)
        p.set_defaults(handler=handler)
        return p

    p = leaf(sub, "estimate", cmd_estimate, "robust mean of heavy-tailed samples")
    p.add_argument("--in", dest="input", required=True, help="JSON array of {value, b}")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--mode", choices=("tight", "simple"), default="tight")

    ext = sub.add_parser("extract", help="hash-based randomness extraction").add_subparsers(dest="action", required=True)
    p = leaf(ext, "verify", cmd_extract_verify, "exact leftover-hash check for a source")
    p.add_argument("--source", required=True)
    p.add_argument("--family", choices=("toeplitz", "xor_shift"), default="toeplitz")
    p.add_argument("--k", type=int)
    p = leaf(ext, "run", cmd_extract_run, "hash a file of bit strings with one key")
    p.add_argument("--key", required=True, help="hash key as hex")
    p.add_argument("--in", dest="input", required=True, help="one big-endian bit string per line")
    p.add_argument("--family", choices=("toeplitz", "xor_shift"), default="toeplitz")
    p.add_argument("--n", type=_positive)
    p.add_argument("--k", type=int)

    lot = sub.add_parser("lottery", help="power-of-votes lottery").add_subparsers(dest="action", required=True)
    p = leaf(lot, "odds", cmd_lottery_odds, "exact win chances")
    p.add_argument("--tally", required=True)
    p.add_argument("--exponent", type=_positive, default=2)
    p = leaf(lot, "draw", cmd_lottery_draw, "seeded draw")
    p.add_argument("--tally", required=True)
    p.add_argument("--exponent", type=_positive, default=2)
    p.add_argument("--smooth", action="store_true", help="discard half the ballots at random first")

    zk = sub.add_parser("zk", help="zero-knowledge protocols").add_subparsers(dest="action", required=True)
    p = leaf(zk, "color", cmd_zk_color, "three-envelope balanced 3-coloring proof")
    p.add_argument("--graph", required=True)
    p.add_argument("--coloring", required=True)
    p.add_argument("--rounds", type=_positive, default=20)
    p.add_argument("--commit", choices=("hash", "ideal"), default="hash")
    p = leaf(zk, "iso", cmd_zk_iso, "prove two graphs isomorphic")
    p.add_argument("--g1", required=True)
    p.add_argument("--g2", required=True)
    p.add_argument("--witness", help="JSON list: image of each g1 node (default: search)")
    p.add_argument("--rounds", type=_positive, default=20)
    p = leaf(zk, "noniso", cmd_zk_noniso, "prove two graphs non-isomorphic")
    p.add_argument("--g1", required=True)
    p.add_argument("--g2", required=True)
    p.add_argument("--rounds", type=_positive, default=10)
    p.add_argument("--subrounds", type=_positive, default=20)

    bench = sub.add_parser("bench", help="verification rigs").add_subparsers(dest="action", required=True)
    p = leaf(bench, "tail", cmd_bench_tail, "Monte Carlo tail-bound check")
    p.add_argument("--spec", required=True)
    p = leaf(bench, "zk-enumerate", cmd_bench_zk, "exhaustive zero-knowledge check")
    p.add_argument("--graph", required=True)
    p.add_argument("--coloring", action="append", help="coloring file; repeatable")
    p.add_argument("--max-colorings", type=_positive, default=2)
    return parser


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "handler", None) is None:
        parser.print_usage(stderr)
        print("trusty-dice: error: a subcommand is required", file=stderr)
        return EXIT_USAGE
    if args.seed is None:
        env = os.environ.get(SEED_ENV)
        try:
            args.seed = _seed(env) if env is not None else 0
        except argparse.ArgumentTypeError as exc:
            print(f"trusty-dice: error: {SEED_ENV}: {exc}", file=stderr)
            return EXIT_USAGE
    try:
        doc, code = args.handler(args)
    except CapacityError as exc:
        print(f"trusty-dice: capacity: {exc}", file=stderr)
        return EXIT_CAPACITY
    except (TrustyDiceError, ValueError) as exc:
        print(f"trusty-dice: error: {exc}", file=stderr)
        return EXIT_USAGE
    print(render(doc, args.output), file=stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
