"""Cheating-prover triple families shared by the soundness tests."""
import itertools
import random

from trusty_dice.zkp.envelopes import EnvelopeTriple, build_envelopes, decode_tape, draw_tape
from trusty_dice.zkp.graph import COLORS, ROTATIONS, Graph, disjoint_union, is_balanced, is_proper


def random_involution(T, rng):
    labels = list(range(T))
    rng.shuffle(labels)
    r = [0] * T
    for a, b in zip(labels[::2], labels[1::2]):
        r[a], r[b] = b, a
    return tuple(r)


def random_triple(g, rng):
    v, T = g.node_count, g.edge_label_count
    p = list(range(v))
    rng.shuffle(p)
    return EnvelopeTriple(
        tuple(p),
        random_involution(T, rng),
        tuple(rng.randrange(v) for _ in range(T)),
        tuple(rng.choice(COLORS) for _ in range(T)),
    )


def with_coloring(g, colors, rng):
    """Honest construction around any coloring (improper and/or unbalanced allowed)."""
    p, q = decode_tape(g, draw_tape(g, rng))
    return build_envelopes(g, colors, p, q)


def rotated(base_colors, copies, node_count):
    out = [0] * node_count
    for rot, copy in zip(ROTATIONS, copies):
        for a, node in enumerate(copy):
            out[node] = rot[base_colors[a]]
    return tuple(out)


def pair_recolored(triple, rng):
    """Recolor each reciprocal label pair with two distinct colors, balanced per color.

    Passes the (1,3) check by construction; ignores which node a label leaves.
    """
    T = len(triple.r)
    pairs = sorted({tuple(sorted((e, triple.r[e]))) for e in range(T)})
    rng.shuffle(pairs)
    classes = [(1, 2), (1, 3), (2, 3)]
    e3 = [0] * T
    for idx, (a, b) in enumerate(pairs):
        c1, c2 = classes[idx % 3]
        if rng.random() < 0.5:
            c1, c2 = c2, c1
        e3[a], e3[b] = c1, c2
    return EnvelopeTriple(triple.p, triple.r, triple.e2, tuple(e3))


def fake_graph_triple(g, fake, fake_colors, rng):
    """Envelopes for a different graph ``fake`` with the same degree sequence."""
    assert sorted(fake.degrees) == sorted(g.degrees)
    return with_coloring(fake, fake_colors, rng)


def mutate(triple, g, rng):
    """Change one entry of one envelope."""
    v, T = g.node_count, len(triple.r)
    p, r, e2, e3 = map(list, (triple.p, triple.r, triple.e2, triple.e3))
    which = rng.randrange(4)
    if which == 0:
        i, j = rng.sample(range(v), 2) if v > 1 else (0, 0)
        if rng.random() < 0.5:
            p[i], p[j] = p[j], p[i]
        else:
            p[i] = rng.randrange(v)
    elif which == 1:
        a, b = rng.sample(range(T), 2)
        ra, rb = r[a], r[b]
        if ra != b:
            r[a], r[b], r[ra], r[rb] = rb, ra, b, a
    elif which == 2:
        i, j = rng.sample(range(T), 2)
        if rng.random() < 0.5:
            e2[i], e2[j] = e2[j], e2[i]
        else:
            e2[i] = rng.randrange(v)
    else:
        i = rng.randrange(T)
        e3[i] = rng.choice(COLORS)
    return EnvelopeTriple(tuple(p), tuple(r), tuple(e2), tuple(e3))


def prism():
    """Triangular prism: cubic, 6 nodes, 3-colorable with two nodes per color."""
    return Graph.from_undirected(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)])


PRISM_COLORS = (1, 2, 3, 2, 3, 1)


def k4_fake():
    """12-node cubic stand-in for 3 x K4 that does have a proper balanced coloring."""
    g = disjoint_union(prism(), prism())
    colors = PRISM_COLORS + PRISM_COLORS
    assert is_proper(g, colors) and is_balanced(g, colors)
    return g, colors


def structured_triples(tc, rng, per_family=20):
    """Named cheat families for a three-component graph ``tc``."""
    g = tc.graph
    base_colorings = list(itertools.product(COLORS, repeat=tc.base.node_count))
    out = []
    # honest construction around every rotation-balanced base coloring, proper or not
    for c0 in base_colorings:
        out.append(("rotated-coloring", with_coloring(g, rotated(c0, tc.copies, g.node_count), rng)))
    # unbalanced colorings: the same base coloring on every copy
    for c0 in base_colorings[:per_family]:
        colors = [0] * g.node_count
        for copy in tc.copies:
            for a, node in enumerate(copy):
                colors[node] = c0[a]
        out.append(("unbalanced-coloring", with_coloring(g, colors, rng)))
    for _ in range(per_family):
        honestish = with_coloring(g, rotated(rng.choice(base_colorings), tc.copies, g.node_count), rng)
        out.append(("pair-recolored", pair_recolored(honestish, rng)))
        t = honestish
        out.append(("constant-e3", EnvelopeTriple(t.p, t.r, t.e2, (1,) * len(t.e3))))
        out.append(("random-r", EnvelopeTriple(t.p, random_involution(len(t.r), rng), t.e2, t.e3)))
        out.append(("mutated", mutate(t, g, rng)))
        out.append(("double-mutated", mutate(mutate(t, g, rng), g, rng)))
    return out
