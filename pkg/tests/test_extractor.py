import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trusty_dice.errors import CapacityError, DomainError, ValidationError
from trusty_dice.extractor import (
    JointDistribution,
    SourceModel,
    collision_fraction,
    custom,
    distances,
    extract_stream,
    joint_distribution,
    load_source,
    max_collision_fraction,
    renyi_entropy,
    satisfies_family_condition,
    toeplitz,
    verify_lemma,
    xor_shift,
)


# -- independent oracles ------------------------------------------------------

def toeplitz_matrix(n, k, key):
    """Explicit k x n matrix T[r][c] = d[r - c + n - 1] from the key's diagonal bits."""
    diag = key >> k
    d = [(diag >> j) & 1 for j in range(n + k - 1)]
    return np.array([[d[r - c + n - 1] for c in range(n)] for r in range(k)], dtype=int)


def toeplitz_oracle(n, k, key, x):
    xbits = np.array([int(ch) for ch in format(x, f"0{n}b")])
    y = toeplitz_matrix(n, k, key).dot(xbits) % 2
    offset = [int(ch) for ch in format(key & ((1 << k) - 1), f"0{k}b")]
    out = (y + np.array(offset)) % 2
    return int("".join(map(str, out)), 2)


def brute_joint(source, f, n_keys, k):
    table = {}
    for h in range(n_keys):
        for x, p in source.probs.items():
            a = f(h, x)
            table[(h, a)] = table.get((h, a), Fraction(0)) + p / n_keys
    return {z: p for z, p in table.items() if p}


def brute_distances(probs, i):
    q = Fraction(1, 2**i)
    nonzero = list(probs.values())
    zeros = 2**i - len(nonzero)
    l1 = sum(abs(p - q) for p in nonzero) + zeros * q
    l2_sq = 2**i * (sum((p - q) ** 2 for p in nonzero) + zeros * q * q)
    return l1, l2_sq


# -- sources --------------------------------------------------------------------

def test_renyi_uniform_all_strings():
    for n in (1, 3, 6):
        src = SourceModel.flat(n, range(2**n))
        assert renyi_entropy(src) == pytest.approx(n, abs=1e-12)


def test_renyi_point_mass():
    assert renyi_entropy(SourceModel(4, {5: 1})) == 0


def test_renyi_eight_element_support():
    assert renyi_entropy(SourceModel.flat(6, [1, 4, 9, 16, 25, 36, 49, 63])) == pytest.approx(3)


def test_renyi_nonflat_matches_float_formula():
    src = SourceModel.from_weights(3, {0: 1, 1: 2, 5: 5})
    p = np.array([1, 2, 5]) / 8
    assert src.renyi == pytest.approx(-math.log2((p**2).sum()), abs=1e-9)


def test_source_rejects_unnormalized():
    with pytest.raises(ValidationError):
        SourceModel(2, {0: 0.5, 1: 0.4})


def test_source_renormalizes_within_tolerance():
    src = SourceModel(2, {0: 0.5, 1: 0.5 + 1e-13})
    assert sum(src.probs.values()) == 1


def test_source_from_file_doc_reads_decimals():
    src = load_source({"n": 2, "probs": {"00": 0.1, "01": 0.2, "11": 0.7}})
    assert src.probs == {0: Fraction(1, 10), 1: Fraction(1, 5), 3: Fraction(7, 10)}


@pytest.mark.parametrize(
    "doc",
    [
        {"n": 2, "probs": {"000": 1.0}},
        {"n": 2, "probs": {"0a": 1.0}},
        {"n": 2, "probs": {"00": -0.5, "01": 1.5}},
        {"probs": {"00": 1.0}},
    ],
)
def test_source_file_validation(doc):
    with pytest.raises(ValidationError):
        load_source(doc)


# -- hash families --------------------------------------------------------------

@pytest.mark.parametrize("n,k", [(4, 1), (4, 2), (5, 3), (3, 3)])
def test_toeplitz_matches_matrix_oracle(n, k):
    fam = toeplitz(n, k)
    assert fam.t == n + 2 * k - 1
    keys = np.arange(fam.key_count)
    xs = np.arange(2**n)
    tab = fam.table(keys, xs)
    for h in range(fam.key_count):
        for x in range(2**n):
            expected = toeplitz_oracle(n, k, h, x)
            assert fam(h, x) == expected
            assert tab[h, x] == expected


def test_toeplitz_collision_fraction_n4_k2():
    fam = toeplitz(4, 2)
    for x, y in itertools.combinations(range(16), 2):
        assert collision_fraction(fam, x, y) == Fraction(1, 4)


@pytest.mark.parametrize("n,k", [(3, 1), (4, 2), (4, 3), (5, 2)])
def test_builtin_families_are_exactly_universal(n, k):
    assert max_collision_fraction(toeplitz(n, k)) == Fraction(1, 2**k)


def test_xor_shift_never_collides():
    fam = xor_shift(4)
    for x, y in itertools.combinations(range(16), 2):
        assert collision_fraction(fam, x, y) == 0


def test_constant_custom_family_always_collides():
    fam = custom(3, 2, 2, lambda h, x: 0)
    assert collision_fraction(fam, 1, 6) == 1
    assert not satisfies_family_condition(fam, m=3)
    assert satisfies_family_condition(toeplitz(3, 2), m=3)


def test_collision_fraction_errors():
    with pytest.raises(DomainError):
        collision_fraction(toeplitz(4, 2), 3, 3)
    with pytest.raises(CapacityError):
        collision_fraction(toeplitz(20, 3), 0, 1)  # t = 25


def test_custom_family_output_checked():
    fam = custom(2, 1, 1, lambda h, x: 5)
    with pytest.raises(ValidationError):
        fam(0, 0)


# -- joint distribution ----------------------------------------------------------

def test_joint_xor_uniform_source_is_uniform():
    src = SourceModel.flat(2, range(4))
    joint = joint_distribution(src, xor_shift(2))
    assert set(joint.probs.values()) == {Fraction(1, 16)}
    assert len(joint.probs) == 16
    rep = distances(joint, src)
    assert rep.l1 == 0 and rep.l2 == 0


def test_joint_point_mass():
    fam = toeplitz(3, 2)
    src = SourceModel(3, {5: 1})
    probs = joint_distribution(src, fam).probs
    expected = {(h, fam(h, 5)): Fraction(1, fam.key_count) for h in range(fam.key_count)}
    assert probs == expected


def test_joint_toeplitz_n4_k1_matches_brute_force():
    fam = toeplitz(4, 1)
    src = SourceModel.flat(4, range(8))  # 0000 .. 0111
    joint = joint_distribution(src, fam)
    oracle = brute_joint(src, lambda h, x: toeplitz_oracle(4, 1, h, x), fam.key_count, 1)
    assert joint.probs == oracle
    assert sum(joint.probs.values()) == 1
    assert all(m == Fraction(1, fam.key_count) for m in joint.key_marginals())


@settings(max_examples=40, deadline=None)
@given(
    st.integers(2, 5),
    st.integers(1, 3),
    st.dictionaries(st.integers(0, 31), st.integers(1, 20), min_size=1, max_size=12),
)
def test_joint_and_distances_match_brute_force(n, k, raw):
    weights = {x % (2**n): w for x, w in raw.items()}
    src = SourceModel.from_weights(n, weights)
    fam = toeplitz(n, k)
    joint = joint_distribution(src, fam)
    oracle = brute_joint(src, fam, fam.key_count, k)
    assert joint.probs == oracle
    assert all(m == Fraction(1, fam.key_count) for m in joint.key_marginals())
    l1, l2_sq = brute_distances(oracle, joint.i)
    rep = distances(joint, src)
    assert rep.l1 == pytest.approx(float(l1), rel=1e-12, abs=1e-15)
    assert rep.l2 == pytest.approx(math.sqrt(l2_sq), rel=1e-12, abs=1e-15)
    assert rep.l1_le_l2 and l1 <= math.sqrt(l2_sq) + 1e-15
    bound_sq = 2 ** (k + 1) * src.collision_probability()
    assert rep.holds == (l2_sq < bound_sq)


def test_joint_budget():
    src = SourceModel.flat(8, range(256))
    with pytest.raises(CapacityError):
        joint_distribution(src, toeplitz(8, 3), budget=1000)


def test_joint_n_mismatch():
    with pytest.raises(ValidationError):
        joint_distribution(SourceModel.flat(3, range(8)), toeplitz(4, 1))


# -- distances ------------------------------------------------------------------

def test_point_mass_joint_distances():
    # i = 2: all mass on one of four cells
    joint = JointDistribution(t=1, k=1, total=1, counts=np.array([[2, 0], [0, 0]]))
    rep = distances(joint, 0.0)
    assert rep.l1 == pytest.approx(1.5)
    assert rep.l2 == pytest.approx(math.sqrt(3))


def test_lemma_instance_with_margin():
    # m = 6, k = 1, delta = 2^-2: m >= k + 1 + 2 log2(1/delta)
    rng = random.Random(4)
    src = SourceModel.flat(8, rng.sample(range(256), 64))
    rep = verify_lemma(src, toeplitz(8, 1))
    assert rep.exact and rep.holds
    assert rep.l1 <= rep.l2 < 2 ** (-(6 - 1 - 1) / 2)
    assert rep.s == pytest.approx(4)


def test_low_entropy_source_can_exceed_bound():
    # constant hash on a uniform source: far from uniform, bound must fail
    fam = custom(3, 2, 2, lambda h, x: 0)
    rep = verify_lemma(SourceModel.flat(3, range(8)), fam)
    assert rep.l1_le_l2
    assert not rep.holds


def test_object_path_for_large_denominators():
    # 2^-60 style weights force exact Python-int arithmetic
    src = SourceModel(3, {0: Fraction(1, 2) + Fraction(1, 2**61), 1: Fraction(1, 2) - Fraction(1, 2**61)})
    joint = joint_distribution(src, toeplitz(3, 2))
    assert joint.counts.dtype == object
    oracle = brute_joint(src, toeplitz(3, 2), toeplitz(3, 2).key_count, 2)
    assert joint.probs == oracle
    rep = distances(joint, src)
    l1, l2_sq = brute_distances(oracle, joint.i)
    assert rep.l2 == pytest.approx(math.sqrt(l2_sq), rel=1e-12)


# -- streaming ------------------------------------------------------------------

def test_extract_stream_basics():
    assert extract_stream(xor_shift(4), 0b1010, []) == []
    assert extract_stream(xor_shift(4), 0b1010, ["0000"]) == ["1010"]


def test_extract_stream_matches_oracle_with_key_reuse():
    fam = toeplitz(4, 2)
    key = 0b1011001
    xs = ["0000", "1111", "0101", "1000", "0011"]
    out = extract_stream(fam, key, xs)
    assert out == [format(toeplitz_oracle(4, 2, key, int(x, 2)), "02b") for x in xs]


def test_extract_stream_validation():
    with pytest.raises(ValidationError):
        extract_stream(toeplitz(4, 2), 1, ["101"])
    with pytest.raises(ValidationError):
        extract_stream(toeplitz(4, 2), 1 << 7, ["1010"])
