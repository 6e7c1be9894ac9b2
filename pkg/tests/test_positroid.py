from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from pdlab.cluster import exchange_graph, seed_from_diagram
from pdlab.corpus_io import load_corpus
from pdlab.diagram import face_names, region_labels, square_move
from pdlab.positroid import (
    Necklace,
    WeightedPlabic,
    all_measurements,
    boundary_measurement,
    follow_word,
    format_weights,
    is_weakly_separated_collection,
    matchings,
    necklace_of,
    parse_weights,
    plucker_three_term,
    positroid_member,
    random_weights,
    unit_weights,
    verify_specialization,
    weakly_separated,
)

NAMES = ["gr25", "gr24frozen", "triv13"]


def fs(*xs):
    return frozenset(xs)


def subsets(n, k):
    return [frozenset(c) for c in combinations(range(1, n + 1), k)]


@st.composite
def subset_pairs(draw):
    n = draw(st.integers(2, 8))
    k = draw(st.integers(1, n - 1))
    pool = list(range(1, n + 1))
    i = draw(st.permutations(pool))[:k]
    j = draw(st.permutations(pool))[:k]
    return n, frozenset(i), frozenset(j)


@settings(max_examples=300, deadline=None)
@given(subset_pairs())
def test_weak_separation_matches_quadruple_definition(pair):
    n, i, j = pair
    assert weakly_separated(i, j) == (not oracles.crossing(i, j, n))


@settings(max_examples=200, deadline=None)
@given(subset_pairs(), st.integers(0, 7))
def test_weak_separation_is_symmetric_and_rotation_invariant(pair, shift):
    n, i, j = pair
    rot = lambda s: frozenset((x - 1 + shift) % n + 1 for x in s)
    assert weakly_separated(i, j) == weakly_separated(j, i) == weakly_separated(rot(i), rot(j))
    assert weakly_separated(i, i)


def test_weak_separation_examples():
    assert not weakly_separated(fs(1, 3), fs(2, 4))
    assert weakly_separated(fs(1, 2), fs(3, 4))
    with pytest.raises(ValueError):
        weakly_separated(fs(1), fs(1, 2))


@pytest.mark.parametrize("name", NAMES)
def test_region_labels_are_weakly_separated(name):
    assert is_weakly_separated_collection(region_labels(load_corpus(name)).values())


def test_gr25_necklace_and_uniform_positroid():
    nk = necklace_of(load_corpus("gr25"))
    assert nk.entries == (fs(1, 5), fs(1, 2), fs(2, 3), fs(3, 4), fs(4, 5))
    assert nk.is_consistent()
    assert nk.positroid() == subsets(5, 2)


def test_single_node_necklace():
    nk = necklace_of(load_corpus("triv13"))
    assert nk.entries == (fs(1), fs(2), fs(3)) and nk.is_consistent()
    assert nk.positroid() == subsets(3, 1)


def test_square_move_keeps_the_necklace():
    g = load_corpus("gr25")
    face = next(f for f, nm in face_names(g).items() if nm == "25")
    assert necklace_of(square_move(g, face)) == necklace_of(g)


def test_gr24_necklace_readings():
    g = load_corpus("gr24frozen")
    nk = necklace_of(g)
    assert nk.orientation == "reverse" and nk.is_consistent()
    assert nk.positroid() == [fs(1, 2), fs(1, 3), fs(1, 4), fs(2, 4), fs(3, 4)]
    # the same entries read forwards do not form a necklace
    forward = Necklace(4, nk.entries, "forward")
    assert not forward.is_consistent() and forward.positroid() == []
    fw = nk.with_orientation("forward")
    assert fw.entries == (fs(1, 2), fs(2, 4), fs(3, 4), fs(1, 4))
    assert fw.is_consistent() and fw.positroid() == nk.positroid()
    assert fw.with_orientation("reverse") == nk


def test_positroid_membership():
    nk = Necklace(4, (fs(1, 3), fs(2, 3), fs(3, 4), fs(1, 4)), "forward")
    assert nk.is_consistent()
    assert not positroid_member(fs(1, 2), nk)
    assert all(positroid_member(e, nk) for e in nk.entries)
    uniform = necklace_of(load_corpus("gr25"))
    assert all(positroid_member(s, uniform) for s in subsets(5, 2))


@pytest.mark.parametrize("name", NAMES)
def test_matchings_match_brute_force(name):
    g = load_corpus(name)
    found = matchings(g)
    assert len(found) == len(set(found))
    assert set(found) == oracles.matchings_brute_force(g)


@pytest.mark.parametrize("name", NAMES)
def test_measurement_support_is_the_positroid(name):
    g = load_corpus(name)
    values = all_measurements(random_weights(g, 5))
    nk = necklace_of(g)
    assert sorted(values, key=sorted) == sorted(nk.positroid(), key=sorted)
    assert all(v > 0 for v in values.values())
    assert all(len(s) == nk.k for s in values)


def test_gr24_measurement_vanishes_off_the_positroid():
    wg = random_weights(load_corpus("gr24frozen"), 1)
    assert boundary_measurement(wg, fs(2, 3)) == 0
    assert boundary_measurement(wg, fs(1, 3)) > 0


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(NAMES), st.integers(0, 10_000))
def test_measurements_satisfy_plucker_relations(name, rng_seed):
    g = load_corpus(name)
    values = all_measurements(random_weights(g, rng_seed))
    assert plucker_three_term(values, g.n, necklace_of(g).k) == []


def test_three_term_check_detects_violation():
    g = load_corpus("gr25")
    values = dict(all_measurements(unit_weights(g)))
    values[fs(1, 3)] += 1
    assert plucker_three_term(values, 5, 2)


def test_weights_file_round_trip():
    g = load_corpus("gr25")
    wg = random_weights(g, 3)
    assert parse_weights(g, format_weights(wg)) == wg
    with pytest.raises(ValueError):
        parse_weights(g, "edge 6 7 1\n")
    with pytest.raises(ValueError):
        WeightedPlabic(g, tuple(Fraction(-1) for _ in g.edges))


@pytest.mark.parametrize("rng_seed", [0, 1, 2, 11])
def test_cluster_variables_specialise_to_plucker_coordinates(rng_seed):
    g = load_corpus("gr25")
    wg = random_weights(g, rng_seed)
    words = exchange_graph(seed_from_diagram(g)).words
    assert len(words) == 5
    for word in words:
        rep = verify_specialization(g, wg, word)
        assert rep.ok, rep.checks
        assert len(rep.checks) == 7


def test_empty_word_and_label_tracking():
    g = load_corpus("gr25")
    rep = verify_specialization(g, unit_weights(g), ())
    assert rep.ok and all(a > 0 for _, _, a, _ in rep.checks)
    seed, labels = follow_word(g, ("25", "24"))
    assert labels["25"] == fs(1, 4) and labels["24"] == fs(1, 3)
    assert is_weakly_separated_collection(labels.values())
