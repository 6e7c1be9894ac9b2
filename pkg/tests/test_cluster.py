import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from pdlab.algebra import Truncation
from pdlab.cluster import (
    LaurentError,
    LaurentPoly,
    ThinModule,
    cluster_character_thin,
    euler_pairing_matrix,
    exchange_graph,
    exchange_monomials,
    is_unimodular,
    k0_matrix,
    mutate_seed,
    parse_index,
    parse_module,
    seed_from_diagram,
    simple_k0_class,
    to_dot,
    verify_exchange_relation,
)
from pdlab.corpus_io import load_corpus
from pdlab.diagram import label_str

NAMES = ["gr25", "gr24frozen", "triv13"]
VARS = ("a", "b", "c")


def gr25_seed():
    return seed_from_diagram(load_corpus("gr25"))


def plucker_values(seed, rng_seed):
    """Maximal minors of a random 2 x 5 integer matrix, keyed by variable name."""
    rnd = random.Random(rng_seed)
    while True:
        m = [[rnd.randint(-5, 5) for _ in range(5)] for _ in range(2)]
        mins = oracles.minors(m, 2)
        if all(mins.values()):
            break
    labels = dict(seed.labels)
    return {v: mins[labels[v]] for v in seed.variables}, mins


def laurent(draw_terms):
    return LaurentPoly(VARS, {tuple(e): c for e, c in draw_terms})


terms = st.lists(st.tuples(st.tuples(*[st.integers(-2, 2)] * 3), st.integers(-3, 3)), max_size=4)


@settings(max_examples=80, deadline=None)
@given(terms, terms, terms)
def test_laurent_ring_axioms(p, q, r):
    p, q, r = laurent(p), laurent(q), laurent(r)
    assert p * q == q * p
    assert p * (q + r) == p * q + p * r
    assert (p + q) - q == p
    assert (p * q) * r == p * (q * r)


@settings(max_examples=60, deadline=None)
@given(terms, terms.filter(lambda t: any(c for _, c in t)))
def test_exact_division_inverts_multiplication(p, q):
    p, q = laurent(p), laurent(q)
    if not q:
        return
    assert (p * q).exact_div(q) == p


def test_non_divisible_quotient_raises():
    a, b = LaurentPoly.var(VARS, "a"), LaurentPoly.var(VARS, "b")
    one = LaurentPoly.const(VARS, 1)
    with pytest.raises(LaurentError):
        (a + one).exact_div(b + one)
    with pytest.raises(LaurentError):
        a.exact_div(LaurentPoly.const(VARS, 2))
    with pytest.raises(ZeroDivisionError):
        a.exact_div(LaurentPoly(VARS))
    assert (a * a + a * b).exact_div(a) == a + b


def test_gr25_seed():
    s = gr25_seed()
    assert set(s.variables) == {"12", "23", "34", "45", "15", "24", "25"}
    assert set(s.mutable_variables()) == {"24", "25"}
    assert {v: label_str(lab, 5) for v, lab in s.labels} == {v: v for v in s.variables}


@pytest.mark.parametrize("name,mutable", [("gr24frozen", 0), ("triv13", 0), ("gr25", 2)])
def test_seed_sizes(name, mutable):
    s = seed_from_diagram(load_corpus(name))
    assert len(s.mutable_variables()) == mutable


def test_mutation_at_25():
    s = gr25_seed()
    x = {v: LaurentPoly.var(s.variables, v) for v in s.variables}
    new = mutate_seed(s, "25").variable("25")
    assert new * x["25"] == x["12"] * x["45"] + x["15"] * x["24"]
    assert repr(new) == "x12*x45*x25^-1 + x15*x24*x25^-1"


def test_mutation_is_an_involution():
    s = gr25_seed()
    for k in ("24", "25"):
        back = mutate_seed(mutate_seed(s, k), k)
        assert back.cluster == s.cluster


def test_mutation_refuses_frozen_vertex():
    with pytest.raises(ValueError):
        mutate_seed(gr25_seed(), "12")


@pytest.mark.parametrize("rng_seed", [0, 1, 2, 3])
def test_mutated_variables_are_plucker_coordinates(rng_seed):
    s = gr25_seed()
    values, mins = plucker_values(s, rng_seed)
    assert mutate_seed(s, "25").variable("25").evaluate(values) == mins[frozenset({1, 4})]
    assert mutate_seed(s, "24").variable("24").evaluate(values) == mins[frozenset({3, 5})]
    twice = mutate_seed(mutate_seed(s, "25"), "24").variable("24")
    assert twice.evaluate(values) == mins[frozenset({1, 3})]


def test_gr25_exchange_graph_is_a_pentagon():
    eg = exchange_graph(gr25_seed())
    assert eg.complete and len(eg.seeds) == 5 and len(eg.edges) == 5
    assert all(i != j for i, j, _ in eg.edges)
    degree = {i: 0 for i in range(5)}
    for i, j, _ in eg.edges:
        degree[i] += 1
        degree[j] += 1
    assert set(degree.values()) == {2}
    assert len(eg.mutable_variables()) == 5
    assert sorted(eg.words, key=len)[0] == ()


def test_exchange_graph_variables_are_the_non_consecutive_minors():
    s = gr25_seed()
    eg = exchange_graph(s)
    values, mins = plucker_values(s, 7)
    got = sorted(p.evaluate(values) for p in eg.mutable_variables())
    non_consecutive = [frozenset(x) for x in ({1, 3}, {1, 4}, {2, 4}, {2, 5}, {3, 5})]
    assert got == sorted(mins[i] for i in non_consecutive)


def test_exchange_graph_invariants():
    s = gr25_seed()
    eg = exchange_graph(s)
    frozen = {v: s.variable(v) for v in s.quiver.frozen_vertices}
    for t in eg.seeds:
        assert all(t.variable(v) == p for v, p in frozen.items())
        assert all(p.coefficients_nonnegative() for _, p in t.cluster)
    for i, j, k in eg.edges:
        # seeds are identified as unordered clusters, so seeds[j] may place variables at other vertices
        moved = mutate_seed(eg.seeds[i], k)
        assert moved.key() == eg.seeds[j].key()
        plus, minus = exchange_monomials(eg.seeds[i], k)
        assert verify_exchange_relation(eg.seeds[i].variable(k), moved.variable(k), plus, minus)


def test_exchange_relation_detects_mismatch():
    x = LaurentPoly.var(VARS, "a")
    zero = LaurentPoly(VARS)
    assert verify_exchange_relation(x, x, x * x, zero)
    assert not verify_exchange_relation(x, x, x, zero)


@pytest.mark.parametrize("name", ["gr24frozen", "triv13"])
def test_exchange_graph_without_mutable_vertices(name):
    eg = exchange_graph(seed_from_diagram(load_corpus(name)))
    assert len(eg.seeds) == 1 and not eg.edges and eg.complete


def test_exchange_graph_respects_seed_cap():
    eg = exchange_graph(gr25_seed(), max_seeds=3)
    assert not eg.complete and len(eg.seeds) == 3


def test_dot_output():
    dot = to_dot(exchange_graph(gr25_seed()))
    assert dot.startswith("graph exchange {") and dot.count(" -- ") == 5


def test_simple_classes():
    g, q, w = oracles.reduced("gr25")
    assert simple_k0_class(q, "25") == {"12": 1, "45": 1, "15": -1, "24": -1}
    for v in q.quiver.frozen_vertices:
        expected = {v: 1}
        for a in q.quiver.out_arrows(v):
            expected[a.head] = expected.get(a.head, 0) - 1
        for a in q.quiver.in_arrows(v):
            if not a.frozen:
                expected[a.tail] = expected.get(a.tail, 0) + 1
        assert simple_k0_class(q, v) == {u: c for u, c in expected.items() if c}


@pytest.mark.parametrize("name", NAMES)
def test_euler_pairing_is_dual_to_simples(name):
    g, q, w = oracles.reduced(name)
    m = euler_pairing_matrix(q, Truncation(q, w, 8))
    size = len(q.quiver.vertex_ids)
    assert m == [[int(i == j) for j in range(size)] for i in range(size)]
    assert is_unimodular(m)


@pytest.mark.parametrize("name", NAMES)
def test_simple_classes_have_coefficient_sum_zero(name):
    # every projective has the same rank over the centre, so the all-ones vector is in the kernel
    g, q, w = oracles.reduced(name)
    m = k0_matrix(q)
    assert all(sum(row) == 0 for row in m)
    assert not is_unimodular(m)


def test_character_of_zero_module_is_the_variable():
    g, q, w = oracles.reduced("gr25")
    empty = ThinModule(frozenset(), frozenset())
    for v in q.quiver.vertex_ids:
        assert cluster_character_thin(q, {v: 1}, empty) == LaurentPoly.var(q.quiver.vertex_ids, v)


def test_character_of_simple_is_the_mutated_variable():
    g, q, w = oracles.reduced("gr25")
    m = parse_module("support=25")
    chi = cluster_character_thin(q, parse_index("P12+P45-P25"), m)
    assert chi == mutate_seed(gr25_seed(), "25").variable("25")


def test_character_of_two_vertex_module():
    g, q, w = oracles.reduced("gr25")
    (a,) = [x.id for x in q.quiver.arrows if (x.tail, x.head) == ("25", "24")]
    chi = cluster_character_thin(q, {"25": 1}, ThinModule(frozenset({"24", "25"}), frozenset({a})))
    assert len(chi.terms) == 3 and chi.coefficients_nonnegative()


def test_character_rejects_module_violating_relations():
    g, q, w = oracles.reduced("gr25")
    tri = {("12", "25"), ("25", "15"), ("15", "12")}
    arrows = frozenset(x.id for x in q.quiver.arrows if (x.tail, x.head) in tri)
    with pytest.raises(ValueError):
        cluster_character_thin(q, {}, ThinModule(frozenset({"12", "25", "15"}), arrows))


def test_index_parsing():
    assert parse_index("P12+P45-P25") == {"12": 1, "45": 1, "25": -1}
    assert parse_index("12:1,45:1,25:-1") == {"12": 1, "45": 1, "25": -1}


def test_evaluation_is_exact():
    x = LaurentPoly.monomial(VARS, {"a": 1, "b": -1})
    assert x.evaluate({"a": Fraction(1), "b": Fraction(3), "c": Fraction(1)}) == Fraction(1, 3)
