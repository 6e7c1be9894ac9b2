from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from pdlab.corpus_io import corpus_names, load_corpus
from pdlab.diagram import (
    DiagramError,
    PlabicGraph,
    diagram_type,
    face_names,
    isomorphic,
    label_str,
    normalize,
    parse_label,
    parse_plabic,
    region_labels,
    serialize_plabic,
    square_move,
    strand_permutation,
    validate_axioms,
    zigzag_strands,
)
from pdlab.positroid import weakly_separated

DATA = Path(__file__).parent / "data"


def face_by_name(g, name):
    return next(f for f, nm in face_names(g).items() if nm == name)


def labels_by_boundary(g):
    labels = region_labels(g)
    return {m: label_str(labels[f], g.n) for m, f in g.boundary_faces.items()}


@pytest.mark.parametrize("name", corpus_names())
def test_corpus_entries_validate(name):
    rep = validate_axioms(load_corpus(name))
    assert rep.ok, rep.witnesses
    assert rep.connected
    assert rep.readings_agree


def test_gr25_strand_permutation_shifts_by_two():
    g = load_corpus("gr25")
    assert strand_permutation(g) == {i: (i + 1) % 5 + 1 for i in range(1, 6)}
    assert len(zigzag_strands(g)) == 5


def test_single_node_permutation_shifts_by_one():
    assert strand_permutation(load_corpus("triv13")) == {1: 2, 2: 3, 3: 1}


def test_gr24_strands():
    g = load_corpus("gr24frozen")
    assert strand_permutation(g) == {1: 4, 2: 3, 3: 1, 4: 2}
    t = diagram_type(g)
    assert (t.k, t.n) == (2, 4)


def test_every_marked_point_is_source_and_target_once():
    for name in corpus_names():
        g = load_corpus(name)
        strands = zigzag_strands(g)
        assert sorted(s.source for s in strands) == list(range(1, g.n + 1))
        assert sorted(s.target for s in strands) == list(range(1, g.n + 1))


def test_types():
    assert (diagram_type(load_corpus("gr25")).k, diagram_type(load_corpus("gr25")).n) == (2, 5)
    assert (diagram_type(load_corpus("triv13")).k, diagram_type(load_corpus("triv13")).n) == (1, 3)


def test_gr25_labels():
    g = load_corpus("gr25")
    assert sorted(face_names(g).values()) == sorted(["12", "23", "34", "45", "15", "25", "24"])
    assert labels_by_boundary(g) == {1: "15", 2: "12", 3: "23", 4: "34", 5: "45"}


def test_single_node_labels():
    assert labels_by_boundary(load_corpus("triv13")) == {1: "1", 2: "2", 3: "3"}


def test_gr24_labels_pairwise_weakly_separated():
    g = load_corpus("gr24frozen")
    labels = list(region_labels(g).values())
    assert len(labels) == 4 and all(g.is_boundary_face(f) for f in region_labels(g))
    assert all(weakly_separated(a, b) for a in labels for b in labels)


def test_labels_have_size_k():
    for name in corpus_names():
        g = load_corpus(name)
        k = diagram_type(g).k
        assert all(len(lab) == k for lab in region_labels(g).values())


def test_p4_violation_is_reported_with_witness():
    g = parse_plabic((DATA / "p4_violation.plabic").read_text())
    rep = validate_axioms(g)
    assert not rep.ok
    assert rep.axioms == {"P0": True, "P1": True, "P2": True, "P3": True, "P4": False}
    assert rep.witnesses["P4"][0]["strands"] == (2, 3)


def test_malformed_input_is_rejected():
    with pytest.raises(DiagramError):
        parse_plabic("plabic v1\nn 3\nnode x b\nleg 1 x\nleg 2 x\nrot x: B1 B2\n")
    with pytest.raises(DiagramError):
        parse_plabic("not a diagram")
    with pytest.raises(DiagramError):
        parse_plabic("plabic v1\nn 2\nnode x b\nnode y b\nedge x y\nleg 1 x\nleg 2 y\nrot x: B1 y\nrot y: B2 x\n")


def test_nonplanar_rotation_is_rejected():
    text = (DATA / "p4_violation.plabic").read_text().replace("rot w: B3 b#2 b#1 B4", "rot w: B3 b#1 b#2 B4")
    with pytest.raises(DiagramError):
        parse_plabic(text)


@pytest.mark.parametrize("name", corpus_names())
def test_serialize_round_trip(name):
    g = load_corpus(name)
    h = parse_plabic(serialize_plabic(g))
    assert isomorphic(g, h)
    assert strand_permutation(h) == strand_permutation(g)


def test_label_text_round_trip():
    assert parse_label("25", 5) == frozenset({2, 5})
    assert label_str(frozenset({1, 5}), 5) == "15"
    assert parse_label("3,10", 12) == frozenset({3, 10})
    assert label_str(frozenset({3, 10}), 12) == "3,10"


def test_square_move_at_25_creates_label_14():
    g = load_corpus("gr25")
    h = square_move(g, face_by_name(g, "25"))
    assert validate_axioms(h).ok
    assert sorted(face_names(h).values()) == sorted(["12", "23", "34", "45", "15", "14", "24"])
    assert strand_permutation(h) == strand_permutation(g)


def test_square_move_twice_is_identity_up_to_moves():
    g = load_corpus("gr25")
    h = square_move(g, face_by_name(g, "25"))
    back = square_move(h, face_by_name(h, "14"))
    assert isomorphic(back, g, up_to_moves=True)
    assert sorted(face_names(back).values()) == sorted(face_names(g).values())


def test_square_move_refuses_boundary_or_non_square_faces():
    g = load_corpus("gr25")
    with pytest.raises(DiagramError):
        square_move(g, g.boundary_faces[1])
    t = load_corpus("triv13")
    with pytest.raises(DiagramError):
        square_move(t, 0)


def test_normalize_removes_bivalent_nodes():
    g = load_corpus("triv13twist")
    h = normalize(g)
    assert len(h.colors) == 1
    assert isomorphic(h, load_corpus("triv13"))
    assert strand_permutation(h) == strand_permutation(g)


def test_isomorphism_distinguishes_diagrams():
    assert not isomorphic(load_corpus("gr25"), load_corpus("gr24frozen"))
    assert not isomorphic(load_corpus("triv13"), load_corpus("triv13twist"))


def relabel(g: PlabicGraph, names: list[str]) -> PlabicGraph:
    text = serialize_plabic(g)
    mapping = dict(zip(g.node_order, names))
    out = []
    for line in text.splitlines():
        toks = line.replace(":", " : ").split()
        toks = [_rename(t, mapping) for t in toks]
        out.append(" ".join(toks).replace(" : ", ": "))
    return parse_plabic("\n".join(out) + "\n")


def _rename(tok, mapping):
    base, sep, suffix = tok.partition("#")
    return mapping.get(base, base) + sep + suffix


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(corpus_names()), st.randoms(use_true_random=False))
def test_node_names_do_not_matter(name, rnd):
    g = load_corpus(name)
    names = [f"v{i}" for i in range(len(g.node_order))]
    rnd.shuffle(names)
    h = relabel(g, names)
    assert isomorphic(g, h)
    assert strand_permutation(h) == strand_permutation(g)
    assert sorted(face_names(h).values()) == sorted(face_names(g).values())
    assert validate_axioms(h).ok
