"""Command-line interface.

Exit codes: 0 success or PASS, 1 FAIL, 2 usage or input error, 3 INDETERMINATE.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import Callable, Sequence

from . import algebra, cluster, cy, positroid, qp as qpmod, svg
from .corpus_io import load_diagram, read_text
from .diagram import (
    DiagramError,
    PlabicGraph,
    diagram_type,
    face_names,
    label_str,
    region_labels,
    serialize_plabic,
    square_move,
    strand_permutation,
    validate_axioms,
    zigzag_strands,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INDETERMINATE = 0, 1, 2, 3


class Output:
    def __init__(self, path: str | None):
        self.path = path
        self.lines: list[str] = []

    def row(self, *cols) -> None:
        self.lines.append("\t".join(str(c) for c in cols))

    def text(self, s: str) -> None:
        self.lines.extend(s.rstrip("\n").split("\n"))

    def result(self, status: str) -> None:
        self.lines.append(f"RESULT: {status}")

    def flush(self) -> None:
        body = "\n".join(self.lines) + ("\n" if self.lines else "")
        if self.path:
            with open(self.path, "w") as fh:
                fh.write(body)
        else:
            sys.stdout.write(body)


def _status_code(status: str) -> int:
    return {"PASS": EXIT_OK, "FAIL": EXIT_FAIL, "INDETERMINATE": EXIT_INDETERMINATE}[status]


def _csv(text: str | None) -> list[str]:
    return [x for x in (text or "").split(",") if x]


def _maxdeg(args, g: PlabicGraph) -> int:
    return args.maxdeg if args.maxdeg is not None else 2 * g.n


def _reduced(g: PlabicGraph) -> qpmod.IceQP:
    return qpmod.reduce_qp(qpmod.qp_from_diagram(g))


def _weights(args, g: PlabicGraph) -> positroid.WeightedPlabic:
    if args.weights:
        return positroid.parse_weights(g, read_text(args.weights))
    return positroid.random_weights(g, args.rng_seed)


def _subset_str(s) -> str:
    return ",".join(str(x) for x in sorted(s))


# -- diagram-core ------------------------------------------------------------------


def cmd_validate(args, out: Output) -> int:
    g = load_diagram(args.file)
    rep = validate_axioms(g)
    out.row("axiom", "ok", "witnesses")
    for ax in sorted(rep.axioms):
        out.row(ax, "yes" if rep.axioms[ax] else "no", rep.witnesses[ax] if rep.witnesses[ax] else "-")
    out.row("connected", "yes" if rep.connected else "no", "-")
    out.row("readings_agree", "yes" if rep.readings_agree else "no", "-")
    status = "PASS" if rep.ok else "FAIL"
    out.result(status)
    return _status_code(status)


def cmd_strands(args, out: Output) -> int:
    g = load_diagram(args.file)
    out.row("source", "target", "links")
    for s in sorted(zigzag_strands(g), key=lambda s: s.source):
        out.row(s.source, s.target, " ".join(f"{k}{i}" for (k, i), _ in s.trace))
    return EXIT_OK


def cmd_labels(args, out: Output) -> int:
    g = load_diagram(args.file)
    labels = region_labels(g)
    names = face_names(g)
    boundary = {f: m for m, f in g.boundary_faces.items()}
    out.row("face", "label", "boundary")
    for f in range(len(g.faces)):
        out.row(names[f], label_str(labels[f], g.n), boundary.get(f, "-"))
    return EXIT_OK


def cmd_type(args, out: Output) -> int:
    g = load_diagram(args.file)
    t = diagram_type(g)
    perm = strand_permutation(g)
    out.row("k", "n", "permutation")
    out.row(t.k, t.n, " ".join(f"{i}->{perm[i]}" for i in sorted(perm)))
    return EXIT_OK


# -- ice-qp --------------------------------------------------------------------------


def cmd_quiver(args, out: Output) -> int:
    g = load_diagram(args.file)
    q = qpmod.qp_from_diagram(g)
    if args.reduce or args.boundary:
        q = qpmod.reduce_qp(q, boundary=args.boundary)
    out.text(qpmod.format_qp(q))
    return EXIT_OK


def cmd_mutate(args, out: Output) -> int:
    g = load_diagram(args.file)
    q = _reduced(g)
    for v in _csv(args.at):
        q = qpmod.mutate_qp(q, v)
    out.text(qpmod.format_qp(q))
    return EXIT_OK


def cmd_squaremove(args, out: Output) -> int:
    g = load_diagram(args.file)
    names = face_names(g)
    hits = [f for f, name in names.items() if name == args.face]
    if not hits:
        raise DiagramError(f"no face named {args.face}")
    out.text(serialize_plabic(square_move(g, hits[0])))
    return EXIT_OK


# -- dimer-algebra -------------------------------------------------------------------


def cmd_thin(args, out: Output) -> int:
    g = load_diagram(args.file)
    q = _reduced(g)
    w = algebra.arrow_weights(g, q)
    rep = algebra.verify_thin(q, w, _maxdeg(args, g))
    out.row("check", "ok", "witnesses")
    for name, ok in rep.checks.items():
        out.row(name, "yes" if ok else "no", rep.witnesses.get(name, "-") or "-")
    status = "PASS" if rep.ok else "FAIL"
    out.result(status)
    return _status_code(status)


def _dims_table(out: Output, dims: dict) -> None:
    out.row("tail", "head", "degree", "dim")
    for (v, w, tot), dim in sorted(dims.items(), key=lambda kv: (kv[0][2], kv[0][0], kv[0][1])):
        out.row(v, w, tot, dim)


def cmd_boundary(args, out: Output) -> int:
    g = load_diagram(args.file)
    q = _reduced(g)
    w = algebra.arrow_weights(g, q)
    b = algebra.boundary_truncation(q, w, _maxdeg(args, g))
    if args.dims:
        _dims_table(out, b.dims)
    else:
        out.row("tail", "head", "t_power")
        for p in b.basis:
            out.row(p.tail, p.head, p.m)
    return EXIT_OK


def cmd_stabledim(args, out: Output) -> int:
    g = load_diagram(args.file)
    q = _reduced(g)
    seq = algebra.stable_dim(q, algebra.arrow_weights(g, q), _maxdeg(args, g))
    out.row("degree", "dim")
    for i, x in enumerate(seq):
        out.row(i, x)
    vd = algebra.vanishing_degree(seq)
    out.row("vanishes_from", vd if vd is not None else "not within range")
    return EXIT_OK


# -- cy-verifier -----------------------------------------------------------------------


def cmd_cycheck(args, out: Output) -> int:
    g = load_diagram(args.file)
    q = _reduced(g)
    w = algebra.arrow_weights(g, q)
    d = _maxdeg(args, g)
    positions = [int(x) for x in _csv(args.positions)] if args.positions else [-3, -2]
    trunc = algebra.Truncation(q, w, d)
    pot = cy.flip_term(q.potential, args.flip_term) if args.flip_term is not None else None
    out.row("vertex", "head", "weight", "position", "homology_dim")
    statuses = []
    summary = []
    for v in q.quiver.vertex_ids:
        rep = cy.check_exactness(cy.build_vertex_complex(q, trunc, v, d, potential=pot), positions)
        for head, wt, p, h in rep.homology:
            if h or args.all_rows:
                out.row(v, head, "".join(str(x) for x in wt), p, h)
        statuses.append(rep.status)
        summary.append((v, rep.status, rep.judged, "yes" if rep.d_squared_ok else "no"))
    out.row("vertex", "status", "slices", "d_squared_zero")
    for row in summary:
        out.row(*row)
    status = "FAIL" if "FAIL" in statuses else "INDETERMINATE" if "INDETERMINATE" in statuses else "PASS"
    out.result(status)
    return _status_code(status)


def cmd_resolution(args, out: Output) -> int:
    g = load_diagram(args.file)
    q = _reduced(g)
    w = algebra.arrow_weights(g, q)
    trunc = algebra.Truncation(q, w, _maxdeg(args, g))
    out.row("vertex", "length", "generators")
    for v in q.quiver.vertex_ids:
        res = cy.graded_resolution(q, trunc, v)
        gens = " | ".join(" ".join(f"{u}@{''.join(map(str, s))}" for u, s in step) for step in res.generators if step)
        out.row(v, res.length, gens)
    return EXIT_OK


# -- cluster-engine ------------------------------------------------------------------------


def _seed_table(out: Output, seed: cluster.Seed, n: int) -> None:
    labels = dict(seed.labels)
    out.row("vertex", "kind", "label", "variable")
    for v, p in seed.cluster:
        kind = "f" if seed.quiver.is_frozen(v) else "m"
        out.row(v, kind, label_str(labels[v], n) if v in labels else "-", p)


def cmd_seed(args, out: Output) -> int:
    g = load_diagram(args.file)
    _seed_table(out, cluster.seed_from_diagram(g), g.n)
    return EXIT_OK


def cmd_mutateseed(args, out: Output) -> int:
    g = load_diagram(args.file)
    word = _csv(args.at)
    try:
        seed, labels = positroid.follow_word(g, word)
        seed = cluster.Seed(seed.quiver, seed.cluster, tuple((v, labels[v]) for v in seed.variables))
    except DiagramError:
        seed = cluster.seed_from_diagram(g)
        for v in word:
            seed = cluster.mutate_seed(seed, v)
    _seed_table(out, seed, g.n)
    return EXIT_OK


def cmd_exchangegraph(args, out: Output) -> int:
    g = load_diagram(args.file)
    eg = cluster.exchange_graph(cluster.seed_from_diagram(g), args.max)
    if args.dot:
        out.text(cluster.to_dot(eg))
    else:
        out.row("seed", "word", "mutable_variables")
        for i, s in enumerate(eg.seeds):
            out.row(i, ",".join(eg.words[i]) or "-", "; ".join(f"{v}={p}" for v, p in s.mutable_variables().items()))
        out.row("edge_from", "edge_to", "vertex")
        for i, j, k in eg.edges:
            out.row(i, j, k)
        out.row("seeds", len(eg.seeds))
        out.row("mutable_variables", len(eg.mutable_variables()))
        out.row("complete", "yes" if eg.complete else "no")
    return EXIT_OK if eg.complete else EXIT_INDETERMINATE


def cmd_char(args, out: Output) -> int:
    g = load_diagram(args.file)
    q = _reduced(g)
    index = cluster.parse_index(args.index)
    m = cluster.parse_module(args.module or "")
    phi = cluster.cluster_character_thin(q, index, m)
    out.row("character")
    out.row(phi)
    return EXIT_OK


# -- positroid -------------------------------------------------------------------------------


def cmd_necklace(args, out: Output) -> int:
    g = load_diagram(args.file)
    nk = positroid.necklace_of(g)
    fwd = nk.with_orientation("forward")
    out.row("i", "reverse", "forward")
    for i in range(g.n):
        out.row(i + 1, label_str(nk.entries[i], g.n), label_str(fwd.entries[i], g.n))
    return EXIT_OK


def cmd_wstest(args, out: Output) -> int:
    g = load_diagram(args.file)
    labels = sorted(set(region_labels(g).values()), key=sorted)
    out.row("I", "J", "weakly_separated")
    bad = 0
    for a in range(len(labels)):
        for b in range(a + 1, len(labels)):
            ok = positroid.weakly_separated(labels[a], labels[b])
            bad += not ok
            if not ok or args.all_rows:
                out.row(label_str(labels[a], g.n), label_str(labels[b], g.n), "yes" if ok else "no")
    status = "PASS" if not bad else "FAIL"
    out.result(status)
    return _status_code(status)


def cmd_measure(args, out: Output) -> int:
    g = load_diagram(args.file)
    wg = _weights(args, g)
    values = positroid.all_measurements(wg)
    out.row("subset", "value")
    if args.subset:
        s = frozenset(int(x) for x in _csv(args.subset))
        out.row(_subset_str(s), values.get(s, Fraction(0)))
    else:
        for s in sorted(values, key=sorted):
            out.row(_subset_str(s), values[s])
    return EXIT_OK


def cmd_verifygl(args, out: Output) -> int:
    g = load_diagram(args.file)
    wg = _weights(args, g)
    rep = positroid.verify_specialization(g, wg, _csv(args.word))
    out.row("vertex", "label", "cluster_value", "plucker_value")
    for row in rep.checks:
        out.row(*row)
    k = diagram_type(g).k
    bad = positroid.plucker_three_term(positroid.all_measurements(wg), g.n, k) if k >= 2 else []
    out.row("plucker_violations", len(bad))
    status = "PASS" if rep.ok and not bad else "FAIL"
    out.result(status)
    return _status_code(status)


# -- rendering --------------------------------------------------------------------------------


def cmd_render(args, out: Output) -> int:
    g = load_diagram(args.file)
    if args.what == "quiver":
        q = qpmod.qp_from_diagram(g)
        if args.reduce:
            q = qpmod.reduce_qp(q)
        out.text(svg.render_quiver_svg(g, q))
    else:
        out.text(svg.render_plabic_svg(g))
    return EXIT_OK


# -- dispatch ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="diagram file or corpus:<name>")
    common.add_argument("--maxdeg", type=int, default=None, help="truncation bound on total weight (default 2n)")
    common.add_argument("--rng-seed", type=int, default=0)
    common.add_argument("-o", "--output", default=None, help="write output to a file")

    p = argparse.ArgumentParser(prog="pdlab", description="Postnikov diagrams, dimer algebras and cluster seeds")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, fn: Callable, help_: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    add("validate", cmd_validate, "check axioms P0-P4")
    add("strands", cmd_strands, "zig-zag strands")
    add("labels", cmd_labels, "k-labels of regions")
    add("type", cmd_type, "type (k,n) and strand permutation")
    sp = add("quiver", cmd_quiver, "ice quiver with potential")
    sp.add_argument("--reduce", action="store_true", help="remove interior 2-cycles")
    sp.add_argument("--boundary", action="store_true", help="also reduce 2-cycles containing a frozen arrow")
    add("mutate", cmd_mutate, "QP mutation").add_argument("--at", required=True)
    add("squaremove", cmd_squaremove, "square move at a face").add_argument("--face", required=True)
    add("thin", cmd_thin, "thinness certificate")
    add("boundary", cmd_boundary, "boundary algebra truncation").add_argument("--dims", action="store_true")
    add("stabledim", cmd_stabledim, "graded dimensions of A/AeA")
    sp = add("cycheck", cmd_cycheck, "exactness of res(A) tensored with simples")
    sp.add_argument("--positions", default=None, help="comma list from -3..1 (default -3,-2)")
    sp.add_argument("--flip-term", type=int, default=None, help="negate one potential term in the complex")
    sp.add_argument("--all-rows", action="store_true", help="list zero homology too")
    add("resolution", cmd_resolution, "minimal graded resolutions of simples")
    add("seed", cmd_seed, "initial seed")
    add("mutateseed", cmd_mutateseed, "seed mutation").add_argument("--at", required=True)
    sp = add("exchangegraph", cmd_exchangegraph, "exchange graph by BFS")
    sp.add_argument("--max", type=int, default=1000)
    sp.add_argument("--dot", action="store_true")
    sp = add("char", cmd_char, "cluster character of a thin module")
    sp.add_argument("--index", required=True, help="e.g. P12+P45-P25")
    sp.add_argument("--module", default="", help="support=v1,v2;arrows=a1,a2")
    add("necklace", cmd_necklace, "Grassmann necklace")
    add("wstest", cmd_wstest, "weak separation of all labels").add_argument("--all-rows", action="store_true")
    sp = add("measure", cmd_measure, "boundary measurement")
    sp.add_argument("--weights", default=None)
    sp.add_argument("--subset", default=None)
    sp = add("verifygl", cmd_verifygl, "cluster variables versus Plücker coordinates")
    sp.add_argument("--weights", default=None)
    sp.add_argument("--word", default="")
    sp = add("render", cmd_render, "SVG drawing")
    sp.add_argument("--what", choices=("plabic", "quiver"), default="quiver")
    sp.add_argument("--reduce", action="store_true")
    return p


def _join_negative_values(argv: list[str]) -> list[str]:
    # values such as "-3,-2" would otherwise be taken for options
    out = []
    i = 0
    while i < len(argv):
        if argv[i] in ("--positions", "--flip-term") and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_join_negative_values(list(sys.argv[1:] if argv is None else argv)))
    out = Output(args.output)
    try:
        code = args.fn(args, out)
    except (DiagramError, qpmod.QPError, ValueError, FileNotFoundError, KeyError) as exc:
        out.flush()
        print(f"pdlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
