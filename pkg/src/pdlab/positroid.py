"""k-subset combinatorics and numeric boundary measurements.

Weak separation, Grassmann necklaces, positroid membership, a matching
partition function for Plücker coordinates, and the check that mutated
cluster variables specialise to Plücker coordinates.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .cluster import LaurentPoly, Seed, mutate_seed, seed_from_diagram
from .diagram import BLACK, DiagramError, PlabicGraph, label_str, normalize, region_labels, square_move

KSubset = frozenset[int]


def weakly_separated(i: Iterable[int], j: Iterable[int]) -> bool:
    """No cyclic a < b < c < d with a, c in I - J and b, d in J - I."""
    a, b = frozenset(i), frozenset(j)
    if len(a) != len(b):
        raise ValueError(f"sizes differ: {len(a)} and {len(b)}")
    marks = sorted([(x, 0) for x in a - b] + [(x, 1) for x in b - a])
    if not marks:
        return True
    # the symmetric difference, read around the circle, must fall into at most two blocks
    changes = sum(1 for p in range(len(marks)) if marks[p][1] != marks[p - 1][1])
    return changes <= 2


def is_weakly_separated_collection(labels: Iterable[Iterable[int]]) -> bool:
    ls = [frozenset(x) for x in labels]
    return all(weakly_separated(x, y) for x, y in combinations(ls, 2))


def _order(i: int, n: int, reverse: bool) -> list[int]:
    """The cyclic order starting at i, running up (forward) or down (reverse)."""
    if reverse:
        return [(i - 1 - s) % n + 1 for s in range(n)]
    return [(i - 1 + s) % n + 1 for s in range(n)]


def gale_geq(a: Iterable[int], b: Iterable[int], order: Sequence[int]) -> bool:
    """a >= b in the Gale order induced by the total order `order` (first is smallest)."""
    rank = {x: r for r, x in enumerate(order)}
    sa, sb = sorted(rank[x] for x in a), sorted(rank[x] for x in b)
    return len(sa) == len(sb) and all(x >= y for x, y in zip(sa, sb))


@dataclass(frozen=True)
class Necklace:
    """I_1..I_n. Forward: I_i is Gale-minimal for i < i+1 < ... ; reverse: for i > i-1 > ... ."""

    n: int
    entries: tuple[KSubset, ...]
    orientation: str = "forward"

    @property
    def k(self) -> int:
        return len(self.entries[0])

    def is_consistent(self) -> bool:
        """Consecutive entries differ by the exchange of at most one element, in the right direction."""
        n = self.n
        for m in range(1, n + 1):
            cur = self.entries[m - 1]
            nxt = self.entries[m % n] if self.orientation == "forward" else self.entries[(m - 2) % n]
            if not cur - {m} <= nxt or len(cur) != len(nxt):
                return False
        return True

    def positroid(self) -> list[KSubset]:
        return [frozenset(c) for c in combinations(range(1, self.n + 1), self.k)
                if positroid_member(frozenset(c), self)]

    def with_orientation(self, orientation: str) -> Necklace:
        """The necklace of the same positroid read the other way."""
        if orientation == self.orientation:
            return self
        members = self.positroid()
        reverse = orientation == "reverse"
        entries = []
        for i in range(1, self.n + 1):
            order = _order(i, self.n, reverse)
            mins = [x for x in members if all(gale_geq(y, x, order) for y in members)]
            entries.append(mins[0])
        return Necklace(self.n, tuple(entries), orientation)


def necklace_of(g: PlabicGraph) -> Necklace:
    """Boundary-region labels in boundary order.

    With source labelling, the region at marked point m contains m and the
    labels form the reverse necklace.
    """
    labels = region_labels(g)
    entries = tuple(labels[g.boundary_faces[m]] for m in range(1, g.n + 1))
    return Necklace(g.n, entries, "reverse")


def positroid_member(i: Iterable[int], nk: Necklace) -> bool:
    s = frozenset(i)
    reverse = nk.orientation == "reverse"
    return all(gale_geq(s, nk.entries[m - 1], _order(m, nk.n, reverse)) for m in range(1, nk.n + 1))


# -- boundary measurement ----------------------------------------------------------


@dataclass(frozen=True)
class WeightedPlabic:
    graph: PlabicGraph
    weights: tuple[Fraction, ...]  # one per internal edge; legs weigh 1

    def __post_init__(self) -> None:
        if len(self.weights) != len(self.graph.edges):
            raise ValueError("one weight per edge required")
        if any(w <= 0 for w in self.weights):
            raise ValueError("edge weights must be positive")


def unit_weights(g: PlabicGraph) -> WeightedPlabic:
    return WeightedPlabic(g, tuple(Fraction(1) for _ in g.edges))


def random_weights(g: PlabicGraph, rng_seed: int = 0) -> WeightedPlabic:
    rng = random.Random(rng_seed)
    return WeightedPlabic(g, tuple(Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in g.edges))


def parse_weights(g: PlabicGraph, text: str) -> WeightedPlabic:
    """Lines `edge <id1> <id2> <p/q>`; repeated pairs fill parallel edges in file order."""
    ws: list[Fraction | None] = [None] * len(g.edges)
    used: set[int] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4 or parts[0] != "edge":
            raise ValueError(f"line {lineno}: expected `edge <id1> <id2> <p/q>`")
        _, a, b, val = parts
        cands = [k for k, e in enumerate(g.edges) if set(e) == {a, b} and k not in used]
        if not cands:
            raise ValueError(f"line {lineno}: no unassigned edge {a} {b}")
        ws[cands[0]] = Fraction(val)
        used.add(cands[0])
    missing = [g.edges[k] for k, w in enumerate(ws) if w is None]
    if missing:
        raise ValueError(f"no weight given for edges {missing}")
    return WeightedPlabic(g, tuple(ws))


def format_weights(wg: WeightedPlabic) -> str:
    return "".join(f"edge {a} {b} {w}\n" for (a, b), w in zip(wg.graph.edges, wg.weights))


def matchings(g: PlabicGraph) -> list[tuple[frozenset[int], frozenset[int]]]:
    """Matchings covering every internal node once; legs may cover one node each.

    Returned as (internal edges used, marked points whose legs are used).
    """
    nodes = list(g.node_order)
    options: dict[str, list[tuple[str, int, str | None]]] = {v: [] for v in nodes}
    for k, (a, b) in enumerate(g.edges):
        if a != b:
            options[a].append(("e", k, b))
            options[b].append(("e", k, a))
    for m, v in g.legs.items():
        options[v].append(("l", m, None))
    out = []

    def rec(free: set[str], used_e: list[int], used_l: list[int]) -> None:
        if not free:
            out.append((frozenset(used_e), frozenset(used_l)))
            return
        v = min(free, key=lambda x: (sum(1 for o in options[x] if o[2] is None or o[2] in free), nodes.index(x)))
        for kind, k, other in options[v]:
            if kind == "e":
                if other not in free:
                    continue
                free -= {v, other}
                used_e.append(k)
                rec(free, used_e, used_l)
                used_e.pop()
                free |= {v, other}
            else:
                free.discard(v)
                used_l.append(k)
                rec(free, used_e, used_l)
                used_l.pop()
                free.add(v)

    rec(set(nodes), [], [])
    return out


def boundary_subset(g: PlabicGraph, used_legs: Iterable[int]) -> KSubset:
    """Marked points whose legs end at a black node and are used, or end at a white node and are unused."""
    used = set(used_legs)
    return frozenset(m for m, v in g.legs.items() if (m in used) == (g.colors[v] == BLACK))


def all_measurements(wg: WeightedPlabic) -> dict[KSubset, Fraction]:
    g = wg.graph
    out: dict[KSubset, Fraction] = {}
    for es, ls in matchings(g):
        s = boundary_subset(g, ls)
        w = Fraction(1)
        for k in es:
            w *= wg.weights[k]
        out[s] = out.get(s, Fraction(0)) + w
    return out


def boundary_measurement(wg: WeightedPlabic, i: Iterable[int]) -> Fraction:
    return all_measurements(wg).get(frozenset(i), Fraction(0))


def plucker_three_term(values: Mapping[KSubset, Fraction], n: int, k: int) -> list[tuple]:
    """Violations of D(Sac)D(Sbd) = D(Sab)D(Scd) + D(Sad)D(Sbc) for a < b < c < d outside S."""
    bad = []
    for a, b, c, d in combinations(range(1, n + 1), 4):
        rest = [x for x in range(1, n + 1) if x not in (a, b, c, d)]
        for s in combinations(rest, k - 2):
            S = frozenset(s)

            def D(*xs):
                return values.get(S | frozenset(xs), Fraction(0))

            if D(a, c) * D(b, d) != D(a, b) * D(c, d) + D(a, d) * D(b, c):
                bad.append((tuple(sorted(S)), a, b, c, d))
    return bad


# -- specialisation of cluster variables ------------------------------------------


@dataclass
class SpecializationReport:
    word: tuple[str, ...]
    checks: list[tuple[str, str, Fraction, Fraction]]  # (vertex, label, x_v evaluated, Δ_label)

    @property
    def ok(self) -> bool:
        return all(a == b for _, _, a, b in self.checks)


def _face_with_label(g: PlabicGraph, label: KSubset) -> int:
    hits = [f for f, lab in region_labels(g).items() if lab == label]
    if len(hits) != 1:
        raise DiagramError(f"no unique region labelled {sorted(label)}")
    return hits[0]


def follow_word(g: PlabicGraph, word: Sequence[str]) -> tuple[Seed, dict[str, KSubset]]:
    """Mutate the diagram's seed along `word`, tracking labels by square moves."""
    seed = seed_from_diagram(g)
    labels = dict(seed.labels)
    cur = g
    for k in word:
        face = _face_with_label(cur, labels[k])
        try:
            moved = square_move(cur, face)
        except DiagramError:
            cur = normalize(cur)
            moved = square_move(cur, _face_with_label(cur, labels[k]))
        cur = normalize(moved)
        old = set(labels.values())
        fresh = [lab for lab in region_labels(cur).values() if lab not in old]
        if len(fresh) != 1:
            raise DiagramError(f"square move at {k} did not produce exactly one new label")
        labels[k] = fresh[0]
        seed = mutate_seed(seed, k)
    return seed, labels


def verify_specialization(g: PlabicGraph, wg: WeightedPlabic, word: Sequence[str]) -> SpecializationReport:
    """Evaluate every cluster variable reached by `word` at x_v = Δ_{I_v} and compare with Δ of its label."""
    seed, labels = follow_word(g, word)
    values = all_measurements(wg)
    init = dict(seed_from_diagram(g).labels)
    point = {v: values.get(lab, Fraction(0)) for v, lab in init.items()}
    checks = []
    for v, poly in seed.cluster:
        lab = labels[v]
        checks.append((v, label_str(lab, g.n), poly.evaluate(point), values.get(lab, Fraction(0))))
    return SpecializationReport(tuple(word), checks)


def evaluate_at_plucker(poly: LaurentPoly, g: PlabicGraph, wg: WeightedPlabic) -> Fraction:
    values = all_measurements(wg)
    init = dict(seed_from_diagram(g).labels)
    return poly.evaluate({v: values.get(lab, Fraction(0)) for v, lab in init.items()})
