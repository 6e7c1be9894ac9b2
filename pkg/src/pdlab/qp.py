"""Ice quivers with potential: extraction from plabic graphs, derivatives,
reduction, mutation and structural checks.

Paths and cyclic words are tuples of arrow ids in traversal order, so the
first arrow of a path leaves its tail vertex.
"""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .diagram import BLACK, DiagramError, PlabicGraph, bvertex, face_names

Path = tuple[str, ...]


class QPError(ValueError):
    """Raised on operations that are undefined for the given QP."""


@dataclass(frozen=True)
class Arrow:
    id: str
    tail: str
    head: str
    frozen: bool = False


@dataclass(frozen=True)
class IceQuiver:
    vertices: tuple[tuple[str, bool], ...]  # (id, frozen)
    arrows: tuple[Arrow, ...]

    def __post_init__(self) -> None:
        ids = [v for v, _ in self.vertices]
        if len(set(ids)) != len(ids):
            raise QPError("duplicate vertex id")
        known = set(ids)
        seen = set()
        for a in self.arrows:
            if a.id in seen:
                raise QPError(f"duplicate arrow id {a.id}")
            seen.add(a.id)
            if a.tail not in known or a.head not in known:
                raise QPError(f"arrow {a.id} has unknown endpoint")
            if a.frozen and not (self.is_frozen(a.tail) and self.is_frozen(a.head)):
                raise QPError(f"frozen arrow {a.id} touches a mutable vertex")

    @property
    def vertex_ids(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.vertices)

    def is_frozen(self, v: str) -> bool:
        return dict(self.vertices)[v]

    @property
    def frozen_vertices(self) -> tuple[str, ...]:
        return tuple(v for v, f in self.vertices if f)

    @property
    def mutable_vertices(self) -> tuple[str, ...]:
        return tuple(v for v, f in self.vertices if not f)

    def arrow(self, aid: str) -> Arrow:
        return self._by_id[aid]

    @property
    def _by_id(self) -> dict[str, Arrow]:
        cache = self.__dict__.get("_cache_by_id")
        if cache is None:
            cache = {a.id: a for a in self.arrows}
            object.__setattr__(self, "_cache_by_id", cache)
        return cache

    def out_arrows(self, v: str) -> list[Arrow]:
        return [a for a in self.arrows if a.tail == v]

    def in_arrows(self, v: str) -> list[Arrow]:
        return [a for a in self.arrows if a.head == v]

    def path_ends(self, path: Path) -> tuple[str, str]:
        first, last = self.arrow(path[0]), self.arrow(path[-1])
        return first.tail, last.head

    def is_path(self, path: Path) -> bool:
        return all(self.arrow(x).head == self.arrow(y).tail for x, y in zip(path, path[1:]))

    def counts(self, include_frozen: bool = True) -> Counter:
        return Counter((a.tail, a.head) for a in self.arrows if include_frozen or not a.frozen)


def canonical_rotation(word: Iterable[str]) -> Path:
    w = tuple(word)
    return min(w[i:] + w[:i] for i in range(len(w)))


class NoncommPoly:
    """Exact rational combination of paths."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Path, Fraction] | Iterable[tuple[Path, Fraction]] = ()):
        acc: dict[Path, Fraction] = defaultdict(Fraction)
        items = terms.items() if isinstance(terms, Mapping) else terms
        for p, c in items:
            acc[tuple(p)] += Fraction(c)
        self.terms = {p: c for p, c in acc.items() if c != 0}

    def __add__(self, other: NoncommPoly) -> NoncommPoly:
        return NoncommPoly(list(self.terms.items()) + list(other.terms.items()))

    def __neg__(self) -> NoncommPoly:
        return NoncommPoly({p: -c for p, c in self.terms.items()})

    def __sub__(self, other: NoncommPoly) -> NoncommPoly:
        return self + (-other)

    def scale(self, c: Fraction | int) -> NoncommPoly:
        return NoncommPoly({p: c * v for p, v in self.terms.items()})

    def compose(self, other: NoncommPoly) -> NoncommPoly:
        """self followed by other."""
        return NoncommPoly((p + q, a * b) for p, a in self.terms.items() for q, b in other.terms.items())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, NoncommPoly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self) -> Iterator[tuple[Path, Fraction]]:
        return iter(sorted(self.terms.items()))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{'.'.join(p) or 'e'}" for p, c in self)


@dataclass(frozen=True)
class Potential:
    terms: tuple[tuple[Fraction, Path], ...]

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[Fraction | int, Iterable[str]]]) -> Potential:
        acc: dict[Path, Fraction] = defaultdict(Fraction)
        for c, w in terms:
            w = tuple(w)
            if len(w) < 1:
                raise QPError("empty cyclic word")
            acc[canonical_rotation(w)] += Fraction(c)
        return cls(tuple(sorted((c, w) for w, c in acc.items() if c != 0)))

    def __add__(self, other: Potential) -> Potential:
        return Potential.from_terms(self.terms + other.terms)

    def arrows(self) -> set[str]:
        return {a for _, w in self.terms for a in w}

    def occurrences(self, aid: str) -> list[tuple[Fraction, Path]]:
        return [(c, w) for c, w in self.terms if aid in w]


@dataclass(frozen=True)
class IceQP:
    quiver: IceQuiver
    potential: Potential

    def __post_init__(self) -> None:
        unknown = self.potential.arrows() - {a.id for a in self.quiver.arrows}
        if unknown:
            raise QPError(f"potential uses unknown arrows {sorted(unknown)}")
        for _, w in self.potential.terms:
            if not self.quiver.is_path(w + w[:1]):
                raise QPError(f"term {w} is not a cycle")

    @classmethod
    def unchecked(cls, quiver: IceQuiver, potential: Potential) -> IceQP:
        """Skip validation, so that malformed potentials can be fed to checks."""
        qp = object.__new__(cls)
        object.__setattr__(qp, "quiver", quiver)
        object.__setattr__(qp, "potential", potential)
        return qp

    def relations(self) -> dict[str, NoncommPoly]:
        """∂_a W for every unfrozen arrow a."""
        return {a.id: cyclic_derivative(self.potential, a.id) for a in self.quiver.arrows if not a.frozen}


# -- construction from a diagram -------------------------------------------


def arrow_darts(g: PlabicGraph) -> dict[tuple, tuple]:
    """For every link, the dart whose right face is the arrow tail and left face its head."""
    out = {}
    for i, (x, y) in enumerate(g.edges):
        b = x if g.colors[x] == BLACK else y
        out[("e", i)] = (b, ("e", i))
    for m, x in g.legs.items():
        out[("l", m)] = (x, ("l", m)) if g.colors[x] == BLACK else (bvertex(m), ("l", m))
    return out


def arrow_ids(g: PlabicGraph) -> dict[tuple, str]:
    ids = {}
    pairs: dict[frozenset, list[int]] = defaultdict(list)
    for i, e in enumerate(g.edges):
        pairs[frozenset(e)].append(i)
    for i, (x, y) in enumerate(g.edges):
        b, w = (x, y) if g.colors[x] == BLACK else (y, x)
        par = pairs[frozenset((x, y))]
        ids[("e", i)] = f"{b}_{w}" if len(par) == 1 else f"{b}_{w}#{par.index(i) + 1}"
    for m in g.legs:
        ids[("l", m)] = f"B{m}"
    return ids


def qp_from_diagram(g: PlabicGraph) -> IceQP:
    names = face_names(g)
    bfaces = set(g.boundary_faces.values())
    order = [g.boundary_faces[m] for m in range(1, g.n + 1)]
    order += sorted((f for f in range(len(g.faces)) if f not in bfaces), key=lambda f: names[f])
    vertices = tuple((names[f], f in bfaces) for f in order)
    darts = arrow_darts(g)
    ids = arrow_ids(g)
    arrows = []
    for link in sorted(darts, key=lambda l: (l[0] != "l", l[1])):
        d = darts[link]
        arrows.append(Arrow(ids[link], names[g.face_right(d)], names[g.face_left(d)], link[0] == "l"))
    quiver = IceQuiver(vertices, tuple(arrows))
    terms = []
    for v in g.node_order:
        links = list(g.rotation[v])
        # arrows around a black node run anticlockwise, which makes the term positive
        if g.colors[v] != BLACK:
            links.reverse()
        word = tuple(ids[l] for l in links)
        if not quiver.is_path(word + word[:1]):
            raise DiagramError(f"arrows around {v} do not form a cycle")
        terms.append((1 if g.colors[v] == BLACK else -1, word))
    return IceQP(quiver, Potential.from_terms(terms))


# -- derivatives -----------------------------------------------------------


def cyclic_derivative(w: Potential, aid: str) -> NoncommPoly:
    acc = []
    for c, word in w.terms:
        for i, x in enumerate(word):
            if x == aid:
                acc.append((word[i + 1:] + word[:i], c))
    return NoncommPoly(acc)


def side_derivative(p: NoncommPoly, b: str, side: str) -> NoncommPoly:
    """Strip b from the start ("right") or end ("left") of every path."""
    if side == "right":
        return NoncommPoly((path[1:], c) for path, c in p.terms.items() if path[:1] == (b,))
    if side == "left":
        return NoncommPoly((path[:-1], c) for path, c in p.terms.items() if path[-1:] == (b,))
    raise ValueError(f"side must be 'left' or 'right', not {side!r}")


def der_interchange(qp: IceQP) -> list[tuple[str, str]]:
    """Arrow pairs (a, b) where the right derivative of ∂_aW by b differs from the left derivative of ∂_bW by a."""
    ids = [a.id for a in qp.quiver.arrows]
    derivs = {a: cyclic_derivative(qp.potential, a) for a in ids}
    bad = []
    for a in ids:
        for b in ids:
            if side_derivative(derivs[a], b, "right") != side_derivative(derivs[b], a, "left"):
                bad.append((a, b))
    return bad


def der_interchange_check(qp: IceQP) -> bool:
    """Also rejects potentials whose words are not closed cycles."""
    for _, w in qp.potential.terms:
        if not qp.quiver.is_path(w + w[:1]):
            return False
    return not der_interchange(qp)


# -- reduction -------------------------------------------------------------


def _substitute(w: Potential, table: Mapping[str, NoncommPoly]) -> Potential:
    terms = []
    for c, word in w.terms:
        polys = [table.get(x, NoncommPoly({(x,): 1})) for x in word]
        acc = NoncommPoly({(): c})
        for p in polys:
            acc = acc.compose(p)
        terms += [(k, path) for path, k in acc.terms.items()]
    return Potential.from_terms(terms)


def _two_cycle_terms(qp: IceQP, boundary: bool) -> list[tuple[Fraction, Path]]:
    found = []
    for c, word in qp.potential.terms:
        if len(word) != 2 or word[0] == word[1]:
            continue
        fr = [qp.quiver.arrow(x).frozen for x in word]
        if all(fr):
            raise QPError(f"2-cycle {word} has both arrows frozen")
        if any(fr) and not boundary:
            continue
        found.append((c, word))
    return found


def reduce_qp(qp: IceQP, boundary: bool = False) -> IceQP:
    """Remove 2-cycle terms of the potential.

    Interior 2-cycles (both arrows unfrozen) are split off by the change of
    variables x -> x + B/c, y -> y + A/c. With boundary=True, a 2-cycle with
    one frozen arrow drops the frozen arrow, which the partner's relation
    expresses through other arrows, and freezes the partner.
    """
    while True:
        cands = _two_cycle_terms(qp, boundary)
        if not cands:
            return qp
        interior = [t for t in cands if not any(qp.quiver.arrow(x).frozen for x in t[1])]
        lam, (x, y) = (interior or cands)[0]
        rest = Potential(tuple(t for t in qp.potential.terms if t != (lam, (x, y))))
        if interior:
            ry, rx = cyclic_derivative(rest, y), cyclic_derivative(rest, x)
            if any(z in p for p in list(ry.terms) + list(rx.terms) for z in (x, y)):
                raise QPError(f"2-cycle ({x}, {y}) is entangled with its own derivatives")
            # x and y are removed; what remains is W0 - (1/c) R_y R_x
            w0 = Potential(tuple(t for t in rest.terms if x not in t[1] and y not in t[1]))
            extra = ry.compose(rx).scale(Fraction(-1) / lam)
            new_w = w0 + Potential.from_terms((c, p) for p, c in extra.terms.items())
            arrows = tuple(a for a in qp.quiver.arrows if a.id not in (x, y))
        else:
            fz, keep = (x, y) if qp.quiver.arrow(x).frozen else (y, x)
            # the relation at keep expresses fz through the rest; keep loses its relation
            sub = cyclic_derivative(rest, keep).scale(Fraction(-1) / lam)
            if any(z in p for p in sub.terms for z in (x, y)):
                raise QPError(f"2-cycle ({x}, {y}) is entangled with its own derivatives")
            new_w = _substitute(rest, {fz: sub})
            arrows = tuple(
                Arrow(a.id, a.tail, a.head, True) if a.id == keep else a
                for a in qp.quiver.arrows
                if a.id != fz
            )
        qp = IceQP(IceQuiver(qp.quiver.vertices, arrows), new_w)


# -- mutation --------------------------------------------------------------


def two_cycles(q: IceQuiver) -> list[tuple[str, str]]:
    """Pairs of opposite arrows, skipping pairs that contain a frozen arrow."""
    out = []
    for a, b in itertools.combinations(q.arrows, 2):
        if a.tail == b.head and a.head == b.tail and a.tail != a.head:
            if not (a.frozen or b.frozen):
                out.append((a.id, b.id))
    return out


@dataclass(frozen=True)
class LoopReport:
    loops: tuple[str, ...]
    two_cycles: tuple[tuple[str, str], ...]

    @property
    def ok(self) -> bool:
        return not self.loops and not self.two_cycles


def check_loops_2cycles(q: IceQuiver) -> LoopReport:
    loops = tuple(a.id for a in q.arrows if a.tail == a.head)
    return LoopReport(loops, tuple(two_cycles(q)))


def _fresh(base: str, used: set[str]) -> str:
    name, i = base, 1
    while name in used:
        i += 1
        name = f"{base}#{i}"
    used.add(name)
    return name


def premutate(qp: IceQP, v: str) -> IceQP:
    q = qp.quiver
    if v not in q.vertex_ids:
        raise QPError(f"unknown vertex {v}")
    if q.is_frozen(v):
        raise QPError(f"vertex {v} is frozen")
    ins, outs = q.in_arrows(v), q.out_arrows(v)
    if any(a.tail == v for a in ins):
        raise QPError(f"loop at {v}")
    if any(a.tail == b.head for a in ins for b in outs):
        raise QPError(f"2-cycle at {v}")
    used = {a.id for a in q.arrows}
    composite = {}
    arrows = [a for a in q.arrows if v not in (a.tail, a.head)]
    for a in ins:
        for b in outs:
            cid = _fresh(f"[{a.id}.{b.id}]", used)
            composite[(a.id, b.id)] = cid
            arrows.append(Arrow(cid, a.tail, b.head))
    star = {}
    for a in ins + outs:
        star[a.id] = _fresh(f"{a.id}*", used)
        arrows.append(Arrow(star[a.id], a.head, a.tail))
    terms = []
    for c, word in qp.potential.terms:
        # rotate so the word does not start in the middle of a passage through v
        k = next((i for i, x in enumerate(word) if q.arrow(x).tail != v), None)
        if k is None:
            raise QPError(f"term {word} lives at {v}")
        w = word[k:] + word[:k]
        new = []
        i = 0
        while i < len(w):
            if q.arrow(w[i]).head == v:
                new.append(composite[(w[i], w[(i + 1) % len(w)])])
                i += 2
            else:
                new.append(w[i])
                i += 1
        terms.append((c, new))
    for (a, b), cid in composite.items():
        terms.append((1, (cid, star[b], star[a])))
    return IceQP(IceQuiver(q.vertices, tuple(arrows)), Potential.from_terms(terms))


def mutate_qp(qp: IceQP, v: str, boundary: bool = True) -> IceQP:
    return reduce_qp(premutate(qp, v), boundary=boundary)


def fz_mutate(q: IceQuiver, v: str) -> IceQuiver:
    """Fomin-Zelevinsky mutation; arrows between frozen vertices stay as they are."""
    if q.is_frozen(v):
        raise QPError(f"vertex {v} is frozen")
    ids = q.vertex_ids
    b = {(x, y): 0 for x in ids for y in ids}
    for a in q.arrows:
        if not a.frozen:
            b[(a.tail, a.head)] += 1
            b[(a.head, a.tail)] -= 1
    nb = dict(b)
    for x in ids:
        for y in ids:
            if v in (x, y):
                nb[(x, y)] = -b[(x, y)]
            elif not (q.is_frozen(x) and q.is_frozen(y)):
                nb[(x, y)] = b[(x, y)] + (abs(b[(x, v)]) * b[(v, y)] + b[(x, v)] * abs(b[(v, y)])) // 2
    arrows = [a for a in q.arrows if a.frozen]
    used = {a.id for a in arrows}
    for x in ids:
        for y in ids:
            keep = [a for a in q.arrows if not a.frozen and (a.tail, a.head) == (x, y)]
            if q.is_frozen(x) and q.is_frozen(y) and v not in (x, y):
                arrows += keep
                used |= {a.id for a in keep}
                continue
            for j in range(max(nb[(x, y)], 0)):
                arrows.append(Arrow(_fresh(f"{x}>{y}", used), x, y))
    return IceQuiver(q.vertices, tuple(arrows))


def exchange_matrix(q: IceQuiver, include_frozen_pairs: bool = False) -> dict[tuple[str, str], int]:
    b: dict[tuple[str, str], int] = defaultdict(int)
    for a in q.arrows:
        if a.frozen and not include_frozen_pairs:
            continue
        if not include_frozen_pairs and q.is_frozen(a.tail) and q.is_frozen(a.head):
            continue
        b[(a.tail, a.head)] += 1
        b[(a.head, a.tail)] -= 1
    return {k: v for k, v in b.items() if v}


def quiver_isomorphism(q1: IceQuiver, q2: IceQuiver, ignore_frozen_pairs: bool = False) -> dict[str, str] | None:
    """A vertex bijection fixing frozen ids and matching arrow counts with frozen flags.

    With ignore_frozen_pairs, arrows between frozen vertices are compared as a
    signed exchange matrix only.
    """
    if sorted(q1.frozen_vertices) != sorted(q2.frozen_vertices):
        return None
    m1, m2 = q1.mutable_vertices, q2.mutable_vertices
    if len(m1) != len(m2):
        return None

    def signature(q, rename):
        if ignore_frozen_pairs:
            return Counter({(rename.get(x, x), rename.get(y, y)): c for (x, y), c in exchange_matrix(q).items()})
        return Counter((rename.get(a.tail, a.tail), rename.get(a.head, a.head), a.frozen) for a in q.arrows)

    target = signature(q2, {})
    for perm in itertools.permutations(m2):
        rename = dict(zip(m1, perm))
        if signature(q1, rename) == target:
            return rename
    return None


def rename_vertices(qp: IceQP, rename: Mapping[str, str]) -> IceQP:
    verts = tuple((rename.get(v, v), f) for v, f in qp.quiver.vertices)
    arrows = tuple(Arrow(a.id, rename.get(a.tail, a.tail), rename.get(a.head, a.head), a.frozen) for a in qp.quiver.arrows)
    return IceQP(IceQuiver(verts, arrows), qp.potential)


# -- text format -----------------------------------------------------------


def format_qp(qp: IceQP) -> str:
    lines = []
    for v, f in qp.quiver.vertices:
        lines.append(f"vertex {v} {'f' if f else 'm'}")
    for a in qp.quiver.arrows:
        lines.append(f"arrow {a.id} {a.tail} {a.head} {'f' if a.frozen else 'm'}")
    for c, w in qp.potential.terms:
        sign = "+" if c > 0 else "-"
        mag = abs(c)
        coeff = "" if mag == 1 else f"{mag} "
        lines.append(f"term {sign} {coeff}{' '.join(w)}")
    return "\n".join(lines) + "\n"


def parse_qp(text: str) -> IceQP:
    verts, arrows, terms = [], [], []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip() if raw.lstrip().startswith("#") else raw.strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "vertex" and len(tok) == 3:
            verts.append((tok[1], tok[2] == "f"))
        elif tok[0] == "arrow" and len(tok) == 5:
            arrows.append(Arrow(tok[1], tok[2], tok[3], tok[4] == "f"))
        elif tok[0] == "term" and len(tok) >= 3:
            sign = 1 if tok[1] == "+" else -1
            rest = tok[2:]
            coeff = Fraction(1)
            if "/" in rest[0] or rest[0].isdigit():
                coeff = Fraction(rest[0])
                rest = rest[1:]
            terms.append((sign * coeff, rest))
        else:
            raise QPError(f"malformed line: {raw!r}")
    return IceQP(IceQuiver(tuple(verts), tuple(arrows)), Potential.from_terms(terms))
