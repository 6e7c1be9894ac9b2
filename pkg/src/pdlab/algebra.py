"""Dimer algebras in graded normal form.

Elements are handled through weight slices: for vertices v, w and a weight
vector ω, the slice (v, w, ω) is spanned by the paths from v to w of weight
ω modulo the relations ∂_aW. Slices are computed by exact linear algebra up
to a bound on total weight.
"""

from __future__ import annotations

import heapq
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .diagram import PlabicGraph, zigzag_strands
from .qp import IceQP, Path, arrow_darts, arrow_ids

Weight = tuple[int, ...]
SliceKey = tuple[str, str, Weight]  # (tail, head, weight)


class ThinnessError(ValueError):
    """Raised when an operation relies on thinness that does not hold."""


def cyclic_interval(i: int, j: int, n: int) -> Weight:
    """Indicator of the cyclic interval [i, j-1] in {1..n}."""
    w = [0] * n
    x = i
    while x != j:
        w[x - 1] = 1
        x = x % n + 1
    return tuple(w)


def add(u: Weight, v: Weight) -> Weight:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Weight, v: Weight) -> Weight:
    return tuple(a - b for a, b in zip(u, v))


def ones(n: int) -> Weight:
    return (1,) * n


def t_power(diff: Weight) -> int | None:
    """m if diff = m·(1,…,1) with m ≥ 0, else None."""
    if not diff:
        return 0
    m = diff[0]
    if m < 0 or any(x != m for x in diff):
        return None
    return m


def path_weight(weights: Mapping[str, Weight], path: Iterable[str], n: int) -> Weight:
    w = (0,) * n
    for a in path:
        w = add(w, weights[a])
    return w


@dataclass(frozen=True)
class ArrowWeight:
    arrow: str
    weight: Weight

    @property
    def total(self) -> int:
        return sum(self.weight)


def arrow_weights(g: PlabicGraph, qp: IceQP) -> dict[str, Weight]:
    """Weights of the arrows of qp_from_diagram(g) (or of a reduction of it).

    An arrow crossed right to left by strand i and left to right by strand j
    gets the indicator of [i, j-1]. Every fundamental cycle must weigh (1,…,1).
    """
    passes: dict[tuple, dict[object, int]] = defaultdict(dict)
    for s in zigzag_strands(g):
        for link, frm in s.trace:
            passes[link][frm] = s.source
    ids = arrow_ids(g)
    present = {a.id for a in qp.quiver.arrows}
    weights = {}
    for link, (x, _) in arrow_darts(g).items():
        aid = ids[link]
        if aid not in present:
            continue
        along = passes[link][x]
        against = next(s for v, s in passes[link].items() if v != x)
        weights[aid] = cyclic_interval(along, against, g.n)
    missing = present - set(weights)
    if missing:
        raise ValueError(f"arrows {sorted(missing)} do not come from the diagram")
    for c, word in qp.potential.terms:
        if path_weight(weights, word, g.n) != ones(g.n):
            raise ValueError(f"term {word} does not have weight (1,…,1)")
    for aid, w in weights.items():
        if sum(w) < 1:
            raise ValueError(f"arrow {aid} has total weight 0")
    return weights


# -- path enumeration and slices --------------------------------------------


@dataclass
class SliceData:
    paths: list[Path]
    basis: list[Path]  # representative paths of a basis of the quotient
    coords: dict[Path, tuple[Fraction, ...]]  # path -> coordinates on the basis
    relation_count: int = 0

    @property
    def dim(self) -> int:
        return len(self.basis)


class Truncation:
    """The quotient of the path algebra by the relations, slice by slice, up to total weight d."""

    def __init__(self, qp: IceQP, weights: Mapping[str, Weight], d: int):
        self.qp = qp
        self.weights = dict(weights)
        self.d = d
        self.n = len(next(iter(self.weights.values()))) if self.weights else 0
        for a in qp.quiver.arrows:
            if sum(self.weights[a.id]) < 1:
                raise ValueError(f"arrow {a.id} has nonpositive total weight")
        self._key_of: dict[tuple[str, Path], SliceKey] = {}
        paths: dict[SliceKey, list[Path]] = defaultdict(list)
        zero = (0,) * self.n
        for v in qp.quiver.vertex_ids:
            stack = [((), v, zero, 0)]
            while stack:
                p, head, w, tot = stack.pop()
                key = (v, head, w)
                paths[key].append(p)
                self._key_of[(v, p)] = key
                for a in qp.quiver.out_arrows(head):
                    wa = self.weights[a.id]
                    t2 = tot + sum(wa)
                    if t2 <= d:
                        stack.append((p + (a.id,), a.head, add(w, wa), t2))
        self.relations = qp.relations()
        self._terms: dict[Path, list[tuple[str, Fraction]]] = defaultdict(list)
        for aid, poly in self.relations.items():
            for p, c in poly.terms.items():
                self._terms[p].append((aid, c))
        self._max_term = max((len(p) for p in self._terms), default=0)
        self.slices: dict[SliceKey, SliceData] = {}
        for key in sorted(paths, key=lambda k: (sum(k[2]), k)):
            self.slices[key] = self._solve(key, sorted(paths[key], key=lambda p: (len(p), p)))

    # -- linear algebra per slice

    def _instances(self, key: SliceKey, plist: list[Path]) -> list[dict[Path, Fraction]]:
        seen = set()
        out = []
        for p in plist:
            L = len(p)
            for i in range(L):
                for j in range(i + 1, min(L, i + self._max_term) + 1):
                    sub_ = p[i:j]
                    for aid, _ in self._terms.get(sub_, ()):
                        tag = (p[:i], aid, p[j:])
                        if tag in seen:
                            continue
                        seen.add(tag)
                        vec: dict[Path, Fraction] = defaultdict(Fraction)
                        for q, c in self.relations[aid].terms.items():
                            vec[p[:i] + q + p[j:]] += c
                        out.append({q: c for q, c in vec.items() if c})
        return out

    def _solve(self, key: SliceKey, plist: list[Path]) -> SliceData:
        rels = self._instances(key, plist)
        for r in rels:
            for q in r:
                if self._key_of.get((key[0], q)) != key:
                    raise ThinnessError(f"relation instance leaves slice {key}")
        if all(len(r) <= 2 for r in rels):
            return self._solve_binomial(plist, rels)
        return self._solve_general(plist, rels)

    def _solve_binomial(self, plist: list[Path], rels: list[dict[Path, Fraction]]) -> SliceData:
        parent = {p: p for p in plist}
        ratio = {p: Fraction(1) for p in plist}  # p = ratio[p] * parent[p]
        dead: set[Path] = set()

        def find(p):
            if parent[p] == p:
                return p, Fraction(1)
            r, k = find(parent[p])
            parent[p] = r
            ratio[p] *= k
            return r, ratio[p]

        for rel in rels:
            items = list(rel.items())
            if len(items) == 1:
                dead.add(find(items[0][0])[0])
                continue
            (p, a), (q, b) = items
            rp, kp = find(p)
            rq, kq = find(q)
            # a*kp*rp + b*kq*rq = 0
            if rp == rq:
                if a * kp + b * kq != 0:
                    dead.add(rp)
                continue
            parent[rp] = rq
            ratio[rp] = -b * kq / (a * kp)
            if rp in dead:
                dead.add(rq)
        roots: dict[Path, Path] = {}
        for p in plist:
            r, _ = find(p)
            if r not in dead and r not in roots:
                roots[r] = p  # first path (shortest, then least) of the class
        basis = list(roots.values())
        index = {r: i for i, r in enumerate(roots)}
        coords = {}
        for p in plist:
            r, k = find(p)
            vec = [Fraction(0)] * len(basis)
            if r not in dead:
                _, kb = find(roots[r])
                vec[index[r]] = k / kb
            coords[p] = tuple(vec)
        return SliceData(plist, basis, coords, len(rels))

    def _solve_general(self, plist: list[Path], rels: list[dict[Path, Fraction]]) -> SliceData:
        col = {p: i for i, p in enumerate(plist)}
        rows = [[QQ(0)] * len(plist) for _ in rels]
        for r, rel in zip(rows, rels):
            for q, c in rel.items():
                r[col[q]] = QQ(c.numerator, c.denominator)
        if rows:
            rref, pivots = DomainMatrix(rows, (len(rows), len(plist)), QQ).rref()
            dense = rref.to_Matrix()
        else:
            pivots, dense = (), None
        free = [i for i in range(len(plist)) if i not in set(pivots)]
        basis = [plist[i] for i in free]
        coords = {}
        prow = {c: r for r, c in enumerate(pivots)}
        for i, p in enumerate(plist):
            if i in prow:
                r = prow[i]
                coords[p] = tuple(-Fraction(int(dense[r, j].p), int(dense[r, j].q)) for j in free)
            else:
                coords[p] = tuple(Fraction(int(j == i)) for j in free)
        return SliceData(plist, basis, coords, len(rels))

    # -- queries

    def key_of(self, v: str, path: Path) -> SliceKey:
        return self._key_of[(v, path)]

    def dim(self, key: SliceKey) -> int:
        s = self.slices.get(key)
        return s.dim if s else 0

    def coord(self, v: str, path: Path) -> tuple[SliceKey, Fraction]:
        """Coordinate of a path on the one-dimensional slice containing it."""
        key = self._key_of[(v, path)]
        s = self.slices[key]
        if s.dim > 1:
            raise ThinnessError(f"slice {key} has dimension {s.dim}")
        return key, (s.coords[path][0] if s.dim else Fraction(0))

    def ref(self, key: SliceKey) -> Path:
        s = self.slices[key]
        if s.dim != 1:
            raise ThinnessError(f"slice {key} has dimension {s.dim}")
        return s.basis[0]

    def product(self, first: SliceKey, then: SliceKey) -> tuple[SliceKey, Fraction] | None:
        """Basis element of `first` followed by that of `then`, or None beyond the bound."""
        if first[1] != then[0]:
            raise ValueError("slices are not composable")
        total = sum(first[2]) + sum(then[2])
        if total > self.d:
            return None
        return self.coord(first[0], self.ref(first) + self.ref(then))

    def nonzero_keys(self) -> list[SliceKey]:
        return [k for k, s in self.slices.items() if s.dim]

    def graded_dims(self, vertices: Iterable[str] | None = None) -> dict[tuple[str, str, int], int]:
        keep = set(vertices) if vertices is not None else None
        out: Counter = Counter()
        for (v, w, om), s in self.slices.items():
            if keep is not None and (v not in keep or w not in keep):
                continue
            if s.dim:
                out[(v, w, sum(om))] += s.dim
        return dict(sorted(out.items()))


# -- minimal paths -----------------------------------------------------------


def _dijkstra(qp: IceQP, weights: Mapping[str, Weight], source: str, reverse: bool) -> dict[str, int]:
    dist = {source: 0}
    heap = [(0, source)]
    while heap:
        d0, x = heapq.heappop(heap)
        if d0 > dist[x]:
            continue
        arrows = qp.quiver.in_arrows(x) if reverse else qp.quiver.out_arrows(x)
        for a in arrows:
            y = a.tail if reverse else a.head
            nd = d0 + sum(weights[a.id])
            if nd < dist.get(y, nd + 1):
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return dist


@dataclass(frozen=True)
class PathClass:
    """t^m times the minimal path from tail to head."""

    tail: str
    head: str
    m: int = 0


class MinimalPaths:
    def __init__(self, qp: IceQP, weights: Mapping[str, Weight]):
        self.qp = qp
        self.weights = dict(weights)
        self.n = len(next(iter(self.weights.values()))) if self.weights else 0
        self._to: dict[str, dict[str, int]] = {}

    def distance(self, v: str, w: str) -> int:
        if w not in self._to:
            self._to[w] = _dijkstra(self.qp, self.weights, w, reverse=True)
        if v not in self._to[w]:
            raise ValueError(f"{w} is unreachable from {v}")
        return self._to[w][v]

    def witness(self, v: str, w: str) -> Path:
        """Lexicographically least path of minimal total weight."""
        total = self.distance(v, w)
        path: list[str] = []
        x = v
        while x != w or total:
            best = None
            for a in sorted(self.qp.quiver.out_arrows(x), key=lambda a: a.id):
                rest = self._to[w].get(a.head)
                if rest is not None and sum(self.weights[a.id]) + rest == total:
                    best = a
                    break
            assert best is not None
            path.append(best.id)
            total -= sum(self.weights[best.id])
            x = best.head
        return tuple(path)

    def weight(self, v: str, w: str) -> Weight:
        return path_weight(self.weights, self.witness(v, w), self.n)

    def delta(self, v: str, u: str, w: str) -> int:
        """Power of t in μ_{u,w}μ_{v,u} relative to μ_{v,w}."""
        extra = self.distance(v, u) + self.distance(u, w) - self.distance(v, w)
        if extra % self.n:
            raise ThinnessError(f"minimal weights through {u} differ by {extra}, not a multiple of {self.n}")
        return extra // self.n


def minimal_path(qp: IceQP, weights: Mapping[str, Weight], v: str, w: str) -> tuple[PathClass, Path]:
    mp = MinimalPaths(qp, weights)
    return PathClass(v, w, 0), mp.witness(v, w)


def multiply(p: PathClass, q: PathClass, mp: MinimalPaths) -> PathClass:
    """The class of p∘q, that is q followed by p."""
    if q.head != p.tail:
        raise ValueError("classes are not composable")
    delta = mp.delta(q.tail, q.head, p.head)
    if delta < 0:
        raise ThinnessError("negative t-power in a product")
    return PathClass(q.tail, p.head, p.m + q.m + delta)


def class_weight(c: PathClass, mp: MinimalPaths) -> Weight:
    return add(mp.weight(c.tail, c.head), tuple(c.m for _ in range(mp.n)))


# -- thinness ------------------------------------------------------------------


@dataclass
class ThinReport:
    degree: int
    checks: dict[str, bool]
    witnesses: dict[str, list] = field(default_factory=dict)
    slices: int = 0

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def verify_thin(qp: IceQP, weights: Mapping[str, Weight], d: int, trunc: Truncation | None = None) -> ThinReport:
    n = len(next(iter(weights.values())))
    wit: dict[str, list] = defaultdict(list)
    for aid, w in weights.items():
        if sum(w) < 1:
            wit["positive_arrows"].append(aid)
    for c, word in qp.potential.terms:
        if path_weight(weights, word, n) != ones(n):
            wit["cycle_weights"].append(word)
    for aid, poly in qp.relations().items():
        ws = {path_weight(weights, p, n) for p in poly.terms}
        if len(ws) > 1:
            wit["homogeneous"].append(aid)
    trunc = trunc or Truncation(qp, weights, d)
    mp = MinimalPaths(qp, weights)
    for (v, w, om), s in trunc.slices.items():
        if s.dim > 1:
            wit["dim_le_1"].append(((v, w, om), s.dim))
        m = t_power(sub(om, mp.weight(v, w)))
        if m is None:
            wit["weight_differences"].append((v, w, om))
        elif s.dim != 1:
            wit["spanned_by_t_mu"].append((v, w, om))
    checks = {
        k: not wit.get(k)
        for k in ("positive_arrows", "cycle_weights", "homogeneous", "dim_le_1", "weight_differences", "spanned_by_t_mu")
    }
    return ThinReport(d, checks, dict(wit), len(trunc.slices))


def paths_identified(trunc: Truncation) -> bool:
    """Every path equals the basis element of its slice with coefficient ±1."""
    return all(abs(c[0]) == 1 for s in trunc.slices.values() if s.dim == 1 for c in s.coords.values())


# -- truncations ---------------------------------------------------------------


@dataclass
class TruncatedAlgebra:
    vertices: tuple[str, ...]
    degree: int
    basis: list[PathClass]
    dims: dict[tuple[str, str, int], int]
    mp: MinimalPaths

    def multiply(self, p: PathClass, q: PathClass) -> PathClass | None:
        r = multiply(p, q, self.mp)
        total = self.mp.distance(r.tail, r.head) + r.m * self.mp.n
        return r if total <= self.degree else None


def truncated_algebra(qp: IceQP, weights: Mapping[str, Weight], d: int, vertices: Iterable[str] | None = None,
                      trunc: Truncation | None = None) -> TruncatedAlgebra:
    trunc = trunc or Truncation(qp, weights, d)
    verts = tuple(vertices) if vertices is not None else qp.quiver.vertex_ids
    mp = MinimalPaths(qp, weights)
    basis = []
    for v in verts:
        for w in verts:
            base = mp.distance(v, w)
            m = 0
            while base + m * mp.n <= d:
                basis.append(PathClass(v, w, m))
                m += 1
    return TruncatedAlgebra(verts, d, basis, trunc.graded_dims(verts), mp)


def boundary_truncation(qp: IceQP, weights: Mapping[str, Weight], d: int, trunc: Truncation | None = None) -> TruncatedAlgebra:
    return truncated_algebra(qp, weights, d, qp.quiver.frozen_vertices, trunc)


def stable_dim(qp: IceQP, weights: Mapping[str, Weight], d: int) -> list[int]:
    """Dimensions of A/AeA in total degrees 0..d."""
    mp = MinimalPaths(qp, weights)
    frozen = qp.quiver.frozen_vertices
    out = [0] * (d + 1)
    for v in qp.quiver.vertex_ids:
        for w in qp.quiver.vertex_ids:
            if not frozen or v in frozen or w in frozen:
                bound = 0 if frozen else None
            else:
                bound = min(mp.delta(v, u, w) for u in frozen)
            base = mp.distance(v, w)
            m = 0
            while base + m * mp.n <= d and (bound is None or m < bound):
                out[base + m * mp.n] += 1
                m += 1
    return out


def vanishing_degree(seq: list[int]) -> int | None:
    """Least degree above which the sequence is zero, or None if it never vanishes within range."""
    nz = [i for i, x in enumerate(seq) if x]
    if not nz:
        return 0
    last = nz[-1]
    return last + 1 if last + 1 < len(seq) else None
