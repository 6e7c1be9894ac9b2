"""The complex res(A) tensored with a vertex simple, and graded exactness checks.

Terms, left to right (positions -3..0, then the simple at position 1):

    A e_v [v]  ->  ⊕_{a ∈ H^m(v)} A e_{t(a)} [a]  ->  ⊕_{b ∈ T(v)} A e_{h(b)} [b]  ->  A e_v  ->  S_v

where H^m(v) are the unfrozen arrows into v, T(v) all arrows out of v, and
the first term is present only when v is mutable. A summand A e_u shifted
by s has, in weight slice (w, Ω), the basis element t^m μ_{u,w} whenever
Ω - s = wt(μ_{u,w}) + m·(1,…,1).
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .algebra import SliceKey, Truncation, Weight, add, ones, sub
from .qp import IceQP, NoncommPoly, Potential, cyclic_derivative, side_derivative

POSITIONS = (-3, -2, -1, 0)


@dataclass(frozen=True)
class Summand:
    label: str  # "v", an arrow id, or "S"
    vertex: str
    shift: Weight


@dataclass
class SliceComplex:
    """The complex restricted to one weight slice: bases per position and matrices between them."""

    head: str
    weight: Weight
    bases: dict[int, list[tuple[int, SliceKey | None]]]  # position -> [(summand index, truncation slice)]
    maps: dict[int, list[list[Fraction]]]  # position p -> matrix of d: C_p -> C_{p+1}, rows index C_{p+1}

    @property
    def total(self) -> int:
        return sum(self.weight)


@dataclass
class GradedComplex:
    vertex: str
    degree: int
    terms: dict[int, list[Summand]]
    slices: list[SliceComplex]


def _rank(matrix: list[list[Fraction]], rows: int, cols: int) -> int:
    if rows == 0 or cols == 0:
        return 0
    data = [[QQ(x.numerator, x.denominator) for x in row] for row in matrix]
    return DomainMatrix(data, (rows, cols), QQ).rank()


def complex_terms(qp: IceQP, weights: dict[str, Weight], v: str) -> dict[int, list[Summand]]:
    q = qp.quiver
    n = len(next(iter(weights.values())))
    zero = (0,) * n
    terms: dict[int, list[Summand]] = {p: [] for p in (-3, -2, -1, 0, 1)}
    if not q.is_frozen(v):
        terms[-3].append(Summand("v", v, ones(n)))
    for a in q.in_arrows(v):
        if not a.frozen:
            terms[-2].append(Summand(a.id, a.tail, sub(ones(n), weights[a.id])))
    for b in q.out_arrows(v):
        terms[-1].append(Summand(b.id, b.head, weights[b.id]))
    terms[0].append(Summand("v", v, zero))
    terms[1].append(Summand("S", v, zero))
    return terms


def build_vertex_complex(qp: IceQP, trunc: Truncation, v: str, d: int | None = None,
                         potential: Potential | None = None) -> GradedComplex:
    """res(A) ⊗ S_v on all weight slices of total degree ≤ d.

    `potential` replaces W in the middle differential only; the algebra
    itself stays the one in `trunc`.
    """
    d = trunc.d if d is None else d
    if d > trunc.d:
        raise ValueError(f"truncation degree {trunc.d} is below the requested {d}")
    weights = trunc.weights
    w_pot = potential if potential is not None else qp.potential
    terms = complex_terms(qp, weights, v)
    zero = (0,) * trunc.n
    mid: dict[tuple[str, str], NoncommPoly] = {}
    for a in terms[-2]:
        da = cyclic_derivative(w_pot, a.label)
        for b in terms[-1]:
            mid[(a.label, b.label)] = side_derivative(da, b.label, "right")

    by_head: dict[str, list[SliceKey]] = defaultdict(list)
    for key in trunc.nonzero_keys():
        by_head[key[0]].append(key)
    targets: set[tuple[str, Weight]] = set()
    for p in (-3, -2, -1, 0):
        for s in terms[p]:
            for (u, w, om) in by_head[s.vertex]:
                total = add(om, s.shift)
                if sum(total) <= d:
                    targets.add((w, total))
    targets.add((v, zero))

    slices = []
    for w, om in sorted(targets, key=lambda t: (sum(t[1]), t)):
        bases: dict[int, list[tuple[int, SliceKey | None]]] = {}
        for p in (-3, -2, -1, 0):
            row = []
            for i, s in enumerate(terms[p]):
                key = (s.vertex, w, sub(om, s.shift))
                if min(key[2]) >= 0 and trunc.dim(key) == 1:
                    row.append((i, key))
                elif trunc.dim(key) > 1:
                    raise ValueError(f"slice {key} is not thin")
            bases[p] = row
        bases[1] = [(0, None)] if (w, om) == (v, zero) else []
        maps = {}
        for p in (-3, -2, -1, 0):
            src, dst = bases[p], bases[p + 1]
            index = {entry: r for r, entry in enumerate(dst)}
            mat = [[Fraction(0)] * len(src) for _ in dst]
            for c, (i, key) in enumerate(src):
                for (j, tkey), coef in _image(p, terms, i, key, trunc, mid, v):
                    if coef:
                        mat[index[(j, tkey)]][c] += coef
            maps[p] = mat
        slices.append(SliceComplex(w, om, bases, maps))
    return GradedComplex(v, d, terms, slices)


def _image(p, terms, i, key, trunc: Truncation, mid, v):
    """Image of the basis element (summand i, slice key) under d: C_p -> C_{p+1}."""
    x = trunc.ref(key)
    out = []
    if p == -3:
        for j, s in enumerate(terms[-2]):
            k2, c = trunc.coord(s.vertex, (s.label,) + x)
            out.append(((j, k2), c))
    elif p == -2:
        a = terms[-2][i].label
        for j, s in enumerate(terms[-1]):
            for path, c in mid[(a, s.label)].terms.items():
                k2, c2 = trunc.coord(s.vertex, path + x)
                out.append(((j, k2), c * c2))
    elif p == -1:
        s = terms[-1][i]
        k2, c = trunc.coord(v, (s.label,) + x)
        out.append(((0, k2), c))
    elif p == 0:
        if key == (v, v, (0,) * trunc.n):
            out.append(((0, None), Fraction(1)))
    return out


@dataclass
class ExactnessReport:
    vertex: str
    degree: int
    positions: tuple[int, ...]
    homology: list[tuple[str, Weight, int, int]] = field(default_factory=list)  # (head, weight, position, dim)
    d_squared_ok: bool = True
    d_squared_witness: list = field(default_factory=list)
    judged: int = 0
    indeterminate: bool = False

    @property
    def ok(self) -> bool:
        return self.d_squared_ok and not self.indeterminate and not any(h for *_, h in self.homology)

    @property
    def failures(self) -> list[tuple[str, Weight, int, int]]:
        return [h for h in self.homology if h[3]]

    @property
    def status(self) -> str:
        if not self.d_squared_ok or self.failures:
            return "FAIL"
        if self.indeterminate:
            return "INDETERMINATE"
        return "PASS"


def _matmul_zero(a: list[list[Fraction]], b: list[list[Fraction]], inner: int) -> bool:
    # a: rows x inner, b: inner x cols
    if not a or not b:
        return True
    cols = len(b[0]) if b else 0
    for row in a:
        for c in range(cols):
            if sum(row[k] * b[k][c] for k in range(inner)):
                return False
    return True


def check_exactness(c: GradedComplex, positions: Iterable[int] = (-3, -2)) -> ExactnessReport:
    """Homology dimension at each requested position in every slice.

    Position 1 is the simple S_v, so position 0 includes the augmentation.
    The check is indeterminate when the bound is too small for the top term
    to appear at all, since then nothing about it has been tested.
    """
    pos = tuple(sorted(set(positions)))
    rep = ExactnessReport(c.vertex, c.degree, pos)
    n = len(c.terms[0][0].shift)
    if c.degree < n:
        rep.indeterminate = True
    for s in c.slices:
        dims = {p: len(s.bases[p]) for p in (-3, -2, -1, 0, 1)}
        ranks = {p: _rank(s.maps[p], dims[p + 1], dims[p]) for p in (-3, -2, -1, 0)}
        ranks[-4] = ranks[1] = 0
        for p in (-3, -2, -1):
            if not _matmul_zero(s.maps[p + 1], s.maps[p], dims[p + 1]):
                rep.d_squared_ok = False
                rep.d_squared_witness.append((s.head, s.weight, p))
        for p in pos:
            h = dims[p] - ranks[p] - ranks[p - 1]
            rep.homology.append((s.head, s.weight, p, h))
        rep.judged += 1
    return rep


def euler_characteristic(c: GradedComplex, include_simple: bool = True) -> dict[tuple[str, Weight], int]:
    out = {}
    top = 1 if include_simple else 0
    for s in c.slices:
        out[(s.head, s.weight)] = sum((-1) ** (p % 2) * len(s.bases[p]) for p in range(-3, top + 1))
    return out


def flip_term(potential: Potential, index: int) -> Potential:
    """The potential with the sign of one term reversed (terms in canonical order)."""
    terms = list(potential.terms)
    if not 0 <= index < len(terms):
        raise IndexError(f"term index {index} out of range 0..{len(terms) - 1}")
    c, w = terms[index]
    terms[index] = (-c, w)
    return Potential(tuple(terms))


# -- minimal graded resolutions -------------------------------------------------


@dataclass
class Resolution:
    vertex: str
    degree: int
    generators: list[list[tuple[str, Weight]]]  # per step: (vertex, weight) of each generator

    @property
    def length(self) -> int:
        nz = [i for i, g in enumerate(self.generators) if g]
        return nz[-1] if nz else 0


def graded_resolution(qp: IceQP, trunc: Truncation, v: str, d: int | None = None, max_steps: int = 8) -> Resolution:
    """Minimal graded projective resolution of S_v computed slice by slice up to total degree d.

    Modules are left modules: A e_u has basis the slices starting at u, and
    arrows act by extending paths at their head.
    """
    d = trunc.d if d is None else d
    n = trunc.n
    zero = (0,) * n
    by_tail: dict[str, list[SliceKey]] = defaultdict(list)
    for key in trunc.nonzero_keys():
        by_tail[key[0]].append(key)

    def free_slices(free):
        """(head, Ω) -> list of basis entries (summand index, truncation key)."""
        out: dict[tuple[str, Weight], list[tuple[int, SliceKey]]] = defaultdict(list)
        for i, (u, sh) in enumerate(free):
            for key in by_tail[u]:
                om = add(key[2], sh)
                if sum(om) <= d:
                    out[(key[1], om)].append((i, key))
        return out

    gens: list[list[tuple[str, Weight]]] = [[(v, zero)]]
    free = [(v, zero)]
    # kernel of the augmentation: everything but e_v
    fs = free_slices(free)
    kernel = {}
    for sl, basis in fs.items():
        vecs = [{b: Fraction(1)} for b in basis if b[1] != (v, v, zero)]
        kernel[sl] = vecs
    for _ in range(max_steps):
        new_gens = _minimal_generators(trunc, kernel, d)
        gens.append([g for g, _ in new_gens])
        if not new_gens:
            break
        free = [g for g, _ in new_gens]
        images = [vec for _, vec in new_gens]
        # kernel of the map from the new free module onto the span of the generators
        fs = free_slices(free)
        kernel = {}
        for sl, basis in fs.items():
            cols = []
            for (i, key) in basis:
                x = trunc.ref(key)
                img: dict = defaultdict(Fraction)
                for (j, k0), c in images[i].items():
                    path = trunc.ref(k0) + x
                    if sum(k0[2]) + sum(key[2]) > trunc.d:
                        continue
                    k2, c2 = trunc.coord(k0[0], path)
                    if c * c2:
                        img[(j, k2)] += c * c2
                cols.append({k: c for k, c in img.items() if c})
            kernel[sl] = _nullspace(cols, basis)
    return Resolution(v, d, gens)


def _nullspace(cols: list[dict], basis: list) -> list[dict]:
    rows_index = {}
    for col in cols:
        for k in col:
            rows_index.setdefault(k, len(rows_index))
    if not cols:
        return []
    if not rows_index:
        return [{b: Fraction(1)} for b in basis]
    data = [[QQ(0)] * len(cols) for _ in rows_index]
    for c, col in enumerate(cols):
        for k, x in col.items():
            data[rows_index[k]][c] = QQ(x.numerator, x.denominator)
    m = DomainMatrix(data, (len(rows_index), len(cols)), QQ)
    ns = m.nullspace().to_Matrix()
    out = []
    for r in range(ns.rows):
        vec = {}
        for c in range(ns.cols):
            x = ns[r, c]
            if x != 0:
                vec[basis[c]] = Fraction(int(x.p), int(x.q))
        out.append(vec)
    return out


def _minimal_generators(trunc: Truncation, kernel: dict, d: int) -> list[tuple[tuple[str, Weight], dict]]:
    """Generators of K modulo rad K = Σ_arrows arrow·K, slice by slice."""
    gens = []
    for (w, om) in sorted(kernel, key=lambda s: (sum(s[1]), s)):
        vecs = kernel[(w, om)]
        if not vecs:
            continue
        rad = []
        for a in trunc.qp.quiver.in_arrows(w):
            src = (a.tail, sub(om, trunc.weights[a.id]))
            if min(src[1]) < 0:
                continue
            for vec in kernel.get(src, []):
                rad.append(_left_multiply_vec(trunc, vec, a.id))
        keys = sorted({k for vec in vecs + rad for k in vec}, key=repr)
        if not keys:
            continue
        idx = {k: i for i, k in enumerate(keys)}

        def rank(vs):
            if not vs:
                return 0
            data = [[QQ(0)] * len(keys) for _ in vs]
            for r, vec in enumerate(vs):
                for k, x in vec.items():
                    data[r][idx[k]] = QQ(x.numerator, x.denominator)
            return DomainMatrix(data, (len(vs), len(keys)), QQ).rank()

        current = list(rad)
        base = rank(current)
        for vec in vecs:
            r = rank(current + [vec])
            if r > base:
                current.append(vec)
                base = r
                gens.append(((w, om), vec))
    return gens


def _left_multiply_vec(trunc: Truncation, vec: dict, arrow: str) -> dict:
    out: dict = defaultdict(Fraction)
    for (i, key), c in vec.items():
        if sum(key[2]) + sum(trunc.weights[arrow]) > trunc.d:
            continue
        k2, c2 = trunc.coord(key[0], trunc.ref(key) + (arrow,))
        if c * c2:
            out[(i, k2)] += c * c2
    return {k: x for k, x in out.items() if x}


def graded_resolution_length(qp: IceQP, trunc: Truncation, v: str, d: int | None = None) -> int:
    return graded_resolution(qp, trunc, v, d).length
