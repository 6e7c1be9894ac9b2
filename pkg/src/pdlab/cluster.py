"""Seeds, exact Laurent mutation, exchange graphs, K-theory classes of
simples and the cluster character of thin modules."""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import sympy

from .algebra import Truncation
from .cy import GradedComplex, build_vertex_complex, euler_characteristic
from .diagram import PlabicGraph, face_names, region_labels
from .qp import IceQP, IceQuiver, check_loops_2cycles, fz_mutate, qp_from_diagram, reduce_qp


class LaurentError(ArithmeticError):
    """Raised when an exact division leaves the Laurent ring."""


class LaurentPoly:
    """Integer Laurent polynomial in a fixed ordered list of variables."""

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, variables: tuple[str, ...], terms: Mapping[tuple[int, ...], int] | None = None):
        self.vars = tuple(variables)
        acc: dict[tuple[int, ...], int] = defaultdict(int)
        for e, c in (terms or {}).items():
            acc[tuple(e)] += int(c)
        self.terms = dict(sorted((e, c) for e, c in acc.items() if c))
        self._hash = None

    @classmethod
    def var(cls, variables: tuple[str, ...], name: str) -> LaurentPoly:
        e = [0] * len(variables)
        e[variables.index(name)] = 1
        return cls(variables, {tuple(e): 1})

    @classmethod
    def const(cls, variables: tuple[str, ...], c: int) -> LaurentPoly:
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def monomial(cls, variables: tuple[str, ...], exps: Mapping[str, int], c: int = 1) -> LaurentPoly:
        e = [0] * len(variables)
        for v, k in exps.items():
            e[variables.index(v)] += k
        return cls(variables, {tuple(e): c})

    def _check(self, other: LaurentPoly) -> None:
        if self.vars != other.vars:
            raise ValueError("Laurent polynomials over different variables")

    def __add__(self, other: LaurentPoly) -> LaurentPoly:
        self._check(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0) + c
        return LaurentPoly(self.vars, t)

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: LaurentPoly) -> LaurentPoly:
        return self + (-other)

    def __mul__(self, other: LaurentPoly) -> LaurentPoly:
        self._check(other)
        t: dict[tuple[int, ...], int] = defaultdict(int)
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                t[tuple(a + b for a, b in zip(e1, e2))] += c1 * c2
        return LaurentPoly(self.vars, t)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LaurentPoly) and self.vars == other.vars and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.vars, tuple(self.terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def min_exponents(self) -> tuple[int, ...]:
        return tuple(min(e[i] for e in self.terms) for i in range(len(self.vars)))

    def to_sympy(self, shift: tuple[int, ...] | None = None):
        syms = sympy.symbols(self.vars)
        shift = shift or (0,) * len(self.vars)
        return sympy.Poly.from_dict({tuple(a + s for a, s in zip(e, shift)): c for e, c in self.terms.items()}, *syms)

    def exact_div(self, other: LaurentPoly) -> LaurentPoly:
        """self / other, required to be a Laurent polynomial."""
        self._check(other)
        if not other:
            raise ZeroDivisionError("division by the zero Laurent polynomial")
        if not self:
            return LaurentPoly(self.vars)
        # strip the monomial content of both sides; what remains of the divisor has no monomial factor
        sn, sd = self.min_exponents(), other.min_exponents()
        num = self.to_sympy(tuple(-x for x in sn))
        den = other.to_sympy(tuple(-x for x in sd))
        q, r = sympy.div(num, den)
        if not r.is_zero:
            raise LaurentError(f"{self} is not divisible by {other} in the Laurent ring")
        out = {}
        for e, c in q.as_dict().items():
            if not c.is_integer:
                raise LaurentError(f"{self} / {other} has a non-integer coefficient {c}")
            out[tuple(a + s - t for a, s, t in zip(e, sn, sd))] = int(c)
        return LaurentPoly(self.vars, out)

    def evaluate(self, values: Mapping[str, Fraction]) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            term = Fraction(c)
            for v, k in zip(self.vars, e):
                if k:
                    term *= Fraction(values[v]) ** k
            total += term
        return total

    def coefficients_nonnegative(self) -> bool:
        return all(c > 0 for c in self.terms.values())

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms.items():
            mono = "*".join(f"x{v}" if k == 1 else f"x{v}^{k}" for v, k in zip(self.vars, e) if k)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


@dataclass(frozen=True)
class Seed:
    quiver: IceQuiver
    cluster: tuple[tuple[str, LaurentPoly], ...]  # vertex -> variable, in vertex order
    labels: tuple[tuple[str, frozenset[int]], ...] = ()  # vertex -> k-label, when known

    def variable(self, v: str) -> LaurentPoly:
        return dict(self.cluster)[v]

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.cluster)

    def key(self) -> frozenset[LaurentPoly]:
        return frozenset(p for _, p in self.cluster)

    def mutable_variables(self) -> dict[str, LaurentPoly]:
        return {v: p for v, p in self.cluster if not self.quiver.is_frozen(v)}


def seed_from_qp(qp: IceQP, labels: Mapping[str, frozenset[int]] | None = None) -> Seed:
    vs = qp.quiver.vertex_ids
    cluster = tuple((v, LaurentPoly.var(vs, v)) for v in vs)
    lab = tuple((v, labels[v]) for v in vs) if labels else ()
    return Seed(qp.quiver, cluster, lab)


def seed_from_diagram(g: PlabicGraph) -> Seed:
    qp = reduce_qp(qp_from_diagram(g))
    names = face_names(g)
    labels = region_labels(g)
    by_name = {names[f]: labels[f] for f in names}
    return seed_from_qp(qp, by_name)


def exchange_monomials(seed: Seed, k: str) -> tuple[LaurentPoly, LaurentPoly]:
    """Products over arrows k -> y and over arrows y -> k (arrows between frozen vertices ignored)."""
    vs = seed.variables
    cl = dict(seed.cluster)
    out_p = LaurentPoly.const(vs, 1)
    in_p = LaurentPoly.const(vs, 1)
    for a in seed.quiver.arrows:
        if a.frozen:
            continue
        if a.tail == k:
            out_p = out_p * cl[a.head]
        if a.head == k:
            in_p = in_p * cl[a.tail]
    return out_p, in_p


def mutate_seed(seed: Seed, k: str) -> Seed:
    q = seed.quiver
    if q.is_frozen(k):
        raise ValueError(f"vertex {k} is frozen")
    rep = check_loops_2cycles(q)
    if any(k in (q.arrow(a).tail, q.arrow(a).head) for pair in rep.two_cycles for a in pair):
        raise ValueError(f"2-cycle at {k}")
    out_p, in_p = exchange_monomials(seed, k)
    new = (out_p + in_p).exact_div(seed.variable(k))
    cluster = tuple((v, new if v == k else p) for v, p in seed.cluster)
    return Seed(fz_mutate(q, k), cluster, ())


def verify_exchange_relation(phi_x: LaurentPoly, phi_y: LaurentPoly, phi_plus: LaurentPoly, phi_minus: LaurentPoly) -> bool:
    return phi_x * phi_y == phi_plus + phi_minus


@dataclass
class ExchangeGraph:
    seeds: list[Seed]
    edges: list[tuple[int, int, str]]  # (seed, seed, vertex mutated)
    complete: bool
    words: list[tuple[str, ...]] = field(default_factory=list)  # a mutation word reaching each seed

    def mutable_variables(self) -> set[LaurentPoly]:
        out = set()
        for s in self.seeds:
            out |= set(s.mutable_variables().values())
        return out


def exchange_graph(seed: Seed, max_seeds: int = 1000) -> ExchangeGraph:
    seeds = [seed]
    words: list[tuple[str, ...]] = [()]
    index = {seed.key(): 0}
    edges = []
    queue = deque([0])
    complete = True
    while queue:
        i = queue.popleft()
        s = seeds[i]
        for k in s.quiver.mutable_vertices:
            t = mutate_seed(s, k)
            j = index.get(t.key())
            if j is None:
                if len(seeds) >= max_seeds:
                    complete = False
                    continue
                j = len(seeds)
                index[t.key()] = j
                seeds.append(t)
                words.append(words[i] + (k,))
                queue.append(j)
            if i <= j and (min(i, j), max(i, j), k) not in edges:
                edges.append((i, j, k))
    return ExchangeGraph(seeds, edges, complete, words)


def to_dot(eg: ExchangeGraph) -> str:
    lines = ["graph exchange {"]
    for i, s in enumerate(eg.seeds):
        label = ", ".join(f"{v}: {p}" for v, p in s.mutable_variables().items())
        lines.append(f'  s{i} [label="{label}"];')
    for i, j, k in eg.edges:
        lines.append(f'  s{i} -- s{j} [label="{k}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- K-theory and characters -----------------------------------------------------

K0Vector = dict[str, int]


def simple_k0_class(qp: IceQP, v: str) -> K0Vector:
    """[S_v] in the basis of indecomposable projectives, read off res(A) ⊗ S_v."""
    q = qp.quiver
    c: dict[str, int] = defaultdict(int)
    c[v] += 1
    for b in q.out_arrows(v):
        c[b.head] -= 1
    for a in q.in_arrows(v):
        if not a.frozen:
            c[a.tail] += 1
    if not q.is_frozen(v):
        c[v] -= 1
    return {u: x for u, x in c.items() if x}


def k0_matrix(qp: IceQP) -> list[list[int]]:
    vs = qp.quiver.vertex_ids
    rows = []
    for v in vs:
        cls = simple_k0_class(qp, v)
        rows.append([cls.get(u, 0) for u in vs])
    return rows


def euler_pairing(complex_j: GradedComplex, i: str) -> int:
    """<[P_i], [S_j]> = sum over weight slices at head i of the alternating dimension count of res(A) ⊗ S_j."""
    chi = euler_characteristic(complex_j, include_simple=False)
    return sum(x for (head, _), x in chi.items() if head == i)


def euler_pairing_matrix(qp: IceQP, trunc: Truncation, d: int | None = None) -> list[list[int]]:
    vs = qp.quiver.vertex_ids
    rows = []
    for j in vs:
        c = build_vertex_complex(qp, trunc, j, d)
        rows.append([euler_pairing(c, i) for i in vs])
    return rows


def is_unimodular(matrix: list[list[int]]) -> bool:
    return abs(sympy.Matrix(matrix).det()) == 1


@dataclass(frozen=True)
class ThinModule:
    support: frozenset[str]
    arrows: frozenset[str]  # arrows acting by 1; all others act by 0


def parse_module(text: str) -> ThinModule:
    """Parse `support=v1,v2;arrows=a1,a2`."""
    parts = dict(p.split("=", 1) for p in text.split(";") if p.strip())
    sup = frozenset(x for x in parts.get("support", "").split(",") if x)
    arr = frozenset(x for x in parts.get("arrows", "").split(",") if x)
    return ThinModule(sup, arr)


def check_thin_module(qp: IceQP, m: ThinModule) -> list[str]:
    """Problems with m as a representation satisfying the relations (empty if none)."""
    q = qp.quiver
    problems = []
    for aid in m.arrows:
        a = q.arrow(aid)
        if a.tail not in m.support or a.head not in m.support:
            problems.append(f"arrow {aid} leaves the support")
    for aid, rel in qp.relations().items():
        value: dict[tuple[str, str], Fraction] = defaultdict(Fraction)
        for path, c in rel.terms.items():
            if all(x in m.arrows for x in path):
                a0, a1 = q.arrow(path[0]), q.arrow(path[-1])
                value[(a0.tail, a1.head)] += c
        for ends, val in value.items():
            if val:
                problems.append(f"relation at {aid} does not vanish")
    return problems


def successor_closed_subsets(qp: IceQP, m: ThinModule) -> list[frozenset[str]]:
    q = qp.quiver
    succ: dict[str, set[str]] = defaultdict(set)
    for aid in m.arrows:
        a = q.arrow(aid)
        succ[a.tail].add(a.head)
    sup = sorted(m.support)
    out = []
    for mask in range(1 << len(sup)):
        s = frozenset(x for i, x in enumerate(sup) if mask >> i & 1)
        if all(y in s for x in s for y in succ[x]):
            out.append(s)
    return out


def cluster_character_thin(qp: IceQP, index: Mapping[str, int], m: ThinModule,
                           variables: tuple[str, ...] | None = None) -> LaurentPoly:
    problems = check_thin_module(qp, m)
    if problems:
        raise ValueError("; ".join(problems))
    vs = variables or qp.quiver.vertex_ids
    classes = {v: simple_k0_class(qp, v) for v in m.support}
    total = LaurentPoly(vs)
    for s in successor_closed_subsets(qp, m):
        exps = defaultdict(int, index)
        for v in s:
            for u, c in classes[v].items():
                exps[u] -= c
        total = total + LaurentPoly.monomial(vs, exps)
    return total


def parse_index(text: str) -> dict[str, int]:
    """Parse `P12+P45-P25` or `12:1,45:1,25:-1`."""
    out: dict[str, int] = defaultdict(int)
    text = text.replace(" ", "")
    if ":" in text:
        for part in text.split(","):
            v, c = part.split(":")
            out[v] += int(c)
        return dict(out)
    sign, cur = 1, ""
    tokens = []
    for ch in text:
        if ch in "+-":
            if cur:
                tokens.append((sign, cur))
            sign, cur = (1 if ch == "+" else -1), ""
        else:
            cur += ch
    if cur:
        tokens.append((sign, cur))
    for s, tok in tokens:
        coef = 1
        if "P" in tok:
            head, _, v = tok.partition("P")
            coef = int(head) if head else 1
        else:
            v = tok
        out[v] += s * coef
    return {v: c for v, c in out.items() if c}
