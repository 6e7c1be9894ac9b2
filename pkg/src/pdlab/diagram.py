"""Plabic graphs: parsing, faces, zig-zag strands, axioms and region labels.

A plabic graph is stored combinatorially. Every incidence is a *link*:

* ``("e", i)`` is the i-th internal edge,
* ``("l", m)`` is the leg to marked point m,
* ``("a", m)`` is the boundary arc from marked point m to m+1.

Marked points appear as vertices ``("B", m)``; nodes are plain strings.
Marked points are numbered clockwise around the disc.
"""

from __future__ import annotations

import re
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

Link = tuple[str, int]
Vertex = object  # node id (str) or ("B", m)
Dart = tuple[object, Link]  # (vertex the dart leaves, link)

BLACK, WHITE = "b", "w"


class DiagramError(ValueError):
    """Raised on malformed or inconsistent plabic data."""


def bvertex(m: int) -> tuple[str, int]:
    return ("B", m)


def is_boundary(v: object) -> bool:
    return isinstance(v, tuple)


@dataclass(frozen=True)
class Strand:
    """A zig-zag path from a marked point to a marked point.

    ``trace`` lists the links traversed as ``(link, from_vertex)`` pairs; the
    first and last entries are legs.  ``corners`` lists, for each internal node
    passed, ``(node, face, side)`` where side is ``"L"`` or ``"R"`` for the side
    of the strand on which the face lies.
    """

    source: int
    target: int
    trace: tuple[tuple[Link, object], ...]
    corners: tuple[tuple[str, int, str], ...]


@dataclass(frozen=True)
class DiagramType:
    k: int
    n: int


@dataclass
class DiagnosisReport:
    axioms: dict[str, bool]
    witnesses: dict[str, list]
    connected: bool
    readings_agree: bool = True

    @property
    def ok(self) -> bool:
        return all(self.axioms.values())


@dataclass(frozen=True, eq=False)
class PlabicGraph:
    n: int
    colors: dict[str, str]
    edges: tuple[tuple[str, str], ...]
    legs: dict[int, str]
    rotation: dict[str, tuple[Link, ...]]
    node_order: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        if not self.node_order:
            object.__setattr__(self, "node_order", tuple(self.colors))
        self._check()

    # -- structure -------------------------------------------------------
    def _check(self) -> None:
        if self.n < 1:
            raise DiagramError("n must be positive")
        for i, (u, v) in enumerate(self.edges):
            for x in (u, v):
                if x not in self.colors:
                    raise DiagramError(f"edge {u} {v}: unknown node {x}")
            if self.colors[u] == self.colors[v]:
                raise DiagramError(f"edge {u} {v} joins two nodes of the same colour")
        if sorted(self.legs) != list(range(1, self.n + 1)):
            missing = sorted(set(range(1, self.n + 1)) - set(self.legs))
            raise DiagramError(f"marked points without a leg: {missing}")
        expected: dict[str, list[Link]] = defaultdict(list)
        for i, (u, v) in enumerate(self.edges):
            expected[u].append(("e", i))
            expected[v].append(("e", i))
        for m, x in self.legs.items():
            if x not in self.colors:
                raise DiagramError(f"leg {m}: unknown node {x}")
            expected[x].append(("l", m))
        for x in self.colors:
            rot = self.rotation.get(x)
            if rot is None:
                raise DiagramError(f"node {x} has no rotation")
            if sorted(rot) != sorted(expected[x]):
                raise DiagramError(f"rotation list of {x} inconsistent with edge list")
        euler = len(self.colors) + self.n - (len(self.edges) + 2 * self.n) + len(self.faces)
        if euler != 1 or len(self.components) != 1:
            raise DiagramError("nonplanar rotation system (Euler check fails)")

    def endpoints(self, link: Link) -> tuple[object, object]:
        kind, i = link
        if kind == "e":
            return self.edges[i]
        if kind == "l":
            return (self.legs[i], bvertex(i))
        return (bvertex(i), bvertex(i % self.n + 1))

    def other(self, v: object, link: Link) -> object:
        a, b = self.endpoints(link)
        return b if a == v else a

    def rot(self, v: object) -> tuple[Link, ...]:
        if is_boundary(v):
            m = v[1]
            prev = (m - 2) % self.n + 1
            return (("l", m), ("a", m), ("a", prev))
        return self.rotation[v]

    def ccw_next(self, v: object, link: Link) -> Link:
        r = self.rot(v)
        return r[(r.index(link) + 1) % len(r)]

    def ccw_prev(self, v: object, link: Link) -> Link:
        r = self.rot(v)
        return r[(r.index(link) - 1) % len(r)]

    def degree(self, v: str) -> int:
        return len(self.rotation[v])

    @property
    def nodes(self) -> tuple[str, ...]:
        return self.node_order

    def links(self) -> list[Link]:
        return [("e", i) for i in range(len(self.edges))] + [("l", m) for m in sorted(self.legs)]

    # -- faces -----------------------------------------------------------
    @cached_property
    def _face_data(self) -> tuple[dict[Dart, int], list[list[Dart]]]:
        darts: list[Dart] = []
        for v in list(self.colors) + [bvertex(m) for m in range(1, self.n + 1)]:
            for link in self.rot(v):
                darts.append((v, link))
        face_of: dict[Dart, int] = {}
        cycles: list[list[Dart]] = []
        for d in darts:
            if d in face_of:
                continue
            cyc: list[Dart] = []
            cur = d
            while cur not in face_of:
                face_of[cur] = -1
                cyc.append(cur)
                v, link = cur
                w = self.other(v, link)
                cur = (w, self.ccw_prev(w, link))
            if cur != d:
                raise DiagramError("inconsistent rotation system")
            cycles.append(cyc)
        outer = [i for i, c in enumerate(cycles) if all(l[0] == "a" for _, l in c)]
        # the outer face is traced by arcs alone
        interior = [c for i, c in enumerate(cycles) if i not in outer[:1]]
        face_of = {}
        for fid, cyc in enumerate(interior):
            for d in cyc:
                face_of[d] = fid
        for d in cycles[outer[0]] if outer else []:
            face_of[d] = -1
        return face_of, interior

    @property
    def faces(self) -> list[list[Dart]]:
        """Interior faces, each as its cycle of darts (face on the left)."""
        return self._face_data[1]

    def face_left(self, dart: Dart) -> int:
        return self._face_data[0][dart]

    def face_right(self, dart: Dart) -> int:
        v, link = dart
        return self._face_data[0][(self.other(v, link), link)]

    @cached_property
    def boundary_faces(self) -> dict[int, int]:
        """Map from marked point m to the face between m and m+1."""
        out = {}
        for m in range(1, self.n + 1):
            out[m] = self.face_left((bvertex(m % self.n + 1), ("a", m)))
        return out

    def is_boundary_face(self, f: int) -> bool:
        return f in set(self.boundary_faces.values())

    @cached_property
    def components(self) -> list[set]:
        adj: dict[object, set] = defaultdict(set)
        verts = list(self.colors) + [bvertex(m) for m in range(1, self.n + 1)]
        for v in verts:
            for link in self.rot(v):
                adj[v].add(self.other(v, link))
        return _components(verts, adj)

    def is_connected(self) -> bool:
        """Connectedness of the node graph (legs and boundary removed)."""
        adj: dict[object, set] = defaultdict(set)
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return len(_components(list(self.colors), adj)) <= 1

    def face_nodes(self, f: int) -> list[object]:
        return [v for v, _ in self.faces[f]]

    def face_links(self, f: int) -> list[Link]:
        return [l for _, l in self.faces[f]]


def _components(verts: list, adj: dict) -> list[set]:
    seen: set = set()
    comps = []
    for s in verts:
        if s in seen:
            continue
        comp = {s}
        queue = deque([s])
        seen.add(s)
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    comp.add(y)
                    queue.append(y)
        comps.append(comp)
    return comps


# -- parsing and serialization -------------------------------------------

_TOKEN = re.compile(r"^[A-Za-z0-9_]+$")


def parse_plabic(text: str) -> PlabicGraph:
    lines = []
    for raw in text.splitlines():
        line = _strip_comment(raw)
        if line:
            lines.append(line)
    if not lines or lines[0].split() != ["plabic", "v1"]:
        raise DiagramError("line 1: expected 'plabic v1'")
    n = None
    colors: dict[str, str] = {}
    edges: list[tuple[str, str]] = []
    legs: dict[int, str] = {}
    rot_raw: dict[str, list[str]] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        head, _, rest = line.partition(" ")
        parts = rest.split()
        if head == "n" and len(parts) == 1 and parts[0].isdigit():
            n = int(parts[0])
        elif head == "node" and len(parts) == 2 and parts[1] in (BLACK, WHITE):
            if not _TOKEN.match(parts[0]) or parts[0] in colors:
                raise DiagramError(f"malformed line: {line!r}")
            colors[parts[0]] = parts[1]
        elif head == "edge" and len(parts) == 2:
            edges.append((parts[0], parts[1]))
        elif head == "leg" and len(parts) == 2 and parts[0].isdigit():
            m = int(parts[0])
            if m in legs:
                raise DiagramError(f"duplicate leg at marked point {m}")
            legs[m] = parts[1]
        elif head == "rot":
            node, colon, ends = rest.partition(":")
            if not colon:
                raise DiagramError(f"malformed line: {line!r}")
            rot_raw[node.strip()] = ends.split()
        else:
            raise DiagramError(f"malformed line: {line!r}")
    if n is None:
        raise DiagramError("missing 'n' line")
    if any(m < 1 or m > n for m in legs):
        raise DiagramError("leg index out of range")
    rotation: dict[str, tuple[Link, ...]] = {}
    for node, ends in rot_raw.items():
        if node not in colors:
            raise DiagramError(f"rot for unknown node {node}")
        rotation[node] = tuple(_resolve_end(node, e, edges) for e in ends)
    return PlabicGraph(n, colors, tuple(edges), legs, rotation)


def _strip_comment(raw: str) -> str:
    # '#' directly after a token is a multi-edge suffix, otherwise a comment
    return re.sub(r"(^|\s)#.*$", "", raw).strip()


def _resolve_end(node: str, end: str, edges: list[tuple[str, str]]) -> Link:
    if re.fullmatch(r"B\d+", end):
        return ("l", int(end[1:]))
    name, _, j = end.partition("#")
    idx = [i for i, e in enumerate(edges) if set(e) == {node, name} and node != name]
    pick = int(j) if j else 1
    if pick < 1 or pick > len(idx):
        raise DiagramError(f"rotation of {node}: no edge to {end}")
    return ("e", idx[pick - 1])


def serialize_plabic(g: PlabicGraph) -> str:
    out = ["plabic v1", f"n {g.n}"]
    out += [f"node {x} {g.colors[x]}" for x in g.nodes]
    out += [f"edge {u} {v}" for u, v in g.edges]
    out += [f"leg {m} {g.legs[m]}" for m in sorted(g.legs)]
    for x in g.nodes:
        out.append(f"rot {x}: " + " ".join(_end_name(g, x, l) for l in g.rotation[x]))
    return "\n".join(out) + "\n"


def _end_name(g: PlabicGraph, x: str, link: Link) -> str:
    kind, i = link
    if kind == "l":
        return f"B{i}"
    y = g.other(x, link)
    parallel = [j for j, e in enumerate(g.edges) if set(e) == {x, y}]
    if len(parallel) == 1:
        return y
    return f"{y}#{parallel.index(i) + 1}"


# -- strands --------------------------------------------------------------


def _exit(g: PlabicGraph, v: str, link_in: Link) -> Link:
    # black: next end clockwise; white: next end counterclockwise
    if g.colors[v] == BLACK:
        return g.ccw_prev(v, link_in)
    return g.ccw_next(v, link_in)


def _corner_face(g: PlabicGraph, v: str, link_in: Link, link_out: Link) -> tuple[int, str]:
    # strands keep black nodes on their right and white nodes on their left
    if g.colors[v] == BLACK:
        return g.face_left((v, link_out)), "L"
    return g.face_left((v, link_in)), "R"


def zigzag_strands(g: PlabicGraph) -> list[Strand]:
    strands = []
    limit = 2 * (len(g.edges) + g.n) + 2
    for m in range(1, g.n + 1):
        link = ("l", m)
        trace = [(link, bvertex(m))]
        corners = []
        v = g.legs[m]
        for _ in range(limit):
            out = _exit(g, v, link)
            face, side = _corner_face(g, v, link, out)
            corners.append((v, face, side))
            trace.append((out, v))
            if out[0] == "l":
                strands.append(Strand(m, out[1], tuple(trace), tuple(corners)))
                break
            link = out
            v = g.other(v, out)
        else:
            raise DiagramError(f"strand from {m} does not terminate")
    return strands


def closed_strands(g: PlabicGraph) -> list[list[tuple[Link, object]]]:
    """Zig-zag cycles that never reach the boundary."""
    used = set()
    for s in zigzag_strands(g):
        used.update(s.trace)
    loops = []
    for i, (a, b) in enumerate(g.edges):
        for start in (a, b):
            d = (("e", i), start)
            if d in used:
                continue
            loop = []
            cur = d
            while cur not in used:
                used.add(cur)
                loop.append(cur)
                link, frm = cur
                v = g.other(frm, link)
                cur = (_exit(g, v, link), v)
            loops.append(loop)
    return loops


def strand_permutation(g: PlabicGraph) -> dict[int, int]:
    return {s.source: s.target for s in zigzag_strands(g)}


# -- axioms -----------------------------------------------------------------


def _crossings(g: PlabicGraph, s: Strand, with_legs: bool) -> list[tuple[Link, int]]:
    """Crossings along s as (link, sign); sign is +1 when the crossing strand passes left to right."""
    out = []
    for idx, (link, frm) in enumerate(s.trace):
        if link[0] == "l" and not with_legs:
            continue
        to = g.other(frm, link)
        if is_boundary(to):
            sign = 1 if g.colors[frm] == WHITE else -1
        else:
            sign = 1 if g.colors[to] == BLACK else -1
        out.append((link, sign))
    return out


def validate_axioms(g: PlabicGraph) -> DiagnosisReport:
    strands = zigzag_strands(g)
    witnesses: dict[str, list] = {k: [] for k in ("P0", "P1", "P2", "P3", "P4")}
    sources = sorted(s.source for s in strands)
    targets = sorted(s.target for s in strands)
    full = list(range(1, g.n + 1))
    if sources != full or targets != full:
        witnesses["P0"].append({"sources": sources, "targets": targets})
    loops = closed_strands(g)
    if loops:
        witnesses["P3"].append({"closed_strands": len(loops)})
    verdicts = []
    for with_legs in (True, False):
        p2, p4 = _check_p2_p4(g, strands, with_legs)
        verdicts.append((p2, p4))
    (p2, p4), (p2b, p4b) = verdicts
    witnesses["P2"] += p2
    witnesses["P4"] += p4
    for s in strands:
        links = [l for l, _ in s.trace]
        dup = {l for l in links if links.count(l) > 1}
        if dup:
            witnesses["P3"].append({"strand": s.source, "links": sorted(dup)})
    axioms = {k: not w for k, w in witnesses.items()}
    agree = (not p2) == (not p2b) and (not p4) == (not p4b)
    return DiagnosisReport(axioms, witnesses, g.is_connected(), agree)


def _check_p2_p4(g: PlabicGraph, strands: list[Strand], with_legs: bool) -> tuple[list, list]:
    p2, p4 = [], []
    pos: dict[int, dict[Link, int]] = {}
    for s in strands:
        cr = _crossings(g, s, with_legs)
        for (l1, s1), (l2, s2) in zip(cr, cr[1:]):
            if s1 == s2:
                p2.append({"strand": s.source, "links": (l1, l2)})
        pos[s.source] = {l: i for i, (l, _) in enumerate(cr)}
    for a in strands:
        for b in strands:
            if a.source >= b.source:
                continue
            shared = sorted(set(pos[a.source]) & set(pos[b.source]), key=lambda l: pos[a.source][l])
            for i in range(len(shared)):
                for j in range(i + 1, len(shared)):
                    x, y = shared[i], shared[j]
                    if pos[b.source][x] < pos[b.source][y]:
                        p4.append({"strands": (a.source, b.source), "crossings": (x, y)})
    return p2, p4


# -- labels ---------------------------------------------------------------


def left_sets(g: PlabicGraph) -> dict[int, frozenset[int]]:
    """For each strand source, the set of faces lying on its left."""
    strands = zigzag_strands(g)
    corners: list[tuple[str, int, int]] = []  # (node, face, strand)
    for s in strands:
        for node, face, _ in s.corners:
            corners.append((node, face, s.source))
    for loop in closed_strands(g):
        for link, frm in loop:
            v = g.other(frm, link)
            out = _exit(g, v, link)
            face, _ = _corner_face(g, v, link, out)
            corners.append((v, face, 0))
    result = {}
    for s in strands:
        adj: dict[object, set] = defaultdict(set)
        for node, face, sid in corners:
            if sid != s.source:
                adj[("n", node)].add(("f", face))
                adj[("f", face)].add(("n", node))
        node0, face0, side0 = s.corners[0]
        start = ("f", face0) if side0 == "L" else ("n", node0)
        seen = {start}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        for node, face, side in s.corners:
            here = ("f", face) if side == "L" else ("n", node)
            there = ("n", node) if side == "L" else ("f", face)
            if here not in seen or there in seen:
                raise DiagramError(f"strand {s.source} does not separate the disc")
        result[s.source] = frozenset(f for kind, f in seen if kind == "f")
    return result


def region_labels(g: PlabicGraph) -> dict[int, frozenset[int]]:
    lefts = left_sets(g)
    return {f: frozenset(i for i, fs in lefts.items() if f in fs) for f in range(len(g.faces))}


def diagram_type(g: PlabicGraph) -> DiagramType:
    sizes = {len(lab) for lab in region_labels(g).values()}
    if len(sizes) != 1:
        raise DiagramError(f"inconsistent left-counts {sorted(sizes)}")
    return DiagramType(sizes.pop(), g.n)


def label_str(label: Iterable[int], n: int) -> str:
    items = sorted(label)
    if n <= 9:
        return "".join(str(i) for i in items) or "0"
    return ",".join(str(i) for i in items) or "0"


def parse_label(text: str, n: int) -> frozenset[int]:
    if "," in text or n > 9:
        return frozenset(int(t) for t in text.split(",") if t)
    return frozenset(int(c) for c in text)


def face_names(g: PlabicGraph) -> dict[int, str]:
    """Quiver vertex ids: k-labels, disambiguated if two faces share one."""
    labels = region_labels(g)
    names: dict[int, str] = {}
    seen: dict[str, int] = defaultdict(int)
    for f in range(len(g.faces)):
        base = label_str(labels[f], g.n)
        seen[base] += 1
        names[f] = base if seen[base] == 1 else f"{base}~{seen[base]}"
    return names


# -- square move ------------------------------------------------------------


def square_move(g: PlabicGraph, face: int) -> PlabicGraph:
    """Square move at an internal quadrilateral face.

    Corners of degree above three are first split off, then all four corner
    colours are swapped and corners are merged into same-coloured neighbours.
    """
    if g.is_boundary_face(face):
        raise DiagramError("square move needs an internal face")
    cyc = g.faces[face]
    if len(cyc) != 4:
        raise DiagramError(f"face has {len(cyc)} sides, not 4")
    corners = [v for v, _ in cyc]
    if len(set(corners)) != 4 or any(is_boundary(v) for v in corners):
        raise DiagramError("face corners are not four distinct nodes")
    colors = dict(g.colors)
    edges: list = [list(e) for e in g.edges]
    rotation = {x: list(r) for x, r in g.rotation.items()}
    legs = dict(g.legs)
    order = list(g.node_order)

    def fresh(base: str) -> str:
        i = 1
        while f"{base}s{i}" in colors:
            i += 1
        return f"{base}s{i}"

    pending = []
    for v, link_out in cyc:
        # the face corner at v lies between link_out and its ccw successor
        link_in = g.ccw_next(v, link_out)
        deg = g.degree(v)
        if deg < 3:
            raise DiagramError(f"corner {v} has degree {deg}")
        flipped = WHITE if colors[v] == BLACK else BLACK
        if deg == 3:
            colors[v] = flipped
            ext = [l for l in g.rotation[v] if l not in (link_out, link_in)][0]
            if ext[0] == "e":
                pending.append((v, ext))
            continue
        z = fresh(v)
        colors[z] = flipped
        order.append(z)
        new = ("e", len(edges))
        edges.append([z, v])
        for li in (link_out, link_in):
            edges[li[1]] = [z if x == v else x for x in edges[li[1]]]
        r = rotation[v]
        i = r.index(link_out)
        r = r[i:] + r[:i]
        rotation[v] = [new] + r[2:]
        rotation[z] = [link_out, link_in, new]
    for v, ext in pending:
        x = [y for y in edges[ext[1]] if y != v][0]
        if colors[x] != colors[v]:
            continue
        _merge_into(x, v, ext, edges, rotation, legs)
        del rotation[v]
        del colors[v]
        order.remove(v)
    return _compact(g.n, colors, edges, legs, rotation, order)


def normalize(g: PlabicGraph) -> PlabicGraph:
    """Remove bivalent nodes and merge adjacent nodes of equal colour.

    Both operations preserve the strands, so the result is the canonical
    representative of g up to these moves.
    """
    colors = dict(g.colors)
    edges: list = [list(e) for e in g.edges]
    rotation = {x: list(r) for x, r in g.rotation.items()}
    legs = dict(g.legs)
    order = list(g.node_order)

    def drop(v):
        del colors[v]
        del rotation[v]
        order.remove(v)

    changed = True
    while changed:
        changed = False
        for v in list(order):
            r = rotation[v]
            if len(r) != 2 or all(l[0] == "l" for l in r):
                continue
            keep, gone = (r[0], r[1]) if r[1][0] == "e" else (r[1], r[0])
            y = [u for u in edges[gone[1]] if u != v][0]
            if keep[0] == "e":
                x = [u for u in edges[keep[1]] if u != v][0]
                if x == y:
                    continue
                edges[keep[1]] = [x, y]
            else:
                legs[keep[1]] = y
            rotation[y] = [keep if l == gone else l for l in rotation[y]]
            edges[gone[1]] = None
            drop(v)
            changed = True
            break
        if changed:
            continue
        for i, e in enumerate(edges):
            if e is None:
                continue
            x, v = e
            parallel = [j for j, f in enumerate(edges) if f is not None and set(f) == {x, v}]
            if x == v or colors[x] != colors[v] or len(parallel) > 1:
                continue
            _merge_into(x, v, ("e", i), edges, rotation, legs)
            drop(v)
            changed = True
            break
    return _compact(g.n, colors, edges, legs, rotation, order)


def _merge_into(x, v, ext, edges, rotation, legs) -> None:
    rv = rotation[v]
    k = rv.index(ext)
    around = rv[k + 1:] + rv[:k]
    rx = rotation[x]
    p = rx.index(ext)
    rotation[x] = rx[:p] + around + rx[p + 1:]
    for l in around:
        if l[0] == "e":
            edges[l[1]] = [x if y == v else y for y in edges[l[1]]]
        else:
            legs[l[1]] = x
    edges[ext[1]] = None


def _compact(n, colors, edges, legs, rotation, order) -> PlabicGraph:
    remap = {}
    new_edges = []
    for i, e in enumerate(edges):
        if e is not None:
            remap[i] = len(new_edges)
            new_edges.append(tuple(e))
    rot = {}
    for x, r in rotation.items():
        rot[x] = tuple(("e", remap[l[1]]) if l[0] == "e" else l for l in r)
    return PlabicGraph(n, colors, tuple(new_edges), legs, rot, tuple(order))


def isomorphic(g: PlabicGraph, h: PlabicGraph, up_to_moves: bool = False) -> bool:
    """Isomorphism of embedded plabic graphs fixing the marked points.

    With up_to_moves, both graphs are first normalized.
    """
    if up_to_moves:
        g, h = normalize(g), normalize(h)
    if g.n != h.n or len(g.colors) != len(h.colors) or len(g.edges) != len(h.edges):
        return False
    # marked points pin the embedding; propagate along rotations
    phi: dict[str, str] = {}
    queue = deque()
    for m in range(1, g.n + 1):
        queue.append((g.legs[m], ("l", m), h.legs[m], ("l", m)))
    while queue:
        x, lx, y, ly = queue.popleft()
        if x in phi:
            if phi[x] != y:
                return False
            continue
        if g.colors[x] != h.colors[y] or g.degree(x) != h.degree(y):
            return False
        phi[x] = y
        rx, ry = list(g.rotation[x]), list(h.rotation[y])
        i, j = rx.index(lx), ry.index(ly)
        rx, ry = rx[i:] + rx[:i], ry[j:] + ry[:j]
        for a, b in zip(rx, ry):
            if (a[0] == "l") != (b[0] == "l") or (a[0] == "l" and a != b):
                return False
            if a[0] == "e":
                queue.append((g.other(x, a), a, h.other(y, b), b))
    return len(phi) == len(g.colors) and len(set(phi.values())) == len(phi)
