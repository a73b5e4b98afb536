"""Zero-divisor graphs and their compression by annihilator classes.

Two build paths exist.  The fast path row-reduces the multiplication
matrix of every element in one batched elimination; elements whose
matrices have the same row space have the same kernel, i.e. the same
annihilator.  The oracle path never touches linear algebra: it multiplies
every pair of elements and compares the resulting zero sets.
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from . import gflin
from .algebra import Element, FiniteAlgebra, annihilator, max_elements
from .errors import ResourceBoundExceeded, StructuralImpossibility

ORACLE_MAX_ELEMS = 3**5 * 3
GAMMA_MAX_ELEMS = 2**12
NAIVE_CLIQUE_MAX = 20
_CHUNK = 1 << 14


class Build(str, enum.Enum):
    FAST = "FAST"
    ORACLE = "ORACLE"


@dataclass(frozen=True)
class Vertex:
    representative: tuple[int, ...]
    label: str
    ann_key: bytes
    class_size: int


@dataclass(frozen=True, eq=False)
class CompressedGraph:
    """Vertices are annihilator classes ``[a]``; ``[a] -- [b]`` iff ``ab = 0``.

    ``ring`` is None for graphs loaded back from JSON.
    """

    vertices: tuple[Vertex, ...]
    adjacency: np.ndarray
    ring_info: dict
    ring: FiniteAlgebra | None = field(default=None, repr=False)
    build: Build = Build.FAST
    compressed: bool = True

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(np.triu(self.adjacency, 1)))]

    @property
    def edge_count(self) -> int:
        return int(np.triu(self.adjacency, 1).sum())

    def neighbor_masks(self) -> list[int]:
        masks = []
        for row in self.adjacency:
            m = 0
            for j in np.nonzero(row)[0]:
                m |= 1 << int(j)
            masks.append(m)
        return masks

    def index_of_key(self, key: bytes) -> int:
        for i, v in enumerate(self.vertices):
            if v.ann_key == key:
                return i
        raise KeyError("no vertex with this annihilator")


def ring_info(ring: FiniteAlgebra, name: str | None = None) -> dict:
    info = {"p": ring.p, "dim": ring.dim, "labels": list(ring.labels)}
    if name is not None:
        info["name"] = name
    return info


def _adjacency(ring: FiniteAlgebra, reps: np.ndarray) -> np.ndarray:
    if len(reps) == 0:
        return np.zeros((0, 0), dtype=bool)
    prods = np.einsum("ai,bj,ijk->abk", reps, reps, ring.table, optimize=True) % ring.p
    adj = ~prods.any(axis=2)
    np.fill_diagonal(adj, False)
    return adj


def zero_divisor_classes(ring: FiniteAlgebra) -> list[Vertex]:
    """Annihilator classes of the nonzero zero-divisors, sorted by annihilator key.

    Each class is represented by its first element in coordinate-lexicographic
    order.
    """
    if ring.size > max_elements():
        raise ResourceBoundExceeded(f"|R| = {ring.p}^{ring.dim} exceeds the enumeration bound {max_elements()}")
    elems = ring.all_elements()
    d = ring.dim
    keys = np.empty((len(elems), d * d), dtype=np.uint8)
    zd = np.empty(len(elems), dtype=bool)
    for start in range(0, len(elems), _CHUNK):
        chunk = elems[start : start + _CHUNK]
        red, ranks = gflin.batch_rref(ring.mult_matrices(chunk), ring.p)
        keys[start : start + len(chunk)] = red.reshape(len(chunk), -1)
        zd[start : start + len(chunk)] = ranks < d
    zd[0] = False  # the zero element
    idx = np.nonzero(zd)[0]
    if idx.size == 0:
        return []
    _, first, counts = np.unique(keys[idx], axis=0, return_index=True, return_counts=True)
    vertices = []
    for f, c in zip(first, counts):
        rep = elems[idx[f]]
        ann = annihilator(Element(ring, rep))
        vertices.append(Vertex(tuple(int(x) for x in rep), ring.format_vector(rep), ann.key(), int(c)))
    vertices.sort(key=lambda v: v.ann_key)
    return vertices


def build_gamma_e(ring: FiniteAlgebra, name: str | None = None) -> CompressedGraph:
    vertices = zero_divisor_classes(ring)
    reps = np.array([v.representative for v in vertices], dtype=np.int64).reshape(-1, ring.dim)
    return CompressedGraph(tuple(vertices), _adjacency(ring, reps), ring_info(ring, name), ring, Build.FAST)


def class_of(graph: CompressedGraph, a: Element) -> int:
    """Index of the vertex ``[a]`` in ``graph``."""
    return graph.index_of_key(annihilator(a).key())


def build_gamma(ring: FiniteAlgebra, name: str | None = None) -> CompressedGraph:
    """The uncompressed graph on all nonzero zero-divisors (small rings only)."""
    if ring.size > GAMMA_MAX_ELEMS:
        raise ResourceBoundExceeded(f"uncompressed graph limited to |R| <= {GAMMA_MAX_ELEMS}")
    elems = ring.all_elements()
    _, ranks = gflin.batch_rref(ring.mult_matrices(elems), ring.p)
    zd = ranks < ring.dim
    zd[0] = False
    vertices = []
    reps = elems[zd]
    for rep in reps:
        ann = annihilator(Element(ring, rep))
        vertices.append(Vertex(tuple(int(x) for x in rep), ring.format_vector(rep), ann.key(), 1))
    return CompressedGraph(tuple(vertices), _adjacency(ring, reps), ring_info(ring, name), ring, Build.FAST, False)


def oracle_gamma_e(ring: FiniteAlgebra, name: str | None = None) -> CompressedGraph:
    """Element-scan construction: annihilators as sets of elements, no kernels.

    Annihilator keys here are digests of the element sets, so they are only
    comparable with other oracle graphs; compare against the fast path with
    :func:`same_graph`.
    """
    if ring.size > ORACLE_MAX_ELEMS:
        raise ResourceBoundExceeded(f"oracle path limited to |R| <= {ORACLE_MAX_ELEMS}")
    elems = gflin.all_vectors(ring.p, ring.dim)
    prods = np.einsum("ai,bj,ijk->abk", elems, elems, ring.table, optimize=True) % ring.p
    kills = ~prods.any(axis=2)  # kills[a, x]: a*x == 0
    zd = kills[:, 1:].any(axis=1)
    zd[0] = False
    classes: dict[bytes, list[int]] = {}
    for a in np.nonzero(zd)[0]:
        classes.setdefault(np.packbits(kills[a]).tobytes(), []).append(int(a))
    vertices = []
    for members in classes.values():
        rep = members[0]
        digest = hashlib.sha256(np.packbits(kills[rep]).tobytes()).digest()
        vertices.append(Vertex(tuple(int(x) for x in elems[rep]), ring.format_vector(elems[rep]), digest, len(members)))
    vertices.sort(key=lambda v: v.representative)
    n = len(vertices)
    rep_idx = [int(np.dot(v.representative, ring.p ** np.arange(ring.dim - 1, -1, -1))) for v in vertices]
    adj = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(n):
            adj[i, j] = i != j and kills[rep_idx[i], rep_idx[j]]
    return CompressedGraph(tuple(vertices), adj, ring_info(ring, name), ring, Build.ORACLE)


def same_graph(g1: CompressedGraph, g2: CompressedGraph) -> bool:
    """Equal vertex sets (by representative and class size) and equal adjacency."""
    if g1.vertex_count != g2.vertex_count:
        return False
    pos = {v.representative: i for i, v in enumerate(g2.vertices)}
    perm = []
    for v in g1.vertices:
        j = pos.get(v.representative)
        if j is None or g2.vertices[j].class_size != v.class_size:
            return False
        perm.append(j)
    perm = np.array(perm, dtype=np.int64)
    if len(perm) == 0:
        return True
    return bool(np.array_equal(g1.adjacency, g2.adjacency[np.ix_(perm, perm)]))


# -- cliques ------------------------------------------------------------------


@dataclass(frozen=True)
class GraphReport:
    vertex_count: int
    edge_count: int
    clique_number: int
    witness_clique: tuple[int, ...]
    build: Build
    naive_checked: bool = False

    def to_json(self) -> dict:
        return {
            "vertex_count": self.vertex_count,
            "edge_count": self.edge_count,
            "clique_number": self.clique_number,
            "witness": list(self.witness_clique),
            "build": self.build.value,
        }


def _popcount(x: int) -> int:
    return bin(x).count("1")


def max_clique(masks: list[int]) -> list[int]:
    """Maximum clique by Bron-Kerbosch with Tomita pivoting and a size bound."""
    n = len(masks)
    best: list[int] = []

    def expand(r: list[int], cand: int, excl: int):
        nonlocal best
        if not cand:
            if not excl and len(r) > len(best):
                best = list(r)
            return
        if len(r) + _popcount(cand) <= len(best):
            return
        both = cand | excl
        pivot, pivot_deg = -1, -1
        scan = both
        while scan:
            low = scan & -scan
            u = low.bit_length() - 1
            scan ^= low
            deg = _popcount(cand & masks[u])
            if deg > pivot_deg:
                pivot, pivot_deg = u, deg
        todo = cand & ~masks[pivot]
        while todo:
            low = todo & -todo
            v = low.bit_length() - 1
            todo ^= low
            expand(r + [v], cand & masks[v], excl & masks[v])
            cand &= ~low
            excl |= low
            if len(r) + _popcount(cand) <= len(best):
                return

    if n:
        expand([], (1 << n) - 1, 0)
    return sorted(best)


def naive_clique_number(masks: list[int]) -> int:
    """Largest clique by testing every vertex subset (n <= 20)."""
    n = len(masks)
    if n == 0:
        return 0
    if n > NAIVE_CLIQUE_MAX:
        raise ResourceBoundExceeded(f"subset enumeration limited to {NAIVE_CLIQUE_MAX} vertices")
    is_clique = np.zeros(1 << n, dtype=bool)
    is_clique[0] = True
    for i in range(n):
        lo = 1 << i
        rest = np.arange(lo, dtype=np.int64)
        # rest ranges over subsets of the lower vertices; add vertex i
        is_clique[lo : 2 * lo] = is_clique[rest] & ((rest & ~masks[i]) == 0)
    sizes = np.bitwise_count(np.nonzero(is_clique)[0].astype(np.uint64))
    return int(sizes.max())


def is_clique(graph: CompressedGraph, idx) -> bool:
    idx = list(idx)
    return all(graph.adjacency[i, j] for a, i in enumerate(idx) for j in idx[a + 1 :])


def clique_number(graph: CompressedGraph, check_naive: bool = True) -> GraphReport:
    """Exact clique number with a witness; the empty graph has clique number 0.

    Graphs with at most 20 vertices are re-solved by subset enumeration and
    the two answers must agree.
    """
    masks = graph.neighbor_masks()
    witness = max_clique(masks)
    if not is_clique(graph, witness):
        raise StructuralImpossibility("branch-and-bound returned a non-clique")
    checked = False
    if check_naive and graph.vertex_count <= NAIVE_CLIQUE_MAX:
        naive = naive_clique_number(masks)
        if naive != len(witness):
            raise StructuralImpossibility(f"clique solvers disagree: branch-and-bound {len(witness)}, subsets {naive}")
        checked = True
    return GraphReport(graph.vertex_count, graph.edge_count, len(witness), tuple(witness), graph.build, checked)


# -- export -------------------------------------------------------------------


def _dot_id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(graph: CompressedGraph) -> str:
    lines = ["graph G {"]
    for v in graph.vertices:
        lines.append(f"  {_dot_id(v.label)};")
    for i, j in graph.edges:
        lines.append(f"  {_dot_id(graph.vertices[i].label)} -- {_dot_id(graph.vertices[j].label)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_json(graph: CompressedGraph, report: GraphReport | None = None) -> dict:
    return {
        "format": "zdglab-graph-v1",
        "ring": graph.ring_info,
        "compressed": graph.compressed,
        "build": graph.build.value,
        "vertices": [
            {
                "label": v.label,
                "representative": list(v.representative),
                "class_size": v.class_size,
                "ann_key": v.ann_key.hex(),
            }
            for v in graph.vertices
        ],
        "edges": [list(e) for e in graph.edges],
        "clique_number": None if report is None else report.clique_number,
        "witness": None if report is None else list(report.witness_clique),
    }


def export_json(graph: CompressedGraph, report: GraphReport | None = None) -> str:
    return json.dumps(graph_to_json(graph, report), indent=2) + "\n"


def load_graph_json(text: str) -> tuple[CompressedGraph, GraphReport | None]:
    obj = json.loads(text)
    if obj.get("format") != "zdglab-graph-v1":
        raise ValueError(f"not a zdglab-graph-v1 document: format={obj.get('format')!r}")
    vertices = tuple(
        Vertex(tuple(v["representative"]), v["label"], bytes.fromhex(v["ann_key"]), v["class_size"])
        for v in obj["vertices"]
    )
    n = len(vertices)
    adj = np.zeros((n, n), dtype=bool)
    for i, j in obj["edges"]:
        if i == j:
            raise ValueError("self-loop in graph JSON")
        adj[i, j] = adj[j, i] = True
    build = Build(obj.get("build", "FAST"))
    graph = CompressedGraph(vertices, adj, obj["ring"], None, build, obj.get("compressed", True))
    report = None
    if obj.get("clique_number") is not None:
        witness = tuple(obj["witness"])
        report = GraphReport(n, graph.edge_count, obj["clique_number"], witness, build)
    return graph, report
