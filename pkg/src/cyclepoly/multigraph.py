"""Edge-labelled directed multigraphs and the graph algorithms the polytope code needs.

Vertices and edges keep their declaration order; that order is the canonical
order used everywhere (SCC ordering, cycle rotation, Eulerian start vertex).
"""

from __future__ import annotations

import itertools
import json
import os
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Any, Hashable, Iterable, Iterator, Sequence

from .errors import InvalidInputError, NoEulerianCircuitError
from .perm_core import Permutation, all_permutations, pattern_of

__all__ = [
    "DEFAULT_K_MAX",
    "k_max",
    "Edge",
    "DirectedMultigraph",
    "Walk",
    "Cycle",
    "FullSubgraph",
    "overlap_graph",
    "strongly_connected_components",
    "weakly_connected_components",
    "largest_full_subgraph",
    "enumerate_simple_cycles",
    "eulerian_circuit",
    "walk_of_permutation",
]

DEFAULT_K_MAX = 6
K_MAX_ENV = "CYCLEPOLY_K_MAX"


def k_max() -> int:
    """Largest overlap-graph order allowed; ``$CYCLEPOLY_K_MAX`` overrides the default."""
    raw = os.environ.get(K_MAX_ENV)
    if raw is None:
        return DEFAULT_K_MAX
    try:
        value = int(raw)
    except ValueError as exc:
        raise InvalidInputError(f"{K_MAX_ENV} must be an integer, got {raw!r}") from exc
    if value < 2:
        raise InvalidInputError(f"{K_MAX_ENV} must be at least 2")
    return value


@dataclass(frozen=True)
class Edge:
    id: Hashable
    src: Hashable
    dst: Hashable
    label: Any = None

    @property
    def is_loop(self) -> bool:
        return self.src == self.dst

    @property
    def display(self) -> str:
        return str(self.label) if self.label is not None else str(self.id)


@dataclass(frozen=True)
class DirectedMultigraph:
    """Vertices plus uniquely identified directed edges; loops and parallel edges allowed."""

    vertices: tuple
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        if len(set(self.vertices)) != len(self.vertices):
            raise InvalidInputError("duplicate vertex identifiers")
        known = set(self.vertices)
        seen = set()
        for e in self.edges:
            if e.id in seen:
                raise InvalidInputError(f"duplicate edge id {e.id!r}")
            seen.add(e.id)
            if e.src not in known or e.dst not in known:
                raise InvalidInputError(f"edge {e.id!r} has an undeclared endpoint")

    # -- indices -----------------------------------------------------------

    @cached_property
    def vertex_index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def edge_index(self) -> dict:
        return {e.id: i for i, e in enumerate(self.edges)}

    @cached_property
    def out_edges(self) -> dict:
        """vertex -> edges leaving it, in edge order."""
        out = {v: [] for v in self.vertices}
        for e in self.edges:
            out[e.src].append(e)
        return out

    @cached_property
    def in_edges(self) -> dict:
        inc = {v: [] for v in self.vertices}
        for e in self.edges:
            inc[e.dst].append(e)
        return inc

    def edge(self, edge_id) -> Edge:
        try:
            return self.edges[self.edge_index[edge_id]]
        except KeyError:
            raise InvalidInputError(f"unknown edge id {edge_id!r}") from None

    def __len__(self) -> int:
        return len(self.edges)

    def subgraph(self, edge_ids: Iterable) -> DirectedMultigraph:
        """Sub-multigraph on ``edge_ids``; its vertices are the endpoints of those edges."""
        keep = set(edge_ids)
        edges = tuple(e for e in self.edges if e.id in keep)
        if len(edges) != len(keep):
            missing = keep - {e.id for e in edges}
            raise InvalidInputError(f"unknown edge ids {sorted(map(str, missing))}")
        ends = {e.src for e in edges} | {e.dst for e in edges}
        return DirectedMultigraph(tuple(v for v in self.vertices if v in ends), edges)

    # -- serialisation ---------------------------------------------------

    def to_json_obj(self) -> dict:
        def enc(x):
            return str(x) if isinstance(x, Permutation) else x

        return {
            "vertices": [enc(v) for v in self.vertices],
            "edges": [
                {"id": enc(e.id), "src": enc(e.src), "dst": enc(e.dst), "label": enc(e.label)}
                for e in self.edges
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2)

    @classmethod
    def from_json_obj(cls, obj) -> DirectedMultigraph:
        try:
            vertices = list(obj["vertices"])
            edges = [Edge(e["id"], e["src"], e["dst"], e.get("label")) for e in obj["edges"]]
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"malformed graph JSON: {exc}") from exc
        return cls(tuple(vertices), tuple(edges))

    @classmethod
    def from_json(cls, text: str) -> DirectedMultigraph:
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"graph file is not valid JSON: {exc}") from exc
        return cls.from_json_obj(obj)

    def to_dot(self, name: str = "G") -> str:
        """DOT text; parallel edges are drawn as separate arrows."""
        lines = [f"digraph {name} {{"]
        for v in self.vertices:
            lines.append(f'  "{v}" [label="{v}"];')
        for e in self.edges:
            lines.append(f'  "{e.src}" -> "{e.dst}" [label="{e.display}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# walks


@dataclass(frozen=True)
class Walk:
    """Non-empty sequence of edge ids, consecutive edges head-to-tail."""

    edges: tuple

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))
        if not self.edges:
            raise InvalidInputError("a walk has at least one edge")

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)

    def check(self, g: DirectedMultigraph) -> None:
        """Raise :class:`InvalidInputError` unless this is a walk of ``g``."""
        es = [g.edge(eid) for eid in self.edges]
        for a, b in zip(es, es[1:]):
            if a.dst != b.src:
                raise InvalidInputError(f"edges {a.id!r} and {b.id!r} are not head-to-tail")

    def vertices(self, g: DirectedMultigraph) -> list:
        es = [g.edge(eid) for eid in self.edges]
        return [es[0].src] + [e.dst for e in es]


@dataclass(frozen=True)
class Cycle(Walk):
    """A closed walk."""

    def check(self, g: DirectedMultigraph) -> None:
        super().check(g)
        if g.edge(self.edges[-1]).dst != g.edge(self.edges[0]).src:
            raise InvalidInputError("walk does not close up")

    def is_simple(self, g: DirectedMultigraph) -> bool:
        srcs = [g.edge(eid).src for eid in self.edges]
        return len(set(srcs)) == len(srcs)

    def canonical(self, g: DirectedMultigraph) -> Cycle:
        """Rotate so the smallest ``(vertex index, edge index)`` pair leads."""
        keys = [
            (g.vertex_index[g.edge(eid).src], g.edge_index[eid]) for eid in self.edges
        ]
        best = min(
            range(len(keys)), key=lambda i: keys[i:] + keys[:i]
        )
        return Cycle(self.edges[best:] + self.edges[:best])

    def repeat(self, m: int) -> Cycle:
        return Cycle(self.edges * m)


@dataclass(frozen=True)
class FullSubgraph:
    """A subgraph in which every edge lies on a cycle of the subgraph."""

    host: DirectedMultigraph
    edge_ids: tuple
    vertex_ids: tuple

    @classmethod
    def of(cls, host: DirectedMultigraph, edge_ids: Iterable) -> FullSubgraph:
        keep = set(edge_ids)
        eids = tuple(e.id for e in host.edges if e.id in keep)
        ends = {host.edge(e).src for e in eids} | {host.edge(e).dst for e in eids}
        return cls(host, eids, tuple(v for v in host.vertices if v in ends))

    @cached_property
    def graph(self) -> DirectedMultigraph:
        return self.host.subgraph(self.edge_ids)

    def is_full(self) -> bool:
        return largest_full_subgraph(self.graph).edge_ids == self.edge_ids

    def __len__(self) -> int:
        return len(self.edge_ids)

    def __le__(self, other: FullSubgraph) -> bool:
        return set(self.edge_ids) <= set(other.edge_ids)


# ---------------------------------------------------------------------------
# overlap graphs


def overlap_graph(k: int, k_limit: int | None = None) -> DirectedMultigraph:
    """The overlap graph of order ``k``: vertices S_{k-1}, one edge per element of S_k.

    Vertex and edge ids are one-line strings; edge labels are :class:`Permutation`.
    """
    limit = k_max() if k_limit is None else k_limit
    if not isinstance(k, int) or k < 2 or k > limit:
        raise InvalidInputError(f"k must satisfy 2 <= k <= {limit}, got {k}")
    return _overlap_graph(k)


@lru_cache(maxsize=None)
def _overlap_graph(k: int) -> DirectedMultigraph:
    vertices = tuple(str(p) for p in all_permutations(k - 1))
    edges = tuple(
        Edge(str(pi), str(pattern_of(pi[: k - 1])), str(pattern_of(pi[1:])), pi)
        for pi in all_permutations(k)
    )
    return DirectedMultigraph(vertices, edges)


def walk_of_permutation(sigma, k: int) -> Walk:
    """The walk in the overlap graph of order ``k`` whose edges are the size-``k`` windows."""
    sigma = sigma if isinstance(sigma, Permutation) else Permutation.parse(str(sigma))
    if k < 2:
        raise InvalidInputError(f"k must be at least 2, got {k}")
    if len(sigma) < k:
        raise InvalidInputError(f"permutation of size {len(sigma)} has no window of size {k}")
    vals = sigma.values
    return Walk(tuple(str(pattern_of(vals[i : i + k])) for i in range(len(vals) - k + 1)))


# ---------------------------------------------------------------------------
# connectivity


def _tarjan(nodes: Sequence[int], succ) -> list[list[int]]:
    """Iterative Tarjan on integer nodes; ``succ(v)`` yields successors."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ(w))))
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            else:
                work.pop()
                if work:
                    u = work[-1][0]
                    low[u] = min(low[u], low[v])
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack.discard(w)
                        comp.append(w)
                        if w == v:
                            break
                    comps.append(comp)
    return comps


def _index_adjacency(g: DirectedMultigraph) -> list[list[int]]:
    vi = g.vertex_index
    adj: list[list[int]] = [[] for _ in g.vertices]
    for e in g.edges:
        adj[vi[e.src]].append(vi[e.dst])
    return adj


def strongly_connected_components(g: DirectedMultigraph) -> list[tuple]:
    """Strongly connected components, each in vertex order, sorted by smallest vertex."""
    adj = _index_adjacency(g)
    comps = _tarjan(range(len(g.vertices)), adj.__getitem__)
    comps = sorted(sorted(c) for c in comps)
    return [tuple(g.vertices[i] for i in c) for c in comps]


def weakly_connected_components(g: DirectedMultigraph) -> list[tuple]:
    parent = list(range(len(g.vertices)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    vi = g.vertex_index
    for e in g.edges:
        a, b = find(vi[e.src]), find(vi[e.dst])
        if a != b:
            parent[max(a, b)] = min(a, b)
    groups = defaultdict(list)
    for i in range(len(g.vertices)):
        groups[find(i)].append(i)
    return [tuple(g.vertices[i] for i in groups[r]) for r in sorted(groups)]


def largest_full_subgraph(g: DirectedMultigraph) -> FullSubgraph:
    """Edges whose endpoints share a strongly connected component.

    Exactly these edges lie on a cycle, so the result is the unique maximal full
    subgraph; vertices not touched by a kept edge are dropped.
    """
    comp_of = {}
    for n, comp in enumerate(strongly_connected_components(g)):
        for v in comp:
            comp_of[v] = n
    keep = [e.id for e in g.edges if comp_of[e.src] == comp_of[e.dst]]
    return FullSubgraph.of(g, keep)


# ---------------------------------------------------------------------------
# simple cycles


def _circuits_through(start: int, adj: dict[int, list[int]]) -> Iterator[list[int]]:
    """Johnson's circuit search for cycles through ``start`` (non-recursive)."""
    path = [start]
    blocked = {start}
    B: dict[int, set[int]] = defaultdict(set)
    stack = [iter(adj[start])]
    closed = [False]

    def unblock(v: int) -> None:
        todo = [v]
        while todo:
            u = todo.pop()
            if u in blocked:
                blocked.discard(u)
                todo.extend(B[u])
                B[u].clear()

    while stack:
        for w in stack[-1]:
            if w == start:
                yield list(path)
                closed[-1] = True
            elif w not in blocked:
                path.append(w)
                closed.append(False)
                stack.append(iter(adj[w]))
                blocked.add(w)
                break
        else:
            stack.pop()
            v = path.pop()
            if closed.pop():
                if closed:
                    closed[-1] = True
                unblock(v)
            else:
                for w in adj[v]:
                    B[w].add(v)


def enumerate_simple_cycles(g: DirectedMultigraph) -> Iterator[Cycle]:
    """Yield every simple cycle once, in canonical rotation, deterministically.

    Parallel edges give distinct cycles. Cycles are grouped by their smallest
    vertex: loops at that vertex first (edge order), then longer cycles found by
    Johnson's search on the underlying simple digraph, expanded over every
    choice of parallel edge.
    """
    nv = len(g.vertices)
    vi = g.vertex_index
    parallel: dict[tuple[int, int], list] = defaultdict(list)
    loops: dict[int, list] = defaultdict(list)
    for e in g.edges:
        s, d = vi[e.src], vi[e.dst]
        if s == d:
            loops[s].append(e.id)
        else:
            parallel[(s, d)].append(e.id)
    succ: dict[int, list[int]] = defaultdict(list)
    for s, d in sorted(parallel):
        succ[s].append(d)

    for s in range(nv):
        for eid in loops.get(s, ()):
            yield Cycle((eid,))
        # component of s in the subgraph induced on vertices >= s
        allowed = range(s, nv)
        comps = _tarjan(allowed, lambda v: [w for w in succ[v] if w >= s])
        comp = next(c for c in comps if s in c)
        if len(comp) < 2:
            continue
        members = set(comp)
        adj = {v: [w for w in succ[v] if w in members] for v in comp}
        for circuit in _circuits_through(s, adj):
            choices = [
                parallel[(circuit[i], circuit[(i + 1) % len(circuit)])]
                for i in range(len(circuit))
            ]
            for combo in itertools.product(*choices):
                yield Cycle(combo)


# ---------------------------------------------------------------------------
# Eulerian circuits


def eulerian_circuit(g: DirectedMultigraph) -> Cycle:
    """Closed walk through every edge exactly once (Hierholzer).

    Starts at the first vertex (in vertex order) that has an outgoing edge and
    always takes the lowest-numbered unused edge.
    """
    if not g.edges:
        raise NoEulerianCircuitError("graph has no edges")
    for v in g.vertices:
        if len(g.out_edges[v]) != len(g.in_edges[v]):
            raise NoEulerianCircuitError(
                f"vertex {v!r} is unbalanced: out-degree {len(g.out_edges[v])}, "
                f"in-degree {len(g.in_edges[v])}",
                vertex=v,
            )
    start = next(v for v in g.vertices if g.out_edges[v])
    ptr = {v: 0 for v in g.vertices}
    stack: list[tuple[Any, Edge | None]] = [(start, None)]
    circuit: list = []
    while stack:
        v, arrived = stack[-1]
        out = g.out_edges[v]
        if ptr[v] < len(out):
            e = out[ptr[v]]
            ptr[v] += 1
            stack.append((e.dst, e))
        else:
            stack.pop()
            if arrived is not None:
                circuit.append(arrived.id)
    if len(circuit) != len(g.edges):
        stray = next(v for v in g.vertices if ptr[v] < len(g.out_edges[v]))
        raise NoEulerianCircuitError(
            f"edges are not connected: vertex {stray!r} is unreachable from {start!r}",
            vertex=stray,
        )
    circuit.reverse()
    return Cycle(tuple(circuit))
