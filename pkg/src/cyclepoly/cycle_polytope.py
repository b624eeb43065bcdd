"""Exact-rational geometry of cycle polytopes.

Points live in the edge-indexed space of a host multigraph. All arithmetic is
done with :class:`fractions.Fraction`; no floating point is used here.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import BudgetExceededError, CrossCheckError, InvalidInputError
from .multigraph import (
    Cycle,
    DirectedMultigraph,
    FullSubgraph,
    enumerate_simple_cycles,
    largest_full_subgraph,
    weakly_connected_components,
)

__all__ = [
    "DEFAULT_CYCLE_BUDGET",
    "DEFAULT_FACE_EDGE_BUDGET",
    "RationalVector",
    "CyclePolytope",
    "Membership",
    "FacePoset",
    "cycle_vector",
    "polytope_of",
    "polytope_dimension",
    "affine_dimension",
    "contains",
    "full_subgraphs",
    "face_of",
    "face_poset",
    "vertices_to_csv",
    "parse_vector",
]

DEFAULT_CYCLE_BUDGET = 10**6
DEFAULT_FACE_EDGE_BUDGET = 16


@dataclass(frozen=True)
class RationalVector:
    """Exact coordinates indexed by the edges of ``host`` (in host edge order)."""

    host: DirectedMultigraph
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        coords = tuple(Fraction(c) for c in self.coords)
        object.__setattr__(self, "coords", coords)
        if len(coords) != len(self.host.edges):
            raise InvalidInputError(
                f"vector has {len(coords)} coordinates, graph has {len(self.host.edges)} edges"
            )

    @classmethod
    def from_mapping(cls, host: DirectedMultigraph, mapping: Mapping) -> RationalVector:
        """Build from ``{edge id or edge label string: value}``; absent edges are 0."""
        by_key = {}
        for i, e in enumerate(host.edges):
            by_key[e.id] = i
            by_key.setdefault(str(e.id), i)
            if e.label is not None:
                by_key.setdefault(str(e.label), i)
        coords = [Fraction(0)] * len(host.edges)
        for key, value in mapping.items():
            if key not in by_key:
                raise InvalidInputError(f"unknown edge {key!r}")
            try:
                coords[by_key[key]] = Fraction(value)
            except (ValueError, TypeError, ZeroDivisionError) as exc:
                raise InvalidInputError(f"bad rational {value!r} for edge {key!r}") from exc
        return cls(host, tuple(coords))

    @classmethod
    def zeros(cls, host: DirectedMultigraph) -> RationalVector:
        return cls(host, (Fraction(0),) * len(host.edges))

    def __getitem__(self, edge_id) -> Fraction:
        return self.coords[self.host.edge_index[edge_id]]

    def items(self):
        return zip((e.id for e in self.host.edges), self.coords)

    def as_dict(self) -> dict:
        return dict(self.items())

    def support(self) -> tuple:
        return tuple(e.id for e, c in zip(self.host.edges, self.coords) if c != 0)

    def to_json_obj(self) -> dict:
        return {e.display: str(c) for e, c in zip(self.host.edges, self.coords)}

    def __sub__(self, other: RationalVector) -> tuple[Fraction, ...]:
        return tuple(a - b for a, b in zip(self.coords, other.coords))


def cycle_vector(c: Cycle, g: DirectedMultigraph) -> RationalVector:
    """Edge multiplicities of ``c`` divided by its length."""
    if not isinstance(c, Cycle):
        c = Cycle(tuple(c))
    c.check(g)
    counts = Counter(c.edges)
    n = len(c)
    return RationalVector(g, tuple(Fraction(counts.get(e.id, 0), n) for e in g.edges))


@dataclass(frozen=True)
class CyclePolytope:
    """Convex hull of the cycle vectors of all simple cycles of ``host``.

    ``cycles[i]`` is a simple cycle realising ``vertices[i]``.
    """

    host: DirectedMultigraph
    vertices: tuple[RationalVector, ...]
    dim: int
    cycles: tuple[Cycle, ...] = field(default=(), compare=False)

    def __len__(self) -> int:
        return len(self.vertices)


# ---------------------------------------------------------------------------
# dimension


def polytope_dimension(g: DirectedMultigraph) -> int:
    """``|E(H)| - |V(H)| + c(H) - 1`` for the largest full subgraph ``H``.

    ``c(H)`` counts weakly connected components. Returns -1 when ``H`` is empty.
    """
    h = largest_full_subgraph(g)
    if not h.edge_ids:
        return -1
    comps = weakly_connected_components(h.graph)
    return len(h.edge_ids) - len(h.vertex_ids) + len(comps) - 1


def _rank(rows: Iterable[Sequence[Fraction]]) -> int:
    """Exact rank via incremental Gaussian elimination."""
    basis: list[tuple[int, list[Fraction]]] = []  # (pivot column, row with 1 at pivot)
    for row in rows:
        r = list(row)
        for col, b in basis:
            if r[col]:
                f = r[col]
                r = [x - f * y for x, y in zip(r, b)]
        pivot = next((i for i, x in enumerate(r) if x), None)
        if pivot is None:
            continue
        inv = 1 / r[pivot]
        r = [x * inv for x in r]
        # keep basis fully reduced on existing pivots
        basis = [
            (col, [x - b[pivot] * y for x, y in zip(b, r)]) if b[pivot] else (col, b)
            for col, b in basis
        ]
        basis.append((pivot, r))
    return len(basis)


def affine_dimension(points: Sequence[RationalVector]) -> int:
    """Rank of ``{p - p0}`` over the rationals; -1 for no points, 0 for one."""
    points = list(points)
    if not points:
        return -1
    host = points[0].host
    for p in points[1:]:
        if p.host is not host and p.host != host:
            raise InvalidInputError("points live on different host graphs")
    p0 = points[0]
    return _rank(p - p0 for p in points[1:])


def polytope_of(g: DirectedMultigraph, cycle_budget: int = DEFAULT_CYCLE_BUDGET) -> CyclePolytope:
    """Vertices from simple-cycle enumeration; the dimension formula is checked
    against the exact affine rank of those vertices."""
    seen: dict[tuple, int] = {}
    vertices: list[RationalVector] = []
    cycles: list[Cycle] = []
    for n, c in enumerate(enumerate_simple_cycles(g)):
        if n >= cycle_budget:
            raise BudgetExceededError(
                f"more than {cycle_budget} simple cycles; enumerated {n} before stopping",
                partial=n,
            )
        v = cycle_vector(c, g)
        if v.coords in seen:
            continue
        seen[v.coords] = len(vertices)
        vertices.append(v)
        cycles.append(c)
    formula = polytope_dimension(g)
    rank = affine_dimension(vertices)
    if formula != rank:
        raise CrossCheckError(
            f"dimension formula gives {formula} but vertex rank is {rank}"
        )
    return CyclePolytope(g, tuple(vertices), formula, tuple(cycles))


# ---------------------------------------------------------------------------
# membership


@dataclass(frozen=True)
class Membership:
    """Outcome of :func:`contains`.

    On success ``certificate`` lists ``(weight, simple cycle)`` pairs whose
    weighted cycle vectors sum to the point; otherwise ``violation`` names a
    failed constraint.
    """

    inside: bool
    certificate: tuple[tuple[Fraction, Cycle], ...] = ()
    violation: str | None = None

    def __bool__(self) -> bool:
        return self.inside

    def to_json_obj(self, g: DirectedMultigraph) -> dict:
        if not self.inside:
            return {"inside": False, "violation": self.violation}
        return {
            "inside": True,
            "certificate": [
                {"weight": str(w), "cycle": [g.edge(e).display for e in c.edges]}
                for w, c in self.certificate
            ],
        }


def _find_cycle(g: DirectedMultigraph, residual: list[Fraction]) -> Cycle:
    """Some simple cycle inside the positive support of a circulation."""
    ei = g.edge_index
    start = next(i for i, r in enumerate(residual) if r > 0)
    v = g.edges[start].src
    order: list = []
    pos: dict = {}
    while v not in pos:
        pos[v] = len(order)
        e = next(e for e in g.out_edges[v] if residual[ei[e.id]] > 0)
        order.append(e.id)
        v = e.dst
    return Cycle(tuple(order[pos[v]:])).canonical(g)


def contains(g: DirectedMultigraph, v: RationalVector) -> Membership:
    """Decide whether ``v`` lies in the cycle polytope of ``g``.

    A point is inside iff it is non-negative, sums to 1, is supported on the
    largest full subgraph and is balanced at every vertex. The certificate is
    produced by peeling simple cycles off the circulation.
    """
    if not isinstance(v, RationalVector):
        raise InvalidInputError("expected a RationalVector")
    if len(v.coords) != len(g.edges) or (v.host is not g and v.host != g):
        raise InvalidInputError("vector is not indexed by the edges of this graph")
    for e, x in zip(g.edges, v.coords):
        if x < 0:
            return Membership(False, violation=f"negative coordinate {x} on edge {e.display}")
    total = sum(v.coords, Fraction(0))
    if total != 1:
        return Membership(False, violation=f"coordinates sum to {total}, not 1")
    full = set(largest_full_subgraph(g).edge_ids)
    for e, x in zip(g.edges, v.coords):
        if x and e.id not in full:
            return Membership(
                False, violation=f"edge {e.display} carries {x} but lies on no cycle"
            )
    ei = g.edge_index
    for u in g.vertices:
        inflow = sum((v.coords[ei[e.id]] for e in g.in_edges[u]), Fraction(0))
        outflow = sum((v.coords[ei[e.id]] for e in g.out_edges[u]), Fraction(0))
        if inflow != outflow:
            return Membership(
                False, violation=f"unbalanced at vertex {u}: in {inflow}, out {outflow}"
            )

    residual = list(v.coords)
    weights: dict[tuple, Fraction] = {}
    cycles: dict[tuple, Cycle] = {}
    while any(residual):
        c = _find_cycle(g, residual)
        step = min(residual[ei[e]] for e in c.edges)
        for e in c.edges:
            residual[ei[e]] -= step
        weights[c.edges] = weights.get(c.edges, Fraction(0)) + step * len(c)
        cycles[c.edges] = c
    cert = tuple((weights[key], cycles[key]) for key in weights)
    return Membership(True, certificate=cert)


# ---------------------------------------------------------------------------
# faces


def _is_full_mask(g: DirectedMultigraph, edge_ids: Sequence) -> bool:
    if not edge_ids:
        return True
    outdeg: Counter = Counter()
    indeg: Counter = Counter()
    for eid in edge_ids:
        e = g.edge(eid)
        outdeg[e.src] += 1
        indeg[e.dst] += 1
    if set(outdeg) != set(indeg):
        return False
    return len(largest_full_subgraph(g.subgraph(edge_ids)).edge_ids) == len(edge_ids)


def full_subgraphs(
    g: DirectedMultigraph,
    budget_edges: int = DEFAULT_FACE_EDGE_BUDGET,
    sample: int | None = None,
    seed: int = 0,
) -> Iterator[FullSubgraph]:
    """Every full subgraph of ``g`` (empty one included), by size then edge order.

    Exhaustive for at most ``budget_edges`` edges. Past that, pass ``sample`` to
    get up to that many distinct full subgraphs, each the largest full subgraph
    of a random edge subset; otherwise :class:`BudgetExceededError` is raised.
    """
    ids = [e.id for e in g.edges]
    if len(ids) > budget_edges:
        if sample is None:
            raise BudgetExceededError(
                f"{len(ids)} edges exceeds the exhaustive face budget of {budget_edges}",
                partial=0,
            )
        yield from _sampled_full_subgraphs(g, sample, seed)
        return
    for size in range(len(ids) + 1):
        for combo in itertools.combinations(ids, size):
            if _is_full_mask(g, combo):
                yield FullSubgraph.of(g, combo)


def _sampled_full_subgraphs(g: DirectedMultigraph, count: int, seed: int) -> Iterator[FullSubgraph]:
    rng = random.Random(seed)
    seen: set = set()
    attempts = 0
    while len(seen) < count and attempts < 50 * count:
        attempts += 1
        p = rng.random()
        subset = [e.id for e in g.edges if rng.random() < p]
        h = largest_full_subgraph(g.subgraph(subset)) if subset else None
        key = h.edge_ids if h is not None else ()
        if key in seen:
            continue
        seen.add(key)
        yield FullSubgraph.of(g, key)


def face_of(
    g: DirectedMultigraph, h: FullSubgraph, cycle_budget: int = DEFAULT_CYCLE_BUDGET
) -> CyclePolytope:
    """The face of P(g) where coordinates outside ``h`` vanish, i.e. P(h) embedded in g."""
    if not isinstance(h, FullSubgraph):
        h = FullSubgraph.of(g, h)
    if h.host is not g and h.host != g:
        raise InvalidInputError("subgraph belongs to another host graph")
    if not h.is_full():
        raise InvalidInputError("subgraph is not full: some edge lies on no cycle")
    if not h.edge_ids:
        return CyclePolytope(g, (), -1, ())
    inner = polytope_of(h.graph, cycle_budget)
    vertices = []
    for c in inner.cycles:
        vertices.append(cycle_vector(c, g))
    return CyclePolytope(g, tuple(vertices), inner.dim, inner.cycles)


@dataclass
class FacePoset:
    """Full subgraphs ordered by edge inclusion, each with its face dimension.

    ``covers`` holds index pairs ``(lower, upper)`` of covering relations.
    """

    host: DirectedMultigraph
    nodes: list[FullSubgraph]
    dims: list[int]
    covers: list[tuple[int, int]]

    def rank_counts(self) -> dict[int, int]:
        return dict(sorted(Counter(self.dims).items()))

    def to_json_obj(self) -> dict:
        return {
            "nodes": [
                {"edge_ids": [self.host.edge(e).display for e in h.edge_ids], "dim": d}
                for h, d in zip(self.nodes, self.dims)
            ],
            "covers": [list(c) for c in self.covers],
        }


def face_poset(g: DirectedMultigraph, budget_edges: int = DEFAULT_FACE_EDGE_BUDGET) -> FacePoset:
    nodes = list(full_subgraphs(g, budget_edges))
    dims = []
    for h in nodes:
        dims.append(polytope_dimension(h.graph) if h.edge_ids else -1)
    ei = g.edge_index
    masks = [sum(1 << ei[e] for e in h.edge_ids) for h in nodes]
    covers = []
    for j, mj in enumerate(masks):
        below = [i for i, mi in enumerate(masks) if i != j and mi & mj == mi]
        for i in below:
            mi = masks[i]
            if not any(
                masks[t] != mi and masks[t] & mi == mi for t in below if t != i
            ):
                covers.append((i, j))
    return FacePoset(g, nodes, dims, covers)


# ---------------------------------------------------------------------------
# IO


def vertices_to_csv(p: CyclePolytope) -> str:
    """Header of edge labels, then one row per vertex with ``p/q`` entries."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([e.display for e in p.host.edges])
    for v in p.vertices:
        w.writerow([str(c) for c in v.coords])
    return buf.getvalue()


def parse_vector(g: DirectedMultigraph, text: str) -> RationalVector:
    """Read a point from JSON (``{edge: "p/q"}``) or two-row CSV (header, values)."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"vector file is not valid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise InvalidInputError("vector JSON must be an object")
        return RationalVector.from_mapping(g, {k: str(v) for k, v in obj.items()})
    rows = [r for r in csv.reader(io.StringIO(stripped)) if r]
    if len(rows) != 2 or len(rows[0]) != len(rows[1]):
        raise InvalidInputError("vector CSV must have a header row and one value row")
    return RationalVector.from_mapping(g, dict(zip(rows[0], rows[1])))
