"""From walks in overlap graphs back to permutations, and sequences of
permutations whose consecutive-pattern proportions approach a chosen point."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Callable, Sequence

from .cycle_polytope import RationalVector, contains
from .errors import CrossCheckError, InvalidInputError, NotInPolytopeError
from .multigraph import (
    Cycle,
    DirectedMultigraph,
    Walk,
    eulerian_circuit,
    overlap_graph,
    walk_of_permutation,
)
from .perm_core import Permutation, cocc_counts, direct_sum, inflate

__all__ = [
    "RealizationTrace",
    "TargetRealization",
    "realize_walk",
    "realize_walk_trace",
    "superpermutation",
    "cycle_sequence",
    "convex_mix",
    "mixing_inflation",
    "target_sequence",
    "target_sequence_of_size",
    "overlap_order",
]

# re-rank once denominators get longer than this many bits (or len/8, if larger)
_RENORM_BITS = 64


@dataclass(frozen=True)
class RealizationTrace:
    walk: Walk
    k: int
    values: tuple[Fraction, ...]
    permutation: Permutation


def overlap_order(g: DirectedMultigraph) -> int:
    """The ``k`` of an overlap graph, read off its edge labels."""
    label = g.edges[0].label
    if not isinstance(label, Permutation):
        raise InvalidInputError("graph is not an overlap graph (edge labels are not permutations)")
    return len(label)


def _rank_positions(values: list[Fraction]) -> list[int]:
    # ties only ever occur between entries that never share a window
    order = sorted(range(len(values)), key=lambda i: (values[i], i))
    ranks = [0] * len(values)
    for r, i in enumerate(order):
        ranks[i] = r
    return ranks


def realize_walk_trace(
    w: Walk | Sequence,
    k: int,
    progress: Callable[[int, int], None] | None = None,
) -> RealizationTrace:
    """Greedy realisation of a walk in the overlap graph of order ``k``.

    The first edge label fixes the first ``k`` values. Each further edge label
    ``pi`` fixes where the new value sits relative to the previous ``k-1``
    values: below them, above them, or at the midpoint of the two neighbours
    that bracket rank ``pi(k)``. Values are exact rationals, periodically
    re-ranked to integers to keep denominators short.
    """
    if not isinstance(w, Walk):
        w = Walk(tuple(str(x) for x in w))
    g = overlap_graph(k)
    w.check(g)
    labels = [g.edge(eid).label for eid in w.edges]

    values = [Fraction(x) for x in labels[0].values]
    total = len(labels)
    for step, pi in enumerate(labels[1:], start=1):
        window = sorted(values[-(k - 1):])
        r = pi[k - 1]
        if r == 1:
            new = window[0] - 1
        elif r == k:
            new = window[-1] + 1
        else:
            new = (window[r - 2] + window[r - 1]) / 2
        values.append(new)
        if new.denominator.bit_length() > max(_RENORM_BITS, len(values) // 8):
            values = [Fraction(r) for r in _rank_positions(values)]
        if progress is not None and step % 4096 == 0:
            progress(step, total)
    ranks = _rank_positions(values)
    sigma = Permutation(tuple(r + 1 for r in ranks))
    if walk_of_permutation(sigma, k).edges != w.edges:
        raise CrossCheckError("realised permutation does not reproduce the walk")
    if progress is not None:
        progress(total, total)
    return RealizationTrace(w, k, tuple(values), sigma)


def realize_walk(w: Walk | Sequence, k: int) -> Permutation:
    """A permutation of size ``len(w) + k - 1`` whose windows trace out ``w``."""
    return realize_walk_trace(w, k).permutation


def superpermutation(k: int) -> Permutation:
    """Size ``k! + k - 1`` permutation containing every pattern of S_k exactly once
    as a window, read off an Eulerian circuit of the overlap graph."""
    g = overlap_graph(k)
    circuit = eulerian_circuit(g)
    return realize_walk(Walk(circuit.edges), k)


def _order_of_cycle(c: Cycle) -> int:
    return len(Permutation.parse(str(c.edges[0])))


def cycle_sequence(c: Cycle | Sequence, m: int, k: int | None = None) -> Permutation:
    """Realise ``m`` concatenated copies of the cycle ``c``."""
    if not isinstance(c, Cycle):
        c = Cycle(tuple(str(x) for x in c))
    if not isinstance(m, int) or m < 1:
        raise InvalidInputError(f"m must be a positive integer, got {m!r}")
    k = _order_of_cycle(c) if k is None else k
    c.check(overlap_graph(k))
    return realize_walk(Walk(c.edges * m), k)


def convex_mix(sigma1, sigma2, s: int, t: int) -> Permutation:
    """Direct sum of ``s*|sigma2|`` copies of ``sigma1`` then ``t*|sigma1|`` copies of
    ``sigma2``; its window proportions blend the parts with weights s:t."""
    sigma1 = sigma1 if isinstance(sigma1, Permutation) else Permutation.parse(str(sigma1))
    sigma2 = sigma2 if isinstance(sigma2, Permutation) else Permutation.parse(str(sigma2))
    if s < 1 or t < 1:
        raise InvalidInputError("blend weights must be positive integers")
    s_m = s * len(sigma2)
    t_m = t * len(sigma1)
    return direct_sum([sigma1] * s_m + [sigma2] * t_m)


def mixing_inflation(sigma1, sigma2) -> Permutation:
    """``sigma2`` inflated by ``|sigma2|`` copies of ``sigma1``.

    Classical pattern densities follow ``sigma2`` and window densities follow
    ``sigma1``.
    """
    sigma1 = sigma1 if isinstance(sigma1, Permutation) else Permutation.parse(str(sigma1))
    sigma2 = sigma2 if isinstance(sigma2, Permutation) else Permutation.parse(str(sigma2))
    return inflate(sigma2, [sigma1] * len(sigma2))


# ---------------------------------------------------------------------------
# target points


@dataclass(frozen=True)
class TargetRealization:
    permutation: Permutation
    target: RationalVector
    achieved: RationalVector
    bound: Fraction
    blocks: tuple[tuple[Cycle, int], ...]

    @property
    def size(self) -> int:
        return len(self.permutation)

    @property
    def deviation(self) -> Fraction:
        return max(abs(a - b) for a, b in zip(self.achieved.coords, self.target.coords))

    def to_json_obj(self) -> dict:
        return {
            "target": self.target.to_json_obj(),
            "achieved": self.achieved.to_json_obj(),
            "deviation": str(self.deviation),
            "bound": str(self.bound),
            "size": self.size,
        }


def _plan(point: RationalVector):
    g = point.host
    k = overlap_order(g)
    membership = contains(g, point)
    if not membership:
        raise NotInPolytopeError(
            f"point is not in the cycle polytope: {membership.violation}",
            violation=membership.violation,
        )
    ei = g.edge_index
    cert = sorted(membership.certificate, key=lambda wc: [ei[e] for e in wc[1].edges])
    # scale so every lambda_C * m * L / |C| is an integer
    scale = lcm(*((w / len(c)).denominator for w, c in cert))
    return g, k, cert, scale


def _realize_plan(point, g, k, cert, scale, m) -> TargetRealization:
    blocks = []
    residual = Fraction(0)
    for w, c in cert:
        exact = w * m * scale / len(c)
        reps = exact.numerator // exact.denominator
        residual += (exact - reps) * len(c)
        if reps >= 1:
            blocks.append((c, reps))
    if not blocks:
        raise InvalidInputError("m too small: every cycle block rounds to zero copies")
    sigma = direct_sum(cycle_sequence(c, reps, k) for c, reps in blocks)
    n = len(sigma)
    counts = cocc_counts(sigma, k)
    achieved = RationalVector(g, tuple(Fraction(counts.get(e.label, 0), n) for e in g.edges))
    bound = (len(blocks) * (k - 1) + residual) / n
    return TargetRealization(sigma, point, achieved, bound, tuple(blocks))


def target_sequence(point: RationalVector, m: int) -> TargetRealization:
    """The ``m``-th permutation of a sequence whose window proportions tend to ``point``.

    Each cycle ``C`` of the membership certificate, with weight ``w``, is
    repeated ``w*m*L/|C|`` times (``L`` clears all denominators) and the blocks
    are direct-summed. ``bound`` is an exact upper bound on the largest
    coordinate deviation, ``(blocks*(k-1) + rounding residual) / size``.
    """
    if not isinstance(m, int) or m < 1:
        raise InvalidInputError(f"m must be a positive integer, got {m!r}")
    g, k, cert, scale = _plan(point)
    return _realize_plan(point, g, k, cert, scale, m)


def target_sequence_of_size(point: RationalVector, size: int) -> TargetRealization:
    """Smallest ``m`` whose :func:`target_sequence` output has at least ``size`` entries."""
    g, k, cert, scale = _plan(point)
    overhead = len(cert) * (k - 1)
    m = max(1, -(-(size - overhead) // scale))
    return _realize_plan(point, g, k, cert, scale, m)
