"""Permutations, classical and consecutive pattern counts, direct sums and inflations.

Permutations are stored in one-line notation as tuples of ints ``1..n``.
Counts are Python ints, proportions are :class:`fractions.Fraction`.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Sequence

from .errors import InvalidInputError

__all__ = [
    "Permutation",
    "pattern_of",
    "all_permutations",
    "identity",
    "decreasing",
    "occ",
    "occ_counts",
    "cocc",
    "cocc_counts",
    "occ_tilde",
    "cocc_tilde",
    "direct_sum",
    "inflate",
]


@dataclass(frozen=True, order=True)
class Permutation:
    """A permutation of ``{1..n}`` in one-line notation."""

    values: tuple[int, ...]

    def __post_init__(self):
        values = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", values)
        n = len(values)
        if n == 0:
            raise InvalidInputError("a permutation has size at least 1")
        if sorted(values) != list(range(1, n + 1)):
            raise InvalidInputError(f"not a permutation of 1..{n}: {values[:20]}")

    @classmethod
    def parse(cls, text: str) -> Permutation:
        """Parse ``"72638145"`` (sizes up to 9) or ``"7,2,6,3,8,1,4,5"``."""
        text = text.strip()
        if not text:
            raise InvalidInputError("empty permutation string")
        try:
            if "," in text:
                values = tuple(int(tok) for tok in text.split(","))
            elif " " in text:
                values = tuple(int(tok) for tok in text.split())
            else:
                if len(text) > 9:
                    raise InvalidInputError(
                        f"contiguous digit notation only allowed up to size 9: {text!r}"
                    )
                values = tuple(int(ch) for ch in text)
        except ValueError as exc:
            raise InvalidInputError(f"cannot parse permutation {text!r}") from exc
        return cls(values)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, item):
        return self.values[item]

    def __str__(self) -> str:
        if len(self.values) <= 9:
            return "".join(map(str, self.values))
        return ",".join(map(str, self.values))

    def __repr__(self) -> str:
        return f"Permutation({str(self)!r})"


def _ranks(window: Sequence) -> tuple[int, ...]:
    order = sorted(range(len(window)), key=window.__getitem__)
    ranks = [0] * len(window)
    for r, i in enumerate(order, start=1):
        ranks[i] = r
    return tuple(ranks)


def pattern_of(window: Sequence) -> Permutation:
    """Return the permutation with the same relative order as ``window``.

    >>> str(pattern_of((7, 2, 6)))
    '312'
    """
    window = tuple(window)
    if not window:
        raise InvalidInputError("pattern_of needs a non-empty window")
    if len(set(window)) != len(window):
        raise InvalidInputError(f"window entries must be distinct: {window}")
    return Permutation(_ranks(window))


@lru_cache(maxsize=None)
def all_permutations(k: int) -> tuple[Permutation, ...]:
    """All elements of S_k in lexicographic order."""
    if k < 1:
        raise InvalidInputError(f"k must be positive, got {k}")
    return tuple(Permutation(p) for p in itertools.permutations(range(1, k + 1)))


def identity(n: int) -> Permutation:
    return Permutation(tuple(range(1, n + 1)))


def decreasing(n: int) -> Permutation:
    return Permutation(tuple(range(n, 0, -1)))


def _as_perm(p) -> Permutation:
    if isinstance(p, Permutation):
        return p
    if isinstance(p, str):
        return Permutation.parse(p)
    return Permutation(tuple(p))


# ---------------------------------------------------------------------------
# classical occurrences


def _stats_and_132(vals: Sequence[int]):
    """Divide and conquer over positions.

    Returns ``(e_lt, e_gt, a_gt, n132)`` where for each position ``e_lt``/``e_gt``
    count earlier smaller/greater entries, ``a_gt`` counts later greater entries
    and ``n132`` is the number of occurrences of 132.
    """
    n = len(vals)
    e_lt = [0] * n
    e_gt = [0] * n
    a_gt = [0] * n
    total = 0

    # bottom-up merge sort; runs hold positions sorted by value
    runs = [[i] for i in range(n)]
    while len(runs) > 1:
        merged = []
        for r in range(0, len(runs) - 1, 2):
            left, right = runs[r], runs[r + 1]
            nl = len(left)
            # prefix sums of (a_gt - e_lt) over left sorted by value, for pairs
            # i<j in left with v_i < x < v_j
            pref = [0] * (nl + 1)
            for idx, p in enumerate(left):
                pref[idx + 1] = pref[idx] + a_gt[p] - e_lt[p]
            out = []
            li = 0
            for q in right:
                x = vals[q]
                while li < nl and vals[left[li]] < x:
                    out.append(left[li])
                    li += 1
                # li = number of left values below x
                total += e_gt[q] * li + pref[li]
                e_lt[q] += li
                e_gt[q] += nl - li
                out.append(q)
            out.extend(left[li:])
            # later-greater for left elements: right values above each
            ri = len(right)
            nr = len(right)
            for p in reversed(left):
                while ri > 0 and vals[right[ri - 1]] > vals[p]:
                    ri -= 1
                a_gt[p] += nr - ri
            merged.append(out)
        if len(runs) % 2:
            merged.append(runs[-1])
        runs = merged
    return e_lt, e_gt, a_gt, total


def _occ_counts_small(values: Sequence[int], k: int) -> dict[Permutation, int]:
    n = len(values)
    if k == 1:
        return {identity(1): n}
    e_lt, e_gt, a_gt, n132 = _stats_and_132(values)
    if k == 2:
        inv = sum(e_gt)
        return {identity(2): comb(n, 2) - inv, decreasing(2): inv}
    a_lt = [(n - 1 - j) - a_gt[j] for j in range(n)]
    n123 = sum(x * y for x, y in zip(e_lt, a_gt))
    n321 = sum(x * y for x, y in zip(e_gt, a_lt))
    mid_max = sum(x * y for x, y in zip(e_lt, a_lt))  # 132 + 231
    mid_min = sum(x * y for x, y in zip(e_gt, a_gt))  # 213 + 312
    last_mid = sum(x * y for x, y in zip(e_lt, e_gt))  # 132 + 312
    n231 = mid_max - n132
    n312 = last_mid - n132
    n213 = mid_min - n312
    P = Permutation
    return {
        P((1, 2, 3)): n123,
        P((1, 3, 2)): n132,
        P((2, 1, 3)): n213,
        P((2, 3, 1)): n231,
        P((3, 1, 2)): n312,
        P((3, 2, 1)): n321,
    }


@lru_cache(maxsize=None)
def _dp_plan(pi: tuple[int, ...]):
    """Precompute, for each prefix length j, the gap each next entry must fall in
    and which chosen entries (by rank) have to be remembered."""
    k = len(pi)
    need = []
    for j in range(k + 1):
        prefix = sorted(pi[:j])
        ranks = set()
        for r in range(j, k):
            below = sum(1 for p in prefix if p < pi[r])
            if below >= 1:
                ranks.add(below)
            if below + 1 <= j:
                ranks.add(below + 1)
        need.append(tuple(sorted(ranks)))
    steps = []
    for j in range(k):
        prefix = sorted(pi[:j])
        below = sum(1 for p in prefix if p < pi[j])
        lo = need[j].index(below) if below >= 1 else None
        hi = need[j].index(below + 1) if below + 1 <= j else None
        new_rank = below + 1  # rank of pi[j] among pi[:j+1]
        src = []
        for q in need[j + 1]:
            if q == new_rank:
                src.append(-1)
            else:
                old = q if q < new_rank else q - 1
                src.append(need[j].index(old))
        steps.append((lo, hi, tuple(src)))
    return tuple(steps)


def _occ_dp(pi: tuple[int, ...], values: Sequence[int]) -> int:
    """Prefix dynamic programme: states are the chosen values that still bound
    a gap some later pattern entry has to land in."""
    k = len(pi)
    steps = _dp_plan(pi)
    levels: list[Counter] = [Counter() for _ in range(k)]
    levels[0][()] = 1
    total = 0
    for x in values:
        for j in range(k - 1, -1, -1):
            lo, hi, src = steps[j]
            level = levels[j]
            if not level:
                continue
            for state, cnt in list(level.items()):
                if lo is not None and not state[lo] < x:
                    continue
                if hi is not None and not x < state[hi]:
                    continue
                if j + 1 == k:
                    total += cnt
                else:
                    new = tuple(x if s < 0 else state[s] for s in src)
                    levels[j + 1][new] += cnt
    return total


def occ_counts(sigma, k: int) -> dict[Permutation, int]:
    """Classical occurrence counts of every pattern of size ``k`` in ``sigma``."""
    sigma = _as_perm(sigma)
    n = len(sigma)
    if k < 1:
        raise InvalidInputError(f"k must be positive, got {k}")
    if k > n:
        return {pi: 0 for pi in all_permutations(k)}
    if k <= 3:
        return _occ_counts_small(sigma.values, k)
    return {pi: _occ_dp(pi.values, sigma.values) for pi in all_permutations(k)}


def occ(pi, sigma) -> int:
    """Number of classical occurrences of ``pi`` in ``sigma``.

    >>> occ("132", "72638145")
    7
    """
    pi, sigma = _as_perm(pi), _as_perm(sigma)
    k = len(pi)
    if k > len(sigma):
        return 0
    if k <= 3:
        return _occ_counts_small(sigma.values, k)[pi]
    return _occ_dp(pi.values, sigma.values)


# ---------------------------------------------------------------------------
# consecutive occurrences


def cocc_counts(sigma, k: int) -> Counter:
    """Consecutive occurrence counts (missing patterns count 0)."""
    sigma = _as_perm(sigma)
    if k < 1:
        raise InvalidInputError(f"k must be positive, got {k}")
    vals = sigma.values
    counts: Counter = Counter()
    for i in range(len(vals) - k + 1):
        counts[_ranks(vals[i : i + k])] += 1
    return Counter({Permutation(r): c for r, c in counts.items()})


def cocc(pi, sigma) -> int:
    """Number of windows of ``sigma`` with the same relative order as ``pi``."""
    pi, sigma = _as_perm(pi), _as_perm(sigma)
    k = len(pi)
    target = pi.values
    vals = sigma.values
    return sum(1 for i in range(len(vals) - k + 1) if _ranks(vals[i : i + k]) == target)


def occ_tilde(pi, sigma) -> Fraction:
    """``occ(pi, sigma) / C(n, k)``."""
    pi, sigma = _as_perm(pi), _as_perm(sigma)
    if len(pi) > len(sigma):
        raise InvalidInputError(f"pattern of size {len(pi)} larger than permutation of size {len(sigma)}")
    return Fraction(occ(pi, sigma), comb(len(sigma), len(pi)))


def cocc_tilde(pi, sigma) -> Fraction:
    """``cocc(pi, sigma) / n`` -- divided by ``n``, not by the window count."""
    pi, sigma = _as_perm(pi), _as_perm(sigma)
    if len(pi) > len(sigma):
        raise InvalidInputError(f"pattern of size {len(pi)} larger than permutation of size {len(sigma)}")
    return Fraction(cocc(pi, sigma), len(sigma))


# ---------------------------------------------------------------------------
# constructions


def direct_sum(parts: Iterable) -> Permutation:
    """Concatenate ``parts`` left to right, shifting values above earlier blocks.

    >>> str(direct_sum(["132", "21"]))
    '13254'
    """
    parts = [_as_perm(p) for p in parts]
    if not parts:
        raise InvalidInputError("direct_sum needs at least one part")
    out: list[int] = []
    shift = 0
    for p in parts:
        out.extend(v + shift for v in p.values)
        shift += len(p)
    return Permutation(tuple(out))


def inflate(sigma, parts: Sequence) -> Permutation:
    """The inflation ``sigma[parts[0], ..., parts[n-1]]``.

    Block ``i`` occupies the value interval whose relative position among the
    blocks is ``sigma(i)``.

    >>> str(inflate("21", ["12", "12"]))
    '3412'
    """
    sigma = _as_perm(sigma)
    parts = [_as_perm(p) for p in parts]
    if len(parts) != len(sigma):
        raise InvalidInputError(f"inflate needs {len(sigma)} parts, got {len(parts)}")
    # offset of block i = total size of blocks with smaller sigma value
    sizes_by_value = [0] * (len(sigma) + 1)
    for v, p in zip(sigma.values, parts):
        sizes_by_value[v] = len(p)
    offsets = list(itertools.accumulate(sizes_by_value))
    out: list[int] = []
    for v, p in zip(sigma.values, parts):
        base = offsets[v - 1]
        out.extend(base + x for x in p.values)
    return Permutation(tuple(out))
