"""Bin packing of site quantities into capacity-Q groups.

Items are identified by their position in the input list; ties in size are
always broken toward the lower index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .errors import ItemTooLargeError, ParameterError, SizeLimitError

FIT_TOL = 1e-9
EXACT_LIMIT = 20
APTAS_BUDGET = 10**7


@dataclass
class Packing:
    bins: list[list[int]]
    loads: list[float]
    flags: list[str] = field(default_factory=list)

    def __len__(self):
        return len(self.bins)

    @classmethod
    def from_bins(cls, bins, sizes, flags=None) -> "Packing":
        bins = [list(b) for b in bins if b]
        return cls(bins, [sum(sizes[i] for i in b) for b in bins], list(flags or []))


def _check(sizes: Sequence[float], capacity: float) -> None:
    if not capacity > 0:
        raise ParameterError(f"capacity must be positive, got {capacity}")
    for i, q in enumerate(sizes):
        if q < 0:
            raise ParameterError(f"item {i} has negative size {q}")
        if q > capacity + FIT_TOL:
            raise ItemTooLargeError(i, q, capacity)


def _decreasing(sizes, items=None):
    items = range(len(sizes)) if items is None else items
    return sorted(items, key=lambda i: (-sizes[i], i))


def _first_fit(order, sizes, capacity, bins, loads):
    for i in order:
        q = sizes[i]
        for b in range(len(bins)):
            if loads[b] + q <= capacity + FIT_TOL:
                bins[b].append(i)
                loads[b] += q
                break
        else:
            bins.append([i])
            loads.append(q)


def pack_ffd(sizes: Sequence[float], capacity: float) -> Packing:
    """First-fit decreasing."""
    _check(sizes, capacity)
    bins: list[list[int]] = []
    loads: list[float] = []
    _first_fit(_decreasing(sizes), sizes, capacity, bins, loads)
    return Packing(bins, loads)


def pack_mffd(sizes: Sequence[float], capacity: float) -> Packing:
    """Modified first-fit decreasing of Johnson and Garey.

    Items are classed by size relative to Q: A (> 1/2), B (1/3, 1/2],
    C (1/6, 1/3] and the rest.  A-items open one bin each; B-items are then
    matched forward to A-bins (largest B that fits), pairs of C-items are
    matched backward into the A-bins left without a B, and finally FFD packs
    whatever remains into all bins.
    """
    _check(sizes, capacity)
    order = _decreasing(sizes)
    frac = [q / capacity for q in sizes]
    a_items = [i for i in order if frac[i] > 0.5]
    b_items = [i for i in order if 1 / 3 < frac[i] <= 0.5]
    c_items = [i for i in order if 1 / 6 < frac[i] <= 1 / 3]
    placed = set()

    bins = [[i] for i in a_items]
    loads = [sizes[i] for i in a_items]
    got_b = [False] * len(bins)

    # forward pass: largest remaining B that fits
    for b in range(len(bins)):
        for i in b_items:
            if i not in placed and loads[b] + sizes[i] <= capacity + FIT_TOL:
                bins[b].append(i)
                loads[b] += sizes[i]
                placed.add(i)
                got_b[b] = True
                break

    # backward pass over B-less A-bins: smallest C plus the largest C that fits with it
    for b in reversed(range(len(bins))):
        if got_b[b]:
            continue
        free_c = [i for i in c_items if i not in placed]
        if len(free_c) < 2:
            break
        smallest, second = free_c[-1], free_c[-2]
        if loads[b] + sizes[smallest] + sizes[second] > capacity + FIT_TOL:
            continue
        room = capacity - loads[b] - sizes[smallest]
        partner = next(i for i in free_c[:-1] if sizes[i] <= room + FIT_TOL)
        for i in (smallest, partner):
            bins[b].append(i)
            loads[b] += sizes[i]
            placed.add(i)

    _first_fit([i for i in order if i not in placed and i not in a_items], sizes, capacity, bins, loads)
    return Packing(bins, loads)


# ---------------------------------------------------------------- APTAS

def _configurations(type_sizes: list[float], capacity: float) -> list[tuple[int, ...]]:
    """All nonempty multisets of item types fitting in one bin."""
    k = len(type_sizes)
    out = []

    def rec(t, room, counts):
        if t == k:
            if any(counts):
                out.append(tuple(counts))
            return
        c = 0
        while True:
            counts.append(c)
            rec(t + 1, room - c * type_sizes[t], counts)
            counts.pop()
            c += 1
            if c * type_sizes[t] > room + FIT_TOL:
                break

    rec(0, capacity, [])
    return out


def _min_bins_for_demand(demand: tuple[int, ...], configs: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Exact minimum list of configurations covering ``demand``.

    Configurations may over-cover; surplus slots are simply left empty.  Each
    bin is required to hold one item of the first type still demanded, which
    loses no optimality and prunes symmetric branches.
    """
    by_first: dict[int, list[tuple[int, ...]]] = {}
    for c in configs:
        for t, v in enumerate(c):
            if v:
                by_first.setdefault(t, []).append(c)

    @lru_cache(maxsize=None)
    def best(dem):
        first = next((t for t, v in enumerate(dem) if v), None)
        if first is None:
            return ()
        result = None
        seen = set()
        for c in by_first.get(first, ()):
            rest = tuple(max(0, d - v) for d, v in zip(dem, c))
            if rest in seen:
                continue
            seen.add(rest)
            sub = best(rest)
            if result is None or len(sub) + 1 < len(result):
                result = (c,) + sub
        return result

    try:
        return list(best(demand))
    finally:
        best.cache_clear()


def pack_aptas(sizes: Sequence[float], capacity: float, eta: float,
               budget: int = APTAS_BUDGET) -> Packing:
    """Asymptotic PTAS (de la Vega and Lueker) with linear grouping.

    Items above ``eta * Q`` are sorted, cut into groups of ``floor(eta^2 * L)``
    consecutive items (L = number of large items), rounded up to their group
    maximum and packed optimally over bin configurations.  Small items are then
    added first-fit in decreasing order.  When the configuration search would
    exceed ``budget`` steps the large items go through MFFD instead and the
    packing carries the ``aptas_fallback`` flag.
    """
    if not 0 < eta < 1:
        raise ParameterError(f"eta must lie in (0, 1), got {eta}")
    _check(sizes, capacity)
    threshold = eta * capacity
    order = _decreasing(sizes)
    large = [i for i in order if sizes[i] > threshold]
    small = [i for i in order if sizes[i] <= threshold]
    flags: list[str] = []

    bins: list[list[int]] = []
    if large:
        group = max(1, math.floor(eta * eta * len(large)))
        groups = [large[g:g + group] for g in range(0, len(large), group)]
        # merge equal rounded sizes so the demand vector stays short
        type_size: list[float] = []
        type_items: list[list[int]] = []
        for g in groups:
            top = sizes[g[0]]
            if type_size and type_size[-1] == top:
                type_items[-1].extend(g)
            else:
                type_size.append(top)
                type_items.append(list(g))
        demand = tuple(len(t) for t in type_items)
        configs = _configurations(type_size, capacity)
        states = math.prod(d + 1 for d in demand)
        if states * max(1, len(configs)) > budget:
            flags.append("aptas_fallback")
            sub = pack_mffd([sizes[i] for i in large], capacity)
            bins = [[large[j] for j in b] for b in sub.bins]
        else:
            queues = [list(t) for t in type_items]
            for conf in _min_bins_for_demand(demand, configs):
                b = []
                for t, count in enumerate(conf):
                    for _ in range(count):
                        if queues[t]:
                            b.append(queues[t].pop(0))
                bins.append(b)

    loads = [sum(sizes[i] for i in b) for b in bins]
    _first_fit(small, sizes, capacity, bins, loads)
    return Packing(bins, loads, flags)


# ---------------------------------------------------------------- exact

def lower_bound_l1(sizes: Sequence[float], capacity: float) -> int:
    total = sum(sizes)
    return math.ceil(total / capacity - FIT_TOL) if total > 0 else 0


def _lower_bound_l2(sizes: list[float], capacity: float) -> int:
    """Martello-Toth L2 bound over the given sizes."""
    best = lower_bound_l1(sizes, capacity)
    half = capacity / 2
    for k in sorted({q for q in sizes if q <= half + FIT_TOL} | {0.0}):
        big = [q for q in sizes if q > capacity - k + FIT_TOL]
        mid = [q for q in sizes if half < q <= capacity - k + FIT_TOL]
        small = [q for q in sizes if k - FIT_TOL <= q <= half + FIT_TOL]
        free = len(mid) * capacity - sum(mid)
        extra = max(0.0, sum(small) - free)
        lb = len(big) + len(mid) + (math.ceil(extra / capacity - FIT_TOL) if extra > 0 else 0)
        best = max(best, lb)
    return best


def pack_exact(sizes: Sequence[float], capacity: float, limit: int = EXACT_LIMIT) -> Packing:
    """Minimum-bin packing by depth-first branch and bound (n <= ``limit``)."""
    _check(sizes, capacity)
    if len(sizes) > limit:
        raise SizeLimitError(f"exact packing limited to {limit} items, got {len(sizes)}")
    incumbent = pack_ffd(sizes, capacity)
    positive = [i for i in _decreasing(sizes) if sizes[i] > 0]
    zeros = [i for i in range(len(sizes)) if sizes[i] <= 0]
    lb = _lower_bound_l2([sizes[i] for i in positive], capacity)
    if len(incumbent) <= lb:
        return incumbent

    best_bins = [b for b in ([i for i in b if sizes[i] > 0] for b in incumbent.bins) if b]
    best_count = len(best_bins)
    bins: list[list[int]] = []
    loads: list[float] = []
    suffix = [0.0] * (len(positive) + 1)
    for k in range(len(positive) - 1, -1, -1):
        suffix[k] = suffix[k + 1] + sizes[positive[k]]

    def dfs(k):
        nonlocal best_bins, best_count
        if best_count <= lb:
            return
        if k == len(positive):
            if len(bins) < best_count:
                best_count = len(bins)
                best_bins = [list(b) for b in bins]
            return
        free = sum(capacity - l for l in loads)
        need = max(0.0, suffix[k] - free)
        if len(bins) + (math.ceil(need / capacity - FIT_TOL) if need > 0 else 0) >= best_count:
            return
        i = positive[k]
        q = sizes[i]
        tried = set()
        for b in range(len(bins)):
            key = round(loads[b], 9)
            if key in tried or loads[b] + q > capacity + FIT_TOL:
                continue
            tried.add(key)
            bins[b].append(i)
            loads[b] += q
            dfs(k + 1)
            loads[b] -= q
            bins[b].pop()
        if len(bins) + 1 < best_count:
            bins.append([i])
            loads.append(q)
            dfs(k + 1)
            bins.pop()
            loads.pop()

    dfs(0)
    if zeros:
        if best_bins:
            best_bins[0].extend(zeros)
        else:
            best_bins = [zeros]
    return Packing.from_bins(best_bins, sizes)
