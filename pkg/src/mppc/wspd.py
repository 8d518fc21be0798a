"""Split trees and well-separated pair decompositions of planar point sets.

Two point sets A, B are s-separated when the gap between the enclosing
balls of their bounding boxes is at least s times the larger ball
diameter.  Every unordered pair of distinct points is covered by exactly
one pair of the decomposition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import ParameterError

S_MIN = 0.1
S_MAX = 64.0


@dataclass
class SplitNode:
    index: int
    ids: tuple[int, ...]
    lo: tuple[float, float]
    hi: tuple[float, float]
    left: Optional["SplitNode"] = None
    right: Optional["SplitNode"] = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    @property
    def center(self) -> tuple[float, float]:
        return ((self.lo[0] + self.hi[0]) / 2, (self.lo[1] + self.hi[1]) / 2)

    @property
    def radius(self) -> float:
        return math.hypot(self.hi[0] - self.lo[0], self.hi[1] - self.lo[1]) / 2


@dataclass
class SplitTree:
    root: SplitNode
    nodes: list[SplitNode]
    points: list[tuple[float, float]]


@dataclass(frozen=True)
class WspdPair:
    a: tuple[int, ...]
    b: tuple[int, ...]
    a_node: int
    b_node: int

    @property
    def size(self) -> int:
        return len(self.a) + len(self.b)


def build_split_tree(points: Sequence[Sequence[float]]) -> SplitTree:
    """Fair split tree: halve the longest bounding-box side at its midpoint.

    Ties between sides go to the x axis.  A box that has collapsed to a
    point (duplicate coordinates) is split by index parity instead.
    """
    pts = [(float(p[0]), float(p[1])) for p in points]
    if not pts:
        raise ParameterError("split tree needs at least one point")
    nodes: list[SplitNode] = []

    def build(ids):
        xs = [pts[i][0] for i in ids]
        ys = [pts[i][1] for i in ids]
        node = SplitNode(len(nodes), tuple(ids), (min(xs), min(ys)), (max(xs), max(ys)))
        nodes.append(node)
        if len(ids) == 1:
            return node
        widths = (node.hi[0] - node.lo[0], node.hi[1] - node.lo[1])
        if max(widths) == 0:
            left, right = ids[0::2], ids[1::2]
        else:
            axis = 0 if widths[0] >= widths[1] else 1
            mid = (node.lo[axis] + node.hi[axis]) / 2
            left = [i for i in ids if pts[i][axis] <= mid]
            right = [i for i in ids if pts[i][axis] > mid]
        node.left = build(left)
        node.right = build(right)
        return node

    root = build(list(range(len(pts))))
    return SplitTree(root, nodes, pts)


def well_separated(u: SplitNode, v: SplitNode, s: float) -> bool:
    ru, rv = u.radius, v.radius
    (ux, uy), (vx, vy) = u.center, v.center
    return math.hypot(ux - vx, uy - vy) - ru - rv >= s * 2 * max(ru, rv)


def compute_wspd(tree: SplitTree, s: float) -> list[WspdPair]:
    if not s > 0:
        raise ParameterError(f"separation must be positive, got {s}")
    pairs: list[WspdPair] = []

    def find(u, v):
        stack = [(u, v)]
        while stack:
            u, v = stack.pop()
            if well_separated(u, v, s):
                pairs.append(WspdPair(u.ids, v.ids, u.index, v.index))
                continue
            # zero-radius nodes are always separated, so the split side is internal
            if u.radius < v.radius:
                stack.append((u, v.right))
                stack.append((u, v.left))
            else:
                stack.append((u.right, v))
                stack.append((u.left, v))

    for node in tree.nodes:
        if not node.is_leaf:
            find(node.left, node.right)
    return pairs


@dataclass(frozen=True)
class SeparationCalibration:
    s: float
    pairs: int
    target: int
    clamped_low: bool = False

    @property
    def exact(self) -> bool:
        return self.pairs == self.target


def calibrate_separation(points: Sequence[Sequence[float]], target_m: int,
                         iterations: int = 60) -> SeparationCalibration:
    """Largest s in [0.1, 64] whose decomposition has at most ``target_m`` pairs.

    Bisection assumes the pair count grows with s.  When even s = 0.1 yields
    too many pairs the result is clamped to 0.1 and flagged.
    """
    if target_m < 1:
        raise ParameterError(f"target pair count must be >= 1, got {target_m}")
    tree = build_split_tree(points)

    def count(s):
        return len(compute_wspd(tree, s))

    hi_count = count(S_MAX)
    if hi_count <= target_m:
        return SeparationCalibration(S_MAX, hi_count, target_m)
    lo_count = count(S_MIN)
    if lo_count > target_m:
        return SeparationCalibration(S_MIN, lo_count, target_m, clamped_low=True)
    lo, hi = S_MIN, S_MAX
    for _ in range(iterations):
        mid = (lo + hi) / 2
        c = count(mid)
        if c <= target_m:
            lo, lo_count = mid, c
        else:
            hi = mid
    return SeparationCalibration(lo, lo_count, target_m)
