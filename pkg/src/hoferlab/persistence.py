"""Barcodes, delta-matchings, bottleneck distance and barcode invariants.

Bars are half-open intervals ``(left, right]`` with ``right`` possibly
``math.inf``.  A :class:`Barcode` is a finite multiset of bars kept in a
canonical order (by left endpoint, then right endpoint), with repeated
intervals merged into a multiplicity.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

__all__ = [
    "Bar",
    "Barcode",
    "Matching",
    "MalformedMatchingError",
    "is_delta_matching",
    "bottleneck_distance",
    "bottleneck_matching",
    "bottleneck_bruteforce",
    "boundary_depth",
    "spectral_invariants",
    "random_barcode",
]


class MalformedMatchingError(ValueError):
    """A matching refers to a bar copy that does not exist or uses one twice."""


@dataclass(frozen=True, order=True)
class Bar:
    left: float
    right: float
    multiplicity: int = 1

    def __post_init__(self):
        left, right = float(self.left), float(self.right)
        if not math.isfinite(left):
            raise ValueError(f"left endpoint must be finite, got {left}")
        if math.isnan(right) or right == -math.inf:
            raise ValueError(f"invalid right endpoint {right}")
        if not left < right:
            raise ValueError(f"bar requires left < right, got ({left}, {right}]")
        if int(self.multiplicity) != self.multiplicity or self.multiplicity < 1:
            raise ValueError(f"multiplicity must be a positive integer, got {self.multiplicity}")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "multiplicity", int(self.multiplicity))

    @property
    def is_infinite(self) -> bool:
        return self.right == math.inf

    @property
    def length(self) -> float:
        return self.right - self.left


class Barcode:
    """Finite multiset of bars.

    Parameters
    ----------
    bars : iterable of Bar or (left, right) or (left, right, multiplicity)
    """

    __slots__ = ("_bars",)

    def __init__(self, bars: Iterable = ()):
        counts: dict[tuple[float, float], int] = {}
        for item in bars:
            bar = item if isinstance(item, Bar) else Bar(*item)
            key = (bar.left, bar.right)
            counts[key] = counts.get(key, 0) + bar.multiplicity
        self._bars = tuple(Bar(l, r, m) for (l, r), m in sorted(counts.items()))

    @property
    def bars(self) -> tuple[Bar, ...]:
        return self._bars

    def expanded(self) -> list[tuple[float, float]]:
        """One ``(left, right)`` entry per bar copy, in canonical order."""
        return [(b.left, b.right) for b in self._bars for _ in range(b.multiplicity)]

    def __len__(self):
        return sum(b.multiplicity for b in self._bars)

    def __iter__(self):
        return iter(self._bars)

    def __eq__(self, other):
        if not isinstance(other, Barcode):
            return NotImplemented
        return self._bars == other._bars

    def __hash__(self):
        return hash(self._bars)

    def __repr__(self):
        inner = ", ".join(
            f"({b.left:g}, {b.right:g}]" + (f"x{b.multiplicity}" if b.multiplicity > 1 else "")
            for b in self._bars
        )
        return f"Barcode({{{inner}}})"

    def infinite_part(self) -> "Barcode":
        return Barcode(b for b in self._bars if b.is_infinite)

    def finite_part(self) -> "Barcode":
        return Barcode(b for b in self._bars if not b.is_infinite)

    def shifted(self, c: float) -> "Barcode":
        return Barcode(Bar(b.left + c, b.right + c, b.multiplicity) for b in self._bars)

    # JSON interchange: {"bars": [{"left": 0.0, "right": "inf"}, ...]}
    def to_json(self) -> dict:
        out = []
        for b in self._bars:
            entry = {"left": b.left, "right": "inf" if b.is_infinite else b.right}
            if b.multiplicity != 1:
                entry["multiplicity"] = b.multiplicity
            out.append(entry)
        return {"bars": out}

    @classmethod
    def from_json(cls, data: dict) -> "Barcode":
        bars = []
        for entry in data["bars"]:
            right = entry["right"]
            right = math.inf if right in ("inf", "+inf", "Infinity") else float(right)
            bars.append(Bar(float(entry["left"]), right, int(entry.get("multiplicity", 1))))
        return cls(bars)


@dataclass(frozen=True)
class Matching:
    """Pairs ``(i, j)`` of indices into ``B.expanded()`` and ``C.expanded()``."""

    pairs: frozenset = frozenset()

    def __init__(self, pairs: Iterable[tuple[int, int]] = ()):
        object.__setattr__(self, "pairs", frozenset((int(i), int(j)) for i, j in pairs))


def _gap(x: float, y: float) -> float:
    if x == y:  # covers inf == inf
        return 0.0
    return abs(x - y)


def _match_cost(p: tuple[float, float], q: tuple[float, float]) -> float:
    if math.isinf(p[1]) != math.isinf(q[1]):
        return math.inf
    return max(_gap(p[0], q[0]), _gap(p[1], q[1]))


def _half_length(p: tuple[float, float]) -> float:
    return (p[1] - p[0]) / 2


def _check_matching(nb: int, nc: int, mu: Matching) -> None:
    left_used, right_used = set(), set()
    for i, j in mu.pairs:
        if not (0 <= i < nb and 0 <= j < nc):
            raise MalformedMatchingError(f"pair {(i, j)} out of range for sizes {(nb, nc)}")
        if i in left_used or j in right_used:
            raise MalformedMatchingError(f"bar copy used twice in pair {(i, j)}")
        left_used.add(i)
        right_used.add(j)


def is_delta_matching(B: Barcode, C: Barcode, mu: Matching, delta: float) -> bool:
    X, Y = B.expanded(), C.expanded()
    _check_matching(len(X), len(Y), mu)
    for i, j in mu.pairs:
        if _match_cost(X[i], Y[j]) > delta:
            return False
    matched_x = {i for i, _ in mu.pairs}
    matched_y = {j for _, j in mu.pairs}
    for idx, p in enumerate(X):
        if idx not in matched_x and p[1] - p[0] > 2 * delta:
            return False
    for idx, q in enumerate(Y):
        if idx not in matched_y and q[1] - q[0] > 2 * delta:
            return False
    return True


def _feasible_matching(X, Y, delta: float) -> Matching | None:
    """Perfect matching in the diagonal-augmented bipartite graph, if any."""
    p, q = len(X), len(Y)
    size = p + q
    if size == 0:
        return Matching()
    rows, cols = [], []
    # left nodes: X[0..p), diag(Y)[p..p+q); right nodes: Y[0..q), diag(X)[q..q+p)
    for i, a in enumerate(X):
        for j, b in enumerate(Y):
            if _match_cost(a, b) <= delta:
                rows.append(i)
                cols.append(j)
        if a[1] - a[0] <= 2 * delta:
            rows.append(i)
            cols.append(q + i)
    for j, b in enumerate(Y):
        if b[1] - b[0] <= 2 * delta:
            rows.append(p + j)
            cols.append(j)
        for i in range(p):
            rows.append(p + j)
            cols.append(q + i)
    graph = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(size, size))
    match = maximum_bipartite_matching(graph, perm_type="column")
    if np.any(match < 0):
        return None
    return Matching((i, int(match[i])) for i in range(p) if match[i] < q)


def bottleneck_matching(B: Barcode, C: Barcode) -> tuple[float, Matching | None]:
    """Bottleneck distance together with an optimal matching certificate.

    Returns ``(inf, None)`` when the barcodes carry different numbers of
    infinite bars.
    """
    X, Y = B.expanded(), C.expanded()
    if sum(math.isinf(r) for _, r in X) != sum(math.isinf(r) for _, r in Y):
        return math.inf, None
    candidates = {0.0}
    for a in X:
        for b in Y:
            cost = _match_cost(a, b)
            if math.isfinite(cost):
                candidates.add(cost)
    for p in itertools.chain(X, Y):
        if math.isfinite(p[1]):
            candidates.add(_half_length(p))
    cand = sorted(candidates)
    lo, hi = 0, len(cand) - 1
    best = _feasible_matching(X, Y, cand[hi])
    assert best is not None
    while lo < hi:
        mid = (lo + hi) // 2
        found = _feasible_matching(X, Y, cand[mid])
        if found is None:
            lo = mid + 1
        else:
            hi, best = mid, found
    return cand[lo], best


def bottleneck_distance(B: Barcode, C: Barcode) -> float:
    return bottleneck_matching(B, C)[0]


def bottleneck_bruteforce(B: Barcode, C: Barcode) -> float:
    """Minimum over every partial matching; exponential, for small barcodes only."""
    X, Y = B.expanded(), C.expanded()
    best = math.inf

    def unmatched_cost(p):
        return _half_length(p) if math.isfinite(p[1]) else math.inf

    def rec(i: int, used: tuple[bool, ...], cost: float):
        nonlocal best
        if cost >= best:
            return
        if i == len(X):
            rest = max((unmatched_cost(Y[j]) for j in range(len(Y)) if not used[j]), default=0.0)
            best = min(best, max(cost, rest))
            return
        rec(i + 1, used, max(cost, unmatched_cost(X[i])))
        for j in range(len(Y)):
            if not used[j]:
                rec(i + 1, used[:j] + (True,) + used[j + 1:], max(cost, _match_cost(X[i], Y[j])))

    rec(0, (False,) * len(Y), 0.0)
    return best


def boundary_depth(B: Barcode) -> float:
    return max((b.length for b in B if not b.is_infinite), default=0.0)


def spectral_invariants(B: Barcode) -> list[float]:
    """Left endpoints of the infinite bars, ascending, with multiplicity."""
    return sorted(b.left for b in B if b.is_infinite for _ in range(b.multiplicity))


def random_barcode(rng: np.random.Generator, max_bars: int = 5, *, inf_prob: float = 0.2,
                   lattice: int | None = None) -> Barcode:
    """Random barcode with up to ``max_bars`` bars.

    With ``lattice`` the endpoints are drawn from ``{0, ..., lattice}`` so
    ties and repeated bars are common.
    """
    bars = []
    for _ in range(int(rng.integers(0, max_bars + 1))):
        if lattice is None:
            left = float(rng.uniform(0, 10))
            right = left + float(rng.exponential(2.0)) + 1e-3
        else:
            left = float(rng.integers(0, lattice))
            right = left + float(rng.integers(1, lattice + 1))
        bars.append(Bar(left, math.inf if rng.random() < inf_prob else right))
    return Barcode(bars)
