"""F2 chain complexes filtered by an action value, and their barcodes.

The sublevel convention is strict: ``C^lam`` is spanned by the generators with
action ``< lam``.  A generator born at action ``a`` and killed by a generator at
action ``b`` contributes the bar ``(a, b]``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

import numpy as np

from .persistence import Bar, Barcode

__all__ = [
    "Generator",
    "FilteredComplex",
    "Violation",
    "InvalidComplexError",
    "validate",
    "reduce_to_barcode",
    "barcode_bruteforce",
    "homology_rank",
    "random_complex",
    "perturb_actions",
]


class InvalidComplexError(ValueError):
    pass


@dataclass(frozen=True)
class Generator:
    id: Hashable
    degree: int
    action: float


@dataclass(frozen=True)
class Violation:
    kind: str  # "d_squared", "degree", "action", "unknown_id", "duplicate_id"
    ids: tuple
    message: str


@dataclass(frozen=True)
class FilteredComplex:
    generators: tuple[Generator, ...]
    boundary: Mapping[Hashable, frozenset] = field(default_factory=dict)

    def __init__(self, generators: Iterable[Generator], boundary: Mapping | None = None):
        gens = tuple(generators)
        bd = {}
        for key, terms in (boundary or {}).items():
            # F2 coefficients: repeated terms cancel in pairs
            acc: set = set()
            for t in terms:
                acc ^= {t}
            if acc:
                bd[key] = frozenset(acc)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "boundary", bd)

    @property
    def ids(self) -> list:
        return [g.id for g in self.generators]

    def generator(self, gid) -> Generator:
        for g in self.generators:
            if g.id == gid:
                return g
        raise KeyError(gid)

    def d(self, gid) -> frozenset:
        return self.boundary.get(gid, frozenset())

    def to_json(self) -> dict:
        return {
            "generators": [
                {"id": str(g.id), "degree": g.degree, "action": g.action} for g in self.generators
            ],
            "boundary": {str(k): sorted(str(t) for t in v) for k, v in self.boundary.items()},
        }

    @classmethod
    def from_json(cls, data: dict | str) -> "FilteredComplex":
        if isinstance(data, str):
            data = json.loads(data)
        gens = [Generator(g["id"], int(g["degree"]), float(g["action"])) for g in data["generators"]]
        return cls(gens, {k: list(v) for k, v in data.get("boundary", {}).items()})


def validate(C: FilteredComplex) -> Violation | None:
    """First violation of the complex invariants, or ``None`` when valid."""
    by_id: dict = {}
    for g in C.generators:
        if g.id in by_id:
            return Violation("duplicate_id", (g.id,), f"generator id {g.id!r} repeated")
        by_id[g.id] = g
    for src, terms in C.boundary.items():
        if src not in by_id:
            return Violation("unknown_id", (src,), f"boundary of unknown generator {src!r}")
        for t in terms:
            if t not in by_id:
                return Violation("unknown_id", (src, t), f"d({src!r}) contains unknown {t!r}")
    for g in C.generators:
        for t in sorted(C.d(g.id), key=str):
            tgt = by_id[t]
            if tgt.degree != g.degree - 1:
                return Violation(
                    "degree", (g.id, t),
                    f"d({g.id!r}) hits {t!r} in degree {tgt.degree}, expected {g.degree - 1}",
                )
            if not tgt.action < g.action:
                return Violation(
                    "action", (g.id, t),
                    f"d({g.id!r}) hits {t!r} with action {tgt.action} >= {g.action}",
                )
    for g in C.generators:
        dd: set = set()
        for t in C.d(g.id):
            dd ^= set(C.d(t))
        if dd:
            return Violation("d_squared", (g.id,), f"d(d({g.id!r})) = {sorted(map(str, dd))}")
    return None


def _filtration_order(C: FilteredComplex) -> list[int]:
    # ties in action broken by position in the generator list
    return sorted(range(len(C.generators)), key=lambda k: (C.generators[k].action, k))


def _require_valid(C: FilteredComplex) -> None:
    problem = validate(C)
    if problem is not None:
        raise InvalidComplexError(problem.message)


def reduce_to_barcode(C: FilteredComplex) -> Barcode:
    """Standard column reduction with columns in increasing action order."""
    _require_valid(C)
    order = _filtration_order(C)
    pos = {C.generators[k].id: p for p, k in enumerate(order)}
    columns = [set(pos[t] for t in C.d(C.generators[k].id)) for k in order]
    low_owner: dict[int, int] = {}
    killed: set[int] = set()
    pairs = []
    for j, col in enumerate(columns):
        while col:
            low = max(col)
            if low not in low_owner:
                break
            col ^= columns[low_owner[low]]
        if col:
            low = max(col)
            low_owner[low] = j
            pairs.append((low, j))
            killed.update((low, j))
    actions = [C.generators[k].action for k in order]
    bars = [Bar(actions[b], actions[d]) for b, d in pairs if actions[b] < actions[d]]
    bars += [Bar(actions[j], math.inf) for j in range(len(order)) if j not in killed]
    return Barcode(bars)


# --- F2 linear algebra on bitmask rows -------------------------------------

def _rank(vectors: Iterable[int]) -> int:
    basis: dict[int, int] = {}
    for v in vectors:
        while v:
            top = v.bit_length() - 1
            if top in basis:
                v ^= basis[top]
            else:
                basis[top] = v
                break
    return len(basis)


def _kernel(columns: list[int], ncols: int) -> list[int]:
    """Basis (as bitmasks over column indices) of the kernel of a column map."""
    # Gaussian elimination tracking combinations
    reduced: dict[int, tuple[int, int]] = {}
    kernel = []
    for j in range(ncols):
        v, combo = columns[j], 1 << j
        while v:
            top = v.bit_length() - 1
            if top in reduced:
                rv, rc = reduced[top]
                v ^= rv
                combo ^= rc
            else:
                reduced[top] = (v, combo)
                break
        if not v:
            kernel.append(combo)
    return kernel


def _image_of(mask: int, columns: list[int]) -> int:
    out, j = 0, 0
    while mask:
        if mask & 1:
            out ^= columns[j]
        mask >>= 1
        j += 1
    return out


def barcode_bruteforce(C: FilteredComplex) -> Barcode:
    """Barcode recovered from ranks of all inclusion-induced maps on homology.

    Independent of :func:`reduce_to_barcode`; cost grows like N^2 rank
    computations, so keep to small complexes.
    """
    _require_valid(C)
    gens = list(C.generators)
    index = {g.id: k for k, g in enumerate(gens)}
    N = len(gens)
    columns = [sum(1 << index[t] for t in C.d(g.id)) for g in gens]
    values = sorted({g.action for g in gens})
    # K_p = span of generators with action <= values[p-1]; K_0 = 0
    masks = [0]
    for u in values:
        masks.append(sum(1 << k for k, g in enumerate(gens) if g.action <= u))
    P = len(values)
    cycles, boundaries = [], []
    for p in range(P + 1):
        sub = [k for k in range(N) if masks[p] >> k & 1]
        sub_cols = [columns[k] for k in sub]
        ker = _kernel(sub_cols, len(sub))
        lift = []
        for combo in ker:
            m = 0
            for pos_, k in enumerate(sub):
                if combo >> pos_ & 1:
                    m |= 1 << k
            lift.append(m)
        cycles.append(lift)
        boundaries.append(sub_cols)

    def r(p: int, q: int) -> int:
        if p == 0 or q > P:
            return 0
        return _rank(cycles[p] + boundaries[q]) - _rank(boundaries[q])

    bars = []
    for i in range(1, P + 1):
        for j in range(i + 1, P + 2):
            mult = r(i, j - 1) - r(i - 1, j - 1) - r(i, j) + r(i - 1, j)
            if mult < 0:
                raise AssertionError("negative bar multiplicity; rank oracle inconsistent")
            if mult:
                right = values[j - 1] if j <= P else math.inf
                bars.append(Bar(values[i - 1], right, mult))
    return Barcode(bars)


def homology_rank(C: FilteredComplex, degree: int) -> int:
    """F2 dimension of the degree-``degree`` homology of the full complex."""
    _require_valid(C)
    gens = list(C.generators)
    index = {g.id: k for k, g in enumerate(gens)}
    here = [k for k, g in enumerate(gens) if g.degree == degree]
    above = [k for k, g in enumerate(gens) if g.degree == degree + 1]
    d_here = [sum(1 << index[t] for t in C.d(gens[k].id)) for k in here]
    d_above = [sum(1 << index[t] for t in C.d(gens[k].id)) for k in above]
    return len(here) - _rank(d_here) - _rank(d_above)


def random_complex(rng: np.random.Generator, n_generators: int, *, max_degree: int = 3,
                   pair_prob: float = 0.6, mix_prob: float = 0.4) -> FilteredComplex:
    """Random valid complex with distinct actions.

    Built from a direct sum of elementary pairs ``x -> y`` and single
    generators, followed by a random filtration-preserving change of basis in
    each degree, so boundaries can have several terms.
    """
    actions = np.sort(rng.uniform(0.0, 10.0, size=n_generators))
    while len(np.unique(actions)) < n_generators:
        actions = np.sort(rng.uniform(0.0, 10.0, size=n_generators))
    degrees = [0] * n_generators
    elementary = [0] * n_generators  # bitmask boundary in the elementary basis
    free = list(range(n_generators))
    rng.shuffle(free)
    unassigned = set(range(n_generators))
    for k in free:
        if k not in unassigned:
            continue
        unassigned.discard(k)
        degrees[k] = int(rng.integers(0, max_degree + 1))
        lower = [j for j in unassigned if j < k]
        higher = [j for j in unassigned if j > k]
        if rng.random() < pair_prob and (lower or higher):
            if higher and (not lower or rng.random() < 0.5):
                x = int(rng.choice(higher))
                unassigned.discard(x)
                degrees[x] = degrees[k] + 1
                elementary[x] = 1 << k
            else:
                y = int(rng.choice(lower))
                unassigned.discard(y)
                degrees[y] = degrees[k] - 1
                elementary[k] = 1 << y
    # change of basis: new_j = old_j + sum of earlier old_i of the same degree
    P = [1 << j for j in range(n_generators)]
    for j in range(n_generators):
        for i in range(j):
            if degrees[i] == degrees[j] and rng.random() < mix_prob:
                P[j] ^= 1 << i
    def to_new(old_mask: int) -> int:
        # back substitution against the unitriangular P
        out = 0
        for j in range(n_generators - 1, -1, -1):
            if old_mask >> j & 1:
                out |= 1 << j
                old_mask ^= P[j]
        return out

    boundary = {}
    ids = [f"g{j}" for j in range(n_generators)]
    for j in range(n_generators):
        new_d = to_new(_image_of(P[j], elementary))
        terms = [ids[i] for i in range(n_generators) if new_d >> i & 1]
        if terms:
            boundary[ids[j]] = terms
    gens = [Generator(ids[j], degrees[j], float(actions[j])) for j in range(n_generators)]
    return FilteredComplex(gens, boundary)


def perturb_actions(C: FilteredComplex, rng: np.random.Generator, eps: float) -> FilteredComplex:
    """Move every action by at most ``eps`` while keeping their relative order."""
    order = _filtration_order(C)
    acts = np.array([C.generators[k].action for k in order])
    for _ in range(1000):
        new = acts + rng.uniform(-eps, eps, size=len(acts))
        if np.all(np.diff(new) > 0) or len(new) < 2:
            break
    else:
        raise RuntimeError("could not find an order-preserving perturbation")
    new_action = {order[p]: float(new[p]) for p in range(len(order))}
    gens = [Generator(g.id, g.degree, new_action[k]) for k, g in enumerate(C.generators)]
    return FilteredComplex(gens, {k: list(v) for k, v in C.boundary.items()})
