"""Filtered Floer complexes of the local model and the invariants read off from them."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import NamedTuple

import numpy as np

from .chords import Chord, enumerate_chords, k_threshold, nontransverse_bands
from .filtered_complex import FilteredComplex, Generator, reduce_to_barcode, validate
from .local_model import ModelConfig, NonTransverseError
from .persistence import boundary_depth, spectral_invariants

__all__ = [
    "Mode",
    "DifferentialRule",
    "FloerScenario",
    "ModelInconsistencyError",
    "ThresholdError",
    "build_complex",
    "degree_gap",
    "distinguished_chord",
    "spectral_a",
    "BoundaryDepth",
    "boundary_depth_scenario",
    "principal_pair",
]


class ModelInconsistencyError(RuntimeError):
    """A degree or action argument the construction relies on failed numerically."""


class ThresholdError(ValueError):
    def __init__(self, k: int, k0: int):
        super().__init__(f"twist power k={k} is below the threshold k0={k0}")
        self.k, self.k0 = k, k0


class Mode(enum.Enum):
    DEGREE_VANISHING = "degree-vanishing"  # n >= 3
    DISK_PAIRING = "disk-pairing"  # n = 1, explicit strips
    SYMMETRY_REDUCED = "symmetry-reduced"  # n = 2, inherits the n = 1 pairs


@dataclass(frozen=True)
class DifferentialRule:
    mode: Mode

    @classmethod
    def for_dimension(cls, n: int) -> "DifferentialRule":
        if n == 1:
            return cls(Mode.DISK_PAIRING)
        if n == 2:
            return cls(Mode.SYMMETRY_REDUCED)
        return cls(Mode.DEGREE_VANISHING)

    @classmethod
    def parse(cls, name: str | None, n: int) -> "DifferentialRule":
        if name is None:
            return cls.for_dimension(n)
        return cls(Mode(name))

    @property
    def assumed_pairing(self) -> bool:
        """True when the pairing is assumed from a symmetry argument rather than computed."""
        return self.mode is Mode.SYMMETRY_REDUCED

    def check_dimension(self, n: int) -> None:
        allowed = {Mode.DISK_PAIRING: n == 1, Mode.SYMMETRY_REDUCED: n == 2,
                   Mode.DEGREE_VANISHING: n >= 3}[self.mode]
        if not allowed:
            raise ValueError(f"differential rule {self.mode.value} does not apply to n={n}")


@dataclass(frozen=True)
class FloerScenario:
    """``CF(tau_i^{2k}(L0), phi_v(L2))``; ``k = 0`` drops the twist."""

    config: ModelConfig
    v: tuple[float, ...]
    i: int = 0
    k: int = 1

    def __post_init__(self):
        v = tuple(float(x) for x in np.asarray(self.v, dtype=float).ravel())
        object.__setattr__(self, "v", v)
        if len(v) != self.config.d:
            raise ValueError(f"v has length {len(v)}, config has {self.config.d} bands")
        if not 0 <= self.i <= self.config.d:
            raise ValueError(f"twist index {self.i} out of range 0..{self.config.d}")
        if self.k < 0:
            raise ValueError("twist power must be >= 0")
        bad = nontransverse_bands(v, self.config)
        if bad:
            raise NonTransverseError(f"v is not transverse in band(s) {bad}")

    @cached_property
    def chords(self) -> tuple[Chord, ...]:
        return tuple(enumerate_chords(self.config, self.v, self.i, self.k))

    def chord(self, label: str) -> Chord:
        for c in self.chords:
            if c.label == label:
                return c
        raise KeyError(label)


def degree_gap(scen: FloerScenario) -> tuple[int | None, int, int | None]:
    """``(max inner phi degree, n + k(n-1), min outer phi degree)``."""
    n, k = scen.config.n, scen.k
    inner = [c.index for c in scen.chords if c.region == "inner"]
    outer = [c.index for c in scen.chords if c.region == "outer"]
    return (max(inner) if inner else None, n + k * (n - 1), min(outer) if outer else None)


def _phi_pairs(chords) -> list[tuple[Chord, Chord]]:
    """(source, target) of the strip pairing inside each band and level."""
    groups: dict[tuple, dict[str, Chord]] = {}
    for c in chords:
        if c.sector == "phi":
            groups.setdefault((c.band, c.m, c.branch), {})[c.side] = c
    pairs = []
    for key, sides in sorted(groups.items()):
        lo, hi = sides["check"], sides["hat"]
        # positive coefficient: the rising-flank chord carries the larger action
        pairs.append((lo, hi) if lo.theta_sign > 0 else (hi, lo))
    return pairs


def build_complex(scen: FloerScenario, rule: DifferentialRule | None = None) -> FilteredComplex:
    """Generators with degrees and actions, plus the pairing differential.

    The twist chords never carry a differential: for ``n >= 3`` their degrees
    are at least two apart; for ``n = 2`` a nonzero pairing would contradict
    the known rank ``2k`` of the twisted-fiber homology.
    """
    config = scen.config
    rule = rule or DifferentialRule.for_dimension(config.n)
    rule.check_dimension(config.n)
    chords = scen.chords
    if rule.mode is Mode.DEGREE_VANISHING:
        tau_deg = sorted(c.index for c in chords if c.sector == "tau")
        if any(b - a < 2 for a, b in zip(tau_deg, tau_deg[1:])):
            raise ModelInconsistencyError(f"twist chord degrees not separated: {tau_deg}")
        if scen.k >= 1 and scen.k >= k_threshold(scen.v):
            lo, target, hi = degree_gap(scen)
            if (lo is not None and lo >= target) or (hi is not None and hi <= target):
                raise ModelInconsistencyError(f"degree gap violated: {lo} < {target} < {hi} fails")
    boundary = {}
    for src, tgt in _phi_pairs(chords):
        if src.index - tgt.index != 1:
            raise ModelInconsistencyError(
                f"paired chords {src.label}, {tgt.label} have degrees {src.index}, {tgt.index}"
            )
        boundary[src.label] = [tgt.label]
    gens = [Generator(c.label, c.index, c.action) for c in chords]
    C = FilteredComplex(gens, boundary)
    problem = validate(C)
    if problem is not None:
        raise ModelInconsistencyError(problem.message)
    return C


def distinguished_chord(scen: FloerScenario) -> Chord:
    """The unique generator in degree ``n + k(n-1)``; it must be a twist chord."""
    n, k = scen.config.n, scen.k
    target = n + k * (n - 1)
    hits = [c for c in scen.chords if c.index == target]
    if len(hits) != 1 or hits[0].sector != "tau":
        raise ModelInconsistencyError(
            f"expected one twist chord in degree {target}, found {[c.label for c in hits]}"
        )
    return hits[0]


def spectral_a(i: int, v, k: int, config: ModelConfig, *, check: bool = True) -> float:
    """Difference of the spectral invariants of the distinguished classes for twists ``i+1`` and ``i``.

    Both classes are carried by single twist chords, so the value is the
    difference of their actions.  With ``check`` the two actions are also
    located among the spectral invariants of the reduced barcodes.
    """
    if config.n < 2:
        raise ValueError("spectral_a needs n >= 2")
    if not 0 <= i < config.d:
        raise ValueError(f"i must lie in 0..{config.d - 1}")
    k0 = k_threshold(v)
    if k < k0:
        raise ThresholdError(k, k0)
    v = tuple(float(x) for x in np.asarray(v, dtype=float).ravel())
    return _xi_action(config, v, i + 1, k, check) - _xi_action(config, v, i, k, check)


@lru_cache(maxsize=4096)
def _xi_action(config: ModelConfig, v: tuple, j: int, k: int, check: bool) -> float:
    # consecutive i share a twist, so sweeps hit this cache half the time
    scen = FloerScenario(config, v, j, k)
    xi = distinguished_chord(scen)
    if check:
        specs = spectral_invariants(reduce_to_barcode(build_complex(scen)))
        if not any(abs(s - xi.action) <= 1e-9 for s in specs):
            raise ModelInconsistencyError(f"action of {xi.label} is not a spectral invariant")
    return xi.action


class BoundaryDepth(NamedTuple):
    beta: float
    lower_bound: float


def _sec9_scenario(k: int, ell: int, config: ModelConfig) -> FloerScenario:
    v = np.zeros(config.d)
    v[0] = k
    return FloerScenario(config, v, 0, ell)


def principal_pair(k: int, ell: int, config: ModelConfig) -> tuple[Chord, Chord]:
    """The chords on the ``+delta``, zero-winding level of band 1 (rising, falling flank)."""
    scen = _sec9_scenario(k, ell, config)
    return scen.chord("phi1check+0"), scen.chord("phi1hat+0")


def boundary_depth_scenario(k: int, ell: int, config: ModelConfig,
                            rule: DifferentialRule | None = None) -> BoundaryDepth:
    """Boundary depth of ``CF(tau_0^{2 ell}(L0), phi_(k)(L2))`` and its guaranteed lower bound."""
    if k < 1:
        raise ValueError("k must be >= 1")
    rule = rule or DifferentialRule.for_dimension(config.n)
    scen = _sec9_scenario(k, ell, config)
    C = build_complex(scen, rule)
    if rule.mode is Mode.DEGREE_VANISHING:
        top, bottom = scen.chord("phi1check+0"), scen.chord("phi1hat+0")
        below = [c.label for c in scen.chords if c.index == top.index - 1]
        if below != [bottom.label]:
            raise ModelInconsistencyError(f"degree {top.index - 1} holds {below}, not only {bottom.label}")
    beta = boundary_depth(reduce_to_barcode(C))
    t_lo, t_hi = config.solve_bump_level(1, 1.0, config.delta)
    mass = config.bump.antiderivative(t_hi - config.partition.check_h(1)) - \
        config.bump.antiderivative(t_lo - config.partition.check_h(1))
    C_amb = 0.0
    if config.ambient_offset is not None:
        C_amb = -2 * config.ambient_offset.max_abs(*config.band_support(1))
    lower = k * mass - config.delta * (t_hi - t_lo) + C_amb
    return BoundaryDepth(beta, lower)
