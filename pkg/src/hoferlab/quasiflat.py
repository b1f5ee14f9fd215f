"""Upper and lower bounds on Hofer distances between pushed fibers.

Lower bounds come from spectral differences, upper bounds from the
oscillation of explicit radial Hamiltonians.  Neither is the Hofer distance
itself; the report keeps them labelled as bounds.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np

from .chords import k_threshold, nontransverse_bands
from .floer import ModelInconsistencyError, spectral_a
from .local_model import ModelConfig

__all__ = [
    "QuasiflatReport",
    "NUDGE",
    "osc_profile",
    "hamiltonian_profile",
    "coordinate_coefficients",
    "hofer_upper_plain",
    "hofer_upper_sigma",
    "sigma_map",
    "sigma_osc_analytic",
    "sandwich",
    "random_pairs",
    "sweep",
]

NUDGE = 1e-6
TOL = 1e-9


@dataclass(frozen=True)
class QuasiflatReport:
    v: tuple[float, ...]
    w: tuple[float, ...]
    lower: float
    upper_plain: float
    upper_sigma: float  # nan outside sigma layouts
    exact_inf_norm: float
    exact_one_norm: float
    k: int
    nudged: bool = False
    absolute_version: bool = False

    def row(self) -> dict:
        """Flat mapping for CSV output; vectors become ``;``-joined strings."""
        out = asdict(self)
        out["v"] = ";".join(repr(x) for x in self.v)
        out["w"] = ";".join(repr(x) for x in self.w)
        return out


def sigma_map(v) -> np.ndarray:
    """``(v1, v2, ...) -> (v1, -v1, v2, -v2, ...)``."""
    v = np.asarray(v, dtype=float).ravel()
    out = np.empty(2 * v.size)
    out[0::2], out[1::2] = v, -v
    return out


def osc_profile(values) -> float:
    """``max - min`` of a sampled profile; empty or zero profiles give 0."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return 0.0
    return float(values.max() - values.min())


def hamiltonian_profile(config: ModelConfig, coeffs) -> tuple[np.ndarray, np.ndarray]:
    """Radial profile ``sum_b coeffs[b] * Theta_b`` at its breakpoints.

    Each ``Theta_b`` is constant off its band support and monotone on it, and
    the supports are disjoint, so between consecutive breakpoints the profile
    is monotone and its extremes sit at breakpoints.
    """
    coeffs = config._vec(coeffs)
    radii = {0.0, float(config.radius)}
    for b in range(1, config.d + 1):
        radii.update(config.band_support(b))
    radii = np.array(sorted(radii))
    values = np.array([float(config.hamiltonian_value(float(r), coeffs)) for r in radii])
    return radii, values


def _as_bands(config: ModelConfig, v) -> np.ndarray:
    v = np.asarray(v, dtype=float).ravel()
    if v.size != config.dim:
        raise ValueError(f"vector of length {v.size} given, layout expects {config.dim}")
    return sigma_map(v) if config.sigma_mode else v


def coordinate_coefficients(config: ModelConfig, i: int, diff: float) -> np.ndarray:
    """Band coefficients of the Hamiltonian that moves coordinate ``i`` (0-based) by ``diff``."""
    c = np.zeros(config.d)
    if config.sigma_mode:
        c[2 * i], c[2 * i + 1] = diff, -diff
    else:
        c[i] = diff
    return c


def hofer_upper_plain(v, w, config: ModelConfig) -> float:
    """Sum over coordinates of the oscillation of the one-coordinate Hamiltonians."""
    diff = np.asarray(w, dtype=float).ravel() - np.asarray(v, dtype=float).ravel()
    if diff.size != config.dim:
        raise ValueError(f"vectors of length {diff.size} given, layout expects {config.dim}")
    total = 0.0
    for i, x in enumerate(diff):
        if x != 0.0:
            total += osc_profile(hamiltonian_profile(config, coordinate_coefficients(config, i, x))[1])
    bound = 2 * float(np.abs(diff).sum())
    if total > bound + TOL:
        raise ModelInconsistencyError(f"plain upper bound {total} exceeds 2|v-w|_1 = {bound}")
    return total


def hofer_upper_sigma(v, w, config: ModelConfig) -> float:
    """Oscillation of the single Hamiltonian moving ``phi_{Sigma v}`` to ``phi_{Sigma w}``."""
    if not config.sigma_mode:
        raise ValueError("hofer_upper_sigma needs a config built with sigma_mode")
    diff = _as_bands(config, w) - _as_bands(config, v)
    osc = osc_profile(hamiltonian_profile(config, diff)[1])
    bound = 2 * float(np.abs(diff).max(initial=0.0))
    if osc > bound + TOL:
        raise ModelInconsistencyError(f"sigma upper bound {osc} exceeds 2|v-w|_inf = {bound}")
    return osc


def sigma_osc_analytic(v, w) -> float:
    """``max_i (w_i - v_i)^+ + max_i (v_i - w_i)^+``."""
    diff = np.asarray(w, dtype=float) - np.asarray(v, dtype=float)
    return float(max(diff.max(initial=0.0), 0.0) + max((-diff).max(initial=0.0), 0.0))


def _nudge(v, config: ModelConfig) -> tuple[np.ndarray, bool]:
    v = np.array(v, dtype=float).ravel()
    moved = False
    while True:
        bad = nontransverse_bands(_as_bands(config, v), config)
        if not bad:
            return v, moved
        # in sigma layouts one coordinate feeds two bands; move it once per pass
        for coord in {(b - 1) // 2 if config.sigma_mode else b - 1 for b in bad}:
            v[coord] += NUDGE
        moved = True


def sandwich(v, w, k: int | None = None, config: ModelConfig | None = None, *,
             check: bool = True) -> QuasiflatReport:
    """Lower bound from spectral differences next to both upper bounds.

    Non-transverse inputs are moved by ``NUDGE`` in the offending coordinate
    and the report is flagged.
    """
    if config is None:
        raise ValueError("sandwich needs a config")
    v, nv = _nudge(v, config)
    w, nw = _nudge(w, config)
    bv, bw = _as_bands(config, v), _as_bands(config, w)
    k = k_threshold(bv, bw) if k is None else int(k)
    lower = 0.0
    if not np.array_equal(bv, bw):
        gaps = [abs(spectral_a(i, bv, k, config, check=check) - spectral_a(i, bw, k, config, check=check))
                for i in range(config.d)]
        lower = 0.5 * max(gaps)
    diff = w - v
    inf_norm = float(np.abs(diff).max(initial=0.0))
    if abs(lower - 0.5 * inf_norm) > TOL:
        raise ModelInconsistencyError(f"lower bound {lower} differs from |v-w|_inf / 2 = {inf_norm / 2}")
    upper_plain = hofer_upper_plain(v, w, config)
    upper_sigma = hofer_upper_sigma(v, w, config) if config.sigma_mode else math.nan
    combined = hamiltonian_profile(config, bw - bv)[1]
    # compact support: the combined profile vanishes again past the last band
    absolute = bool(abs(combined[-1]) <= TOL)
    return QuasiflatReport(
        v=tuple(map(float, v)), w=tuple(map(float, w)), lower=lower, upper_plain=upper_plain,
        upper_sigma=upper_sigma, exact_inf_norm=inf_norm,
        exact_one_norm=float(np.abs(diff).sum()), k=k, nudged=nv or nw, absolute_version=absolute,
    )


def random_pairs(seed: int, count: int, dim: int, bound: float = 4.0) -> list[tuple[np.ndarray, np.ndarray]]:
    rng = np.random.default_rng(seed)
    return [(rng.uniform(-bound, bound, dim), rng.uniform(-bound, bound, dim)) for _ in range(count)]


def _sandwich_job(args):
    v, w, config, check = args
    return sandwich(v, w, None, config, check=check)


def sweep(config: ModelConfig, pairs: Iterable[tuple[Sequence[float], Sequence[float]]], *,
          threads: int | None = None, check: bool = True) -> list[QuasiflatReport]:
    """Reports for every pair, in input order; ``threads > 1`` uses worker processes."""
    jobs = [(np.asarray(v, float), np.asarray(w, float), config, check) for v, w in pairs]
    if threads is None:
        threads = int(os.environ.get("HOFERLAB_THREADS", "1"))
    if threads <= 1 or len(jobs) < 2:
        return [_sandwich_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_sandwich_job, jobs, chunksize=max(1, len(jobs) // (4 * threads))))
