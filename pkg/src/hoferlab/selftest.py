"""Fast invariant checks behind ``hoferlab selftest``.

Small sample sizes; the test suite runs the same checks at full scale.
"""
from __future__ import annotations

import math
import sys
from typing import Callable, TextIO

import numpy as np

from .chords import enumerate_chords, enumerate_tau_chords, k_threshold, maslov_oracle
from .filtered_complex import barcode_bruteforce, random_complex, reduce_to_barcode
from .floer import boundary_depth_scenario, spectral_a
from .local_model import ModelConfig
from .persistence import bottleneck_bruteforce, bottleneck_distance, random_barcode
from .quasiflat import random_pairs, sandwich

__all__ = ["CHECKS", "run"]


def _bottleneck() -> bool:
    rng = np.random.default_rng(11)
    for _ in range(60):
        B, C = random_barcode(rng, 4), random_barcode(rng, 4)
        a, b = bottleneck_distance(B, C), bottleneck_bruteforce(B, C)
        if not (a == b or abs(a - b) <= 1e-9):
            return False
    return True


def _reduction() -> bool:
    rng = np.random.default_rng(12)
    return all(
        reduce_to_barcode(C) == barcode_bruteforce(C)
        for C in (random_complex(rng, int(rng.integers(1, 9))) for _ in range(40))
    )


def _census() -> bool:
    for n in (2, 3):
        config = ModelConfig.uniform(n, 1.0, 2)
        for k in range(1, 9):
            got = sorted(c.index for c in enumerate_tau_chords(config, 0, k))
            if got != [n + j * (n - 1) for j in range(2 * k)]:
                return False
    return True


def _indices() -> bool:
    rng = np.random.default_rng(13)
    for _ in range(20):
        n = int(rng.choice([2, 3, 5]))
        config = ModelConfig.uniform(n, 1.0, 3)
        v, i, k = rng.uniform(-4, 4, 3), int(rng.integers(0, 4)), int(rng.integers(1, 6))
        if any(c.index != maslov_oracle(c, i, k, v, config) for c in enumerate_chords(config, v, i, k)):
            return False
    return True


def _spectral() -> bool:
    config = ModelConfig.uniform(3, 1.0, 3)
    for v, w in random_pairs(14, 5, 3):
        k = k_threshold(v, w)
        for i in range(2):
            diff = spectral_a(i, v, k, config) - spectral_a(i, w, k, config)
            if abs(diff - (w[i] - v[i])) > 1e-9:  # band i+1 is coordinate i
                return False
    return True


def _sandwich() -> bool:
    config = ModelConfig.uniform(2, 1.0, 2, sigma_mode=True)
    for v, w in random_pairs(15, 5, 2):
        r = sandwich(v, w, config=config)
        if not (r.lower <= r.upper_sigma + 1e-9 and r.upper_sigma <= 2 * r.exact_inf_norm + 1e-9):
            return False
    return True


def _boundary_depth() -> bool:
    config = ModelConfig.uniform(3, 1.0, 1)
    betas = []
    for k in range(1, 9):
        beta, lower = boundary_depth_scenario(k, 1, config)
        if beta < lower - 1e-8:
            return False
        betas.append(beta)
    return all(b > a for a, b in zip(betas, betas[1:]))


CHECKS: list[tuple[str, Callable[[], bool]]] = [
    ("bottleneck distance matches exhaustive matching", _bottleneck),
    ("column reduction matches sublevel ranks", _reduction),
    ("twist chord census", _census),
    ("closed-form gradings match crossing count", _indices),
    ("spectral differences recover coordinates", _spectral),
    ("lower <= upper_sigma <= 2 |v-w|_inf", _sandwich),
    ("boundary depth above its bound and increasing", _boundary_depth),
]


def run(stream: TextIO = sys.stdout) -> bool:
    ok = True
    for name, check in CHECKS:
        try:
            passed = check()
        except Exception as exc:  # report and keep going
            passed = False
            name = f"{name} ({type(exc).__name__}: {exc})"
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'}  {name}", file=stream)
    return ok
