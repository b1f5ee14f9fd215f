"""Intersection points of the twisted fiber with the pushed fiber, with gradings and actions.

The complex ``CF(tau_i^{2k}(L0), phi_v(L2))`` has two kinds of generators:

* twist chords (``sector="tau"``) in the shell between ``hat_h[i]`` and
  ``check_h[i+1]``, solving ``2k rho_i(r) = 2 pi m +/- delta``;
* bump chords (``sector="phi"``) inside band ``b``, solving
  ``|theta_v(r)| = 2 pi m +/- delta``.

In both cases ``branch=+1`` means the ``+delta`` equation.  The signed radius
``s`` records the direction of transport: ``sign(s) * F(|s|) = delta (mod 2 pi)``
where ``F`` is ``theta_v`` or ``2k rho_i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .local_model import TWO_PI, ModelConfig, NonTransverseError

__all__ = [
    "Chord",
    "chord_level",
    "k_threshold",
    "is_transverse",
    "nontransverse_bands",
    "index_m",
    "winding_from_index_m",
    "enumerate_tau_chords",
    "enumerate_phi_chords",
    "enumerate_chords",
    "maslov_index",
    "maslov_oracle",
    "action",
    "geodesic_transport_oracle",
]

TRANSVERSE_TOL = 1e-9


@dataclass(frozen=True)
class Chord:
    sector: str  # "phi" or "tau"
    band: int  # bump band b for phi chords, twist index i for tau chords
    s: float
    m: int  # winding: |F(r)| = 2 pi m + branch * delta
    branch: int
    side: str = ""  # "check" (rising flank) or "hat" (falling flank); phi only
    theta_sign: int = 0
    theta_prime_sign: int = 0
    region: str = "tau"  # "inner", "outer" or "tau"
    index: int | None = None
    action: float | None = None

    @property
    def r(self) -> float:
        return abs(self.s)

    @property
    def label(self) -> str:
        sign = "+" if self.branch > 0 else "-"
        if self.sector == "tau":
            return f"tau{self.band}{sign}{self.m}"
        return f"phi{self.band}{self.side}{sign}{self.m}"


def chord_level(c: Chord, delta: float) -> float:
    return TWO_PI * c.m + c.branch * delta


def k_threshold(*vectors) -> int:
    """Smallest twist power for which the index-gap argument applies to all ``vectors``."""
    norm = max((float(np.max(np.abs(v))) if np.size(v) else 0.0) for v in vectors)
    return 2 * (math.ceil(norm) + 3)


def nontransverse_bands(v, config: ModelConfig, tol: float = TRANSVERSE_TOL) -> list[int]:
    """Bands ``b`` (1-based) where ``2 pi v_b = +/- delta (mod 2 pi)``."""
    out = []
    for b, vb in enumerate(np.asarray(v, dtype=float).ravel(), start=1):
        res = math.fmod(TWO_PI * vb, TWO_PI) % TWO_PI
        gap = min(abs(res - config.delta), abs(res - (TWO_PI - config.delta)))
        if gap <= tol:
            out.append(b)
    return out


def is_transverse(v, config: ModelConfig) -> bool:
    return not nontransverse_bands(v, config)


def index_m(winding: int, branch: int) -> int:
    """``floor(F/pi)`` for ``F = 2 pi winding + branch * delta`` with ``0 < delta < pi``."""
    return 2 * winding if branch > 0 else 2 * winding - 1


def winding_from_index_m(mi: int) -> tuple[int, int]:
    """Inverse of :func:`index_m`: ``(winding, branch)``."""
    return (mi // 2, 1) if mi % 2 == 0 else ((mi + 1) // 2, -1)


def maslov_index(c: Chord, i: int, k: int, config: ModelConfig) -> int:
    n = config.n
    mi = index_m(c.m, c.branch)
    if c.sector == "tau":
        return n + (2 * k - 1 - mi) * (n - 1)
    pattern = (c.theta_sign, c.theta_prime_sign)
    base = {
        (1, 1): n + (n - 1) * mi,
        (1, -1): n + (n - 1) * mi - 1,
        (-1, 1): -(n - 1) * mi + 1,
        (-1, -1): -(n - 1) * mi,
    }[pattern]
    if c.region == "outer":
        base += 2 * k * (n - 1)
    return base


def _fd_sign(f, r: float) -> int:
    h = 1e-7
    return int(np.sign(f(r + h) - f(r - h)))


def maslov_oracle(c: Chord, i: int, k: int, v, config: ModelConfig) -> int:
    """Grading recomputed from crossings of the linear angle path ``t -> t F(r)``.

    Interior crossings (angles in ``pi Z``, ``0 < t < 1``) each carry a crossing
    form of signature ``-+ (n - 1)``; the start point carries half the
    signature of the full ``n``-dimensional form.  Signs of the profile and
    its slope are read off numerically.
    """
    n = config.n
    r = c.r
    if c.sector == "phi":
        F = lambda x: float(config.theta_v(x, v))
        sgn = -1  # crossings of the pushed fiber path
        shift = 2 * k * (n - 1) if c.region == "outer" else 0
    else:
        tw = config.twist(i)
        F = lambda x: 2 * k * float(tw(x))
        sgn = 1  # roles of the two paths reversed
        shift = 2 * k * (n - 1)
    angle = F(r)
    s_val = int(np.sign(angle))
    s_slope = _fd_sign(F, r)
    if s_val == 0 or s_slope == 0:
        raise NonTransverseError(f"chord {c.label} is degenerate")
    mu = Fraction(sgn * (s_slope + s_val * (n - 1)), 2)
    j = 1
    while True:
        t = j * math.pi / abs(angle)
        if t >= 1.0:
            if abs(t - 1.0) < 1e-12:
                raise NonTransverseError(f"crossing at t=1 for chord {c.label}")
            break
        mu += sgn * s_val * (n - 1)
        j += 1
    grading = Fraction(n, 2) - mu + shift
    assert grading.denominator == 1
    return int(grading)


def _h_phi(config: ModelConfig, r: float, v) -> float:
    return float(config.theta_v(r, v)) * r + config.offset(r) - float(config.hamiltonian_value(r, v))


def _h_tau(config: ModelConfig, r: float, i: int, k: int) -> float:
    if k == 0:
        return config.offset(r)
    return 2 * k * config.rho(i, r) * r + config.offset(r) - 2 * k * config.rho_integral(i, r)


def action(c: Chord, i: int, k: int, v, config: ModelConfig) -> float:
    """Primitive of the pushed fiber minus primitive of the twisted fiber at the chord."""
    return _h_phi(config, c.r, v) - _h_tau(config, c.r, i, k)


def enumerate_tau_chords(config: ModelConfig, i: int, k: int, v=None) -> list[Chord]:
    """The ``2k`` chords created by ``tau_i^{2k}``, sorted by radius."""
    if k < 1:
        raise ValueError("twist power k must be >= 1")
    delta = config.delta
    specs = [(0, 1)]
    for m in range(1, k):
        specs += [(m, -1), (m, 1)]
    specs.append((k, -1))
    out = []
    for m, branch in specs:
        level = TWO_PI * m + branch * delta
        r = config.solve_twist_level(i, k, level)
        c = Chord("tau", i, branch * r, m, branch)
        out.append(_finish(c, config, i, k, v))
    return sorted(out, key=lambda c: c.r)


def enumerate_phi_chords(config: ModelConfig, v, i: int, k: int) -> list[Chord]:
    """Chords inside the bump bands, graded relative to ``tau_i^{2k}``."""
    v = tuple(float(x) for x in np.asarray(v, dtype=float).ravel())
    out = []
    for c, h_phi in _phi_base(config, v):
        c = replace(c, region="inner" if c.band <= i else "outer")
        out.append(replace(c, index=maslov_index(c, i, k, config),
                           action=h_phi - _h_tau(config, c.r, i, k)))
    return out


@lru_cache(maxsize=1024)
def _phi_base(config: ModelConfig, v: tuple) -> tuple[tuple[Chord, float], ...]:
    # radii and pushed-fiber primitive do not depend on the twist, so share them
    bad = nontransverse_bands(v, config)
    if bad:
        raise NonTransverseError(f"v is not transverse in band(s) {bad}")
    delta = config.delta
    out = []
    for b in range(1, config.d + 1):
        vb = v[b - 1]
        if vb == 0.0:
            continue
        amp, sv = abs(vb), (1 if vb > 0 else -1)
        m = 0
        while True:
            found = False
            for winding, branch in ((m, 1), (m + 1, -1)):
                level = TWO_PI * winding + branch * delta
                if level >= TWO_PI * amp:
                    continue
                found = True
                lo, hi = config.solve_bump_level(b, amp, level)
                s_sign = branch * sv
                for side, r, slope in (("check", lo, sv), ("hat", hi, -sv)):
                    c = Chord("phi", b, s_sign * r, winding, branch, side, sv, slope)
                    out.append((c, _h_phi(config, r, v)))
            if not found:
                break
            m += 1
    out.sort(key=lambda item: item[0].r)
    return tuple(out)


def enumerate_chords(config: ModelConfig, v, i: int, k: int) -> list[Chord]:
    """All generators of ``CF(tau_i^{2k}(L0), phi_v(L2))``; ``k = 0`` means no twist."""
    v = config._vec(v)
    chords = enumerate_phi_chords(config, v, i, k)
    if k >= 1:
        chords += enumerate_tau_chords(config, i, k, v)
    return sorted(chords, key=lambda c: c.r)


def _finish(c: Chord, config: ModelConfig, i: int, k: int, v) -> Chord:
    return replace(c, index=maslov_index(c, i, k, config), action=action(c, i, k, v, config))


def geodesic_transport_oracle(c: Chord, config: ModelConfig, v=None, k: int | None = None,
                              tol: float = 1e-8) -> bool:
    """Move the base point along the great circle and check it lands on the other fiber.

    The circle lies in the plane spanned by ``e0`` (first base point) and
    ``e1``; the second base point sits at angle ``delta``.  The covector with
    signed radius ``s`` is carried through angle ``sign(s) * F(|s|)``.
    """
    dim = config.n + 1
    e0, e1 = np.eye(dim)[0], np.eye(dim)[1 % dim]
    target = math.cos(config.delta) * e0 + math.sin(config.delta) * e1
    if c.sector == "phi":
        F = float(config.theta_v(c.r, v))
    else:
        if k is None:
            raise ValueError("twist chords need the twist power k")
        F = 2 * k * float(config.rho(c.band, c.r))
    angle = math.copysign(1.0, c.s) * F
    point = math.cos(angle) * e0 + math.sin(angle) * e1
    return bool(np.linalg.norm(point - target) < tol)
