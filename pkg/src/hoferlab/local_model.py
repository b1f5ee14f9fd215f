"""Radial data of the local model on the disk cotangent bundle of the round sphere.

Everything is reduced to the great circle through the two fiber base points,
so a covector is described by a signed radius and the maps of interest only
ever move it along that circle.  The profiles are:

* the bump ``theta`` supported on ``[iota, hbar - iota]`` with peak ``2*pi``
  at ``hbar/2`` and unit integral, shifted into band ``i`` as
  ``theta_i(t) = theta(t - check_h[i])``;
* the twist profile ``rho_i``, equal to ``pi`` up to ``hat_h[i] + eps/3`` and
  to ``0`` from ``hat_h[i] + eps/2`` on.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "NonTransverseError",
    "bisect",
    "RadialPartition",
    "BumpProfile",
    "TwistProfile",
    "TabulatedOffset",
    "ModelConfig",
]

TWO_PI = 2.0 * math.pi
_BINOM4 = (1, -4, 6, -4, 1)  # (-1)^j * C(4, j)
# half-width range of a bump with peak 2*pi and unit mass, for the (1 - |u|^2p)^4 family
_W_MAX = 315.0 / (512.0 * math.pi)  # p = 1
_W_MIN = 1.0 / (4.0 * math.pi)  # p -> infinity (box)


def _shift(t, c: float):
    # scalars stay Python floats so the profiles take their fast path
    if np.ndim(t) == 0:
        return float(t) - c
    return np.asarray(t, dtype=float) - c


class NonTransverseError(ValueError):
    """A level equation is tangent to the profile (non-transverse intersection)."""


def bisect(f: Callable[[float], float], a: float, b: float) -> float:
    """Root of ``f`` on ``[a, b]`` by bisection, run to floating point resolution."""
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa < 0) == (fb < 0):
        raise ValueError(f"root not bracketed: f({a})={fa}, f({b})={fb}")
    while True:
        m = 0.5 * (a + b)
        if not a < m < b:
            break
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm < 0) == (fa < 0):
            a, fa = m, fm
        else:
            b, fb = m, fm
    return a if abs(fa) <= abs(fb) else b


@dataclass(frozen=True)
class RadialPartition:
    """Shell radii ``0 < hat_h0 < check_h1 < hat_h1 < ... < check_h(d+1)``.

    ``shells`` is the flat list ``[hat_h0, check_h1, hat_h1, ..., check_h_d,
    hat_h_d, check_h(d+1)]`` of length ``2d + 2``.
    """

    shells: tuple[float, ...]
    iota: float | None = None

    def __post_init__(self):
        s = tuple(float(x) for x in self.shells)
        object.__setattr__(self, "shells", s)
        if len(s) < 4 or len(s) % 2:
            raise ValueError("shells must hold 2d + 2 radii with d >= 1")
        if s[0] <= 0 or any(b <= a for a, b in zip(s, s[1:])):
            raise ValueError(f"shell radii must be positive and strictly increasing: {s}")
        if self.iota is None:
            w = min(0.45 * self.hbar, _W_MAX)
            object.__setattr__(self, "iota", self.hbar / 2 - w)
        iota = float(self.iota)
        object.__setattr__(self, "iota", iota)
        if not 0 < iota < self.hbar / 2:
            raise ValueError(f"iota={iota} must lie in (0, hbar/2) with hbar={self.hbar}")
        w = self.hbar / 2 - iota
        if not _W_MIN < w <= _W_MAX * (1 + 1e-12):
            raise ValueError(
                f"bump half-width {w:.4g} outside ({_W_MIN:.4g}, {_W_MAX:.4g}]: a bump with "
                "peak 2*pi and unit mass cannot fit; widen the bands or adjust iota"
            )

    @classmethod
    def uniform(cls, d: int, band: float = 0.25, gap: float = 0.1, inner: float = 0.1,
                iota: float | None = None) -> "RadialPartition":
        shells = [inner]
        r = inner
        for _ in range(d):
            shells += [r + gap, r + gap + band]
            r += gap + band
        shells.append(r + gap)
        return cls(tuple(shells), iota)

    @property
    def d(self) -> int:
        return len(self.shells) // 2 - 1

    def check_h(self, i: int) -> float:
        """Inner radius of band ``i`` (``1 <= i <= d + 1``)."""
        if not 1 <= i <= self.d + 1:
            raise IndexError(f"check_h index {i} out of range 1..{self.d + 1}")
        return self.shells[2 * i - 1]

    def hat_h(self, i: int) -> float:
        """Outer radius of band ``i`` (``0 <= i <= d``)."""
        if not 0 <= i <= self.d:
            raise IndexError(f"hat_h index {i} out of range 0..{self.d}")
        return self.shells[2 * i]

    @property
    def hbar(self) -> float:
        return min(self.hat_h(i) - self.check_h(i) for i in range(1, self.d + 1))

    @property
    def epsilon(self) -> float:
        return min(self.check_h(i + 1) - self.hat_h(i) for i in range(self.d + 1))

    @property
    def outer(self) -> float:
        return self.shells[-1]


class BumpProfile:
    """``theta(t) = 2*pi * (1 - |u|^(2p))^4`` with ``u = (t - hbar/2) / w``.

    ``w = hbar/2 - iota`` is the half-width; the exponent ``p >= 1`` is solved
    so that the total mass is one.  Peak value is exactly ``2*pi``.
    """

    def __init__(self, hbar: float, iota: float):
        self.hbar = float(hbar)
        self.iota = float(iota)
        self.center = self.hbar / 2
        self.width = self.center - self.iota
        target = 1.0 / (TWO_PI * self.width)
        if self.width > _W_MAX * (1 + 1e-12) or self.width <= _W_MIN:
            raise ValueError(f"bump half-width {self.width} cannot carry unit mass at peak 2*pi")
        if abs(self._mass_factor(1.0) - target) < 1e-15:
            self.p = 1.0
        else:
            hi = 2.0
            while self._mass_factor(hi) < target:
                hi *= 2
            self.p = bisect(lambda p: self._mass_factor(p) - target, 1.0, hi)
        self.mass = TWO_PI * self.width * self._mass_factor(self.p)
        self._half_one = self._half_integral(1.0)

    @staticmethod
    def _mass_factor(p: float) -> float:
        # integral over [-1, 1] of (1 - |u|^2p)^4
        return 2.0 * sum(c / (2 * p * j + 1) for j, c in enumerate(_BINOM4))

    def _half_integral(self, x):
        p = self.p
        return sum(c * x ** (2 * p * j + 1) / (2 * p * j + 1) for j, c in enumerate(_BINOM4))

    @property
    def support(self) -> tuple[float, float]:
        return self.iota, self.hbar - self.iota

    def offsets_at(self, ratio: float) -> float:
        """Distance from the center at which ``theta = ratio``, for ``0 < ratio <= 2 pi``."""
        # theta is even about the center, so both roots follow from one inversion
        return self.width * (1.0 - (ratio / TWO_PI) ** 0.25) ** (1.0 / (2 * self.p))

    def __call__(self, t):
        if isinstance(t, (float, int)):
            u = abs(t - self.center) / self.width
            return TWO_PI * (1 - u ** (2 * self.p)) ** 4 if u < 1 else 0.0
        t = np.asarray(t, dtype=float)
        u = np.abs(t - self.center) / self.width
        inside = u < 1
        val = np.where(inside, TWO_PI * (1 - np.minimum(u, 1) ** (2 * self.p)) ** 4, 0.0)
        return val if val.ndim else float(val)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        x = (t - self.center) / self.width
        u = np.minimum(np.abs(x), 1.0)
        p = self.p
        inner = 1 - u ** (2 * p)
        val = TWO_PI * 4 * inner ** 3 * (-2 * p * u ** (2 * p - 1)) * np.sign(x) / self.width
        val = np.where(np.abs(x) < 1, val, 0.0)
        return val if val.ndim else float(val)

    def antiderivative(self, t):
        """``Theta(t)``, the integral of ``theta`` from ``-inf`` (i.e. 0) to ``t``."""
        if isinstance(t, (float, int)):
            x = min(max((t - self.center) / self.width, -1.0), 1.0)
            half = self._half_integral(abs(x))
            return TWO_PI * self.width * (self._half_one + math.copysign(half, x))
        t = np.asarray(t, dtype=float)
        x = np.clip((t - self.center) / self.width, -1.0, 1.0)
        half = self._half_integral(1.0)
        val = TWO_PI * self.width * (half + np.sign(x) * self._half_integral(np.abs(x)))
        return val if val.ndim else float(val)


class TwistProfile:
    """Smoothstep from ``pi`` (left of ``a``) down to ``0`` (right of ``b``)."""

    def __init__(self, a: float, b: float):
        if not a < b:
            raise ValueError("twist window must have a < b")
        self.a, self.b = float(a), float(b)
        self.span = self.b - self.a

    def __call__(self, t):
        if isinstance(t, (float, int)):
            return self.scalar(float(t))
        x = np.clip((np.asarray(t, dtype=float) - self.a) / self.span, 0.0, 1.0)
        val = math.pi * (1 - x * x * (3 - 2 * x))
        return val if np.ndim(val) else float(val)

    def derivative(self, t):
        x = (np.asarray(t, dtype=float) - self.a) / self.span
        val = np.where((x > 0) & (x < 1), -math.pi * 6 * x * (1 - x) / self.span, 0.0)
        return val if val.ndim else float(val)

    def antiderivative(self, t):
        """Integral of the profile from 0 to ``t`` (``t >= 0``)."""
        if isinstance(t, (float, int)):
            x = min(max((t - self.a) / self.span, 0.0), 1.0)
            return math.pi * min(t, self.a) + math.pi * self.span * (x - (x ** 3 - x ** 4 / 2))
        t = np.asarray(t, dtype=float)
        x = np.clip((t - self.a) / self.span, 0.0, 1.0)
        smooth = math.pi * self.span * (x - (x ** 3 - x ** 4 / 2))
        val = math.pi * np.minimum(t, self.a) + smooth
        return val if val.ndim else float(val)

    @property
    def total(self) -> float:
        return math.pi * self.a + math.pi * self.span / 2

    def scalar(self, t: float) -> float:
        x = min(max((t - self.a) / self.span, 0.0), 1.0)
        return math.pi * (1 - x * x * (3 - 2 * x))

    def inverse(self, value: float) -> float:
        """The radius in ``(a, b)`` where the profile equals ``value`` in ``(0, pi)``."""
        y = 1.0 - value / math.pi  # smoothstep 3x^2 - 2x^3 = y
        x = 0.5 - math.sin(math.asin(1.0 - 2.0 * y) / 3.0)
        return self.a + self.span * x


@dataclass(frozen=True)
class TabulatedOffset:
    """Bounded function of the radius, linearly interpolated from a table."""

    r: tuple[float, ...]
    f: tuple[float, ...]

    def __post_init__(self):
        if len(self.r) != len(self.f) or len(self.r) < 1:
            raise ValueError("ambient offset table needs matching non-empty r and f")
        object.__setattr__(self, "r", tuple(float(x) for x in self.r))
        object.__setattr__(self, "f", tuple(float(x) for x in self.f))

    def __call__(self, radius):
        val = np.interp(radius, self.r, self.f)
        return val if np.ndim(val) else float(val)

    def max_abs(self, lo: float, hi: float) -> float:
        pts = [lo, hi] + [x for x in self.r if lo <= x <= hi]
        return max(abs(self(x)) for x in pts)


@dataclass(frozen=True)
class ModelConfig:
    """Geometric data: sphere dimension, fiber separation and radial layout.

    ``sigma_mode`` marks a layout meant for the sign-alternating doubled
    vectors; it needs an even number of bands.
    """

    n: int
    delta: float
    partition: RadialPartition
    ambient_offset: TabulatedOffset | None = None
    sigma_mode: bool = False
    radius: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"sphere dimension must be a positive integer, got {self.n}")
        if not 0 < self.delta < math.pi:
            raise ValueError(f"delta must lie in (0, pi), got {self.delta}")
        if self.partition.outer >= self.radius:
            raise ValueError(
                f"outermost shell {self.partition.outer} must lie below the disk radius {self.radius}"
            )
        if self.sigma_mode and self.d % 2:
            raise ValueError("sigma_mode needs an even number of bands")

    # construction -------------------------------------------------------

    @classmethod
    def uniform(cls, n: int = 2, delta: float = math.pi / 3, d: int = 3, *, band: float = 0.25,
                gap: float = 0.1, inner: float = 0.1, sigma_mode: bool = False,
                iota: float | None = None, ambient_offset=None) -> "ModelConfig":
        bands = 2 * d if sigma_mode else d
        part = RadialPartition.uniform(bands, band=band, gap=gap, inner=inner, iota=iota)
        radius = max(1.0, part.outer + gap)
        return cls(n, delta, part, ambient_offset, sigma_mode, radius)

    @classmethod
    def from_json(cls, data: dict | str) -> "ModelConfig":
        if isinstance(data, str):
            data = json.loads(data)
        shells = data.get("shells")
        sigma = bool(data.get("sigma_mode", False))
        if shells is None:
            # "d" counts coordinates; sigma layouts get two bands per coordinate
            return cls.uniform(int(data["n"]), float(data["delta"]), int(data["d"]),
                               sigma_mode=sigma, iota=data.get("iota"),
                               ambient_offset=_offset_from_json(data.get("ambient_offset")))
        part = RadialPartition(tuple(shells), data.get("iota"))
        expected = 2 * int(data["d"]) if sigma else int(data["d"])
        if "d" in data and part.d != expected:
            raise ValueError(f"config d={data['d']} does not match {part.d} bands in shells")
        radius = float(data.get("radius", max(1.0, part.outer + part.epsilon)))
        return cls(int(data["n"]), float(data["delta"]), part,
                   _offset_from_json(data.get("ambient_offset")), sigma, radius)

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "delta": self.delta,
            "d": self.d // 2 if self.sigma_mode else self.d,
            "shells": list(self.partition.shells),
            "iota": self.partition.iota,
            "sigma_mode": self.sigma_mode,
            "radius": self.radius,
        }
        if self.ambient_offset is not None:
            out["ambient_offset"] = {"r": list(self.ambient_offset.r), "f": list(self.ambient_offset.f)}
        return out

    # derived data -------------------------------------------------------

    @property
    def d(self) -> int:
        """Number of bands."""
        return self.partition.d

    @property
    def dim(self) -> int:
        """Length of the parameter vectors accepted by this layout."""
        return self.d // 2 if self.sigma_mode else self.d

    @cached_property
    def bump(self) -> BumpProfile:
        return BumpProfile(self.partition.hbar, self.partition.iota)

    @cached_property
    def _twists(self) -> tuple[TwistProfile, ...]:
        eps = self.partition.epsilon
        return tuple(
            TwistProfile(self.partition.hat_h(i) + eps / 3, self.partition.hat_h(i) + eps / 2)
            for i in range(self.d + 1)
        )

    def twist(self, i: int) -> TwistProfile:
        if not 0 <= i <= self.d:
            raise IndexError(f"twist index {i} out of range 0..{self.d}")
        return self._twists[i]

    def band_support(self, b: int) -> tuple[float, float]:
        lo, hi = self.bump.support
        c = self.partition.check_h(b)
        return c + lo, c + hi

    def band_peak(self, b: int) -> float:
        return self.partition.check_h(b) + self.bump.center

    def offset(self, radius) -> float:
        return 0.0 if self.ambient_offset is None else self.ambient_offset(radius)

    def _vec(self, v) -> np.ndarray:
        v = np.zeros(self.d) if v is None else np.asarray(v, dtype=float).ravel()
        if v.size != self.d:
            raise ValueError(f"vector of length {v.size} given for {self.d} bands")
        return v

    # profiles -----------------------------------------------------------

    def theta_i(self, b: int, t):
        return self.bump(_shift(t, self.partition.check_h(b)))

    @cached_property
    def _band_table(self) -> tuple[tuple[float, float, float], ...]:
        # (check_h, support start, support end) per band
        return tuple((self.partition.check_h(b),) + self.band_support(b) for b in range(1, self.d + 1))

    @cached_property
    def _full_mass(self) -> float:
        return self.bump.antiderivative(self.bump.hbar)

    def theta_v(self, t, v):
        v = self._vec(v)
        if np.ndim(t) == 0:
            t = float(t)
            for (c, lo, hi), vb in zip(self._band_table, v.tolist()):
                if lo < t < hi:
                    return vb * self.bump(t - c)
            return 0.0
        out = 0.0
        for b in range(1, self.d + 1):
            if v[b - 1] != 0.0:
                out = out + v[b - 1] * self.theta_i(b, t)
        return out if np.ndim(t) == 0 else np.broadcast_to(out, np.shape(t)).astype(float)

    def theta_v_prime(self, t, v):
        v = self._vec(v)
        out = 0.0
        for b in range(1, self.d + 1):
            if v[b - 1] != 0.0:
                out = out + v[b - 1] * self.bump.derivative(np.asarray(t, dtype=float) - self.partition.check_h(b))
        return out if np.ndim(t) == 0 else np.broadcast_to(out, np.shape(t)).astype(float)

    def hamiltonian_value(self, r, v):
        """``H_v`` at radius ``r``: the integral of ``theta_v`` over ``[0, r]``."""
        v = self._vec(v)
        if np.ndim(r) == 0:
            r = float(r)
            out = 0.0
            for (c, lo, hi), vb in zip(self._band_table, v.tolist()):
                if vb == 0.0 or r <= lo:
                    continue
                out += vb * (self._full_mass if r >= hi else self.bump.antiderivative(r - c))
            return out
        out = 0.0
        for b in range(1, self.d + 1):
            if v[b - 1] != 0.0:
                out = out + v[b - 1] * self.bump.antiderivative(_shift(r, self.partition.check_h(b)))
        return out if np.ndim(r) == 0 else np.broadcast_to(out, np.shape(r)).astype(float)

    def rho(self, i: int, t):
        return self.twist(i)(t)

    def rho_integral(self, i: int, t):
        return self.twist(i).antiderivative(t)

    # level equations ----------------------------------------------------

    def solve_bump_level(self, b: int, coeff: float, level: float) -> tuple[float, ...]:
        """Radii ``t`` with ``coeff * theta_b(t) = level``, ascending.

        Two roots straddle the band peak when ``0 < level/coeff < 2*pi``; no
        root when the ratio is outside ``[0, 2*pi]``.  A ratio of exactly
        ``2*pi`` is a tangency and raises :class:`NonTransverseError`.
        """
        if coeff == 0.0 or level == 0.0:
            raise ValueError("level equation needs nonzero coefficient and level")
        ratio = level / coeff
        if ratio <= 0 or ratio > TWO_PI * (1 + 1e-12):
            return ()
        if abs(ratio - TWO_PI) <= 1e-12 * TWO_PI:
            raise NonTransverseError(f"level {level} touches the peak of band {b}")
        peak = self.band_peak(b)
        off = self.bump.offsets_at(ratio)
        return peak - off, peak + off

    def solve_twist_level(self, i: int, k: int, level: float) -> float:
        """The unique radius with ``2k * rho_i(t) = level``, ``0 < level < 2*pi*k``."""
        if k < 1:
            raise ValueError("twist power k must be >= 1")
        top = TWO_PI * k
        if level <= 0 or level >= top:
            if level in (0.0, top):
                raise NonTransverseError(f"level {level} sits at an end of the twist range")
            raise ValueError(f"level {level} outside (0, {top})")
        tw = self.twist(i)
        return tw.inverse(level / (2 * k))


def _offset_from_json(data) -> TabulatedOffset | None:
    if data is None:
        return None
    return TabulatedOffset(tuple(data["r"]), tuple(data["f"]))
