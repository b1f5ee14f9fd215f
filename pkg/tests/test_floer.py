import math

import numpy as np
import pytest
from scipy.integrate import quad

from hoferlab.chords import k_threshold
from hoferlab.filtered_complex import FilteredComplex, Generator, homology_rank, reduce_to_barcode, validate
from hoferlab.floer import (
    DifferentialRule, FloerScenario, Mode, ModelInconsistencyError, ThresholdError, boundary_depth_scenario,
    build_complex, degree_gap, distinguished_chord, principal_pair, spectral_a,
)
from hoferlab.local_model import ModelConfig, NonTransverseError, TabulatedOffset
from hoferlab.persistence import boundary_depth, spectral_invariants


def cfg(n, d=3):
    return ModelConfig.uniform(n, 1.0, d)


# rules and scenarios --------------------------------------------------------

def test_rule_by_dimension():
    assert DifferentialRule.for_dimension(1).mode is Mode.DISK_PAIRING
    assert DifferentialRule.for_dimension(2).mode is Mode.SYMMETRY_REDUCED
    assert DifferentialRule.for_dimension(7).mode is Mode.DEGREE_VANISHING
    assert DifferentialRule.for_dimension(2).assumed_pairing
    assert not DifferentialRule.for_dimension(3).assumed_pairing
    with pytest.raises(ValueError):
        DifferentialRule(Mode.DEGREE_VANISHING).check_dimension(2)
    with pytest.raises(ValueError):
        build_complex(FloerScenario(cfg(3), [1.2, 0, 0], 0, 1), DifferentialRule(Mode.DISK_PAIRING))


def test_scenario_validation():
    c = cfg(2)
    with pytest.raises(ValueError):
        FloerScenario(c, [1.0, 2.0], 0, 1)
    with pytest.raises(ValueError):
        FloerScenario(c, [1.0, 2.0, 0.0], 4, 1)
    with pytest.raises(ValueError):
        FloerScenario(c, [1.0, 2.0, 0.0], 0, -1)
    with pytest.raises(NonTransverseError):
        FloerScenario(c, [c.delta / (2 * math.pi), 0, 0], 0, 1)


def test_build_complex_valid_on_random_scenarios(rng):
    for _ in range(100):
        n = int(rng.choice([1, 2, 3, 4]))
        scen = FloerScenario(cfg(n), rng.uniform(-4, 4, 3), int(rng.integers(0, 4)), int(rng.integers(0, 7)))
        C = build_complex(scen)
        assert validate(C) is None
        assert sorted(map(str, C.ids)) == sorted(c.label for c in scen.chords)


def test_untwisted_single_band_has_only_finite_bars():
    c = cfg(2, d=1)
    for k in range(1, 6):
        scen = FloerScenario(c, [k + 0.0], 0, 0)
        C = build_complex(scen)
        assert len(C.generators) == 4 * k and len(C.boundary) == 2 * k
        B = reduce_to_barcode(C)
        assert len(B.finite_part()) == 2 * k and len(B.infinite_part()) == 0


@pytest.mark.parametrize("n", [2, 3])
def test_homology_ranks(n, rng):
    for k in range(1, 9):
        degrees = {n + j * (n - 1) for j in range(2 * k)}
        for v in (np.zeros(3), rng.uniform(-1, 1, 3)):
            C = build_complex(FloerScenario(cfg(n), v, 1, k))
            for deg in range(-2, n + 2 * k * (n - 1) + 3):
                assert homology_rank(C, deg) == (1 if deg in degrees else 0)


def test_degree_gap_and_unique_generator(rng):
    c = cfg(3)
    for _ in range(30):
        v = rng.uniform(-4, 4, 3)
        k = k_threshold(v)
        for i in range(4):
            scen = FloerScenario(c, v, i, k)
            lo, target, hi = degree_gap(scen)
            assert (lo is None or lo < target) and (hi is None or target < hi)
            assert distinguished_chord(scen).sector == "tau"
            C = build_complex(scen)
            assert homology_rank(C, target) == 1


def test_k1_barcode_reads_twist_actions(cfg2):
    scen = FloerScenario(cfg2, np.zeros(3), 1, 1)
    B = reduce_to_barcode(build_complex(scen))
    assert spectral_invariants(B) == sorted(c.action for c in scen.chords)
    assert len(scen.chords) == 2


# spectral differences -------------------------------------------------------

def test_threshold_enforced(cfg3):
    with pytest.raises(ThresholdError) as err:
        spectral_a(0, [3.5, 0.0, 0.0], 7, cfg3)
    assert err.value.k0 == 14 and "14" in str(err.value)
    with pytest.raises(ValueError):
        spectral_a(3, [0.5, 0.0, 0.0], 8, cfg3)
    with pytest.raises(ValueError):
        spectral_a(0, [0.5, 0.0, 0.0], 8, ModelConfig.uniform(1, 1.0, 3))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_spectral_difference_identity(n, rng):
    c = cfg(n)
    for _ in range(15):
        v, w = rng.uniform(-4, 4, 3), rng.uniform(-4, 4, 3)
        k = k_threshold(v, w)
        for i in range(3):
            diff = spectral_a(i, v, k, c) - spectral_a(i, w, k, c)
            assert abs(diff - (w[i] - v[i])) < 1e-9
        assert spectral_a(1, v, k, c) - spectral_a(1, v, k, c) == 0.0


def test_spectral_a_by_quadrature(cfg3, rng):
    v = rng.uniform(-3, 3, 3)
    k = k_threshold(v)
    for i in range(2):
        value = spectral_a(i, v, k, cfg3)

        def xi_action(j):
            xi = distinguished_chord(FloerScenario(cfg3, v, j, k))
            tw = cfg3.twist(j)
            rho_int = quad(lambda t: cfg3.rho(j, t), 0, xi.r, points=[tw.a], limit=200, epsabs=1e-13)[0]
            passed = sum(v[b - 1] * quad(lambda t: cfg3.theta_i(b, t), *cfg3.band_support(b),
                                         points=[cfg3.band_peak(b)], epsabs=1e-13)[0]
                         for b in range(1, j + 1))
            return -(2 * k * cfg3.rho(j, xi.r) * xi.r - 2 * k * rho_int) - passed

        assert abs(value - (xi_action(i + 1) - xi_action(i))) < 1e-9


def test_spectral_difference_ignores_common_shift(cfg3):
    # another primitive moves every action by the same constant
    v = np.array([1.1, -0.4, 2.6])
    k = k_threshold(v)
    shift = 3.7

    def xi_invariant(j, c):
        scen = FloerScenario(cfg3, v, j, k)
        C = build_complex(scen)
        moved = FilteredComplex([Generator(g.id, g.degree, g.action + c) for g in C.generators],
                                {key: list(t) for key, t in C.boundary.items()})
        target = distinguished_chord(scen).action + c
        specs = spectral_invariants(reduce_to_barcode(moved))
        return min(specs, key=lambda s: abs(s - target))

    before = xi_invariant(1, 0.0) - xi_invariant(0, 0.0)
    after = xi_invariant(1, shift) - xi_invariant(0, shift)
    assert after == pytest.approx(before, abs=1e-12)
    assert before == pytest.approx(spectral_a(0, v, k, cfg3), abs=1e-12)


# boundary depth -------------------------------------------------------------

FROZEN_BETA = {1: 0.8017654047268498, 2: 1.7961696362325845, 5: 4.7908926059467545, 16: 15.786302427410297}


@pytest.mark.parametrize("k", sorted(FROZEN_BETA))
def test_boundary_depth_frozen(k):
    # values from brentq roots and adaptive quadrature of k * theta_1 - delta between them
    for ell in (0, 2):
        beta, lower = boundary_depth_scenario(k, ell, cfg(2, d=1))
        assert beta == pytest.approx(FROZEN_BETA[k], abs=1e-9)
        assert beta >= lower - 1e-12


@pytest.mark.parametrize("n", [1, 2, 3])
def test_boundary_depth_bound_and_growth(n):
    c = cfg(n, d=1)
    betas = []
    for k in range(1, 21):
        beta, lower = boundary_depth_scenario(k, 1, c)
        assert beta >= lower - 1e-8
        top, bottom = principal_pair(k, 1, c)
        assert beta == pytest.approx(top.action - bottom.action, abs=1e-12)
        betas.append(beta)
    assert all(b > a for a, b in zip(betas[2:], betas[3:]))


def test_boundary_depth_ambient_constant():
    off = TabulatedOffset((0.0, 2.0), (0.1, 0.1))
    plain = ModelConfig.uniform(3, 1.0, 1)
    shifted = ModelConfig.uniform(3, 1.0, 1, ambient_offset=off)
    b0, l0 = boundary_depth_scenario(4, 0, plain)
    b1, l1 = boundary_depth_scenario(4, 0, shifted)
    assert b1 == pytest.approx(b0, abs=1e-12)  # a constant offset cancels in every action
    assert l1 == pytest.approx(l0 - 0.2, abs=1e-12)


def test_boundary_depth_requires_positive_k():
    with pytest.raises(ValueError):
        boundary_depth_scenario(0, 0, cfg(2, d=1))
