import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hoferlab.chords import is_transverse, k_threshold
from hoferlab.floer import FloerScenario, distinguished_chord
from hoferlab.local_model import ModelConfig
from hoferlab.quasiflat import (
    NUDGE, coordinate_coefficients, hamiltonian_profile, hofer_upper_plain, hofer_upper_sigma, osc_profile,
    random_pairs, sandwich, sigma_map, sigma_osc_analytic, sweep,
)

vectors = st.lists(st.floats(-4, 4, allow_nan=False), min_size=3, max_size=3)


def test_sigma_map_examples():
    assert sigma_map([1, 2]).tolist() == [1, -1, 2, -2]
    assert sigma_map(np.zeros(3)).tolist() == [0.0] * 6


@given(vectors)
def test_sigma_map_keeps_sup_norm(v):
    assert np.abs(sigma_map(v)).max() == np.abs(v).max()


def test_osc_profile_basics():
    assert osc_profile([]) == 0.0
    assert osc_profile(np.zeros(5)) == 0.0
    assert osc_profile([0.0, 2.0, -1.0]) == 3.0


def test_plain_profile_is_monotone_step(cfg2):
    radii, values = hamiltonian_profile(cfg2, coordinate_coefficients(cfg2, 1, -2.5))
    assert values[0] == 0.0 and values[-1] == pytest.approx(-2.5, abs=1e-12)
    assert np.all(np.diff(values) <= 1e-15)
    assert osc_profile(values) == pytest.approx(2.5, abs=1e-12)


def test_sigma_profile_returns_to_zero(cfg_sigma):
    radii, values = hamiltonian_profile(cfg_sigma, coordinate_coefficients(cfg_sigma, 2, 1.75))
    assert values[0] == 0.0 and abs(values[-1]) < 1e-12
    assert values.max() == pytest.approx(1.75, abs=1e-12)
    assert osc_profile(values) == pytest.approx(1.75, abs=1e-9)


def test_profile_breakpoints_capture_extremes(cfg_sigma, rng):
    coeffs = rng.uniform(-3, 3, cfg_sigma.d)
    radii, values = hamiltonian_profile(cfg_sigma, coeffs)
    dense = cfg_sigma.hamiltonian_value(np.linspace(0, cfg_sigma.radius, 20001), coeffs)
    assert values.max() >= dense.max() - 1e-12 and values.min() <= dense.min() + 1e-12


def test_upper_plain_examples(cfg2):
    v = np.array([0.3, 1.1, -0.4])
    assert hofer_upper_plain(v, v, cfg2) == 0.0
    w = v - np.array([1.0, -2.0, 0.5])
    assert hofer_upper_plain(v, w, cfg2) == pytest.approx(3.5, abs=1e-12)
    assert hofer_upper_plain([0, 0, 0], [0, 0, 1.7], cfg2) == pytest.approx(1.7, abs=1e-12)


@given(vectors, vectors, st.floats(-3, 3))
def test_upper_plain_scales_linearly(v, w, c):
    cfg = ModelConfig.uniform(2, 1.0, 3)
    base = hofer_upper_plain(v, w, cfg)
    scaled = hofer_upper_plain(np.multiply(c, v), np.multiply(c, w), cfg)
    assert scaled == pytest.approx(abs(c) * base, abs=1e-9)
    assert base <= 2 * np.abs(np.subtract(v, w)).sum() + 1e-9


def test_upper_sigma_examples(cfg2, cfg_sigma):
    with pytest.raises(ValueError):
        hofer_upper_sigma([0, 0, 0], [1, 0, 0], cfg2)
    v = np.array([0.5, -1.0, 2.0])
    assert hofer_upper_sigma(v, v, cfg_sigma) == 0.0
    two = ModelConfig.uniform(2, 1.0, 2, sigma_mode=True)
    osc = hofer_upper_sigma([0, 0], [-3, -1], two)
    assert osc <= 6.0 and osc == pytest.approx(sigma_osc_analytic([0, 0], [-3, -1]), abs=1e-9)


@given(vectors, vectors)
def test_upper_sigma_matches_analytic(v, w):
    cfg = ModelConfig.uniform(2, 1.0, 3, sigma_mode=True)
    osc = hofer_upper_sigma(v, w, cfg)
    assert osc == pytest.approx(sigma_osc_analytic(v, w), abs=1e-9)
    assert osc <= 2 * np.abs(np.subtract(v, w)).max() + 1e-9


def test_sandwich_equal_inputs(cfg_sigma):
    r = sandwich([0.3, 1.2, -2.0], [0.3, 1.2, -2.0], config=cfg_sigma)
    assert (r.lower, r.upper_plain, r.upper_sigma, r.exact_inf_norm, r.exact_one_norm) == (0, 0, 0, 0, 0)


def test_sandwich_example(cfg_sigma):
    v = np.array([0.7, -1.3, 2.1])
    w = v + np.array([2.0, -1.5, 0.25])
    r = sandwich(v, w, config=cfg_sigma)
    assert r.exact_inf_norm == pytest.approx(2.0)
    assert r.lower == pytest.approx(1.0, abs=1e-9)
    assert r.upper_sigma == pytest.approx(3.5, abs=1e-9)
    assert r.absolute_version and not r.nudged


def test_sandwich_random(cfg_sigma):
    for v, w in random_pairs(3, 60, 3):
        r = sandwich(v, w, config=cfg_sigma)
        assert abs(r.lower - r.exact_inf_norm / 2) < 1e-9
        assert r.lower <= r.upper_sigma + 1e-9 <= 2 * r.exact_inf_norm + 2e-9
        assert r.upper_plain <= 2 * r.exact_one_norm + 1e-9


def test_sandwich_plain_layout(cfg2):
    r = sandwich([0.2, 0.4, -1.0], [1.0, 0.4, -1.5], config=cfg2)
    assert math.isnan(r.upper_sigma)
    assert r.lower == pytest.approx(0.4, abs=1e-9)
    assert r.upper_plain == pytest.approx(1.3, abs=1e-12)
    assert not r.absolute_version
    assert sandwich([0.2, 0.4], [0.0, 0.6], config=ModelConfig.uniform(2, 1.0, 2)).absolute_version


def test_sandwich_nudges_non_transverse(cfg_sigma):
    bad = [cfg_sigma.delta / (2 * math.pi), 0.5, 0.0]
    r = sandwich(bad, [1.2, 0.5, 0.0], config=cfg_sigma)
    assert r.nudged
    assert r.v[0] == pytest.approx(bad[0] + NUDGE, abs=1e-15)
    assert is_transverse(sigma_map(r.v), cfg_sigma)


def test_sandwich_explicit_k(cfg_sigma):
    v, w = [0.5, -1.0, 0.2], [1.5, 0.0, -0.3]
    k0 = k_threshold(sigma_map(v), sigma_map(w))
    assert sandwich(v, w, k0 + 4, cfg_sigma).lower == pytest.approx(sandwich(v, w, None, cfg_sigma).lower, abs=1e-9)


def test_lipschitz_consistency(cfg2, cfg_sigma, rng):
    # each single spectral invariant moves by at most the upper Hofer bound
    for config in (cfg2, cfg_sigma):
        for v, w in random_pairs(5, 15, 3):
            bv = sigma_map(v) if config.sigma_mode else v
            bw = sigma_map(w) if config.sigma_mode else w
            k = k_threshold(bv, bw)
            bound = hofer_upper_sigma(v, w, config) if config.sigma_mode else hofer_upper_plain(v, w, config)
            for j in range(config.d + 1):
                a = distinguished_chord(FloerScenario(config, bv, j, k)).action
                b = distinguished_chord(FloerScenario(config, bw, j, k)).action
                assert abs(a - b) <= bound + 1e-9


def test_random_pairs_deterministic():
    a, b = random_pairs(9, 4, 3), random_pairs(9, 4, 3)
    assert all(np.array_equal(x[0], y[0]) and np.array_equal(x[1], y[1]) for x, y in zip(a, b))
    assert all(np.abs(x).max() <= 4 for pair in a for x in pair)


def test_sweep_threads_agree(cfg_sigma):
    pairs = random_pairs(1, 6, 3)
    serial = sweep(cfg_sigma, pairs, threads=1)
    parallel = sweep(cfg_sigma, pairs, threads=2)
    assert [r.row() for r in serial] == [r.row() for r in parallel]
