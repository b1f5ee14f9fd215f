import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hoferlab.chords import enumerate_tau_chords
from hoferlab.filtered_complex import (
    FilteredComplex, Generator, InvalidComplexError, barcode_bruteforce, homology_rank,
    perturb_actions, random_complex, reduce_to_barcode, validate,
)
from hoferlab.persistence import Barcode, bottleneck_distance

INF = math.inf


def pair(ax=2.0, ay=1.0, dx=1, dy=0):
    return FilteredComplex([Generator("y", dy, ay), Generator("x", dx, ax)], {"x": ["y"]})


def test_validate_examples():
    assert validate(FilteredComplex([Generator("a", 0, 0.0), Generator("b", 1, 1.0)])) is None
    assert validate(pair()) is None
    bad = validate(pair(ax=1.0, ay=1.0))
    assert bad.kind == "action" and bad.ids == ("x", "y")
    assert validate(pair(dx=0, dy=0)).kind == "degree"


def test_validate_other_violations():
    gens = [Generator("a", 2, 3.0), Generator("b", 1, 2.0), Generator("c", 0, 1.0)]
    assert validate(FilteredComplex(gens, {"a": ["b"], "b": ["c"]})).kind == "d_squared"
    assert validate(FilteredComplex(gens, {"a": ["zz"]})).kind == "unknown_id"
    assert validate(FilteredComplex(gens + [Generator("a", 0, 0.0)])).kind == "duplicate_id"


def test_repeated_terms_cancel_mod_two():
    C = FilteredComplex([Generator("y", 0, 1.0), Generator("x", 1, 2.0)], {"x": ["y", "y"]})
    assert C.d("x") == frozenset()


def test_reduce_examples():
    assert reduce_to_barcode(pair()) == Barcode([(1.0, 2.0)])
    zero = FilteredComplex([Generator(j, 0, a) for j, a in enumerate([0.5, 2.0, 1.0])])
    assert reduce_to_barcode(zero) == Barcode([(0.5, INF), (1.0, INF), (2.0, INF)])
    with pytest.raises(InvalidComplexError):
        reduce_to_barcode(pair(ax=0.5))


def test_multi_term_boundary_pairs_with_youngest():
    # d x = y1 + y2: the class dies when the later of the two is born, not before
    gens = [Generator("y1", 0, 0.0), Generator("y2", 0, 1.0), Generator("x", 1, 3.0)]
    B = reduce_to_barcode(FilteredComplex(gens, {"x": ["y1", "y2"]}))
    assert B == Barcode([(0.0, INF), (1.0, 3.0)])
    assert B == barcode_bruteforce(FilteredComplex(gens, {"x": ["y1", "y2"]}))


def test_reduction_matches_rank_oracle(rng):
    for _ in range(300):
        C = random_complex(rng, int(rng.integers(1, 9)))
        assert validate(C) is None
        assert reduce_to_barcode(C) == barcode_bruteforce(C)


def test_random_complexes_have_mixed_boundaries(rng):
    sizes = [max(len(random_complex(rng, 8).boundary.get(f"g{j}", ())) for j in range(8)) for _ in range(50)]
    assert max(sizes) >= 2


def test_endpoints_are_generator_actions(rng):
    for _ in range(100):
        C = random_complex(rng, 8)
        B = reduce_to_barcode(C)
        acts = sorted(g.action for g in C.generators)
        lefts = [l for l, _ in B.expanded()]
        rights = [r for _, r in B.expanded() if r != INF]
        assert sorted(lefts + rights) == acts


def test_homology_rank_examples():
    two = FilteredComplex([Generator("a", 3, 0.0), Generator("b", 3, 1.0)])
    assert homology_rank(two, 3) == 2
    assert homology_rank(pair(), 0) == 0 and homology_rank(pair(), 1) == 0


def test_tau_sector_ranks(cfg2):
    chords = enumerate_tau_chords(cfg2, 0, 2)
    C = FilteredComplex([Generator(c.label, c.index, c.action) for c in chords])
    assert [homology_rank(C, d) for d in range(0, 8)] == [0, 0, 1, 1, 1, 1, 0, 0]


def test_homology_rank_is_bar_count_by_degree(rng):
    for _ in range(50):
        C = random_complex(rng, 8)
        infinite = len(reduce_to_barcode(C).infinite_part())
        assert sum(homology_rank(C, d) for d in range(-1, 6)) == infinite


def test_stability_under_action_noise(rng):
    for _ in range(100):
        C = random_complex(rng, 8)
        eps = 0.01
        D = perturb_actions(C, rng, eps)
        assert validate(D) is None
        assert bottleneck_distance(reduce_to_barcode(C), reduce_to_barcode(D)) <= eps + 1e-12


def test_json_roundtrip(rng):
    C = random_complex(rng, 6)
    D = FilteredComplex.from_json(C.to_json())
    assert D.generators == C.generators and D.boundary == C.boundary


def test_ties_broken_by_position():
    gens = [Generator("a", 0, 1.0), Generator("b", 0, 1.0)]
    assert reduce_to_barcode(FilteredComplex(gens)) == Barcode([(1.0, INF, 2)])


@given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=6, unique=True))
def test_zero_differential_gives_infinite_bars(actions):
    C = FilteredComplex([Generator(j, 0, a) for j, a in enumerate(actions)])
    assert reduce_to_barcode(C) == Barcode([(a, INF) for a in actions])
