"""
Barcodes, matchings and filtered complexes
==========================================

A small tour of the persistence layer: build a filtered complex by hand,
reduce it, and compare barcodes with the bottleneck distance.
"""
import numpy as np

from hoferlab.filtered_complex import FilteredComplex, Generator, homology_rank, perturb_actions, reduce_to_barcode
from hoferlab.persistence import bottleneck_bruteforce, bottleneck_distance, boundary_depth

# %% a three generator complex: b kills a, c survives
C = FilteredComplex(
    [Generator("a", 0, 0.0), Generator("b", 1, 1.5), Generator("c", 0, 0.25)],
    {"b": ["a"]},
)
B = reduce_to_barcode(C)
print("barcode:", B)
print("boundary depth:", boundary_depth(B))
print("rank in degree 0:", homology_rank(C, 0))

# %% the same complex with its actions moved by at most 0.1
rng = np.random.default_rng(1)
D = perturb_actions(C, rng, 0.1)
B2 = reduce_to_barcode(D)
print("perturbed:", B2)
print("bottleneck distance:", bottleneck_distance(B, B2))
# the exhaustive oracle agrees on small inputs
print("exhaustive:", bottleneck_bruteforce(B, B2))

# %% barcodes serialize to plain JSON ("inf" for infinite endpoints)
print(B.to_json())
