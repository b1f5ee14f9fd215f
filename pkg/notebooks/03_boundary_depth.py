"""
Boundary depth grows without bound
==================================

Pushes the fiber by ``k`` times the first band Hamiltonian and tracks the
longest finite bar together with its guaranteed lower bound.
"""
from hoferlab.floer import DifferentialRule, boundary_depth_scenario
from hoferlab.local_model import ModelConfig

for n in (1, 2, 3):
    config = ModelConfig.uniform(n, 1.0, 1)
    rule = DifferentialRule.for_dimension(n)
    print(f"n = {n} ({rule.mode.value}{', assumed pairing' if rule.assumed_pairing else ''})")
    for k in (1, 2, 4, 8, 16, 32, 64):
        beta, lower = boundary_depth_scenario(k, 1, config, rule)
        print(f"  k = {k:2d}   beta = {beta:9.4f}   lower bound = {lower:9.4f}")
