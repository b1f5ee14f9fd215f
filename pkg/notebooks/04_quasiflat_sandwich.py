"""
Lower and upper Hofer bounds on a flat
======================================

For random pairs of coefficient vectors the spectral lower bound equals half
the sup-norm distance, and the symmetric construction stays within twice it.
"""
from hoferlab.quasiflat import random_pairs, sweep
from hoferlab.local_model import ModelConfig

config = ModelConfig.uniform(2, 1.0, 3, sigma_mode=True)
reports = sweep(config, random_pairs(seed=7, count=12, dim=3))

print(" |v-w|_inf     lower   upper_sigma   upper_plain")
for r in reports:
    print(f"{r.exact_inf_norm:10.4f} {r.lower:9.4f} {r.upper_sigma:13.4f} {r.upper_plain:13.4f}")

# %% ratio of the two sides stays in [1/2, 2]
ratios = [r.upper_sigma / r.exact_inf_norm for r in reports]
print("upper_sigma / |v-w|_inf in", (round(min(ratios), 4), round(max(ratios), 4)))
