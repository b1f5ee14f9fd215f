"""
Chords of the local model and their gradings
============================================

Lists the chords of a twisted fiber against a pushed fiber and checks the
closed-form Maslov index against an explicit crossing count.
"""
import numpy as np

from hoferlab.chords import enumerate_chords, k_threshold, maslov_oracle
from hoferlab.floer import FloerScenario, build_complex, degree_gap, distinguished_chord
from hoferlab.local_model import ModelConfig

config = ModelConfig.uniform(3, 1.0, 2)
v = np.array([1.3, -0.6])

# %% twist power at the threshold, twist index 1
k = k_threshold(v)
scen = FloerScenario(config, v, 1, k)
print(f"k0 = {k}, {len(scen.chords)} chords")
for c in scen.chords[:8]:
    print(f"{c.label:>14}  {c.sector:>3}  index {c.index:3d}  action {c.action: .6f}")

# %% every closed-form index agrees with the crossing count
agree = all(c.index == maslov_oracle(c, scen.i, scen.k, scen.v, config) for c in scen.chords)
print("indices agree with crossing count:", agree)

# %% inner phi chords sit below the distinguished degree, outer ones above
print("degree gap (inner max, target, outer min):", degree_gap(scen))
xi = distinguished_chord(scen)
print("distinguished chord:", xi.label, "action", xi.action)

# %% the complex itself; only phi chords are paired by the differential
C = build_complex(scen)
print(len(C.ids), "generators,", sum(1 for g in C.ids if C.d(g)), "nonzero boundaries")
