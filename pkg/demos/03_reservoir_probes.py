"""Look inside a deep ESN: state ranges, frequency content, memory.

The genome is one the GA found for Mackey-Glass on a 3 x 100 deep ESN.
Outputs go to ./probe_out as CSV for plotting elsewhere.
"""
import os

import numpy as np

from hier_esn import (HyperParams, Topology, build_network, gen_narma10, memory_capacity,
                      node_state_distribution, sub_reservoir_spectrum)

genome = [0.675, 0.998, 0.328, 0.735, 0.357, 0.624, 0.45, 0.747, 0.705]
deep = build_network(Topology.make("deep", 300, 3, HyperParams.from_genes(genome)), 0)

# Per-node mean and spread of the activations under NARMA10 input.
u, _ = gen_narma10(2000, seed=0)
dist = node_state_distribution(deep, u.values)
for l, sub in enumerate(dist.subs, 1):
    print(f"layer {l}: node means span [{sub[0, 0]:.3f}, {sub[-1, 0]:.3f}], "
          f"mean std {sub[:, 1].mean():.3f}")
os.makedirs("probe_out", exist_ok=True)
dist.to_csv("probe_out/states.csv")

# Driven by the 12-sine MSO signal, each layer's spectrum at the 12 component
# frequencies, divided by that layer's smallest peak.
prof = sub_reservoir_spectrum(deep)
np.set_printoptions(precision=1, suppress=True)
for l, row in enumerate(prof.normalized, 1):
    print(f"layer {l} normalised peaks:", row)
print("deeper layers weight the slowest component more:",
      prof.normalized[-1, 0] > prof.normalized[0, 0])
prof.to_csv("probe_out")

# Memory capacity: how many past inputs a linear readout can recover. Compared
# on genomes the GA found for NARMA10, where memory is what the task rewards.
narma_shallow = [0.314, 0.736, 0.985]
narma_deep = [0.37, 0.708, 0.953, 0.915, 0.208, 0.718, 0.12, 0.759, 0.251]
shallow = build_network(Topology.make("shallow", 300, 1, HyperParams.from_genes(narma_shallow)), 0)
deep_n = build_network(Topology.make("deep", 300, 3, HyperParams.from_genes(narma_deep)), 0)
for name, net in (("shallow", shallow), ("deep", deep_n)):
    mc = memory_capacity(net, max_delay=100)
    print(f"{name:8s} MC {mc.total:.2f}  (r2 at k=1,10,30: "
          f"{mc.r2[0]:.2f}, {mc.r2[9]:.2f}, {mc.r2[29]:.2f})")
