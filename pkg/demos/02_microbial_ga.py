"""Optimise per-layer hyperparameters of a small deep ESN with the microbial GA.

Mackey-Glass, 84 steps ahead. Kept small (150 nodes, 60 generations) so it
finishes in well under a minute; the desk protocol uses 300 nodes and 300
generations.
"""
from hier_esn import GaConfig, HyperParams, Topology, make_task, optimize

split = make_task("mackey_glass", seed=0)
template = Topology.make("deep", 150, 3, HyperParams(1.0, 1.0, 1.0))
config = GaConfig(generations=60, ga_seed=1, fitness_seed=2)

result = optimize(config, template, split)

for gen in (0, 9, 19, 39, 59):
    print(f"generation {gen + 1:3d}  best validation NRMSE {result.history[gen]:.4f}")
print(f"{result.evaluations} distinct genomes evaluated")
for l, hp in enumerate(HyperParams.from_genes(result.best_genome), 1):
    print(f"layer {l}: IS {hp.input_scaling:.3f}  SR {hp.spectral_radius:.3f}  "
          f"alpha {hp.leaky_rate:.3f}")
