"""Build a three-layer deep ESN by hand and train its readout on NARMA10.

Everything here is what the GA does for one fitness evaluation, spelled out.
Run with ``python demos/01_train_a_deep_esn.py``.
"""
import numpy as np

from hier_esn import FeatureSpec, HyperParams, Topology, build_network, make_task, nrmse, train_readout

# NARMA10 with its default protocol: 100 washout, 3000 train, 100 validation, 1000 test.
split = make_task("narma10", seed=0)
print(f"task {split.name}: {len(split.inputs)} samples, washout {split.washout}")

# Three sub-reservoirs of 100 nodes, each with its own (IS, SR, alpha).
layers = [HyperParams(0.4, 0.7, 0.9), HyperParams(0.7, 0.95, 0.9), HyperParams(0.2, 0.7, 0.3)]
topo = Topology.make("deep", 300, 3, layers)
net = build_network(topo, seed=7)
print("spectral radius per layer:", np.round(net.spectral_radii(), 6))

# Drive the network over washout + train, fit the ridge readout.
_, train_end = split.train_range
trace = net.run(split.inputs[:train_end])
spec = FeatureSpec(append_raw_input=split.append_raw_input)
readout = train_readout(trace, split.inputs[:train_end], split.targets[:train_end],
                        split.washout, spec)
print("readout weights:", readout.w_out.shape)

# Test: reset, replay the 100 samples before the test block, then predict.
start, stop = split.test_range
first = start - split.transient
trace = net.run(split.inputs[first:stop])
pred = readout.predict(trace.rows(split.transient), split.inputs[start:stop])
print(f"test NRMSE {nrmse(pred, split.targets[start:stop]):.4f}")

# A mean predictor scores exactly 1, which is the yardstick for the number above.
y = split.targets[start:stop]
print(f"mean predictor NRMSE {nrmse(np.full_like(y, y.mean()), y):.4f}")
