"""A miniature architecture comparison through the experiment harness.

Three cells (shallow, wide, deep) on NARMA10 at 150 nodes with a short GA.
Each cell writes result.json / seeds.csv under ./matrix_out, and all seeds
land in one matrix.csv. Set HIER_ESN_THREADS to cap the worker count.
"""
import os

from hier_esn.harness import ExperimentConfig, run_matrix

os.makedirs("matrix_out", exist_ok=True)
cells = [
    ExperimentConfig(task="narma10", architecture=arch, total_nodes=150, n_subs=3,
                     ga={"generations": 40}, n_final_seeds=5, root_seed=3,
                     out_dir=f"matrix_out/{arch}")
    for arch in ("shallow", "wide", "deep")
]
results = run_matrix(cells, out_path="matrix_out/matrix.csv")
for r in results:
    s = r.stats
    print(f"{r.config['architecture']:8s} median {s['median']:.4f}  "
          f"[{s['min']:.4f}, {s['max']:.4f}]")
