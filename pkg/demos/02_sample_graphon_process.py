#!/usr/bin/env python3
"""Grow a graphon process and inspect its projective structure.

Vertices arrive by a Poisson process on time x feature space; pairs
connect independently with the kernel probability.  Snapshots at earlier
times are induced subgraphs of later ones, and the whole trace is
reproducible from (spec, horizon, seed).
"""

import numpy as np

from graphonlab import StepGraphon, constant_graphon
from graphonlab.sampling import (
    ArrivalSchedule,
    sample_dense_wrandom,
    sample_graphon_process,
    sample_sequential,
    snapshot_at,
    xi_box_counts,
)

w = StepGraphon([1.0, 1.0], [[0.9, 0.3], [0.3, 0.1]])
trace = sample_graphon_process(w, horizon=25.0, seed=11)
print(f"trace at T=25: {trace.num_vertices} vertices, {trace.num_edges} edges")

for s in (5.0, 10.0, 25.0):
    g = snapshot_at(trace, s)
    g_tilde = snapshot_at(trace, s, keep_isolated=True)
    print(f"  t={s:5.1f}: G_t has {g.num_vertices:3d} vertices ({g_tilde.num_vertices:3d} with isolated),"
          f" {g.num_edges:4d} edges, density {g.edge_density:.3f}")

# The edge birth-pair measure is symmetric and sums to 2|E|.
counts = xi_box_counts(trace, h=5.0)
print("xi box counts (h=5):")
print(counts)
print("  sum =", counts.sum(), "= 2|E| =", 2 * trace.num_edges)

# 2|E(G_t)| / t^2 estimates ||W||_1.
from graphonlab import l1_norm

ratios = [2 * sample_graphon_process(w, 25.0, seed=s).num_edges / 25.0**2 for s in range(40)]
print(f"mean 2|E|/T^2 over 40 runs: {np.mean(ratios):.3f} vs ||W||_1 = {l1_norm(w):.3f}")

# Sequential arrivals: a growing-prefix schedule with summable inverse masses
# starves the support, a linear one keeps finding it.
support = StepGraphon([1.0], [[1.0]], ambient_infinite=True)
for family in ("linear", "exponential"):
    graphs = sample_sequential(support, ArrivalSchedule(family, 1.0), steps=200,
                               seed=1, checkpoints=[50, 200])
    print(f"sequential {family:11s}: |E| at n=50 -> {graphs[0].num_edges}, at n=200 -> {graphs[1].num_edges}")

# Dense W-random graphs are the classical fixed-n model.
g = sample_dense_wrandom(constant_graphon(0.5), 60, seed=4)
print(f"dense W-random at n=60, p=0.5: {g.num_edges} edges (expected ~{0.5 * 60 * 59 / 2:.0f})")
