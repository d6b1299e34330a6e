#!/usr/bin/env python3
"""Build graphons over finite and infinite-mass spaces and measure them.

Walks through the kernel families, their L1 norms, degree profiles,
tail truncation, partition averaging and the unit-norm stretch.
"""

import numpy as np

from graphonlab import (
    CaronFoxGraphon,
    InfiniteBlockGraphon,
    Partition,
    RegionIndicatorGraphon,
    StepGraphon,
    average_over_partition,
    degree_profile,
    evaluate,
    flatten_to_line,
    l1_norm,
    stretch,
    truncate_tail,
)
from graphonlab.graphon_core import discretize, l1_norm_report

# A step kernel: two blocks of mass 1 and 2 with mild cross connectivity.
w = StepGraphon([1.0, 2.0], [[0.5, 0.2], [0.2, 0.1]])
print("step graphon on blocks of mass", w.masses.tolist())
print("  W(0.5, 2.0) =", evaluate(w, 0.5, 2.0), " (block 1 x block 2 -> 0.2)")
print("  ||W||_1 =", l1_norm(w), " (0.5*1 + 2*0.2*2 + 0.1*4 = 1.7)")

prof = degree_profile(w)
print("  degree profile: mu({D > 0.3}) =", prof(0.3), ", mu({D > 0.5}) =", prof(0.5))
print("  layer cake: int mu({D > lam}) dlam =", prof.layer_cake_integral(), "= ||W||_1")

# Tail truncation: the smallest prefix support absorbing all but eps of the mass.
t = truncate_tail(w, eps=0.05)
print("  truncate_tail(eps=0.05): keep [0,", t.mass_bound, "] with residual", t.residual)

# Averaging over a partition contracts the L1 norm.
merged = average_over_partition(w, Partition.from_cells(w, [[0, 1]]))
print("  merged to one cell: value", merged.values[0, 0], ", ||.||_1 =", l1_norm(merged))

# Stretching rescales the measure so the kernel has unit L1 norm.
s = stretch(w)
print("  stretch: masses", np.round(s.masses, 4).tolist(), "-> ||.||_1 =", l1_norm(s))

# A Caron-Fox style kernel on the half line: W = 1 - exp(-f(x) f(y)).
cf = CaronFoxGraphon("shifted_power", c=1.0, gamma=2.0, target_l1_residual=0.01)
rep = l1_norm_report(cf)
print("\ncaron_fox with f(x) = (1+x)^-2, truncated at x_max =", round(cf.truncation.x_max, 3))
print("  W(0,0) =", evaluate(cf, 0.0, 0.0), "= 1 - e^-1")
print("  ||W||_1 over the truncation =", round(rep.value, 6), "+/-", rep.error_bound)
cf_near = CaronFoxGraphon("shifted_power", c=1.0, gamma=2.0, x_max=8.0)
step_cf, err = discretize(cf_near, 0.5)
print(f"  {step_cf.n_blocks}-cell step approximation on [0, 8], refinement error estimate",
      round(err, 6))

# The region indicator under an involutive power curve: integrable degree
# function that lies in no L^k for k >= 2.
region = RegionIndicatorGraphon(0.5, x_max=100.0)
print("\nregion indicator: full-space mass =", region.l1_full(), "(= 3 for a = 1/2)")

# Countable block models flatten exactly onto the line.
blocks = InfiniteBlockGraphon([(0.0, 1.0), (1.0, 3.0)], [[1.0, 0.0], [0.0, 0.0]])
flat = flatten_to_line(blocks)
print("\ninfinite_block flattened: masses", flat.masses.tolist(), "values", flat.values.tolist())
