"""The gauged solution tracks the free evolution at half a derivative above the data.

For rough data whose Fourier amplitudes decay like <k>^{-1.51}, the datum
barely misses H^{1.5}, yet the distance between the gauged solution and the
damped free evolution — measured in H^{1.5}, half a derivative above where
the datum lives — stays within a fixed multiple across a refinement sweep.
The study below raises N while keeping the same random phases and prints the
growing data norm against the slowly varying metric; `gkdv smoothing-study`
runs the same experiment at full size.
"""

import numpy as np

import gkdv as G

rows = G.refinement_smoothing_study(
    g=G.PolynomialNonlinearity.single(3, -1.0),
    gamma=0.5,
    forcing_modes={1: 0.5 + 0.0j},
    N_list=[16, 32, 64],
    rho=0.5,
    dt=5e-4,
    t_end=1.0,
    seed_rng=np.random.default_rng(2026),
    stride=10,
)

print(f"{'N':>4}  {'||u0||_H1.5':>12}  {'sup_t metric':>12}")
for row in rows:
    print(f"{row.N:>4}  {row.data_norm:>12.5f}  {row.sup_metric:>12.5f}")

print()
print("The data norm grows with N (the datum is not in H^1.5 in the limit),")
print("while the sup of the H^1.5 smoothing metric stays within a bounded")
print("multiple across the sweep: measured half a derivative above the data,")
print("the gauged flow keeps a uniform distance from the free evolution.")
