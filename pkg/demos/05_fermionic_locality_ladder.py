"""Free-fermion circuits: duals that scale to hundreds of modes.

For Gaussian circuits (quadratic gates, depolarizing-style mode noise)
everything reduces to 2N x 2N real antisymmetric matrices: states become
covariance matrices, observables become quadratic forms, Gibbs free
energies have closed forms in the mode energies.  The information-content
dual then turns into a smooth optimization over one quadratic "dual
Hamiltonian" per layer, solved with L-BFGS-B and an analytic gradient.

The knob worth showing is the locality radius r: dual variables are
restricted to matrix elements coupling modes within Manhattan distance r
on the lattice.  r = 0 keeps diagonal 2x2 blocks only; each increment
buys a better certificate.  Nested seeding (warm-starting r+1 from the
r solution) makes the ladder monotone.

Run:  python3 demos/05_fermionic_locality_ladder.py
"""

import time

from noisebound import fermion
from noisebound.noise import info_schedule

for label, builder in (
    ("24-mode chain", lambda d: fermion.fermion_brickwall_1d(24, d, 0.05, 5)),
    ("4x4 grid", lambda d: fermion.fermion_brickwall_2d(4, 4, d, 0.05, 6)),
):
    d = 12
    circ, target = builder(d)
    n = circ.n_modes
    _, energy = fermion.simulate_covariance(circ, target)
    sched = info_schedule(n, d, 0.05)
    print(f"\n{label}: n = {n}, depth = {d}, p = 0.05, "
          f"exact output energy = {energy:.6f}")
    print(f"{'r':>3s} {'dual bound':>12s} {'gap':>10s} {'secs':>6s}")
    init = None
    for r in (0, 1, 2):
        t0 = time.perf_counter()
        s_list, _, dv = fermion.optimize_fermionic_dual(
            circ, target, r, sched, init_s_list=init, maxiter=30)
        init = s_list
        print(f"{r:3d} {dv.bound:12.6f} {energy - dv.bound:10.6f} "
              f"{time.perf_counter() - t0:6.2f}")

print("\nThe gap shrinks monotonically with the radius; the exact value")
print("here comes from covariance evolution, which stays cheap at any")
print("size the optimizer itself can handle.")
