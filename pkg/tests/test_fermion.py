"""Gaussian-fermion machinery against the dense Jordan-Wigner oracle.

Every covariance-level primitive (Hamiltonians, canonical forms, ground and
thermal states, unitary and depolarizing evolution, the Heisenberg adjoint)
is cross-checked in full Fock space at small mode number; the dual bound is
then checked for soundness and its analytic gradient against finite
differences.
"""

import numpy as np
import pytest
import scipy.linalg

from noisebound.exact import (
    fermion_depolarizing_kraus,
    jordan_wigner_majoranas,
    majorana_quadratic_dense,
)
from noisebound.fermion import (
    FermionCircuit,
    FermionLayer,
    QuadraticOp,
    canonical_form,
    chain_coords,
    check_covariance,
    covariance_layer_step,
    default_fermion_initial_duals,
    energy_from_covariance,
    evolve_covariance_depolarizing,
    evolve_covariance_unitary,
    fermion_brickwall_1d,
    fermion_brickwall_2d,
    fermionic_dual_value,
    fermionic_free_energy,
    grid_coords,
    ground_state_covariance,
    ground_state_energy,
    heisenberg_quadratic_step,
    hopping_to_majorana,
    locality_mask,
    mode_energies,
    optimize_fermionic_dual,
    project_local,
    quadratic_zero,
    scaled_to_unit_interval,
    simulate_covariance,
    ssh_hamiltonian_1d,
    ssh_hamiltonian_2d,
    thermal_covariance,
    two_level_modes,
    vacuum_covariance,
)
from noisebound.info_dual import info_bound
from noisebound.noise import info_schedule


def random_antisym(n2: int, rng) -> np.ndarray:
    m = rng.normal(size=(n2, n2))
    return (m - m.T) / 2


def random_op(n: int, seed: int, constant: float = 0.0) -> QuadraticOp:
    rng = np.random.default_rng(seed)
    return QuadraticOp(random_antisym(2 * n, rng), constant)


def dense_covariance(rho: np.ndarray, c_ops) -> np.ndarray:
    """gamma_ab = i Tr(rho [c_a, c_b]) from a dense state."""
    m = len(c_ops)
    g = np.zeros((m, m))
    for a in range(m):
        for b in range(m):
            comm = c_ops[a] @ c_ops[b] - c_ops[b] @ c_ops[a]
            g[a, b] = float(np.real(1j * np.trace(rho @ comm)))
    return g


def dense_vacuum(n: int) -> np.ndarray:
    rho = np.zeros((2**n, 2**n), dtype=complex)
    rho[0, 0] = 1.0
    return rho


# ---------------------------------------------------------------------------
# quadratic operators


def test_quadratic_op_validation_and_snap():
    rng = np.random.default_rng(0)
    m = random_antisym(4, rng)
    op = QuadraticOp(m + 1e-12 * np.eye(4), 0.1)   # tiny symmetric part: snapped
    assert np.abs(op.matrix + op.matrix.T).max() == 0.0
    with pytest.raises(ValueError):
        QuadraticOp(np.eye(4))


def test_quadratic_op_arithmetic():
    a, b = random_op(3, 1, 0.2), random_op(3, 2, -0.1)
    s = a + b
    assert np.abs(s.matrix - (a.matrix + b.matrix)).max() < 1e-14
    assert s.constant == pytest.approx(0.1)
    d = a - b
    assert np.abs(d.matrix - (a.matrix - b.matrix)).max() < 1e-14
    neg = -a
    assert np.abs(neg.matrix + a.matrix).max() == 0.0
    assert neg.constant == pytest.approx(-0.2)


def test_hopping_to_majorana_vs_fock():
    """sum_ij A_ij a_i^dag a_j maps to i c^T h c + TrA/2 exactly."""
    n = 3
    rng = np.random.default_rng(3)
    a_mat = rng.normal(size=(n, n))
    a_mat = (a_mat + a_mat.T) / 2
    op = hopping_to_majorana(a_mat)
    c = jordan_wigner_majoranas(n)
    ann = [(c[x] - 1j * c[n + x]) / np.sqrt(2) for x in range(n)]
    want = sum(a_mat[i, j] * ann[i].conj().T @ ann[j]
               for i in range(n) for j in range(n))
    got = majorana_quadratic_dense(op.matrix, c, op.constant)
    assert np.abs(got - want).max() < 1e-12


def test_canonical_form_reconstruction():
    from noisebound.fermion import _interleaved_blocks
    rng = np.random.default_rng(4)
    m = random_antisym(8, rng)
    eps, q = canonical_form(m)
    assert np.all(eps >= 0.0)
    assert np.abs(q @ q.T - np.eye(8)).max() < 1e-10
    recon = q @ _interleaved_blocks(eps, np.ones_like(eps)) @ q.T
    assert np.abs(recon - m).max() < 1e-10


def test_canonical_form_zero_modes():
    """Decoupled zero modes, even interleaved with coupled ones, are paired
    and parked at eps = 0."""
    m = np.zeros((6, 6))
    m[0, 3] = 0.7
    m[3, 0] = -0.7
    eps, q = canonical_form(m)
    assert np.abs(np.sort(eps) - np.array([0.0, 0.0, 0.7])).max() < 1e-12
    assert np.abs(q @ q.T - np.eye(6)).max() < 1e-10


def test_spectrum_matches_fock_oracle():
    """Full many-body spectrum from mode energies equals dense JW spectrum."""
    n = 4
    op = random_op(n, 5, constant=0.3)
    got = two_level_modes(op).spectrum()
    dense = majorana_quadratic_dense(op.matrix, jordan_wigner_majoranas(n),
                                     op.constant)
    want = np.linalg.eigvalsh(dense)
    assert np.abs(got - want).max() < 1e-9


def test_ground_state_energy_vs_fock():
    n = 4
    op = random_op(n, 6, constant=-0.2)
    dense = majorana_quadratic_dense(op.matrix, jordan_wigner_majoranas(n),
                                     op.constant)
    assert abs(ground_state_energy(op) - np.linalg.eigvalsh(dense)[0]) < 1e-9


def test_scaled_to_unit_interval():
    op = scaled_to_unit_interval(random_op(4, 7))
    spec = two_level_modes(op).spectrum()
    assert abs(spec.min()) < 1e-10
    assert abs(spec.max() - 1.0) < 1e-10


# ---------------------------------------------------------------------------
# covariance states


def test_vacuum_covariance_structure():
    n = 3
    g = vacuum_covariance(n)
    check_covariance(g)
    c = jordan_wigner_majoranas(n)
    assert np.abs(g - dense_covariance(dense_vacuum(n), c)).max() < 1e-10


def test_ground_covariance_energy():
    n = 4
    op = random_op(n, 8, constant=0.1)
    g = ground_state_covariance(op)
    check_covariance(g)
    assert abs(energy_from_covariance(g, op) - ground_state_energy(op)) < 1e-10


def test_thermal_covariance_vs_fock():
    n = 3
    op = random_op(n, 9)
    c = jordan_wigner_majoranas(n)
    dense = majorana_quadratic_dense(op.matrix, c, op.constant)
    for lam in (0.3, 1.0, 5.0):
        rho = scipy.linalg.expm(-dense / lam)
        rho /= np.trace(rho)
        want_energy = float(np.trace(dense @ rho).real)
        g = thermal_covariance(op, lam)
        check_covariance(g)
        assert abs(energy_from_covariance(g, op) - want_energy) < 1e-9
        assert np.abs(g - dense_covariance(rho, c)).max() < 1e-9


def test_energy_from_covariance_vs_fock():
    n = 3
    op = random_op(n, 10, constant=0.4)
    c = jordan_wigner_majoranas(n)
    dense = majorana_quadratic_dense(op.matrix, c, op.constant)
    rho = dense_vacuum(n)
    got = energy_from_covariance(dense_covariance(rho, c), op)
    assert abs(got - float(np.trace(dense @ rho).real)) < 1e-10


def test_free_energy_vs_fock():
    n = 3
    op = random_op(n, 11, constant=-0.3)
    dense = majorana_quadratic_dense(op.matrix, jordan_wigner_majoranas(n),
                                     op.constant)
    ev = np.linalg.eigvalsh(dense)
    for lam in (0.2, 1.7):
        want = float(np.log(np.sum(np.exp(-ev / lam))))
        assert abs(fermionic_free_energy(op, lam) - want) < 1e-9


# ---------------------------------------------------------------------------
# evolution, both pictures


def test_unitary_evolution_vs_fock():
    n = 3
    gen = random_op(n, 12)
    c = jordan_wigner_majoranas(n)
    u = scipy.linalg.expm(-1j * majorana_quadratic_dense(gen.matrix, c))
    rho = u @ dense_vacuum(n) @ u.conj().T
    got = evolve_covariance_unitary(vacuum_covariance(n), gen)
    check_covariance(got)
    assert np.abs(got - dense_covariance(rho, c)).max() < 1e-10


def test_depolarizing_evolution_vs_fock():
    n, site, p = 3, 1, 0.35
    gen = random_op(n, 13)
    g0 = evolve_covariance_unitary(vacuum_covariance(n), gen)  # entangled input
    c = jordan_wigner_majoranas(n)
    u = scipy.linalg.expm(-1j * majorana_quadratic_dense(gen.matrix, c))
    rho = u @ dense_vacuum(n) @ u.conj().T
    ks = fermion_depolarizing_kraus(n, site, p)
    rho_out = sum(k @ rho @ k.conj().T for k in ks)
    got = evolve_covariance_depolarizing(g0, p, site)
    assert np.abs(got - dense_covariance(rho_out, c)).max() < 1e-10


def test_heisenberg_step_vs_fock():
    """The adjoint step reproduces E^dag(H) = N^dag(U^dag H U) in Fock space."""
    n, p, site = 3, 0.25, 0
    gen = random_op(n, 14)
    op = random_op(n, 15, constant=0.2)
    layer = FermionLayer(gen, p=p, depolarized_sites=(site,))
    got_op = heisenberg_quadratic_step(op, layer)
    c = jordan_wigner_majoranas(n)
    u = scipy.linalg.expm(-1j * majorana_quadratic_dense(gen.matrix, c))
    h = majorana_quadratic_dense(op.matrix, c, op.constant)
    ks = fermion_depolarizing_kraus(n, site, p)
    noise_adj = sum(k.conj().T @ h @ k for k in ks)
    want = u.conj().T @ noise_adj @ u
    got = majorana_quadratic_dense(got_op.matrix, c, got_op.constant)
    assert np.abs(got - want).max() < 1e-10


def test_heisenberg_step_is_pairing_adjoint():
    """<E(gamma), H> = <gamma, E^dag(H)>: forward covariance step and
    adjoint operator step give the same energy."""
    n = 4
    rng = np.random.default_rng(16)
    gen = random_op(n, 17)
    op = random_op(n, 18, constant=-0.4)
    layer = FermionLayer(gen, p=0.15, depolarized_sites=tuple(range(n)))
    gamma = ground_state_covariance(random_op(n, 19))
    forward = energy_from_covariance(covariance_layer_step(gamma, layer), op)
    backward = energy_from_covariance(gamma, heisenberg_quadratic_step(op, layer))
    assert abs(forward - backward) < 1e-11


# ---------------------------------------------------------------------------
# SSH targets and mirror circuits


def test_ssh_1d_spectrum_unit_interval():
    op = ssh_hamiltonian_1d(8)
    assert abs(ground_state_energy(op)) < 1e-10
    assert abs(two_level_modes(op).spectrum().max() - 1.0) < 1e-10


def test_ssh_1d_dimerized_limit():
    """w = 0 decouples the chain into identical two-site dimers: all mode
    energies equal."""
    op = ssh_hamiltonian_1d(6, v=1.0, w=0.0)
    eps = mode_energies(op)
    assert np.abs(eps - eps[0]).max() < 1e-10


def test_ssh_2d_shapes_and_spectrum():
    op = ssh_hamiltonian_2d(3, 2)
    assert op.n_modes == 6
    assert abs(ground_state_energy(op)) < 1e-10
    assert abs(two_level_modes(op).spectrum().max() - 1.0) < 1e-10
    assert grid_coords(3, 2) == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]
    assert chain_coords(3) == [(0,), (1,), (2,)]


def test_fermion_mirror_noiseless():
    """p = 0 mirror circuits end in the target's ground state."""
    circ, target = fermion_brickwall_1d(8, 6, 0.0, 21)
    gamma, energy = simulate_covariance(circ, target)
    check_covariance(gamma)
    assert abs(energy) < 1e-9
    circ2, target2 = fermion_brickwall_2d(3, 2, 4, 0.0, 22)
    _, energy2 = simulate_covariance(circ2, target2)
    assert abs(energy2) < 1e-9


def test_fermion_circuit_determinism_and_parity():
    a, _ = fermion_brickwall_1d(6, 4, 0.1, 30)
    b, _ = fermion_brickwall_1d(6, 4, 0.1, 30)
    for la, lb in zip(a.layers, b.layers):
        assert np.array_equal(la.generator.matrix, lb.generator.matrix)
    with pytest.raises(ValueError):
        fermion_brickwall_1d(6, 5, 0.1, 0)


def test_noisy_output_energy_above_floor():
    circ, target = fermion_brickwall_1d(10, 6, 0.1, 23)
    _, energy = simulate_covariance(circ, target)
    assert energy > 0.0
    assert energy < 1.0


# ---------------------------------------------------------------------------
# locality projection


def test_locality_mask_and_projection():
    n = 6
    coords = chain_coords(n)
    mask = locality_mask(n, 1, coords)
    assert mask.shape == (2 * n, 2 * n)
    assert mask[0, 1] and mask[0, n]          # neighbors and partner blocks
    assert not mask[0, 3]                      # distance 3 > radius 1
    op = random_op(n, 24)
    proj = project_local(op, 1, coords)
    assert np.abs(proj.matrix[~mask]).max() == 0.0
    untouched = project_local(op, None, coords)
    assert np.abs(untouched.matrix - op.matrix).max() == 0.0


# ---------------------------------------------------------------------------
# fermionic dual bound


def fermion_setup(n=6, depth=4, p=0.08, seed=25):
    circ, target = fermion_brickwall_1d(n, depth, p, seed)
    sched = info_schedule(n, depth, p)
    _, energy = simulate_covariance(circ, target)
    return circ, target, sched, energy


def test_dual_value_sound_random_duals():
    circ, target, sched, energy = fermion_setup()
    for seed in range(5):
        s_list = [random_op(circ.n_modes, 100 + seed * 10 + t).scaled(0.3)
                  for t in range(circ.depth)]
        val = fermionic_dual_value(s_list, circ, target, sched)
        assert val.bound <= energy + 1e-8


def test_dual_value_zero_duals_reduce_to_info_floor():
    """All-zero duals leave only the final free-energy term, which is the
    architecture-free information bound (with a wider lambda range)."""
    circ, target, sched, energy = fermion_setup()
    zeros = [quadratic_zero(circ.n_modes) for _ in range(circ.depth)]
    val = fermionic_dual_value(zeros, circ, target, sched)
    assert val.bound <= energy + 1e-8
    floor = info_bound(two_level_modes(target), circ.n_modes, 0.08,
                       circ.depth).bound
    assert val.bound >= floor - 1e-5


def test_dual_value_seed_duals_nearly_tight_noiseless():
    n, depth = 6, 4
    circ, target = fermion_brickwall_1d(n, depth, 0.0, 26)
    sched = info_schedule(n, depth, 0.0)
    s_list = default_fermion_initial_duals(circ, target, None)
    val = fermionic_dual_value(s_list, circ, target, sched)
    _, energy = simulate_covariance(circ, target)
    assert val.bound <= energy + 1e-8
    assert abs(val.bound - energy) < 1e-5


def test_dual_gradient_matches_finite_differences():
    from noisebound.fermion import _dual_value_parts, _pack, _unpack
    circ, target, sched, _ = fermion_setup(n=6, depth=4, seed=27)
    n = circ.n_modes
    mask = locality_mask(n, 1, chain_coords(n))
    rows, cols = np.where(np.triu(mask, k=1))
    s0 = default_fermion_initial_duals(circ, target, 1, chain_coords(n))
    consts = [s.constant for s in s0]
    x0 = _pack(s0, rows, cols)
    k = rows.size

    def value(theta):
        s_list = _unpack(theta, consts, n, rows, cols)
        return fermionic_dual_value(s_list, circ, target, sched).bound

    _, _, gibbs = _dual_value_parts(s0, circ, target, sched)
    grad = np.empty_like(x0)
    prev = circ.initial_covariance
    for t in range(circ.depth):
        g_mat = gibbs[t] - covariance_layer_step(prev, circ.layers[t])
        grad[t * k:(t + 1) * k] = g_mat[rows, cols]
        prev = gibbs[t]

    rng = np.random.default_rng(28)
    h = 1e-5
    for idx in rng.choice(x0.size, size=8, replace=False):
        e = np.zeros_like(x0)
        e[idx] = 1.0
        fd = (value(x0 + h * e) - value(x0 - h * e)) / (2 * h)
        assert abs(fd - grad[idx]) < 1e-5 * max(1.0, abs(grad[idx]))


def test_optimizer_improves_and_stays_sound():
    circ, target, sched, energy = fermion_setup(n=8, depth=4, p=0.1, seed=29)
    coords = chain_coords(circ.n_modes)
    seed_duals = default_fermion_initial_duals(circ, target, 1, coords)
    seed_val = fermionic_dual_value(seed_duals, circ, target, sched)
    s_best, lams, val = optimize_fermionic_dual(
        circ, target, 1, sched, coords=coords, maxiter=25)
    assert val.bound >= seed_val.bound - 1e-9
    assert val.bound <= energy + 1e-8
    assert len(lams) == circ.depth
    assert all(l > 0 for l in lams)


def test_optimizer_radius_chain_monotone():
    """Wider support can only help when each run is seeded with the
    previous optimum."""
    circ, target, sched, energy = fermion_setup(n=8, depth=4, p=0.1, seed=31)
    coords = chain_coords(circ.n_modes)
    bounds = []
    s_prev = None
    for r in (0, 1, 2):
        s_prev, _, val = optimize_fermionic_dual(
            circ, target, r, sched, coords=coords, init_s_list=s_prev,
            maxiter=20)
        bounds.append(val.bound)
        assert val.bound <= energy + 1e-8
    assert bounds[1] >= bounds[0] - 1e-9
    assert bounds[2] >= bounds[1] - 1e-9
