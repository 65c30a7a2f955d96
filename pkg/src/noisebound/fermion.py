"""Gaussian-fermion duals: quadratic Majorana operators, covariance-matrix
circuit simulation, Heisenberg transforms, closed-form free energies, and a
gradient-based optimizer for locality-restricted information-content duals.

Conventions
-----------
N fermionic modes carry 2N Majorana operators ordered as all c^1 then all
c^2, normalized so {c_a, c_b} = delta_ab (each c squares to 1/2).  A
quadratic operator is H = i c^T m c + const with m real antisymmetric; a
state is summarized by the covariance matrix gamma_ab = i <[c_a, c_b]>,
also real antisymmetric, with singular values <= 1.  Expectation values
pair as

    <H> = sum_{a<b} m_ab gamma_ab + const = -Tr(m gamma)/2 + const.

Unitaries generated by quadratic Hamiltonians act as gamma -> R gamma R^T
with R = exp(2 m_U) orthogonal; single-mode depolarizing at rate p zeroes
row/column x and n+x with weight p.  Heisenberg (adjoint) transforms of
dual variables use the same primitives with R transposed and run noise
first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.optimize

from .info_dual import TwoLevelModes, golden_section_max
from .noise import BoundSchedule
from .trace_dual import DualValue

LN2 = math.log(2.0)


# ---------------------------------------------------------------------------
# quadratic operators


@dataclass
class QuadraticOp:
    """i c^T m c + const with m real antisymmetric of shape (2N, 2N)."""

    matrix: np.ndarray
    constant: float = 0.0

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise ValueError("matrix must be square with even dimension")
        scale = max(1.0, np.abs(m).max())
        if np.abs(m + m.T).max() > 1e-10 * scale:
            raise ValueError("matrix must be antisymmetric")
        # snap out roundoff so antisymmetry survives long pipelines
        self.matrix = 0.5 * (m - m.T)
        self.constant = float(self.constant)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    def __add__(self, other: "QuadraticOp") -> "QuadraticOp":
        return QuadraticOp(self.matrix + other.matrix,
                           self.constant + other.constant)

    def __sub__(self, other: "QuadraticOp") -> "QuadraticOp":
        return QuadraticOp(self.matrix - other.matrix,
                           self.constant - other.constant)

    def __neg__(self) -> "QuadraticOp":
        return QuadraticOp(-self.matrix, -self.constant)

    def scaled(self, a: float) -> "QuadraticOp":
        return QuadraticOp(a * self.matrix, a * self.constant)


def quadratic_zero(n: int) -> QuadraticOp:
    return QuadraticOp(np.zeros((2 * n, 2 * n)))


def hopping_to_majorana(a: np.ndarray) -> QuadraticOp:
    """Convert a Hermitian hopping matrix (H = sum a_ij f_i^dag f_j) to
    Majorana form.  With a = R + iS the result is

        m = (1/2) [[S, -R], [R, S]],   const = Tr(a)/2.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("hopping matrix must be square")
    if np.abs(a - a.conj().T).max() > 1e-10 * max(1.0, np.abs(a).max()):
        raise ValueError("hopping matrix must be Hermitian")
    r, s = a.real, a.imag
    m = 0.5 * np.block([[s, -r], [r, s]])
    return QuadraticOp(m, 0.5 * float(np.trace(a).real))


def canonical_form(m: np.ndarray, tol: float = 1e-11) -> tuple[np.ndarray, np.ndarray]:
    """Decompose a real antisymmetric matrix as m = Q T Q^T with Q orthogonal
    and T a direct sum of blocks [[0, eps], [-eps, 0]], eps >= 0.

    Returns (eps, Q) where eps has length N and Q's columns are ordered so
    that mode x occupies columns (2x, 2x+1).  Zero modes are paired up with
    eps = 0.
    """
    m = np.asarray(m, dtype=float)
    n2 = m.shape[0]
    scale = max(1.0, np.abs(m).max())
    t, q = scipy.linalg.schur(0.5 * (m - m.T), output="real")
    thresh = tol * scale
    cols: list[int] = []
    eps: list[float] = []
    zero_cols: list[int] = []
    k = 0
    while k < n2:
        if k + 1 < n2 and abs(t[k + 1, k]) > thresh:
            b = 0.5 * (t[k, k + 1] - t[k + 1, k])
            if b >= 0.0:
                cols += [k, k + 1]
            else:
                cols += [k + 1, k]
                b = -b
            eps.append(b)
            k += 2
        else:
            zero_cols.append(k)
            k += 1
    if len(zero_cols) % 2:
        raise RuntimeError("odd number of zero modes in canonical form")
    # park zero modes at the end, paired up in whatever order they came
    cols += zero_cols
    eps += [0.0] * (len(zero_cols) // 2)
    eps_arr = np.array(eps)
    q_perm = q[:, cols]
    # verify the block model actually reproduces m
    recon = q_perm @ _interleaved_blocks(eps_arr, eps_arr * 0 + 1.0) @ q_perm.T
    if np.abs(recon - m).max() > 1e-7 * scale:
        raise RuntimeError("canonical form reconstruction failed")
    return eps_arr, q_perm


def _interleaved_blocks(eps: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Direct sum over modes of [[0, eps*w], [-eps*w, 0]]."""
    n = eps.size
    out = np.zeros((2 * n, 2 * n))
    vals = eps * weights
    idx = np.arange(n)
    out[2 * idx, 2 * idx + 1] = vals
    out[2 * idx + 1, 2 * idx] = -vals
    return out


def mode_energies(op: QuadraticOp) -> np.ndarray:
    """Excitation energies eps_x >= 0; the many-body spectrum is
    const - sum eps + sum over subsets of 2 eps_x."""
    eps, _ = canonical_form(op.matrix)
    return eps


def ground_state_energy(op: QuadraticOp) -> float:
    return op.constant - float(np.sum(mode_energies(op)))


def two_level_modes(op: QuadraticOp) -> TwoLevelModes:
    """Spectrum descriptor: ground energy const - sum eps, one excitation of
    2 eps_x per mode."""
    eps = mode_energies(op)
    return TwoLevelModes(2.0 * eps, op.constant - float(np.sum(eps)))


def scaled_to_unit_interval(op: QuadraticOp) -> QuadraticOp:
    """Rescale and shift so the spectrum spans exactly [0, 1]."""
    total = float(np.sum(mode_energies(op)))
    if total < 1e-12:
        raise ValueError("cannot scale an operator with zero spectral width")
    # spectrum of i c^T m c + const is const +/- partial sums of 2 eps_x,
    # so dividing m by 2*sum(eps) and pinning the constant at 1/2 lands
    # exactly on [0, 1]
    return QuadraticOp(op.matrix / (2.0 * total), 0.5)


# ---------------------------------------------------------------------------
# SSH hopping models


def chain_coords(n: int) -> list[tuple[int, ...]]:
    return [(x,) for x in range(n)]


def grid_coords(lx: int, ly: int) -> list[tuple[int, ...]]:
    """Row-major coordinates of an lx-wide, ly-tall grid
    (mode r*lx + c sits at row r, column c)."""
    return [(r, c) for r in range(ly) for c in range(lx)]


def ssh_hamiltonian_1d(n: int, v: float = 1.0, w: float = 0.5) -> QuadraticOp:
    """Alternating-bond chain: hopping v on bonds (0,1), (2,3), ... and w on
    (1,2), (3,4), ...; returned in Majorana form scaled so the spectrum is
    [0, 1]."""
    if n < 2:
        raise ValueError("need at least two modes")
    a = np.zeros((n, n))
    for i in range(n - 1):
        a[i, i + 1] = a[i + 1, i] = v if i % 2 == 0 else w
    return scaled_to_unit_interval(hopping_to_majorana(a))


def ssh_hamiltonian_2d(lx: int, ly: int, vx: float = 1.0, wx: float = 0.5,
                       vy: float = 1.0, wy: float = 0.5) -> QuadraticOp:
    """2D alternating-bond lattice (row-major mode order): horizontal bonds
    alternate vx, wx along each row, vertical bonds alternate vy, wy down
    each column; scaled so the spectrum is [0, 1]."""
    if lx < 1 or ly < 1 or lx * ly < 2:
        raise ValueError("grid too small")
    n = lx * ly
    a = np.zeros((n, n))
    for r in range(ly):
        for c in range(lx - 1):
            i, j = r * lx + c, r * lx + c + 1
            a[i, j] = a[j, i] = vx if c % 2 == 0 else wx
    for r in range(ly - 1):
        for c in range(lx):
            i, j = r * lx + c, (r + 1) * lx + c
            a[i, j] = a[j, i] = vy if r % 2 == 0 else wy
    return scaled_to_unit_interval(hopping_to_majorana(a))


# ---------------------------------------------------------------------------
# covariance matrices and circuit evolution


def check_covariance(gamma: np.ndarray, tol: float = 1e-8) -> None:
    gamma = np.asarray(gamma)
    if np.abs(gamma + gamma.T).max() > tol * max(1.0, np.abs(gamma).max()):
        raise ValueError("covariance matrix must be antisymmetric")
    svals = np.linalg.svd(gamma, compute_uv=False)
    if svals.size and svals.max() > 1.0 + 1e-7:
        raise ValueError("covariance singular values must be <= 1")


def vacuum_covariance(n: int) -> np.ndarray:
    """Covariance of the Fock vacuum (annihilators a_x = (c^1_x - i c^2_x)/sqrt(2)):
    gamma[x, n+x] = 1."""
    gamma = np.zeros((2 * n, 2 * n))
    idx = np.arange(n)
    gamma[idx, n + idx] = 1.0
    gamma[n + idx, idx] = -1.0
    return gamma


def ground_state_covariance(op: QuadraticOp) -> np.ndarray:
    """Covariance of the lowest-energy Gaussian state of op (mode weight -1
    on every excitation; zero modes get an arbitrary valid orientation)."""
    eps, q = canonical_form(op.matrix)
    weights = -np.ones_like(eps)
    return q @ _interleaved_blocks(np.ones_like(eps), weights) @ q.T


def thermal_covariance(op: QuadraticOp, lam: float) -> np.ndarray:
    """Covariance of the Gibbs state exp(-H/lambda)/Z (mode weight
    -tanh(eps/lambda))."""
    if lam <= 0.0:
        raise ValueError("lambda must be positive")
    eps, q = canonical_form(op.matrix)
    weights = -np.tanh(eps / lam)
    return q @ _interleaved_blocks(np.ones_like(eps), weights) @ q.T


def energy_from_covariance(gamma: np.ndarray, op: QuadraticOp) -> float:
    """<H> = -Tr(m gamma)/2 + const."""
    return float(-0.5 * np.einsum("ab,ba->", op.matrix, gamma) + op.constant)


def _orthogonal_from_generator(m: np.ndarray) -> np.ndarray:
    """R = exp(2 m) with a fast path for generators of small support."""
    n2 = m.shape[0]
    support = np.flatnonzero(np.any(m != 0.0, axis=0) | np.any(m != 0.0, axis=1))
    if support.size == 0:
        return np.eye(n2)
    if support.size <= 8:
        r = np.eye(n2)
        sub = scipy.linalg.expm(2.0 * m[np.ix_(support, support)])
        r[np.ix_(support, support)] = sub
        return r
    return scipy.linalg.expm(2.0 * m)


def evolve_covariance_unitary(gamma: np.ndarray, h_u: QuadraticOp) -> np.ndarray:
    """gamma -> R gamma R^T with R = exp(2 m_U)."""
    r = _orthogonal_from_generator(h_u.matrix)
    return r @ gamma @ r.T


def evolve_covariance_depolarizing(gamma: np.ndarray, p: float, site: int) -> np.ndarray:
    """Single-mode depolarizing: with probability p the mode is replaced by
    the maximally mixed one, zeroing row/column site and n+site."""
    n = gamma.shape[0] // 2
    if not 0 <= site < n:
        raise ValueError("site out of range")
    zeroed = gamma.copy()
    idx = (site, n + site)
    zeroed[idx, :] = 0.0
    zeroed[:, idx] = 0.0
    return (1.0 - p) * gamma + p * zeroed


@dataclass
class FermionLayer:
    """One circuit layer: Gaussian unitary exp(-i H_U) with quadratic
    generator, followed by depolarizing at rate p on ``depolarized_sites``."""

    generator: QuadraticOp
    p: float = 0.0
    depolarized_sites: tuple[int, ...] | None = None

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.depolarized_sites is not None:
            self.depolarized_sites = tuple(self.depolarized_sites)

    def sites(self, n: int) -> tuple[int, ...]:
        if self.depolarized_sites is None:
            return tuple(range(n))
        return self.depolarized_sites


@dataclass
class FermionCircuit:
    n_modes: int
    layers: list[FermionLayer]
    initial_covariance: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.initial_covariance.shape != (2 * self.n_modes, 2 * self.n_modes):
            raise ValueError("initial covariance has the wrong shape")
        check_covariance(self.initial_covariance)
        for layer in self.layers:
            if layer.generator.n_modes != self.n_modes:
                raise ValueError("layer generator has the wrong mode count")

    @property
    def depth(self) -> int:
        return len(self.layers)


def covariance_layer_step(gamma: np.ndarray, layer: FermionLayer) -> np.ndarray:
    """Forward (Schrodinger) action of one layer on a covariance matrix."""
    n = gamma.shape[0] // 2
    g = evolve_covariance_unitary(gamma, layer.generator)
    if layer.p > 0.0:
        for site in layer.sites(n):
            g = evolve_covariance_depolarizing(g, layer.p, site)
    return g


def simulate_covariance(circuit: FermionCircuit,
                        target: QuadraticOp | None = None):
    """Run the circuit forward.  Returns the output covariance, or
    (covariance, energy) when a target operator is supplied."""
    gamma = circuit.initial_covariance.copy()
    for layer in circuit.layers:
        gamma = covariance_layer_step(gamma, layer)
    if target is None:
        return gamma
    return gamma, energy_from_covariance(gamma, target)


def heisenberg_quadratic_step(op: QuadraticOp, layer: FermionLayer) -> QuadraticOp:
    """Adjoint action E^dag of one layer on a quadratic dual variable:
    noise adjoint first (same entrywise map as the covariance rule, which is
    self-adjoint), then s -> R^T s R.  The constant is unchanged."""
    n = op.n_modes
    s = op.matrix
    if layer.p > 0.0:
        for site in layer.sites(n):
            s = evolve_covariance_depolarizing(s, layer.p, site)
    r = _orthogonal_from_generator(layer.generator.matrix)
    return QuadraticOp(r.T @ s @ r, op.constant)


def project_local(op: QuadraticOp, radius: int | None,
                  coords: list[tuple[int, ...]] | None = None) -> QuadraticOp:
    """Zero every matrix entry coupling Majoranas of modes farther apart than
    ``radius`` (Manhattan distance on ``coords``; chain positions when coords
    is None).  radius=None leaves the operator untouched; radius=0 keeps
    only on-site terms.  This is the orthogonal projection in the pairing
    <m, gamma> = sum_{a<b} m_ab gamma_ab, so it can only move a dual ansatz
    within the feasible (still certified) set."""
    if radius is None:
        return op
    mask = locality_mask(op.n_modes, radius, coords)
    return QuadraticOp(np.where(mask, op.matrix, 0.0), op.constant)


def locality_mask(n: int, radius: int,
                  coords: list[tuple[int, ...]] | None = None) -> np.ndarray:
    """Boolean (2n, 2n) mask of Majorana pairs whose modes lie within
    Manhattan distance ``radius``."""
    if coords is None:
        coords = chain_coords(n)
    if len(coords) != n:
        raise ValueError("coords length must equal the mode count")
    pts = np.asarray(coords, dtype=int)
    dist = np.abs(pts[:, None, :] - pts[None, :, :]).sum(axis=2)
    mode_ok = dist <= radius
    return np.tile(mode_ok, (2, 2))


# ---------------------------------------------------------------------------
# random mirror circuits on SSH lattices


def _random_bond_generator(n: int, bonds: list[tuple[int, int]], rng) -> QuadraticOp:
    """One layer's combined generator: an independent random two-mode
    quadratic generator on each (disjoint) bond."""
    m = np.zeros((2 * n, 2 * n))
    for (i, j) in bonds:
        u = rng.uniform(-1.0, 1.0, size=(4, 4))
        g4 = 0.5 * (u - u.T)
        idx = np.array([i, j, n + i, n + j])
        m[np.ix_(idx, idx)] = g4
    return QuadraticOp(m)


def _mirror_layers(n: int, bond_groups: list[list[tuple[int, int]]],
                   depth: int, p: float, rng) -> list[FermionLayer]:
    if depth % 2 or depth < 2:
        raise ValueError("mirror circuits need even depth >= 2")
    half = depth // 2
    gens = [_random_bond_generator(n, bond_groups[t % len(bond_groups)], rng)
            for t in range(half)]
    layers = [FermionLayer(g, p) for g in gens]
    layers += [FermionLayer(-g, p) for g in reversed(gens)]
    return layers


def fermion_brickwall_1d(n: int, depth: int, p: float, seed: int,
                         v: float = 1.0, w: float = 0.5):
    """Mirror circuit of random two-mode Gaussian gates on alternating chain
    bonds, depolarized at rate p, starting from the SSH ground state.
    Returns (circuit, target); the noiseless output energy is exactly the
    ground energy 0 of the [0, 1]-scaled target."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    target = ssh_hamiltonian_1d(n, v, w)
    odd = [(i, i + 1) for i in range(0, n - 1, 2)]
    even = [(i, i + 1) for i in range(1, n - 1, 2)]
    groups = [g for g in (odd, even) if g]
    layers = _mirror_layers(n, groups, depth, p, rng)
    circuit = FermionCircuit(
        n, layers, ground_state_covariance(target),
        meta={"family": "fermion_brickwall_1d", "n": n, "depth": depth,
              "p": p, "seed": seed, "v": v, "w": w,
              "coords": chain_coords(n)})
    return circuit, target


def fermion_brickwall_2d(lx: int, ly: int, depth: int, p: float, seed: int,
                         vx: float = 1.0, wx: float = 0.5,
                         vy: float = 1.0, wy: float = 0.5):
    """2D version of :func:`fermion_brickwall_1d` on an lx-by-ly grid,
    cycling horizontal-odd / horizontal-even / vertical-odd / vertical-even
    bond groups."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    n = lx * ly
    target = ssh_hamiltonian_2d(lx, ly, vx, wx, vy, wy)
    coords = grid_coords(lx, ly)
    groups = _grid_bond_groups(lx, ly)
    layers = _mirror_layers(n, groups, depth, p, rng)
    circuit = FermionCircuit(
        n, layers, ground_state_covariance(target),
        meta={"family": "fermion_brickwall_2d", "lx": lx, "ly": ly,
              "depth": depth, "p": p, "seed": seed, "coords": coords})
    return circuit, target


def _grid_bond_groups(lx: int, ly: int) -> list[list[tuple[int, int]]]:
    h_odd, h_even, v_odd, v_even = [], [], [], []
    for r in range(ly):
        for c in range(lx - 1):
            bond = (r * lx + c, r * lx + c + 1)
            (h_odd if c % 2 == 0 else h_even).append(bond)
    for r in range(ly - 1):
        for c in range(lx):
            bond = (r * lx + c, (r + 1) * lx + c)
            (v_odd if r % 2 == 0 else v_even).append(bond)
    return [g for g in (h_odd, h_even, v_odd, v_even) if g]


# ---------------------------------------------------------------------------
# free energies and the fermionic information-content dual


def fermionic_free_energy(op: QuadraticOp, lam: float) -> float:
    """ln Tr exp(-H/lambda) in closed form:
    -const/lambda + sum_x [eps_x/lambda + log(1 + exp(-2 eps_x/lambda))]."""
    if lam <= 0.0:
        raise ValueError("lambda must be positive")
    eps = mode_energies(op)
    return float(-op.constant / lam
                 + np.sum(eps / lam + np.log1p(np.exp(-2.0 * eps / lam))))


def _step_term_fermion(ht: QuadraticOp, c_nats: float, lam: float | None):
    """max_lambda [G(H_t, lambda) + lambda*c] with G = -lambda ln Z, via the
    cached mode energies.  Returns (term, lambda, eps, q)."""
    eps, q = canonical_form(ht.matrix)
    esum = float(np.sum(eps))

    def objective(la: float) -> float:
        return float(ht.constant - esum
                     - la * np.sum(np.log1p(np.exp(-2.0 * eps / la)))
                     + la * c_nats)

    if lam is not None:
        if lam <= 0.0:
            raise ValueError("lambda_t must be positive")
        return objective(lam), lam, eps, q
    lam_star, val = golden_section_max(objective, 1e-8, 1e9)
    return val, lam_star, eps, q


def _defect_ops(s_list: list[QuadraticOp], circuit: FermionCircuit,
                target: QuadraticOp) -> list[QuadraticOp]:
    """H_t = sigma_t - E_{t+1}^dag(sigma_{t+1}) for t < d, H_d = H + sigma_d."""
    d = circuit.depth
    hs = []
    for t in range(d - 1):
        hs.append(s_list[t] - heisenberg_quadratic_step(s_list[t + 1],
                                                        circuit.layers[t + 1]))
    hs.append(target + s_list[d - 1])
    return hs


def fermionic_dual_value(s_list: list[QuadraticOp],
                         circuit: FermionCircuit, target: QuadraticOp,
                         schedule: BoundSchedule,
                         lambdas: list[float] | None = None) -> DualValue:
    """Information-content dual bound for Gaussian circuits:

        -<E_1^dag(sigma_1)>_{gamma_0}
            + sum_t [ G(H_t, lambda_t) + lambda_t * ln2 * (N - I_t) ]

    with every free energy evaluated in closed form from mode energies.
    Certified for any quadratic duals and positive lambdas; per-step
    lambdas are maximized by a concave search when not supplied."""
    value, _, _ = _dual_value_parts(s_list, circuit, target, schedule, lambdas)
    return value


def _dual_value_parts(s_list, circuit, target, schedule, lambdas=None):
    if schedule.kind != "info":
        raise ValueError(f"expected an info schedule, got {schedule.kind!r}")
    d = circuit.depth
    if len(s_list) != d:
        raise ValueError("need one dual variable per layer")
    if schedule.values.size != d:
        raise ValueError("schedule length must equal circuit depth")
    n = circuit.n_modes
    adj1 = heisenberg_quadratic_step(s_list[0], circuit.layers[0])
    boundary = -energy_from_covariance(circuit.initial_covariance, adj1)
    hs = _defect_ops(s_list, circuit, target)
    terms = np.empty(d)
    lams = np.empty(d)
    gibbs = []
    for t, ht in enumerate(hs):
        c_nats = LN2 * (n - float(schedule.values[t]))
        lam = None if lambdas is None else lambdas[t]
        term, lam_star, eps, q = _step_term_fermion(ht, c_nats, lam)
        terms[t] = term
        lams[t] = lam_star
        weights = -np.tanh(eps / lam_star)
        gibbs.append(q @ _interleaved_blocks(np.ones_like(eps), weights) @ q.T)
    value = DualValue(boundary + float(np.sum(terms)), boundary, -terms)
    return value, lams, gibbs


# ---------------------------------------------------------------------------
# gradient-based optimization


def _pack(s_list: list[QuadraticOp], rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    return np.concatenate([s.matrix[rows, cols] for s in s_list])


def _unpack(theta: np.ndarray, consts: list[float], n: int,
            rows: np.ndarray, cols: np.ndarray) -> list[QuadraticOp]:
    k = rows.size
    out = []
    for t, const in enumerate(consts):
        m = np.zeros((2 * n, 2 * n))
        vals = theta[t * k:(t + 1) * k]
        m[rows, cols] = vals
        m[cols, rows] = -vals
        out.append(QuadraticOp(m, const))
    return out


def default_fermion_initial_duals(circuit: FermionCircuit,
                                  target: QuadraticOp,
                                  radius: int | None,
                                  coords=None) -> list[QuadraticOp]:
    """Heisenberg-image seed: sigma_d = -H, then backward adjoint steps with
    locality projection after each step."""
    d = circuit.depth
    s_list = [None] * d
    s_list[d - 1] = project_local(-target, radius, coords)
    for t in range(d - 2, -1, -1):
        stepped = heisenberg_quadratic_step(s_list[t + 1], circuit.layers[t + 1])
        s_list[t] = project_local(stepped, radius, coords)
    return s_list


def optimize_fermionic_dual(circuit: FermionCircuit, target: QuadraticOp,
                            radius: int | None, schedule: BoundSchedule,
                            coords=None, init_s_list=None, maxiter: int = 60,
                            gtol: float = 1e-9):
    """Maximize the fermionic information-content dual over quadratic duals
    supported within ``radius`` (Manhattan distance on ``coords``).

    Uses L-BFGS-B with the analytic gradient

        grad_t = gamma^G_t - S_t(gamma^G_{t-1})     (gamma^G_0 := gamma_0)

    restricted to the masked upper triangle, where gamma^G_t is the Gibbs
    covariance of H_t at the optimal lambda_t and S_t is the forward
    covariance step through layer t (the pairing-adjoint of the Heisenberg
    step).  Inner lambdas are re-optimized every evaluation; their gradient
    contribution vanishes by the envelope theorem.

    Returns (s_list, lambda_list, DualValue); the reported bound never falls
    below the seed's bound by more than 1e-9 (the best iterate is kept).
    """
    n = circuit.n_modes
    if coords is None:
        coords = circuit.meta.get("coords")
    if init_s_list is None:
        s0 = default_fermion_initial_duals(circuit, target, radius, coords)
    else:
        s0 = [project_local(s, radius, coords) for s in init_s_list]
    if radius is None:
        mask = np.ones((2 * n, 2 * n), bool)
    else:
        mask = locality_mask(n, radius, coords)
    rows, cols = np.where(np.triu(mask, k=1))
    consts = [s.constant for s in s0]
    x0 = _pack(s0, rows, cols)
    k = rows.size

    best = {"x": x0.copy(), "value": -np.inf}

    def negative_with_grad(theta: np.ndarray):
        s_list = _unpack(theta, consts, n, rows, cols)
        value, lams, gibbs = _dual_value_parts(s_list, circuit, target, schedule)
        if value.bound > best["value"]:
            best["value"] = value.bound
            best["x"] = theta.copy()
        grad = np.empty_like(theta)
        prev = circuit.initial_covariance
        for t in range(circuit.depth):
            propagated = covariance_layer_step(prev, circuit.layers[t])
            g_mat = gibbs[t] - propagated
            grad[t * k:(t + 1) * k] = g_mat[rows, cols]
            prev = gibbs[t]
        return -value.bound, -grad

    if x0.size:
        scipy.optimize.minimize(
            negative_with_grad, x0, jac=True, method="L-BFGS-B",
            options={"maxiter": maxiter, "gtol": gtol})
    else:
        negative_with_grad(x0)
    s_best = _unpack(best["x"], consts, n, rows, cols)
    value, lams, _ = _dual_value_parts(s_best, circuit, target, schedule)
    return s_best, list(lams), value
