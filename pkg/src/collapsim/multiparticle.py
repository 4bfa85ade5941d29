"""Distinguishable particles on tensor-product grids.

States are nonrelativistic and live on one lab hyperplane; they are used to
show where a frame-independent collapse law for several particles holds
(separable states, free evolution) and where it breaks down (entangled
states, interactions).
"""

from collections.abc import Callable, Sequence
from dataclasses import dataclass, replace
from functools import reduce

import numpy as np
import scipy.linalg
import scipy.signal
import scipy.special
from loguru import logger

from collapsim.collapse import kernel_profile
from collapsim.flash import sample_interval
from collapsim.hilbert import (
    LAB,
    NONRELATIVISTIC,
    NULL_NORM,
    HyperplaneLabel,
    SpacetimePoint,
    SpatialGrid,
    SurfaceWaveFunction,
    energy,
)
from collapsim.stats import RateEstimate, poisson_rate

MAX_AMPLITUDES = 2**22
SEPARABILITY_TOLERANCE = 1e-10
DISTINGUISHABILITY_TOLERANCE = 1e-6
SUPERPOSITION_THRESHOLD = 1e-6
MIN_AMPLIFICATION_TRIALS = 10


@dataclass(frozen=True, eq=False)
class ProductState:
    """Amplitudes Psi(x_1, ..., x_N) over grid^N, normalized with measure dx^N"""

    grid: SpatialGrid
    amplitudes: np.ndarray
    hyperplane: HyperplaneLabel = LAB
    separable: bool = False

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=complex)
        n = self.grid.n_points
        if amplitudes.ndim < 1 or any(size != n for size in amplitudes.shape):
            raise ValueError(
                f"Amplitudes must have shape ({n},)*N, got {amplitudes.shape}"
            )
        if amplitudes.size > MAX_AMPLITUDES:
            raise ValueError(
                f"state too large: {amplitudes.size} amplitudes exceeds {MAX_AMPLITUDES}"
            )
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def n_particles(self) -> int:
        return self.amplitudes.ndim

    @property
    def volume_element(self) -> float:
        return self.grid.spacing**self.n_particles

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2) * self.volume_element))

    def with_amplitudes(self, amplitudes: np.ndarray, separable: bool | None = None):
        return replace(
            self,
            amplitudes=amplitudes,
            separable=self.separable if separable is None else separable,
        )


def _normalized(state: ProductState) -> ProductState:
    norm = state.norm()
    if norm <= NULL_NORM:
        raise ValueError("null state")
    return state.with_amplitudes(state.amplitudes / norm)


def _check_particle(state: ProductState, particle: int) -> None:
    if not 0 <= particle < state.n_particles:
        raise ValueError(
            f"particle index {particle} out of range for {state.n_particles} particles"
        )


def schmidt_coefficients(state: ProductState, left: Sequence[int] = (0,)) -> np.ndarray:
    """Schmidt coefficients for the cut `left` | rest, in descending order"""
    left = list(left)
    for particle in left:
        _check_particle(state, particle)
    right = [axis for axis in range(state.n_particles) if axis not in left]
    n = state.grid.n_points
    matrix = np.transpose(state.amplitudes, left + right).reshape(
        n ** len(left), n ** len(right)
    )
    matrix = matrix * np.sqrt(state.volume_element)
    return scipy.linalg.svdvals(matrix)


def is_separable(state: ProductState) -> bool:
    """True when every single-particle cut has Schmidt rank one"""
    for particle in range(state.n_particles if state.n_particles > 1 else 0):
        coefficients = schmidt_coefficients(state, (particle,))
        if coefficients.size > 1 and coefficients[1] > SEPARABILITY_TOLERANCE:
            return False
    return True


def product_state(factors: Sequence[SurfaceWaveFunction]) -> ProductState:
    """Tensor product of single-particle states on a common grid and hyperplane"""
    if not factors:
        raise ValueError("product_state needs at least one factor")
    grid, hyperplane = factors[0].grid, factors[0].hyperplane
    for factor in factors[1:]:
        if factor.hyperplane != hyperplane:
            raise ValueError(
                f"mismatched hyperplanes: {factor.hyperplane} vs {hyperplane}"
            )
        if factor.grid != grid:
            raise ValueError("mismatched grids between factors")
    amplitudes = reduce(np.multiply.outer, [f.amplitudes for f in factors])
    state = _normalized(ProductState(grid, amplitudes, hyperplane))
    if not is_separable(state):
        raise ValueError("tensor product failed separability certification")
    return state.with_amplitudes(state.amplitudes, separable=True)


def bell_state(left: SurfaceWaveFunction, right: SurfaceWaveFunction) -> ProductState:
    """(|L>|L> + |R>|R>) / sqrt(2)"""
    if left.grid != right.grid or left.hyperplane != right.hyperplane:
        raise ValueError("incompatible states")
    overlap = np.sum(np.conj(left.amplitudes) * right.amplitudes) * left.grid.spacing
    scale = left.norm() * right.norm()
    if abs(overlap) / scale >= DISTINGUISHABILITY_TOLERANCE:
        raise ValueError(
            f"branches not distinguishable: |<L|R>| = {abs(overlap) / scale:.3e}"
        )
    amplitudes = np.multiply.outer(left.amplitudes, left.amplitudes) + np.multiply.outer(
        right.amplitudes, right.amplitudes
    )
    return _normalized(ProductState(left.grid, amplitudes, left.hyperplane))


def reduced_density_matrix(state: ProductState, particle: int) -> np.ndarray:
    """Single-particle density matrix in the orthonormal grid basis (trace one)"""
    _check_particle(state, particle)
    n = state.grid.n_points
    matrix = np.moveaxis(state.amplitudes, particle, 0).reshape(n, -1)
    matrix = matrix * np.sqrt(state.volume_element)
    return matrix @ matrix.conj().T


def marginal_density(state: ProductState, particle: int) -> np.ndarray:
    """Position density of one particle (integrates to one with the grid spacing)"""
    return np.real(np.diag(reduced_density_matrix(state, particle))) / state.grid.spacing


def region_probability(state: ProductState, particle: int, lo: float, hi: float) -> float:
    x = state.grid.x
    inside = (x >= lo) & (x <= hi)
    return float(np.sum(marginal_density(state, particle)[inside]) * state.grid.spacing)


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Half the trace norm of rho - sigma"""
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(rho - sigma))))


def collapse_particle(
    state: ProductState, particle: int, center: float, alpha: float
) -> tuple[ProductState, float]:
    """Apply the single-particle collapse operator to one particle"""
    _check_particle(state, particle)
    if not alpha > 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    shape = [1] * state.n_particles
    shape[particle] = state.grid.n_points
    profile = kernel_profile(state.grid.x, center, alpha).reshape(shape)
    collapsed = state.amplitudes * profile
    weight = float(np.sum(np.abs(collapsed) ** 2) * state.volume_element)
    if weight < NULL_NORM:
        raise ValueError("collapse onto null support")
    return state.with_amplitudes(collapsed / np.sqrt(weight)), weight


@dataclass(frozen=True)
class FlashOutcome:
    """A particle's flash inside [x_lo, x_hi]; equal bounds mean a point density"""

    particle: int
    x_lo: float
    x_hi: float

    def __post_init__(self):
        if self.x_hi < self.x_lo:
            raise ValueError(f"empty region [{self.x_lo}, {self.x_hi}]")

    def effect(self, x: np.ndarray, alpha: float) -> np.ndarray:
        """Born effect of the outcome as a multiplication operator on positions"""
        if self.x_lo == self.x_hi:
            return kernel_profile(x, self.x_lo, alpha) ** 2
        root = np.sqrt(alpha)
        return 0.5 * (
            scipy.special.erf(root * (self.x_hi - x))
            - scipy.special.erf(root * (self.x_lo - x))
        )


def factorization_defect(
    state: ProductState, outcomes: Sequence[FlashOutcome], alpha: float
) -> float:
    """|P(joint outcomes) - prod_i P(outcome_i)| for one flash per listed particle"""
    particles = [outcome.particle for outcome in outcomes]
    if len(set(particles)) != len(particles):
        raise ValueError("at most one outcome per particle")
    for particle in particles:
        _check_particle(state, particle)
    x = state.grid.x
    density = np.abs(state.amplitudes) ** 2 * state.volume_element
    joint_effect = np.ones_like(density)
    product = 1.0
    for outcome in outcomes:
        shape = [1] * state.n_particles
        shape[outcome.particle] = state.grid.n_points
        effect = outcome.effect(x, alpha)
        joint_effect = joint_effect * effect.reshape(shape)
        marginal = marginal_density(state, outcome.particle) * state.grid.spacing
        product *= float(np.sum(marginal * effect))
    joint = float(np.sum(density * joint_effect))
    return abs(joint - product)


def earliest_seed(seeds: Sequence[SpacetimePoint]) -> int:
    """Index of the earliest seed in lab time; ties go to the lowest index"""
    times = [seed.t for seed in seeds]
    return int(np.argmin(times))


def _sample_in_branch(
    state: ProductState,
    particle: int,
    lo: float,
    hi: float,
    rng: np.random.Generator,
) -> float:
    x = state.grid.x
    density = marginal_density(state, particle) * ((x >= lo) & (x < hi))
    total = np.sum(density)
    if total <= NULL_NORM:
        raise ValueError(f"no weight for particle {particle} in [{lo}, {hi})")
    cell = int(rng.choice(x.size, p=density / total))
    return float(x[cell])


def frame_comparison_defect(
    state: ProductState,
    seeds: tuple[SpacetimePoint, SpacetimePoint],
    sigma_prime: HyperplaneLabel,
    branch_centers: tuple[float, float],
    alpha: float,
    rng: np.random.Generator,
    delay: float = 1.0,
) -> float:
    """Trace distance between particle 1's states after two outcomes of particle 2's flash.

    Particle 2's next flash Y2 happens `delay` after its seed X2, at a
    position drawn near either branch centre. The protocol needs Y2 to lie
    after the lab hyperplane through the earliest seed and before
    `sigma_prime` in the boosted frame; both outcomes are then equally
    legitimate histories behind sigma_prime.
    """
    if state.n_particles != 2:
        raise ValueError("frame comparison needs a two-particle state")
    first, second = seeds
    start = seeds[earliest_seed(seeds)]
    if not first.is_spacelike(second):
        raise ValueError("invalid foliation geometry: seeds must be space-like separated")
    split = 0.5 * (branch_centers[0] + branch_centers[1])
    regions = [(-np.inf, split), (split, np.inf)]

    reduced = []
    for center, (lo, hi) in zip(branch_centers, regions):
        position = _sample_in_branch(state, 1, lo, hi, rng)
        successor = SpacetimePoint(second.t + delay, position)
        after_lab = successor.t > start.t
        before_prime = successor.in_frame(sigma_prime.rapidity).t < sigma_prime.time
        if not (after_lab and before_prime):
            raise ValueError(
                "invalid foliation geometry: Y2 at "
                f"({successor.t:.4g}, {successor.x:.4g}) is not between the lab "
                "hyperplane of the earliest seed and sigma_prime"
            )
        collapsed, _ = collapse_particle(state, 1, position, alpha)
        reduced.append(reduced_density_matrix(collapsed, 0))
        logger.debug("Y2 outcome near {:.3g} sampled at {:.4g}", center, position)
    return trace_distance(reduced[0], reduced[1])


@dataclass(frozen=True)
class SignalingCheck:
    p_direct: float
    p_after: float
    z_score: float
    trials: int


def signaling_marginal(
    state: ProductState,
    alpha: float,
    trials: int,
    rng: np.random.Generator,
    split: float = 0.0,
) -> SignalingCheck:
    """Particle 1's left-region flash frequency with and without a prior particle-2 flash.

    Without the prior flash, particle 1 flashes left of `split` with its
    marginal probability. With it, particle 2's flash location is sampled
    first and particle 1 then flashes from the conditional state; averaged
    over particle 2's outcomes both frequencies must agree.
    """
    if state.n_particles != 2:
        raise ValueError("no-signaling check needs a two-particle state")
    if trials < 2:
        raise ValueError(f"insufficient trials: {trials}")
    grid = state.grid
    x = grid.x
    density = np.abs(state.amplitudes) ** 2 * state.volume_element
    left = FlashOutcome(0, -np.inf, split).effect(x, alpha)
    kernel = kernel_profile(x[:, None], x[None, :], alpha) ** 2 * grid.spacing

    p_direct = float(np.sum(density.sum(axis=1) * left))
    p_second = kernel @ density.sum(axis=0)
    joint_left = kernel @ (left @ density)
    conditional = joint_left / np.maximum(p_second, NULL_NORM)

    cells = rng.choice(x.size, size=trials, p=p_second / p_second.sum())
    after = rng.random(trials) < conditional[cells]
    direct = rng.random(trials) < p_direct
    f_after, f_direct = float(np.mean(after)), float(np.mean(direct))
    spread = np.sqrt(
        (f_after * (1 - f_after) + f_direct * (1 - f_direct)) / trials
    )
    z = abs(f_after - f_direct) / spread if spread > 0 else 0.0
    return SignalingCheck(p_direct, f_after, float(z), trials)


def commutator_defect(a: np.ndarray, b: np.ndarray) -> float:
    """||[A, B]|| / (||A|| ||B||) in spectral norms"""
    scale = np.linalg.norm(a, 2) * np.linalg.norm(b, 2)
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(a @ b - b @ a, 2) / scale)


def gaussian_potential(distance: np.ndarray, reach: float = 1.0) -> np.ndarray:
    return np.exp(-0.5 * (distance / reach) ** 2)


@dataclass(frozen=True)
class InteractionSpec:
    """Pair potential strength * V(x_1 - x_2)"""

    potential: Callable[[np.ndarray], np.ndarray] = gaussian_potential
    strength: float = 0.0

    def matrix(self, grid: SpatialGrid) -> np.ndarray:
        """Diagonal two-particle interaction on grid (x) grid"""
        differences = np.subtract.outer(grid.x, grid.x).ravel()
        values = self.strength * np.asarray(self.potential(differences), dtype=float)
        return np.diag(values)


def kinetic_matrix(grid: SpatialGrid, mass: float = 1.0) -> np.ndarray:
    """Spectral kinetic energy p^2 / 2m as a dense matrix on the grid"""
    fourier = scipy.linalg.dft(grid.n_points, scale="sqrtn")
    energies = energy(grid.momenta, mass, NONRELATIVISTIC)
    return fourier.conj().T @ np.diag(energies) @ fourier


def two_particle_hamiltonian(
    interaction: InteractionSpec, grid: SpatialGrid, mass: float = 1.0
) -> np.ndarray:
    kinetic = kinetic_matrix(grid, mass)
    identity = np.eye(grid.n_points)
    free = np.kron(kinetic, identity) + np.kron(identity, kinetic)
    return free + interaction.matrix(grid)


def interaction_factorization_defect(
    interaction: InteractionSpec,
    particle: int,
    center: float,
    alpha: float,
    dt: float,
    grid: SpatialGrid,
    mass: float = 1.0,
) -> float:
    """Non-factorizability of the interacting evolution against particle-i collapses.

    Uses the interaction-picture propagator W_I = W0^dagger W, where W0 is
    the free product evolution, so free motion alone contributes nothing.
    """
    if particle not in (0, 1):
        raise ValueError(f"particle index must be 0 or 1, got {particle}")
    free = two_particle_hamiltonian(InteractionSpec(interaction.potential, 0.0), grid, mass)
    full = free + interaction.matrix(grid)
    evolution = scipy.linalg.expm(-1j * dt * full)
    free_evolution = scipy.linalg.expm(-1j * dt * free)
    interaction_picture = free_evolution.conj().T @ evolution

    local = np.diag(kernel_profile(grid.x, center, alpha))
    identity = np.eye(grid.n_points)
    collapse = np.kron(local, identity) if particle == 0 else np.kron(identity, local)
    return commutator_defect(interaction_picture, collapse)


@dataclass(frozen=True, eq=False)
class BranchState:
    """GHZ-type state sum_b c_b prod_i phi_{b,i} with two branches"""

    grid: SpatialGrid
    coefficients: np.ndarray
    packets: np.ndarray

    @property
    def n_particles(self) -> int:
        return self.packets.shape[1]

    def overlaps(self) -> np.ndarray:
        """<phi_{0,i}|phi_{1,i}> for every particle"""
        return np.sum(np.conj(self.packets[0]) * self.packets[1], axis=1) * self.grid.spacing

    def branch_weights(self) -> np.ndarray:
        norms = np.sum(np.abs(self.packets) ** 2, axis=2) * self.grid.spacing
        weights = np.abs(self.coefficients) ** 2 * np.prod(norms, axis=1)
        return weights / np.sum(weights)

    def is_superposed(self, threshold: float = SUPERPOSITION_THRESHOLD) -> bool:
        return bool(np.min(self.branch_weights()) > threshold)

    def location_pdf(self, particle: int, alpha: float) -> np.ndarray:
        """||L_i(x) Psi||^2 over the grid points x"""
        n = self.grid.n_points
        offsets = self.grid.spacing * np.arange(-(n // 2), n // 2 + 1)
        kernel = kernel_profile(offsets, 0.0, alpha) ** 2
        others = np.ones((2, 2), dtype=complex)
        overlaps = self.overlaps()
        rest = np.prod(np.delete(overlaps, particle))
        others[0, 1], others[1, 0] = rest, np.conj(rest)
        c = self.coefficients
        pdf = np.zeros(n)
        for a in range(2):
            for b in range(2):
                if a != b and abs(others[a, b]) < NULL_NORM:
                    continue
                pair = np.conj(self.packets[a, particle]) * self.packets[b, particle]
                smeared = scipy.signal.fftconvolve(pair, kernel, mode="same")
                term = np.conj(c[a]) * c[b] * others[a, b] * smeared
                pdf += np.real(term) * self.grid.spacing
        return np.clip(pdf, 0.0, None)

    def collapse(self, particle: int, center: float, alpha: float) -> "BranchState":
        packets = self.packets.copy()
        packets[:, particle] *= kernel_profile(self.grid.x, center, alpha)
        norms = np.sqrt(np.sum(np.abs(packets[:, particle]) ** 2, axis=1) * self.grid.spacing)
        if np.max(norms) < NULL_NORM:
            raise ValueError("collapse onto null support")
        safe = np.where(norms > NULL_NORM, norms, 1.0)
        packets[:, particle] /= safe[:, None]
        coefficients = self.coefficients * norms
        coefficients = coefficients / np.linalg.norm(coefficients)
        return BranchState(self.grid, coefficients, packets)


def ghz_state(
    n_particles: int, separation: float, grid: SpatialGrid, width: float = 0.5
) -> BranchState:
    """(|all at -a> + |all at +a>) / sqrt(2) with a = separation / 2"""
    if n_particles < 1:
        raise ValueError(f"need at least one particle, got {n_particles}")
    half = separation / 2.0
    packets = np.empty((2, n_particles, grid.n_points), dtype=complex)
    for branch, center in enumerate((-half, half)):
        packet = np.exp(-((grid.x - center) ** 2) / (4.0 * width**2))
        packet /= np.sqrt(np.sum(np.abs(packet) ** 2) * grid.spacing)
        packets[branch] = packet
    state = BranchState(grid, np.full(2, 1.0 / np.sqrt(2.0), dtype=complex), packets)
    if np.max(np.abs(state.overlaps())) >= DISTINGUISHABILITY_TOLERANCE:
        raise ValueError("branches not distinguishable")
    return state


def amplification_rate(
    n_particles: int,
    separation: float,
    tau: float,
    alpha: float,
    rng: np.random.Generator,
    trials: int,
    grid: SpatialGrid | None = None,
    width: float = 0.5,
    horizon: float = 10.0,
) -> RateEstimate:
    """Decay rate of the GHZ superposition under independent per-particle collapses.

    Each trial runs until the superposition is destroyed or `horizon` * tau
    has elapsed; the rate is events over total exposure. Free evolution
    between collapses is neglected.
    """
    if trials < MIN_AMPLIFICATION_TRIALS:
        raise ValueError(
            f"insufficient trials: need at least {MIN_AMPLIFICATION_TRIALS}, got {trials}"
        )
    grid = grid or SpatialGrid.centered(0.0, 32.0, 64)
    initial = ghz_state(n_particles, separation, grid, width)
    limit = horizon * tau
    events, exposure = 0, 0.0
    for _ in range(trials):
        state, time = initial, 0.0
        while True:
            waits = sample_interval(tau, rng, size=n_particles)
            particle = int(np.argmin(waits))
            time += float(waits[particle])
            if time >= limit:
                exposure += limit
                break
            pdf = state.location_pdf(particle, alpha)
            cell = int(rng.choice(grid.n_points, p=pdf / np.sum(pdf)))
            center = grid.x[cell] + rng.uniform(-grid.spacing / 2, grid.spacing / 2)
            state = state.collapse(particle, center, alpha)
            if not state.is_superposed():
                events += 1
                exposure += time
                break
    return poisson_rate(events, exposure)
