"""Relativistic single-particle flash process.

Each flash sits on the future hyperboloid of the previous one, at a proper
time distance drawn from an exponential law. Its position on the hyperboloid
follows the Born weight of the transported collapse operator, integrated
against the invariant line element dT dchi.
"""

from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from loguru import logger

from collapsim.collapse import CollapseKernel, kernel_profile, transported_collapse
from collapsim.hilbert import (
    LAB,
    NULL_NORM,
    ORIGIN,
    CovariantAmplitude,
    SpacetimePoint,
    SpatialGrid,
    grid_for,
    group_velocity,
    lab_slices,
    resample,
    restrict,
    translate,
)
from collapsim.stats import MeanEstimate, histogram_z, mean_ci
from collapsim.utils import next_power_of_two

DEFAULT_CHI_MAX = 4.0
DEFAULT_CHI_STEP = 0.01
TAIL_TOLERANCE = 1e-10
SUPPORT_TAIL = 1e-14
# kernel widths of margin kept around the classical envelope of the packet
KERNEL_REACH = 8.0
ROW_CHUNK = 64
MIN_DILATION_CHAINS = 30
FLASH_COLUMNS = ["trajectory", "index", "t", "x", "delta_T"]


@dataclass(frozen=True)
class FlashEvent:
    """Flash in lab coordinates with the proper distance to its predecessor"""

    t: float
    x: float
    delta_T: float = 0.0
    index: int = 0

    @classmethod
    def seed(cls, point: SpacetimePoint = ORIGIN) -> "FlashEvent":
        return cls(point.t, point.x, 0.0, 0)

    @property
    def point(self) -> SpacetimePoint:
        return SpacetimePoint(self.t, self.x)


@dataclass(frozen=True, eq=False)
class Hyperboloid:
    """Future hyperboloid at proper distance delta_T from `apex`, sampled in rapidity"""

    apex: SpacetimePoint
    delta_T: float
    chi: np.ndarray

    def __post_init__(self):
        if not self.delta_T > 0.0:
            raise ValueError(f"delta_T must be positive, got {self.delta_T}")
        chi = np.array(self.chi, dtype=float)
        if chi.ndim != 1 or chi.size < 2 or np.any(np.diff(chi) <= 0):
            raise ValueError("chi samples must be a strictly increasing 1D grid")
        chi.setflags(write=False)
        object.__setattr__(self, "chi", chi)

    def relative_coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        """(t, x) of every sample relative to the apex"""
        return self.delta_T * np.cosh(self.chi), self.delta_T * np.sinh(self.chi)

    def events(self) -> tuple[np.ndarray, np.ndarray]:
        t, x = self.relative_coordinates()
        return self.apex.t + t, self.apex.x + x


@dataclass
class FlashChain:
    seed_event: FlashEvent
    events: list[FlashEvent] = field(default_factory=list)
    rng_seed: int = 0
    error: str | None = None
    final_state: CovariantAmplitude | None = None

    def __len__(self) -> int:
        return len(self.events)

    @property
    def all_events(self) -> list[FlashEvent]:
        return [self.seed_event, *self.events]

    def coordinate_intervals(self, rapidity: float = 0.0) -> np.ndarray:
        """Coordinate time between consecutive flashes in the frame of `rapidity`"""
        times = [event.point.in_frame(rapidity).t for event in self.all_events]
        return np.diff(np.asarray(times, dtype=float))

    def proper_intervals(self, rapidity: float = 0.0) -> np.ndarray:
        """Proper distances recomputed from coordinates in the frame of `rapidity`"""
        points = [event.point.in_frame(rapidity) for event in self.all_events]
        t = np.array([p.t for p in points])
        x = np.array([p.x for p in points])
        return np.sqrt(np.diff(t) ** 2 - np.diff(x) ** 2)


@dataclass(frozen=True, eq=False)
class _HyperboloidScan:
    hyperboloid: Hyperboloid
    weights: np.ndarray
    state: CovariantAmplitude
    grid: SpatialGrid


def default_chi_grid(
    chi_max: float = DEFAULT_CHI_MAX, step: float = DEFAULT_CHI_STEP
) -> np.ndarray:
    if not chi_max > 0.0 or not step > 0.0:
        raise ValueError(f"chi_max and step must be positive, got {chi_max}, {step}")
    n = int(round(2.0 * chi_max / step)) + 1
    return np.linspace(-chi_max, chi_max, n)


def sample_interval(tau: float, rng: np.random.Generator, size=None):
    """Exponential waiting time (proper distance) with mean tau"""
    if not tau > 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    return rng.exponential(tau, size)


def _support(weights: np.ndarray, coordinates: np.ndarray) -> tuple[float, float]:
    """Interval of sorted coordinates holding all but SUPPORT_TAIL of the weight"""
    cumulative = np.cumsum(weights)
    cumulative /= cumulative[-1]
    lo = int(np.searchsorted(cumulative, SUPPORT_TAIL))
    hi = int(np.searchsorted(cumulative, 1.0 - SUPPORT_TAIL))
    return float(coordinates[lo]), float(coordinates[min(hi, len(coordinates) - 1)])


def _scan_hyperboloid(
    phi: CovariantAmplitude,
    apex: SpacetimePoint,
    delta_T: float,
    alpha: float,
    chi: np.ndarray,
) -> _HyperboloidScan:
    hyperboloid = Hyperboloid(apex, delta_T, chi)
    relative = translate(phi, -apex)
    base = grid_for(relative, 0.0)
    view = restrict(relative, LAB, base)

    x_lo, x_hi = _support(view.density(), base.x)
    spectrum = np.fft.fftshift(np.abs(view.momentum_amplitudes()) ** 2)
    p_lo, p_hi = _support(spectrum, np.fft.fftshift(base.momenta))
    v_lo, v_hi = group_velocity(np.array([p_lo, p_hi]), phi.mass, phi.dispersion)

    t, x = hyperboloid.relative_coordinates()
    reach = KERNEL_REACH / np.sqrt(alpha)
    lower = x_lo + v_lo * t - reach
    upper = x_hi + v_hi * t + reach
    active = (x >= lower) & (x <= upper)
    if not np.any(active):
        raise ValueError("wavefunction has no support on hyperboloid")

    half = (
        max(
            float(np.max(np.abs(lower[active]))),
            float(np.max(np.abs(upper[active]))),
            base.length / 2.0,
        )
        + reach
    )
    n_points = max(base.n_points, next_power_of_two(int(np.ceil(2.0 * half / base.spacing))))
    grid = SpatialGrid(-n_points * base.spacing / 2.0, base.spacing, n_points)
    padded = relative if n_points == base.n_points else resample(relative, grid)

    t_active, x_active = t[active], x[active]
    born = np.empty(t_active.size)
    for start in range(0, t_active.size, ROW_CHUNK):
        rows = slice(start, start + ROW_CHUNK)
        density = np.abs(lab_slices(padded, t_active[rows], grid)) ** 2
        kernel = kernel_profile(grid.x[None, :], x_active[rows, None], alpha) ** 2
        born[rows] = np.sum(density * kernel, axis=1) * grid.spacing

    weights = np.zeros(hyperboloid.chi.size)
    weights[active] = born * delta_T * np.gradient(hyperboloid.chi)[active]
    total = float(np.sum(weights))
    if not total > NULL_NORM:
        raise ValueError("wavefunction has no support on hyperboloid")
    weights /= total
    tail = max(weights[0], weights[-1])
    if tail > TAIL_TOLERANCE:
        logger.warning(
            "Hyperboloid weight at |chi| = {:.2f} is {:.2e} (delta_T = {:.4g})",
            hyperboloid.chi[-1],
            tail,
            delta_T,
        )
    return _HyperboloidScan(hyperboloid, weights, padded, grid)


def flash_location_pdf(
    phi: CovariantAmplitude,
    apex: SpacetimePoint,
    delta_T: float,
    alpha: float,
    chi: np.ndarray | None = None,
) -> np.ndarray:
    """Normalized probabilities of the next flash over the rapidity samples `chi`.

    Args:
        phi (CovariantAmplitude): Current (normalized) state
        apex (SpacetimePoint): Previous flash
        delta_T (float): Proper distance to the next flash
        alpha (float): Collapse localization parameter
        chi (np.ndarray, optional): Rapidity samples; defaults to
            [-4, 4] in steps of 0.01

    Returns:
        np.ndarray: Weights over chi summing to one
    """
    chi = default_chi_grid() if chi is None else np.asarray(chi, dtype=float)
    return _scan_hyperboloid(phi, apex, delta_T, alpha, chi).weights


def _cell_edges(chi: np.ndarray) -> np.ndarray:
    midpoints = 0.5 * (chi[1:] + chi[:-1])
    return np.concatenate(([chi[0]], midpoints, [chi[-1]]))


def next_flash(
    phi: CovariantAmplitude,
    previous: FlashEvent,
    tau: float,
    alpha: float,
    rng: np.random.Generator,
    chi: np.ndarray | None = None,
) -> tuple[FlashEvent, CovariantAmplitude]:
    """Sample the next flash and the post-collapse state"""
    chi = default_chi_grid() if chi is None else np.asarray(chi, dtype=float)
    delta_T = float(sample_interval(tau, rng))
    scan = _scan_hyperboloid(phi, previous.point, delta_T, alpha, chi)

    cell = int(rng.choice(chi.size, p=scan.weights))
    edges = _cell_edges(chi)
    rapidity = float(rng.uniform(edges[cell], edges[cell + 1]))
    offset = SpacetimePoint(delta_T * np.cosh(rapidity), delta_T * np.sinh(rapidity))

    kernel = CollapseKernel.at(offset, alpha)
    collapsed, weight = transported_collapse(scan.state, offset, kernel, scan.grid)
    local = resample(translate(collapsed, -offset), grid_for(phi, 0.0))

    event = FlashEvent(
        previous.t + offset.t, previous.x + offset.x, delta_T, previous.index + 1
    )
    logger.debug(
        "Flash {}: delta_T={:.4g} chi={:.4f} at ({:.4g}, {:.4g}), weight {:.3e}",
        event.index,
        delta_T,
        rapidity,
        event.t,
        event.x,
        weight,
    )
    return event, translate(local, event.point)


def check_ordering(previous: FlashEvent, event: FlashEvent) -> None:
    """Raise unless `event` lies on the future hyperboloid of `previous`"""
    dt = event.t - previous.t
    interval = previous.point.interval(event.point)
    tolerance = 1e-9 * max(1.0, dt * dt)
    if not dt > 0.0 or abs(interval - event.delta_T**2) > tolerance:
        raise RuntimeError(
            f"flash {event.index} is not time-like from flash {previous.index}: "
            f"interval {interval:.12g}, delta_T^2 {event.delta_T**2:.12g}"
        )


def simulate_chain(
    initial: CovariantAmplitude,
    seed_event: FlashEvent | None = None,
    n: int = 1,
    tau: float = 30.0,
    alpha: float = 1.0 / 32.0,
    rng_seed: int = 0,
    chi: np.ndarray | None = None,
) -> FlashChain:
    """Markov chain of `n` flashes started at `seed_event` (lab origin by default).

    A failing step truncates the chain and records the message in
    `FlashChain.error`; an ordering violation is a hard error.
    """
    if n < 0:
        raise ValueError(f"Number of flashes must be non-negative, got {n}")
    seed_event = seed_event or FlashEvent.seed()
    rng = np.random.default_rng(rng_seed)
    chain = FlashChain(seed_event, rng_seed=rng_seed)
    state, previous = initial, seed_event
    for step in range(n):
        try:
            event, state = next_flash(state, previous, tau, alpha, rng, chi)
        except ValueError as e:
            chain.error = f"step {step + 1}: {e}"
            logger.warning("Chain {} truncated at {}", rng_seed, chain.error)
            break
        check_ordering(previous, event)
        chain.events.append(event)
        previous = event
    chain.final_state = state
    return chain


def dilation_statistic(
    chains: list[FlashChain], seed: int = 0, rapidity: float = 0.0
) -> MeanEstimate:
    """Pooled mean coordinate interval between flashes, with a bootstrap 95% CI"""
    if len(chains) < MIN_DILATION_CHAINS:
        raise ValueError(
            f"insufficient data: need at least {MIN_DILATION_CHAINS} chains, "
            f"got {len(chains)}"
        )
    intervals = np.concatenate([chain.coordinate_intervals(rapidity) for chain in chains])
    return mean_ci(intervals, seed=seed)


@dataclass(frozen=True)
class HistogramAgreement:
    proper_z: float
    coordinate_z: float
    n_reference: int
    n_boosted: int

    @property
    def max_z(self) -> float:
        return max(self.proper_z, self.coordinate_z)


def interval_histogram_agreement(
    reference: list[FlashChain],
    boosted: list[FlashChain],
    rapidity: float,
    bins: int = 10,
) -> HistogramAgreement:
    """Compare a rest ensemble with a boosted ensemble analysed in its own rest frame.

    Proper distances and frame coordinate intervals of the boosted chains,
    both computed in the frame of `rapidity`, are histogrammed against the
    lab statistics of the reference chains; the largest per-bin z-score of
    each comparison is returned.
    """
    proper_ref = np.concatenate([c.proper_intervals() for c in reference])
    proper_boost = np.concatenate([c.proper_intervals(rapidity) for c in boosted])
    coord_ref = np.concatenate([c.coordinate_intervals() for c in reference])
    coord_boost = np.concatenate([c.coordinate_intervals(rapidity) for c in boosted])
    if proper_ref.size < 2 or proper_boost.size < 2:
        raise ValueError("insufficient data: need flashes in both ensembles")

    def edges(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        pooled = np.concatenate([a, b])
        cuts = np.quantile(pooled, np.linspace(0.0, 1.0, bins + 1))
        cuts[-1] = np.nextafter(cuts[-1], np.inf)
        return np.unique(cuts)

    return HistogramAgreement(
        proper_z=histogram_z(proper_ref, proper_boost, edges(proper_ref, proper_boost)),
        coordinate_z=histogram_z(coord_ref, coord_boost, edges(coord_ref, coord_boost)),
        n_reference=int(proper_ref.size),
        n_boosted=int(proper_boost.size),
    )


def chains_to_frame(chains: list[FlashChain]) -> pd.DataFrame:
    """Flash table with columns trajectory, index, t, x, delta_T"""
    rows = [
        (trajectory, event.index, event.t, event.x, event.delta_T)
        for trajectory, chain in enumerate(chains)
        for event in chain.all_events
    ]
    return pd.DataFrame(rows, columns=FLASH_COLUMNS)
