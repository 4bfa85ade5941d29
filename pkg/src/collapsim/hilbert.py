"""Grids, flat hyperplanes and single-particle states.

A `CovariantAmplitude` is the canonical state: a positive-energy momentum
amplitude on a lab momentum lattice. Position-space wavefunctions on a flat
hyperplane (`SurfaceWaveFunction`) are views obtained with `restrict` and
turned back into amplitudes with `lift`. Position space uses the
Newton-Wigner convention, so |psi(x)|^2 is a probability density on every
hyperplane.

Frame conventions (natural units, 1+1 dimensions): the frame of rapidity eta
moves with velocity tanh(eta) relative to the lab, with

    t' = t cosh(eta) - x sinh(eta),   x' = x cosh(eta) - t sinh(eta)
    p' = p cosh(eta) - E sinh(eta),   E' = E cosh(eta) - p sinh(eta)
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property
from typing import Literal

import numpy as np

Dispersion = Literal["relativistic", "nonrelativistic"]
RELATIVISTIC: Dispersion = "relativistic"
NONRELATIVISTIC: Dispersion = "nonrelativistic"

# fraction of the Nyquist momentum above which spectral weight counts as aliasing
BAND_FRACTION = 0.75
RESOLUTION_TOLERANCE = 1e-6
SEAM_TOLERANCE = 1e-6
SEAM_FRACTION = 1 / 32
NULL_NORM = 1e-300


def _check_dispersion(dispersion: str) -> None:
    if dispersion not in (RELATIVISTIC, NONRELATIVISTIC):
        raise ValueError(
            f"Unknown dispersion {dispersion!r}, expected "
            f"{RELATIVISTIC!r} or {NONRELATIVISTIC!r}"
        )


def energy(p, mass: float, dispersion: Dispersion = RELATIVISTIC) -> np.ndarray:
    """E(p) = sqrt(p^2 + m^2), or p^2 / 2m for the Galilean dispersion"""
    p = np.asarray(p, dtype=float)
    if dispersion == RELATIVISTIC:
        return np.sqrt(p * p + mass * mass)
    return p * p / (2.0 * mass)


def group_velocity(p, mass: float, dispersion: Dispersion = RELATIVISTIC):
    p = np.asarray(p, dtype=float)
    if dispersion == RELATIVISTIC:
        return p / np.sqrt(p * p + mass * mass)
    return p / mass


def _measure_factor(energies: np.ndarray, dispersion: Dispersion) -> np.ndarray:
    """sqrt(2E) for the invariant measure dp/2E, 1 otherwise"""
    if dispersion == RELATIVISTIC:
        return np.sqrt(2.0 * energies)
    return np.ones_like(energies)


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class SpacetimePoint:
    """Event in lab coordinates"""

    t: float = 0.0
    x: float = 0.0

    def __add__(self, other: SpacetimePoint) -> SpacetimePoint:
        return SpacetimePoint(self.t + other.t, self.x + other.x)

    def __sub__(self, other: SpacetimePoint) -> SpacetimePoint:
        return SpacetimePoint(self.t - other.t, self.x - other.x)

    def __neg__(self) -> SpacetimePoint:
        return SpacetimePoint(-self.t, -self.x)

    def interval(self, other: SpacetimePoint) -> float:
        """Minkowski interval dt^2 - dx^2 (positive for time-like pairs)"""
        dt = other.t - self.t
        dx = other.x - self.x
        return dt * dt - dx * dx

    def is_timelike(self, other: SpacetimePoint) -> bool:
        return self.interval(other) > 0.0

    def is_spacelike(self, other: SpacetimePoint) -> bool:
        return self.interval(other) < 0.0

    def in_frame(self, rapidity: float) -> SpacetimePoint:
        """Coordinates of this event in the frame of the given rapidity"""
        ch, sh = np.cosh(rapidity), np.sinh(rapidity)
        return SpacetimePoint(
            float(self.t * ch - self.x * sh), float(self.x * ch - self.t * sh)
        )

    @classmethod
    def from_frame(cls, t: float, x: float, rapidity: float) -> SpacetimePoint:
        """Lab event whose coordinates in the given frame are (t, x)"""
        ch, sh = np.cosh(rapidity), np.sinh(rapidity)
        return cls(float(t * ch + x * sh), float(x * ch + t * sh))


ORIGIN = SpacetimePoint()


@dataclass(frozen=True)
class HyperplaneLabel:
    """Constant-time hyperplane t' = time in the frame of the given rapidity"""

    rapidity: float = 0.0
    time: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.rapidity) and np.isfinite(self.time)):
            raise ValueError(
                f"Hyperplane label must be finite, got ({self.rapidity}, {self.time})"
            )

    @classmethod
    def lab(cls, time: float = 0.0) -> HyperplaneLabel:
        return cls(0.0, float(time))

    @classmethod
    def through(cls, point: SpacetimePoint, rapidity: float = 0.0) -> HyperplaneLabel:
        """The hyperplane of the given frame containing `point`"""
        return cls(float(rapidity), point.in_frame(rapidity).t)

    def frame_position(self, point: SpacetimePoint) -> float:
        """Spatial coordinate of `point` in this hyperplane's frame"""
        return point.in_frame(self.rapidity).x

    def point_at(self, position: float) -> SpacetimePoint:
        """Lab event on this hyperplane at frame position `position`"""
        return SpacetimePoint.from_frame(self.time, position, self.rapidity)

    def contains(self, point: SpacetimePoint, tol: float = 1e-9) -> bool:
        frame_time = point.in_frame(self.rapidity).t
        return abs(frame_time - self.time) <= tol * max(1.0, abs(self.time))


LAB = HyperplaneLabel()


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform periodic grid x_j = x_min + j * spacing"""

    x_min: float
    spacing: float
    n_points: int
    periodic: bool = True

    def __post_init__(self):
        n = self.n_points
        if n < 8 or n & (n - 1):
            raise ValueError(f"n_points must be a power of two >= 8, got {n}")
        if not self.spacing > 0.0:
            raise ValueError(f"Grid spacing must be positive, got {self.spacing}")
        if not np.isfinite(self.x_min):
            raise ValueError(f"Grid origin must be finite, got {self.x_min}")

    @classmethod
    def centered(
        cls, center: float = 0.0, box: float = 200.0, n_points: int = 1024
    ) -> SpatialGrid:
        spacing = box / n_points
        return cls(center - box / 2.0, spacing, n_points)

    @property
    def length(self) -> float:
        return self.n_points * self.spacing

    @property
    def center(self) -> float:
        return self.x_min + self.length / 2.0

    @cached_property
    def x(self) -> np.ndarray:
        return _readonly(self.x_min + self.spacing * np.arange(self.n_points))

    @cached_property
    def momenta(self) -> np.ndarray:
        """Momentum lattice in FFT order"""
        return _readonly(2.0 * np.pi * np.fft.fftfreq(self.n_points, self.spacing))

    @property
    def momentum_spacing(self) -> float:
        return 2.0 * np.pi / self.length

    @property
    def nyquist(self) -> float:
        return np.pi / self.spacing

    def centered_at(self, center: float) -> SpatialGrid:
        return replace(self, x_min=center - self.length / 2.0)

    def same_lattice(self, other: SpatialGrid) -> bool:
        return self.n_points == other.n_points and np.isclose(
            self.spacing, other.spacing, rtol=1e-12, atol=0.0
        )


@dataclass(frozen=True, eq=False)
class CovariantAmplitude:
    """Frame-independent momentum amplitude phi(p) on a lab momentum lattice.

    `anchor` is an event near which the state is localized. It only serves
    as the expansion point for off-lattice interpolation and never changes
    the physical state.
    """

    momenta: np.ndarray
    amplitudes: np.ndarray
    mass: float = 1.0
    dispersion: Dispersion = RELATIVISTIC
    anchor: SpacetimePoint = ORIGIN

    def __post_init__(self):
        _check_dispersion(self.dispersion)
        if not self.mass > 0.0:
            raise ValueError(f"Mass must be positive, got {self.mass}")
        momenta = np.array(self.momenta, dtype=float)
        amplitudes = np.array(self.amplitudes, dtype=complex)
        if momenta.ndim != 1 or momenta.shape != amplitudes.shape:
            raise ValueError(
                f"Momenta {momenta.shape} and amplitudes {amplitudes.shape} "
                "must be matching 1D arrays"
            )
        object.__setattr__(self, "momenta", _readonly(momenta))
        object.__setattr__(self, "amplitudes", _readonly(amplitudes))

    @property
    def momentum_spacing(self) -> float:
        return float(self.momenta[1] - self.momenta[0])

    @cached_property
    def energies(self) -> np.ndarray:
        return _readonly(energy(self.momenta, self.mass, self.dispersion))

    @property
    def measure(self) -> np.ndarray:
        """Quadrature weights of the invariant inner product"""
        factor = _measure_factor(self.energies, self.dispersion)
        return self.momentum_spacing / factor**2

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2 * self.measure)))

    def mean_momentum(self) -> float:
        weights = np.abs(self.amplitudes) ** 2 * self.measure
        return float(np.sum(self.momenta * weights) / np.sum(weights))

    def with_amplitudes(
        self, amplitudes: np.ndarray, anchor: SpacetimePoint | None = None
    ) -> CovariantAmplitude:
        return replace(
            self,
            amplitudes=amplitudes,
            anchor=self.anchor if anchor is None else anchor,
        )

    def on_lattice(self, grid: SpatialGrid) -> bool:
        return len(self.momenta) == grid.n_points and np.isclose(
            self.momentum_spacing, grid.momentum_spacing, rtol=1e-12, atol=0.0
        )


@dataclass(frozen=True, eq=False)
class SurfaceWaveFunction:
    """Position amplitudes psi(x_j) on a flat hyperplane"""

    grid: SpatialGrid
    hyperplane: HyperplaneLabel
    amplitudes: np.ndarray
    mass: float = 1.0
    dispersion: Dispersion = RELATIVISTIC

    def __post_init__(self):
        _check_dispersion(self.dispersion)
        amplitudes = np.array(self.amplitudes, dtype=complex)
        if amplitudes.shape != (self.grid.n_points,):
            raise ValueError(
                f"Expected {self.grid.n_points} amplitudes, got shape {amplitudes.shape}"
            )
        object.__setattr__(self, "amplitudes", _readonly(amplitudes))

    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.density()) * self.grid.spacing))

    def mean_position(self) -> float:
        density = self.density()
        return float(np.sum(self.grid.x * density) / np.sum(density))

    def width(self) -> float:
        """Standard deviation of the position density"""
        density = self.density()
        density = density / np.sum(density)
        mean = np.sum(self.grid.x * density)
        return float(np.sqrt(np.sum((self.grid.x - mean) ** 2 * density)))

    def momentum_amplitudes(self) -> np.ndarray:
        """Frame momentum amplitudes on `grid.momenta`"""
        return _to_momentum(self.amplitudes, self.grid)

    def mean_momentum(self) -> float:
        weights = np.abs(self.momentum_amplitudes()) ** 2
        return float(np.sum(self.grid.momenta * weights) / np.sum(weights))

    def with_amplitudes(self, amplitudes: np.ndarray) -> SurfaceWaveFunction:
        return replace(self, amplitudes=amplitudes)


def _to_momentum(values: np.ndarray, grid: SpatialGrid) -> np.ndarray:
    """g(p_k) = dx / sqrt(2 pi) sum_j psi_j exp(-i p_k x_j), along the last axis"""
    phase = np.exp(-1j * grid.momenta * grid.x_min)
    return np.fft.fft(values, axis=-1) * phase * grid.spacing / np.sqrt(2.0 * np.pi)


def _to_position(g: np.ndarray, grid: SpatialGrid) -> np.ndarray:
    """Inverse of `_to_momentum`"""
    phase = np.exp(1j * grid.momenta * grid.x_min)
    return np.fft.ifft(g * phase, axis=-1) * np.sqrt(2.0 * np.pi) / grid.spacing


def _dtft(values: np.ndarray, grid: SpatialGrid, q: np.ndarray) -> np.ndarray:
    """Band-limited momentum amplitude of grid samples at arbitrary momenta"""
    kernel = np.exp(-1j * np.outer(q, grid.x))
    result = kernel @ values * grid.spacing / np.sqrt(2.0 * np.pi)
    result[np.abs(q) >= grid.nyquist] = 0.0
    return result


def _amplitude_at(phi: CovariantAmplitude, q: np.ndarray) -> np.ndarray:
    """Trigonometric interpolation of phi at off-lattice momenta q"""
    anchor = phi.anchor
    p = phi.momenta
    n = len(p)
    centred = phi.amplitudes * np.exp(-1j * (phi.energies * anchor.t - p * anchor.x))
    dual = SpatialGrid(
        -np.pi / phi.momentum_spacing, 2.0 * np.pi / (n * phi.momentum_spacing), n
    )
    coefficients = np.fft.ifft(centred * np.exp(1j * p * dual.x_min))
    values = np.exp(-1j * np.outer(q, dual.x)) @ coefficients
    values[np.abs(q) >= dual.nyquist] = 0.0
    q_energy = energy(q, phi.mass, phi.dispersion)
    return values * np.exp(1j * (q_energy * anchor.t - q * anchor.x))


def _check_band(g: np.ndarray, grid: SpatialGrid, expected: float | None) -> None:
    weights = np.abs(g) ** 2 * grid.momentum_spacing
    total = float(np.sum(weights))
    if total <= NULL_NORM:
        raise ValueError("null state")
    if expected is not None and abs(total / expected - 1.0) > RESOLUTION_TOLERANCE:
        raise ValueError(
            f"under-resolved: {abs(total / expected - 1.0):.3e} of the norm "
            "falls outside the grid band"
        )
    edge = np.abs(grid.momenta) > BAND_FRACTION * grid.nyquist
    leak = float(np.sum(weights[edge])) / total
    if leak > RESOLUTION_TOLERANCE:
        raise ValueError(
            f"under-resolved: {leak:.3e} of the spectral weight sits near Nyquist"
        )


def _check_seam(values: np.ndarray, grid: SpatialGrid) -> None:
    density = np.abs(values) ** 2
    total = float(np.sum(density))
    guard = max(1, int(grid.n_points * SEAM_FRACTION))
    outer = float(np.sum(density[:guard]) + np.sum(density[-guard:]))
    if total > 0.0 and outer / total > SEAM_TOLERANCE:
        raise ValueError(
            f"packet touches periodic seam: {outer / total:.3e} of the norm "
            f"within {guard} points of the window edge"
        )


def _require_lattice(phi: CovariantAmplitude, grid: SpatialGrid) -> None:
    if not phi.on_lattice(grid):
        raise ValueError(
            "incompatible states: grid momentum lattice "
            f"({grid.n_points}, dp={grid.momentum_spacing:.6g}) does not match "
            f"the amplitude ({len(phi.momenta)}, dp={phi.momentum_spacing:.6g})"
        )


def _require_boostable(dispersion: Dispersion, rapidity: float) -> None:
    if rapidity != 0.0 and dispersion == NONRELATIVISTIC:
        raise ValueError("boost undefined for Galilean mode")


def surface_values(
    phi: CovariantAmplitude,
    sigma: HyperplaneLabel,
    grid: SpatialGrid,
    check_seam: bool = True,
) -> np.ndarray:
    """Unnormalized position amplitudes of phi on sigma, sampled on `grid`"""
    _require_lattice(phi, grid)
    _require_boostable(phi.dispersion, sigma.rapidity)
    p_frame = grid.momenta
    e_frame = energy(p_frame, phi.mass, phi.dispersion)
    if sigma.rapidity == 0.0:
        amplitudes = phi.amplitudes
    else:
        ch, sh = np.cosh(sigma.rapidity), np.sinh(sigma.rapidity)
        amplitudes = _amplitude_at(phi, p_frame * ch + e_frame * sh)
    g = (
        amplitudes
        * np.exp(-1j * e_frame * sigma.time)
        / _measure_factor(e_frame, phi.dispersion)
    )
    norm_sq = phi.norm() ** 2
    if norm_sq <= NULL_NORM:
        raise ValueError("null state")
    _check_band(g, grid, expected=norm_sq)
    values = _to_position(g, grid)
    if check_seam:
        _check_seam(values, grid)
    return values


def lift_values(
    values: np.ndarray,
    sigma: HyperplaneLabel,
    grid: SpatialGrid,
    mass: float = 1.0,
    dispersion: Dispersion = RELATIVISTIC,
) -> CovariantAmplitude:
    """Unnormalized covariant amplitude of position samples on sigma"""
    _require_boostable(dispersion, sigma.rapidity)
    values = np.asarray(values, dtype=complex)
    norm_sq = float(np.sum(np.abs(values) ** 2) * grid.spacing)
    if norm_sq <= NULL_NORM:
        raise ValueError("null state")
    _check_seam(values, grid)
    g_frame = _to_momentum(values, grid)
    _check_band(g_frame, grid, expected=None)

    p_lab = grid.momenta
    e_lab = energy(p_lab, mass, dispersion)
    if sigma.rapidity == 0.0:
        g, e_frame = g_frame, e_lab
    else:
        ch, sh = np.cosh(sigma.rapidity), np.sinh(sigma.rapidity)
        p_frame = p_lab * ch - e_lab * sh
        e_frame = e_lab * ch - p_lab * sh
        g = _dtft(values, grid, p_frame)

    amplitudes = g * np.exp(1j * e_frame * sigma.time) * _measure_factor(
        e_frame, dispersion
    )
    density = np.abs(values) ** 2
    centre = float(np.sum(grid.x * density) / np.sum(density))
    phi = CovariantAmplitude(
        p_lab, amplitudes, mass, dispersion, anchor=sigma.point_at(centre)
    )
    deficit = abs(phi.norm() ** 2 / norm_sq - 1.0)
    if deficit > RESOLUTION_TOLERANCE:
        raise ValueError(
            f"under-resolved: {deficit:.3e} of the norm lost in the frame change"
        )
    return phi


def normalize(state):
    """Scale a surface wavefunction or covariant amplitude to unit norm"""
    norm = state.norm()
    if not np.isfinite(norm) or norm <= NULL_NORM:
        raise ValueError("null state")
    return state.with_amplitudes(state.amplitudes / norm)


def grid_for(
    phi: CovariantAmplitude, center: float = 0.0, periodic: bool = True
) -> SpatialGrid:
    """Position window dual to phi's momentum lattice, centred at `center`"""
    n = len(phi.momenta)
    spacing = 2.0 * np.pi / (n * phi.momentum_spacing)
    return SpatialGrid(center - n * spacing / 2.0, spacing, n, periodic)


def restrict(
    phi: CovariantAmplitude,
    sigma: HyperplaneLabel,
    grid: SpatialGrid | None = None,
) -> SurfaceWaveFunction:
    """Normalized wavefunction of phi on the hyperplane sigma.

    Args:
        phi (CovariantAmplitude): State to restrict
        sigma (HyperplaneLabel): Target hyperplane
        grid (SpatialGrid, optional): Frame-coordinate window; defaults to the
            window of phi's lattice centred on phi's anchor

    Returns:
        SurfaceWaveFunction: Newton-Wigner wavefunction on sigma
    """
    if grid is None:
        grid = grid_for(phi, sigma.frame_position(phi.anchor))
    values = surface_values(phi, sigma, grid)
    return normalize(
        SurfaceWaveFunction(grid, sigma, values, phi.mass, phi.dispersion)
    )


def lift(psi: SurfaceWaveFunction) -> CovariantAmplitude:
    """Covariant amplitude whose restriction to psi's hyperplane is psi"""
    return normalize(
        lift_values(
            psi.amplitudes, psi.hyperplane, psi.grid, psi.mass, psi.dispersion
        )
    )


def boost_state(psi: SurfaceWaveFunction, rapidity: float) -> SurfaceWaveFunction:
    """Re-express psi in the frame boosted by `rapidity` relative to psi's frame.

    The new hyperplane passes through the event where psi's hyperplane
    crosses the lab position x = 0, which makes boosts compose and invert
    on labels as well as on states.
    """
    if psi.dispersion == NONRELATIVISTIC:
        raise ValueError("boost undefined for Galilean mode")
    if rapidity == 0.0:
        return psi
    sigma = psi.hyperplane
    pivot = SpacetimePoint(sigma.time / np.cosh(sigma.rapidity), 0.0)
    target = HyperplaneLabel.through(pivot, sigma.rapidity + rapidity)
    return restrict(lift(psi), target, psi.grid)


def translate(phi: CovariantAmplitude, shift: SpacetimePoint) -> CovariantAmplitude:
    """Rigidly move phi by the spacetime vector `shift`"""
    phase = np.exp(1j * (phi.energies * shift.t - phi.momenta * shift.x))
    return phi.with_amplitudes(phi.amplitudes * phase, anchor=phi.anchor + shift)


def resample(
    phi: CovariantAmplitude, grid: SpatialGrid, sigma: HyperplaneLabel = LAB
) -> CovariantAmplitude:
    """Move phi onto the momentum lattice of `grid` (same spacing, other box).

    The state is restricted to sigma on a window of its own lattice centred
    like `grid`, zero-padded or cropped, and lifted again.
    """
    source = grid_for(phi, grid.center)
    if not np.isclose(source.spacing, grid.spacing, rtol=1e-12, atol=0.0):
        raise ValueError(
            f"resample needs equal spacings, got {source.spacing} and {grid.spacing}"
        )
    values = surface_values(phi, sigma, source, check_seam=False)
    offset = int(round((source.x_min - grid.x_min) / grid.spacing))
    if offset >= 0:
        target = np.zeros(grid.n_points, dtype=complex)
        target[offset : offset + source.n_points] = values
    else:
        target = values[-offset : -offset + grid.n_points]
        dropped = 1.0 - np.sum(np.abs(target) ** 2) / np.sum(np.abs(values) ** 2)
        if dropped > SEAM_TOLERANCE:
            raise ValueError(
                f"packet touches periodic seam: cropping drops {dropped:.3e} of the norm"
            )
    return normalize(lift_values(target, sigma, grid, phi.mass, phi.dispersion))


def lab_slices(
    phi: CovariantAmplitude, times: np.ndarray, grid: SpatialGrid
) -> np.ndarray:
    """Unnormalized position amplitudes on lab hyperplanes, one row per time"""
    _require_lattice(phi, grid)
    times = np.asarray(times, dtype=float)
    e = phi.energies
    g = phi.amplitudes / _measure_factor(e, phi.dispersion)
    return _to_position(g[None, :] * np.exp(-1j * np.outer(times, e)), grid)


def _require_same_surface(a: SurfaceWaveFunction, b: SurfaceWaveFunction) -> None:
    if a.grid != b.grid or a.hyperplane != b.hyperplane:
        raise ValueError("incompatible states")


def _require_same_lattice(a: CovariantAmplitude, b: CovariantAmplitude) -> None:
    if (
        len(a.momenta) != len(b.momenta)
        or not np.allclose(a.momenta, b.momenta, rtol=1e-12, atol=1e-12)
        or a.mass != b.mass
        or a.dispersion != b.dispersion
    ):
        raise ValueError("incompatible states")


def inner(a: SurfaceWaveFunction, b: SurfaceWaveFunction) -> complex:
    """<a|b> on a common grid and hyperplane"""
    _require_same_surface(a, b)
    return complex(np.sum(np.conj(a.amplitudes) * b.amplitudes) * a.grid.spacing)


def covariant_inner(a: CovariantAmplitude, b: CovariantAmplitude) -> complex:
    """<a|b> in the invariant measure"""
    _require_same_lattice(a, b)
    return complex(np.sum(np.conj(a.amplitudes) * b.amplitudes * a.measure))


def distance(a, b) -> float:
    """Norm distance between two surface states or two covariant amplitudes"""
    difference = np.abs(a.amplitudes - b.amplitudes) ** 2
    if isinstance(a, CovariantAmplitude):
        _require_same_lattice(a, b)
        return float(np.sqrt(np.sum(difference * a.measure)))
    _require_same_surface(a, b)
    return float(np.sqrt(np.sum(difference) * a.grid.spacing))


def fidelity(a, b) -> float:
    """|<a|b>|^2 / (<a|a><b|b>)"""
    overlap = covariant_inner(a, b) if isinstance(a, CovariantAmplitude) else inner(a, b)
    return float(abs(overlap) ** 2 / (a.norm() ** 2 * b.norm() ** 2))


def gaussian_packet(
    grid: SpatialGrid,
    center: float = 0.0,
    width: float = 4.0,
    momentum: float = 0.0,
    *,
    hyperplane: HyperplaneLabel = LAB,
    mass: float = 1.0,
    dispersion: Dispersion = RELATIVISTIC,
) -> SurfaceWaveFunction:
    """Normalized Gaussian with position standard deviation `width`"""
    if not width > 0.0:
        raise ValueError(f"Packet width must be positive, got {width}")
    offset = grid.x - center
    values = np.exp(-(offset**2) / (4.0 * width**2) + 1j * momentum * offset)
    return normalize(SurfaceWaveFunction(grid, hyperplane, values, mass, dispersion))


def covariant_packet(
    grid: SpatialGrid,
    center: float = 0.0,
    width: float = 4.0,
    rapidity: float = 0.0,
    *,
    mass: float = 1.0,
    dispersion: Dispersion = RELATIVISTIC,
) -> CovariantAmplitude:
    """Gaussian prepared on the lab hyperplane t = 0 with mean momentum m sinh(rapidity)"""
    momentum = mass * np.sinh(rapidity)
    return lift(
        gaussian_packet(
            grid, center, width, momentum, mass=mass, dispersion=dispersion
        )
    )
