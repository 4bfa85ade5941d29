"""Free evolution between parallel hyperplanes and the unitary covariance check."""

from dataclasses import dataclass

import numpy as np

from collapsim.hilbert import (
    RELATIVISTIC,
    CovariantAmplitude,
    Dispersion,
    HyperplaneLabel,
    SpacetimePoint,
    boost_state,
    distance,
    energy,
    grid_for,
    lift,
    restrict,
)


@dataclass(frozen=True)
class Propagator:
    """Diagonal free propagator exp(-i (E a_t - p a_x)) in momentum space.

    Subclasses may override `energy` to model a different (or deliberately
    wrong) dispersion; every evolution in this module goes through it.
    """

    dispersion: Dispersion = RELATIVISTIC
    mass: float = 1.0

    @classmethod
    def for_state(cls, phi: CovariantAmplitude) -> "Propagator":
        return cls(phi.dispersion, phi.mass)

    def energy(self, p: np.ndarray) -> np.ndarray:
        return energy(p, self.mass, self.dispersion)

    def phase(self, p: np.ndarray, dt: float, dx: float = 0.0) -> np.ndarray:
        """Phase for a translation by (dt, dx) of a mode with momentum p"""
        return np.exp(-1j * (self.energy(p) * dt - p * dx))


def frame_momenta(phi: CovariantAmplitude, rapidity: float) -> np.ndarray:
    """Momenta of phi's lattice modes measured in the frame of `rapidity`"""
    if rapidity == 0.0:
        return phi.momenta
    return phi.momenta * np.cosh(rapidity) - phi.energies * np.sinh(rapidity)


def evolve(
    phi: CovariantAmplitude,
    start: HyperplaneLabel,
    end: HyperplaneLabel,
    propagator: Propagator | None = None,
) -> CovariantAmplitude:
    """Amplitude whose view on `start` is phi's view on `end`.

    Schroedinger picture: the state found on `end` is pulled back to
    `start`, so restrict(evolve(phi, a, b), a) == restrict(phi, b).
    Both hyperplanes must belong to the same frame.
    """
    if start.rapidity != end.rapidity:
        raise ValueError(
            "evolution is defined between parallel hyperplanes, got rapidities "
            f"{start.rapidity} and {end.rapidity}"
        )
    dt = end.time - start.time
    if dt == 0.0:
        return phi
    propagator = propagator or Propagator.for_state(phi)
    rapidity = start.rapidity
    p_frame = frame_momenta(phi, rapidity)
    shift = SpacetimePoint.from_frame(-dt, 0.0, rapidity)
    return phi.with_amplitudes(
        phi.amplitudes * propagator.phase(p_frame, dt), anchor=phi.anchor + shift
    )


def covariance_defect(
    phi: CovariantAmplitude,
    sigma_1: HyperplaneLabel,
    sigma_2: HyperplaneLabel,
    rapidity: float,
    propagator: Propagator | None = None,
) -> float:
    """Distance between "boost then evolve" and "evolve then boost".

    Path A boosts the view on sigma_1 by `rapidity` and translates it in the
    boosted frame by the image of the sigma_1 -> sigma_2 time step. Path B
    evolves in the original frame and boosts afterwards. Both end on the
    same boosted hyperplane.
    """
    if phi.dispersion != RELATIVISTIC:
        raise ValueError("boost undefined for Galilean mode")
    if sigma_1.rapidity != sigma_2.rapidity:
        raise ValueError("covariance check needs parallel hyperplanes")
    propagator = propagator or Propagator.for_state(phi)
    base = sigma_1.rapidity
    grid = grid_for(phi, sigma_1.frame_position(phi.anchor))
    view = restrict(phi, sigma_1, grid)
    dt = sigma_2.time - sigma_1.time

    boosted = boost_state(view, rapidity)
    lifted = lift(boosted)
    p_boosted = frame_momenta(lifted, base + rapidity)
    step_t, step_x = dt * np.cosh(rapidity), -dt * np.sinh(rapidity)
    path_a = restrict(
        lifted.with_amplitudes(
            lifted.amplitudes * propagator.phase(p_boosted, step_t, step_x)
        ),
        boosted.hyperplane,
        boosted.grid,
    )

    lifted = lift(view)
    p_frame = frame_momenta(lifted, base)
    evolved = restrict(
        lifted.with_amplitudes(lifted.amplitudes * propagator.phase(p_frame, dt)),
        sigma_1,
        grid,
    )
    path_b = boost_state(evolved, rapidity)
    return distance(path_a, path_b)
