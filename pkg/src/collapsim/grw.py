"""Original nonrelativistic GRW dynamics on lab hyperplanes.

Collapses arrive as a Poisson process in lab time; between them the state
evolves freely under the Schroedinger dispersion; at a collapse the centre
is drawn from p(x_c) = ||L(x_c) psi||^2 and the state is localized there.
"""

import numpy as np
import scipy.signal
from loguru import logger

from collapsim.collapse import CollapseKernel, apply_collapse, kernel_profile
from collapsim.flash import FlashChain, FlashEvent, sample_interval
from collapsim.hilbert import (
    NONRELATIVISTIC,
    CovariantAmplitude,
    HyperplaneLabel,
    SurfaceWaveFunction,
    grid_for,
    lift,
    restrict,
)


def collapse_location_pdf(psi: SurfaceWaveFunction, alpha: float) -> np.ndarray:
    """Density of collapse centres over the grid points of psi.

    Integrates to one (sum times spacing) for states supported away from the
    window edges.
    """
    grid = psi.grid
    half = grid.n_points // 2
    offsets = grid.spacing * np.arange(-half, half + 1)
    kernel = kernel_profile(offsets, 0.0, alpha) ** 2
    pdf = scipy.signal.fftconvolve(psi.density(), kernel, mode="same") * grid.spacing
    return np.clip(pdf, 0.0, None)


def grw_step(
    phi: CovariantAmplitude,
    previous: FlashEvent,
    tau: float,
    alpha: float,
    rng: np.random.Generator,
) -> tuple[FlashEvent, CovariantAmplitude]:
    if phi.dispersion != NONRELATIVISTIC:
        raise ValueError("GRW chains use the nonrelativistic dispersion")
    dt = float(sample_interval(tau, rng))
    time = previous.t + dt
    psi = restrict(phi, HyperplaneLabel.lab(time), grid_for(phi, previous.x))

    pdf = collapse_location_pdf(psi, alpha)
    probabilities = pdf / np.sum(pdf)
    cell = int(rng.choice(psi.grid.n_points, p=probabilities))
    half = psi.grid.spacing / 2.0
    center = float(psi.grid.x[cell] + rng.uniform(-half, half))

    collapsed, weight = apply_collapse(psi, CollapseKernel(center, alpha))
    event = FlashEvent(time, center, dt, previous.index + 1)
    logger.debug("GRW collapse {} at ({:.4g}, {:.4g})", event.index, time, center)
    return event, lift(collapsed)


def simulate_grw(
    initial: CovariantAmplitude,
    seed_event: FlashEvent | None = None,
    n: int = 1,
    tau: float = 1.0,
    alpha: float = 0.01,
    rng_seed: int = 0,
) -> FlashChain:
    """Chain of `n` GRW collapses; `delta_T` holds the lab waiting times"""
    if n < 0:
        raise ValueError(f"Number of collapses must be non-negative, got {n}")
    seed_event = seed_event or FlashEvent.seed()
    rng = np.random.default_rng(rng_seed)
    chain = FlashChain(seed_event, rng_seed=rng_seed)
    state, previous = initial, seed_event
    for step in range(n):
        try:
            previous, state = grw_step(state, previous, tau, alpha, rng)
        except ValueError as e:
            chain.error = f"step {step + 1}: {e}"
            logger.warning("GRW chain {} truncated at {}", rng_seed, chain.error)
            break
        chain.events.append(previous)
    chain.final_state = state
    return chain
