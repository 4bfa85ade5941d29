"""GRW localization operator, its transport between hyperplanes and the
microcausality diagnostic."""

from dataclasses import dataclass

import numpy as np

from collapsim.hilbert import (
    NULL_NORM,
    CovariantAmplitude,
    HyperplaneLabel,
    SpacetimePoint,
    SpatialGrid,
    SurfaceWaveFunction,
    covariant_inner,
    grid_for,
    lift,
    lift_values,
    restrict,
    surface_values,
)


def kernel_profile(x: np.ndarray, center: float, alpha: float) -> np.ndarray:
    """(alpha/pi)^(1/4) exp(-alpha (x - center)^2 / 2)"""
    offset = np.asarray(x, dtype=float) - center
    return (alpha / np.pi) ** 0.25 * np.exp(-0.5 * alpha * offset**2)


@dataclass(frozen=True)
class CollapseKernel:
    """Gaussian localization around `center` on a constant-time hyperplane of `frame`"""

    center: float
    alpha: float
    frame: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0.0 or not np.isfinite(self.alpha):
            raise ValueError(f"alpha must be positive, got {self.alpha}")

    @classmethod
    def at(
        cls, point: SpacetimePoint, alpha: float, frame: float = 0.0
    ) -> "CollapseKernel":
        """Kernel centred on `point` as seen in the frame of rapidity `frame`"""
        return cls(point.in_frame(frame).x, alpha, frame)

    @property
    def width(self) -> float:
        return 1.0 / np.sqrt(self.alpha)

    def profile(self, x: np.ndarray) -> np.ndarray:
        return kernel_profile(x, self.center, self.alpha)


def _check_kernel_resolution(grid: SpatialGrid, alpha: float) -> None:
    if 1.0 / np.sqrt(alpha) < 2.0 * grid.spacing:
        raise ValueError(
            f"under-resolved: collapse width {1.0 / np.sqrt(alpha):.4g} is below "
            f"two grid spacings ({2.0 * grid.spacing:.4g})"
        )


def apply_collapse(
    psi: SurfaceWaveFunction, kernel: CollapseKernel
) -> tuple[SurfaceWaveFunction, float]:
    """Localize psi with the kernel; returns the normalized state and Born weight"""
    if psi.hyperplane.rapidity != kernel.frame:
        raise ValueError(
            f"kernel frame {kernel.frame} does not match hyperplane rapidity "
            f"{psi.hyperplane.rapidity}; use transported_collapse"
        )
    _check_kernel_resolution(psi.grid, kernel.alpha)
    collapsed = psi.amplitudes * kernel.profile(psi.grid.x)
    weight = float(np.sum(np.abs(collapsed) ** 2) * psi.grid.spacing)
    if weight < NULL_NORM:
        raise ValueError("collapse onto null support")
    return psi.with_amplitudes(collapsed / np.sqrt(weight)), weight


def transported_collapse(
    phi: CovariantAmplitude,
    point: SpacetimePoint,
    kernel: CollapseKernel,
    grid: SpatialGrid | None = None,
) -> tuple[CovariantAmplitude, float]:
    """Collapse phi at the event `point` on the kernel frame's hyperplane through it.

    The returned amplitude is the post-collapse state on every flat
    hyperplane through `point` at once.
    """
    sigma = HyperplaneLabel.through(point, kernel.frame)
    position = sigma.frame_position(point)
    if abs(position - kernel.center) > 1e-9 * max(1.0, abs(position)):
        raise ValueError(
            f"collapse point at frame position {position} does not match the "
            f"kernel centre {kernel.center}"
        )
    if grid is None:
        grid = grid_for(phi, position)
    psi = restrict(phi, sigma, grid)
    collapsed, weight = apply_collapse(psi, kernel)
    return lift(collapsed), weight


def collapse_on_hyperplane(
    view: SurfaceWaveFunction, point: SpacetimePoint, kernel: CollapseKernel
) -> tuple[SurfaceWaveFunction, float]:
    """Post-collapse state at `point`, seen on the hyperplane of `view`"""
    phi, weight = transported_collapse(lift(view), point, kernel)
    return restrict(phi, view.hyperplane, view.grid), weight


def collapse_operator(
    phi: CovariantAmplitude, point: SpacetimePoint, alpha: float, frame: float = 0.0
) -> CovariantAmplitude:
    """Unnormalized action of the transported collapse operator L(point) on phi"""
    sigma = HyperplaneLabel.through(point, frame)
    position = sigma.frame_position(point)
    grid = grid_for(phi, position)
    _check_kernel_resolution(grid, alpha)
    values = surface_values(phi, sigma, grid) * kernel_profile(grid.x, position, alpha)
    return lift_values(values, sigma, grid, phi.mass, phi.dispersion)


def microcausality_defect(
    phi: CovariantAmplitude,
    x1: SpacetimePoint,
    x2: SpacetimePoint,
    alpha: float,
    frame: float = 0.0,
) -> float:
    """|| (L1 L2 - L2 L1) phi || for collapse operators at space-like events"""
    if not x1.is_spacelike(x2):
        raise ValueError("requires space-like separation")
    first = collapse_operator(collapse_operator(phi, x2, alpha, frame), x1, alpha, frame)
    second = collapse_operator(
        collapse_operator(phi, x1, alpha, frame), x2, alpha, frame
    )
    difference = first.with_amplitudes(first.amplitudes - second.amplitudes)
    return float(np.sqrt(max(covariant_inner(difference, difference).real, 0.0)))
