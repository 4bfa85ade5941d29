import numpy as np
import pytest

from collapsim.flash import FlashEvent
from collapsim.grw import collapse_location_pdf, grw_step, simulate_grw
from collapsim.hilbert import (
    LAB,
    NONRELATIVISTIC,
    SpatialGrid,
    covariant_packet,
    gaussian_packet,
    lift,
    normalize,
    restrict,
)


@pytest.fixture
def grid():
    return SpatialGrid.centered(0.0, 200.0, 1024)


class TestCollapseLocationPdf:
    """Test the distribution of GRW collapse centres"""

    @pytest.mark.parametrize("center,width", [(0.0, 1.0), (-20.0, 4.0), (30.0, 0.5)])
    def test_normalized(self, grid, center, width):
        psi = gaussian_packet(grid, center, width, dispersion=NONRELATIVISTIC)
        pdf = collapse_location_pdf(psi, 1.0 / 32.0)
        assert np.sum(pdf) * grid.spacing == pytest.approx(1.0, abs=1e-9)

    def test_cat_has_two_peaks(self, grid):
        left = gaussian_packet(grid, -40.0, 2.0)
        right = gaussian_packet(grid, 40.0, 2.0)
        cat = normalize(left.with_amplitudes(left.amplitudes + right.amplitudes))
        pdf = collapse_location_pdf(cat, 1.0)
        assert np.sum(pdf[grid.x < 0.0]) * grid.spacing == pytest.approx(0.5, abs=1e-6)
        assert pdf[np.argmin(np.abs(grid.x))] < 1e-12

    def test_variance_adds_kernel_width(self, grid):
        alpha = 0.5
        psi = gaussian_packet(grid, 3.0, 2.0)
        pdf = collapse_location_pdf(psi, alpha)
        mean = np.sum(grid.x * pdf) / np.sum(pdf)
        variance = np.sum((grid.x - mean) ** 2 * pdf) / np.sum(pdf)
        assert mean == pytest.approx(3.0, abs=1e-6)
        assert variance == pytest.approx(4.0 + 1.0 / (2.0 * alpha), rel=1e-6)


class TestGrwStep:
    """Test single GRW collapses"""

    def test_relativistic_state_rejected(self, grid):
        phi = covariant_packet(grid)
        with pytest.raises(ValueError, match="nonrelativistic dispersion"):
            grw_step(phi, FlashEvent.seed(), 1.0, 0.01, np.random.default_rng(0))

    def test_event_is_later_in_lab_time(self, grid):
        phi = covariant_packet(grid, 0.0, 4.0, dispersion=NONRELATIVISTIC)
        event, state = grw_step(phi, FlashEvent.seed(), 1.0, 0.01, np.random.default_rng(0))
        assert event.t == pytest.approx(event.delta_T)
        assert event.index == 1
        assert state.norm() == pytest.approx(1.0)
        assert state.dispersion == NONRELATIVISTIC


class TestSimulateGrw:
    """Test GRW collapse chains"""

    def test_chain(self, grid):
        phi = covariant_packet(grid, 0.0, 4.0, dispersion=NONRELATIVISTIC)
        chain = simulate_grw(phi, n=4, tau=1.0, alpha=0.01, rng_seed=2)
        assert chain.error is None
        assert len(chain) == 4
        assert np.allclose(chain.coordinate_intervals(), [e.delta_T for e in chain.events])

    def test_collapse_localizes_cat(self, grid):
        left = gaussian_packet(grid, -40.0, 2.0, dispersion=NONRELATIVISTIC)
        right = gaussian_packet(grid, 40.0, 2.0, dispersion=NONRELATIVISTIC)
        cat = normalize(left.with_amplitudes(left.amplitudes + right.amplitudes))
        chain = simulate_grw(lift(cat), n=1, tau=0.01, alpha=1.0, rng_seed=4)
        final = restrict(chain.final_state, LAB, grid)
        density = final.density()
        on_left = np.sum(density[grid.x < 0.0]) / np.sum(density)
        assert min(on_left, 1.0 - on_left) < 1e-8

    def test_negative_count(self, grid):
        phi = covariant_packet(grid, dispersion=NONRELATIVISTIC)
        with pytest.raises(ValueError, match="non-negative"):
            simulate_grw(phi, n=-1)
