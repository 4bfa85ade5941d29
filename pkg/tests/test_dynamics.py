import numpy as np
import pytest
from numpy.testing import assert_allclose

from collapsim.dynamics import Propagator, covariance_defect, evolve, frame_momenta
from collapsim.hilbert import (
    NONRELATIVISTIC,
    HyperplaneLabel,
    SpatialGrid,
    covariant_packet,
    distance,
    energy,
    gaussian_packet,
    lift,
    restrict,
    surface_values,
)


@pytest.fixture
def grid():
    return SpatialGrid.centered(0.0, 200.0, 1024)


@pytest.fixture
def phi(grid):
    return covariant_packet(grid, 2.0, 4.0, rapidity=0.3)


class GalileanEnergy(Propagator):
    """Relativistic states propagated with the wrong dispersion"""

    def energy(self, p):
        return energy(p, self.mass, NONRELATIVISTIC)


class TestEvolve:
    """Test free evolution between parallel hyperplanes"""

    def test_zero_step_is_identity(self, phi):
        assert evolve(phi, HyperplaneLabel.lab(1.0), HyperplaneLabel.lab(1.0)) is phi

    def test_pullback(self, phi, grid):
        start, end = HyperplaneLabel.lab(0.0), HyperplaneLabel.lab(5.0)
        evolved = evolve(phi, start, end)
        assert_allclose(
            surface_values(evolved, start, grid),
            surface_values(phi, end, grid),
            atol=1e-12,
        )

    def test_norm_preserved(self, phi):
        evolved = evolve(phi, HyperplaneLabel.lab(0.0), HyperplaneLabel.lab(20.0))
        assert evolved.norm() == pytest.approx(phi.norm(), rel=1e-12)

    @pytest.mark.parametrize("seed", range(10))
    def test_norm_preserved_random(self, grid, seed):
        rng = np.random.default_rng(seed)
        phi = covariant_packet(
            grid, rng.uniform(-20.0, 20.0), rng.uniform(1.0, 6.0), rng.uniform(-1.0, 1.0)
        )
        rapidity = rng.uniform(-0.5, 0.5)
        start = HyperplaneLabel(rapidity, 0.0)
        end = HyperplaneLabel(rapidity, rng.uniform(1.0, 30.0))
        assert evolve(phi, start, end).norm() == pytest.approx(phi.norm(), rel=1e-12)

    def test_composition(self, phi):
        a, b, c = (HyperplaneLabel.lab(t) for t in (0.0, 4.0, 11.0))
        stepped = evolve(evolve(phi, a, b), b, c)
        assert distance(stepped, evolve(phi, a, c)) < 1e-10

    def test_galilean_spreading(self, grid):
        psi = gaussian_packet(grid, width=2.0, dispersion=NONRELATIVISTIC)
        evolved = evolve(lift(psi), HyperplaneLabel.lab(0.0), HyperplaneLabel.lab(10.0))
        width = restrict(evolved, HyperplaneLabel.lab(0.0), grid).width()
        expected = 2.0 * np.sqrt(1.0 + (10.0 / (2.0 * 2.0**2)) ** 2)
        assert width == pytest.approx(expected, rel=1e-6)

    def test_rapidities_must_match(self, phi):
        with pytest.raises(ValueError, match="parallel hyperplanes"):
            evolve(phi, HyperplaneLabel(0.0, 0.0), HyperplaneLabel(0.5, 1.0))

    def test_frame_momenta(self, phi):
        assert frame_momenta(phi, 0.0) is phi.momenta
        boosted = frame_momenta(phi, 0.4)
        assert_allclose(
            boosted, phi.momenta * np.cosh(0.4) - phi.energies * np.sinh(0.4)
        )


class TestCovarianceDefect:
    """Test the boost/evolution commutation check"""

    @pytest.mark.parametrize("rapidity", [-0.7, 0.2, 0.8])
    def test_free_dynamics_commutes(self, phi, rapidity):
        defect = covariance_defect(
            phi, HyperplaneLabel.lab(0.0), HyperplaneLabel.lab(5.0), rapidity
        )
        assert defect <= 1e-8

    def test_wrong_dispersion_detected(self, phi):
        defect = covariance_defect(
            phi,
            HyperplaneLabel.lab(0.0),
            HyperplaneLabel.lab(5.0),
            0.5,
            GalileanEnergy(mass=phi.mass),
        )
        assert defect > 1e-3

    def test_galilean_state(self, grid):
        psi = lift(gaussian_packet(grid, dispersion=NONRELATIVISTIC))
        with pytest.raises(ValueError, match="boost undefined for Galilean mode"):
            covariance_defect(psi, HyperplaneLabel.lab(0.0), HyperplaneLabel.lab(1.0), 0.1)
