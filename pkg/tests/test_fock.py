import math

import numpy as np
import pytest
import scipy.sparse

from collapsim.fock import (
    BlobSpec,
    FockBasis,
    FockVector,
    annihilation_matrix,
    blob_sites,
    branch_state,
    collapse_J,
    creation_apply,
    creation_matrix,
    fock_basis,
    initial_superposition,
    light_cone_time,
    macro_failure_report,
    mode_schmidt_coefficients,
    number_op,
    object_centroid,
    vacuum,
)


@pytest.fixture(scope="module")
def report():
    return macro_failure_report()


class TestFockBasis:
    """Test occupation-number bases"""

    def test_dimension(self):
        assert fock_basis(32, 4).dimension == math.comb(32, 4)

    def test_lexicographic_order(self):
        basis = FockBasis(4, 2)
        assert basis.masks.tolist() == [0b0011, 0b0101, 0b1001, 0b0110, 0b1010, 0b1100]

    def test_index_of(self):
        basis = fock_basis(10, 3)
        order = np.random.default_rng(0).permutation(basis.dimension)
        assert np.array_equal(basis.index_of(basis.masks[order]), order)

    def test_positions(self):
        assert fock_basis(4, 1).positions.tolist() == [-2, -1, 0, 1]

    def test_too_many_modes(self):
        with pytest.raises(ValueError, match="n_modes"):
            FockBasis(65, 1)

    def test_too_many_fermions(self):
        with pytest.raises(ValueError, match="n_fermions"):
            FockBasis(4, 5)

    def test_cached(self):
        assert fock_basis(8, 2) is fock_basis(8, 2)


class TestLadderOperators:
    """Test canonical anticommutation relations"""

    @pytest.mark.parametrize("n_fermions", [1, 2])
    def test_anticommutator(self, n_fermions):
        n_modes = 4
        dimension = fock_basis(n_modes, n_fermions).dimension
        for i in range(n_modes):
            for j in range(n_modes):
                anti = (
                    annihilation_matrix(n_modes, n_fermions + 1, i)
                    @ creation_matrix(n_modes, n_fermions, j)
                    + creation_matrix(n_modes, n_fermions - 1, j)
                    @ annihilation_matrix(n_modes, n_fermions, i)
                ).toarray()
                expected = np.eye(dimension) if i == j else np.zeros((dimension, dimension))
                assert np.allclose(anti, expected)

    @pytest.mark.parametrize("n_modes,n_fermions", [(16, 4), (20, 3)])
    def test_anticommutator_large_sector(self, n_modes, n_fermions):
        dimension = fock_basis(n_modes, n_fermions).dimension
        identity = scipy.sparse.identity(dimension, format="csr")
        rng = np.random.default_rng(11)
        pairs = [(int(i), int(i)) for i in rng.choice(n_modes, 4, replace=False)]
        pairs += [
            (int(i), int(j)) for i, j in (rng.choice(n_modes, 2, replace=False) for _ in range(8))
        ]
        for i, j in pairs:
            anti = annihilation_matrix(n_modes, n_fermions + 1, i) @ creation_matrix(
                n_modes, n_fermions, j
            ) + creation_matrix(n_modes, n_fermions - 1, j) @ annihilation_matrix(
                n_modes, n_fermions, i
            )
            expected = identity if i == j else 0.0 * identity
            assert abs(anti - expected).max() < 1e-12

    def test_creators_anticommute(self):
        for i in range(4):
            for j in range(4):
                anti = (
                    creation_matrix(4, 2, i) @ creation_matrix(4, 1, j)
                    + creation_matrix(4, 2, j) @ creation_matrix(4, 1, i)
                ).toarray()
                assert np.allclose(anti, 0.0)

    def test_pauli_exclusion(self):
        once = creation_apply(vacuum(6), 2)
        assert once.norm() == pytest.approx(1.0)
        assert creation_apply(once, 2).norm() == 0.0

    def test_ordering_sign(self):
        ab = creation_apply(creation_apply(vacuum(4), 1), 0)
        ba = creation_apply(creation_apply(vacuum(4), 0), 1)
        assert np.allclose(ab.amplitudes, -ba.amplitudes)

    def test_full_sector(self):
        full = FockVector(fock_basis(3, 3), np.ones(1))
        assert creation_apply(full, 1).norm() == 0.0

    def test_site_out_of_range(self):
        with pytest.raises(ValueError, match="outside"):
            creation_apply(vacuum(4), 4)

    def test_sector_mismatch(self):
        with pytest.raises(ValueError, match="different Fock sectors"):
            vacuum(4) + creation_apply(vacuum(4), 0)


class TestBlobs:
    """Test blob construction and scale checks"""

    def test_default_geometry(self):
        spec = BlobSpec()
        spec.validate(4)
        assert spec.centers == {"A1": -15, "A2": -7, "B1": 7, "B2": 15}
        assert blob_sites(-15, 2, 1, 32) == [0, 1]
        assert blob_sites(15, 2, 1, 32) == [30, 31]

    def test_odd_fermions(self):
        with pytest.raises(ValueError, match="even"):
            BlobSpec().validate(3)

    def test_blob_too_large(self):
        with pytest.raises(ValueError, match="blob size"):
            BlobSpec(r=2).validate(4)

    def test_objects_too_close(self):
        with pytest.raises(ValueError, match="r <= d/2"):
            BlobSpec(d=6).validate(4)

    def test_collapse_too_wide(self):
        with pytest.raises(ValueError, match="collapse width"):
            BlobSpec(alpha=0.5).validate(4)

    def test_blob_outside_lattice(self):
        with pytest.raises(ValueError, match="outside"):
            blob_sites(15, 2, 1, 16)

    def test_initial_superposition(self):
        psi = initial_superposition(BlobSpec(), 32, 4)
        assert psi.norm() == pytest.approx(1.0)
        assert np.count_nonzero(psi.amplitudes) == 4
        branch = branch_state(BlobSpec(), 32, 4, "A1", "B2")
        assert abs(branch.vdot(psi)) == pytest.approx(0.5)


class TestCollapse:
    """Test the smeared-number collapse operator"""

    def test_number_operators(self):
        psi = initial_superposition(BlobSpec(), 32, 4)
        total = number_op(psi.basis, -np.inf, np.inf) @ psi.amplitudes
        assert np.allclose(total, 4.0 * psi.amplitudes)
        left = number_op(psi.basis, -np.inf, 0.0) @ psi.amplitudes
        assert np.allclose(left, 2.0 * psi.amplitudes)

    def test_collapse_selects_blob(self):
        spec = BlobSpec()
        psi = initial_superposition(spec, 32, 4)
        collapsed, weight = collapse_J(psi, -7.0, spec.alpha)
        assert collapsed.norm() == pytest.approx(1.0)
        assert weight > 0.0
        kept = branch_state(spec, 32, 4, "A2", "B1")
        assert abs(kept.vdot(collapsed)) ** 2 == pytest.approx(0.5, abs=1e-9)

    def test_null_support(self):
        with pytest.raises(ValueError, match="null support"):
            collapse_J(vacuum(8), 0.0, 1.0)

    def test_product_has_rank_one(self):
        state = creation_apply(creation_apply(vacuum(8), 6), 1)
        coefficients = mode_schmidt_coefficients(state, 0.0)
        assert coefficients.tolist() == pytest.approx([1.0])


class TestMacroFailureReport:
    """Test the two-object macro-failure diagnostics"""

    def test_dimension_and_branches(self, report):
        assert report.dimension == 35960
        assert report.branch_count == 4

    def test_number_eigenvalues(self, report):
        assert report.total_number == pytest.approx(4.0)
        assert report.total_number_residual < 1e-12
        assert report.left_number == pytest.approx(2.0)
        assert report.left_number_residual < 1e-12
        assert report.outer_left_residual == pytest.approx(1.0)

    def test_object1_localized(self, report):
        assert report.collapse_center == -7.0
        assert report.fidelity >= 1.0 - 1e-9
        assert report.suppressed_amplitude < 1e-6

    def test_object2_stays_superposed(self, report):
        assert report.object2_schmidt == pytest.approx([2**-0.5, 2**-0.5], abs=1e-9)

    def test_geometry(self, report):
        assert report.object1_center == -11.5
        assert report.object2_center == 10.5
        assert report.earliest_object2_flash_time == report.seed_to_object2_distance
        assert report.collapse_to_object2_distance == 13.0

    @pytest.mark.parametrize("d", [8, 10, 12, 15])
    def test_light_cone_follows_d(self, d):
        spec = BlobSpec(d=d)
        n_modes = 2 * (d + spec.r + 1)
        seed = object_centroid(spec, n_modes, 4, ("A1", "A2"))
        target = object_centroid(spec, n_modes, 4, ("B1", "B2"))
        assert light_cone_time(seed, target) == pytest.approx(2 * d)

    def test_report_at_wider_separation(self):
        report = macro_failure_report(BlobSpec(d=12), n_modes=34)
        assert report.earliest_object2_flash_time == pytest.approx(24.0)
        assert report.collapse_to_object2_distance == 15.0
        assert report.fidelity >= 0.99

    def test_light_cone_speed(self):
        assert light_cone_time(-11.0, 11.0, c=2.0) == pytest.approx(11.0)
        assert light_cone_time(3.0, -1.0) == pytest.approx(4.0)
        with pytest.raises(ValueError, match="speed of light"):
            light_cone_time(0.0, 1.0, c=0.0)

    def test_to_dict(self, report):
        data = report.to_dict()
        assert data["spec"] == {"d": 11, "r": 4, "epsilon": 1, "alpha": 1.0}
        assert len(data["object2_schmidt"]) == 2
