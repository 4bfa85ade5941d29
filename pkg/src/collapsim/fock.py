"""Fixed-N fermionic Fock space on a 1D lattice and the two-object collapse.

Occupation basis states are uint64 bitmasks (bit s set when site s is
occupied), enumerated in lexicographic order of the occupied-site tuples.
Site s sits at position s - M // 2. Fermionic signs follow the
Jordan-Wigner convention: an operator on site s picks up (-1) for every
occupied site above s.
"""

import itertools
from dataclasses import asdict, dataclass, field
from functools import cache, cached_property

import numpy as np
import scipy.linalg
import scipy.sparse
from loguru import logger

from collapsim.hilbert import NULL_NORM

MAX_MODES = 64
SCHMIDT_CUTOFF = 1e-12
# lattice units: one site per unit of lab time
SPEED_OF_LIGHT = 1.0


@dataclass(frozen=True)
class FockBasis:
    n_modes: int
    n_fermions: int

    def __post_init__(self):
        if not 0 < self.n_modes <= MAX_MODES:
            raise ValueError(f"n_modes must be in 1..{MAX_MODES}, got {self.n_modes}")
        if not 0 <= self.n_fermions <= self.n_modes:
            raise ValueError(
                f"n_fermions must be in 0..{self.n_modes}, got {self.n_fermions}"
            )

    @cached_property
    def masks(self) -> np.ndarray:
        combos = itertools.combinations(range(self.n_modes), self.n_fermions)
        masks = np.fromiter(
            (sum(1 << s for s in combo) for combo in combos), dtype=np.uint64
        )
        masks.setflags(write=False)
        return masks

    @cached_property
    def _sorted(self) -> tuple[np.ndarray, np.ndarray]:
        order = np.argsort(self.masks)
        return self.masks[order], order

    @cached_property
    def occupations(self) -> np.ndarray:
        """Boolean (dim, M) table of occupied sites"""
        sites = np.arange(self.n_modes, dtype=np.uint64)
        return ((self.masks[:, None] >> sites[None, :]) & np.uint64(1)).astype(bool)

    @property
    def dimension(self) -> int:
        return int(self.masks.size)

    @property
    def positions(self) -> np.ndarray:
        return np.arange(self.n_modes) - self.n_modes // 2

    def index_of(self, masks: np.ndarray) -> np.ndarray:
        """Basis indices of the given bitmasks (which must all be present)"""
        sorted_masks, order = self._sorted
        where = np.searchsorted(sorted_masks, masks)
        return order[where]


@cache
def fock_basis(n_modes: int, n_fermions: int) -> FockBasis:
    return FockBasis(n_modes, n_fermions)


@dataclass(frozen=True, eq=False)
class FockVector:
    basis: FockBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if amplitudes.shape != (self.basis.dimension,):
            raise ValueError(
                f"expected {self.basis.dimension} amplitudes, got {amplitudes.shape}"
            )
        object.__setattr__(self, "amplitudes", amplitudes)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "FockVector":
        norm = self.norm()
        if norm <= NULL_NORM:
            raise ValueError("null state")
        return FockVector(self.basis, self.amplitudes / norm)

    def vdot(self, other: "FockVector") -> complex:
        if self.basis != other.basis:
            raise ValueError("vectors live in different Fock sectors")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def __add__(self, other: "FockVector") -> "FockVector":
        if self.basis != other.basis:
            raise ValueError("vectors live in different Fock sectors")
        return FockVector(self.basis, self.amplitudes + other.amplitudes)

    def __mul__(self, scalar: complex) -> "FockVector":
        return FockVector(self.basis, self.amplitudes * scalar)

    __rmul__ = __mul__


def vacuum(n_modes: int) -> FockVector:
    return FockVector(fock_basis(n_modes, 0), np.ones(1, dtype=complex))


def _check_site(basis: FockBasis, site: int) -> None:
    if not 0 <= site < basis.n_modes:
        raise ValueError(f"site {site} outside [0, {basis.n_modes})")


def _jordan_wigner_sign(masks: np.ndarray, site: int) -> np.ndarray:
    above = masks >> np.uint64(site + 1)
    return np.where(np.bitwise_count(above) % 2 == 0, 1.0, -1.0)


def _ladder_transition(basis: FockBasis, site: int, create: bool):
    """(source indices, target indices, signs) for a creation or annihilation on `site`"""
    bit = np.uint64(1 << site)
    masks = basis.masks
    occupied = (masks & bit) != 0
    source = np.flatnonzero(~occupied if create else occupied)
    moved = masks[source] ^ bit
    target_basis = fock_basis(basis.n_modes, basis.n_fermions + (1 if create else -1))
    target = target_basis.index_of(moved)
    return source, target, _jordan_wigner_sign(masks[source], site), target_basis


def creation_apply(v: FockVector, site: int) -> FockVector:
    """a^dagger(site) v; components with the site occupied vanish"""
    _check_site(v.basis, site)
    if v.basis.n_fermions == v.basis.n_modes:
        return FockVector(v.basis, np.zeros_like(v.amplitudes))
    source, target, signs, target_basis = _ladder_transition(v.basis, site, True)
    out = np.zeros(target_basis.dimension, dtype=complex)
    out[target] = signs * v.amplitudes[source]
    return FockVector(target_basis, out)


def annihilation_apply(v: FockVector, site: int) -> FockVector:
    """a(site) v; components with the site empty vanish"""
    _check_site(v.basis, site)
    if v.basis.n_fermions == 0:
        return FockVector(v.basis, np.zeros_like(v.amplitudes))
    source, target, signs, target_basis = _ladder_transition(v.basis, site, False)
    out = np.zeros(target_basis.dimension, dtype=complex)
    out[target] = signs * v.amplitudes[source]
    return FockVector(target_basis, out)


def creation_matrix(n_modes: int, n_fermions: int, site: int) -> scipy.sparse.csr_matrix:
    """a^dagger(site) from the N-particle sector into the N+1 sector"""
    basis = fock_basis(n_modes, n_fermions)
    _check_site(basis, site)
    source, target, signs, target_basis = _ladder_transition(basis, site, True)
    return scipy.sparse.csr_matrix(
        (signs, (target, source)), shape=(target_basis.dimension, basis.dimension)
    )


def annihilation_matrix(n_modes: int, n_fermions: int, site: int) -> scipy.sparse.csr_matrix:
    """a(site) from the N-particle sector into the N-1 sector"""
    basis = fock_basis(n_modes, n_fermions)
    _check_site(basis, site)
    source, target, signs, target_basis = _ladder_transition(basis, site, False)
    return scipy.sparse.csr_matrix(
        (signs, (target, source)), shape=(target_basis.dimension, basis.dimension)
    )


@dataclass(frozen=True)
class BlobSpec:
    """Two objects, each in a superposition of two blobs.

    Object 1 sits at -d +/- r and object 2 at d +/- r; a blob is N/2
    fermions spaced epsilon apart. Scale separation is checked as
    N*epsilon/2 <= r/2, r <= d/2 and 1/sqrt(alpha) <= r/4.
    """

    d: int = 11
    r: int = 4
    epsilon: int = 1
    alpha: float = 1.0

    def validate(self, n_fermions: int) -> None:
        if n_fermions < 2 or n_fermions % 2:
            raise ValueError(f"number of fermions must be even and positive, got {n_fermions}")
        if self.epsilon < 1:
            raise ValueError(f"epsilon must be at least one site, got {self.epsilon}")
        if not self.alpha > 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if n_fermions * self.epsilon / 2 > self.r / 2:
            raise ValueError(
                f"blob size violates N*epsilon/2 <= r/2 ({n_fermions * self.epsilon / 2} > {self.r / 2})"
            )
        if self.r > self.d / 2:
            raise ValueError(f"separation violates r <= d/2 ({self.r} > {self.d / 2})")
        if 1.0 / np.sqrt(self.alpha) > self.r / 4:
            raise ValueError(
                f"collapse width violates 1/sqrt(alpha) <= r/4 "
                f"({1.0 / np.sqrt(self.alpha):.4g} > {self.r / 4})"
            )

    @property
    def centers(self) -> dict[str, int]:
        return {
            "A1": -self.d - self.r,
            "A2": -self.d + self.r,
            "B1": self.d - self.r,
            "B2": self.d + self.r,
        }


def blob_sites(center: int, count: int, epsilon: int, n_modes: int) -> list[int]:
    """Sites of g(center, n) = a^dagger(center - N*epsilon/4 + n*epsilon), n < count"""
    origin = n_modes // 2
    start = origin + center - (2 * count * epsilon) // 4
    sites = [start + n * epsilon for n in range(count)]
    for site in sites:
        if not 0 <= site < n_modes:
            raise ValueError(
                f"blob at {center} needs site {site} outside [0, {n_modes})"
            )
    return sites


def blob_operator(v: FockVector, center: int, count: int, epsilon: int) -> FockVector:
    """Apply g(center, 0) g(center, 1) ... g(center, count-1) to v"""
    for site in reversed(blob_sites(center, count, epsilon, v.basis.n_modes)):
        v = creation_apply(v, site)
    return v


def initial_superposition(spec: BlobSpec, n_modes: int, n_fermions: int) -> FockVector:
    """(1/2) (A1 + A2)(B1 + B2)|0>"""
    spec.validate(n_fermions)
    count = n_fermions // 2
    centers = spec.centers
    result = None
    for a in ("A1", "A2"):
        for b in ("B1", "B2"):
            branch = blob_operator(vacuum(n_modes), centers[b], count, spec.epsilon)
            branch = blob_operator(branch, centers[a], count, spec.epsilon)
            result = branch if result is None else result + branch
    return result * 0.5


def object_centroid(
    spec: BlobSpec, n_modes: int, n_fermions: int, blobs: tuple[str, ...]
) -> float:
    """Mean lab position of the sites occupied by the given blobs"""
    origin = n_modes // 2
    sites = [
        site
        for name in blobs
        for site in blob_sites(spec.centers[name], n_fermions // 2, spec.epsilon, n_modes)
    ]
    return float(np.mean(sites)) - origin


def light_cone_time(source: float, target: float, c: float = SPEED_OF_LIGHT) -> float:
    """Earliest lab time at which a time-like flash chain seeded at source reaches target"""
    if not c > 0.0:
        raise ValueError(f"speed of light must be positive, got {c}")
    return abs(target - source) / c


def branch_state(spec: BlobSpec, n_modes: int, n_fermions: int, a: str, b: str) -> FockVector:
    """A_a B_b |0> for a, b in {"A1", "A2"} x {"B1", "B2"}"""
    count = n_fermions // 2
    branch = blob_operator(vacuum(n_modes), spec.centers[b], count, spec.epsilon)
    return blob_operator(branch, spec.centers[a], count, spec.epsilon)


def number_op(basis: FockBasis, lo: float, hi: float) -> scipy.sparse.dia_matrix:
    """Number operator for sites with positions in [lo, hi)"""
    region = (basis.positions >= lo) & (basis.positions < hi)
    counts = basis.occupations[:, region].sum(axis=1).astype(float)
    return scipy.sparse.diags(counts)


def collapse_profile(positions: np.ndarray, center: float, alpha: float) -> np.ndarray:
    """Unit-peak f_alpha(x - center) = exp(-alpha (x - center)^2 / 2)"""
    return np.exp(-0.5 * alpha * (positions - center) ** 2)


def collapse_J(v: FockVector, center: float, alpha: float) -> tuple[FockVector, float]:
    """Apply sum_y f_alpha(center - y) n(y) and normalize; returns (state, weight)"""
    profile = collapse_profile(v.basis.positions, center, alpha)
    diagonal = v.basis.occupations.astype(float) @ profile
    collapsed = diagonal * v.amplitudes
    weight = float(np.sum(np.abs(collapsed) ** 2))
    if weight <= NULL_NORM:
        raise ValueError("collapse onto null support")
    return FockVector(v.basis, collapsed / np.sqrt(weight)), weight


def mode_schmidt_coefficients(v: FockVector, cut: float) -> np.ndarray:
    """Schmidt coefficients across sites with position < cut | position >= cut.

    Only basis states carrying amplitude above a relative cutoff enter the
    coefficient matrix.
    """
    basis = v.basis
    scale = np.max(np.abs(v.amplitudes)) if v.amplitudes.size else 0.0
    if scale <= NULL_NORM:
        raise ValueError("null state")
    keep = np.flatnonzero(np.abs(v.amplitudes) > SCHMIDT_CUTOFF * scale)
    left_bits = np.uint64(
        sum(1 << int(s) for s in np.flatnonzero(basis.positions < cut))
    )
    left = basis.masks[keep] & left_bits
    right = basis.masks[keep] & ~left_bits
    rows, row_index = np.unique(left, return_inverse=True)
    cols, col_index = np.unique(right, return_inverse=True)
    matrix = np.zeros((rows.size, cols.size), dtype=complex)
    matrix[row_index, col_index] = v.amplitudes[keep]
    return scipy.linalg.svdvals(matrix) / v.norm()


@dataclass
class FockReport:
    n_modes: int
    n_fermions: int
    dimension: int
    spec: dict = field(default_factory=dict)
    branch_count: int = 0
    total_number: float = 0.0
    total_number_residual: float = 0.0
    left_number: float = 0.0
    left_number_residual: float = 0.0
    outer_left_residual: float = 0.0
    collapse_center: float = 0.0
    collapse_weight: float = 0.0
    fidelity: float = 0.0
    suppressed_amplitude: float = 0.0
    object2_schmidt: list[float] = field(default_factory=list)
    object1_center: float = 0.0
    object2_center: float = 0.0
    seed_to_object2_distance: float = 0.0
    earliest_object2_flash_time: float = 0.0
    collapse_to_object2_distance: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def _eigen_residual(operator, v: FockVector) -> tuple[float, float]:
    applied = operator @ v.amplitudes
    expectation = float(np.real(np.vdot(v.amplitudes, applied)))
    return expectation, float(np.linalg.norm(applied - expectation * v.amplitudes))


def macro_failure_report(
    spec: BlobSpec | None = None, n_modes: int = 32, n_fermions: int = 4
) -> FockReport:
    """Build the two-object superposition, collapse object 1 and inspect object 2"""
    spec = spec or BlobSpec()
    psi = initial_superposition(spec, n_modes, n_fermions)
    basis = psi.basis
    logger.info("Fock sector M={} N={} has dimension {}", n_modes, n_fermions, basis.dimension)

    total, total_residual = _eigen_residual(number_op(basis, -np.inf, np.inf), psi)
    left, left_residual = _eigen_residual(number_op(basis, -np.inf, 0.0), psi)
    _, outer_residual = _eigen_residual(number_op(basis, -np.inf, -spec.d), psi)

    center = float(spec.centers["A2"])
    collapsed, weight = collapse_J(psi, center, spec.alpha)
    expected = (
        branch_state(spec, n_modes, n_fermions, "A2", "B1")
        + branch_state(spec, n_modes, n_fermions, "A2", "B2")
    ).normalized()
    fidelity = abs(expected.vdot(collapsed)) ** 2
    suppressed = branch_state(spec, n_modes, n_fermions, "A1", "B1").normalized()
    suppressed_amplitude = abs(suppressed.vdot(collapsed))

    schmidt = mode_schmidt_coefficients(collapsed, float(spec.d))
    # the first object-1 flash seeds the chain at object 1's centre
    seed = object_centroid(spec, n_modes, n_fermions, ("A1", "A2"))
    object2 = object_centroid(spec, n_modes, n_fermions, ("B1", "B2"))
    object2_sites = blob_sites(spec.centers["B1"], n_fermions // 2, spec.epsilon, n_modes)
    nearest = float(min(basis.positions[object2_sites]))
    report = FockReport(
        n_modes=n_modes,
        n_fermions=n_fermions,
        dimension=basis.dimension,
        spec=asdict(spec),
        branch_count=int(np.count_nonzero(np.abs(psi.amplitudes) > SCHMIDT_CUTOFF)),
        total_number=total,
        total_number_residual=total_residual,
        left_number=left,
        left_number_residual=left_residual,
        outer_left_residual=outer_residual,
        collapse_center=center,
        collapse_weight=weight,
        fidelity=float(fidelity),
        suppressed_amplitude=float(suppressed_amplitude),
        object2_schmidt=[float(s) for s in schmidt[:2]],
        object1_center=seed,
        object2_center=object2,
        seed_to_object2_distance=abs(object2 - seed),
        earliest_object2_flash_time=light_cone_time(seed, object2),
        collapse_to_object2_distance=nearest - center,
    )
    logger.debug("Fock report: {}", report)
    return report
