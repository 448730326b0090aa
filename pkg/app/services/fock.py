"""
Truncated Fock spaces of two anticommuting (q-)fermion families.

Modes form one chain a_1..a_{d_a}, b_1..b_{d_b}. Every single-mode matrix is
embedded with Kronecker products, preceded by parity strings diag((-1)^n) on
all earlier chain positions, so operators of distinct modes anticommute.
The basis is lexicographic in occupancy tuples with a-modes most significant.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import svds

from app.core.config import get_settings
from app.core.errors import CapacityError, ContractError, DomainError, RangeError
from app.core.logging import get_logger
from app.models.fock import ModeFamily, ModeSpec
from app.models.report import ResidualSet

logger = get_logger(__name__)
settings = get_settings()

# dense singular values are used up to this many nonzero rows/columns
_DENSE_NORM_LIMIT = 2048


def q_bracket(n: int, q: float) -> float:
    """
    Deformed integer [n] = (1 - (-q)^n) / (1 + q).

    Args:
        n: Nonnegative integer
        q: Deformation parameter, -1 < q <= 1

    Returns:
        float: The bracket; (1 - (-1)^n) / 2 at q = 1

    Raises:
        DomainError: If n < 0 or q is out of range
    """
    if n < 0:
        raise DomainError(f"q_bracket needs n >= 0, got {n}")
    if not (-1.0 < q <= 1.0):
        raise DomainError(f"q_bracket needs -1 < q <= 1, got {q}")
    if q == 1.0:
        return float(n % 2)
    return (1.0 - (-q) ** n) / (1.0 + q)


def ladder_norm_sq(k: int, q: float) -> float:
    """Squared norm of (a^dagger)^k |0>: the product [1][2]...[k]."""
    return math.prod(q_bracket(j, q) for j in range(1, k + 1))


@dataclass(frozen=True)
class SparseOperator:
    """Complex CSR matrix bound to a Fock space of a given dimension."""

    matrix: sparse.csr_matrix
    dim: int
    name: Optional[str] = None

    def __post_init__(self):
        if self.matrix.shape != (self.dim, self.dim):
            raise ContractError(
                f"operator shape {self.matrix.shape} does not match space dimension {self.dim}"
            )

    @classmethod
    def wrap(cls, matrix, name: Optional[str] = None) -> "SparseOperator":
        matrix = sparse.csr_matrix(matrix, dtype=complex)
        return cls(matrix=matrix, dim=matrix.shape[0], name=name)

    def adjoint(self) -> "SparseOperator":
        name = f"{self.name}^+" if self.name else None
        return SparseOperator.wrap(self.matrix.conj().T, name=name)

    def apply(self, vector: np.ndarray) -> np.ndarray:
        return self.matrix @ vector

    def is_zero(self) -> bool:
        return self.matrix.count_nonzero() == 0

    def __matmul__(self, other: "SparseOperator") -> "SparseOperator":
        return SparseOperator.wrap(self.matrix @ other.matrix)

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        return SparseOperator.wrap(self.matrix + other.matrix)

    def __sub__(self, other: "SparseOperator") -> "SparseOperator":
        return SparseOperator.wrap(self.matrix - other.matrix)

    def __mul__(self, scalar: complex) -> "SparseOperator":
        return SparseOperator.wrap(self.matrix * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "SparseOperator":
        return SparseOperator.wrap(-self.matrix)

    def __truediv__(self, scalar: complex) -> "SparseOperator":
        return SparseOperator.wrap(self.matrix / scalar)


@dataclass(frozen=True)
class FockSpace:
    """
    Enumerated occupancy basis of a truncated Fock space.

    Attributes:
        spec: Mode layout and deformation
        dim: (cutoff + 1) ** (d_a + d_b)
        occupancies: (dim, n_modes) integer array, row i is the tuple of basis state i
    """

    spec: ModeSpec
    dim: int
    occupancies: np.ndarray = field(repr=False, compare=False)

    @property
    def local_dim(self) -> int:
        return self.spec.cutoff + 1

    @property
    def n_modes(self) -> int:
        return self.spec.n_modes

    @property
    def q(self) -> float:
        return self.spec.q

    def chain_position(self, family: Union[ModeFamily, str], mode: int) -> int:
        """0-based chain position of a 0-based mode index within its family."""
        family = ModeFamily(family)
        size = self.spec.d_a if family == ModeFamily.A else self.spec.d_b
        if not (0 <= mode < size):
            raise RangeError(f"mode {mode} outside family {family.value} of size {size}")
        return mode if family == ModeFamily.A else self.spec.d_a + mode

    def index_of(self, occupancy: Sequence[int]) -> int:
        if len(occupancy) != self.n_modes:
            raise RangeError(f"occupancy tuple must have {self.n_modes} entries")
        index = 0
        for n in occupancy:
            if not (0 <= n <= self.spec.cutoff):
                raise RangeError(f"occupancy {n} outside 0..{self.spec.cutoff}")
            index = index * self.local_dim + int(n)
        return index

    def occupancy_of(self, index: int) -> Tuple[int, ...]:
        if not (0 <= index < self.dim):
            raise RangeError(f"basis index {index} outside 0..{self.dim - 1}")
        return tuple(int(n) for n in self.occupancies[index])

    def vacuum(self) -> np.ndarray:
        state = np.zeros(self.dim, dtype=complex)
        state[0] = 1.0
        return state

    def basis_state(self, occupancy: Sequence[int]) -> np.ndarray:
        state = np.zeros(self.dim, dtype=complex)
        state[self.index_of(occupancy)] = 1.0
        return state

    def identity(self) -> SparseOperator:
        return SparseOperator.wrap(sparse.identity(self.dim, dtype=complex, format="csr"), name="I")

    def interior_mask(self, depth: int = 1) -> np.ndarray:
        """
        Basis states on which `depth` creation steps never reach the truncation.

        At q = 1 the whole space qualifies: cutoff 1 carries no truncation defect.

        Raises:
            ContractError: If no state qualifies, naming the cutoff required
        """
        if self.spec.is_fermionic or depth <= 0:
            return np.ones(self.dim, dtype=bool)
        bound = self.spec.cutoff - depth
        if bound < 0:
            raise ContractError(
                f"depth {depth} needs cutoff >= {depth}, space has cutoff {self.spec.cutoff}"
            )
        return np.all(self.occupancies <= bound, axis=1)

    def require_depth(self, depth: int) -> None:
        """Raise unless `depth` creation steps from the vacuum stay exact."""
        if not self.spec.is_fermionic and depth > self.spec.cutoff:
            raise ContractError(
                f"occupancy overflow: {depth} creation steps need cutoff >= {depth}, "
                f"space has cutoff {self.spec.cutoff}"
            )

    def summary(self) -> Dict[str, Union[int, float]]:
        return {
            "d_a": self.spec.d_a,
            "d_b": self.spec.d_b,
            "q": self.spec.q,
            "cutoff": self.spec.cutoff,
            "dim": self.dim,
        }


def build_space(spec: ModeSpec, dimension_cap: Optional[int] = None) -> FockSpace:
    """
    Enumerate the occupancy basis of a truncated Fock space.

    Args:
        spec: Mode layout and deformation
        dimension_cap: Largest admissible dimension (defaults to settings)

    Returns:
        FockSpace: Space with lexicographic basis, a-modes most significant

    Raises:
        CapacityError: If the dimension exceeds the cap
    """
    cap = dimension_cap or settings.dimension_cap
    local_dim = spec.cutoff + 1
    dim = local_dim ** spec.n_modes
    if dim > cap:
        raise CapacityError(f"Fock space dimension {dim} exceeds cap {cap}")

    occupancies = np.array(np.unravel_index(np.arange(dim), (local_dim,) * spec.n_modes)).T
    logger.debug("Fock space built", dim=dim, d_a=spec.d_a, d_b=spec.d_b, q=spec.q, cutoff=spec.cutoff)
    return FockSpace(spec=spec, dim=dim, occupancies=occupancies)


@lru_cache(maxsize=None)
def _local_creation(q: float, cutoff: int) -> sparse.csr_matrix:
    amplitudes = [math.sqrt(max(q_bracket(n + 1, q), 0.0)) for n in range(cutoff)]
    return sparse.diags(amplitudes, offsets=-1, shape=(cutoff + 1, cutoff + 1), format="csr", dtype=complex)


@lru_cache(maxsize=None)
def _parity(cutoff: int) -> sparse.csr_matrix:
    return sparse.diags([(-1.0) ** n for n in range(cutoff + 1)], format="csr", dtype=complex)


@lru_cache(maxsize=None)
def _embedded_creation(spec: ModeSpec, position: int) -> sparse.csr_matrix:
    local_dim = spec.cutoff + 1
    factors = (
        [_parity(spec.cutoff)] * position
        + [_local_creation(spec.q, spec.cutoff)]
        + [sparse.identity(local_dim, dtype=complex, format="csr")] * (spec.n_modes - position - 1)
    )
    matrix = reduce(lambda x, y: sparse.kron(x, y, format="csr"), factors)
    matrix.eliminate_zeros()
    return matrix


def creation_operator(space: FockSpace, family: Union[ModeFamily, str], mode: int) -> SparseOperator:
    """
    Creation operator of one constituent mode.

    Args:
        space: Target space
        family: "a" or "b"
        mode: 0-based index within the family

    Returns:
        SparseOperator: a^dagger |n> = sqrt([n+1]) |n+1>, zero at the top level

    Raises:
        RangeError: If the mode index is out of range
    """
    position = space.chain_position(family, mode)
    label = f"{ModeFamily(family).value}{mode + 1}^+"
    return SparseOperator(matrix=_embedded_creation(space.spec, position), dim=space.dim, name=label)


def annihilation_operator(space: FockSpace, family: Union[ModeFamily, str], mode: int) -> SparseOperator:
    """Adjoint of creation_operator."""
    creation = creation_operator(space, family, mode)
    return SparseOperator.wrap(creation.matrix.conj().T, name=f"{ModeFamily(family).value}{mode + 1}")


def number_operator_mode(space: FockSpace, family: Union[ModeFamily, str], mode: int) -> SparseOperator:
    """Diagonal matrix of the occupancy of one mode."""
    position = space.chain_position(family, mode)
    diagonal = space.occupancies[:, position].astype(complex)
    return SparseOperator.wrap(sparse.diags(diagonal, format="csr"), name=f"n_{ModeFamily(family).value}{mode + 1}")


def chain_operators(space: FockSpace) -> Tuple[SparseOperator, ...]:
    """Creation operators of every chain position, a-modes first."""
    return tuple(creation_operator(space, ModeFamily.A, mu) for mu in range(space.spec.d_a)) + tuple(
        creation_operator(space, ModeFamily.B, nu) for nu in range(space.spec.d_b)
    )


def restricted_norm(matrix, columns: Optional[np.ndarray] = None) -> float:
    """
    Spectral norm of a (sparse) matrix restricted to a subset of columns.

    Args:
        matrix: Sparse or dense matrix
        columns: Boolean mask of the columns kept, all when None

    Returns:
        float: Largest singular value of the restriction
    """
    matrix = sparse.csc_matrix(matrix)
    if columns is not None:
        matrix = matrix[:, np.flatnonzero(columns)]
    matrix.eliminate_zeros()
    if matrix.nnz == 0:
        return 0.0
    rows = np.unique(matrix.indices)
    cols = np.flatnonzero(np.diff(matrix.indptr))
    reduced = matrix[rows][:, cols]
    if max(reduced.shape) <= _DENSE_NORM_LIMIT:
        return float(np.linalg.norm(reduced.toarray(), 2))
    return float(svds(reduced, k=1, return_singular_vectors=False)[0])


def verify_mode_relations(space: FockSpace, tolerance: Optional[float] = None) -> ResidualSet:
    """
    Check the deformed anticommutation relations of every mode pair.

    Same-mode: a a^+ + q a^+ a - 1. Distinct modes: {a, a'} and {a, a'^+}.
    Residuals are spectral norms on the interior subspace (occupancies <= cutoff - 1).
    The same-mode norm on the full space is recorded as a measurement: at q < 1 the
    top occupancy carries the truncation defect [cutoff + 1]_{-q}.

    Args:
        space: Built Fock space
        tolerance: Pass threshold (defaults to strong tolerance)

    Returns:
        ResidualSet: Maximum residual per relation
    """
    tol = tolerance or settings.strong_tolerance
    interior = space.interior_mask(depth=1)
    creations = chain_operators(space)
    identity = space.identity().matrix
    q = space.q

    same_mode = same_mode_full = 0.0
    distinct_lowering = 0.0
    distinct_mixed = 0.0
    for i, ci in enumerate(creations):
        ai = ci.matrix.conj().T
        residual = ai @ ci.matrix + q * (ci.matrix @ ai) - identity
        same_mode = max(same_mode, restricted_norm(residual, interior))
        same_mode_full = max(same_mode_full, restricted_norm(residual))
        for cj in creations[i + 1:]:
            aj = cj.matrix.conj().T
            distinct_lowering = max(distinct_lowering, restricted_norm(ai @ aj + aj @ ai, interior))
            distinct_mixed = max(distinct_mixed, restricted_norm(ai @ cj.matrix + cj.matrix @ ai, interior))
            distinct_mixed = max(distinct_mixed, restricted_norm(aj @ ci.matrix + ci.matrix @ aj, interior))

    results = ResidualSet(name="mode_relations", reference="deformed anticommutation relations of the constituents")
    pairs = len(creations) * (len(creations) - 1) // 2
    results.add("q_commutation_same_mode", same_mode, tol, states=int(interior.sum()))
    results.add("anticommutation_distinct_lowering", distinct_lowering, tol, states=pairs)
    results.add("anticommutation_distinct_mixed", distinct_mixed, tol, states=pairs)
    results.measure("q_commutation_same_mode_full", same_mode_full)
    logger.debug(
        "Mode relations checked",
        same_mode=same_mode,
        same_mode_full=same_mode_full,
        distinct=max(distinct_lowering, distinct_mixed),
    )
    return results


def check_nilpotency(space: FockSpace, family: Union[ModeFamily, str], mode: int, k: int) -> bool:
    """
    Whether (a^dagger)^k is the zero matrix.

    Raises:
        ContractError: If k > cutoff + 1
    """
    if k < 1 or k > space.spec.cutoff + 1:
        raise ContractError(f"nilpotency order must satisfy 1 <= k <= cutoff + 1, got {k}")
    creation = creation_operator(space, family, mode).matrix
    power = creation
    for _ in range(k - 1):
        power = power @ creation
    power.eliminate_zeros()
    return power.count_nonzero() == 0
