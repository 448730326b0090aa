"""
Composite quasiboson operators built from pairs of constituent fermions.

A^+ = sum_{mu nu} Phi^{mu nu} a^+_mu b^+_nu and its adjoint, the deviation
operators Delta and epsilon = 1 - Delta at q = 1, ladder states
A^+_{g1}...A^+_{gn}|O> with Gram bookkeeping, and number operators.
"""

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from app.core.config import get_settings
from app.core.errors import ContractError, DomainError
from app.core.logging import get_logger
from app.models.dsf import FermionicQuadratic
from app.models.fock import ModeFamily
from app.models.report import ResidualSet
from app.services.dsf import unified_dsf
from app.services.fock import (
    FockSpace,
    SparseOperator,
    annihilation_operator,
    creation_operator,
    number_operator_mode,
    restricted_norm,
)
from app.services.phi import PhiFamily, deformation_parameter, one_hot_position

logger = get_logger(__name__)
settings = get_settings()


def commutator(x: SparseOperator, y: SparseOperator) -> SparseOperator:
    return SparseOperator.wrap(x.matrix @ y.matrix - y.matrix @ x.matrix)


def anticommutator(x: SparseOperator, y: SparseOperator) -> SparseOperator:
    return SparseOperator.wrap(x.matrix @ y.matrix + y.matrix @ x.matrix)


def interior_norm(operator: SparseOperator, space: FockSpace, depth: int = 1) -> float:
    """Spectral norm of an operator restricted to the interior subspace."""
    return restricted_norm(operator.matrix, space.interior_mask(depth))


def operator_power(x: SparseOperator, n: int) -> SparseOperator:
    result = sparse.identity(x.dim, dtype=complex, format="csr")
    for _ in range(n):
        result = result @ x.matrix
    return SparseOperator.wrap(result)


@dataclass(frozen=True)
class OperatorPair:
    """Quasiboson annihilation and creation operators of one mode."""

    A: SparseOperator
    A_dag: SparseOperator
    label: int = 1


def _check_shape(space: FockSpace, phi: np.ndarray) -> None:
    if phi.shape != (space.spec.d_a, space.spec.d_b):
        raise ContractError(
            f"Phi of shape {phi.shape} does not match the space ({space.spec.d_a}, {space.spec.d_b})"
        )


def build_quasiboson(space: FockSpace, phi: np.ndarray, label: int = 1) -> OperatorPair:
    """
    Assemble A^+ = sum Phi^{mu nu} a^+_mu b^+_nu and A = (A^+)^+.

    Raises:
        ContractError: If Phi does not match the space's mode counts
    """
    phi = np.asarray(phi, dtype=complex)
    _check_shape(space, phi)
    total = sparse.csr_matrix((space.dim, space.dim), dtype=complex)
    for mu, nu in zip(*np.nonzero(phi)):
        a_dag = creation_operator(space, ModeFamily.A, int(mu)).matrix
        b_dag = creation_operator(space, ModeFamily.B, int(nu)).matrix
        total = total + phi[mu, nu] * (a_dag @ b_dag)
    a_dag_op = SparseOperator.wrap(total, name=f"A{label}^+")
    return OperatorPair(A=SparseOperator.wrap(total.conj().T, name=f"A{label}"), A_dag=a_dag_op, label=label)


def build_pairs(space: FockSpace, family: PhiFamily) -> List[OperatorPair]:
    """One OperatorPair per family member, labelled 1..n."""
    return [build_quasiboson(space, phi, label=alpha) for alpha, phi in enumerate(family.matrices, start=1)]


def _one_body(space: FockSpace, family: ModeFamily, coefficients: np.ndarray) -> sparse.csr_matrix:
    """sum_{i j} coefficients[i, j] c^+_i c_j within one constituent family."""
    total = sparse.csr_matrix((space.dim, space.dim), dtype=complex)
    for i, j in zip(*np.nonzero(np.abs(coefficients) > 0)):
        c_dag = creation_operator(space, family, int(i)).matrix
        c = annihilation_operator(space, family, int(j)).matrix
        total = total + coefficients[i, j] * (c_dag @ c)
    return total


def delta_operator(space: FockSpace, phi_a: np.ndarray, phi_b: np.ndarray) -> SparseOperator:
    """
    Deviation from the canonical commutator, [A_a, A^+_b] = delta_ab - Delta_ab.

    Delta_ab = sum conj(Phi_a^{mu nu}) Phi_b^{mu' nu} a^+_mu' a_mu
             + sum conj(Phi_a^{mu nu}) Phi_b^{mu nu'} b^+_nu' b_nu.

    Raises:
        ContractError: If q != 1
    """
    if not space.spec.is_fermionic:
        raise ContractError("Delta is defined for q = 1 constituents; compute [A, A^+] directly for q < 1")
    phi_a = np.asarray(phi_a, dtype=complex)
    phi_b = np.asarray(phi_b, dtype=complex)
    _check_shape(space, phi_a)
    _check_shape(space, phi_b)
    a_coefficients = phi_b @ phi_a.conj().T
    b_coefficients = (phi_a.conj().T @ phi_b).T
    matrix = _one_body(space, ModeFamily.A, a_coefficients) + _one_body(space, ModeFamily.B, b_coefficients)
    return SparseOperator.wrap(matrix, name="Delta")


def epsilon_operator(space: FockSpace, phi: np.ndarray) -> SparseOperator:
    """epsilon = 1 - Delta_aa = [A, A^+] at q = 1."""
    delta = delta_operator(space, phi, phi)
    return SparseOperator.wrap(space.identity().matrix - delta.matrix, name="epsilon")


def number_operator_q1(space: FockSpace, phi: np.ndarray) -> SparseOperator:
    """
    N = Delta_aa / f at q = 1.

    This realizes chi(x, y) = (1 - y) / f, so [N, A^+] = A^+ holds as a matrix identity.

    Raises:
        DomainError: If f = 0
    """
    f = deformation_parameter(np.asarray(phi, dtype=complex))
    if abs(f) <= settings.strong_tolerance:
        raise DomainError("number operator undefined for f = 0")
    delta = delta_operator(space, phi, phi)
    return SparseOperator.wrap(delta.matrix / f, name="N")


def number_operator_qlt1(space: FockSpace, phi: np.ndarray) -> SparseOperator:
    """
    Constituent number operator n^a_{mu0} at the one-hot position (mu0, nu0).

    Raises:
        ContractError: If q = 1 or Phi is not one-hot
    """
    if space.spec.is_fermionic:
        raise ContractError("constituent-count number operator is for q < 1; use number_operator_q1")
    phi = np.asarray(phi, dtype=complex)
    _check_shape(space, phi)
    position = one_hot_position(phi)
    if position is None:
        raise ContractError("number operator for q < 1 needs a one-hot Phi")
    mu0, _ = position
    return number_operator_mode(space, ModeFamily.A, mu0)


def number_operator(space: FockSpace, phi: np.ndarray) -> Optional[SparseOperator]:
    """The number operator appropriate to the space, or None when none is defined."""
    try:
        if space.spec.is_fermionic:
            return number_operator_q1(space, phi)
        return number_operator_qlt1(space, phi)
    except (ContractError, DomainError) as e:
        logger.debug("No number operator for this Phi", reason=str(e))
        return None


@dataclass(frozen=True, eq=False)
class LadderLevel:
    """All ladder states with n creation operators."""

    n: int
    multi_indices: Tuple[Tuple[int, ...], ...]
    vectors: np.ndarray = field(repr=False)
    gram: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)
    rank: int = 0
    null: bool = False

    def norms_sq(self) -> np.ndarray:
        return np.real(np.diag(self.gram))


@dataclass(frozen=True, eq=False)
class LadderBasis:
    """Ladder states up to n_max, level by level; level 0 is the vacuum."""

    levels: Tuple[LadderLevel, ...]
    rank_tolerance: float
    modes: int

    @property
    def n_max(self) -> int:
        return len(self.levels) - 1

    def state(self, multi_index: Sequence[int]) -> np.ndarray:
        level = self.levels[len(multi_index)]
        return level.vectors[:, level.multi_indices.index(tuple(multi_index))]

    def null_levels(self) -> List[int]:
        return [level.n for level in self.levels if level.null]

    def is_null(self, multi_index: Sequence[int]) -> bool:
        level = self.levels[len(multi_index)]
        norm_sq = level.norms_sq()[level.multi_indices.index(tuple(multi_index))]
        return bool(norm_sq <= self.rank_tolerance)


def ladder_basis(
    space: FockSpace,
    pairs: Sequence[OperatorPair],
    n_max: int,
    rank_tol: Optional[float] = None,
) -> LadderBasis:
    """
    Ladder states A^+_{g1}...A^+_{gn}|O> for every ordered multi-index of length <= n_max.

    Multi-indices are enumerated lexicographically in 0-based pair positions.
    A level is null when its largest Gram eigenvalue is below the rank tolerance;
    its rank counts eigenvalues above rank_tol times the largest one.

    Raises:
        ContractError: If n_max creation steps overflow the truncation
    """
    tol = rank_tol or settings.rank_tolerance
    space.require_depth(n_max)
    creations = [pair.A_dag.matrix for pair in pairs]

    vacuum = space.vacuum()
    levels = [_make_level(0, ((),), vacuum[:, None], tol)]
    previous = {(): vacuum}
    for n in range(1, n_max + 1):
        current: Dict[Tuple[int, ...], np.ndarray] = {}
        for multi_index in itertools.product(range(len(pairs)), repeat=n):
            current[multi_index] = creations[multi_index[0]] @ previous[multi_index[1:]]
        indices = tuple(current)
        vectors = np.column_stack([current[i] for i in indices])
        levels.append(_make_level(n, indices, vectors, tol))
        previous = current

    basis = LadderBasis(levels=tuple(levels), rank_tolerance=tol, modes=len(pairs))
    logger.debug("Ladder basis built", n_max=n_max, modes=len(pairs), null_levels=basis.null_levels())
    return basis


def _make_level(n: int, indices, vectors: np.ndarray, tol: float) -> LadderLevel:
    gram = vectors.conj().T @ vectors
    eigenvalues = np.linalg.eigvalsh(gram)
    largest = float(eigenvalues.max()) if eigenvalues.size else 0.0
    null = largest <= tol
    rank = 0 if null else int(np.sum(eigenvalues > tol * largest))
    return LadderLevel(
        n=n,
        multi_indices=tuple(indices),
        vectors=vectors,
        gram=gram,
        eigenvalues=eigenvalues,
        rank=rank,
        null=null,
    )


def mode_counts(multi_index: Sequence[int], modes: int) -> List[int]:
    """How often each mode appears in a multi-index."""
    counts = [0] * modes
    for g in multi_index:
        counts[g] += 1
    return counts


def chi_linear(x: Fraction, y: Fraction, f: Fraction) -> Fraction:
    """chi(x, y) = (1 - y) / f; the implemented number-operator function."""
    return (1 - y) / f


def _fraction_sqrt(value: Fraction) -> Tuple[Fraction, bool]:
    """Exact square root when numerator and denominator are perfect squares."""
    if value < 0:
        return Fraction(0), False
    num, den = value.numerator, value.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd), True
    return Fraction(math.sqrt(num / den)), False


def quadratic_inverse(value: Fraction, f: Fraction) -> Tuple[Fraction, Fraction]:
    """
    Both solutions n of (1 + f/2) n - (f/2) n^2 = value.

    The discriminant is clamped at zero.
    """
    half = 1 + f / 2
    discriminant = half * half - 2 * f * value
    root, _ = _fraction_sqrt(max(discriminant, Fraction(0)))
    return (half - root) / f, (half + root) / f


def chi_alternatives(f: Fraction, n: int, p: Fraction = Fraction(1, 2)) -> Dict[str, Fraction]:
    """
    Residual of chi(n - s_n f, 1 - n f) - n, s_n = n(n-1)/2, for each candidate chi.

    Inverse-based candidates are two-valued; the residual takes the branch closest to n.
    """
    sigma = Fraction(n * (n - 1), 2)
    x = n - sigma * f
    y = 1 - n * f
    first = quadratic_inverse(x, f)
    second = tuple(root - 1 for root in quadratic_inverse(x + y, f))
    blend = [(1 - p) * u + p * v for u in first for v in second]
    return {
        "chi_linear": abs(chi_linear(x, y, f) - n),
        "chi_inverse_first_argument": min(abs(u - n) for u in first),
        "chi_inverse_second_argument": min(abs(v - n) for v in second),
        "chi_blend": min(abs(w - n) for w in blend),
    }


def check_chi_condition(spec, n_max: int, p: float = 0.5, tolerance: Optional[float] = None) -> ResidualSet:
    """
    Number-operator conditions on chi.

    Quadratic specs: chi(n - s_n f, 1 - n f) = n for the linear chi and for the
    inverse-based alternatives. Other specs: chi exists exactly when the value
    pairs (phi(n), phi(n+1)) are pairwise distinct, since chi then maps each pair to n.
    """
    tol = tolerance or settings.strong_tolerance
    results = ResidualSet(name="chi_condition", reference="number operator as a function chi of A^+A and epsilon")

    if isinstance(spec, FermionicQuadratic):
        f = Fraction(2, spec.m)
        worst: Dict[str, Fraction] = {}
        for n in range(n_max + 1):
            for label, value in chi_alternatives(f, n, Fraction(p)).items():
                worst[label] = max(worst.get(label, Fraction(0)), value)
        for label, value in worst.items():
            results.add(label, float(value), tol, states=n_max + 1)
        return results

    values = [unified_dsf(spec, n) for n in range(n_max + 2)]
    points = [(values[n], values[n + 1]) for n in range(n_max + 1)]
    separation = min(
        (math.dist(u, v) for u, v in itertools.combinations(points, 2)),
        default=math.inf,
    )
    if separation <= tol:
        logger.warning("Value pairs collide, no chi exists", separation=separation, states=len(points))
    results.add(
        "chi_pairs_distinct",
        0.0 if separation > tol else 1.0,
        tol,
        reference="(phi(n), phi(n+1)) determines n",
        states=len(points),
    )
    return results


def apply_function_of_count(
    func: Callable[[int], float],
    basis: LadderBasis,
    mode: int,
    shift: int = 0,
) -> Dict[Tuple[int, ...], np.ndarray]:
    """func(N_mode + shift) applied to every ladder state through its mode count."""
    applied = {}
    for level in basis.levels:
        for column, multi_index in enumerate(level.multi_indices):
            count = mode_counts(multi_index, basis.modes)[mode]
            applied[multi_index] = func(count + shift) * level.vectors[:, column]
    return applied
