"""
Phi-matrix families: constraint systems, generators and realizability.

A family is an ordered tuple of complex d_a x d_b matrices Phi_alpha; the
quasiboson of mode alpha is A^+_alpha = sum Phi^{mu nu}_alpha a^+_mu b^+_nu.
"""

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import unitary_group

from app.core.config import get_settings
from app.core.errors import ContractError, EmptySolutionError
from app.core.logging import get_logger
from app.models.phi import PhiEntry, PhiFamilyFile, PhiMode, RealizabilityVerdict, VerdictKind
from app.models.report import ResidualSet

logger = get_logger(__name__)
settings = get_settings()

# imaginary parts of f above this are reported
_IMAGINARY_RESIDUE = 1e-12


def deformation_parameter(phi: np.ndarray) -> float:
    """
    f = 2 Tr(Phi^+ Phi Phi^+ Phi).

    Args:
        phi: d_a x d_b complex matrix

    Returns:
        float: Real part of f; 0 flags the excluded pure-boson case
    """
    gram = phi.conj().T @ phi
    value = 2.0 * np.trace(gram @ gram)
    if abs(value.imag) > _IMAGINARY_RESIDUE:
        logger.warning("Deformation parameter has an imaginary residue", imaginary=float(value.imag))
    return float(value.real)


@dataclass(frozen=True)
class PhiFamily:
    """
    Ordered Phi matrices plus the constituent deformation they are meant for.

    Attributes:
        matrices: Tuple of d_a x d_b complex arrays
        q: Deformation of the constituents
        f: Deformation parameter of the first matrix (0 for an empty family)
    """

    matrices: Tuple[np.ndarray, ...] = field(compare=False)
    q: float = 1.0
    f: float = field(init=False)

    def __post_init__(self):
        shapes = {m.shape for m in self.matrices}
        if len(shapes) > 1:
            raise ContractError(f"family matrices disagree in shape: {sorted(shapes)}")
        if any(m.ndim != 2 for m in self.matrices):
            raise ContractError("family matrices must be two-dimensional")
        object.__setattr__(self, "matrices", tuple(np.asarray(m, dtype=complex) for m in self.matrices))
        f = deformation_parameter(self.matrices[0]) if self.matrices else 0.0
        object.__setattr__(self, "f", f)

    @classmethod
    def of(cls, matrices: Sequence[np.ndarray], q: float = 1.0) -> "PhiFamily":
        return cls(matrices=tuple(np.asarray(m, dtype=complex) for m in matrices), q=q)

    def __len__(self) -> int:
        return len(self.matrices)

    @property
    def shape(self) -> Tuple[int, int]:
        if not self.matrices:
            raise ContractError("empty family has no shape")
        return self.matrices[0].shape

    @property
    def d_a(self) -> int:
        return self.shape[0]

    @property
    def d_b(self) -> int:
        return self.shape[1]

    @property
    def deformations(self) -> List[float]:
        return [deformation_parameter(m) for m in self.matrices]

    def with_phases(self, phases: Sequence[float]) -> "PhiFamily":
        """Copy with Phi_alpha multiplied by exp(i phases[alpha])."""
        return PhiFamily.of([m * np.exp(1j * t) for m, t in zip(self.matrices, phases)], q=self.q)

    def summary(self) -> Dict[str, object]:
        return {
            "modes": len(self),
            "d_a": self.d_a if self.matrices else 0,
            "d_b": self.d_b if self.matrices else 0,
            "q": self.q,
            "f": self.f,
        }

    def to_file(self) -> PhiFamilyFile:
        """Serializable form; every nonzero entry is written, so from_file restores the matrices exactly."""
        modes = []
        for alpha, matrix in enumerate(self.matrices, start=1):
            entries = [
                PhiEntry(mu=mu + 1, nu=nu + 1, re=float(matrix[mu, nu].real), im=float(matrix[mu, nu].imag))
                for mu, nu in zip(*np.nonzero(matrix))
            ]
            modes.append(PhiMode(alpha=alpha, entries=entries))
        return PhiFamilyFile(d_a=self.d_a, d_b=self.d_b, q=self.q, modes=modes)

    @classmethod
    def from_file(cls, data: PhiFamilyFile) -> "PhiFamily":
        matrices = []
        for mode in sorted(data.modes, key=lambda m: m.alpha):
            matrix = np.zeros((data.d_a, data.d_b), dtype=complex)
            for entry in mode.entries:
                matrix[entry.mu - 1, entry.nu - 1] += complex(entry.re, entry.im)
            matrices.append(matrix)
        return cls.of(matrices, q=data.q)


def check_constraint_system(family: PhiFamily, tolerance: Optional[float] = None) -> ResidualSet:
    """
    Residuals of the q = 1 constraint system.

    (i) Tr(Phi_a Phi_b^+) - delta_ab, (ii) Phi_a Phi_a^+ Phi_a - (f/2) Phi_a,
    (iii) Phi_b Phi_a^+ Phi_c + Phi_c Phi_a^+ Phi_b for a != b; plus the spread of
    f across the family. Frobenius norms for the matrix equations.

    Raises:
        ContractError: If the family is empty or shapes disagree
    """
    tol = tolerance or settings.strong_tolerance
    if not family.matrices:
        raise ContractError("constraint system of an empty family")
    phis = family.matrices
    half_f = family.f / 2.0

    normalization = max(
        abs(np.trace(pa @ pb.conj().T) - (1.0 if a == b else 0.0))
        for (a, pa), (b, pb) in itertools.product(enumerate(phis), repeat=2)
    )
    cubic = max(np.linalg.norm(p @ p.conj().T @ p - half_f * p) for p in phis)
    mixed = 0.0
    for a, b, c in itertools.product(range(len(phis)), repeat=3):
        if a == b:
            continue
        pa_dag = phis[a].conj().T
        mixed = max(mixed, np.linalg.norm(phis[b] @ pa_dag @ phis[c] + phis[c] @ pa_dag @ phis[b]))
    spread = max(abs(f - family.f) for f in family.deformations)

    results = ResidualSet(name="constraint_system", reference="matrix system for q = 1 realizations")
    n = len(phis)
    results.add("normalization", normalization, tol, reference="Tr(Phi_a Phi_b^+) = delta_ab", states=n * n)
    results.add("cubic_relation", cubic, tol, reference="Phi Phi^+ Phi = (f/2) Phi", states=n)
    results.add("mixed_cubic_relation", mixed, tol, reference="Phi_b Phi_a^+ Phi_c + Phi_c Phi_a^+ Phi_b = 0", states=n ** 3)
    results.add("deformation_uniformity", spread, tol, reference="common f across modes", states=n)
    return results


def _is_unitary(u: np.ndarray) -> bool:
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    deviation = np.abs(u @ u.conj().T - np.eye(u.shape[0])).max()
    return bool(deviation <= settings.unitarity_tolerance)


def generate_family(
    d_a: int,
    d_b: int,
    m: int,
    n_modes: int,
    u1: Optional[np.ndarray] = None,
    u2: Optional[np.ndarray] = None,
    blocks: Optional[Sequence[np.ndarray]] = None,
    q: float = 1.0,
) -> PhiFamily:
    """
    General q = 1 solution Phi_alpha = U1 diag{0, sqrt(f/2) U_alpha, 0} U2^+ with f = 2/m.

    Block alpha (0-based) occupies rows and columns [alpha m, (alpha + 1) m).

    Args:
        d_a, d_b: Constituent mode counts
        m: Block rank
        n_modes: Number of quasiboson modes
        u1, u2: d_a- and d_b-unitaries (identities when omitted)
        blocks: n_modes m x m unitaries (identities when omitted)
        q: Constituent deformation stored on the family

    Raises:
        EmptySolutionError: If n_modes * m > min(d_a, d_b)
        ContractError: If an input is not unitary or has the wrong size
    """
    if m < 1 or n_modes < 1:
        raise ContractError(f"block rank and mode count must be positive, got m={m}, n_modes={n_modes}")
    if n_modes * m > min(d_a, d_b):
        raise EmptySolutionError(
            f"{n_modes} blocks of rank {m} need min(d_a, d_b) >= {n_modes * m}, got {min(d_a, d_b)}"
        )
    u1 = np.eye(d_a, dtype=complex) if u1 is None else np.asarray(u1, dtype=complex)
    u2 = np.eye(d_b, dtype=complex) if u2 is None else np.asarray(u2, dtype=complex)
    blocks = [np.eye(m, dtype=complex)] * n_modes if blocks is None else [np.asarray(b, dtype=complex) for b in blocks]

    if u1.shape != (d_a, d_a) or not _is_unitary(u1):
        raise ContractError("U1 must be a d_a x d_a unitary")
    if u2.shape != (d_b, d_b) or not _is_unitary(u2):
        raise ContractError("U2 must be a d_b x d_b unitary")
    if len(blocks) != n_modes or any(b.shape != (m, m) or not _is_unitary(b) for b in blocks):
        raise ContractError(f"blocks must be {n_modes} unitaries of size {m} x {m}")

    scale = np.sqrt(1.0 / m)
    matrices = []
    for alpha, block in enumerate(blocks):
        core = np.zeros((d_a, d_b), dtype=complex)
        core[alpha * m:(alpha + 1) * m, alpha * m:(alpha + 1) * m] = scale * block
        matrices.append(u1 @ core @ u2.conj().T)

    family = PhiFamily.of(matrices, q=q)
    logger.debug("Block family generated", d_a=d_a, d_b=d_b, m=m, n_modes=n_modes, f=family.f)
    return family


def _random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    if dim == 1:
        return np.array([[np.exp(2j * np.pi * rng.uniform())]])
    return unitary_group.rvs(dim, random_state=rng)


def seeded_unitary(dim: int, seed: Optional[int] = None) -> np.ndarray:
    """Haar-random dim x dim unitary; the identity when seed is None."""
    if seed is None:
        return np.eye(dim, dtype=complex)
    return _random_unitary(dim, np.random.default_rng(seed))


def random_family(d_a: int, d_b: int, m: int, n_modes: int, seed: Optional[int] = None, q: float = 1.0) -> PhiFamily:
    """
    generate_family with Haar-random U1, U2 and blocks; identities when seed is None.

    The same seed always yields the same family.
    """
    if seed is None:
        return generate_family(d_a, d_b, m, n_modes, q=q)
    if n_modes * m > min(d_a, d_b):
        raise EmptySolutionError(
            f"{n_modes} blocks of rank {m} need min(d_a, d_b) >= {n_modes * m}, got {min(d_a, d_b)}"
        )
    rng = np.random.default_rng(seed)
    u1 = _random_unitary(d_a, rng)
    u2 = _random_unitary(d_b, rng)
    blocks = [_random_unitary(m, rng) for _ in range(n_modes)]
    return generate_family(d_a, d_b, m, n_modes, u1=u1, u2=u2, blocks=blocks, q=q)


def nondegenerate_family(u: np.ndarray, q: float = 1.0) -> PhiFamily:
    """Single mode Phi = U / sqrt(d) for a d x d unitary: f = 2/d."""
    u = np.asarray(u, dtype=complex)
    if not _is_unitary(u):
        raise ContractError("nondegenerate family needs a square unitary")
    return PhiFamily.of([u / np.sqrt(u.shape[0])], q=q)


def one_hot_family(
    d_a: int,
    d_b: int,
    positions: Sequence[Tuple[int, int]],
    phases: Optional[Sequence[float]] = None,
    q: float = 1.0,
) -> PhiFamily:
    """Family of unit entries at 0-based (mu, nu) positions, optionally phased."""
    phases = list(phases) if phases is not None else [0.0] * len(positions)
    matrices = []
    for (mu, nu), theta in zip(positions, phases):
        if not (0 <= mu < d_a and 0 <= nu < d_b):
            raise ContractError(f"one-hot position ({mu}, {nu}) outside {d_a}x{d_b}")
        matrix = np.zeros((d_a, d_b), dtype=complex)
        matrix[mu, nu] = np.exp(1j * theta)
        matrices.append(matrix)
    return PhiFamily.of(matrices, q=q)


def _top_two_product(moduli: np.ndarray) -> float:
    """Largest product of two distinct entries of a 1-d array."""
    if moduli.size < 2:
        return 0.0
    top = np.sort(moduli)[-2:]
    return float(top[0] * top[1])


def one_hot_position(phi: np.ndarray, tolerance: Optional[float] = None) -> Optional[Tuple[int, int]]:
    """0-based position of the single structural entry, or None when there is not exactly one."""
    tol = tolerance or settings.one_hot_tolerance
    moduli = np.abs(phi)
    scale = moduli.max() if moduli.size else 0.0
    if scale == 0.0:
        return None
    support = np.argwhere(moduli > tol * scale)
    if len(support) != 1:
        return None
    return int(support[0][0]), int(support[0][1])


def check_q_structure(family: PhiFamily, tolerance: Optional[float] = None) -> ResidualSet:
    """
    Structure conditions for q < 1 constituents.

    Mode independence in its row and column forms, single entries per row,
    per column and across distinct rows and columns, cross-family disjointness,
    and unit modulus of each one-hot entry.
    """
    tol = tolerance or settings.strong_tolerance
    if not family.matrices:
        raise ContractError("q-structure of an empty family")
    phis = family.matrices

    rows_form = 0.0
    cols_form = 0.0
    disjoint = 0.0
    for a, b in itertools.combinations(range(len(phis)), 2):
        pa, pb = phis[a], phis[b]
        row_terms = np.einsum("ij,ik->ijk", pa, pb) - np.einsum("ik,ij->ijk", pa, pb)
        col_terms = np.einsum("ij,kj->ikj", pa, pb) - np.einsum("kj,ij->ikj", pa, pb)
        rows_form = max(rows_form, float(np.abs(row_terms).max()))
        cols_form = max(cols_form, float(np.abs(col_terms).max()))
        ma, mb = np.abs(pa), np.abs(pb)
        same_row = np.einsum("ij,ik->ijk", ma, mb).max()
        same_col = np.einsum("ij,kj->ikj", ma, mb).max()
        disjoint = max(disjoint, float(same_row), float(same_col))

    per_row = 0.0
    per_col = 0.0
    off_pairs = 0.0
    unit_modulus = 0.0
    for phi in phis:
        moduli = np.abs(phi)
        per_row = max(per_row, max(_top_two_product(row) for row in moduli))
        per_col = max(per_col, max(_top_two_product(col) for col in moduli.T))
        outer = np.einsum("ij,kl->ijkl", moduli, moduli)
        d_a, d_b = moduli.shape
        mask = (~np.eye(d_a, dtype=bool))[:, None, :, None] & (~np.eye(d_b, dtype=bool))[None, :, None, :]
        off_pairs = max(off_pairs, float(outer[mask].max()) if mask.any() else 0.0)
        unit_modulus = max(unit_modulus, abs(1.0 - float(moduli.max())))

    results = ResidualSet(name="q_structure", reference="matrix conditions for q < 1 realizations")
    pairs = len(phis) * (len(phis) - 1) // 2
    results.add("independence_row_form", rows_form, tol, reference="mode independence, shared row index", states=pairs)
    results.add("independence_column_form", cols_form, tol, reference="mode independence, shared column index", states=pairs)
    results.add("single_entry_per_row", per_row, tol, states=len(phis))
    results.add("single_entry_per_column", per_col, tol, states=len(phis))
    results.add("single_entry_distinct_rows_columns", off_pairs, tol, states=len(phis))
    results.add("cross_family_disjointness", disjoint, tol, states=pairs)
    results.add("unit_modulus", unit_modulus, tol, states=len(phis))
    return results


def classify(family: PhiFamily, q: Optional[float] = None) -> RealizabilityVerdict:
    """
    Decide whether a family realizes a deformed oscillator for constituents of deformation q.

    q = 1: the constraint system must hold and 2/f must be a positive integer.
    q < 1: every matrix must be one-hot with unit modulus at disjoint rows and columns.
    f = 0 is never realizable.

    Raises:
        ContractError: If the family is empty
    """
    q = family.q if q is None else q
    if not family.matrices:
        raise ContractError("cannot classify an empty family")

    if abs(family.f) <= settings.strong_tolerance:
        return RealizabilityVerdict(
            verdict=VerdictKind.NOT_REALIZABLE,
            reasons=["pure boson unsuitable: f = 0"],
            evidence={"f": family.f},
        )

    if q == 1.0:
        residuals = check_constraint_system(family)
        evidence = {e.label: e.value for e in residuals.residuals}
        if not residuals.passed:
            return RealizabilityVerdict(verdict=VerdictKind.NOT_REALIZABLE, reasons=residuals.failures, evidence=evidence)
        m_real = 2.0 / family.f
        m = int(round(m_real))
        if m < 1 or abs(m_real - m) > 1e-9:
            return RealizabilityVerdict(
                verdict=VerdictKind.NOT_REALIZABLE,
                reasons=["f_quantization"],
                evidence={**evidence, "two_over_f": m_real},
            )
        return RealizabilityVerdict(verdict=VerdictKind.REALIZABLE_Q1, m=m, evidence=evidence)

    residuals = check_q_structure(family)
    evidence = {e.label: e.value for e in residuals.residuals}
    if not residuals.passed:
        return RealizabilityVerdict(verdict=VerdictKind.NOT_REALIZABLE, reasons=residuals.failures, evidence=evidence)
    positions = []
    for alpha, phi in enumerate(family.matrices, start=1):
        mu, nu = one_hot_position(phi)
        positions.append((alpha, mu + 1, nu + 1))
    return RealizabilityVerdict(verdict=VerdictKind.REALIZABLE_QLT1, positions=positions, evidence=evidence)
