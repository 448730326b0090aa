"""
Exact expansion coefficients of (A^+)^n on two a-modes and two b-modes,
the normal-ordered expansion of A (A^+)^n, and the one- and two-mode systems
that single out phi(n) = [n]^2 for q < 1.

(A^+)^n = (-1)^{n(n-1)/2} sum_{k,l} C_n^{kl} (a2^+)^k (a1^+)^{n-k} (b2^+)^l (b1^+)^{n-l}
C_n^{kl} = sum_j P_n^{kl}(j) Phi22^j Phi21^{k-j} Phi12^{l-j} Phi11^{n-k-l+j}

P-coefficients are exact Python ints.
"""

import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import sparse

from app.core.config import get_settings
from app.core.errors import ContractError, DomainError, NotCoveredError, RangeError
from app.core.logging import get_logger
from app.models.fock import ModeFamily, ModeSpec
from app.models.report import ResidualSet
from app.services.dsf import qfermionic_dsf
from app.services.fock import (
    FockSpace,
    annihilation_operator,
    build_space,
    creation_operator,
    q_bracket,
    restricted_norm,
)
from app.services.quasiboson import build_quasiboson

logger = get_logger(__name__)
settings = get_settings()

PKey = Tuple[int, int, int, int]

# (k, l, j) patterns with a closed form
CLOSED_FORM_PATTERNS = (
    (0, 1, 0), (1, 0, 0),
    (1, 1, 0), (1, 1, 1),
    (0, 2, 0), (2, 0, 0),
    (1, 2, 0), (2, 1, 0),
    (1, 2, 1), (2, 1, 1),
    (2, 2, 0), (2, 2, 1), (2, 2, 2),
)


def _sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


def reorder_sign(n: int) -> int:
    """(-1)^{n(n-1)/2}: moving every b^+ right of every a^+ in (a^+ b^+)^n."""
    return _sign(n * (n - 1) // 2)


def j_range(n: int, k: int, l: int) -> range:
    """Indices j with possibly nonzero P_n^{kl}(j)."""
    return range(max(0, k + l - n), min(k, l) + 1)


class PTable:
    """
    P_n^{kl}(j) for 1 <= n <= n_max.

    Entries outside 0 <= k, l <= n or outside j_range read as 0.
    """

    def __init__(self, n_max: int, entries: Dict[PKey, int]):
        self.n_max = n_max
        self._entries = entries

    def get(self, n: int, k: int, l: int, j: int) -> int:
        if not (1 <= n <= self.n_max):
            raise RangeError(f"P-table holds n = 1..{self.n_max}, got {n}")
        return self._entries.get((n, k, l, j), 0)

    def entries(self) -> Iterator[Tuple[PKey, int]]:
        yield from sorted(self._entries.items())

    def __len__(self) -> int:
        return len(self._entries)

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {"n": n, "k": k, "l": l, "j": j, "value": value}
            for (n, k, l, j), value in self.entries()
        ]
        return pd.DataFrame(rows, columns=["n", "k", "l", "j", "value"])


def _first_level() -> Dict[PKey, int]:
    return {(1, 0, 0, 0): 1, (1, 0, 1, 0): 1, (1, 1, 0, 0): 1, (1, 1, 1, 1): 1}


def _next_level(table: PTable, n: int) -> Dict[PKey, int]:
    m = n + 1
    P = table.get
    level = {(m, 0, 0, 0): 1, (m, 0, m, 0): 1, (m, m, 0, 0): 1, (m, m, m, m): 1}
    for l in range(1, m):
        level[(m, 0, l, 0)] = P(n, 0, l, 0) + _sign(n + l - 1) * P(n, 0, l - 1, 0)
    for k in range(1, m):
        level[(m, k, 0, 0)] = P(n, k, 0, 0) + _sign(n + k - 1) * P(n, k - 1, 0, 0)
    for l in range(1, m):
        level[(m, m, l, l)] = P(n, n, l, l) + _sign(n + l - 1) * P(n, n, l - 1, l - 1)
    for k in range(1, m):
        level[(m, k, m, k)] = P(n, k, n, k) + _sign(n + k - 1) * P(n, k - 1, n, k - 1)
    for k in range(1, m):
        for l in range(1, m):
            for j in j_range(m, k, l):
                level[(m, k, l, j)] = (
                    P(n, k, l, j)
                    + _sign(n + k - 1) * P(n, k - 1, l, j)
                    + _sign(n + l - 1) * P(n, k, l - 1, j)
                    + _sign(k + l) * P(n, k - 1, l - 1, j - 1)
                )
    return level


def p_table(n_max: int) -> PTable:
    """
    Build P_n^{kl}(j) for n <= n_max from the level recurrences.

    Raises:
        DomainError: If n_max < 1
    """
    if n_max < 1:
        raise DomainError(f"P-table needs n_max >= 1, got {n_max}")
    entries = _first_level()
    for n in range(1, n_max):
        entries.update(_next_level(PTable(n, entries), n))
    logger.debug("P-table built", n_max=n_max, entries=len(entries))
    return PTable(n_max, entries)


def p_closed_form(n: int, k: int, l: int, j: int) -> int:
    """
    Closed form of P_n^{kl}(j) for the patterns in CLOSED_FORM_PATTERNS.

    Raises:
        DomainError: If n < 1
        NotCoveredError: For any other (k, l, j)
    """
    if n < 1:
        raise DomainError(f"closed forms need n >= 1, got {n}")
    odd = n % 2
    pattern = (k, l, j)
    if pattern in ((0, 1, 0), (1, 0, 0)):
        return odd
    if pattern == (1, 1, 0):
        return -n + odd
    if pattern == (1, 1, 1):
        return n
    if pattern in ((0, 2, 0), (2, 0, 0)):
        return (2 * n + _sign(n) - 1) // 4

    # the remaining forms are stated for level N + 1
    N = n - 1
    even = N % 2 == 0
    if pattern in ((1, 2, 0), (2, 1, 0)):
        return 3 * N // 2 if even else 0
    if pattern in ((1, 2, 1), (2, 1, 1)):
        return -N if even else 0
    if pattern == (2, 2, 0):
        return 3 * N * (N - 2) // 4 if even else (3 * N * N - 3) // 4
    if pattern == (2, 2, 1):
        return N - N * N if even else 1 - N * N
    if pattern == (2, 2, 2):
        return N * (N + 1) // 2
    raise NotCoveredError(f"no closed form for P^{{{k}{l}}}({j})")


def check_closed_forms(table: PTable, tolerance: Optional[float] = None) -> ResidualSet:
    """Integer mismatch between the table and every covered closed form, plus the boundary-zero rule."""
    tol = tolerance or settings.strong_tolerance
    results = ResidualSet(name="p_closed_forms", reference="explicit solutions of the P-coefficient recurrences")
    for k, l, j in CLOSED_FORM_PATTERNS:
        mismatch = max(abs(table.get(n, k, l, j) - p_closed_form(n, k, l, j)) for n in range(1, table.n_max + 1))
        results.add(f"closed_form_P{k}{l}_j{j}", mismatch, tol, states=table.n_max)

    outside = 0
    for n in range(1, table.n_max + 1):
        for k in range(n + 1):
            for l in range(n + 1):
                allowed = j_range(n, k, l)
                for j in range(-1, n + 2):
                    if j not in allowed:
                        outside = max(outside, abs(table.get(n, k, l, j)))
    results.add("boundary_zero", outside, tol, reference="P vanishes outside max(0, k+l-n) <= j <= min(k, l)")
    return results


@dataclass(frozen=True, eq=False)
class CTable:
    """C_n^{kl}(Phi) for a 2 x 2 Phi and n <= n_max."""

    n_max: int
    values: Dict[Tuple[int, int, int], complex] = field(repr=False)

    def get(self, n: int, k: int, l: int) -> complex:
        if not (1 <= n <= self.n_max):
            raise RangeError(f"C-table holds n = 1..{self.n_max}, got {n}")
        return self.values.get((n, k, l), 0j)


def _check_two_by_two(phi: np.ndarray) -> np.ndarray:
    phi = np.asarray(phi, dtype=complex)
    if phi.shape != (2, 2):
        raise ContractError(f"two-mode expansion needs a 2 x 2 Phi, got shape {phi.shape}")
    return phi


def c_table(phi: np.ndarray, n_max: int, table: Optional[PTable] = None) -> CTable:
    """
    Evaluate C_n^{kl}(Phi) from the P-table; Phi^{mu nu} is phi[mu - 1, nu - 1].

    Raises:
        ContractError: If Phi is not 2 x 2
    """
    phi = _check_two_by_two(phi)
    table = table or p_table(n_max)
    p11, p12, p21, p22 = phi[0, 0], phi[0, 1], phi[1, 0], phi[1, 1]
    values = {}
    for n in range(1, n_max + 1):
        for k in range(n + 1):
            for l in range(n + 1):
                values[(n, k, l)] = complex(sum(
                    table.get(n, k, l, j) * p22 ** j * p21 ** (k - j) * p12 ** (l - j) * p11 ** (n - k - l + j)
                    for j in j_range(n, k, l)
                ))
    return CTable(n_max=n_max, values=values)


def c_oracle(phi: np.ndarray, q: float, n: int) -> Dict[Tuple[int, int], complex]:
    """
    Project (A^+)^n|O> onto the states (a2^+)^k (a1^+)^{n-k} (b2^+)^l (b1^+)^{n-l}|O>.

    Returns the coefficients divided by (-1)^{n(n-1)/2}; null basis states (q = 1, k >= 2) are omitted.

    Raises:
        ContractError: If Phi is not 2 x 2
    """
    phi = _check_two_by_two(phi)
    spec = ModeSpec(d_a=2, d_b=2, q=q, cutoff=max(n, 1))
    space = build_space(spec)
    pair = build_quasiboson(space, phi)
    state = space.vacuum()
    for _ in range(n):
        state = pair.A_dag.apply(state)

    a1, a2 = (creation_operator(space, ModeFamily.A, i).matrix for i in range(2))
    b1, b2 = (creation_operator(space, ModeFamily.B, i).matrix for i in range(2))
    coefficients = {}
    for k in range(n + 1):
        for l in range(n + 1):
            basis = space.vacuum()
            for operator, power in ((b1, n - l), (b2, l), (a1, n - k), (a2, k)):
                for _ in range(power):
                    basis = operator @ basis
            norm_sq = float(np.vdot(basis, basis).real)
            if norm_sq <= settings.rank_tolerance:
                continue
            coefficients[(k, l)] = complex(np.vdot(basis, state)) / norm_sq * reorder_sign(n)
    return coefficients


def _ordered_product(operators: Sequence[sparse.csr_matrix], dim: int) -> sparse.csr_matrix:
    result = sparse.identity(dim, dtype=complex, format="csr")
    for operator in operators:
        result = result @ operator
    return result


def _contraction(
    creations: Sequence[sparse.csr_matrix],
    indices: Tuple[int, ...],
    target: int,
    q: float,
    dim: int,
) -> sparse.csr_matrix:
    """sum_i (-1)^{i-1} delta(target, m_i) q^{#(s < i: m_s = target)} prod_{r != i} c^+_{m_r}."""
    total = sparse.csr_matrix((dim, dim), dtype=complex)
    seen = 0
    for i, index in enumerate(indices):
        if index == target:
            rest = [creations[m] for r, m in enumerate(indices) if r != i]
            total = total + _sign(i) * q ** seen * _ordered_product(rest, dim)
            seen += 1
    return total


def expand_annihilation_product(space: FockSpace, phi: np.ndarray, q: float, n: int) -> ResidualSet:
    """
    Normal-ordered expansion of A (A^+)^n against the direct matrix product.

    A (A^+)^n = s_n sum conj(Phi^{mu nu}) prod_j Phi^{mu_j nu_j}
        { X_a [(-1)^{n-1} X_b - q^{#nu} P_b b_nu]
          + q^{#mu} P_a [(-1)^n X_b + q^{#nu} P_b b_nu] a_mu }
    with P_a = prod a^+_{mu_j}, X_a the single contraction of a_mu with P_a,
    #mu the multiplicity of mu in (mu_1..mu_n), and s_n = (-1)^{n(n-1)/2}.

    Returns:
        ResidualSet: Spectral norm of the difference on the depth-n interior

    Raises:
        DomainError: If n < 1
        ContractError: On occupancy overflow or a Phi of the wrong shape
    """
    if n < 1:
        raise DomainError(f"expansion needs n >= 1, got {n}")
    if abs(q - space.q) > settings.strong_tolerance:
        raise ContractError(f"expansion at q = {q} requested on a space with q = {space.q}")
    phi = np.asarray(phi, dtype=complex)
    interior = space.interior_mask(depth=n)
    pair = build_quasiboson(space, phi)
    d_a, d_b, dim = space.spec.d_a, space.spec.d_b, space.dim

    a_dag = [creation_operator(space, ModeFamily.A, mu).matrix for mu in range(d_a)]
    b_dag = [creation_operator(space, ModeFamily.B, nu).matrix for nu in range(d_b)]
    a_low = [annihilation_operator(space, ModeFamily.A, mu).matrix for mu in range(d_a)]
    b_low = [annihilation_operator(space, ModeFamily.B, nu).matrix for nu in range(d_b)]

    mu_tuples = list(itertools.product(range(d_a), repeat=n))
    nu_tuples = list(itertools.product(range(d_b), repeat=n))
    p_a = {mus: _ordered_product([a_dag[m] for m in mus], dim) for mus in mu_tuples}

    # b-side brackets, per (nu_1..nu_n, nu)
    minus, plus = {}, {}
    for nus in nu_tuples:
        p_b = _ordered_product([b_dag[m] for m in nus], dim)
        for nu in range(d_b):
            x_b = _contraction(b_dag, nus, nu, q, dim)
            tail = q ** nus.count(nu) * (p_b @ b_low[nu])
            minus[nus, nu] = _sign(n - 1) * x_b - tail
            plus[nus, nu] = _sign(n) * x_b + tail

    total = sparse.csr_matrix((dim, dim), dtype=complex)
    for mus in mu_tuples:
        for nu in range(d_b):
            y_minus = sparse.csr_matrix((dim, dim), dtype=complex)
            y_plus = sparse.csr_matrix((dim, dim), dtype=complex)
            for nus in nu_tuples:
                weight = np.prod([phi[m, v] for m, v in zip(mus, nus)])
                if weight == 0:
                    continue
                y_minus = y_minus + weight * minus[nus, nu]
                y_plus = y_plus + weight * plus[nus, nu]
            for mu in range(d_a):
                coefficient = np.conj(phi[mu, nu])
                if coefficient == 0:
                    continue
                x_a = _contraction(a_dag, mus, mu, q, dim)
                total = total + coefficient * (
                    x_a @ y_minus + q ** mus.count(mu) * (p_a[mus] @ y_plus @ a_low[mu])
                )
    total = reorder_sign(n) * total

    direct = pair.A.matrix
    for _ in range(n):
        direct = direct @ pair.A_dag.matrix
    residual = restricted_norm(total - direct, interior)

    results = ResidualSet(name="annihilation_expansion", reference="normal-ordered expansion of A (A^+)^n")
    results.add(f"expansion_n{n}", residual, settings.strong_tolerance * 10, states=int(interior.sum()))
    logger.debug("Expansion compared", n=n, q=q, residual=residual)
    return results


def check_example1(q: float, cutoff: int, tolerance: Optional[float] = None) -> ResidualSet:
    """
    Single a-mode and single b-mode: A A^+ (A^+)^n|O> = [n+1]^2 (A^+)^n|O> for n <= cutoff - 1.

    Raises:
        DomainError: If q is not below 1
    """
    if not (-1.0 < q < 1.0):
        raise DomainError(f"single-mode system is for -1 < q < 1, got {q}")
    tol = tolerance or settings.default_tolerance
    space = build_space(ModeSpec(d_a=1, d_b=1, q=q, cutoff=cutoff))
    pair = build_quasiboson(space, np.ones((1, 1)))
    results = ResidualSet(name="single_mode_system", reference="A A^+ on single-mode ladder states")

    state = space.vacuum()
    for n in range(cutoff):
        image = pair.A.apply(pair.A_dag.apply(state))
        expected = q_bracket(n + 1, q) ** 2
        norm = float(np.linalg.norm(state))
        recovered = float(np.vdot(state, image).real) / norm ** 2
        results.add(
            f"single_mode_n{n}",
            np.linalg.norm(image - expected * state) / norm,
            tol,
            states=1,
            note=f"eigenvalue {recovered:.12g}",
        )
        state = pair.A_dag.apply(state)
    return results


def _relabel(phi: np.ndarray) -> Tuple[np.ndarray, Tuple[int, int]]:
    """Swap rows/columns so the largest |entry| sits at Phi^{11}; ties keep the first."""
    mu, nu = np.unravel_index(int(np.argmax(np.abs(phi))), phi.shape)
    rows = [mu, 1 - mu]
    cols = [nu, 1 - nu]
    return phi[np.ix_(rows, cols)], (int(mu), int(nu))


def two_mode_structure_function(phi: np.ndarray, q: float, n: int) -> complex:
    """phi(n) read off the k = l = 0 equations of the two-mode system; needs Phi^{11} != 0."""
    p11, p12, p21, p22 = phi[0, 0], phi[0, 1], phi[1, 0], phi[1, 1]
    odd = n % 2
    bracket = q_bracket(n, q)
    return (
        (odd - n) * np.conj(p22) * p21 * p12 / p11
        + n * abs(p22) ** 2
        + odd * bracket * (abs(p21) ** 2 + abs(p12) ** 2)
        + bracket ** 2 * abs(p11) ** 2
    )


def two_mode_group(k: int, l: int) -> str:
    return {
        (0, 0): "phi_extraction",
        (1, 0): "row_condition",
        (0, 1): "column_condition",
        (1, 1): "diagonal_condition",
    }[min(k, 1), min(l, 1)]


def two_mode_system(phi: np.ndarray, q: float, n_max: int) -> Dict[Tuple[int, int, int], complex]:
    """
    Left sides of the two-mode system A (A^+)^{n+1}|O> = phi(n+1) (A^+)^n|O>, per basis state (k, l).

    Phi is relabelled first so that its largest entry is Phi^{11}.

    Raises:
        ContractError: If Phi is not 2 x 2 or vanishes
    """
    phi = _check_two_by_two(phi)
    if not np.any(phi):
        raise ContractError("two-mode system needs a nonzero Phi")
    phi, _ = _relabel(phi)
    table = c_table(phi, n_max + 1)
    C = table.get
    p11, p12, p21, p22 = (np.conj(phi[0, 0]), np.conj(phi[0, 1]), np.conj(phi[1, 0]), np.conj(phi[1, 1]))

    def br(m: int) -> float:
        return q_bracket(m, q)

    residuals = {}
    for n in range(1, n_max + 1):
        dsf_next = two_mode_structure_function(phi, q, n + 1)
        for k in range(n + 1):
            for l in range(n + 1):
                residuals[(n, k, l)] = (
                    br(k + 1) * br(l + 1) * p22 * C(n + 1, k + 1, l + 1)
                    + _sign(l) * br(k + 1) * br(n + 1 - l) * p21 * C(n + 1, k + 1, l)
                    + _sign(k) * br(n + 1 - k) * br(l + 1) * p12 * C(n + 1, k, l + 1)
                    + _sign(k + l) * br(n + 1 - k) * br(n + 1 - l) * p11 * C(n + 1, k, l)
                    - dsf_next * C(n, k, l)
                )
    return residuals


def diagonal_coefficients(q: float, n: int) -> Tuple[float, float]:
    """Coefficients (g3, g9) of the (1, 1) equation for diagonal Phi."""
    g3 = (q_bracket(2, q) ** 2 / 2 - 1) * n * (n + 1)
    g9 = q_bracket(n, q) ** 2 * (n + 1) - q_bracket(n + 1, q) ** 2 * n
    return g3, g9


def diagonal_reduced_condition(phi: np.ndarray, q: float, n: int) -> complex:
    """
    The (n, 1, 1) equation for Phi = x e11 + y e22:
    y x^{n-1} (g3 |y|^2 + g9 |x|^2).
    """
    phi = _check_two_by_two(phi)
    x, y = phi[0, 0], phi[1, 1]
    g3, g9 = diagonal_coefficients(q, n)
    return y * x ** (n - 1) * (g3 * abs(y) ** 2 + g9 * abs(x) ** 2)


def check_example2(phi: np.ndarray, q: float, n_max: int, tolerance: Optional[float] = None) -> ResidualSet:
    """
    Residual of every (n, k, l) equation of the two-mode system, n <= n_max,
    labelled by group, and the deviation of the extracted phi(n) from [n]^2.

    Raises:
        DomainError: If q is not below 1
    """
    if not (-1.0 < q < 1.0):
        raise DomainError(f"two-mode system is for -1 < q < 1, got {q}")
    tol = tolerance or settings.strong_tolerance
    phi = _check_two_by_two(phi)
    system = two_mode_system(phi, q, n_max)
    relabelled, position = _relabel(phi)

    results = ResidualSet(name="two_mode_system", reference="two-mode equations for A (A^+)^{n+1}|O>")
    for (n, k, l), value in system.items():
        results.add(f"{two_mode_group(k, l)}_n{n}_k{k}_l{l}", abs(value), tol, states=1)
    for n in range(1, n_max + 2):
        deviation = abs(two_mode_structure_function(relabelled, q, n) - qfermionic_dsf(q, n))
        results.add(f"phi_vs_square_n{n}", deviation, tol)
    if position != (0, 0):
        results.skip("relabel", f"largest entry at ({position[0] + 1}, {position[1] + 1}) moved to (1, 1)")

    logger.debug("Two-mode system evaluated", n_max=n_max, failures=len(results.failures))
    return results


def equal_index_condition(phi: np.ndarray, q: float, values: Sequence[float], n: int) -> Dict[Tuple[int, int], complex]:
    """
    Equal-index consequence of A (A^+)^{n+1}|O> = phi(n+1) (A^+)^n|O>, divided by (Phi^{mu nu})^n,
    for every nonzero entry (mu, nu). Zero for a valid (Phi, phi) pair.

    Args:
        phi: d_a x d_b matrix
        q: Constituent deformation, q < 1
        values: phi(0..n+1)
        n: Level, n >= 1
    """
    phi = np.asarray(phi, dtype=complex)
    triple = phi @ phi.conj().T @ phi
    rows = np.real(np.diag(phi @ phi.conj().T))
    cols = np.real(np.diag(phi.conj().T @ phi))
    sign = _sign(n)
    mixed = 0.5 * (-q) ** n + (q - 1) / (2 * (q + 1)) * q ** n - q / (q + 1) * sign
    diagonal = (q - 1) / (q + 1) * (q ** n - 1) * (q ** n - sign)
    target = values[n + 1] - values[n] - 1

    residuals = {}
    for mu, nu in zip(*np.nonzero(np.abs(phi) > settings.one_hot_tolerance * np.abs(phi).max())):
        entry = phi[mu, nu]
        lhs = (
            (sign - 1) * triple[mu, nu] / entry
            + mixed * (cols[nu] + rows[mu])
            + diagonal * abs(entry) ** 2
        )
        residuals[(int(mu), int(nu))] = lhs - target
    return residuals


def check_equal_index_condition(
    phi: np.ndarray,
    q: float,
    values: Sequence[float],
    n_max: int,
    tolerance: Optional[float] = None,
) -> ResidualSet:
    """
    Maximum equal-index residual per level n = 1..n_max.

    Raises:
        DomainError: If q is not below 1
    """
    if not (-1.0 < q < 1.0):
        raise DomainError(f"equal-index condition is for -1 < q < 1, got {q}")
    tol = tolerance or settings.default_tolerance
    if len(values) < n_max + 2:
        raise RangeError(f"equal-index condition up to n = {n_max} needs phi up to {n_max + 1}")
    results = ResidualSet(name="equal_index_condition", reference="equal-index terms of A (A^+)^{n+1}|O>")
    for n in range(1, n_max + 1):
        residuals = equal_index_condition(phi, q, values, n)
        results.add(f"equal_index_n{n}", max((abs(v) for v in residuals.values()), default=0.0), tol, states=len(residuals))
    return results


def c_table_against_oracle(phi: np.ndarray, q: float, n_max: int, tolerance: Optional[float] = None) -> ResidualSet:
    """Largest |C_n^{kl} - oracle| per level."""
    tol = tolerance or settings.strong_tolerance * 10
    table = c_table(phi, n_max)
    results = ResidualSet(name="c_table_oracle", reference="coefficients of (A^+)^n on the two-mode basis")
    for n in range(1, n_max + 1):
        oracle = c_oracle(phi, q, n)
        mismatch = max((abs(table.get(n, k, l) - value) for (k, l), value in oracle.items()), default=0.0)
        results.add(f"c_table_n{n}", mismatch, tol, states=len(oracle))
    return results


def expansion_levels(space: FockSpace, n_max: int) -> List[int]:
    """Levels n <= n_max whose expansion fits in the space's interior."""
    if space.spec.is_fermionic:
        return list(range(1, n_max + 1))
    return [n for n in range(1, n_max + 1) if n <= space.spec.cutoff]
