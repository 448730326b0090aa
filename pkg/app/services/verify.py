"""
Verification engine: weak equalities on quasiboson ladder states, the
brute-force structure-function oracle, the q = 1 commutator cascade and
operator identities, and the full report for one run configuration.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple
from uuid import uuid4

import numpy as np

from app.core.config import get_settings
from app.core.errors import CapacityError, ConfigError, ContractError, RangeError
from app.core.logging import RunIDContext, VerificationContext, get_logger
from app.models.config import RunConfig
from app.models.dsf import FermionicQuadratic, Parameterized, QFermionSquare, Tabulated
from app.models.report import ResidualSet, Verdict, VerificationReport
from app.services import expansion
from app.services.dsf import (
    check_binomial_recurrence,
    check_three_term,
    dsf_values,
    extract_p_coefficients,
    independence_gram,
    recover_linear_form,
    unified_dsf,
)
from app.services.fock import (
    FockSpace,
    build_space,
    check_nilpotency,
    creation_operator,
    ladder_norm_sq,
    restricted_norm,
    verify_mode_relations,
)
from app.services.phi import PhiFamily, check_constraint_system, check_q_structure, classify, deformation_parameter
from app.services.quasiboson import (
    OperatorPair,
    build_pairs,
    build_quasiboson,
    check_chi_condition,
    commutator,
    delta_operator,
    epsilon_operator,
    mode_counts,
    ladder_basis,
    number_operator,
    operator_power,
)

logger = get_logger(__name__)
settings = get_settings()


def _dsf(spec) -> Callable[[int], float]:
    return lambda n: unified_dsf(spec, n)


def weak_equality_suite(
    space: FockSpace,
    family: PhiFamily,
    spec,
    n_max: int,
    tolerance: Optional[float] = None,
) -> ResidualSet:
    """
    Realization conditions on every non-null ladder state v with at most n_max quanta.

    Per mode alpha, with c the count of alpha in the state's multi-index:
    (A^+A - phi(c)) v, (AA^+ - phi(c+1)) v, [A_alpha, A^+_beta] v for beta != alpha,
    ([N, A^+] - A^+) v when a number operator exists, and the norm law
    ||v||^2 = prod_alpha prod_{k<=c_alpha} phi(k). Residuals are normalized by ||v||.

    Raises:
        ContractError: If n_max + 1 creation steps overflow the truncation
    """
    tol = tolerance or settings.default_tolerance
    space.require_depth(n_max + 1)
    pairs = build_pairs(space, family)
    basis = ladder_basis(space, pairs, n_max)
    phi = _dsf(spec)
    numbers = [number_operator(space, matrix) for matrix in family.matrices]

    results = ResidualSet(name="weak_equalities", reference="realization conditions on n-quasiboson states")
    for level in basis.levels:
        n = level.n
        lowering = raising = independence = number = norm_law = 0.0
        probed = 0
        norms_sq = level.norms_sq()
        for column, multi_index in enumerate(level.multi_indices):
            v = level.vectors[:, column]
            counts = mode_counts(multi_index, len(pairs))
            predicted = math.prod(math.prod(phi(k) for k in range(1, c + 1)) for c in counts)
            norm_law = max(norm_law, abs(norms_sq[column] - predicted))
            if basis.is_null(multi_index):
                continue
            probed += 1
            norm = float(np.linalg.norm(v))
            for alpha, pair in enumerate(pairs):
                c = counts[alpha]
                a_dag_v = pair.A_dag.apply(v)
                lowering = max(lowering, np.linalg.norm(pair.A_dag.apply(pair.A.apply(v)) - phi(c) * v) / norm)
                raising = max(raising, np.linalg.norm(pair.A.apply(a_dag_v) - phi(c + 1) * v) / norm)
                for beta, other in enumerate(pairs):
                    if beta != alpha:
                        mixed = pair.A.apply(other.A_dag.apply(v)) - other.A_dag.apply(pair.A.apply(v))
                        independence = max(independence, np.linalg.norm(mixed) / norm)
                if numbers[alpha] is not None:
                    N = numbers[alpha]
                    shifted = N.apply(a_dag_v) - pair.A_dag.apply(N.apply(v)) - a_dag_v
                    number = max(number, np.linalg.norm(shifted) / norm)

        results.add(f"lowering_n{n}", lowering, tol, reference="A^+A = phi(N)", states=probed)
        results.add(f"raising_n{n}", raising, tol, reference="AA^+ = phi(N+1)", states=probed)
        if len(pairs) > 1:
            results.add(f"independence_n{n}", independence, tol, reference="[A_a, A^+_b] = 0, a != b", states=probed)
        if any(N is not None for N in numbers):
            results.add(f"number_commutator_n{n}", number, tol, reference="[N, A^+] = A^+", states=probed)
        results.add(f"norm_law_n{n}", norm_law, tol, reference="||v||^2 = product of phi", states=len(level.multi_indices))
        if level.null:
            logger.info("Pauli-blocked ladder level", n=n)

    if all(N is None for N in numbers):
        results.skip("number_commutator", "no number operator for this family")
    logger.debug("Weak equalities checked", n_max=n_max, failures=results.failures)
    return results


@dataclass
class OracleResult:
    """
    Empirical structure function of one quasiboson mode.

    Attributes:
        phi: phi_emp(1), phi_emp(2), ... up to the last non-null level
        defects: Non-parallelism defect per level, same indexing
        exhausted_at: First null level, if reached within n_max
    """

    phi: List[float] = field(default_factory=list)
    defects: List[float] = field(default_factory=list)
    exhausted_at: Optional[int] = None

    def value(self, n: int) -> float:
        """phi_emp(n), 0 at and past an exhausted level."""
        if n == 0:
            return 0.0
        if n <= len(self.phi):
            return self.phi[n - 1]
        if self.exhausted_at is not None and n >= self.exhausted_at:
            return 0.0
        raise RangeError(f"oracle probed n <= {len(self.phi)}, got {n}")


def brute_force_phi(space: FockSpace, pair: OperatorPair, n_max: int, rank_tol: Optional[float] = None) -> OracleResult:
    """
    phi_emp(n) = ||(A^+)^n|O>||^2 / ||(A^+)^{n-1}|O>||^2 and the defect
    ||A (A^+)^n|O> - phi_emp(n) (A^+)^{n-1}|O>|| / ||(A^+)^{n-1}|O>||.

    A level whose squared norm drops below rank_tol times the previous one is exhausted.

    Raises:
        ContractError: If n_max creation steps overflow the truncation
    """
    tol = rank_tol or settings.rank_tolerance
    space.require_depth(n_max)
    result = OracleResult()
    previous = space.vacuum()
    previous_norm_sq = 1.0
    for n in range(1, n_max + 1):
        current = pair.A_dag.apply(previous)
        norm_sq = float(np.vdot(current, current).real)
        if norm_sq <= tol * previous_norm_sq:
            result.exhausted_at = n
            break
        value = norm_sq / previous_norm_sq
        defect = np.linalg.norm(pair.A.apply(current) - value * previous) / math.sqrt(previous_norm_sq)
        result.phi.append(value)
        result.defects.append(float(defect))
        previous, previous_norm_sq = current, norm_sq
    return result


def oracle_suite(space: FockSpace, family: PhiFamily, spec, n_max: int, tolerance: Optional[float] = None) -> ResidualSet:
    """Oracle agreement |phi_emp(n) - phi(n)| and parallelism per mode; exhausted levels pass when phi(n) = 0."""
    tol = tolerance or settings.default_tolerance
    results = ResidualSet(name="dsf_oracle", reference="A (A^+)^n|O> = phi(n) (A^+)^{n-1}|O>")
    for pair in build_pairs(space, family):
        oracle = brute_force_phi(space, pair, n_max)
        for n, (value, defect) in enumerate(zip(oracle.phi, oracle.defects), start=1):
            results.add(f"A{pair.label}_phi_n{n}", value - unified_dsf(spec, n), tol, states=1)
            results.add(f"A{pair.label}_parallelism_n{n}", defect, tol, states=1)
        if oracle.exhausted_at is not None:
            n = oracle.exhausted_at
            results.add(
                f"A{pair.label}_pauli_null_n{n}",
                unified_dsf(spec, n),
                tol,
                states=1,
                note="level exhausted; passes when phi(n) = 0",
            )
    return results


def _apply_f_operator(delta, phi: Callable[[int], float], vector: np.ndarray, count: int) -> np.ndarray:
    """F = Delta - 1 + phi(N+1) - phi(N) on a state with N = count."""
    return delta.apply(vector) + (-1.0 + phi(count + 1) - phi(count)) * vector


def commutator_cascade_suite(
    space: FockSpace,
    phi_matrix: np.ndarray,
    spec,
    n_max: int,
    tolerance: Optional[float] = None,
) -> ResidualSet:
    """
    [A^+A, Delta] on ladder states, the [F, A^+] identity and the n-fold commutators
    of F = Delta - 1 + phi(N+1) - phi(N) with A^+ on the vacuum.

    The n-fold commutator applied to |O> is sum_k C(n,k) (-1)^k X^k F X^{n-k}|O>, X = A^+;
    it vanishes for every n exactly when phi obeys the binomial recurrence.

    Raises:
        ContractError: If q != 1
    """
    if not space.spec.is_fermionic:
        raise ContractError("commutator cascade is derived for q = 1")
    tol = tolerance or settings.default_tolerance
    phi_matrix = np.asarray(phi_matrix, dtype=complex)
    phi = _dsf(spec)
    pair = build_quasiboson(space, phi_matrix)
    X = pair.A_dag
    delta = delta_operator(space, phi_matrix, phi_matrix)
    occupation = pair.A_dag @ pair.A
    cubic = phi_matrix @ phi_matrix.conj().T @ phi_matrix
    psi_dag = build_quasiboson(space, cubic).A_dag
    f = deformation_parameter(phi_matrix)

    ladder = [space.vacuum()]
    for _ in range(n_max + 1):
        ladder.append(X.apply(ladder[-1]))
    norms = [float(np.linalg.norm(v)) for v in ladder]

    def scale(n: int) -> float:
        return norms[n] if norms[n] > settings.rank_tolerance else 1.0

    results = ResidualSet(name="commutator_cascade", reference="commutators of F with A^+ and the recurrence they impose")
    comm = commutator(occupation, delta)
    for n in range(n_max + 1):
        results.add(f"occupation_delta_n{n}", np.linalg.norm(comm.apply(ladder[n])) / scale(n), tol, states=1)

    cubic_residual = float(np.linalg.norm(cubic - f / 2 * phi_matrix))
    results.add("cubic_relation", cubic_residual, settings.strong_tolerance, reference="Phi Phi^+ Phi = (f/2) Phi")
    if cubic_residual <= settings.strong_tolerance:
        results.add("occupation_delta_strong", restricted_norm(comm.matrix), settings.strong_tolerance * 10)
    else:
        results.skip("occupation_delta_strong", "cubic relation fails, only the weak form applies")

    for j in range(n_max):
        lhs = _apply_f_operator(delta, phi, ladder[j + 1], j + 1) - X.apply(_apply_f_operator(delta, phi, ladder[j], j))
        second_difference = phi(j + 2) - 2 * phi(j + 1) + phi(j)
        rhs = 2 * psi_dag.apply(ladder[j]) + second_difference * ladder[j + 1]
        results.add(f"f_commutator_identity_n{j}", np.linalg.norm(lhs - rhs) / scale(j), tol, states=1)

    for n in range(1, n_max + 1):
        total = np.zeros(space.dim, dtype=complex)
        for k in range(n + 1):
            inner = _apply_f_operator(delta, phi, ladder[n - k], n - k)
            for _ in range(k):
                inner = X.apply(inner)
            total += math.comb(n, k) * (-1) ** k * inner
        results.add(f"cascade_n{n}", np.linalg.norm(total) / scale(n), tol, states=1)

    logger.debug("Commutator cascade checked", n_max=n_max, failures=results.failures)
    return results


def propositions_suite(
    space: FockSpace,
    phi_matrix: np.ndarray,
    n_max: int = 4,
    tolerance: Optional[float] = None,
) -> ResidualSet:
    """
    Operator identities at q = 1 with N = Delta / f:
    [Delta, A^+] = f A^+, [Delta, A] = -f A, [epsilon, A^+] = -f A^+, [Delta, N] = 0, Delta = Delta^+,
    [A, A^+] = 1 - Delta, [A^+A, epsilon] = 0, [N, A^+] = A^+;
    [(A^+A)^n, A^+] = A^+((A^+A + eps)^n - (A^+A)^n) and [eps^n, A^+] = A^+((eps - f)^n - eps^n);
    the iterated commutators L_0 = N, L_{n+1} = [L_n, A^+] on the vacuum against their closed form.

    Raises:
        ContractError: If q != 1
        DomainError: If f = 0
    """
    if not space.spec.is_fermionic:
        raise ContractError("operator identities are derived for q = 1")
    tol = tolerance or settings.strong_tolerance * 10
    phi_matrix = np.asarray(phi_matrix, dtype=complex)
    pair = build_quasiboson(space, phi_matrix)
    A, X = pair.A, pair.A_dag
    delta = delta_operator(space, phi_matrix, phi_matrix)
    eps = epsilon_operator(space, phi_matrix)
    N = number_operator(space, phi_matrix)
    f = deformation_parameter(phi_matrix)
    identity = space.identity()
    occupation = X @ A

    results = ResidualSet(name="operator_identities", reference="q = 1 identities of Delta, epsilon and N")

    def norm(op) -> float:
        return restricted_norm(op.matrix)

    results.add("delta_raising", norm(commutator(delta, X) - f * X), tol)
    results.add("delta_lowering", norm(commutator(delta, A) + f * A), tol)
    results.add("epsilon_raising", norm(commutator(eps, X) + f * X), tol)
    results.add("delta_hermitian", norm(delta - delta.adjoint()), tol)
    results.add("canonical_deviation", norm(commutator(A, X) + delta - identity), tol)
    results.add("occupation_epsilon", norm(commutator(occupation, eps)), tol)
    if N is None:
        results.skip("number_operator", "f = 0")
    else:
        results.add("delta_number", norm(commutator(delta, N)), tol)
        results.add("number_raising", norm(commutator(N, X) - X), tol)

    for n in range(1, n_max + 1):
        lhs = commutator(operator_power(occupation, n), X)
        rhs = X @ (operator_power(occupation + eps, n) - operator_power(occupation, n))
        results.add(f"occupation_power_n{n}", norm(lhs - rhs), tol)
        lhs = commutator(operator_power(eps, n), X)
        rhs = X @ (operator_power(eps - f * identity, n) - operator_power(eps, n))
        results.add(f"epsilon_power_n{n}", norm(lhs - rhs), tol)

    if N is not None:
        vacuum = space.vacuum()
        L = N
        iterated = [L.apply(vacuum)]
        for n in range(1, n_max + 1):
            L = commutator(L, X)
            iterated.append(L.apply(vacuum))
            # chi(A^+A + n eps - s_n f, eps - n f) = N + n for chi(x, y) = (1 - y) / f
            closed = operator_power(X, n).apply((N + n * identity).apply(vacuum))
            for k in range(n):
                closed = closed - math.comb(n, k) * operator_power(X, n - k).apply(iterated[k])
            results.add(f"iterated_commutator_n{n}", np.linalg.norm(iterated[n] - closed), tol, states=1)
            expected = X.apply(vacuum) if n == 1 else np.zeros(space.dim, dtype=complex)
            results.add(f"number_ladder_n{n}", np.linalg.norm(iterated[n] - expected), tol, states=1)

    logger.debug("Operator identities checked", failures=results.failures)
    return results


def number_operator_suite(
    space: FockSpace,
    family: PhiFamily,
    spec,
    n_max: int,
    tolerance: Optional[float] = None,
) -> ResidualSet:
    """chi conditions plus the constructed N on ladder states and against other modes."""
    tol = tolerance or settings.default_tolerance
    results = check_chi_condition(spec, n_max)
    results.name = "number_operator"
    pairs = build_pairs(space, family)
    interior = space.interior_mask(depth=1)
    for alpha, (matrix, pair) in enumerate(zip(family.matrices, pairs)):
        N = number_operator(space, matrix)
        if N is None:
            results.skip(f"A{pair.label}_number", "no number operator for this Phi")
            continue
        results.add(
            f"A{pair.label}_number_raising",
            restricted_norm((commutator(N, pair.A_dag) - pair.A_dag).matrix, interior),
            settings.strong_tolerance * 10,
        )
        state = space.vacuum()
        eigen = 0.0
        top = n_max if space.spec.is_fermionic else min(n_max, space.spec.cutoff)
        for n in range(top + 1):
            scale = float(np.linalg.norm(state))
            if scale > settings.rank_tolerance:
                eigen = max(eigen, np.linalg.norm(N.apply(state) - n * state) / scale)
            state = pair.A_dag.apply(state)
        results.add(f"A{pair.label}_number_eigenvalue", eigen, tol)
        for beta, other in enumerate(pairs):
            if beta != alpha and not space.spec.is_fermionic:
                results.add(
                    f"A{pair.label}_number_other_A{other.label}",
                    restricted_norm(commutator(N, other.A_dag).matrix, interior),
                    settings.strong_tolerance * 10,
                )
    return results


def mode_relations_suite(space: FockSpace, tolerance: Optional[float] = None) -> ResidualSet:
    """Constituent relations, nilpotency table and the single-mode norm law."""
    tol = tolerance or settings.strong_tolerance
    results = verify_mode_relations(space, tol)
    q, cutoff = space.q, space.spec.cutoff

    mismatches = 0
    for k in range(1, cutoff + 2):
        # only the truncation power vanishes
        if check_nilpotency(space, "a", 0, k) != (k == cutoff + 1):
            mismatches += 1
    results.add("nilpotency_table", mismatches, 0.5, states=cutoff + 1, note=f"(a^+)^{cutoff + 1} = 0 by truncation")

    creation = creation_operator(space, "a", 0)
    state = space.vacuum()
    law = positivity = 0.0
    for k in range(1, cutoff + 1):
        state = creation.apply(state)
        expected = ladder_norm_sq(k, q)
        law = max(law, abs(float(np.vdot(state, state).real) - expected))
        if expected <= 0:
            positivity += 1
    results.add("ladder_norm_law", law, tol, states=cutoff)
    results.add("ladder_norm_positive", positivity, 0.5, states=cutoff)
    return results


def dsf_suite(
    spec,
    n_max: int,
    q: float = 1.0,
    family_f: Optional[float] = None,
    tolerance: Optional[float] = None,
) -> ResidualSet:
    """
    Structure-function checks matching the constituent deformation q.

    q = 1 (quadratic or tabulated phi): binomial and three-term recurrences,
    the quadratic fit and agreement of f with the family. q < 1: independence
    of the three p-sequences and recovery of (p1, p2, p3); a tabulated phi
    reports the least-squares misfit of the three-parameter family instead.
    """
    tol = tolerance or settings.strong_tolerance
    results = ResidualSet(name="structure_function", reference="recurrences and forms of phi")

    if isinstance(spec, FermionicQuadratic) or (isinstance(spec, Tabulated) and q == 1.0):
        available = len(spec.values) - 1 if isinstance(spec, Tabulated) else n_max + 2
        values = dsf_values(spec, min(available, n_max + 2), exact=True)
        binomial_top = min(n_max, len(values) - 2)
        results.residuals.extend(check_binomial_recurrence(values, binomial_top, tol).residuals)
        if len(values) >= n_max + 3:
            three_term = check_three_term(values, n_max, tol)
            results.residuals.extend(three_term.residuals)
            results.skipped.extend(three_term.skipped)
        else:
            results.skip("three_term", f"phi tabulated only up to n = {len(values) - 1}")
        *_, f, deviation = recover_linear_form(values)
        results.add("quadratic_form", deviation, tol, reference="phi(n) = (1 + f/2) n - (f/2) n^2", states=len(values))
        if family_f is not None:
            results.add("deformation_match", family_f - f, settings.default_tolerance, reference="f = 2 - phi(2)")
        return results

    q = spec.q if spec.q is not None else q
    rank = int(np.linalg.matrix_rank(independence_gram(q)))
    results.add("p_sequence_independence", 3 - rank, 0.5, states=7)

    if isinstance(spec, Tabulated):
        values = list(spec.values)
        recovered = extract_p_coefficients(q, values)
        fitted = Parameterized(q=q, p1=recovered[0], p2=recovered[1], p3=recovered[2])
        misfit = max(abs(unified_dsf(fitted, n) - v) for n, v in enumerate(values))
        results.add("p_fit", misfit, settings.default_tolerance, states=len(values), note=f"p = {recovered.tolist()}")
        return results

    expected = [spec.p1, spec.p2, spec.p3] if isinstance(spec, Parameterized) else [1.0, 1.0, 2.0]
    values = [unified_dsf(spec, n) for n in range(9)]
    recovered = extract_p_coefficients(q, values)
    results.add("p_recovery", float(np.abs(recovered - np.array(expected)).max()), settings.default_tolerance)
    return results


def expansion_suite(
    space: FockSpace,
    family: PhiFamily,
    spec,
    n_max: int,
    tolerance: Optional[float] = None,
) -> ResidualSet:
    """
    Expansion coefficients and the systems built on them.

    Always: P-table against closed forms (n <= 12) and the normal-ordered expansion
    of A (A^+)^n per mode. q < 1 additionally: the single-mode system, the
    equal-index condition with the configured phi and, for 2 x 2 Phi, the
    C-table oracle and the two-mode system.
    """
    results = ResidualSet(name="expansion", reference="expansion coefficients of (A^+)^n and A (A^+)^n")
    results.residuals.extend(expansion.check_closed_forms(expansion.p_table(12)).residuals)

    levels = expansion.expansion_levels(space, min(n_max, 4))
    q = space.q
    for alpha, matrix in enumerate(family.matrices, start=1):
        for n in levels:
            entry = expansion.expand_annihilation_product(space, matrix, q, n).residuals[0]
            results.add(f"A{alpha}_{entry.label}", entry.value, entry.tol, states=entry.states)

    if space.spec.is_fermionic:
        return results

    results.residuals.extend(expansion.check_example1(q, space.spec.cutoff, tolerance).residuals)
    values = [unified_dsf(spec, n) for n in range(n_max + 2)]
    for alpha, matrix in enumerate(family.matrices, start=1):
        for entry in expansion.check_equal_index_condition(matrix, q, values, n_max, tolerance).residuals:
            results.add(f"A{alpha}_{entry.label}", entry.value, entry.tol, states=entry.states)
        if matrix.shape == (2, 2):
            for entry in expansion.c_table_against_oracle(matrix, q, min(n_max, 4)).residuals:
                results.add(f"A{alpha}_{entry.label}", entry.value, entry.tol, states=entry.states)
            system = expansion.check_example2(matrix, q, n_max, tolerance)
            worst: Dict[str, Tuple[float, float]] = {}
            for entry in system.residuals:
                group = entry.label.rsplit("_n", 1)[0]
                value, tol = worst.get(group, (0.0, entry.tol))
                worst[group] = (max(value, entry.value), tol)
            for group, (value, tol) in worst.items():
                results.add(f"A{alpha}_{group}", value, tol)
    return results


def _prefixed(name: str, reference: str, sets: Sequence[ResidualSet], labels: Sequence[str]) -> ResidualSet:
    merged = ResidualSet(name=name, reference=reference)
    for label, part in zip(labels, sets):
        for entry in part.residuals:
            merged.residuals.append(entry.model_copy(update={"label": f"{label}_{entry.label}"}))
        merged.skipped.extend(f"{label}_{reason}" for reason in part.skipped)
        merged.measurements.update({f"{label}_{key}": value for key, value in part.measurements.items()})
    return merged


def check_pairing(config: RunConfig) -> None:
    """
    Reject q / structure-function combinations that cannot be realized.

    Raises:
        ConfigError: Naming the conflicting fields
    """
    q = config.space.q
    dsf = config.dsf
    if q != 1.0 and isinstance(dsf, FermionicQuadratic):
        raise ConfigError(
            f"quadratic structure function requires q = 1, configured q = {q}",
            fields=["space.q", "dsf.variant"],
        )
    if q == 1.0 and isinstance(dsf, (QFermionSquare, Parameterized)):
        raise ConfigError(
            f"{dsf.variant} structure function requires q < 1, configured q = 1",
            fields=["space.q", "dsf.variant"],
        )
    if isinstance(dsf, (QFermionSquare, Parameterized)) and abs(dsf.q - q) > settings.strong_tolerance:
        raise ConfigError(
            f"structure function q = {dsf.q} differs from the constituent q = {q}",
            fields=["space.q", "dsf.q"],
        )
    if isinstance(dsf, Tabulated) and len(dsf.values) < config.n_max + 2:
        raise ConfigError(
            f"tabulated phi needs values up to n = {config.n_max + 1}",
            fields=["dsf.values", "n_max"],
        )
    if q != 1.0 and config.space.cutoff < config.n_max + 1:
        raise ConfigError(
            f"occupancy overflow: n_max = {config.n_max} needs cutoff >= {config.n_max + 1}",
            fields=["space.cutoff", "n_max"],
        )


def full_report(config: RunConfig, family: PhiFamily) -> VerificationReport:
    """
    Run every suite that applies to the configured space, family and phi.

    q = 1 adds the constraint system, the commutator cascade and the operator
    identities; q < 1 adds the one-hot structure checks. Suites run on a
    thread pool of settings.threads workers and are collected in a fixed order.

    Raises:
        ConfigError: On q/phi pairing conflicts, an empty family, a shape mismatch
            or a space beyond the dimension cap
    """
    check_pairing(config)
    if len(family) == 0:
        raise ConfigError("Phi family is empty", fields=["phi"])
    if family.shape != (config.space.d_a, config.space.d_b):
        raise ConfigError(
            f"Phi shape {family.shape} does not match space ({config.space.d_a}, {config.space.d_b})",
            fields=["phi", "space.d_a", "space.d_b"],
        )
    try:
        space = build_space(config.space)
    except CapacityError as e:
        raise ConfigError(str(e), fields=["space"]) from e

    spec = config.dsf
    n_max = config.n_max
    tol = config.tolerance
    labels = [f"A{alpha}" for alpha in range(1, len(family) + 1)]
    verdict = classify(family, q=config.space.q)

    jobs: List[tuple] = [
        ("mode_relations", lambda: mode_relations_suite(space)),
        ("structure_function", lambda: dsf_suite(spec, n_max, space.q, family.f if space.spec.is_fermionic else None)),
        ("weak_equalities", lambda: weak_equality_suite(space, family, spec, n_max, tol)),
        ("dsf_oracle", lambda: oracle_suite(space, family, spec, n_max, tol)),
        ("number_operator", lambda: number_operator_suite(space, family, spec, n_max, tol)),
        ("expansion", lambda: expansion_suite(space, family, spec, n_max, tol)),
    ]
    if space.spec.is_fermionic:
        jobs += [
            ("constraint_system", lambda: check_constraint_system(family)),
            ("commutator_cascade", lambda: _prefixed(
                "commutator_cascade", "commutators of F with A^+",
                [commutator_cascade_suite(space, m, spec, n_max, tol) for m in family.matrices], labels,
            )),
            ("operator_identities", lambda: _prefixed(
                "operator_identities", "q = 1 identities of Delta, epsilon and N",
                [propositions_suite(space, m, min(n_max + 2, 4)) for m in family.matrices], labels,
            )),
        ]
    else:
        jobs.append(("q_structure", lambda: check_q_structure(family)))

    run_id = str(uuid4())
    started = time.perf_counter()
    with RunIDContext(run_id), VerificationContext("full_report", n_max=n_max, dim=space.dim):
        logger.info("Verification started", suites=[name for name, _ in jobs], q=space.q)
        with ThreadPoolExecutor(max_workers=settings.threads) as pool:
            futures = [(name, pool.submit(job)) for name, job in jobs]
            suites = []
            for name, future in futures:
                suite = future.result()
                logger.info("Suite finished", suite=name, passed=suite.passed, worst=max((e.value for e in suite.residuals), default=0.0))
                suites.append(suite)

        report = VerificationReport(
            config=config.model_dump(mode="json", by_alias=True),
            space=space.summary(),
            family={**family.summary(), "verdict": verdict.model_dump(mode="json")},
            dsf={
                **spec.model_dump(mode="json", by_alias=True),
                "values": [unified_dsf(spec, n) for n in range(n_max + 2)],
            },
            probed_range={"n_max": n_max, "cutoff": space.spec.cutoff, "modes": len(family)},
            suites=suites,
            verdict=Verdict.PASS if all(s.passed for s in suites) else Verdict.FAIL,
        )
        if settings.report_timing:
            report.wall_clock_seconds = time.perf_counter() - started
        logger.info("Verification finished", verdict=report.verdict, failures=report.failures)
    return report


class VerificationService:
    """Runs reports on a shared worker pool for the HTTP layer."""

    def __init__(self, threads: Optional[int] = None):
        self.threads = threads or settings.threads
        self._pool: Optional[ThreadPoolExecutor] = None

    def initialize(self) -> None:
        self._pool = ThreadPoolExecutor(max_workers=self.threads, thread_name_prefix="verify")
        logger.info("Verification service initialized", threads=self.threads)

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None
        logger.info("Verification service closed")

    @property
    def running(self) -> bool:
        return self._pool is not None

    def submit(self, func: Callable, *args):
        if self._pool is None:
            raise RuntimeError("Verification service not initialized")
        return self._pool.submit(func, *args)
