"""
Deformation structure functions, their recurrences and energy sequences.

Recurrence residuals are evaluated in exact rational arithmetic
(fractions.Fraction) so that binomial sums stay meaningful at n ~ 30.
"""

import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from app.core.config import get_settings
from app.core.errors import DomainError, RangeError
from app.core.logging import get_logger
from app.models.dsf import FermionicQuadratic, Parameterized, QFermionSquare, Tabulated
from app.models.report import ResidualSet
from app.services.fock import q_bracket

logger = get_logger(__name__)
settings = get_settings()

Number = Union[int, float, Fraction]


def _odd(n: int) -> int:
    """(1 - (-1)^n) / 2."""
    return n % 2


def fermionic_dsf(m: int, n: int) -> float:
    """
    Quadratic structure function (1 + 1/m) n - n^2 / m, i.e. f = 2/m.

    Values past the Pauli bound turn negative and are returned as such.

    Raises:
        DomainError: If m < 1 or n < 0
    """
    if m < 1:
        raise DomainError(f"fermionic structure function needs m >= 1, got {m}")
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    return float(fermionic_dsf_exact(m, n))


def fermionic_dsf_exact(m: int, n: int) -> Fraction:
    """Exact rational value of fermionic_dsf."""
    if m < 1:
        raise DomainError(f"fermionic structure function needs m >= 1, got {m}")
    return Fraction(n * (m + 1) - n * n, m)


def qfermionic_dsf(q: float, n: int) -> float:
    """
    Square of the q-fermion bracket, [n]^2.

    q = 0 is the step function: 0 at n = 0, 1 afterwards.

    Raises:
        DomainError: If q is not in (-1, 1)
    """
    if not (-1.0 < q < 1.0):
        raise DomainError(f"q-fermion square structure function needs -1 < q < 1, got {q}")
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    if q == 0.0:
        return 0.0 if n == 0 else 1.0
    return q_bracket(n, q) ** 2


def parameterized_dsf(q: float, p1: float, p2: float, p3: float, n: int) -> float:
    """
    Three-parameter family
    n - (n - s) p1 + ([n] - s)^2 p2 + s ([n] - 1) p3, with s = (1 - (-1)^n) / 2.
    """
    if not (-1.0 < q < 1.0):
        raise DomainError(f"parameterized structure function needs -1 < q < 1, got {q}")
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    s = _odd(n)
    bracket = q_bracket(n, q)
    return n - (n - s) * p1 + (bracket - s) ** 2 * p2 + s * (bracket - 1.0) * p3


def unified_dsf(spec, n: int) -> float:
    """
    Evaluate any StructureFunctionSpec at n.

    Raises:
        RangeError: If n lies past the end of a tabulated spec
    """
    if isinstance(spec, FermionicQuadratic):
        return fermionic_dsf(spec.m, n)
    if isinstance(spec, QFermionSquare):
        return qfermionic_dsf(spec.q, n)
    if isinstance(spec, Parameterized):
        return parameterized_dsf(spec.q, spec.p1, spec.p2, spec.p3, n)
    if isinstance(spec, Tabulated):
        if not (0 <= n < len(spec.values)):
            raise RangeError(f"n = {n} outside the tabulated range 0..{len(spec.values) - 1}")
        return float(spec.values[n])
    raise DomainError(f"unknown structure function spec {type(spec).__name__}")


def dsf_values(spec, n_max: int, exact: bool = False) -> List[Number]:
    """
    phi(0..n_max).

    With exact=True quadratic specs yield Fractions and other specs the exact
    rational value of their floats.
    """
    if exact and isinstance(spec, FermionicQuadratic):
        return [fermionic_dsf_exact(spec.m, n) for n in range(n_max + 1)]
    values = [unified_dsf(spec, n) for n in range(n_max + 1)]
    return [Fraction(v) for v in values] if exact else values


def energy(values: Sequence[Number], n: int) -> Number:
    """Eigen-energy E_n = (phi(n) + phi(n+1)) / 2 of H = (phi(N) + phi(N+1)) / 2."""
    if n < 0 or n + 1 >= len(values):
        raise RangeError(f"energy at n = {n} needs phi up to {n + 1}")
    return (values[n] + values[n + 1]) / 2


def hamiltonian_spectrum(spec, n_max: int) -> List[float]:
    """E_0..E_{n_max} for a spec."""
    values = dsf_values(spec, n_max + 1)
    return [float(energy(values, n)) for n in range(n_max + 1)]


def check_binomial_recurrence(
    values: Sequence[Number],
    n_max: int,
    tolerance: Optional[float] = None,
) -> ResidualSet:
    """
    Residuals of phi(n+1) - sum_k (-1)^(n-k) C(n+1, k) phi(k), 2 <= n <= n_max.

    Args:
        values: phi(0..n_max+1)
        n_max: Highest n checked
        tolerance: Pass threshold (defaults to strong tolerance)

    Raises:
        RangeError: If the table is too short
    """
    tol = tolerance or settings.strong_tolerance
    if len(values) < n_max + 2:
        raise RangeError(f"binomial recurrence up to n = {n_max} needs phi up to {n_max + 1}")
    exact = [Fraction(v) for v in values]
    results = ResidualSet(name="binomial_recurrence", reference="phi(n+1) as alternating binomial sum of lower values")
    for n in range(2, n_max + 1):
        total = sum(
            (-1) ** (n - k) * math.comb(n + 1, k) * exact[k]
            for k in range(n + 1)
        )
        results.add(f"binomial_n{n}", float(exact[n + 1] - total), tol, states=n + 2)
    return results


def check_three_term(
    values: Sequence[Number],
    n_max: int,
    tolerance: Optional[float] = None,
) -> ResidualSet:
    """
    Three-term recurrences of phi and of the energies E_n.

    phi(n+1) = 2(n+1)/n phi(n) - (n+1)/(n-1) phi(n-1), n >= 2;
    E_{n+1} = (4n^2+4n-4)/(2n^2-1) E_n - (2n^2+4n+1)/(2n^2-1) E_{n-1}, n >= 1.
    n = 1 has a zero denominator in the phi relation and is reported as skipped.

    Args:
        values: phi(0..n_max+2)
        n_max: Highest n checked
    """
    tol = tolerance or settings.strong_tolerance
    if len(values) < n_max + 3:
        raise RangeError(f"three-term recurrences up to n = {n_max} need phi up to {n_max + 2}")
    phi = [Fraction(v) for v in values]
    results = ResidualSet(name="three_term_recurrence", reference="three-term recurrences of phi and of the energy spectrum")

    if n_max >= 1:
        results.skip("phi_three_term_n1", "zero denominator n - 1")
    for n in range(2, n_max + 1):
        predicted = Fraction(2 * (n + 1), n) * phi[n] - Fraction(n + 1, n - 1) * phi[n - 1]
        results.add(f"phi_three_term_n{n}", float(phi[n + 1] - predicted), tol, states=3)

    energies = [energy(phi, n) for n in range(n_max + 2)]
    for n in range(1, n_max + 1):
        denominator = 2 * n * n - 1
        predicted = (
            Fraction(4 * n * n + 4 * n - 4, denominator) * energies[n]
            - Fraction(2 * n * n + 4 * n + 1, denominator) * energies[n - 1]
        )
        results.add(f"energy_three_term_n{n}", float(energies[n + 1] - predicted), tol, states=3)
    return results


def extend_by_recurrence(phi2: Number, n_max: int) -> List[Fraction]:
    """Table phi(0..n_max) generated by the binomial recurrence from phi(0)=0, phi(1)=1, phi(2)=phi2."""
    values = [Fraction(0), Fraction(1), Fraction(phi2)]
    for n in range(2, n_max):
        values.append(sum(
            (-1) ** (n - k) * math.comb(n + 1, k) * values[k]
            for k in range(n + 1)
        ))
    return values[: n_max + 1]


def recover_linear_form(values: Sequence[Number]) -> Tuple[float, float, float, float]:
    """
    Fit phi(n) = alpha n + beta n^2 through phi(1) = 1 and phi(2) = c.

    Returns:
        Tuple: (alpha, beta, f, max deviation over the table), f = 2 - c
    """
    if len(values) < 3:
        raise RangeError("recovering the quadratic form needs phi(0..2)")
    c = Fraction(values[2])
    beta = (c - 2) / 2
    alpha = 1 - beta
    deviation = max(abs(Fraction(v) - (alpha * n + beta * n * n)) for n, v in enumerate(values))
    return float(alpha), float(beta), float(2 - c), float(deviation)


def p_sequences(q: float, n: int) -> Tuple[float, float, float]:
    """The three sequences multiplying p1, p2, p3 (p1 enters with a minus sign)."""
    s = _odd(n)
    bracket = q_bracket(n, q)
    return float(n - s), (bracket - s) ** 2, s * (bracket - 1.0)


def independence_gram(q: float, ns: Sequence[int] = range(2, 9)) -> np.ndarray:
    """Gram matrix of the three p-sequences over the given n."""
    samples = np.array([p_sequences(q, n) for n in ns])
    return samples.T @ samples


def extract_p_coefficients(q: float, values: Sequence[float], ns: Optional[Sequence[int]] = None) -> np.ndarray:
    """
    Least-squares (p1, p2, p3) reproducing a tabulated phi.

    Args:
        q: Constituent deformation
        values: phi(0..)
        ns: Points used, defaults to 2..len(values)-1
    """
    ns = list(ns) if ns is not None else list(range(2, len(values)))
    design = np.array([[-a, b, c] for a, b, c in (p_sequences(q, n) for n in ns)])
    target = np.array([values[n] - n for n in ns], dtype=float)
    solution, *_ = np.linalg.lstsq(design, target, rcond=None)
    return solution


def discontinuity_gap(q: float, m: int, n: int = 2) -> float:
    """|[n]^2 - quadratic phi(n)|: the q -> 1 limit does not reach the quadratic form."""
    return abs(qfermionic_dsf(q, n) - fermionic_dsf(m, n))


def dsf_table(spec, n_max: int) -> pd.DataFrame:
    """
    Table of n, phi(n), E_n and the recurrence residuals.

    Energies and residuals that need values past the end of a tabulated spec are NaN.
    """
    length = n_max + 3
    if isinstance(spec, Tabulated):
        length = min(length, len(spec.values))
    values = dsf_values(spec, length - 1, exact=True)

    rows = []
    for n in range(n_max + 1):
        row = {
            "n": n,
            "phi": float(values[n]) if n < len(values) else math.nan,
            "energy": math.nan,
            "binomial_residual": math.nan,
            "three_term_residual": math.nan,
        }
        if n + 1 < len(values):
            row["energy"] = float(energy(values, n))
        if 2 <= n and n + 1 < len(values):
            total = sum((-1) ** (n - k) * math.comb(n + 1, k) * values[k] for k in range(n + 1))
            row["binomial_residual"] = float(values[n + 1] - total)
            predicted = Fraction(2 * (n + 1), n) * values[n] - Fraction(n + 1, n - 1) * values[n - 1]
            row["three_term_residual"] = float(values[n + 1] - predicted)
        rows.append(row)

    logger.debug("Structure function table built", variant=spec.variant, n_max=n_max)
    return pd.DataFrame(rows, columns=["n", "phi", "energy", "binomial_residual", "three_term_residual"])
