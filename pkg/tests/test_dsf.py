from fractions import Fraction

import numpy as np
import pytest
from pydantic import ValidationError

from app.core.errors import DomainError, RangeError
from app.models.dsf import DSFVariant, FermionicQuadratic, QFermionSquare, Tabulated, structure_function_adapter
from app.services.dsf import (
    check_binomial_recurrence,
    check_three_term,
    discontinuity_gap,
    dsf_table,
    dsf_values,
    energy,
    extend_by_recurrence,
    extract_p_coefficients,
    fermionic_dsf,
    hamiltonian_spectrum,
    independence_gram,
    parameterized_dsf,
    qfermionic_dsf,
    recover_linear_form,
    unified_dsf,
)


class TestFermionicQuadratic:
    def test_values_m2(self):
        assert [fermionic_dsf(2, n) for n in range(4)] == [0.0, 1.0, 1.0, 0.0]

    def test_pauli_bound_m1(self):
        assert [fermionic_dsf(1, n) for n in range(3)] == [0.0, 1.0, 0.0]
        assert fermionic_dsf(1, 3) < 0

    def test_vanishes_at_m_plus_one(self):
        for m in range(1, 8):
            assert fermionic_dsf(m, m + 1) == 0.0
            assert all(fermionic_dsf(m, n) > 0 for n in range(1, m + 1))

    def test_domain(self):
        with pytest.raises(DomainError):
            fermionic_dsf(0, 1)
        with pytest.raises(DomainError):
            fermionic_dsf(2, -1)


class TestQFermionSquare:
    def test_values(self):
        assert qfermionic_dsf(0.5, 2) == pytest.approx(0.25)
        assert qfermionic_dsf(0.5, 3) == pytest.approx(0.5625)

    def test_q_zero_step(self):
        assert [qfermionic_dsf(0.0, n) for n in range(4)] == [0.0, 1.0, 1.0, 1.0]

    def test_q_one_rejected(self):
        with pytest.raises(DomainError):
            qfermionic_dsf(1.0, 2)


@pytest.mark.parametrize("q", [-0.4, 0.2, 0.5, 0.9])
def test_parameterized_reduces_to_square(q):
    for n in range(10):
        assert parameterized_dsf(q, 1.0, 1.0, 2.0, n) == pytest.approx(qfermionic_dsf(q, n), abs=1e-12)


def test_parameterized_zero_params_is_identity():
    assert [parameterized_dsf(0.5, 0, 0, 0, n) for n in range(5)] == pytest.approx([0, 1, 2, 3, 4])


class TestSpecs:
    def test_adapter_discriminates(self):
        spec = structure_function_adapter.validate_python({"variant": "q_fermion_square", "q": 0.5})
        assert isinstance(spec, QFermionSquare)
        assert spec.q == 0.5

    def test_initial_conditions_enforced(self):
        with pytest.raises(ValidationError):
            Tabulated(values=[0.0, 2.0])

    def test_q_range(self):
        with pytest.raises(ValidationError):
            QFermionSquare(q=1.0)

    def test_deformation(self):
        assert FermionicQuadratic(m=4).deformation == 0.5
        assert Tabulated(values=[0, 1, 1.5]).deformation == 0.5
        assert Tabulated(values=[0, 1]).deformation is None
        assert FermionicQuadratic(m=1).variant == DSFVariant.FERMIONIC_QUADRATIC.value

    def test_tabulated_range(self):
        spec = Tabulated(values=[0, 1, 1])
        assert unified_dsf(spec, 2) == 1.0
        with pytest.raises(RangeError):
            unified_dsf(spec, 3)


def test_dsf_values_exact():
    assert dsf_values(FermionicQuadratic(m=3), 3, exact=True) == [0, 1, Fraction(4, 3), Fraction(1)]


class TestEnergies:
    def test_spectrum_m2(self):
        assert hamiltonian_spectrum(FermionicQuadratic(m=2), 2) == [0.5, 1.0, 0.5]

    def test_energy_needs_next_value(self):
        with pytest.raises(RangeError):
            energy([0, 1], 1)


class TestRecurrences:
    @pytest.mark.parametrize("m", [1, 2, 5])
    def test_quadratic_satisfies_binomial(self, m):
        values = dsf_values(FermionicQuadratic(m=m), 31, exact=True)
        assert check_binomial_recurrence(values, 30).passed

    def test_cubic_fails_at_two(self):
        values = [n ** 3 for n in range(6)]
        results = check_binomial_recurrence(values, 4)
        assert results.get("binomial_n2").value == pytest.approx(6.0)
        assert not results.passed

    def test_short_table(self):
        with pytest.raises(RangeError):
            check_binomial_recurrence([0, 1, 1], 2)

    def test_three_term_quadratic(self):
        values = dsf_values(FermionicQuadratic(m=4), 12, exact=True)
        results = check_three_term(values, 10)
        assert results.passed
        assert any(s.startswith("phi_three_term_n1") for s in results.skipped)

    def test_three_term_rejects_square_form(self):
        values = dsf_values(QFermionSquare(q=0.5), 8)
        assert not check_three_term(values, 6).passed

    def test_extend(self):
        assert extend_by_recurrence(1, 5) == [0, 1, 1, 0, -2, -5]

    def test_extend_matches_quadratic(self):
        c = Fraction(4, 3)
        assert extend_by_recurrence(c, 8) == dsf_values(FermionicQuadratic(m=3), 8, exact=True)


def test_recover_linear_form():
    alpha, beta, f, deviation = recover_linear_form(dsf_values(FermionicQuadratic(m=2), 6))
    assert (alpha, beta, f) == pytest.approx((1.5, -0.5, 1.0))
    assert deviation == pytest.approx(0.0)


class TestPSequences:
    def test_independent_below_one(self):
        assert np.linalg.matrix_rank(independence_gram(0.5)) == 3

    def test_recovery(self):
        values = [parameterized_dsf(0.5, 0.3, -1.2, 0.7, n) for n in range(10)]
        assert extract_p_coefficients(0.5, values) == pytest.approx([0.3, -1.2, 0.7], abs=1e-9)


def test_discontinuity_gap_grows_to_one():
    gaps = [discontinuity_gap(q, 2) for q in (0.9, 0.99, 0.999)]
    assert gaps == sorted(gaps)
    assert gaps[-1] == pytest.approx(1.0, abs=1e-2)


class TestTable:
    def test_columns(self):
        frame = dsf_table(FermionicQuadratic(m=2), 4)
        assert list(frame.columns) == ["n", "phi", "energy", "binomial_residual", "three_term_residual"]
        assert list(frame["phi"]) == [0.0, 1.0, 1.0, 0.0, -2.0]
        assert frame["binomial_residual"].iloc[2:].abs().max() == 0.0

    def test_tabulated_tail_is_nan(self):
        frame = dsf_table(Tabulated(values=[0, 1, 1, 0.1]), 4)
        assert np.isnan(frame["energy"].iloc[3])
        assert np.isnan(frame["phi"].iloc[4])
        assert frame["binomial_residual"].iloc[2] == pytest.approx(0.1)
