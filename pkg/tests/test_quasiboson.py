from fractions import Fraction

import numpy as np
import pytest

from app.core.errors import ContractError
from app.models.dsf import FermionicQuadratic, QFermionSquare, Tabulated
from app.models.fock import ModeSpec
from app.services.dsf import fermionic_dsf, qfermionic_dsf
from app.services.fock import build_space
from app.services.quasiboson import (
    apply_function_of_count,
    build_pairs,
    build_quasiboson,
    check_chi_condition,
    chi_alternatives,
    commutator,
    delta_operator,
    epsilon_operator,
    interior_norm,
    ladder_basis,
    mode_counts,
    number_operator,
    number_operator_q1,
    number_operator_qlt1,
    operator_power,
    quadratic_inverse,
)
from tests.conftest import matrix


def test_shape_checked(fermionic_space_2):
    with pytest.raises(ContractError):
        build_quasiboson(fermionic_space_2, np.eye(3))


def test_adjoint_pair(fermionic_space_2, unitary_phi):
    pair = build_quasiboson(fermionic_space_2, unitary_phi)
    assert abs(pair.A.matrix - pair.A_dag.matrix.conj().T).max() == 0.0


class TestDelta:
    def test_commutator_identity(self, fermionic_space_2, unitary_phi):
        pair = build_quasiboson(fermionic_space_2, unitary_phi)
        epsilon = epsilon_operator(fermionic_space_2, unitary_phi)
        residual = commutator(pair.A, pair.A_dag) - epsilon
        assert interior_norm(residual, fermionic_space_2) < 1e-12

    def test_cross_modes(self, fermionic_space_2, elementary_family):
        first, second = build_pairs(fermionic_space_2, elementary_family)
        delta = delta_operator(fermionic_space_2, *elementary_family.matrices)
        residual = commutator(first.A, second.A_dag) + delta
        assert interior_norm(residual, fermionic_space_2) < 1e-12

    def test_vacuum_annihilates(self, fermionic_space_2, unitary_phi):
        delta = delta_operator(fermionic_space_2, unitary_phi, unitary_phi)
        assert np.allclose(delta.apply(fermionic_space_2.vacuum()), 0.0)

    def test_requires_q1(self, qspace_05, one_hot_05):
        with pytest.raises(ContractError):
            delta_operator(qspace_05, one_hot_05.matrices[0], one_hot_05.matrices[0])


class TestNumberOperator:
    def test_q1_commutes_to_creation(self, fermionic_space_2, unitary_phi):
        pair = build_quasiboson(fermionic_space_2, unitary_phi)
        number = number_operator_q1(fermionic_space_2, unitary_phi)
        residual = commutator(number, pair.A_dag) - pair.A_dag
        assert interior_norm(residual, fermionic_space_2) < 1e-12

    def test_qlt1_is_constituent_count(self, qspace_05, one_hot_05):
        pair = build_quasiboson(qspace_05, one_hot_05.matrices[0])
        number = number_operator_qlt1(qspace_05, one_hot_05.matrices[0])
        residual = commutator(number, pair.A_dag) - pair.A_dag
        assert interior_norm(residual, qspace_05) < 1e-12

    def test_qlt1_needs_one_hot(self, qspace_05, diagonal_phi):
        with pytest.raises(ContractError):
            number_operator_qlt1(qspace_05, diagonal_phi)
        assert number_operator(qspace_05, diagonal_phi) is None

    def test_zero_phi_has_none(self, fermionic_space_2):
        assert number_operator(fermionic_space_2, np.zeros((2, 2))) is None


class TestLadder:
    def test_unitary_norm_law(self, fermionic_space_2, unitary_phi):
        basis = ladder_basis(fermionic_space_2, [build_quasiboson(fermionic_space_2, unitary_phi)], 3)
        norms = [basis.levels[n].norms_sq()[0] for n in range(4)]
        expected = [1.0, 1.0, 1.0 * fermionic_dsf(2, 2), 0.0]
        assert norms == pytest.approx(expected, abs=1e-12)
        assert basis.null_levels() == [3]

    def test_elementary_pauli(self, fermionic_space_2, elementary_family):
        basis = ladder_basis(fermionic_space_2, build_pairs(fermionic_space_2, elementary_family), 2)
        assert basis.is_null((0, 0))
        assert not basis.is_null((0, 1))
        assert basis.levels[2].rank == 1

    def test_qlt1_norm_law(self, qspace_05, one_hot_05):
        pair = build_quasiboson(qspace_05, one_hot_05.matrices[0])
        basis = ladder_basis(qspace_05, [pair], 4)
        product = 1.0
        for n in range(1, 5):
            product *= qfermionic_dsf(0.5, n)
            assert basis.state((0,) * n) @ basis.state((0,) * n).conj() == pytest.approx(product)

    def test_overflow(self):
        space = build_space(ModeSpec(d_a=1, d_b=1, q=0.5, cutoff=2))
        pair = build_quasiboson(space, np.ones((1, 1)))
        with pytest.raises(ContractError):
            ladder_basis(space, [pair], 3)


def test_mode_counts():
    assert mode_counts((0, 1, 0), 2) == [2, 1]


def test_operator_power(fermionic_space_2, unitary_phi):
    pair = build_quasiboson(fermionic_space_2, unitary_phi)
    assert operator_power(pair.A_dag, 3).is_zero()
    assert not operator_power(pair.A_dag, 2).is_zero()


def test_apply_function_of_count(fermionic_space_2, elementary_family):
    basis = ladder_basis(fermionic_space_2, build_pairs(fermionic_space_2, elementary_family), 2)
    applied = apply_function_of_count(lambda n: float(n), basis, mode=0, shift=1)
    assert np.allclose(applied[(0, 1)], 2.0 * basis.state((0, 1)))
    assert np.allclose(applied[()], basis.state(()))


class TestChi:
    def test_quadratic_inverse(self):
        assert quadratic_inverse(Fraction(1), Fraction(1)) == (Fraction(1), Fraction(2))

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_all_alternatives_exact(self, m):
        for n in range(6):
            residuals = chi_alternatives(Fraction(2, m), n)
            assert all(value == 0 for value in residuals.values())

    def test_quadratic_condition(self):
        results = check_chi_condition(FermionicQuadratic(m=2), 4)
        assert results.passed
        assert {e.label for e in results.residuals} >= {"chi_linear", "chi_blend"}

    def test_square_form_pairs(self):
        assert check_chi_condition(QFermionSquare(q=0.5), 3).passed

    def test_repeated_pairs_fail(self):
        results = check_chi_condition(Tabulated(values=[0, 1, 0, 1, 0]), 3)
        assert results.failures == ["chi_pairs_distinct"]

    def test_pairs_repeating_after_a_gap_fail(self):
        # (1, 2) appears at n = 1 and n = 3
        results = check_chi_condition(Tabulated(values=[0, 1, 2, 1, 2]), 3)
        assert not results.passed
        assert results.get("chi_pairs_distinct").value == 1.0

    def test_distinct_pairs_define_chi(self):
        results = check_chi_condition(Tabulated(values=[0, 1, 5, -3, 7, 2]), 3)
        assert results.passed
        assert [e.label for e in results.residuals] == ["chi_pairs_distinct"]


def test_number_operator_tracks_one_hot_row(qspace_05):
    phi = matrix({(2, 2): 1.0})
    number = number_operator_qlt1(qspace_05, phi)
    state = qspace_05.basis_state((0, 3, 0, 0))
    assert np.allclose(number.apply(state), 3 * state)
