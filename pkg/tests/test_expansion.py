import numpy as np
import pytest

from app.core.errors import ContractError, DomainError, NotCoveredError, RangeError
from app.models.fock import ModeSpec
from app.services.dsf import qfermionic_dsf
from app.services.expansion import (
    CLOSED_FORM_PATTERNS,
    c_oracle,
    c_table,
    c_table_against_oracle,
    check_closed_forms,
    check_equal_index_condition,
    check_example1,
    check_example2,
    diagonal_coefficients,
    diagonal_reduced_condition,
    expand_annihilation_product,
    expansion_levels,
    j_range,
    p_closed_form,
    p_table,
    reorder_sign,
    two_mode_group,
)
from app.services.fock import build_space
from tests.conftest import matrix


@pytest.fixture(scope="module")
def table12():
    return p_table(12)


@pytest.fixture
def generic_phi():
    rng = np.random.default_rng(2024)
    phi = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    return phi / np.linalg.norm(phi)


class TestPTable:
    @pytest.mark.parametrize("key, value", [
        ((5, 2, 2, 2), 10),
        ((5, 1, 2, 1), -4),
        ((5, 2, 2, 1), -12),
        ((4, 2, 0, 0), 2),
        ((3, 0, 0, 0), 1),
        ((3, 3, 3, 3), 1),
    ])
    def test_known_entries(self, table12, key, value):
        assert table12.get(*key) == value

    def test_entries_are_ints(self, table12):
        assert all(type(value) is int for _, value in table12.entries())

    def test_closed_forms_hold(self, table12):
        results = check_closed_forms(table12)
        assert results.passed
        assert len(results.residuals) == len(CLOSED_FORM_PATTERNS) + 1

    def test_boundary_zero(self, table12):
        assert table12.get(4, 3, 3, 1) == 0
        assert 1 not in j_range(4, 3, 3)

    def test_range(self, table12):
        with pytest.raises(RangeError):
            table12.get(13, 0, 0, 0)
        with pytest.raises(DomainError):
            p_table(0)

    def test_frame(self):
        frame = p_table(2).to_frame()
        assert list(frame.columns) == ["n", "k", "l", "j", "value"]
        assert len(frame) == len(p_table(2))


class TestClosedForm:
    def test_not_covered(self):
        with pytest.raises(NotCoveredError):
            p_closed_form(4, 3, 0, 0)

    def test_domain(self):
        with pytest.raises(DomainError):
            p_closed_form(0, 1, 1, 1)

    def test_odd_patterns(self):
        assert [p_closed_form(n, 0, 1, 0) for n in range(1, 5)] == [1, 0, 1, 0]
        assert [p_closed_form(n, 1, 1, 1) for n in range(1, 5)] == [1, 2, 3, 4]


def test_reorder_sign():
    assert [reorder_sign(n) for n in range(1, 6)] == [1, -1, -1, 1, 1]


class TestCTable:
    def test_matches_oracle_deformed(self, generic_phi):
        assert c_table_against_oracle(generic_phi, 0.5, 3).passed

    def test_matches_oracle_fermionic(self, generic_phi):
        assert c_table_against_oracle(generic_phi, 1.0, 2).passed

    def test_single_entry(self):
        table = c_table(matrix({(1, 1): 2.0}), 3)
        assert table.get(3, 0, 0) == pytest.approx(8.0)
        assert table.get(3, 1, 0) == 0

    def test_oracle_skips_null_states(self, generic_phi):
        assert (2, 0) not in c_oracle(generic_phi, 1.0, 2)
        assert (1, 1) in c_oracle(generic_phi, 1.0, 2)

    def test_shape(self):
        with pytest.raises(ContractError):
            c_table(np.eye(3), 2)


class TestAnnihilationExpansion:
    @pytest.mark.parametrize("n", [1, 2])
    def test_deformed(self, generic_phi, n):
        space = build_space(ModeSpec(d_a=2, d_b=2, q=0.5, cutoff=3))
        assert expand_annihilation_product(space, generic_phi, 0.5, n).passed

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_fermionic(self, fermionic_space_2, generic_phi, n):
        assert expand_annihilation_product(fermionic_space_2, generic_phi, 1.0, n).passed

    def test_q_mismatch(self, fermionic_space_2, generic_phi):
        with pytest.raises(ContractError):
            expand_annihilation_product(fermionic_space_2, generic_phi, 0.5, 1)

    def test_levels(self, fermionic_space_2):
        space = build_space(ModeSpec(d_a=1, d_b=1, q=0.5, cutoff=2))
        assert expansion_levels(space, 4) == [1, 2]
        assert expansion_levels(fermionic_space_2, 3) == [1, 2, 3]


class TestSingleMode:
    @pytest.mark.parametrize("q", [0.0, 0.3, 0.5, -0.4])
    def test_eigenvalues(self, q):
        results = check_example1(q, 5)
        assert results.passed
        assert [e.label for e in results.residuals] == [f"single_mode_n{n}" for n in range(5)]

    def test_note_carries_eigenvalue(self):
        entry = check_example1(0.5, 3).get("single_mode_n1")
        assert entry.note == f"eigenvalue {qfermionic_dsf(0.5, 2):.12g}"

    def test_q1_rejected(self):
        with pytest.raises(DomainError):
            check_example1(1.0, 2)


class TestTwoModeSystem:
    def test_elementary_recovers_square(self):
        assert check_example2(matrix({(1, 1): 1.0}), 0.5, 6).passed

    def test_relabels_largest_entry(self):
        results = check_example2(matrix({(2, 1): 1.0}), 0.5, 3)
        assert results.passed
        assert any(s.startswith("relabel") for s in results.skipped)

    def test_diagonal_fails(self, diagonal_phi):
        results = check_example2(diagonal_phi, 0.5, 2)
        assert results.get("diagonal_condition_n2_k1_l1").value == pytest.approx(1.40625)
        assert not results.passed

    def test_bad_row_fails_row_condition(self, bad_row_phi):
        results = check_example2(bad_row_phi, 0.5, 2)
        assert any(label.startswith(("row_condition", "column_condition", "phi_vs_square")) for label in results.failures)

    def test_q1_rejected(self, diagonal_phi):
        with pytest.raises(DomainError):
            check_example2(diagonal_phi, 1.0, 2)

    def test_groups(self):
        assert two_mode_group(0, 0) == "phi_extraction"
        assert two_mode_group(3, 0) == "row_condition"
        assert two_mode_group(0, 2) == "column_condition"
        assert two_mode_group(2, 1) == "diagonal_condition"


def test_diagonal_reduction(diagonal_phi):
    assert diagonal_coefficients(0.5, 2) == pytest.approx((-5.25, -0.375))
    assert abs(diagonal_reduced_condition(diagonal_phi, 0.5, 2)) == pytest.approx(1.40625)


class TestEqualIndex:
    def test_one_hot_square(self):
        values = [qfermionic_dsf(0.5, n) for n in range(7)]
        assert check_equal_index_condition(matrix({(1, 2): 1.0}), 0.5, values, 5).passed

    def test_wrong_values(self):
        values = [qfermionic_dsf(0.5, n) for n in range(5)]
        values[3] += 0.1
        results = check_equal_index_condition(matrix({(1, 1): 1.0}), 0.5, values, 3)
        assert "equal_index_n2" in results.failures

    def test_short_values(self):
        with pytest.raises(RangeError):
            check_equal_index_condition(matrix({(1, 1): 1.0}), 0.5, [0, 1], 1)
