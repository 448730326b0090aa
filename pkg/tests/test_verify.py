import json

import numpy as np
import pytest

from app.core.errors import ConfigError, ContractError
from app.models.config import load_run_config, parse_run_config
from app.models.dsf import FermionicQuadratic, Tabulated
from app.models.fock import ModeSpec
from app.models.report import Verdict
from app.services.dsf import qfermionic_dsf
from app.services.exports import build_family
from app.services.fock import build_space
from app.services.phi import PhiFamily
from app.services.quasiboson import build_quasiboson
from app.services.verify import (
    OracleResult,
    VerificationService,
    brute_force_phi,
    check_pairing,
    commutator_cascade_suite,
    dsf_suite,
    expansion_suite,
    full_report,
    mode_relations_suite,
    number_operator_suite,
    oracle_suite,
    propositions_suite,
    weak_equality_suite,
)


@pytest.fixture
def deformed_space_4():
    return build_space(ModeSpec(d_a=2, d_b=2, q=0.5, cutoff=4))


def run_fixture(fixtures_dir, name):
    config = load_run_config(fixtures_dir / name)
    return full_report(config, build_family(config))


class TestWeakEqualities:
    def test_block_family(self, fermionic_space_4, block_family_m2, quadratic_m2):
        results = weak_equality_suite(fermionic_space_4, block_family_m2, quadratic_m2, 2)
        assert results.passed
        assert "independence_n1" in {e.label for e in results.residuals}

    def test_elementary_pauli(self, fermionic_space_2, elementary_family):
        results = weak_equality_suite(fermionic_space_2, elementary_family, FermionicQuadratic(m=1), 2)
        assert results.passed

    def test_one_hot(self, qspace_05, one_hot_05, square_05):
        assert weak_equality_suite(qspace_05, one_hot_05, square_05, 3).passed

    def test_bad_row(self, deformed_space_4, bad_row_phi, square_05):
        family = PhiFamily.of([bad_row_phi], q=0.5)
        results = weak_equality_suite(deformed_space_4, family, square_05, 2)
        assert "raising_n1" in results.failures
        assert results.get("raising_n1").value == pytest.approx(0.125)
        assert any(s.startswith("number_commutator") for s in results.skipped)

    def test_wrong_dsf(self, fermionic_space_2, unitary_phi):
        family = PhiFamily.of([unitary_phi])
        assert not weak_equality_suite(fermionic_space_2, family, FermionicQuadratic(m=1), 1).passed

    def test_overflow(self, deformed_space_4, one_hot_05, square_05):
        with pytest.raises(ContractError):
            weak_equality_suite(deformed_space_4, one_hot_05, square_05, 4)


class TestOracle:
    def test_bad_row_witness(self, deformed_space_4, bad_row_phi):
        oracle = brute_force_phi(deformed_space_4, build_quasiboson(deformed_space_4, bad_row_phi), 4)
        assert oracle.phi[:2] == pytest.approx([1.0, 0.125])
        assert max(oracle.defects) > 0.05
        assert oracle.exhausted_at is None

    def test_unitary_exhausts(self, fermionic_space_2, unitary_phi):
        oracle = brute_force_phi(fermionic_space_2, build_quasiboson(fermionic_space_2, unitary_phi), 4)
        assert oracle.phi == pytest.approx([1.0, 1.0])
        assert oracle.exhausted_at == 3
        assert oracle.value(3) == 0.0
        assert oracle.value(5) == 0.0

    def test_value_range(self):
        with pytest.raises(IndexError):
            OracleResult(phi=[1.0]).value(2)

    def test_suite_pauli_null(self, fermionic_space_2, elementary_family):
        results = oracle_suite(fermionic_space_2, elementary_family, FermionicQuadratic(m=1), 3)
        assert results.passed
        assert results.get("A2_pauli_null_n2").note is not None

    def test_suite_against_square(self, qspace_05, one_hot_05, square_05):
        assert oracle_suite(qspace_05, one_hot_05, square_05, 4).passed


class TestCascade:
    def test_quadratic_vanishes(self, fermionic_space_2, unitary_phi, quadratic_m2):
        results = commutator_cascade_suite(fermionic_space_2, unitary_phi, quadratic_m2, 3)
        assert results.passed
        assert "occupation_delta_strong" in {e.label for e in results.residuals}

    def test_perturbed_table(self, fermionic_space_2, unitary_phi):
        spec = Tabulated(values=[0, 1, 1, 0.1, -2])
        results = commutator_cascade_suite(fermionic_space_2, unitary_phi, spec, 3)
        assert results.get("cascade_n1").passed
        assert results.get("cascade_n2").value == pytest.approx(0.1)
        assert not results.get("cascade_n2").passed

    def test_non_solution_skips_strong_form(self, fermionic_space_2, quadratic_m2):
        phi = np.diag([np.sqrt(0.7), np.sqrt(0.3)]).astype(complex)
        results = commutator_cascade_suite(fermionic_space_2, phi, quadratic_m2, 2)
        assert "cubic_relation" in results.failures
        assert any(s.startswith("occupation_delta_strong") for s in results.skipped)

    def test_requires_q1(self, qspace_05, one_hot_05, square_05):
        with pytest.raises(ContractError):
            commutator_cascade_suite(qspace_05, one_hot_05.matrices[0], square_05, 2)


class TestOperatorIdentities:
    def test_unitary(self, fermionic_space_2, unitary_phi):
        results = propositions_suite(fermionic_space_2, unitary_phi, 4)
        assert results.passed
        assert {"delta_raising", "number_raising", "iterated_commutator_n3", "number_ladder_n2"} <= {
            e.label for e in results.residuals
        }

    def test_block_mode(self, fermionic_space_4, block_family_m2):
        assert propositions_suite(fermionic_space_4, block_family_m2.matrices[0], 3).passed

    def test_requires_q1(self, qspace_05, one_hot_05):
        with pytest.raises(ContractError):
            propositions_suite(qspace_05, one_hot_05.matrices[0])


class TestNumberOperatorSuite:
    def test_q1(self, fermionic_space_2, unitary_phi, quadratic_m2):
        results = number_operator_suite(fermionic_space_2, PhiFamily.of([unitary_phi]), quadratic_m2, 2)
        assert results.name == "number_operator"
        assert results.passed

    def test_one_hot(self, qspace_05, one_hot_05, square_05):
        results = number_operator_suite(qspace_05, one_hot_05, square_05, 3)
        assert results.passed
        assert "A1_number_other_A2" in {e.label for e in results.residuals}

    def test_no_number_operator(self, deformed_space_4, diagonal_phi, square_05):
        results = number_operator_suite(deformed_space_4, PhiFamily.of([diagonal_phi], q=0.5), square_05, 2)
        assert any(s.startswith("A1_number") for s in results.skipped)


@pytest.mark.parametrize("q, cutoff", [(1.0, 1), (0.5, 3), (0.0, 2)])
def test_mode_relations_suite(q, cutoff):
    space = build_space(ModeSpec(d_a=1, d_b=1, q=q, cutoff=cutoff))
    results = mode_relations_suite(space)
    assert results.passed
    assert results.get("nilpotency_table").value == 0.0


class TestDsfSuite:
    def test_quadratic(self, quadratic_m2):
        results = dsf_suite(quadratic_m2, 6, q=1.0, family_f=1.0)
        assert results.passed
        assert results.get("deformation_match").value == pytest.approx(0.0)

    def test_family_mismatch(self, quadratic_m2):
        assert "deformation_match" in dsf_suite(quadratic_m2, 3, q=1.0, family_f=2.0).failures

    def test_perturbed_table(self):
        results = dsf_suite(Tabulated(values=[0, 1, 1, 0.1, -2]), 3)
        assert "binomial_n2" in results.failures
        assert any(s.startswith("three_term") for s in results.skipped)

    def test_square(self, square_05):
        results = dsf_suite(square_05, 3, q=0.5)
        assert results.passed
        assert results.get("p_recovery").value < 1e-9

    def test_tabulated_below_one(self):
        spec = Tabulated(values=[qfermionic_dsf(0.5, n) for n in range(8)])
        results = dsf_suite(spec, 3, q=0.5)
        assert results.get("p_fit").passed


class TestExpansionSuite:
    def test_q1(self, fermionic_space_2, unitary_phi, quadratic_m2):
        results = expansion_suite(fermionic_space_2, PhiFamily.of([unitary_phi]), quadratic_m2, 2)
        assert results.passed
        assert not any(e.label.startswith("single_mode") for e in results.residuals)

    def test_one_hot(self, one_hot_05, square_05):
        space = build_space(ModeSpec(d_a=2, d_b=2, q=0.5, cutoff=3))
        results = expansion_suite(space, one_hot_05, square_05, 2)
        assert results.passed
        assert "A1_phi_extraction" in {e.label for e in results.residuals}

    def test_diagonal(self, deformed_space_4, diagonal_phi, square_05):
        results = expansion_suite(deformed_space_4, PhiFamily.of([diagonal_phi], q=0.5), square_05, 2)
        assert results.get("A1_diagonal_condition").value >= 1.40625 - 1e-9
        assert "A1_diagonal_condition" in results.failures


def _config(**overrides):
    raw = {
        "space": {"d_a": 2, "d_b": 2, "q": 1.0},
        "phi": {"source": "generate", "kind": "unitary"},
        "dsf": {"variant": "fermionic_quadratic", "m": 2},
        "n_max": 2,
    }
    raw.update(overrides)
    return parse_run_config(json.dumps(raw))


class TestPairing:
    def test_valid(self):
        check_pairing(_config())

    @pytest.mark.parametrize("overrides, fields", [
        ({"space": {"d_a": 2, "d_b": 2, "q": 0.5, "cutoff": 4}}, ["space.q", "dsf.variant"]),
        ({"dsf": {"variant": "q_fermion_square", "q": 0.5}}, ["space.q", "dsf.variant"]),
        ({"space": {"d_a": 2, "d_b": 2, "q": 0.5, "cutoff": 4}, "dsf": {"variant": "q_fermion_square", "q": 0.3}},
         ["space.q", "dsf.q"]),
        ({"dsf": {"variant": "tabulated", "values": [0, 1, 1]}}, ["dsf.values", "n_max"]),
        ({"space": {"d_a": 2, "d_b": 2, "q": 0.5, "cutoff": 2}, "dsf": {"variant": "q_fermion_square", "q": 0.5}},
         ["space.cutoff", "n_max"]),
    ])
    def test_conflicts(self, overrides, fields):
        with pytest.raises(ConfigError) as info:
            check_pairing(_config(**overrides))
        assert info.value.fields == fields


class TestFullReport:
    @pytest.mark.parametrize("name", ["q1_m2.json", "q1_unitary.json", "q1_m1.json", "q05_onehot.json"])
    def test_passing_fixtures(self, fixtures_dir, name):
        report = run_fixture(fixtures_dir, name)
        assert report.verdict == Verdict.PASS.value, report.failures

    @pytest.mark.parametrize("name", ["q05_badphi.json", "q05_diagphi.json", "q1_perturbed_dsf.json"])
    def test_failing_fixtures(self, fixtures_dir, name):
        report = run_fixture(fixtures_dir, name)
        assert report.verdict == Verdict.FAIL.value
        assert report.failures

    def test_suite_order_q1(self, fixtures_dir):
        report = run_fixture(fixtures_dir, "q1_unitary.json")
        assert [s.name for s in report.suites] == [
            "mode_relations", "structure_function", "weak_equalities", "dsf_oracle",
            "number_operator", "expansion", "constraint_system", "commutator_cascade", "operator_identities",
        ]
        assert report.family["verdict"]["verdict"] == "realizable_q1"
        assert report.dsf["values"] == [0.0, 1.0, 1.0, 0.0]

    def test_suite_order_qlt1(self, fixtures_dir):
        report = run_fixture(fixtures_dir, "q05_onehot.json")
        assert report.suites[-1].name == "q_structure"

    def test_perturbed_cascade_witness(self, fixtures_dir):
        report = run_fixture(fixtures_dir, "q1_perturbed_dsf.json")
        assert "commutator_cascade:A1_cascade_n2" in report.failures
        assert "structure_function:binomial_n2" in report.failures

    def test_timing_excluded(self, fixtures_dir):
        report = run_fixture(fixtures_dir, "q1_unitary.json")
        assert "wall_clock_seconds" not in json.loads(report.to_json())

    def test_pairing_rejected(self, fixtures_dir):
        config = load_run_config(fixtures_dir / "q05_fermionic_pairing.json")
        with pytest.raises(ConfigError):
            full_report(config, build_family(config))

    def test_shape_mismatch(self):
        config = _config()
        with pytest.raises(ConfigError) as info:
            full_report(config, PhiFamily.of([np.eye(3) / np.sqrt(3)]))
        assert "phi" in info.value.fields

    def test_empty_family(self):
        with pytest.raises(ConfigError):
            full_report(_config(), PhiFamily.of([]))


def test_service_lifecycle():
    service = VerificationService(threads=1)
    with pytest.raises(RuntimeError):
        service.submit(sum, [1, 2])
    service.initialize()
    try:
        assert service.submit(sum, [1, 2]).result() == 3
    finally:
        service.close()
