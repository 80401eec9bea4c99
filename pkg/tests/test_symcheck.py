from fractions import Fraction

import pytest

from spinfock.models import ModelError, ModelId, build_observable, build_superpotential, hamiltonian_terms
from spinfock.opalg import OperatorExpr as X, RadialOp as R, commutator, is_zero
from spinfock.symcheck import (
    IdentityId, applicable_identities, check_identity, check_susy, resolve_spin_orbit_reading,
    run_suite,
)


def _all_pass(reports):
    return reports and all(r.passed and r.residual_terms == 0 for r in reports)


def test_dipole_jj_example():
    (rep,) = check_identity("O4_JJ", "dipole", (1, 2))
    assert rep.passed
    assert rep.to_dict()["params"] == {"a": "1", "b": "2"}


def test_ha_rr_example():
    (rep,) = check_identity("O4_RR", "ha", (1, 2))
    assert rep.passed and rep.witness is None


def test_casimir_square():
    (rep,) = check_identity("CASIMIR_SQ", "spin-orbit")
    assert rep.passed


@pytest.mark.parametrize("model", [ModelId.HA, ModelId.DIPOLE])
def test_o4_and_conservation(model):
    for ident in ("O4_JJ", "O4_RJ", "O4_RR", "CONS_J", "CONS_R"):
        assert _all_pass(check_identity(ident, model)), ident


def test_pair_counts():
    assert len(check_identity("O4_JJ", "ha")) == 6
    assert len(check_identity("O4_RJ", "ha")) == 9
    assert len(check_identity("CONS_R", "ha")) == 3


def test_inapplicable_identity():
    with pytest.raises(ModelError):
        check_identity("CASIMIR_SQ", "dipole")


def test_applicable_sets():
    assert IdentityId.DIRAC_REDUCE in applicable_identities("dipole")
    assert IdentityId.CASIMIR_DEF not in applicable_identities("ha")


def test_spin_orbit_reading_resolution():
    assert resolve_spin_orbit_reading() == {"verbatim": False, "per_mass": True}


def _mutated_h(model, name, factor):
    total = X.zero()
    for term, c, piece in hamiltonian_terms(model):
        total = total + piece * (c * factor if term == name else c)
    return total


@pytest.mark.parametrize("model,term", [
    (ModelId.HA, "coulomb"),
    (ModelId.DIPOLE, "dipole"),
    (ModelId.SPIN_ORBIT, "spin_orbit"),
    (ModelId.SPIN_ORBIT, "inverse_square"),
])
def test_mutated_hamiltonian_breaks_runge_lenz_conservation(model, term):
    h = _mutated_h(model, term, Fraction(3, 2))
    reports = check_identity("CONS_R", model, overrides={"H": h})
    assert not all(r.passed for r in reports)
    assert any(r.witness for r in reports)


def test_failure_carries_witness():
    h = _mutated_h(ModelId.DIPOLE, "dipole", 2)
    (rep,) = check_identity("CONS_R", "dipole", 1, overrides={"H": h})
    assert not rep.passed and rep.residual_terms > 0 and rep.witness


def test_commutator_antisymmetry_on_observables():
    a = build_observable("dipole", "Rhat1")
    b = build_observable("dipole", "J2")
    assert is_zero(commutator(a, b) + commutator(b, a))


def test_susy_default_sets_pass():
    for model in ModelId:
        assert _all_pass(check_susy(model)), model


def test_flipped_sigma1_superpotential_fails():
    def flipped(j):
        w = build_superpotential("dipole", j)
        return w - R.sigma(1) / (j + 1)
    reports = check_susy("dipole", [Fraction(1, 2)], superpotential=flipped)
    assert [r.passed for r in reports] == [False, False]


def test_run_suite_order_is_stable():
    a = [r.to_dict() for r in run_suite([ModelId.DIPOLE])]
    b = [r.to_dict() for r in run_suite([ModelId.DIPOLE])]
    assert a == b
    seen = list(dict.fromkeys(d["identity"] for d in a))
    assert seen == [str(i) for i in applicable_identities("dipole")]


def test_casimir_definition_report_has_note():
    (rep,) = check_identity("CASIMIR_DEF", "spin-orbit")
    # the relation closes with the opposite relative sign
    assert not rep.passed
    assert "opposite sign" in rep.note
