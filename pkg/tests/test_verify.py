import numpy as np
import pytest

from algmech.errors import InputError
from algmech.scenarios import build_canonical, build_euler_top
from algmech.verify import CHECKS, run_check

from conftest import harmonic_hamiltonian, nonjacobi_spec
from algmech.scenarios import build_constrained


def _canonical_bundle():
    return build_canonical(1, harmonic_hamiltonian())


def test_registry_names():
    assert set(CHECKS) == {
        "theorem43_equivalence",
        "omega_frame",
        "omega_dlr_consistency",
        "closedness",
        "curvature_identities",
        "structure_checks",
        "split_consistency",
        "legendre_equivalence",
        "casimir_drift",
        "energy_rate_fd",
        "dA_squared",
    }


def test_unknown_check_rejected():
    with pytest.raises(InputError):
        run_check("no_such_check", _canonical_bundle(), {"points": 3}, 0)


def test_theorem43_on_random_instances_passes():
    out = run_check(
        "theorem43_equivalence",
        _canonical_bundle(),
        {"points": 30, "random_instances": 4},
        42,
    )
    assert out["pass"] and out["max_residual"] <= 1e-9
    assert out["points"] == 30 and out["tolerance"] == 1e-9


def test_checks_on_euler_top():
    b = build_euler_top()
    for name in (
        "omega_frame",
        "omega_dlr_consistency",
        "closedness",
        "curvature_identities",
        "structure_checks",
        "split_consistency",
    ):
        out = run_check(name, b, {"points": 10}, 1)
        assert out["pass"], (name, out)


def test_casimir_drift_check():
    b = build_euler_top()
    out = run_check("casimir_drift", b, {"points": 1, "steps": 2000, "h": 1e-3}, 2)
    assert out["pass"] and out["max_residual"] <= 1e-8


def test_expect_fail_inverts_outcome():
    b = build_constrained(nonjacobi_spec())
    raw = run_check("structure_checks", b, {"points": 3}, 3)
    assert not raw["pass"]
    inv = run_check("structure_checks", b, {"points": 3, "expect_fail": True}, 3)
    assert inv["pass"]
    assert inv["max_residual"] == raw["max_residual"]


def test_tolerance_override():
    b = _canonical_bundle()
    out = run_check("closedness", b, {"points": 3, "tolerance": 1e-3}, 4)
    assert out["tolerance"] == 1e-3


def test_report_schema():
    out = run_check("omega_frame", _canonical_bundle(), {"points": 2}, 5)
    assert set(out) == {"check", "points", "max_residual", "tolerance", "pass"}
    assert isinstance(out["pass"], bool)
    assert isinstance(out["max_residual"], float)
