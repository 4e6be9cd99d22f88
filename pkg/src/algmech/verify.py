"""Named verification checks over seeded probe points.

Each check evaluates one numerical claim about a scenario bundle (or about
randomly generated instances) at K probe points and reports
``{check, points, max_residual, tolerance, pass}``.  The registered names are
the contract of the command-line ``verify`` subcommand.
"""

from __future__ import annotations

import numpy as np

from .algebroid import structure_checks
from .connections import verify_split
from .errors import InputError
from .hamiltonian import PhasePoint, energy_rate, ham_field, integrate
from .prolongation import (
    ProlongationData,
    closedness_residual,
    d_squared_oneform_residual,
    d_squared_scalar_residual,
    lr_ham_field,
    omega,
)
from .randoms import (
    random_algebroid,
    random_curvature,
    random_phase_function,
    random_phase_point,
    random_valid_split,
)
from .scenarios import ScenarioBundle, lagrangian_reference


def _probe(rng, A, scale=1.0) -> PhasePoint:
    q, p = random_phase_point(rng, A.n, A.m, scale)
    return PhasePoint(q, p)


def theorem43_residual(A, split, R, H, x) -> float:
    """Relative gap between the section-route and tensor-route fields at x."""
    P = ProlongationData(A, split, R)
    lhs = lr_ham_field(P, H, x)
    rhs = ham_field(A, H, x)
    return float(np.max(np.abs(lhs - rhs)) / (1.0 + np.max(np.abs(rhs))))


def check_theorem43_equivalence(bundle, cfg, rng):
    """Section route equals tensor route, on the scenario and random instances."""
    K = cfg["points"]
    worst = 0.0
    if bundle is not None:
        P = bundle.prolongation()
        for _ in range(K):
            x = _probe(rng, bundle.algebroid)
            lhs = lr_ham_field(P, bundle.hamiltonian, x)
            rhs = ham_field(bundle.algebroid, bundle.hamiltonian, x)
            worst = max(worst, float(np.max(np.abs(lhs - rhs)) / (1.0 + np.max(np.abs(rhs)))))
    for _ in range(int(cfg.get("random_instances", 5))):
        A = random_algebroid(rng)
        split = random_valid_split(rng, A)
        R = random_curvature(rng, A.m, A.n)
        H = random_phase_function(rng, A.n, A.m)
        for _ in range(max(1, K // 10)):
            x = _probe(rng, A)
            worst = max(worst, theorem43_residual(A, split, R, H, x))
    return worst


def check_omega_frame(bundle, cfg, rng):
    """Frame pairing is exactly [[0, I], [-I, 0]] with unit determinant."""
    P = bundle.prolongation()
    m = bundle.algebroid.m
    block = np.zeros((2 * m, 2 * m))
    block[:m, m:] = np.eye(m)
    block[m:, :m] = -np.eye(m)
    worst = 0.0
    for _ in range(cfg["points"]):
        x = _probe(rng, bundle.algebroid)
        O = omega(P, x, "frame_formula")
        worst = max(worst, float(np.max(np.abs(O - block))))
        worst = max(worst, abs(float(np.linalg.det(O)) - 1.0))
    return worst


def check_omega_dlr_consistency(bundle, cfg, rng):
    """Generic differential route reproduces the frame pairing."""
    P = bundle.prolongation()
    worst = 0.0
    for _ in range(cfg["points"]):
        x = _probe(rng, bundle.algebroid)
        worst = max(
            worst,
            float(np.max(np.abs(omega(P, x, "generic_dlr") - omega(P, x, "frame_formula")))),
        )
    return worst


def check_closedness(bundle, cfg, rng):
    P = bundle.prolongation()
    worst = 0.0
    for _ in range(cfg["points"]):
        worst = max(worst, closedness_residual(P, _probe(rng, bundle.algebroid)))
    return worst


def check_curvature_identities(bundle, cfg, rng):
    """Skew and first-Bianchi residuals of the scenario's curvature tensor."""
    A = bundle.algebroid
    worst = 0.0
    for _ in range(cfg["points"]):
        q = rng.uniform(-1, 1, size=A.n)
        R = bundle.curvature.eval(q)
        worst = max(worst, float(np.max(np.abs(R + np.swapaxes(R, 1, 2)))))
        cyc = R + np.transpose(R, (0, 2, 3, 1)) + np.transpose(R, (0, 3, 1, 2))
        worst = max(worst, float(np.max(np.abs(cyc))))
    return worst


def check_structure_checks(bundle, cfg, rng):
    """Max of the four structural defects at the probe points."""
    A = bundle.algebroid
    worst = 0.0
    for _ in range(cfg["points"]):
        rep = structure_checks(A, rng.uniform(-1, 1, size=A.n))
        worst = max(
            worst,
            rep.skew_defect,
            rep.anchor_lr_defect,
            rep.jacobiator_norm,
            rep.anchor_morphism_defect,
        )
    return worst


def check_split_consistency(bundle, cfg, rng):
    worst = 0.0
    for _ in range(cfg["points"]):
        q = rng.uniform(-1, 1, size=bundle.algebroid.n)
        worst = max(worst, verify_split(bundle.algebroid, bundle.split, q))
    return worst


def check_legendre_equivalence(bundle, cfg, rng):
    """Velocity-side reference trajectory matches the momentum-side one."""
    spec = cfg.get("constraint_spec")
    if spec is None:
        raise InputError("legendre_equivalence requires a constrained scenario")
    steps = int(cfg.get("steps", 1000))
    h = float(cfg.get("h", 1e-3))
    n, k = bundle.algebroid.n, bundle.algebroid.m
    q0 = np.asarray(cfg.get("q0", np.zeros(n)), dtype=float)
    v0 = np.asarray(cfg.get("v0", 0.1 + 0.1 * np.arange(k)), dtype=float)
    traj = integrate(bundle.algebroid, bundle.hamiltonian, PhasePoint(q0, v0), h, steps)
    ref = lagrangian_reference(spec, v0, q0, h, steps)
    worst = 0.0
    for smp, (_, lq, lv) in zip(traj.samples, ref):
        if n:
            worst = max(worst, float(np.max(np.abs(smp[1].q - lq))))
        worst = max(worst, float(np.max(np.abs(smp[1].p - lv))))
    return worst


def check_casimir_drift(bundle, cfg, rng):
    if not bundle.monitors:
        raise InputError("casimir_drift requires a scenario with monitors")
    steps = int(cfg.get("steps", 10000))
    h = float(cfg.get("h", 1e-3))
    x0 = cfg.get("x0")
    if x0 is None:
        x0 = PhasePoint(np.zeros(bundle.algebroid.n), np.ones(bundle.algebroid.m))
    traj = integrate(bundle.algebroid, bundle.hamiltonian, x0, h, steps, bundle.monitors)
    worst = 0.0
    for name in traj.monitor_names:
        vals = traj.monitor_values(name)
        worst = max(worst, float(np.max(np.abs(vals - vals[0]))))
    return worst


def check_energy_rate_fd(bundle, cfg, rng):
    """Stored dH/dt against a central difference of H along the flow."""
    steps = int(cfg.get("steps", 1000))
    h = float(cfg.get("h", 1e-3))
    x0 = cfg.get("x0")
    if x0 is None:
        x0 = _probe(rng, bundle.algebroid, scale=0.5)
    traj = integrate(bundle.algebroid, bundle.hamiltonian, x0, h, steps)
    Hs = traj.h_values()
    rates = np.array([s[3] for s in traj.samples])
    stride = max(1, steps // 100)
    worst = 0.0
    for i in range(1, steps, stride):
        fd = (Hs[i + 1] - Hs[i - 1]) / (2 * h)
        worst = max(worst, abs(fd - rates[i]))
    return worst


def check_dA_squared(bundle, cfg, rng):
    """Twice-applied skew differential on a random function and one-section."""
    P = bundle.prolongation()
    A = bundle.algebroid
    phi = random_phase_function(rng, A.n, A.m, degree=2)
    theta = np.array(
        [random_phase_function(rng, A.n, A.m, degree=1) for _ in range(2 * A.m)],
        dtype=object,
    )
    worst = 0.0
    for _ in range(cfg["points"]):
        x = _probe(rng, A)
        worst = max(worst, d_squared_scalar_residual(P, phi, x))
    x = _probe(rng, A)
    worst = max(worst, d_squared_oneform_residual(P, theta, x))
    return worst


_DEFAULT_TOLERANCES = {
    "theorem43_equivalence": 1e-9,
    "omega_frame": 1e-15,
    "omega_dlr_consistency": 1e-8,
    "closedness": 1e-8,
    "curvature_identities": 1e-5,
    "structure_checks": 1e-10,
    "split_consistency": 1e-10,
    "legendre_equivalence": 1e-6,
    "casimir_drift": 1e-8,
    "energy_rate_fd": 1e-6,
    "dA_squared": 1e-8,
}

# checks whose tolerance class is configurable through verification.tolerances
_TOLERANCE_CLASS = {
    "theorem43_equivalence": "analytic_tol",
    "curvature_identities": "fd_tol",
}

CHECKS = {
    "theorem43_equivalence": check_theorem43_equivalence,
    "omega_frame": check_omega_frame,
    "omega_dlr_consistency": check_omega_dlr_consistency,
    "closedness": check_closedness,
    "curvature_identities": check_curvature_identities,
    "structure_checks": check_structure_checks,
    "split_consistency": check_split_consistency,
    "legendre_equivalence": check_legendre_equivalence,
    "casimir_drift": check_casimir_drift,
    "energy_rate_fd": check_energy_rate_fd,
    "dA_squared": check_dA_squared,
}


def run_check(name, bundle: ScenarioBundle, cfg, seed) -> dict:
    """Run one registered check; ``cfg`` holds points/tolerances/extras.

    With ``expect_fail`` set, passing means the residual *exceeded* the
    tolerance, as expected for a negative control.
    """
    if name not in CHECKS:
        raise InputError(f"unknown check name {name!r}")
    rng = np.random.default_rng(seed)
    fallback = _DEFAULT_TOLERANCES[name]
    cls = _TOLERANCE_CLASS.get(name)
    if cls is not None and cls in cfg:
        fallback = cfg[cls]
    tolerance = float(cfg.get("tolerance", fallback))
    residual = CHECKS[name](bundle, cfg, rng)
    expect_fail = bool(cfg.get("expect_fail", False))
    ok = residual <= tolerance
    if expect_fail:
        ok = not ok
    return {
        "check": name,
        "points": int(cfg["points"]),
        "max_residual": float(residual),
        "tolerance": tolerance,
        "pass": bool(ok),
    }
