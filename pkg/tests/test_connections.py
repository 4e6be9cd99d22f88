import itertools

import numpy as np
import pytest

from algmech.algebroid import (
    canonical_tangent,
    levi_civita_symbol,
    structure_eval,
)
from algmech.connections import (
    ConnectionPair,
    curvature,
    curvature_at,
    default_split,
    levi_civita,
    lift,
    metric_compatible_pair,
    verify_split,
)
from algmech.errors import InputError
from algmech.fields import SmoothField, TensorField, field_from_polynomial
from algmech.hamiltonian import PhasePoint
from algmech.randoms import random_algebroid
from algmech.scenarios import _AdaptedFrame

from conftest import curved_plane_metric, tr3_classical_spec


def test_default_split_canonical(canonical2):
    cp = default_split(canonical2)
    q = [0.3, 0.1]
    assert np.all(cp.Dl.eval(q) == 0.0)
    assert np.all(cp.Dr.eval(q) == 0.0)


def test_default_split_so3(so3):
    cp = default_split(so3)
    eps = levi_civita_symbol()
    # Dr[c, a, b] = -B[c, b, a] = eps_{abc}
    assert np.array_equal(cp.Dr.eval([]), np.transpose(eps, (2, 0, 1)))


def test_default_split_verifies_on_random_instances():
    rng = np.random.default_rng(4)
    for _ in range(10):
        A = random_algebroid(rng)
        cp = default_split(A)
        for _ in range(10):
            q = rng.uniform(-1, 1, size=A.n)
            assert verify_split(A, cp, q) <= 1e-14


def test_verify_split_levi_civita_pair(so3):
    G = TensorField.from_constants(np.eye(3), 0)
    Gamma = levi_civita(so3, G)
    assert verify_split(so3, metric_compatible_pair(Gamma), []) <= 1e-14


def test_verify_split_detects_perturbation(canonical2):
    cp = default_split(canonical2)
    bumped = np.empty((2, 2, 2), dtype=object)
    for idx in np.ndindex(2, 2, 2):
        bumped[idx] = cp.Dl.fields[idx]
    bumped[0, 1, 0] = bumped[0, 1, 0] + SmoothField.constant(1e-3, 2)
    cp2 = ConnectionPair(Dl=TensorField(bumped, arity=2), Dr=cp.Dr)
    assert abs(verify_split(canonical2, cp2, [0.0, 0.0]) - 1e-3) <= 1e-12


def test_levi_civita_flat(canonical2):
    Gamma = levi_civita(canonical2, TensorField.from_constants(np.eye(2), 2))
    assert np.all(Gamma.eval([0.4, -0.2]) == 0.0)


def test_levi_civita_curved_plane(canonical2):
    Gamma = levi_civita(canonical2, curved_plane_metric())
    q1 = 0.7
    G = Gamma.eval([q1, -0.3])
    assert abs(G[1, 0, 1] - q1 / (1 + q1 * q1)) <= 1e-12
    assert abs(G[1, 1, 0] - q1 / (1 + q1 * q1)) <= 1e-12
    assert abs(G[0, 1, 1] + q1) <= 1e-12
    others = G.copy()
    others[1, 0, 1] = others[1, 1, 0] = others[0, 1, 1] = 0.0
    assert np.max(np.abs(others)) <= 1e-12


def test_levi_civita_so3_brute_force_koszul(so3):
    """Oracle: solve the defining relation entrywise over all 27 index triples."""
    G = np.eye(3)
    s = structure_eval(so3, [])
    Gamma = levi_civita(so3, TensorField.from_constants(G, 0)).eval([])
    for a, b, g in itertools.product(range(3), repeat=3):
        rhs = 0.0
        # metric terms vanish (constant G, no base); bracket terms remain
        rhs += float(s.B[:, g, b] @ G[:, a])
        rhs += float(s.B[:, g, a] @ G[:, b])
        rhs -= float(s.B[:, b, a] @ G[:, g])
        lhs = 2.0 * float(G[g] @ Gamma[:, a, b])
        assert abs(lhs - rhs) <= 1e-14
    eps = levi_civita_symbol()
    assert np.max(np.abs(Gamma - 0.5 * np.transpose(eps, (2, 0, 1)))) <= 1e-14


def test_levi_civita_rejects_bad_metric(canonical2):
    bad = TensorField.from_constants(np.array([[1.0, 2.0], [0.0, 1.0]]), 2)
    with pytest.raises(InputError):
        levi_civita(canonical2, bad).eval([0.0, 0.0])
    indef = TensorField.from_constants(np.diag([1.0, -1.0]), 2)
    with pytest.raises(InputError):
        levi_civita(canonical2, indef).eval([0.0, 0.0])


def test_curvature_flat(canonical2):
    Gamma = TensorField.zeros((2, 2, 2), 2)
    R, rep = curvature(canonical2, Gamma, [0.1, 0.2])
    assert np.all(R == 0.0)
    assert rep.skew_residual == 0.0 and rep.bianchi_residual == 0.0


def test_curvature_curved_plane(canonical2):
    Gamma = levi_civita(canonical2, curved_plane_metric())
    R, rep = curvature(canonical2, Gamma, [0.5, -0.1])
    assert np.max(np.abs(R)) > 1e-3  # genuinely curved
    assert rep.skew_residual <= 1e-6
    assert rep.bianchi_residual <= 1e-6


def test_curvature_so3_quarter(so3):
    Gamma = levi_civita(so3, TensorField.from_constants(np.eye(3), 0))
    R, rep = curvature(so3, Gamma, [])
    out = R[:, 0, 1, 1]  # curvature of the (e1, e2) pair applied to e2
    assert np.max(np.abs(out - [0.25, 0.0, 0.0])) <= 1e-14
    assert rep.skew_residual <= 1e-14 and rep.bianchi_residual <= 1e-14


def test_lift_canonical(canonical1):
    cp = default_split(canonical1)
    x = PhasePoint([0.3], [0.8])
    assert np.array_equal(lift(canonical1, cp, "horizontal_left", [1.0], x), [1.0, 0.0])


def test_lift_so3_horizontal_right(so3):
    cp = default_split(so3)
    x = PhasePoint([], [1.0, 2.0, 3.0])
    out = lift(so3, cp, "horizontal_right", [1.0, 0.0, 0.0], x)
    assert np.allclose(out, [0.0, 3.0, -2.0])
    out_l = lift(so3, cp, "horizontal_left", [1.0, 0.0, 0.0], x)
    assert np.all(out_l == 0.0)


def test_lift_vertical():
    A = random_algebroid(np.random.default_rng(1), n=3, m=2)
    cp = default_split(A)
    x = PhasePoint([0.1, 0.2, 0.3], [0.5, 0.6])
    out = lift(A, cp, "vertical", [2.0, 5.0], x)
    assert np.array_equal(out, [0.0, 0.0, 0.0, 2.0, 5.0])


def test_lift_linear_in_coefficients(so3):
    cp = default_split(so3)
    x = PhasePoint([], [0.4, -0.2, 1.0])
    rng = np.random.default_rng(8)
    for mode in ("horizontal_left", "horizontal_right", "vertical"):
        u, v = rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3)
        lhs = lift(so3, cp, mode, 2.0 * u - v, x)
        rhs = 2.0 * lift(so3, cp, mode, u, x) - lift(so3, cp, mode, v, x)
        assert np.max(np.abs(lhs - rhs)) <= 1e-14


def test_horizontal_lift_characterization(so3):
    """Contract the lift with jets of pullback and fibre-linear test functions."""
    cp = default_split(so3)
    x = PhasePoint([], [1.0, 2.0, 3.0])
    Dr = cp.Dr.eval([])
    for a in range(3):
        e = np.zeros(3)
        e[a] = 1.0
        vec = lift(so3, cp, "horizontal_right", e, x)
        # fibre-linear test function p_beta: derivative equals Dr[g,a,b] p_g
        for b in range(3):
            grad = np.zeros(3)
            grad[b] = 1.0
            assert abs(vec @ grad - Dr[:, a, b] @ x.p) <= 1e-10


def test_horizontal_lift_characterization_pullbacks(canonical2):
    """Applied to base-pullback functions the lift returns the anchor derivative."""
    Gamma = levi_civita(canonical2, curved_plane_metric())
    cp = metric_compatible_pair(Gamma)
    f = field_from_polynomial([(1.0, [2, 1]), (0.5, [0, 1])], 2)
    x = PhasePoint([0.6, -0.3], [0.2, 0.9])
    s = structure_eval(canonical2, x.q)
    gf = f.gradient(x.q)
    for a in range(2):
        e = np.zeros(2)
        e[a] = 1.0
        vec = lift(canonical2, cp, "horizontal_left", e, x)
        assert abs(vec[:2] @ gf - s.rho_l[:, a] @ gf) <= 1e-10


def test_connection_axioms_for_scenario_built_pair():
    """Leibniz rule: the defining projector route against the Christoffel route.

    For sections X = sum f_a s_a, Y = sum g_b s_b with polynomial coefficients,
    the defining route projects the ambient covariant derivative of the
    variational image of Y; the axiom route contracts the built Christoffels
    and adds the anchor-derivative term.  Both must agree.
    """
    spec = tr3_classical_spec()
    frame = _AdaptedFrame(spec)
    rng = np.random.default_rng(9)
    k, M = frame.k, frame.M
    f = [field_from_polynomial([(0.7, [1, 0, 0]), (-0.4, [0, 1, 1])], 3),
         field_from_polynomial([(0.3, [0, 0, 1]), (1.0, [0, 0, 0])], 3)]
    g = [field_from_polynomial([(0.5, [0, 1, 0]), (0.2, [2, 0, 0])], 3),
         field_from_polynomial([(-0.8, [1, 1, 0]), (0.6, [0, 0, 0])], 3)]
    h = frame.h
    for _ in range(5):
        q = rng.uniform(-0.8, 0.8, 3)
        core = frame.core_at(q)
        Dl, _ = frame.split_at(q)
        Gam = frame.Gamma.eval(q)
        P, Pi, rho = core["P"], core["Pi"], core["rho_new"]
        fv = np.array([fc.value(q) for fc in f])
        gv = np.array([gc.value(q) for gc in g])
        gg = np.array([gc.gradient(q) for gc in g])  # [k, n]

        # defining route: ambient coefficients of the variational image of Y
        def Y_ambient(qq):
            c = frame.core_at(qq)
            return c["Pi"] @ np.array([gc.value(qq) for gc in g])

        Yv = Y_ambient(q)
        dY = np.empty((M, 3))
        for i in range(3):
            qp, qm = q.copy(), q.copy()
            qp[i] += h
            qm[i] -= h
            dY[:, i] = (Y_ambient(qp) - Y_ambient(qm)) / (2 * h)
        route_a = np.zeros(k)
        for a in range(k):
            inner = np.einsum("gm,m->g", Gam[:, a, :], Yv) + dY @ rho[:, a]
            route_a += fv[a] * (P @ inner)

        # axiom route: Christoffel contraction plus anchor derivative of g
        route_b = np.einsum("a,b,cab->c", fv, gv, Dl)
        route_b += np.einsum("a,ia,ci->c", fv, rho[:, :k], gg)
        assert np.max(np.abs(route_a - route_b)) <= 1e-8


def test_split_consistency_for_torsion_free_pair(canonical2):
    Gamma = levi_civita(canonical2, curved_plane_metric())
    cp = metric_compatible_pair(Gamma)
    for q in ([0.0, 0.0], [0.5, -0.5], [1.0, 2.0]):
        assert verify_split(canonical2, cp, q) <= 1e-12


def test_curvature_identities_for_projected_connection():
    spec = tr3_classical_spec()
    frame = _AdaptedFrame(spec)
    rng = np.random.default_rng(10)
    for _ in range(5):
        q = rng.uniform(-0.8, 0.8, 3)
        R = curvature_at(frame.adapted, frame.Gamma, q)
        assert np.max(np.abs(R + np.swapaxes(R, 1, 2))) <= 1e-5
        cyc = R + np.transpose(R, (0, 2, 3, 1)) + np.transpose(R, (0, 3, 1, 2))
        assert np.max(np.abs(cyc)) <= 1e-5
