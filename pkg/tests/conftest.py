"""Shared instances for the test suite."""

import numpy as np
import pytest

from algmech.algebroid import (
    AlgebroidStructure,
    algebroid_from_constants,
    canonical_tangent,
    so3_algebra,
)
from algmech.fields import SmoothField, TensorField, field_from_polynomial
from algmech.scenarios import ConstraintSpec


@pytest.fixture
def so3():
    return so3_algebra()


@pytest.fixture
def canonical1():
    return canonical_tangent(1)


@pytest.fixture
def canonical2():
    return canonical_tangent(2)


def harmonic_hamiltonian():
    """H = p^2/2 + q^2/2 on the 1d chart."""
    return field_from_polynomial([(0.5, [0, 2]), (0.5, [2, 0])], 2)


def euler_hamiltonian(inertia=(1.0, 2.0, 3.0)):
    terms = []
    for a, I in enumerate(inertia):
        e = [0, 0, 0]
        e[a] = 2
        terms.append((0.5 / I, e))
    return field_from_polynomial(terms, 3)


def symmetric_product_line():
    """Rank-1 symmetric-bracket structure on a 1d chart with unit metric."""
    return AlgebroidStructure(
        n=1,
        m=1,
        bracket=TensorField.zeros((1, 1, 1), 1),
        anchor_left=TensorField.from_constants(np.eye(1), 1),
        anchor_right=TensorField.from_constants(-np.eye(1), 1),
    )


def curved_plane_metric():
    """diag(1, 1 + q1^2) over the 2d chart."""
    one = field_from_polynomial([(1.0, [0, 0])], 2)
    zero = SmoothField.zero(2)
    g22 = field_from_polynomial([(1.0, [0, 0]), (1.0, [2, 0])], 2)
    return TensorField(np.array([[one, zero], [zero, g22]], dtype=object))


def tr3_classical_spec():
    """Genuinely nonholonomic kinematic plane field in a curved 3d chart."""
    amb = canonical_tangent(3)
    q2 = field_from_polynomial([(1.0, [0, 1, 0])], 3)
    one = field_from_polynomial([(1.0, [0, 0, 0])], 3)
    zero = SmoothField.zero(3)
    g22 = field_from_polynomial([(1.0, [0, 0, 0]), (1.0, [2, 0, 0])], 3)
    G = TensorField(
        np.array(
            [[one, zero, zero], [zero, g22, zero], [zero, zero, one]], dtype=object
        )
    )
    V = field_from_polynomial([(0.5, [0, 2, 0]), (1.0, [2, 0, 0])], 3)
    return ConstraintSpec(
        ambient=amb,
        metric=G,
        kinematic_basis=[[1, 0, q2], [0, 1, 0]],
        potential=V,
    )


def generalized_so3_spec():
    """Kinematic and variational subbundles differ inside the rotation algebra."""
    return ConstraintSpec(
        ambient=so3_algebra(),
        metric=TensorField.from_constants(np.eye(3), 0),
        kinematic_basis=[[1, 0, 0], [0, 1, 0]],
        variational_basis=[[1, 0, 0], [0, 1, 1]],
    )


def se2r_algebra():
    """Planar-motion algebra plus a central direction, as constants."""
    C = np.zeros((4, 4, 4))
    C[1, 2, 0] = 1.0
    C[1, 0, 2] = -1.0
    C[0, 2, 1] = -1.0
    C[0, 1, 2] = 1.0
    return algebroid_from_constants(C, n=0)


def nonjacobi_spec():
    """A subspace whose projected bracket fails the Jacobi identity."""
    return ConstraintSpec(
        ambient=se2r_algebra(),
        metric=TensorField.from_constants(np.eye(4), 0),
        kinematic_basis=[[0, 1, 0, 1], [0, 0, 1, 1], [1, -1, 1, 0]],
    )
