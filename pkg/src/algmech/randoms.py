"""Seeded random instances for verification sweeps and property tests.

Structure functions are polynomials of bounded total degree with coefficients
uniform in [-1, 1]; dimensions stay small (n <= 3, m <= 3) so every structural
check runs at desk scale.
"""

from __future__ import annotations

import itertools

import numpy as np

from .algebroid import AlgebroidStructure
from .connections import ConnectionPair, CurvatureTensor
from .fields import SmoothField, TensorField


def poly_exponents(arity, degree):
    """All exponent vectors of the given arity with total degree <= degree."""
    out = []
    for exp in itertools.product(range(degree + 1), repeat=arity):
        if sum(exp) <= degree:
            out.append(list(exp))
    return out if arity else [[]]


def random_polynomial_field(rng, arity, degree) -> SmoothField:
    exps = poly_exponents(arity, degree)
    coefs = rng.uniform(-1.0, 1.0, size=len(exps))
    return SmoothField.polynomial(list(zip(coefs.tolist(), exps)), arity)


def random_polynomial_tensor(rng, shape, arity, degree) -> TensorField:
    out = np.empty(tuple(shape), dtype=object)
    for idx in np.ndindex(*tuple(shape)):
        out[idx] = random_polynomial_field(rng, arity, degree)
    return TensorField(out, arity=arity)


def random_algebroid(rng, n=None, m=None, degree=2) -> AlgebroidStructure:
    """A generic algebroid: no skewness, unequal anchors, polynomial data."""
    if n is None:
        n = int(rng.integers(0, 4))
    if m is None:
        m = int(rng.integers(1, 4))
    return AlgebroidStructure(
        n=n,
        m=m,
        bracket=random_polynomial_tensor(rng, (m, m, m), n, degree),
        anchor_left=random_polynomial_tensor(rng, (n, m), n, degree),
        anchor_right=random_polynomial_tensor(rng, (n, m), n, degree),
    )


def random_phase_function(rng, n, m, degree=3) -> SmoothField:
    return random_polynomial_field(rng, n + m, degree)


def random_valid_split(rng, A: AlgebroidStructure, degree=1) -> ConnectionPair:
    """A random connection pair splitting A's bracket exactly.

    Dl is free; Dr is forced by Dr[c,a,b] = Dl[c,b,a] - B[c,b,a], which is
    exact polynomial arithmetic, so the split residual is zero to rounding.
    """
    m, n = A.m, A.n
    Dl = random_polynomial_tensor(rng, (m, m, m), n, degree)
    Dr = np.empty((m, m, m), dtype=object)
    for c in range(m):
        for a in range(m):
            for b in range(m):
                Dr[c, a, b] = Dl[c, b, a] - A.bracket[c, b, a]
    return ConnectionPair(Dl=Dl, Dr=TensorField(Dr, arity=n))


def random_curvature(rng, m, arity, degree=1) -> CurvatureTensor:
    return CurvatureTensor(random_polynomial_tensor(rng, (m, m, m, m), arity, degree))


def random_phase_point(rng, n, m, scale=1.0):
    return rng.uniform(-scale, scale, size=n), rng.uniform(-scale, scale, size=m)
