"""Smooth scalar and tensor fields over a coordinate chart.

Every coordinate-dependent coefficient in the library (structure functions,
metrics, Hamiltonians, Christoffel symbols) is a :class:`SmoothField`: a real
function of the chart coordinates that can also report its first-derivative
jet.  Three flavours exist:

* polynomial fields, with exact evaluation and exact gradients;
* builtin fields, named closures registered in code (``sin``, ``cos``, ...);
* finite-difference wrapped fields, any evaluable closure whose gradient is
  taken by central differences with step ``h``.

Linear combinations of fields keep exact gradients (the jet is linear), so
derived coefficients like differences of Christoffel tensors stay as accurate
as their ingredients.
"""

from __future__ import annotations

import math
import os

import numpy as np

from .errors import InputError, NumericError

DEFAULT_FD_STEP = 1e-5


def fd_default_step() -> float:
    """Default central-difference step; ``ALGMECH_FD_STEP`` overrides it."""
    raw = os.environ.get("ALGMECH_FD_STEP")
    if raw is None:
        return DEFAULT_FD_STEP
    try:
        h = float(raw)
    except ValueError as exc:
        raise InputError(f"ALGMECH_FD_STEP is not a number: {raw!r}") from exc
    if h <= 0:
        raise InputError("ALGMECH_FD_STEP must be positive")
    return h


def _check_point(q, arity):
    q = np.asarray(q, dtype=float).reshape(-1)
    if q.shape[0] != arity:
        raise InputError(f"point has length {q.shape[0]}, field arity is {arity}")
    if not np.all(np.isfinite(q)):
        raise InputError("point has non-finite entries")
    return q


def memoized_on_point(fn, maxsize=16384):
    """Cache a pure array-to-result function on the point's byte image.

    Evaluation closures in this library are pure, so different components of
    one tensor (and repeated finite-difference shifts) can share a single
    pointwise computation.  The cache is cleared wholesale when full.
    """
    cache = {}

    def wrapped(q):
        q = np.asarray(q, dtype=float)
        key = q.tobytes()
        hit = cache.get(key)
        if hit is None:
            if len(cache) >= maxsize:
                cache.clear()
            hit = fn(q)
            cache[key] = hit
        return hit

    return wrapped


class SmoothField:
    """Scalar function of ``arity`` chart coordinates with a first-derivative jet.

    ``kind`` is one of ``"polynomial"``, ``"builtin"``, ``"fd"`` or
    ``"composite"`` (linear combination of other fields).
    """

    __slots__ = ("arity", "kind", "_terms", "_fn", "_grad", "_h", "name")

    def __init__(self, arity, kind, terms=None, fn=None, grad=None, h=None, name=None):
        self.arity = int(arity)
        self.kind = kind
        self._terms = terms
        self._fn = fn
        self._grad = grad
        self._h = h
        self.name = name

    # -- constructors -------------------------------------------------------

    @classmethod
    def polynomial(cls, terms, arity) -> "SmoothField":
        """Field Σ coef · Π q_i^{e_i} from ``terms = [(coef, exponent_vector), ...]``."""
        arity = int(arity)
        if arity < 0:
            raise InputError("arity must be >= 0")
        coefs = []
        exps = []
        for coef, exp in terms:
            exp = np.asarray(exp, dtype=int).reshape(-1)
            if exp.shape[0] != arity:
                raise InputError(
                    f"exponent vector {exp.tolist()} has length {exp.shape[0]}, arity is {arity}"
                )
            if np.any(exp < 0):
                raise InputError("exponents must be >= 0")
            coef = float(coef)
            if not math.isfinite(coef):
                raise InputError("coefficients must be finite")
            coefs.append(coef)
            exps.append(exp)
        if coefs:
            packed = (np.asarray(coefs, dtype=float), np.vstack(exps))
        else:
            packed = (np.zeros(0), np.zeros((0, arity), dtype=int))
        return cls(arity, "polynomial", terms=packed)

    @classmethod
    def constant(cls, value, arity) -> "SmoothField":
        value = float(value)
        if value == 0.0:
            return cls.polynomial([], arity)
        return cls.polynomial([(value, [0] * arity)], arity)

    @classmethod
    def zero(cls, arity) -> "SmoothField":
        return cls.polynomial([], arity)

    @classmethod
    def coordinate(cls, index, arity) -> "SmoothField":
        """The chart coordinate q_index as a field."""
        exp = [0] * arity
        exp[index] = 1
        return cls.polynomial([(1.0, exp)], arity)

    @classmethod
    def from_callable(cls, fn, arity, grad=None, h=None, name=None) -> "SmoothField":
        """Wrap ``fn(q) -> float``; gradient analytic if ``grad`` given, else FD."""
        kind = "builtin" if grad is not None else "fd"
        if grad is None and h is None:
            h = fd_default_step()
        return cls(int(arity), kind, fn=fn, grad=grad, h=h, name=name)

    @classmethod
    def builtin(cls, name, h=None) -> "SmoothField":
        """Look up a code-registered named closure; gradient by central differences."""
        try:
            fn, arity = _BUILTINS[name]
        except KeyError as exc:
            raise InputError(f"unknown builtin field {name!r}") from exc
        if h is None:
            h = fd_default_step()
        return cls(arity, "builtin", fn=fn, h=float(h), name=name)

    # -- evaluation ---------------------------------------------------------

    def value(self, q) -> float:
        q = _check_point(q, self.arity)
        v = self._value(q)
        if not math.isfinite(v):
            raise NumericError(f"field evaluated to non-finite value at {q.tolist()}")
        return v

    def gradient(self, q) -> np.ndarray:
        q = _check_point(q, self.arity)
        g = self._gradient(q)
        if not np.all(np.isfinite(g)):
            raise NumericError(f"field gradient non-finite at {q.tolist()}")
        return g

    def eval(self, q):
        """Return ``(value, gradient)`` at ``q``."""
        return self.value(q), self.gradient(q)

    def __call__(self, q) -> float:
        return self.value(q)

    def _value(self, q):
        if self.kind == "polynomial":
            coefs, exps = self._terms
            if coefs.shape[0] == 0:
                return 0.0
            return float(np.sum(coefs * np.prod(q[None, :] ** exps, axis=1)))
        if self.kind == "composite":
            return float(sum(w * f._value(q) for w, f in self._terms))
        return float(self._fn(q))

    def _gradient(self, q):
        n = self.arity
        if self.kind == "polynomial":
            coefs, exps = self._terms
            g = np.zeros(n)
            if coefs.shape[0] == 0:
                return g
            for i in range(n):
                e = exps[:, i]
                mask = e > 0
                if not np.any(mask):
                    continue
                dexps = exps[mask].copy()
                dexps[:, i] -= 1
                g[i] = np.sum(
                    coefs[mask] * e[mask] * np.prod(q[None, :] ** dexps, axis=1)
                )
            return g
        if self.kind == "composite":
            g = np.zeros(n)
            for w, f in self._terms:
                g += w * f._gradient(q)
            return g
        if self._grad is not None:
            return np.asarray(self._grad(q), dtype=float).reshape(n)
        # central differences: (f(q+h e_i) - f(q-h e_i)) / 2h
        h = self._h if self._h is not None else fd_default_step()
        g = np.zeros(n)
        for i in range(n):
            qp = q.copy()
            qm = q.copy()
            qp[i] += h
            qm[i] -= h
            g[i] = (self._fn(qp) - self._fn(qm)) / (2.0 * h)
        return g

    # -- algebra (linear combinations keep exact jets) ----------------------

    def _lincomb(self, other, w_self, w_other):
        if not isinstance(other, SmoothField):
            raise TypeError("can only combine SmoothField with SmoothField")
        if other.arity != self.arity:
            raise InputError("field arities differ")
        if self.kind == "polynomial" and other.kind == "polynomial":
            c1, e1 = self._terms
            c2, e2 = other._terms
            coefs = np.concatenate([w_self * c1, w_other * c2])
            exps = np.vstack([e1, e2]) if coefs.shape[0] else e1
            terms = list(zip(coefs.tolist(), exps.tolist()))
            return SmoothField.polynomial(terms, self.arity)
        return SmoothField(
            self.arity, "composite", terms=((w_self, self), (w_other, other))
        )

    def __add__(self, other):
        return self._lincomb(other, 1.0, 1.0)

    def __sub__(self, other):
        return self._lincomb(other, 1.0, -1.0)

    def __neg__(self):
        return self.scaled(-1.0)

    def scaled(self, w) -> "SmoothField":
        w = float(w)
        if self.kind == "polynomial":
            coefs, exps = self._terms
            return SmoothField.polynomial(
                list(zip((w * coefs).tolist(), exps.tolist())), self.arity
            )
        return SmoothField(self.arity, "composite", terms=((w, self),))

    def __mul__(self, w):
        return self.scaled(w)

    __rmul__ = __mul__

    # -- serialization (polynomial and builtin kinds only) -------------------

    def as_config(self):
        if self.kind == "polynomial":
            coefs, exps = self._terms
            return {
                "arity": self.arity,
                "terms": [
                    {"coef": float(c), "exp": [int(e) for e in row]}
                    for c, row in zip(coefs, exps)
                ],
            }
        if self.kind == "builtin" and self.name is not None:
            return {"arity": self.arity, "builtin": self.name, "h": self._h}
        raise InputError(f"field of kind {self.kind!r} is not serializable")

    def __repr__(self):
        return f"SmoothField(arity={self.arity}, kind={self.kind!r})"


def field_eval(f: SmoothField, q):
    """Value and gradient of ``f`` at ``q``; exact for polynomials, FD otherwise."""
    return f.eval(q)


def field_from_polynomial(terms, arity) -> SmoothField:
    """Polynomial field from ``[(coefficient, exponent_vector), ...]``."""
    return SmoothField.polynomial(terms, arity)


def field_from_config(obj) -> SmoothField:
    """Parse the structured config form of a field.

    Accepts a plain number (constant of unknown arity is not allowed, so
    numbers are only valid where the caller supplies arity via
    :func:`field_from_config_with_arity`), or a dict with either ``terms``
    (polynomial) or ``builtin``.
    """
    if not isinstance(obj, dict):
        raise InputError(f"field config must be an object, got {type(obj).__name__}")
    if "arity" not in obj:
        raise InputError("field config missing 'arity'")
    arity = obj["arity"]
    if "builtin" in obj:
        return SmoothField.builtin(obj["builtin"], h=obj.get("h"))
    terms = [(t["coef"], t["exp"]) for t in obj.get("terms", [])]
    return SmoothField.polynomial(terms, arity)


def field_from_config_with_arity(obj, arity) -> SmoothField:
    """Like :func:`field_from_config` but numbers mean constants of ``arity``."""
    if isinstance(obj, (int, float)):
        return SmoothField.constant(obj, arity)
    f = field_from_config(obj)
    if f.arity != arity:
        raise InputError(f"field arity {f.arity} does not match expected {arity}")
    return f


_BUILTINS = {}


def register_builtin(name, fn, arity=1):
    """Register a named closure usable as ``SmoothField.builtin(name)``."""
    _BUILTINS[name] = (fn, int(arity))


register_builtin("sin", lambda q: math.sin(q[0]))
register_builtin("cos", lambda q: math.cos(q[0]))
register_builtin("exp", lambda q: math.exp(q[0]))


class TensorField:
    """Dense array of SmoothFields, one per multi-index.

    ``shape`` is the list of index extents; evaluation at a chart point
    returns a float array of the same shape.  All component fields share one
    arity.
    """

    __slots__ = ("shape", "arity", "fields")

    def __init__(self, fields, arity=None):
        fields = np.asarray(fields, dtype=object)
        flat = fields.reshape(-1)
        if flat.shape[0] == 0 and arity is None:
            raise InputError("empty TensorField needs an explicit arity")
        if arity is None:
            arity = flat[0].arity
        for f in flat:
            if not isinstance(f, SmoothField):
                raise InputError("TensorField components must be SmoothField")
            if f.arity != arity:
                raise InputError("TensorField components have mixed arities")
        self.fields = fields
        self.shape = fields.shape
        self.arity = int(arity)

    @classmethod
    def from_constants(cls, array, arity) -> "TensorField":
        array = np.asarray(array, dtype=float)
        out = np.empty(array.shape, dtype=object)
        for idx in np.ndindex(*array.shape):
            out[idx] = SmoothField.constant(array[idx], arity)
        return cls(out, arity=arity)

    @classmethod
    def zeros(cls, shape, arity) -> "TensorField":
        out = np.empty(tuple(shape), dtype=object)
        zero = SmoothField.zero(arity)
        for idx in np.ndindex(*tuple(shape)):
            out[idx] = zero
        return cls(out, arity=arity)

    @classmethod
    def from_callable(cls, fn, shape, arity, h=None) -> "TensorField":
        """Componentwise wrap of ``fn(q) -> array(shape)`` with FD gradients."""
        shape = tuple(shape)
        out = np.empty(shape, dtype=object)
        for idx in np.ndindex(*shape):
            out[idx] = SmoothField.from_callable(
                (lambda i: lambda q: float(np.asarray(fn(q))[i]))(idx), arity, h=h
            )
        return cls(out, arity=arity)

    def __getitem__(self, idx) -> SmoothField:
        return self.fields[idx]

    def eval(self, q) -> np.ndarray:
        q = _check_point(q, self.arity)
        out = np.empty(self.shape)
        for idx in np.ndindex(*self.shape):
            out[idx] = self.fields[idx]._value(q)
        if not np.all(np.isfinite(out)):
            raise NumericError("tensor field evaluated to non-finite entries")
        return out

    def eval_grad(self, q):
        """Values and gradients: shapes ``shape`` and ``shape + (arity,)``."""
        q = _check_point(q, self.arity)
        vals = np.empty(self.shape)
        grads = np.empty(self.shape + (self.arity,))
        for idx in np.ndindex(*self.shape):
            vals[idx] = self.fields[idx]._value(q)
            grads[idx] = self.fields[idx]._gradient(q)
        if not (np.all(np.isfinite(vals)) and np.all(np.isfinite(grads))):
            raise NumericError("tensor field jet non-finite")
        return vals, grads

    def as_config(self):
        def rec(a):
            if a.ndim == 0:
                return a.item().as_config()
            return [rec(sub) for sub in a]

        return rec(self.fields)

    def __repr__(self):
        return f"TensorField(shape={self.shape}, arity={self.arity})"


def tensor_from_config(obj, shape, arity) -> TensorField:
    """Nested lists of field objects / numbers -> TensorField of given shape."""
    shape = tuple(shape)
    out = np.empty(shape, dtype=object)
    for idx in np.ndindex(*shape):
        node = obj
        for k in idx:
            try:
                node = node[k]
            except (IndexError, KeyError, TypeError) as exc:
                raise InputError(
                    f"tensor config does not cover index {list(idx)} for shape {list(shape)}"
                ) from exc
        out[idx] = field_from_config_with_arity(node, arity)
    return TensorField(out, arity=arity)
