"""JSON run configurations: schema, validation, scenario construction.

A run config is one JSON document::

    {
      "scenario":     { "kind": ..., ...parameters as field objects... },
      "integration":  { "h": ..., "steps": ..., "x0": {"q": [...], "p": [...]} },
      "verification": { "points": K, "seed": N,
                        "tolerances": {"analytic": 1e-9, "fd": 1e-5},
                        "checks": ["name", {"name": ..., "expect_fail": true, ...}] },
      "output":       { "trajectory": "path.csv", "report": "path.json" }
    }

Polynomial fields are ``{"arity": n, "terms": [{"coef": c, "exp": [...]}]}``;
plain numbers are constants where an arity is implied by context.  Validation
errors name the offending key.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .algebroid import AlgebroidStructure, levi_civita_symbol
from .connections import CurvatureTensor, default_split
from .errors import InputError
from .fields import (
    SmoothField,
    TensorField,
    field_from_config_with_arity,
    tensor_from_config,
)
from .hamiltonian import PhasePoint
from .scenarios import (
    ConstraintSpec,
    ScenarioBundle,
    build_canonical,
    build_constrained,
    build_contorsion,
    build_gradient_extension,
    build_lie_poisson,
    euler_top_hamiltonian,
)

DEFAULT_TOLERANCES = {"analytic": 1e-9, "fd": 1e-5}


@dataclass
class RunConfig:
    scenario: dict
    integration: dict | None
    verification: dict | None
    output: dict


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise InputError("config must be a JSON object")
    if "scenario" not in raw:
        raise InputError("config missing 'scenario'")
    cfg = RunConfig(
        scenario=raw["scenario"],
        integration=raw.get("integration"),
        verification=raw.get("verification"),
        output=raw.get("output", {}),
    )
    if cfg.integration is not None:
        _validate_integration(cfg.integration)
    if cfg.verification is not None:
        _validate_verification(cfg.verification)
    return cfg


def _validate_integration(icfg):
    if "h" not in icfg:
        raise InputError("integration.h is required")
    if not isinstance(icfg["h"], (int, float)) or icfg["h"] <= 0:
        raise InputError("integration.h must be positive")
    steps = icfg.get("steps")
    if not isinstance(steps, int) or steps < 1:
        raise InputError("integration.steps must be an integer >= 1")
    x0 = icfg.get("x0")
    if not isinstance(x0, dict) or "q" not in x0 or "p" not in x0:
        raise InputError("integration.x0 must be an object with 'q' and 'p'")


def _validate_verification(vcfg):
    K = vcfg.get("points", 1)
    if not isinstance(K, int) or K < 1:
        raise InputError("verification.points must be an integer >= 1")
    checks = vcfg.get("checks", [])
    if not isinstance(checks, list):
        raise InputError("verification.checks must be a list")
    for entry in checks:
        if isinstance(entry, str):
            continue
        if isinstance(entry, dict) and "name" in entry:
            continue
        raise InputError("verification.checks entries must be names or objects with 'name'")


def initial_point(icfg, bundle: ScenarioBundle) -> PhasePoint:
    x0 = icfg["x0"]
    q = np.asarray(x0["q"], dtype=float)
    p = np.asarray(x0["p"], dtype=float)
    if q.shape[0] != bundle.algebroid.n:
        raise InputError("integration.x0.q has the wrong length for the scenario")
    if p.shape[0] != bundle.algebroid.m:
        raise InputError("integration.x0.p has the wrong length for the scenario")
    return PhasePoint(q, p)


# -- scenario construction ----------------------------------------------------


def _monitors_from(cfg, arity):
    out = {}
    for name, obj in (cfg.get("monitors") or {}).items():
        out[name] = field_from_config_with_arity(obj, arity)
    return out


def _build_canonical(cfg):
    n = cfg.get("n")
    if not isinstance(n, int) or n < 1:
        raise InputError("scenario.n must be an integer >= 1")
    if "hamiltonian" not in cfg:
        raise InputError("scenario.hamiltonian is required for kind 'canonical'")
    H = field_from_config_with_arity(cfg["hamiltonian"], 2 * n)
    return build_canonical(n, H, monitors=_monitors_from(cfg, 2 * n)), None


def _build_lie_poisson(cfg):
    structure = cfg.get("structure")
    if structure == "so3":
        C = np.transpose(levi_civita_symbol(), (2, 0, 1))
    elif isinstance(structure, list):
        C = np.asarray(structure, dtype=float)
    else:
        raise InputError("scenario.structure must be 'so3' or an [m,m,m] array")
    m = C.shape[0]
    monitors = _monitors_from(cfg, m)
    if "inertia" in cfg:
        if len(cfg["inertia"]) != m:
            raise InputError("scenario.inertia length must equal the structure rank")
        H = euler_top_hamiltonian(cfg["inertia"])
    elif "hamiltonian" in cfg:
        H = field_from_config_with_arity(cfg["hamiltonian"], m)
    else:
        raise InputError("scenario needs 'hamiltonian' or 'inertia'")
    if structure == "so3" and "casimir" not in monitors:
        monitors["casimir"] = SmoothField.polynomial(
            [(1.0, [2, 0, 0]), (1.0, [0, 2, 0]), (1.0, [0, 0, 2])], 3
        )
    metric = cfg.get("metric")
    metric = np.asarray(metric, dtype=float) if metric is not None else None
    return build_lie_poisson(C, H, metric=metric, monitors=monitors), None


def _build_gradient_extension(cfg):
    if "metric" not in cfg or "vector_field" not in cfg:
        raise InputError("scenario needs 'metric' and 'vector_field'")
    n = len(cfg["metric"])
    G = tensor_from_config(cfg["metric"], (n, n), n)
    X = tensor_from_config(cfg["vector_field"], (n,), n)
    return build_gradient_extension(G, X), None


def _ambient_from(cfg):
    amb = cfg.get("ambient")
    if not isinstance(amb, dict):
        raise InputError("scenario.ambient must be an object")
    n, m = amb.get("n"), amb.get("m")
    if not isinstance(n, int) or n < 0 or not isinstance(m, int) or m < 1:
        raise InputError("scenario.ambient needs integer n >= 0 and m >= 1")
    bracket = tensor_from_config(amb.get("bracket", []), (m, m, m), n)
    anchor = tensor_from_config(amb.get("anchor", []), (n, m), n)
    return AlgebroidStructure(
        n=n, m=m, bracket=bracket, anchor_left=anchor, anchor_right=anchor
    )


def _basis_rows(obj, M, arity, key):
    if not isinstance(obj, list) or not obj:
        raise InputError(f"scenario.{key} must be a non-empty list of rows")
    rows = []
    for row in obj:
        if len(row) != M:
            raise InputError(f"scenario.{key} rows must have length {M}")
        rows.append([field_from_config_with_arity(e, arity) for e in row])
    return rows


def _build_constrained(cfg, generalized):
    ambient = _ambient_from(cfg)
    M, n = ambient.m, ambient.n
    if "metric" not in cfg:
        raise InputError("scenario.metric is required")
    G = tensor_from_config(cfg["metric"], (M, M), n)
    kin = _basis_rows(cfg.get("kinematic_basis"), M, n, "kinematic_basis")
    var = None
    if generalized:
        var = _basis_rows(cfg.get("variational_basis"), M, n, "variational_basis")
    V = None
    if cfg.get("potential") is not None:
        V = field_from_config_with_arity(cfg["potential"], n)
    spec = ConstraintSpec(
        ambient=ambient,
        metric=G,
        kinematic_basis=kin,
        variational_basis=var,
        potential=V,
    )
    return build_constrained(spec), spec


def _build_contorsion(cfg):
    if "metric" not in cfg:
        raise InputError("scenario.metric is required")
    n = len(cfg["metric"])
    G = tensor_from_config(cfg["metric"], (n, n), n)
    S = T = None
    if "contorsion" in cfg:
        S = tensor_from_config(cfg["contorsion"], (n, n, n), n)
    if "torsion" in cfg:
        T = tensor_from_config(cfg["torsion"], (n, n, n), n)
    V = None
    if cfg.get("potential") is not None:
        V = field_from_config_with_arity(cfg["potential"], n)
    return build_contorsion(G, S=S, T=T, V=V), None


_BUILDERS = {
    "canonical": _build_canonical,
    "lie_poisson": _build_lie_poisson,
    "gradient_extension": _build_gradient_extension,
    "constrained": lambda cfg: _build_constrained(cfg, generalized=False),
    "generalized_constrained": lambda cfg: _build_constrained(cfg, generalized=True),
    "contorsion": _build_contorsion,
}


def build_scenario(cfg: dict):
    """Scenario config -> (ScenarioBundle, ConstraintSpec | None).

    The family name lives under the ``scenario`` key (``kind`` is accepted
    as an alias).
    """
    if not isinstance(cfg, dict):
        raise InputError("scenario must be an object")
    kind = cfg.get("scenario", cfg.get("kind"))
    if kind not in _BUILDERS:
        raise InputError(
            f"scenario.scenario must be one of {sorted(_BUILDERS)}, got {kind!r}"
        )
    bundle, spec = _BUILDERS[kind](cfg)
    bundle = _apply_overrides(bundle, cfg)
    return bundle, spec


def _apply_overrides(bundle: ScenarioBundle, cfg) -> ScenarioBundle:
    """Optional 'curvature' / 'split' overrides on top of the built scenario.

    Curvature: 'zero', 'scenario' (keep the builder's choice) or an explicit
    [m,m,m,m] tensor.  Split: 'default' (zero-reference), 'scenario', or an
    explicit pair {"Dl": ..., "Dr": ...}; explicit pairs are validated
    against the bracket when the lifted structure is first built.
    """
    curv = cfg.get("curvature")
    split = cfg.get("split")
    if curv is None and split is None:
        return bundle
    A = bundle.algebroid
    new_curv = bundle.curvature
    if curv == "zero":
        new_curv = CurvatureTensor.zero(A.m, A.n)
    elif isinstance(curv, list):
        new_curv = CurvatureTensor(
            tensor_from_config(curv, (A.m, A.m, A.m, A.m), A.n)
        )
    elif curv not in (None, "scenario"):
        raise InputError(
            "scenario.curvature must be 'zero', 'scenario' or an [m,m,m,m] tensor"
        )
    new_split = bundle.split
    if split == "default":
        new_split = default_split(A)
    elif isinstance(split, dict):
        if "Dl" not in split or "Dr" not in split:
            raise InputError("scenario.split pair needs 'Dl' and 'Dr' tensors")
        from .connections import ConnectionPair

        new_split = ConnectionPair(
            Dl=tensor_from_config(split["Dl"], (A.m, A.m, A.m), A.n),
            Dr=tensor_from_config(split["Dr"], (A.m, A.m, A.m), A.n),
        )
    elif split not in (None, "scenario"):
        raise InputError(
            "scenario.split must be 'default', 'scenario' or a {'Dl','Dr'} pair"
        )
    return ScenarioBundle(
        algebroid=A,
        hamiltonian=bundle.hamiltonian,
        split=new_split,
        curvature=new_curv,
        monitors=bundle.monitors,
        provenance=bundle.provenance,
    )
