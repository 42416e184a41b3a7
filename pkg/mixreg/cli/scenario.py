"""Declarative JSON experiment scenarios.

A scenario document is parsed into a frozen `Scenario`; every default is
expanded into `Scenario.document`, which is embedded verbatim in the
summaries so that runs can be audited against the conditions they claim.
"""
import copy
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from mixreg.numeric.em_ops.em_state import EMConfig
from mixreg.numeric.init_ops.init_spec import InitSpec
from mixreg.numeric.mixture_model.mixture_params import (
    MixtureParams,
    orthogonal_scaled_params,
    random_sphere_params,
)

ESTIMATORS = ("em-split", "em-pooled", "am")
SWEEP_AXES = ("n", "sigma", "beta_scale", "init_radius")
TRUTH_GENERATORS = ("orthogonal-scaled", "random-sphere")
MAX_SEED = 2**64

_TOP_LEVEL_KEYS = (
    "name",
    "truth",
    "init",
    "estimator",
    "n",
    "T",
    "trials",
    "base_seed",
    "sweep",
    "em",
    "conditions",
    "diagnostics",
)
_EM_DEFAULTS = {
    "weight_mode": "fixed",
    "ridge": None,
    "max_iters": 100,
    "tol": 0.0,
    "min_weight_floor": 1e-8,
}
_INIT_DEFAULTS = {
    "kind": "perturbed-oracle",
    "beta_radius": 0.0,
    "weight_rel_radius": 0.0,
    "seed": 0,
}
_CONDITIONS_DEFAULTS = {"C": 1.0, "c": 0.5}
_DIAGNOSTICS_DEFAULTS = {"n_mc": 0, "tau_constant": 1.0, "component": 0, "seed": 0}


class ScenarioError(ValueError):
    """Malformed scenario or summary document."""


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: Tuple[float, ...]


@dataclass(frozen=True)
class DiagnosticsSpec:
    """Monte Carlo event diagnostics of the initial state (off when n_mc = 0)."""

    n_mc: int = 0
    tau_constant: float = 1.0
    component: int = 0
    seed: int = 0


@dataclass(frozen=True, eq=False)
class Scenario:
    """Fully resolved experiment scenario.

    Attributes
    ----------
    name: str
        Scenario id used in summaries and reports.
    document: dict
        Resolved JSON document, defaults expanded.
    truth: MixtureParams
        True mixture (its sigma is the known noise level of the estimators).
    init: InitSpec
        Initialisation; trial t uses seed init.seed + t.
    estimator: str
        One of 'em-split', 'em-pooled' or 'am'.
    n: int
        Total sample count per trial (em-split uses n / T per iteration).
    T: int
        Number of sample-splitting batches.
    trials: int
        Independent replications, trial t samples data with base_seed + t.
    base_seed: int
    em_config: EMConfig
    conditions: tuple
        (C, c) constants of the local condition check.
    diagnostics: DiagnosticsSpec
    sweep: SweepSpec or None
    """

    name: str
    document: dict
    truth: MixtureParams
    init: InitSpec
    estimator: str
    n: int
    T: int
    trials: int
    base_seed: int
    em_config: EMConfig
    conditions: Tuple[float, float]
    diagnostics: DiagnosticsSpec
    sweep: Optional[SweepSpec] = None

    def dataset_seed(self, trial: int) -> int:
        return self.base_seed + trial

    def init_seed(self, trial: int) -> int:
        return self.init.seed + trial

    def _editable_document(self) -> dict:
        document = copy.deepcopy(self.document)
        # derived from "truth", rebuilt on resolution
        del document["truth_params"]
        return document

    def with_seed_override(self, base_seed: int) -> "Scenario":
        document = self._editable_document()
        document["base_seed"] = base_seed
        return scenario_from_document(document)

    def at_sweep_value(self, value) -> "Scenario":
        """Scenario of a single sweep point, without a sweep axis."""
        if self.sweep is None:
            raise ScenarioError("scenario has no sweep axis")
        document = self._editable_document()
        del document["sweep"]
        axis = self.sweep.axis
        document["name"] = f"{self.name}@{axis}={value!r}"
        if axis == "n":
            document["n"] = value
        elif axis == "sigma":
            document["truth"]["sigma"] = value
        elif axis == "beta_scale":
            truth = document["truth"]
            if "generator" in truth:
                truth["r"] = truth["r"] * value
            else:
                truth["betas"] = (value * np.asarray(truth["betas"])).tolist()
            document["init"]["beta_radius"] = document["init"]["beta_radius"] * value
        elif axis == "init_radius":
            document["init"]["beta_radius"] = value
        return scenario_from_document(document)


def _check_keys(section: dict, allowed, where: str) -> None:
    if not isinstance(section, dict):
        raise ScenarioError(f"{where} must be a JSON object")
    unknown = sorted(set(section) - set(allowed))
    if unknown:
        raise ScenarioError(f"{where} has unknown keys {unknown}")


def _get_int(section: dict, key: str, where: str, minimum: int = 0) -> int:
    value = section[key]
    if isinstance(value, float) and value.is_integer():
        value = int(value)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"{where}.{key} must be an integer, got {value!r}")
    if value < minimum:
        raise ScenarioError(f"{where}.{key} must be >= {minimum}, got {value}")
    return value


def _get_float(section: dict, key: str, where: str) -> float:
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{where}.{key} must be a number, got {value!r}")
    return float(value)


def _with_defaults(section, defaults: dict, where: str) -> dict:
    section = {} if section is None else section
    _check_keys(section, defaults, where)
    resolved = dict(defaults)
    resolved.update(section)
    return resolved


def _resolve_truth(section) -> Tuple[dict, MixtureParams]:
    if section is None:
        raise ScenarioError("truth is required")
    if not isinstance(section, dict):
        raise ScenarioError("truth must be a JSON object")
    try:
        if "generator" in section:
            _check_keys(
                section,
                ("generator", "k", "d", "r", "weights", "sigma", "seed"),
                "truth",
            )
            for key in ("k", "d", "r"):
                if key not in section:
                    raise ScenarioError(f"truth.{key} is required by a generator")
            resolved = {
                "generator": section["generator"],
                "k": _get_int(section, "k", "truth", minimum=1),
                "d": _get_int(section, "d", "truth", minimum=1),
                "r": _get_float(section, "r", "truth"),
                "weights": section.get("weights"),
                "sigma": float(section.get("sigma", 0.0)),
                "seed": _get_int({"seed": section.get("seed", 0)}, "seed", "truth"),
            }
            if resolved["weights"] is None:
                resolved["weights"] = [1.0 / resolved["k"]] * resolved["k"]
            if resolved["generator"] == "orthogonal-scaled":
                truth = orthogonal_scaled_params(
                    resolved["k"],
                    resolved["d"],
                    resolved["r"],
                    weights=resolved["weights"],
                    noise_sigma=resolved["sigma"],
                )
            elif resolved["generator"] == "random-sphere":
                truth = random_sphere_params(
                    resolved["k"],
                    resolved["d"],
                    resolved["r"],
                    seed=resolved["seed"],
                    weights=resolved["weights"],
                    noise_sigma=resolved["sigma"],
                )
            else:
                raise ScenarioError(
                    f"truth.generator must be one of {TRUTH_GENERATORS}, "
                    f"got '{resolved['generator']}'"
                )
        else:
            _check_keys(section, ("betas", "weights", "sigma"), "truth")
            resolved = {"sigma": 0.0}
            resolved.update(section)
            truth = MixtureParams.from_json_dict(resolved)
            resolved = truth.to_json_dict()
    except ScenarioError:
        raise
    except (ValueError, TypeError) as error:
        raise ScenarioError(f"truth: {error}") from error
    return resolved, truth


def _resolve_sweep(section) -> Optional[SweepSpec]:
    if section is None:
        return None
    _check_keys(section, ("axis", "values"), "sweep")
    axis = section.get("axis")
    if axis not in SWEEP_AXES:
        raise ScenarioError(f"sweep.axis must be one of {SWEEP_AXES}, got {axis!r}")
    values = section.get("values")
    if not isinstance(values, list) or not values:
        raise ScenarioError("sweep.values must be a non-empty list")
    values = tuple(
        _get_int({"values": v}, "values", "sweep", minimum=1)
        if axis == "n"
        else _get_float({"values": v}, "values", "sweep")
        for v in values
    )
    if any(not np.isfinite(v) or v <= 0 for v in values):
        raise ScenarioError("sweep.values must be strictly positive")
    steps = np.diff(np.asarray(values, dtype=np.float64))
    if not (np.all(steps > 0) or np.all(steps < 0)):
        raise ScenarioError("sweep.values must be strictly sorted")
    return SweepSpec(axis=axis, values=values)


def scenario_from_document(document: dict, default_name: str = "scenario") -> Scenario:
    """Validate a scenario document and expand its defaults."""
    _check_keys(document, _TOP_LEVEL_KEYS, "scenario")
    resolved_truth, truth = _resolve_truth(document.get("truth"))

    init_section = _with_defaults(document.get("init"), _INIT_DEFAULTS, "init")
    em_section = _with_defaults(document.get("em"), _EM_DEFAULTS, "em")
    conditions_section = _with_defaults(
        document.get("conditions"), _CONDITIONS_DEFAULTS, "conditions"
    )
    diagnostics_section = _with_defaults(
        document.get("diagnostics"), _DIAGNOSTICS_DEFAULTS, "diagnostics"
    )
    top = {
        "name": document.get("name", default_name),
        "estimator": document.get("estimator", "em-pooled"),
        "n": document.get("n"),
        "T": document.get("T", 1),
        "trials": document.get("trials", 1),
        "base_seed": document.get("base_seed", 0),
    }
    if top["n"] is None:
        raise ScenarioError("scenario.n is required")
    if not isinstance(top["name"], str) or not top["name"]:
        raise ScenarioError("scenario.name must be a non-empty string")
    if top["estimator"] not in ESTIMATORS:
        raise ScenarioError(
            f"scenario.estimator must be one of {ESTIMATORS}, got {top['estimator']!r}"
        )
    n = _get_int(top, "n", "scenario", minimum=1)
    num_batches = _get_int(top, "T", "scenario", minimum=1)
    trials = _get_int(top, "trials", "scenario", minimum=1)
    base_seed = _get_int(top, "base_seed", "scenario")
    if num_batches > n:
        raise ScenarioError(f"scenario.T = {num_batches} exceeds scenario.n = {n}")
    if base_seed + trials - 1 >= MAX_SEED:
        raise ScenarioError("scenario.base_seed + trials must stay below 2**64")

    try:
        init = InitSpec(
            kind=init_section["kind"],
            beta_radius=_get_float(init_section, "beta_radius", "init"),
            weight_rel_radius=_get_float(init_section, "weight_rel_radius", "init"),
            seed=_get_int(init_section, "seed", "init"),
        )
    except ScenarioError:
        raise
    except ValueError as error:
        raise ScenarioError(f"init: {error}") from error
    if init.seed + trials - 1 >= MAX_SEED:
        raise ScenarioError("init.seed + trials must stay below 2**64")

    try:
        em_config = EMConfig(
            sigma=truth.noise_sigma,
            weight_mode=em_section["weight_mode"],
            ridge=None
            if em_section["ridge"] is None
            else _get_float(em_section, "ridge", "em"),
            max_iters=_get_int(em_section, "max_iters", "em"),
            tol=_get_float(em_section, "tol", "em"),
            min_weight_floor=_get_float(em_section, "min_weight_floor", "em"),
        )
        em_config.check_num_components(truth.num_components)
    except ScenarioError:
        raise
    except ValueError as error:
        raise ScenarioError(f"em: {error}") from error

    conditions = (
        _get_float(conditions_section, "C", "conditions"),
        _get_float(conditions_section, "c", "conditions"),
    )
    if conditions[0] <= 0.0 or conditions[1] <= 0.0:
        raise ScenarioError(f"conditions C and c must be positive, got {conditions}")
    diagnostics = DiagnosticsSpec(
        n_mc=_get_int(diagnostics_section, "n_mc", "diagnostics"),
        tau_constant=_get_float(diagnostics_section, "tau_constant", "diagnostics"),
        component=_get_int(diagnostics_section, "component", "diagnostics"),
        seed=_get_int(diagnostics_section, "seed", "diagnostics"),
    )
    if diagnostics.component >= truth.num_components:
        raise ScenarioError(
            f"diagnostics.component must be < k = {truth.num_components}, "
            f"got {diagnostics.component}"
        )
    sweep = _resolve_sweep(document.get("sweep"))

    resolved = {
        "name": top["name"],
        "truth": resolved_truth,
        "truth_params": truth.to_json_dict(),
        "init": init.to_json_dict(),
        "estimator": top["estimator"],
        "n": n,
        "T": num_batches,
        "trials": trials,
        "base_seed": base_seed,
        "em": {
            "weight_mode": em_config.weight_mode,
            "ridge": em_config.ridge,
            "max_iters": em_config.max_iters,
            "tol": em_config.tol,
            "min_weight_floor": em_config.min_weight_floor,
        },
        "conditions": {"C": conditions[0], "c": conditions[1]},
        "diagnostics": {
            "n_mc": diagnostics.n_mc,
            "tau_constant": diagnostics.tau_constant,
            "component": diagnostics.component,
            "seed": diagnostics.seed,
        },
    }
    if sweep is not None:
        resolved["sweep"] = {"axis": sweep.axis, "values": list(sweep.values)}
    return Scenario(
        name=top["name"],
        document=resolved,
        truth=truth,
        init=init,
        estimator=top["estimator"],
        n=n,
        T=num_batches,
        trials=trials,
        base_seed=base_seed,
        em_config=em_config,
        conditions=conditions,
        diagnostics=diagnostics,
        sweep=sweep,
    )


def load_scenario(file_name) -> Scenario:
    """Read and resolve a scenario file; the name defaults to the file stem."""
    with open(file_name, "r", encoding="utf-8") as f:
        try:
            document = json.load(f)
        except json.JSONDecodeError as error:
            raise ScenarioError(f"{file_name} is not valid JSON: {error}") from error
    if not isinstance(document, dict):
        raise ScenarioError(f"{file_name} must hold a JSON object")
    return scenario_from_document(document, default_name=Path(file_name).stem)
