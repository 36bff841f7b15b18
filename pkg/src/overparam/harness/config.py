"""Experiment configuration: a JSON document with a fixed set of keys."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from ..ensembles import (
    BiLevel,
    EnsembleSpec,
    Isotropic,
    PolyDecay,
    SignalSpec,
    WeakFeatures,
    ensemble_from_dict,
    ensemble_to_dict,
)
from ..errors import ConfigError, OverparamError

EXPERIMENTS = (
    "SvFractionSweep",
    "RegimeSweepQ",
    "RegimeSweepN",
    "MarginSweep",
    "FourierSweep",
    "EquivalenceCheck",
)

#: Default tolerances; each experiment reads exactly these keys.
TOLERANCES = {
    "SvFractionSweep": {
        "sv_tol": 1e-6,
        "svm_tol": 1e-8,
        "saturation_from": 0.8,
        "saturation_level": 0.99,
    },
    "EquivalenceCheck": {
        "sv_tol": 1e-6,
        "svm_tol": 1e-8,
        "coef_tol": 1e-6,
        "min_all_sv_share": 0.95,
    },
    "RegimeSweepQ": {"mse_low": 0.2, "mse_high": 0.4, "cls_high": 0.3},
    "RegimeSweepN": {"exponent_tol": 0.15},
    "MarginSweep": {"delta": 0.05, "sv_tol": 1e-6, "svm_tol": 1e-8},
    "FourierSweep": {"closed_form_tol": 1e-8, "sv_tol": 1e-6, "svm_tol": 1e-8},
}

#: Which ensemble field a sweep value replaces, per experiment and variant.
SWEEP_PARAMS = {
    "SvFractionSweep": {BiLevel: "q", Isotropic: "d", PolyDecay: "m", WeakFeatures: "d"},
    "EquivalenceCheck": {BiLevel: "q", Isotropic: "d", PolyDecay: "m", WeakFeatures: "d"},
    "RegimeSweepQ": {BiLevel: "q"},
    "RegimeSweepN": {BiLevel: "n"},
    "MarginSweep": {Isotropic: "d", WeakFeatures: "d", PolyDecay: "d"},
    "FourierSweep": {BiLevel: "n", PolyDecay: "m"},
}

DEFAULT_MAX_ENTRIES = 20_000_000

_REQUIRED = ("experiment", "ensemble", "signal", "sweep_values", "trials", "base_seed", "output_path")
_OPTIONAL = ("n_test", "tolerances", "sweep_param", "max_entries")


@dataclass
class ExperimentConfig:
    experiment: str
    ensemble: EnsembleSpec
    signal: SignalSpec
    sweep_values: list
    trials: int = 20
    n_test: int = 0
    base_seed: int = 0
    tolerances: dict = field(default_factory=dict)
    output_path: str = "results.csv"
    sweep_param: str | None = None
    max_entries: int = DEFAULT_MAX_ENTRIES

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError("experiment", f"unknown experiment {self.experiment!r}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError("trials", "must be a positive integer")
        if not self.sweep_values:
            raise ConfigError("sweep_values", "must be non-empty")
        if int(self.n_test) != self.n_test or self.n_test < 0:
            raise ConfigError("n_test", "must be a non-negative integer")
        if self.max_entries < 1:
            raise ConfigError("max_entries", "must be positive")
        defaults = TOLERANCES[self.experiment]
        unknown = set(self.tolerances) - set(defaults)
        if unknown:
            raise ConfigError(f"tolerances.{sorted(unknown)[0]}", "not read by this experiment")
        self.tolerances = {**defaults, **{k: float(v) for k, v in self.tolerances.items()}}

        allowed = SWEEP_PARAMS[self.experiment]
        kind = type(self.ensemble)
        if kind not in allowed:
            raise ConfigError(
                "ensemble.variant",
                f"{self.experiment} does not support {kind.__name__} ensembles",
            )
        if self.sweep_param is None:
            self.sweep_param = allowed[kind]
        if self.sweep_param not in kind.__dataclass_fields__:
            raise ConfigError("sweep_param", f"{kind.__name__} has no field {self.sweep_param!r}")

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "ensemble": ensemble_to_dict(self.ensemble),
            "signal": {"t": self.signal.t, "nu_star": self.signal.nu_star},
            "sweep_values": list(self.sweep_values),
            "trials": self.trials,
            "n_test": self.n_test,
            "base_seed": self.base_seed,
            "tolerances": dict(self.tolerances),
            "output_path": self.output_path,
            "sweep_param": self.sweep_param,
            "max_entries": self.max_entries,
        }

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form (output path excluded)."""
        body = self.to_dict()
        body.pop("output_path")
        blob = json.dumps(body, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def config_from_dict(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("$", "config must be a JSON object")
    unknown = set(data) - set(_REQUIRED) - set(_OPTIONAL)
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown key")
    for key in _REQUIRED:
        if key not in data:
            raise ConfigError(key, "missing required key")
    try:
        ensemble = ensemble_from_dict(data["ensemble"])
    except (KeyError, TypeError, OverparamError) as exc:
        raise ConfigError("ensemble", str(exc)) from None
    signal_data = data["signal"]
    if not isinstance(signal_data, dict) or set(signal_data) - {"t", "nu_star"}:
        raise ConfigError("signal", "expected an object with keys t, nu_star")
    try:
        signal = SignalSpec(**signal_data)
    except OverparamError as exc:
        raise ConfigError("signal", str(exc)) from None
    tolerances = data.get("tolerances", {})
    if not isinstance(tolerances, dict):
        raise ConfigError("tolerances", "expected an object")
    return ExperimentConfig(
        experiment=data["experiment"],
        ensemble=ensemble,
        signal=signal,
        sweep_values=list(data["sweep_values"]),
        trials=data["trials"],
        n_test=data.get("n_test", 0),
        base_seed=data["base_seed"],
        tolerances=tolerances,
        output_path=data["output_path"],
        sweep_param=data.get("sweep_param"),
        max_entries=data.get("max_entries", DEFAULT_MAX_ENTRIES),
    )


def load_config(path) -> ExperimentConfig:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError("$", f"invalid JSON: {exc}") from None
    return config_from_dict(data)
