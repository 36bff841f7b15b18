"""Seeded Monte-Carlo sweeps, CSV output and pass/fail verdicts."""

from __future__ import annotations

import csv
import dataclasses
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .. import __version__
from ..ensembles import (
    BiLevel,
    Isotropic,
    PolyDecay,
    WeakFeatures,
    build_spectrum,
    feature_dim,
    sample_dataset,
)
from ..errors import IncompleteData, MemoryCap, NotConverged
from ..fourier import (
    bilevel_fourier_design,
    closed_form_alias,
    cos_column,
    alias_frequencies,
    fourier_cls_upper_bound,
    fourier_svm_support_fraction,
    fourier_test_error,
    regular_grid,
    weighted_min_norm,
)
from ..metrics import analytic_losses, empirical_losses_for, margin_bound, su_cn
from ..rng import derive_seed
from ..solvers import (
    GramFactor,
    SolverOptions,
    gram_matrix,
    min_norm_interpolate,
    slackness_predictor,
    solve_svm_hard_margin,
    support_vector_fraction,
)
from ..theory import Regime, classify_regime, fit_exponent, predicted_scalings
from .config import ExperimentConfig

SCHEMA_VERSION = 1

KEY_COLUMNS = (
    "schema_version",
    "experiment",
    "sweep_param",
    "sweep_value",
    "value_index",
    "trial",
    "seed",
    "n",
    "d",
)

# New metrics are appended to the end; existing positions never move.
METRIC_COLUMNS = (
    "sv_fraction",
    "all_sv",
    "slackness_min",
    "coef_gap",
    "su",
    "cn",
    "snr",
    "excess_mse_analytic",
    "excess_cls_analytic",
    "su_real",
    "cn_real",
    "mse_hat",
    "err_hat",
    "gamma",
    "gamma_n",
    "ramp_term",
    "complexity_term",
    "confidence_term",
    "bound",
    "kkt_gap",
    "svm_iterations",
    "condition",
    "regime",
    "fourier_a",
    "fourier_b",
    "closed_form_a",
    "closed_form_b",
    "closed_form_gap",
    "fourier_bound",
)

COLUMNS = KEY_COLUMNS + METRIC_COLUMNS

_TEST_STREAM = 1  # extra index mixed into a trial seed for its test set


@dataclass
class ResultRow:
    experiment: str
    sweep_param: str
    sweep_value: float
    value_index: int
    trial: int
    seed: int
    n: int
    d: int
    metrics: dict

    def as_record(self) -> dict:
        record = {
            "schema_version": SCHEMA_VERSION,
            "experiment": self.experiment,
            "sweep_param": self.sweep_param,
            "sweep_value": self.sweep_value,
            "value_index": self.value_index,
            "trial": self.trial,
            "seed": self.seed,
            "n": self.n,
            "d": self.d,
        }
        unknown = set(self.metrics) - set(METRIC_COLUMNS)
        if unknown:
            raise KeyError(f"metrics without a column: {sorted(unknown)}")
        for name in METRIC_COLUMNS:
            record[name] = self.metrics.get(name)
        return record


def ensemble_at(config: ExperimentConfig, value):
    """The configured ensemble with the swept field set to ``value``."""
    field_type = type(getattr(config.ensemble, config.sweep_param))
    if field_type is int:
        if float(value) != int(value):
            raise ValueError(f"{config.sweep_param} must be an integer, got {value}")
        value = int(value)
    else:
        value = float(value)
    return dataclasses.replace(config.ensemble, **{config.sweep_param: value})


def _dims(config: ExperimentConfig, spec) -> tuple[int, int]:
    if config.experiment == "FourierSweep" and isinstance(spec, BiLevel):
        design = bilevel_fourier_design(spec.n, spec.p, spec.q, spec.r)
        return design.n, design.d
    return spec.n, feature_dim(spec)


def check_memory(config: ExperimentConfig) -> None:
    for value in config.sweep_values:
        n, d = _dims(config, ensemble_at(config, value))
        if n * d > config.max_entries:
            raise MemoryCap(required=n * d, available=config.max_entries)


def _svm(phi, y, A, factor, tol):
    try:
        return solve_svm_hard_margin(phi, y, SolverOptions(tol=tol), gram=A, factor=factor)
    except NotConverged as exc:
        return exc.best


def _relative_gap(a, b) -> float:
    scale = max(float(np.abs(b).max(initial=0.0)), 1e-300)
    return float(np.abs(a - b).max(initial=0.0)) / scale


def _support_trial(config, spec, seed, with_equivalence):
    tol = config.tolerances
    data = sample_dataset(spec, config.signal, spec.n, seed)
    A = gram_matrix(data.phi)
    factor = GramFactor(A)
    pred = slackness_predictor(data.phi, data.y, factor=factor)
    svm, dual = _svm(data.phi, data.y, A, factor, tol["svm_tol"])
    out = {
        "sv_fraction": support_vector_fraction(data.phi, data.y, svm.alpha, tol["sv_tol"]),
        "all_sv": pred.all_sv,
        "slackness_min": pred.min_value,
        "kkt_gap": dual.kkt_gap,
        "svm_iterations": dual.iterations,
        "condition": factor.condition(),
    }
    if with_equivalence:
        interp = min_norm_interpolate(data.phi, data.y, factor=factor)
        out["coef_gap"] = _relative_gap(svm.alpha, interp.alpha)
    if not isinstance(spec, WeakFeatures):
        out.update(_su_cn_fields(svm.alpha, spec, config.signal.t))
    return out


def _su_cn_fields(alpha, spec, t):
    rep = su_cn(alpha, build_spectrum(spec), t)
    return {"su": rep.su, "cn": rep.cn, "snr": rep.snr}


def _regime_trial(config, spec, seed):
    data = sample_dataset(spec, config.signal, spec.n, seed)
    factor = GramFactor(gram_matrix(data.phi))
    binary = min_norm_interpolate(data.phi, data.y, factor=factor)
    real = min_norm_interpolate(data.phi, data.z, factor=factor)
    spectrum = build_spectrum(spec)
    t = config.signal.t
    cls = su_cn(binary.alpha, spectrum, t)
    reg = su_cn(real.alpha, spectrum, t)
    out = {
        "su": cls.su,
        "cn": cls.cn,
        "snr": cls.snr,
        "su_real": reg.su,
        "cn_real": reg.cn,
        "excess_cls_analytic": analytic_losses(cls.su, cls.cn).excess_cls,
        "excess_mse_analytic": analytic_losses(reg.su, reg.cn).excess_mse,
        "regime": classify_regime(spec.p, spec.q, spec.r).regime.value,
    }
    if config.n_test:
        test_seed = derive_seed(seed, _TEST_STREAM)
        out["mse_hat"] = empirical_losses_for(real.alpha, spec, config.signal, config.n_test, test_seed).mse_hat
        out["err_hat"] = empirical_losses_for(binary.alpha, spec, config.signal, config.n_test, test_seed).err_hat
    return out


def _margin_trial(config, spec, seed):
    tol = config.tolerances
    data = sample_dataset(spec, config.signal, spec.n, seed)
    A = gram_matrix(data.phi)
    factor = GramFactor(A)
    svm, dual = _svm(data.phi, data.y, A, factor, tol["svm_tol"])
    rep = margin_bound(data.phi, data.y, svm.alpha, delta=tol["delta"])
    out = {
        "sv_fraction": support_vector_fraction(data.phi, data.y, svm.alpha, tol["sv_tol"]),
        "gamma": rep.gamma,
        "gamma_n": rep.gamma_n,
        "ramp_term": rep.ramp_term,
        "complexity_term": rep.complexity_term,
        "confidence_term": rep.confidence_term,
        "bound": rep.bound,
        "kkt_gap": dual.kkt_gap,
        "svm_iterations": dual.iterations,
    }
    if config.n_test:
        test_seed = derive_seed(seed, _TEST_STREAM)
        out["err_hat"] = empirical_losses_for(svm.alpha, spec, config.signal, config.n_test, test_seed).err_hat
    if not isinstance(spec, WeakFeatures):
        fields = _su_cn_fields(svm.alpha, spec, config.signal.t)
        out.update(fields)
        out["excess_cls_analytic"] = analytic_losses(fields["su"], fields["cn"]).excess_cls
    return out


def _fourier_trial(config, spec, seed):
    if isinstance(spec, PolyDecay):
        res = fourier_svm_support_fraction(spec.n, spec.d, spec.m, config.tolerances["sv_tol"])
        return {"sv_fraction": res["sv_fraction"], "coef_gap": res["coef_gap"], "kkt_gap": res["kkt_gap"]}
    design = bilevel_fourier_design(spec.n, spec.p, spec.q, spec.r)
    targets = np.cos(regular_grid(design.n))
    coefs = weighted_min_norm(design, targets)
    # cos(x) is sqrt(pi) times the unit-norm cosine feature
    scale = math.sqrt(math.pi)
    a_hat = coefs[cos_column(1)] / scale
    plus, minus = alias_frequencies(design.n, design.d, 1)
    b_hat = np.array([coefs[cos_column(k)] / scale for k in plus + minus])
    lambda_h = float(design.weights[0])
    closed = closed_form_alias(design.n, design.d, lambda_h)
    out = {
        "fourier_a": a_hat,
        "fourier_b": float(b_hat.mean()),
        "closed_form_a": closed.a,
        "closed_form_b": closed.b,
        "closed_form_gap": max(abs(a_hat - closed.a), float(np.abs(b_hat - closed.b).max())),
        "regime": classify_regime(spec.p, spec.q, spec.r).regime.value,
    }
    eps = (spec.p - 1.0) / 2.0 - (spec.q - (1.0 - spec.r))
    if eps > 0:
        out["fourier_bound"] = fourier_cls_upper_bound(spec.p, spec.q, spec.r, spec.n)
    if config.n_test:
        out["err_hat"] = fourier_test_error(design, coefs, config.n_test, derive_seed(seed, _TEST_STREAM))
    return out


def _run_trial(config: ExperimentConfig, value_index: int, trial: int) -> ResultRow:
    value = config.sweep_values[value_index]
    spec = ensemble_at(config, value)
    seed = derive_seed(config.base_seed, value_index, trial)
    kind = config.experiment
    if kind == "SvFractionSweep":
        metrics = _support_trial(config, spec, seed, with_equivalence=False)
    elif kind == "EquivalenceCheck":
        metrics = _support_trial(config, spec, seed, with_equivalence=True)
    elif kind in ("RegimeSweepQ", "RegimeSweepN"):
        metrics = _regime_trial(config, spec, seed)
    elif kind == "MarginSweep":
        metrics = _margin_trial(config, spec, seed)
    else:
        metrics = _fourier_trial(config, spec, seed)
    n, d = _dims(config, spec)
    return ResultRow(
        experiment=kind,
        sweep_param=config.sweep_param,
        sweep_value=value,
        value_index=value_index,
        trial=trial,
        seed=seed,
        n=n,
        d=d,
        metrics=metrics,
    )


def run_experiment(config: ExperimentConfig, threads: int = 1) -> Iterator[ResultRow]:
    """Yield one row per (sweep value, trial), in that order.

    Each trial draws from its own derived seed, so the rows do not depend on
    ``threads``.
    """
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    check_memory(config)
    tasks = [(vi, k) for vi in range(len(config.sweep_values)) for k in range(config.trials)]
    if threads == 1:
        for vi, k in tasks:
            yield _run_trial(config, vi, k)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        yield from pool.map(lambda task: _run_trial(config, *task), tasks)


# --- CSV ---------------------------------------------------------------------


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % float(value)
    return str(value)


def write_csv(rows, path) -> int:
    """Write rows to ``path``; returns the row count."""
    count = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in rows:
            record = row.as_record()
            writer.writerow([format_cell(record[c]) for c in COLUMNS])
            count += 1
    return count


def write_meta(config: ExperimentConfig, csv_path, wall_time: float, rows: int, threads: int) -> Path:
    meta_path = Path(str(csv_path) + ".meta.json")
    meta = {
        "config_sha256": config.digest(),
        "artifact_version": __version__,
        "schema_version": SCHEMA_VERSION,
        "wall_time_s": wall_time,
        "rows": rows,
        "threads": threads,
    }
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return meta_path


def run_to_csv(config: ExperimentConfig, path=None, threads: int = 1) -> Path:
    path = Path(path or config.output_path)
    start = time.perf_counter()
    count = write_csv(run_experiment(config, threads), path)
    write_meta(config, path, time.perf_counter() - start, count, threads)
    return path


def _parse_cell(text: str):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_csv(path) -> list[dict]:
    """Parse a results file written by :func:`write_csv`.

    Columns unknown to this version are kept; missing trailing columns read
    as empty.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        return [{k: _parse_cell(v or "") for k, v in rec.items()} for rec in reader]


# --- verdicts ----------------------------------------------------------------


@dataclass
class RuleResult:
    name: str
    passed: bool
    detail: str


def _as_dict(row) -> dict:
    return row.as_record() if isinstance(row, ResultRow) else row


def _group(config: ExperimentConfig, rows) -> list[list[dict]]:
    groups: list[list[dict]] = [[] for _ in config.sweep_values]
    seen = set()
    for row in map(_as_dict, rows):
        key = (row["value_index"], row["trial"])
        if row["experiment"] != config.experiment or key in seen:
            raise IncompleteData(f"unexpected or duplicate row {key}")
        if not 0 <= row["value_index"] < len(groups):
            raise IncompleteData(f"value index {row['value_index']} outside the sweep")
        seen.add(key)
        groups[row["value_index"]].append(row)
    for vi, group in enumerate(groups):
        if len(group) != config.trials:
            raise IncompleteData(
                f"sweep value {config.sweep_values[vi]} has {len(group)} of {config.trials} trials"
            )
    return groups


def _median(group, column) -> float:
    values = [r[column] for r in group if r[column] is not None]
    if not values:
        raise IncompleteData(f"column {column} is empty")
    return float(np.median(np.asarray(values, dtype=float)))


def _fmt(values) -> str:
    return "[" + ", ".join(f"{v:.4g}" for v in values) + "]"


def _monotone(values, increasing: bool, strict: bool = False) -> bool:
    diffs = np.diff(np.asarray(values, dtype=float))
    if increasing:
        return bool(np.all(diffs > 0) if strict else np.all(diffs >= 0))
    return bool(np.all(diffs < 0) if strict else np.all(diffs <= 0))


def verdict(config: ExperimentConfig, rows) -> list[RuleResult]:
    """Evaluate the pass/fail rules for ``config.experiment`` on ``rows``."""
    groups = _group(config, rows)
    values = [float(v) for v in config.sweep_values]
    order = np.argsort(values, kind="stable")
    groups = [groups[i] for i in order]
    values = [values[i] for i in order]
    tol = config.tolerances
    kind = config.experiment
    out: list[RuleResult] = []

    if kind == "SvFractionSweep":
        med = [_median(g, "sv_fraction") for g in groups]
        out.append(RuleResult("sv_fraction_non_decreasing", _monotone(med, True), f"medians {_fmt(med)}"))
        tail = [m for v, m in zip(values, med) if v >= tol["saturation_from"]]
        ok = all(m >= tol["saturation_level"] for m in tail)
        out.append(RuleResult(
            "sv_fraction_saturates", ok,
            f"medians for {config.sweep_param} >= {tol['saturation_from']:g}: {_fmt(tail)}",
        ))

    elif kind == "EquivalenceCheck":
        for v, g in zip(values, groups):
            certified = [r for r in g if r["all_sv"]]
            share = len(certified) / len(g)
            out.append(RuleResult(
                f"all_sv_share[{v:g}]", share >= tol["min_all_sv_share"],
                f"{len(certified)}/{len(g)} trials certified",
            ))
            worst_gap = max((r["coef_gap"] for r in certified), default=0.0)
            full = all(r["sv_fraction"] == 1.0 for r in certified)
            out.append(RuleResult(
                f"svm_equals_min_norm[{v:g}]", worst_gap <= tol["coef_tol"] and full,
                f"max relative gap {worst_gap:.3g}, all sv_fraction 1: {full}",
            ))

    elif kind == "RegimeSweepQ":
        cls = [_median(g, "excess_cls_analytic") for g in groups]
        mse = [_median(g, "excess_mse_analytic") for g in groups]
        regimes = [groups[i][0]["regime"] for i in range(len(groups))]
        out.append(RuleResult("cls_increasing_in_q", _monotone(cls, True, strict=True), f"medians {_fmt(cls)}"))
        for v, reg, c, m in zip(values, regimes, cls, mse):
            if reg == Regime.BOTH_SUCCEED.value:
                out.append(RuleResult(f"mse_small[{v:g}]", m < tol["mse_low"], f"median mse {m:.4g}"))
            elif reg == Regime.CLASSIFICATION_ONLY.value:
                out.append(RuleResult(f"mse_large[{v:g}]", m > tol["mse_high"], f"median mse {m:.4g}"))
            elif reg == Regime.BOTH_FAIL.value:
                out.append(RuleResult(f"cls_large[{v:g}]", c > tol["cls_high"], f"median cls {c:.4g}"))

    elif kind == "RegimeSweepN":
        spec = config.ensemble
        regime = classify_regime(spec.p, spec.q, spec.r).regime
        cls = [_median(g, "excess_cls_analytic") for g in groups]
        mse = [_median(g, "excess_mse_analytic") for g in groups]
        if regime == Regime.CLASSIFICATION_ONLY:
            out.append(RuleResult("cls_non_increasing_in_n", _monotone(cls, False), f"medians {_fmt(cls)}"))
            out.append(RuleResult("mse_non_decreasing_in_n", _monotone(mse, True), f"medians {_fmt(mse)}"))
        pred = None
        if abs(spec.q - (1.0 - spec.r)) > 1e-12:
            pred = predicted_scalings(spec.p, spec.q, spec.r, config.signal.nu_star)
        if pred is not None and len(values) >= 3 and pred.cn_upper_exponent == pred.cn_lower_exponent:
            cn = [_median(g, "cn") for g in groups]
            fit = fit_exponent(values, cn)
            target = pred.cn_lower_exponent
            out.append(RuleResult(
                "cn_exponent", abs(fit.slope - target) <= tol["exponent_tol"],
                f"slope {fit.slope:.4f} vs {target:.4f} (r^2 {fit.r_squared:.3f})",
            ))

    elif kind == "MarginSweep":
        bounds = [r["bound"] for g in groups for r in g]
        out.append(RuleResult("bound_exceeds_one", min(bounds) > 1.0, f"smallest bound {min(bounds):.4g}"))
        if config.n_test and len(groups) >= 2:
            first, last = _median(groups[0], "err_hat"), _median(groups[-1], "err_hat")
            detail = f"median err_hat {first:.4g} at smallest, {last:.4g} at largest {config.sweep_param}"
            if isinstance(config.ensemble, WeakFeatures):
                out.append(RuleResult("err_decreases", last < first, detail))
            elif isinstance(config.ensemble, Isotropic):
                out.append(RuleResult("err_increases", last > first, detail))

    elif kind == "FourierSweep":
        if isinstance(config.ensemble, PolyDecay):
            med = [_median(g, "sv_fraction") for g in groups]
            out.append(RuleResult("sv_fraction_non_increasing_in_m", _monotone(med, False), f"medians {_fmt(med)}"))
        else:
            gap = max(r["closed_form_gap"] for g in groups for r in g)
            out.append(RuleResult("closed_form_match", gap <= tol["closed_form_tol"], f"max gap {gap:.3g}"))

    return out
