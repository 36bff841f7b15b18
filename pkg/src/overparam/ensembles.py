"""Covariance spectra and Gaussian data generation.

All Gaussian ensembles are sampled in the eigenbasis of their covariance, so a
spectrum (the vector of eigenvalues) fully describes the featurization. Rows
are produced in fixed-size blocks; a full dataset and a block-by-block stream
drawn from the same seed contain identical numbers, which lets large test sets
be evaluated without materializing them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Union

import numpy as np

from .errors import DimensionOverflow, InvalidParams, InvalidSignal, NotDiagonal
from .rng import make_rng

#: Largest feature dimension :func:`bilevel_dims` will produce.
MAX_DIMENSION = 50_000_000

#: Rows drawn per generator call. Part of the stream layout: changing it
#: changes every sampled dataset.
BLOCK_ROWS = 256


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of a diagonal feature covariance, sorted non-increasing."""

    lambdas: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        if lam.ndim != 1 or lam.size == 0:
            raise InvalidParams("spectrum must be a non-empty vector")
        if not np.all(lam > 0):
            raise InvalidParams("eigenvalues must be strictly positive")
        if np.any(np.diff(lam) > 0):
            raise InvalidParams("eigenvalues must be sorted non-increasing")
        lam.setflags(write=False)
        object.__setattr__(self, "lambdas", lam)

    @property
    def d(self) -> int:
        return int(self.lambdas.size)

    def __len__(self) -> int:
        return self.d


# --- ensemble specifications -------------------------------------------------


@dataclass(frozen=True)
class Isotropic:
    n: int
    d: int

    def __post_init__(self):
        _check_positive_int("n", self.n)
        _check_positive_int("d", self.d)


@dataclass(frozen=True)
class BiLevel:
    """Two-level spectrum with ``d = n^p`` features, ``s = n^r`` of them favored.

    ``q`` sets the favored weight ``a = n^-q``; larger ``q`` spreads more of
    the trace over the unfavored directions.
    """

    n: int
    p: float
    q: float
    r: float

    def __post_init__(self):
        _check_positive_int("n", self.n)
        if not self.p > 1:
            raise InvalidParams(f"bi-level needs p > 1, got p={self.p}")
        if not 0 <= self.r < 1:
            raise InvalidParams(f"bi-level needs 0 <= r < 1, got r={self.r}")
        if not 0 < self.q <= self.p - self.r + 1e-12:
            raise InvalidParams(
                f"bi-level needs 0 < q <= p - r, got q={self.q} (p - r = {self.p - self.r})"
            )

    @property
    def dims(self) -> tuple[int, int]:
        return bilevel_dims(self.n, self.p, self.r)


@dataclass(frozen=True)
class WeakFeatures:
    """Raw scalar ``X ~ N(0, sigma^2)`` lifted to ``X * ones(d) + W``."""

    n: int
    d: int
    sigma: float

    def __post_init__(self):
        _check_positive_int("n", self.n)
        _check_positive_int("d", self.d)
        if not self.sigma > 0:
            raise InvalidParams(f"weak features need sigma > 0, got {self.sigma}")


@dataclass(frozen=True)
class PolyDecay:
    n: int
    d: int
    m: float

    def __post_init__(self):
        _check_positive_int("n", self.n)
        _check_positive_int("d", self.d)
        if not self.m >= 0:
            raise InvalidParams(f"polynomial decay needs m >= 0, got {self.m}")


@dataclass(frozen=True)
class Explicit:
    lambdas: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "lambdas", tuple(float(v) for v in self.lambdas))
        Spectrum(np.array(self.lambdas))


EnsembleSpec = Union[Isotropic, BiLevel, WeakFeatures, PolyDecay, Explicit]

_VARIANTS = {
    "Isotropic": Isotropic,
    "BiLevel": BiLevel,
    "WeakFeatures": WeakFeatures,
    "PolyDecay": PolyDecay,
    "Explicit": Explicit,
}


def ensemble_to_dict(spec: EnsembleSpec) -> dict:
    out = {"variant": type(spec).__name__}
    for name in spec.__dataclass_fields__:
        value = getattr(spec, name)
        out[name] = list(value) if isinstance(value, tuple) else value
    return out


def ensemble_from_dict(data: dict) -> EnsembleSpec:
    """Inverse of :func:`ensemble_to_dict`; unknown keys raise ``KeyError``."""
    data = dict(data)
    variant = data.pop("variant")
    cls = _VARIANTS.get(variant)
    if cls is None:
        raise KeyError(f"unknown ensemble variant {variant!r}")
    unknown = set(data) - set(cls.__dataclass_fields__)
    if unknown:
        raise KeyError(f"unknown {variant} fields: {sorted(unknown)}")
    return cls(**data)


@dataclass(frozen=True)
class SignalSpec:
    """1-sparse signal ``e_t / sqrt(lambda_t)`` (``t`` is 1-based) and label noise."""

    t: int = 1
    nu_star: float = 0.0

    def __post_init__(self):
        if int(self.t) != self.t or self.t < 1:
            raise InvalidSignal(f"signal index t must be a positive integer, got {self.t}")
        if not 0 <= self.nu_star < 0.5:
            raise InvalidSignal(f"label noise must lie in [0, 0.5), got {self.nu_star}")


@dataclass
class Dataset:
    phi: np.ndarray
    z: np.ndarray
    y: np.ndarray
    seed: int

    @property
    def n(self) -> int:
        return int(self.phi.shape[0])

    @property
    def d(self) -> int:
        return int(self.phi.shape[1])


# --- spectra -----------------------------------------------------------------


def bilevel_dims(n: int, p: float, r: float, max_dim: int = MAX_DIMENSION) -> tuple[int, int]:
    """Feature count ``round(n^p)`` and favored count ``round(n^r)`` (at least 1)."""
    if n < 2:
        raise InvalidParams(f"bi-level dimensions need n >= 2, got {n}")
    if not p > 1 or not 0 <= r < 1:
        raise InvalidParams(f"need p > 1 and 0 <= r < 1, got p={p}, r={r}")
    d_real = n**p
    if d_real > max_dim:
        raise DimensionOverflow(f"d = n^p = {d_real:.4g} exceeds maximum {max_dim}")
    d = int(round(d_real))
    s = max(1, int(round(n**r)))
    return d, s


def build_spectrum(spec: EnsembleSpec) -> Spectrum:
    if isinstance(spec, Isotropic):
        return Spectrum(np.ones(spec.d))
    if isinstance(spec, BiLevel):
        d, s = spec.dims
        if d <= s:
            raise InvalidParams(f"bi-level needs more features than favored ones, got d={d}, s={s}")
        a = spec.n ** (-spec.q)
        high = a * d / s
        low = (1 - a) * d / (d - s)
        if high < low:
            # only reachable for q within rounding of p - r
            raise InvalidParams(f"favored level {high:.6g} falls below unfavored level {low:.6g}")
        lam = np.empty(d)
        lam[:s] = high
        lam[s:] = low
        return Spectrum(lam)
    if isinstance(spec, PolyDecay):
        k = np.arange(1, spec.d + 1, dtype=float)
        return Spectrum(k ** (-float(spec.m)))
    if isinstance(spec, Explicit):
        return Spectrum(np.array(spec.lambdas))
    if isinstance(spec, WeakFeatures):
        raise NotDiagonal("weak-features covariance is not diagonal; sample it directly")
    raise TypeError(f"not an ensemble spec: {spec!r}")


def feature_dim(spec: EnsembleSpec) -> int:
    if isinstance(spec, (Isotropic, WeakFeatures, PolyDecay)):
        return spec.d
    if isinstance(spec, BiLevel):
        return spec.dims[0]
    return len(spec.lambdas)


def favored_count(spec: EnsembleSpec) -> int:
    """How many leading coordinates the 1-sparse signal may occupy."""
    if isinstance(spec, BiLevel):
        return spec.dims[1]
    if isinstance(spec, WeakFeatures):
        return 1
    return feature_dim(spec)


def alpha_star(spectrum: Spectrum, t: int) -> np.ndarray:
    """The 1-sparse true coefficient vector ``e_t / sqrt(lambda_t)``."""
    if not 1 <= t <= spectrum.d:
        raise InvalidSignal(f"t={t} outside 1..{spectrum.d}")
    out = np.zeros(spectrum.d)
    out[t - 1] = 1.0 / math.sqrt(spectrum.lambdas[t - 1])
    return out


# --- sampling ----------------------------------------------------------------


def sgn(x: np.ndarray) -> np.ndarray:
    """Sign with ``sgn(0) = +1``."""
    return np.where(np.asarray(x) >= 0, 1.0, -1.0)


def iter_blocks(
    spec: EnsembleSpec, signal: SignalSpec, n: int, seed: int
) -> Iterator[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Yield ``(phi, z, y)`` row blocks of a dataset of size ``n``.

    Per block the stream is consumed as: (weak features only) the raw scalars,
    then the feature normals, then one uniform per row for label flips.
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    _check_signal(spec, signal)
    rng = make_rng(seed)
    weak = isinstance(spec, WeakFeatures)
    if weak:
        d = spec.d
    else:
        spectrum = build_spectrum(spec)
        d = spectrum.d
        root = np.sqrt(spectrum.lambdas)
        t = signal.t - 1

    for start in range(0, n, BLOCK_ROWS):
        k = min(BLOCK_ROWS, n - start)
        if weak:
            x = spec.sigma * rng.standard_normal(k)
            phi = rng.standard_normal((k, d))
            phi += x[:, None]
            z = x
        else:
            phi = rng.standard_normal((k, d))
            z = phi[:, t].copy()
            phi *= root
        flips = rng.random(k) < signal.nu_star
        y = sgn(z)
        y[flips] = -y[flips]
        yield phi, z, y


def sample_dataset(spec: EnsembleSpec, signal: SignalSpec, n: int, seed: int) -> Dataset:
    """Draw ``n`` i.i.d. training rows with real outputs and noisy binary labels."""
    d = feature_dim(spec)
    phi = np.empty((n, d))
    z = np.empty(n)
    y = np.empty(n)
    row = 0
    for pb, zb, yb in iter_blocks(spec, signal, n, seed):
        k = pb.shape[0]
        phi[row : row + k] = pb
        z[row : row + k] = zb
        y[row : row + k] = yb
        row += k
    return Dataset(phi=phi, z=z, y=y, seed=int(seed))


def sample_test_set(spec: EnsembleSpec, signal: SignalSpec, n_test: int, seed: int) -> Dataset:
    """Like :func:`sample_dataset` but with noiseless labels ``y = sgn(z)``."""
    clean = SignalSpec(t=signal.t, nu_star=0.0)
    return sample_dataset(spec, clean, n_test, seed)


def _check_signal(spec: EnsembleSpec, signal: SignalSpec) -> None:
    limit = favored_count(spec)
    if signal.t > limit:
        raise InvalidSignal(f"signal index t={signal.t} exceeds favored count {limit}")


def _check_positive_int(name: str, value) -> None:
    if int(value) != value or value < 1:
        raise InvalidParams(f"{name} must be a positive integer, got {value}")
