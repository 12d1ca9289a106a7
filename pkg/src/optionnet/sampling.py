"""Parameter sampling (uniform and Halton), dataset assembly and CSV persistence."""
from __future__ import annotations

import csv
import hashlib
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from . import __version__
from .models import (
    AMERICAN_PUT,
    EUROPEAN_CALL,
    FAMILIES,
    UP_AND_OUT_PUT,
    MarketParams,
    ParamRanges,
    default_ranges,
    model_fields,
    model_from_values,
)
from .pricers import FftConfig, McConfig, bs_call, fft_call_batch, ju_zhong_put, mc_uop_price, uop_gbm
from .pricers.fft import damping_ok

log = logging.getLogger(__name__)

PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)
MAX_REDRAWS = 1000
TRAINING_SIZES = (40_000, 80_000, 160_000, 240_000)

# (family, contract) -> oracle name
ORACLES = {
    ("gbm", EUROPEAN_CALL): "bs",
    ("vg", EUROPEAN_CALL): "fft",
    ("gbmsa", EUROPEAN_CALL): "fft",
    ("vgsa", EUROPEAN_CALL): "fft",
    ("gbm", UP_AND_OUT_PUT): "closed-form",
    ("gbmsa", UP_AND_OUT_PUT): "mc",
    ("vgsa", UP_AND_OUT_PUT): "mc",
    ("gbm", AMERICAN_PUT): "ju-zhong",
}

# paths per MC label, by family
MC_PATHS = {"gbmsa": 10_000, "vgsa": 8_000}


class DatasetSchemaError(ValueError):
    pass


def supported_pairs() -> list[tuple[str, str]]:
    return list(ORACLES)


def check_pair(family: str, contract: str) -> str:
    try:
        return ORACLES[(family, contract)]
    except KeyError:
        pairs = ", ".join(f"{f}/{c}" for f, c in ORACLES)
        raise ValueError(
            f"unsupported (family, contract) pair {family}/{contract}; supported: {pairs}"
        ) from None


# --------------------------------------------------------------------------
# low-discrepancy points


def radical_inverse(base: int, index: int) -> float:
    """Mirror the base-``base`` digits of ``index`` about the radix point."""
    if index < 1:
        raise ValueError("radical_inverse needs index >= 1")
    if base < 2 or any(base % p == 0 for p in range(2, int(math.isqrt(base)) + 1)):
        raise ValueError(f"base must be prime, got {base}")
    result, f = 0.0, 1.0 / base
    while index:
        index, digit = divmod(index, base)
        result += digit * f
        f /= base
    return result


def _radical_inverse_array(base: int, indices: np.ndarray) -> np.ndarray:
    idx = indices.astype(np.int64).copy()
    out = np.zeros(idx.shape)
    f = 1.0 / base
    while np.any(idx):
        idx, digit = np.divmod(idx, base)
        out += digit * f
        f /= base
    return out


def halton_matrix(dim: int, n: int, skip: int = 0) -> np.ndarray:
    """Rows ``skip+1 .. skip+n`` of the ``dim``-dimensional Halton sequence."""
    if not 1 <= dim <= len(PRIMES):
        raise ValueError(f"Halton dimension must be in 1..{len(PRIMES)}, got {dim}")
    if skip < 0:
        raise ValueError("skip must be >= 0")
    indices = np.arange(skip + 1, skip + n + 1)
    return np.column_stack([_radical_inverse_array(p, indices) for p in PRIMES[:dim]])


@dataclass(frozen=True)
class UniformRandom:
    seed: int = 0
    name = "uniform"

    def describe(self) -> str:
        return f"uniform(seed={self.seed})"


@dataclass(frozen=True)
class Halton:
    skip_count: int = 20
    name = "halton"

    def __post_init__(self):
        if self.skip_count < 0:
            raise ValueError("skip_count must be >= 0")

    def describe(self) -> str:
        return f"halton(skip={self.skip_count})"


SamplingScheme = Union[UniformRandom, Halton]


class _PointStream:
    """Sequential source of unit-cube points so re-draws stay deterministic."""

    def __init__(self, scheme: SamplingScheme, dim: int):
        self.scheme = scheme
        self.dim = dim
        if isinstance(scheme, UniformRandom):
            self._rng = np.random.default_rng(scheme.seed)
        else:
            self._next = scheme.skip_count

    def take(self, n: int) -> np.ndarray:
        if isinstance(self.scheme, UniformRandom):
            return self._rng.random((n, self.dim))
        pts = halton_matrix(self.dim, n, self._next)
        self._next += n
        return pts


# --------------------------------------------------------------------------
# scaling


def scale_to_ranges(points: np.ndarray, ranges: ParamRanges) -> np.ndarray:
    lo, hi = ranges.lower, ranges.upper
    return lo + np.asarray(points) * (hi - lo)


def unscale_from_ranges(values: np.ndarray, ranges: ParamRanges) -> np.ndarray:
    lo, hi = ranges.lower, ranges.upper
    return (np.asarray(values) - lo) / (hi - lo)


def constrain_barrier(moneyness, p, upper: float = 1.2):
    """Map a unit draw ``p`` to a barrier ratio in ``[moneyness, upper]``."""
    moneyness = np.asarray(moneyness, dtype=float)
    return moneyness + np.asarray(p, dtype=float) * (upper - moneyness)


# --------------------------------------------------------------------------
# datasets


@dataclass(frozen=True)
class OracleConfig:
    fft: FftConfig = field(default_factory=FftConfig)
    mc_paths: int | None = None  # None -> per-family default in MC_PATHS
    mc_steps: int = 100
    mc_seed: int = 0

    def paths_for(self, family: str) -> int:
        return self.mc_paths if self.mc_paths is not None else MC_PATHS.get(family, 10_000)

    def describe(self, family: str, oracle: str) -> str:
        if oracle == "fft":
            f = self.fft
            return f"fft(alpha={f.damping_alpha},N={f.grid_size_N},eta={f.spacing_eta})"
        if oracle == "mc":
            return f"mc(paths={self.paths_for(family)},steps={self.mc_steps},seed={self.mc_seed})"
        return oracle


@dataclass(eq=False)
class Dataset:
    feature_names: tuple[str, ...]
    features: np.ndarray
    labels: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.feature_names = tuple(self.feature_names)
        self.features = np.asarray(self.features, dtype=float)
        self.labels = np.asarray(self.labels, dtype=float)
        if self.features.ndim != 2 or self.features.shape[1] != len(self.feature_names):
            raise DatasetSchemaError(
                f"features shape {self.features.shape} does not match {len(self.feature_names)} names"
            )
        if self.labels.shape != (self.features.shape[0],):
            raise DatasetSchemaError("labels must be a vector with one entry per row")

    def __len__(self):
        return self.features.shape[0]

    def column(self, name: str) -> np.ndarray:
        return self.features[:, self.feature_names.index(name)]

    def subset(self, idx) -> "Dataset":
        return Dataset(self.feature_names, self.features[idx], self.labels[idx], dict(self.provenance))

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(",".join(self.feature_names).encode())
        h.update(np.ascontiguousarray(self.features).tobytes())
        h.update(np.ascontiguousarray(self.labels).tobytes())
        return h.hexdigest()[:16]


def feature_names(family: str, contract: str) -> tuple[str, ...]:
    return tuple(default_ranges(family, contract).names)


def row_seed(seed: int, row: int) -> int:
    return int(np.random.SeedSequence(int(seed), spawn_key=(int(row),)).generate_state(1, np.uint64)[0])


def _row_valid(family: str, oracle: str, row: dict, ocfg: OracleConfig) -> bool:
    names = model_fields(family)
    try:
        model_from_values(family, [row[n] for n in names])
    except ValueError:
        return False
    if oracle == "fft":
        return bool(
            damping_ok(family, row["moneyness"], row["maturity"], row["r"], row["q"],
                       [row[n] for n in names], ocfg.fft.damping_alpha)[0]
        )
    return True


def _mc_label(args):
    family, names, values, seed, paths, steps = args
    row = dict(zip(names, values))
    model = model_from_values(family, [row[n] for n in model_fields(family)])
    market = MarketParams(row["moneyness"], row["maturity"], row["r"], row["q"], row["barrier_ratio"])
    return mc_uop_price(model, market, McConfig(paths, steps, seed)).value


def label_rows(family: str, contract: str, names, X: np.ndarray, ocfg: OracleConfig = OracleConfig(),
               workers: int = 1) -> np.ndarray:
    """Price every row of ``X`` (columns ``names``) with the designated oracle."""
    oracle = check_pair(family, contract)
    col = {n: X[:, i] for i, n in enumerate(names)}
    m, T, r, q = col["moneyness"], col["maturity"], col["r"], col["q"]
    mvals = [col[n] for n in model_fields(family)]
    if oracle == "bs":
        y = bs_call(m, T, r, q, mvals[0])
    elif oracle == "fft":
        y = fft_call_batch(family, m, T, r, q, mvals, ocfg.fft)
    elif oracle == "closed-form":
        y = uop_gbm(m, col["barrier_ratio"], T, r, q, mvals[0])
    elif oracle == "ju-zhong":
        y = np.empty(len(X))
        for i in range(len(X)):
            try:
                y[i] = ju_zhong_put(m[i], T[i], r[i], q[i], mvals[0][i])
            except (ValueError, ArithmeticError) as exc:
                raise RuntimeError(f"Ju-Zhong failed on row {i}: {dict(zip(names, X[i]))}") from exc
    else:
        jobs = [
            (family, tuple(names), tuple(X[i]), row_seed(ocfg.mc_seed, i), ocfg.paths_for(family), ocfg.mc_steps)
            for i in range(len(X))
        ]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as ex:
                y = np.array(list(ex.map(_mc_label, jobs, chunksize=16)))
        else:
            y = np.array([_mc_label(j) for j in jobs])

    if not np.all(np.isfinite(y)):
        bad = int(np.flatnonzero(~np.isfinite(y))[0])
        raise RuntimeError(f"oracle {oracle} returned a non-finite price on row {bad}: {dict(zip(names, X[bad]))}")
    if contract == EUROPEAN_CALL:
        # clip FFT round-off into the no-arbitrage band
        lo = np.maximum(m * np.exp(-q * T) - np.exp(-r * T), 0.0)
        y = np.clip(y, lo, m * np.exp(-q * T))
    else:
        y = np.clip(y, 0.0, 1.0)
    return y


def sample_features(
    family: str,
    contract: str,
    scheme: SamplingScheme,
    n: int,
    oracle: OracleConfig = OracleConfig(),
    ranges: ParamRanges | None = None,
) -> tuple[list[str], np.ndarray, int]:
    """Unlabelled parameter rows: ``(names, X, number_of_redraws)``.

    Rows that violate model invariants are re-drawn from the same point
    stream (at most ``MAX_REDRAWS`` attempts per row).
    """
    oracle_name = check_pair(family, contract)
    if n < 1:
        raise ValueError("n must be >= 1")
    ranges = ranges or default_ranges(family, contract)
    names = ranges.names
    stream = _PointStream(scheme, len(names))

    def to_values(points):
        X = scale_to_ranges(points, ranges)
        if ranges.has_barrier:
            j = names.index("barrier_ratio")
            X[:, j] = constrain_barrier(X[:, names.index("moneyness")], points[:, j], ranges["barrier_ratio"][1])
        return X

    X = to_values(stream.take(n))
    rejections = 0
    for i in range(n):
        attempts = 0
        while not _row_valid(family, oracle_name, dict(zip(names, X[i])), oracle):
            attempts += 1
            rejections += 1
            if attempts > MAX_REDRAWS:
                raise RuntimeError(f"row {i}: no valid parameters after {MAX_REDRAWS} re-draws")
            X[i] = to_values(stream.take(1))[0]
    return names, X, rejections


def generate_dataset(
    family: str,
    contract: str,
    scheme: SamplingScheme,
    n: int,
    oracle: OracleConfig = OracleConfig(),
    ranges: ParamRanges | None = None,
    workers: int = 1,
) -> Dataset:
    """Sample ``n`` parameter rows (see ``sample_features``) and label them with the oracle."""
    oracle_name = check_pair(family, contract)
    ranges = ranges or default_ranges(family, contract)
    names, X, rejections = sample_features(family, contract, scheme, n, oracle, ranges)

    y = label_rows(family, contract, names, X, oracle, workers)
    provenance = {
        "family": family,
        "contract": contract,
        "scheme": scheme.describe(),
        "n": str(n),
        "oracle": oracle.describe(family, oracle_name),
        "ranges": ";".join(f"{nm}:{lo!r}:{hi!r}" for nm, lo, hi in ranges.bounds),
        "rejections": str(rejections),
        "tool_version": __version__,
    }
    if rejections:
        log.info("generate_dataset: %d rows re-drawn", rejections)
    return Dataset(tuple(names), X, y, provenance)


# --------------------------------------------------------------------------
# persistence


def meta_path(path) -> Path:
    return Path(path).with_suffix(".meta")


def _atomic_write_text(path: Path, text: str):
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def write_dataset(dataset: Dataset, path) -> Path:
    """CSV (header + 17 significant digits) plus a ``key=value`` sidecar."""
    path = Path(path)
    header = ",".join(dataset.feature_names + ("price",))
    table = np.column_stack([dataset.features, dataset.labels])
    lines = [header]
    lines.extend(",".join(format(v, ".17g") for v in row) for row in table)
    _atomic_write_text(path, "\n".join(lines) + "\n")
    meta = dict(dataset.provenance)
    meta.setdefault("n", str(len(dataset)))
    meta["columns"] = ",".join(dataset.feature_names)
    _atomic_write_text(meta_path(path), "".join(f"{k}={v}\n" for k, v in meta.items()))
    return path


def read_meta(path) -> dict:
    mp = meta_path(path)
    if not mp.exists():
        return {}
    meta = {}
    for line in mp.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise DatasetSchemaError(f"{mp}: malformed metadata line {line!r}")
        meta[key] = value
    return meta


def read_dataset(path, family: str | None = None, contract: str | None = None) -> Dataset:
    """Load a dataset written by :func:`write_dataset`.

    The expected columns come from ``family``/``contract`` when given,
    otherwise from the sidecar metadata.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"dataset not found: {path}")
    meta = read_meta(path)
    family = family or meta.get("family")
    contract = contract or meta.get("contract")
    with path.open(newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh), None)
    if not header:
        raise DatasetSchemaError(f"{path}: empty file")
    if family and contract:
        expected = list(feature_names(family, contract))
    elif "columns" in meta:
        expected = meta["columns"].split(",")
    else:
        expected = [h for h in header if h != "price"]
    for col in expected + ["price"]:
        if col not in header:
            raise DatasetSchemaError(f"{path}: missing column {col!r}")
    table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if table.shape[1] != len(header):
        raise DatasetSchemaError(f"{path}: rows have {table.shape[1]} fields, header has {len(header)}")
    idx = [header.index(c) for c in expected]
    meta.pop("columns", None)
    return Dataset(tuple(expected), table[:, idx], table[:, header.index("price")], meta)


__all__ = [
    "PRIMES",
    "ORACLES",
    "TRAINING_SIZES",
    "Dataset",
    "DatasetSchemaError",
    "UniformRandom",
    "Halton",
    "SamplingScheme",
    "OracleConfig",
    "radical_inverse",
    "halton_matrix",
    "scale_to_ranges",
    "unscale_from_ranges",
    "constrain_barrier",
    "feature_names",
    "check_pair",
    "supported_pairs",
    "label_rows",
    "sample_features",
    "generate_dataset",
    "write_dataset",
    "read_dataset",
    "read_meta",
    "row_seed",
    "FAMILIES",
]
