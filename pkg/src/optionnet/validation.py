"""Validation protocol, architecture sweeps, speed benchmark and surrogate calibration."""
from __future__ import annotations

import csv
import itertools
import math
import os
import platform
import statistics
import time
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np
from scipy.optimize import minimize

from .models import (
    UP_AND_OUT_PUT,
    MarketParams,
    ModelParams,
    default_ranges,
    model_fields,
    model_from_values,
)
from .nn import Activation, LeakyRelu, Metrics, Network, NetworkConfig, TrainConfig, evaluate, forward, train
from .pricers import McConfig
from .sampling import (
    Dataset,
    Halton,
    OracleConfig,
    UniformRandom,
    check_pair,
    feature_names,
    generate_dataset,
    label_rows,
    row_seed,
)

IN_SAMPLE = "in-sample"
DEEP_OTM = "deep-otm"
LONG_MATURITY = "long-maturity"
CASES = (IN_SAMPLE, DEEP_OTM, LONG_MATURITY)

DEEP_OTM_MONEYNESS = (0.6, 0.8)
LONG_MATURITY_YEARS = (3.0, 5.0)

DESK_N_PER_CASE = 10_000
PAPER_N_PER_CASE = 60_000
MC_N_PER_CASE_CAP = 2_000


def _case_seed(seed: int, case: int) -> int:
    # kept apart from training seeds, which are small integers in practice
    return row_seed(seed + 0x5EED, case)


def case_ranges(family: str, contract: str, case: str):
    ranges = default_ranges(family, contract)
    if case == DEEP_OTM:
        return ranges.replace(moneyness=DEEP_OTM_MONEYNESS)
    if case == LONG_MATURITY:
        return ranges.replace(maturity=LONG_MATURITY_YEARS)
    if case != IN_SAMPLE:
        raise ValueError(f"unknown validation case {case!r}")
    return ranges


def build_validation_sets(
    family: str,
    contract: str,
    n_per_case: int | None = None,
    seed: int = 0,
    oracle: OracleConfig = OracleConfig(),
    workers: int = 1,
    cases=CASES,
) -> dict[str, Dataset]:
    """Independent uniform test sets for the three validation cases.

    ``n_per_case`` defaults to 60,000 rows, except for Monte Carlo labelled
    pairs where it defaults to ``MC_N_PER_CASE_CAP``.  ``DESK_N_PER_CASE``
    is a convenient smaller size for quick checks.
    """
    oracle_name = check_pair(family, contract)
    if n_per_case is None:
        n_per_case = MC_N_PER_CASE_CAP if oracle_name == "mc" else PAPER_N_PER_CASE
    out = {}
    for i, case in enumerate(CASES):
        if case not in cases:
            continue
        ds = generate_dataset(
            family, contract, UniformRandom(_case_seed(seed, i)), n_per_case, oracle,
            ranges=case_ranges(family, contract, case), workers=workers,
        )
        ds.provenance["case"] = case
        out[case] = ds
    return out


def _check_schema(net: Network, family: str, contract: str):
    names = feature_names(family, contract)
    if net.input_dim != len(names):
        raise ValueError(
            f"network expects {net.input_dim} features but {family}/{contract} has {len(names)}: {names}"
        )
    stored = net.info.get("features")
    if stored and tuple(stored.split(",")) != names:
        raise ValueError(f"network was trained on features {stored}, not {','.join(names)}")


@dataclass
class ValidationReport:
    metrics: dict[str, Metrics]
    sizes: dict[str, int]
    provenance: dict = field(default_factory=dict)

    def summary(self) -> str:
        lines = [f"{'case':<15}{'n':>8}{'MSE':>14}{'RMSE':>12}{'R^2':>10}"]
        for case, m in self.metrics.items():
            lines.append(f"{case:<15}{self.sizes[case]:>8}{m.mse:>14.6g}{m.rmse:>12.6g}{100 * m.r_squared:>9.2f}%")
        return "\n".join(lines)

    def to_csv(self, path):
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["case", "n", "mse", "rmse", "r_squared"])
            for case, m in self.metrics.items():
                w.writerow([case, self.sizes[case], repr(m.mse), repr(m.rmse), repr(m.r_squared)])


def run_validation(
    net: Network,
    family: str,
    contract: str,
    n_per_case: int | None = None,
    seed: int = 0,
    oracle: OracleConfig = OracleConfig(),
    sets: dict[str, Dataset] | None = None,
    workers: int = 1,
) -> ValidationReport:
    _check_schema(net, family, contract)
    sets = sets or build_validation_sets(family, contract, n_per_case, seed, oracle, workers)
    metrics = {case: evaluate(net, ds) for case, ds in sets.items()}
    return ValidationReport(
        metrics,
        {case: len(ds) for case, ds in sets.items()},
        {"family": family, "contract": contract, "seed": seed,
         "datasets": {case: ds.digest() for case, ds in sets.items()},
         "network": net.info.get("netcfg", ""), "training": net.info.get("traincfg", "")},
    )


# --------------------------------------------------------------------------
# sweeps


@dataclass
class SweepReport:
    axis: str
    values: list
    metric: str
    results: list[Metrics]
    fixed: str
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("sweep axis values must be strictly increasing")

    @property
    def metric_values(self) -> list[float]:
        return [getattr(m, self.metric) for m in self.results]

    def __getitem__(self, value) -> float:
        return self.metric_values[self.values.index(value)]

    def summary(self) -> str:
        lines = [f"{self.axis} sweep ({self.fixed})", f"{self.axis:>8}{self.metric:>14}"]
        lines += [f"{v:>8}{x:>14.6g}" for v, x in zip(self.values, self.metric_values)]
        return "\n".join(lines)

    def to_csv(self, path):
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow([self.axis, "mse", "rmse", "r_squared"])
            for v, m in zip(self.values, self.results):
                w.writerow([v, repr(m.mse), repr(m.rmse), repr(m.r_squared)])


def _fit_and_score(dataset, test, netcfg, traincfg):
    net, _ = train(dataset, netcfg, traincfg)
    return evaluate(net, test)


def width_sweep(
    dataset: Dataset,
    widths,
    test: Dataset,
    depth: int = 4,
    activation: Activation = LeakyRelu(),
    traincfg: TrainConfig = TrainConfig(),
    init_seed: int = 0,
) -> SweepReport:
    """Train one network per hidden width; report test R^2."""
    widths = sorted(int(w) for w in widths)
    if not widths:
        raise ValueError("widths must be non-empty")
    d = dataset.features.shape[1]
    results = [
        _fit_and_score(dataset, test, NetworkConfig(d, (w,) * depth, (activation,) * depth, init_seed=init_seed), traincfg)
        for w in widths
    ]
    return SweepReport("width", widths, "r_squared", results,
                       f"depth={depth} act={activation} {traincfg.describe()}",
                       {"train": dataset.digest(), "test": test.digest()})


def depth_sweep(
    dataset: Dataset,
    depths,
    test: Dataset,
    width: int = 120,
    activation: Activation = LeakyRelu(),
    traincfg: TrainConfig = TrainConfig(),
    init_seed: int = 0,
) -> SweepReport:
    """Train one network per number of hidden layers; report test RMSE."""
    depths = sorted(int(k) for k in depths)
    if not depths:
        raise ValueError("depths must be non-empty")
    if depths[0] < 1:
        raise ValueError("depths must be >= 1")
    d = dataset.features.shape[1]
    results = [
        _fit_and_score(dataset, test, NetworkConfig(d, (width,) * k, (activation,) * k, init_seed=init_seed), traincfg)
        for k in depths
    ]
    return SweepReport("depth", depths, "rmse", results,
                       f"width={width} act={activation} {traincfg.describe()}",
                       {"train": dataset.digest(), "test": test.digest()})


def activation_grid(
    dataset: Dataset,
    depth: int,
    kinds,
    test: Dataset,
    width: int = 120,
    traincfg: TrainConfig = TrainConfig(),
    init_seed: int = 0,
) -> list[tuple[tuple[Activation, ...], Metrics]]:
    """Every activation tuple of length ``depth`` over ``kinds``, ranked by test MSE."""
    kinds = list(kinds)
    allowed = {"elu", "relu", "leaky_relu", "sigmoid"}
    if not kinds or any(k.kind not in allowed for k in kinds):
        raise ValueError(f"candidate activations must be drawn from {sorted(allowed)}")
    d = dataset.features.shape[1]
    runs = []
    for combo in itertools.product(kinds, repeat=depth):
        cfg = NetworkConfig(d, (width,) * depth, combo, init_seed=init_seed)
        runs.append((combo, _fit_and_score(dataset, test, cfg, traincfg)))
    runs.sort(key=lambda item: item[1].mse)
    return runs


@dataclass
class QuasiReport:
    halton: Metrics
    uniform: dict[int, Metrics]
    provenance: dict = field(default_factory=dict)

    @property
    def halton_wins(self) -> int:
        return sum(self.halton.mse <= m.mse for m in self.uniform.values())

    def summary(self) -> str:
        lines = [f"halton   MSE {self.halton.mse:.6g}  R^2 {100 * self.halton.r_squared:.3f}%"]
        for seed, m in self.uniform.items():
            lines.append(f"uniform({seed}) MSE {m.mse:.6g}  R^2 {100 * m.r_squared:.3f}%")
        lines.append(f"halton <= uniform in {self.halton_wins}/{len(self.uniform)} seeds")
        return "\n".join(lines)


def quasi_comparison(
    family: str,
    contract: str,
    n: int,
    traincfg: TrainConfig = TrainConfig(),
    netcfg: NetworkConfig | None = None,
    uniform_seeds=(0,),
    test: Dataset | None = None,
    halton: Halton = Halton(),
    halton_data: Dataset | None = None,
) -> QuasiReport:
    """Train identical networks on Halton- and uniform-sampled data; score on one test set."""
    d = len(feature_names(family, contract))
    netcfg = netcfg or NetworkConfig(d)
    if test is None:
        test = build_validation_sets(family, contract, seed=12345, cases=(IN_SAMPLE,))[IN_SAMPLE]
    if halton_data is None:
        halton_data = generate_dataset(family, contract, halton, n)
    h_metrics = _fit_and_score(halton_data, test, netcfg, traincfg)
    u_metrics = {}
    for seed in uniform_seeds:
        data = generate_dataset(family, contract, UniformRandom(seed), n)
        u_metrics[seed] = _fit_and_score(data, test, netcfg, traincfg)
    return QuasiReport(
        h_metrics, u_metrics,
        {"netcfg": netcfg.describe(), "traincfg": traincfg.describe(), "n": n,
         "halton": halton.describe(), "test": test.digest(),
         "halton_netcfg": netcfg.describe(), "uniform_netcfg": netcfg.describe(),
         "halton_traincfg": traincfg.describe(), "uniform_traincfg": traincfg.describe()},
    )


# --------------------------------------------------------------------------
# timing


def hardware_description() -> str:
    cpu = platform.processor() or platform.machine()
    try:
        with open("/proc/cpuinfo", encoding="utf-8") as fh:
            for line in fh:
                if line.startswith("model name"):
                    cpu = line.split(":", 1)[1].strip()
                    break
    except OSError:
        pass
    return f"{cpu}; {os.cpu_count()} logical CPUs; {platform.system()} {platform.release()}; numpy {np.__version__}"


@dataclass
class TimingReport:
    surrogate_seconds_per_option: float
    oracle_seconds_per_option: float
    oracle: str
    n_surrogate: int
    n_oracle: int
    hardware: str

    @property
    def speedup(self) -> float:
        return self.oracle_seconds_per_option / self.surrogate_seconds_per_option

    def summary(self) -> str:
        return (f"surrogate: {self.surrogate_seconds_per_option:.3e} s/option (batch {self.n_surrogate})\n"
                f"oracle {self.oracle}: {self.oracle_seconds_per_option:.3e} s/option ({self.n_oracle} options)\n"
                f"speed-up: {self.speedup:.1f}x\nhardware: {self.hardware}")


def speed_benchmark(
    net: Network,
    family: str,
    contract: str,
    features: np.ndarray,
    mc_cfg: McConfig = McConfig(10_000, 100),
    batch_size: int = 10_000,
    repeats: int = 5,
    oracle_rows: int = 10,
) -> TimingReport:
    """Per-option wall time of batched surrogate inference versus the labelling oracle.

    Timings are medians over ``repeats``; the oracle is timed on the first
    ``oracle_rows`` rows (MC pricing is linear in the number of options).
    """
    features = np.asarray(features, dtype=float)
    if features.ndim != 2 or features.shape[0] == 0:
        raise ValueError("speed_benchmark needs a non-empty feature matrix")
    _check_schema(net, family, contract)
    oracle = check_pair(family, contract)
    reps = -(-batch_size // features.shape[0])
    batch = np.tile(features, (reps, 1))[:batch_size]
    forward(net, batch)  # warm-up
    sur = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        forward(net, batch)
        sur.append(time.perf_counter() - t0)
    names = feature_names(family, contract)
    sub = features[: max(1, min(oracle_rows, features.shape[0]))]
    ocfg = OracleConfig(mc_paths=mc_cfg.n_paths, mc_steps=mc_cfg.n_steps, mc_seed=mc_cfg.seed)
    orc = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        label_rows(family, contract, names, sub, ocfg)
        orc.append(time.perf_counter() - t0)
    label = ocfg.describe(family, oracle)
    return TimingReport(
        statistics.median(sur) / batch.shape[0],
        statistics.median(orc) / sub.shape[0],
        label, batch.shape[0], sub.shape[0], hardware_description(),
    )


# --------------------------------------------------------------------------
# calibration


@dataclass
class Quote:
    market: MarketParams
    price: float


@dataclass
class CalibrationResult:
    params: ModelParams
    objective: float
    history: list[float]  # running best objective after each evaluation
    n_evals: int

    def summary(self) -> str:
        vals = ", ".join(f"{f.name}={getattr(self.params, f.name):.6g}" for f in fields(self.params))
        return f"{self.params.family}: {vals}\nobjective (mean sq. error) {self.objective:.6g} after {self.n_evals} evaluations"


def quote_features(quotes, family: str, contract: str, values) -> np.ndarray:
    names = feature_names(family, contract)
    mnames = model_fields(family)
    rows = []
    for qt in quotes:
        mk = qt.market
        market = {"moneyness": mk.moneyness, "barrier_ratio": mk.barrier_ratio,
                  "maturity": mk.maturity, "r": mk.r, "q": mk.q}
        row = []
        for n in names:
            if n in mnames:
                row.append(values[mnames.index(n)])
            else:
                if market[n] is None:
                    raise ValueError(f"quote lacks {n}, needed by {family}/{contract}")
                row.append(market[n])
        rows.append(row)
    return np.array(rows, dtype=float)


def calibrate(
    net: Network,
    quotes,
    family: str,
    initial,
    bounds=None,
    contract: str | None = None,
    max_evals: int = 4000,
    tol: float = 1e-14,
) -> CalibrationResult:
    """Fit model parameters so the surrogate reproduces ``quotes`` (least squares).

    Bounded Nelder-Mead, restarted once from the best vertex.  ``initial``
    and ``bounds`` are in model-field order; bounds default to the sampling
    ranges and must lie inside them.
    """
    quotes = list(quotes)
    if not quotes:
        raise ValueError("calibrate needs at least one quote")
    if contract is None:
        contract = UP_AND_OUT_PUT if quotes[0].market.barrier_ratio is not None else "european-call"
    _check_schema(net, family, contract)
    mnames = model_fields(family)
    table = default_ranges(family, contract)
    if bounds is None:
        bounds = [table[n] for n in mnames]
    bounds = [(float(lo), float(hi)) for lo, hi in bounds]
    if len(bounds) != len(mnames):
        raise ValueError(f"{family} has {len(mnames)} parameters; got {len(bounds)} bounds")
    for n, (lo, hi) in zip(mnames, bounds):
        tlo, thi = table[n]
        if lo < tlo or hi > thi or lo >= hi:
            raise ValueError(f"bounds for {n} must lie within [{tlo}, {thi}], got [{lo}, {hi}]")
    x0 = np.asarray(initial, dtype=float).ravel()
    if x0.size != len(mnames):
        raise ValueError(f"initial guess needs {len(mnames)} values")
    if any(not lo <= v <= hi for v, (lo, hi) in zip(x0, bounds)):
        raise ValueError(f"initial guess {x0.tolist()} outside bounds {bounds}")

    target = np.array([qt.price for qt in quotes], dtype=float)
    base = quote_features(quotes, family, contract, x0)
    cols = [feature_names(family, contract).index(n) for n in mnames]
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    history: list[float] = []
    best = {"x": x0.copy(), "f": math.inf}

    def objective(x):
        x = np.clip(x, lo, hi)
        feats = base.copy()
        feats[:, cols] = x
        resid = forward(net, feats) - target
        f = float(np.mean(resid * resid))
        if f < best["f"]:
            best["f"], best["x"] = f, x.copy()
        history.append(best["f"])
        return f

    opts = {"xatol": 1e-12, "fatol": tol, "maxfev": max_evals // 2, "adaptive": x0.size > 2}
    res = minimize(objective, x0, method="Nelder-Mead", bounds=bounds, options=opts)
    minimize(objective, np.clip(best["x"], lo, hi), method="Nelder-Mead", bounds=bounds, options=opts)
    del res
    x = np.clip(best["x"], lo, hi)
    return CalibrationResult(model_from_values(family, x), best["f"], history, len(history))
