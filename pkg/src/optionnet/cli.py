"""Command-line interface: ``optionnet <subcommand> [flags]``.

Every flag may also come from ``--config FILE`` (``key = value`` lines or a
JSON run manifest); flags given on the command line win.  Outputs default to
the directory named by ``OPTIONNET_OUTPUT_DIR`` (or the working directory).
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .models import (
    AMERICAN_PUT,
    EUROPEAN_CALL,
    FAMILIES,
    UP_AND_OUT_PUT,
    MarketParams,
    default_ranges,
    model_fields,
    model_from_values,
)
from .nn import (
    Adam,
    NetworkConfig,
    RmsProp,
    Sgd,
    TrainConfig,
    forward,
    load_model,
    parse_activation,
    save_model,
    train,
)
from .nn.network import RECOMMENDED_MAX_LAYERS
from .pricers import (
    FftConfig,
    McConfig,
    bs_european_call,
    fft_european_call,
    ju_zhong_american_put,
    mc_uop_price,
    uop_closed_form_gbm,
)
from .sampling import (
    Halton,
    OracleConfig,
    UniformRandom,
    check_pair,
    feature_names,
    generate_dataset,
    read_dataset,
    sample_features,
    supported_pairs,
    write_dataset,
)
from . import validation as val

OUTPUT_DIR_ENV = "OPTIONNET_OUTPUT_DIR"
CONTRACTS = (EUROPEAN_CALL, UP_AND_OUT_PUT, AMERICAN_PUT)
ORACLE_NAMES = ("bs", "fft", "closed-form", "mc", "ju-zhong")
MODEL_FLAGS = {
    "sigma": "--sigma", "theta": "--theta", "nu": "--nu", "kappa": "--kappa", "eta": "--eta",
    "lam": "--lam", "sigma_v": "--sigma-v", "rho": "--rho", "theta_long": "--theta-long", "v0": "--v0",
}


class UsageError(Exception):
    """Bad flag values; reported with exit code 2."""


def _output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV, "."))


def _default_workers() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:  # pragma: no cover - non-Linux
        return os.cpu_count() or 1


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


# --------------------------------------------------------------------------
# parser


def _add_common(p, *, workers=False):
    p.add_argument("--config", metavar="FILE", help="read flag defaults from FILE (key = value lines or a run manifest)")
    if workers:
        p.add_argument("--workers", type=_positive_int, default=_default_workers(),
                       help="processes for Monte Carlo labelling; 1 = serial canonical run (default: %(default)s)")


def _add_pair(p, contract_default=EUROPEAN_CALL):
    p.add_argument("--family", choices=FAMILIES, default=None, help="model family (required)")
    p.add_argument("--contract", choices=CONTRACTS, default=contract_default, help="contract (default: %(default)s)")


def _add_oracle(p):
    p.add_argument("--mc-paths", type=_positive_int, default=None,
                   help="Monte Carlo paths per label (default: 10000 for gbmsa, 8000 for vgsa)")
    p.add_argument("--mc-steps", type=_positive_int, default=100, help="Monte Carlo time steps (default: %(default)s)")
    p.add_argument("--mc-seed", type=int, default=0, help="Monte Carlo base seed (default: %(default)s)")


def _add_training(p):
    p.add_argument("--layers", type=_positive_int, default=4, help="hidden layers (default: %(default)s)")
    p.add_argument("--width", type=_positive_int, default=120, help="neurons per hidden layer (default: %(default)s)")
    p.add_argument("--activation", default="leaky_relu",
                   help="hidden activation, or comma list with one per layer: relu, leaky_relu, elu, sigmoid "
                        "(default: %(default)s)")
    p.add_argument("--dropout-keep", type=float, default=1.0, help="dropout keep probability (default: %(default)s)")
    p.add_argument("--optimizer", choices=("adam", "rmsprop", "sgd"), default="adam", help="(default: %(default)s)")
    p.add_argument("--lr", type=float, default=None, help="learning rate (default: 1e-3; 1e-2 for sgd)")
    p.add_argument("--batch-size", type=_positive_int, default=256, help="(default: %(default)s)")
    p.add_argument("--max-epochs", type=_positive_int, default=200, help="(default: %(default)s)")
    p.add_argument("--patience", type=_positive_int, default=20, help="early-stopping patience in epochs (default: %(default)s)")
    p.add_argument("--val-fraction", type=float, default=0.1, help="held-out share for early stopping (default: %(default)s)")
    p.add_argument("--init-seed", type=int, default=0, help="weight initialization seed (default: %(default)s)")
    p.add_argument("--shuffle-seed", type=int, default=0, help="batch shuffling / split seed (default: %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optionnet",
        description="Neural-network option pricing surrogates: data generation, training and evaluation.",
        epilog=f"Default output directory: ${OUTPUT_DIR_ENV} (else the working directory).",
    )
    parser.add_argument("--version", action="version", version=f"optionnet {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    p = sub.add_parser("gen", help="generate a labelled dataset")
    _add_pair(p)
    p.add_argument("--scheme", choices=("halton", "uniform"), default="halton", help="sampling scheme (default: %(default)s)")
    p.add_argument("--n", type=_positive_int, default=40_000, help="rows (default: %(default)s)")
    p.add_argument("--seed", type=int, default=0, help="uniform sampler seed (default: %(default)s)")
    p.add_argument("--halton-skip", type=int, default=20, help="leading Halton points skipped (default: %(default)s)")
    _add_oracle(p)
    p.add_argument("--out", default=None, help="dataset CSV path (default: $OUT_DIR/dataset.csv)")
    _add_common(p, workers=True)

    p = sub.add_parser("train", help="train a surrogate network on a dataset")
    p.add_argument("--data", default=None, help="dataset CSV (required)")
    _add_training(p)
    p.add_argument("--out", default=None, help="model file path (default: $OUT_DIR/model.npz)")
    _add_common(p)

    p = sub.add_parser("eval", help="in-sample / deep-OTM / long-maturity validation report")
    p.add_argument("--model", default=None, help="model file (required)")
    _add_pair(p)
    p.add_argument("--n-per-case", type=_positive_int, default=None,
                   help="rows per validation case (default: 60000; 2000 for Monte Carlo labelled pairs)")
    p.add_argument("--seed", type=int, default=0, help="validation sampling seed (default: %(default)s)")
    _add_oracle(p)
    p.add_argument("--out", default=None, help="write the report CSV here")
    _add_common(p, workers=True)

    p = sub.add_parser("sweep", help="width / depth / activation / quasi-random sweeps")
    p.add_argument("--kind", choices=("width", "depth", "activation", "quasi"), default=None, help="sweep type (required)")
    p.add_argument("--data", default=None, help="training dataset CSV (width/depth/activation)")
    p.add_argument("--test", default=None, help="test dataset CSV (default: generate an in-sample set)")
    p.add_argument("--test-n", type=_positive_int, default=10_000, help="rows of the generated test set (default: %(default)s)")
    p.add_argument("--test-seed", type=int, default=12345, help="seed of the generated test set (default: %(default)s)")
    p.add_argument("--values", type=_int_list, default=None,
                   help="widths or depths to sweep (default: 30,60,90,120 or 1,2,3,4,5,6)")
    p.add_argument("--activations", default="relu,leaky_relu,elu,sigmoid",
                   help="candidate activations for the grid (default: %(default)s)")
    p.add_argument("--grid-depth", type=_positive_int, default=2, help="layers in the activation grid (default: %(default)s)")
    _add_pair(p)
    p.add_argument("--n", type=_positive_int, default=40_000, help="rows per arm for --kind quasi (default: %(default)s)")
    p.add_argument("--seeds", type=_int_list, default=[0, 1, 2, 3, 4],
                   help="uniform-arm seeds for --kind quasi (default: 0,1,2,3,4)")
    _add_training(p)
    p.add_argument("--out", default=None, help="result CSV (default: $OUT_DIR/sweep-<kind>.csv)")
    _add_common(p)

    p = sub.add_parser("bench", help="surrogate vs Monte Carlo per-option timing")
    p.add_argument("--model", default=None, help="model file (required)")
    _add_pair(p, contract_default=UP_AND_OUT_PUT)
    p.add_argument("--n", type=_positive_int, default=1000, help="distinct sampled option rows (default: %(default)s)")
    p.add_argument("--seed", type=int, default=0, help="row sampling seed (default: %(default)s)")
    p.add_argument("--batch", type=_positive_int, default=10_000, help="surrogate batch size (default: %(default)s)")
    p.add_argument("--repeats", type=_positive_int, default=5, help="timing repeats; median reported (default: %(default)s)")
    p.add_argument("--oracle-rows", type=_positive_int, default=10, help="options priced by the oracle per repeat (default: %(default)s)")
    p.add_argument("--mc-paths", type=_positive_int, default=10_000, help="(default: %(default)s)")
    p.add_argument("--mc-steps", type=_positive_int, default=100, help="(default: %(default)s)")
    p.add_argument("--out", default=None, help="write the timing report (text) here")
    _add_common(p)

    p = sub.add_parser("calibrate", help="fit model parameters to quotes through a surrogate")
    p.add_argument("--model", default=None, help="model file (required)")
    p.add_argument("--quotes", default=None, help="quotes CSV with header moneyness,maturity,r,q,price (required)")
    _add_pair(p, contract_default=None)
    p.add_argument("--initial", type=_float_list, default=None, help="initial parameters, model-field order (default: range midpoints)")
    p.add_argument("--bounds", default=None, help="lo:hi per parameter, comma separated (default: sampling ranges)")
    p.add_argument("--max-evals", type=_positive_int, default=4000, help="(default: %(default)s)")
    p.add_argument("--out", default=None, help="write fitted parameters as JSON here")
    _add_common(p)

    p = sub.add_parser("price", help="price one option with an oracle or a surrogate")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--oracle", choices=ORACLE_NAMES, default=None, help="pricing oracle")
    src.add_argument("--model", default=None, help="surrogate model file")
    p.add_argument("--family", choices=FAMILIES, default="gbm", help="(default: %(default)s)")
    p.add_argument("--contract", choices=CONTRACTS, default=None,
                   help="(default: up-and-out-put for closed-form/mc, american-put for ju-zhong, else european-call)")
    p.add_argument("--moneyness", type=float, default=None, help="spot / strike (required)")
    p.add_argument("--t", type=float, default=None, help="maturity in years (required)")
    p.add_argument("--r", type=float, default=0.0, help="risk-free rate (default: %(default)s)")
    p.add_argument("--q", type=float, default=0.0, help="dividend yield (default: %(default)s)")
    p.add_argument("--barrier", type=float, default=None, help="barrier / strike (up-and-out put)")
    for name, flag in MODEL_FLAGS.items():
        p.add_argument(flag, type=float, default=None, dest=name, help=f"model parameter {name}")
    _add_oracle(p)
    _add_common(p)
    return parser


# --------------------------------------------------------------------------
# config files and manifests


def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"--config: cannot read {path}: {exc.strerror}") from None
    if text.lstrip().startswith("{"):
        obj = json.loads(text)
        return dict(obj.get("config", obj))
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"--config {path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _apply_config(sub: argparse.ArgumentParser, config: dict):
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in config.items():
        if key in ("config", "command"):
            continue
        action = actions.get(key)
        if action is None:
            sub.error(f"--config: unknown key {key!r}")
        if isinstance(value, str) and action.type is not None:
            try:
                value = action.type(value)
            except (ValueError, argparse.ArgumentTypeError) as exc:
                sub.error(f"--config: bad value for {key}: {exc}")
        elif isinstance(value, str) and isinstance(action, argparse._StoreTrueAction):
            value = value.lower() in ("1", "true", "yes")
        if action.choices is not None and value is not None and value not in action.choices:
            sub.error(f"--config: {key} must be one of {list(action.choices)}")
        defaults[key] = value
    sub.set_defaults(**defaults)


def parse_args(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        sub = parser._subparsers._group_actions[0].choices[args.command]
        try:
            _apply_config(sub, _load_config(args.config))
        except UsageError as exc:
            sub.error(str(exc))
        args = parser.parse_args(argv)
    return parser, args


def _resolved(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("config",)}


def write_manifest(output: Path, args, inputs: dict, outputs: dict, seeds: dict, started: float) -> Path:
    """Atomically write ``<output>.manifest.json`` describing this run."""
    manifest = {
        "subcommand": args.command,
        "config": _resolved(args),
        "inputs": inputs,
        "outputs": outputs,
        "seeds": seeds,
        "tool_version": __version__,
        "wall_clock_seconds": round(time.perf_counter() - started, 3),
    }
    path = Path(str(output) + ".manifest.json")
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    os.replace(tmp, path)
    return path


def _require(sub_error, args, *names):
    for name in names:
        if getattr(args, name) is None:
            sub_error(f"the following argument is required: --{name.replace('_', '-')}")


def _out_path(args, default_name: str) -> Path:
    path = Path(args.out) if args.out else _output_dir() / default_name
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _oracle_config(args) -> OracleConfig:
    return OracleConfig(mc_paths=args.mc_paths, mc_steps=args.mc_steps, mc_seed=args.mc_seed)


def _checked_pair(family, contract) -> str:
    try:
        return check_pair(family, contract)
    except ValueError as exc:
        raise UsageError(f"--family/--contract: {exc}") from None


def _configs(args, input_dim: int) -> tuple[NetworkConfig, TrainConfig]:
    if args.layers > RECOMMENDED_MAX_LAYERS:
        print(f"warning: --layers {args.layers} exceeds the recommended maximum of {RECOMMENDED_MAX_LAYERS} "
              "hidden layers; deeper networks tend to generalize worse", file=sys.stderr)
    try:
        acts = [parse_activation(a) for a in args.activation.split(",")]
    except ValueError as exc:
        raise UsageError(f"--activation: {exc}") from None
    if len(acts) == 1:
        acts = acts * args.layers
    if len(acts) != args.layers:
        raise UsageError(f"--activation: got {len(acts)} activations for {args.layers} layers")
    lr = args.lr if args.lr is not None else (1e-2 if args.optimizer == "sgd" else 1e-3)
    opt = {"adam": Adam, "rmsprop": RmsProp, "sgd": Sgd}[args.optimizer](lr=lr)
    try:
        netcfg = NetworkConfig(input_dim, (args.width,) * args.layers, tuple(acts), args.dropout_keep, args.init_seed)
        traincfg = TrainConfig(opt, args.batch_size, args.max_epochs, args.patience, args.val_fraction, args.shuffle_seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return netcfg, traincfg


# --------------------------------------------------------------------------
# subcommands


def cmd_gen(args, error):
    _require(error, args, "family")
    _checked_pair(args.family, args.contract)
    started = time.perf_counter()
    scheme = Halton(args.halton_skip) if args.scheme == "halton" else UniformRandom(args.seed)
    ds = generate_dataset(args.family, args.contract, scheme, args.n, _oracle_config(args), workers=args.workers)
    out = _out_path(args, "dataset.csv")
    write_dataset(ds, out)
    write_manifest(out, args, {}, {"dataset": str(out), "sidecar": str(out.with_suffix(".meta"))},
                   {"seed": args.seed, "halton_skip": args.halton_skip, "mc_seed": args.mc_seed}, started)
    print(f"wrote {len(ds)} rows to {out} (sha256 {ds.digest()[:16]})")


def cmd_train(args, error):
    _require(error, args, "data")
    started = time.perf_counter()
    ds = read_dataset(args.data)
    netcfg, traincfg = _configs(args, ds.features.shape[1])
    net, hist = train(ds, netcfg, traincfg)
    net.info.update({"family": ds.provenance.get("family", ""), "contract": ds.provenance.get("contract", ""),
                     "dataset": ds.digest()})
    out = _out_path(args, "model.npz")
    save_model(net, out)
    hist_path = Path(str(out) + ".history.csv")
    hist.to_csv(hist_path)
    write_manifest(out, args, {"dataset": str(args.data), "dataset_sha256": ds.digest()},
                   {"model": str(out), "history": str(hist_path)},
                   {"init_seed": args.init_seed, "shuffle_seed": args.shuffle_seed}, started)
    print(f"best epoch {hist.best_epoch}: validation MSE {net.info['best_val_mse']:.6g}; model written to {out}")


def _load_net(path):
    if not Path(path).exists():
        raise FileNotFoundError(f"model file not found: {path}")
    return load_model(path)


def cmd_eval(args, error):
    _require(error, args, "model", "family")
    _checked_pair(args.family, args.contract)
    started = time.perf_counter()
    net = _load_net(args.model)
    report = val.run_validation(net, args.family, args.contract, args.n_per_case, args.seed, _oracle_config(args), workers=args.workers)
    print(report.summary())
    if args.out:
        out = _out_path(args, "")
        report.to_csv(out)
        write_manifest(out, args, {"model": str(args.model)}, {"report": str(out)},
                       {"seed": args.seed, "mc_seed": args.mc_seed}, started)
    return report


def _sweep_data(args, error):
    if args.kind == "quasi":
        _require(error, args, "family")
        _checked_pair(args.family, args.contract)
        train_ds = None
        family, contract = args.family, args.contract
    else:
        _require(error, args, "data")
        train_ds = read_dataset(args.data)
        family = train_ds.provenance.get("family") or args.family
        contract = train_ds.provenance.get("contract") or args.contract
    if args.test:
        test = read_dataset(args.test, family, contract)
    else:
        test = val.build_validation_sets(family, contract, args.test_n, args.test_seed, cases=(val.IN_SAMPLE,))[val.IN_SAMPLE]
    return train_ds, test, family, contract


def cmd_sweep(args, error):
    _require(error, args, "kind")
    started = time.perf_counter()
    train_ds, test, family, contract = _sweep_data(args, error)
    dim = len(feature_names(family, contract))
    netcfg, traincfg = _configs(args, dim)
    act = netcfg.hidden_activations[0]
    out = _out_path(args, f"sweep-{args.kind}.csv")
    if args.kind in ("width", "depth"):
        values = args.values or ([30, 60, 90, 120] if args.kind == "width" else [1, 2, 3, 4, 5, 6])
        if args.kind == "width":
            rep = val.width_sweep(train_ds, values, test, args.layers, act, traincfg, args.init_seed)
        else:
            rep = val.depth_sweep(train_ds, values, test, args.width, act, traincfg, args.init_seed)
        rep.to_csv(out)
        print(rep.summary())
    elif args.kind == "activation":
        try:
            kinds = [parse_activation(a) for a in args.activations.split(",")]
        except ValueError as exc:
            raise UsageError(f"--activations: {exc}") from None
        runs = val.activation_grid(train_ds, args.grid_depth, kinds, test, args.width, traincfg, args.init_seed)
        with out.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["rank", "activations", "mse", "rmse", "r_squared"])
            for i, (combo, m) in enumerate(runs, 1):
                w.writerow([i, "/".join(map(str, combo)), repr(m.mse), repr(m.rmse), repr(m.r_squared)])
        for i, (combo, m) in enumerate(runs, 1):
            print(f"{i:3d}  {'/'.join(map(str, combo)):<40} MSE {m.mse:.6g}")
    else:
        rep = val.quasi_comparison(family, contract, args.n, traincfg, netcfg, args.seeds, test)
        with out.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["arm", "seed", "mse", "rmse", "r_squared"])
            w.writerow(["halton", "", repr(rep.halton.mse), repr(rep.halton.rmse), repr(rep.halton.r_squared)])
            for seed, m in rep.uniform.items():
                w.writerow(["uniform", seed, repr(m.mse), repr(m.rmse), repr(m.r_squared)])
        print(rep.summary())
    write_manifest(out, args, {"data": args.data, "test": args.test, "test_sha256": test.digest()},
                   {"results": str(out)}, {"init_seed": args.init_seed, "shuffle_seed": args.shuffle_seed,
                                           "test_seed": args.test_seed}, started)


def cmd_bench(args, error):
    _require(error, args, "model", "family")
    _checked_pair(args.family, args.contract)
    started = time.perf_counter()
    net = _load_net(args.model)
    _, X, _ = sample_features(args.family, args.contract, UniformRandom(args.seed), args.n)
    rep = val.speed_benchmark(net, args.family, args.contract, X, McConfig(args.mc_paths, args.mc_steps),
                              args.batch, args.repeats, args.oracle_rows)
    print(rep.summary())
    if args.out:
        out = _out_path(args, "")
        out.write_text(rep.summary() + "\n", encoding="utf-8")
        write_manifest(out, args, {"model": str(args.model)}, {"report": str(out)}, {"seed": args.seed}, started)
    return rep


def read_quotes(path) -> list[val.Quote]:
    """Quotes CSV: ``moneyness,maturity,r,q,price`` plus optional ``barrier_ratio``."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"quotes file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        cols = set(reader.fieldnames or ())
        missing = [c for c in ("moneyness", "maturity", "r", "q", "price") if c not in cols]
        if missing:
            raise ValueError(f"{path}: missing column(s) {', '.join(missing)}; expected header moneyness,maturity,r,q,price")
        quotes = []
        for lineno, row in enumerate(reader, 2):
            try:
                barrier = float(row["barrier_ratio"]) if row.get("barrier_ratio") else None
                mk = MarketParams(float(row["moneyness"]), float(row["maturity"]), float(row["r"]), float(row["q"]), barrier)
                price = float(row["price"])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            if not math.isfinite(price):
                raise ValueError(f"{path}:{lineno}: non-finite price")
            quotes.append(val.Quote(mk, price))
    return quotes


def write_quotes(quotes, path):
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        barrier = any(qt.market.barrier_ratio is not None for qt in quotes)
        w.writerow(["moneyness", "maturity", "r", "q"] + (["barrier_ratio"] if barrier else []) + ["price"])
        for qt in quotes:
            mk = qt.market
            vals = [mk.moneyness, mk.maturity, mk.r, mk.q] + ([mk.barrier_ratio] if barrier else []) + [qt.price]
            w.writerow([format(float(v), ".17g") for v in vals])


def _parse_bounds(text, n):
    try:
        pairs = [tuple(float(x) for x in part.split(":")) for part in text.split(",")]
    except ValueError:
        raise UsageError(f"--bounds: expected lo:hi pairs, got {text!r}") from None
    if len(pairs) != n or any(len(p) != 2 for p in pairs):
        raise UsageError(f"--bounds: need {n} lo:hi pairs")
    return pairs


def cmd_calibrate(args, error):
    _require(error, args, "model", "quotes", "family")
    started = time.perf_counter()
    net = _load_net(args.model)
    quotes = read_quotes(args.quotes)
    if not quotes:
        raise ValueError(f"{args.quotes}: no quotes")
    contract = args.contract or (UP_AND_OUT_PUT if quotes[0].market.barrier_ratio is not None else EUROPEAN_CALL)
    _checked_pair(args.family, contract)
    names = model_fields(args.family)
    table = default_ranges(args.family, contract)
    bounds = _parse_bounds(args.bounds, len(names)) if args.bounds else [table[n] for n in names]
    initial = args.initial or [0.5 * (lo + hi) for lo, hi in bounds]
    if len(initial) != len(names):
        raise UsageError(f"--initial: {args.family} needs {len(names)} values ({', '.join(names)})")
    try:
        res = val.calibrate(net, quotes, args.family, initial, bounds, contract, args.max_evals)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(res.summary())
    print(f"fit RMSE {math.sqrt(res.objective):.6g} over {len(quotes)} quotes")
    if args.out:
        out = _out_path(args, "")
        payload = {"family": args.family, "params": dict(zip(names, [getattr(res.params, n) for n in names])),
                   "objective": res.objective, "n_evals": res.n_evals}
        out.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        write_manifest(out, args, {"model": str(args.model), "quotes": str(args.quotes)}, {"params": str(out)}, {}, started)
    return res


def _model_values(args, family):
    values = []
    for name in model_fields(family):
        v = getattr(args, name)
        if v is None:
            raise UsageError(f"{MODEL_FLAGS[name]} is required for family {family}")
        values.append(v)
    return values


def cmd_price(args, error):
    if args.oracle is None and args.model is None:
        error("one of --oracle or --model is required")
    _require(error, args, "moneyness", "t")
    contract = args.contract or {"closed-form": UP_AND_OUT_PUT, "mc": UP_AND_OUT_PUT,
                                 "ju-zhong": AMERICAN_PUT}.get(args.oracle, EUROPEAN_CALL)
    family = args.family
    if args.oracle is not None:
        designated = _checked_pair(family, contract)
        compatible = args.oracle == designated or (args.oracle == "fft" and contract == EUROPEAN_CALL)
        if not compatible:
            raise UsageError(f"--oracle {args.oracle} cannot price {family}/{contract} (designated oracle: {designated})")
    else:
        _checked_pair(family, contract)
    if contract == UP_AND_OUT_PUT and args.barrier is None:
        raise UsageError("--barrier is required for up-and-out-put")
    values = _model_values(args, family)
    try:
        market = MarketParams(args.moneyness, args.t, args.r, args.q, args.barrier if contract == UP_AND_OUT_PUT else None)
        model = model_from_values(family, values)
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    se = None
    if args.model is not None:
        net = _load_net(args.model)
        row = {"moneyness": market.moneyness, "barrier_ratio": market.barrier_ratio, "maturity": market.maturity,
               "r": market.r, "q": market.q, **dict(zip(model_fields(family), values))}
        names = feature_names(family, contract)
        if net.input_dim != len(names):
            raise ValueError(f"model expects {net.input_dim} inputs; {family}/{contract} has {len(names)}")
        price = float(forward(net, np.array([[row[n] for n in names]]))[0])
    elif args.oracle == "bs":
        price = bs_european_call(market, values[0])
    elif args.oracle == "fft":
        price = fft_european_call(model, market, FftConfig())
    elif args.oracle == "closed-form":
        price = uop_closed_form_gbm(market, values[0])
    elif args.oracle == "ju-zhong":
        price = ju_zhong_american_put(market, values[0])
    else:
        ocfg = _oracle_config(args)
        est = mc_uop_price(model, market, McConfig(ocfg.paths_for(family), args.mc_steps, args.mc_seed))
        price, se = est.value, est.std_error
    if not math.isfinite(price):
        raise RuntimeError("pricer returned a non-finite value; check the parameters")
    print(f"{price:.10g}")
    if se is not None:
        print(f"std_error {se:.3g}", file=sys.stderr)
    return price


COMMANDS = {
    "gen": cmd_gen, "train": cmd_train, "eval": cmd_eval, "sweep": cmd_sweep,
    "bench": cmd_bench, "calibrate": cmd_calibrate, "price": cmd_price,
}


def main(argv=None) -> int:
    parser, args = parse_args(argv)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    try:
        COMMANDS[args.command](args, sub.error)
    except UsageError as exc:
        sub.print_usage(sys.stderr)
        print(f"{sub.prog}: error: {exc}", file=sys.stderr)
        if "supported" not in str(exc) and "--family/--contract" in str(exc):
            print("supported pairs: " + ", ".join(f"{f}/{c}" for f, c in supported_pairs()), file=sys.stderr)
        return 2
    except (OSError, ValueError, RuntimeError, ArithmeticError) as exc:
        print(f"{sub.prog}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
