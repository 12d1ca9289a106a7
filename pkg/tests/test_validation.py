import inspect

import numpy as np
import pytest

from optionnet.models import EUROPEAN_CALL, UP_AND_OUT_PUT, GbmParams, MarketParams
from optionnet.nn import Elu, Identity, LeakyRelu, NetworkConfig, Relu, TrainConfig, forward, init_network, train
from optionnet.pricers import McConfig
from optionnet.sampling import Halton, OracleConfig, UniformRandom, generate_dataset
from optionnet import validation as val

FAST = TrainConfig(batch_size=64, max_epochs=3)


@pytest.fixture(scope="module")
def small_data():
    return generate_dataset("gbm", EUROPEAN_CALL, Halton(), 1500)


@pytest.fixture(scope="module")
def small_test():
    return val.build_validation_sets("gbm", EUROPEAN_CALL, 500, seed=1, cases=(val.IN_SAMPLE,))[val.IN_SAMPLE]


@pytest.fixture(scope="module")
def small_net(small_data):
    net, _ = train(small_data, NetworkConfig(5, (32, 32)), TrainConfig(max_epochs=40))
    return net


def test_validation_sets_ranges():
    sets = val.build_validation_sets("gbm", EUROPEAN_CALL, 400, seed=3)
    assert set(sets) == set(val.CASES)
    deep, long_ = sets[val.DEEP_OTM], sets[val.LONG_MATURITY]
    assert np.all((deep.column("moneyness") >= 0.6) & (deep.column("moneyness") <= 0.8))
    assert np.all((long_.column("maturity") >= 3.0) & (long_.column("maturity") <= 5.0))
    ins = sets[val.IN_SAMPLE]
    assert np.all((ins.column("moneyness") >= 0.8) & (ins.column("maturity") <= 3.0))
    assert all(len(ds) == 400 for ds in sets.values())


def test_validation_sets_independent_of_training_draws():
    ins = val.build_validation_sets("gbm", EUROPEAN_CALL, 100, seed=0, cases=(val.IN_SAMPLE,))[val.IN_SAMPLE]
    train_ds = generate_dataset("gbm", EUROPEAN_CALL, UniformRandom(0), 100)
    assert not np.any(np.all(np.isclose(ins.features[:, None, :], train_ds.features[None, :, :]), axis=2))


def test_default_case_size():
    assert inspect.signature(val.build_validation_sets).parameters["n_per_case"].default is None
    sets = val.build_validation_sets("gbm", EUROPEAN_CALL, cases=(val.IN_SAMPLE,))
    assert len(sets[val.IN_SAMPLE]) == 60_000 == val.PAPER_N_PER_CASE


def test_barrier_validation_sets_keep_constraint():
    sets = val.build_validation_sets("gbm", UP_AND_OUT_PUT, 300, seed=2)
    deep = sets[val.DEEP_OTM]
    assert np.all(deep.column("barrier_ratio") >= deep.column("moneyness"))


def test_untrained_network_has_no_skill():
    net = init_network(NetworkConfig(5, (16, 16)))
    rep = val.run_validation(net, "gbm", EUROPEAN_CALL, 500)
    assert all(m.r_squared < 0.2 for m in rep.metrics.values())


def test_run_validation_report(small_net, tmp_path):
    rep = val.run_validation(small_net, "gbm", EUROPEAN_CALL, 500, seed=4)
    assert rep.metrics[val.IN_SAMPLE].r_squared > 0.9
    assert rep.sizes == {c: 500 for c in val.CASES}
    assert "deep-otm" in rep.summary()
    rep.to_csv(tmp_path / "r.csv")
    assert (tmp_path / "r.csv").read_text().splitlines()[0] == "case,n,mse,rmse,r_squared"


def test_run_validation_schema_mismatch(small_net):
    with pytest.raises(ValueError, match="features"):
        val.run_validation(small_net, "vg", EUROPEAN_CALL, 10)


def test_width_sweep_single_point(small_data, small_test):
    rep = val.width_sweep(small_data, [8], small_test, depth=1, traincfg=FAST)
    assert rep.values == [8] and len(rep.results) == 1
    assert np.isfinite(rep[8])


def test_sweep_report_requires_increasing_axis():
    with pytest.raises(ValueError):
        val.SweepReport("width", [30, 30], "rmse", [], "")


def test_depth_sweep_rejects_empty(small_data, small_test):
    with pytest.raises(ValueError):
        val.depth_sweep(small_data, [], small_test)


def test_depth_sweep_reports_rmse(small_data, small_test, tmp_path):
    rep = val.depth_sweep(small_data, [2, 1], small_test, width=8, traincfg=FAST)
    assert rep.values == [1, 2] and rep.metric == "rmse"
    rep.to_csv(tmp_path / "d.csv")
    assert len((tmp_path / "d.csv").read_text().splitlines()) == 3


def test_activation_grid_size_and_ranking(small_data, small_test):
    runs = val.activation_grid(small_data, 2, [Elu(), Relu(), LeakyRelu()], small_test, width=8, traincfg=FAST)
    assert len(runs) == 9
    assert len({combo for combo, _ in runs}) == 9
    mses = [m.mse for _, m in runs]
    assert mses == sorted(mses)


def test_activation_grid_rejects_identity(small_data, small_test):
    with pytest.raises(ValueError):
        val.activation_grid(small_data, 1, [Identity()], small_test)


def test_quasi_comparison_controlled(small_test):
    cfg = NetworkConfig(5, (8,))
    rep = val.quasi_comparison("gbm", EUROPEAN_CALL, 600, FAST, cfg, uniform_seeds=(0, 1), test=small_test)
    p = rep.provenance
    assert p["halton_netcfg"] == p["uniform_netcfg"] and p["halton_traincfg"] == p["uniform_traincfg"]
    assert set(rep.uniform) == {0, 1}
    assert 0 <= rep.halton_wins <= 2
    assert "halton" in rep.summary()


def test_speed_benchmark(small_net, small_data):
    rep = val.speed_benchmark(small_net, "gbm", EUROPEAN_CALL, small_data.features[:50], batch_size=2000,
                              repeats=3, oracle_rows=5)
    assert rep.n_surrogate == 2000
    assert rep.surrogate_seconds_per_option > 0 and rep.oracle_seconds_per_option > 0
    assert rep.speedup > 0
    assert "CPU" in rep.hardware
    assert "speed-up" in rep.summary()


def test_speed_benchmark_mc_oracle():
    net = init_network(NetworkConfig(10, (16,)))
    net.info["features"] = "moneyness,barrier_ratio,maturity,r,q,sigma_v,kappa,rho,theta_long,v0"
    ds = generate_dataset("gbmsa", UP_AND_OUT_PUT, UniformRandom(0), 3, OracleConfig(mc_paths=100, mc_steps=5))
    rep = val.speed_benchmark(net, "gbmsa", UP_AND_OUT_PUT, ds.features, McConfig(1000, 20), 100, 1, 2)
    assert rep.oracle.startswith("mc(paths=1000,steps=20")


def test_speed_benchmark_empty_batch(small_net):
    with pytest.raises(ValueError, match="non-empty"):
        val.speed_benchmark(small_net, "gbm", EUROPEAN_CALL, np.empty((0, 5)))


def _self_quotes(net, sigma):
    quotes = []
    for m in np.linspace(0.85, 1.15, 5):
        for T in (0.25, 1.0):
            mk = MarketParams(m, T, 0.02, 0.01)
            price = float(forward(net, [[m, T, 0.02, 0.01, sigma]])[0])
            quotes.append(val.Quote(mk, price))
    return quotes


def test_calibrate_self_quotes(small_net):
    res = val.calibrate(small_net, _self_quotes(small_net, 0.27), "gbm", [0.1])
    assert res.objective <= 1e-10
    assert isinstance(res.params, GbmParams)
    assert res.params.sigma == pytest.approx(0.27, abs=1e-3)
    assert all(b <= a for a, b in zip(res.history, res.history[1:]))
    assert res.history[-1] == res.objective


def test_calibrate_respects_bounds(small_net):
    res = val.calibrate(small_net, _self_quotes(small_net, 0.4), "gbm", [0.1], bounds=[(0.05, 0.2)])
    assert 0.05 <= res.params.sigma <= 0.2


def test_calibrate_errors(small_net):
    with pytest.raises(ValueError, match="at least one quote"):
        val.calibrate(small_net, [], "gbm", [0.2])
    with pytest.raises(ValueError, match="outside bounds"):
        val.calibrate(small_net, _self_quotes(small_net, 0.2), "gbm", [0.9])
    with pytest.raises(ValueError, match="within"):
        val.calibrate(small_net, _self_quotes(small_net, 0.2), "gbm", [0.2], bounds=[(0.01, 0.3)])
