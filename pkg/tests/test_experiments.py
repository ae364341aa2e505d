import math

import numpy as np
import pytest
from pydantic import ValidationError

from app.core.domains import ModelHolder, RegularPolygon, UnitDisk
from app.core.errors import ConfigError, InadmissibleRegimeError, RhoOutOfRangeError
from app.models.schemas import ExperimentConfig, ExperimentParameters, FitResult
from app.services import experiments, families
from app.services.experiments import GrowthModel, fit_growth, make_record
from app.services.runner import exit_status, run_experiment, run_tasks, task_rng

NS = [2, 4, 8, 16, 32, 64]


class TestFits:
    def test_power_law_is_recovered(self):
        fit = fit_growth(NS, [3.0 * n ** 2 for n in NS], "power")
        assert fit.slope == pytest.approx(2.0)
        assert fit.constant == pytest.approx(3.0)
        assert fit.r2 == pytest.approx(1.0)

    def test_linear_models(self):
        fit = fit_growth(NS, [0.5 * math.log(n) + 1.0 for n in NS], GrowthModel.LOG)
        assert (fit.slope, fit.constant) == (pytest.approx(0.5), pytest.approx(1.0))
        fit = fit_growth(NS, [2.0 * math.sqrt(math.log(n)) for n in NS], GrowthModel.SQRT_LOG)
        assert fit.slope == pytest.approx(2.0)
        fit = fit_growth(NS, [math.log(n) ** 1.5 for n in NS], GrowthModel.LOG_POWER)
        assert fit.slope == pytest.approx(1.5)

    def test_fit_rejects_bad_input(self):
        with pytest.raises(ValueError):
            fit_growth([1, 2], [1.0, 2.0], "power")
        with pytest.raises(ValueError):
            fit_growth([1, 3, 2], [1.0, 2.0, 3.0], "power")
        with pytest.raises(ValueError):
            fit_growth([1, 2, 3], [1.0, -2.0, 3.0], "power")
        with pytest.raises(ValueError):
            fit_growth([1, 2, 3], [1.0, 2.0, 3.0], "exponential")

    def test_classify_growth(self):
        model, fit = experiments.classify_growth(NS, [float(n) for n in NS])
        assert model == GrowthModel.POWER and fit.slope == pytest.approx(1.0)
        model, _ = experiments.classify_growth(NS, [1.0] * len(NS))
        assert model == GrowthModel.CONSTANT

    def test_running_growth(self):
        growth, running = experiments.running_growth([1.0, 2.0, 1.5, 2.0])
        assert running == [1.0, 2.0, 2.0, 2.0]
        assert growth == 0.0
        assert experiments.running_growth([1.0, 1.0, 4.0])[0] == pytest.approx(3.0)


class TestRecords:
    def test_violation_uses_relative_tolerance(self):
        assert make_record("x", measured=1.1, bound=1.0, bound_tol=0.05).violation
        assert not make_record("x", measured=1.04, bound=1.0, bound_tol=0.05).violation
        assert not make_record("x", measured=5.0).violation
        assert make_record("x", measured=0.0, bound=1.0, violation=True).violation

    def test_fit_fills_columns(self):
        fit = FitResult(model="power", slope=0.5, constant=2.0, r2=0.99)
        record = make_record("x", fit=fit, n=3)
        assert (record.fit_slope, record.fit_const, record.r2, record.n) == (0.5, 2.0, 0.99, 3)
        assert record.extras["model"] == "power"

    def test_exit_status(self):
        assert exit_status(0, 0) == 0
        assert exit_status(1, 5) == 2
        assert exit_status(0, 1) == 3

    def test_exponent_tolerance(self):
        assert experiments.exponent_tolerance(0.0) == pytest.approx(0.15)
        assert experiments.exponent_tolerance(2.0) == pytest.approx(0.3)


def test_requires_seed():
    params = ExperimentParameters()
    assert experiments.requires_seed("verify-theorem1", params)
    assert experiments.requires_seed("lemma1", params)
    assert not experiments.requires_seed("lemma1", ExperimentParameters(g_family=["zero"]))
    assert not experiments.requires_seed("lower-bound", params)
    assert experiments.requires_seed("lower-bound", ExperimentParameters(strategy="random_signs"))
    assert not experiments.requires_seed("theorem4", params)
    assert experiments.requires_seed("theorem4", ExperimentParameters(family="random_blaschke_in_w"))
    assert not experiments.requires_seed("selftest", params)


def test_config_needs_seed_for_random_runs():
    with pytest.raises(ValidationError):
        ExperimentConfig(experiment="verify-theorem1")
    with pytest.raises(ValidationError):
        ExperimentConfig(experiment="theorem4", parameters={"bogus": 1})
    assert ExperimentConfig(experiment="selftest").parameters.seed is None


def test_task_rng_is_keyed_by_seed_and_index():
    a = task_rng(5, 3).random(4)
    assert np.array_equal(a, task_rng(5, 3).random(4))
    assert not np.array_equal(a, task_rng(5, 4).random(4))


def test_run_tasks_keeps_order():
    assert run_tasks(abs, [-1, -2, 3]) == [1, 2, 3]
    assert run_tasks(abs, [-4, 5, -6, 7], jobs=2) == [4, 5, 6, 7]


class TestTheorem1:
    def test_bound_and_split(self):
        assert experiments.theorem1_bound(1) == pytest.approx(math.pi)
        assert experiments.theorem1_bound(math.e ** 4) == pytest.approx(3.0 * math.pi)
        assert experiments.theorem1_split(1) == 0.0
        assert experiments.theorem1_split(4) == pytest.approx(math.sqrt(0.75))

    def test_small_sweep(self):
        records = experiments.verify_theorem1_upper([2, 8], 2, "uniform_disk", seed=7, tol=1e-6)
        assert [r.n for r in records] == [2, 2, 8, 8]
        for r in records:
            assert not r.violation
            assert r.converged
            assert r.extras["inner"] + r.extras["outer"] == pytest.approx(r.measured)
            assert r.extras["outer"] <= r.extras["outer_bound"] + 1e-6
        again = experiments.verify_theorem1_upper([2, 8], 2, "uniform_disk", seed=7, tol=1e-6)
        assert [r.measured for r in again] == [r.measured for r in records]

    def test_needs_seed(self):
        with pytest.raises(ConfigError):
            experiments.verify_theorem1_upper([2], 1, "uniform_disk", seed=None)


class TestLowerBound:
    @staticmethod
    def fake_task(task):
        # I(B_m) = 2 sqrt(log m) + 0.5
        _, j, *_ = task
        m = 4 ** (j + 1) - 1
        value = 2.0 * math.sqrt(math.log(m)) + 0.5
        extras = {"j_max": j, "ratio_to_sqrt_log": value / math.sqrt(math.log(m))}
        return make_record("lower-bound", n=m, measured=value, extras=extras), 1.0

    def test_summary_reports_fitted_constant(self, monkeypatch):
        monkeypatch.setattr(experiments, "_lower_bound_task", self.fake_task)
        records = experiments.lower_bound_sweep([1, 2, 3])
        summary = records[-1]
        assert len(records) == 4
        assert not summary.violation
        assert summary.fit_slope == pytest.approx(2.0)
        assert summary.extras["fitted_lower_constant"] == pytest.approx(0.5)
        min_ratio = 2.0 + 0.5 / math.sqrt(math.log(255))
        assert summary.extras["min_ratio_to_sqrt_log"] == pytest.approx(min_ratio)
        assert summary.extras["fitted_lower_constant"] != pytest.approx(summary.extras["min_ratio_to_sqrt_log"])

    def test_too_few_points_leave_the_constant_unset(self, monkeypatch):
        monkeypatch.setattr(experiments, "_lower_bound_task", self.fake_task)
        summary = experiments.lower_bound_sweep([1, 2])[-1]
        assert summary.extras["fitted_lower_constant"] is None
        assert summary.extras["min_ratio_to_sqrt_log"] > 0.0


class TestLemmas:
    def test_lemma1_scaled_identity(self):
        g = experiments.schur_family("scaled_identity")
        records = experiments.lemma1_check([g], [2, 4, 16])
        assert [r.experiment for r in records] == ["lemma1.p", "lemma1.dg"] * 3
        assert records[0].bound is None
        p_record = records[2]
        assert p_record.measured == pytest.approx(0.99 * experiments.lemma1_radius(4), rel=1e-8)
        assert records[3].measured == pytest.approx(0.0, abs=1e-12)
        assert not any(r.violation for r in records)

    def test_lemma1_rejects_small_n(self):
        with pytest.raises(ValueError):
            experiments.lemma1_check([experiments.schur_family("zero")], [1])
        with pytest.raises(ConfigError):
            experiments.schur_family("scaled_blaschke")

    def test_lemma2_power(self):
        record = experiments.lemma2_check(families.power_blaschke(4), [0.5, 0.9])
        # mean of |4 z^3|^2 is 16 r^6; r = 0.5 is closest to its bound
        assert record.extras["r"] == 0.5
        assert record.measured == pytest.approx(0.25, abs=1e-10)
        assert record.bound == pytest.approx(8.0)
        assert not record.violation


class TestRegimes:
    def test_theorem5_regimes(self):
        disk = UnitDisk()
        assert experiments.theorem5_regime(disk, 1.0, 0.5).regime == 1
        regime = experiments.theorem5_regime(disk, 1.0, 0.0)
        assert (regime.regime, regime.model, regime.exponent) == (2, GrowthModel.LOG_POWER, 0.5)
        regime = experiments.theorem5_regime(disk, 2.0, 1.0)
        assert (regime.regime, regime.model) == (2, GrowthModel.CONSTANT)
        regime = experiments.theorem5_regime(disk, 3.0, 1.0)
        assert (regime.regime, regime.exponent) == (3, 1.0)

    def test_inadmissible_regimes(self):
        disk = UnitDisk()
        with pytest.raises(InadmissibleRegimeError):
            experiments.theorem5_regime(disk, 1.5, 0.0)
        with pytest.raises(InadmissibleRegimeError):
            experiments.theorem5_regime(disk, 0.5, 0.0)
        with pytest.raises(InadmissibleRegimeError):
            experiments.theorem5_regime(disk, 3.0, 0.5)
        with pytest.raises(InadmissibleRegimeError):
            experiments.theorem5_regime(RegularPolygon(4), 2.0, 1.0)
        with pytest.raises(InadmissibleRegimeError):
            experiments.dolzhenko_scaling(disk, 3.0, [1, 2, 4], "power_w_n")

    def test_weighted_regime_needs_hardy_exponent_above_one(self):
        class BarelyRectifiable(UnitDisk):
            def hp_finite(self, p):
                return p <= 1.0

        with pytest.raises(InadmissibleRegimeError) as info:
            experiments.theorem5_regime(BarelyRectifiable(), 2.0, 2.0)
        assert "gamma > 1" in str(info.value)
        regime = experiments.theorem5_regime(ModelHolder(0.9), 2.0, 2.0)
        assert regime.regime == 1
        assert "phi' in H^gamma, gamma > 1" in regime.hypotheses


class TestTheorem4:
    def test_disk_power(self):
        R = families.power_w_n(UnitDisk(), 4)
        record = experiments.theorem4_check(UnitDisk(), 3.0, 0.2, R)
        assert record.extras["method"] == "radial"
        assert record.extras["lhs_pow"] == pytest.approx(128.0 * 0.8 ** 11 / 11.0, rel=1e-6)
        assert record.bound == pytest.approx((4.0 / 0.2) ** (1.0 / 3.0), rel=1e-6)
        assert not record.violation

    def test_guards(self):
        R = families.power_w_n(UnitDisk(), 4)
        with pytest.raises(InadmissibleRegimeError):
            experiments.theorem4_check(UnitDisk(), 2.0, 0.2, R)
        with pytest.raises(RhoOutOfRangeError):
            experiments.theorem4_check(UnitDisk(), 3.0, 1.5, R)

    def test_square_uses_inner_polygon(self):
        square = RegularPolygon(4)
        R = families.boundary_pole_rational(square, 1)
        record = experiments.theorem4_check(square, 3.0, 0.1, R, tol=1e-6)
        assert record.extras["method"] == "inner_polygon"
        assert record.extras["sup"] == pytest.approx(1.0, abs=1e-9)
        assert not record.violation


def test_dolzhenko_disk_p1():
    records = experiments.dolzhenko_scaling(UnitDisk(), 1.0, [1, 2, 4, 8], "power_w_n", tol=1e-7)
    assert len(records) == 5
    for record, n in zip(records, [1, 2, 4, 8]):
        # int_D |n w^(n-1)| dA = 2n/(n+1)
        assert record.measured == pytest.approx(2.0 * n / (n + 1.0), rel=1e-5)
    summary = records[-1]
    assert summary.n is None
    assert not summary.violation


def test_theorem5_disk_constant_regime():
    records = experiments.theorem5_scaling(UnitDisk(), 2.0, 1.0, [1, 2, 4, 8], tol=1e-7)
    for record, n in zip(records, [1, 2, 4, 8]):
        # int_D |n w^(n-1)|^2 (1-|w|) dA = n / (2n + 1)
        assert record.measured == pytest.approx(n / (2.0 * n + 1.0), rel=1e-5)
    summary = records[-1]
    assert summary.extras["regime"] == 2
    assert summary.extras["predicted_model"] == "constant"


@pytest.mark.slow
def test_selftest_rows_pass():
    rows = experiments.selftest()
    assert rows
    failed = [row.name for row in rows if not row.passed]
    assert failed == []


def test_run_experiment_summary(results_dir):
    config = ExperimentConfig(
        experiment="verify-theorem1",
        parameters={"degrees": [2, 4], "seed": 3, "tol": 1e-6},
        output={"csv": "t1.csv", "summary": "t1.json"},
    )
    summary = run_experiment(config)
    assert summary.exit_code == 0
    assert len(summary.records) == 2
    assert summary.metadata["log"] == "natural"
    assert summary.metadata["jobs"] == 1
    assert (results_dir / "t1.csv").exists()
    assert (results_dir / "t1.json").exists()


def test_run_experiment_reports_violations():
    config = ExperimentConfig(experiment="lemma1", parameters={"degrees": [4, 8], "g_family": ["scaled_identity"],
                                                              "bound_tol": 0.0})
    summary = run_experiment(config)
    assert summary.violations == 0
    assert summary.exit_code == 0
    assert len(summary.records) == 4


def test_theorem3_disk_power():
    records = experiments.theorem3_scaling(UnitDisk(), [1, 2, 4, 8], tol=1e-7)
    assert [r.n for r in records] == [1, 2, 4, 8, None]
    assert all(r.experiment == "theorem3" for r in records)
    assert not records[-1].violation
    with pytest.raises(InadmissibleRegimeError):
        experiments.theorem3_scaling(RegularPolygon(4), [1, 2, 4])


def test_probe_records_are_non_normative():
    records = experiments.probe_open_peller(UnitDisk(), 1.5, [1, 2, 4], tol=1e-6)
    assert len(records) == 4
    assert all(r.extras["normative"] is False for r in records)
    assert not any(r.violation for r in records)
    with pytest.raises(InadmissibleRegimeError):
        experiments.probe_open_peller(UnitDisk(), 2.0, [1, 2])
