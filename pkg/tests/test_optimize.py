"""Differential evolution core plus the sensor-design wrapper."""

import numpy as np
import pytest

from cascade_sensor.lattice import SensorConfig, SidePolicy, staggered_schedule
from cascade_sensor.optimize import (
    DEConfig,
    FreeParameterSpec,
    NoDistinguishableDesignError,
    OptimizationResult,
    de_minimize,
    optimize_sensor,
)

TWO_PI = 2.0 * np.pi


def sphere(v):
    return float(v @ v)


def rastrigin(v):
    return float(10.0 * v.size + np.sum(v * v - 10.0 * np.cos(TWO_PI * v)))


def small_sensor(n=2, t=0.5, m=2, r=0.0, alpha=2.0, policy=SidePolicy.BIDIRECTIONAL):
    return SensorConfig(
        n_phases=n,
        transmissions=(t,) * (n - 1),
        sensing_phases=tuple(0.4 + 0.3 * i for i in range(n)),
        reference_phases=(0.0,) * n,
        pulses=staggered_schedule(n, m, policy, alpha=alpha, r=r),
    )


class TestDEConfig:
    def test_defaults_are_valid(self):
        de = DEConfig()
        assert de.resolved_population(4) == 60

    def test_explicit_population_wins(self):
        assert DEConfig(population_size=7).resolved_population(100) == 7

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"population_size": 3},
            {"mutation_factor": 0.0},
            {"mutation_factor": 2.5},
            {"crossover_rate": 1.5},
            {"crossover_rate": -0.1},
            {"max_generations": 0},
            {"tolerance": -1e-9},
        ],
    )
    def test_rejects_bad_hyperparameters(self, kwargs):
        with pytest.raises(ValueError):
            DEConfig(**kwargs)


class TestDeMinimize:
    def test_sphere_converges(self):
        res = de_minimize(sphere, [(-5.0, 5.0)] * 5, DEConfig(max_generations=300))
        assert res.best_objective < 1e-10

    def test_rastrigin_multimodal(self):
        # 4-dimensional Rastrigin has ~9^4 local minima; a healthy global
        # optimizer should reach the basin of 0 from any seed given budget
        wins = 0
        for seed in range(10):
            res = de_minimize(
                rastrigin,
                [(-5.12, 5.12)] * 4,
                DEConfig(max_generations=500, tolerance=0.0, seed=seed),
            )
            wins += res.best_objective < 1e-6
        assert wins >= 9

    def test_periodic_dimension_crosses_seam(self):
        # minimum at 6.2, reachable across the 2pi wrap without walking
        # the whole box
        res = de_minimize(
            lambda v: 1.0 - np.cos(v[0] - 6.2),
            [(0.0, TWO_PI)],
            DEConfig(max_generations=200),
            periodic=[True],
        )
        assert res.best_objective < 1e-12
        assert res.best_params[0] == pytest.approx(6.2, abs=1e-5)

    def test_same_seed_same_everything(self):
        runs = [
            de_minimize(rastrigin, [(-5.12, 5.12)] * 3, DEConfig(max_generations=50, seed=42))
            for _ in range(2)
        ]
        assert runs[0] == runs[1]

    def test_trace_never_increases(self):
        res = de_minimize(rastrigin, [(-5.12, 5.12)] * 3, DEConfig(max_generations=80, seed=1))
        trace = np.asarray(res.convergence_trace)
        assert np.all(np.diff(trace) <= 0)
        assert res.generations_run == len(trace) - 1
        assert res.best_objective == trace[-1]

    def test_result_never_worse_than_seed(self):
        guess = [0.3, -0.2, 0.1]
        res = de_minimize(
            sphere,
            [(-5.0, 5.0)] * 3,
            DEConfig(max_generations=1, seed=5),
            initial_guesses=[guess],
        )
        assert res.best_objective <= sphere(np.asarray(guess)) + 1e-15

    def test_zero_tolerance_disables_stagnation_stop(self):
        flat = lambda v: 1.0
        res = de_minimize(flat, [(0.0, 1.0)], DEConfig(max_generations=100, tolerance=0.0))
        assert res.generations_run == 100
        res = de_minimize(flat, [(0.0, 1.0)], DEConfig(max_generations=100))
        assert res.generations_run < 100

    def test_rejects_empty_bounds(self):
        with pytest.raises(ValueError):
            de_minimize(sphere, [], DEConfig())

    def test_rejects_inverted_bounds(self):
        with pytest.raises(ValueError):
            de_minimize(sphere, [(1.0, -1.0)], DEConfig())

    def test_rejects_infinite_bounds(self):
        with pytest.raises(ValueError):
            de_minimize(sphere, [(0.0, np.inf)], DEConfig())

    def test_rejects_misshapen_guess(self):
        with pytest.raises(ValueError):
            de_minimize(sphere, [(-1.0, 1.0)] * 2, DEConfig(), initial_guesses=[[0.1]])


class TestFreeParameterSpec:
    def test_needs_at_least_one_group(self):
        with pytest.raises(ValueError):
            FreeParameterSpec(
                pulse_theta=False,
                pulse_chi=False,
                reference_phases=False,
                uniform_transmission=False,
            )

    def test_dimension_counts_each_group(self):
        config = small_sensor(n=2, m=3)
        free = FreeParameterSpec(uniform_transmission=True)
        # 3 thetas + 3 chis + 2 references + 1 shared transmission
        assert free.dimension(config) == 9
        assert len(free.bounds(config)) == 9

    def test_tied_angles_collapse_to_one_each(self):
        config = small_sensor(n=2, m=3)
        free = FreeParameterSpec(tied_pulse_angles=True)
        assert free.dimension(config) == 4

    def test_transmission_dimension_is_not_periodic(self):
        config = small_sensor(n=2, m=2)
        free = FreeParameterSpec(uniform_transmission=True)
        mask = free.periodic_mask(config)
        assert mask[-1] == False  # noqa: E712
        assert mask[:-1].all()
        assert free.bounds(config)[-1] == (0.001, 0.999)

    def test_initial_vector_wraps_angles(self):
        config = small_sensor(m=1)
        config = SensorConfig(
            n_phases=config.n_phases,
            transmissions=config.transmissions,
            sensing_phases=config.sensing_phases,
            reference_phases=(-0.5, 7.0),
            pulses=config.pulses,
        )
        free = FreeParameterSpec(pulse_theta=False, pulse_chi=False, reference_phases=True)
        vec = free.initial_vector(config)
        assert ((0.0 <= vec) & (vec < TWO_PI)).all()
        np.testing.assert_allclose(vec, [(-0.5) % TWO_PI, 7.0 % TWO_PI])

    def test_apply_roundtrips_through_vector(self):
        config = small_sensor(n=2, m=2)
        free = FreeParameterSpec(uniform_transmission=True)
        vec = free.initial_vector(config)
        rebuilt = free.apply(config, vec)
        assert rebuilt.reference_phases == config.reference_phases
        assert [p.theta for p in rebuilt.pulses] == [p.theta for p in config.pulses]

    def test_apply_broadcasts_tied_angles(self):
        config = small_sensor(n=2, m=3)
        free = FreeParameterSpec(tied_pulse_angles=True)
        new = free.apply(config, [1.1, 2.2, 0.3, 0.4])
        assert all(p.theta == 1.1 for p in new.pulses)
        assert all(p.chi == 2.2 for p in new.pulses)
        assert new.reference_phases == (0.3, 0.4)

    def test_apply_checks_vector_length(self):
        config = small_sensor(n=2, m=2)
        with pytest.raises(ValueError):
            FreeParameterSpec().apply(config, [0.1, 0.2])


class TestOptimizeSensor:
    def test_reference_tuning_saturates_coherent_bound(self):
        # one segment, both-sided probing: at the right reference phase the
        # total variance hits 1/(4 alpha^2)
        alpha = 3.0
        config = SensorConfig(
            n_phases=1,
            transmissions=(),
            sensing_phases=(0.4,),
            reference_phases=(0.0,),
            pulses=staggered_schedule(1, 2, SidePolicy.BIDIRECTIONAL, alpha=alpha),
        )
        free = FreeParameterSpec(pulse_theta=False, pulse_chi=False, reference_phases=True)
        _best, fres = optimize_sensor(config, free, DEConfig(max_generations=60, seed=2))
        assert fres.total_variance == pytest.approx(1.0 / (4.0 * alpha**2), rel=1e-8)

    def test_single_input_prefers_interior_transmission(self):
        # probing two segments through one port: too transparent and the
        # phases degenerate, too reflective and segment 2 sees no light,
        # so the optimum sits strictly inside (0, 1)
        config = small_sensor(n=2, t=0.5, m=1, alpha=40.0, policy=SidePolicy.LEFT_ONLY)
        free = FreeParameterSpec(
            pulse_theta=True, pulse_chi=False, reference_phases=True, uniform_transmission=True
        )
        best, fres = optimize_sensor(config, free, DEConfig(max_generations=80, seed=9))
        t = best.transmissions[0]
        assert 0.55 < t < 0.62
        assert fres.total_variance is not None

    def test_squeezing_buys_variance_ratio(self):
        # both-sided two-segment probe at low transmission: squeezing at
        # r=1 divides the optimized total variance by about e^2
        def optimized(r):
            config = small_sensor(n=2, t=0.02, m=2, r=r, alpha=40.0)
            free = FreeParameterSpec(
                pulse_theta=True, pulse_chi=(r > 0), reference_phases=True
            )
            _, fres = optimize_sensor(config, free, DEConfig(max_generations=80, seed=13))
            return fres.total_variance

        ratio = optimized(1.0) / optimized(0.0)
        assert ratio == pytest.approx(np.exp(-2.0), rel=0.02)

    def test_full_result_appends_raw_record(self):
        config = small_sensor(m=2)
        free = FreeParameterSpec(pulse_theta=True, pulse_chi=False, reference_phases=True)
        best, fres, raw = optimize_sensor(
            config, free, DEConfig(max_generations=20, seed=4), full_result=True
        )
        assert isinstance(raw, OptimizationResult)
        assert raw.best_objective == pytest.approx(fres.total_variance, rel=1e-9)
        assert free.apply(config, raw.best_params) == best

    def test_degenerate_box_raises(self):
        # fixed T=1 chain: every reference-phase candidate leaves the two
        # phases indistinguishable
        config = small_sensor(n=2, t=1.0, m=2)
        free = FreeParameterSpec(pulse_theta=False, pulse_chi=False, reference_phases=True)
        with pytest.raises(NoDistinguishableDesignError):
            optimize_sensor(config, free, DEConfig(max_generations=5, seed=0))

    def test_rejects_empty_pulse_train(self):
        config = SensorConfig(
            n_phases=1,
            transmissions=(),
            sensing_phases=(0.4,),
            reference_phases=(0.0,),
            pulses=(),
        )
        with pytest.raises(ValueError):
            optimize_sensor(config, FreeParameterSpec(), DEConfig())
