"""Tests for the Monte Carlo harness and its deterministic contracts."""

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from qeclab.errors import ALL_QUBITS, GeneralErrorParams, Placement
from qeclab.experiments import (
    ExperimentConfig,
    _trial_rng,
    fit_power_law,
    model_for,
    proliferation_experiment,
    run_trial,
    sensitivity_experiment,
    sweep_theta,
)


def rotation_config(**overrides) -> ExperimentConfig:
    fields = dict(
        code="steane7",
        error_kind="rotation",
        placement=ALL_QUBITS,
        theta_grid=(0.05,),
        trials=50,
        seed=0,
    )
    fields.update(overrides)
    return ExperimentConfig(**fields)


class TestExperimentConfig:
    def test_rejects_unknown_code(self):
        with pytest.raises(ValueError, match="unknown code"):
            rotation_config(code="shor8")

    def test_rejects_unknown_error_kind(self):
        with pytest.raises(ValueError, match="error kind"):
            rotation_config(error_kind="cosmic")

    def test_rejects_empty_grid(self):
        with pytest.raises(ValueError, match="empty"):
            rotation_config(theta_grid=())

    def test_rejects_unsorted_grid(self):
        with pytest.raises(ValueError, match="increasing"):
            rotation_config(theta_grid=(0.1, 0.05))

    def test_rejects_negative_theta(self):
        with pytest.raises(ValueError, match="finite"):
            rotation_config(theta_grid=(-0.1, 0.05))

    def test_rejects_zero_trials(self):
        with pytest.raises(ValueError, match="trials"):
            rotation_config(trials=0)

    def test_general_unitary_needs_params(self):
        with pytest.raises(ValueError, match="e1/e2"):
            rotation_config(error_kind="general_unitary")

    def test_model_for_flavors(self):
        rot = model_for(rotation_config(), 0.3)
        assert rot.kind == "rotation" and rot.params.theta == 0.3
        decay = model_for(rotation_config(error_kind="decay", decay_rate=0.7), 2.0)
        assert decay.params.lam == 0.7 and decay.params.t == 2.0
        gen = model_for(
            rotation_config(
                error_kind="general_unitary", general=GeneralErrorParams(1, 1)
            ),
            0.3,
        )
        assert gen.params == GeneralErrorParams(1, 1)
        flip = model_for(rotation_config(error_kind="bit_flip"), 0.3)
        assert flip.params is None


class TestRunTrial:
    def test_no_error_is_perfect(self):
        """theta = 0 gives infidelity exactly 0 and the 8-ket support."""
        config = rotation_config(code="shor9")
        infid, support = run_trial(config, 0.0, np.random.default_rng(0))
        assert infid == 0.0
        assert support == 8

    def test_single_qubit_rotation_is_fully_corrected(self):
        """Any rotation confined to one qubit is discretized and recovered."""
        rng = np.random.default_rng(9)
        for theta in (0.05, 0.7, 2.0):
            for qubit in (0, 4, 8):
                config = rotation_config(
                    code="shor9", placement=Placement.fixed([qubit])
                )
                infid, _ = run_trial(config, theta, rng)
                assert infid < 1e-9

    def test_steane_single_bit_flip_always_corrected(self):
        """Distance-3 Hamming correction, exhaustively over the 7 positions."""
        rng = np.random.default_rng(3)
        for qubit in range(7):
            config = rotation_config(
                error_kind="bit_flip", placement=Placement.fixed([qubit])
            )
            infid, _ = run_trial(config, 0.0, rng)
            assert infid < 1e-9
        sampled = rotation_config(error_kind="bit_flip", placement=Placement.fermi(1))
        for _ in range(25):
            infid, _ = run_trial(sampled, 0.0, rng)
            assert infid < 1e-9

    def test_infidelity_floor_eats_rounding_residue(self):
        config = rotation_config()
        infid, _ = run_trial(config, 0.0, np.random.default_rng(1))
        assert infid == 0.0


class TestSweepTheta:
    def test_same_seed_is_bit_identical(self):
        config = rotation_config(theta_grid=(0.02, 0.08), trials=40, seed=11)
        assert sweep_theta(config) == sweep_theta(config)

    def test_zero_grid_point_gives_zero_rows(self):
        config = rotation_config(theta_grid=(0.0,), trials=30)
        row = sweep_theta(config).rows[0]
        assert (
            row.mean_infid_coded,
            row.std_coded,
            row.mean_infid_uncoded,
            row.std_uncoded,
        ) == (0.0, 0.0, 0.0, 0.0)
        assert row.mean_support == 8.0

    def test_uncoded_baseline_matches_closed_form(self):
        """The bare qubit sees the rotation once: infidelity sin^2(theta/2)."""
        config = rotation_config(theta_grid=(0.3,), trials=20)
        row = sweep_theta(config).rows[0]
        assert row.mean_infid_uncoded == pytest.approx(
            math.sin(0.15) ** 2, abs=1e-12
        )
        assert row.std_uncoded == 0.0

    def test_trials_are_schedule_independent(self):
        """Recomputing trials out of order reproduces the sweep exactly."""
        config = rotation_config(theta_grid=(0.04, 0.09), trials=30, seed=5)
        result = sweep_theta(config)
        uncoded_config = dataclasses.replace(config, code="uncoded")

        def one(job):
            grid_index, trial = job
            theta = config.theta_grid[grid_index]
            coded, support = run_trial(
                config, theta, _trial_rng(config.seed, grid_index, trial, 0)
            )
            bare, _ = run_trial(
                uncoded_config, theta, _trial_rng(config.seed, grid_index, trial, 1)
            )
            return grid_index, coded, bare, support

        jobs = [(g, t) for g in range(2) for t in range(config.trials)]
        jobs.reverse()  # deliberately not the serial order
        with ThreadPoolExecutor(max_workers=4) as pool:
            outcomes = list(pool.map(one, jobs))
        for grid_index in range(2):
            coded = [c for g, c, _, _ in outcomes if g == grid_index]
            bare = [b for g, _, b, _ in outcomes if g == grid_index]
            supports = [s for g, _, _, s in outcomes if g == grid_index]
            row = result.rows[grid_index]
            assert row.mean_infid_coded == pytest.approx(np.mean(coded), abs=1e-15)
            assert row.mean_infid_uncoded == pytest.approx(np.mean(bare), abs=1e-15)
            assert row.mean_support == pytest.approx(np.mean(supports), abs=1e-15)

    @pytest.mark.slow
    @pytest.mark.parametrize("code", ["shor9", "steane7"])
    def test_coded_beats_uncoded_at_small_angles(self, code):
        """All-qubit rotation, theta = 0.05: correction reduces mean infidelity."""
        config = rotation_config(code=code, theta_grid=(0.05,), trials=10_000)
        row = sweep_theta(config).rows[0]
        assert row.mean_infid_coded < row.mean_infid_uncoded


class TestProliferation:
    def test_steane_rotated(self):
        assert proliferation_experiment("steane7", 0.01, 1e-12) == (8, 128)

    def test_steane_identity(self):
        assert proliferation_experiment("steane7", 0.0, 1e-12) == (8, 8)

    def test_shor_rotated(self):
        assert proliferation_experiment("shor9", 0.01, 1e-12) == (8, 512)


class TestSensitivity:
    def test_zero_angle_means_zero_damage(self):
        for p in (0.1, 0.5, 0.9):
            assert sensitivity_experiment(4, p, 0.0) == 0.0

    def test_concentrated_limit_matches_product_overlap(self):
        """As p -> 1 the damage approaches 1 - cos^(2n)(theta/2)."""
        n, theta = 5, 0.2
        got = sensitivity_experiment(n, 1.0 - 1e-12, theta)
        assert got == pytest.approx(1.0 - math.cos(theta / 2) ** (2 * n), abs=1e-5)

    def test_matches_closed_form_overlap(self):
        """Oracle: the rotated target amplitude has an explicit closed form."""
        n, theta = 4, 0.37
        dim = 1 << n
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        for p in (0.2, 0.55, 0.93):
            amp = math.sqrt(p) * c**n + math.sqrt((1 - p) / (dim - 1)) * (
                (c - s) ** n - c**n
            )
            expected = (p - amp * amp) / p
            assert sensitivity_experiment(n, p, theta) == pytest.approx(
                expected, abs=1e-12
            )

    def test_monotone_in_theta(self):
        for p in (0.3, 0.8):
            damages = [
                sensitivity_experiment(3, p, theta)
                for theta in np.linspace(0.0, math.pi / 4, 30)
            ]
            assert all(b >= a - 1e-12 for a, b in zip(damages, damages[1:]))

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError, match="n_qubits"):
            sensitivity_experiment(1, 0.5, 0.1)
        with pytest.raises(ValueError, match="probability"):
            sensitivity_experiment(4, 0.0, 0.1)
        with pytest.raises(ValueError, match="probability"):
            sensitivity_experiment(4, 1.0, 0.1)


class TestFitPowerLaw:
    def test_exact_quadratic(self):
        points = [(1e-3, 1e-6), (1e-2, 1e-4), (1e-1, 1e-2)]
        assert fit_power_law(points) == pytest.approx(2.0, abs=1e-12)

    def test_exact_quartic(self):
        points = [(1e-2, 1e-8), (1e-1, 1e-4)]
        assert fit_power_law(points) == pytest.approx(4.0, abs=1e-12)

    def test_recovers_planted_exponents(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            exponent = float(rng.uniform(0.5, 6.0))
            scale = float(rng.uniform(0.1, 10.0))
            thetas = np.geomspace(1e-3, 1e-1, 6)
            points = [(t, scale * t**exponent) for t in thetas]
            assert fit_power_law(points) == pytest.approx(exponent, abs=1e-9)

    def test_rejects_too_few_points(self):
        with pytest.raises(ValueError, match="at least 2"):
            fit_power_law([(0.1, 0.01)])

    def test_rejects_nonpositive_values(self):
        with pytest.raises(ValueError, match="positive"):
            fit_power_law([(0.1, 0.0), (0.2, 0.1)])
        with pytest.raises(ValueError, match="positive"):
            fit_power_law([(-0.1, 0.01), (0.2, 0.1)])

    def test_floor_points_are_excluded(self):
        """Values under 1e-13 drop out; the fit uses the remaining points."""
        points = [(1e-3, 1e-15), (1e-2, 1e-8), (1e-1, 1e-4)]
        assert fit_power_law(points) == pytest.approx(4.0, abs=1e-12)

    def test_all_floor_points_is_an_error(self):
        with pytest.raises(ValueError, match="floor"):
            fit_power_law([(1e-3, 1e-15), (1e-2, 1e-14)])
