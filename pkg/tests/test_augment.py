import numpy as np
import pytest

from airforge.air import Air, find_direct_path, measure_drr, split_early_late
from airforge.augment import (
    AugmentReport,
    AugmentSpec,
    augment,
    augment_drr,
    augment_t60_fullband,
    augment_t60_subband,
    direct_window,
    solve_drr_gain,
)
from airforge.decay import T60_LN, compute_envelope, fit_decay_model
from airforge.errors import AnechoicInputError, NoSolutionError
from airforge.synth import synthetic_air

FS = 16000
ONSET = 0.0075


def eq5_residual(split, window, target_db, alpha):
    """Plug alpha back into the gain quadratic; relative residual."""
    he2 = split.early.samples**2
    a = np.sum(window**2 * he2)
    b = 2 * np.sum((1 - window) * window * he2)
    c = np.sum((1 - window) ** 2 * he2) - 10 ** (target_db / 10) * np.sum(
        split.late.samples**2
    )
    value = a * alpha**2 + b * alpha + c
    scale = max(a * alpha**2, abs(b) * alpha, abs(c))
    return abs(value) / scale


class TestSolveDrrGain:
    def test_current_target_gives_unit_gain(self, model_air):
        split = split_early_late(model_air)
        w = direct_window(len(model_air), FS, split.direct_index)
        current = measure_drr(split)
        alpha = solve_drr_gain(split.early, split.late, w, current)
        assert alpha == pytest.approx(1.0, abs=1e-9)

    def test_isolated_impulse_alpha_two(self):
        # early: single unit impulse where w == 1; late energy 1;
        # cross terms vanish so alpha^2 = 10^(target/10) * El / Ee = 4.
        n = 4000
        early = np.zeros(n)
        early[1000] = 1.0
        late = np.zeros(n)
        late[3000] = 1.0
        w = direct_window(n, FS, 1000)
        target = 10 * np.log10(4.0)  # 6.0206 dB
        alpha = solve_drr_gain(Air(early, FS), Air(late, FS), w, target)
        assert alpha == pytest.approx(2.0, abs=1e-12)

    def test_random_air_residual(self):
        air = synthetic_air(sample_rate=FS, duration=0.5, t60=0.4,
                            noise_floor_db=-60, seed=40)
        split = split_early_late(air)
        w = direct_window(len(air), FS, split.direct_index)
        alpha = solve_drr_gain(split.early, split.late, w, -3.0)
        assert eq5_residual(split, w, -3.0, alpha) < 1e-9

    def test_unreachable_target_raises_with_discriminant(self):
        air = synthetic_air(sample_rate=FS, duration=0.5, t60=0.4,
                            noise_floor_db=-60, seed=41)
        split = split_early_late(air)
        w = direct_window(len(air), FS, split.direct_index)
        with pytest.raises(NoSolutionError) as err:
            solve_drr_gain(split.early, split.late, w, -80.0)
        assert err.value.discriminant < 0


class TestAugmentDrr:
    def test_round_trip(self, model_air):
        out, report = augment_drr(model_air, 12.0)
        assert report.achieved_drr == pytest.approx(12.0, abs=0.1)
        assert not report.clipped

    def test_identity_at_current_drr(self, model_air):
        current = measure_drr(split_early_late(model_air))
        out, report = augment_drr(model_air, current)
        assert np.max(np.abs(out.samples - model_air.samples)) < 1e-9

    def test_clipped_when_late_field_would_win(self):
        weak = synthetic_air(sample_rate=FS, duration=0.6, t60=0.4,
                             noise_floor_db=-60, direct_factor=2.0, seed=42)
        out, report = augment_drr(weak, -20.0)
        assert report.clipped
        assert report.achieved_drr > -20.0
        split = split_early_late(out)
        assert abs(out.samples[split.direct_index]) >= np.max(np.abs(split.late.samples))

    def test_clip_invariant_in_report(self, model_air):
        out, report = augment_drr(model_air, 6.0)
        assert isinstance(report, AugmentReport)
        assert report.alpha is not None

    def test_preserves_direct_path_arrival(self, model_air):
        for target in (-6.0, 0.0, 6.0, 18.0):
            out, _ = augment_drr(model_air, target)
            assert find_direct_path(out) == find_direct_path(model_air)

    def test_late_field_bit_unchanged(self, model_air):
        out, _ = augment_drr(model_air, 9.0)
        before = split_early_late(model_air)
        after = split_early_late(out)
        np.testing.assert_array_equal(after.late.samples, before.late.samples)

    def test_no_discontinuity_at_window_edges(self, model_air):
        # local increments near the window edges stay comparable to the
        # input's own local variation (the crossfade motive)
        out, _ = augment_drr(model_air, 15.0)
        split = split_early_late(model_air)
        half = int(round(0.005 * FS / 2))
        for edge in (split.direct_index - half, split.direct_index + half):
            local_in = np.max(np.abs(np.diff(model_air.samples[edge - 8 : edge + 8])))
            local_out = np.max(np.abs(np.diff(out.samples[edge - 8 : edge + 8])))
            assert local_out <= 3 * local_in + 1e-12

    def test_anechoic_rejected(self):
        x = np.zeros(2000)
        x[50] = 1.0
        with pytest.raises(AnechoicInputError):
            augment_drr(Air(x, FS), 3.0)


class TestAugmentT60Subband:
    def test_identity_when_desired_equals_fitted(self, model_air):
        out = augment_t60_subband(model_air, 0.08, 0.08, ONSET)
        np.testing.assert_array_equal(out.samples, model_air.samples)

    @pytest.mark.parametrize("desired_tau", [0.2, 0.05])
    def test_refit_recovers_desired(self, desired_tau):
        fitted_tau = 0.1
        air = synthetic_air(sample_rate=FS, duration=1.2 * T60_LN * max(desired_tau, fitted_tau) + 0.3,
                            t60=T60_LN * fitted_tau, noise_floor_db=-200, seed=43)
        out = augment_t60_subband(air, fitted_tau, desired_tau, ONSET)
        model = fit_decay_model(compute_envelope(out), 1.0 / FS, onset=ONSET)
        assert model.tau == pytest.approx(desired_tau, rel=0.05)

    def test_pre_onset_samples_bit_unchanged(self, model_air):
        out = augment_t60_subband(model_air, 0.06, 0.12, ONSET)
        n_pre = int(np.ceil(ONSET * FS)) - 1
        np.testing.assert_array_equal(out.samples[:n_pre], model_air.samples[:n_pre])


class TestAugmentT60Fullband:
    def test_raise_t60(self):
        air = synthetic_air(sample_rate=FS, duration=0.7, t60=0.5,
                            noise_floor_db=-60, seed=44)
        out, report = augment_t60_fullband(air, 1.0, seed=3)
        assert report.achieved_t60 == pytest.approx(1.0, rel=0.07)

    def test_identity_target(self):
        air = synthetic_air(sample_rate=FS, duration=0.9, t60=0.6,
                            noise_floor_db=-60, seed=45)
        measured = fit_decay_model(compute_envelope(air), 1.0 / FS, onset=ONSET).t60()
        out, report = augment_t60_fullband(air, measured, seed=4)
        assert report.achieved_t60 == pytest.approx(measured, rel=0.03)

    def test_lower_t60(self):
        air = synthetic_air(sample_rate=FS, duration=1.4, t60=1.0,
                            noise_floor_db=-60, seed=46)
        out, report = augment_t60_fullband(air, 0.2, seed=5)
        assert report.achieved_t60 == pytest.approx(0.2, rel=0.07)

    def test_tail_extended_for_slow_targets(self):
        air = synthetic_air(sample_rate=FS, duration=0.7, t60=0.4,
                            noise_floor_db=-60, seed=47)
        out, _ = augment_t60_fullband(air, 1.5, seed=6)
        assert out.duration >= ONSET + 1.2 * 1.5

    def test_anechoic_rejected(self):
        x = np.zeros(FS)
        x[50] = 1.0
        with pytest.raises(AnechoicInputError):
            augment_t60_fullband(Air(x, FS), 0.5, seed=1)


class TestAugmentCombined:
    def test_joint_targets(self):
        air = synthetic_air(sample_rate=FS, duration=0.7, t60=0.45,
                            noise_floor_db=-60, seed=48)
        out, report = augment(air, AugmentSpec(target_t60=0.8, target_drr=3.0, seed=7))
        assert report.achieved_t60 == pytest.approx(0.8, rel=0.07)
        assert report.achieved_drr == pytest.approx(3.0, abs=0.1)

    def test_drr_only_leaves_t60(self):
        air = synthetic_air(sample_rate=FS, duration=0.9, t60=0.6,
                            noise_floor_db=-60, seed=49)
        before = fit_decay_model(compute_envelope(air), 1.0 / FS, onset=ONSET).t60()
        out, report = augment(air, AugmentSpec(target_drr=6.0, seed=8))
        assert report.achieved_t60 == pytest.approx(before, rel=0.03)

    def test_deterministic_for_fixed_seed(self):
        air = synthetic_air(sample_rate=FS, duration=0.6, t60=0.4,
                            noise_floor_db=-60, seed=50)
        spec = AugmentSpec(target_t60=0.7, target_drr=5.0, seed=123)
        out1, _ = augment(air, spec)
        out2, _ = augment(air, spec)
        np.testing.assert_array_equal(out1.samples, out2.samples)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            AugmentSpec()
        with pytest.raises(ValueError):
            AugmentSpec(target_t60=-1.0)
        with pytest.raises(ValueError):
            AugmentSpec(target_t60=11.0)
