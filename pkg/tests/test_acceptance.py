"""Acceptance suite: one test per criterion, each printing a PASS line
with its measured numbers (run with -s to see them live)."""
import time

import numpy as np
import pytest

from airforge.air import Air, find_direct_path, measure_drr, split_early_late
from airforge.augment import AugmentSpec, augment, augment_drr, augment_t60_fullband, direct_window, solve_drr_gain
from airforge.dataset import (
    build_dataset,
    fit_calibration,
    generate_air_set,
    regenerate_row,
)
from airforge.decay import T60_LN, compute_envelope, fit_decay_model, remove_noise_floor
from airforge.errors import DecayFitError, NoSolutionError
from airforge.evaluate import evaluate
from airforge.filterbank import analyze, band_responses, design_filterbank, synthesize
from airforge.rng import generator
from airforge.synth import synthetic_air
from airforge.wavio import read_wav

FS = 16000
ONSET = 0.0075


@pytest.fixture(scope="module")
def acceptance_airs():
    """Three seeds x T60 {0.3, 0.6, 1.2} s, floor at -60 dB (sigma 1e-3)."""
    airs = []
    for t60 in (0.3, 0.6, 1.2):
        for seed in (101, 102, 103):
            airs.append(
                synthetic_air(
                    sample_rate=FS,
                    duration=max(0.6, 1.1 * t60),
                    t60=t60,
                    noise_floor_db=-60.0,
                    seed=seed,
                )
            )
    return airs


def test_t60_round_trip(acceptance_airs):
    """Augment to {0.2, 0.5, 1.0, 1.5} s; rel error <= 7% in >= 90% of cases,
    within 60 s total."""
    targets = (0.2, 0.5, 1.0, 1.5)
    t0 = time.time()
    errors = []
    for air in acceptance_airs:
        for target in targets:
            _, report = augment_t60_fullband(air, target, seed=7)
            errors.append(abs(report.achieved_t60 - target) / target)
    elapsed = time.time() - t0
    ok = sum(e <= 0.07 for e in errors)
    print(
        f"\nACCEPT t60-round-trip: {ok}/{len(errors)} within 7% "
        f"(worst {max(errors) * 100:.1f}%), {elapsed:.1f}s"
    )
    assert ok >= 0.9 * len(errors)
    assert elapsed <= 60.0


def test_drr_round_trip(acceptance_airs):
    """Targets {-6, 0, 6, 12, 18} dB: |err| <= 0.1 dB unclipped; clipped cases
    land above target with direct-path dominance. Within 10 s."""
    targets = (-6.0, 0.0, 6.0, 12.0, 18.0)
    # a sparse late field makes the dominance bound bind at the -6 dB target
    sparse = np.zeros(2000)
    sparse[80] = 1.0
    sparse[1000:1003] = 0.55
    t0 = time.time()
    checked = clipped_cases = 0
    for air in list(acceptance_airs) + [Air(sparse, FS)]:
        for target in targets:
            out, report = augment_drr(air, target)
            if report.clipped:
                clipped_cases += 1
                assert report.achieved_drr > target
                split = split_early_late(out)
                assert abs(out.samples[split.direct_index]) >= np.max(
                    np.abs(split.late.samples)
                )
            else:
                assert report.achieved_drr == pytest.approx(target, abs=0.1)
            assert find_direct_path(out) == find_direct_path(air)
            checked += 1
    elapsed = time.time() - t0
    print(
        f"\nACCEPT drr-round-trip: {checked} cases ({clipped_cases} clipped), "
        f"{elapsed:.1f}s"
    )
    assert elapsed <= 10.0


def test_quadratic_solve_oracle():
    """1000 random AIR/target pairs: plug-back residual < 1e-9; and
    target == measured implies alpha == 1 +- 1e-9."""
    pool = [
        synthetic_air(
            sample_rate=FS,
            duration=0.4,
            t60=0.25 + 0.05 * (k % 8),
            noise_floor_db=-60.0,
            direct_factor=3.0 + (k % 5) * 3.0,
            seed=500 + k,
        )
        for k in range(25)
    ]
    rng = generator(4040)
    worst = 0.0
    solved = 0
    for i in range(1000):
        air = pool[i % len(pool)]
        split = split_early_late(air)
        w = direct_window(len(air), FS, split.direct_index)
        target = float(rng.uniform(-12.0, 20.0))
        try:
            alpha = solve_drr_gain(split.early, split.late, w, target)
        except NoSolutionError:
            continue
        he2 = split.early.samples**2
        a = np.sum(w**2 * he2)
        b = 2 * np.sum((1 - w) * w * he2)
        c = np.sum((1 - w) ** 2 * he2) - 10 ** (target / 10) * np.sum(
            split.late.samples**2
        )
        residual = abs(a * alpha**2 + b * alpha + c) / max(
            a * alpha**2, abs(b) * alpha, abs(c)
        )
        worst = max(worst, residual)
        solved += 1
    # identity case per AIR
    for air in pool:
        split = split_early_late(air)
        w = direct_window(len(air), FS, split.direct_index)
        alpha = solve_drr_gain(split.early, split.late, w, measure_drr(split))
        assert alpha == pytest.approx(1.0, abs=1e-9)
    print(f"\nACCEPT quadratic-solve: {solved}/1000 solvable, worst residual {worst:.2e}")
    assert worst < 1e-9


def test_decay_fit_oracle():
    """Generate-and-refit grid passes >= 95%; floor removal pushes the fitted
    floor below -90 dB while moving tau <= 5%."""
    total = ok = 0
    for tau in (0.03, 0.07, 0.14, 0.22):
        for sigma_db in (-40.0, -60.0, -80.0):
            for seed in range(20):
                crossing = tau * np.log(10 ** (-sigma_db / 20.0))
                air = synthetic_air(
                    sample_rate=FS,
                    duration=crossing + 0.5,
                    t60=T60_LN * tau,
                    noise_floor_db=sigma_db,
                    seed=2000 + seed,
                )
                total += 1
                try:
                    model = fit_decay_model(compute_envelope(air), 1.0 / FS, onset=ONSET)
                except DecayFitError:
                    continue
                tau_ok = abs(model.tau - tau) / tau <= 0.05
                sig_ok = abs(20 * np.log10(model.noise_floor) - sigma_db) <= 3.0
                ok += tau_ok and sig_ok

    removals = removals_ok = 0
    for seed in range(5):
        air = synthetic_air(sample_rate=FS, duration=1.2, t60=0.5,
                            noise_floor_db=-60.0, seed=3000 + seed)
        model = fit_decay_model(compute_envelope(air), 1.0 / FS, onset=ONSET)
        cleaned = remove_noise_floor(air, model, seed=seed)
        refit = fit_decay_model(compute_envelope(cleaned), 1.0 / FS, onset=ONSET)
        removals += 1
        removals_ok += (
            20 * np.log10(refit.noise_floor) < -90.0
            and abs(refit.tau - model.tau) / model.tau <= 0.05
        )
    print(
        f"\nACCEPT decay-fit: grid {ok}/{total} ({ok / total * 100:.1f}%), "
        f"floor removal {removals_ok}/{removals}"
    )
    assert ok >= 0.95 * total
    assert removals_ok == removals


def test_filterbank_gates():
    """Power sum flat within 1 dB over 100 Hz-6 kHz; analyze->synthesize
    changes a synthetic AIR's T60 by < 2%."""
    spec = design_filterbank(FS)
    freqs = np.geomspace(100.0, 6000.0, 2048)
    total_db = 10 * np.log10(band_responses(spec, freqs).sum(axis=0))
    ripple = float(np.max(np.abs(total_db)))

    air = synthetic_air(sample_rate=FS, duration=1.0, t60=0.5,
                        noise_floor_db=-70.0, seed=4000)
    back = synthesize(analyze(air, spec))
    t60_in = fit_decay_model(compute_envelope(air), 1.0 / FS, onset=ONSET).t60()
    t60_out = fit_decay_model(compute_envelope(back), 1.0 / FS, onset=ONSET).t60()
    change = abs(t60_out - t60_in) / t60_in
    print(
        f"\nACCEPT filterbank: ripple {ripple:.2e} dB, round-trip T60 change "
        f"{change * 100:.3f}%"
    )
    assert ripple <= 1.0
    assert change < 0.02


def test_balance(tmp_path):
    """2 seed AIRs x 200 augmentations, uniform targets: 10-bin histograms of
    achieved labels within +-30% of uniform expectation."""
    seeds = [
        synthetic_air(sample_rate=FS, duration=0.9, t60=0.4, noise_floor_db=-60, seed=21),
        synthetic_air(sample_rate=FS, duration=1.0, t60=0.7, noise_floor_db=-60, seed=22),
    ]
    pool = generate_air_set(seeds, 200, (0.1, 1.5), (-6.0, 18.0), seed=38)
    assert len(pool) == 400
    t60s = np.array([r.label_t60 for r in pool])
    drrs = np.array([r.label_drr for r in pool])
    h_t60, _ = np.histogram(t60s, bins=10, range=(0.1, 1.5))
    h_drr, _ = np.histogram(drrs, bins=10, range=(-6.0, 18.0))
    expected = len(pool) / 10
    print(f"\nACCEPT balance: T60 bins {h_t60.tolist()}, DRR bins {h_drr.tolist()} "
          f"(gate [{0.7 * expected:.0f}, {1.3 * expected:.0f}])")
    assert h_t60.min() >= 0.7 * expected and h_t60.max() <= 1.3 * expected
    assert h_drr.min() >= 0.7 * expected and h_drr.max() <= 1.3 * expected


def test_calibration():
    """Post-calibration bias < 1e-12; known affine distortion recovered."""
    rng = generator(5050)
    estimates = rng.uniform(0.1, 1.4, 300)
    labels = 1.31 * estimates - 0.22 + 0.03 * rng.standard_normal(300)
    cal = fit_calibration(estimates, labels)
    bias = float(np.mean(cal.apply(estimates) - labels))

    exact = fit_calibration(estimates, 2.0 * estimates + 3.0)
    print(
        f"\nACCEPT calibration: residual bias {abs(bias):.2e}, affine recovery "
        f"slope {exact.slope:.12f} intercept {exact.intercept:.12f}"
    )
    assert abs(bias) < 1e-12
    assert exact.slope == pytest.approx(2.0, abs=1e-12)
    assert exact.intercept == pytest.approx(3.0, abs=1e-12)


def test_determinism(tmp_path):
    """Any manifest row regenerates to a bit-identical WAV from its recipe."""
    config = {
        "sample_rate": FS,
        "master_seed": 4321,
        "speech": {"mode": "synthetic", "speakers": 2, "files_per_speaker": 1,
                   "file_seconds": 16.0},
        "noise": {"mode": "synthetic", "files": 2, "file_seconds": 16.0},
        "airs": {"mode": "synthetic", "count": 2, "t60_range": [0.3, 0.6]},
        "augmentations_per_air": 2,
        "mixes_per_segment": 2,
        "t60_range": [0.2, 1.0],
        "drr_range": [-6.0, 18.0],
        "snr_range": [-5.0, 20.0],
        "partitions": {"train": 0.5, "val": 0.5},
    }
    out = tmp_path / "ds"
    manifest = build_dataset(config, out)
    for row in manifest.rows:
        regen = regenerate_row(out, row).samples.astype(np.float32)
        stored = read_wav(out / row.file).samples.astype(np.float32)
        assert np.array_equal(regen, stored)
    print(f"\nACCEPT determinism: {len(manifest.rows)}/{len(manifest.rows)} rows bit-identical")


def test_evaluation_identities():
    """The three closed-form cases plus the variance decomposition."""
    s = evaluate([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert (s.bias, s.mse) == (0.0, 0.0) and s.pearson == pytest.approx(1.0, abs=1e-12)

    labels = np.array([-1.0, 0.0, 1.0])
    assert evaluate(-labels, labels).pearson == pytest.approx(-1.0, abs=1e-12)

    labels = np.array([0.2, 0.5, 0.9, 1.3])
    s = evaluate(labels + 0.5, labels)
    assert s.bias == pytest.approx(0.5, abs=1e-12)
    assert s.mse == pytest.approx(0.25, abs=1e-12)
    assert s.pearson == pytest.approx(1.0, abs=1e-12)

    rng = generator(6060)
    e = rng.uniform(0, 1, 400)
    l = rng.uniform(0, 1, 400)
    s = evaluate(e, l)
    decomposition = s.bias**2 + float(np.var(e - l))
    rel = abs(s.mse - decomposition) / s.mse
    print(f"\nACCEPT evaluation: identities ok, decomposition rel err {rel:.2e}")
    assert rel < 1e-12
