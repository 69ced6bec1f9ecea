"""Acceptance checks for the whole package.

One test per criterion; each prints a single `ACCEPTANCE nn PASS/FAIL`
line (run `pytest -s tests/test_acceptance.py` to see them all) and
asserts the same condition.  The heavy lens-pattern fill pair is shared
between the adjacency and the order-comparison checks.
"""

import json
import os
import time

import numpy as np
import pytest

from fse3d.cli import main as cli_main
from fse3d.core import (
    CLS_EXCLUDED,
    CLS_KNOWN,
    CLS_RECON,
    CLS_TARGET,
    KNOWN,
    RECONSTRUCTED,
    UNKNOWN,
    ExtrapolationWindow,
    FseParams,
    extract_window,
    partition,
)
from fse3d.fse import build_weights, model_fd, model_sd
from fse3d.metrics import psnr_over_holes, ssim_frame
from fse3d.patterns import gen_lenses
from fse3d.scheduler import complete_batch, init_counts, next_batch, run_fill
from fse3d.video_io import RawVideoSpec, write_mask, write_volume

from conftest import hole_mask, textured_volume


def report(num, ok, detail):
    print(f"\nACCEPTANCE {num:02d} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, f"criterion {num}: {detail}"


def window_corpus(n_windows=100, seed=2024):
    """Random interior 8^3 windows (cube 4, border 2) with 10-50% unknown
    samples plus some previously reconstructed ones."""
    rng = np.random.default_rng(seed)
    params = FseParams(cube_edge=4, border=2, max_iterations=20)
    corpus = []
    for _ in range(n_windows):
        shape = (16, 16, 16)
        volume = rng.uniform(0.0, 255.0, size=shape)
        unknown_frac = rng.uniform(0.1, 0.5)
        mask = np.where(rng.random(shape) < unknown_frac, UNKNOWN, KNOWN).astype(np.uint8)
        recon = (mask == KNOWN) & (rng.random(shape) < 0.15)
        mask[recon] = RECONSTRUCTED
        mask[5, 5, 5] = UNKNOWN  # keep the target cube non-empty
        grid = partition(volume, mask, 4)
        corpus.append(extract_window(volume, mask, grid, (1, 1, 1), params))
    return corpus, params


def manual_window(classes, signal=None):
    classes = np.asarray(classes, dtype=np.uint8)
    if signal is None:
        signal = np.zeros(classes.shape)
    return ExtrapolationWindow(
        cube_index=(0, 0, 0),
        signal=np.asarray(signal, dtype=np.float64),
        classes=classes,
        cube_window=(slice(14, 18),) * 3,
        cube_volume=(slice(0, 4),) * 3,
    )


@pytest.fixture(scope="module")
def lens_case():
    """Textured 128x128x16 sequence with a seeded lens-pattern mask,
    filled once in each processing order."""
    shape = (16, 128, 128)
    volume = textured_volume(shape)
    mask = gen_lenses(shape, count=8, seed=1)
    params = FseParams(max_iterations=50)
    opt = run_fill(volume, mask, params, order="opt")
    ls = run_fill(volume, mask, params, order="ls")
    return volume, mask, opt, ls


def test_01_model_paths_agree_on_random_windows():
    corpus, params = window_corpus()
    worst = 0.0
    for window in corpus:
        weights = build_weights(window, params)
        fd_model, _ = model_fd(window, weights, params)
        sd_model, _ = model_sd(window, weights, params)
        scale = max(1.0, float(np.abs(window.signal).max()))
        worst = max(worst, float(np.max(np.abs(fd_model - sd_model))) / scale)
    ok = worst <= 1e-6
    report(1, ok, f"max scaled |fd - sd| = {worst:.3e} over {len(corpus)} windows (limit 1e-06)")


def test_02_constant_signal_closed_form():
    worst = 0.0
    for c in (1.0, 100.0, 255.0):
        for iters in (1, 3, 10):
            classes = np.full((32, 32, 32), CLS_KNOWN, dtype=np.uint8)
            classes[14:18, 14:18, 14:18] = CLS_TARGET
            window = manual_window(classes, signal=np.full((32, 32, 32), c))
            params = FseParams(max_iterations=iters)
            model, _ = model_fd(window, build_weights(window, params), params)
            expected = c * (1.0 - 0.5 ** iters)
            rel = float(np.max(np.abs(model.real - expected))) / expected
            rel = max(rel, float(np.max(np.abs(model.imag))) / expected)
            worst = max(worst, rel)
    ok = worst <= 1e-9
    report(2, ok, f"max relative deviation from c*(1-(1-gamma)^v) = {worst:.3e} (limit 1e-09)")


def test_03_processing_order_traces():
    volume = np.zeros((12, 12, 12))

    # (a) single interior hole cube: one batch, exactly that cube
    mask = hole_mask(volume.shape, (slice(4, 8),) * 3)
    state = init_counts(partition(volume, mask, 4))
    batches = []
    while True:
        batch = next_batch(state)
        if not batch:
            break
        batches.append(batch)
        complete_batch(state, batch)
    single_ok = batches == [[(1, 1, 1)]]

    # (b) interior 3x3x3 hole block: first batch is the 8 corners at
    # count 7; the block center lands in the final batch
    volume5 = np.zeros((20, 20, 20))
    mask5 = hole_mask(volume5.shape, (slice(4, 16),) * 3)
    state5 = init_counts(partition(volume5, mask5, 4))
    corners = sorted((t, y, x) for t in (1, 3) for y in (1, 3) for x in (1, 3))
    n_min = int(state5.counts[state5.counts >= 0].min())
    first = next_batch(state5)
    block_ok = sorted(first) == corners and n_min == 7
    while True:
        complete_batch(state5, first)
        nxt = next_batch(state5)
        if not nxt:
            break
        first = nxt
    block_ok = block_ok and state5.timestamps[2, 2, 2] == len(state5.batches) - 1

    # (c) boundary compensation of isolated cubes
    expected = {(0, 0, 0): 19, (0, 0, 1): 15, (1, 1, 0): 9}
    bonus_ok = True
    for index, value in expected.items():
        m = hole_mask(volume.shape)
        grid0 = partition(volume, m, 4)
        m[grid0.cube_slices(index)] = UNKNOWN
        st = init_counts(partition(volume, m, 4))
        bonus_ok = bonus_ok and int(st.counts[index]) == value

    ok = single_ok and block_ok and bonus_ok
    report(
        3,
        ok,
        f"single-cube batch {single_ok}, block corners first + center last {block_ok}, "
        f"corner/edge/side counts 19/15/9 {bonus_ok}",
    )


def test_04_no_adjacent_cubes_share_a_batch(lens_case):
    _, _, opt, _ = lens_case
    pairs = 0
    violations = 0
    for batch in opt.state.batches:
        if len(batch) < 2:
            continue
        arr = np.asarray(batch)
        cheb = np.abs(arr[:, None, :] - arr[None, :, :]).max(axis=2)
        iu = np.triu_indices(len(batch), k=1)
        pairs += len(iu[0])
        violations += int((cheb[iu] <= 1).sum())
    ok = violations == 0
    report(
        4,
        ok,
        f"{violations} adjacent same-batch pairs among {pairs} pairs "
        f"in {len(opt.state.batches)} batches",
    )


def test_05_parallel_fills_are_byte_identical(tmp_path):
    shape = (8, 48, 48)
    in_path = str(tmp_path / "in.raw")
    write_volume(textured_volume(shape), RawVideoSpec(path=in_path, width=48, height=48))
    mask_path = str(tmp_path / "mask.raw")
    write_mask(gen_lenses(shape, count=2, spatial_radius=10.0, temporal_radius=2.0, seed=3), mask_path)

    outputs = []
    for label, threads in [("1", 1), ("4", 4), ("max", os.cpu_count() or 1)]:
        out_path = str(tmp_path / f"out_{label}.raw")
        report_path = str(tmp_path / f"report_{label}.json")
        rc = cli_main([
            "fill", "--in", in_path, "--mask", mask_path, "--out", out_path,
            "--w", "48", "--h", "48", "--order", "opt",
            "--threads", str(threads), "--iterations", "30",
            "--report", report_path,
        ])
        assert rc == 0
        with open(out_path, "rb") as fh:
            volume_bytes = fh.read()
        with open(report_path, "rb") as fh:
            report_bytes = fh.read()
        outputs.append((volume_bytes, report_bytes))

    volumes_equal = outputs[0][0] == outputs[1][0] == outputs[2][0]
    reports_equal = outputs[0][1] == outputs[1][1] == outputs[2][1]
    ok = volumes_equal and reports_equal
    report(
        5,
        ok,
        f"threads 1/4/max -> volumes byte-identical {volumes_equal}, "
        f"reports identical {reports_equal}",
    )


def test_06_optimized_order_at_least_as_good_as_line_scan(lens_case):
    volume, mask, opt, ls = lens_case
    psnr_opt = psnr_over_holes(volume, opt.volume, mask)
    psnr_ls = psnr_over_holes(volume, ls.volume, mask)
    gain = psnr_opt - psnr_ls
    ok = gain >= 0.0
    report(
        6,
        ok,
        f"PSNR over holes: opt {psnr_opt:.2f} dB vs ls {psnr_ls:.2f} dB "
        f"(gain {gain:+.3f} dB, required >= 0)",
    )


def test_07_weighted_residual_energy_never_increases():
    corpus, params = window_corpus()
    worst_rise = 0.0
    for window in corpus:
        weights = build_weights(window, params)
        _, state = model_fd(window, weights, params, track_residuals=True)
        energy = state.trace.weighted_energy
        for prev, nxt in zip(energy, energy[1:]):
            worst_rise = max(worst_rise, (nxt - prev) / max(1.0, prev))
    ok = worst_rise <= 1e-9
    report(
        7,
        ok,
        f"max relative energy rise {worst_rise:.3e} over {len(corpus)} windows "
        f"x {params.max_iterations} iterations (limit 1e-09)",
    )


def test_08_weight_spot_values():
    expected = 0.7 ** np.sqrt(0.75)
    classes = np.full((32, 32, 32), CLS_KNOWN, dtype=np.uint8)
    w_known = build_weights(manual_window(classes), FseParams()).values[15, 15, 15]

    classes_r = classes.copy()
    classes_r[15, 15, 15] = CLS_RECON
    w_recon = build_weights(manual_window(classes_r), FseParams()).values[15, 15, 15]

    classes_b = classes.copy()
    classes_b[7, 21, 3] = CLS_EXCLUDED
    w_excluded = build_weights(manual_window(classes_b), FseParams()).values[7, 21, 3]

    known_ok = abs(w_known - expected) <= 1e-5
    recon_ok = abs(w_recon - 0.5 * expected) <= 1e-5
    excluded_ok = w_excluded == 0.0
    ok = known_ok and recon_ok and excluded_ok
    report(
        8,
        ok,
        f"w(15,15,15) known {w_known:.8f} (expected {expected:.8f}), "
        f"reconstructed {w_recon:.8f}, non-support {w_excluded}",
    )


def test_09_metric_spot_values():
    shape = (2, 24, 24)
    original = np.zeros(shape)
    mask = hole_mask(shape, (slice(None), slice(4, 12), slice(4, 12)))
    reconstructed = original.copy()
    reconstructed[mask == UNKNOWN] = 16.0
    psnr = psnr_over_holes(original, reconstructed, mask)
    psnr_ok = abs(psnr - 24.05) <= 0.01

    frame = textured_volume((1, 32, 32))[0]
    ssim = ssim_frame(frame, frame)
    ssim_ok = ssim == 1.0
    ok = psnr_ok and ssim_ok
    report(
        9,
        ok,
        f"constant error 16 -> PSNR {psnr:.4f} dB (24.05 +- 0.01), "
        f"identical frames -> SSIM {ssim} (exactly 1.0)",
    )


def test_10_end_to_end_smoke():
    shape = (16, 48, 48)
    volume = np.full(shape, 128.0)
    mask = hole_mask(shape, (slice(8, 12), slice(20, 24), slice(20, 24)))
    start = time.perf_counter()
    result = run_fill(volume, mask, FseParams())
    elapsed = time.perf_counter() - start
    holes = mask == UNKNOWN
    max_err = float(np.max(np.abs(result.volume[holes] - 128.0)))
    filled = not (result.mask == UNKNOWN).any()
    ok = filled and max_err <= 0.5 and elapsed < 1.0
    report(
        10,
        ok,
        f"4^3 hole in constant volume: max |fill - 128| = {max_err:.3g} "
        f"(limit 0.5), {elapsed * 1000:.0f} ms (limit 1000 ms), defaults",
    )
