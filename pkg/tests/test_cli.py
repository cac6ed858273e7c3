import numpy as np
import pytest
from click.testing import CliRunner

from namf.cli import main
from namf.image_io import load_image, save_image
from namf.noise import NoiseSpec, inject_sap


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def flat_pgm(tmp_path):
    path = tmp_path / "flat.pgm"
    save_image(np.full((32, 32), 128, dtype=np.uint8), path)
    return path


def test_inject_writes_noisy_image_and_mask(runner, flat_pgm, tmp_path):
    out = tmp_path / "noisy.pgm"
    mask = tmp_path / "mask.pgm"
    result = runner.invoke(main, [
        "inject", "-i", str(flat_pgm), "-d", "0.3", "--seed", "9",
        "-o", str(out), "--mask-output", str(mask),
    ])
    assert result.exit_code == 0, result.output
    noisy = load_image(out)
    assert noisy.shape == (32, 32)
    assert set(np.unique(load_image(mask))) <= {0, 255}
    assert "corrupted fraction" in result.output


def test_inject_rejects_bad_density(runner, flat_pgm, tmp_path):
    result = runner.invoke(main, [
        "inject", "-i", str(flat_pgm), "-d", "1.5", "-o", str(tmp_path / "x.pgm"),
    ])
    assert result.exit_code == 2
    assert "density must be in [0,1]" in result.output


def test_inject_missing_input(runner, tmp_path):
    result = runner.invoke(main, [
        "inject", "-i", str(tmp_path / "nope.pgm"), "-d", "0.1",
        "-o", str(tmp_path / "x.pgm"),
    ])
    assert result.exit_code == 2


def test_denoise_namf_roundtrip(runner, flat_pgm, tmp_path):
    img = load_image(flat_pgm)
    noisy, _ = inject_sap(img, NoiseSpec(0.3, seed=4))
    noisy_path = tmp_path / "noisy.pgm"
    save_image(noisy, noisy_path)
    out = tmp_path / "restored.pgm"
    mask = tmp_path / "detected.pgm"
    result = runner.invoke(main, [
        "denoise", "--method", "namf", "-i", str(noisy_path), "-o", str(out),
        "--dump-mask", str(mask), "--patch-radius", "1", "--search-radius", "3",
    ])
    assert result.exit_code == 0, result.output
    np.testing.assert_array_equal(load_image(out), img)
    assert load_image(mask).shape == (32, 32)


def test_denoise_mf(runner, flat_pgm, tmp_path):
    out = tmp_path / "mf.pgm"
    result = runner.invoke(main, [
        "denoise", "--method", "mf", "-i", str(flat_pgm), "-o", str(out),
    ])
    assert result.exit_code == 0, result.output
    assert load_image(out).shape == (32, 32)


def test_denoise_unknown_method(runner, flat_pgm, tmp_path):
    result = runner.invoke(main, [
        "denoise", "--method", "awmf", "-i", str(flat_pgm), "-o", str(tmp_path / "x.pgm"),
    ])
    assert result.exit_code == 2


def test_metrics_output(runner, flat_pgm):
    result = runner.invoke(main, [
        "metrics", "-r", str(flat_pgm), "-t", str(flat_pgm),
    ])
    assert result.exit_code == 0, result.output
    assert "psnr_db: inf" in result.output
    assert "ssim: 1.000000" in result.output


def test_sweep_from_config_file(runner, tmp_path, rng):
    img_path = tmp_path / "img.pgm"
    save_image(rng.integers(20, 236, (24, 24), dtype=np.uint8), img_path)
    csv_path = tmp_path / "rows.csv"
    config = tmp_path / "sweep.cfg"
    config.write_text(
        f"""
        # desk-scale smoke sweep
        images = {img_path}
        densities = 0.2,0.5
        methods = namf,mf
        seed = 11
        output_csv = {csv_path}
        patch_radius = 1
        search_radius = 3
        w_max = 3
        record_runtime = false
        """
    )
    result = runner.invoke(main, ["sweep", "--config", str(config)])
    assert result.exit_code == 0, result.output
    lines = [ln for ln in csv_path.read_text().splitlines() if not ln.startswith("#")]
    assert lines[0] == "image,method,alpha,psnr_db,ssim,runtime_ms,seed"
    assert len(lines) == 1 + 2 * 2  # header + densities x methods


def test_sweep_flag_overrides_config(runner, tmp_path, rng):
    img_path = tmp_path / "img.pgm"
    save_image(rng.integers(20, 236, (24, 24), dtype=np.uint8), img_path)
    config = tmp_path / "sweep.cfg"
    config.write_text(
        f"images = {img_path}\ndensities = 0.2\nmethods = mf\n"
        f"output_csv = {tmp_path / 'a.csv'}\n"
    )
    override_csv = tmp_path / "b.csv"
    result = runner.invoke(main, [
        "sweep", "--config", str(config), "--output-csv", str(override_csv),
        "--densities", "0.1,0.3,0.5",
    ])
    assert result.exit_code == 0, result.output
    assert override_csv.exists()
    lines = [ln for ln in override_csv.read_text().splitlines() if not ln.startswith("#")]
    assert len(lines) == 1 + 3


def test_sweep_requires_images(runner, tmp_path):
    result = runner.invoke(main, ["sweep", "--output-csv", str(tmp_path / "x.csv")])
    assert result.exit_code == 2
    assert "no input images" in result.output


def test_byte_identical_sweeps(runner, tmp_path, rng):
    img_path = tmp_path / "img.pgm"
    save_image(rng.integers(20, 236, (24, 24), dtype=np.uint8), img_path)
    args = [
        "sweep", "--images", str(img_path), "--densities", "0.3",
        "--methods", "mf", "--no-runtime",
    ]
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert runner.invoke(main, args + ["--output-csv", str(a)]).exit_code == 0
    assert runner.invoke(main, args + ["--output-csv", str(b)]).exit_code == 0
    assert a.read_bytes() == b.read_bytes()
