"""Smoke tests for the python bindings: metrics, config handling, the
synthetic-data oracle, and a desk-scale train/translate round trip."""

import math

import numpy as np
import pytest

import rcgan


def tiny_config(seed=7):
    cfg = rcgan.TrainConfig()
    cfg.image_size = 16
    cfg.gen_width = 4
    cfg.dis_width = 4
    cfg.rmi_width = 3
    cfg.feat_width = 3
    cfg.n_rmi = 1
    cfg.seed = seed
    cfg.epochs = 1
    cfg.checkpoint_every = 1
    cfg.sample_every = 1
    return cfg


# --- module surface --------------------------------------------------------


def test_version_and_exports():
    assert rcgan.__version__ == "1.0.0"
    for name in rcgan.__all__:
        assert hasattr(rcgan, name), name


# --- metrics ----------------------------------------------------------------


def test_mse_matches_numpy():
    rng = np.random.default_rng(0)
    a = rng.uniform(0.0, 255.0, size=(3, 8, 8))
    b = rng.uniform(0.0, 255.0, size=(3, 8, 8))
    assert rcgan.mse(a, b) == pytest.approx(np.mean((a - b) ** 2), rel=1e-12)


def test_psnr_fixed_points():
    img = np.full((3, 8, 8), 100.0)
    assert math.isinf(rcgan.psnr(img, img))
    assert rcgan.psnr(np.zeros((8, 8)), np.full((8, 8), 255.0)) == pytest.approx(0.0)
    # One unit of MSE against an 8-bit peak.
    a = np.zeros((1, 8, 8))
    b = np.ones((1, 8, 8))
    assert rcgan.psnr(a, b) == pytest.approx(20 * math.log10(255.0), abs=1e-9)


def test_ssim_fixed_points_and_modes():
    rng = np.random.default_rng(1)
    img = rng.uniform(0.0, 255.0, size=(3, 16, 16))
    assert rcgan.ssim(img, img) == pytest.approx(1.0)
    assert rcgan.ssim(img, img, mode="global") == pytest.approx(1.0)
    noisy = np.clip(img + rng.normal(0, 25, size=img.shape), 0.0, 255.0)
    assert rcgan.ssim(img, noisy) < 1.0
    with pytest.raises(ValueError):
        rcgan.ssim(img, img, mode="fancy")
    with pytest.raises(ValueError):
        rcgan.ssim(img, img, gray="blue-only")


def test_metric_input_validation():
    with pytest.raises(ValueError):
        rcgan.psnr(np.zeros((3, 8, 8)), np.zeros((3, 4, 4)))  # shape mismatch
    with pytest.raises(ValueError):
        rcgan.mse(np.full((3, 8, 8), -5.0), np.zeros((3, 8, 8)))  # out of range


# --- config -----------------------------------------------------------------


def test_config_defaults_match_published_recipe():
    cfg = rcgan.TrainConfig()
    assert cfg.epochs == 400
    assert cfg.lr_gen == pytest.approx(1e-4)
    assert cfg.lr_dis == pytest.approx(8e-5)
    assert cfg.lr_gen > cfg.lr_dis
    assert cfg.adam_beta1 == pytest.approx(0.5)
    assert cfg.adam_beta2 == pytest.approx(0.999)
    assert cfg.decay_epoch_half == 200
    assert cfg.decay_epoch_quarter == 300
    assert cfg.suppression_ratio == 3
    assert cfg.use_labels is True
    assert cfg.activation == "sigmoid"
    cfg.validate()


def test_config_serialization_round_trip(tmp_path):
    cfg = tiny_config()
    cfg.activation = "leakyrelu"
    text = rcgan.serialize_config(cfg)
    path = tmp_path / "run.cfg"
    path.write_text(text)
    back = rcgan.load_config_file(path)
    assert rcgan.serialize_config(back) == text
    assert back.activation == "leakyrelu"
    assert back.image_size == 16


def test_config_validation_errors():
    cfg = tiny_config()
    cfg.image_size = 30  # not divisible by 4
    with pytest.raises(ValueError):
        cfg.validate()
    with pytest.raises(ValueError):
        cfg.activation = "swish"
    with pytest.raises(OSError):
        rcgan.load_config_file("/nonexistent/run.cfg")


# --- synthetic data ---------------------------------------------------------


def test_synthesize_rain_is_additive_and_seeded():
    rng = np.random.default_rng(2)
    bg = rng.uniform(0.0, 255.0, size=(3, 32, 32))
    out = rcgan.synthesize_rain(bg, intensity="medium", seed=5)
    rain, mask = out["rain"], out["mask"]
    assert rain.shape == (3, 32, 32)
    assert mask.shape == (1, 32, 32)
    assert mask.min() >= 0.0 and mask.max() <= 1.0
    assert mask.max() > 0.0  # some rain was painted
    # Additive composition, clamped at white.
    expected = np.clip(bg + 255.0 * mask, 0.0, 255.0)
    assert np.allclose(rain, expected, atol=1e-9)

    again = rcgan.synthesize_rain(bg, intensity="medium", seed=5)
    assert np.array_equal(rain, again["rain"])
    other = rcgan.synthesize_rain(bg, intensity="medium", seed=6)
    assert not np.array_equal(rain, other["rain"])

    # Heavier settings brighten the same geometry.
    heavy = rcgan.synthesize_rain(bg, intensity="heavy", seed=5)
    assert heavy["mask"].mean() > mask.mean()
    with pytest.raises(ValueError):
        rcgan.synthesize_rain(bg, intensity="sunny")


def test_dataset_round_trip_and_png_identity(tmp_path):
    root = tmp_path / "data"
    manifest = rcgan.make_synthetic_dataset(root, n_per_class=2, size=16, seed=3)
    assert manifest["counts"] == {"sunny": 2, "light": 2, "medium": 2, "heavy": 2}
    assert manifest["n_pairs"] == 6
    assert manifest["warnings"] == []

    loaded = rcgan.load_dataset(root, role="test")
    assert loaded["n_pairs"] == 6
    with pytest.raises(ValueError):
        rcgan.load_dataset(tmp_path / "missing", role="train")

    # The PNGs on disk obey the additive identity byte for byte.
    sunny = rcgan.read_png(root / "sunny" / "img_0000.png")
    for cls in ("light", "medium", "heavy"):
        rain = rcgan.read_png(root / cls / f"img_0000.png")
        mask = rcgan.read_png(root / "masks" / f"img_0000_{cls}.png")
        assert np.array_equal(rain, np.minimum(sunny + mask, 255.0))


def test_png_round_trip(tmp_path):
    img = np.round(np.random.default_rng(3).uniform(0.0, 255.0, size=(3, 8, 8)))
    path = tmp_path / "x.png"
    rcgan.write_png(path, img)
    assert np.array_equal(rcgan.read_png(path), img)
    with pytest.raises(OSError):
        rcgan.read_png(tmp_path / "missing.png")


# --- training and inference --------------------------------------------------


def test_train_steps_smoke():
    rows = rcgan.train_steps(tiny_config(), n_steps=4)
    assert [r["step"] for r in rows] == [1, 2, 3, 4]
    for r in rows:
        for key in ("dis", "gen", "cycle", "ident_m", "ident_f", "total"):
            assert math.isfinite(r[key]), key
        assert r["total"] > 0.0
    # Default suppression ratio 3: the discriminator moves on step 3 only.
    assert [r["updated_discriminator"] for r in rows] == [False, False, True, False]

    again = rcgan.train_steps(tiny_config(), n_steps=4)
    assert [r["total"] for r in again] == [r["total"] for r in rows]


def test_train_translate_evaluate_round_trip(tmp_path):
    root = tmp_path / "data"
    rcgan.make_synthetic_dataset(root, n_per_class=2, size=16, seed=3)

    result = rcgan.train(tiny_config(), root, tmp_path / "run")
    assert result["epochs"] == 1
    assert result["global_step"] == 6  # 6 rain images, one pass
    assert math.isfinite(result["losses"]["total"])
    ckpt = result["checkpoint"]
    assert ckpt.endswith("ckpt_epoch_0001.ckpt")

    rain = rcgan.read_png(root / "medium" / "img_0000.png")
    derained = rcgan.translate(ckpt, rain, direction="derain")
    assert derained.shape == rain.shape
    assert derained.min() >= 0.0 and derained.max() <= 255.0
    assert np.array_equal(derained, rcgan.translate(ckpt, rain, direction="derain"))

    sunny = rcgan.read_png(root / "sunny" / "img_0000.png")
    heavy = rcgan.translate(ckpt, sunny, direction="generate", intensity="heavy")
    light = rcgan.translate(ckpt, sunny, direction="generate", intensity="light")
    assert not np.array_equal(heavy, light)  # conditioning reaches the output
    with pytest.raises(ValueError):
        rcgan.translate(ckpt, sunny, direction="sideways")

    report = rcgan.evaluate_pairs(root / "light", root / "light")
    assert report["complete"] is True
    assert len(report["pairs"]) == 2
    assert math.isinf(report["psnr_mean"])
    assert report["ssim_mean"] == pytest.approx(1.0)
