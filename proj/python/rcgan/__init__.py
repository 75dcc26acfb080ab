"""Conditional cycle-consistent rain translation.

Thin Python surface over the C++ core: image quality metrics (PSNR/SSIM),
synthetic paired rain data, the full training loop, and checkpoint-driven
single-image translation.
"""

from rcgan._core import (
    ConfigError,
    IoError,
    NumericError,
    TrainConfig,
    __version__,
    evaluate_pairs,
    load_config_file,
    load_dataset,
    make_synthetic_dataset,
    mse,
    psnr,
    read_png,
    serialize_config,
    ssim,
    synthesize_rain,
    train,
    train_steps,
    translate,
    write_png,
)

__all__ = [
    "ConfigError",
    "IoError",
    "NumericError",
    "TrainConfig",
    "__version__",
    "evaluate_pairs",
    "load_config_file",
    "load_dataset",
    "make_synthetic_dataset",
    "mse",
    "psnr",
    "read_png",
    "serialize_config",
    "ssim",
    "synthesize_rain",
    "train",
    "train_steps",
    "translate",
    "write_png",
]
