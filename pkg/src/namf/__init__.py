"""Salt-and-pepper image restoration: adaptive detection, mean filling,
and an impulse-adapted non-local means refinement, with metrics and a
benchmark harness."""

__version__ = "0.1.0"

from .detector import DetectionResult, DetectorParams, candidate_mask, detect
from .image_io import load_image, pad_reflect, save_image
from .median import median_filter
from .metrics import MetricReport, mse, psnr, ssim
from .nlm import NlmParams, nlm_restore_fast, nlm_restore_naive, smoothing_h
from .noise import NoiseSpec, inject_sap
from .pipeline import denoise, namf, quantize
from .stage1 import Stage1Output, adaptive_mean, restore_stage1
from .sweep import RunConfig, SweepRow, run_sweep

__all__ = [
    "DetectionResult", "DetectorParams", "MetricReport", "NlmParams",
    "NoiseSpec", "RunConfig", "Stage1Output", "SweepRow", "adaptive_mean",
    "candidate_mask", "denoise", "detect", "inject_sap", "load_image",
    "median_filter", "mse", "namf", "nlm_restore_fast", "nlm_restore_naive",
    "pad_reflect", "psnr", "quantize", "restore_stage1", "run_sweep",
    "save_image", "smoothing_h", "ssim",
]
