"""End-to-end restoration pipelines and the method registry."""

from __future__ import annotations

import numpy as np

from .detector import DetectorParams
from .image_io import as_float_image, as_gray
from .median import median_filter
from .nlm import NlmParams, nlm_restore_fast
from .stage1 import Stage1Output, restore_stage1


def quantize(z) -> np.ndarray:
    """Clamp to [0, 255] and round half away from zero to 8 bits."""
    z = as_float_image(z)
    return np.floor(np.clip(z, 0.0, 255.0) + 0.5).astype(np.uint8)


def namf(img, detector_params: DetectorParams | None = None,
         nlm_params: NlmParams | None = None) -> np.ndarray:
    """Full two-stage restoration of a noisy image.

    Adaptive-window detection and mean replacement first, then the
    impulse-adapted non-local means refinement of the flagged pixels;
    quantization happens once, at the very end.
    """
    out, _ = namf_with_mask(img, detector_params, nlm_params)
    return out


def namf_with_mask(img, detector_params: DetectorParams | None = None,
                   nlm_params: NlmParams | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Like :func:`namf`, additionally returning the detection mask."""
    img = as_gray(img)
    stage1: Stage1Output = restore_stage1(img, detector_params or DetectorParams())
    refined = nlm_restore_fast(stage1.z, stage1.noisy, nlm_params or NlmParams())
    return quantize(refined), stage1.noisy


def denoise(img, method: str, detector_params: DetectorParams | None = None,
            nlm_params: NlmParams | None = None) -> tuple[np.ndarray, np.ndarray | None]:
    """Run a registered method (``namf`` or ``mf``) on ``img``.

    Returns ``(restored, mask)``; the mask is None for methods without a
    detection stage.
    """
    if method == "namf":
        return namf_with_mask(img, detector_params, nlm_params)
    if method == "mf":
        return median_filter(img), None
    raise ValueError(f"unknown method {method!r}, expected one of: namf, mf")


METHODS = ("namf", "mf")
