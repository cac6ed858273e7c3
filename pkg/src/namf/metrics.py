"""Image fidelity metrics: MSE, PSNR and SSIM."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .image_io import as_gray

_C1 = (0.01 * 255) ** 2
_C2 = (0.03 * 255) ** 2
_SSIM_WINDOW = 11
_SSIM_SIGMA = 1.5


@dataclass
class MetricReport:
    """MSE / PSNR / SSIM triple, optionally with a runtime measurement."""

    mse: float
    psnr_db: float
    ssim: float
    runtime_ms: float | None = None


def _check_pair(u, v) -> tuple[np.ndarray, np.ndarray]:
    u, v = as_gray(u), as_gray(v)
    if u.shape != v.shape:
        raise ValueError(f"image dimensions differ: {u.shape} vs {v.shape}")
    return u, v


def mse(u, v) -> float:
    """Mean squared pixel difference."""
    u, v = _check_pair(u, v)
    diff = u.astype(np.float64) - v.astype(np.float64)
    return float(np.mean(diff * diff))


def psnr(u, v) -> float:
    """Peak signal-to-noise ratio in dB; ``math.inf`` for identical images."""
    m = mse(u, v)
    if m == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0**2 / m)


def _ssim_kernel() -> np.ndarray:
    r = _SSIM_WINDOW // 2
    ax = np.arange(-r, r + 1, dtype=np.float64)
    g = np.exp(-(ax**2) / (2.0 * _SSIM_SIGMA**2))
    k = np.outer(g, g)
    return k / k.sum()


def _local_means(a: np.ndarray) -> np.ndarray:
    # Separable Gaussian, then crop to windows fully inside the image, so
    # the boundary mode never leaks into the result.
    r = _SSIM_WINDOW // 2
    ax = np.arange(-r, r + 1, dtype=np.float64)
    g = np.exp(-(ax**2) / (2.0 * _SSIM_SIGMA**2))
    g /= g.sum()
    out = ndimage.correlate1d(a, g, axis=0, mode="nearest")
    out = ndimage.correlate1d(out, g, axis=1, mode="nearest")
    return out[r:-r, r:-r]


def ssim(u, v, global_stats: bool = False) -> float:
    """Structural similarity index.

    Default: mean over sliding 11x11 Gaussian-weighted (sigma 1.5) local
    windows, with stabilizers ``(0.01*255)^2`` and ``(0.03*255)^2``.
    ``global_stats=True`` instead evaluates the formula once with
    whole-image statistics.
    """
    u, v = _check_pair(u, v)
    uf = u.astype(np.float64)
    vf = v.astype(np.float64)

    if global_stats:
        mu_u, mu_v = uf.mean(), vf.mean()
        var_u, var_v = uf.var(), vf.var()
        cov = float(np.mean((uf - mu_u) * (vf - mu_v)))
        num = (2 * mu_u * mu_v + _C1) * (2 * cov + _C2)
        den = (mu_u**2 + mu_v**2 + _C1) * (var_u + var_v + _C2)
        return float(num / den)

    if min(u.shape) < _SSIM_WINDOW:
        raise ValueError(
            f"image {u.shape} smaller than the {_SSIM_WINDOW}x{_SSIM_WINDOW} SSIM window"
        )
    mu_u = _local_means(uf)
    mu_v = _local_means(vf)
    e_uu = _local_means(uf * uf)
    e_vv = _local_means(vf * vf)
    e_uv = _local_means(uf * vf)
    var_u = e_uu - mu_u * mu_u
    var_v = e_vv - mu_v * mu_v
    cov = e_uv - mu_u * mu_v
    num = (2 * mu_u * mu_v + _C1) * (2 * cov + _C2)
    den = (mu_u * mu_u + mu_v * mu_v + _C1) * (var_u + var_v + _C2)
    return float(np.mean(num / den))


def report(reference, restored, runtime_ms: float | None = None,
           ssim_global: bool = False) -> MetricReport:
    """Bundle all metrics for a (reference, restored) pair."""
    return MetricReport(
        mse=mse(reference, restored),
        psnr_db=psnr(reference, restored),
        ssim=ssim(reference, restored, global_stats=ssim_global),
        runtime_ms=runtime_ms,
    )
