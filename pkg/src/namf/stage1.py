"""First restoration pass: adaptive-mean replacement of detected pixels.

Runs in raster order (row-major, top-left to bottom-right). A detected
pixel whose adaptive window holds at least one mid-range pixel is replaced
by the mean of the window's noiseless pixels. A pixel whose window is all
extremes falls back to the mean of its three preceding neighbors in the
partially restored image, which raster order guarantees are already final.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .detector import DetectionResult, DetectorParams, detect
from .image_io import as_float_image, as_gray, as_mask

# Fallback value when even the three preceding neighbors are unrestored
# noise, which can only happen near the top-left corner at extreme density.
_FALLBACK_GRAY = 128.0


@dataclass
class Stage1Output:
    """Initially restored image plus the detection maps that produced it."""

    z: np.ndarray
    noisy: np.ndarray
    w_used: np.ndarray


def _reflect_index(idx: int, n: int) -> int:
    if idx < 0:
        return -idx
    if idx >= n:
        return 2 * n - 2 - idx
    return idx


def adaptive_mean(y, z, noisy_mask, i: int, j: int, w: int) -> float:
    """Replacement value for the detected pixel at (i, j).

    If the (2w+1)^2 window around (i, j) contains any mid-range pixel, the
    value is the mean of the window pixels not marked noisy (reflect-padded
    window, raw noisy-image values). Otherwise it is the mean of
    ``z[i-1, j-1]``, ``z[i-1, j]`` and ``z[i, j-1]`` (indices reflected at
    the borders), which must already hold restored values.
    """
    y = as_gray(y)
    z = as_float_image(z)
    noisy_mask = as_mask(noisy_mask, like=y)
    if not noisy_mask[i, j]:
        raise AssertionError(f"adaptive_mean called on a pixel not marked noisy at ({i}, {j})")

    yp = np.pad(y, w, mode="reflect")
    win = yp[i : i + 2 * w + 1, j : j + 2 * w + 1]
    if np.any((win != 0) & (win != 255)):
        lp = np.pad(noisy_mask, w, mode="reflect")
        lwin = lp[i : i + 2 * w + 1, j : j + 2 * w + 1]
        clean = ~lwin
        return float(win[clean].sum() / np.count_nonzero(clean))

    h_, w_ = y.shape
    neighbors = [(i - 1, j - 1), (i - 1, j), (i, j - 1)]
    vals = [z[_reflect_index(a, h_), _reflect_index(b, w_)] for a, b in neighbors]
    return float(sum(vals) / 3.0)


def _window_means(y: np.ndarray, noisy: np.ndarray, radii: list[int], w_max: int,
                  w_used: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Noiseless-window means for every target pixel, per its own radius."""
    pad = w_max
    yp = np.pad(y.astype(np.int64), pad, mode="reflect")
    cleanp = np.pad(~noisy, pad, mode="reflect").astype(np.int64)
    vals = np.zeros(y.shape)

    def integral(a):
        out = np.zeros((a.shape[0] + 1, a.shape[1] + 1), dtype=np.int64)
        np.cumsum(np.cumsum(a, axis=0), axis=1, out=out[1:, 1:])
        return out

    inum = integral(yp * cleanp)
    iden = integral(cleanp)
    h, wd = y.shape
    for w in radii:
        sel = targets & (w_used == w)
        if not sel.any():
            continue
        r0, r1 = pad - w, pad + w + 1
        num = (
            inum[r1 : r1 + h, r1 : r1 + wd]
            - inum[r0 : r0 + h, r1 : r1 + wd]
            - inum[r1 : r1 + h, r0 : r0 + wd]
            + inum[r0 : r0 + h, r0 : r0 + wd]
        )
        den = (
            iden[r1 : r1 + h, r1 : r1 + wd]
            - iden[r0 : r0 + h, r1 : r1 + wd]
            - iden[r1 : r1 + h, r0 : r0 + wd]
            + iden[r0 : r0 + h, r0 : r0 + wd]
        )
        vals[sel] = num[sel] / den[sel]
    return vals


def restore_stage1(y, params: DetectorParams | None = None,
                   detection: DetectionResult | None = None) -> Stage1Output:
    """Detect and mean-restore every noisy pixel of ``y`` in one raster pass.

    Output is identical to the fully sequential pass: the windowed means
    depend only on the noisy image and the detection mask, so they are
    precomputed with integral images; only images containing all-extreme
    windows need the explicit raster loop for the three-neighbor fallback.
    """
    y = as_gray(y)
    if params is None:
        params = DetectorParams()
    det = detection if detection is not None else detect(y, params)

    z = y.astype(np.float64)
    mean_branch = det.noisy & det.has_noiseless
    fallback = det.noisy & ~det.has_noiseless
    means = _window_means(y, det.noisy, params.radii(), params.w_max, det.w_used, mean_branch)

    if not fallback.any():
        z[mean_branch] = means[mean_branch]
        return Stage1Output(z=z, noisy=det.noisy, w_used=det.w_used)

    h, wd = y.shape
    processed = ~det.noisy
    for idx in np.flatnonzero(det.noisy.ravel()):
        i, j = divmod(int(idx), wd)
        if det.has_noiseless[i, j]:
            z[i, j] = means[i, j]
        else:
            ns = [
                (_reflect_index(i - 1, h), _reflect_index(j - 1, wd)),
                (_reflect_index(i - 1, h), _reflect_index(j, wd)),
                (_reflect_index(i, h), _reflect_index(j - 1, wd)),
            ]
            if all(not processed[a, b] for a, b in ns):
                z[i, j] = _FALLBACK_GRAY
            else:
                z[i, j] = (z[ns[0]] + z[ns[1]] + z[ns[2]]) / 3.0
        processed[i, j] = True
    return Stage1Output(z=z, noisy=det.noisy, w_used=det.w_used)
