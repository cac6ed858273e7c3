"""Adaptive-window salt-and-pepper noise detection.

A pixel valued exactly 0 or 255 is a noise candidate. Its square window is
grown from radius 1 until it contains a pixel that is neither 0 nor 255
(the candidate is then noisy) or the radius cap is reached. At the cap, the
proportion of window pixels sharing the candidate's value decides: a high
proportion means uniform texture (keep), a low one means noise (restore).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .image_io import as_gray


@dataclass(frozen=True)
class DetectorParams:
    """Tunables of the detection stage.

    ``w_max`` caps the window radius, ``w_step`` is the radius increment of
    the growth loop, and ``t`` is the texture-proportion threshold: a
    candidate whose full-size window has no mid-range pixel is kept as
    noiseless only when more than a fraction ``t`` of the window shares its
    value.
    """

    w_max: int = 7
    w_step: int = 1
    t: float = 0.8

    def __post_init__(self):
        if not 1 <= self.w_step <= self.w_max:
            raise ValueError(f"need 1 <= w_step <= w_max, got {self.w_step}, {self.w_max}")
        if not 0.0 <= self.t <= 1.0:
            raise ValueError(f"threshold must be in [0, 1], got {self.t}")

    def radii(self) -> list[int]:
        """The window radii visited by the growth loop, ending at ``w_max``."""
        out = [1]
        while out[-1] < self.w_max:
            out.append(min(out[-1] + self.w_step, self.w_max))
        return out


@dataclass
class DetectionResult:
    """Per-pixel classification output.

    ``noisy`` is the discriminant mask, ``w_used`` the window radius at
    which each candidate's search stopped (0 for non-candidates), and
    ``has_noiseless`` marks candidates whose window contained at least one
    mid-range pixel at that radius (the stage-1 mean is well defined there).
    """

    noisy: np.ndarray
    w_used: np.ndarray
    has_noiseless: np.ndarray = field(repr=False)


def candidate_mask(img) -> np.ndarray:
    """Binary mask of pixels valued exactly 0 or 255."""
    img = as_gray(img)
    return (img == 0) | (img == 255)


def _box_sums(counts: np.ndarray, pad: int, w: int, shape: tuple[int, int]) -> np.ndarray:
    """Sum of ``counts`` (already padded by ``pad``) over (2w+1)^2 windows."""
    integral = np.zeros((counts.shape[0] + 1, counts.shape[1] + 1), dtype=np.int64)
    np.cumsum(np.cumsum(counts, axis=0), axis=1, out=integral[1:, 1:])
    h, wd = shape
    r0, r1 = pad - w, pad + w + 1
    c0, c1 = pad - w, pad + w + 1
    return (
        integral[r1 : r1 + h, c1 : c1 + wd]
        - integral[r0 : r0 + h, c1 : c1 + wd]
        - integral[r1 : r1 + h, c0 : c0 + wd]
        + integral[r0 : r0 + h, c0 : c0 + wd]
    )


def window_stats(img, i: int, j: int, w: int) -> tuple[int, int]:
    """Counts inside the (2w+1)^2 reflect-padded window centered at (i, j).

    Returns ``(s_sum, s_num)``: the number of window pixels that are neither
    0 nor 255, and the number equal to the center value (center included).
    """
    img = as_gray(img)
    if not (0 <= i < img.shape[0] and 0 <= j < img.shape[1]):
        raise IndexError(f"({i}, {j}) out of bounds for shape {img.shape}")
    if w < 1:
        raise ValueError("window radius must be >= 1")
    padded = np.pad(img, w, mode="reflect")
    win = padded[i : i + 2 * w + 1, j : j + 2 * w + 1]
    s_sum = int(np.count_nonzero((win != 0) & (win != 255)))
    s_num = int(np.count_nonzero(win == img[i, j]))
    return s_sum, s_num


def detect_pixel(img, i: int, j: int, params: DetectorParams) -> tuple[bool, int]:
    """Classify a single candidate pixel; returns ``(is_noisy, w)``.

    ``w`` is the smallest radius of the growth sequence whose window holds a
    mid-range pixel, capped at ``w_max``. If even the capped window is all
    extremes, the same-value proportion against ``params.t`` decides.
    """
    img = as_gray(img)
    if img[i, j] not in (0, 255):
        raise AssertionError(f"detect_pixel called on non-candidate value {img[i, j]}")
    s_sum = s_num = 0
    for w in params.radii():
        s_sum, s_num = window_stats(img, i, j, w)
        if s_sum > 0:
            return True, w
    rho = s_num / (2 * params.w_max + 1) ** 2
    return rho <= params.t, params.w_max


def detect(img, params: DetectorParams = DetectorParams()) -> DetectionResult:
    """Classify every pixel of ``img``.

    Vectorized equivalent of running :func:`detect_pixel` on each candidate
    (integral-image window counts); non-candidates get ``noisy=False`` and
    ``w_used=0``.
    """
    img = as_gray(img)
    h, wd = img.shape
    cand = candidate_mask(img)
    w_used = np.zeros(img.shape, dtype=np.int16)
    found = np.zeros(img.shape, dtype=bool)

    pad = params.w_max
    padded = np.pad(img, pad, mode="reflect")
    mid = ((padded != 0) & (padded != 255)).astype(np.int64)
    for w in params.radii():
        s_sum = _box_sums(mid, pad, w, img.shape)
        newly = cand & ~found & (s_sum > 0)
        w_used[newly] = w
        found |= newly

    unresolved = cand & ~found
    noisy = found.copy()
    if unresolved.any():
        w_used[unresolved] = params.w_max
        same_pepper = _box_sums((padded == 0).astype(np.int64), pad, params.w_max, img.shape)
        same_salt = _box_sums((padded == 255).astype(np.int64), pad, params.w_max, img.shape)
        s_num = np.where(img == 0, same_pepper, same_salt)
        rho = s_num / (2 * params.w_max + 1) ** 2
        noisy |= unresolved & (rho <= params.t)
    return DetectionResult(noisy=noisy, w_used=w_used, has_noiseless=found)
