"""Non-local means refinement adapted to impulse noise.

Only pixels flagged by the detector are rewritten, as a weighted average
over a large search window. Weights decay exponentially in the squared
patch distance, the center pixel itself gets weight zero (its value is
untrusted), and the decay scale is fitted as a quadratic in the detected
noise fraction so heavier corruption smooths more.

Patch distances take the corruption into account: positions that were
rewritten by the first pass carry estimation error, so while the reference
patch still holds at least half of its original (never-flagged) pixel
mass, the comparison is restricted to those trusted positions. Patches
more corrupted than that fall back to comparing every position, since too
few trusted samples make the restricted distance unreliable.

Two interchangeable implementations are provided: a direct per-pixel
evaluation (the reference) and an accelerated one that precomputes, for
every search offset, the squared-difference image and its integral sums so
each patch distance costs O(1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .image_io import as_float_image, as_mask

# All non-center weights can underflow to zero on extreme-contrast
# neighborhoods; below this normalization the stage-1 value is kept.
_DEGENERATE_WEIGHT_SUM = 1e-300

# Patch comparisons ignore first-pass-rewritten positions as long as the
# reference patch keeps at least this fraction of its original pixel mass.
TRUSTED_FRACTION = 0.5


@dataclass(frozen=True)
class NlmParams:
    """Refinement-stage tunables.

    ``patch_radius`` sizes the similarity patches (default 2, i.e. 5x5) and
    ``search_radius`` the search window (default 20, i.e. 41x41). The
    ``beta`` coefficients fit the smoothing scale as a quadratic in the
    detected noise fraction. ``kernel_a`` is the Gaussian std of the patch
    weighting; 0 selects uniform patch weights.
    """

    patch_radius: int = 2
    search_radius: int = 20
    beta0: float = 4.5595
    beta1: float = 6.0314
    beta2: float = 2.2186
    kernel_a: float = 0.0

    def __post_init__(self):
        if self.patch_radius < 1:
            raise ValueError(f"patch_radius must be >= 1, got {self.patch_radius}")
        if self.search_radius < self.patch_radius:
            raise ValueError("search_radius must be >= patch_radius")
        for name in ("beta0", "beta1", "beta2", "kernel_a"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.kernel_a < 0:
            raise ValueError("kernel_a must be non-negative")


def smoothing_h(noisy_mask, params: NlmParams = NlmParams()) -> float:
    """Smoothing scale from the detected noise fraction.

    With ``q`` the fraction of flagged pixels, returns
    ``beta2*q**2 + beta1*q + beta0``; strictly increasing in ``q`` for the
    default coefficients, so noisier images smooth more.
    """
    noisy_mask = as_mask(noisy_mask)
    q = np.count_nonzero(noisy_mask) / noisy_mask.size
    return params.beta2 * q * q + params.beta1 * q + params.beta0


def patch_kernel(params: NlmParams) -> np.ndarray:
    """Normalized patch-offset weights: uniform, or Gaussian of std ``kernel_a``."""
    r = params.patch_radius
    n = 2 * r + 1
    if params.kernel_a == 0:
        return np.full((n, n), 1.0 / (n * n))
    ax = np.arange(-r, r + 1, dtype=np.float64)
    g = np.exp(-(ax[:, None] ** 2 + ax[None, :] ** 2) / (2.0 * params.kernel_a**2))
    return g / g.sum()


def patch_distance(z, p1: tuple[int, int], p2: tuple[int, int],
                   params: NlmParams = NlmParams(), trusted=None) -> float:
    """Weighted squared Euclidean distance between the patches at p1 and p2.

    With ``trusted`` (a boolean image, True where the pixel was never
    rewritten), only trusted positions of the patch at ``p1`` enter the
    sum and the kernel weights are renormalized over them. If no trusted
    mass remains the unrestricted distance is returned.
    """
    z = as_float_image(z)
    r = params.patch_radius
    zp = np.pad(z, r, mode="reflect")
    for i, j in (p1, p2):
        if not (0 <= i < z.shape[0] and 0 <= j < z.shape[1]):
            raise IndexError(f"position ({i}, {j}) out of bounds for shape {z.shape}")
    g = patch_kernel(params)
    w1 = zp[p1[0] : p1[0] + 2 * r + 1, p1[1] : p1[1] + 2 * r + 1]
    w2 = zp[p2[0] : p2[0] + 2 * r + 1, p2[1] : p2[1] + 2 * r + 1]
    if trusted is not None:
        trusted = as_mask(trusted, like=z)
        tp = np.pad(trusted, r, mode="reflect")
        m = tp[p1[0] : p1[0] + 2 * r + 1, p1[1] : p1[1] + 2 * r + 1]
        mass = float((g * m).sum())
        if mass > 0.0:
            return float((g * m * (w1 - w2) ** 2).sum()) / mass
    return float((g * (w1 - w2) ** 2).sum())


def nlm_weight(d: float, h: float, is_center: bool) -> float:
    """Similarity weight ``exp(-d/h^2)``; exactly 0 for the center pixel."""
    if h <= 0:
        raise ValueError("smoothing parameter must be positive")
    if is_center:
        return 0.0
    return float(np.exp(-d / (h * h)))


def nlm_restore_naive(z, noisy_mask, params: NlmParams = NlmParams()) -> np.ndarray:
    """Direct per-pixel evaluation of the refinement; the reference path.

    Quadratic in the window sizes per pixel, intended for small inputs and
    as the oracle for :func:`nlm_restore_fast`.
    """
    z = as_float_image(z)
    noisy_mask = as_mask(noisy_mask, like=z)
    h = smoothing_h(noisy_mask, params)
    h2 = h * h
    pr, sr = params.patch_radius, params.search_radius
    pad = sr + pr
    zp = np.pad(z, pad, mode="reflect")
    tp = np.pad(~noisy_mask, pad, mode="reflect").astype(np.float64)
    g = patch_kernel(params)

    out = z.copy()
    n = 2 * pr + 1
    for i, j in zip(*np.nonzero(noisy_mask)):
        ci, cj = i + pad, j + pad
        ref = zp[ci - pr : ci + pr + 1, cj - pr : cj + pr + 1]
        m = g * tp[ci - pr : ci + pr + 1, cj - pr : cj + pr + 1]
        mass = float(m.sum())
        restricted = mass >= TRUSTED_FRACTION
        acc = 0.0
        norm = 0.0
        for di in range(-sr, sr + 1):
            for dj in range(-sr, sr + 1):
                if di == 0 and dj == 0:
                    continue
                ei, ej = ci + di, cj + dj
                cand = zp[ei - pr : ei - pr + n, ej - pr : ej - pr + n]
                if restricted:
                    d = float((m * (ref - cand) ** 2).sum()) / mass
                else:
                    d = float((g * (ref - cand) ** 2).sum())
                wgt = np.exp(-d / h2)
                acc += wgt * zp[ei, ej]
                norm += wgt
        if norm >= _DEGENERATE_WEIGHT_SUM:
            out[i, j] = acc / norm
    return out


def _patch_means(arr: np.ndarray, shape: tuple[int, int], params: NlmParams,
                 kernel: np.ndarray) -> np.ndarray:
    """Kernel-weighted patch mean of ``arr`` around every image position.

    ``arr`` carries a margin of ``patch_radius`` on each side; the result
    has the plain image shape. Uniform kernels go through integral line
    sums, Gaussian ones through a small correlation.
    """
    h, w = shape
    pr = params.patch_radius
    if params.kernel_a == 0:
        integral = np.zeros((arr.shape[0] + 1, arr.shape[1] + 1))
        np.cumsum(np.cumsum(arr, axis=0), axis=1, out=integral[1:, 1:])
        n = 2 * pr + 1
        box = (
            integral[n : n + h, n : n + w]
            - integral[0:h, n : n + w]
            - integral[n : n + h, 0:w]
            + integral[0:h, 0:w]
        )
        return box / (n * n)
    full = ndimage.correlate(arr, kernel, mode="constant")
    return full[pr : pr + h, pr : pr + w]


def nlm_restore_fast(z, noisy_mask, params: NlmParams = NlmParams()) -> np.ndarray:
    """Accelerated refinement, identical in contract to the naive path.

    For each search offset the squared-difference image is formed once and
    integral line sums turn every patch distance into an O(1) lookup, so
    the cost is O(pixels * search window) independent of the patch size
    (uniform patch weights; the Gaussian option correlates with the small
    patch kernel instead).
    """
    z = as_float_image(z)
    noisy_mask = as_mask(noisy_mask, like=z)
    rows, cols = np.nonzero(noisy_mask)
    if rows.size == 0:
        return z.copy()

    h_par = smoothing_h(noisy_mask, params)
    h2 = h_par * h_par
    pr, sr = params.patch_radius, params.search_radius
    pad = sr + pr
    zp = np.pad(z, pad, mode="reflect")
    tp = np.pad(~noisy_mask, pad, mode="reflect").astype(np.float64)
    kernel = patch_kernel(params)

    a0, a1 = pad - pr, pad + z.shape[0] + pr
    b0, b1 = pad - pr, pad + z.shape[1] + pr
    mcrop = tp[a0:a1, b0:b1]
    mass = _patch_means(mcrop, z.shape, params, kernel)[rows, cols]
    restricted = mass >= TRUSTED_FRACTION
    any_plain = not restricted.all()
    any_restricted = restricted.any()
    safe_mass = np.maximum(mass, _DEGENERATE_WEIGHT_SUM)

    acc = np.zeros(rows.size)
    norm = np.zeros(rows.size)
    for di in range(-sr, sr + 1):
        for dj in range(-sr, sr + 1):
            if di == 0 and dj == 0:
                continue
            diff = zp[a0:a1, b0:b1] - zp[a0 + di : a1 + di, b0 + dj : b1 + dj]
            sq = diff * diff
            if any_restricted:
                dist = _patch_means(mcrop * sq, z.shape, params, kernel)[rows, cols]
                dist /= safe_mass
                if any_plain:
                    plain = _patch_means(sq, z.shape, params, kernel)[rows, cols]
                    dist = np.where(restricted, dist, plain)
            else:
                dist = _patch_means(sq, z.shape, params, kernel)[rows, cols]
            wgt = np.exp(-dist / h2)
            acc += wgt * zp[rows + pad + di, cols + pad + dj]
            norm += wgt

    out = z.copy()
    ok = norm >= _DEGENERATE_WEIGHT_SUM
    out[rows[ok], cols[ok]] = acc[ok] / norm[ok]
    return out
