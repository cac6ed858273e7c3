"""Seeded salt-and-pepper noise injection with ground-truth masks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image_io import as_gray


@dataclass(frozen=True)
class NoiseSpec:
    """Corruption model: each pixel is overwritten with probability ``density``.

    An overwritten pixel becomes 255 (salt) with probability
    ``salt_fraction`` or 0 (pepper) otherwise; all other pixels keep their
    original value. ``seed`` makes the draw fully deterministic.
    """

    density: float
    salt_fraction: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.density <= 1.0:
            raise ValueError(f"density must be in [0, 1], got {self.density}")
        if not 0.0 <= self.salt_fraction <= 1.0:
            raise ValueError(f"salt_fraction must be in [0, 1], got {self.salt_fraction}")


def inject_sap(img, spec: NoiseSpec) -> tuple[np.ndarray, np.ndarray]:
    """Corrupt ``img`` with salt-and-pepper noise.

    Returns ``(noisy, truth)`` where ``truth`` marks exactly the overwritten
    pixels. A pixel already at 0 or 255 that is overwritten with the same
    value is still marked. Deterministic for a fixed ``spec.seed``
    (PCG64 stream, one corruption draw and one salt/pepper draw per pixel).
    """
    img = as_gray(img)
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    corrupt = rng.random(img.shape) < spec.density
    salt = rng.random(img.shape) < spec.salt_fraction
    noisy = img.copy()
    noisy[corrupt & salt] = 255
    noisy[corrupt & ~salt] = 0
    return noisy, corrupt
