"""Locating the classic grayscale test corpus.

Reference-quality numbers in the literature are tied to exact classic
512x512 scans (Lena, Barbara, ...); different digitizations of the same
picture shift PSNR/SSIM noticeably. The repository bundles the scans it
was validated against under ``assets/corpus`` as ``<name>.pgm``; set
``NAMF_CORPUS_DIR`` to use alternatives. Checksums of whatever files are
used end up in the sweep CSV header so results stay attributable.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .image_io import load_image

ENV_VAR = "NAMF_CORPUS_DIR"
_DEFAULT_DIR = Path("assets/corpus")


def corpus_dirs() -> list[Path]:
    dirs = []
    env = os.environ.get(ENV_VAR)
    if env:
        dirs.append(Path(env))
    dirs.append(_DEFAULT_DIR)
    return dirs


def find_corpus_image(name: str) -> Path | None:
    """Path of the named corpus image, or None if not supplied."""
    stem = name.lower()
    for d in corpus_dirs():
        for suffix in (".pgm", ".png"):
            for cand in (d / f"{stem}{suffix}", d / f"{name}{suffix}"):
                if cand.is_file():
                    return cand
    return None


def load_corpus_image(name: str) -> np.ndarray:
    """Load the named corpus image; raises with guidance when missing."""
    path = find_corpus_image(name)
    if path is None:
        searched = ", ".join(str(d) for d in corpus_dirs())
        raise FileNotFoundError(
            f"corpus image {name!r} not found (searched: {searched}); supply the "
            f"classic 512x512 grayscale file as {name}.pgm or {name}.png, or set "
            f"{ENV_VAR} to the directory holding it"
        )
    return load_image(path)
