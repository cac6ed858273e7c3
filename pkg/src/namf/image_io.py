"""Grayscale image containers, lossless file I/O and boundary padding.

Images are plain numpy arrays:

- gray image: ``uint8``, shape ``(H, W)``
- float image: ``float64``, shape ``(H, W)``, finite entries
- pixel mask: ``bool``, shape ``(H, W)``

Files are binary PGM (P5, maxval 255) or 8-bit grayscale PNG, both
round-tripping bit-exactly.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np
from PIL import Image


class ImageFormatError(ValueError):
    """Raised for unreadable or unsupported image files."""


def as_gray(arr) -> np.ndarray:
    """Validate and return an 8-bit grayscale image array."""
    a = np.asarray(arr)
    if a.ndim != 2 or a.size == 0:
        raise ValueError(f"expected a non-empty 2-D array, got shape {a.shape}")
    if a.dtype != np.uint8:
        if not np.issubdtype(a.dtype, np.integer):
            raise ValueError(f"gray image must be integer-valued, got dtype {a.dtype}")
        if a.min() < 0 or a.max() > 255:
            raise ValueError("gray image values must lie in [0, 255]")
        a = a.astype(np.uint8)
    return a


def as_float_image(arr) -> np.ndarray:
    """Validate and return a finite float64 working image."""
    a = np.asarray(arr, dtype=np.float64)
    if a.ndim != 2 or a.size == 0:
        raise ValueError(f"expected a non-empty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("float image contains NaN or infinite entries")
    return a


def as_mask(arr, like: np.ndarray | None = None) -> np.ndarray:
    """Validate a binary mask, optionally checking its shape against ``like``."""
    a = np.asarray(arr)
    if a.dtype != np.bool_:
        vals = np.unique(a)
        if not np.isin(vals, (0, 1)).all():
            raise ValueError("mask entries must be 0 or 1")
        a = a.astype(bool)
    if a.ndim != 2:
        raise ValueError(f"mask must be 2-D, got shape {a.shape}")
    if like is not None and a.shape != like.shape:
        raise ValueError(f"mask shape {a.shape} does not match image shape {like.shape}")
    return a


_PGM_HEADER = re.compile(rb"^P5\s+(?:#.*\s+)*(\d+)\s+(?:#.*\s+)*(\d+)\s+(?:#.*\s+)*(\d+)\s")


def _load_pgm(data: bytes, path: Path) -> np.ndarray:
    m = _PGM_HEADER.match(data)
    if m is None:
        raise ImageFormatError(f"{path}: not a valid binary PGM (P5) header")
    width, height, maxval = (int(g) for g in m.groups())
    if maxval != 255:
        raise ImageFormatError(f"{path}: unsupported maxval {maxval} (only 255)")
    pixels = data[m.end():]
    if len(pixels) < width * height:
        raise ImageFormatError(
            f"{path}: truncated pixel data ({len(pixels)} bytes for {width}x{height})"
        )
    return np.frombuffer(pixels[: width * height], dtype=np.uint8).reshape(height, width)


def _load_png(path: Path) -> np.ndarray:
    with Image.open(path) as im:
        if im.mode == "L":
            return np.asarray(im, dtype=np.uint8)
        if im.mode in ("I", "I;16", "I;16B", "I;16L"):
            raise ImageFormatError(f"{path}: unsupported bit depth (mode {im.mode})")
        raise ImageFormatError(f"{path}: unsupported color mode {im.mode}, expected 8-bit grayscale")


def load_image(path) -> np.ndarray:
    """Load a binary PGM (P5, maxval 255) or 8-bit grayscale PNG.

    Returns a ``uint8`` array in row-major, top-left-origin order that is
    bit-exact to the file's pixel data.
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ImageFormatError(f"cannot read {path}: {exc}") from exc
    if data[:2] == b"P5":
        return _load_pgm(data, path)
    if data[:8] == b"\x89PNG\r\n\x1a\n":
        return _load_png(path)
    raise ImageFormatError(f"{path}: unrecognized format (expected P5 PGM or PNG)")


def decode_image(data: bytes) -> np.ndarray:
    """Decode in-memory PGM or PNG bytes (the wire format of the service)."""
    if data[:2] == b"P5":
        return _load_pgm(data, Path("<bytes>"))
    if data[:8] == b"\x89PNG\r\n\x1a\n":
        import io

        with Image.open(io.BytesIO(data)) as im:
            if im.mode == "L":
                return np.asarray(im, dtype=np.uint8)
            raise ImageFormatError(f"unsupported PNG mode {im.mode}, expected 8-bit grayscale")
    raise ImageFormatError("unrecognized image bytes (expected P5 PGM or PNG)")


def encode_image(img, fmt: str = "pgm") -> bytes:
    """Encode a gray image to PGM (default) or PNG bytes."""
    img = as_gray(img)
    if fmt == "pgm":
        h, w = img.shape
        return f"P5\n{w} {h}\n255\n".encode("ascii") + img.tobytes()
    if fmt == "png":
        import io

        buf = io.BytesIO()
        Image.fromarray(img, mode="L").save(buf, format="PNG")
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}, expected 'pgm' or 'png'")


def save_image(img, path) -> None:
    """Write a gray image as binary PGM or PNG, chosen by file suffix.

    ``.png`` writes an 8-bit grayscale PNG; anything else writes P5 PGM
    with maxval 255. The file reloads bit-exactly via :func:`load_image`.
    """
    img = as_gray(img)
    path = Path(path)
    try:
        if path.suffix.lower() == ".png":
            Image.fromarray(img, mode="L").save(path)
        else:
            h, w = img.shape
            header = f"P5\n{w} {h}\n255\n".encode("ascii")
            path.write_bytes(header + img.tobytes())
    except OSError as exc:
        raise ImageFormatError(f"cannot write {path}: {exc}") from exc


def pad_reflect(img, radius: int) -> np.ndarray:
    """Mirror-pad an image by ``radius`` on every side (reflect-101).

    The border pixel itself is not repeated: a row ``[1, 2, 3]`` padded by
    one becomes ``[2, 1, 2, 3, 2]``. Requires ``radius < min(height, width)``.
    """
    a = np.asarray(img)
    if radius < 0:
        raise ValueError("radius must be non-negative")
    if radius == 0:
        return a.copy()
    if radius >= min(a.shape):
        raise ValueError(
            f"radius too large for reflection: {radius} >= min{a.shape}"
        )
    return np.pad(a, radius, mode="reflect")
