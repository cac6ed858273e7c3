import numpy as np
import pytest
from skimage import data


@pytest.fixture(scope="session")
def camera():
    """Standard 512x512 grayscale test image."""
    return data.camera()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def gray_from_color(rgb):
    """Luma conversion used for the color members of the test set."""
    weights = np.array([0.299, 0.587, 0.114])
    return np.clip(np.round(rgb.astype(np.float64) @ weights), 0, 255).astype(np.uint8)


def downsample2(img):
    """2x2 block-mean downsampling (keeps the image natural-looking)."""
    h, w = img.shape[0] // 2 * 2, img.shape[1] // 2 * 2
    a = img[:h, :w].astype(np.float64)
    small = (a[0::2, 0::2] + a[0::2, 1::2] + a[1::2, 0::2] + a[1::2, 1::2]) / 4.0
    return np.clip(np.round(small), 0, 255).astype(np.uint8)


@pytest.fixture(scope="session")
def small_corpus():
    """Four natural 256x256 grayscale images for desk-scale benchmarks."""
    imgs = {
        "camera": downsample2(data.camera()),
        "moon": downsample2(data.moon()),
        "astronaut": downsample2(gray_from_color(data.astronaut())),
        "gravel": downsample2(data.gravel()),
    }
    assert all(im.shape == (256, 256) for im in imgs.values())
    return imgs
