"""Shared fixtures: a deterministic corpus of photo-like RGB images and a tiny
caption dataset on disk."""

import json

import numpy as np
import pytest
from PIL import Image
from scipy import ndimage


def make_fixture_image(seed, size=128):
    """Procedural photo-like image: smooth color gradients, band-limited
    texture over most of the frame, and a few solid shapes. Texture scale is
    calibrated so noise/blur quality scores behave like natural photos."""
    rng = np.random.default_rng(seed)
    h = w = size
    yy, xx = np.mgrid[0:h, 0:w] / size
    base = np.stack([
        0.35 + 0.3 * np.sin(2 * np.pi * (0.7 * xx + 0.3 * yy) + rng.uniform(0, 6)),
        0.40 + 0.25 * np.cos(2 * np.pi * (0.4 * xx - 0.6 * yy) + rng.uniform(0, 6)),
        0.45 + 0.3 * np.sin(2 * np.pi * (0.2 * xx + 0.8 * yy) + rng.uniform(0, 6)),
    ], axis=2) * 0.5 + 0.25
    field = ndimage.gaussian_filter(rng.standard_normal((h, w)), 12)
    textured = field > np.quantile(field, 0.35)
    tex = ndimage.gaussian_filter(rng.standard_normal((h, w, 3)), (2.5, 2.5, 0))
    tex = tex / tex.std() * 0.26
    img = base + tex * textured[:, :, None]
    for _ in range(3):
        cy, cx = rng.uniform(0.2, 0.8, 2) * size
        radius = rng.uniform(0.08, 0.2) * size
        dist = np.hypot(np.mgrid[0:h, 0:w][0] - cy, np.mgrid[0:h, 0:w][1] - cx)
        color = rng.uniform(0.15, 0.85, 3)
        mask = dist < radius
        img[mask] = 0.7 * color + 0.3 * img[mask]
    return (np.clip(img, 0, 1) * 255).astype(np.uint8)


@pytest.fixture(scope="session")
def fixture_images():
    return [make_fixture_image(i) for i in range(20)]


@pytest.fixture(scope="session")
def small_images():
    return [make_fixture_image(100 + i, size=64) for i in range(2)]


FIXTURE_CAPTIONS = {
    "img0": [
        "An orange metal bowl strainer filled with apples.",
        "A wooden table holding a large bowl of fresh fruit.",
        "Several red apples resting inside a metal strainer.",
        "A kitchen counter with a fruit bowl near the window.",
        "Apples and oranges gathered in a shiny steel basin.",
    ],
    "img1": [
        "A brown dog running across a grassy green field.",
        "The happy dog chases a yellow ball in the park.",
        "A small puppy playing outside on the fresh lawn.",
        "One dog sprinting over the meadow under a blue sky.",
        "A furry dog leaping to catch a flying orange disc.",
    ],
}


@pytest.fixture()
def tiny_dataset(tmp_path, small_images):
    """Two images with five captions each, written to disk."""
    images_dir = tmp_path / "images"
    images_dir.mkdir()
    for i, img in enumerate(small_images):
        Image.fromarray(img).save(images_dir / f"img{i}.png")
    captions_file = tmp_path / "captions.jsonl"
    lines = []
    for image_id, captions in FIXTURE_CAPTIONS.items():
        for idx, text in enumerate(captions):
            lines.append(json.dumps(
                {"image_id": image_id, "caption_index": idx, "text": text}))
    captions_file.write_text("\n".join(lines) + "\n")
    return {"images_dir": images_dir, "captions_file": captions_file}
