"""Walk through the 17 image corruptions at every severity.

Generates a synthetic photo-like sample, applies the full 85-entry image
manifest, and saves a contact sheet (methods as rows, severities as columns)
to demos/out/image_grid.png.
"""

from pathlib import Path

import numpy as np
from PIL import Image
from scipy import ndimage

from mmrobust import IMAGE_METHODS, PerturbationSpec, apply_image_perturbation, derive_seed
from mmrobust.services import LutStylizer

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)


def sample_photo(size=96, seed=0):
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size] / size
    sky = np.stack([0.45 + 0.2 * yy, 0.55 + 0.2 * yy, 0.75 + 0.2 * yy], axis=2)
    ground = np.stack([0.25 + 0 * yy, 0.45 + 0.1 * xx, 0.2 + 0 * yy], axis=2)
    img = np.where(yy[:, :, None] > 0.6, ground, sky)
    img += ndimage.gaussian_filter(rng.standard_normal((size, size, 3)), (2, 2, 0)) * 0.12
    # a red "ball" and a dark "trunk" give the scene structure
    dist = np.hypot(np.mgrid[0:size, 0:size][0] - 0.35 * size,
                    np.mgrid[0:size, 0:size][1] - 0.6 * size)
    img[dist < 0.12 * size] = (0.8, 0.2, 0.15)
    img[int(0.3 * size):int(0.62 * size), int(0.2 * size):int(0.26 * size)] = (0.3, 0.2, 0.1)
    return (np.clip(img, 0, 1) * 255).astype(np.uint8)


def main():
    img = sample_photo()
    size = img.shape[0]
    pad = 2
    sheet = np.full(
        ((size + pad) * len(IMAGE_METHODS) + pad, (size + pad) * 6 + pad, 3),
        255, np.uint8,
    )
    stylizer = LutStylizer()
    for row, method in enumerate(IMAGE_METHODS):
        y = pad + row * (size + pad)
        sheet[y:y + size, pad:pad + size] = img  # clean reference column
        for severity in range(1, 6):
            spec = PerturbationSpec("image", method, severity)
            seed = derive_seed(42, "demo", spec)
            out = apply_image_perturbation(img, spec, seed, stylizer=stylizer)
            x = pad + severity * (size + pad)
            sheet[y:y + size, x:x + size] = out
        print(f"{method:18s} severities 1..5 applied")
    target = OUT / "image_grid.png"
    Image.fromarray(sheet).save(target)
    print(f"\ncontact sheet (rows = methods, columns = clean + s1..s5): {target}")


if __name__ == "__main__":
    main()
