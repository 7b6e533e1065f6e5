"""Missing Object Rate on synthetic scenes.

Simulates the text-to-image robustness setting: "generated" scenes from clean
captions contain all ground-truth objects, scenes from character-perturbed
captions lose objects, sentence-perturbed scenes keep nearly all. A scripted
detector stands in for the grounded detection service; the real server plugs
into the same pipeline through /v1/detect.
"""

from pathlib import Path

import numpy as np
from PIL import Image

from mmrobust.harness import mor_pipeline
from mmrobust.services import Detection, ScriptedDetector

OUT = Path(__file__).parent / "out" / "mor"

OBJECTS = ["dog", "cake", "broccoli"]


def scene(seed):
    rng = np.random.default_rng(seed)
    return (rng.random((48, 48, 3)) * 255).astype(np.uint8)


def main():
    gt_dir = OUT / "gt"
    keyboard_dir = OUT / "keyboard"
    formal_dir = OUT / "formal"
    for d in (gt_dir, keyboard_dir, formal_dir):
        d.mkdir(parents=True, exist_ok=True)

    detector = ScriptedDetector()
    labels = {}
    rng = np.random.default_rng(0)
    for i in range(20):
        image_id = f"scene{i}"
        labels[image_id] = OBJECTS
        gt = scene(i)
        kb = scene(1000 + i)
        fm = scene(2000 + i)
        Image.fromarray(gt).save(gt_dir / f"{image_id}.png")
        Image.fromarray(kb).save(keyboard_dir / f"{image_id}.png")
        Image.fromarray(fm).save(formal_dir / f"{image_id}.png")

        def register(img, present_fraction):
            found = [o for o in OBJECTS if rng.random() < present_fraction]
            detector.register(img, [
                Detection(o, float(rng.uniform(0.55, 0.95)), (1, 1, 8, 8))
                for o in found
            ])

        detector.register(gt, [Detection(o, 0.9, (1, 1, 8, 8)) for o in OBJECTS])
        register(kb, 0.65)   # character-level scenes lose objects
        register(fm, 0.97)   # sentence-level scenes keep them

    table = mor_pipeline(gt_dir, {"keyboard": keyboard_dir, "formal": formal_dir},
                         labels, detector, thresholds=(0.7, 0.5))
    print(f"{'threshold':>9s} {'GT':>7s} {'keyboard':>9s} {'formal':>7s}")
    for threshold, row in table.items():
        print(f"{threshold:>9.1f} {row['GT']:>7.2f} {row['keyboard']:>9.2f} "
              f"{row['formal']:>7.2f}")
    print("\nlower MOR = more missing objects; character-level perturbations "
          "hit hardest, matching the benchmark's finding")


if __name__ == "__main__":
    main()
