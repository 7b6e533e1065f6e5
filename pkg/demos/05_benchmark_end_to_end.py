"""End-to-end benchmark materialization and evaluation on a tiny synthetic
dataset: build manifests, write the perturbed trees with stub services, score
an exact-match retrieval adapter, and emit CSV/JSON/markdown reports plus an
SSIM quality audit, all under demos/out/benchmark/.
"""

import json
from pathlib import Path

import numpy as np
from PIL import Image
from scipy import ndimage

from mmrobust import build_manifest
from mmrobust.harness import (
    ExactMatchRetrievalAdapter,
    audit_ssim,
    emit_report,
    evaluate,
    load_caption_dataset,
    materialize_benchmark,
)
from mmrobust.harness.quality import format_ssim_table
from mmrobust.services import ServiceBundle

OUT = Path(__file__).parent / "out" / "benchmark"

CAPTIONS = {
    "scene0": ["A red ball resting on green grass.",
               "The round ball sits near a wooden fence."],
    "scene1": ["A blue boat floating on calm water.",
               "The small boat drifts under a bright sky."],
}


def synthetic_image(seed, size=64):
    rng = np.random.default_rng(seed)
    base = ndimage.gaussian_filter(rng.random((size, size, 3)), (8, 8, 0)) * 0.5 + 0.3
    texture = ndimage.gaussian_filter(rng.standard_normal((size, size, 3)), (1.5, 1.5, 0))
    img = base + texture / texture.std() * 0.18
    img[size // 3: 2 * size // 3, size // 3: 2 * size // 3] = rng.random(3)
    return (np.clip(img, 0, 1) * 255).astype(np.uint8)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    images_dir = OUT / "clean"
    images_dir.mkdir(exist_ok=True)
    lines = []
    for i, (image_id, captions) in enumerate(CAPTIONS.items()):
        Image.fromarray(synthetic_image(i)).save(images_dir / f"{image_id}.png")
        for idx, text in enumerate(captions):
            lines.append(json.dumps(
                {"image_id": image_id, "caption_index": idx, "text": text}))
    captions_file = OUT / "captions.jsonl"
    captions_file.write_text("\n".join(lines) + "\n")

    dataset = load_caption_dataset(images_dir, captions_file)
    services = ServiceBundle.stubs()

    image_manifest = build_manifest("image", 42, dataset_id="demo")
    result = materialize_benchmark(dataset, image_manifest, services=services,
                                   out_dir=OUT / "images")
    print(f"image tree: {len(result.provenance)} files under {OUT / 'images'}")

    text_manifest = build_manifest("text", 42, dataset_id="demo")
    result = materialize_benchmark(dataset, text_manifest, services=services,
                                   out_dir=OUT / "texts")
    print(f"text tree: {len(result.provenance)} gated samples, "
          f"{result.dropped_count} dropped, {len(result.flagged)} identity-flagged")

    adapter = ExactMatchRetrievalAdapter(dataset)
    report = evaluate(adapter, dataset, OUT / "texts",
                      metadata={"dataset_id": "demo", "seed": 42})
    paths = emit_report(report, OUT / "report")
    print(f"clean R@1 = {report.clean['r@1']:.1f}, "
          f"MMI(r@1) = {100 * report.mmi_scores['r@1']:.1f}%")
    print("report files:", ", ".join(p.name for p in paths))

    audit = audit_ssim(images_dir, OUT / "images")
    (OUT / "ssim.csv").write_text(format_ssim_table(audit))
    gaussian = audit["table"]["gaussian_noise"]
    print("gaussian SSIM by severity:",
          " ".join(f"{gaussian[s]:.2f}" for s in sorted(gaussian)))


if __name__ == "__main__":
    main()
