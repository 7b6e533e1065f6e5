"""Benchmark materialization: apply a manifest to a dataset, writing the
perturbed tree plus a provenance log that covers every output.

Output layout under ``out_dir``:

    <method>/s<severity>/<image_id>__<method>__s<severity>.png   (image manifests)
    <method>/s<severity>/captions.jsonl                          (text manifests)
    drops.jsonl        dropped text samples
    provenance.jsonl   one line per (sample, spec): seed, attempts, score, status

Samples fan out to a worker pool; per-sample seeds derived from the
manifest's global seed make every output byte independent of worker count and
scheduling order.
"""

from __future__ import annotations

import json
import shutil
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from ..core import CaptionRecord, derive_seed
from ..errors import NoEligibleWordError
from ..fidelity import FidelityConfig, fidelity_gate
from ..text_perturb import IdentityFallback, apply_text_perturbation
from ..image_perturb import apply_image_perturbation

__all__ = ["materialize_benchmark", "MaterializeResult", "output_name"]


def output_name(image_id: str, method: str, severity: int, ext: str = "png") -> str:
    return f"{image_id}__{method}__s{severity}.{ext}"


@dataclass
class MaterializeResult:
    out_dir: Path
    provenance: list = field(default_factory=list)
    dropped: list = field(default_factory=list)
    flagged: list = field(default_factory=list)

    @property
    def dropped_count(self) -> int:
        return len(self.dropped)


def _perturbed_caption_generator(record, spec, seed, services):
    """Seeded candidate generator for the fidelity gate; every call advances
    the same rng, so retries see fresh randomness."""
    rng = np.random.default_rng(seed)

    def generate():
        attempt_seed = int(rng.integers(0, 2 ** 63))
        try:
            return apply_text_perturbation(
                record.text, spec, attempt_seed, transformer=services.transformer
            )
        except NoEligibleWordError:
            return IdentityFallback(record.text)

    return generate


def _run_image_sample(task):
    dataset, spec, manifest, out_dir, services, image_id = task
    seed = derive_seed(manifest.global_seed, image_id, spec)
    img = dataset.load_image(image_id)
    out = apply_image_perturbation(img, spec, seed, stylizer=services.stylizer)
    name = output_name(image_id, spec.method, spec.severity)
    sub = out_dir / spec.method / f"s{spec.severity}"
    Image.fromarray(out).save(sub / name, format="PNG")
    row = {
        "sample": image_id, "method": spec.method, "severity": spec.severity,
        "seed": seed, "status": "written",
        "file": f"{spec.method}/s{spec.severity}/{name}",
    }
    return spec, row, None


def _run_text_sample(task):
    dataset, spec, manifest, out_dir, services, record, fidelity_cfg, cache = task
    seed = derive_seed(manifest.global_seed, record.sample_key, spec)
    generator = _perturbed_caption_generator(record, spec, seed, services)
    outcome = fidelity_gate(record.text, generator, services.embedder,
                            fidelity_cfg, cache=cache)
    row = {
        "sample": record.sample_key, "method": spec.method, "severity": spec.severity,
        "seed": seed, "attempts": outcome.attempts, "score": outcome.score,
        "status": outcome.status,
    }
    if outcome.flagged_identity:
        row["flagged_identity"] = True
    kept = None
    if outcome.accepted:
        kept = CaptionRecord(record.image_id, record.caption_index, outcome.text)
    return spec, row, kept


def materialize_benchmark(dataset, manifest, fidelity_cfg=None, services=None,
                          out_dir=None, workers: int = 1) -> MaterializeResult:
    """Write the full perturbed tree for one manifest.

    Deterministic for equal (dataset, manifest, stub services). Partial
    outputs of this run are removed if any sample fails.
    """
    if services is None:
        from ..services import ServiceBundle

        services = ServiceBundle.stubs()
    fidelity_cfg = fidelity_cfg or FidelityConfig()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = MaterializeResult(out_dir=out_dir)
    # Shared across workers; identical values by determinism (last write wins).
    embed_cache = {}

    tasks = []
    method_dirs = []
    for spec in manifest.entries:
        sub = out_dir / spec.method / f"s{spec.severity}"
        sub.mkdir(parents=True, exist_ok=True)
        method_dirs.append(out_dir / spec.method)
        if spec.modality == "image":
            for image_id in dataset.image_ids:
                tasks.append((_run_image_sample,
                              (dataset, spec, manifest, out_dir, services, image_id)))
        else:
            for record in dataset.records:
                tasks.append((_run_text_sample,
                              (dataset, spec, manifest, out_dir, services, record,
                               fidelity_cfg, embed_cache)))

    try:
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                outputs = list(pool.map(lambda t: t[0](t[1]), tasks))
        else:
            outputs = [fn(arg) for fn, arg in tasks]
    except Exception:
        for path in method_dirs:
            shutil.rmtree(path, ignore_errors=True)
        raise

    kept_by_cell = {}
    for spec, row, kept in outputs:
        result.provenance.append(row)
        if row.get("status") == "dropped":
            result.dropped.append(row)
        if row.get("flagged_identity"):
            result.flagged.append(row)
        if spec.modality == "text":
            kept_by_cell.setdefault((spec.method, spec.severity), []).append(kept)

    from .dataset import write_captions

    for (method, severity), kept_records in kept_by_cell.items():
        records = sorted((r for r in kept_records if r is not None),
                         key=lambda r: (r.image_id, r.caption_index))
        write_captions(records, out_dir / method / f"s{severity}" / "captions.jsonl")

    result.provenance.sort(key=lambda r: (r["method"], r["severity"], r["sample"]))
    with (out_dir / "provenance.jsonl").open("w", encoding="utf-8") as fh:
        for row in result.provenance:
            fh.write(json.dumps(row) + "\n")
    with (out_dir / "drops.jsonl").open("w", encoding="utf-8") as fh:
        for row in sorted(result.dropped,
                          key=lambda r: (r["method"], r["severity"], r["sample"])):
            fh.write(json.dumps(row) + "\n")
    return result
