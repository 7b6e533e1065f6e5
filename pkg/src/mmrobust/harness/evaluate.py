"""Model-adapter evaluation loop over a materialized benchmark tree.

The report separates clean and perturbed scores by schema, so MMI inputs are
always well-typed: per (method, severity) scores, per-method severity
averages, and the per-dataset MMI computed as the relative drop of the
across-method mean of those severity averages.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import AdapterFailureError, DataError
from ..metrics import RetrievalRanking, mmi, recall_at_k
from .dataset import CaptionDataset

__all__ = ["BenchmarkReport", "ExactMatchRetrievalAdapter", "evaluate"]


class ExactMatchRetrievalAdapter:
    """Mock text-to-image retrieval adapter: candidates whose clean captions
    exactly match the query rank first (deterministic order throughout)."""

    capability = "retrieval"

    def __init__(self, clean_dataset: CaptionDataset):
        self._captions = {
            image_id: {r.text for r in clean_dataset.captions_for(image_id)}
            for image_id in clean_dataset.image_ids
        }

    def rank(self, query_text: str, candidate_image_ids) -> list:
        matches, rest = [], []
        for image_id in candidate_image_ids:
            if query_text in self._captions.get(image_id, ()):
                matches.append(image_id)
            else:
                rest.append(image_id)
        return matches + rest


@dataclass
class BenchmarkReport:
    dataset_id: str
    capability: str
    metric_names: tuple
    clean: dict  # metric -> value
    per_method_severity: dict  # method -> severity(str) -> metric -> value
    per_method_avg: dict  # method -> metric -> value
    mmi_scores: dict  # metric -> fraction in [0, 1] range semantics of (sc-sp)/sc
    metadata: dict = field(default_factory=dict)

    def methods(self) -> tuple:
        return tuple(self.per_method_severity)

    def to_json(self) -> str:
        return json.dumps(
            {
                "dataset_id": self.dataset_id,
                "capability": self.capability,
                "metric_names": list(self.metric_names),
                "clean": self.clean,
                "per_method_severity": self.per_method_severity,
                "per_method_avg": self.per_method_avg,
                "mmi": self.mmi_scores,
                "metadata": self.metadata,
            },
            indent=2,
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "BenchmarkReport":
        d = json.loads(text)
        return cls(
            dataset_id=d["dataset_id"],
            capability=d["capability"],
            metric_names=tuple(d["metric_names"]),
            clean=d["clean"],
            per_method_severity=d["per_method_severity"],
            per_method_avg=d["per_method_avg"],
            mmi_scores=d["mmi"],
            metadata=d["metadata"],
        )

    def save(self, path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "BenchmarkReport":
        return cls.from_json(Path(path).read_text("utf-8"))


def _score_retrieval(adapter, queries, image_ids, ks=(1, 5, 10)):
    """queries: list of (query_text, gt_image_id)."""
    rankings, gts = [], []
    for text, gt_image in queries:
        try:
            ranked = list(adapter.rank(text, list(image_ids)))
        except Exception as exc:
            raise AdapterFailureError(f"adapter failed on query {text!r}: {exc}") from exc
        rankings.append(ranked)
        gts.append({gt_image})
    ranking = RetrievalRanking.build(rankings, gts)
    return {f"r@{k}": recall_at_k(ranking, k) for k in ks if k <= len(image_ids)}


def evaluate(adapter, clean_dataset: CaptionDataset, perturbed_tree,
             metadata: dict | None = None) -> BenchmarkReport:
    """Score the adapter on the clean dataset and every materialized
    (method, severity) caption set under ``perturbed_tree``.

    Samples dropped by the fidelity gate simply do not appear in a method's
    caption file, so they are excluded from that method's scoring; drop counts
    travel in the report metadata.
    """
    perturbed_tree = Path(perturbed_tree)
    if adapter.capability != "retrieval":
        raise DataError(f"unsupported adapter capability: {adapter.capability}")

    method_dirs = sorted(p for p in perturbed_tree.iterdir() if p.is_dir())
    if not method_dirs:
        raise DataError(f"no perturbed methods under {perturbed_tree}")

    image_ids = clean_dataset.image_ids
    clean_queries = [(r.text, r.image_id) for r in clean_dataset.records]
    clean_scores = _score_retrieval(adapter, clean_queries, image_ids)
    metric_names = tuple(clean_scores)

    per_method_severity = {}
    per_method_avg = {}
    dropped_total = 0
    for method_dir in method_dirs:
        method = method_dir.name
        severities = {}
        for sev_dir in sorted(method_dir.iterdir()):
            if not sev_dir.is_dir() or not sev_dir.name.startswith("s"):
                continue
            captions_file = sev_dir / "captions.jsonl"
            if not captions_file.is_file():
                raise DataError(f"missing captions file: {captions_file}")
            # Captions only; image resolution reuses the clean dataset.
            queries = []
            kept_keys = set()
            from .dataset import _parse_caption_line

            for lineno, line in enumerate(
                    captions_file.read_text("utf-8").splitlines(), 1):
                if not line.strip():
                    continue
                rec = _parse_caption_line(line, lineno)
                queries.append((rec.text, rec.image_id))
                kept_keys.add((rec.image_id, rec.caption_index))
            dropped_here = sum(
                1 for r in clean_dataset.records
                if (r.image_id, r.caption_index) not in kept_keys
            )
            dropped_total += dropped_here
            if not queries:
                # every sample of this cell was dropped by the gate; the cell
                # is excluded from scoring and only counted in drop totals
                continue
            severities[sev_dir.name[1:]] = _score_retrieval(adapter, queries, image_ids)
        if not severities:
            continue
        per_method_severity[method] = severities
        per_method_avg[method] = {
            m: sum(sv[m] for sv in severities.values()) / len(severities)
            for m in metric_names
        }

    if not per_method_avg:
        raise DataError("every perturbed cell was empty; nothing to evaluate")

    mmi_scores = {}
    for m in metric_names:
        overall = sum(avg[m] for avg in per_method_avg.values()) / len(per_method_avg)
        mmi_scores[m] = mmi(clean_scores[m], overall)

    meta = dict(metadata or {})
    meta.setdefault("dropped_samples", dropped_total)
    return BenchmarkReport(
        dataset_id=meta.get("dataset_id", ""),
        capability=adapter.capability,
        metric_names=metric_names,
        clean=clean_scores,
        per_method_severity=per_method_severity,
        per_method_avg=per_method_avg,
        mmi_scores=mmi_scores,
        metadata=meta,
    )
