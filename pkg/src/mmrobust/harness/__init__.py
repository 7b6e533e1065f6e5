"""Orchestration layer: dataset ingestion, benchmark materialization,
model-adapter evaluation, the MOR pipeline, quality audits, and reports."""

from .dataset import CaptionDataset, load_caption_dataset, write_captions
from .materialize import materialize_benchmark, MaterializeResult
from .evaluate import BenchmarkReport, ExactMatchRetrievalAdapter, evaluate
from .mor import mor_pipeline
from .quality import audit_ssim
from .report import emit_report

__all__ = [
    "CaptionDataset",
    "load_caption_dataset",
    "write_captions",
    "materialize_benchmark",
    "MaterializeResult",
    "BenchmarkReport",
    "ExactMatchRetrievalAdapter",
    "evaluate",
    "mor_pipeline",
    "audit_ssim",
    "emit_report",
]
