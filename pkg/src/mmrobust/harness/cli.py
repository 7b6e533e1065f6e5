"""mmrobust command line.

Subcommands: manifest | perturb | gate | eval | mor | audit-ssim | report.
Exit codes: 0 success, 1 usage error, 2 data error, 3 service error.

Service endpoints come from MMR_EMBED_URL / MMR_DETECT_URL / MMR_TRANSFORM_URL
/ MMR_STYLIZE_URL; when unset, the deterministic stubs are used (announced on
stderr).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..core import BenchmarkManifest, PerturbationSpec, build_manifest
from ..errors import DataError, MMRobustError, ServiceError
from ..fidelity import FidelityConfig
from ..services import ServiceBundle
from .dataset import load_caption_dataset
from .evaluate import BenchmarkReport, ExactMatchRetrievalAdapter, evaluate
from .materialize import materialize_benchmark
from .mor import mor_pipeline
from .quality import audit_ssim, format_ssim_table
from .report import emit_report


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


ADAPTERS = {"exact_match": ExactMatchRetrievalAdapter}


def _services() -> ServiceBundle:
    bundle = ServiceBundle.from_env()
    if bundle.backed_by == "stub":
        print("mmrobust: MMR_*_URL not set, using deterministic stub services",
              file=sys.stderr)
    return bundle


def _filtered_manifest(manifest, method, severity):
    entries = manifest.entries
    if method:
        entries = tuple(e for e in entries if e.method == method)
    if severity:
        entries = tuple(e for e in entries if e.severity == severity)
    if not entries:
        raise DataError("no manifest entries match the given filters")
    return BenchmarkManifest(manifest.dataset_id, manifest.global_seed, entries)


def cmd_manifest(args):
    manifest = build_manifest(args.modality, args.seed, dataset_id=args.dataset_id)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    manifest.save(args.out)
    print(f"wrote {len(manifest)} entries to {args.out}")


def cmd_perturb(args):
    if args.manifest:
        manifest = BenchmarkManifest.load(args.manifest)
    else:
        if not args.modality:
            raise DataError("perturb needs --manifest or --modality")
        manifest = build_manifest(args.modality, args.seed, dataset_id=args.dataset_id)
    manifest = _filtered_manifest(manifest, args.method, args.severity)
    dataset = load_caption_dataset(args.images, args.captions)
    cfg = FidelityConfig(alpha0=args.alpha0, n_max=args.nmax)
    result = materialize_benchmark(
        dataset, manifest, fidelity_cfg=cfg, services=_services(),
        out_dir=args.out, workers=args.workers,
    )
    print(f"materialized {len(manifest)} entries under {result.out_dir}; "
          f"dropped {result.dropped_count} samples")


def cmd_gate(args):
    spec = PerturbationSpec("text", args.method, args.severity)
    manifest = BenchmarkManifest(args.dataset_id, args.seed, (spec,))
    dataset = load_caption_dataset(args.images, args.captions)
    cfg = FidelityConfig(alpha0=args.alpha0, n_max=args.nmax)
    result = materialize_benchmark(
        dataset, manifest, fidelity_cfg=cfg, services=_services(), out_dir=args.out,
    )
    accepted = sum(1 for row in result.provenance if row["status"] == "accepted")
    print(f"gated {len(result.provenance)} samples: {accepted} accepted, "
          f"{result.dropped_count} dropped (alpha0={cfg.alpha0}, nmax={cfg.n_max})")


def cmd_eval(args):
    dataset = load_caption_dataset(args.images, args.captions)
    adapter = ADAPTERS[args.adapter](dataset)
    report = evaluate(adapter, dataset, args.perturbed,
                      metadata={"dataset_id": args.dataset_id, "seed": args.seed})
    paths = emit_report(report, args.out, formats=tuple(args.format))
    print("wrote " + ", ".join(str(p) for p in paths))


def cmd_mor(args):
    labels = json.loads(Path(args.labels).read_text("utf-8"))
    if not isinstance(labels, dict):
        raise DataError("labels file must map image_id to a list of object names")
    perturbed_dirs = {
        p.name: p for p in sorted(Path(args.perturbed).iterdir()) if p.is_dir()
    }
    table = mor_pipeline(args.gt_images, perturbed_dirs, labels,
                         _services().detector, thresholds=tuple(args.threshold))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(table, indent=2, sort_keys=True), encoding="utf-8")
    print(f"wrote MOR table to {out}")


def cmd_audit_ssim(args):
    audit = audit_ssim(args.images, args.perturbed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(format_ssim_table(audit), encoding="utf-8")
    print(f"wrote SSIM table to {out} ({audit['skipped']} pairs skipped)")


def cmd_report(args):
    report = BenchmarkReport.load(args.input)
    paths = emit_report(report, args.out, formats=tuple(args.format))
    print("wrote " + ", ".join(str(p) for p in paths))


def build_parser() -> _Parser:
    parser = _Parser(prog="mmrobust",
                     description="Multimodal robustness benchmark toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("manifest", help="write a benchmark manifest JSON")
    p.add_argument("--modality", required=True, choices=["image", "text"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dataset-id", default="")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_manifest)

    p = sub.add_parser("perturb", help="materialize a perturbed benchmark tree")
    p.add_argument("--images", required=True)
    p.add_argument("--captions", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--manifest")
    p.add_argument("--modality", choices=["image", "text"])
    p.add_argument("--method")
    p.add_argument("--severity", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dataset-id", default="")
    p.add_argument("--alpha0", type=float, default=0.75)
    p.add_argument("--nmax", type=int, default=100)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("gate", help="run the fidelity gate for one text method")
    p.add_argument("--images", required=True)
    p.add_argument("--captions", required=True)
    p.add_argument("--method", required=True)
    p.add_argument("--severity", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dataset-id", default="")
    p.add_argument("--alpha0", type=float, default=0.75)
    p.add_argument("--nmax", type=int, default=100)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gate)

    p = sub.add_parser("eval", help="evaluate an adapter over a perturbed tree")
    p.add_argument("--images", required=True)
    p.add_argument("--captions", required=True)
    p.add_argument("--perturbed", required=True)
    p.add_argument("--adapter", default="exact_match", choices=sorted(ADAPTERS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dataset-id", default="")
    p.add_argument("--format", action="append", default=None,
                   choices=["csv", "json", "markdown"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("mor", help="missing object rate over generated images")
    p.add_argument("--gt-images", required=True)
    p.add_argument("--perturbed", required=True,
                   help="directory with one subdirectory of images per method")
    p.add_argument("--labels", required=True,
                   help="JSON mapping image_id to its object-name list")
    p.add_argument("--threshold", type=float, action="append", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_mor)

    p = sub.add_parser("audit-ssim", help="mean SSIM per (method, severity)")
    p.add_argument("--images", required=True)
    p.add_argument("--perturbed", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_audit_ssim)

    p = sub.add_parser("report", help="re-emit a saved report")
    p.add_argument("--input", required=True)
    p.add_argument("--format", action="append", default=None,
                   choices=["csv", "json", "markdown"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "format", None) is None and hasattr(args, "format"):
        args.format = ["csv", "json", "markdown"]
    if getattr(args, "threshold", None) is None and hasattr(args, "threshold"):
        args.threshold = [0.7, 0.5]
    try:
        args.func(args)
    except ServiceError as exc:
        print(f"mmrobust: service error: {exc}", file=sys.stderr)
        return 3
    except (DataError, OSError) as exc:
        print(f"mmrobust: data error: {exc}", file=sys.stderr)
        return 2
    except MMRobustError as exc:
        print(f"mmrobust: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
