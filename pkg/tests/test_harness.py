import json
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from mmrobust.core import BenchmarkManifest, CaptionRecord, PerturbationSpec, build_manifest
from mmrobust.errors import DataError, MalformedCaptionsError, MissingImageError
from mmrobust.fidelity import FidelityConfig
from mmrobust.harness import (
    ExactMatchRetrievalAdapter,
    audit_ssim,
    emit_report,
    evaluate,
    load_caption_dataset,
    materialize_benchmark,
    mor_pipeline,
    write_captions,
)
from mmrobust.harness.evaluate import BenchmarkReport
from mmrobust.harness.quality import format_ssim_table
from mmrobust.harness.report import report_csv, report_markdown
from mmrobust.services import Detection, ScriptedDetector, ServiceBundle


# ------------------------------------------------------------------ dataset

def test_load_caption_dataset(tiny_dataset):
    ds = load_caption_dataset(tiny_dataset["images_dir"], tiny_dataset["captions_file"])
    assert len(ds.records) == 10
    assert ds.image_ids == ("img0", "img1")
    assert len(ds.captions_for("img0")) == 5
    assert ds.load_image("img0").shape == (64, 64, 3)


def test_missing_image_raises(tiny_dataset, tmp_path):
    captions = tmp_path / "bad.jsonl"
    captions.write_text(json.dumps(
        {"image_id": "ghost", "caption_index": 0, "text": "missing"}) + "\n")
    with pytest.raises(MissingImageError):
        load_caption_dataset(tiny_dataset["images_dir"], captions)


def test_malformed_captions_raises(tiny_dataset, tmp_path):
    captions = tmp_path / "bad.jsonl"
    captions.write_text("{not json}\n")
    with pytest.raises(MalformedCaptionsError):
        load_caption_dataset(tiny_dataset["images_dir"], captions)


def test_caption_round_trip(tiny_dataset, tmp_path):
    ds = load_caption_dataset(tiny_dataset["images_dir"], tiny_dataset["captions_file"])
    out = tmp_path / "copy.jsonl"
    write_captions(ds.records, out)
    again = load_caption_dataset(tiny_dataset["images_dir"], out)
    assert again.records == ds.records


# -------------------------------------------------------------- materialize

def small_image_manifest(methods=("gaussian_noise", "pixelate"), seed=7):
    full = build_manifest("image", seed, dataset_id="fixture")
    entries = tuple(e for e in full.entries if e.method in methods)
    return BenchmarkManifest("fixture", seed, entries)


def test_materialize_image_tree(tiny_dataset, tmp_path):
    ds = load_caption_dataset(tiny_dataset["images_dir"], tiny_dataset["captions_file"])
    manifest = small_image_manifest()
    out = tmp_path / "tree"
    result = materialize_benchmark(ds, manifest, services=ServiceBundle.stubs(), out_dir=out)
    files = sorted(out.rglob("*.png"))
    assert len(files) == 2 * 2 * 5  # images x methods x severities
    assert (out / "gaussian_noise" / "s3" / "img0__gaussian_noise__s3.png").is_file()
    assert len(result.provenance) == 2 * 2 * 5
    arr = np.asarray(Image.open(files[0]))
    assert arr.shape == (64, 64, 3)


def test_materialize_is_deterministic_and_worker_independent(tiny_dataset, tmp_path):
    ds = load_caption_dataset(tiny_dataset["images_dir"], tiny_dataset["captions_file"])
    manifest = small_image_manifest()
    trees = []
    for name, workers in (("a", 1), ("b", 4)):
        out = tmp_path / name
        materialize_benchmark(ds, manifest, services=ServiceBundle.stubs(),
                              out_dir=out, workers=workers)
        trees.append({
            p.relative_to(out): p.read_bytes() for p in sorted(out.rglob("*.png"))
        })
    assert trees[0] == trees[1]


def test_materialize_text_tree_with_gate(tiny_dataset, tmp_path):
    ds = load_caption_dataset(tiny_dataset["images_dir"], tiny_dataset["captions_file"])
    full = build_manifest("text", 3, dataset_id="fixture")
    entries = tuple(e for e in full.entries
                    if e.method in ("word_delete", "synonym_replace", "formal"))
    manifest = BenchmarkManifest("fixture", 3, entries)
    out = tmp_path / "texttree"
    result = materialize_benchmark(
        ds, manifest, fidelity_cfg=FidelityConfig(alpha0=0.75),
        services=ServiceBundle.stubs(), out_dir=out,
    )
    assert (out / "word_delete" / "s1" / "captions.jsonl").is_file()
    assert (out / "formal" / "s1" / "captions.jsonl").is_file()
    assert (out / "provenance.jsonl").is_file()
    rows = [json.loads(line) for line in
            (out / "provenance.jsonl").read_text().splitlines()]
    assert len(rows) == 10 * len(entries)
    assert all(r["attempts"] <= 100 for r in rows)
    # identity stub transformer keeps sentence-level captions identical
    formal = (out / "formal" / "s1" / "captions.jsonl").read_text()
    assert "An orange metal bowl strainer filled with apples." in formal


def test_materialize_cleans_up_on_failure(tiny_dataset, tmp_path):
    ds = load_caption_dataset(tiny_dataset["images_dir"], tiny_dataset["captions_file"])
    spec = PerturbationSpec("image", "stylize", 1)
    manifest = BenchmarkManifest("fixture", 1, (spec,))
    bundle = ServiceBundle.stubs()
    bundle.stylizer = None  # force a failure mid-run
    out = tmp_path / "broken"
    with pytest.raises(Exception):
        materialize_benchmark(ds, manifest, services=bundle, out_dir=out)
    assert not (out / "stylize").exists()


# ----------------------------------------------------------------- evaluate

def materialized_text_tree(tiny_dataset, tmp_path, methods=("word_delete", "keyboard")):
    ds = load_caption_dataset(tiny_dataset["images_dir"], tiny_dataset["captions_file"])
    full = build_manifest("text", 11, dataset_id="fixture")
    entries = tuple(e for e in full.entries if e.method in methods)
    manifest = BenchmarkManifest("fixture", 11, entries)
    out = tmp_path / "evaltree"
    materialize_benchmark(ds, manifest, services=ServiceBundle.stubs(), out_dir=out)
    return ds, out


def test_evaluate_exact_match_adapter(tiny_dataset, tmp_path):
    ds, tree = materialized_text_tree(tiny_dataset, tmp_path)
    adapter = ExactMatchRetrievalAdapter(ds)
    report = evaluate(adapter, ds, tree, metadata={"dataset_id": "fixture"})
    assert report.clean["r@1"] == 100.0
    for method, severities in report.per_method_severity.items():
        for values in severities.values():
            assert values["r@1"] <= 100.0
    assert set(report.mmi_scores) == set(report.metric_names)
    assert report.mmi_scores["r@1"] >= 0.0


def test_evaluate_empty_tree_raises(tiny_dataset, tmp_path):
    ds = load_caption_dataset(tiny_dataset["images_dir"], tiny_dataset["captions_file"])
    empty = tmp_path / "empty"
    empty.mkdir()
    with pytest.raises(DataError):
        evaluate(ExactMatchRetrievalAdapter(ds), ds, empty)


def test_report_round_trip_and_formats(tiny_dataset, tmp_path):
    ds, tree = materialized_text_tree(tiny_dataset, tmp_path)
    report = evaluate(ExactMatchRetrievalAdapter(ds), ds, tree,
                      metadata={"dataset_id": "fixture", "seed": 11})
    loaded = BenchmarkReport.from_json(report.to_json())
    assert loaded == report

    paths = emit_report(report, tmp_path / "out")
    names = {p.name for p in paths}
    assert names == {"report.csv", "report_plot.csv", "report.json", "report.md"}

    csv_text = report_csv(report)
    lines = csv_text.strip().splitlines()
    n_methods = len(report.per_method_severity)
    expected_rows = (
        1 + len(report.metric_names)          # header + clean rows
        + n_methods * 5 * len(report.metric_names)  # per severity
        + n_methods * len(report.metric_names)      # per-method averages
        + len(report.metric_names)                  # mmi rows
    )
    assert len(lines) == expected_rows


def test_markdown_marks_row_extremes_once(tiny_dataset, tmp_path):
    per_method_avg = {"m1": {"r@1": 10.0}, "m2": {"r@1": 30.0}, "m3": {"r@1": 20.0}}
    report = BenchmarkReport(
        dataset_id="fixture", capability="retrieval", metric_names=("r@1",),
        clean={"r@1": 50.0},
        per_method_severity={m: {"1": v} for m, v in per_method_avg.items()},
        per_method_avg=per_method_avg,
        mmi_scores={"r@1": 0.6}, metadata={},
    )
    md = report_markdown(report)
    assert md.count("**") == 2  # one bolded max
    assert md.count("<u>") == 1 and md.count("</u>") == 1  # one underlined min
    assert "**30.0**" in md and "<u>10.0</u>" in md


# ---------------------------------------------------------------------- MOR

def synthetic_scene(seed):
    rng = np.random.default_rng(seed)
    return (rng.random((32, 32, 3)) * 255).astype(np.uint8)


def test_mor_pipeline_scripted_counts(tmp_path):
    gt_dir = tmp_path / "gt"
    char_dir = tmp_path / "perturbed" / "keyboard"
    sent_dir = tmp_path / "perturbed" / "formal"
    for d in (gt_dir, char_dir, sent_dir):
        d.mkdir(parents=True)

    detector = ScriptedDetector()
    labels = {}
    n_images = 10
    for i in range(n_images):
        image_id = f"scene{i}"
        labels[image_id] = ["dog", "cake", "tree"]
        gt_img = synthetic_scene(i)
        char_img = synthetic_scene(1000 + i)
        sent_img = synthetic_scene(2000 + i)
        Image.fromarray(gt_img).save(gt_dir / f"{image_id}.png")
        Image.fromarray(char_img).save(char_dir / f"{image_id}.png")
        Image.fromarray(sent_img).save(sent_dir / f"{image_id}.png")

        def dets(labels_present, score=0.9):
            return [Detection(l, score, (1, 1, 5, 5)) for l in labels_present]

        detector.register(gt_img, dets(["dog", "cake", "tree"]))
        # character-level scenes lose ~1 object per image; sentence-level keep all
        detector.register(char_img, dets(["dog", "cake"]))
        detector.register(sent_img, dets(["dog", "cake", "tree"]))

    table = mor_pipeline(gt_dir, {"keyboard": char_dir, "formal": sent_dir},
                         labels, detector, thresholds=(0.7, 0.5))
    for threshold in (0.7, 0.5):
        row = table[threshold]
        assert row["GT"] == 0.0
        # hand-computed: N_GT = 30, keyboard N_P = 20 -> -33.33; formal 0.0
        assert row["keyboard"] == pytest.approx(100 * (20 - 30) / 30)
        assert row["formal"] == 0.0
        assert row["keyboard"] < row["formal"]


def test_mor_threshold_filters_scripted_detection(tmp_path):
    gt_dir = tmp_path / "gt"
    p_dir = tmp_path / "p" / "m"
    gt_dir.mkdir()
    p_dir.mkdir(parents=True)
    gt = synthetic_scene(0)
    pp = synthetic_scene(1)
    Image.fromarray(gt).save(gt_dir / "a.png")
    Image.fromarray(pp).save(p_dir / "a.png")
    detector = ScriptedDetector()
    detector.register(gt, [Detection("dog", 0.9, (0, 0, 4, 4))])
    detector.register(pp, [Detection("dog", 0.65, (0, 0, 4, 4))])
    table = mor_pipeline(gt_dir, {"m": p_dir}, {"a": ["dog"]}, detector)
    assert table[0.7]["m"] == pytest.approx(-100.0)  # 0.65 filtered out
    assert table[0.5]["m"] == pytest.approx(0.0)     # kept at 0.5


def test_mor_identical_sets_all_zero(tmp_path):
    gt_dir = tmp_path / "gt"
    gt_dir.mkdir()
    img = synthetic_scene(5)
    Image.fromarray(img).save(gt_dir / "x.png")
    detector = ScriptedDetector()
    detector.register(img, [Detection("dog", 0.8, (0, 0, 3, 3))])
    table = mor_pipeline(gt_dir, {"same": gt_dir}, {"x": ["dog"]}, detector)
    assert table[0.7]["same"] == 0.0 and table[0.5]["same"] == 0.0


# --------------------------------------------------------------------- SSIM

def test_audit_ssim_identity_tree(tiny_dataset, tmp_path):
    images_dir = tiny_dataset["images_dir"]
    tree = tmp_path / "tree" / "none" / "s1"
    tree.mkdir(parents=True)
    for path in Path(images_dir).glob("*.png"):
        data = Image.open(path)
        data.save(tree / f"{path.stem}__none__s1.png")
    audit = audit_ssim(images_dir, tmp_path / "tree")
    assert audit["table"]["none"][1] == pytest.approx(1.0)
    text = format_ssim_table(audit)
    assert text.splitlines()[0] == "severity,none"


def test_audit_ssim_gaussian_trend(tiny_dataset, tmp_path):
    ds = load_caption_dataset(tiny_dataset["images_dir"], tiny_dataset["captions_file"])
    manifest = small_image_manifest(methods=("gaussian_noise",))
    out = tmp_path / "tree"
    materialize_benchmark(ds, manifest, services=ServiceBundle.stubs(), out_dir=out)
    audit = audit_ssim(tiny_dataset["images_dir"], out)
    per_severity = audit["table"]["gaussian_noise"]
    values = [per_severity[s] for s in sorted(per_severity)]
    assert all(a >= b for a, b in zip(values, values[1:]))
    assert values[0] > values[-1]
