"""Protocol contract checks shared by the deterministic stubs and any real
server implementation: either side must pass every check unchanged."""

from __future__ import annotations

import numpy as np

from .fidelity import cosine_similarity

__all__ = ["run_embed_checks", "run_transform_checks", "run_stylize_checks",
           "run_detect_checks", "run_all_checks"]


def _sample_image(seed=0, size=48) -> np.ndarray:
    rng = np.random.default_rng(seed)
    img = rng.random((size, size, 3)) * 0.7 + 0.15
    img[size // 4: size // 2, size // 4: size // 2] = (0.9, 0.2, 0.2)
    return (img * 255).astype(np.uint8)


def run_embed_checks(embedder) -> None:
    texts = ["a dog in the park", "a dog in the park", "completely different words"]
    vectors = embedder.embed(texts)
    assert len(vectors) == 3
    dims = {np.asarray(v).shape for v in vectors}
    assert len(dims) == 1, "embedding dimension must be constant"
    assert np.allclose(vectors[0], vectors[1]), "identical texts -> identical vectors"
    self_sim = cosine_similarity(vectors[0], vectors[1])
    assert abs(self_sim - 1.0) <= 1e-6
    near = cosine_similarity(
        np.asarray(embedder.embed(["a b c"])[0]), np.asarray(embedder.embed(["a b d"])[0])
    )
    far = cosine_similarity(
        np.asarray(embedder.embed(["a b c"])[0]), np.asarray(embedder.embed(["x y z"])[0])
    )
    assert near > far, "overlap must raise similarity"


def run_transform_checks(transformer, expect_identity: bool = False) -> None:
    text = "An orange metal bowl strainer filled with apples."
    for style in ("formal", "casual", "passive", "active", "back_translate"):
        out = transformer.transform(text, style)
        assert isinstance(out, str) and out
        if expect_identity:
            assert out == text
        repeat = transformer.transform(text, style)
        assert repeat == out, "transforms must be deterministic"
    raised = False
    try:
        transformer.transform(text, "shakespearean")
    except Exception:
        raised = True
    assert raised, "unknown style must be rejected"


def run_stylize_checks(stylizer) -> None:
    img = _sample_image()
    for severity in (1, 5):
        out = np.asarray(stylizer.stylize(img, severity))
        assert out.shape == img.shape
        assert out.dtype == np.uint8
        again = np.asarray(stylizer.stylize(img, severity))
        assert np.array_equal(out, again), "stylize must be deterministic"
    assert not np.array_equal(np.asarray(stylizer.stylize(img, 5)), img), \
        "stylize must not be the identity on non-constant images"


def run_detect_checks(detector) -> None:
    blank = np.zeros((48, 48, 3), np.uint8)
    detections = detector.detect(blank, "dog. cake. broccoli", 0.99)
    assert detections == [] or all(d.score >= 0.99 for d in detections)
    raised = False
    try:
        detector.detect(blank, "", 0.5)
    except Exception:
        raised = True
    assert raised, "empty prompt must be rejected"


def run_all_checks(bundle, transform_identity: bool = False) -> None:
    run_embed_checks(bundle.embedder)
    run_transform_checks(bundle.transformer, expect_identity=transform_identity)
    run_stylize_checks(bundle.stylizer)
    run_detect_checks(bundle.detector)
