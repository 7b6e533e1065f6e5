"""Secondary acceptance: protocol parity, embed self-similarity, and the
directional fidelity-gate check (word-level severity-1 perturbations of 50
fixture captions pass the alpha0 = 0.75 gate at a rate >= 80% with the
server's embedder)."""

import numpy as np
import pytest

from mmrobust.fidelity import FidelityConfig, cosine_similarity, fidelity_gate
from mmrobust.services import HashedBagOfWordsEmbedder, HttpEmbedClient, \
    HttpTransformClient, ServiceBundle, ServiceEndpointConfig
from mmrobust.services_contract import run_all_checks
from mmrobust.text_perturb import perturb_words

WORD_MODES = ("synonym_replace", "insert", "swap", "delete", "punctuate")

FIXTURE_CAPTIONS = [
    "An orange metal bowl strainer filled with apples.",
    "A brown dog running across a grassy green field.",
    "Two children playing with a red ball in the park.",
    "A woman riding a bicycle down a quiet street.",
    "Several boats floating on the calm blue water.",
    "A plate of pasta with tomato sauce and cheese.",
    "The old wooden bench under a large shady tree.",
    "A man wearing a black jacket near the station.",
    "A small kitten sleeping on a warm window ledge.",
    "Fresh bread and fruit arranged on a kitchen table.",
]


def fifty_fixture_captions():
    captions = []
    for i in range(50):
        captions.append(FIXTURE_CAPTIONS[i % len(FIXTURE_CAPTIONS)])
    return captions


def test_protocol_parity_server_and_stubs(server_url):
    bundle = ServiceBundle.from_urls(server_url, server_url, server_url, server_url)
    run_all_checks(bundle, transform_identity=False)
    run_all_checks(ServiceBundle.stubs(), transform_identity=True)
    print("PASS - shared contract suite green against server and stubs")


def test_embed_self_similarity(server_url):
    client = HttpEmbedClient(ServiceEndpointConfig(server_url))
    for text in FIXTURE_CAPTIONS[:5]:
        a, b = client.embed([text, text])
        assert abs(cosine_similarity(a, b) - 1.0) <= 1e-6
    print("PASS - /v1/embed self-similarity 1.0 +- 1e-6")


def test_word_level_gate_pass_rate(server_url):
    client = HttpEmbedClient(ServiceEndpointConfig(server_url))
    cfg = FidelityConfig(alpha0=0.75, n_max=100)
    cache = {}
    accepted = 0
    total = 0
    for index, caption in enumerate(fifty_fixture_captions()):
        mode = WORD_MODES[index % len(WORD_MODES)]
        rng = np.random.default_rng(index)

        def generator():
            return perturb_words(caption, mode, 1, int(rng.integers(0, 2 ** 63)))

        outcome = fidelity_gate(caption, generator, client, cfg, cache=cache)
        accepted += outcome.accepted
        total += 1
    rate = accepted / total
    assert total == 50
    assert rate >= 0.80, f"gate pass rate {rate:.2f} below 0.80"
    print(f"PASS - word-level severity-1 gate pass rate {rate:.2f} >= 0.80")


def test_back_translation_keeps_similarity(server_url):
    transform = HttpTransformClient(ServiceEndpointConfig(server_url))
    stub = HashedBagOfWordsEmbedder()
    source = "An orange metal bowl strainer filled with apples."
    out = transform.transform(source, "back_translate")
    assert out and out[0].isupper() and out.endswith(".")
    a, b = stub.embed([source, out])
    assert cosine_similarity(a, b) > 0.5
    print("PASS - back-translation output fluent and similar (stub cosine > 0.5)")
