import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np
import pytest

from mmrobust.errors import (
    DataError,
    MalformedResponseError,
    ServiceUnavailableError,
    UnknownMethodError,
)
from mmrobust.fidelity import cosine_similarity
from mmrobust.services import (
    Detection,
    HashedBagOfWordsEmbedder,
    HttpEmbedClient,
    LutStylizer,
    STYLE_FIXTURE_TABLE,
    ScriptedDetector,
    ServiceBundle,
    ServiceEndpointConfig,
    StubTransformer,
    decode_image_png_b64,
    encode_image_png_b64,
)
from mmrobust.services_contract import run_all_checks


def test_stub_bundle_passes_contract_suite():
    run_all_checks(ServiceBundle.stubs(), transform_identity=True)


def test_embedder_unit_norm_and_determinism():
    embedder = HashedBagOfWordsEmbedder()
    v1, v2 = embedder.embed(["hello world", "hello world"])
    assert np.allclose(v1, v2)
    assert np.linalg.norm(v1) == pytest.approx(1.0)
    assert v1.shape == (256,)


def test_embedder_overlap_monotonicity():
    embedder = HashedBagOfWordsEmbedder()
    a, b, c = embedder.embed(["a b c", "a b d", "x y z"])
    assert cosine_similarity(a, b) > cosine_similarity(a, c)


def test_detection_validation():
    with pytest.raises(ValueError):
        Detection("dog", 1.5, (0, 0, 5, 5))
    with pytest.raises(ValueError):
        Detection("dog", 0.5, (0, 0, 0, 5))


def test_scripted_detector_threshold_and_prompt_filter(small_images):
    detector = ScriptedDetector()
    img = small_images[0]
    detector.register(img, [
        Detection("dog", 0.65, (1, 1, 10, 10)),
        Detection("cake", 0.9, (5, 5, 8, 8)),
        Detection("tree", 0.95, (2, 2, 4, 4)),
    ])
    # threshold 0.7 filters the 0.65 detection; 0.5 keeps it
    found = detector.detect(img, "dog. cake", 0.7)
    assert [d.label for d in found] == ["cake"]
    found = detector.detect(img, "dog. cake", 0.5)
    assert sorted(d.label for d in found) == ["cake", "dog"]
    # prompt vocabulary filters the unlisted label, comma join accepted
    found = detector.detect(img, "dog, cake", 0.5)
    assert sorted(d.label for d in found) == ["cake", "dog"]
    with pytest.raises(DataError):
        detector.detect(img, "", 0.5)


def test_stub_transformer_identity_and_fixture():
    identity = StubTransformer()
    assert identity.transform("some caption", "formal") == "some caption"
    with pytest.raises(UnknownMethodError):
        identity.transform("text", "emoji")
    fixture = StubTransformer(STYLE_FIXTURE_TABLE)
    source = "An orange metal bowl strainer filled with apples."
    assert fixture.transform(source, "back_translate") == \
        "Apples are placed in an orange metal bowl strainer."
    assert fixture.transform(source, "formal") == \
        "An orange metal bowl strainer contains apples."


def test_lut_stylizer_properties(small_images):
    stylizer = LutStylizer()
    img = small_images[0]
    for severity in range(1, 6):
        out = stylizer.stylize(img, severity)
        assert out.shape == img.shape
        assert np.array_equal(out, stylizer.stylize(img, severity))
    assert not np.array_equal(stylizer.stylize(img, 1), img)
    gray = np.full((16, 16, 3), 128, np.uint8)
    assert stylizer.stylize(gray, 3).shape == gray.shape


def test_png_b64_round_trip(small_images):
    img = small_images[0]
    assert np.array_equal(decode_image_png_b64(encode_image_png_b64(img)), img)


# ---------------------------------------------------------------- HTTP layer

class _Handler(BaseHTTPRequestHandler):
    behavior = "ok"
    fail_once = {"count": 0}

    def do_POST(self):
        length = int(self.headers["Content-Length"])
        payload = json.loads(self.rfile.read(length))
        if self.behavior == "flaky" and _Handler.fail_once["count"] < 1:
            _Handler.fail_once["count"] += 1
            self.send_response(503)
            self.end_headers()
            return
        if self.behavior == "reject":
            body = json.dumps({"error": "bad request"}).encode()
            self.send_response(400)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)
            return
        vectors = [[1.0, 0.0] for _ in payload["texts"]]
        body = json.dumps({"dim": 2, "vectors": vectors}).encode()
        self.send_response(200)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture()
def http_server():
    server = HTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}"
    server.shutdown()


def test_http_embed_client_round_trip(http_server):
    _Handler.behavior = "ok"
    client = HttpEmbedClient(ServiceEndpointConfig(http_server, retries=1))
    vectors = client.embed(["a", "b"])
    assert len(vectors) == 2 and vectors[0].shape == (2,)


def test_http_client_retries_5xx_then_succeeds(http_server):
    _Handler.behavior = "flaky"
    _Handler.fail_once["count"] = 0
    client = HttpEmbedClient(ServiceEndpointConfig(http_server, retries=2))
    vectors = client.embed(["a"])
    assert len(vectors) == 1


def test_http_client_4xx_not_retried(http_server):
    _Handler.behavior = "reject"
    client = HttpEmbedClient(ServiceEndpointConfig(http_server, retries=2))
    with pytest.raises(MalformedResponseError):
        client.embed(["a"])
    _Handler.behavior = "ok"


def test_http_client_unreachable_raises_service_unavailable():
    client = HttpEmbedClient(
        ServiceEndpointConfig("http://127.0.0.1:9", timeout_ms=200, retries=1))
    with pytest.raises(ServiceUnavailableError):
        client.embed(["a"])


def test_bundle_from_env_prefers_urls(monkeypatch):
    env = {
        "MMR_EMBED_URL": "http://x/e", "MMR_DETECT_URL": "http://x/d",
        "MMR_TRANSFORM_URL": "http://x/t", "MMR_STYLIZE_URL": "http://x/s",
    }
    bundle = ServiceBundle.from_env(env)
    assert bundle.backed_by == "http"
    assert ServiceBundle.from_env({}).backed_by == "stub"
