import base64

import pytest
from fastapi.testclient import TestClient

from glyphforge.checkpoint import save_checkpoint
from glyphforge.dataset import write_catalog
from glyphforge.model import ModelConfig, init_model
from glyphforge.service import ServiceConfig, create_app, load_model


@pytest.fixture(scope="module")
def service_env(tmp_path_factory, small_dataset):
    tmp = tmp_path_factory.mktemp("svc")
    manifest, _, _ = small_dataset
    config = ModelConfig(32, 3, 8, 64, 4, seed=4, dtype="float32")
    digest = save_checkpoint(tmp / "ck", config, init_model(config), 2, 100)
    catalog = write_catalog(tmp / "catalog.json", manifest)
    return ServiceConfig(str(tmp / "ck"), str(catalog), max_chars=8, max_steps=11), digest


@pytest.fixture(scope="module")
def client(service_env):
    cfg, _ = service_env
    app = create_app(cfg)
    return TestClient(app)


def test_not_ready_yields_503(service_env):
    cfg, _ = service_env
    app = create_app(cfg, defer_load=True)
    c = TestClient(app)
    assert c.get("/healthz").status_code == 503
    assert c.get("/styles").status_code == 503
    assert c.post("/generate", json={"chars": "的", "weights": [1, 0, 0, 0]}).status_code == 503
    assert c.post("/interpolate", json={"chars": "的", "from": [1, 0, 0, 0],
                                        "to": [0, 1, 0, 0], "steps": 2}).status_code == 503
    load_model(app)
    assert c.get("/healthz").status_code == 200
    assert c.get("/styles").status_code == 200


def test_healthz_reports_checkpoint_hash(client, service_env):
    _, digest = service_env
    doc = client.get("/healthz").json()
    assert doc["status"] == "ok"
    assert doc["checkpoint_hash"] == digest
    assert doc["K"] == 4
    assert doc["input_size"] == 32


def test_styles_document(client):
    doc = client.get("/styles").json()
    assert doc["K"] == 4
    assert [s["id"] for s in doc["styles"]] == [0, 1, 2, 3]
    assert client.get("/styles").json() == doc  # stable across requests


def test_generate_contract(client):
    r = client.post("/generate", json={"chars": "的一A", "weights": [1, 0, 0, 0]})
    assert r.status_code == 200
    doc = r.json()
    assert [img["char"] for img in doc["images"]] == ["的", "一"]
    assert doc["skipped"] == ["A"]
    png = base64.b64decode(doc["images"][0]["png_base64"])
    assert png[:8] == b"\x89PNG\r\n\x1a\n"


def test_generate_deterministic_bytes(client):
    body = {"chars": "的一", "weights": [0.5, 0.5, 0, 0]}
    r1 = client.post("/generate", json=body)
    r2 = client.post("/generate", json=body)
    assert r1.content == r2.content


@pytest.mark.parametrize(
    "body,code",
    [
        ({"chars": "的", "weights": [1, 0]}, "StyleDimMismatch"),
        ({"chars": "", "weights": [1, 0, 0, 0]}, "EmptyChars"),
        ({"chars": "的一是了我不人在有", "weights": [1, 0, 0, 0]}, "TooManyChars"),
    ],
)
def test_generate_validation(client, body, code):
    r = client.post("/generate", json=body)
    assert r.status_code == 400
    assert r.json()["error"] == code


def test_generate_rejects_non_finite_weights(client):
    # raw body: only non-compliant clients can even produce NaN in JSON
    raw = '{"chars": "的", "weights": [1, 0, 0, NaN]}'.encode("utf-8")
    r = client.post("/generate", content=raw, headers={"content-type": "application/json"})
    assert r.status_code == 400
    assert r.json()["error"] == "WeightsNotFinite"


def test_malformed_body_is_400_not_500(client):
    r = client.post("/generate", json={"weights": [1, 0, 0, 0]})
    assert r.status_code == 400
    assert r.json()["error"] == "BadRequest"
    r = client.post("/generate", content=b"not json", headers={"content-type": "application/json"})
    assert r.status_code == 400


def test_interpolate_endpoints_match_generate(client):
    r = client.post(
        "/interpolate",
        json={"chars": "的一", "from": [1, 0, 0, 0], "to": [0, 1, 0, 0], "steps": 5},
    )
    assert r.status_code == 200
    doc = r.json()
    assert len(doc["frames"]) == 5
    first = client.post("/generate", json={"chars": "的一", "weights": [1, 0, 0, 0]}).json()
    last = client.post("/generate", json={"chars": "的一", "weights": [0, 1, 0, 0]}).json()
    assert [i["png_base64"] for i in doc["frames"][0]] == [i["png_base64"] for i in first["images"]]
    assert [i["png_base64"] for i in doc["frames"][-1]] == [i["png_base64"] for i in last["images"]]


def test_interpolate_two_steps_is_exactly_endpoints(client):
    r = client.post("/interpolate", json={"chars": "的", "from": [1, 0, 0, 0],
                                          "to": [0, 0, 0, 1], "steps": 2})
    assert len(r.json()["frames"]) == 2


def test_interpolate_steps_limit(client):
    r = client.post("/interpolate", json={"chars": "的", "from": [1, 0, 0, 0],
                                          "to": [0, 1, 0, 0], "steps": 1000})
    assert r.status_code == 400
    assert r.json()["error"] == "StepsOutOfRange"


def test_statelessness_under_permutation(client):
    a = {"chars": "的", "weights": [1, 0, 0, 0]}
    b = {"chars": "一", "weights": [0, 0.5, 0.5, 0]}
    seq1 = [client.post("/generate", json=a).content,
            client.get("/styles").content,
            client.post("/generate", json=b).content]
    seq2_b = client.post("/generate", json=b).content
    seq2_styles = client.get("/styles").content
    seq2_a = client.post("/generate", json=a).content
    assert seq1 == [seq2_a, seq2_styles, seq2_b]


def test_raw_multipart_format(client):
    r = client.post("/generate?format=raw", json={"chars": "的", "weights": [1, 0, 0, 0]})
    assert r.status_code == 200
    assert r.headers["content-type"].startswith("multipart/mixed")
    assert b"Content-Type: image/png" in r.content
    assert b"\x89PNG" in r.content


def test_mismatched_catalog_k_fails_load(tmp_path, small_dataset):
    manifest, _, _ = small_dataset
    config = ModelConfig(32, 3, 8, 64, 2, seed=0)  # K=2, catalog has 4
    save_checkpoint(tmp_path / "ck", config, init_model(config), 2, 0)
    catalog = write_catalog(tmp_path / "catalog.json", manifest)
    with pytest.raises(ValueError, match="does not match"):
        create_app(ServiceConfig(str(tmp_path / "ck"), str(catalog)))
