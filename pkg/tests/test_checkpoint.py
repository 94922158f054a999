import json
import struct

import numpy as np
import pytest

from glyphforge.checkpoint import load_checkpoint, save_checkpoint
from glyphforge.errors import CheckpointInvalid
from glyphforge.model import ModelConfig, init_model, param_shapes


@pytest.fixture()
def saved(tmp_path, tiny_config):
    params = init_model(tiny_config)
    path = tmp_path / "ck"
    digest = save_checkpoint(path, tiny_config, params, phase=2, step=42)
    return path, tiny_config, params, digest


def test_roundtrip(saved):
    path, config, params, digest = saved
    ck = load_checkpoint(path)
    assert ck.phase == 2 and ck.step == 42
    assert ck.content_hash == digest
    assert ck.config == config
    for name in params:
        assert np.array_equal(ck.params[name], params[name])


def test_header_is_self_describing(saved):
    path, config, params, _ = saved
    header = json.loads(path.read_bytes().split(b"\n", 1)[0])
    assert header["format"] == "glyphforge-checkpoint/1"
    assert header["config"]["architecture"]["kernel"] == 4
    names = [a["name"] for a in header["arrays"]]
    assert names == list(param_shapes(config))


def test_length_prefixes_are_8_byte_le(saved):
    path, config, params, _ = saved
    blob = path.read_bytes()
    payload = blob.split(b"\n", 1)[1]
    first = params["enc0.w"]
    (nbytes,) = struct.unpack_from("<Q", payload, 0)
    assert nbytes == first.size * 8


def test_tampered_payload_rejected(saved):
    path, *_ = saved
    blob = bytearray(path.read_bytes())
    blob[-2] ^= 0x1
    path.write_bytes(bytes(blob))
    with pytest.raises(CheckpointInvalid, match="hash"):
        load_checkpoint(path)


def test_wrong_declared_shape_rejected(saved, tmp_path):
    path, *_ = saved
    header, payload = path.read_bytes().split(b"\n", 1)
    doc = json.loads(header)
    doc["arrays"][0]["shape"] = [1, 1, 4, 4]
    bad = tmp_path / "bad"
    bad.write_bytes(json.dumps(doc).encode() + b"\n" + payload)
    with pytest.raises(CheckpointInvalid, match="shape"):
        load_checkpoint(bad)


def test_truncated_payload_rejected(saved, tmp_path):
    path, *_ = saved
    blob = path.read_bytes()
    bad = tmp_path / "bad"
    bad.write_bytes(blob[:-16])
    with pytest.raises(CheckpointInvalid):
        load_checkpoint(bad)


def test_name_mismatch_on_save(tmp_path, tiny_config):
    params = init_model(tiny_config)
    params.pop("enc0.b")
    with pytest.raises(CheckpointInvalid):
        save_checkpoint(tmp_path / "x", tiny_config, params, 1, 0)


def test_float32_roundtrip(tmp_path):
    config = ModelConfig(8, 2, 4, 64, 2, seed=1, dtype="float32")
    params = init_model(config)
    save_checkpoint(tmp_path / "ck32", config, params, 1, 7)
    ck = load_checkpoint(tmp_path / "ck32")
    assert ck.params["enc0.w"].dtype == np.float32
    assert np.array_equal(ck.params["enc0.w"], params["enc0.w"])
