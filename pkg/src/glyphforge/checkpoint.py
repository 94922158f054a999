"""Checkpoint container: canonical-JSON header plus length-prefixed arrays.

Layout: one header line (format version, full model config including the
fixed architecture metadata, ordered array table with declared shapes and
dtypes, training phase tag, step counter, content hash), then each array as
an 8-byte little-endian byte-length prefix followed by raw little-endian
data in the header's declared order.
"""

import hashlib
import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CheckpointInvalid
from .model import ModelConfig, param_shapes

FORMAT = "glyphforge-checkpoint/1"

_DTYPES = {"float32": "<f4", "float64": "<f8"}


@dataclass
class Checkpoint:
    config: ModelConfig
    params: dict
    phase: int
    step: int
    content_hash: str


def _header_json(config, params, phase, step, content_hash=None) -> str:
    doc = {
        "format": FORMAT,
        "config": config.to_dict(),
        "phase": phase,
        "step": step,
        "arrays": [
            {"name": name, "shape": list(arr.shape), "dtype": str(arr.dtype)}
            for name, arr in params.items()
        ],
    }
    if content_hash is not None:
        doc["content_hash"] = content_hash
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def _payload(params, dtype_code) -> bytes:
    parts = []
    for arr in params.values():
        raw = np.ascontiguousarray(arr, dtype=dtype_code).tobytes()
        parts.append(struct.pack("<Q", len(raw)))
        parts.append(raw)
    return b"".join(parts)


def save_checkpoint(path, config: ModelConfig, params: dict, phase: int, step: int) -> str:
    """Write the container; returns its content hash."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    expected = param_shapes(config)
    if list(params.keys()) != list(expected.keys()):
        raise CheckpointInvalid("parameter names do not match the config's parameter table")
    payload = _payload(params, _DTYPES[config.dtype])
    unhashed = _header_json(config, params, phase, step).encode("utf-8")
    content_hash = hashlib.sha256(unhashed + b"\n" + payload).hexdigest()
    header = _header_json(config, params, phase, step, content_hash).encode("utf-8")
    with open(path, "wb") as f:
        f.write(header)
        f.write(b"\n")
        f.write(payload)
    return content_hash


def load_checkpoint(path) -> Checkpoint:
    path = Path(path)
    with open(path, "rb") as f:
        header = f.readline()
        payload = f.read()
    try:
        doc = json.loads(header.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointInvalid(f"unreadable checkpoint header in {path}: {exc}") from exc
    if doc.get("format") != FORMAT:
        raise CheckpointInvalid(f"{path} is not a {FORMAT} file")
    config = ModelConfig.from_dict(doc["config"])
    expected = param_shapes(config)
    table = doc["arrays"]
    names = [entry["name"] for entry in table]
    if names != list(expected.keys()):
        raise CheckpointInvalid(f"array table {names} does not match config parameters")
    dtype_code = _DTYPES[config.dtype]

    params = {}
    offset = 0
    for entry in table:
        shape = tuple(entry["shape"])
        if shape != expected[entry["name"]]:
            raise CheckpointInvalid(
                f"array {entry['name']} declares shape {shape}, config requires {expected[entry['name']]}"
            )
        if entry["dtype"] != config.dtype:
            raise CheckpointInvalid(f"array {entry['name']} dtype {entry['dtype']} != config {config.dtype}")
        if offset + 8 > len(payload):
            raise CheckpointInvalid(f"truncated payload before {entry['name']}")
        (nbytes,) = struct.unpack_from("<Q", payload, offset)
        offset += 8
        want = int(np.prod(shape)) * np.dtype(dtype_code).itemsize
        if nbytes != want or offset + nbytes > len(payload):
            raise CheckpointInvalid(f"array {entry['name']} length {nbytes} != expected {want}")
        arr = np.frombuffer(payload, dtype=dtype_code, count=int(np.prod(shape)), offset=offset)
        params[entry["name"]] = arr.reshape(shape).copy()
        offset += nbytes
    if offset != len(payload):
        raise CheckpointInvalid(f"{len(payload) - offset} trailing bytes after arrays")

    unhashed = _header_json(config, params, doc["phase"], doc["step"]).encode("utf-8")
    digest = hashlib.sha256(unhashed + b"\n" + payload).hexdigest()
    if digest != doc.get("content_hash"):
        raise CheckpointInvalid(f"content hash mismatch in {path}")
    for name, arr in params.items():
        if not np.isfinite(arr).all():
            raise CheckpointInvalid(f"array {name} contains non-finite values")
    return Checkpoint(config=config, params=params, phase=doc["phase"], step=doc["step"],
                      content_hash=doc["content_hash"])
