"""Parameter checkpoint container.

Layout: magic "BHNC" | version u8 | header-length u32 LE | header JSON (spec +
metadata) | payload-length u64 LE | float32 LE parameters | sha256 of all
preceding bytes.
"""

from __future__ import annotations

import hashlib
import json
import struct
from typing import Any

import numpy as np

from .spec import NetSpec

MAGIC = b"BHNC"
VERSION = 1


class CheckpointError(ValueError):
    """Raised on malformed or corrupted checkpoint files."""


def save_checkpoint(
    path: str, spec: NetSpec, params: np.ndarray, meta: dict[str, Any] | None = None
) -> None:
    if params.size != spec.param_count():
        raise CheckpointError(
            f"params length {params.size} != spec param count {spec.param_count()}"
        )
    header = json.dumps(
        {"spec": spec.to_json(), "meta": meta or {}}, sort_keys=True
    ).encode("utf-8")
    payload = np.ascontiguousarray(params, dtype="<f4").tobytes()
    blob = (
        MAGIC
        + struct.pack("<B", VERSION)
        + struct.pack("<I", len(header))
        + header
        + struct.pack("<Q", len(payload))
        + payload
    )
    digest = hashlib.sha256(blob).digest()
    with open(path, "wb") as fh:
        fh.write(blob + digest)


def load_checkpoint(path: str) -> tuple[NetSpec, np.ndarray, dict[str, Any]]:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < len(MAGIC) + 1 + 4 + 8 + 32:
        raise CheckpointError("file too short to be a checkpoint")
    body, digest = blob[:-32], blob[-32:]
    if hashlib.sha256(body).digest() != digest:
        raise CheckpointError("checksum mismatch: checkpoint is corrupted")
    if body[:4] != MAGIC:
        raise CheckpointError(f"bad magic {body[:4]!r}")
    version = body[4]
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    header_len = struct.unpack("<I", body[5:9])[0]
    header_end = 9 + header_len
    header = json.loads(body[9:header_end].decode("utf-8"))
    payload_len = struct.unpack("<Q", body[header_end : header_end + 8])[0]
    payload = body[header_end + 8 : header_end + 8 + payload_len]
    if len(payload) != payload_len:
        raise CheckpointError("truncated payload")
    spec = NetSpec.from_json(header["spec"])
    params = np.frombuffer(payload, dtype="<f4").astype(np.float32)
    if params.size != spec.param_count():
        raise CheckpointError(
            f"payload has {params.size} floats, spec wants {spec.param_count()}"
        )
    return spec, params, header.get("meta", {})
