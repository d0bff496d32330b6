"""Wire protocol between the gateway and browser clients.

JSON messages with a `type` discriminator, protocol version "1".
Client -> server: hello, action, record, ping.
Server -> client: welcome, frame, recorded, metrics, pong, error.
Frames carry base64 of raw uint8 RGB (width*height*3 bytes, row-major).
"""

from __future__ import annotations

import base64
import json
from typing import Any

import numpy as np

PROTOCOL_VERSION = "1"

CLIENT_TYPES = ("hello", "action", "record", "ping")
MODES = ("play", "spectate", "dashboard")


class ProtocolError(ValueError):
    def __init__(self, code: str, detail: str):
        super().__init__(detail)
        self.code = code
        self.detail = detail


def parse_client_message(raw: str) -> dict[str, Any]:
    try:
        msg = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ProtocolError("bad_message", f"unparseable JSON: {exc}") from exc
    if not isinstance(msg, dict):
        raise ProtocolError("bad_message", "message must be a JSON object")
    mtype = msg.get("type")
    if mtype not in CLIENT_TYPES:
        raise ProtocolError("bad_message", f"unknown message type {mtype!r}")
    if mtype == "hello":
        if msg.get("mode") not in MODES:
            raise ProtocolError("bad_message", f"unknown mode {msg.get('mode')!r}")
    elif mtype == "action":
        if not isinstance(msg.get("x"), int) or not isinstance(msg.get("y"), int):
            raise ProtocolError("bad_message", "action needs integer x and y")
    elif mtype == "record":
        if msg.get("command") not in ("start", "stop"):
            raise ProtocolError("bad_message", "record command must be start or stop")
    return msg


def encode_pixels(obs: np.ndarray, width: int, height: int, channels: int) -> str:
    """Observation buffer -> base64 of uint8 RGB, grayscale replicated."""
    img = np.asarray(obs, dtype=np.float32).reshape(height, width, channels)
    if channels == 1:
        img = np.repeat(img, 3, axis=2)
    rgb = np.clip(np.rint(img * 255.0), 0, 255).astype(np.uint8)
    return base64.b64encode(rgb.tobytes()).decode("ascii")


def welcome_message(session_id: str, env_config: dict | None) -> dict[str, Any]:
    return {
        "type": "welcome",
        "session_id": session_id,
        "env_config": env_config,
        "protocol_version": PROTOCOL_VERSION,
    }


def frame_message(
    step: int,
    obs: np.ndarray,
    width: int,
    height: int,
    channels: int,
    ammo: int | None,
    last_reward: float,
    episode_return: float,
    done: bool,
) -> dict[str, Any]:
    return {
        "type": "frame",
        "step": step,
        "pixels": encode_pixels(obs, width, height, channels),
        "width": width,
        "height": height,
        "ammo": ammo,
        "last_reward": last_reward,
        "episode_return": episode_return,
        "done": done,
        "crosshair": None,  # filled by the session with [x, y]
    }


def error_message(code: str, detail: str) -> dict[str, Any]:
    return {"type": "error", "code": code, "detail": detail}
