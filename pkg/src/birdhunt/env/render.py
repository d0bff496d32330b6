"""Observation rasterization.

LOW tier: black background, birds as solid 1.0 boxes, crosshair at 0.5.
MEDIUM/HIGH: a fixed RGB gradient backdrop (pure function of the config, so
every reset sees the same one), species-colored boxes, white crosshair pixel.
Rendered boxes are exactly the hitbox pixels, so what looks hittable is.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from .config import BLACK_OUTLINE_GRAY, SPECIES_COLORS, EnvConfig, Species, Tier

if TYPE_CHECKING:
    from .core import EnvState

_CROSSHAIR_GRAY = 0.5

_backdrop_cache: dict[tuple[int, int], np.ndarray] = {}


def backdrop(config: EnvConfig) -> np.ndarray:
    """Fixed RGB gradient, identical for every reset of the same geometry."""
    key = (config.width, config.height)
    cached = _backdrop_cache.get(key)
    if cached is None:
        w, h = config.width, config.height
        gx = np.linspace(0.0, 1.0, w, dtype=np.float32)[None, :]
        gy = np.linspace(0.0, 1.0, h, dtype=np.float32)[:, None]
        img = np.empty((h, w, 3), dtype=np.float32)
        img[:, :, 0] = 0.15 + 0.25 * gx
        img[:, :, 1] = 0.20 + 0.20 * gy
        img[:, :, 2] = 0.45 - 0.15 * gx
        cached = _backdrop_cache[key] = img
    return cached


def _box_pixels(center: float, extent: float, size: int) -> tuple[int, int]:
    lo = max(0, int(np.ceil(center - extent)))
    hi = min(size - 1, int(np.floor(center + extent)))
    return lo, hi


def render_observation(state: "EnvState", config: EnvConfig) -> np.ndarray:
    """Flattened row-major, channel-interleaved float32 buffer in [0,1]."""
    w, h, c = config.width, config.height, config.channels
    if config.tier is Tier.LOW:
        img = np.zeros((h, w, 1), dtype=np.float32)
    else:
        img = backdrop(config).copy()

    for bird in state.birds:
        x0, x1 = _box_pixels(bird.x, bird.extent, w)
        y0, y1 = _box_pixels(bird.y, bird.extent, h)
        if x0 > x1 or y0 > y1:
            continue
        if c == 1:
            img[y0 : y1 + 1, x0 : x1 + 1, 0] = 1.0
        else:
            img[y0 : y1 + 1, x0 : x1 + 1, :] = SPECIES_COLORS[bird.species]
            if bird.species is Species.BLACK:
                # Gray rim, black core: keeps bomb birds visible on dark pixels.
                inner_x0, inner_x1 = _box_pixels(bird.x, bird.extent - 1.0, w)
                inner_y0, inner_y1 = _box_pixels(bird.y, bird.extent - 1.0, h)
                img[y0 : y1 + 1, x0 : x1 + 1, :] = BLACK_OUTLINE_GRAY
                if inner_x0 <= inner_x1 and inner_y0 <= inner_y1:
                    img[inner_y0 : inner_y1 + 1, inner_x0 : inner_x1 + 1, :] = 0.0

    if config.show_crosshair:
        cx, cy = state.crosshair_x, state.crosshair_y
        if c == 1:
            img[cy, cx, 0] = max(img[cy, cx, 0], _CROSSHAIR_GRAY)
        else:
            img[cy, cx, :] = 1.0

    return img.reshape(-1)
