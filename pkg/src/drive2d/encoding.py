"""Observation serialization: palette PNG frames and JSON-safe bundles.

Class-index images are written as palette ("P" mode) PNGs so the bytes
stay small and byte-stable while browsers still see real colors. Decoding
returns the original index array, so encode/decode is lossless.
"""
from __future__ import annotations

import base64
import io

import numpy as np
from PIL import Image

from .bev import PALETTE


def _flat_palette() -> list[int]:
    flat = [c for rgb in PALETTE for c in rgb]
    flat += [0] * (768 - len(flat))
    return flat


def image_to_png(img: np.ndarray) -> bytes:
    """Encode a 2D uint8 class-index image as a palette PNG."""
    if img.ndim != 2 or img.dtype != np.uint8:
        raise ValueError("expected a 2D uint8 image")
    pil = Image.fromarray(img, mode="P")
    pil.putpalette(_flat_palette())
    buf = io.BytesIO()
    pil.save(buf, format="PNG")
    return buf.getvalue()


def png_to_image(data: bytes) -> np.ndarray:
    """Decode a palette PNG back to its 2D uint8 index array."""
    return np.asarray(Image.open(io.BytesIO(data)), dtype=np.uint8)


def encode_payload(value) -> object:
    """JSON-safe form of one observation entry.

    2D uint8 arrays become {"shape", "encoding": "png-base64", "data"};
    other arrays become plain nested lists; scalars pass through.
    """
    if isinstance(value, np.ndarray):
        if value.ndim == 2 and value.dtype == np.uint8:
            png = image_to_png(value)
            return {
                "shape": [int(value.shape[0]), int(value.shape[1])],
                "encoding": "png-base64",
                "data": base64.b64encode(png).decode("ascii"),
            }
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def decode_payload(value) -> object:
    """Inverse of encode_payload for image payloads; lists pass through."""
    if isinstance(value, dict) and value.get("encoding") == "png-base64":
        img = png_to_image(base64.b64decode(value["data"]))
        if list(img.shape) != list(value["shape"]):
            raise ValueError("image payload shape mismatch")
        return img
    return value


def encode_bundle(obs: dict) -> dict:
    return {name: encode_payload(value) for name, value in obs.items()}


def decode_bundle(doc: dict) -> dict:
    return {name: decode_payload(value) for name, value in doc.items()}
