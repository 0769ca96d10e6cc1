"""Named deterministic random streams derived from one episode seed.

Each consumer (traffic placement, route branching, ...) pulls from its own
stream so adding draws in one subsystem never perturbs another. Stream
states are hashable into a canonical digest for bitwise replay checks.
"""
from __future__ import annotations

import hashlib
import json

import numpy as np

_SEED_MASK = (1 << 63) - 1


def _stream_key(name: str) -> int:
    return int.from_bytes(hashlib.sha256(name.encode("utf-8")).digest()[:8], "big")


class RngStreams:
    def __init__(self, seed: int):
        self.seed = int(seed) & _SEED_MASK
        self._streams: dict[str, np.random.Generator] = {}

    def stream(self, name: str) -> np.random.Generator:
        gen = self._streams.get(name)
        if gen is None:
            ss = np.random.SeedSequence([self.seed, _stream_key(name)])
            gen = np.random.Generator(np.random.PCG64(ss))
            self._streams[name] = gen
        return gen

    def state_digest(self) -> str:
        """Canonical hash of seed plus the state of every stream drawn so far."""
        doc = {
            "seed": self.seed,
            "streams": {
                name: gen.bit_generator.state
                for name, gen in sorted(self._streams.items())
            },
        }
        blob = json.dumps(doc, sort_keys=True, default=str)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()
