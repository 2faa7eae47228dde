"""Labelled random streams derived from one master seed."""

import zlib
from typing import Dict

import numpy as np

FEATURE_INIT = "feature_init"
GRF = "grf"
MONITOR = "monitor"
WRS_FEATURES = "wrs_features"
WRS_INTERIOR = "wrs_interior"
REGEN = "regen"


class RandomStreams:
    """
    Factory of independent generators keyed by phase label.

    The same (seed, label) pair always yields the same stream, so changing how
    one phase draws numbers never shifts the numbers another phase sees.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._cache: Dict[str, np.random.Generator] = {}

    def fresh(self, label: str) -> np.random.Generator:
        """Return a new generator positioned at the start of ``label``'s stream."""
        key = zlib.crc32(label.encode("utf-8"))
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(key,)))

    def get(self, label: str) -> np.random.Generator:
        """Return the shared generator for ``label``, creating it on first use."""
        if label not in self._cache:
            self._cache[label] = self.fresh(label)
        return self._cache[label]

    def child(self, suffix: str) -> "RandomStreams":
        """Streams whose labels are all suffixed, e.g. per time step."""
        return _SuffixedStreams(self, suffix)


class _SuffixedStreams(RandomStreams):
    def __init__(self, parent: RandomStreams, suffix: str):
        super().__init__(parent.seed)
        self._parent = parent
        self._suffix = suffix

    def fresh(self, label: str) -> np.random.Generator:
        return self._parent.fresh(f"{label}/{self._suffix}")
