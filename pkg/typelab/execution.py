"""Strict and parallel evaluation of chunked numerical work."""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from typelab.exceptions import ValidationError

MODES = ("strict", "parallel")


@dataclass(frozen=True)
class Execution:
    """How a computation may be split: ``strict`` is sequential with exact summation."""

    mode: str = "strict"
    threads: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.threads < 1:
            raise ValidationError("threads must be at least 1")

    @property
    def strict(self):
        return self.mode == "strict"

    def total(self, values):
        """Sum of a sequence: exactly rounded in strict mode, pairwise otherwise."""
        values = np.asarray(values, dtype=float).ravel()
        if self.strict:
            return math.fsum(values)
        return float(np.sum(values))

    def map(self, func, items):
        """Apply ``func`` to each item, in order; threads only in parallel mode."""
        items = list(items)
        if self.strict or self.threads == 1 or len(items) < 2:
            return [func(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return list(pool.map(func, items))

    def map_chunks(self, func, array, chunk=4096):
        """Evaluate ``func`` on consecutive slices of ``array`` and concatenate."""
        array = np.asarray(array)
        if array.size == 0:
            return np.asarray(func(array))
        pieces = [array[i:i + chunk] for i in range(0, array.shape[0], chunk)]
        return np.concatenate([np.atleast_1d(r) for r in self.map(func, pieces)])


STRICT = Execution()
