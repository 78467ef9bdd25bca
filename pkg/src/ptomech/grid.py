"""Parameter axes and the ordered parallel map shared by grid scans."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import SpecError

SCALES = ("linear", "log")


def default_workers() -> int:
    raw = os.environ.get("PTOMECH_WORKERS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise SpecError(f"PTOMECH_WORKERS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise SpecError(f"PTOMECH_WORKERS must be a positive integer, got {raw!r}")
    return n


@dataclass(frozen=True)
class Axis:
    """A swept parameter: ``steps`` points between ``lo`` and ``hi``."""

    name: str
    lo: float
    hi: float
    steps: int
    scale: str = "linear"

    def __post_init__(self):
        if self.steps < 2:
            raise SpecError(f"axis {self.name!r}: steps must be >= 2")
        if self.scale not in SCALES:
            raise SpecError(f"axis {self.name!r}: scale must be one of {SCALES}")
        if self.scale == "log" and not (self.lo > 0 and self.hi > 0):
            raise SpecError(f"axis {self.name!r}: log scale requires positive bounds")

    @property
    def values(self) -> np.ndarray:
        """Grid values; equal bounds collapse to a single point."""
        if self.lo == self.hi:
            return np.array([float(self.lo)])
        if self.scale == "log":
            return np.geomspace(self.lo, self.hi, self.steps)
        return np.linspace(self.lo, self.hi, self.steps)

    def to_dict(self) -> dict:
        return {"name": self.name, "lo": self.lo, "hi": self.hi, "steps": self.steps, "scale": self.scale}


def ordered_map(func, items, workers: int = 1, chunksize: int = 1) -> list:
    """``[func(x) for x in items]``, optionally spread over processes.

    Output order always follows ``items``.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items, chunksize=chunksize))
