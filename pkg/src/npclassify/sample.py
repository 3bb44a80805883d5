"""Labeled-sample container shared by estimators and distributions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Sample:
    """n labeled points (x_i, y_i) with x_i in R^d.

    ``x`` has shape (n, d) and ``y`` shape (n,).  Labels are usually 0/1
    but real-valued targets are accepted (the local least-squares solver
    does not care).  Treated as immutable after construction.
    """

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim != 2:
            raise ValueError("sample x must be a 2-d array of shape (n, d)")
        if y.shape != (x.shape[0],):
            raise ValueError("sample y must have shape (n,)")
        if x.shape[0] == 0:
            raise ValueError("sample must contain at least one point")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def dim(self) -> int:
        return self.x.shape[1]
