"""Gridded calibration lookup with bilinear interpolation.

Grids are rectangular (frequency x duty cycle), strictly increasing on both
axes, and immutable after construction. Queries outside the convex hull raise
CalibrationRangeError; there is no silent extrapolation.
"""

from __future__ import annotations

import numpy as np

from .errors import CalibrationRangeError


class BilinearTable:
    """Rectangular (freq, dc) -> value lookup with bilinear interpolation.

    Besides the value grid, an optional auxiliary grid (e.g. per-point ESD)
    and a per-point provenance grid can be attached; both are indexed the
    same way as the values.
    """

    def __init__(self, freqs, dcs, values, aux=None, provenance=None):
        self.freqs = np.asarray(freqs, dtype=float)
        self.dcs = np.asarray(dcs, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if self.values.shape != (self.freqs.size, self.dcs.size):
            raise ValueError(
                f"value grid shape {self.values.shape} does not match axes "
                f"({self.freqs.size}, {self.dcs.size})"
            )
        if np.any(np.diff(self.freqs) <= 0) or np.any(np.diff(self.dcs) <= 0):
            raise ValueError("grid axes must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid values must be finite")
        self.aux = None if aux is None else np.asarray(aux, dtype=float)
        if provenance is None:
            self.provenance = np.full(self.values.shape, "digitized", dtype=object)
        else:
            self.provenance = np.asarray(provenance, dtype=object)

    def _locate(self, axis: np.ndarray, x: float, name: str) -> tuple[int, float]:
        if not (axis[0] <= x <= axis[-1]):
            raise CalibrationRangeError(
                f"{name}={x:g} outside calibration range [{axis[0]:g}, {axis[-1]:g}]"
            )
        i = int(np.searchsorted(axis, x, side="right")) - 1
        if i == axis.size - 1:  # exactly on the upper edge
            return i - 1, 1.0
        return i, (x - axis[i]) / (axis[i + 1] - axis[i])

    def __call__(self, freq: float, dc: float) -> float:
        i, u = self._locate(self.freqs, freq, "freq")
        j, w = self._locate(self.dcs, dc, "dc")
        v = self.values
        return float(
            v[i, j] * (1 - u) * (1 - w)
            + v[i + 1, j] * u * (1 - w)
            + v[i, j + 1] * (1 - u) * w
            + v[i + 1, j + 1] * u * w
        )

    def node_provenance(self, freq: float, dc: float) -> str:
        """Provenance of the grid node at (freq, dc); the point must be a node."""
        i = int(np.argmin(np.abs(self.freqs - freq)))
        j = int(np.argmin(np.abs(self.dcs - dc)))
        if not (np.isclose(self.freqs[i], freq) and np.isclose(self.dcs[j], dc)):
            raise CalibrationRangeError(f"({freq}, {dc}) is not a grid node")
        return str(self.provenance[i, j])
