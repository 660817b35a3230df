"""Compensated accumulation for reproducible long sums."""

import numpy as np

__all__ = ["CompensatedSum"]


class CompensatedSum:
    """Neumaier-compensated accumulator, elementwise over a fixed shape.

    Partial sums are combined through an error-free two-sum, so a fixed
    chunk order reproduces bit-identical totals run to run.
    """

    def __init__(self, shape=()):
        self._s = np.zeros(shape)
        self._c = np.zeros(shape)

    def add(self, x):
        x = np.asarray(x, dtype=float)
        t = self._s + x
        big = np.abs(self._s) >= np.abs(x)
        # lost low-order bits of whichever addend was smaller
        self._c += np.where(big, (self._s - t) + x, (x - t) + self._s)
        self._s = t

    @property
    def total(self):
        out = self._s + self._c
        return out if out.ndim else float(out)
