"""Propagator containers shared by the free-space and band-gap solvers.

A propagator ``m`` maps the initial excited-state amplitudes ``(c3, c2)`` to
``(A3(t), A2(t)) = m @ (c3, c2)``. The ground-state amplitude never enters
because ``|a1, 0>`` is uncoupled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Propagator:
    t: float
    m: np.ndarray

    def apply(self, c3, c2):
        return self.m @ np.array([c3, c2], dtype=complex)

    def column_norms(self):
        return np.linalg.norm(self.m, axis=0)


@dataclass(frozen=True)
class PropagatorTrack:
    """Propagator sampled on a uniform time grid; ``m`` has shape (n, 2, 2)."""

    times: np.ndarray
    m: np.ndarray

    def __post_init__(self):
        if self.m.shape != (len(self.times), 2, 2):
            raise ValueError(f"shape mismatch: {self.m.shape} vs {len(self.times)} times")

    def __len__(self):
        return len(self.times)

    def __getitem__(self, i):
        return Propagator(float(self.times[i]), self.m[i])

    @property
    def dt(self):
        return float(self.times[1] - self.times[0])

    def amplitudes(self, c3, c2):
        """Return (A3, A2) series of shape (n,) each."""
        a = self.m @ np.array([c3, c2], dtype=complex)
        return a[:, 0], a[:, 1]
