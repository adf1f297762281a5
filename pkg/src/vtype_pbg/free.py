"""Closed-form amplitudes of a V-type atom in free space.

With a flat reservoir the memory kernels collapse to delta functions and the
amplitudes obey

    dA3/dt = -g31 A3 - exp(i w32 t) gbar A2
    dA2/dt = -g21 A2 - exp(-i w32 t) gbar A3,     gbar = sqrt(g31 g21).

The solution is ``A3 = exp(-g31 t) sum_j C_j exp(q_j t)`` and
``A2 = exp(-(g31 + i w32) t) sum_j B_j exp(q_j t)``, with q_j the roots of
``q**2 - lam q - gbar**2 = 0`` and ``lam = g31 - g21 + i w32``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .propagator import Propagator, PropagatorTrack

DEGENERATE_TOL = 1e-8


@dataclass(frozen=True)
class FreeParams:
    gamma31: float = 1.0
    gamma21: float = 1.0
    omega32: float = 0.5

    def __post_init__(self):
        if not self.gamma31 > 0:
            raise InvalidInputError("gamma31 must be positive")
        if not self.gamma21 >= 0:
            raise InvalidInputError("gamma21 must be nonnegative")

    @property
    def lam(self) -> complex:
        return self.gamma31 - self.gamma21 + 1j * self.omega32

    @property
    def gbar(self) -> float:
        return float(np.sqrt(self.gamma31 * self.gamma21))


def _exponents(p: FreeParams):
    lam, gbar = p.lam, p.gbar
    disc = np.sqrt(0.25 * lam * lam + gbar * gbar)
    q1 = 0.5 * lam + disc
    if q1 == 0:
        return q1, 0.5 * lam - disc
    # q1 q2 = -gbar^2 avoids cancellation in q2
    return q1, -gbar * gbar / q1


def free_track(times, p: FreeParams) -> PropagatorTrack:
    t = np.asarray(times, dtype=float)
    if np.any(t < 0):
        raise InvalidInputError("times must be nonnegative")
    m = np.empty((t.size, 2, 2), dtype=complex)
    gbar = p.gbar
    env3 = np.exp(-p.gamma31 * t)
    env2 = np.exp(-(p.gamma31 + 1j * p.omega32) * t)

    if gbar < DEGENERATE_TOL:
        # levels decouple; A2 keeps its own decay, the e^{-i w32 t} phase
        # of the level-2 frame cancels against lam
        m[:] = 0
        m[:, 0, 0] = env3
        m[:, 1, 1] = np.exp(-p.gamma21 * t)
        return PropagatorTrack(t, m)

    q1, q2 = _exponents(p)
    if abs(q1 - q2) < DEGENERATE_TOL * max(1.0, abs(q1)):
        # confluent case: a(t) = e^{qt} (a0 + (a0' - q a0) t), c = -a'/gbar
        q = 0.5 * (q1 + q2)
        e = np.exp(q * t)
        for col, (c3, c2) in enumerate(((1.0, 0.0), (0.0, 1.0))):
            a0, da0 = c3, -gbar * c2
            slope = da0 - q * a0
            a = e * (a0 + slope * t)
            da = e * (q * a0 + slope * (1 + q * t))
            m[:, 0, col] = env3 * a
            m[:, 1, col] = env2 * (-da / gbar)
        return PropagatorTrack(t, m)

    e1, e2 = np.exp(q1 * t), np.exp(q2 * t)
    for col, (c3, c2) in enumerate(((1.0, 0.0), (0.0, 1.0))):
        C1 = (q2 * c3 + gbar * c2) / (q2 - q1)
        C2 = (q1 * c3 + gbar * c2) / (q1 - q2)
        B1 = -q1 * C1 / gbar
        B2 = -q2 * C2 / gbar
        m[:, 0, col] = env3 * (C1 * e1 + C2 * e2)
        m[:, 1, col] = env2 * (B1 * e1 + B2 * e2)
    return PropagatorTrack(t, m)


def propagator_free(t, p: FreeParams) -> Propagator:
    return free_track(np.array([float(t)]), p)[0]
