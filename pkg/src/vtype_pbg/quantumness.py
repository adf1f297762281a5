"""l1 coherence and the Hilbert-Schmidt speed witness of non-Markovianity."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from .errors import InvalidInputError
from .numerics import derivative_on_grid


@dataclass(frozen=True)
class ObservableTrack:
    name: str
    times: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.shape != v.shape or t.ndim != 1:
            raise InvalidInputError("times and values must be 1-D and equally long")
        if t.size >= 2:
            d = np.diff(t)
            if np.any(d <= 0) or np.max(np.abs(d - d[0])) > 1e-12 * max(1.0, abs(t[-1])):
                raise InvalidInputError("times must be strictly increasing and uniform")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])


def coherence_l1(rho):
    """Sum of the moduli of the off-diagonal entries (single matrix or stack)."""
    a = np.abs(np.asarray(rho))
    return np.sum(a, axis=(-2, -1)) - np.trace(a, axis1=-2, axis2=-1)


def hss(drho_phi):
    """Hilbert-Schmidt speed ``sqrt(tr(drho^2) / 2)`` for a Hermitian derivative."""
    d = np.asarray(drho_phi)
    # tr(X^2) = sum |X_ij|^2 for Hermitian X
    return np.sqrt(0.5 * np.sum(np.abs(d) ** 2, axis=(-2, -1)))


def hss_witness(track: ObservableTrack):
    """Time derivative of an HSS track and the summed positive part.

    Returns ``(chi_track, backflow)`` where ``backflow`` is the integral of
    ``max(chi, 0)`` over the grid (trapezoidal rule). ``chi > 0`` marks
    intervals of information backflow.
    """
    chi = derivative_on_grid(track.values, track.dt)
    backflow = float(trapezoid(np.clip(chi, 0.0, None), track.times))
    out = ObservableTrack("chi", track.times, chi,
                          {"source": track.name, "backflow_integral": backflow,
                           "backflow_integral_is_extension": True})
    return out, backflow
