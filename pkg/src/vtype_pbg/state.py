"""Initial states, reduced density matrices and their parameter derivatives.

Basis order is (|a3>, |a2>, |a1>). All functions accept either a single
propagator (2x2) or a stack of them (n, 2, 2) and return matching shapes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

_R3 = 1.0 / np.sqrt(3.0)


class StateKind(enum.Enum):
    TWO_LEVEL = "two_level"
    QUTRIT_HSS = "qutrit_hss"


@dataclass(frozen=True)
class InitialAmplitudes:
    c3: complex
    c2: complex
    c1: complex
    kind: StateKind = StateKind.TWO_LEVEL

    def as_array(self):
        return np.array([self.c3, self.c2, self.c1], dtype=complex)


def _check_angles(theta, phi):
    if not 0.0 <= theta <= np.pi:
        raise InvalidInputError(f"theta={theta} outside [0, pi]")
    if not 0.0 <= phi < 2 * np.pi:
        raise InvalidInputError(f"phi={phi} outside [0, 2pi)")


def initial_amplitudes(theta, phi, kind=StateKind.TWO_LEVEL) -> InitialAmplitudes:
    """Amplitudes of the initial atomic state.

    ``TWO_LEVEL`` is ``cos(theta/2)|a3> + e^{i phi} sin(theta/2)|a2>``;
    ``QUTRIT_HSS`` is the equal superposition ``(|a3> + e^{i phi}|a2> + |a1>)/sqrt(3)``,
    for which ``theta`` is ignored.
    """
    kind = StateKind(kind)
    if kind is StateKind.QUTRIT_HSS:
        _check_angles(theta if theta is not None else 0.0, phi)
        return InitialAmplitudes(_R3, np.exp(1j * phi) * _R3, _R3, kind)
    _check_angles(theta, phi)
    return InitialAmplitudes(np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2), 0.0, kind)


def amplitude_derivatives(c: InitialAmplitudes, theta, phi):
    """Exact derivatives of the initial amplitudes w.r.t. theta and phi.

    Returns two complex arrays ``(d/dtheta, d/dphi)`` ordered (c3, c2, c1).
    In the qutrit family theta is frozen, so its derivative vanishes.
    """
    e = np.exp(1j * phi)
    if c.kind is StateKind.QUTRIT_HSS:
        return np.zeros(3, dtype=complex), np.array([0.0, 1j * e * _R3, 0.0])
    s, co = np.sin(theta / 2), np.cos(theta / 2)
    d_theta = np.array([-0.5 * s, 0.5 * e * co, 0.0], dtype=complex)
    d_phi = np.array([0.0, 1j * e * s, 0.0], dtype=complex)
    return d_theta, d_phi


def _upper(m, c):
    return np.asarray(m) @ np.asarray(c, dtype=complex)[:2]


def density_matrix(m, c: InitialAmplitudes):
    """Reduced atomic state for propagator ``m`` (2x2 or stacked)."""
    a = _upper(m, c.as_array())
    a3, a2 = a[..., 0], a[..., 1]
    c1 = c.c1
    rho = np.zeros(a.shape[:-1] + (3, 3), dtype=complex)
    rho[..., 0, 0] = abs(a3) ** 2
    rho[..., 1, 1] = abs(a2) ** 2
    rho[..., 2, 2] = 1.0 - rho[..., 0, 0] - rho[..., 1, 1]
    rho[..., 0, 1] = a3 * np.conj(a2)
    rho[..., 0, 2] = a3 * np.conj(c1)
    rho[..., 1, 2] = a2 * np.conj(c1)
    for i, j in ((0, 1), (0, 2), (1, 2)):
        rho[..., j, i] = np.conj(rho[..., i, j])
    return rho


def drho_dparam(m, c: InitialAmplitudes, dc):
    """Derivative of ``density_matrix(m, c)`` given the amplitude derivative ``dc``.

    Uses the product rule on ``A = m @ (c3, c2)`` and ``dA = m @ (dc3, dc2)``;
    the ground amplitude is constant in time, so ``dc1`` enters unchanged.
    """
    dc = np.asarray(dc, dtype=complex)
    a = _upper(m, c.as_array())
    da = _upper(m, dc)
    c1, dc1 = c.c1, dc[2]
    out = np.zeros(a.shape[:-1] + (3, 3), dtype=complex)
    # upper block: d(A A^dagger)
    out[..., :2, :2] = da[..., :, None] * np.conj(a[..., None, :]) + \
        a[..., :, None] * np.conj(da[..., None, :])
    out[..., 0, 2] = da[..., 0] * np.conj(c1) + a[..., 0] * np.conj(dc1)
    out[..., 1, 2] = da[..., 1] * np.conj(c1) + a[..., 1] * np.conj(dc1)
    out[..., 2, 0] = np.conj(out[..., 0, 2])
    out[..., 2, 1] = np.conj(out[..., 1, 2])
    out[..., 2, 2] = -(out[..., 0, 0] + out[..., 1, 1]).real
    return out


def check_density_matrix(rho, tol=1e-10, psd_tol=1e-9):
    """Raise ``InvalidInputError`` unless ``rho`` is Hermitian, unit-trace and PSD."""
    rho = np.asarray(rho)
    herm = np.max(np.abs(rho - np.swapaxes(rho.conj(), -1, -2)))
    if herm > tol:
        raise InvalidInputError(f"not Hermitian (defect {herm:.3g})")
    tr = np.max(np.abs(np.trace(rho, axis1=-2, axis2=-1) - 1.0))
    if tr > tol:
        raise InvalidInputError(f"trace deviates from 1 by {tr:.3g}")
    lo = np.min(np.linalg.eigvalsh(rho))
    if lo < -psd_tol:
        raise InvalidInputError(f"negative eigenvalue {lo:.3g}")
