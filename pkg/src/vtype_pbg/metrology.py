"""Symmetric logarithmic derivatives and the (theta, phi) Fisher matrix.

The Fisher matrix uses ``F_ij = 1/2 tr(rho {L_i, L_j})`` so that a pure
state gives the familiar ``4 (<d psi|d psi> - |<psi|d psi>|^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularFisherError, SldInconsistencyError
from .numerics import eigh3

RANK_TOL = 1e-12
QFIM_HALF = 0.5  # set to 1.0 for the unsymmetrised convention


@dataclass(frozen=True)
class QFIMatrix:
    f_tt: float
    f_tp: float
    f_pp: float

    def as_array(self):
        return np.array([[self.f_tt, self.f_tp], [self.f_tp, self.f_pp]])


@dataclass(frozen=True)
class SigmaMin:
    """Scalar quantum Cramer-Rao bounds for joint estimation.

    ``value`` is ``tr(F^-1)``, the bound on the summed variances;
    ``min_eigenvalue`` is the smallest eigenvalue of ``F^-1``.
    """

    value: float
    min_eigenvalue: float

    def __float__(self):
        return self.value


def _sld_eigenbasis(w, v, drho, rank_tol):
    dt = np.swapaxes(v.conj(), -1, -2) @ drho @ v
    s = w[..., :, None] + w[..., None, :]
    keep = s > rank_tol
    l_eig = np.where(keep, 2.0 * dt / np.where(keep, s, 1.0), 0.0)
    return l_eig, keep


def sld(rho, drho, rank_tol=RANK_TOL, check=True):
    """SLD operator(s) solving ``drho = (rho L + L rho) / 2`` on the support.

    Components whose eigenvalue pair sums to at most ``rank_tol`` are set to
    zero. Works on a single 3x3 matrix or a stack.
    """
    es = eigh3(rho)
    w, v = es.eigenvalues, es.eigenvectors
    l_eig, keep = _sld_eigenbasis(w, v, np.asarray(drho, dtype=complex), rank_tol)
    vh = np.swapaxes(v.conj(), -1, -2)
    L = v @ l_eig @ vh
    if check:
        # residual in the eigenbasis, restricted to pairs on the support
        dt = vh @ drho @ v
        s = w[..., :, None] + w[..., None, :]
        resid = np.where(keep, dt - 0.5 * s * l_eig, 0.0)
        defect = float(np.max(np.abs(resid))) if resid.size else 0.0
        if defect > 1e-6:
            raise SldInconsistencyError(f"SLD residual {defect:.3g} on the support of rho")
    return L


def qfim(rho, drho_theta, drho_phi, rank_tol=RANK_TOL):
    """Fisher matrix entries; returns a QFIMatrix or, for stacks, an (n, 2, 2) array."""
    es = eigh3(rho)
    w, v = es.eigenvalues, es.eigenvectors
    lt, _ = _sld_eigenbasis(w, v, np.asarray(drho_theta, dtype=complex), rank_tol)
    lp, _ = _sld_eigenbasis(w, v, np.asarray(drho_phi, dtype=complex), rank_tol)
    # tr(rho L_i L_j) in the eigenbasis of rho: sum_jk w_j (L_i)_jk (L_j)_kj
    w_ = w[..., :, None]

    def pair(a, b):
        ab = np.sum(w_ * a * np.swapaxes(b, -1, -2), axis=(-2, -1))
        ba = np.sum(w_ * b * np.swapaxes(a, -1, -2), axis=(-2, -1))
        return QFIM_HALF * (ab + ba).real

    f_tt, f_tp, f_pp = pair(lt, lt), pair(lt, lp), pair(lp, lp)
    if np.ndim(f_tt) == 0:
        return QFIMatrix(float(f_tt), float(f_tp), float(f_pp))
    return np.stack([np.stack([f_tt, f_tp], -1), np.stack([f_tp, f_pp], -1)], -2)


def cramer_rao_single(F):
    """Single-parameter bounds ``(1/sqrt(F_tt), 1/sqrt(F_pp))``; inf when unidentifiable."""
    f = F.as_array() if isinstance(F, QFIMatrix) else np.asarray(F)
    with np.errstate(divide="ignore"):
        ftt, fpp = f[..., 0, 0], f[..., 1, 1]
        dth = np.where(ftt > 0, 1.0 / np.sqrt(np.where(ftt > 0, ftt, 1.0)), np.inf)
        dph = np.where(fpp > 0, 1.0 / np.sqrt(np.where(fpp > 0, fpp, 1.0)), np.inf)
    if np.ndim(dth) == 0:
        return float(dth), float(dph)
    return dth, dph


def sigma_min(F, det_tol=1e-14) -> SigmaMin:
    """Joint-estimation bound for a single Fisher matrix."""
    f = F.as_array() if isinstance(F, QFIMatrix) else np.asarray(F, dtype=float)
    det = f[0, 0] * f[1, 1] - f[0, 1] * f[1, 0]
    if det <= det_tol:
        raise SingularFisherError(f"Fisher matrix determinant {det:.3g} <= {det_tol:g}")
    inv = np.array([[f[1, 1], -f[0, 1]], [-f[1, 0], f[0, 0]]]) / det
    return SigmaMin(float(np.trace(inv)), float(np.linalg.eigvalsh(inv)[0]))


def sigma_min_series(F, det_tol=1e-14):
    """Vectorised ``sigma_min`` over a stack; singular entries become inf."""
    f = np.asarray(F, dtype=float)
    det = f[..., 0, 0] * f[..., 1, 1] - f[..., 0, 1] * f[..., 1, 0]
    ok = det > det_tol
    safe = np.where(ok, det, 1.0)
    tr = (f[..., 0, 0] + f[..., 1, 1]) / safe
    # smallest eigenvalue of F^-1 is 1 / largest eigenvalue of F
    half = 0.5 * (f[..., 0, 0] + f[..., 1, 1])
    gap = np.sqrt((0.5 * (f[..., 0, 0] - f[..., 1, 1])) ** 2 + f[..., 0, 1] ** 2)
    lam_max = half + gap
    with np.errstate(divide="ignore"):
        mn = np.where(ok, 1.0 / np.where(lam_max > 0, lam_max, 1.0), np.inf)
    return np.where(ok, tr, np.inf), mn
