"""Independent checks of the closed-form propagators.

Two routes that share no code with the solvers:

* ``check_kernel_consistency`` plugs a sampled propagator back into the
  time-domain integro-differential equations and reports the residual.
* ``mode_sum_evolve`` discretises the reservoir into explicit modes and
  integrates the single-excitation Schroedinger equation directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import make_interp_spline

from .errors import IntegrationError, InvalidInputError
from .free import FreeParams
from .pbg import BETA_32, PbgParams
from .propagator import PropagatorTrack


@dataclass(frozen=True)
class ReservoirMode:
    omega_k: float
    g_k: float

    def __post_init__(self):
        if self.g_k < 0:
            raise InvalidInputError("coupling must be nonnegative")


def _env_of(params):
    if isinstance(params, PbgParams):
        return "pbg"
    if isinstance(params, FreeParams):
        return "free"
    raise InvalidInputError(f"unknown parameter type {type(params).__name__}")


class _Spline:
    """Quintic spline of A in ``s = sqrt(t)`` (``root=True``) or in ``t``.

    Near t = 0 the band-edge amplitudes go like ``1 + c t^{3/2}``, which is a
    polynomial in ``s``; an interpolant in ``t`` would smear the kink.
    """

    def __init__(self, t, y, root=True):
        self._root = root
        s = np.sqrt(t) if root else t
        self._re = make_interp_spline(s, y.real, k=5)
        self._im = make_interp_spline(s, y.imag, k=5)

    def __call__(self, t):
        s = np.sqrt(t) if self._root else t
        return self._re(s) + 1j * self._im(s)

    def derivative(self, t):
        if not self._root:
            return self._re(t, 1) + 1j * self._im(t, 1)
        s = np.sqrt(t)
        d1 = self._re(s, 1) + 1j * self._im(s, 1)
        d2 = self._re(s, 2) + 1j * self._im(s, 2)
        # dA/dt = B'(s) / (2 s), with the limit B''(0) / 2 at the origin
        safe = np.where(s > 0, s, 1.0)
        return np.where(s > 0, d1 / (2.0 * safe), 0.5 * d2)


def _memory(t, amp, omega_c, n_nodes, scale):
    """int_0^t G(t - t') A(t') dt' for the band-edge kernel, on every grid time.

    With u = sqrt(t - t') the 1/sqrt(t - t') singularity disappears:
    integral = 2 e^{-i pi/4} / sqrt(pi) * int_0^sqrt(t) e^{i w u^2} A(t - u^2) du.
    """
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    root = np.sqrt(t)[:, None]
    u = 0.5 * root * (x + 1.0)
    tp = np.clip(t[:, None] - u * u, 0.0, None)
    vals = amp(tp.ravel()).reshape(tp.shape)
    integrand = np.exp(1j * omega_c * u * u) * vals
    pref = scale * BETA_32 * 2.0 * np.exp(-0.25j * np.pi) / np.sqrt(np.pi)
    return pref * 0.5 * root[:, 0] * (integrand @ w)


def check_kernel_consistency(track: PropagatorTrack, params, env=None, *,
                             form="symmetric", coupling_scale=1.0, n_nodes=96,
                             t_max=None):
    """Relative sup-norm residual of the amplitude equations along ``track``.

    For the band gap the equations are

        dA3/dt = -int G3 A3 - e^{+i w32 t} int G2 A2
        dA2/dt = -int G2 A2 - e^{-i w32 t} int G3 A3

    with ``G_j(tau) = beta^1.5 e^{i (w_jc tau - pi/4)} / sqrt(pi tau)``.
    ``form="printed"`` uses ``A2`` in the last convolution instead, for
    comparison. In free space the kernels are local and the check reduces to
    the rate equations.

    The residual is divided by ``max(sup|dA/dt|, sup|A|)`` per column and
    the worst column/equation is returned.
    """
    env = env or _env_of(params)
    if form not in ("symmetric", "printed"):
        raise InvalidInputError(f"unknown form {form!r}")
    t = np.asarray(track.times, dtype=float)
    if t.size < 8:
        raise InvalidInputError("need at least 8 grid points")
    dt = track.dt
    if dt > 0.01 + 1e-12:
        raise InvalidInputError(f"grid spacing {dt} too coarse (need <= 0.01)")
    # t = 0 is skipped: the memory terms vanish there and the one-sided
    # derivative of a t^{3/2} onset is not resolved by any interpolant
    keep = t > 0
    if t_max is not None:
        keep &= t <= t_max + 1e-12
    w32 = params.omega32
    phase = np.exp(1j * w32 * t)

    worst = 0.0
    for col in range(2):
        a3, a2 = track.m[:, 0, col], track.m[:, 1, col]
        root = env != "free"
        s3, s2 = _Spline(t, a3, root), _Spline(t, a2, root)
        d3, d2 = s3.derivative(t), s2.derivative(t)
        if env == "free":
            g31, g21, gbar = params.gamma31, params.gamma21, params.gbar
            r3 = d3 + coupling_scale * (g31 * a3 + phase * gbar * a2)
            r2 = d2 + coupling_scale * (g21 * a2 + np.conj(phase) * gbar * a3)
        else:
            m33 = _memory(t, s3, params.omega3c, n_nodes, coupling_scale)
            m22 = _memory(t, s2, params.omega2c, n_nodes, coupling_scale)
            cross = m33 if form == "symmetric" else \
                _memory(t, s2, params.omega3c, n_nodes, coupling_scale)
            r3 = d3 + m33 + phase * m22
            r2 = d2 + m22 + np.conj(phase) * cross
        scale = max(np.max(np.abs(d3[keep])), np.max(np.abs(d2[keep])),
                    np.max(np.abs(a3[keep])), np.max(np.abs(a2[keep])))
        res = max(np.max(np.abs(r3[keep])), np.max(np.abs(r2[keep]))) / scale
        worst = max(worst, float(res))
    return worst


def reservoir_modes(params, n_modes, band_halfwidth):
    """Discrete reservoir: detunings from level 3 and the couplings to each level.

    Free space: flat band of half-width ``band_halfwidth`` centred between the
    two transitions, ``g^2 = gamma * d_omega / pi``.

    Band gap: modes above the edge at ``xi = v^2`` with ``v`` evenly spaced up
    to ``sqrt(band_halfwidth)``; with this spacing the ``xi^{-1/2}`` density of
    states gives equal weights ``g^2 = 2 beta^1.5 dv / pi``. Returns
    ``(detuning, g31, g21, level_shift)`` where ``level_shift`` compensates
    the part of the band above the cut-off.
    """
    if n_modes < 500:
        raise InvalidInputError("n_modes must be at least 500")
    if isinstance(params, FreeParams):
        centre = -0.5 * params.omega32
        dw = 2.0 * band_halfwidth / n_modes
        det = centre - band_halfwidth + dw * (np.arange(n_modes) + 0.5)
        g31 = np.full(n_modes, math.sqrt(params.gamma31 * dw / math.pi))
        g21 = np.full(n_modes, math.sqrt(params.gamma21 * dw / math.pi))
        return det, g31, g21, 0.0
    vmax = math.sqrt(band_halfwidth)
    dv = vmax / n_modes
    v = dv * (np.arange(n_modes) + 0.5)
    det = v * v - params.omega3c
    g = np.full(n_modes, math.sqrt(2.0 * BETA_32 * dv / math.pi))
    # the band beyond xi_max would shift both levels by -2 beta^1.5 / (pi sqrt(xi_max))
    shift = -2.0 * BETA_32 / (math.pi * vmax)
    return det, g, g.copy(), shift


def mode_list(params, n_modes, band_halfwidth):
    """The discretised reservoir as ``ReservoirMode`` records (detuning, level-3 coupling)."""
    det, g31, _, _ = reservoir_modes(params, n_modes, band_halfwidth)
    return tuple(ReservoirMode(float(w), float(g)) for w, g in zip(det, g31))


@dataclass(frozen=True)
class ModeSumRun:
    track: PropagatorTrack
    norm_defect: float  # max |total norm - 1| over the output grid


def default_band_halfwidth(params) -> float:
    """160 gamma in free space, xi_max = 400 beta in the band gap."""
    return 160.0 * max(params.gamma31, params.gamma21) if isinstance(params, FreeParams) else 400.0


def mode_sum_run(params, t_grid, n_modes=2000, band_halfwidth=None,
                 max_substep=0.005, max_phase=0.15, norm_tol=1e-6) -> ModeSumRun:
    """Integrate the atom plus discretised reservoir for both basis columns.

    Fixed-step integrating-factor RK4: the free mode phases are carried
    exactly, the couplings are stepped with classical RK4. Raises
    ``IntegrationError`` once the total norm leaves 1 by more than ``norm_tol``.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid[0] != 0 or np.any(np.diff(t_grid) <= 0):
        raise InvalidInputError("t_grid must start at 0 and increase")
    if band_halfwidth is None:
        band_halfwidth = default_band_halfwidth(params)
    det, g31, g21, shift = reservoir_modes(params, n_modes, band_halfwidth)
    w32 = params.omega32
    n = n_modes + 2
    # diagonal energies in the level-3 frame: level 3, level 2, modes
    energy = np.concatenate([[shift, -w32 + shift], det])

    def coupling(y):
        # y shape (n, 2): rows 0, 1 atom levels, rows 2.. modes
        out = np.empty_like(y)
        out[0] = -g31 @ y[2:]
        out[1] = -g21 @ y[2:]
        out[2:] = g31[:, None] * y[0] + g21[:, None] * y[1]
        if shift:
            # level shift is diagonal, but it also couples the two levels
            out[0] += -1j * shift * y[1]
            out[1] += -1j * shift * y[0]
        return out

    y = np.zeros((n, 2), dtype=complex)
    y[0, 0] = 1.0
    y[1, 1] = 1.0
    m = np.empty((t_grid.size, 2, 2), dtype=complex)
    m[0] = np.eye(2)
    # interaction-picture couplings oscillate at the mode detunings
    h_max = min(max_substep, max_phase / max(1.0, float(np.max(np.abs(energy)))))
    t_now = 0.0
    defect = 0.0
    for i in range(1, t_grid.size):
        span = t_grid[i] - t_now
        steps = max(1, int(math.ceil(span / h_max - 1e-9)))
        h = span / steps
        half = np.exp(-0.5j * energy * h)[:, None]
        for _ in range(steps):
            k1 = coupling(y)
            k2 = coupling(half * (y + 0.5 * h * k1))
            k3 = coupling(half * y + 0.5 * h * k2)
            k4 = coupling(half * half * y + h * half * k3)
            y = half * half * y + (h / 6.0) * (half * half * k1 + 2.0 * half * (k2 + k3) + k4)
        t_now = t_grid[i]
        norms = np.sum(np.abs(y) ** 2, axis=0)
        defect = max(defect, float(np.max(np.abs(norms - 1.0))))
        if defect > norm_tol:
            raise IntegrationError(f"norm drifted to {norms} at t={t_now}")
        m[i, 0, :] = y[0]
        m[i, 1, :] = y[1] * np.exp(-1j * w32 * t_now)
    return ModeSumRun(PropagatorTrack(t_grid, m), defect)


def mode_sum_track(params, t_grid, n_modes=2000, band_halfwidth=None, **kw) -> PropagatorTrack:
    return mode_sum_run(params, t_grid, n_modes, band_halfwidth, **kw).track


def mode_sum_evolve(params, c3, c2, t_grid, n_modes=2000, band_halfwidth=None, **kw):
    """Amplitudes (A3, A2) for initial upper-level amplitudes (c3, c2)."""
    return mode_sum_track(params, t_grid, n_modes, band_halfwidth, **kw).amplitudes(c3, c2)
