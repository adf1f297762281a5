"""Exact amplitudes of a V-type atom in an isotropic photonic band gap.

Units: the coupling constant beta is 1, so frequencies are in beta and times
in 1/beta. Both transitions couple to the reservoir with equal strength.

The Laplace-domain amplitudes share the denominator

    D(s) = s (s - i w32) + (2 s - i w32) K(s),   K(s) = 1 / Y(s),

with ``Y(s)**2 = i s + w3c``. ``Z`` and ``H`` below are ``D`` written with
the principal square root and with a flipped radical sign respectively.
Inverting the transform gives a residue sum over the zeros of ``D`` on the
physical sheet, plus a continuum integral along the cut ``s = i w3c - r``
(r > 0) that hangs off the branch point ``s = i w3c``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .errors import QuadratureError, SingularPointError
from .numerics import ComplexPolynomial, integrate_semi_infinite, solve_polynomial
from .propagator import Propagator, PropagatorTrack

BETA_32 = 1.0  # beta**1.5 with beta fixed to 1

_SQRT_I = np.exp(0.25j * np.pi)
_SMALL_ROOT = 1e-3  # below this the near-dark pair is seeded analytically
_SPIKE_MAX = 1e-2  # continuum features below this scale get their own panels
_PINCH = 1e-100  # and below this one they are folded into the dark pole
_DARK = 0.5 * np.array([[1.0, -1.0], [-1.0, 1.0]], dtype=complex)


@dataclass(frozen=True)
class PbgParams:
    """Level positions in units of beta.

    omega32 : splitting between the two upper levels.
    omega3c : detuning of level 3 from the band edge; negative is inside the gap.
    """

    omega32: float
    omega3c: float

    @property
    def omega2c(self) -> float:
        return self.omega3c - self.omega32


@dataclass(frozen=True)
class ModeRoot:
    """A pole of the amplitudes on the physical sheet.

    ``y`` is the value of the radical for which ``Z(x) = 0`` holds with that
    value substituted, i.e. ``x (x - i w32) y = (2x - i w32) beta**1.5``.
    The sheet label follows the sign of ``Re(y)``: principal radical means
    sheet Z, negated principal radical means sheet H.
    """

    x: complex
    y: complex

    @property
    def sheet(self) -> str:
        return "Z" if self.y.real > 0 else "H"


@dataclass(frozen=True)
class ModeRoots:
    roots: tuple
    rejected: tuple = ()

    @property
    def z_roots(self):
        return [r.x for r in self.roots if r.sheet == "Z"]

    @property
    def h_roots(self):
        return [r.x for r in self.roots if r.sheet == "H"]

    def __len__(self):
        return len(self.roots)


def sqrt_shifted(x, p: PbgParams):
    """Principal ``sqrt(i x + w3c)`` (nonnegative real part)."""
    return np.sqrt(1j * np.asarray(x, dtype=complex) + p.omega3c)


def eval_ZH(x, sheet, p: PbgParams, radical=None):
    """Evaluate ``Z`` or ``H`` and its x-derivative.

    ``radical`` overrides the principal ``sqrt(i x + w3c)``; it is needed at
    points lying on the principal cut, where the sheet is defined by
    continuity rather than by the principal value.
    """
    if sheet not in ("Z", "H"):
        raise ValueError(f"sheet must be 'Z' or 'H', got {sheet!r}")
    x = complex(x)
    y = sqrt_shifted(x, p) if radical is None else complex(radical)
    if y == 0:
        raise SingularPointError(f"x = {x} is the branch point")
    sign = -1.0 if sheet == "Z" else 1.0
    lin = 2 * x - 1j * p.omega32
    value = x * (x - 1j * p.omega32) + sign * lin * BETA_32 / y
    dy = 0.5j / y
    deriv = lin + sign * BETA_32 * (2.0 / y - lin * dy / y ** 2)
    return value, deriv


def _quintic(p: PbgParams) -> ComplexPolynomial:
    # x = i (w3c - y^2) turns Z(x) y = 0 into a polynomial of degree 5 in y
    x = Polynomial([1j * p.omega3c, 0.0, -1j])
    y = Polynomial([0.0, 1.0])
    poly = x * (x - 1j * p.omega32) * y - (2 * x - 1j * p.omega32) * BETA_32
    return ComplexPolynomial(poly.coef)


def _is_physical(y) -> bool:
    # The physical radical Y = -y continues sqrt(i s + w3c) from Re(s) > 0
    # with the cut along s = i w3c - r, so arg(Y) lies in (-pi/4, 3pi/4].
    return y.real + y.imag < 0


def _small_pair(p: PbgParams):
    """Seeds for the two roots near y = 0 (the near-dark pole).

    Close to the origin the quintic reduces to ``y**2 + b y - c`` with
    ``c = w3c - w32/2``. Its roots are taken in the cancellation-free form,
    since the companion matrix only resolves them to about sqrt(eps).
    """
    c = p.omega3c - 0.5 * p.omega32
    b = 0.5j * p.omega3c * (p.omega3c - p.omega32) / BETA_32
    disc = np.sqrt(complex(b * b + 4 * c))
    r1 = complex(-0.5 * (b + disc if (np.conj(b) * disc).real >= 0 else b - disc))
    r2 = -c / r1 if c != 0 else 0j
    return r1, complex(r2)


def _spike_scales(p: PbgParams):
    """Distances from the origin of cut-integrand poles pinched against it.

    Each root y of the quintic puts a pole of the continuum integrand at
    ``x = i y**2``; for the two roots near y = 0 that is next to the origin.
    """
    return tuple(abs(y) ** 2 for y in _small_pair(p))


def _pinched(p: PbgParams) -> bool:
    # Below _PINCH the spike and its x**-1.5 tail (weight ~ w32**2 / sqrt(x))
    # stay at exp(-x t) = 1 for any practical t, so the near-dark pole and
    # the spike merge into a non-decaying dark pole.
    return max(_spike_scales(p)) < _PINCH


def _cut_breakpoints(p: PbgParams):
    # panels doubling in sqrt(x) from a quarter of each resolvable spike scale
    pts = []
    for r in _spike_scales(p):
        if _PINCH <= r < _SPIKE_MAX:
            pts.extend(r * 4.0 ** np.arange(-2, int(np.log(1.0 / r) / np.log(4.0)) + 1))
    return sorted(pts)


def _polish(q, dq, y, steps):
    # Newton, keeping a step only when it lowers |q|
    val = q(y)
    for _ in range(steps):
        d = dq(y)
        if d == 0 or val == 0:
            break
        step = val / d
        y_new = y - step
        val_new = q(y_new)
        if abs(val_new) > abs(val):
            break
        y, val = y_new, val_new
        if abs(step) <= 1e-15 * max(1.0, abs(y)):
            break
    return y


def find_mode_roots(p: PbgParams, newton_steps=4) -> ModeRoots:
    """Locate the poles of the amplitudes on the physical sheet."""
    q = _quintic(p)
    dq = q.derivative()
    ys = list(solve_polynomial(q))
    steps = [newton_steps] * len(ys)
    seeds = _small_pair(p)
    pair = []
    if max(abs(y) for y in seeds) < _SMALL_ROOT:
        free = list(range(len(ys)))
        for seed in seeds:
            k = min(free, key=lambda j: abs(ys[j] - seed))
            free.remove(k)
            pair.append(k)
            ys[k], steps[k] = seed, 50
    pinched = _pinched(p)
    accepted, rejected = [], []
    if pinched:
        accepted.append(ModeRoot(x=0.5j * p.omega32, y=0j))
    for k, (y, n) in enumerate(zip(ys, steps)):
        if pinched and k in pair:
            rejected.append(ModeRoot(x=complex(1j * (p.omega3c - y * y)), y=complex(y)))
            continue
        y = _polish(q, dq, y, n)
        root = ModeRoot(x=complex(1j * (p.omega3c - y * y)), y=complex(y))
        (accepted if _is_physical(root.y) else rejected).append(root)
    accepted.sort(key=lambda r: (r.x.imag, r.x.real))
    return ModeRoots(tuple(accepted), tuple(rejected))


def f_functions(x, radical, p: PbgParams):
    """Numerators of the residues, split into the two basis columns.

    Returns a 2x2 array: row 0 is the level-3 numerator, row 1 the level-2
    numerator, columns are the coefficients of ``c3`` and ``c2``. Evaluated
    with the sheet's radical this is f1/f3 (sheet Z) or f2/f4 (sheet H).
    """
    k = -BETA_32 / radical
    return np.array([[x - 1j * p.omega32 + k, -k],
                     [-k, x + k]])


def _root_slope(r: ModeRoot, p: PbgParams):
    # dZ/dx at a root, as in eval_ZH but with 2x - i w32 = 2i (c - y**2):
    # near the branch point that factor is far below the rounding of x
    y = r.y
    lin = 2j * ((p.omega3c - 0.5 * p.omega32) - y * y)
    return lin - BETA_32 * (2.0 / y - lin * 0.5j / y ** 3)


def residue_matrices(p: PbgParams, roots: ModeRoots):
    """Pole positions and 2x2 residue matrices in the level-3 frame."""
    poles = np.array([r.x for r in roots.roots], dtype=complex)
    res = []
    for r in roots.roots:
        if r.y == 0:
            # pinched near-dark pole: the dark state, not decaying
            res.append(_DARK)
            continue
        res.append(f_functions(r.x, r.y, p) / _root_slope(r, p))
    return poles, np.array(res).reshape(len(poles), 2, 2)


def _cut_integrand(p: PbgParams, times):
    w3c, w2c = p.omega3c, p.omega2c
    pref = BETA_32 / (np.pi * _SQRT_I)

    def f(x):
        a = x - 1j * w2c
        b = x - 1j * w3c
        den = x * a * a * b * b - 1j * (2 * x - 1j * (w3c + w2c)) ** 2 * BETA_32 ** 2
        core = pref * np.sqrt(x) / den
        g = np.empty(x.shape + (2, 2), dtype=complex)
        g[:, 0, 0] = core * a * a
        g[:, 0, 1] = core * a * b
        g[:, 1, 0] = core * b * a
        g[:, 1, 1] = core * b * b
        damp = np.exp(-np.outer(x, times))
        return damp[:, :, None, None] * g[:, None, :, :]

    return f


def branch_cut_columns(t, p: PbgParams, tol=1e-10, **quad_kw):
    """Continuum contribution R(t) in the lab amplitude frame.

    Column 1 is (R3, R2) for initial amplitudes (1, 0), column 2 for (0, 1).
    Accepts a scalar or a 1-D array of times; returns shape (2, 2) or
    (n, 2, 2).
    """
    times = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(times < 0):
        raise ValueError("times must be nonnegative")
    rate = float(times.min())
    try:
        res = integrate_semi_infinite(_cut_integrand(p, times), decay_rate=rate,
                                      tol=tol, breakpoints=_cut_breakpoints(p), **quad_kw)
    except QuadratureError as exc:
        raise QuadratureError(
            f"branch-cut integral failed for t in [{times.min()}, {times.max()}], "
            f"omega3c={p.omega3c}, omega32={p.omega32}: {exc}", exc.result) from exc
    out = res.value * np.exp(1j * p.omega3c * times)[:, None, None]
    out[:, 1, :] *= np.exp(-1j * p.omega32 * times)[:, None]
    return out[0] if np.ndim(t) == 0 else out


def pbg_track(times, p: PbgParams, roots: ModeRoots | None = None, tol=1e-10) -> PropagatorTrack:
    """Propagator on a grid of times (vectorised over the grid)."""
    times = np.asarray(times, dtype=float)
    if roots is None:
        roots = find_mode_roots(p)
    poles, res = residue_matrices(p, roots)
    m = np.einsum("jt,jab->tab", np.exp(np.outer(poles, times)), res) if len(poles) else \
        np.zeros((len(times), 2, 2), dtype=complex)
    # second row goes back from the level-3 frame to the level-2 frame
    m[:, 1, :] *= np.exp(-1j * p.omega32 * times)[:, None]
    m = m - branch_cut_columns(times, p, tol=tol)
    return PropagatorTrack(times, m)


def propagator_pbg(t, p: PbgParams, roots: ModeRoots | None = None, tol=1e-10) -> Propagator:
    track = pbg_track(np.array([float(t)]), p, roots, tol=tol)
    return track[0]


def residue_sum(t, p: PbgParams, roots: ModeRoots | None = None):
    """Discrete (pole) part of the propagator alone."""
    if roots is None:
        roots = find_mode_roots(p)
    poles, res = residue_matrices(p, roots)
    m = np.einsum("j,jab->ab", np.exp(poles * t), res)
    m[1, :] *= np.exp(-1j * p.omega32 * t)
    return m
