"""Numerical kernels used by the physics modules.

Complex polynomial roots, adaptive quadrature on the half line,
3x3 Hermitian eigendecomposition and finite differences on a uniform grid.
Everything here is a pure function of its inputs.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, QuadratureError

ROOT_RESIDUAL_TOL = 1e-10
QUADRATURE_TOL = 1e-9
HERMITICITY_TOL = 1e-10


@dataclass(frozen=True)
class ComplexPolynomial:
    """Polynomial with complex coefficients in ascending degree order."""

    coefficients: tuple

    def __init__(self, coefficients):
        c = np.atleast_1d(np.asarray(coefficients, dtype=complex))
        nz = np.flatnonzero(c)
        if nz.size == 0:
            raise InvalidInputError("zero polynomial")
        object.__setattr__(self, "coefficients", tuple(c[: nz[-1] + 1]))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, z):
        # np.polyval wants descending order
        return np.polyval(self.coefficients[::-1], z)

    def derivative(self) -> "ComplexPolynomial":
        c = np.asarray(self.coefficients)
        if c.size == 1:
            raise InvalidInputError("derivative of a constant is the zero polynomial")
        return ComplexPolynomial(c[1:] * np.arange(1, c.size))


@dataclass(frozen=True)
class QuadratureResult:
    value: complex | np.ndarray
    error_estimate: float
    evaluations: int


@dataclass(frozen=True)
class EigenSystem3:
    """Eigenvalues (ascending) and eigenvector columns of a Hermitian matrix."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def solve_polynomial(p) -> np.ndarray:
    """Return all roots of ``p`` (with multiplicity).

    Roots come from the eigenvalues of the companion matrix, followed by a
    single Newton step on the original polynomial.

    Parameters
    ----------
    p : ComplexPolynomial or sequence of complex
        Coefficients in ascending degree order.
    """
    if not isinstance(p, ComplexPolynomial):
        p = ComplexPolynomial(p)
    d = p.degree
    if d < 1 or d > 16:
        raise InvalidInputError(f"polynomial degree must be in [1, 16], got {d}")
    c = np.asarray(p.coefficients)
    monic = c[:-1] / c[-1]
    companion = np.zeros((d, d), dtype=complex)
    companion[1:, :-1] = np.eye(d - 1)
    companion[:, -1] = -monic
    roots = np.linalg.eigvals(companion)

    dp = p.derivative()
    val = p(roots)
    der = dp(roots)
    ok = np.abs(der) > 0
    step = np.zeros_like(roots)
    # a near-flat spot can send the step to inf; the check below drops it
    with np.errstate(over="ignore", invalid="ignore"):
        step[ok] = val[ok] / der[ok]
        polished = roots - step
        # keep the polish only where it did not make things worse
        better = np.abs(p(polished)) <= np.abs(val)
    return np.where(better, polished, roots)


# Gauss-Kronrod 7/15 nodes and weights on [-1, 1]
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS = np.zeros(15)
_GAUSS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


def _panel(g, lo, hi):
    half = 0.5 * (hi - lo)
    y = g(0.5 * (hi + lo) + half * _NODES)
    k = half * np.tensordot(_KRONROD, y, axes=(0, 0))
    gs = half * np.tensordot(_GAUSS, y, axes=(0, 0))
    err = float(np.max(np.abs(k - gs))) if np.ndim(k) else float(abs(k - gs))
    return k, err


def integrate_semi_infinite(f, decay_rate=0.0, tol=QUADRATURE_TOL, *,
                            initial_panels=8, max_panels=20000, breakpoints=()):
    """Integrate ``f`` over (0, inf) with adaptive Gauss-Kronrod panels.

    The range is split at ``X = max(30, 30 / decay_rate)``. On ``[0, X]`` the
    substitution ``x = u**2`` absorbs square-root behaviour at the origin; on
    ``[X, inf)`` the substitution ``x = X / tau**2`` maps the tail onto
    ``(0, 1]`` and is smooth for integrands decaying like ``x**-1.5`` or faster.

    ``f`` must be vectorised: it receives a 1-D array of abscissae and returns
    an array whose first axis runs over them. Any trailing axes are integrated
    componentwise and the error estimate is the max over components.

    Parameters
    ----------
    f : callable
    decay_rate : float
        Rate of any ``exp(-decay_rate * x)`` damping carried by ``f``.
    tol : float
        Target: total error estimate below ``max(tol, tol * max|value|)``.
    initial_panels : int
        Panels per mapped sub-range before adaptive refinement. Doubling this
        doubles the starting resolution.
    breakpoints : sequence of float
        Extra panel edges in x, for features the uniform start would miss
        (a pole pinched against the origin, say). Points outside
        ``(0, X)`` are ignored.
    """
    if decay_rate < 0:
        raise InvalidInputError("decay_rate must be nonnegative")
    if tol <= 0:
        raise InvalidInputError("tol must be positive")
    split = 30.0 if decay_rate == 0 else max(30.0, 30.0 / decay_rate)
    root = np.sqrt(split)

    def head(u):
        fx = f(u * u)
        return (2.0 * u).reshape((-1,) + (1,) * (np.ndim(fx) - 1)) * fx

    def tail(tau):
        x = split / (tau * tau)
        fx = f(x)
        jac = 2.0 * split / tau ** 3
        return jac.reshape((-1,) + (1,) * (np.ndim(fx) - 1)) * fx

    heap = []
    counter = 0
    evaluations = 0
    total = 0.0
    for g, lo, hi, n in ((head, 0.0, root, initial_panels),
                         (tail, 0.0, 1.0, max(2, initial_panels // 2))):
        edges = np.linspace(lo, hi, n + 1)
        if g is head:
            extra = np.sqrt([x for x in breakpoints if 0 < x < split])
            edges = np.unique(np.concatenate([edges, extra]))
        for a, b in zip(edges[:-1], edges[1:]):
            val, err = _panel(g, a, b)
            evaluations += 15
            total = total + val
            heapq.heappush(heap, (-err, counter, g, a, b, val))
            counter += 1

    def summary():
        return sum(-h[0] for h in heap)

    err_total = summary()
    while True:
        scale = float(np.max(np.abs(total))) if np.ndim(total) else abs(total)
        target = max(tol, tol * scale)
        if err_total <= target:
            break
        if len(heap) >= max_panels:
            raise QuadratureError(
                f"no convergence after {len(heap)} panels "
                f"(error {err_total:.3g} > target {target:.3g})",
                QuadratureResult(total, err_total, evaluations))
        neg_err, _, g, a, b, val = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        left, el = _panel(g, a, mid)
        right, er = _panel(g, mid, b)
        evaluations += 30
        total = total - val + left + right
        err_total += el + er + neg_err
        heapq.heappush(heap, (-el, counter, g, a, mid, left))
        heapq.heappush(heap, (-er, counter + 1, g, mid, b, right))
        counter += 2
        if err_total < 0:
            err_total = summary()
    # re-sum to shed rounding accumulated in the running totals
    err_total = summary()
    total = sum(h[5] for h in heap)
    return QuadratureResult(total, float(err_total), evaluations)


def eigh3(h, tol=HERMITICITY_TOL) -> EigenSystem3:
    """Eigendecomposition of a 3x3 Hermitian matrix (or a stack of them).

    The input is symmetrised as ``(H + H^dagger) / 2`` before solving.
    """
    h = np.asarray(h, dtype=complex)
    if h.shape[-2:] != (3, 3):
        raise InvalidInputError(f"expected (..., 3, 3), got {h.shape}")
    hh = np.swapaxes(h.conj(), -1, -2)
    defect = np.linalg.norm(h - hh, axis=(-2, -1))
    if np.any(defect > tol):
        raise InvalidInputError(
            f"Hermiticity defect {float(np.max(defect)):.3g} exceeds {tol:g}")
    w, v = np.linalg.eigh(0.5 * (h + hh))
    return EigenSystem3(w, v)


def derivative_on_grid(values, dt) -> np.ndarray:
    """Second-order finite-difference derivative of a uniformly sampled series.

    Central differences in the interior, one-sided second-order stencils at
    both ends.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size < 3:
        raise InvalidInputError("need a 1-D series of length >= 3")
    if not dt > 0:
        raise InvalidInputError("dt must be positive")
    return np.gradient(values, dt, edge_order=2)
