import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vtype_pbg.errors import SingularPointError
from vtype_pbg.pbg import (BETA_32, PbgParams, branch_cut_columns, eval_ZH,
                           find_mode_roots, pbg_track, propagator_pbg,
                           residue_matrices, residue_sum, sqrt_shifted)
from vtype_pbg.state import density_matrix, initial_amplitudes


def physical_radical(s, w3c):
    """sqrt(i s + w3c) continued from Re s > 0, cut along s = i w3c - r."""
    return cmath.exp(0.25j * cmath.pi) * cmath.sqrt(-1j * (1j * s + w3c))


def denominator(s, p):
    return s * (s - 1j * p.omega32) + (2 * s - 1j * p.omega32) * BETA_32 / physical_radical(s, p.omega3c)


def winding_count(p, re_lo, re_hi, im_lo, im_hi, n=4000):
    """Zeros of the physical-sheet denominator inside a rectangle (argument principle)."""
    edges = [
        np.linspace(re_lo, re_hi, n) + 1j * im_lo,
        re_hi + 1j * np.linspace(im_lo, im_hi, n),
        np.linspace(re_hi, re_lo, n) + 1j * im_hi,
        re_lo + 1j * np.linspace(im_hi, im_lo, n),
    ]
    path = np.concatenate(edges)
    vals = np.array([denominator(s, p) for s in path])
    phase = np.unwrap(np.angle(vals))
    return int(round((phase[-1] - phase[0]) / (2 * np.pi)))


# ---------------------------------------------------------------- radical

def test_sqrt_at_branch_point_is_zero():
    p = PbgParams(0.1, -1.0)
    assert sqrt_shifted(1j * p.omega3c, p) == 0


def test_sqrt_real_argument():
    assert sqrt_shifted(0.0, PbgParams(0.1, 4.0)) == pytest.approx(2.0)


def test_sqrt_square_back():
    y = sqrt_shifted(1 + 2j, PbgParams(0.1, -1.0))
    assert abs(y * y - (-3 + 1j)) < 1e-14
    assert y.real >= 0


# ---------------------------------------------------------------- Z and H

def test_zero_is_root_for_degenerate_levels():
    value, _ = eval_ZH(0.0, "Z", PbgParams(0.0, -1.0))
    assert abs(value) < 1e-15


@settings(max_examples=50, deadline=None)
@given(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
       st.floats(0, 2), st.floats(-3, 3))
def test_sheet_sum_identity(x, w32, w3c):
    p = PbgParams(w32, w3c)
    if abs(1j * x + w3c) < 1e-6:
        return
    z, _ = eval_ZH(x, "Z", p)
    h, _ = eval_ZH(x, "H", p)
    assert abs(z + h - 2 * x * (x - 1j * w32)) < 1e-9 * max(1.0, abs(x) ** 2)


def test_derivative_matches_finite_difference():
    p = PbgParams(0.1, -1.0)
    x, h = 0.3 + 0.4j, 1e-6
    for sheet in ("Z", "H"):
        _, d = eval_ZH(x, sheet, p)
        fd = (eval_ZH(x + h, sheet, p)[0] - eval_ZH(x - h, sheet, p)[0]) / (2 * h)
        assert abs(d - fd) <= 1e-6 * abs(d)


def test_branch_point_raises():
    p = PbgParams(0.1, -1.0)
    with pytest.raises(SingularPointError):
        eval_ZH(1j * p.omega3c, "Z", p)
    with pytest.raises(ValueError):
        eval_ZH(0.1, "Q", p)


# ---------------------------------------------------------------- roots

@pytest.mark.parametrize("p", [PbgParams(0.0, -1.0), PbgParams(0.1, -1.0),
                               PbgParams(0.1, 0.2), PbgParams(0.1, 0.9),
                               PbgParams(1.0, 0.9), PbgParams(0.1, 100.0)])
def test_root_residuals_and_count(p):
    roots = find_mode_roots(p)
    assert len(roots.roots) + len(roots.rejected) == 5
    for r in roots.roots:
        value, _ = eval_ZH(r.x, "Z", p, radical=r.y)
        assert abs(value) <= 1e-10 * max(1.0, abs(r.x) ** 2)
        # the radical really is a square root of i x + w3c
        assert abs(r.y ** 2 - (1j * r.x + p.omega3c)) < 1e-10 * max(1.0, abs(r.x))
        # and it lies on the physical sheet
        assert abs(denominator(r.x, p)) < 1e-9 * max(1.0, abs(r.x) ** 2)


def test_degenerate_levels_keep_dark_root():
    roots = find_mode_roots(PbgParams(0.0, -1.0))
    assert min(abs(r.x) for r in roots.roots) < 1e-12


@pytest.mark.parametrize("p, rect", [
    (PbgParams(0.1, -1.0), (-3, 3, -0.5, 4)),
    (PbgParams(0.1, 0.2), (-3, 3, 0.5, 4)),
    (PbgParams(1.0, 0.9), (-3, 3, 1.2, 4)),
    (PbgParams(0.1, 100.0), (-3, 3, -3, 60)),
])
def test_root_count_matches_argument_principle(p, rect):
    roots = find_mode_roots(p)
    re_lo, re_hi, im_lo, im_hi = rect
    inside = [r for r in roots.roots
              if re_lo < r.x.real < re_hi and im_lo < r.x.imag < im_hi]
    assert winding_count(p, *rect) == len(inside)


def test_no_growing_modes_far_inside_band():
    p = PbgParams(0.1, 100.0)
    roots = find_mode_roots(p)
    assert all(r.x.real <= 1e-10 for r in roots.roots)
    assert winding_count(p, 1e-3, 50, -50, 50) == 0


@pytest.mark.parametrize("w3c", [-1.0, 0.2, 0.9])
def test_sheet_consistency(w3c):
    p = PbgParams(0.1, w3c)
    for r in find_mode_roots(p).roots:
        # the same point seen from the other sheet has the opposite radical
        value, _ = eval_ZH(r.x, "Z", p, radical=-r.y)
        assert abs(value) > 1e-6
        if abs(r.y.real) > 1e-9:  # off the principal cut the labels are unambiguous
            own, _ = eval_ZH(r.x, r.sheet, p)
            other, _ = eval_ZH(r.x, "H" if r.sheet == "Z" else "Z", p)
            assert abs(own) < 1e-9 and abs(other) > 1e-6


# ---------------------------------------------------------------- branch cut

def test_branch_cut_decays():
    p = PbgParams(0.1, -1.0)
    assert np.linalg.norm(branch_cut_columns(50.0, p)) < np.linalg.norm(branch_cut_columns(5.0, p))


@pytest.mark.parametrize("w3c", [-1.0, 0.2, 0.9])
def test_completeness_at_zero(w3c):
    p = PbgParams(0.1, w3c)
    lhs = branch_cut_columns(0.0, p)
    rhs = residue_sum(0.0, p) - np.eye(2)
    assert np.max(np.abs(lhs - rhs)) < 1e-6


def test_branch_cut_stable_under_refinement():
    p = PbgParams(0.1, -1.0)
    a = branch_cut_columns(1.0, p, tol=1e-11)
    b = branch_cut_columns(1.0, p, tol=1e-11, initial_panels=16)
    assert abs(a[0, 0] - b[0, 0]) < 1e-8


def test_vector_and_scalar_time_agree():
    p = PbgParams(0.1, 0.2)
    grid = np.array([0.0, 0.7, 3.0])
    vec = branch_cut_columns(grid, p)
    for i, t in enumerate(grid):
        assert np.allclose(vec[i], branch_cut_columns(t, p), atol=1e-10)


# ---------------------------------------------------------------- propagator

@pytest.mark.parametrize("w3c", [-1.0, 0.2, 0.9, 3.0])
def test_identity_at_zero(w3c):
    m = propagator_pbg(0.0, PbgParams(0.1, w3c)).m
    assert np.max(np.abs(m - np.eye(2))) < 1e-9


def test_population_trapped_inside_gap():
    p = PbgParams(0.1, -1.0)
    t = np.linspace(0, 20, 2001)
    track = pbg_track(t, p)
    rho = density_matrix(track.m, initial_amplitudes(np.pi / 2, 0.0))
    pop = (rho[:, 0, 0] + rho[:, 1, 1]).real
    first, second = pop[(t > 2) & (t <= 11)], pop[t > 11]
    # a finite fraction stays excited and keeps oscillating
    assert second.min() > 0.3
    assert second.max() - second.min() > 0.01
    assert second.mean() == pytest.approx(first.mean(), rel=0.05)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 2.0), st.floats(-2.0, 2.0))
def test_column_norms_bounded(w32, w3c):
    p = PbgParams(w32, w3c)
    track = pbg_track(np.linspace(0, 15, 151), p)
    norms = np.sqrt(np.sum(np.abs(track.m) ** 2, axis=1))
    assert norms.max() <= 1 + 1e-9


# degenerate levels, a near-dark pole pinched against the branch point, and
# parameters whose spike scales underflow
EDGE_CASES = [(0.0, 0.0), (0.0, 1e-55), (0.0, -1e-55), (0.0, 5e-324), (1e-12, 0.0),
              (1e-5, 5e-6), (1e-3, 5e-4), (1e-3, 5e-4 + 1e-10), (1e-2, 5e-3 - 1e-11),
              (1.0, 0.5), (1e-20, 5e-21), (1e-160, 5e-161), (1e-300, 0.0),
              (5e-324, 0.0), (5e-324, 5e-324)]


@pytest.mark.parametrize("w32, w3c", EDGE_CASES)
def test_edge_completeness(w32, w3c):
    track = pbg_track(np.linspace(0, 15, 151), PbgParams(w32, w3c))
    assert np.abs(track.m[0] - np.eye(2)).max() < 1e-9
    assert np.sqrt(np.sum(np.abs(track.m) ** 2, axis=1)).max() <= 1 + 1e-9


@pytest.mark.parametrize("w3c", [0.0, 1e-55, -0.5, 0.3])
def test_dark_state_conserved_for_degenerate_levels(w3c):
    dark = np.array([1.0, -1.0]) / np.sqrt(2)
    track = pbg_track(np.linspace(0, 15, 151), PbgParams(0.0, w3c))
    assert np.abs(track.m @ dark - dark).max() < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 1e-2), st.floats(-1e-6, 1e-6))
def test_completeness_near_dark_pinch(w32, offset):
    p = PbgParams(w32, 0.5 * w32 + offset)
    m0 = pbg_track(np.array([0.0]), p).m[0]
    assert np.abs(m0 - np.eye(2)).max() < 1e-9


def test_residues_match_poles():
    p = PbgParams(0.1, -1.0)
    roots = find_mode_roots(p)
    poles, res = residue_matrices(p, roots)
    assert poles.shape == (len(roots),) and res.shape == (len(roots), 2, 2)
    # bound states sit on the imaginary axis and carry weight
    bound = [i for i, x in enumerate(poles) if abs(x.real) < 1e-12]
    assert bound and all(np.abs(res[i]).max() > 1e-3 for i in bound)
