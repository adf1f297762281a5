import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from vtype_pbg.errors import InvalidInputError
from vtype_pbg.free import FreeParams, free_track, propagator_free


def rate_equation_reference(p, t):
    """Integrate the local amplitude equations with a stiff-accurate scipy solver."""
    def rhs(s, y):
        a3, a2 = y[0] + 1j * y[1], y[2] + 1j * y[3]
        e = np.exp(1j * p.omega32 * s)
        d3 = -p.gamma31 * a3 - e * p.gbar * a2
        d2 = -p.gamma21 * a2 - np.conj(e) * p.gbar * a3
        return [d3.real, d3.imag, d2.real, d2.imag]

    m = np.empty((t.size, 2, 2), dtype=complex)
    for col, y0 in enumerate(([1, 0, 0, 0], [0, 0, 1, 0])):
        sol = solve_ivp(rhs, (0, t[-1]), y0, t_eval=t, rtol=1e-11, atol=1e-13, method="DOP853")
        m[:, 0, col] = sol.y[0] + 1j * sol.y[1]
        m[:, 1, col] = sol.y[2] + 1j * sol.y[3]
    return m


def test_identity_at_zero():
    assert np.max(np.abs(propagator_free(0.0, FreeParams()).m - np.eye(2))) < 1e-12


def test_wigner_weisskopf_limit():
    p = FreeParams(1.3, 0.0, 0.5)
    t = np.linspace(0, 10 / 1.3, 200)
    m = free_track(t, p).m
    assert np.allclose(np.abs(m[:, 0, 0]), np.exp(-1.3 * t), atol=1e-12)
    assert np.all(m[:, 1, 0] == 0)


@pytest.mark.parametrize("p", [FreeParams(1, 1, 0.5), FreeParams(1, 0.4, 2.0),
                               FreeParams(0.7, 1.5, 0.0), FreeParams(1, 1, 5.0)])
def test_matches_ode_reference(p):
    t = np.linspace(0, 8, 81)
    assert np.max(np.abs(free_track(t, p).m - rate_equation_reference(p, t))) < 1e-8


def test_confluent_exponents():
    # equal rates: lam = i w32, so lam^2 / 4 + gbar^2 vanishes at w32 = 2
    g31, g21 = 1.0, 1.0
    p = FreeParams(g31, g21, 2.0)
    t = np.linspace(0, 6, 61)
    assert np.max(np.abs(free_track(t, p).m - rate_equation_reference(p, t))) < 1e-8
    near = FreeParams(g31, g21, 2.0 + 1e-6)
    assert np.max(np.abs(free_track(t, p).m - free_track(t, near).m)) < 1e-5


def test_degenerate_branch_continuity():
    t = np.linspace(0, 10, 101)
    a = free_track(t, FreeParams(1.0, 1e-16, 0.5)).m   # gbar = 1e-8
    b = free_track(t, FreeParams(1.0, 1e-14, 0.5)).m   # gbar = 1e-7
    assert np.max(np.abs(a - b)) < 1e-6


def test_full_decay_when_levels_resolved():
    p = FreeParams(1.0, 1.0, 5.0)
    assert np.linalg.norm(propagator_free(20.0, p).m) < 1e-6


def test_dark_state_without_splitting():
    # equal rates and no splitting: (c3 - c2)/sqrt(2) is decoupled from the field
    p = FreeParams(1.0, 1.0, 0.0)
    a = propagator_free(30.0, p).apply(1 / np.sqrt(2), -1 / np.sqrt(2))
    assert abs(np.vdot(a, a)) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 3), st.floats(0, 3), st.floats(-5, 5))
def test_column_norms_bounded(g31, g21, w32):
    t = np.linspace(0, 12, 121)
    m = free_track(t, FreeParams(g31, g21, w32)).m
    norms = np.sqrt(np.sum(np.abs(m) ** 2, axis=1))
    assert norms.max() <= 1 + 1e-12


def test_invalid_parameters():
    with pytest.raises(InvalidInputError):
        FreeParams(0.0, 1.0, 0.5)
    with pytest.raises(InvalidInputError):
        FreeParams(1.0, -0.1, 0.5)
    with pytest.raises(InvalidInputError):
        free_track([-1.0, 0.0], FreeParams())
