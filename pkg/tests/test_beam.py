import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import brentq

from displacemon.beam import (
    BeamGeometry,
    beam_mass,
    clamped_clamped_residual,
    frequency_prefactor,
    fundamental_frequency,
    geometric_coupling_beta0,
    mode_normalisation,
    mode_shape,
    mode_shape_derivative_scaled,
    mode_shape_scaled,
    single_atom_zpa,
    solve_fundamental_mode,
    solve_mode_wavenumber,
    zero_point_amplitude,
)
from displacemon.constants import aluminium, hbar

AL = aluminium()
GEOM_A = BeamGeometry(1e-6, 1.9e-3)
GEOM_B = BeamGeometry(1e-5, 8e-2)

# reference root from an independent high-precision solve of cos(x) cosh(x) = 1
K_ELL_REF = float(mp.findroot(lambda x: mp.cos(x) * mp.cosh(x) - 1, 4.73))


def test_root_matches_independent_solvers():
    k = solve_mode_wavenumber()
    assert round(k, 3) == 4.730
    assert k == pytest.approx(K_ELL_REF, abs=1e-12)
    assert k == pytest.approx(brentq(clamped_clamped_residual, math.pi, 5.0, xtol=1e-15), abs=1e-12)
    assert abs(clamped_clamped_residual(k)) < 1e-12


def test_bracket_changes_sign():
    assert clamped_clamped_residual(math.pi) > 0
    assert clamped_clamped_residual(5.0) < 0


def test_mode_shape_clamps_and_symmetry():
    ell = GEOM_A.ell
    assert mode_shape([-ell / 2, ell / 2], geometry=GEOM_A).tolist() == [0.0, 0.0]
    z = np.linspace(0, ell / 2, 57)
    np.testing.assert_allclose(mode_shape(z, geometry=GEOM_A), mode_shape(-z, geometry=GEOM_A), rtol=0, atol=1e-14)


def test_mode_shape_outside_beam_rejected():
    with pytest.raises(ValueError):
        mode_shape(GEOM_A.ell, geometry=GEOM_A)


def test_slope_vanishes_at_clamps():
    zeta = np.linspace(-0.5, 0.5, 2001)
    slope = mode_shape_derivative_scaled(zeta)
    assert abs(slope[0]) < 1e-8 * np.max(np.abs(slope))
    assert abs(slope[-1]) < 1e-8 * np.max(np.abs(slope))
    # finite differences agree with the closed-form slope
    h = 1e-4
    u = lambda z: float(mode_shape_scaled(z))
    fd = (3 * u(0.5) - 4 * u(0.5 - h) + u(0.5 - 2 * h)) / (2 * h)
    assert abs(fd) < 1e-5 * np.max(np.abs(slope))


def test_normalisation():
    assert mode_normalisation() == pytest.approx(1.0, abs=1e-9)


def _beta0_reference(k):
    # textbook mode shape built from scratch at 30 digits
    with mp.workdps(30):
        k = mp.mpf(k)
        c, ch = mp.cos(k / 2), mp.cosh(k / 2)
        u = lambda z: c * mp.cosh(k * z) - ch * mp.cos(k * z)
        norm = mp.sqrt(mp.quad(lambda z: u(z) ** 2, [-0.5, 0.5]))
        return float(abs(mp.quad(u, [-0.5, 0.5]) / norm))


def test_beta0_value_and_oracle():
    b = geometric_coupling_beta0()
    assert round(b, 3) == 0.831
    assert b == pytest.approx(_beta0_reference(K_ELL_REF), rel=1e-10)


def test_beta0_independent_of_length():
    ma = solve_fundamental_mode(GEOM_A, AL)
    mb = solve_fundamental_mode(GEOM_B, AL)
    assert abs(ma.beta0 - mb.beta0) < 1e-9


def test_prefactor():
    # the text rounds the prefactor to 6.47; the exact root gives 6.4586
    assert frequency_prefactor() == pytest.approx(6.47, rel=2e-3)
    assert frequency_prefactor() == pytest.approx(K_ELL_REF**2 / math.sqrt(12), rel=1e-12)


@pytest.mark.parametrize(
    "geom,f_table,m_table,x_table",
    [(GEOM_A, 1400, 5.1e-12, 3.4e-14), (GEOM_B, 8.1, 2.2e-8, 6.9e-15)],
)
def test_table_values(geom, f_table, m_table, x_table):
    mode = solve_fundamental_mode(geom, AL)
    assert mode.frequency_hz == pytest.approx(f_table, rel=0.03)
    assert mode.mass == pytest.approx(m_table, rel=0.03)
    assert mode.X_ZP == pytest.approx(x_table, rel=0.02)


def test_frozen_derived_values():
    # evaluated with the pinned constants; guards against regressions
    mode = solve_fundamental_mode(GEOM_A, AL)
    assert mode.frequency_hz == pytest.approx(1428.97505, rel=1e-8)
    assert mode.X_ZP == pytest.approx(3.38346855e-14, rel=1e-8)
    assert single_atom_zpa(AL) == pytest.approx(7.90e-12, rel=5e-3)
    assert single_atom_zpa(AL) == pytest.approx(8e-12, rel=0.15)


def test_scalings():
    w = fundamental_frequency(GEOM_A, AL)
    assert fundamental_frequency(BeamGeometry(2e-6, 1.9e-3), AL) == pytest.approx(2 * w, rel=1e-12)
    assert fundamental_frequency(BeamGeometry(1e-6, 3.8e-3), AL) == pytest.approx(w / 4, rel=1e-12)
    assert beam_mass(BeamGeometry(2e-6, 1.9e-3), AL) == pytest.approx(4 * beam_mass(GEOM_A, AL), rel=1e-15)
    assert zero_point_amplitude(4.0, 3.0) == pytest.approx(zero_point_amplitude(1.0, 3.0) / 2, rel=1e-15)
    al4 = type(AL)(**{**AL.to_dict(), "Omega_p": 4 * AL.Omega_p})
    assert single_atom_zpa(al4) == pytest.approx(single_atom_zpa(AL) / 2, rel=1e-15)


@given(st.floats(1e-18, 1e-6), st.floats(1e-2, 1e8))
def test_zero_point_identity(mass, omega):
    x = zero_point_amplitude(mass, omega)
    assert x * math.sqrt(2 * mass * omega / hbar) == pytest.approx(1.0, rel=1e-14)


def test_geometry_validation():
    with pytest.raises(ValueError, match="ell > D"):
        BeamGeometry(1e-3, 1e-3)
    with pytest.raises(ValueError):
        BeamGeometry(-1e-6, 1e-3)
    with pytest.raises(ValueError):
        zero_point_amplitude(0.0, 1.0)
