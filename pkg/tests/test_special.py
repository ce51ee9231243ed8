"""Theta/eta q-series against fixed high-precision reference values.

Reference constants were computed with mpmath at 30 significant digits
from the defining series (eta as the q-product, theta1 as the
alternating sine series, theta constants as lattice sums) and are
hard-coded so the suite does not depend on mpmath at runtime.
"""

import cmath
import math

import numpy as np
import pytest

from torus_lqg.errors import NonConvergence, ValidationError
from torus_lqg.special import (
    QSeriesConfig,
    dedekind_eta,
    theta1,
    theta1_over_z,
    theta1_z_derivative_at_zero,
    theta_aux,
)

TAU = 0.3 + 1.2j
Z = 0.17 + 0.23j

ETA_I = 0.7682254223260566590025942
ETA_2I = 0.5923827813324158852903634
ETA_TAU = 0.7282998191384615449427624 + 0.05694821566090455791407909j
THETA1_Z_TAU = 0.3685578069265340028971477 + 0.6296612010732234140773034j
THETA2_I = 0.9135791381561168214072426
THETA3_I = 1.086434811213308014575316
THETA4_I = 0.9135791381561168214072426
DTHETA1_I = 2.848694603987787316079985

TIGHT = 1e-13
GRID_TOL = 1e-10


def tau_grid():
    """Small grid inside the fundamental domain."""
    taus = []
    for re in (-0.45, -0.2, 0.0, 0.25, 0.45):
        for im in (0.9, 1.1, 1.7, 2.6):
            if abs(complex(re, im)) >= 1.0:
                taus.append(complex(re, im))
    return taus


def test_eta_reference_values():
    assert abs(dedekind_eta(1j) - ETA_I) < TIGHT
    assert abs(dedekind_eta(2j) - ETA_2I) < TIGHT
    assert abs(dedekind_eta(TAU) - ETA_TAU) < TIGHT


def test_theta1_reference_value():
    assert abs(theta1(Z, TAU) - THETA1_Z_TAU) < TIGHT


def test_theta_constants_at_i():
    assert abs(theta_aux(2, 1j) - THETA2_I) < TIGHT
    assert abs(theta_aux(3, 1j) - THETA3_I) < TIGHT
    assert abs(theta_aux(4, 1j) - THETA4_I) < TIGHT


def test_eta_translation():
    shift = cmath.exp(1j * math.pi / 12.0)
    for tau in tau_grid():
        assert abs(dedekind_eta(tau + 1) - shift * dedekind_eta(tau)) < GRID_TOL


def test_eta_inversion():
    for tau in tau_grid():
        lhs = dedekind_eta(-1.0 / tau)
        rhs = cmath.sqrt(tau / 1j) * dedekind_eta(tau)
        assert abs(lhs - rhs) < GRID_TOL


def test_theta1_derivative_is_eta_cubed():
    assert abs(theta1_z_derivative_at_zero(1j) - DTHETA1_I) < TIGHT
    for tau in tau_grid():
        lhs = theta1_z_derivative_at_zero(tau)
        rhs = 2.0 * math.pi * dedekind_eta(tau) ** 3
        assert abs(lhs - rhs) < GRID_TOL


def test_theta1_derivative_is_theta_product():
    # pi * theta2 * theta3 * theta4 equals the z-derivative at 0
    for tau in tau_grid():
        prod = math.pi * theta_aux(2, tau) * theta_aux(3, tau) * theta_aux(4, tau)
        assert abs(theta1_z_derivative_at_zero(tau) - prod) < GRID_TOL


def test_theta1_series_vs_product():
    for tau in tau_grid():
        a = theta1(Z, tau, method="series")
        b = theta1(Z, tau, method="product")
        assert abs(a - b) < GRID_TOL


def test_jacobi_quartic_identity():
    for tau in tau_grid():
        t2 = theta_aux(2, tau) ** 4
        t3 = theta_aux(3, tau) ** 4
        t4 = theta_aux(4, tau) ** 4
        assert abs(t2 + t4 - t3) < GRID_TOL


def test_theta1_is_odd():
    rng = np.random.default_rng(7)
    for _ in range(25):
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.4, 0.4))
        assert abs(theta1(-z, TAU) + theta1(z, TAU)) < 1e-12


def test_theta1_unit_periodicity():
    rng = np.random.default_rng(8)
    for _ in range(25):
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.4, 0.4))
        assert abs(theta1(z + 1.0, TAU) + theta1(z, TAU)) < 1e-12


def test_theta1_quasi_periodicity():
    rng = np.random.default_rng(9)
    for _ in range(10):
        z = complex(rng.uniform(-0.4, 0.4), rng.uniform(-0.3, 0.3))
        factor = -cmath.exp(-1j * math.pi * TAU - 2j * math.pi * z)
        assert abs(theta1(z + TAU, TAU) - factor * theta1(z, TAU)) < 1e-11


def test_theta1_vectorized_matches_scalar():
    zs = np.array([0.1 + 0.05j, -0.3 + 0.2j, 0.45 - 0.1j, 0.0 + 0.3j])
    vec = theta1(zs, TAU)
    for k, z in enumerate(zs):
        assert abs(vec[k] - theta1(complex(z), TAU)) < 1e-15


def test_theta1_over_z_removable_singularity():
    # theta1(z)/z extends continuously to z = 0 with value dtheta1(0)
    at_zero = theta1_over_z(0.0, 1j)
    assert abs(at_zero - DTHETA1_I) < TIGHT
    z = 1e-8
    assert abs(theta1_over_z(z, 1j) - at_zero) < 1e-8


def test_theta1_over_z_matches_quotient_away_from_zero():
    for z in (0.2 + 0.1j, -0.31 + 0.04j, 0.11 - 0.22j):
        assert abs(theta1_over_z(z, TAU) - theta1(z, TAU) / z) < 1e-13


def test_rejects_lower_half_plane():
    with pytest.raises(ValidationError):
        dedekind_eta(0.3 - 1.2j)
    with pytest.raises(ValidationError):
        theta1(Z, 0.5)


def test_rejects_bad_series_config():
    with pytest.raises(ValidationError):
        QSeriesConfig(tolerance=0.0)
    with pytest.raises(ValidationError):
        QSeriesConfig(max_terms=0)


def test_nonconvergence_near_real_axis():
    with pytest.raises((NonConvergence, ValidationError)):
        dedekind_eta(0.3 + 1e-12j)
