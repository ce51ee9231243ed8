"""Green function of the Laplacian on the flat torus (T, g_tau).

Three evaluation routes for the same function, kept deliberately
independent so they can cross-check each other:

  closed    G(x) = pi*Im(tau)*x2^2 - ln|theta1(x1 + tau*x2, tau) / eta(tau)|
  eigen     G(x) = sum_{(n,m) != 0} Im(tau) / (2*pi*|n*tau - m|^2) * e(n*x1 + m*x2)
  appendix  partially resummed form: quadratic Fourier profile in x2 plus
            exponentially convergent log corrections, one step before the
            resummation into theta1.

G integrates to zero against d(lambda_tau) = Im(tau) dx and has the
short-distance behaviour G(x) = -ln|p_tau(x)| + Theta(tau) + o(1) with
Theta(tau) = -ln(2*pi) - 2*ln|eta(tau)|.  The eigen route converges only
like 1/cutoff and reports an error estimate; it exists as an oracle, not
as a production path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonConvergence, SingularPoint, ValidationError
from .modular import c_tau, p_tau, wrap_centered, wrap_unit
from .special import (
    QSeriesConfig,
    dedekind_eta,
    theta1,
    theta1_over_z,
)

__all__ = [
    "GreenEvalConfig",
    "green",
    "green_log_subtracted",
    "green_mean_zero",
    "green_regularized",
    "min_lattice_distance",
    "spectral_coefficient",
    "theta_offset",
]

_SINGULAR_TOL = 1e-13


@dataclass(frozen=True)
class GreenEvalConfig:
    """Evaluation route and budgets for green().

    mode is one of "closed", "eigen", "appendix".  eigen_cutoff bounds the
    frequency box of the eigen route; tolerance is the acceptance budget
    for the reported eigen error estimate and the truncation target of the
    appendix route.
    """

    mode: str = "closed"
    eigen_cutoff: int = 200
    tolerance: float = 1e-2

    def __post_init__(self):
        if self.mode not in ("closed", "eigen", "appendix"):
            raise ValidationError(f"unknown green mode {self.mode!r}")
        if self.eigen_cutoff < 1:
            raise ValidationError("eigen_cutoff must be positive")


_DEFAULT = GreenEvalConfig()
_QCFG = QSeriesConfig()


def min_lattice_distance(tau: complex) -> float:
    """Length of the shortest nonzero vector of Z + tau*Z (lower bound)."""
    tau = complex(tau)
    horiz = math.hypot(tau.real - round(tau.real), tau.imag)
    return min(1.0, horiz, 2.0 * tau.imag)


def theta_offset(tau: complex) -> float:
    """Theta(tau) = -ln(2*pi) - 2*ln|eta(tau)|, the short-distance constant."""
    return float(-math.log(2.0 * math.pi) - 2.0 * math.log(abs(dedekind_eta(tau))))


def spectral_coefficient(tau: complex, n, m):
    """Fourier coefficient c_{n,m}(tau) = Im(tau) / (2*pi*|n*tau - m|^2)."""
    tau = complex(tau)
    k = np.asarray(n) * tau - np.asarray(m)
    return tau.imag / (2.0 * np.pi * np.abs(k) ** 2)


def _check_singular(tau, x1, x2):
    z = p_tau(tau, wrap_centered(x1), wrap_centered(x2))
    if np.any(np.abs(z) < _SINGULAR_TOL):
        raise SingularPoint(f"green function diverges at the lattice point, x=({x1}, {x2})")


def _closed_raw(tau: complex, x1, x2):
    """Closed form without any coordinate wrapping; periodic only in exact arithmetic."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    z = x1 + complex(tau) * x2
    val = np.pi * tau.imag * x2**2 - np.log(
        np.abs(theta1(z, tau, _QCFG) / dedekind_eta(tau, _QCFG))
    )
    return val


def _green_closed(tau: complex, x1, x2):
    """Production closed form: wraps to the unit square, stays stable near 0."""
    x1 = wrap_unit(x1)
    x2 = wrap_unit(x2)
    _check_singular(tau, x1, x2)
    x1c = wrap_centered(x1)
    x2c = wrap_centered(x2)
    z = p_tau(tau, x1c, x2c)
    near = np.abs(z) < 0.25 * min_lattice_distance(tau)
    if not np.any(near):
        return _closed_raw(tau, x1, x2)
    # near a lattice point: G = R - ln|p| with R smooth through 0
    sub = green_log_subtracted(tau, x1c, x2c)
    safe_z = np.where(near, z, 1.0)
    val_near = sub - np.log(np.abs(safe_z))
    if np.all(near):
        return val_near
    val_far = _closed_raw(tau, x1, x2)
    return np.where(near, val_near, val_far)


def green_log_subtracted(tau: complex, x1, x2):
    """G(x) + ln|p_tau(x~)| on centered representatives x~, smooth through 0.

    Tends to Theta(tau) as x -> 0; meaningful wherever the centered
    representative is the nearest lattice translate.
    """
    tau = complex(tau)
    x1c = wrap_centered(x1)
    x2c = wrap_centered(x2)
    z = p_tau(tau, x1c, x2c)
    ratio = theta1_over_z(z, tau, _QCFG) / dedekind_eta(tau, _QCFG)
    return np.pi * tau.imag * np.asarray(x2c) ** 2 - np.log(np.abs(ratio))


def _green_eigen(tau: complex, x1: float, x2: float, cutoff: int, tolerance: float):
    # measured decay at generic points is ~1/cutoff^2; report a cautious
    # in-between power since the box sum is only conditionally convergent
    estimate = 4.0 / cutoff**1.5
    if estimate > tolerance:
        raise NonConvergence(
            f"eigen-route error estimate {estimate:.2e} exceeds tolerance {tolerance:.2e};"
            f" raise eigen_cutoff above {cutoff}"
        )
    idx = np.arange(-cutoff, cutoff + 1)
    n, m = np.meshgrid(idx, idx, indexing="ij")
    mask = (n != 0) | (m != 0)
    n = n[mask]
    m = m[mask]
    c = spectral_coefficient(tau, n, m)
    return float(np.sum(c * np.cos(2.0 * np.pi * (n * x1 + m * x2))))


def _green_appendix(tau: complex, x1: float, x2: float, tolerance: float):
    """Resummed double series: Fourier profile in x2 plus log corrections.

    Valid for x2 in [0, 1); the m-sum terms decay like exp(-2*pi*Im(tau)*m).
    """
    tau = complex(tau)
    y = tau.imag
    x1 = float(wrap_unit(x1))
    x2 = float(wrap_unit(x2))
    z = x1 + tau * x2
    val = np.pi * y * (x2**2 - x2 + 1.0 / 6.0)
    val -= math.log(abs(1.0 - np.exp(2j * np.pi * z)))
    decay = math.exp(-2.0 * math.pi * y)
    m_cut = 1
    # factor m contributes at most |q|^(2(m - x2)) ~ decay^(m - 1)
    while 2.0 * decay ** (m_cut - x2) / (1.0 - decay) > 0.1 * tolerance:
        m_cut += 1
        if m_cut > _QCFG.max_terms:
            raise NonConvergence("appendix-route m-sum does not meet tolerance")
    ms = np.arange(1, m_cut + 1)
    q2m = np.exp(2j * np.pi * tau * ms)
    val -= np.sum(np.log(np.abs(1.0 - q2m * np.exp(2j * np.pi * z))))
    val -= np.sum(np.log(np.abs(1.0 - q2m * np.exp(-2j * np.pi * z))))
    return float(val)


def green(tau: complex, x, cfg: GreenEvalConfig = _DEFAULT):
    """Evaluate G_tau at torus coordinates x = (x1, x2), taken mod 1.

    The closed route accepts numpy arrays in x; the oracle routes are
    scalar.  Raises SingularPoint at lattice points and NonConvergence
    when the eigen estimate misses cfg.tolerance.
    """
    tau = complex(tau)
    if not tau.imag > 0:
        raise ValidationError(f"tau must lie in the upper half-plane, got {tau}")
    x1, x2 = x
    if cfg.mode == "closed":
        out = _green_closed(tau, x1, x2)
        if np.ndim(out) == 0:
            return float(out)
        return out
    x1 = float(x1)
    x2 = float(x2)
    _check_singular(tau, x1, x2)
    if cfg.mode == "eigen":
        return _green_eigen(tau, x1, x2, cfg.eigen_cutoff, cfg.tolerance)
    return _green_appendix(tau, x1, x2, cfg.tolerance)


def green_mean_zero(tau: complex, grid: int = 256) -> float:
    """Quadrature of integral G d(lambda_tau); exact value is 0.

    Midpoint rule on a grid x grid mesh with the log singularity subtracted
    on a metric disk and its integral restored in closed form: the kernel
    ln(r/|z|) on {|z| <= r} integrates to pi*r^2/2 under d(lambda_tau).
    """
    tau = complex(tau)
    if grid < 8:
        raise ValidationError("mean-zero quadrature needs at least an 8x8 grid")
    r = 0.3 * min_lattice_distance(tau)
    u = (np.arange(grid) + 0.5) / grid
    x1, x2 = np.meshgrid(u, u, indexing="ij")
    vals = np.asarray(_green_closed(tau, x1, x2))
    z = p_tau(tau, wrap_centered(x1), wrap_centered(x2))
    inside = np.abs(z) < r
    vals = vals - np.where(inside, np.log(r / np.where(inside, np.abs(z), 1.0)), 0.0)
    return float(tau.imag * np.mean(vals) + np.pi * r * r / 2.0)


def green_regularized(tau: complex, x, eps: float, n_theta: int = 48) -> float:
    """Covariance of metric circle averages, E[X_eps(x) X_eps(0)].

    Double average of G over two radius-eps circles in the g_tau metric,
    G_eps(x) = (2*pi)^{-2} int int G(x + c_tau(eps(e^{i s} - e^{i t}))) ds dt.
    At x = 0 the log singularity on the diagonal is integrated exactly
    (the circular average of ln|e^{is} - e^{it}| vanishes), which leaves a
    smooth integrand and spectral trapezoid accuracy.
    """
    tau = complex(tau)
    if not eps > 0:
        raise ValidationError("eps must be positive")
    if 2.0 * eps > 0.8 * min_lattice_distance(tau):
        raise ValidationError(
            f"eps = {eps:g} too large: the two circles must fit inside a period cell"
        )
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    diff = eps * (np.exp(1j * theta)[:, None] - np.exp(1j * theta)[None, :])
    d1, d2 = c_tau(tau, diff)
    x1, x2 = x
    z0 = p_tau(tau, wrap_centered(x1), wrap_centered(x2))
    if abs(z0) < _SINGULAR_TOL:
        # R(c_tau(w)) with p exactly w: no re-wrapping, the offsets are tiny
        ratio = theta1_over_z(diff, tau, _QCFG) / dedekind_eta(tau, _QCFG)
        smooth = np.pi * tau.imag * d2**2 - np.log(np.abs(ratio))
        return float(-math.log(eps) + np.mean(smooth))
    vals = np.asarray(_green_closed(tau, x1 + d1, x2 + d2))
    return float(np.mean(vals))
