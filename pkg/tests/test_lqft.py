"""Liouville partition functional: zero-mode closed form, Seiberg gating,
KPZ scaling, Weyl response, and the weighted field-law sampler."""

import math

import numpy as np
import pytest
from scipy import integrate

from torus_lqg.config import FieldResolution, MonteCarloConfig
from torus_lqg.errors import (
    DuplicateInsertion,
    InvalidGamma,
    SeibergViolationLocal,
    SeibergViolationSum,
    SingularPoint,
    ValidationError,
)
from torus_lqg.gff import build_log_conformal_factor, LogConformalFactor, SpectralField
from torus_lqg.green import green, green_log_subtracted, theta_offset
from torus_lqg.lqft import (
    Insertion,
    InsertionSet,
    LQFTParams,
    conformal_weight,
    insertion_constant,
    insertion_mass_samples,
    insertion_potential,
    insertion_potential_grid,
    liouville_field_law_sampler,
    partition_function,
    weyl_anomaly_factor,
    weyl_anomaly_log_factor,
)

TAU = 0.3 + 1.2j
SEED = 12

MC_SMALL = MonteCarloConfig(replicas=400, seed=SEED)
RES_SMALL = FieldResolution(cutoff=8, grid_factor=4)

TWO_POINTS = InsertionSet(((0.2, 0.3, 0.8), (0.7, 0.6, 0.5)))


def test_conformal_weight():
    for gamma in (0.5, 1.0, 1.5, math.sqrt(8.0 / 3.0)):
        q = 2.0 / gamma + gamma / 2.0
        assert abs(conformal_weight(gamma, q) - 1.0) < 1e-14
        alpha = 0.37
        assert abs(conformal_weight(alpha, q) - conformal_weight(2.0 * q - alpha, q)) < 1e-12


def test_params_validation():
    assert LQFTParams(gamma=1.0).q == 2.5
    LQFTParams(gamma=2.0)                      # critical value is allowed
    for bad in (0.0, -1.0, 2.2):
        with pytest.raises(InvalidGamma):
            LQFTParams(gamma=bad)
    with pytest.raises(ValidationError):
        LQFTParams(gamma=1.0, mu=0.0)


def test_insertion_set_basics():
    ins = InsertionSet(((0.2, 0.3, 0.8), Insertion(0.7, 0.6, -0.5)))
    assert isinstance(ins.insertions[0], Insertion)
    assert abs(ins.alpha_sum - 0.3) < 1e-15
    assert ins.seiberg_sum_ok()
    assert ins.seiberg_local_ok(q=1.0)
    assert not ins.seiberg_local_ok(q=0.7)
    assert not InsertionSet(((0.1, 0.1, -0.4),)).seiberg_sum_ok()


def test_duplicate_insertions_rejected():
    with pytest.raises(DuplicateInsertion):
        InsertionSet(((0.2, 0.3, 0.8), (0.2, 0.3, 0.5)))
    with pytest.raises(DuplicateInsertion):
        InsertionSet(((0.1, 0.2, 0.8), (1.1, -0.8, 0.5)))   # same point mod 1


def test_insertion_potential_is_green_sum():
    x = (0.45, 0.15)
    want = 0.8 * green(TAU, (x[0] - 0.2, x[1] - 0.3)) + 0.5 * green(
        TAU, (x[0] - 0.7, x[1] - 0.6)
    )
    assert abs(insertion_potential(TAU, TWO_POINTS, x) - want) < 1e-13
    with pytest.raises(SingularPoint):
        insertion_potential(TAU, TWO_POINTS, (0.2, 0.3))


def test_insertion_potential_grid_matches_exact_away_from_insertions():
    g = 40
    h = insertion_potential_grid(TAU, TWO_POINTS, g, eps_cap=1e-3)
    for i, j in ((0, 0), (17, 33), (30, 5)):
        want = insertion_potential(TAU, TWO_POINTS, (i / g, j / g))
        assert abs(h[i, j] - want) < 1e-12


def test_insertion_potential_grid_cap_at_insertion():
    # single insertion sitting exactly on a grid node
    g = 40
    eps = 0.01
    ins = InsertionSet(((0.25, 0.5, 0.8),))
    h = insertion_potential_grid(TAU, ins, g, eps_cap=eps)
    i, j = 10, 20
    want = 0.8 * (green_log_subtracted(TAU, 0.0, 0.0) - math.log(eps))
    assert abs(h[i, j] - want) < 1e-12
    with pytest.raises(ValidationError):
        insertion_potential_grid(TAU, ins, g, eps_cap=0.0)


def test_insertion_constant_two_point_formula():
    q = 2.5
    a1, a2 = 0.8, 0.5
    want = (
        a1 * a2 * green(TAU, (0.2 - 0.7, 0.3 - 0.6))
        + 0.5 * theta_offset(TAU) * (a1 * a1 + a2 * a2)
        - 0.5 * q * math.log(TAU.imag) * (a1 + a2)
    )
    assert abs(insertion_constant(TAU, TWO_POINTS, q) - want) < 1e-13


def test_partition_requires_positive_alpha_sum():
    params = LQFTParams(gamma=1.0)
    with pytest.raises(SeibergViolationSum):
        partition_function(params, TAU, InsertionSet(()), MC_SMALL, RES_SMALL)
    bad = InsertionSet(((0.2, 0.3, -0.8), (0.7, 0.6, 0.5)))
    with pytest.raises(SeibergViolationSum):
        partition_function(params, TAU, bad, MC_SMALL, RES_SMALL)


def test_partition_vanishes_above_local_bound():
    params = LQFTParams(gamma=1.0)     # Q = 2.5
    hot = InsertionSet(((0.2, 0.3, 2.6), (0.7, 0.6, 0.5)))
    est = partition_function(params, TAU, hot, MC_SMALL, RES_SMALL)
    assert est.value == 0.0
    assert est.std_error == 0.0
    assert "Q = 2.5" in est.diagnostic


def test_partition_positive_estimate():
    params = LQFTParams(gamma=1.0)
    est = partition_function(params, TAU, TWO_POINTS, MC_SMALL, RES_SMALL)
    assert est.value > 0
    assert est.std_error > 0
    assert est.replicas == MC_SMALL.replicas
    assert est.diagnostic is None
    assert est.std_error < 0.05 * est.value


def test_mass_samples_deterministic():
    params = LQFTParams(gamma=1.0)
    a = insertion_mass_samples(params, TAU, TWO_POINTS, MC_SMALL, RES_SMALL)
    b = insertion_mass_samples(params, TAU, TWO_POINTS, MC_SMALL, RES_SMALL)
    assert np.array_equal(a, b)
    assert np.all(a > 0)


def test_zero_mode_integral_closed_form():
    # per replica: int dc exp(s c - mu e^{gamma c} I) = Gamma(p) (mu I)^{-p} / gamma
    params = LQFTParams(gamma=1.3, mu=1.7)
    s = TWO_POINTS.alpha_sum
    p = s / params.gamma
    masses = insertion_mass_samples(
        params, TAU, TWO_POINTS, MonteCarloConfig(replicas=3, seed=SEED), RES_SMALL
    )
    for mass in masses:
        quad, err = integrate.quad(
            lambda c: math.exp(s * c - params.mu * math.exp(params.gamma * c) * mass),
            -60.0,
            30.0,
        )
        closed = math.gamma(p) * (params.mu * mass) ** (-p) / params.gamma
        assert abs(quad - closed) < 1e-10 * abs(closed)


def test_kpz_scaling_on_shared_replicas():
    s = TWO_POINTS.alpha_sum
    base = partition_function(LQFTParams(gamma=1.0, mu=1.0), TAU, TWO_POINTS, MC_SMALL, RES_SMALL)
    for mu in (0.5, 3.7):
        scaled = partition_function(
            LQFTParams(gamma=1.0, mu=mu), TAU, TWO_POINTS, MC_SMALL, RES_SMALL
        )
        assert abs(scaled.value / base.value - mu ** (-s / 1.0)) < 1e-13


def test_weyl_anomaly_response():
    phi = build_log_conformal_factor(
        LogConformalFactor(
            coeffs={(1, 0): 0.3 + 0.1j, (-1, 0): 0.3 - 0.1j, (0, 2): -0.2j, (0, -2): 0.2j},
            cutoff=3,
        ),
        TAU,
    )
    q = 2.5
    log_factor = weyl_anomaly_log_factor(phi, q)
    from torus_lqg.gff import dirichlet_energy

    want = (1.0 + 6.0 * q * q) / (96.0 * math.pi) * dirichlet_energy(phi)
    assert abs(log_factor - want) < 1e-15
    assert abs(weyl_anomaly_factor(phi, q) - math.exp(log_factor)) < 1e-15
    doubled = SpectralField(tau=phi.tau, cutoff=phi.cutoff, coeffs=2.0 * phi.coeffs)
    assert abs(weyl_anomaly_log_factor(doubled, q) - 4.0 * log_factor) < 1e-12


def test_sampler_seiberg_gating():
    params = LQFTParams(gamma=1.0)
    res = FieldResolution(cutoff=6, grid_factor=4)
    mc = MonteCarloConfig(replicas=2, seed=SEED)
    with pytest.raises(SeibergViolationSum):
        list(liouville_field_law_sampler(params, TAU, InsertionSet(()), mc, res))
    hot = InsertionSet(((0.2, 0.3, 2.6),))
    with pytest.raises(SeibergViolationLocal):
        list(liouville_field_law_sampler(params, TAU, hot, mc, res))


def test_sampler_determinism_and_shapes():
    params = LQFTParams(gamma=1.0, mu=2.0)
    res = FieldResolution(cutoff=6, grid_factor=4)
    mc = MonteCarloConfig(replicas=4, seed=SEED)
    a = list(liouville_field_law_sampler(params, TAU, TWO_POINTS, mc, res))
    b = list(liouville_field_law_sampler(params, TAU, TWO_POINTS, mc, res))
    for sa, sb in zip(a, b):
        assert np.array_equal(sa.field, sb.field)
        assert sa.volume == sb.volume
        assert sa.weight > 0
        assert sa.field.shape == (res.grid, res.grid)


def test_sampler_measure_total_is_volume():
    params = LQFTParams(gamma=1.0, mu=2.0)
    res = FieldResolution(cutoff=6, grid_factor=4)
    mc = MonteCarloConfig(replicas=6, seed=SEED)
    for sample in liouville_field_law_sampler(params, TAU, TWO_POINTS, mc, res):
        assert abs(float(np.sum(sample.measure)) - sample.volume) < 1e-12 * sample.volume
        assert np.all(sample.measure > 0)


def test_sampler_conditioned_volume():
    params = LQFTParams(gamma=1.0, mu=2.0)
    res = FieldResolution(cutoff=6, grid_factor=4)
    mc = MonteCarloConfig(replicas=5, seed=SEED)
    for sample in liouville_field_law_sampler(params, TAU, TWO_POINTS, mc, res, y_volume=2.5):
        assert sample.volume == 2.5
        assert abs(float(np.sum(sample.measure)) - 2.5) < 1e-12


def test_sampler_volume_marginal_mean():
    # s = gamma: volume ~ Exponential(mu), mean 1/mu
    params = LQFTParams(gamma=1.0, mu=2.0)
    one = InsertionSet(((0.25, 0.4, 1.0),))
    res = FieldResolution(cutoff=6, grid_factor=4)
    mc = MonteCarloConfig(replicas=2000, seed=SEED)
    vols = np.array([s.volume for s in liouville_field_law_sampler(params, TAU, one, mc, res)])
    se = np.std(vols) / math.sqrt(len(vols))
    assert abs(np.mean(vols) - 0.5) < 4.0 * se
