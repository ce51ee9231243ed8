"""Liouville correlation functionals on the torus.

The partition function with insertions (z_i, alpha_i) is estimated in
its zero-mode-integrated form: with s = sum(alpha_i) and Seiberg bounds
s > 0, alpha_i < Q, integrating the zero mode c in closed form gives

    Pi = Z^FF(tau) * e^{C_tau(z)} * gamma^{-1} * mu^{-s/gamma}
         * Gamma(s/gamma) * E[ I^{-s/gamma} ],
    I  = int e^{gamma H} dM_{gamma, tau},

so the Monte Carlo work is a single negative moment of the chaos mass
tilted by the insertion potential H(x) = sum_i alpha_i G_tau(x - z_i).
The mu-dependence is an exact prefactor, which is what the scaling
checks downstream exploit.

On the sampling grid H is regularized at the chaos scale: the log
divergence at each insertion is capped at metric distance eps, matching
the plateau of the circle-averaged Green function.  A Lebesgue cell
average of e^{gamma H} is not used because it diverges under refinement
once gamma*alpha_i >= 2, which pure-gravity weights reach.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import FieldResolution, MonteCarloConfig
from .errors import (
    DuplicateInsertion,
    InvalidGamma,
    SeibergViolationLocal,
    SeibergViolationSum,
    ValidationError,
)
from .gff import (
    RngStream,
    SpectralField,
    dirichlet_energy,
    draw_hermitian_modes,
    free_field_partition,
    modes_to_grid,
    regularized_variance,
    scaled_mode_weights,
)
from .green import (
    green,
    green_log_subtracted,
    min_lattice_distance,
    theta_offset,
)
from .chaos import chaos_prefactor
from .modular import p_tau, wrap_centered

__all__ = [
    "Insertion",
    "InsertionSet",
    "LQFTParams",
    "PartitionEstimate",
    "LiouvilleSample",
    "conformal_weight",
    "insertion_constant",
    "insertion_potential",
    "insertion_potential_grid",
    "insertion_mass_samples",
    "partition_function",
    "weyl_anomaly_factor",
    "weyl_anomaly_log_factor",
    "liouville_field_law_sampler",
]


def conformal_weight(alpha: float, q: float) -> float:
    """Delta_alpha = (alpha/2) * (q - alpha/2)."""
    return 0.5 * alpha * (q - 0.5 * alpha)


@dataclass(frozen=True)
class LQFTParams:
    """Coupling gamma in (0, 2] and cosmological constant mu > 0."""

    gamma: float
    mu: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.gamma <= 2.0:
            raise InvalidGamma(f"gamma must be in (0, 2], got {self.gamma}")
        if not self.mu > 0:
            raise ValidationError(f"mu must be positive, got {self.mu}")

    @property
    def q(self) -> float:
        return 2.0 / self.gamma + self.gamma / 2.0


@dataclass(frozen=True)
class Insertion:
    x1: float
    x2: float
    alpha: float


@dataclass(frozen=True)
class InsertionSet:
    insertions: tuple

    def __post_init__(self):
        ins = tuple(
            i if isinstance(i, Insertion) else Insertion(*i) for i in self.insertions
        )
        object.__setattr__(self, "insertions", ins)
        for a in range(len(ins)):
            for b in range(a + 1, len(ins)):
                d1 = wrap_centered(ins[a].x1 - ins[b].x1)
                d2 = wrap_centered(ins[a].x2 - ins[b].x2)
                if math.hypot(float(d1), float(d2)) < 1e-12:
                    raise DuplicateInsertion(
                        f"insertions {a} and {b} coincide at ({ins[a].x1}, {ins[a].x2})"
                    )

    @property
    def alpha_sum(self) -> float:
        return sum(i.alpha for i in self.insertions)

    def seiberg_sum_ok(self) -> bool:
        return self.alpha_sum > 0

    def seiberg_local_ok(self, q: float) -> bool:
        return all(i.alpha < q for i in self.insertions)


def insertion_potential(tau: complex, ins: InsertionSet, x):
    """H(x) = sum_i alpha_i G_tau(x - z_i), exact Green function.

    Raises SingularPoint when x hits an insertion; use the grid variant
    for measure-weighted quadrature.
    """
    x1, x2 = x
    total = 0.0
    for i in ins.insertions:
        total = total + i.alpha * green(tau, (np.asarray(x1) - i.x1, np.asarray(x2) - i.x2))
    return total


def insertion_potential_grid(
    tau: complex, ins: InsertionSet, grid: int, eps_cap: float
) -> np.ndarray:
    """H on the sampling grid with each log singularity capped at eps_cap.

    Within metric distance eps_cap of an insertion the -ln|p| part is
    frozen at -ln(eps_cap), which reproduces the height of the
    circle-regularized potential there and keeps e^{gamma H} summable for
    every admissible alpha.
    """
    tau = complex(tau)
    if not eps_cap > 0:
        raise ValidationError("eps_cap must be positive")
    u = np.arange(grid) / grid
    x1, x2 = np.meshgrid(u, u, indexing="ij")
    total = np.zeros((grid, grid))
    switch = 0.25 * min_lattice_distance(tau)
    for i in ins.insertions:
        y1 = wrap_centered(x1 - i.x1)
        y2 = wrap_centered(x2 - i.x2)
        az = np.abs(p_tau(tau, y1, y2))
        near = az < switch
        part = np.empty_like(total)
        part[near] = green_log_subtracted(tau, y1[near], y2[near]) - np.log(
            np.maximum(az[near], eps_cap)
        )
        far = ~near
        if np.any(far):
            part[far] = green(tau, (y1[far], y2[far]))
        total += i.alpha * part
    return total


def insertion_constant(tau: complex, ins: InsertionSet, q: float) -> float:
    """C_tau(z) = sum_{i<j} a_i a_j G(z_i - z_j) + (Theta/2) sum a_i^2
    - (q/2) ln(Im tau) sum a_i."""
    tau = complex(tau)
    items = ins.insertions
    total = 0.0
    for a in range(len(items)):
        for b in range(a + 1, len(items)):
            total += items[a].alpha * items[b].alpha * float(
                green(tau, (items[a].x1 - items[b].x1, items[a].x2 - items[b].x2))
            )
    total += 0.5 * theta_offset(tau) * sum(i.alpha**2 for i in items)
    total -= 0.5 * q * math.log(tau.imag) * sum(i.alpha for i in items)
    return total


@dataclass(frozen=True)
class PartitionEstimate:
    value: float
    std_error: float
    replicas: int
    diagnostic: str | None = None


def insertion_mass_samples(
    params: LQFTParams,
    tau: complex,
    ins: InsertionSet,
    mc: MonteCarloConfig,
    res: FieldResolution,
) -> np.ndarray:
    """Replica array of I = int e^{gamma H} dM_{gamma, tau}.

    Deterministic per (seed, base_stream + r); the chaos normalization is
    exact per cell, so resolution bias enters only through truncation of
    the field itself and the eps cap on H.
    """
    tau = complex(tau)
    gamma = params.gamma
    eps = res.eps_for(tau)
    g = res.grid
    sigma2 = regularized_variance(tau, res.cutoff, eps)
    weights = scaled_mode_weights(tau, res.cutoff, eps)
    h_grid = insertion_potential_grid(tau, ins, g, eps)
    tilt = np.exp(gamma * h_grid)
    scale = chaos_prefactor(tau, gamma, params.q) * tau.imag / (g * g)
    offset = -0.5 * gamma * gamma * sigma2
    out = np.empty(mc.replicas)
    for r in range(mc.replicas):
        gen = RngStream(mc.seed, mc.base_stream + r).generator()
        x = modes_to_grid(draw_hermitian_modes(gen, weights), g)
        out[r] = scale * float(np.sum(np.exp(gamma * x + offset) * tilt))
    return out


def partition_function(
    params: LQFTParams,
    tau: complex,
    ins: InsertionSet,
    mc: MonteCarloConfig,
    res: FieldResolution,
) -> PartitionEstimate:
    """Monte Carlo estimate of Pi_{gamma, mu}(g_tau, (z_i, alpha_i)).

    Raises SeibergViolationSum when sum(alpha) <= 0 (the zero-mode
    integral diverges); returns an exact zero with a diagnostic when some
    alpha_i >= Q (the chaos moment vanishes in the limit).
    """
    tau = complex(tau)
    if not ins.insertions or not ins.seiberg_sum_ok():
        raise SeibergViolationSum(
            f"sum of insertion weights must be positive, got {ins.alpha_sum:g}"
        )
    if not ins.seiberg_local_ok(params.q):
        worst = max(i.alpha for i in ins.insertions)
        return PartitionEstimate(
            value=0.0,
            std_error=0.0,
            replicas=0,
            diagnostic=(
                f"Seiberg bound alpha < Q violated (max alpha = {worst:g}, "
                f"Q = {params.q:g}); partition function vanishes"
            ),
        )
    s = ins.alpha_sum
    p = s / params.gamma
    masses = insertion_mass_samples(params, tau, ins, mc, res)
    moments = masses ** (-p)
    front = (
        free_field_partition(tau)
        * math.exp(insertion_constant(tau, ins, params.q))
        * math.gamma(p)
        * params.mu ** (-p)
        / params.gamma
    )
    mean = float(np.mean(moments))
    se = float(np.std(moments, ddof=1) / math.sqrt(len(moments)))
    return PartitionEstimate(
        value=front * mean, std_error=front * se, replicas=mc.replicas
    )


def weyl_anomaly_log_factor(conformal: SpectralField, q: float) -> float:
    """ln(Pi(e^phi g) / Pi(g)) = ((1 + 6 q^2) / 96 pi) * Dirichlet energy of phi."""
    return (1.0 + 6.0 * q * q) / (96.0 * math.pi) * dirichlet_energy(conformal)


def weyl_anomaly_factor(conformal: SpectralField, q: float) -> float:
    return math.exp(weyl_anomaly_log_factor(conformal, q))


@dataclass(frozen=True)
class LiouvilleSample:
    """One weighted draw from the Liouville field law.

    field is c + X + H - (Q/2) ln(Im tau) on the grid, measure the matched
    quantum-area cell weights with total mass exactly equal to volume.
    Expectations under the Liouville law are weighted averages with
    weight proportional to importance (the I^{-s/gamma} tilt).
    """

    field: np.ndarray
    measure: np.ndarray
    volume: float
    weight: float


def liouville_field_law_sampler(
    params: LQFTParams,
    tau: complex,
    ins: InsertionSet,
    mc: MonteCarloConfig,
    res: FieldResolution,
    y_volume: float | None = None,
):
    """Yield mc.replicas weighted samples of (field, quantum area measure).

    The volume marginal is Gamma(s/gamma, rate mu), independent of the
    modulus and of the shape of the measure; when y_volume is given every
    sample is conditioned on that total volume instead.
    """
    tau = complex(tau)
    if not ins.insertions or not ins.seiberg_sum_ok():
        raise SeibergViolationSum("sum of insertion weights must be positive")
    if not ins.seiberg_local_ok(params.q):
        raise SeibergViolationLocal(f"every alpha must stay below Q = {params.q:g}")
    gamma = params.gamma
    s = ins.alpha_sum
    p = s / gamma
    eps = res.eps_for(tau)
    g = res.grid
    sigma2 = regularized_variance(tau, res.cutoff, eps)
    weights = scaled_mode_weights(tau, res.cutoff, eps)
    h_grid = insertion_potential_grid(tau, ins, g, eps)
    tilt = np.exp(gamma * h_grid)
    scale = chaos_prefactor(tau, gamma, params.q) * tau.imag / (g * g)
    offset = -0.5 * gamma * gamma * sigma2
    shift = -0.5 * params.q * math.log(tau.imag)
    for r in range(mc.replicas):
        gen = RngStream(mc.seed, mc.base_stream + r).generator()
        x = modes_to_grid(draw_hermitian_modes(gen, weights), g)
        cells = scale * np.exp(gamma * x + offset) * tilt
        mass = float(np.sum(cells))
        y = float(gen.gamma(p, 1.0 / params.mu)) if y_volume is None else float(y_volume)
        c = (math.log(y) - math.log(mass)) / gamma
        yield LiouvilleSample(
            field=c + x + h_grid + shift,
            measure=(y / mass) * cells,
            volume=y,
            weight=mass ** (-p),
        )
