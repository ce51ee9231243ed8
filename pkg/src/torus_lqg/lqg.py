"""Quantum gravity layer over moduli space.

Couples a matter CFT of central charge c_m <= 1 to the Liouville sector
through the KPZ relation gamma = (sqrt(25 - c_m) - sqrt(1 - c_m)) / sqrt(6)
and the weight-dressing rule Delta_m + Delta_alpha = 1.  The modulus of
the quantum torus then carries an explicit unnormalized density against
lambda_S(d tau) = d^2 tau / (Im tau)^2,

    rho(tau) = E[I^{-s/gamma}] e^{C_tau(z)} Z_Matter(tau)
               (Im tau)^n sqrt(Im tau) |eta(tau)|^2,

with I the insertion-tilted chaos mass.  Everything stochastic in rho is
the single negative moment, which is what gets tabulated (and cached)
over a fundamental-domain grid; the volume is an independent
Gamma(s/gamma, mu) draw, so joint sampling factorizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cache import MomentCache, moment_key
from .config import FieldResolution, MonteCarloConfig
from .errors import (
    InvalidCentralCharge,
    NoAdmissibleRoot,
    SeibergViolationLocal,
    TruncationTooTight,
    ValidationError,
)
from .gff import RngStream, free_field_partition
from .lqft import InsertionSet, LQFTParams, insertion_constant, insertion_mass_samples
from .lqft import liouville_field_law_sampler
from .special import dedekind_eta, theta_aux

__all__ = [
    "MatterCFT",
    "DensityTable",
    "JointSample",
    "gamma_from_central_charge",
    "alpha_from_matter_weight",
    "params_from_matter",
    "template_from_matter",
    "ghost_partition",
    "matter_partition",
    "negative_moment",
    "modulus_density",
    "build_density_table",
    "sample_modulus",
    "joint_law_sampler",
]

_KINDS = ("pure_gravity", "ising", "free_field_power")


@dataclass(frozen=True)
class MatterCFT:
    kind: str
    central_charge: float

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValidationError(f"unknown matter kind {self.kind!r}")
        if self.kind == "pure_gravity" and self.central_charge != 0.0:
            raise InvalidCentralCharge("pure gravity has central charge 0")
        if self.kind == "ising" and self.central_charge != 0.5:
            raise InvalidCentralCharge("critical Ising has central charge 1/2")
        if self.central_charge > 1.0:
            raise InvalidCentralCharge(
                f"central charge must not exceed 1, got {self.central_charge}"
            )

    @classmethod
    def pure_gravity(cls) -> "MatterCFT":
        return cls("pure_gravity", 0.0)

    @classmethod
    def ising(cls) -> "MatterCFT":
        return cls("ising", 0.5)

    @classmethod
    def free_field_power(cls, c_m: float) -> "MatterCFT":
        return cls("free_field_power", float(c_m))


def gamma_from_central_charge(c_m: float) -> float:
    """gamma = (sqrt(25 - c_m) - sqrt(1 - c_m)) / sqrt(6), in (0, 2]."""
    if c_m > 1.0:
        raise InvalidCentralCharge(f"central charge must not exceed 1, got {c_m}")
    return (math.sqrt(25.0 - c_m) - math.sqrt(1.0 - c_m)) / math.sqrt(6.0)


def alpha_from_matter_weight(delta_m: float, q: float) -> float:
    """Dressing weight: the root of (alpha/2)(q - alpha/2) = 1 - delta_m
    below q.

    alpha = q - sqrt(q^2 + 4 delta_m - 4).  No real root means the matter
    weight cannot be dressed at this coupling; the double root alpha = q
    (reached exactly at the c_m = 1 boundary with delta_m = 0) fails the
    strict Seiberg bound and is reported as such.
    """
    disc = q * q + 4.0 * delta_m - 4.0
    if disc < 0:
        raise NoAdmissibleRoot(
            f"no real dressing for matter weight {delta_m} at Q = {q:g}"
        )
    root = q - math.sqrt(disc)
    if root >= q:
        raise NoAdmissibleRoot(
            f"dressing root equals Q = {q:g} (central-charge boundary); "
            "the Seiberg bound alpha < Q fails"
        )
    return root


def params_from_matter(matter: MatterCFT, mu: float = 1.0) -> LQFTParams:
    return LQFTParams(gamma=gamma_from_central_charge(matter.central_charge), mu=mu)


def template_from_matter(
    matter: MatterCFT,
    params: LQFTParams,
    points,
    delta_ms=None,
) -> InsertionSet:
    """Insertion set with each point dressed per its matter weight.

    delta_ms defaults to all-zero (identity operators), which dresses
    every point with alpha = gamma.
    """
    points = list(points)
    if delta_ms is None:
        delta_ms = [0.0] * len(points)
    if len(delta_ms) != len(points):
        raise ValidationError("one matter weight per insertion point required")
    q = params.q
    return InsertionSet(
        tuple(
            (x1, x2, alpha_from_matter_weight(d, q))
            for (x1, x2), d in zip(points, delta_ms)
        )
    )


def ghost_partition(tau: complex) -> float:
    """Z_Ghost = |eta(tau)|^4 / (2 Im tau)."""
    tau = complex(tau)
    return abs(dedekind_eta(tau)) ** 4 / (2.0 * tau.imag)


def matter_partition(matter: MatterCFT, tau: complex) -> float:
    """Z_Matter per kind; overall constants are fixed to 1 (the modulus
    law is normalized downstream, so they cancel)."""
    tau = complex(tau)
    if matter.kind == "pure_gravity":
        return 1.0
    if matter.kind == "ising":
        eta = dedekind_eta(tau)
        return sum(abs(theta_aux(k, tau) / (2.0 * eta)) for k in (2, 3, 4))
    return free_field_partition(tau) ** matter.central_charge


def negative_moment(
    params: LQFTParams,
    tau: complex,
    ins: InsertionSet,
    mc: MonteCarloConfig,
    res: FieldResolution,
    cache: MomentCache | None = None,
) -> tuple[float, float]:
    """(estimate, SE) of E[I^{-s/gamma}], memoized when a cache is given."""
    tau = complex(tau)
    if not ins.seiberg_local_ok(params.q):
        raise SeibergViolationLocal(
            f"insertion weight reaches Q = {params.q:g}; "
            "the modulus law is not defined there"
        )
    key = None
    if cache is not None:
        key = moment_key(
            tau,
            params.gamma,
            ins.insertions,
            res.cutoff,
            res.grid_factor,
            res.eps_for(tau),
            mc.replicas,
            mc.seed,
            mc.base_stream,
        )
        hit = cache.get(key)
        if hit is not None:
            return float(hit["moment"]), float(hit["std_error"])
    p = ins.alpha_sum / params.gamma
    masses = insertion_mass_samples(params, tau, ins, mc, res)
    vals = masses ** (-p)
    moment = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / math.sqrt(len(vals)))
    if cache is not None:
        cache.put(
            key,
            {
                "tau": [tau.real, tau.imag],
                "gamma": params.gamma,
                "moment": moment,
                "std_error": se,
                "replicas": mc.replicas,
            },
        )
    return moment, se


def _deterministic_factor(
    matter: MatterCFT, params: LQFTParams, ins: InsertionSet, tau: complex
) -> float:
    n = len(ins.insertions)
    im = tau.imag
    return (
        math.exp(insertion_constant(tau, ins, params.q))
        * matter_partition(matter, tau)
        * im**n
        * math.sqrt(im)
        * abs(dedekind_eta(tau)) ** 2
    )


def modulus_density(
    matter: MatterCFT,
    params: LQFTParams,
    ins: InsertionSet,
    tau: complex,
    mc: MonteCarloConfig,
    res: FieldResolution,
    cache: MomentCache | None = None,
) -> tuple[float, float]:
    """Unnormalized modulus density w.r.t. lambda_S at one point, with SE."""
    tau = complex(tau)
    moment, se = negative_moment(params, tau, ins, mc, res, cache)
    det = _deterministic_factor(matter, params, ins, tau)
    return det * moment, det * se


@dataclass(frozen=True)
class DensityTable:
    """Cell-centered density table on a fundamental-domain grid.

    cell_mass integrates density * lambda_S over each cell (center value
    times exact lambda_S cell area), zeroed outside the domain;
    tail_fraction estimates the relative mass above the Im cutoff.
    """

    matter: MatterCFT
    params: LQFTParams
    insertions: InsertionSet
    re_edges: np.ndarray
    im_edges: np.ndarray
    density: np.ndarray
    std_error: np.ndarray
    cell_mass: np.ndarray
    tail_fraction: float

    @property
    def re_centers(self) -> np.ndarray:
        return 0.5 * (self.re_edges[:-1] + self.re_edges[1:])

    @property
    def im_centers(self) -> np.ndarray:
        return 0.5 * (self.im_edges[:-1] + self.im_edges[1:])

    @property
    def total_mass(self) -> float:
        return float(self.cell_mass.sum())


def _im_edges(im_cells: int, t_max: float) -> np.ndarray:
    """Uniform spacing up to Im = 2, logarithmic above."""
    lo = math.sqrt(3.0) / 2.0
    if t_max <= 2.0:
        return np.linspace(lo, t_max, im_cells + 1)
    n_lin = max(1, im_cells // 2)
    n_log = im_cells - n_lin
    lin = np.linspace(lo, 2.0, n_lin + 1)
    log = np.geomspace(2.0, t_max, n_log + 1)
    return np.concatenate([lin, log[1:]])


def _in_fundamental_domain(re: float, im: float) -> bool:
    return abs(re) <= 0.5 and re * re + im * im >= 1.0


def build_density_table(
    matter: MatterCFT,
    params: LQFTParams,
    ins: InsertionSet,
    mc: MonteCarloConfig,
    res: FieldResolution,
    re_cells: int = 12,
    im_cells: int = 12,
    t_max: float = 8.0,
    tail_tol: float = 1e-3,
    cache: MomentCache | None = None,
    threads: int = 1,
) -> DensityTable:
    """Tabulate the unnormalized density over the fundamental domain.

    Cells whose center lies outside the domain carry zero mass.  The tail
    above t_max is bounded by an exponential with the KPZ-compensated
    rate (pi/6)(1 - c_m) anchored at the last populated row; if the
    bound exceeds tail_tol of the total, TruncationTooTight asks for a
    larger t_max.  All grid points share the replica streams (common
    random numbers), so the table is smooth in tau and bit-for-bit
    reproducible for a fixed (seed, grid).
    """
    if t_max <= 2.0:
        raise ValidationError("t_max must exceed 2")
    re_edges = np.linspace(-0.5, 0.5, re_cells + 1)
    im_edges = _im_edges(im_cells, t_max)
    re_c = 0.5 * (re_edges[:-1] + re_edges[1:])
    im_c = 0.5 * (im_edges[:-1] + im_edges[1:])
    density = np.zeros((re_cells, im_cells))
    stderr = np.zeros((re_cells, im_cells))

    tasks = []
    for a in range(re_cells):
        for b in range(im_cells):
            if _in_fundamental_domain(float(re_c[a]), float(im_c[b])):
                tasks.append((a, b, complex(re_c[a], im_c[b])))

    def work(item):
        a, b, tau = item
        return a, b, modulus_density(matter, params, ins, tau, mc, res, cache)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, tasks))
    else:
        results = [work(t) for t in tasks]
    for a, b, (val, se) in results:
        density[a, b] = val
        stderr[a, b] = se

    # exact lambda_S area of each rectangle, masked to the domain
    d_re = np.diff(re_edges)
    inv_im = 1.0 / im_edges[:-1] - 1.0 / im_edges[1:]
    area = np.outer(d_re, inv_im)
    mask = density > 0
    cell_mass = np.where(mask, density * area, 0.0)

    total = float(cell_mass.sum())
    if total <= 0:
        raise ValidationError("density table is empty")
    rate = (math.pi / 6.0) * (1.0 - matter.central_charge)
    if rate <= 0:
        raise TruncationTooTight(
            "density does not decay at central charge 1; no finite t_max works"
        )
    last = im_cells - 1
    row_mass = float(cell_mass[:, last].sum())
    row_width = float(im_edges[last + 1] - im_edges[last])
    tail = (row_mass / row_width) / rate * math.exp(
        -rate * (t_max - float(im_c[last]))
    )
    tail_fraction = tail / (total + tail)
    if tail_fraction > tail_tol:
        raise TruncationTooTight(
            f"estimated tail mass fraction {tail_fraction:.2e} above Im = {t_max:g} "
            f"exceeds {tail_tol:g}; increase t_max"
        )
    return DensityTable(
        matter=matter,
        params=params,
        insertions=ins,
        re_edges=re_edges,
        im_edges=im_edges,
        density=density,
        std_error=stderr,
        cell_mass=cell_mass,
        tail_fraction=tail_fraction,
    )


def sample_modulus(table: DensityTable, count: int, rng: RngStream) -> np.ndarray:
    """Inverse-CDF draws over table cells, bilinear density within cells.

    Within a chosen cell the density is interpolated bilinearly between
    neighboring cell centers and weighted by the 1/Im^2 volume factor;
    proposals are accepted by rejection against the cell's corner bound.
    Proposals falling outside the fundamental domain (possible in cells
    straddling the unit-circle arc) are redrawn, so every sample lies in
    the domain.
    """
    if count <= 0:
        raise ValidationError("count must be positive")
    gen = rng.generator()
    probs = (table.cell_mass / table.total_mass).ravel()
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    re_c, im_c = table.re_centers, table.im_centers
    n_re, n_im = len(re_c), len(im_c)

    def density_at(re: float, im: float) -> float:
        a = np.clip(np.searchsorted(re_c, re) - 1, 0, n_re - 2)
        b = np.clip(np.searchsorted(im_c, im) - 1, 0, n_im - 2)
        fr = np.clip((re - re_c[a]) / (re_c[a + 1] - re_c[a]), 0.0, 1.0)
        fi = np.clip((im - im_c[b]) / (im_c[b + 1] - im_c[b]), 0.0, 1.0)
        d = table.density
        return float(
            d[a, b] * (1 - fr) * (1 - fi)
            + d[a + 1, b] * fr * (1 - fi)
            + d[a, b + 1] * (1 - fr) * fi
            + d[a + 1, b + 1] * fr * fi
        )

    out = np.empty(count, dtype=complex)
    for k in range(count):
        cell = int(np.searchsorted(cdf, gen.random()))
        a, b = divmod(cell, n_im)
        re_lo, re_hi = table.re_edges[a], table.re_edges[a + 1]
        im_lo, im_hi = table.im_edges[b], table.im_edges[b + 1]
        # bilinear values inside the cell are convex combinations of the
        # surrounding centers, so their max bounds the interpolant
        bound = float(
            table.density[max(a - 1, 0) : a + 2, max(b - 1, 0) : b + 2].max()
        )
        while True:
            re = float(gen.uniform(re_lo, re_hi))
            # Im from the cell's exact 1/Im^2 marginal; the volume factor
            # then cancels in the acceptance ratio
            u = gen.random()
            im = 1.0 / (1.0 / im_lo - u * (1.0 / im_lo - 1.0 / im_hi))
            if not _in_fundamental_domain(re, im):
                continue
            if gen.random() * bound <= density_at(re, im):
                out[k] = complex(re, im)
                break
    return out


@dataclass(frozen=True)
class JointSample:
    tau: complex
    volume: float
    measure: np.ndarray | None


def joint_law_sampler(
    matter: MatterCFT,
    params: LQFTParams,
    ins: InsertionSet,
    table: DensityTable,
    count: int,
    rng: RngStream,
    res: FieldResolution | None = None,
    resample_batch: int = 8,
):
    """Yield (tau, volume, measure) with tau from the table, volume an
    independent Gamma(s/gamma, mu) draw, and (when res is given) one
    quantum-area measure at that tau conditioned on that volume.

    The conditional measure is picked from resample_batch candidate
    fields by importance resampling on the I^{-s/gamma} weights; larger
    batches sharpen the conditional law at linear cost.
    """
    taus = sample_modulus(table, count, rng)
    gen = rng.child(1).generator()
    p = ins.alpha_sum / params.gamma
    for k in range(count):
        tau = complex(taus[k])
        y = float(gen.gamma(p, 1.0 / params.mu))
        measure = None
        if res is not None:
            sub = MonteCarloConfig(
                replicas=resample_batch,
                seed=rng.seed,
                base_stream=rng.stream + 7919 * (k + 1),
            )
            samples = list(
                liouville_field_law_sampler(params, tau, ins, sub, res, y_volume=y)
            )
            w = np.array([s.weight for s in samples])
            pick = int(gen.choice(len(samples), p=w / w.sum()))
            measure = samples[pick].measure
        yield JointSample(tau=tau, volume=y, measure=measure)
