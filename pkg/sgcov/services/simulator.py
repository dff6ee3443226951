"""Monte Carlo coverage simulator.

Ground truth for every analytic result. Each trial draws a fresh snapshot of
the network around a typical receiver at the origin: PPP base stations in a
disk, unit-mean exponential fades and power-law path loss. Nothing here
reuses the analytic approximations.

Every trial produces one statistic, its SINR divided by the threshold of the
tier it is judged against, and the trial is covered at grid value ``g`` when
that statistic exceeds ``g``. A single sorted comparison per trial makes the
empirical curve non-increasing by construction.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from sgcov.config import settings
from sgcov.core.errors import ParameterError, SimulationError, require
from sgcov.core.point_process import Window, sample_ppp, voronoi_assign
from sgcov.core.rng import trial_rng
from sgcov.models.run_config import SimConfig
from sgcov.models.scenario import DownlinkParams, HetNetParams, ShadowingSpec, UplinkParams
from sgcov.tasks.trials import BatchJob, BatchResult, run_trials, split_batches

logger = logging.getLogger(__name__)

Z95 = 1.96
USER_DENSITY_FACTOR = 10.0
MAX_POINTS_PER_TRIAL = 5_000_000


@dataclass(frozen=True)
class SimulationTrace:
    """Per-trial details kept for statistical checks."""

    stats: np.ndarray
    serving_distance: np.ndarray
    serving_tier: np.ndarray
    covering: np.ndarray


@dataclass(frozen=True)
class CoverageEstimate:
    """Empirical coverage along a threshold grid with 95% normal-approximation intervals."""

    tau_linear: np.ndarray
    covered: np.ndarray
    trials: int
    window_radius: float
    details: dict = field(default_factory=dict)
    trace: SimulationTrace | None = None

    def __post_init__(self):
        if np.any(np.diff(self.covered) > 0):
            raise SimulationError("empirical coverage increases along the threshold grid")

    @property
    def tau_db(self) -> np.ndarray:
        return 10.0 * np.log10(self.tau_linear)

    @property
    def coverage(self) -> np.ndarray:
        return self.covered / self.trials

    @property
    def ci_half_width(self) -> np.ndarray:
        p = self.coverage
        return Z95 * np.sqrt(p * (1.0 - p) / self.trials)

    @property
    def ci_low(self) -> np.ndarray:
        return np.clip(self.coverage - self.ci_half_width, 0.0, 1.0)

    @property
    def ci_high(self) -> np.ndarray:
        return np.clip(self.coverage + self.ci_half_width, 0.0, 1.0)

    def rows(self) -> list[dict]:
        return [
            {
                "tau_db": float(db),
                "tau_linear": float(t),
                "coverage": float(c),
                "ci_low": float(lo),
                "ci_high": float(hi),
                "trials": self.trials,
            }
            for db, t, c, lo, hi in zip(
                self.tau_db, self.tau_linear, self.coverage, self.ci_low, self.ci_high
            )
        ]


# -- window sizing -----------------------------------------------------------


def typical_serving_distance(density: float) -> float:
    """Mean distance to the nearest point of a PPP, 1 / (2 sqrt(lambda))."""
    require(density > 0, "density must be positive", "density")
    return 0.5 / math.sqrt(density)


def lognormal_mean(sigma_db: float) -> float:
    sigma = sigma_db * math.log(10.0) / 10.0
    return math.exp(0.5 * sigma * sigma)


def _reference_radius(
    density: float, alpha: float, delta: float, min_expected_bs: int, gain: float = 1.0
) -> float:
    require(alpha > 2, "path-loss exponent must be > 2", "alpha")
    require(0 < delta <= 0.1, "truncation fraction must lie in (0, 0.1]", "delta")
    try:
        interference = typical_serving_distance(density) * ((gain + delta) / delta) ** (
            1.0 / (alpha - 2.0)
        )
    except OverflowError as e:
        raise SimulationError(
            f"window radius overflows for alpha={alpha}, delta={delta}; increase delta"
        ) from e
    count = math.sqrt(min_expected_bs / (math.pi * density))
    return max(interference, count)


def _scaled_radius(reference: float, power: float, alpha: float) -> float:
    return reference * power ** (1.0 / alpha)


def choose_window_radius(
    params: DownlinkParams | UplinkParams | HetNetParams,
    delta: float | None = None,
    min_expected_bs: int | None = None,
) -> float:
    """Radius of the simulation disk.

    The expected interference from beyond the radius is at most ``delta``
    times the expected interference between the mean serving distance and
    the radius, and the disk holds at least ``min_expected_bs`` BSs on
    average. With shadowing the far field is weighted by E[chi].

    For a HetNet the radius is that of a unit-power tier in power-normalised
    space; tier i uses radius * p_i^(1/alpha).
    """
    delta = settings.SIM_DELTA if delta is None else delta
    min_expected_bs = settings.SIM_MIN_EXPECTED_BS if min_expected_bs is None else min_expected_bs
    alpha = params.alpha
    weight = 2.0 / alpha

    if isinstance(params, HetNetParams):
        total = sum(t.density * t.power**weight for t in params.tiers)
        return _reference_radius(total, alpha, delta, min_expected_bs)
    if isinstance(params, DownlinkParams):
        gain = 1.0
        if params.shadowing is not None:
            if params.shadowing.kind != "lognormal":
                raise ParameterError("the simulator needs lognormal shadowing", field="shadowing")
            gain = lognormal_mean(params.shadowing.sigma_db)
        reference = _reference_radius(
            params.density * params.power**weight, alpha, delta, min_expected_bs, gain
        )
        return _scaled_radius(reference, params.power, alpha)
    if isinstance(params, UplinkParams):
        return _reference_radius(params.density, alpha, delta, min_expected_bs)
    raise ParameterError(f"unsupported scenario {type(params).__name__}", field="params")


# -- trial kernels -----------------------------------------------------------


def _draw_counts(rng, means: np.ndarray, max_redraws: int) -> tuple[np.ndarray, int]:
    for attempt in range(max_redraws + 1):
        counts = rng.poisson(means)
        if counts.sum() > 0:
            return counts, attempt
    raise SimulationError(
        f"simulation window empty after {max_redraws} redraws; the window is misconfigured"
    )


def _tiered_trial(rng, options: dict, grid_min: float) -> tuple[float, float, int, int, int]:
    """One downlink/HetNet snapshot; returns (stat, serving distance, tier, covering, redraws)."""
    radii = options["radii"]
    alpha = options["alpha"]
    sigma2 = options["sigma2"]
    counts, redraws = _draw_counts(
        rng, options["densities"] * np.pi * radii**2, options["max_redraws"]
    )
    total = int(counts.sum())
    tier = np.repeat(np.arange(len(counts)), counts)
    # 1 - U lies in (0, 1], so no BS sits exactly on the receiver.
    r = np.repeat(radii, counts) * np.sqrt(1.0 - rng.random(total))

    mean_power = options["powers"][tier] * r**-alpha
    if options["shadow_sigma_db"] > 0:
        mean_power = mean_power * 10.0 ** (options["shadow_sigma_db"] * rng.standard_normal(total) / 10.0)
    received = mean_power * rng.exponential(size=total)
    taus = options["taus"][tier]

    with np.errstate(divide="ignore"):
        if options["rule"] == "average_power":
            s = int(np.argmax(mean_power))
            interference = np.delete(received, s).sum()
            stat = received[s] / (sigma2 + interference) / taus[s]
            return float(stat), float(r[s]), int(tier[s]), int(stat > grid_min), redraws

        strongest = int(np.argmax(received))
        sinr = received / (sigma2 + received.sum() - received)
        # The strongest link is the only one where the subtraction can cancel.
        sinr[strongest] = received[strongest] / (sigma2 + np.delete(received, strongest).sum())
    ratio = sinr / taus
    best = int(np.argmax(ratio))
    covering = int(np.count_nonzero(ratio > grid_min))
    return float(ratio[best]), float(r[best]), int(tier[best]), covering, redraws


def _uplink_snapshot(rng, params: UplinkParams, user_density: float, radius: float, max_redraws: int):
    """Serving distance of the typical user and the interference terms at its BS."""
    window = Window.disk(radius)
    for attempt in range(max_redraws + 1):
        stations = sample_ppp(params.density, window, rng)
        if len(stations):
            break
    else:
        raise SimulationError(
            f"simulation window empty after {max_redraws} redraws; the window is misconfigured"
        )
    users = sample_ppp(user_density, window, rng)
    tagged = voronoi_assign(np.zeros((1, 2)), stations.points)
    t = int(tagged.site_index[0])
    serving_distance = float(tagged.distance[0])
    if len(users) == 0:
        return serving_distance, np.empty(0), attempt

    assignment = voronoi_assign(users.points, stations.points)
    # First user of each cell in a random order is that cell's active user.
    order = rng.permutation(len(users))
    cells, first = np.unique(assignment.site_index[order], return_index=True)
    active = order[first][cells != t]

    link = assignment.distance[active]
    offset = users.points[active] - stations.points[t]
    to_tagged = np.hypot(offset[:, 0], offset[:, 1])
    tx_power = params.power * link ** (params.alpha * params.epsilon)
    terms = tx_power * rng.exponential(size=len(active)) * to_tagged**-params.alpha
    return serving_distance, terms, attempt


def _uplink_trial(rng, job: BatchJob, grid_min: float) -> tuple[float, float, int, int, int]:
    params: UplinkParams = job.params
    serving_distance, terms, redraws = _uplink_snapshot(
        rng, params, job.options["user_density"], job.radius, job.options["max_redraws"]
    )
    signal = (
        rng.exponential()
        * params.power
        * serving_distance ** (params.alpha * (params.epsilon - 1.0))
    )
    with np.errstate(divide="ignore"):
        stat = float(np.float64(signal) / (params.sigma2 + terms.sum()))
    return stat, serving_distance, 0, int(stat > grid_min), redraws


def run_batch(job: BatchJob) -> BatchResult:
    """Run trials ``job.start`` .. ``job.stop - 1``; each draws from its own substream."""
    cfg: SimConfig = job.config
    n = job.stop - job.start
    grid_min = cfg.threshold_grid[0]
    stats = np.empty(n)
    distance = np.empty(n)
    tier = np.empty(n, dtype=np.int64)
    covering = np.empty(n, dtype=np.int64)
    redraws = 0

    for i, trial in enumerate(range(job.start, job.stop)):
        rng = trial_rng(cfg.master_seed, trial)
        if job.scenario == "uplink":
            outcome = _uplink_trial(rng, job, grid_min)
        else:
            outcome = _tiered_trial(rng, job.options, grid_min)
        stats[i], distance[i], tier[i], covering[i], extra = outcome
        redraws += extra

    if redraws:
        logger.warning(f"Batch {job.start}..{job.stop - 1}: {redraws} empty-window redraws")
    logger.debug(f"Finished batch {job.start}..{job.stop - 1}")
    return BatchResult(job.start, stats, distance, tier, covering, redraws)


# -- runs --------------------------------------------------------------------


def _check_size(expected_points: float, delta: float) -> None:
    if expected_points > MAX_POINTS_PER_TRIAL:
        raise SimulationError(
            f"about {expected_points:.3g} points per trial with delta={delta}; increase delta "
            "or set an explicit window radius"
        )


def _run(scenario: str, params, cfg: SimConfig, radius: float, options: dict, trace: bool):
    jobs = [
        BatchJob(scenario, params, cfg, radius, start, stop, options)
        for start, stop in split_batches(cfg.trials, cfg.batch_size)
    ]
    logger.info(
        f"Simulating {scenario}: {cfg.trials} trials in {len(jobs)} batches, "
        f"window radius {radius:.6g}, seed {cfg.master_seed}"
    )
    merged = run_trials(run_batch, jobs, cfg.workers)
    grid = np.asarray(cfg.threshold_grid, dtype=float)
    covered = np.count_nonzero(merged.stats[:, None] > grid[None, :], axis=0)
    return CoverageEstimate(
        tau_linear=grid,
        covered=covered,
        trials=cfg.trials,
        window_radius=radius,
        details={"scenario": scenario, "redraws": merged.redraws, "seed": cfg.master_seed},
        trace=SimulationTrace(merged.stats, merged.serving_distance, merged.serving_tier, merged.covering)
        if trace
        else None,
    )


def _tier_options(densities, powers, radii, taus, params, rule, shadow_sigma_db, cfg) -> dict:
    return {
        "densities": np.asarray(densities, dtype=float),
        "powers": np.asarray(powers, dtype=float),
        "radii": np.asarray(radii, dtype=float),
        "taus": np.asarray(taus, dtype=float),
        "alpha": params.alpha,
        "sigma2": params.sigma2,
        "rule": rule,
        "shadow_sigma_db": shadow_sigma_db,
        "max_redraws": cfg.max_empty_redraws,
    }


def simulate_downlink(
    params: DownlinkParams,
    cfg: SimConfig,
    shadowing: ShadowingSpec | None = None,
    trace: bool = False,
) -> CoverageEstimate:
    """Empirical downlink coverage with nearest-BS association.

    With shadowing, association, serving signal and interference all see
    unit-median lognormal gains, so the nearest BS is the strongest on
    average rather than the closest.
    """
    if shadowing is not None:
        params = params.model_copy(update={"shadowing": shadowing})
    sigma_db = 0.0
    if params.shadowing is not None:
        if params.shadowing.kind != "lognormal":
            raise ParameterError("the simulator needs lognormal shadowing", field="shadowing")
        sigma_db = params.shadowing.sigma_db
    radius = cfg.window_radius or choose_window_radius(params, cfg.delta, cfg.min_expected_bs)
    _check_size(params.density * math.pi * radius**2, cfg.delta)
    options = _tier_options(
        [params.density], [params.power], [radius], [1.0], params, "average_power", sigma_db, cfg
    )
    return _run("downlink", params, cfg, radius, options, trace)


def simulate_hetnet(params: HetNetParams, cfg: SimConfig, trace: bool = False) -> CoverageEstimate:
    """Empirical k-tier coverage.

    Grid values scale every tier threshold. The instantaneous-power rule is
    evaluated exactly, for any thresholds, by checking every BS.
    """
    reference = cfg.window_radius or choose_window_radius(params, cfg.delta, cfg.min_expected_bs)
    radii = [_scaled_radius(reference, t.power, params.alpha) for t in params.tiers]
    _check_size(sum(t.density * math.pi * r**2 for t, r in zip(params.tiers, radii)), cfg.delta)
    options = _tier_options(
        [t.density for t in params.tiers],
        [t.power for t in params.tiers],
        radii,
        [t.tau for t in params.tiers],
        params,
        params.rule,
        0.0,
        cfg,
    )
    estimate = _run("hetnet", params, cfg, reference, options, trace)
    estimate.details["tier_radii"] = radii
    return estimate


def resolve_user_density(params: UplinkParams, user_density: float | None = None) -> float:
    density = user_density or params.user_density or USER_DENSITY_FACTOR * params.density
    if density < USER_DENSITY_FACTOR * params.density:
        logger.warning(
            f"User density {density:.3g} is below {USER_DENSITY_FACTOR:g}x the BS density; "
            "many cells will have no active user"
        )
    return density


def simulate_uplink(
    params: UplinkParams,
    cfg: SimConfig,
    user_density: float | None = None,
    trace: bool = False,
) -> CoverageEstimate:
    """Empirical uplink coverage.

    Users are assigned to their true nearest BS, each other cell with a user
    activates one of them at random, and transmit powers use true link
    distances. Powers are uncapped.
    """
    lam_u = resolve_user_density(params, user_density)
    radius = cfg.window_radius or choose_window_radius(params, cfg.delta, cfg.min_expected_bs)
    _check_size((params.density + lam_u) * math.pi * radius**2, cfg.delta)
    options = {"user_density": lam_u, "max_redraws": cfg.max_empty_redraws}
    estimate = _run("uplink", params, cfg, radius, options, trace)
    estimate.details["user_density"] = lam_u
    return estimate


# -- Laplace estimators ------------------------------------------------------


def empirical_laplace(
    s: float,
    params: DownlinkParams | UplinkParams,
    cfg: SimConfig,
    r_excl: float = 0.0,
    fading: str = "rayleigh",
    user_density: float | None = None,
) -> float:
    """Sample mean of exp(-s I) over simulated snapshots.

    Downlink: I sums every BS outside ``r_excl`` around the origin, faded or
    not. Uplink: I is the interference at the typical user's BS.
    """
    require(s >= 0, "Laplace argument must be non-negative", "s")
    values = np.empty(cfg.trials)

    if isinstance(params, UplinkParams):
        lam_u = resolve_user_density(params, user_density)
        radius = cfg.window_radius or choose_window_radius(params, cfg.delta, cfg.min_expected_bs)
        for trial in range(cfg.trials):
            rng = trial_rng(cfg.master_seed, trial)
            _, terms, _ = _uplink_snapshot(rng, params, lam_u, radius, cfg.max_empty_redraws)
            values[trial] = math.exp(-s * terms.sum())
        return float(values.mean())

    require(fading in ("rayleigh", "none"), f"unknown fading {fading!r}", "fading")
    radius = cfg.window_radius or choose_window_radius(params, cfg.delta, cfg.min_expected_bs)
    require(radius > r_excl, "window must extend beyond the exclusion radius", "r_excl")
    window = Window.annulus(r_excl, radius) if r_excl > 0 else Window.disk(radius)
    for trial in range(cfg.trials):
        rng = trial_rng(cfg.master_seed, trial)
        sample = sample_ppp(params.density, window, rng)
        gains = params.power * sample.radii**-params.alpha
        if fading == "rayleigh":
            gains = gains * rng.exponential(size=len(sample))
        values[trial] = math.exp(-s * gains.sum())
    return float(values.mean())


def simulate(params: DownlinkParams | UplinkParams | HetNetParams, cfg: SimConfig, trace: bool = False):
    """Dispatch on the parameter record's scenario."""
    if isinstance(params, DownlinkParams):
        return simulate_downlink(params, cfg, trace=trace)
    if isinstance(params, UplinkParams):
        return simulate_uplink(params, cfg, trace=trace)
    if isinstance(params, HetNetParams):
        return simulate_hetnet(params, cfg, trace=trace)
    raise ParameterError(f"unsupported scenario {type(params).__name__}", field="params")
