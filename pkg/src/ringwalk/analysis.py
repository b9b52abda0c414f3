"""Series recording, fit machinery, and quench aggregation.

The headline quantities of a run are the mixing time (slope of the
exponential relaxation of the distance to the flat state), the long-time
plateau average of that distance, and the power-law dependence of the
plateau on the bath/lattice dimension ratio.  Fits are ordinary least
squares on logs; the fit window is selected by a deterministic rule that
skips the ballistic transient and stops before the plateau.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .core import HADAMARD, PLUS_I_COIN, NonlocalEnvironment, WalkModel, evolve
from .envgen import rng_stream, sample_environment_pair
from .errors import (
    ConfigurationError,
    DomainError,
    FitWindowError,
    NumericsError,
    QuenchSampleError,
)
from .observables import position_mixedness


@dataclass(frozen=True, eq=False)
class ObservableSeries:
    """Per-step distance-to-uniform and entropy records of one run."""

    t: np.ndarray
    d_omega: np.ndarray
    entropy: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.ascontiguousarray(self.t, dtype=np.int64)
        d_omega = np.ascontiguousarray(self.d_omega, dtype=np.float64)
        entropy = np.ascontiguousarray(self.entropy, dtype=np.float64)
        if not (t.shape == d_omega.shape == entropy.shape) or t.ndim != 1 or t.size == 0:
            raise DomainError("t, d_omega and entropy must be equal-length 1d arrays")
        if t[0] != 0 or (t.size > 1 and not np.all(np.diff(t) == 1)):
            raise DomainError("t must run 0..T in unit steps")
        for arr in (t, d_omega, entropy):
            arr.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "d_omega", d_omega)
        object.__setattr__(self, "entropy", entropy)

    @property
    def steps(self) -> int:
        return int(self.t[-1])


@dataclass(frozen=True)
class FitResult:
    """Fitted parameters with standard errors and the data window used."""

    params: dict
    std_errors: dict
    window: tuple | list
    residual_rms: float

    def to_json(self, provenance: dict | None = None) -> dict:
        doc = {
            "params": dict(self.params),
            "std_errors": dict(self.std_errors),
            "window": list(self.window),
            "residual_rms": self.residual_rms,
        }
        if provenance:
            doc["provenance"] = provenance
        return doc


def walk_series(model: WalkModel, steps: int) -> ObservableSeries:
    """Evolve and record distance-to-uniform and entropy at every step."""
    n = steps + 1
    d_omega = np.empty(n, dtype=np.float64)
    entropy = np.empty(n, dtype=np.float64)

    def record(t, state):
        d_omega[t], entropy[t] = position_mixedness(state)

    evolve(model, steps, record)
    return ObservableSeries(np.arange(n), d_omega, entropy, model.describe())


def select_fit_window(series: ObservableSeries) -> tuple[int, int]:
    """Deterministic window for the exponential fit.

    The window starts at the first step where the distance has dropped to
    90% of its initial value, but not before ceil(d_s / 2) steps (the
    ballistic transient, when the lattice size is known from metadata).
    It ends just before the distance first crosses 1.5x the plateau
    estimate, taken as the mean of the final quarter of the series; if the
    tail is consistent with zero (no plateau, e.g. the classical walk) the
    window instead ends at the last step above 1e-6.
    """
    d = series.d_omega
    n = d.size
    if n < 50:
        raise FitWindowError(f"series has {n} points, need at least 50")
    floor_t = 0
    d_s = series.metadata.get("d_s")
    if d_s:
        floor_t = math.ceil(d_s / 2)
    decayed = np.nonzero(d <= 0.9 * d[0])[0]
    decayed = decayed[decayed >= floor_t]
    if decayed.size == 0:
        raise FitWindowError("series never decays to 90% of its initial value")
    t1 = int(decayed[0])

    tail = d[n - max(1, n // 4):]
    plateau = float(tail.mean())
    above_zero = np.nonzero(d > 1e-6)[0]
    if plateau > 1e-6:
        below = np.nonzero(d < 1.5 * plateau)[0]
        if below.size:
            t2 = int(below[0]) - 1
        elif above_zero.size:
            t2 = int(above_zero[-1])
        else:
            raise FitWindowError("series vanishes everywhere")
    else:
        if above_zero.size == 0:
            raise FitWindowError("series vanishes everywhere")
        t2 = int(above_zero[-1])

    if t2 - t1 < 10:
        raise FitWindowError(
            f"selected window [{t1}, {t2}] is too short; supply an explicit window"
        )
    return t1, t2


def _ols(x: np.ndarray, y: np.ndarray):
    """Slope, intercept, their standard errors, and residuals."""
    n = x.size
    xm = x.mean()
    ym = y.mean()
    dx = x - xm
    sxx = float((dx * dx).sum())
    slope = float((dx * (y - ym)).sum() / sxx)
    intercept = ym - slope * xm
    resid = y - (intercept + slope * x)
    dof = n - 2
    s2 = float((resid * resid).sum() / dof) if dof > 0 else 0.0
    se_slope = math.sqrt(s2 / sxx)
    se_intercept = math.sqrt(s2 * (1.0 / n + xm * xm / sxx))
    return slope, intercept, se_slope, se_intercept, resid


def fit_exponential_mixing(series: ObservableSeries, window: tuple[int, int]) -> FitResult:
    """Least squares of ln d_omega against t; mixing time is -1/slope."""
    t1, t2 = int(window[0]), int(window[1])
    if not (0 <= t1 < t2 <= series.steps):
        raise DomainError(f"window [{t1}, {t2}] outside series 0..{series.steps}")
    if t2 - t1 < 2:
        raise DomainError("window must contain at least 3 points")
    y = series.d_omega[t1 : t2 + 1]
    if y.min() <= 0.0:
        raise DomainError("distance must be positive everywhere in the fit window")
    x = series.t[t1 : t2 + 1].astype(np.float64)
    slope, _, se_slope, _, resid = _ols(x, np.log(y))
    if slope >= 0.0:
        raise DomainError(f"no decay in window [{t1}, {t2}] (slope {slope:.3e})")
    tau = -1.0 / slope
    se_tau = se_slope / (slope * slope)
    if not (math.isfinite(tau) and math.isfinite(se_tau)):
        raise NumericsError("exponential fit produced non-finite parameters")
    return FitResult(
        params={"tau_mix": tau},
        std_errors={"tau_mix": se_tau},
        window=(t1, t2),
        residual_rms=float(np.sqrt((resid * resid).mean())),
    )


def long_time_average(series: ObservableSeries, t0: int, t: int) -> float:
    """Mean of d_omega over [t0, t] inclusive (denominator t - t0 + 1)."""
    t0, t = int(t0), int(t)
    if not (0 <= t0 <= t <= series.steps):
        raise DomainError(f"range [{t0}, {t}] empty or outside series 0..{series.steps}")
    window = series.d_omega[t0 : t + 1]
    return float(window.sum() / window.size)


def default_average_start(series: ObservableSeries, window: tuple[int, int], tau: float) -> int:
    """Start of the long-time averaging range: end of the fit window plus
    five mixing times, capped at half the series."""
    if tau <= 0:
        raise DomainError(f"mixing time must be positive, got {tau}")
    t0 = int(window[1]) + math.ceil(5.0 * tau)
    return min(t0, series.steps // 2)


def fit_power_law(points) -> FitResult:
    """Fit y = C * r**(-x) by least squares on logs.

    ``points`` is a sequence of (ratio, value) pairs with ratio > 1; at
    least four points are required.  Invariant under permutation of the
    input.
    """
    pts = [(float(r), float(y)) for r, y in points]
    if len(pts) < 4:
        raise DomainError(f"need at least 4 points, got {len(pts)}")
    r = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if r.min() <= 1.0:
        raise DomainError(f"all ratios must exceed 1, min is {r.min()}")
    if y.min() <= 0.0:
        raise DomainError(f"all values must be positive, min is {y.min()}")
    slope, intercept, se_slope, se_intercept, resid = _ols(np.log(r), np.log(y))
    c = math.exp(intercept)
    if not all(map(math.isfinite, (c, slope, se_slope, se_intercept))):
        raise NumericsError("power-law fit produced non-finite parameters")
    return FitResult(
        params={"C": c, "x": -slope},
        std_errors={"C": c * se_intercept, "x": se_slope},
        window=[float(v) for v in r],
        residual_rms=float(np.sqrt((resid * resid).mean())),
    )


@dataclass(frozen=True, eq=False)
class NonlocalTemplate:
    """Everything a quench run fixes, minus the sampled branch matrices."""

    d_s: int
    d_e: int
    spread: float = 1.0
    coin: np.ndarray = field(default_factory=lambda: HADAMARD)
    initial_site: int = 0
    initial_coin: np.ndarray = field(default_factory=lambda: PLUS_I_COIN)
    initial_env: np.ndarray | None = None

    def realize(self, seed: int, *path: int) -> WalkModel:
        """Draw branch matrices from the stream (seed, *path) and build the model."""
        rng = rng_stream(seed, *path)
        e0, e1 = sample_environment_pair(self.d_e, self.spread, rng)
        return WalkModel(
            d_s=self.d_s,
            environment=NonlocalEnvironment(e0, e1),
            coin=self.coin,
            initial_site=self.initial_site,
            initial_coin=self.initial_coin,
            initial_env=self.initial_env,
            seed=seed,
        )


@dataclass(frozen=True, eq=False)
class QuenchResult:
    """Pointwise mean series over environment samples, the per-step sample
    standard deviation of the distance, and every per-sample series."""

    mean: ObservableSeries
    d_omega_std: np.ndarray
    samples: list


def quench_average(
    template: NonlocalTemplate,
    n_samples: int,
    base_seed,
    steps: int,
) -> QuenchResult:
    """Average over independently drawn environments.

    Sample k draws its branch matrices from the stream (base_seed, k) and
    keeps them for the whole run; initial state and coin are fixed.
    ``base_seed`` may be an int or a (seed, *path) tuple so sweeps can give
    every parameter point its own stream family.  Samples are combined in
    index order, so the aggregate is deterministic.
    """
    if n_samples < 1:
        raise ConfigurationError(f"n_samples must be >= 1, got {n_samples}")
    path = (int(base_seed),) if np.isscalar(base_seed) else tuple(int(p) for p in base_seed)
    samples = []
    for k in range(n_samples):
        try:
            model = template.realize(*path, k)
            series = walk_series(model, steps)
        except Exception as exc:
            raise QuenchSampleError(k, str(exc)) from exc
        meta = dict(series.metadata)
        meta["seed_path"] = list(path) + [k]
        samples.append(ObservableSeries(series.t, series.d_omega, series.entropy, meta))

    d_stack = np.stack([s.d_omega for s in samples])
    h_stack = np.stack([s.entropy for s in samples])
    mean_d = d_stack.mean(axis=0)
    mean_h = h_stack.mean(axis=0)
    std_d = (
        d_stack.std(axis=0, ddof=1) if n_samples > 1 else np.zeros_like(mean_d)
    )
    meta = samples[0].metadata.copy()
    meta.pop("seed_path", None)
    meta.update({"n_samples": n_samples, "base_seed": list(path), "spread": template.spread})
    mean_series = ObservableSeries(samples[0].t, mean_d, mean_h, meta)
    return QuenchResult(mean_series, std_d, samples)


@dataclass(frozen=True)
class PlateauSummary:
    """Long-time averages of a quench result over a common window."""

    t_start: int
    d_omega_mean: float
    d_omega_std: float
    entropy_mean: float


def plateau_summary(result: QuenchResult) -> PlateauSummary:
    """Plateau statistics of a quench result.

    The averaging window starts at ``default_average_start`` when the
    exponential fit succeeds on the mean series and at half the run
    otherwise; the same window is applied to every sample, so the quoted
    std is the environment-to-environment scatter of the plateau mean.
    """
    series = result.mean
    last = series.steps
    try:
        window = select_fit_window(series)
        fit = fit_exponential_mixing(series, window)
        t0 = default_average_start(series, window, fit.params["tau_mix"])
    except (FitWindowError, DomainError):
        t0 = last // 2
    d_mean = long_time_average(series, t0, last)
    per_sample = np.array([long_time_average(s, t0, last) for s in result.samples])
    d_std = float(per_sample.std(ddof=1)) if per_sample.size > 1 else 0.0
    h_mean = float(series.entropy[t0 : last + 1].mean())
    return PlateauSummary(t0, d_mean, d_std, h_mean)
