"""Virtual-time model of a shared disk under contention.

The latency a probe observes grows with the number of concurrently
active accessor tasks: base + slope * k. Demand is built per virtual
millisecond from the sender schedule plus an optional interferer, pushed
through a capacity cap (demand above capacity_accessors queues up as
backlog and keeps the disk saturated after the demanders stop), averaged
into raw probe reads, perturbed by seeded noise, and finally aggregated
into probing windows.

Two noise terms ride on each raw read: white Gaussian measurement noise
(noise_stddev_ms) and a slow mean-reverting baseline wander
(wander_stddev_ms with correlation time wander_time_ms) standing in for
background activity drifting over tens of seconds. Everything is
deterministic per seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.signal import lfilter

from .errors import WindowMismatch
from .sender import AccessSchedule

# Samples never drop below this fraction of the base latency.
CLAMP_FRACTION = 0.1

# noise preset name -> (noise_stddev_ms, wander_stddev_ms)
NOISE_PRESETS: dict[str, tuple[float, float]] = {
    "ideal": (0.0, 0.0),
    "moderate": (1.0, 0.7),
    "harsh": (4.0, 2.0),
}


@dataclass(frozen=True)
class DiskModel:
    base_latency_ms: float = 10.0
    contention_slope_ms: float = 2.0
    noise_stddev_ms: float = 0.0
    wander_stddev_ms: float = 0.0
    wander_time_ms: float = 30_000.0
    raw_sample_period_ms: int = 10
    capacity_accessors: int = 12

    def __post_init__(self) -> None:
        if self.base_latency_ms <= 0:
            raise ValueError("base_latency_ms must be positive")
        if self.contention_slope_ms < 0:
            raise ValueError("contention_slope_ms must be non-negative")
        if self.noise_stddev_ms < 0:
            raise ValueError("noise_stddev_ms must be non-negative")
        if self.wander_stddev_ms < 0:
            raise ValueError("wander_stddev_ms must be non-negative")
        if self.wander_time_ms <= 0:
            raise ValueError("wander_time_ms must be positive")
        if self.raw_sample_period_ms < 1:
            raise ValueError("raw_sample_period_ms must be >= 1")
        if self.capacity_accessors < 1:
            raise ValueError("capacity_accessors must be >= 1")

    @classmethod
    def preset(cls, name: str, **overrides) -> "DiskModel":
        """A model with the named noise preset applied."""
        try:
            noise, wander = NOISE_PRESETS[name]
        except KeyError:
            raise ValueError(
                f"unknown noise preset {name!r}, pick one of {sorted(NOISE_PRESETS)}"
            ) from None
        return cls(noise_stddev_ms=noise, wander_stddev_ms=wander, **overrides)


@dataclass(frozen=True)
class InterfererProfile:
    """Background load sharing the disk, piecewise constant over time.

    kind 'none' is silence, 'benchmark' fires bursts of `load` accessors
    for burst_ms every period_ms, 'stress' keeps `load` accessors busy
    for the whole run.
    """

    kind: str = "none"
    load: int = 0
    period_ms: int = 10_000
    burst_ms: int = 2_000

    def __post_init__(self) -> None:
        if self.kind not in ("none", "benchmark", "stress"):
            raise ValueError(f"unknown interferer kind {self.kind!r}")
        if self.load < 0:
            raise ValueError("load must be non-negative")
        if self.kind == "benchmark" and not 0 < self.burst_ms <= self.period_ms:
            raise ValueError("benchmark needs 0 < burst_ms <= period_ms")

    @classmethod
    def none(cls) -> "InterfererProfile":
        return cls()

    @classmethod
    def benchmark(cls) -> "InterfererProfile":
        return cls(kind="benchmark", load=3, period_ms=10_000, burst_ms=2_000)

    @classmethod
    def stress(cls) -> "InterfererProfile":
        return cls(kind="stress", load=10)

    def active_accessors(self, t_ms: int) -> int:
        if self.kind == "stress":
            return self.load
        if self.kind == "benchmark":
            return self.load if (t_ms % self.period_ms) < self.burst_ms else 0
        return 0

    def demand_per_ms(self, run_ms: int) -> np.ndarray:
        if self.kind == "stress":
            return np.full(run_ms, self.load, dtype=np.int64)
        if self.kind == "benchmark":
            t = np.arange(run_ms, dtype=np.int64)
            return np.where((t % self.period_ms) < self.burst_ms, self.load, 0)
        return np.zeros(run_ms, dtype=np.int64)


@dataclass(frozen=True)
class ContentionTrace:
    """Averaged probe latencies, one value per probing window."""

    probe_interval_ms: int
    window_starts_ms: tuple[int, ...]
    values_ms: tuple[float, ...]
    label: str = field(default="trace", compare=False)

    def values(self) -> np.ndarray:
        return np.asarray(self.values_ms, dtype=np.float64)

    def to_csv(self) -> str:
        lines = ["window_start_ms,avg_access_time_ms"]
        for start, value in zip(self.window_starts_ms, self.values_ms):
            lines.append(f"{start},{value!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str, label: str = "trace") -> "ContentionTrace":
        lines = [line for line in text.splitlines() if line.strip()]
        if not lines or lines[0] != "window_start_ms,avg_access_time_ms":
            raise ValueError("missing trace CSV header")
        starts: list[int] = []
        values: list[float] = []
        for line in lines[1:]:
            start_s, value_s = line.split(",")
            starts.append(int(start_s))
            values.append(float(value_s))
        if len(starts) < 2:
            raise ValueError("trace needs at least two windows")
        pri = starts[1] - starts[0]
        if any(b - a != pri for a, b in zip(starts, starts[1:])):
            raise ValueError("window starts are not evenly spaced")
        return cls(pri, tuple(starts), tuple(values), label=label)


def served_load(demand: np.ndarray, capacity: int) -> np.ndarray:
    """Per-ms load actually seen by the disk given a service capacity.

    Demand above capacity accumulates as backlog and is worked off at full
    capacity once demand drops (Lindley recursion over 1 ms steps). The
    result is the time-weighted active load within each millisecond.
    """
    if demand.size == 0 or int(demand.max(initial=0)) <= capacity:
        return demand
    excess = demand - capacity
    prefix = np.concatenate(([0], np.cumsum(excess)))
    backlog = prefix - np.minimum.accumulate(prefix)
    return demand + backlog[:-1] - backlog[1:]


def _baseline_wander(rng: np.random.Generator, n: int, disk: DiskModel) -> np.ndarray:
    """Stationary AR(1) wander sampled at the raw read period."""
    rho = math.exp(-disk.raw_sample_period_ms / disk.wander_time_ms)
    start = disk.wander_stddev_ms * rng.standard_normal()
    innovations = rng.standard_normal(n)
    scale = disk.wander_stddev_ms * math.sqrt(1.0 - rho * rho)
    wander, _ = lfilter([scale], [1.0, -rho], innovations, zi=np.array([rho * start]))
    return wander


def simulate(
    schedule: AccessSchedule,
    disk: DiskModel,
    interferer: InterfererProfile,
    pri_ms: int,
    run_duration_ms: int,
    lead_in_ms: int = 0,
    seed: int = 0,
) -> ContentionTrace:
    """Produce the receiver-side contention trace for one run.

    The schedule is shifted right by lead_in_ms; the interferer is anchored
    at virtual time zero. Windows of pri_ms must tile the run exactly.

    Raises:
        WindowMismatch: run_duration_ms is not a multiple of pri_ms, or
            pri_ms is not a multiple of the raw sample period.
        ValueError: the shifted schedule does not fit inside the run.
    """
    if pri_ms < 1:
        raise WindowMismatch(f"pri_ms must be >= 1, got {pri_ms}")
    if pri_ms % disk.raw_sample_period_ms != 0:
        raise WindowMismatch(
            f"pri_ms {pri_ms} is not a multiple of the raw sample period "
            f"{disk.raw_sample_period_ms}"
        )
    if run_duration_ms < pri_ms or run_duration_ms % pri_ms != 0:
        raise WindowMismatch(
            f"run duration {run_duration_ms} does not hold a whole number of "
            f"{pri_ms} ms windows"
        )
    if lead_in_ms < 0:
        raise ValueError("lead_in_ms must be non-negative")
    last_end = max((end for _, end in schedule.intervals), default=0)
    if lead_in_ms + last_end > run_duration_ms:
        raise ValueError(
            f"schedule ends at {lead_in_ms + last_end} ms, after the "
            f"{run_duration_ms} ms run"
        )

    demand = interferer.demand_per_ms(run_duration_ms)
    if schedule.intervals:
        demand = demand.copy()
        for start, end in schedule.intervals:
            demand[lead_in_ms + start : lead_in_ms + end] += schedule.n_accessors
    active = served_load(demand, disk.capacity_accessors)

    latency = disk.base_latency_ms + disk.contention_slope_ms * active.astype(
        np.float64
    )
    raw = latency.reshape(-1, disk.raw_sample_period_ms).mean(axis=1)

    rng = np.random.default_rng(seed)
    noisy = raw
    if disk.wander_stddev_ms > 0:
        noisy = noisy + _baseline_wander(rng, raw.size, disk)
    if disk.noise_stddev_ms > 0:
        noisy = noisy + rng.normal(0.0, disk.noise_stddev_ms, raw.size)
    if disk.wander_stddev_ms > 0 or disk.noise_stddev_ms > 0:
        noisy = np.maximum(noisy, CLAMP_FRACTION * disk.base_latency_ms)

    per_window = pri_ms // disk.raw_sample_period_ms
    values = noisy.reshape(-1, per_window).mean(axis=1)
    starts = tuple(range(0, run_duration_ms, pri_ms))
    return ContentionTrace(pri_ms, starts, tuple(float(v) for v in values))


def control_probe_trace(
    schedule: AccessSchedule,
    disk: DiskModel,
    pri_ms: int,
    run_duration_ms: int,
    lead_in_ms: int = 0,
    seed: int = 0,
) -> ContentionTrace:
    """Trace as seen by a third-party observer probing an otherwise idle disk.

    Sampling semantics are identical to simulate without an interferer;
    only the label differs.
    """
    trace = simulate(
        schedule,
        disk,
        InterfererProfile.none(),
        pri_ms,
        run_duration_ms,
        lead_in_ms,
        seed,
    )
    return replace(trace, label="probe")


_DISK_KEYS = {
    "base_latency_ms": float,
    "contention_slope_ms": float,
    "noise_stddev_ms": float,
    "wander_stddev_ms": float,
    "wander_time_ms": float,
    "raw_sample_period_ms": int,
    "capacity_accessors": int,
}

_INTERFERER_KEYS = {
    "interferer.kind": str,
    "interferer.load": int,
    "interferer.period_ms": int,
    "interferer.burst_ms": int,
}


def parse_channel_config(text: str) -> tuple[DiskModel, InterfererProfile]:
    """Build a disk model and interferer from 'key = value' lines.

    Lines starting with '#' and blank lines are skipped. Unknown keys are
    rejected so typos do not silently fall back to defaults.
    """
    disk_kwargs: dict[str, object] = {}
    interferer_kwargs: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, _, value = (part.strip() for part in line.partition("="))
        if key in _DISK_KEYS:
            disk_kwargs[key] = _DISK_KEYS[key](value)
        elif key in _INTERFERER_KEYS:
            interferer_kwargs[key.split(".", 1)[1]] = _INTERFERER_KEYS[key](value)
        else:
            raise ValueError(f"line {lineno}: unknown config key {key!r}")
    return DiskModel(**disk_kwargs), InterfererProfile(**interferer_kwargs)


def read_channel_config(path) -> tuple[DiskModel, InterfererProfile]:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_channel_config(handle.read())
