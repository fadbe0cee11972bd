"""End-to-end bit error rate experiments.

A trial frames a pseudo-random payload, turns it into an access schedule,
simulates the shared disk under a chosen interferer and noise model, and
decodes the probe trace blind. Reports aggregate bit errors over several
trials with per-phase failure accounting; a trial whose decode raises is
charged the whole payload.
"""

from __future__ import annotations

import dataclasses
import math
from collections import Counter
from dataclasses import dataclass, field

from .bits import Bits, random_bits
from .channel import DiskModel, InterfererProfile, simulate
from .errors import DecodeError
from .framing import encapsulate
from .receiver import DecoderConfig, decode_message
from .sender import SenderConfig, build_access_schedule, encode_tcv


@dataclass(frozen=True)
class ChannelParams:
    """The four knobs that define an operating point."""

    bit_time_ms: int
    probe_interval_ms: int
    n_accessors: int = 5
    threshold: float = 0.9


# Operating points with workable error rates under moderate noise, from
# slow-and-careful to fast-and-loose. Bit time in ms, so the last row
# signals at 0.1 bit/s and the first at 1 bit/s.
OPERATING_POINTS: tuple[ChannelParams, ...] = (
    ChannelParams(1000, 40, 2, 0.4),
    ChannelParams(2000, 200, 5, 0.5),
    ChannelParams(3000, 200, 5, 0.65),
    ChannelParams(4000, 200, 5, 0.75),
    ChannelParams(5000, 200, 5, 0.8),
    ChannelParams(8000, 400, 5, 0.85),
    ChannelParams(10000, 400, 5, 0.9),
)

# Slowest, most conservative point; used for interferer robustness runs.
ROBUSTNESS_POINT = ChannelParams(10000, 400, 5, 0.9)

INTERFERER_SCENARIOS = ("none", "benchmark", "stress")


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything needed to reproduce a BER measurement."""

    params: ChannelParams
    payload_bits: int = 96
    n_trials: int = 10
    base_seed: int = 0
    payload_seed: int = 1234
    disk: DiskModel = field(default_factory=DiskModel)
    interferer: InterfererProfile = field(default_factory=InterfererProfile.none)
    lead_in_ms: int | None = None
    tail_ms: int | None = None

    def __post_init__(self) -> None:
        if self.payload_bits < 1:
            raise ValueError("payload_bits must be >= 1")
        if self.n_trials < 1:
            raise ValueError("n_trials must be >= 1")


@dataclass(frozen=True)
class BerReport:
    params: ChannelParams
    interferer_kind: str
    n_trials: int
    payload_bits: int
    bit_errors: int
    decode_failures: int
    failure_phases: tuple[tuple[str, int], ...] = ()

    @property
    def total_bits(self) -> int:
        return self.n_trials * self.payload_bits

    @property
    def ber(self) -> float:
        return self.bit_errors / self.total_bits


def _count_payload_errors(expected: Bits, got: Bits) -> int:
    """Hamming distance over the overlap plus any length mismatch, capped."""
    overlap = min(len(expected), len(got))
    errors = sum(1 for a, b in zip(expected[:overlap], got[:overlap]) if a != b)
    errors += abs(len(expected) - len(got))
    return min(errors, len(expected))


def run_trial(spec: ExperimentSpec, trial: int, payload: Bits) -> tuple[int, str | None]:
    """One framed transmission; returns (bit errors, failed phase or None)."""
    p = spec.params
    frame = encapsulate(payload)
    tcv = encode_tcv(frame, p.bit_time_ms)
    sender = SenderConfig(p.bit_time_ms, p.n_accessors, p.threshold)
    schedule = build_access_schedule(tcv, sender)

    lead_in = 2 * p.bit_time_ms if spec.lead_in_ms is None else spec.lead_in_ms
    tail = p.bit_time_ms if spec.tail_ms is None else spec.tail_ms
    span = lead_in + schedule.total_duration_ms + tail
    run_ms = math.ceil(span / p.probe_interval_ms) * p.probe_interval_ms

    trace = simulate(
        schedule,
        spec.disk,
        spec.interferer,
        pri_ms=p.probe_interval_ms,
        run_duration_ms=run_ms,
        lead_in_ms=lead_in,
        seed=spec.base_seed + trial,
    )
    decoder = DecoderConfig(p.bit_time_ms, p.probe_interval_ms)
    try:
        decoded = decode_message(trace, decoder)
    except DecodeError as exc:
        return len(payload), exc.phase
    return _count_payload_errors(payload, decoded), None


def run_ber(spec: ExperimentSpec) -> BerReport:
    """Aggregate BER over spec.n_trials independent noise realisations.

    The payload is fixed by payload_seed so that every trial (and every
    scenario sharing the spec) transmits the same bits; only the channel
    seed varies.
    """
    payload = random_bits(spec.payload_bits, spec.payload_seed)
    bit_errors = 0
    phases: Counter[str] = Counter()
    for trial in range(spec.n_trials):
        errors, failed_phase = run_trial(spec, trial, payload)
        bit_errors += errors
        if failed_phase is not None:
            phases[failed_phase] += 1
    return BerReport(
        params=spec.params,
        interferer_kind=spec.interferer.kind,
        n_trials=spec.n_trials,
        payload_bits=spec.payload_bits,
        bit_errors=bit_errors,
        decode_failures=sum(phases.values()),
        failure_phases=tuple(sorted(phases.items())),
    )


def sweep(spec: ExperimentSpec, axis: str, values) -> tuple[BerReport, ...]:
    """run_ber at each value of one ChannelParams field, rest held fixed."""
    names = {f.name for f in dataclasses.fields(ChannelParams)}
    if axis not in names:
        raise ValueError(f"unknown sweep axis {axis!r}, expected one of {sorted(names)}")
    reports = []
    for value in values:
        params = dataclasses.replace(spec.params, **{axis: value})
        reports.append(run_ber(dataclasses.replace(spec, params=params)))
    return tuple(reports)


def robustness_scenarios(spec: ExperimentSpec) -> tuple[tuple[str, BerReport], ...]:
    """BER under no, benchmark and stress interference with shared seeds."""
    out = []
    for name in INTERFERER_SCENARIOS:
        profile = getattr(InterfererProfile, name)()
        out.append((name, run_ber(dataclasses.replace(spec, interferer=profile))))
    return tuple(out)


CSV_HEADER = (
    "bit_time_ms,probe_interval_ms,n_accessors,threshold,"
    "interferer,trials,total_bits,bit_errors,decode_failures,ber"
)


def report_csv_row(report: BerReport) -> str:
    p = report.params
    cells = (
        p.bit_time_ms,
        p.probe_interval_ms,
        p.n_accessors,
        p.threshold,
        report.interferer_kind,
        report.n_trials,
        report.total_bits,
        report.bit_errors,
        report.decode_failures,
        report.ber,
    )
    return ",".join(str(c) for c in cells)


def reports_to_csv(reports) -> str:
    lines = [CSV_HEADER]
    lines.extend(report_csv_row(r) for r in reports)
    return "\n".join(lines) + "\n"


def scenarios_to_csv(scenarios) -> str:
    lines = ["scenario," + CSV_HEADER]
    lines.extend(f"{name},{report_csv_row(r)}" for name, r in scenarios)
    return "\n".join(lines) + "\n"


def summary_table(reports) -> str:
    """Fixed-width text table, one row per report."""
    header = (
        f"{'bit_ms':>7} {'probe_ms':>8} {'accessors':>9} "
        f"{'threshold':>9} {'interferer':>10} {'ber':>10} {'failures':>8}"
    )
    lines = [header]
    for r in reports:
        p = r.params
        lines.append(
            f"{p.bit_time_ms:>7} {p.probe_interval_ms:>8} {p.n_accessors:>9} "
            f"{p.threshold:>9} {r.interferer_kind:>10} {r.ber:>10.4f} "
            f"{r.decode_failures:>8}"
        )
    return "\n".join(lines)
