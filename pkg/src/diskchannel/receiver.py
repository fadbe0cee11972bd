"""Four-phase blind decoder for contention traces.

Phase 1 finds where bits start: the trace is cut into disjoint windows of
samples_per_bit samples, every same-length subsequence starting inside a
window is scored by variance, and the modal argmin offset across windows
wins (a correctly aligned window sits inside one bit and is nearly flat).
Phase 2 averages each bit period and classifies against a global average
threshold that is iteratively re-centred between the two class means.
Phase 3 locates the alternating preamble, phase 4 checks the start marker
and finds the end marker. Destuffing the span in between yields the
payload.

decode_message prepends a small onset detector that trims leading idle
before phase 1, so the receiver may start probing well before the sender
wakes up.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .bits import Bits, as_bits
from .channel import ContentionTrace
from .errors import (
    AllOneClass,
    AmbiguousPhase,
    ConstantSignal,
    DecodeError,
    DiskChannelError,
    NoEndMarker,
    NoStartMarker,
    SyncNotFound,
)
from .framing import END_MARKER, START_MARKER, destuff_bits, find_pattern

# Minimum length of an alternating run accepted as (the tail of) a preamble.
MIN_SYNC_RUN = 8


@dataclass(frozen=True)
class DecoderConfig:
    """Receiver-side knobs.

    samples_per_bit = bit_time_ms / probe_interval_ms must be an integer.
    The designed operating range is >= 2 samples per bit; a value of 1 is
    accepted so that degenerate probing (window as long as a bit) can be
    driven on purpose, but phase 1 has no variance contrast there and will
    raise AmbiguousPhase.
    """

    bit_time_ms: int
    probe_interval_ms: int
    variance_epsilon: float = 1e-9
    max_gab_iterations: int = 16

    def __post_init__(self) -> None:
        if self.bit_time_ms < 1 or self.probe_interval_ms < 1:
            raise ValueError("bit_time_ms and probe_interval_ms must be >= 1")
        if self.bit_time_ms % self.probe_interval_ms != 0:
            raise ValueError(
                f"bit_time_ms {self.bit_time_ms} is not a multiple of "
                f"probe_interval_ms {self.probe_interval_ms}"
            )
        if self.variance_epsilon < 0:
            raise ValueError("variance_epsilon must be non-negative")
        if self.max_gab_iterations < 1:
            raise ValueError("max_gab_iterations must be >= 1")

    @property
    def samples_per_bit(self) -> int:
        return self.bit_time_ms // self.probe_interval_ms


@dataclass(frozen=True)
class BitEstimates:
    """Phase 2 output: averages, decisions and the final threshold."""

    offset_samples: int
    per_bit_avg: tuple[float, ...]
    decoded: Bits
    gab_final: float
    gab_history: tuple[float, ...] = ()


@dataclass
class DecodeDiagnostics:
    """Per-phase artifacts collected by decode_message_with_diagnostics."""

    onset_window: int = 0
    offset_samples: int = 0
    per_bit_avg: tuple[float, ...] = ()
    decoded_bits: Bits = ()
    gab_history: tuple[float, ...] = ()
    sync_end: int | None = None
    payload_span: tuple[int, int] | None = None


def _sample_values(trace: "ContentionTrace | Sequence[float]") -> np.ndarray:
    if isinstance(trace, ContentionTrace):
        return trace.values()
    return np.asarray(trace, dtype=np.float64)


def detect_bit_start(
    trace: "ContentionTrace | Sequence[float]", config: DecoderConfig
) -> int:
    """Modal minimum-variance offset of bit boundaries, in samples.

    Ties inside a window go to the smaller offset, as does a tie between
    offsets in the final vote.

    Raises:
        AmbiguousPhase: every window shows a variance spread below
            variance_epsilon, so no offset is better than any other.
        ValueError: trace shorter than three bit times.
    """
    values = _sample_values(trace)
    spb = config.samples_per_bit
    if values.size < 3 * spb:
        raise ValueError(
            f"need at least {3 * spb} samples for phase detection, "
            f"got {values.size}"
        )
    variances = sliding_window_view(values, spb).var(axis=1)
    n_windows = values.size // spb
    votes = np.empty(n_windows, dtype=np.int64)
    spreads = np.empty(n_windows, dtype=np.float64)
    for j in range(n_windows):
        base = j * spb
        candidates = variances[base : min(base + spb, variances.size)]
        votes[j] = int(np.argmin(candidates))
        spreads[j] = float(candidates.max() - candidates.min())
    if float(spreads.max()) < config.variance_epsilon:
        raise AmbiguousPhase(
            "no sampling offset shows a variance contrast above "
            f"{config.variance_epsilon}"
        )
    counts = np.bincount(votes, minlength=spb)
    return int(np.argmax(counts))


def per_bit_averages(
    trace: "ContentionTrace | Sequence[float]", offset: int, config: DecoderConfig
) -> tuple[float, ...]:
    """Mean of each consecutive bit-period group starting at offset.

    A trailing partial group is discarded.
    """
    spb = config.samples_per_bit
    if not 0 <= offset < spb:
        raise ValueError(f"offset must be in [0, {spb}), got {offset}")
    values = _sample_values(trace)[offset:]
    n_bits = values.size // spb
    if n_bits == 0:
        return ()
    means = values[: n_bits * spb].reshape(n_bits, spb).mean(axis=1)
    return tuple(float(m) for m in means)


def decode_with_gab(
    per_bit_avg: Sequence[float], config: DecoderConfig, offset_samples: int = 0
) -> BitEstimates:
    """Classify per-bit averages against an iteratively corrected threshold.

    The initial threshold is the global average. Each round computes the
    class means V1/V0 and counts N1/N0 and moves the threshold by
    -(N1 - N0) * (V1 - V0) / (2 * (N1 + N0)), which re-centres it at the
    class midpoint and cancels the bias a skewed 1/0 mix puts on the
    global average. Iteration stops when the classification stabilises,
    when both classes are equally large, or after max_gab_iterations.

    Raises:
        ConstantSignal: every average is identical.
        AllOneClass: iteration degenerated into a single class.
        ValueError: fewer than two averages.
    """
    averages = np.asarray(per_bit_avg, dtype=np.float64)
    if averages.size < 2:
        raise ValueError("need at least two per-bit averages")
    if np.all(averages == averages[0]):
        raise ConstantSignal("per-bit averages are constant")
    gab = float(averages.mean())
    history = [gab]
    decoded = averages > gab
    for _ in range(config.max_gab_iterations):
        n1 = int(decoded.sum())
        n0 = decoded.size - n1
        if n1 == 0 or n0 == 0:
            raise AllOneClass("threshold iteration left a single class")
        if n1 == n0:
            break
        v1 = float(averages[decoded].mean())
        v0 = float(averages[~decoded].mean())
        gab = gab - (n1 - n0) * (v1 - v0) / (2.0 * (n1 + n0))
        history.append(gab)
        next_decoded = averages > gab
        if np.array_equal(next_decoded, decoded):
            break
        decoded = next_decoded
    return BitEstimates(
        offset_samples=offset_samples,
        per_bit_avg=tuple(float(a) for a in averages),
        decoded=tuple(int(b) for b in decoded),
        gab_final=gab,
        gab_history=tuple(history),
    )


def symbol_sync(decoded_bits: Sequence[int]) -> int:
    """Index one past the preamble, found via its alternating signature.

    Scans for the first maximal alternating run of at least MIN_SYNC_RUN
    bits whose end leaves room for a start marker. Because the start
    marker begins with 1 and the preamble ends with 0, the run's last
    element is normally the first marker bit, so the returned index is
    exactly where the marker check must happen.

    Raises:
        SyncNotFound: no such run exists.
    """
    bits = as_bits(decoded_bits)
    n = len(bits)
    i = 0
    while i < n:
        j = i
        while j + 1 < n and bits[j + 1] != bits[j]:
            j += 1
        run_length = j - i + 1
        if run_length >= MIN_SYNC_RUN and j + len(START_MARKER) <= n:
            return j
        i = j + 1
    raise SyncNotFound("no alternating run long enough to be a preamble")


def frame_sync(decoded_bits: Sequence[int], sync_end: int) -> tuple[int, int]:
    """Payload span (start, end) between the verified markers.

    Raises:
        NoStartMarker: bits at sync_end are not the start marker.
        NoEndMarker: no end marker after the payload.
    """
    bits = as_bits(decoded_bits)
    marker_len = len(START_MARKER)
    if bits[sync_end : sync_end + marker_len] != START_MARKER:
        raise NoStartMarker(f"start marker not present at index {sync_end}")
    payload_from = sync_end + marker_len
    end_at = find_pattern(bits, END_MARKER, payload_from)
    if end_at < 0:
        raise NoEndMarker("no end marker after the start marker")
    return payload_from, end_at


def find_transmission_onset(
    values: "ContentionTrace | Sequence[float]", min_baseline: int = 4
) -> int:
    """First window that jumps above the trailing mean + 3 sigma, else 0.

    Returning 0 when nothing triggers keeps short or already-hot traces
    usable; phase 1's modal vote absorbs a bit of leading idle anyway.
    """
    v = _sample_values(values)
    if v.size <= min_baseline:
        return 0
    counts = np.arange(1, v.size + 1, dtype=np.float64)
    means = np.cumsum(v) / counts
    mean_sq = np.cumsum(v * v) / counts
    stds = np.sqrt(np.maximum(mean_sq - means**2, 0.0))
    thresholds = means[min_baseline - 1 : -1] + 3.0 * stds[min_baseline - 1 : -1]
    hits = np.nonzero(v[min_baseline:] > thresholds + 1e-9)[0]
    if hits.size == 0:
        return 0
    return int(hits[0]) + min_baseline


_PHASE_ONSET = "onset detection"
_PHASE_BIT_START = "bit-start detection"
_PHASE_AVERAGING = "per-bit averaging"
_PHASE_THRESHOLD = "threshold decoding"
_PHASE_SYMBOL_SYNC = "symbol sync"
_PHASE_FRAME_SYNC = "frame sync"
_PHASE_DESTUFF = "destuffing"


def decode_message(trace: ContentionTrace, config: DecoderConfig) -> Bits:
    """Run the full pipeline and return the recovered payload bits.

    Raises:
        DecodeError: any phase failed; .phase names the culprit and
            .cause carries the underlying error.
    """
    payload, _ = _decode_pipeline(trace, config)
    return payload


def decode_message_with_diagnostics(
    trace: ContentionTrace, config: DecoderConfig
) -> tuple[Bits, DecodeDiagnostics]:
    return _decode_pipeline(trace, config)


def _decode_pipeline(
    trace: ContentionTrace, config: DecoderConfig
) -> tuple[Bits, DecodeDiagnostics]:
    diag = DecodeDiagnostics()
    values = _sample_values(trace)

    onset = _run_phase(_PHASE_ONSET, find_transmission_onset, values)
    diag.onset_window = onset
    active = values[onset:]

    offset = _run_phase(_PHASE_BIT_START, detect_bit_start, active, config)
    diag.offset_samples = offset

    averages = _run_phase(_PHASE_AVERAGING, per_bit_averages, active, offset, config)
    diag.per_bit_avg = averages

    estimates = _run_phase(
        _PHASE_THRESHOLD, decode_with_gab, averages, config, offset
    )
    diag.decoded_bits = estimates.decoded
    diag.gab_history = estimates.gab_history

    sync_end = _run_phase(_PHASE_SYMBOL_SYNC, symbol_sync, estimates.decoded)
    diag.sync_end = sync_end

    span = _run_phase(_PHASE_FRAME_SYNC, frame_sync, estimates.decoded, sync_end)
    diag.payload_span = span

    payload = _run_phase(
        _PHASE_DESTUFF, destuff_bits, estimates.decoded[span[0] : span[1]]
    )
    return payload, diag


def _run_phase(phase: str, fn, *args):
    try:
        return fn(*args)
    except (DiskChannelError, ValueError) as exc:
        raise DecodeError(phase, exc) from exc
