"""Run-length limited framing for the timing channel.

The wire format is built so that the two frame markers each contain a run
of four identical bits, while the payload between them never does: after
every run of exactly three identical payload bits the stuffer inserts the
complement bit. A marker pattern therefore cannot be faked by payload
data, whatever the user sends.

Frame layout::

    symbol sync (16 bits, alternating 1 0 ...)
    start marker 1 1 1 1 0 0 0 0
    stuffed payload (no run of 4 or more identical bits)
    end marker   0 0 0 0 1 1 1 1
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .bits import Bits, as_bits
from .errors import MalformedStuffing, NoEndMarker, NoStartMarker

# Longest run of identical bits the stuffer lets through unbroken.
RUN_LIMIT = 3

SYMBOL_SYNC: Bits = (1, 0) * 8
START_MARKER: Bits = (1, 1, 1, 1, 0, 0, 0, 0)
END_MARKER: Bits = (0, 0, 0, 0, 1, 1, 1, 1)

# Fixed framing cost: preamble plus both markers.
FRAME_OVERHEAD_BITS = len(SYMBOL_SYNC) + len(START_MARKER) + len(END_MARKER)


def stuff_bits(payload: Iterable[int]) -> Bits:
    """Insert a complement bit after every run of exactly RUN_LIMIT bits.

    The inserted bit itself starts a new run, so the output never contains
    a run longer than RUN_LIMIT. Stuffing an empty payload yields an empty
    result.
    """
    payload = as_bits(payload)
    out: list[int] = []
    run_bit = -1
    run_len = 0
    for bit in payload:
        out.append(bit)
        if bit == run_bit:
            run_len += 1
        else:
            run_bit, run_len = bit, 1
        if run_len == RUN_LIMIT:
            out.append(1 - bit)
            run_bit, run_len = 1 - bit, 1
    return tuple(out)


def destuff_bits(stuffed: Iterable[int]) -> Bits:
    """Invert stuff_bits by dropping the bit after every run of RUN_LIMIT.

    Raises:
        MalformedStuffing: if the input contains a run of RUN_LIMIT + 1
            identical bits, or ends immediately after a full run (a valid
            stuffed stream always carries the complement there).
    """
    stuffed = as_bits(stuffed)
    out: list[int] = []
    run_bit = -1
    run_len = 0
    drop_next = False
    for i, bit in enumerate(stuffed):
        if drop_next:
            if bit == run_bit:
                raise MalformedStuffing(
                    f"run of {RUN_LIMIT + 1} identical bits at index {i}"
                )
            # The dropped complement is still part of the stuffed stream's
            # run structure, so it seeds the run counter.
            run_bit, run_len = bit, 1
            drop_next = False
            continue
        if bit == run_bit:
            run_len += 1
        else:
            run_bit, run_len = bit, 1
        out.append(bit)
        if run_len == RUN_LIMIT:
            drop_next = True
    if drop_next:
        raise MalformedStuffing("stream ends immediately after a full run")
    return tuple(out)


def encapsulate(payload: Iterable[int]) -> Bits:
    """Wrap a payload in symbol sync, start marker, stuffing, end marker."""
    return SYMBOL_SYNC + START_MARKER + stuff_bits(payload) + END_MARKER


def decapsulate(message: Iterable[int]) -> Bits:
    """Extract and destuff the payload from a framed message.

    Leading noise bits ahead of the symbol sync are tolerated. A missing
    preamble surfaces as NoStartMarker since nothing anchors the search.

    Raises:
        NoStartMarker: start marker (or the preamble before it) not found.
        NoEndMarker: no end marker after the start marker.
        MalformedStuffing: payload span violates the stuffing invariant.
    """
    message = as_bits(message)
    sync_at = find_pattern(message, SYMBOL_SYNC)
    if sync_at < 0:
        raise NoStartMarker("symbol sync preamble not found")
    start_at = find_pattern(message, START_MARKER, sync_at + len(SYMBOL_SYNC))
    if start_at < 0:
        raise NoStartMarker("no start marker after symbol sync")
    payload_from = start_at + len(START_MARKER)
    end_at = find_pattern(message, END_MARKER, payload_from)
    if end_at < 0:
        raise NoEndMarker("no end marker after payload")
    return destuff_bits(message[payload_from:end_at])


def find_pattern(haystack: Sequence[int], needle: Sequence[int], start: int = 0) -> int:
    """Index of the first occurrence of needle at or after start, else -1."""
    h = "".join(str(b) for b in haystack)
    n = "".join(str(b) for b in needle)
    return h.find(n, start)
