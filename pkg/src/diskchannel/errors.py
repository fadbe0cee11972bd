"""Exception types raised across the package.

Everything derives from DiskChannelError so callers can catch the whole
family at once. The receiver pipeline additionally wraps phase failures
in DecodeError so a caller can tell which decoding phase gave up.
"""

from __future__ import annotations


class DiskChannelError(Exception):
    """Base class for every error this package raises on purpose."""


class MalformedStuffing(DiskChannelError):
    """Input to the destuffer violates the run-length guarantee of the stuffer."""


class NoStartMarker(DiskChannelError):
    """No frame start marker was found where one is required."""


class NoEndMarker(DiskChannelError):
    """The end-of-frame marker never appears after the start marker."""


class LeadingZero(DiskChannelError):
    """A message to be timing-encoded does not begin with an access bit."""


class DegenerateInterval(DiskChannelError):
    """An access interval collapses to zero or negative length after the kill lead."""


class WindowMismatch(DiskChannelError):
    """Sampling windows do not tile the run duration evenly."""


class AmbiguousPhase(DiskChannelError):
    """Bit-start detection found no offset with a usable variance contrast."""


class ConstantSignal(DiskChannelError):
    """All per-bit averages are identical, so no threshold can separate them."""


class AllOneClass(DiskChannelError):
    """Threshold iteration put every bit into a single class."""


class SyncNotFound(DiskChannelError):
    """No alternating bit run long enough to qualify as a preamble."""


class DecodeError(DiskChannelError):
    """A receiver phase failed; carries the phase name and the original error."""

    def __init__(self, phase: str, cause: Exception):
        super().__init__(f"{phase}: {cause}")
        self.phase = phase
        self.cause = cause
