"""Bit sequence helpers: validation, string and text codecs, random payloads."""

from __future__ import annotations

import random
from typing import Iterable

Bits = tuple[int, ...]


def as_bits(values: Iterable[int]) -> Bits:
    """Normalise an iterable into a tuple of ints, rejecting anything but 0/1."""
    out = tuple(int(v) for v in values)
    for v in out:
        if v not in (0, 1):
            raise ValueError(f"bit values must be 0 or 1, got {v!r}")
    return out


def bits_from_string(text: str) -> Bits:
    """Parse a string of '0'/'1' characters. Whitespace is ignored."""
    cleaned = "".join(text.split())
    if not all(c in "01" for c in cleaned):
        raise ValueError(f"bit string may only contain 0 and 1: {text!r}")
    return tuple(int(c) for c in cleaned)


def bits_to_string(bits: Iterable[int]) -> str:
    return "".join(str(b) for b in as_bits(bits))


def bits_from_bytes(data: bytes) -> Bits:
    """Expand bytes into bits, most significant bit of each byte first."""
    out: list[int] = []
    for byte in data:
        for shift in range(7, -1, -1):
            out.append((byte >> shift) & 1)
    return tuple(out)


def bits_to_bytes(bits: Iterable[int]) -> bytes:
    bit_tuple = as_bits(bits)
    if len(bit_tuple) % 8 != 0:
        raise ValueError(f"bit count {len(bit_tuple)} is not a multiple of 8")
    out = bytearray()
    for i in range(0, len(bit_tuple), 8):
        byte = 0
        for b in bit_tuple[i : i + 8]:
            byte = (byte << 1) | b
        out.append(byte)
    return bytes(out)


def bits_from_text(text: str) -> Bits:
    """UTF-8 encode text and expand it into bits, MSB first."""
    return bits_from_bytes(text.encode("utf-8"))


def bits_to_text(bits: Iterable[int]) -> str:
    return bits_to_bytes(bits).decode("utf-8")


def random_bits(length: int, seed: int) -> Bits:
    """A reproducible random payload of the given length."""
    if length < 0:
        raise ValueError("length must be non-negative")
    rng = random.Random(seed)
    return tuple(rng.randrange(2) for _ in range(length))
