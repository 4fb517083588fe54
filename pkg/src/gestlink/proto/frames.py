"""Binary frame packets streamed drone -> edge in place of a video feed.

Layout (all little-endian):

    magic       4 bytes  ASCII "GFP1"
    seq         u32      per-sender monotonic sequence number
    ts_ms       u64      sender clock, milliseconds
    distance_m  f32      simulated hand-camera distance, meters
    det_conf    f32      detector confidence in [0, 1]
    n_landmarks u8       0 (detection miss) or 21
    landmarks   n x (x, y) f32 pairs, each coordinate in [0, 1]
    raster_len  u32      0 or a perfect square
    raster      raster_len bytes, 8-bit grayscale, row-major

A packet must fit a single datagram (<= 1400 bytes).
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

MAGIC = b"GFP1"
HEADER = struct.Struct("<4sIQffB")
LANDMARK_PAIR = struct.Struct("<ff")
RASTER_LEN = struct.Struct("<I")
N_LANDMARKS = 21
MAX_DATAGRAM_BYTES = 1400


class EncodeError(ValueError):
    """Raised when a FramePacket violates its invariants at encode time."""


class DecodeError(ValueError):
    """Raised when bytes cannot be decoded into a valid FramePacket."""


@dataclass
class FramePacket:
    seq: int
    ts_ms: int
    distance_m: float
    det_conf: float
    landmarks: tuple[tuple[float, float], ...] = ()
    raster: bytes = b""

    @property
    def n_landmarks(self) -> int:
        return len(self.landmarks)


def _check_packet(p: FramePacket) -> None:
    if not 0 <= p.seq <= 0xFFFFFFFF:
        raise EncodeError(f"seq out of u32 range: {p.seq}")
    if not 0 <= p.ts_ms <= 0xFFFFFFFFFFFFFFFF:
        raise EncodeError(f"ts_ms out of u64 range: {p.ts_ms}")
    if p.n_landmarks not in (0, N_LANDMARKS):
        raise EncodeError(f"n_landmarks must be 0 or {N_LANDMARKS}, got {p.n_landmarks}")
    for i, (x, y) in enumerate(p.landmarks):
        if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
            raise EncodeError(f"landmark {i} outside [0,1]: ({x}, {y})")
    if not 0.0 <= p.det_conf <= 1.0:
        raise EncodeError(f"det_conf outside [0,1]: {p.det_conf}")
    if not math.isfinite(p.distance_m):
        raise EncodeError(f"distance_m not finite: {p.distance_m}")
    rl = len(p.raster)
    if rl:
        side = math.isqrt(rl)
        if side * side != rl:
            raise EncodeError(f"raster_len {rl} is not a perfect square")


def encoded_length(n_landmarks: int, raster_len: int) -> int:
    return HEADER.size + 8 * n_landmarks + RASTER_LEN.size + raster_len


def encode_frame_packet(p: FramePacket) -> bytes:
    _check_packet(p)
    total = encoded_length(p.n_landmarks, len(p.raster))
    if total > MAX_DATAGRAM_BYTES:
        raise EncodeError(f"packet of {total} bytes exceeds single-datagram limit {MAX_DATAGRAM_BYTES}")
    out = bytearray(
        HEADER.pack(MAGIC, p.seq, p.ts_ms, p.distance_m, p.det_conf, p.n_landmarks)
    )
    for x, y in p.landmarks:
        out += LANDMARK_PAIR.pack(x, y)
    out += RASTER_LEN.pack(len(p.raster))
    out += p.raster
    return bytes(out)


def decode_frame_packet(b: bytes) -> FramePacket:
    if len(b) < HEADER.size:
        raise DecodeError(f"truncated header: {len(b)} < {HEADER.size} bytes")
    magic, seq, ts_ms, distance_m, det_conf, n_lm = HEADER.unpack_from(b, 0)
    if magic != MAGIC:
        raise DecodeError(f"bad magic {magic!r}")
    if n_lm not in (0, N_LANDMARKS):
        raise DecodeError(f"n_landmarks must be 0 or {N_LANDMARKS}, got {n_lm}")
    if not 0.0 <= det_conf <= 1.0:
        raise DecodeError(f"det_conf outside [0,1]: {det_conf}")
    pos = HEADER.size
    need = 8 * n_lm
    if len(b) < pos + need:
        raise DecodeError(f"truncated landmarks: have {len(b) - pos} of {need} bytes")
    landmarks = []
    for i in range(n_lm):
        x, y = LANDMARK_PAIR.unpack_from(b, pos)
        if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
            raise DecodeError(f"landmark {i} outside [0,1]: ({x}, {y})")
        landmarks.append((x, y))
        pos += LANDMARK_PAIR.size
    if len(b) < pos + RASTER_LEN.size:
        raise DecodeError("truncated raster length")
    (raster_len,) = RASTER_LEN.unpack_from(b, pos)
    pos += RASTER_LEN.size
    if raster_len:
        side = math.isqrt(raster_len)
        if side * side != raster_len:
            raise DecodeError(f"raster_len {raster_len} is not a perfect square")
    if len(b) < pos + raster_len:
        raise DecodeError(f"truncated raster: have {len(b) - pos} of {raster_len} bytes")
    if len(b) > pos + raster_len:
        raise DecodeError(f"{len(b) - pos - raster_len} trailing bytes after raster")
    raster = b[pos : pos + raster_len]
    return FramePacket(
        seq=seq,
        ts_ms=ts_ms,
        distance_m=distance_m,
        det_conf=det_conf,
        landmarks=tuple(landmarks),
        raster=raster,
    )
