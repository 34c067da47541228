"""Raw trace dump: a small little-endian binary container.

Layout (version 1)::

    offset  size  field
    0       4     magic b"KLJN"
    4       4     version, u32
    8       8     sample_rate, f64
    16      8     count (samples per channel), u64
    24      ...   channels, each ``count`` f64 samples, concatenated in the
                  order u_alice_end, u_bob_end, loop_current
"""

from __future__ import annotations

import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .transient import Traces

MAGIC = b"KLJN"
VERSION = 1
CHANNELS = ("u_alice_end", "u_bob_end", "loop_current")
_HEADER = struct.Struct("<4sIdQ")


def write_traces(path: str | Path, traces: Traces) -> None:
    count = len(traces.u_alice_end)
    body = np.concatenate([np.asarray(getattr(traces, ch), dtype="<f8") for ch in CHANNELS])
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(_HEADER.pack(MAGIC, VERSION, float(traces.sample_rate), count))
            fh.write(body.tobytes())
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def read_traces(path: str | Path) -> tuple[float, dict[str, np.ndarray]]:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ValidationError(f"{path}: truncated header")
    magic, version, sample_rate, count = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValidationError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise ValidationError(f"{path}: unsupported version {version}")
    expected = _HEADER.size + 8 * count * len(CHANNELS)
    if len(data) != expected:
        raise ValidationError(f"{path}: expected {expected} bytes, found {len(data)}")
    body = np.frombuffer(data, dtype="<f8", offset=_HEADER.size)
    return sample_rate, {ch: body[i * count:(i + 1) * count].copy() for i, ch in enumerate(CHANNELS)}
