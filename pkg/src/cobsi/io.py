"""
On-disk formats.

``CBSI`` cube (version 1)::

    b"CBSI" | u8 version=1 | <u32 m | <u32 n | <u32 k | m*n*k <f4 (time fastest)

``CBSM`` checkpoint (version 1)::

    b"CBSM" | u8 version=1 | <u32 D | <u32 width | <u32 hidden_layers
    | for each affine layer: weight (fan_out x fan_in, row-major) then bias, <f8
    | 8 x <f8 normalizer (3 coord mins, 3 coord maxes, amp min, amp max)
    | <u32 M | <u32 N | <u32 K | u8 sampling (0 linear, 1 exponential)
    | 32 bytes SHA-256 geometry fingerprint

Geometry CSV: ``time,<dt>,<m>`` then ``receiver,<meters>`` rows then
``source,<meters>`` rows. Mask file: one 0-based missing shot per line.
"""
from __future__ import annotations

import struct
from pathlib import Path
from typing import Union

import numpy as np

from .encoding import SAMPLINGS, EncodingSpec
from .errors import FormatError
from .neuralnet import MlpParams, MlpSpec, param_count
from .survey import Normalizer, SamplingMask, SeismicCube, SurveyGeometry

PathLike = Union[str, Path]

CUBE_MAGIC = b"CBSI"
MODEL_MAGIC = b"CBSM"
VERSION = 1
_HEADER = struct.Struct("<4sBIII")


def cube_to_bytes(cube: SeismicCube) -> bytes:
    m, n, k = cube.shape
    body = cube.data.astype("<f4").ravel(order="F").tobytes()
    return _HEADER.pack(CUBE_MAGIC, VERSION, m, n, k) + body


def cube_from_bytes(buf: bytes) -> SeismicCube:
    if len(buf) < _HEADER.size:
        raise FormatError("file too short for a CBSI header")
    magic, version, m, n, k = _HEADER.unpack_from(buf)
    if magic != CUBE_MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {CUBE_MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"unsupported CBSI version {version}")
    count = m * n * k
    if len(buf) != _HEADER.size + 4 * count:
        raise FormatError(f"CBSI payload holds {len(buf) - _HEADER.size} bytes, expected {4 * count}")
    data = np.frombuffer(buf, dtype="<f4", count=count, offset=_HEADER.size)
    return SeismicCube(data.astype(np.float64).reshape((m, n, k), order="F"))


def write_cube(path: PathLike, cube: SeismicCube) -> None:
    Path(path).write_bytes(cube_to_bytes(cube))


def read_cube(path: PathLike) -> SeismicCube:
    return cube_from_bytes(Path(path).read_bytes())


def format_geometry(geometry: SurveyGeometry) -> str:
    t = geometry.time_axis
    if t[0] != 0.0:
        raise FormatError("geometry CSV stores time axes starting at 0 only")
    lines = [f"time,{geometry.dt!r},{t.size}"]
    lines += [f"receiver,{float(g)!r}" for g in geometry.receiver_axis]
    lines += [f"source,{float(s)!r}" for s in geometry.source_axis]
    return "\n".join(lines) + "\n"


def parse_geometry(text: str) -> SurveyGeometry:
    dt = m = None
    receivers, sources = [], []
    section = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        tag = parts[0]
        try:
            if tag == "time" and section == 0 and len(parts) == 3:
                dt, m = float(parts[1]), int(parts[2])
                section = 1
            elif tag == "receiver" and section in (1, 2) and len(parts) == 2:
                receivers.append(float(parts[1]))
                section = 2
            elif tag == "source" and section in (2, 3) and len(parts) == 2:
                sources.append(float(parts[1]))
                section = 3
            else:
                raise FormatError(f"line {lineno}: unexpected row {raw!r}")
        except ValueError as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(f"line {lineno}: {exc}") from exc
    if section != 3:
        raise FormatError("geometry file needs time, receiver and source sections in order")
    return SurveyGeometry.regular_time(dt, m, receivers, sources)


def write_geometry(path: PathLike, geometry: SurveyGeometry) -> None:
    Path(path).write_text(format_geometry(geometry))


def read_geometry(path: PathLike) -> SurveyGeometry:
    return parse_geometry(Path(path).read_text())


def write_mask(path: PathLike, mask: SamplingMask) -> None:
    Path(path).write_text("".join(f"{i}\n" for i in mask.missing))


def read_mask(path: PathLike, total_shots: int) -> SamplingMask:
    idx = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            idx.append(int(line))
        except ValueError as exc:
            raise FormatError(f"mask line {lineno}: {raw!r} is not an integer") from exc
    return SamplingMask(total_shots, tuple(idx))


def model_to_bytes(model) -> bytes:
    spec = model.mlp_spec
    out = [struct.pack("<4sBIII", MODEL_MAGIC, VERSION, spec.input_dim, spec.width, spec.hidden_layers)]
    for W, b in zip(model.params.weights, model.params.biases):
        out.append(np.ascontiguousarray(W.T, dtype="<f8").tobytes())
        out.append(np.asarray(b, dtype="<f8").tobytes())
    out.append(model.normalizer.as_array().astype("<f8").tobytes())
    enc = model.encoding
    out.append(struct.pack("<IIIB", enc.M, enc.N, enc.K, SAMPLINGS.index(enc.sampling)))
    out.append(bytes.fromhex(model.geometry_fingerprint))
    return b"".join(out)


def model_from_bytes(buf: bytes):
    from .model import CobsiModel

    head = struct.Struct("<4sBIII")
    if len(buf) < head.size:
        raise FormatError("file too short for a CBSM header")
    magic, version, D, width, hidden = head.unpack_from(buf)
    if magic != MODEL_MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MODEL_MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"unsupported CBSM version {version}")
    spec = MlpSpec(D, width, hidden)
    n_params = param_count(spec)
    tail = struct.calcsize("<IIIB")
    expected = head.size + 8 * n_params + 8 * 8 + tail + 32
    if len(buf) != expected:
        raise FormatError(f"CBSM file has {len(buf)} bytes, expected {expected}")
    pos = head.size
    weights, biases = [], []
    for fan_in, fan_out in spec.layer_shapes:
        W = np.frombuffer(buf, "<f8", fan_in * fan_out, pos).reshape(fan_out, fan_in)
        pos += 8 * fan_in * fan_out
        weights.append(W.T.astype(np.float64))
        biases.append(np.frombuffer(buf, "<f8", fan_out, pos).astype(np.float64))
        pos += 8 * fan_out
    norm = Normalizer.from_array(np.frombuffer(buf, "<f8", 8, pos))
    pos += 64
    M, N, K, samp = struct.unpack_from("<IIIB", buf, pos)
    pos += tail
    if samp >= len(SAMPLINGS):
        raise FormatError(f"unknown sampling code {samp}")
    fingerprint = buf[pos : pos + 32].hex()
    return CobsiModel(
        encoding=EncodingSpec(M, N, K, SAMPLINGS[samp]),
        params=MlpParams(weights, biases),
        normalizer=norm,
        geometry_fingerprint=fingerprint,
    )


def write_model(path: PathLike, model) -> None:
    Path(path).write_bytes(model_to_bytes(model))


def read_model(path: PathLike):
    return model_from_bytes(Path(path).read_bytes())
