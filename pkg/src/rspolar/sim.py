"""Monte Carlo harness, burst experiments and code-spec files.

Every frame draws its message and channel noise from its own generator keyed
by ``(seed, frame index)``, and the stop rule is checked only at fixed chunk
boundaries, so totals do not depend on how many workers ran the chunks.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from statsmodels.stats.proportion import proportion_confint

from . import __version__
from . import channel as ch
from .concat import MODES, ConcatSpec, concat_encode, interleave, joint_decode, split_message
from .gf import FieldSpec
from .polar import PolarCodeSpec, polar_encode, sc_decode
from .rs import rs_encode_batch

SPEC_VERSION = 1
CSV_HEADER = ("point", "frames", "frame_errors", "bler", "ci_low", "ci_high", "seconds")
DECODERS = MODES + ("polar-only",)

CodeSpec = ConcatSpec | PolarCodeSpec


# -- configuration and reports ---------------------------------------------------

@dataclass
class SimConfig:
    spec: CodeSpec
    channel: ch.ChannelModel
    decoder: str = "sc"
    points: tuple = (None,)          # values of the channel's primary parameter
    max_frames: int = 1_000_000
    min_frame_errors: int = 100
    seed: int = 0
    workers: int = 1
    chunk_frames: int = 500
    metric: str | None = None

    def __post_init__(self):
        if self.max_frames < 1:
            raise ValueError("max_frames must be >= 1")
        if not len(self.points):
            raise ValueError("operating-point grid is empty")
        if self.decoder not in DECODERS:
            raise ValueError(f"unknown decoder {self.decoder!r}; expected one of {DECODERS}")
        if self.decoder != "polar-only" and not isinstance(self.spec, ConcatSpec):
            raise ValueError(f"decoder {self.decoder!r} needs a concatenated code spec")
        if self.chunk_frames < 1 or self.workers < 1:
            raise ValueError("chunk_frames and workers must be >= 1")


@dataclass
class PointResult:
    point: float
    frames: int
    frame_errors: int
    bler: float
    ci_low: float
    ci_high: float
    seconds: float
    inner_errors: int = 0        # erroneous inner polar codewords
    inner_codewords: int = 0


@dataclass
class SimReport:
    points: list
    spec_hash: str
    seed: int
    decoder: str
    channel: str
    version: str = __version__
    meta: dict = field(default_factory=dict)


def wilson_interval(errors: int, frames: int, alpha: float = 0.05) -> tuple[float, float]:
    lo, hi = proportion_confint(errors, frames, alpha=alpha, method="wilson")
    # rounding can leave the endpoints a few ulps on the wrong side of the estimate
    p = errors / frames
    return max(0.0, min(float(lo), p)), min(1.0, max(float(hi), p))


# -- frame simulation --------------------------------------------------------------

def message_bits(spec: CodeSpec) -> int:
    return spec.message_bits if isinstance(spec, ConcatSpec) else spec.k


def encode(spec: CodeSpec, messages: np.ndarray) -> np.ndarray:
    """Transmitted bit stream (B, frame length) for a batch of messages."""
    if isinstance(spec, ConcatSpec):
        return concat_encode(spec, messages).reshape(len(messages), spec.N)
    return polar_encode(spec, messages)


def inner_words(spec: ConcatSpec, messages: np.ndarray) -> np.ndarray:
    """Information words (B, m, k) fed to the inner polar encoders."""
    outer = np.stack([rs_encode_batch(o, part)
                      for o, part in zip(spec.outer, split_message(spec, messages))], axis=1)
    return interleave(outer, spec.t)


def draw_frames(spec: CodeSpec, model: ch.ChannelModel, seed: int, start: int, count: int):
    """Messages and channel LLRs for frames ``start .. start+count-1``."""
    k = message_bits(spec)
    msgs, llrs = [], []
    for i in range(start, start + count):
        rng = np.random.default_rng([seed, i])
        msg = rng.integers(0, 2, size=(1, k), dtype=np.uint8)
        msgs.append(msg)
        llrs.append(ch.transmit(model, encode(spec, msg), rng))
    return np.concatenate(msgs), np.concatenate(llrs)


def decode(spec: CodeSpec, llr: np.ndarray, decoder: str, metric: str | None = None):
    """Returns (decoded messages, final inner information words or None)."""
    if decoder == "polar-only":
        if isinstance(spec, ConcatSpec):
            raise ValueError("polar-only decoding needs a polar code spec")
        u, _ = sc_decode(spec, llr)
        return u[:, list(spec.info_set)], None
    res = joint_decode(spec, llr, decoder, metric)
    return res.messages, res.inner_u[..., list(spec.polar.info_set)]


def simulate_chunk(spec: CodeSpec, model: ch.ChannelModel, decoder: str, seed: int,
                   start: int, count: int, metric: str | None = None) -> tuple[int, int, int]:
    """(frame errors, inner codeword errors, inner codewords) for one chunk."""
    msgs, llr = draw_frames(spec, model, seed, start, count)
    decoded, inner = decode(spec, llr, decoder, metric)
    frame_err = int((decoded != msgs).any(axis=1).sum())
    if inner is None:
        return frame_err, frame_err, count
    wrong = (inner != inner_words(spec, msgs)).any(axis=-1)
    return frame_err, int(wrong.sum()), wrong.size


def _chunk_job(args):
    return simulate_chunk(*args)


def run_bler(config: SimConfig, progress=None) -> SimReport:
    """Simulate every operating point until ``min_frame_errors`` frame errors
    or ``max_frames`` frames, checked at chunk boundaries."""
    pool = ProcessPoolExecutor(config.workers) if config.workers > 1 else None
    results = []
    try:
        for point in config.points:
            model = config.channel if point is None else ch.with_point(config.channel, point)
            t0 = time.perf_counter()
            frames = errors = inner_err = inner_tot = 0
            chunk = 0
            done = False
            while not done:
                starts = []
                for c in range(chunk, chunk + config.workers):
                    s = c * config.chunk_frames
                    if s >= config.max_frames:
                        break
                    starts.append((s, min(config.chunk_frames, config.max_frames - s)))
                jobs = [(config.spec, model, config.decoder, config.seed, s, n, config.metric)
                        for s, n in starts]
                outs = pool.map(_chunk_job, jobs) if pool else map(_chunk_job, jobs)
                # reduce in frame order; later chunks past the stop point are discarded
                for (s, n), (fe, ie, it) in zip(starts, outs):
                    frames += n
                    errors += fe
                    inner_err += ie
                    inner_tot += it
                    chunk += 1
                    if errors >= config.min_frame_errors or frames >= config.max_frames:
                        done = True
                        break
                if not starts:
                    done = True
                if progress:
                    progress(point, frames, errors)
            lo, hi = wilson_interval(errors, frames)
            results.append(PointResult(
                ch.primary_parameter(model) if point is None else point,
                frames, errors, errors / frames, lo, hi, time.perf_counter() - t0,
                inner_err, inner_tot))
    finally:
        if pool:
            pool.shutdown(cancel_futures=True)
    return SimReport(results, spec_hash(config.spec), config.seed, config.decoder,
                     ch.format_channel(config.channel))


def write_csv(report: SimReport, dest) -> None:
    """Write one row per operating point to a path or an open text stream."""
    if hasattr(dest, "write"):
        _write_rows(report, dest)
        return
    with open(dest, "w", newline="") as fh:
        _write_rows(report, fh)


def _write_rows(report: SimReport, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for p in report.points:
        # repr gives the shortest decimal that round-trips
        w.writerow([repr(float(p.point)), p.frames, p.frame_errors, repr(float(p.bler)),
                    repr(p.ci_low), repr(p.ci_high), repr(round(p.seconds, 3))])


# -- burst experiments -------------------------------------------------------------

@dataclass
class BurstOutcome:
    length: int
    offset: int
    success: bool
    zero_llr: bool | None     # some information bit decided from an LLR of exactly 0


def run_burst_experiment(spec: CodeSpec, lengths, offsets, base: ch.ChannelModel = ch.NOISELESS,
                         decoder: str | None = None, seed: int = 0,
                         messages: int = 1) -> list[BurstOutcome]:
    """Erase ``[offset, offset + length)`` of the frame on top of ``base``
    and record whether every one of ``messages`` random messages decodes.

    Polar specs also report whether an information bit saw an LLR of 0.
    """
    if decoder is None:
        decoder = "polar-only" if isinstance(spec, PolarCodeSpec) else "sc-gmd-aml"
    frame_len = spec.N if isinstance(spec, ConcatSpec) else spec.n
    k = message_bits(spec)
    out = []
    for length in lengths:
        for offset in offsets:
            if offset < 0 or offset + length > frame_len:
                raise ValueError(f"burst [{offset}, {offset + length}) lies outside the "
                                 f"{frame_len}-bit frame")
            rng = np.random.default_rng([seed, length, offset])
            msg = rng.integers(0, 2, size=(messages, k), dtype=np.uint8)
            llr = ch.transmit(ch.Burst(offset, length, base), encode(spec, msg), rng)
            if isinstance(spec, PolarCodeSpec):
                u, soft = sc_decode(spec, llr)
                ok = bool((u[:, list(spec.info_set)] == msg).all())
                out.append(BurstOutcome(length, offset, ok, bool((soft == 0).any())))
            else:
                dec, _ = decode(spec, llr, decoder)
                out.append(BurstOutcome(length, offset, bool((dec == msg).all()), None))
    return out


# -- code-spec files -----------------------------------------------------------------

class SpecFileError(ValueError):
    pass


@dataclass
class SpecFile:
    spec: CodeSpec
    design: dict = field(default_factory=dict)


def spec_to_dict(spec: CodeSpec, design: dict | None = None) -> dict:
    polar = spec.polar if isinstance(spec, ConcatSpec) else spec
    concat = isinstance(spec, ConcatSpec)
    return {
        "version": SPEC_VERSION,
        "n": polar.n,
        "s": polar.s,
        "bit_reversed": polar.bit_reversed,
        "info_set": list(polar.info_set),
        "t": spec.t if concat else None,
        "field_poly": spec.field.primitive_poly if concat else None,
        "taus": list(spec.taus) if concat else None,
        "design": dict(design or {}),
    }


def _require(doc, key, kind):
    if key not in doc:
        raise SpecFileError(f"{key}: missing field")
    val = doc[key]
    if not isinstance(val, kind) or isinstance(val, bool) and kind is not bool:
        raise SpecFileError(f"{key}: expected {getattr(kind, '__name__', kind)}, "
                            f"got {type(val).__name__}")
    return val


def spec_from_dict(doc: dict) -> SpecFile:
    if not isinstance(doc, dict):
        raise SpecFileError("spec file must hold a JSON object")
    version = _require(doc, "version", int)
    if version != SPEC_VERSION:
        raise SpecFileError(f"version: unsupported value {version}")
    n = _require(doc, "n", int)
    s = _require(doc, "s", int)
    if n != 1 << s:
        raise SpecFileError(f"n: {n} does not equal 2^s with s={s}")
    bit_reversed = _require(doc, "bit_reversed", bool)
    info = _require(doc, "info_set", list)
    for i, v in enumerate(info):
        if not isinstance(v, int) or isinstance(v, bool):
            raise SpecFileError(f"info_set[{i}]: expected int")
        if not 0 <= v < n:
            raise SpecFileError(f"info_set[{i}]: index {v} out of range [0, {n})")
    try:
        polar = PolarCodeSpec(n, tuple(info), bit_reversed)
    except ValueError as exc:
        raise SpecFileError(f"info_set: {exc}") from exc
    design = doc.get("design") or {}
    if not isinstance(design, dict):
        raise SpecFileError("design: expected object")
    if doc.get("t") is None:
        return SpecFile(polar, design)
    t = _require(doc, "t", int)
    poly = _require(doc, "field_poly", int)
    taus = _require(doc, "taus", list)
    try:
        gf = FieldSpec(t, poly)
    except ValueError as exc:
        raise SpecFileError(f"field_poly: {exc}") from exc
    try:
        spec = ConcatSpec(polar, t, tuple(taus), gf)
    except ValueError as exc:
        raise SpecFileError(f"taus: {exc}") from exc
    return SpecFile(spec, design)


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def spec_hash(spec: CodeSpec, design: dict | None = None) -> str:
    return hashlib.sha256(canonical_json(spec_to_dict(spec, design)).encode()).hexdigest()


def save_spec(path, spec: CodeSpec, design: dict | None = None) -> str:
    """Write a code-spec file and return its content hash."""
    doc = spec_to_dict(spec, design)
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    return hashlib.sha256(canonical_json(doc).encode()).hexdigest()


def read_spec_file(path) -> SpecFile:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SpecFileError(f"not valid JSON: {exc}") from exc
    return spec_from_dict(doc)


def load_spec(path) -> CodeSpec:
    return read_spec_file(path).spec
