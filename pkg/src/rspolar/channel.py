"""Channel models producing per-bit log-likelihood ratios.

Sign convention everywhere: a positive LLR favours bit 0.  Perfectly known bits
get +/-inf and erasures get exactly 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np


def _check_prob(name, value):
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be a probability, got {value}")


@dataclass(frozen=True)
class BSC:
    p: float

    def __post_init__(self):
        _check_prob("p", self.p)


@dataclass(frozen=True)
class BEC:
    eps: float

    def __post_init__(self):
        _check_prob("eps", self.eps)


@dataclass(frozen=True)
class AwgnBpsk:
    """BPSK over AWGN at ``ebn0_db``; ``rate`` converts Eb to Es = rate * Eb."""

    ebn0_db: float
    rate: float = 1.0

    def __post_init__(self):
        if not 0 < self.rate <= 1:
            raise ValueError(f"code rate must be in (0, 1], got {self.rate}")

    @property
    def sigma2(self) -> float:
        """Noise variance N0/2 with unit symbol energy."""
        esn0 = self.rate * 10 ** (self.ebn0_db / 10)
        return 1.0 / (2.0 * esn0)


@dataclass(frozen=True)
class GilbertElliot:
    """Two-state Markov channel; ``P``/``Q`` are the stay-good / stay-bad
    probabilities, the bad state erases everything."""

    P: float
    Q: float
    good: "ChannelModel"

    def __post_init__(self):
        _check_prob("P", self.P)
        _check_prob("Q", self.Q)
        if not isinstance(self.good, (BSC, BEC)):
            raise ValueError("good state must be a BSC or BEC")


@dataclass(frozen=True)
class Burst:
    """``base`` channel with bits ``[start, start + length)`` of each frame erased."""

    start: int
    length: int
    base: "ChannelModel"

    def __post_init__(self):
        if self.start < 0 or self.length < 0:
            raise ValueError("burst start and length must be non-negative")


ChannelModel = Union[BSC, BEC, AwgnBpsk, GilbertElliot, Burst]

NOISELESS = BSC(0.0)


def stationary_distribution(P: float, Q: float) -> tuple[float, float]:
    """(pi_good, pi_bad) of the Gilbert-Elliot chain."""
    if P == 1.0 and Q == 1.0:
        raise ValueError("chain with P = Q = 1 has no unique stationary distribution")
    pi_good = (1.0 - Q) / ((1.0 - P) + (1.0 - Q))
    return pi_good, 1.0 - pi_good


def _signed_inf(bits):
    return np.where(bits, -np.inf, np.inf)


def ge_states(model: GilbertElliot, shape: tuple, rng: np.random.Generator) -> np.ndarray:
    """Boolean bad-state indicator, one independent chain per row of ``shape``.

    Each chain starts from the stationary distribution.
    """
    *rows, length = shape
    nrows = int(np.prod(rows)) if rows else 1
    bad = np.zeros((nrows, length), dtype=bool)
    pi_bad = stationary_distribution(model.P, model.Q)[1]
    for r in range(nrows):
        state_bad = rng.random() < pi_bad
        pos = 0
        while pos < length:
            stay = model.Q if state_bad else model.P
            run = length - pos if stay == 1.0 else int(rng.geometric(1.0 - stay))
            if state_bad:
                bad[r, pos:pos + run] = True
            pos += run
            state_bad = not state_bad
    return bad.reshape(shape)


def transmit(model: ChannelModel, bits: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Send ``bits`` (any shape, last axis is time) and return their LLRs."""
    bits = np.asarray(bits).astype(bool)
    if isinstance(model, BSC):
        flips = rng.random(bits.shape) < model.p
        rx = bits ^ flips
        if model.p == 0.0:
            return _signed_inf(rx)
        if model.p == 1.0:
            return -_signed_inf(rx)
        mag = math.log((1.0 - model.p) / model.p)
        return np.where(rx, -mag, mag)
    if isinstance(model, BEC):
        erased = rng.random(bits.shape) < model.eps
        return np.where(erased, 0.0, _signed_inf(bits))
    if isinstance(model, AwgnBpsk):
        sigma2 = model.sigma2
        y = np.where(bits, -1.0, 1.0) + rng.standard_normal(bits.shape) * math.sqrt(sigma2)
        return 2.0 * y / sigma2
    if isinstance(model, GilbertElliot):
        llr = transmit(model.good, bits, rng)
        bad = ge_states(model, bits.shape, rng)
        llr[bad] = 0.0
        return llr
    if isinstance(model, Burst):
        llr = np.array(transmit(model.base, bits, rng), dtype=float)
        if model.start + model.length > bits.shape[-1]:
            raise ValueError("burst extends past the end of the frame")
        llr[..., model.start:model.start + model.length] = 0.0
        return llr
    raise TypeError(f"unsupported channel model {model!r}")


def with_point(model: ChannelModel, value: float) -> ChannelModel:
    """Replace the primary parameter of ``model`` (Eb/N0, p or eps)."""
    if isinstance(model, AwgnBpsk):
        return AwgnBpsk(value, model.rate)
    if isinstance(model, BSC):
        return BSC(value)
    if isinstance(model, BEC):
        return BEC(value)
    raise ValueError(f"{type(model).__name__} has no sweepable parameter")


def primary_parameter(model: ChannelModel) -> float:
    if isinstance(model, AwgnBpsk):
        return model.ebn0_db
    if isinstance(model, BSC):
        return model.p
    if isinstance(model, BEC):
        return model.eps
    return 0.0


def _split_top(text: str) -> list[str]:
    """Split on commas that are not inside a nested ``good=``/``base=`` value."""
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    return parts


def parse_channel(text: str, rate: float = 1.0) -> ChannelModel:
    """Parse descriptors such as ``awgn:2.0``, ``bec:0.1``, ``bsc:0.01``,
    ``noiseless``, ``ge:P=0.9999,Q=0.99,good=bec:0.1`` and
    ``burst:start=0,len=1537,base=noiseless``.

    Nested descriptors containing commas may be wrapped in parentheses.
    ``rate`` is the code rate applied to AWGN descriptors that omit one
    (``awgn:2.0:0.5`` sets it explicitly).
    """
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1]
    kind, _, arg = text.partition(":")
    kind = kind.lower()
    try:
        if kind == "noiseless":
            return NOISELESS
        if kind == "bsc":
            return BSC(float(arg))
        if kind == "bec":
            return BEC(float(arg))
        if kind == "awgn":
            ebn0, _, r = arg.partition(":")
            return AwgnBpsk(float(ebn0), float(r) if r else rate)
        if kind in ("ge", "burst"):
            fields = {}
            parts = _split_top(arg)
            # everything after good=/base= belongs to the nested descriptor
            for i, part in enumerate(parts):
                key, _, value = part.partition("=")
                key = key.strip()
                if key in ("good", "base"):
                    fields[key] = ",".join([value] + parts[i + 1:])
                    break
                fields[key] = value
            if kind == "ge":
                return GilbertElliot(float(fields["P"]), float(fields["Q"]),
                                     parse_channel(fields["good"], rate))
            base = parse_channel(fields.get("base", "noiseless"), rate)
            return Burst(int(fields["start"]), int(fields["len"]), base)
    except (KeyError, ValueError) as exc:
        raise ValueError(f"cannot parse channel {text!r}: {exc}") from exc
    raise ValueError(f"unknown channel kind {kind!r} in {text!r}")


def format_channel(model: ChannelModel) -> str:
    if isinstance(model, BSC):
        return "noiseless" if model.p == 0.0 else f"bsc:{model.p!r}"
    if isinstance(model, BEC):
        return f"bec:{model.eps!r}"
    if isinstance(model, AwgnBpsk):
        return f"awgn:{model.ebn0_db!r}:{model.rate!r}"
    if isinstance(model, GilbertElliot):
        return f"ge:P={model.P!r},Q={model.Q!r},good={format_channel(model.good)}"
    if isinstance(model, Burst):
        return f"burst:start={model.start},len={model.length},base={format_channel(model.base)}"
    raise TypeError(f"unsupported channel model {model!r}")
