"""Interleaved Reed-Solomon / polar concatenation.

``r = k / t`` outer RS codes of length ``m = 2^t - 1`` feed ``m`` inner polar
codewords: symbol ``j`` of RS codeword ``i`` is the ``i``-th group of ``t``
information bits of polar codeword ``j``.  Symbols map to bits little-endian
(bit ``b`` of the integer value is the group's ``b``-th information bit).
Polar codewords are transmitted one after another, ``j = 0 .. m-1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gf import FieldSpec
from .polar import (BitChannelQuality, PolarCodeSpec, SCState, polar_encode,
                    select_info_set)
from .rs import (RSCodeSpec, RSDecodeError, SoftSymbolWord, bm_decode, gmd_decode,
                 pick_candidate, rs_encode_batch, syndromes_batch)

MODES = ("sc", "sc-gmd", "sc-gmd-aml", "sc-gmd-ml")


class InfeasibleDesignError(ValueError):
    pass


@dataclass(frozen=True)
class ConcatSpec:
    polar: PolarCodeSpec
    t: int
    taus: tuple
    field: FieldSpec | None = None

    def __post_init__(self):
        if self.field is None:
            object.__setattr__(self, "field", FieldSpec(self.t))
        if self.field.t != self.t:
            raise ValueError("field size does not match t")
        if self.polar.k % self.t:
            raise ValueError(f"t={self.t} does not divide k={self.polar.k}")
        taus = tuple(int(x) for x in self.taus)
        if len(taus) != self.r:
            raise ValueError(f"need {self.r} outer radii, got {len(taus)}")
        object.__setattr__(self, "taus", taus)
        # validates every radius
        object.__setattr__(self, "_outer", tuple(RSCodeSpec(self.field, tau) for tau in taus))

    @property
    def r(self) -> int:
        return self.polar.k // self.t

    @property
    def m(self) -> int:
        return self.field.group_order

    @property
    def n(self) -> int:
        return self.polar.n

    @property
    def N(self) -> int:
        return self.polar.n * self.m

    @property
    def outer(self) -> tuple:
        return self._outer

    @property
    def kappas(self) -> tuple:
        return tuple(o.dim for o in self._outer)

    @property
    def message_bits(self) -> int:
        return sum(self.kappas) * self.t

    @property
    def rate(self) -> float:
        return self.message_bits / self.N


# -- bit/symbol plumbing -------------------------------------------------------

def bits_to_symbols(bits: np.ndarray, t: int) -> np.ndarray:
    """(..., L*t) bits -> (..., L) symbols, little-endian within each symbol."""
    bits = np.asarray(bits, dtype=np.int64)
    shaped = bits.reshape(bits.shape[:-1] + (-1, t))
    return (shaped << np.arange(t)).sum(axis=-1)


def symbols_to_bits(symbols: np.ndarray, t: int) -> np.ndarray:
    symbols = np.asarray(symbols, dtype=np.int64)
    bits = (symbols[..., None] >> np.arange(t)) & 1
    return bits.reshape(symbols.shape[:-1] + (-1,)).astype(np.uint8)


def interleave(codewords: np.ndarray, t: int) -> np.ndarray:
    """Outer codewords (B, r, m) -> polar information words (B, m, k)."""
    return symbols_to_bits(np.swapaxes(codewords, 1, 2), t)


def deinterleave(info_words: np.ndarray, t: int) -> np.ndarray:
    """Inverse of :func:`interleave`."""
    return np.swapaxes(bits_to_symbols(info_words, t), 1, 2)


def split_message(spec: ConcatSpec, message: np.ndarray) -> list[np.ndarray]:
    """(B, message_bits) -> per outer code (B, kappa_i) symbol arrays."""
    syms = bits_to_symbols(message, spec.t)
    bounds = np.cumsum((0,) + spec.kappas)
    return [syms[:, a:b] for a, b in zip(bounds[:-1], bounds[1:])]


def concat_encode(spec: ConcatSpec, message: np.ndarray) -> np.ndarray:
    """Encode ``message`` bits into ``m`` polar codewords.

    Accepts ``(message_bits,)`` or ``(B, message_bits)``; returns ``(m, n)``
    or ``(B, m, n)`` transmitted bits.
    """
    message = np.asarray(message, dtype=np.uint8)
    single = message.ndim == 1
    message = np.atleast_2d(message)
    if message.shape[1] != spec.message_bits:
        raise ValueError(f"message has {message.shape[1]} bits, expected {spec.message_bits}")
    outer = np.stack([rs_encode_batch(o, part)
                      for o, part in zip(spec.outer, split_message(spec, message))], axis=1)
    x = polar_encode(spec.polar, interleave(outer, spec.t))
    return x[0] if single else x


# -- design ----------------------------------------------------------------------

def symbol_error_profile(bit_errors, t: int) -> np.ndarray:
    """Per-group symbol error probabilities ``1 - prod(1 - P_j)`` over each
    group of ``t`` consecutive information-bit error probabilities."""
    p = np.asarray(bit_errors, dtype=float)
    if len(p) % t:
        raise ValueError("number of bit probabilities must be a multiple of t")
    if np.any((p < 0) | (p > 1)):
        raise ValueError("bit error probabilities must lie in [0, 1]")
    return 1.0 - np.prod(1.0 - p.reshape(-1, t), axis=1)


def profile_for(quality: BitChannelQuality, info_set, t: int) -> np.ndarray:
    return symbol_error_profile(quality.error_probabilities()[list(info_set)], t)


def _tail_term(m: int, tau: int, q: float) -> float:
    return math.comb(m, tau + 1) * q ** (tau + 1)


def rate_adaptive_design(profile, m: int, t: int, k: int, target_fep: float,
                         allow_zero: bool = False) -> tuple[int, ...]:
    """Smallest radius per group with ``C(m, tau+1) Q^(tau+1) < t E / k``.

    Radii start at 1 unless ``allow_zero``.  Raises
    :class:`InfeasibleDesignError` if a group needs more than ``(m-1)/2``.
    """
    if not 0.0 < target_fep < 1.0:
        raise ValueError("target frame error probability must lie in (0, 1)")
    threshold = t * target_fep / k
    taus = []
    top = (m - 1) // 2
    for i, q in enumerate(np.asarray(profile, dtype=float)):
        tau = 0 if allow_zero else 1
        while tau <= top and not _tail_term(m, tau, q) < threshold:
            tau += 1
        if tau > top:
            raise InfeasibleDesignError(f"group {i} (Q={q:.3g}) needs tau > {top}")
        taus.append(tau)
    return tuple(taus)


def predicted_fep(taus, profile, m: int) -> float:
    """Union bound over outer codes: sum of ``C(m, tau+1) Q^(tau+1)``."""
    return float(sum(_tail_term(m, tau, q) for tau, q in zip(taus, profile)))


def design_rate(taus, m: int, t: int, n: int) -> float:
    return sum(m - 2 * tau for tau in taus) * t / (n * m)


@dataclass
class DesignResult:
    spec: ConcatSpec
    target_fep: float
    predicted_fep: float
    rate: float
    candidates: list = field(default_factory=list)   # (k, rate, predicted fep) per feasible k


def design_for_k(quality: BitChannelQuality, k: int, t: int, rate: float,
                 field_spec: FieldSpec | None = None, bit_reversed: bool = True,
                 rel_tol: float = 0.005, allow_zero: bool = False,
                 iters: int = 200) -> DesignResult | None:
    """Bisect the per-frame target ``E`` (log scale) until the total rate is
    within ``rel_tol`` of ``rate``; ``None`` if no ``E`` lands in the window."""
    gf = field_spec or FieldSpec(t)
    n = quality.n
    m = gf.group_order
    info = select_info_set(quality, k)
    profile = profile_for(quality, info, t)

    def attempt(log_e):
        try:
            taus = rate_adaptive_design(profile, m, t, k, 10.0 ** log_e, allow_zero)
        except InfeasibleDesignError:
            return None, -1.0
        return taus, design_rate(taus, m, t, n)

    lo, hi = -300.0, math.log10(0.999999)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        taus, got = attempt(mid)
        if taus is not None and abs(got - rate) <= rel_tol * rate:
            spec = ConcatSpec(PolarCodeSpec(n, info, bit_reversed), t, taus, gf)
            return DesignResult(spec, 10.0 ** mid, predicted_fep(taus, profile, m), got)
        # larger E means smaller radii and a higher rate
        if got < rate:
            lo = mid
        else:
            hi = mid
    return None


def rate_targeted_design(quality: BitChannelQuality, t: int, rate: float, k_range,
                         field_spec: FieldSpec | None = None, bit_reversed: bool = True,
                         rel_tol: float = 0.005, allow_zero: bool = False) -> DesignResult:
    """Over ``k_range`` pick the rate-matched design with the lowest predicted FEP."""
    best = None
    table = []
    for k in k_range:
        if k % t or not 0 < k <= quality.n:
            raise ValueError(f"k={k} must be a positive multiple of t={t} not above n")
        res = design_for_k(quality, k, t, rate, field_spec, bit_reversed, rel_tol, allow_zero)
        if res is None:
            continue
        table.append((k, res.rate, res.predicted_fep))
        if best is None or res.predicted_fep < best.predicted_fep:
            best = res
    if best is None:
        raise InfeasibleDesignError("no k in range reaches the target rate")
    best.candidates = table
    return best


# -- joint decoding -------------------------------------------------------------

@dataclass
class JointResult:
    messages: np.ndarray        # (B, message_bits)
    group_failed: np.ndarray    # (B, r) outer decoder failure flags
    corrections: np.ndarray     # (B, r) symbols changed by the outer decoder
    inner_u: np.ndarray         # (B, m, n) final polar input decisions


def _bit_logprobs(llrs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """log P(bit = 0), log P(bit = 1) from LLRs."""
    return -np.logaddexp(0.0, -llrs), -np.logaddexp(0.0, llrs)


def _aml_tables(llrs: np.ndarray, t: int) -> np.ndarray:
    """Symbol log-probabilities as a product of per-bit estimates;
    llrs (R, t) -> (R, 2^t).

    Bit ``j``'s LLR was computed assuming the earlier bits of the group took
    their SC decisions, so it only informs patterns that agree with those
    decisions; for every other pattern the bit counts as a fair coin.
    """
    l0, l1 = _bit_logprobs(llrs)
    vals = np.arange(1 << t)
    bits = ((vals[:, None] >> np.arange(t)) & 1).astype(bool)    # (2^t, t)
    agree = bits[None] == (llrs < 0)[:, None, :]                  # (R, 2^t, t)
    on_path = np.ones_like(agree)
    on_path[..., 1:] = np.logical_and.accumulate(agree[..., :-1], axis=-1)
    per_bit = np.where(bits[None], l1[:, None, :], l0[:, None, :])
    return np.where(on_path, per_bit, -math.log(2.0)).sum(axis=-1)


def _decode_word(rs: RSCodeSpec, word: SoftSymbolWord, mode: str, metric: str):
    if mode == "sc":
        return bm_decode(rs, list(word.symbols))
    cands = gmd_decode(rs, word)
    return pick_candidate(cands, word, metric, q=rs.field.order)


def joint_decode(spec: ConcatSpec, llr: np.ndarray, mode: str = "sc",
                 metric: str | None = None) -> JointResult:
    """Decode ``(B, m, n)`` (or ``(B, N)``) channel LLRs group by group.

    For each outer code the ``m`` SC decoders produce one symbol each; the RS
    word is corrected (``sc``: bounded distance; GMD modes: candidate list
    from bit-derived symbol reliabilities, or exact ones for ``sc-gmd-ml``)
    and the corrections steer the remaining SC decoding.  If the outer decoder
    fails the SC decisions are kept and the group is flagged.

    ``metric`` picks among GMD candidates; default ``hamming`` for
    ``sc-gmd`` and ``product`` otherwise.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    if metric is None:
        metric = "hamming" if mode == "sc-gmd" else "product"
    t, m, n = spec.t, spec.m, spec.n
    llr = np.asarray(llr, dtype=float)
    single = llr.ndim == 1 or (llr.ndim == 2 and llr.shape == (m, n))
    llr = llr.reshape(-1, m, n)
    B = llr.shape[0]
    state = SCState(spec.polar, llr.reshape(B * m, n), t)
    failed = np.zeros((B, spec.r), dtype=bool)
    corrections = np.zeros((B, spec.r), dtype=np.int64)
    decided = np.zeros((B, spec.r, m), dtype=np.int64)
    weights = 1 << np.arange(t)

    for g, rs in enumerate(spec.outer):
        soft = None
        if mode == "sc-gmd-ml":
            soft = state.symbol_soft_output(g)
            tables = soft.logprobs.reshape(B, m, 1 << t)
            hard = tables.argmax(axis=-1)
            rel = np.exp(tables.max(axis=-1))
        else:
            bits, llrs = state.sc_decode_group(g)
            hard = (bits.astype(np.int64) @ weights).reshape(B, m)
            if mode != "sc":
                llrs = llrs.reshape(B, m, t)
                rel = np.exp(-np.logaddexp(0.0, -np.abs(llrs)).sum(axis=-1))
        final = hard.copy()
        todo = np.flatnonzero(syndromes_batch(rs, hard).any(axis=1)) if rs.tau else []
        for b in todo:
            if mode == "sc":
                word = SoftSymbolWord(hard[b].tolist())
            elif mode == "sc-gmd-ml":
                word = SoftSymbolWord(hard[b].tolist(), rel[b].tolist(),
                                      symbol_logprobs=tables[b])
            else:
                logp = _aml_tables(llrs[b], t) if metric == "product" else None
                word = SoftSymbolWord(hard[b].tolist(), rel[b].tolist(), symbol_logprobs=logp)
            try:
                final[b] = _decode_word(rs, word, mode, metric)
            except RSDecodeError:
                failed[b, g] = True
        corrections[:, g] = (final != hard).sum(axis=1)
        decided[:, g] = final
        new_bits = ((final.reshape(B * m, 1) >> np.arange(t)) & 1).astype(np.uint8)
        state.set_group_decision(g, new_bits, soft)

    state.decode_all()
    msg_syms = np.concatenate([decided[:, g, :kap] for g, kap in enumerate(spec.kappas)], axis=1)
    messages = symbols_to_bits(msg_syms, t)
    inner_u = state.u.reshape(B, m, n).astype(np.uint8)
    if single:
        return JointResult(messages[0], failed[0], corrections[0], inner_u[0])
    return JointResult(messages, failed, corrections, inner_u)
