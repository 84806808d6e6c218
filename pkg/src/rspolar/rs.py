"""Reed-Solomon codes of length 2^t - 1: systematic encoding, errors-and-erasures
Berlekamp-Massey decoding, and the naive multi-pass GMD list decoder.

Codeword position ``j`` (0-based) holds the coefficient of ``x^(m-1-j)``, so the
message occupies the first ``dim`` positions.  The generator has roots
``a^1 .. a^(2*tau)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .gf import FieldSpec, poly_deriv, poly_divmod, poly_eval, poly_mul, poly_trim


class RSDecodeError(Exception):
    """Raised when a word is not within the errors-and-erasures decoding radius."""


@dataclass(frozen=True)
class RSCodeSpec:
    field: FieldSpec
    tau: int
    generator: tuple = field(init=False, repr=False, compare=False)
    # syndrome evaluation matrix: [i, j] = a^((i+1) * (m-1-j)) as a log value
    _synd_log: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.tau < 0:
            raise ValueError("tau must be non-negative")
        if self.length - 2 * self.tau < 1:
            raise ValueError(f"tau={self.tau} leaves no message symbols at length {self.length}")
        gf = self.field
        g = [1]
        for i in range(1, 2 * self.tau + 1):
            g = poly_mul(gf, g, [gf.alpha_pow(i), 1])
        object.__setattr__(self, "generator", tuple(g))
        m = self.length
        rows = np.arange(1, 2 * self.tau + 1)[:, None]
        degs = (m - 1 - np.arange(m))[None, :]
        object.__setattr__(self, "_synd_log", (rows * degs) % gf.group_order)

    @property
    def length(self) -> int:
        return self.field.group_order

    m = length

    @property
    def dim(self) -> int:
        return self.length - 2 * self.tau

    @property
    def distance(self) -> int:
        return 2 * self.tau + 1

    @property
    def rate(self) -> float:
        return self.dim / self.length


@dataclass
class SoftSymbolWord:
    """Hard symbol decisions with per-symbol confidence.

    ``symbol_logprobs`` optionally carries ``log P(symbol_j = v)`` for every
    field value ``v`` (shape ``(m, 2^t)``); the product metric uses it when
    present.
    """

    symbols: Sequence[int]
    reliabilities: Sequence[float] | None = None
    erasure_flags: Sequence[bool] | None = None
    symbol_logprobs: np.ndarray | None = None

    def __post_init__(self):
        m = len(self.symbols)
        if self.reliabilities is None:
            self.reliabilities = [1.0] * m
        if self.erasure_flags is None:
            self.erasure_flags = [False] * m
        if len(self.reliabilities) != m or len(self.erasure_flags) != m:
            raise ValueError("symbols, reliabilities and erasure_flags differ in length")
        self.reliabilities = [0.0 if e else float(r)
                              for r, e in zip(self.reliabilities, self.erasure_flags)]


def rs_encode(spec: RSCodeSpec, message: Sequence[int]) -> list[int]:
    if len(message) != spec.dim:
        raise ValueError(f"message has {len(message)} symbols, expected {spec.dim}")
    nsym = 2 * spec.tau
    # message symbol 0 is the highest-degree coefficient
    shifted = [0] * nsym + list(reversed(message))
    _, rem = poly_divmod(spec.field, shifted, spec.generator)
    parity = rem + [0] * (nsym - len(rem))
    return list(message) + list(reversed(parity))


def rs_encode_batch(spec: RSCodeSpec, messages: np.ndarray) -> np.ndarray:
    """Systematic encoding of many messages (B, dim) with a vectorised LFSR."""
    messages = np.asarray(messages, dtype=np.int64)
    if messages.ndim != 2 or messages.shape[1] != spec.dim:
        raise ValueError(f"messages must have shape (B, {spec.dim})")
    nsym = 2 * spec.tau
    gf = spec.field
    # feedback taps g_(2tau-1) .. g_0, matching register order high degree first
    taps = np.array(spec.generator[:nsym][::-1], dtype=np.int64)
    reg = np.zeros((messages.shape[0], nsym), dtype=np.int64)
    for i in range(spec.dim):
        fb = messages[:, i] ^ (reg[:, 0] if nsym else 0)
        if nsym:
            reg = np.concatenate([reg[:, 1:], np.zeros((len(reg), 1), np.int64)], axis=1)
            reg ^= gf.mul_np(fb[:, None], taps[None, :])
    return np.concatenate([messages, reg], axis=1)


def syndromes(spec: RSCodeSpec, word: Sequence[int]) -> list[int]:
    """S_1 .. S_2tau of ``word``."""
    gf = spec.field
    poly = list(reversed(word))
    return [poly_eval(gf, poly, gf.alpha_pow(i)) for i in range(1, 2 * spec.tau + 1)]


def syndromes_batch(spec: RSCodeSpec, words: np.ndarray) -> np.ndarray:
    """Syndromes of many words at once; ``words`` has shape (B, m)."""
    words = np.asarray(words, dtype=np.int64)
    gf = spec.field
    if spec.tau == 0:
        return np.zeros((words.shape[0], 0), dtype=np.int64)
    logs = gf.log_np[words][:, None, :] + spec._synd_log[None, :, :]
    terms = gf.exp_np[logs % gf.group_order]
    terms[np.broadcast_to((words == 0)[:, None, :], terms.shape)] = 0
    return np.bitwise_xor.reduce(terms, axis=2)


def _berlekamp_massey(gf: FieldSpec, seq: Sequence[int]) -> tuple[list[int], int]:
    """Shortest LFSR (connection polynomial, length) generating ``seq``."""
    C = [1]
    B = [1]
    L = 0
    shift = 1
    b = 1
    for n_, s_n in enumerate(seq):
        d = s_n
        for i in range(1, L + 1):
            if i < len(C) and C[i]:
                d ^= gf.mul(C[i], seq[n_ - i])
        if d == 0:
            shift += 1
            continue
        coef = gf.div(d, b)
        update = [0] * shift + [gf.mul(coef, x) for x in B]
        newC = C + [0] * max(0, len(update) - len(C))
        for i, x in enumerate(update):
            newC[i] ^= x
        if 2 * L <= n_:
            B, L, b, shift = C, n_ + 1 - L, d, 1
        else:
            shift += 1
        C = newC
    return poly_trim(C), L


def bm_decode(spec: RSCodeSpec, word: SoftSymbolWord | Sequence[int],
              erasures: Sequence[int] = ()) -> list[int]:
    """Bounded-distance errors-and-erasures decoding.

    Returns the unique codeword with ``2*errors + erasures <= 2*tau`` or raises
    :class:`RSDecodeError`.  Erasures come from ``erasures`` and, for a
    :class:`SoftSymbolWord`, from its erasure flags.
    """
    if isinstance(word, SoftSymbolWord):
        flagged = [j for j, e in enumerate(word.erasure_flags) if e]
        symbols = list(word.symbols)
    else:
        flagged = []
        symbols = list(word)
    gf = spec.field
    m = spec.length
    nsym = 2 * spec.tau
    if len(symbols) != m:
        raise ValueError(f"word has {len(symbols)} symbols, expected {m}")
    eras = sorted(set(flagged) | set(erasures))
    if len(eras) > nsym:
        raise RSDecodeError(f"{len(eras)} erasures exceed 2*tau={nsym}")
    for j in eras:
        symbols[j] = 0
    S = syndromes(spec, symbols)
    if not any(S):
        return symbols

    # erasure locator Gamma(x) = prod (1 - X_j x), X_j = a^(m-1-j)
    gamma = [1]
    for j in eras:
        gamma = poly_mul(gf, gamma, [1, gf.alpha_pow(m - 1 - j)])
    # modified syndromes: Gamma(x) S(x) mod x^2tau; the tail obeys the error locator
    xi = poly_mul(gf, gamma, S)[:nsym]
    xi += [0] * (nsym - len(xi))
    e = len(eras)
    lam, nu = _berlekamp_massey(gf, xi[e:])
    if 2 * nu + e > nsym or len(lam) - 1 != nu:
        raise RSDecodeError("error locator exceeds the decoding radius")

    err_pos = [j for j in range(m) if poly_eval(gf, lam, gf.alpha_pow(j + 1)) == 0]
    if len(err_pos) != nu:
        raise RSDecodeError("error locator roots do not match its degree")

    psi = poly_mul(gf, lam, gamma)
    omega = poly_mul(gf, psi, S)[:nsym]
    dpsi = poly_deriv(psi)
    for j in sorted(set(err_pos) | set(eras)):
        x_inv = gf.alpha_pow(j + 1)
        den = poly_eval(gf, dpsi, x_inv)
        if den == 0:
            raise RSDecodeError("repeated errata locator root")
        symbols[j] ^= gf.div(poly_eval(gf, omega, x_inv), den)
    if any(syndromes(spec, symbols)):
        raise RSDecodeError("correction did not produce a codeword")
    return symbols


def gmd_order(word: SoftSymbolWord) -> list[int]:
    """Positions from least to most reliable; ties erase the lower index first."""
    rel = word.reliabilities
    return sorted(range(len(rel)), key=lambda j: (rel[j], j))


def gmd_decode(spec: RSCodeSpec, word: SoftSymbolWord) -> list[list[int]]:
    """Run errors-and-erasures decoding with the 0, 2, .., d-1 least reliable
    positions erased and return the distinct successful outputs."""
    order = gmd_order(word)
    flagged = [j for j, e in enumerate(word.erasure_flags) if e]
    out: list[list[int]] = []
    seen = set()
    for alpha in range(0, spec.distance, 2):
        eras = set(flagged) | set(order[:alpha])
        try:
            cw = bm_decode(spec, list(word.symbols), sorted(eras))
        except RSDecodeError:
            continue
        key = tuple(cw)
        if key not in seen:
            seen.add(key)
            out.append(cw)
    return out


def _symbol_logprob_table(word: SoftSymbolWord, q: int) -> np.ndarray:
    if word.symbol_logprobs is not None:
        return np.asarray(word.symbol_logprobs, dtype=float)
    # only hard-decision confidences known: spread the rest uniformly
    m = len(word.symbols)
    table = np.empty((m, q))
    with np.errstate(divide="ignore"):
        for j, (s, r) in enumerate(zip(word.symbols, word.reliabilities)):
            r = min(max(r, 0.0), 1.0)
            if word.erasure_flags[j]:
                table[j] = -np.log(q)
                continue
            table[j] = np.log((1.0 - r) / (q - 1))
            table[j, s] = np.log(r)
    return table


def candidate_logprob(word: SoftSymbolWord, codeword: Sequence[int], q: int) -> float:
    table = _symbol_logprob_table(word, q)
    return float(table[np.arange(len(codeword)), np.asarray(codeword)].sum())


def pick_candidate(candidates: Sequence[Sequence[int]], word: SoftSymbolWord,
                   metric: str = "hamming", q: int | None = None) -> list[int]:
    """Select one codeword from a GMD list.

    ``hamming`` picks the candidate closest to the hard decisions; ``product``
    picks the largest product of symbol probabilities.  Ties go to the earliest
    list entry.
    """
    if not candidates:
        raise RSDecodeError("empty candidate list")
    if len(candidates) == 1:
        return list(candidates[0])
    if metric == "hamming":
        dists = [sum(a != b for a, b in zip(c, word.symbols)) for c in candidates]
        return list(candidates[int(np.argmin(dists))])
    if metric == "product":
        if word.symbol_logprobs is not None:
            q = np.asarray(word.symbol_logprobs).shape[1]
        elif q is None:
            top = max(max(max(c) for c in candidates), max(word.symbols))
            q = 1 << max(1, int(top).bit_length())
        table = _symbol_logprob_table(word, q)
        idx = np.arange(len(word.symbols))
        scores = [table[idx, np.asarray(c)].sum() for c in candidates]
        return list(candidates[int(np.argmax(scores))])
    raise ValueError(f"unknown metric {metric!r}")
