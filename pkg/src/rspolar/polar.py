"""Polar codes: construction, encoding and successive cancellation decoding.

Bit-channel indices are 0-based: index ``i`` here is bit-channel ``i + 1`` in
the usual 1-based notation.  Internally encoding is ``x = u G^{(x)s}`` in
natural order.  With ``bit_reversed=True`` the transmitted word is ``u R_n
G^{(x)s}``; since ``R_n`` commutes with ``G^{(x)s}`` this only permutes the
transmitted positions, so bit-channel reliabilities are unaffected but the
mapping of contiguous channel bursts onto the code is the classical one.

All decoding is batched: LLR arrays carry a leading batch axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import channel as ch

# LLR magnitudes are clipped here so that +/-inf inputs never produce inf - inf.
LLR_MAX = 1e3
# float budget for the per-pattern trellis copies in symbol soft output
SOFT_OUTPUT_BUDGET = 1 << 22


def f_op(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Check-node combination 2 atanh(tanh(a/2) tanh(b/2)), log-domain stable.

    A zero (erased) operand yields exactly zero.
    """
    return np.logaddexp(0.0, a + b) - np.logaddexp(a, b)


def g_op(a: np.ndarray, b: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Variable-node combination (-1)^u a + b."""
    return np.where(u, b - a, b + a)


def log_prob_bit(llr: np.ndarray, bit: int) -> np.ndarray:
    """log P(bit | llr)."""
    return -np.logaddexp(0.0, llr if bit else -llr)


@lru_cache(maxsize=None)
def bitrev_permutation(n: int) -> np.ndarray:
    s = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for k in range(s):
        rev |= ((idx >> k) & 1) << (s - 1 - k)
    rev.setflags(write=False)
    return rev


def polar_transform(u: np.ndarray) -> np.ndarray:
    """``u G^{(x)s}`` over GF(2) along the last axis, O(n log n)."""
    x = np.array(u, dtype=np.uint8, copy=True)
    n = x.shape[-1]
    if n & (n - 1):
        raise ValueError(f"length {n} is not a power of two")
    lead = x.shape[:-1]
    h = 1
    while h < n:
        v = x.reshape(lead + (n // (2 * h), 2, h))
        v[..., 0, :] ^= v[..., 1, :]
        h *= 2
    return x


def kron_matrix(s: int) -> np.ndarray:
    """Dense G^{(x)s} (reference implementation)."""
    G = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    out = np.ones((1, 1), dtype=np.uint8)
    for _ in range(s):
        out = np.kron(out, G)
    return out


# -- construction ---------------------------------------------------------------

@dataclass
class BitChannelQuality:
    """Per-index reliability: Bhattacharyya parameters ``z`` and/or genie-aided
    error probabilities ``p`` (with the number of trials behind them)."""

    z: np.ndarray | None = None
    p: np.ndarray | None = None
    trials: int = 0

    def __post_init__(self):
        if self.z is None and self.p is None:
            raise ValueError("need z or p")
        for name in ("z", "p"):
            v = getattr(self, name)
            if v is not None:
                v = np.asarray(v, dtype=float)
                if np.any((v < 0) | (v > 1)):
                    raise ValueError(f"{name} values must lie in [0, 1]")
                setattr(self, name, v)

    @property
    def n(self) -> int:
        return len(self.p if self.p is not None else self.z)

    def error_probabilities(self) -> np.ndarray:
        """Bit error estimate per index: ``p`` if measured, else ``z / 2``
        (exact on the BEC, where an erased bit is a fair coin)."""
        return self.p if self.p is not None else self.z / 2.0

    def ranking_values(self) -> np.ndarray:
        return self.p if self.p is not None else self.z


def bec_construct(s: int, eps: float) -> BitChannelQuality:
    """Exact Bhattacharyya parameters of every bit-channel of BEC(eps)."""
    if not 0.0 < eps < 1.0:
        raise ValueError("erasure probability must be in (0, 1)")
    z = np.array([eps])
    for _ in range(s):
        nxt = np.empty(2 * len(z))
        nxt[0::2] = 2 * z - z * z
        nxt[1::2] = z * z
        z = nxt
    return BitChannelQuality(z=z)


def select_info_set(quality: BitChannelQuality | np.ndarray, k: int) -> tuple[int, ...]:
    """The ``k`` most reliable indices in increasing index order (ties: smaller index)."""
    values = quality.ranking_values() if isinstance(quality, BitChannelQuality) else np.asarray(quality)
    if not 0 <= k <= len(values):
        raise ValueError(f"k={k} out of range for n={len(values)}")
    best = np.argsort(values, kind="stable")[:k]
    return tuple(int(i) for i in np.sort(best))


@dataclass(frozen=True)
class PolarCodeSpec:
    n: int
    info_set: tuple
    bit_reversed: bool = True

    def __post_init__(self):
        if self.n < 2 or self.n & (self.n - 1):
            raise ValueError(f"n={self.n} is not a power of two >= 2")
        info = tuple(int(i) for i in self.info_set)
        if any(b <= a for a, b in zip(info, info[1:])):
            raise ValueError("info_set must be strictly increasing")
        if info and (info[0] < 0 or info[-1] >= self.n):
            raise ValueError(f"info_set indices must lie in [0, {self.n})")
        object.__setattr__(self, "info_set", info)

    @property
    def s(self) -> int:
        return self.n.bit_length() - 1

    @property
    def k(self) -> int:
        return len(self.info_set)

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def frozen_mask(self) -> np.ndarray:
        mask = np.ones(self.n, dtype=bool)
        mask[list(self.info_set)] = False
        return mask

    def transmit_order(self) -> np.ndarray:
        """Natural-order position sent at each channel use."""
        return bitrev_permutation(self.n) if self.bit_reversed else np.arange(self.n)


def polar_encode(spec: PolarCodeSpec, info_bits: np.ndarray) -> np.ndarray:
    """Encode ``(..., k)`` information bits into ``(..., n)`` transmitted bits."""
    info_bits = np.asarray(info_bits, dtype=np.uint8)
    if info_bits.shape[-1] != spec.k:
        raise ValueError(f"expected {spec.k} information bits, got {info_bits.shape[-1]}")
    u = np.zeros(info_bits.shape[:-1] + (spec.n,), dtype=np.uint8)
    u[..., list(spec.info_set)] = info_bits
    return polar_transform(u)[..., spec.transmit_order()]


def to_natural(spec: PolarCodeSpec, llr: np.ndarray) -> np.ndarray:
    """Reorder received values (last axis, transmission order) to natural order."""
    if not spec.bit_reversed:
        return np.asarray(llr)
    # bit reversal is an involution
    return np.asarray(llr)[..., bitrev_permutation(spec.n)]


def genie_llrs(llr: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Decision LLR of every bit when all earlier bits are supplied correctly.

    ``llr`` and ``u`` are ``(B, n)`` in natural order.
    """
    llr = np.clip(np.asarray(llr, dtype=float), -LLR_MAX, LLR_MAX)
    B, n = llr.shape
    s = n.bit_length() - 1
    # sums[k]: u transformed inside blocks of 2^k
    sums = [np.asarray(u, dtype=np.uint8)]
    x = sums[0].copy()
    for k in range(1, s):
        h = 1 << (k - 1)
        v = x.reshape(B, n // (2 * h), 2, h)
        v[:, :, 0, :] ^= v[:, :, 1, :]
        sums.append(x.copy())
    L = llr[:, None, :]
    for lam in range(s, 0, -1):
        half = 1 << (lam - 1)
        nodes = L.shape[1]
        a, b = L[..., :half], L[..., half:]
        xl = sums[lam - 1].reshape(B, nodes, 2, half)[:, :, 0, :].astype(bool)
        L = np.stack([f_op(a, b), g_op(a, b, xl)], axis=2).reshape(B, 2 * nodes, half)
    return L.reshape(B, n)


def mc_bitchannel_estimate(n: int, channel: ch.ChannelModel, trials: int, seed: int,
                           bit_reversed: bool = True, batch: int = 2000) -> BitChannelQuality:
    """Genie-aided Monte Carlo estimate of each bit-channel's error probability.

    Inputs are uniformly random over all ``n`` positions; a zero LLR decides 0.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    spec = PolarCodeSpec(n, tuple(range(n)), bit_reversed)
    rng = np.random.default_rng(seed)
    errors = np.zeros(n, dtype=np.int64)
    done = 0
    while done < trials:
        b = min(batch, trials - done)
        u = rng.integers(0, 2, size=(b, n), dtype=np.uint8)
        x = polar_transform(u)[:, spec.transmit_order()]
        llr = to_natural(spec, ch.transmit(channel, x, rng))
        dec = genie_llrs(llr, u) < 0
        errors += (dec != u.astype(bool)).sum(axis=0)
        done += b
    return BitChannelQuality(p=errors / trials, trials=trials)


# -- successive cancellation ------------------------------------------------------

@dataclass
class SymbolSoftOutput:
    """Exact joint probabilities of the 2^t bit patterns of one group.

    Pattern ``v`` sets the group's j-th information bit to bit j of ``v``.
    ``path_llrs`` keeps the decision LLRs computed along every pattern's path
    (shape ``(B, 2^t, span)``, span covering frozen bits inside the group).
    """

    probs: np.ndarray
    logprobs: np.ndarray
    path_llrs: np.ndarray
    span: tuple = field(default=(0, 0))


class GroupOrderError(RuntimeError):
    pass


class SCState:
    """Batched successive-cancellation decoder that can pause between groups of
    ``t`` information bits and accept corrected decisions.

    The trellis holds, for the path of the last computed bit, the LLRs at every
    level (``alpha[lam]`` has ``2^lam`` entries per row, ``alpha[s]`` is the
    channel) and the partial sums of left siblings (``beta[lam]``).
    """

    def __init__(self, spec: PolarCodeSpec, llr: np.ndarray, t: int = 1):
        llr = np.asarray(llr, dtype=float)
        if llr.ndim == 1:
            llr = llr[None, :]
        if llr.shape[-1] != spec.n:
            raise ValueError(f"expected {spec.n} channel values, got {llr.shape[-1]}")
        if spec.k % t:
            raise ValueError(f"t={t} does not divide k={spec.k}")
        llr = np.clip(to_natural(spec, llr), -LLR_MAX, LLR_MAX)
        self.spec = spec
        self.t = t
        self.frozen = spec.frozen_mask
        s = spec.s
        B = llr.shape[0]
        self.alpha = [np.zeros((B, 1 << lam)) for lam in range(s)] + [llr]
        self.beta = [np.zeros((B, 1 << lam), dtype=bool) for lam in range(s)]
        self.u = np.zeros((B, spec.n), dtype=bool)
        self.llr = np.full((B, spec.n), np.nan)
        self.cursor = 0
        self.group = 0
        self._path = -1     # bit whose path the alpha arrays describe
        self._dirty = s     # alpha levels below this are invalid
        self._pending = None
        self._zeros = np.zeros(B, dtype=bool)

    @property
    def batch(self) -> int:
        return self.u.shape[0]

    @property
    def num_groups(self) -> int:
        return self.spec.k // self.t

    def group_positions(self, g: int) -> tuple:
        return self.spec.info_set[g * self.t:(g + 1) * self.t]

    # -- core recursion --

    def _compute_llr(self, phi: int) -> np.ndarray:
        top = self.spec.s if self._path < 0 else (phi ^ self._path).bit_length()
        top = max(top, self._dirty)
        alpha, beta = self.alpha, self.beta
        for lam in range(top, 0, -1):
            a = alpha[lam]
            half = a.shape[1] >> 1
            if (phi >> (lam - 1)) & 1:
                alpha[lam - 1] = g_op(a[:, :half], a[:, half:], beta[lam - 1])
            else:
                alpha[lam - 1] = f_op(a[:, :half], a[:, half:])
        self._path = phi
        self._dirty = 0
        return alpha[0][:, 0]

    def _commit(self, phi: int, bits: np.ndarray) -> None:
        self.u[:, phi] = bits
        v = np.array(bits, dtype=bool).reshape(-1, 1)
        lam = 0
        s = self.spec.s
        while lam < s and (phi >> lam) & 1:
            v = np.concatenate([self.beta[lam] ^ v, v], axis=1)
            lam += 1
        if lam < s:
            self.beta[lam] = v

    def _advance(self, stop: int, forced: dict | None = None, all_llrs: bool = False) -> None:
        """Decide bits ``cursor .. stop-1``; ``forced`` maps positions to bits."""
        for phi in range(self.cursor, stop):
            if forced is not None and phi in forced:
                bits = forced[phi]
                if all_llrs:
                    self.llr[:, phi] = self._compute_llr(phi)
            elif self.frozen[phi]:
                bits = self._zeros
                if all_llrs:
                    self.llr[:, phi] = self._compute_llr(phi)
            else:
                l = self._compute_llr(phi)
                self.llr[:, phi] = l
                bits = l < 0
            self._commit(phi, bits)
        self.cursor = max(self.cursor, stop)

    def decode_all(self, all_llrs: bool = False) -> None:
        self._advance(self.spec.n, all_llrs=all_llrs)

    # -- group-wise interface --

    def _check_group(self, g: int) -> tuple:
        if self._pending is not None:
            raise GroupOrderError(f"group {self._pending[1]} is awaiting set_group_decision")
        if g != self.group:
            raise GroupOrderError(f"next group is {self.group}, got {g}")
        pos = self.group_positions(g)
        if len(pos) != self.t:
            raise GroupOrderError(f"group {g} does not exist")
        return pos

    def sc_decode_group(self, g: int) -> tuple[np.ndarray, np.ndarray]:
        """Decode up to the last information bit of group ``g``.

        Returns hard bits and their LLRs, both ``(B, t)``.
        """
        pos = self._check_group(g)
        self._advance(pos[-1] + 1)
        self._pending = ("sc", g)
        idx = list(pos)
        return self.u[:, idx].astype(np.uint8), self.llr[:, idx].copy()

    def symbol_soft_output(self, g: int) -> SymbolSoftOutput:
        """Joint likelihoods of all 2^t patterns of group ``g`` given the channel
        output and the finalized prefix, by following every pattern's SC path.

        Frozen bits inside the group contribute their P(u=0) factor.  Only the
        trellis levels below the smallest subtree holding the group are
        duplicated per path.
        """
        pos = self._check_group(g)
        a, b = pos[0], pos[-1]
        self._advance(a)
        self._compute_llr(a)
        L = (a ^ b).bit_length()
        # bound the per-path trellis copies to about SOFT_OUTPUT_BUDGET floats
        rows = max(1, SOFT_OUTPUT_BUDGET // ((1 << self.t) << L))
        parts = [self._patterns(a, b, L, slice(i, i + rows))
                 for i in range(0, self.batch, rows)]
        metric = np.concatenate([p[0] for p in parts])
        path_llrs = np.concatenate([p[1] for p in parts])
        logprobs = metric - np.logaddexp.reduce(metric, axis=1, keepdims=True)
        bad = ~np.isfinite(logprobs).any(axis=1)
        logprobs[bad] = -np.log(metric.shape[1])
        self._pending = ("ml", g)
        return SymbolSoftOutput(np.exp(logprobs), logprobs, path_llrs, (a, b + 1))

    def _patterns(self, a: int, b: int, L: int, rows: slice):
        """Path metrics and LLRs of every pattern of bits a..b for some rows."""
        alpha = [self.alpha[lam][rows, None, :] for lam in range(L + 1)]
        beta = [self.beta[lam][rows, None, :] for lam in range(L)]
        B = alpha[L].shape[0]
        metric = np.zeros((B, 1))
        path_llrs = np.zeros((B, 1, 0))
        P = 1
        prev = a
        for phi in range(a, b + 1):
            if phi != a:
                for lam in range((phi ^ prev).bit_length(), 0, -1):
                    x = alpha[lam]
                    half = x.shape[-1] >> 1
                    if (phi >> (lam - 1)) & 1:
                        alpha[lam - 1] = g_op(x[..., :half], x[..., half:], beta[lam - 1])
                    else:
                        alpha[lam - 1] = f_op(x[..., :half], x[..., half:])
            prev = phi
            l = np.broadcast_to(alpha[0][..., 0], (B, P))
            if self.frozen[phi]:
                metric = metric + log_prob_bit(l, 0)
                path_llrs = np.concatenate([path_llrs, l[..., None]], axis=2)
                v = np.zeros((B, P, 1), dtype=bool)
            else:
                # fork: patterns with this bit 0 first, then with it 1
                if P > 1:
                    alpha = [np.concatenate([x, x], axis=1) if x.shape[1] == P else x
                             for x in alpha]
                    beta = [np.concatenate([x, x], axis=1) if x.shape[1] == P else x
                            for x in beta]
                metric = np.concatenate([metric + log_prob_bit(l, 0),
                                         metric + log_prob_bit(l, 1)], axis=1)
                l2 = np.concatenate([l, l], axis=1)
                path_llrs = np.concatenate([np.concatenate([path_llrs, path_llrs], axis=1),
                                            l2[..., None]], axis=2)
                P *= 2
                v = np.zeros((B, P, 1), dtype=bool)
                v[:, P // 2:] = True
            lam = 0
            while lam < L and (phi >> lam) & 1:
                left = np.broadcast_to(beta[lam], (B, v.shape[1], beta[lam].shape[-1]))
                v = np.concatenate([left ^ v, v], axis=-1)
                lam += 1
            if lam < L:
                beta[lam] = v
        return metric, path_llrs

    def set_group_decision(self, g: int, bits: np.ndarray,
                           soft: SymbolSoftOutput | None = None) -> None:
        """Finalize group ``g`` with (possibly corrected) ``bits`` of shape (B, t).

        After ``sc_decode_group`` this rewrites the decisions and refreshes the
        partial sums the next bit depends on.  After ``symbol_soft_output`` it
        continues along the chosen pattern's path.
        """
        if self._pending is None or self._pending[1] != g:
            raise GroupOrderError(f"group {g} is not awaiting a decision")
        mode = self._pending[0]
        pos = self.group_positions(g)
        bits = np.asarray(bits).astype(bool).reshape(self.batch, self.t)
        if mode == "ml":
            a, b = pos[0], pos[-1]
            forced = {p: bits[:, j] for j, p in enumerate(pos)}
            self._advance(b + 1, forced=forced)
            if soft is not None:
                choice = (bits.astype(np.int64) << np.arange(self.t)).sum(axis=1)
                self.llr[:, a:b + 1] = soft.path_llrs[np.arange(self.batch), choice]
        else:
            idx = list(pos)
            changed = np.flatnonzero((self.u[:, idx] != bits).any(axis=0))
            if changed.size:
                self.u[:, idx] = bits
                self._refresh_partial_sums(pos[changed[0]])
        self._pending = None
        self.group += 1

    def _refresh_partial_sums(self, first_changed: int) -> None:
        nxt = self.cursor
        if nxt >= self.spec.n:
            return
        for lam in range(self.spec.s):
            if not (nxt >> lam) & 1:
                continue
            start = ((nxt >> lam) << lam) - (1 << lam)
            stop = start + (1 << lam)
            if stop <= first_changed:
                continue
            self.beta[lam] = polar_transform(self.u[:, start:stop]).astype(bool)
            self._dirty = max(self._dirty, lam + 1)


def sc_decode(spec: PolarCodeSpec, llr: np.ndarray, all_llrs: bool = False):
    """Plain SC decoding.

    Returns ``(u_hat, llrs)``: hard decisions for all ``n`` inputs and the
    decision LLRs of the information bits (of every bit if ``all_llrs``).
    A single LLR vector gives unbatched outputs.
    """
    llr = np.asarray(llr, dtype=float)
    single = llr.ndim == 1
    state = SCState(spec, llr)
    state.decode_all(all_llrs=all_llrs)
    u = state.u.astype(np.uint8)
    soft = state.llr if all_llrs else state.llr[:, list(spec.info_set)]
    if single:
        return u[0], soft[0]
    return u, soft
