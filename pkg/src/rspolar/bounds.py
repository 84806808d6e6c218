"""Closed-form error bounds for polar and RS-polar concatenated codes.

Exponents are base 2 and always reported raw, since a probability clamped to
[0, 1] hides how fast a bound decays.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import binom

from .polar import BitChannelQuality


@dataclass
class BoundReport:
    """Bounds for one parameter set; ``None`` where a bound does not apply."""

    union_bound: float | None = None
    lemma1_bound: float | None = None
    lemma1_exponent: float | None = None
    lower_bound: float | None = None
    inputs: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def union_bound(quality: BitChannelQuality | np.ndarray, info_set) -> float:
    """Sum of Bhattacharyya parameters over the information set, capped at 1."""
    z = quality.z if isinstance(quality, BitChannelQuality) else np.asarray(quality)
    if z is None:
        raise ValueError("union bound needs Bhattacharyya parameters")
    idx = list(info_set)
    return min(1.0, float(np.sum(z[idx]))) if idx else 0.0


def lemma1_exponent(n: float, m: float, R_o: float, eps: float) -> float:
    """log2 of the concatenated-code frame error bound
    ``-(n^(1/2 - eps) (1 - R_o) / 2 - 1) m``."""
    if not 0.0 <= eps < 0.5:
        raise ValueError("eps must lie in [0, 0.5)")
    if not 0.0 <= R_o <= 1.0:
        raise ValueError("outer rate must lie in [0, 1]")
    return -(n ** (0.5 - eps) * (1.0 - R_o) / 2.0 - 1.0) * m


def lemma1_bound(n: float, m: float, R_o: float, eps: float) -> tuple[float, float]:
    """(bound clamped to [0, 1], raw log2 exponent).  ``eps = 0`` is the limit."""
    e = lemma1_exponent(n, m, R_o, eps)
    return (1.0 if e >= 0 else 2.0 ** e), e


@dataclass
class Theorem1Params:
    n: float
    m: float
    R_o: float
    n_rounded: int
    m_rounded: int
    feasible: bool
    notes: list = field(default_factory=list)


def theorem1_params(N: float, eps: float) -> Theorem1Params:
    """Inner length ``N^eps``, outer length ``N^(1-eps)`` and outer rate
    ``1 - 4 N^(-eps (1/2 - eps))``.

    The rounded values give the nearest power of two for ``n`` and the
    nearest ``2^t - 1`` for ``m``.
    """
    if not 0.0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 0.5)")
    n = N ** eps
    m = N ** (1.0 - eps)
    R_o = 1.0 - 4.0 * N ** (-eps * (0.5 - eps))
    n_r = 1 << max(1, round(math.log2(n)))
    m_r = (1 << max(2, round(math.log2(m + 1)))) - 1
    notes = []
    if n_r != n:
        notes.append(f"n rounded from {n:g} to {n_r}")
    if m_r != m:
        notes.append(f"m rounded from {m:g} to RS length {m_r}")
    feasible = R_o > 0
    if not feasible:
        notes.append(f"outer rate {R_o:g} is not positive")
    return Theorem1Params(n, m, R_o, n_r, m_r, feasible, notes)


def binomial_tail(m: int, start: int, p: float) -> float:
    """P(X >= start) for X ~ Binomial(m, p)."""
    if start > m:
        return 0.0
    if start <= 0:
        return 1.0
    return float(binom.sf(start - 1, m, p))


def optimistic_lower_bound(n: int, m: int, R_I: float, R_o: float, eps: float,
                           P_e: float) -> float:
    """Frame error probability when every inner failure corrupts exactly one
    outer symbol and failures spread evenly over the outer codewords.

    ``r = floor(n R_I / log2 m)`` outer codewords each correct
    ``tau = floor((1 - R_o) m / 2)`` errors, so the frame survives up to
    ``r tau`` inner failures out of ``m``.  ``eps`` is only echoed; ``P_e``
    is the inner codeword error probability.
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    r = math.floor(n * R_I / math.log2(m))
    if r < 1:
        raise ValueError(f"n * R_I / log2(m) = {n * R_I / math.log2(m):g} gives no outer codeword")
    tau = math.floor((1.0 - R_o) * m / 2.0)
    return binomial_tail(m, r * tau + 1, P_e)


def burst_failure_threshold(n: int) -> int:
    """Shortest contiguous erasure burst that blanks an aligned block of
    ``2^ceil(s/2)`` outputs wherever it starts: ``2 sqrt(n) - 1`` for even s."""
    s = n.bit_length() - 1
    if n != 1 << s:
        raise ValueError(f"n={n} is not a power of two")
    return 2 * (1 << -(-s // 2)) - 1


def burst_recovery_limit(d: int, n: int) -> int:
    """Longest erasure burst an outer distance-``d`` code always recovers."""
    if d < 2:
        raise ValueError("distance must be at least 2")
    return (d - 2) * n + 1


def burst_erased_inputs(n: int, q: int) -> list[int]:
    """Inputs (0-based, bit-reversed transmission) whose decision LLR is zero
    when an aligned block of ``2^q`` outputs is erased: ``l 2^(s-q)``."""
    s = n.bit_length() - 1
    if not 0 <= q <= s:
        raise ValueError(f"q must lie in [0, {s}]")
    step = 1 << (s - q)
    return list(range(0, n, step))


def report(n: int | None = None, m: int | None = None, R_o: float | None = None,
           eps: float = 0.0, R_I: float | None = None, P_e: float | None = None,
           quality: BitChannelQuality | None = None, info_set=None) -> BoundReport:
    """Evaluate every bound the given inputs allow."""
    rep = BoundReport(inputs=dict(n=n, m=m, R_o=R_o, eps=eps, R_I=R_I, P_e=P_e))
    if quality is not None and info_set is not None and quality.z is not None:
        rep.union_bound = union_bound(quality, info_set)
    if None not in (n, m, R_o):
        rep.lemma1_bound, rep.lemma1_exponent = lemma1_bound(n, m, R_o, eps)
        if rep.lemma1_exponent >= 0:
            rep.notes.append("concatenated-code exponent is nonnegative: bound is vacuous")
        if R_I is not None and P_e is not None:
            rep.lower_bound = optimistic_lower_bound(n, m, R_I, R_o, eps, P_e)
    return rep
