"""Arithmetic in GF(2^t) with log/antilog tables, plus small polynomial helpers.

Field elements are plain ints in ``[0, 2^t)``; the integer's bits are the
coordinates in the power basis ``{1, a, ..., a^(t-1)}``.  Polynomials are
lists of elements, lowest degree first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

# Conventional minimal-weight primitive polynomials, bitmask incl. the x^t term.
DEFAULT_PRIMITIVE_POLYS = {
    2: 0b111,                # x^2 + x + 1
    3: 0b1011,               # x^3 + x + 1
    4: 0b10011,              # x^4 + x + 1
    5: 0b100101,             # x^5 + x^2 + 1
    6: 0b1000011,            # x^6 + x + 1
    7: 0b10001001,           # x^7 + x^3 + 1
    8: 0b100011101,          # x^8 + x^4 + x^3 + x^2 + 1
    9: 0b1000010001,         # x^9 + x^4 + 1
    10: 0b10000001001,       # x^10 + x^3 + 1
    11: 0b100000000101,      # x^11 + x^2 + 1
    12: 0b1000001010011,     # x^12 + x^6 + x^4 + x + 1
}

FieldElement = int
Poly = list


@dataclass(frozen=True)
class FieldSpec:
    """GF(2^t) defined by a primitive polynomial (bitmask, degree t)."""

    t: int
    primitive_poly: int | None = None
    exp: tuple = field(init=False, repr=False, compare=False)
    log: tuple = field(init=False, repr=False, compare=False)
    exp_np: np.ndarray = field(init=False, repr=False, compare=False)
    log_np: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 2 <= self.t <= 12:
            raise ValueError(f"t must be in [2, 12], got {self.t}")
        poly = self.primitive_poly
        if poly is None:
            poly = DEFAULT_PRIMITIVE_POLYS[self.t]
            object.__setattr__(self, "primitive_poly", poly)
        if poly.bit_length() != self.t + 1:
            raise ValueError(f"polynomial {poly:#x} does not have degree {self.t}")
        q = 1 << self.t
        exp = [0] * (2 * (q - 1))
        log = [-1] * q
        x = 1
        for i in range(q - 1):
            if log[x] != -1:
                raise ValueError(f"polynomial {poly:#x} is not primitive "
                                 f"(cycle length {i})")
            exp[i] = x
            log[x] = i
            x <<= 1
            if x & q:
                x ^= poly
        if x != 1:
            raise ValueError(f"polynomial {poly:#x} is not primitive")
        exp[q - 1:] = exp[:q - 1]
        object.__setattr__(self, "exp", tuple(exp))
        object.__setattr__(self, "log", tuple(log))
        object.__setattr__(self, "exp_np", np.array(exp, dtype=np.int64))
        object.__setattr__(self, "log_np", np.array(log, dtype=np.int64))

    @property
    def order(self) -> int:
        """Number of field elements, 2^t."""
        return 1 << self.t

    @property
    def group_order(self) -> int:
        return (1 << self.t) - 1

    def element(self, value: int) -> FieldElement:
        if not 0 <= value < self.order:
            raise ValueError(f"{value} is not an element of GF(2^{self.t})")
        return value

    @staticmethod
    def add(a: FieldElement, b: FieldElement) -> FieldElement:
        return a ^ b

    def mul(self, a: FieldElement, b: FieldElement) -> FieldElement:
        if a == 0 or b == 0:
            return 0
        return self.exp[self.log[a] + self.log[b]]

    def inv(self, a: FieldElement) -> FieldElement:
        if a == 0:
            raise ZeroDivisionError("zero has no multiplicative inverse")
        return self.exp[self.group_order - self.log[a]]

    def div(self, a: FieldElement, b: FieldElement) -> FieldElement:
        if b == 0:
            raise ZeroDivisionError("division by zero in GF(2^t)")
        if a == 0:
            return 0
        return self.exp[self.log[a] - self.log[b] + self.group_order]

    def pow(self, a: FieldElement, k: int) -> FieldElement:
        if a == 0:
            if k < 0:
                raise ZeroDivisionError("zero has no multiplicative inverse")
            return 1 if k == 0 else 0
        return self.exp[(self.log[a] * k) % self.group_order]

    def alpha_pow(self, k: int) -> FieldElement:
        """The primitive element raised to ``k`` (any integer)."""
        return self.exp[k % self.group_order]

    # -- vectorised helpers (numpy int arrays) --------------------------------

    def mul_np(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self.exp_np[(self.log_np[a] + self.log_np[b]) % self.group_order]
        return np.where((a == 0) | (b == 0), 0, out)


# -- polynomials (lowest degree first) -----------------------------------------

def poly_trim(p: Sequence[int]) -> Poly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_add(p: Sequence[int], q: Sequence[int]) -> Poly:
    if len(p) < len(q):
        p, q = q, p
    out = list(p)
    for i, c in enumerate(q):
        out[i] ^= c
    return poly_trim(out)


def poly_scale(gf: FieldSpec, p: Sequence[int], c: int) -> Poly:
    return poly_trim(gf.mul(x, c) for x in p)


def poly_mul(gf: FieldSpec, p: Sequence[int], q: Sequence[int]) -> Poly:
    if not p or not q:
        return []
    exp, log = gf.exp, gf.log
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        la = log[a]
        for j, b in enumerate(q):
            if b:
                out[i + j] ^= exp[la + log[b]]
    return poly_trim(out)


def poly_divmod(gf: FieldSpec, num: Sequence[int], den: Sequence[int]) -> tuple[Poly, Poly]:
    den = poly_trim(den)
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    rem = poly_trim(num)
    if len(rem) < len(den):
        return [], rem
    lead_inv = gf.inv(den[-1])
    quot = [0] * (len(rem) - len(den) + 1)
    for shift in range(len(rem) - len(den), -1, -1):
        c = rem[shift + len(den) - 1]
        if c == 0:
            continue
        c = gf.mul(c, lead_inv)
        quot[shift] = c
        for i, d in enumerate(den):
            rem[shift + i] ^= gf.mul(c, d)
    return poly_trim(quot), poly_trim(rem[:len(den) - 1])


def poly_eval(gf: FieldSpec, p: Sequence[int], x: int) -> FieldElement:
    """Horner evaluation of ``p`` at ``x``."""
    acc = 0
    if x == 0:
        return p[0] if len(p) else 0
    exp, log = gf.exp, gf.log
    lx = log[x]
    for c in reversed(p):
        acc = (exp[log[acc] + lx] if acc else 0) ^ c
    return acc


def poly_deriv(p: Sequence[int]) -> Poly:
    """Formal derivative; in characteristic 2 only odd-degree terms survive."""
    return poly_trim(c if i % 2 == 1 else 0 for i, c in enumerate(p[1:], start=1))
