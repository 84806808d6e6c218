import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rspolar.gf import (DEFAULT_PRIMITIVE_POLYS, FieldSpec, poly_add, poly_deriv, poly_divmod,
                        poly_eval, poly_mul, poly_trim)


def clmul_mod(a, b, poly, t):
    """Carry-less multiply then reduce; independent of the log tables."""
    acc = 0
    for i in range(t):
        if (b >> i) & 1:
            acc ^= a << i
    for deg in range(2 * t - 2, t - 1, -1):
        if (acc >> deg) & 1:
            acc ^= poly << (deg - t)
    return acc


GF16 = FieldSpec(4)


@pytest.mark.parametrize("a,b,want", [(0x0, 0x7, 0x7), (0x5, 0x5, 0x0), (0x3, 0x5, 0x6)])
def test_add_examples(a, b, want):
    assert GF16.add(a, b) == want


@pytest.mark.parametrize("a,b,want", [(0x0, 0x9, 0x0), (0x1, 0x9, 0x9), (0x2, 0x9, 0x1)])
def test_mul_examples(a, b, want):
    assert GF16.mul(a, b) == want


def test_inverse_examples():
    assert GF16.inv(1) == 1
    assert GF16.inv(2) == 9
    with pytest.raises(ZeroDivisionError):
        GF16.inv(0)
    with pytest.raises(ZeroDivisionError):
        GF16.div(3, 0)


def test_poly_eval_examples():
    assert poly_eval(GF16, [7], 0xB) == 7
    assert poly_eval(GF16, [0, 1], 0xB) == 0xB
    assert poly_eval(GF16, [1, 1], 0x2) == 0x3


@pytest.mark.parametrize("t", range(2, 9))
def test_mul_matches_carryless_reference(t):
    gf = FieldSpec(t)
    q = gf.order
    for a in range(q):
        for b in range(q):
            assert gf.mul(a, b) == clmul_mod(a, b, gf.primitive_poly, t)


@pytest.mark.parametrize("t", range(2, 7))
def test_field_axioms_exhaustive(t):
    gf = FieldSpec(t)
    els = range(gf.order)
    for a, b in itertools.product(els, els):
        assert gf.mul(a, b) == gf.mul(b, a)
        assert gf.add(a, b) == gf.add(b, a)
    for a, b, c in itertools.product(els, els, els):
        assert gf.mul(gf.mul(a, b), c) == gf.mul(a, gf.mul(b, c))
        assert gf.mul(a, b ^ c) == gf.mul(a, b) ^ gf.mul(a, c)
    for a in els:
        assert gf.mul(a, 1) == a and gf.add(a, 0) == a
        if a:
            assert gf.mul(a, gf.inv(a)) == 1


@pytest.mark.parametrize("t", [7, 8])
def test_inverses_and_distributivity_larger_fields(t):
    gf = FieldSpec(t)
    rng = np.random.default_rng(t)
    for a in range(1, gf.order):
        assert gf.mul(a, gf.inv(a)) == 1
    for a, b, c in rng.integers(0, gf.order, size=(3000, 3)):
        a, b, c = int(a), int(b), int(c)
        assert gf.mul(a, b ^ c) == gf.mul(a, b) ^ gf.mul(a, c)
        assert gf.mul(gf.mul(a, b), c) == gf.mul(a, gf.mul(b, c))


@pytest.mark.parametrize("t", sorted(DEFAULT_PRIMITIVE_POLYS))
def test_primitive_element_has_full_order(t):
    gf = FieldSpec(t)
    seen = {gf.alpha_pow(i) for i in range(gf.group_order)}
    assert len(seen) == gf.group_order
    assert all(gf.exp[gf.log[x]] == x for x in range(1, gf.order))


def test_non_primitive_polynomial_rejected():
    # x^4 + x^3 + x^2 + x + 1 is irreducible but its root has order 5
    with pytest.raises(ValueError, match="not primitive"):
        FieldSpec(4, 0b11111)
    with pytest.raises(ValueError, match="degree"):
        FieldSpec(4, 0b1011)
    with pytest.raises(ValueError):
        FieldSpec(13)


def test_pow_and_vectorised_mul():
    gf = FieldSpec(5)
    a = np.arange(gf.order)
    b = np.roll(a, 3)
    want = [gf.mul(int(x), int(y)) for x, y in zip(a, b)]
    assert gf.mul_np(a, b).tolist() == want
    assert gf.pow(0, 0) == 1 and gf.pow(0, 3) == 0
    assert gf.pow(7, gf.group_order) == 1
    assert gf.pow(7, -1) == gf.inv(7)


polys = st.lists(st.integers(0, 15), max_size=6)


@settings(max_examples=200, deadline=None)
@given(p=polys, q=polys, x=st.integers(0, 15))
def test_eval_is_a_ring_homomorphism(p, q, x):
    assert poly_eval(GF16, poly_mul(GF16, p, q), x) == GF16.mul(poly_eval(GF16, p, x),
                                                                poly_eval(GF16, q, x))
    assert poly_eval(GF16, poly_add(p, q), x) == poly_eval(GF16, p, x) ^ poly_eval(GF16, q, x)


@settings(max_examples=200, deadline=None)
@given(p=polys, q=polys.filter(lambda v: any(v)))
def test_divmod_reconstructs(p, q):
    quot, rem = poly_divmod(GF16, p, q)
    assert len(rem) < len(poly_trim(q))
    assert poly_add(poly_mul(GF16, quot, q), rem) == poly_trim(p)


def test_derivative_characteristic_two():
    # d/dx (1 + 2x + 3x^2 + 4x^3) = 2 + 0x + 4x^2 in characteristic 2
    assert poly_deriv([1, 2, 3, 4]) == [2, 0, 4]
    assert poly_deriv([5]) == []
