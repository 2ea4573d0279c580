import numpy as np
import pytest

from iwasawa_k1.errors import BadDenominator, InexactDivision, ModelMismatch, NotAUnit, ParseError
from iwasawa_k1.exactnum import precision_ledger
from iwasawa_k1.groupmodel import GroupElement
from iwasawa_k1.groupring import (
    FractionElement,
    RingElement,
    TraceElement,
    TraceIdealKind,
    crossed_product_mul,
    fraction_arith,
    gamma_conjugate,
    is_central_denominator,
    orbit_sum,
    parse_element,
    parse_trace,
    project_level,
    ring_arith,
    to_trace,
    trace_ideal_membership,
)
from iwasawa_k1.random_utils import random_radical, random_ring_element, random_unit


def test_parse_element(e1):
    x = parse_element("2*h^1@g^0 - h^2@g^1 + 10", e1, 2)
    assert x.coefficient(GroupElement((1,), 0)) == 2
    assert x.coefficient(GroupElement((2,), 1)) == 8
    assert x.coefficient(e1.identity) == 1
    assert x.augmentation() == (2 - 1 + 10) % 9
    assert parse_element("0", e1, 2).is_zero()
    assert parse_element(x.to_text(), e1, 2) == x
    with pytest.raises(ParseError):
        parse_element("", e1, 2)
    with pytest.raises(ParseError):
        parse_element("2*k@g^0", e1, 2)


def test_ring_axioms_on_random_elements(e1, rng):
    x, y, z = (random_ring_element(e1, 3, rng) for _ in range(3))
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * RingElement.one(e1, 3) == x
    assert x - x == RingElement.zero(e1, 3)
    assert (x * 3).augmentation() == x.augmentation() * 3 % 27


def test_ring_arith(e2, rng):
    x, y = random_ring_element(e2, 3, rng), random_ring_element(e2, 3, rng)
    assert ring_arith(x, y, "add") == x + y
    assert ring_arith(x, y, "mul") == x * y
    assert ring_arith(x, None, "neg") + x == RingElement.zero(e2, 3)
    with pytest.raises(ValueError):
        ring_arith(x, y, "div")


def test_mixed_precision_is_truncated(e1, rng):
    x = random_ring_element(e1, 4, rng)
    y = random_ring_element(e1, 2, rng)
    with precision_ledger() as entries:
        total = x + y
    assert total.precision == 2
    assert entries[0].before == 4 and entries[0].after == 2


def test_elements_of_different_groups_do_not_mix(e1, e2):
    with pytest.raises(ModelMismatch):
        RingElement.one(e1, 2) + RingElement.one(e2, 2)


def test_invert(e1, e2, rng):
    for model in (e1, e2):
        x = random_unit(model, 3, rng)
        one = RingElement.one(model, 3)
        assert x * x.inverse() == one
        assert x.inverse() * x == one
        assert x.inverse().inverse() == x
        assert x**-2 * x**2 == one
    with pytest.raises(NotAUnit):
        random_radical(e1, 3, rng).inverse()


def test_crossed_product_agrees_with_group_ring(e1, e2, rng):
    for model in (e1, e2):
        x, y = random_ring_element(model, 3, rng), random_ring_element(model, 3, rng)
        assert crossed_product_mul(x, y) == x * y


def test_trace_kills_commutators(e1, rng):
    x, y = random_ring_element(e1, 3, rng), random_ring_element(e1, 3, rng)
    assert to_trace(x * y) == to_trace(y * x)
    g, h = e1.elements[5], e1.elements[40]
    assert to_trace(RingElement.basis(e1, e1.conjugate(g, h), 3)) == to_trace(RingElement.basis(e1, h, 3))


def test_trace_text(e1):
    t = parse_trace("[h^4@g^0] + 2*[h^1@g^0]", e1, 3)
    # h and h^4 are conjugate
    assert t.coefficient(GroupElement((7,), 0)) == 3
    assert parse_trace(t.to_text(), e1, 3) == t
    assert TraceElement.zero(e1, 3).to_text() == "0"


def test_trace_representatives(e1, rng):
    x = random_ring_element(e1, 3, rng)
    t = to_trace(x)
    assert to_trace(t.representatives()) == t


def test_divide_by_p_power(e1, rng):
    x = random_ring_element(e1, 4, rng)
    assert (x * 9).divide_by_p_power(2) == x.truncate(2)
    with pytest.raises(InexactDivision):
        (x * 9 + 1).divide_by_p_power(1)
    with pytest.raises(InexactDivision):
        (x * 9).divide_by_p_power(4)


def test_project_level(e1, rng):
    lower = e1.with_level(1)
    x, y = random_ring_element(e1, 3, rng), random_ring_element(e1, 3, rng)
    assert project_level(x * y, lower) == project_level(x, lower) * project_level(y, lower)
    assert project_level(x, lower).augmentation() == x.augmentation()


def test_abelian_trace_ideal_is_p_power_multiple(abelian9, rng):
    # for a trivial action T_i = p^i Λ
    group = abelian9.layer_group(1, 1)
    x = random_ring_element(group, 3, rng)
    result = trace_ideal_membership(x * 3, 1, TraceIdealKind.T)
    assert result
    assert orbit_sum(result.witness, 1) == x * 3
    assert not trace_ideal_membership(RingElement.one(group, 3), 1, TraceIdealKind.T)


def test_trace_ideal_witnesses(e1, rng):
    group = e1.layer_group(1, 1)
    w = random_ring_element(group, 3, rng)
    x = orbit_sum(w, 1)
    result = trace_ideal_membership(x, 1, "T")
    assert result
    assert orbit_sum(result.witness, 1) == x

    u = random_ring_element(group, 3, rng)
    y = orbit_sum(w, 1, TraceIdealKind.D) + u * 3
    found = trace_ideal_membership(y, 1, TraceIdealKind.D_PLUS_P)
    assert found
    w2, u2 = found.witness
    assert orbit_sum(w2, 1, TraceIdealKind.D) + u2 * 3 == y

    assert trace_ideal_membership(x * 3, 1, TraceIdealKind.P_T)


def test_trace_ideal_needs_a_layer_ring(e1):
    with pytest.raises(ModelMismatch):
        trace_ideal_membership(RingElement.one(e1, 2), 1)


def test_gamma_conjugate_on_layer(e1):
    group = e1.layer_group(1, 1)
    x = RingElement.basis(group, GroupElement((1,), 3), 2)
    assert gamma_conjugate(x) == RingElement.basis(group, GroupElement((4,), 3), 2)
    assert gamma_conjugate(x, 3) == x


def test_fractions_with_central_denominators(e1, rng):
    t = parse_element("1 + 1@g^3", e1, 3)
    assert is_central_denominator(t)
    assert not is_central_denominator(parse_element("1 + h^1@g^0", e1, 3))
    assert is_central_denominator(parse_element("3 + 1@g^3", e1, 3))
    assert not is_central_denominator(parse_element("3 + 3@g^3", e1, 3))
    x, y = random_ring_element(e1, 3, rng), random_ring_element(e1, 3, rng)
    a = FractionElement(x * t, t)
    assert a == FractionElement.integral(x)
    b = FractionElement(y, t)
    assert (a + b) - b == a
    assert a * b == FractionElement(x * y, t)
    with pytest.raises(BadDenominator):
        FractionElement(x, parse_element("1 + h^1@g^0", e1, 3))


def test_fraction_arith_operations(e1, rng):
    t = parse_element("1 + 1@g^3", e1, 3)
    s = t * t
    x, y = random_ring_element(e1, 3, rng), random_ring_element(e1, 3, rng)
    one = RingElement.one(e1, 3)
    a, b = FractionElement(x * t, t), FractionElement(y, s)
    assert fraction_arith(a, FractionElement.integral(y), "+") == FractionElement.integral(x + y)
    assert fraction_arith(a, a, "-") == FractionElement.integral(RingElement.zero(e1, 3))
    assert fraction_arith(FractionElement(x, t), FractionElement(y * t, t), "*") == FractionElement(x * y, t)
    assert fraction_arith(b, FractionElement(y * t, s * t), "eq")
    assert not fraction_arith(FractionElement(x, t), FractionElement(x + one, t), "eq")
    with pytest.raises(ValueError):
        fraction_arith(a, b, "/")


def test_pushforward_indices_sums_fibres(e1):
    target = e1.layer_group(0, 0)
    x = RingElement(e1, np.ones(e1.order, dtype=object), 2)
    image = x.pushforward(target, lambda g: e1.abelianize(0, g))
    assert image.augmentation() == e1.order % 9
    assert image.coefficient(target.identity) == 3
