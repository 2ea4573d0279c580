import pytest

from iwasawa_k1.configuration_utils import load_config, set_config
from iwasawa_k1.errors import InexactDivision, NotAUnit, NotInIdeal, PrecisionExhausted
from iwasawa_k1.groupring import RingElement, TraceElement
from iwasawa_k1.logk1 import (
    TraceValueQ,
    exp_from_ideal,
    frobenius_integrality_check,
    integral_log_L,
    log_buffer,
    log_series,
    log_to_trace,
    norm_res_compat,
    radical_nilpotence_exponent,
    teichmuller_lift,
)
from iwasawa_k1.random_utils import random_p_radical, random_ring_element, random_unit


def test_radical_nilpotence_exponent(trivial, abelian9):
    # F_5[C_5] = F_5[t]/t^5 and F_3[C_9 × C_9] has Loewy length 8 + 8 + 1
    assert radical_nilpotence_exponent(trivial) == 5
    assert radical_nilpotence_exponent(abelian9) == 17


def test_log_buffer_follows_config(e1, abelian9):
    assert log_buffer(e1) == 3
    assert log_buffer(abelian9) == 2
    assert log_buffer(e1.layer_group(1, 1)) == 3
    set_config(load_config(overrides=["precision.log_buffer=5"]))
    assert log_buffer(e1) == 5
    set_config(load_config(overrides=["precision.log_buffer=0"]))
    with pytest.raises(ValueError):
        log_buffer(e1)


def test_trace_value_normalization(e1, rng):
    x = random_ring_element(e1, 3, rng)
    value = TraceValueQ(x * 3, 1)
    assert value.precision == 2
    assert value.is_integral()
    assert value.integral() == (x * 3).divide_by_p_power(1)
    with pytest.raises(InexactDivision):
        TraceValueQ(RingElement.one(e1, 3), 1).integral()
    with pytest.raises(PrecisionExhausted):
        value.agrees_with(value, 3)
    assert (value - value).numerator.is_zero()


def test_exp_and_log_are_inverse(abelian9, rng):
    z = random_p_radical(abelian9, 3, rng)
    x = exp_from_ideal(z)
    assert x.augmentation() % 3 == 1
    assert log_series(x).agrees_with(TraceValueQ(z))


def test_exp_and_log_reject_the_wrong_ideal(e1, rng):
    with pytest.raises(NotInIdeal):
        exp_from_ideal(RingElement.one(e1, 3))
    with pytest.raises(NotInIdeal):
        log_series(RingElement.one(e1, 3) * 2)
    with pytest.raises(PrecisionExhausted):
        log_series(random_unit(e1, 3, rng), 0)


def test_log_needs_the_digits_it_reports(e1, rng):
    x = random_unit(e1, 3, rng)
    x = x * pow(x.augmentation(), -1, 27)
    assert log_series(x, 2).agrees_with(log_series(x), 2)
    with pytest.raises(PrecisionExhausted):
        log_series(x, 4)
    with pytest.raises(PrecisionExhausted):
        log_to_trace(x, 4)


def test_teichmuller_lift():
    r = teichmuller_lift(2, 5, 3)
    assert r % 5 == 2
    assert pow(r, 4, 125) == 1
    with pytest.raises(NotAUnit):
        teichmuller_lift(10, 5, 3)


@pytest.mark.parametrize("name", ["e1", "abelian9"])
def test_integral_log_vanishes_on_group_elements(name, request):
    model = request.getfixturevalue(name)
    for g in model.elements[::13]:
        value = integral_log_L(RingElement.basis(model, g, 3))
        assert value.precision == 2
        assert value.is_zero()
    # Teichmüller constants go to 0 as well
    assert integral_log_L(RingElement.one(model, 3) * teichmuller_lift(2, 3, 3)).is_zero()


@pytest.mark.parametrize("name", ["e1", "abelian9"])
def test_integral_log_is_a_homomorphism(name, request, rng):
    model = request.getfixturevalue(name)
    x, y = random_unit(model, 3, rng), random_unit(model, 3, rng)
    assert integral_log_L(x * y) == integral_log_L(x) + integral_log_L(y)


def test_integral_log_precision_and_units(e1, rng):
    x = random_unit(e1, 3, rng)
    assert isinstance(integral_log_L(x, 1), TraceElement)
    assert integral_log_L(x, 1).precision == 1
    with pytest.raises(PrecisionExhausted):
        integral_log_L(x, 3)
    with pytest.raises(NotAUnit):
        integral_log_L(random_p_radical(e1, 3, rng))


@pytest.mark.parametrize("n", [1, 2])
def test_frobenius_integrality(e1, rng, n):
    assert frobenius_integrality_check(random_unit(e1, 3, rng), n)
    assert frobenius_integrality_check(random_ring_element(e1, 3, rng), n)


def test_frobenius_integrality_range(e1, rng):
    with pytest.raises(ValueError):
        frobenius_integrality_check(random_unit(e1, 2, rng), 0)
    with pytest.raises(ValueError):
        frobenius_integrality_check(random_unit(e1, 2, rng), 3)


def test_norm_residue_compatibility_on_an_abelian_model(abelian9, rng):
    y = random_p_radical(abelian9, 3, rng)
    assert norm_res_compat(abelian9, 0, y)
