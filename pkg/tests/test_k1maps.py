import pytest

from iwasawa_k1.errors import ModelMismatch, NotAUnit, NotInPsi, ParseError, PrecisionExhausted
from iwasawa_k1.groupmodel import GroupElement
from iwasawa_k1.groupring import RingElement, TraceElement
from iwasawa_k1.k1maps import (
    CharacterOmega,
    LayerTuple,
    beta,
    beta_phi_defect,
    beta_tuple,
    distinct_theta_images,
    omega_twist_product,
    omega_twist_sum,
    pi_map,
    project_trace,
    project_tuple,
    special_beta_phi,
    tau,
    theta,
    theta_tuple,
    tr_map,
    ver_ring,
)
from iwasawa_k1.random_utils import random_radical, random_trace_element, random_unit


@pytest.mark.parametrize("name", ["e1", "e2"])
def test_theta_is_multiplicative(name, request, rng):
    model = request.getfixturevalue(name)
    x, y = random_unit(model, 3, rng), random_unit(model, 3, rng)
    for i in range(model.e + 1):
        assert theta(model, i, x * y) == theta(model, i, x) * theta(model, i, y)


def test_theta_zero_is_abelianization(e1):
    target = e1.layer_group(0, 0)
    for g in e1.elements[::11]:
        x = RingElement.basis(e1, g, 3)
        assert theta(e1, 0, x) == RingElement.basis(target, e1.abelianize(0, g), 3)


def test_theta_of_h_matches_tuple_file(e1, data_file):
    h = RingElement.basis(e1, GroupElement((1,), 0), e1.precision)
    expected = LayerTuple.from_file(data_file("E1_theta_h.tup"), e1)
    assert theta_tuple(e1, h).entries == expected.entries


def test_theta_needs_a_unit(e1, rng):
    with pytest.raises(NotAUnit):
        theta(e1, 1, random_radical(e1, 3, rng))
    with pytest.raises(ModelMismatch):
        theta(e1, 0, RingElement.one(e1.layer_group(0, 0), 3))


def test_tau_inverts_beta(e1, e2, rng):
    for model in (e1, e2):
        t = random_trace_element(model, 4, rng)
        tup = beta_tuple(model, t)
        recovered = tau(model, tup)
        assert recovered.precision == 4 - model.e
        assert recovered == t.truncate(4 - model.e)


def test_tau_rejects_tuples_outside_psi(e1):
    groups = [e1.layer_group(i, i) for i in range(2)]
    tup = LayerTuple(e1, [RingElement.one(groups[0], 3), RingElement.zero(groups[1], 3)])
    with pytest.raises(NotInPsi):
        tau(e1, tup)
    with pytest.raises(PrecisionExhausted):
        tau(e1, LayerTuple.filled(e1, "additive", precision=1))


def test_beta_of_conjugacy_classes(e1):
    t = TraceElement.from_classes(e1, {e1.class_index[e1.index_of(GroupElement((1,), 0))]: 1}, 3)
    top = beta(e1, 1, t)
    group = e1.layer_group(1, 1)
    # the γ-orbit of h in H_1 = Z/9 is h, h^4, h^7
    for k in (1, 4, 7):
        assert top.coefficient(GroupElement((k,), 0)) == 1
    assert top.augmentation() == 3
    assert beta(e1, 0, t) == RingElement.basis(e1.layer_group(0, 0), GroupElement((1,), 0), 3)
    # classes off Γ^(1) vanish on layer 1
    moving = TraceElement.from_classes(e1, {e1.class_index[e1.index_of(GroupElement((0,), 1))]: 1}, 3)
    assert beta(e1, 1, moving) == RingElement.zero(group, 3)


@pytest.mark.parametrize("name", ["e1", "e2"])
def test_beta_frobenius_defect(name, request, rng):
    model = request.getfixturevalue(name)
    t = random_trace_element(model, 3, rng)
    lhs, rhs = beta_phi_defect(model, 1, t)
    assert lhs == rhs


def test_beta_frobenius_on_special_type(e1, rng):
    t = random_trace_element(e1, 3, rng)
    lhs, rhs = special_beta_phi(e1, 1, t)
    assert lhs == rhs


def test_trace_and_projection_maps(e1):
    source = e1.layer_group(0, 0)
    target = e1.layer_group(0, 1)
    x = RingElement.basis(source, GroupElement((1,), 3), 3)
    assert tr_map(e1, 0, 1, x) == RingElement.basis(target, GroupElement((1,), 3), 3, coefficient=3)
    assert tr_map(e1, 0, 1, RingElement.basis(source, GroupElement((1,), 1), 3)).is_zero()

    top = RingElement.basis(e1.layer_group(1, 1), GroupElement((4,), 3), 3)
    assert pi_map(e1, 1, 0, top) == RingElement.basis(target, GroupElement((1,), 3), 3)


def test_ver_ring(e1, rng):
    lower = e1.layer_group(0, 0)
    gamma = RingElement.basis(lower, GroupElement((0,), 1), 3)
    assert ver_ring(e1, 1, gamma) == RingElement.basis(e1.layer_group(1, 1), GroupElement((0,), 3), 3)
    x, y = random_unit(lower, 3, rng), random_unit(lower, 3, rng)
    assert ver_ring(e1, 1, x * y) == ver_ring(e1, 1, x) * ver_ring(e1, 1, y)


def test_omega_twists(e1):
    group = e1.layer_group(0, 0)
    omega = CharacterOmega(1, 3)
    assert omega.exponent(GroupElement((0,), 2)) == 2
    with pytest.raises(ValueError):
        CharacterOmega(1, 3, generator_power=3)
    for g in group.elements[::4]:
        x = RingElement.basis(group, g, 3)
        # ζ^0 ζ^t ζ^2t = 1 for p = 3, so the twisted product of g is g^3
        assert omega_twist_product(e1, 1, x) == RingElement.basis(group, group.power(g, 3), 3)
    assert omega_twist_product(e1, 1, RingElement.one(group, 3)) == RingElement.one(group, 3)

    mixed = RingElement.basis(group, GroupElement((1,), 3), 3) + RingElement.basis(group, GroupElement((1,), 1), 3)
    assert omega_twist_sum(e1, 1, mixed) == RingElement.basis(group, GroupElement((1,), 3), 3, coefficient=3)


def test_layer_tuple_files(e1, data_file):
    ones = LayerTuple.from_file(data_file("ones.tup"), e1)
    assert ones.flavor == "multiplicative"
    assert ones.precision == e1.precision
    assert ones.entries == LayerTuple.filled(e1, "multiplicative").entries

    tup = LayerTuple.from_file(data_file("E1_theta_h.tup"), e1)
    assert LayerTuple.parse(tup.to_text(), e1).entries == tup.entries


def test_layer_tuple_save(e1, data_file, tmp_path):
    tup = LayerTuple.from_file(data_file("E1_bad.tup"), e1)
    path = tmp_path / "bad.tup"
    tup.save(path)
    assert LayerTuple.from_file(path, e1).entries == tup.entries


@pytest.mark.parametrize(
    "text",
    [
        "flavor=multiplicative\nlayer 2: 1\n",
        "flavor=weird\n",
        "layer 0: 1\nlayer 0: 1\n",
        "layerx: 1\n",
        "precision=three\n",
        "something else\n",
    ],
)
def test_layer_tuple_parse_errors(e1, text):
    with pytest.raises(ParseError):
        LayerTuple.parse(text, e1)


def test_layer_tuple_validation(e1):
    with pytest.raises(ValueError):
        LayerTuple(e1, [RingElement.one(e1.layer_group(0, 0), 3)], "multiplicative")
    with pytest.raises(ModelMismatch):
        LayerTuple(e1, [RingElement.one(e1.layer_group(1, 1), 3)] * 2, "multiplicative")
    with pytest.raises(ValueError):
        LayerTuple(e1, LayerTuple.filled(e1, "additive").entries, "neither")


def test_level_projection_commutes_with_beta(e1, rng):
    lower = e1.with_level(1)
    t = random_trace_element(e1, 3, rng)
    projected = project_tuple(beta_tuple(e1, t), lower)
    assert projected.entries == beta_tuple(lower, project_trace(t, lower)).entries


def test_distinct_theta_images(e1):
    assert distinct_theta_images(e1, e1.elements[:27])
