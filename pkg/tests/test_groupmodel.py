import dataclasses

import numpy as np
import pytest

from iwasawa_k1.errors import InvalidAction, LevelTooSmall, ParseError
from iwasawa_k1.groupmodel import (
    GroupElement,
    GroupSpec,
    abelianization,
    build_group,
    conjugacy_classes,
    conjugacy_classes_by_orbits,
    is_special_type,
    transfer_ver,
)
from iwasawa_k1.random_utils import random_group_element


def test_parse_group_spec(data_file):
    spec = GroupSpec.from_file(data_file("E1.grp"))
    assert (spec.p, spec.e, spec.orders, spec.action, spec.level, spec.precision) == (3, 1, (9,), ((4,),), 2, 4)
    assert GroupSpec.parse(spec.to_text()) == spec


def test_group_spec_save_round_trip(tmp_path, data_file):
    spec = GroupSpec.from_file(data_file("E2.grp"))
    path = tmp_path / "copy.grp"
    spec.save(path)
    assert GroupSpec.from_file(path).to_text() == spec.to_text()


@pytest.mark.parametrize(
    "text",
    [
        "p=3\ne=1\norders=9\naction=4\nlevel=2\n",
        "p=3\ne=1\norders=9\naction=4\nlevel=2\nprecision=3\ncolour=blue\n",
        "p=3\ne=1\norders=9\naction=4,1\nlevel=2\nprecision=3\n",
        "p=3\ne=one\norders=9\naction=4\nlevel=2\nprecision=3\n",
        "p=3\np=3\ne=1\norders=9\naction=4\nlevel=2\nprecision=3\n",
    ],
)
def test_group_spec_parse_errors(text):
    with pytest.raises(ParseError):
        GroupSpec.parse(text)


def test_build_group_rejects_bad_actions(data_file):
    spec = GroupSpec.from_file(data_file("E1.grp"))
    # 2 has order 6 modulo 9
    with pytest.raises(InvalidAction):
        build_group(dataclasses.replace(spec, action=((2,),)))
    # 4^3 = 1 modulo 9 already
    with pytest.raises(InvalidAction):
        build_group(dataclasses.replace(spec, e=2))
    with pytest.raises(InvalidAction):
        build_group(dataclasses.replace(spec, orders=(6,)))
    with pytest.raises(LevelTooSmall):
        build_group(dataclasses.replace(spec, level=0))


def test_orders_and_layers(e1, e2):
    assert e1.order == 81
    assert abelianization(e1, 0).orders == (3,)
    assert abelianization(e1, 1).orders == (9,)
    assert e2.order == 27 * 9
    assert abelianization(e2, 0).orders == (3,)
    assert e2.layer(1).orders == (3, 3, 3)


def test_multiplication_table_matches_multiply(e1, e2):
    for model in (e1, e2):
        elements = model.elements
        table = model.mul_table
        for x in elements[::7]:
            for y in elements[::5]:
                assert elements[table[model.index_of(x), model.index_of(y)]] == model.multiply(x, y)
        identity = model.index_of(model.identity)
        assert (table[np.arange(model.order), model.inv_table] == identity).all()


def test_group_is_nonabelian_but_layers_are(e1):
    assert not e1.is_abelian
    for i in range(e1.e + 1):
        assert e1.layer_group(i, i).is_abelian


def test_conjugation_by_gamma(e1):
    h = GroupElement((1,), 0)
    gamma = GroupElement((0,), 1)
    assert e1.conjugate(gamma, h) == GroupElement((4,), 0)
    assert e1.power(gamma, 9) == e1.identity
    assert e1.power(h, -1) == GroupElement((8,), 0)


def test_class_counts(e1):
    assert len(e1.classes) == 33
    assert len(e1.with_level(1).classes) == 11
    assert sum(cls.size for cls in e1.classes) == e1.order


@pytest.mark.parametrize("name", ["e1", "e2", "abelian9"])
def test_classes_agree_with_orbit_closure(name, request):
    model = request.getfixturevalue(name)
    closure = set(conjugacy_classes_by_orbits(model))
    assert closure == {frozenset(cls.members) for cls in model.classes}


def test_classes_partition_the_group(e2):
    classes = conjugacy_classes(e2)
    assert classes == e2.classes
    members = sorted(k for cls in classes for k in cls.members)
    assert members == list(range(e2.order))
    assert all(e2.index_of(cls.representative) in cls.members for cls in classes)


def test_multiplication_on_random_elements(e1, e2, rng):
    for model in (e1, e2):
        x, y, z = (random_group_element(model, rng) for _ in range(3))
        assert model.multiply(model.multiply(x, y), z) == model.multiply(x, model.multiply(y, z))
        assert model.multiply(x, model.inverse(x)) == model.identity


def test_abelian_model_has_singleton_classes(abelian9):
    assert len(abelian9.classes) == abelian9.order
    assert all(cls.stratum == 0 for cls in abelian9.classes)


def test_monomials(e1, e2):
    assert e1.parse_monomial("2*h^1@g^3") == (2, GroupElement((1,), 3))
    assert e1.format_monomial(GroupElement((1,), 3), 2) == "2*h^1@g^3"
    assert e1.format_monomial(e1.identity) == "1@g^0"
    assert e1.parse_monomial("h^-1@g^-1") == (1, GroupElement((8,), 8))
    assert e2.parse_monomial("h2^2*h3@g") == (1, GroupElement((0, 2, 1), 1))
    assert e2.format_monomial(GroupElement((0, 2, 1), 1)) == "h2^2*h3^1@g^1"
    for bad in ("h@g^1", "x@g^0", "@g^2", "h1^2@q"):
        with pytest.raises(ParseError):
            e2.parse_monomial(bad)


def test_special_type(e1, e2, abelian9):
    assert is_special_type(e1)
    assert is_special_type(abelian9)
    result = is_special_type(e2)
    assert not result
    assert result.witness == (3, 0)


def test_transfer_on_the_gamma_part(e1):
    # γ generates Γ, so ver(γ) = γ^3
    assert transfer_ver(e1, 1, GroupElement((0,), 1)) == GroupElement((0,), 3)
    # h in H_0 = Z/3 goes to (1 + A + A^2) h = 21 h = 3 h in H_1 = Z/9
    assert transfer_ver(e1, 1, GroupElement((1,), 0)) == GroupElement((3,), 0)
    with pytest.raises(ValueError):
        transfer_ver(e1, 3, GroupElement((0,), 1))


def test_layer_projection_and_orbits(e1):
    layer = e1.layer(0)
    assert layer.project((4,)) == (1,)
    assert layer.project(layer.lift((2,))) == (2,)
    assert sorted(e1.layer(1).orbit((1,))) == [(1,), (4,), (7,)]
    assert e1.layer(1).orbit((3,)) == ((3,),)


def test_with_level_and_precision(e1):
    lower = e1.with_level(1)
    assert lower.order == 27
    assert e1.with_precision(2).precision == 2
    assert lower.spec.precision == e1.spec.precision
