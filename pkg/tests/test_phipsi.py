import pytest

from iwasawa_k1.configuration_utils import load_config, set_config
from iwasawa_k1.errors import NotAUnit, NotInPhi, TooLarge
from iwasawa_k1.groupring import FractionElement, RingElement, parse_element
from iwasawa_k1.k1maps import LayerTuple, beta_tuple, theta, theta_tuple
from iwasawa_k1.logk1 import integral_log_L
from iwasawa_k1.phipsi import (
    CheckReport,
    L_phi_to_psi,
    additive_theorem_verify,
    central_theta,
    check_phi,
    check_psi,
    diagram_verify,
    theta_tuple_and_check,
)
from iwasawa_k1.random_utils import random_trace_element, random_unit


def test_check_report_rendering():
    report = CheckReport()
    report.record("A", True)
    report.record("B", False, "witness text")
    report.details["PRECISION"] = "3"
    assert not report.passed
    assert report.first_failure == "B"
    assert report.to_lines() == ["A=PASS", "B=FAIL", "B.witness=witness text", "PRECISION=3"]
    frame = report.to_frame()
    assert list(frame.columns) == ["key", "value"]
    assert frame["value"].tolist() == ["PASS", "FAIL", "witness text", "3"]


def test_unit_tuple_is_in_phi(e1, data_file):
    report = check_phi(LayerTuple.from_file(data_file("ones.tup"), e1))
    assert report.passed
    assert list(report.verdicts) == ["M1[0,1]", "M2[0]", "M2[1]", "M3[1]", "M4[1]"]
    assert report.details["LEVEL"] == "2"


def test_tuple_with_a_moving_entry_is_not_in_phi(e1, data_file):
    report = check_phi(LayerTuple.from_file(data_file("E1_bad.tup"), e1))
    assert not report.passed
    assert report.verdicts["M2[0]"]
    assert not report.verdicts["M2[1]"]
    assert "M2[1]" in report.witnesses


def test_theta_tuple_file_is_in_phi(e1, data_file):
    tup = LayerTuple.from_file(data_file("E1_theta_h.tup"), e1)
    assert check_phi(tup)
    assert check_phi(tup, use_special=True)


@pytest.mark.parametrize("name", ["e1", "e2"])
def test_theta_images_are_in_phi(name, request, rng):
    model = request.getfixturevalue(name)
    tup, report = theta_tuple_and_check(model, random_unit(model, 3, rng))
    assert report.passed, report.first_failure
    assert tup.flavor == "multiplicative"


def test_special_conditions_on_special_type(e1, rng):
    tup = theta_tuple(e1, random_unit(e1, 3, rng))
    report = check_phi(tup, use_special=True)
    assert report.passed
    assert list(report.verdicts) == ["MS1[0,1]", "MS2[0]", "MS2[1]", "MS3[1]"]


def test_check_phi_argument_errors(e1, e2):
    with pytest.raises(ValueError):
        check_phi(LayerTuple.filled(e1, "additive"))
    with pytest.raises(ValueError):
        check_phi(LayerTuple.filled(e2, "multiplicative"), use_special=True)
    zero_first = LayerTuple(
        e1, [RingElement.zero(e1.layer_group(0, 0), 3), RingElement.one(e1.layer_group(1, 1), 3)], "multiplicative"
    )
    with pytest.raises(NotAUnit):
        check_phi(zero_first)


def test_norm_condition_witness_only_on_failure(e1, data_file):
    assert check_phi(LayerTuple.from_file(data_file("ones.tup"), e1)).witnesses == {}
    one = RingElement.one(e1.layer_group(0, 0), 3)
    two = RingElement.one(e1.layer_group(1, 1), 3) * 2
    report = check_phi(LayerTuple(e1, [one, two], "multiplicative"))
    assert not report.verdicts["M1[0,1]"]
    assert report.witnesses["M1[0,1]"]


def test_beta_images_are_in_psi(e1, e2, rng):
    for model in (e1, e2):
        assert check_psi(beta_tuple(model, random_trace_element(model, 3, rng))).passed


def test_psi_rejects_incompatible_layers(e1):
    tup = LayerTuple(e1, [RingElement.one(e1.layer_group(0, 0), 3), RingElement.zero(e1.layer_group(1, 1), 3)])
    report = check_psi(tup)
    assert not report.verdicts["A1[0,1]"]
    assert report.verdicts["A2[1]"]


def test_fractions_with_central_denominators(e1, rng):
    t = parse_element("1 + 1@g^3", e1, 3)
    for i in range(e1.e + 1):
        assert central_theta(e1, i, t) == theta(e1, i, t)
    fraction = FractionElement(random_unit(e1, 3, rng), t)
    _, report = theta_tuple_and_check(e1, fraction)
    assert report.passed
    _, general = theta_tuple_and_check(e1, fraction, use_special=False)
    assert general.passed


@pytest.mark.parametrize("name", ["e1", "abelian9"])
def test_additive_theorem(name, request):
    model = request.getfixturevalue(name)
    report = additive_theorem_verify(model, 2)
    assert report.passed, report.first_failure
    assert report.details["RANK_BETA"] == report.details["RANK_PSI"]
    assert report.details["CLASSES"] == str(len(model.classes))


@pytest.mark.parametrize("name", ["e1", "e2"])
def test_additive_theorem_at_precision_one(name, request):
    # modulo p the tr-constraints between layers vanish, so Ψ has to be cut out over ℤ_p before reducing
    model = request.getfixturevalue(name).with_level(1).with_precision(1)
    report = additive_theorem_verify(model, 1)
    assert report.passed, report.first_failure
    assert report.details["RANK_BETA"] == report.details["RANK_PSI"] == str(len(model.classes))
    assert report.details["LENGTH_BETA"] == report.details["LENGTH_PSI"]
    assert report.details["PRECISION"] == "1"


def test_additive_theorem_ranks_on_e1_level_one(e1):
    report = additive_theorem_verify(e1.with_level(1), 1)
    assert report.passed
    assert report.details["CLASSES"] == "11"
    assert report.details["RANK_BETA"] == "11"
    assert report.details["RANK_PSI"] == "11"


def test_additive_theorem_without_constraints(trivial):
    report = additive_theorem_verify(trivial)
    assert report.passed
    assert report.details["RANK_BETA"] == str(trivial.order)


def test_additive_theorem_size_limit(e1):
    set_config(load_config(overrides=["linalg.max_dense_size=50"]))
    with pytest.raises(TooLarge):
        additive_theorem_verify(e1)


def test_L_on_theta_tuples(e1, rng):
    x = random_unit(e1, 3, rng)
    image = L_phi_to_psi(theta_tuple(e1, x))
    assert image.flavor == "additive"
    assert image.precision == 2
    assert check_psi(image)
    assert image.entries == beta_tuple(e1, integral_log_L(x)).entries


def test_L_rejects_tuples_outside_phi(e1, data_file):
    with pytest.raises(NotInPhi):
        L_phi_to_psi(LayerTuple.from_file(data_file("E1_bad.tup"), e1))


@pytest.mark.parametrize("name", ["e1", "abelian9"])
def test_diagram_commutes(name, request, rng):
    model = request.getfixturevalue(name)
    report = diagram_verify(model, random_unit(model, 3, rng))
    assert report.passed, report.first_failure
    assert "THETA_IN_PHI" in report.verdicts
    assert all(f"DIAGRAM[{i}]" in report.verdicts for i in range(model.e + 1))
