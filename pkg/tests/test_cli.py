import pytest

from iwasawa_k1.cli import EXIT_FAIL, EXIT_PASS, EXIT_USAGE, main, run


@pytest.fixture
def group_args(data_file):
    return lambda name: ["--group", str(data_file(name))]


def test_special_type(group_args):
    result = run(["special-type", *group_args("E1.grp")])
    assert result.exit_code == EXIT_PASS
    assert result.lines == ["SPECIAL_TYPE=true"]

    result = run(["special-type", *group_args("E2.grp")])
    assert result.exit_code == EXIT_PASS
    assert result.lines == ["SPECIAL_TYPE=false", "WITNESS=generator=3 layer=0"]


def test_validate(group_args):
    result = run(["validate", *group_args("E1.grp")])
    assert result.exit_code == EXIT_PASS
    for line in ("VALID=true", "ORDER=81", "CLASSES=33", "H_0=3", "H_1=9"):
        assert line in result.lines
    assert "CLASSES=11" in run(["validate", *group_args("E1.grp"), "--level", "1"]).lines


def test_validate_datum(data_file):
    result = run(["validate", "--datum", str(data_file("cubic7.zd"))])
    assert "MODULUS=189" in result.lines
    assert "GROUP_ORDER=27" in result.lines


def test_check_phi(group_args, data_file):
    ones = run(["check-phi", *group_args("E1.grp"), "--tuple", str(data_file("ones.tup"))])
    assert ones.exit_code == EXIT_PASS
    assert "M4[1]=PASS" in ones.lines

    bad = run(["check-phi", *group_args("E1.grp"), "--tuple", str(data_file("E1_bad.tup"))])
    assert bad.exit_code == EXIT_FAIL
    assert "M2[1]=FAIL" in bad.lines

    special = run(["check-phi", *group_args("E1.grp"), "--tuple", str(data_file("E1_theta_h.tup")), "--special"])
    assert special.exit_code == EXIT_PASS
    assert "MS3[1]=PASS" in special.lines


def test_theta_and_intlog(group_args):
    result = run(["theta", *group_args("E1.grp"), "--element", "h^1@g^0"])
    assert result.exit_code == EXIT_PASS
    assert [line.split("=")[0] for line in result.lines] == ["THETA[0]", "THETA[1]"]
    assert run(["theta", *group_args("E1.grp"), "--element", "h^1@g^0", "--i", "1"]).lines[0].startswith("THETA[1]=")

    log = run(["intlog", *group_args("E1.grp"), "--element", "h^1@g^0"])
    assert log.lines == ["L=0", "PRECISION=3"]


def test_bernoulli_command(data_file):
    assert run(["bernoulli", "--k", "12"]).lines == ["B_12=-691/2730"]
    result = run(["bernoulli", "--k", "2", "--datum", str(data_file("kummer5.zd"))])
    assert result.lines == ["B_2=1/6", "KUMMER=3 mod 5"]


def test_dr_congruence(data_file):
    result = run(["dr-congruence", "--datum", str(data_file("kummer5.zd")), "--i", "1", "--k", "2"])
    assert result.exit_code == EXIT_PASS
    assert result.lines[0] == "CONGRUENCE=PASS mod 5^1"
    assert result.lines[1].startswith("LHS=")
    assert result.lines[2].startswith("RHS=")


def test_ver_congruence(data_file):
    result = run(["ver-congruence", "--datum", str(data_file("kummer5.zd")), "--i", "1", "--k", "4"])
    assert result.exit_code == EXIT_PASS
    assert result.lines == ["VER_CONGRUENCE=PASS mod 5^1"]


@pytest.mark.parametrize(
    "argv",
    [
        ["nonsense"],
        ["validate"],
        ["theta", "--group", "E1.grp"],
        ["dr-congruence", "--datum", "kummer5.zd", "--k", "2"],
        ["validate", "--group", "does/not/exist.grp"],
    ],
)
def test_usage_errors(argv, data_file):
    argv = [str(data_file(a)) if a.endswith((".grp", ".zd")) and "/" not in a else a for a in argv]
    result = run(argv)
    assert result.exit_code == EXIT_USAGE


def test_configured_size_limit_is_a_usage_error(group_args):
    result = run(["additive-verify", *group_args("E1.grp"), "--set", "linalg.max_dense_size=10"])
    assert result.exit_code == EXIT_USAGE
    assert "max_dense_size" in result.message


def test_help_exits_cleanly():
    assert run(["--help"]).exit_code == EXIT_PASS


def test_tsv_report(group_args):
    result = run(["validate", *group_args("E1.grp"), "--report", "tsv"])
    text = result.render()
    assert text.startswith("key\tvalue\n")
    assert "ORDER\t81\n" in text


def test_report_format_from_config_file(group_args, tmp_path):
    config = tmp_path / "report.yaml"
    config.write_text("report:\n  format: tsv\n")
    result = run(["special-type", *group_args("E1.grp"), "--config", str(config)])
    assert result.render() == "key\tvalue\nSPECIAL_TYPE\ttrue\n"


def test_main_prints_lines_and_messages(group_args, capsys):
    assert main(["special-type", *group_args("E1.grp")]) == EXIT_PASS
    assert capsys.readouterr().out == "SPECIAL_TYPE=true\n"
    assert main(["validate"]) == EXIT_USAGE
    assert "needs --group" in capsys.readouterr().err
