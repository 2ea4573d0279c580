# coding=utf-8
# Copyright 2023 The iwasawa_k1 Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""
Command-line frontend. Every subcommand prints `KEY=VALUE` report lines (or a two-column TSV table) and exits with

- 0 when every checked condition passes,
- 1 when a verdict fails,
- 2 on usage errors and unreadable or invalid inputs,
- 3 when an integrality failure is hit inside a computation.

```
iwasawa-k1 special-type --group data/E1.grp
iwasawa-k1 check-phi --group data/E1.grp --tuple data/ones.tup
iwasawa-k1 dr-congruence --datum data/kummer5.zd --i 1 --k 2
```
"""

import argparse
import dataclasses
import sys
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import pandas as pd

from . import __version__
from .configuration_utils import get_config, load_config, set_config
from .errors import IntegralityFailure, IwasawaK1Error
from .exactnum import reduce_mod_pN
from .groupmodel import GroupModel, GroupSpec, build_group, is_special_type
from .groupring import parse_element, parse_trace
from .k1maps import LayerTuple, beta, tau, theta
from .logging import enable_explicit_format, get_logger, set_verbosity_from_count
from .logk1 import integral_log_L
from .phipsi import CheckReport, additive_theorem_verify, check_phi, check_psi, diagram_verify
from .zeta import (
    LocallyConstantFn,
    ZetaDatum,
    bernoulli,
    dedekind_zeta_layer,
    delta_value,
    dr_congruence_check,
    kummer_value,
    partial_zeta_vector,
    ver_congruence_check,
    zeta_approx,
)


logger = get_logger(__name__)

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INTEGRALITY = 0, 1, 2, 3


class UsageError(IwasawaK1Error, ValueError):
    """A subcommand was called without one of the inputs it needs."""


@dataclass
class CommandResult:
    """Exit code plus the ordered `(key, value)` report lines of one invocation."""

    exit_code: int = EXIT_PASS
    lines: List[str] = field(default_factory=list)
    message: Optional[str] = None
    report_format: str = "text"

    @classmethod
    def from_report(cls, report: CheckReport) -> "CommandResult":
        return cls(EXIT_PASS if report.passed else EXIT_FAIL, report.to_lines())

    def add(self, key: str, value) -> "CommandResult":
        self.lines.append(f"{key}={value}")
        return self

    def to_frame(self) -> pd.DataFrame:
        rows = [line.partition("=")[::2] for line in self.lines]
        return pd.DataFrame(rows, columns=["key", "value"])

    def render(self) -> str:
        if not self.lines:
            return ""
        if self.report_format == "tsv":
            return self.to_frame().to_csv(sep="\t", index=False)
        return "\n".join(self.lines) + "\n"


# inputs


def _model(args) -> GroupModel:
    if not args.group:
        raise UsageError(f"{args.command} needs --group FILE")
    spec = GroupSpec.from_file(args.group)
    changes = {}
    if args.level is not None:
        changes["level"] = args.level
    if args.precision is not None:
        changes["precision"] = args.precision
    return build_group(dataclasses.replace(spec, **changes) if changes else spec)


def _datum(args) -> ZetaDatum:
    if not args.datum:
        raise UsageError(f"{args.command} needs --datum FILE")
    datum = ZetaDatum.from_file(args.datum)
    if args.level is not None:
        datum = datum.with_level(args.level)
    return datum


def _element(args, group, precision: int):
    if args.element is None:
        raise UsageError(f"{args.command} needs --element TEXT")
    return parse_element(args.element, group, precision)


def _tuple(args, model: GroupModel) -> LayerTuple:
    if not args.tuple:
        raise UsageError(f"{args.command} needs --tuple FILE")
    return LayerTuple.from_file(args.tuple, model)


def _required(args, name: str) -> int:
    value = getattr(args, name)
    if value is None:
        raise UsageError(f"{args.command} needs --{name}")
    return value


def _layers(args, model: GroupModel) -> range:
    if args.i is None:
        return range(model.e + 1)
    if not 0 <= args.i <= model.e:
        raise UsageError(f"--i must lie in 0..{model.e}")
    return range(args.i, args.i + 1)


def _function(args, datum: ZetaDatum, i: int) -> LocallyConstantFn:
    group = datum.model.layer_group(i, i)
    if args.element is None:
        return LocallyConstantFn.constant(group)
    return LocallyConstantFn.parse(args.element, group)


# group-ring subcommands


def cmd_validate(args) -> CommandResult:
    result = CommandResult()
    if args.datum:
        datum = _datum(args)
        result.add("VALID", "true").add("P", datum.p).add("MODULUS", datum.modulus)
        result.add("F", datum.f).add("LEVEL", datum.level).add("PRECISION", datum.precision)
        return result.add("GROUP_ORDER", datum.model.order)
    model = _model(args)
    result.add("VALID", "true").add("P", model.p).add("E", model.e).add("LEVEL", model.level)
    result.add("PRECISION", model.precision).add("ORDER", model.order).add("CLASSES", len(model.classes))
    for i in range(model.e + 1):
        result.add(f"H_{i}", ",".join(str(d) for d in model.layer(i).orders) or "1")
    return result


def cmd_classes(args) -> CommandResult:
    model = _model(args)
    result = CommandResult().add("CLASSES", len(model.classes))
    for cls in model.classes:
        rep = model.format_monomial(cls.representative)
        result.add(f"CLASS[{cls.index}]", f"{rep} size={cls.size} stratum={cls.stratum}")
    return result


def cmd_special_type(args) -> CommandResult:
    verdict = is_special_type(_model(args))
    result = CommandResult().add("SPECIAL_TYPE", "true" if verdict else "false")
    if verdict.witness is not None:
        generator, layer = verdict.witness
        result.add("WITNESS", f"generator={generator} layer={layer}")
    return result


def cmd_theta(args) -> CommandResult:
    model = _model(args)
    x = _element(args, model, model.precision)
    result = CommandResult()
    for i in _layers(args, model):
        result.add(f"THETA[{i}]", theta(model, i, x).to_text())
    return result


def cmd_beta(args) -> CommandResult:
    model = _model(args)
    if args.element is None:
        raise UsageError("beta needs --element TEXT")
    t = parse_trace(args.element, model, model.precision)
    result = CommandResult()
    for i in _layers(args, model):
        result.add(f"BETA[{i}]", beta(model, i, t).to_text())
    return result


def cmd_tau(args) -> CommandResult:
    model = _model(args)
    return CommandResult().add("TAU", tau(model, _tuple(args, model)).to_text())


def cmd_intlog(args) -> CommandResult:
    model = _model(args)
    x = _element(args, model, model.precision)
    value = integral_log_L(x)
    return CommandResult().add("L", value.to_text()).add("PRECISION", value.precision)


def cmd_check_psi(args) -> CommandResult:
    model = _model(args)
    return CommandResult.from_report(check_psi(_tuple(args, model)))


def cmd_check_phi(args) -> CommandResult:
    model = _model(args)
    return CommandResult.from_report(check_phi(_tuple(args, model), use_special=args.special))


def cmd_additive_verify(args) -> CommandResult:
    return CommandResult.from_report(additive_theorem_verify(_model(args)))


def cmd_diagram_verify(args) -> CommandResult:
    model = _model(args)
    return CommandResult.from_report(diagram_verify(model, _element(args, model, model.precision)))


# zeta subcommands


def cmd_bernoulli(args) -> CommandResult:
    k = _required(args, "k")
    result = CommandResult().add(f"B_{k}", bernoulli(k))
    if args.datum:
        p = _datum(args).p
        if k % (p - 1):
            result.add("KUMMER", f"{kummer_value(p, k)} mod {p}")
    return result


def cmd_partial_zeta(args) -> CommandResult:
    datum, k = _datum(args), _required(args, "k")
    i = args.i or 0
    group = datum.model.layer_group(i, i)
    values = partial_zeta_vector(datum, i, k)
    result = CommandResult()
    if args.element is not None:
        _, x = group.parse_monomial(args.element)
        return result.add(f"ZETA[{group.format_monomial(x)}]", values[group.index_of(x)])
    for x, value in zip(group.elements, values):
        result.add(f"ZETA[{group.format_monomial(x)}]", value)
    return result.add("DEDEKIND", dedekind_zeta_layer(datum, i, k))


def cmd_delta(args) -> CommandResult:
    datum, k = _datum(args), _required(args, "k")
    i = args.i or 0
    value = delta_value(datum, i, _function(args, datum, i), k)
    result = CommandResult().add("DELTA", value)
    if value.denominator % datum.p:
        residue = reduce_mod_pN(value, datum.p, datum.precision).value
        result.add("DELTA_MOD", f"{residue} mod {datum.p}^{datum.precision}")
    return result


def cmd_zeta_approx(args) -> CommandResult:
    datum, k = _datum(args), _required(args, "k")
    z = zeta_approx(datum, args.i or 0, args.j, k)
    return CommandResult().add("APPROX", z.to_text()).add("PRECISION", z.precision)


def cmd_dr_congruence(args) -> CommandResult:
    datum, k, i = _datum(args), _required(args, "k"), _required(args, "i")
    check = dr_congruence_check(datum, i, args.j or 0, _function(args, datum, i), k)
    return CommandResult(EXIT_PASS if check else EXIT_FAIL, check.to_lines())


def cmd_ver_congruence(args) -> CommandResult:
    datum, k, i = _datum(args), _required(args, "k"), _required(args, "i")
    if args.j is not None:
        datum = datum.with_level(args.j)
    approximations = [zeta_approx(datum, n, None, k) for n in range(i + 1)]
    n = args.precision or datum.precision - 1
    holds = ver_congruence_check(approximations, i, args.precision)
    verdict = "PASS" if holds else "FAIL"
    return CommandResult(EXIT_PASS if holds else EXIT_FAIL, [f"VER_CONGRUENCE={verdict} mod {datum.p}^{n}"])


COMMANDS: Dict[str, Callable] = {
    "validate": cmd_validate,
    "classes": cmd_classes,
    "special-type": cmd_special_type,
    "theta": cmd_theta,
    "beta": cmd_beta,
    "tau": cmd_tau,
    "intlog": cmd_intlog,
    "check-psi": cmd_check_psi,
    "check-phi": cmd_check_phi,
    "additive-verify": cmd_additive_verify,
    "diagram-verify": cmd_diagram_verify,
    "bernoulli": cmd_bernoulli,
    "partial-zeta": cmd_partial_zeta,
    "delta": cmd_delta,
    "zeta-approx": cmd_zeta_approx,
    "dr-congruence": cmd_dr_congruence,
    "ver-congruence": cmd_ver_congruence,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iwasawa-k1", description="Finite-level K1 and zeta congruence checks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("command", choices=list(COMMANDS))
    parser.add_argument("--group", type=str, help="group spec file (.grp)")
    parser.add_argument("--datum", type=str, help="zeta datum file (.zd)")
    parser.add_argument("--tuple", type=str, help="layer tuple file (.tup)")
    parser.add_argument("--element", type=str, help="element, trace element or function in element notation")
    parser.add_argument("--i", type=int, help="layer index")
    parser.add_argument("--j", type=int, help="level for zeta-approx, inverse level for dr-congruence")
    parser.add_argument("--k", type=int, help="weight")
    parser.add_argument("--precision", type=int)
    parser.add_argument("--level", type=int)
    parser.add_argument("--special", action="store_true", help="check-phi: use the special-type conditions")
    parser.add_argument("--report", choices=["text", "tsv"], default=None)
    parser.add_argument("--config", type=str, help="YAML configuration merged over the defaults")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> CommandResult:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return CommandResult(EXIT_USAGE if err.code else EXIT_PASS)

    set_verbosity_from_count(args.verbose)
    if args.verbose > 1:
        enable_explicit_format()
    try:
        if args.config or args.overrides:
            set_config(load_config(args.config, args.overrides))
        result = COMMANDS[args.command](args)
    except IntegralityFailure as err:
        logger.error(f"{args.command}: {err}")
        return CommandResult(EXIT_INTEGRALITY, message=str(err))
    except (IwasawaK1Error, ValueError, OSError) as err:
        return CommandResult(EXIT_USAGE, message=f"{args.command}: {err}")
    result.report_format = args.report or get_config().report.format
    return result


def main(argv: Optional[Sequence[str]] = None) -> int:
    result = run(argv)
    if result.message:
        print(result.message, file=sys.stderr)
    sys.stdout.write(result.render())
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
