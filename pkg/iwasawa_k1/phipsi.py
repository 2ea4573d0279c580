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
Membership checks for the additive set Ψ and the multiplicative set Φ of layer tuples.

Ψ is cut out by

* A1: `tr(x_j) = π(x_i)` for `j < i`,
* A2: `x_i ∈ T_i`,

and Φ by

* M1: `Nr(x_j) = π(x_i)` for `j < i`,
* M2: `x_i` is fixed by γ,
* M3: `x_i ≡ ver_i(x_(i-1))` modulo `D_i + (p)`,
* M4: `(x_i / ver_i(x_(i-1)))^p ver_i(Π_k ω̃_i^k(x_(i-1))) / φ(x_i) ≡ 1` modulo `p T_i`.

For models of special type M3 and M4 can be replaced by MS3: `x_i ≡ ver_i(x_(i-1))` modulo `T_i`.
"""

from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from .configuration_utils import get_config
from .errors import (
    BadDenominator,
    InexactDivision,
    IntegralityFailure,
    ModelMismatch,
    NotAUnit,
    NotInPhi,
    NotInPsi,
    PrecisionExhausted,
    TooLarge,
)
from .groupmodel import GroupModel, is_special_type
from .groupring import (
    FractionElement,
    RingElement,
    TraceElement,
    TraceIdealKind,
    gamma_conjugate,
    is_central_denominator,
    orbit_sum_matrix,
    trace_ideal_membership,
)
from .k1maps import (
    LayerTuple,
    beta,
    beta_tuple,
    norm_Nr,
    omega_twist_product,
    phi_ring,
    pi_map,
    tau,
    theta_tuple,
    tr_map,
    ver_ring,
)
from .linalg import HowellBasis, cyclic_summand_count, elementary_divisor_valuations
from .logging import get_logger, progress
from .logk1 import integral_log_L, layer_L_compat, log_series


logger = get_logger(__name__)


@dataclass
class CheckReport:
    """
    Ordered verdicts of a check, plus witnesses for failures and free-form details (ranks, levels).

    `to_lines()` renders one `KEY=PASS|FAIL` line per condition followed by the details as `KEY=VALUE`.
    """

    verdicts: "OrderedDict[str, bool]" = field(default_factory=OrderedDict)
    witnesses: Dict[str, str] = field(default_factory=dict)
    details: "OrderedDict[str, str]" = field(default_factory=OrderedDict)

    def record(self, key: str, ok: bool, witness: Optional[str] = None) -> bool:
        self.verdicts[key] = bool(ok)
        if not ok:
            logger.debug(f"{key} failed" + (f": {witness}" if witness else ""))
            if witness is not None:
                self.witnesses[key] = witness
        return bool(ok)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def __bool__(self):
        return self.passed

    @property
    def first_failure(self) -> Optional[str]:
        return next((k for k, ok in self.verdicts.items() if not ok), None)

    def to_lines(self) -> List[str]:
        lines = [f"{k}={'PASS' if ok else 'FAIL'}" for k, ok in self.verdicts.items()]
        lines += [f"{k}.witness={w}" for k, w in self.witnesses.items()]
        lines += [f"{k}={v}" for k, v in self.details.items()]
        return lines

    def to_frame(self) -> pd.DataFrame:
        rows = [(k, "PASS" if ok else "FAIL") for k, ok in self.verdicts.items()]
        rows += [(f"{k}.witness", w) for k, w in self.witnesses.items()]
        rows += list(self.details.items())
        return pd.DataFrame(rows, columns=["key", "value"])


def _levels(report: CheckReport, model: GroupModel, precision: int) -> None:
    report.details["PRECISION"] = str(precision)
    report.details["LEVEL"] = str(model.level)


# Ψ


def check_psi(tup: LayerTuple) -> CheckReport:
    """Evaluate A1 for every pair `j < i` and A2 for every layer."""
    model = tup.model
    report = CheckReport()
    x = tup.entries
    for i in range(model.e + 1):
        for j in range(i):
            difference = tr_map(model, j, i, x[j]) - pi_map(model, i, j, x[i])
            report.record(f"A1[{j},{i}]", difference.is_zero(), None if difference.is_zero() else difference.to_text())
    for i in range(model.e + 1):
        member = trace_ideal_membership(x[i], i, TraceIdealKind.T)
        report.record(f"A2[{i}]", member.member, None if member else x[i].to_text())
    _levels(report, model, tup.precision)
    return report


# Φ


def _require_units(tup: LayerTuple) -> None:
    for i, x in enumerate(tup.entries):
        if not x.is_unit():
            raise NotAUnit(f"entry {i} of the tuple is not a unit: {x!r}")


def m4_bracket(model: GroupModel, i: int, tup: LayerTuple) -> RingElement:
    """`(x_i / ver x_(i-1))^p ver(Π_k ω̃^k x_(i-1)) / φ(x_i)` for `i >= 1`, `x_0^p / φ(x_0)` for `i = 0`."""
    x = tup.entries
    if i == 0:
        return x[0] ** model.p * phi_ring(x[0]).inverse()
    ratio = x[i] * ver_ring(model, i, x[i - 1]).inverse()
    twisted = ver_ring(model, i, omega_twist_product(model, i, x[i - 1]))
    return ratio**model.p * twisted * phi_ring(x[i]).inverse()


def check_phi(tup: LayerTuple, use_special: bool = False) -> CheckReport:
    """
    Evaluate M1-M4, or MS1-MS3 when `use_special` is set (only valid for models of special type).

    Raises:
        `NotAUnit`: an entry is not a unit.
    """
    model = tup.model
    if tup.flavor != "multiplicative":
        raise ValueError("Φ is a set of multiplicative tuples")
    if use_special and not is_special_type(model):
        raise ValueError("the simplified conditions MS1-MS3 only describe Φ for models of special type")
    _require_units(tup)
    prefix = "MS" if use_special else "M"
    report = CheckReport()
    x = tup.entries
    for i in range(model.e + 1):
        for j in range(i):
            difference = norm_Nr(model, j, i, x[j]) - pi_map(model, i, j, x[i])
            ok = difference.is_zero()
            report.record(f"{prefix}1[{j},{i}]", ok, None if ok else difference.to_text())
    for i in range(model.e + 1):
        fixed = gamma_conjugate(x[i], 1) == x[i]
        report.record(f"{prefix}2[{i}]", fixed, None if fixed else x[i].to_text())
    for i in range(1, model.e + 1):
        difference = x[i] - ver_ring(model, i, x[i - 1])
        if use_special:
            member = trace_ideal_membership(difference, i, TraceIdealKind.T)
            report.record(f"MS3[{i}]", member.member, None if member else difference.to_text())
            continue
        member = trace_ideal_membership(difference, i, TraceIdealKind.D_PLUS_P)
        report.record(f"M3[{i}]", member.member, None if member else difference.to_text())
    if not use_special:
        for i in range(1, model.e + 1):
            bracket = m4_bracket(model, i, tup) - 1
            member = trace_ideal_membership(bracket, i, TraceIdealKind.P_T)
            report.record(f"M4[{i}]", member.member, None if member else bracket.to_text())
    _levels(report, model, tup.precision)
    return report


@dataclass
class FractionTuple:
    """A tuple `(a_i / t_i)` with central denominators `t_i ∈ Λ(Γ^(e))`, not divisible by p."""

    numerators: LayerTuple
    denominators: LayerTuple

    def __post_init__(self):
        if self.numerators.model is not self.denominators.model:
            raise ModelMismatch("numerators and denominators belong to different models")
        for i, t in enumerate(self.denominators.entries):
            if not is_central_denominator(t):
                raise BadDenominator(f"denominator of layer {i} is not central or is divisible by p: {t!r}")

    @property
    def model(self) -> GroupModel:
        return self.numerators.model


def check_phi_fraction(tup: FractionTuple, use_special: bool = False) -> CheckReport:
    """
    The conditions of Φ for a tuple of fractions, evaluated after clearing denominators: equalities are
    cross-multiplied, and a congruence `a/t ≡ b/s` modulo an ideal is tested as `a s - b t ∈` ideal.
    """
    model = tup.model
    if use_special and not is_special_type(model):
        raise ValueError("the simplified conditions MS1-MS3 only describe Φ for models of special type")
    a, t = tup.numerators.entries, tup.denominators.entries
    prefix = "MS" if use_special else "M"
    report = CheckReport()
    for i in range(model.e + 1):
        for j in range(i):
            lhs = norm_Nr(model, j, i, a[j]) * pi_map(model, i, j, t[i])
            rhs = pi_map(model, i, j, a[i]) * _central_norm(model, j, i, t[j])
            report.record(f"{prefix}1[{j},{i}]", lhs == rhs)
    for i in range(model.e + 1):
        report.record(f"{prefix}2[{i}]", gamma_conjugate(a[i], 1) * t[i] == a[i] * t[i])
    for i in range(1, model.e + 1):
        cleared = a[i] * ver_ring(model, i, t[i - 1]) - ver_ring(model, i, a[i - 1]) * t[i]
        kind = TraceIdealKind.T if use_special else TraceIdealKind.D_PLUS_P
        report.record(f"{prefix}3[{i}]", trace_ideal_membership(cleared, i, kind).member)
    if not use_special:
        for i in range(1, model.e + 1):
            top = (
                a[i] ** model.p
                * ver_ring(model, i, t[i - 1]) ** model.p
                * ver_ring(model, i, omega_twist_product(model, i, a[i - 1]))
                * phi_ring(t[i])
            )
            bottom = (
                t[i] ** model.p
                * ver_ring(model, i, a[i - 1]) ** model.p
                * ver_ring(model, i, omega_twist_product(model, i, t[i - 1]))
                * phi_ring(a[i])
            )
            report.record(f"M4[{i}]", trace_ideal_membership(top - bottom, i, TraceIdealKind.P_T).member)
    _levels(report, model, min(tup.numerators.precision, tup.denominators.precision))
    return report


def _central_norm(model: GroupModel, j_layer: int, i: int, t: RingElement) -> RingElement:
    # t is central in Λ(G_j^ab) and lies in the subring Λ(H_j × Γ^(i)), so its norm is t^(p^(i-j))
    target = model.layer_group(j_layer, i)
    return t.pushforward(target, lambda g: g) ** (model.p ** (i - j_layer))


def central_theta(model: GroupModel, i: int, t: RingElement) -> RingElement:
    """`θ_i(t) = t^(p^i)` for `t` central in `Λ(Γ^(e))`."""
    if not is_central_denominator(t):
        raise BadDenominator(f"{t!r} is not a central denominator")
    target = model.layer_group(i, i)
    # abelianize is only defined on G_i, which contains the support Γ^(e)
    image = RingElement.zero(target, t.precision)
    for g, c in t.support().items():
        image = image + RingElement.basis(target, model.abelianize(i, g), t.precision, c)
    return image ** (model.p**i)


def theta_tuple_and_check(
    model: GroupModel, x: Union[RingElement, FractionElement], use_special: Optional[bool] = None
) -> Tuple[Union[LayerTuple, FractionTuple], CheckReport]:
    """
    θ-tuple of a unit (or of a fraction with central denominator) and its Φ report. `use_special=None` picks
    the simplified conditions exactly when the model is of special type.
    """
    if use_special is None:
        use_special = bool(is_special_type(model))
    if isinstance(x, FractionElement):
        numerators = theta_tuple(model, x.numerator)
        denominators = LayerTuple(
            model, [central_theta(model, i, x.denominator) for i in range(model.e + 1)], "multiplicative"
        )
        tup = FractionTuple(numerators, denominators)
        return tup, check_phi_fraction(tup, use_special)
    tup = theta_tuple(model, x)
    return tup, check_phi(tup, use_special)


# the additive theorem at finite level


def _linear_map_matrix(source, target, fn, precision: int) -> np.ndarray:
    rows = []
    for g in source.elements:
        rows.append(fn(RingElement.basis(source, g, precision)).coeffs.astype(object))
    return np.array(rows, dtype=object).reshape(source.order, target.order)


def additive_theorem_verify(model: GroupModel, precision: Optional[int] = None) -> CheckReport:
    """
    Verify at level `(N, j)` that β maps `T(Λ)` isomorphically onto the tuples satisfying A1 and A2:

    * `τ ∘ β = id` on the class basis (evaluated at precision `N + e`, so the result is known modulo `p^N`),
    * the Howell form of the row space of β equals the Howell form of the A1 ∧ A2 solution space.

    `RANK_BETA` and `RANK_PSI` are ℤ_p-ranks, counted as cyclic summands modulo `p^(N+e)`.

    Raises:
        `TooLarge`: the group order exceeds `linalg.max_dense_size`.
    """
    limit = get_config().linalg.max_dense_size
    if model.order > limit:
        raise TooLarge(f"|G/Γ^(j)| = {model.order} exceeds linalg.max_dense_size = {limit}")
    N = precision or model.precision
    p, e = model.p, model.e
    report = CheckReport()
    layers = [model.layer_group(i, i) for i in range(e + 1)]
    offsets = np.cumsum([0] + [g.order for g in layers])

    lifted = N + e
    round_trip = True
    beta_rows = []
    for cls in progress(model.classes, desc="τ∘β on classes"):
        t = TraceElement.from_classes(model, {cls.index: 1}, lifted)
        tup = beta_tuple(model, t)
        beta_rows.append(np.concatenate([x.coeffs.astype(object) for x in tup.entries]))
        if round_trip and tau(model, tup) != t.truncate(N):
            round_trip = False
            report.witnesses["TAU_BETA"] = f"class {cls.index}"
    report.record("TAU_BETA", round_trip)
    image_lifted = HowellBasis(np.array(beta_rows, dtype=object), p, lifted)

    # A2: x_i = w_i O_i with O_i the exact orbit-sum matrix of T_i
    width = int(offsets[-1])
    generators = np.zeros((width, width), dtype=object)
    for i, group in enumerate(layers):
        block = slice(offsets[i], offsets[i + 1])
        generators[block, block] = orbit_sum_matrix(group, i, TraceIdealKind.T)
    # A1: tr(x_j) - π(x_i) = 0 for j < i; the entries are 0, 1 and p^(i-j) < p^lifted, so they are exact
    constraint_blocks = []
    for i in range(e + 1):
        for j in range(i):
            target = model.layer_group(j, i)
            block = np.zeros((width, target.order), dtype=object)
            block[offsets[j] : offsets[j + 1]] = _linear_map_matrix(
                layers[j], target, lambda x: tr_map(model, j, i, x), lifted
            )
            block[offsets[i] : offsets[i + 1]] = -_linear_map_matrix(
                layers[i], target, lambda x: pi_map(model, i, j, x), lifted
            )
            constraint_blocks.append(block)
    if constraint_blocks:
        images = generators.dot(np.concatenate(constraint_blocks, axis=1))
        # a relation modulo p^(lifted + s) agrees modulo p^lifted with an exact relation over ℤ_p when every
        # elementary divisor of `images` has valuation at most s
        s = max(elementary_divisor_valuations(images.tolist(), p), default=0)
        kernel = HowellBasis(images, p, lifted + s).kernel.astype(object)
    else:
        kernel = np.eye(width, dtype=object)
    solutions = kernel.dot(generators) % p**lifted if len(kernel) else np.zeros((0, width), dtype=object)
    psi_lifted = HowellBasis(solutions.reshape(len(solutions), width), p, lifted)

    image = HowellBasis(image_lifted.rows, p, N)
    psi = HowellBasis(psi_lifted.rows, p, N)
    report.record("IMAGE_IN_PSI", image.issubset(psi))
    report.record("PSI_IN_IMAGE", psi.issubset(image))
    report.details["CLASSES"] = str(len(model.classes))
    report.details["RANK_BETA"] = str(cyclic_summand_count(image_lifted.rows, p, lifted))
    report.details["RANK_PSI"] = str(cyclic_summand_count(psi_lifted.rows, p, lifted))
    report.details["LENGTH_BETA"] = str(image.length)
    report.details["LENGTH_PSI"] = str(psi.length)
    _levels(report, model, N)
    return report


# L: Φ → Ψ and the commuting diagram


def L_phi_to_psi(tup: LayerTuple, check: bool = True) -> LayerTuple:
    """
    `a_i = (1/p) log(bracket_i)` with the bracket of M4 (`x_0^p / φ(x_0)` on layer 0). The result is known modulo
    `p^(N-1)`.

    Raises:
        `NotInPhi`: the tuple fails a condition of Φ (when `check` is set).
        `IntegralityFailure`: a logarithm is not divisible by p.
        `NotInPsi`: the output fails A1 or A2.
    """
    model = tup.model
    if check:
        report = check_phi(tup)
        if not report.passed:
            raise NotInPhi(f"the tuple is not in Φ, first failing condition {report.first_failure}")
    if tup.precision < 2:
        raise PrecisionExhausted("L on tuples loses one digit and needs precision at least 2")
    entries = []
    for i in range(model.e + 1):
        value = log_series(m4_bracket(model, i, tup), tup.precision).divide_by_p(1)
        try:
            entries.append(value.integral())
        except InexactDivision as err:
            raise IntegralityFailure(f"log of the bracket on layer {i} is not divisible by {model.p}") from err
    out = LayerTuple(model, entries, "additive")
    psi = check_psi(out)
    if not psi.passed:
        raise NotInPsi(f"L(x) fails {psi.first_failure}")
    return out


def diagram_verify(model: GroupModel, x: RingElement) -> CheckReport:
    """
    The square `L ∘ θ = β ∘ L` layer by layer (modulo `p^(N-1)`), together with the per-layer identities
    compared by `layer_L_compat`.
    """
    report = CheckReport()
    tup, phi_report = theta_tuple_and_check(model, x)
    report.record("THETA_IN_PHI", phi_report.passed, phi_report.first_failure)
    left = L_phi_to_psi(tup, check=False)
    L = integral_log_L(x)
    for i in range(model.e + 1):
        right = beta(model, i, L).truncate(left.precision)
        same = left.entries[i] == right
        report.record(f"DIAGRAM[{i}]", same, None if same else f"{left.entries[i]} vs {right}")
    for i in range(model.e + 1):
        result = layer_L_compat(model, i, x)
        report.record(f"EQ1[{i}]", result.holds, None if result else f"{result.lhs} vs {result.rhs}")
    _levels(report, model, x.precision)
    return report
