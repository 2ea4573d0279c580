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
p-adic logarithm and exponential on finite group rings, and the integral logarithm `L`.

Inputs are read as their representatives: `x` at precision `N` stands for the element of `ℤ_p[G/Γ^(j)]` with the
same coefficients. Series are truncated where every remaining term vanishes at the requested precision; the
bound comes from the radical nilpotence exponent `m` (smallest `m` with `J^m ⊆ pΛ`), which gives
`y^n ∈ p^⌊n/m⌋ Λ` for `y` in the radical.
"""

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .configuration_utils import get_config
from .errors import InexactDivision, IntegralityFailure, NotAUnit, NotInIdeal, PrecisionExhausted
from .exactnum import p_adic_valuation
from .groupmodel import FiniteGroup, GroupElement, GroupModel, LayerGroup
from .groupring import RingElement, TraceElement, to_trace
from .k1maps import beta, omega_twist_product, phi_ring, phi_trace, theta, ver_ring
from .linalg import row_basis_mod_p
from .logging import get_logger


logger = get_logger(__name__)

Numerator = Union[RingElement, TraceElement]


@dataclass
class TraceValueQ:
    """
    `numerator / p^d`, an element of `ℚ ⊗ Λ` or `ℚ ⊗ T(Λ)` with bounded denominators.
    The numerator is known modulo `p^numerator.precision`, so the value is known modulo `p^(numerator.precision - d)`.
    """

    numerator: Numerator
    d: int = 0

    @property
    def p(self) -> int:
        return self.numerator.p

    @property
    def precision(self) -> int:
        return self.numerator.precision - self.d

    def normalized(self) -> "TraceValueQ":
        numerator, d = self.numerator, self.d
        while d > 0 and numerator.precision > 1 and not any(int(c) % self.p for c in numerator.coeffs):
            numerator, d = numerator.divide_by_p_power(1), d - 1
        return TraceValueQ(numerator, d)

    def is_integral(self) -> bool:
        return self.normalized().d == 0

    def integral(self) -> Numerator:
        """
        The value as an integral element.

        Raises:
            `InexactDivision`: the value has a non-trivial denominator.
        """
        value = self.normalized()
        if value.d:
            raise InexactDivision(f"value has denominator {self.p}^{value.d}")
        return value.numerator

    def divide_by_p(self, k: int = 1) -> "TraceValueQ":
        return TraceValueQ(self.numerator, self.d + k)

    def _scaled(self, D: int, precision: int):
        # integer coefficients of p^D * value modulo p^(precision + D)
        shift = D - self.d
        coeffs = np.array([int(c) for c in self.numerator.coeffs], dtype=object) * self.p**shift
        return coeffs % self.p ** (precision + D)

    def agrees_with(self, other: "TraceValueQ", precision: Optional[int] = None) -> bool:
        """Equality modulo `p^precision`, by default the smaller of the two certified precisions."""
        if other.numerator.group is not self.numerator.group:
            return False
        precision = min(self.precision, other.precision) if precision is None else precision
        if precision > min(self.precision, other.precision):
            raise PrecisionExhausted(f"values are only known modulo {self.p}^{min(self.precision, other.precision)}")
        D = max(self.d, other.d)
        return bool((self._scaled(D, precision) == other._scaled(D, precision)).all())

    def __add__(self, other: "TraceValueQ") -> "TraceValueQ":
        D = max(self.d, other.d)
        precision = min(self.precision, other.precision)
        numerators = [
            v.numerator.with_precision(v.numerator.precision + D - v.d) * v.p ** (D - v.d) for v in (self, other)
        ]
        total = numerators[0] + numerators[1]
        return TraceValueQ(total.truncate(precision + D), D).normalized()

    def __neg__(self) -> "TraceValueQ":
        return TraceValueQ(-self.numerator, self.d)

    def __sub__(self, other: "TraceValueQ") -> "TraceValueQ":
        return self + (-other)

    def to_text(self) -> str:
        text = self.numerator.to_text()
        return text if self.d == 0 else f"({text}) / {self.p}^{self.d}"

    def __repr__(self):
        return f"TraceValueQ({self.to_text()} mod {self.p}^{self.precision})"


def log_buffer(group: FiniteGroup) -> int:
    """Extra digits carried by the integral logarithm: `precision.log_buffer`, or `e + 2` when unset."""
    configured = get_config().precision.log_buffer
    if configured is not None:
        if configured < 1:
            raise ValueError(f"precision.log_buffer must be at least 1, got {configured}")
        return configured
    model = group.model if isinstance(group, LayerGroup) else group
    return getattr(model, "e", 0) + 2


def _generators(group: FiniteGroup):
    gens = []
    for t in range(group.rank):
        h = [0] * group.rank
        h[t] = 1
        gens.append(GroupElement(tuple(h), 0))
    if group.gamma_size > 1:
        gens.append(GroupElement((0,) * group.rank, group.step))
    return [group.index_of(g) for g in gens]


def radical_nilpotence_exponent(group: FiniteGroup) -> int:
    """
    Smallest `m` with `J^m ⊆ pΛ`, i.e. the nilpotency index of the augmentation ideal of `F_p[group]`.

    `I^(k+1)` is spanned by `b (g - 1)` for `b` in a basis of `I^k` and `g` running over generators of the group.
    """
    cache = group.__dict__
    if "_radical_exponent" not in cache:
        p, n = group.p, group.order
        table = group.mul_table
        unit = group.index_of(group.identity)
        ideal = np.eye(n, dtype=np.int64)
        ideal[:, unit] -= 1
        current = row_basis_mod_p(np.delete(ideal, unit, axis=0), p)
        gens = _generators(group)
        m = 1
        while len(current):
            products = []
            for g in gens:
                moved = np.zeros_like(current)
                moved[:, table[:, g]] = current
                products.append(moved - current)
            current = row_basis_mod_p(np.concatenate(products, axis=0), p)
            m += 1
        cache["_radical_exponent"] = m
        logger.debug(f"radical nilpotence exponent of {group!r} is {m}")
    return cache["_radical_exponent"]


def _series_length(target: int, rate: int, p: int) -> int:
    # first n from which ⌊n/rate⌋ - ⌊log_p n⌋ >= target holds for every larger index
    n = max(rate, 2)
    while n / rate - 1 - math.log(n) / math.log(p) < target:
        n += 1
    return n


def log_series(x: RingElement, precision: Optional[int] = None) -> TraceValueQ:
    """
    `log(x) = Σ (-1)^(n-1) y^n / n` for `x = 1 + y` with `y` in the radical, as a value in `ℚ ⊗ Λ`.

    Raises:
        `NotInIdeal`: the augmentation of `x` is not 1 modulo p.
        `PrecisionExhausted`: the requested precision is below 1 or exceeds the precision of `x`.
    """
    target = x.precision if precision is None else precision
    if not 1 <= target <= x.precision:
        raise PrecisionExhausted(f"log(x) is known modulo {x.p}^{x.precision} at most, asked for {target} digits")
    p = x.p
    if x.augmentation() % p != 1:
        raise NotInIdeal(f"log needs x ≡ 1 modulo the radical, the augmentation of {x!r} is not 1 mod {p}")
    rate = 1 if (x - 1).is_divisible_by_p_power(1) else radical_nilpotence_exponent(x.group)
    stop = _series_length(target, rate, p)
    d = 0
    while p ** (d + 1) < stop:
        d += 1
    working = target + d
    modulus = p**working
    y = x.with_precision(working) - 1
    acc = RingElement.zero(x.group, working)
    power = y
    for n in range(1, stop):
        if power.is_zero():
            break
        v = p_adic_valuation(n, p)
        coefficient = (-1) ** (n - 1) * pow(n // p**v, -1, modulus) * p ** (d - v)
        acc = acc + power * coefficient
        power = power * y
    logger.debug(f"log series on {x.group!r}: {stop - 1} terms at most, denominator {p}^{d}, rate {rate}")
    return TraceValueQ(acc, d).normalized()


def log_to_trace(x: RingElement, precision: Optional[int] = None) -> TraceValueQ:
    """
    The logarithm of `x` pushed to the trace quotient `ℚ ⊗ T(Λ)`.

    Raises:
        `PrecisionExhausted`: as for `log_series`.
    """
    value = log_series(x, precision)
    return TraceValueQ(to_trace(value.numerator), value.d).normalized()


def exp_from_ideal(z: Numerator, precision: Optional[int] = None) -> RingElement:
    """
    `exp(z) = Σ z^n / n!` for `z ∈ pΛ`. Trace elements are read through their class representatives.

    Raises:
        `NotInIdeal`: some coefficient of `z` is not divisible by p.
    """
    if isinstance(z, TraceElement):
        z = z.representatives()
    target = precision or z.precision
    p = z.p
    if not z.is_divisible_by_p_power(1):
        raise NotInIdeal(f"exp needs an element of pΛ, got {z!r}")
    # v_p(n!) <= (n - 1) / (p - 1)
    stop = 1
    while stop - (stop - 1) / (p - 1) < target:
        stop += 1
    stop += 1
    d = max(p_adic_valuation(math.factorial(n), p) for n in range(1, stop))
    working = target + d
    modulus = p**working
    w = z.with_precision(working)
    acc = RingElement.one(z.group, working) * p**d
    power = w
    for n in range(1, stop):
        if power.is_zero():
            break
        v = p_adic_valuation(math.factorial(n), p)
        coefficient = pow(math.factorial(n) // p**v, -1, modulus) * p ** (d - v)
        acc = acc + power * coefficient
        power = power * w
    return TraceValueQ(acc, d).integral().truncate(target)


def teichmuller_lift(a: int, p: int, precision: int) -> int:
    """The (p-1)-st root of unity congruent to `a` modulo p, modulo `p^precision`."""
    if a % p == 0:
        raise NotAUnit(f"{a} has no Teichmüller lift")
    modulus = p**precision
    return pow(a, p ** (precision - 1), modulus)


def integral_log_L(x: RingElement, precision: Optional[int] = None) -> TraceElement:
    """
    The integral logarithm `L(x) = log(x) - φ(log(x)) / p` in `T(Λ)`.

    `x = c x_1` with `c` the Teichmüller lift of the augmentation; `L(c) = 0` and
    `L(x_1) = (p log(x_1) - φ(log(x_1))) / p`, evaluated with `log_buffer` extra digits. The division by p costs
    one digit: the result is known modulo `p^(N-1)`, which is also the default and the largest allowed `precision`.

    Raises:
        `NotAUnit`: `x` is not a unit.
        `IntegralityFailure`: the division by p is inexact.
        `PrecisionExhausted`: `precision` exceeds `N - 1`.
    """
    target = x.precision - 1 if precision is None else precision
    if not 1 <= target <= x.precision - 1:
        raise PrecisionExhausted(f"L is known modulo {x.p}^{x.precision - 1} at most, asked for {target} digits")
    if not x.is_unit():
        raise NotAUnit(f"L needs a unit, the augmentation of {x!r} is divisible by {x.p}")
    p = x.p
    working = target + log_buffer(x.group)
    lifted = x.with_precision(working)
    c = teichmuller_lift(lifted.augmentation(), p, working)
    x1 = lifted * pow(c, -1, p**working)
    value = log_to_trace(x1, working)
    numerator = value.numerator
    defect = numerator * p - phi_trace(numerator)
    try:
        result = defect.divide_by_p_power(value.d + 1)
    except InexactDivision as err:
        raise IntegralityFailure(f"p log(x) - φ(log(x)) is not divisible by {p}^{value.d + 1}") from err
    return result.truncate(target)


def frobenius_integrality_check(x: RingElement, n: int) -> bool:
    """Whether `x^(p^n) - φ(x^(p^(n-1)))` vanishes in `T(Λ)` modulo `p^n`."""
    if not 1 <= n <= x.precision:
        raise ValueError(f"need 1 <= n <= {x.precision}, got {n}")
    p = x.p
    lower = x ** (p ** (n - 1))
    difference = to_trace(lower**p - phi_ring(lower))
    holds = all(int(c) % p**n == 0 for c in difference.coeffs)
    if not holds:
        logger.debug(f"x^(p^{n}) - φ(x^(p^{n - 1})) is not divisible by {p}^{n} in T")
    return holds


@dataclass
class CompatResult:
    holds: bool
    form: str
    lhs: RingElement
    rhs: RingElement

    def __bool__(self):
        return self.holds


def _bracket(model: GroupModel, i: int, x: RingElement) -> RingElement:
    # (θ_i / ver θ_(i-1))^p ver(Π_k ω̃^k θ_(i-1)) / φ(θ_i), or θ_0^p / φ(θ_0) on layer 0
    top = theta(model, i, x)
    if i == 0:
        return top**model.p * phi_ring(top).inverse()
    below = theta(model, i - 1, x)
    ratio = top * ver_ring(model, i, below).inverse()
    twisted = ver_ring(model, i, omega_twist_product(model, i, below))
    return ratio**model.p * twisted * phi_ring(top).inverse()


def layer_L_compat(model: GroupModel, i: int, x: RingElement, form: str = "auto") -> CompatResult:
    """
    Compare `β_i(L(x))` with the θ-side expression modulo `p^(N-1)`.

    `general`: `(1/p) log((θ_i / ver θ_(i-1))^p ver(Π_k ω̃^k θ_(i-1)) / φ(θ_i))`.
    `special`: `log(θ_i / ver θ_(i-1))`, valid for models of special type.
    `auto` picks `special` when the model is of special type and `i >= 1`.
    """
    from .groupmodel import is_special_type

    if form not in ("auto", "general", "special"):
        raise ValueError(f"form has to be one of auto, general, special, got {form!r}")
    if form == "auto":
        form = "special" if i >= 1 and is_special_type(model) else "general"
    if form == "special" and i == 0:
        form = "general"
    target = x.precision - 1
    working = x.precision + log_buffer(model)
    lifted = x.with_precision(working)

    lhs = beta(model, i, integral_log_L(x))
    try:
        if form == "general":
            rhs = log_series(_bracket(model, i, lifted), working).divide_by_p(1).integral()
        else:
            ratio = theta(model, i, lifted) * ver_ring(model, i, theta(model, i - 1, lifted)).inverse()
            rhs = log_series(ratio, working).integral()
    except InexactDivision as err:
        raise IntegralityFailure(f"the θ-side of layer {i} is not integral") from err
    rhs = rhs.truncate(target)
    holds = lhs == rhs
    if not holds:
        logger.debug(f"layer {i} ({form}): β_i(L(x)) = {lhs} but the θ-side is {rhs}")
    return CompatResult(holds, form, lhs, rhs)


def norm_res_compat(model: GroupModel, i: int, y: RingElement, precision: Optional[int] = None) -> bool:
    """`β_i(log(1 + y)) = log(θ_i(1 + y))` modulo `p^precision` (default `N - 1`)."""
    x = y + 1
    precision = precision or x.precision - 1
    lhs = log_to_trace(x)
    lhs = TraceValueQ(beta(model, i, lhs.numerator), lhs.d)
    rhs = log_series(theta(model, i, x))
    return lhs.agrees_with(rhs, precision)
