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
Group rings `(ℤ/p^N)[G/Γ^(j)]`, their trace quotients `T(Λ)`, the trace ideals of the abelian layers and
fractions with central denominators.
"""

import re
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Mapping, Optional, Tuple, Union

import numpy as np

from .errors import BadDenominator, InexactDivision, ModelMismatch, NotAUnit, ParseError
from .exactnum import record_truncation
from .groupmodel import FiniteGroup, GroupElement, GroupModel, LayerGroup
from .linalg import HowellBasis, coefficient_dtype
from .logging import get_logger


logger = get_logger(__name__)


def _as_vector(values, modulus: int) -> np.ndarray:
    dtype = coefficient_dtype(modulus)
    return (np.asarray(values, dtype=object) % modulus).astype(dtype)


class RingElement:
    """
    An element `Σ c_g g` of `(ℤ/p^N)[group]`, stored as a coefficient vector indexed like `group.elements`.
    """

    __hash__ = None

    def __init__(self, group: FiniteGroup, coeffs, precision: int):
        if precision < 1:
            raise ValueError(f"precision must be at least 1, got {precision}")
        self.group = group
        self.p = group.p
        self.precision = precision
        self.modulus = self.p**precision
        coeffs = _as_vector(coeffs, self.modulus)
        if coeffs.shape != (group.order,):
            raise ValueError(f"expected {group.order} coefficients, got shape {coeffs.shape}")
        self.coeffs = coeffs

    # constructors

    @classmethod
    def zero(cls, group: FiniteGroup, precision: int) -> "RingElement":
        return cls(group, np.zeros(group.order, dtype=object), precision)

    @classmethod
    def scalar(cls, group: FiniteGroup, c: int, precision: int) -> "RingElement":
        coeffs = np.zeros(group.order, dtype=object)
        coeffs[group.index_of(group.identity)] = c
        return cls(group, coeffs, precision)

    @classmethod
    def one(cls, group: FiniteGroup, precision: int) -> "RingElement":
        return cls.scalar(group, 1, precision)

    @classmethod
    def basis(cls, group: FiniteGroup, g: GroupElement, precision: int, coefficient: int = 1) -> "RingElement":
        coeffs = np.zeros(group.order, dtype=object)
        coeffs[group.index_of(g)] = coefficient
        return cls(group, coeffs, precision)

    @classmethod
    def parse(cls, text: str, group: FiniteGroup, precision: int) -> "RingElement":
        return parse_element(text, group, precision)

    # bookkeeping

    def _aligned(self, other: "RingElement", operation: str) -> int:
        if other.group is not self.group:
            raise ModelMismatch(f"cannot {operation} elements of {self.group!r} and {other.group!r}")
        precision = min(self.precision, other.precision)
        record_truncation(operation, max(self.precision, other.precision), precision)
        return precision

    def _coerce(self, other) -> Optional["RingElement"]:
        if isinstance(other, RingElement):
            return other
        if isinstance(other, (int, np.integer)):
            return RingElement.scalar(self.group, int(other), self.precision)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        precision = self._aligned(other, "add")
        modulus = self.p**precision
        return RingElement(self.group, (self.coeffs % modulus + other.coeffs % modulus) % modulus, precision)

    __radd__ = __add__

    def __neg__(self):
        return RingElement(self.group, (-self.coeffs) % self.modulus, self.precision)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return RingElement(self.group, (self.coeffs * (int(other) % self.modulus)) % self.modulus, self.precision)
        if not isinstance(other, RingElement):
            return NotImplemented
        precision = self._aligned(other, "mul")
        modulus = self.p**precision
        x, y = self.coeffs % modulus, other.coeffs % modulus
        out = np.zeros(self.group.order, dtype=x.dtype)
        table = self.group.mul_table
        for g in np.flatnonzero(x):
            row = table[g]
            out[row] = (out[row] + x[g] * y) % modulus
        return RingElement(self.group, out, precision)

    def __rmul__(self, other):
        if isinstance(other, (int, np.integer)):
            return self * other
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result, base = RingElement.one(self.group, self.precision), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, RingElement):
            return NotImplemented
        return (
            other.group is self.group
            and other.precision == self.precision
            and bool((self.coeffs == other.coeffs).all())
        )

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def augmentation(self) -> int:
        return int(sum(int(c) for c in self.coeffs)) % self.modulus

    def is_unit(self) -> bool:
        return self.augmentation() % self.p != 0

    def inverse(self) -> "RingElement":
        return invert(self)

    def coefficient(self, g: GroupElement) -> int:
        return int(self.coeffs[self.group.index_of(g)])

    def support(self) -> Dict[GroupElement, int]:
        elements = self.group.elements
        return {elements[k]: int(self.coeffs[k]) for k in np.flatnonzero(self.coeffs)}

    def truncate(self, precision: int) -> "RingElement":
        if precision > self.precision:
            raise ValueError(f"cannot truncate precision {self.precision} up to {precision}")
        record_truncation("truncate", self.precision, precision)
        return RingElement(self.group, self.coeffs, precision)

    def with_precision(self, precision: int) -> "RingElement":
        """Same representatives at another precision: a truncation, or a lift whose extra digits are a choice."""
        if precision <= self.precision:
            return self.truncate(precision)
        return RingElement(self.group, self.coeffs.astype(object), precision)

    def pushforward(self, target: FiniteGroup, fn: Callable[[GroupElement], GroupElement]) -> "RingElement":
        """Linear extension of a map of basis elements."""
        index_map = np.array([target.index_of(fn(g)) for g in self.group.elements], dtype=np.int64)
        return self.pushforward_indices(target, index_map)

    def pushforward_indices(self, target: FiniteGroup, index_map: np.ndarray) -> "RingElement":
        out = np.zeros(target.order, dtype=object)
        np.add.at(out, index_map, self.coeffs.astype(object))
        return RingElement(target, out, self.precision)

    def is_divisible_by_p_power(self, k: int) -> bool:
        return all(int(c) % self.p**k == 0 for c in self.coeffs)

    def divide_by_p_power(self, k: int) -> "RingElement":
        """Exact division by `p^k`; the result is known modulo `p^(N-k)`."""
        if k >= self.precision:
            raise InexactDivision(f"cannot divide by {self.p}^{k} at precision {self.precision}")
        if not self.is_divisible_by_p_power(k):
            raise InexactDivision(f"coefficients are not all divisible by {self.p}^{k}")
        return RingElement(self.group, self.coeffs.astype(object) // self.p**k, self.precision - k)

    def to_text(self) -> str:
        elements = self.group.elements
        terms = [self.group.format_monomial(elements[k], int(self.coeffs[k])) for k in np.flatnonzero(self.coeffs)]
        return " + ".join(terms) if terms else "0"

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"RingElement({self.to_text()} mod {self.p}^{self.precision})"


def ring_arith(x: RingElement, y: Optional[RingElement], op: str) -> RingElement:
    """`x + y`, `x * y` or `-x`; operands of different precision meet at the smaller one."""
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op == "neg":
        return -x
    raise ValueError(f"unknown operation {op!r}, has to be one of add, mul, neg")


def parse_element(text: str, group: FiniteGroup, precision: int) -> RingElement:
    """
    Read `c*h^k@g^b + ...` (`h1^k*h3^m` for several generators, `0` for zero). Coefficients and exponents may be
    unnormalised or negative.
    """
    text = text.strip()
    if not text:
        raise ParseError("empty element text")
    text = re.sub(r"\s+-\s*", " + -", text)
    coeffs = np.zeros(group.order, dtype=object)
    for term in (t.strip() for t in text.split("+")):
        if not term:
            continue
        if term == "0":
            continue
        sign = 1
        if term.startswith("-") and not re.match(r"-\d", term):
            sign, term = -1, term[1:].strip()
        c, g = group.parse_monomial(term)
        coeffs[group.index_of(g)] += sign * c
    return RingElement(group, coeffs, precision)


def invert(x: RingElement) -> RingElement:
    """
    Inverse of a unit. `x = c (1 - z)` with `c` the augmentation and `z` in the augmentation ideal, which is
    nilpotent modulo p^N, so `(1 - z)^-1 = Π (1 + z^(2^k))` is a finite product.

    Raises:
        `NotAUnit`: the augmentation is divisible by p.
    """
    c = x.augmentation()
    if c % x.p == 0:
        raise NotAUnit(f"augmentation {c} of {x!r} is divisible by {x.p}")
    c_inv = pow(c, -1, x.modulus)
    one = RingElement.one(x.group, x.precision)
    z = one - x * c_inv
    result = one
    power = z
    steps = 0
    while not power.is_zero():
        result = result * (one + power)
        power = power * power
        steps += 1
    logger.debug(f"inverted a unit of {x.group!r} in {steps} squaring steps")
    return result * c_inv


def crossed_product_mul(x: RingElement, y: RingElement) -> RingElement:
    """
    Product computed in the crossed-product presentation `Λ(Γ^(e))[H ⋊ ℤ/p^e]`: coefficients are polynomials in
    the central element `t = γ^(p^e)` modulo `t^(p^(j-e)) - 1`, and carries of the Γ-exponent past `p^e` shift the
    polynomial by one.
    """
    group = x.group
    if not isinstance(group, GroupModel) or y.group is not group:
        raise ModelMismatch("crossed product multiplication needs two elements of the same group model")
    precision = min(x.precision, y.precision)
    modulus = group.p**precision
    period = group.p**group.e
    t_size = group.gamma_modulus // period

    def split(z: RingElement) -> Dict[GroupElement, np.ndarray]:
        out: Dict[GroupElement, np.ndarray] = {}
        for g, c in z.support().items():
            rep = GroupElement(g.h, g.a % period)
            poly = out.setdefault(rep, np.zeros(t_size, dtype=object))
            poly[g.a // period] += c
        return out

    xs, ys = split(x), split(y)
    result: Dict[GroupElement, np.ndarray] = {}
    for r1, f1 in xs.items():
        for r2, f2 in ys.items():
            h = group.multiply(GroupElement(r1.h, r1.a), GroupElement(r2.h, 0)).h
            total = r1.a + r2.a
            rep = GroupElement(h, total % period)
            shift = total // period
            prod = np.zeros(t_size, dtype=object)
            for u in np.flatnonzero(f1):
                prod = prod + np.roll(f2, int(u) + shift) * f1[u]
            acc = result.setdefault(rep, np.zeros(t_size, dtype=object))
            acc += prod
    coeffs = np.zeros(group.order, dtype=object)
    for rep, poly in result.items():
        for u in range(t_size):
            coeffs[group.index_of(GroupElement(rep.h, rep.a + u * period))] += poly[u]
    return RingElement(group, coeffs % modulus, precision)


def project_level(x: RingElement, target: FiniteGroup) -> RingElement:
    """Image under `G/Γ^(j) → G/Γ^(j')` for a target of lower level with the same H-part."""
    return x.pushforward(target, lambda g: GroupElement(g.h, g.a % target.gamma_modulus))


# trace quotient


class TraceElement:
    """An element of `T(Λ) = Λ/[Λ, Λ]`, stored as one coefficient per conjugacy class."""

    __hash__ = None

    def __init__(self, group: FiniteGroup, coeffs, precision: int):
        self.group = group
        self.p = group.p
        self.precision = precision
        self.modulus = self.p**precision
        coeffs = _as_vector(coeffs, self.modulus)
        if coeffs.shape != (len(group.classes),):
            raise ValueError(f"expected {len(group.classes)} class coefficients, got shape {coeffs.shape}")
        self.coeffs = coeffs

    @classmethod
    def zero(cls, group: FiniteGroup, precision: int) -> "TraceElement":
        return cls(group, np.zeros(len(group.classes), dtype=object), precision)

    @classmethod
    def from_classes(cls, group: FiniteGroup, values: Mapping[int, int], precision: int) -> "TraceElement":
        coeffs = np.zeros(len(group.classes), dtype=object)
        for k, c in values.items():
            coeffs[k] += c
        return cls(group, coeffs, precision)

    def _check(self, other: "TraceElement", operation: str) -> int:
        if other.group is not self.group:
            raise ModelMismatch(f"cannot {operation} trace elements of different groups")
        precision = min(self.precision, other.precision)
        record_truncation(operation, max(self.precision, other.precision), precision)
        return precision

    def __add__(self, other):
        if not isinstance(other, TraceElement):
            return NotImplemented
        precision = self._check(other, "add")
        return TraceElement(self.group, self.coeffs.astype(object) + other.coeffs.astype(object), precision)

    def __neg__(self):
        return TraceElement(self.group, -self.coeffs.astype(object), self.precision)

    def __sub__(self, other):
        if not isinstance(other, TraceElement):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return TraceElement(self.group, self.coeffs.astype(object) * int(other), self.precision)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TraceElement):
            return NotImplemented
        return (
            other.group is self.group
            and other.precision == self.precision
            and bool((self.coeffs == other.coeffs).all())
        )

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def coefficient(self, g: GroupElement) -> int:
        return int(self.coeffs[self.group.class_index[self.group.index_of(g)]])

    def truncate(self, precision: int) -> "TraceElement":
        if precision > self.precision:
            raise ValueError(f"cannot truncate precision {self.precision} up to {precision}")
        record_truncation("truncate", self.precision, precision)
        return TraceElement(self.group, self.coeffs, precision)

    def with_precision(self, precision: int) -> "TraceElement":
        if precision <= self.precision:
            return self.truncate(precision)
        return TraceElement(self.group, self.coeffs.astype(object), precision)

    def divide_by_p_power(self, k: int) -> "TraceElement":
        if k >= self.precision or any(int(c) % self.p**k for c in self.coeffs):
            raise InexactDivision(f"trace element is not divisible by {self.p}^{k} at precision {self.precision}")
        return TraceElement(self.group, self.coeffs.astype(object) // self.p**k, self.precision - k)

    def representatives(self) -> RingElement:
        """`Σ c_C rep(C)` as a ring element."""
        coeffs = np.zeros(self.group.order, dtype=object)
        for cls in self.group.classes:
            coeffs[cls.members[0]] = self.coeffs[cls.index]
        return RingElement(self.group, coeffs, self.precision)

    def to_text(self) -> str:
        terms = []
        for cls in self.group.classes:
            c = int(self.coeffs[cls.index])
            if c:
                monomial = self.group.format_monomial(cls.representative)
                terms.append(f"[{monomial}]" if c == 1 else f"{c}*[{monomial}]")
        return " + ".join(terms) if terms else "0"

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"TraceElement({self.to_text()} mod {self.p}^{self.precision})"


def to_trace(x: RingElement) -> TraceElement:
    out = np.zeros(len(x.group.classes), dtype=object)
    np.add.at(out, x.group.class_index, x.coeffs.astype(object))
    return TraceElement(x.group, out, x.precision)


def parse_trace(text: str, group: FiniteGroup, precision: int) -> TraceElement:
    """Read trace text: element text with optional brackets around the class representatives."""
    return to_trace(parse_element(text.replace("[", "").replace("]", ""), group, precision))


# trace ideals of the abelian layers


class TraceIdealKind(Enum):
    T = "T"
    D = "D"
    D_PLUS_P = "D+p"
    P_T = "pT"


@dataclass
class MembershipResult:
    member: bool
    witness: Optional[Union[RingElement, Tuple[RingElement, RingElement]]] = None

    def __bool__(self):
        return self.member


def orbit_sum_matrix(group: LayerGroup, i: int, kind: TraceIdealKind) -> np.ndarray:
    # row g is the image of the basis element g under the trace-like map of `kind`
    p = group.p
    if kind in (TraceIdealKind.T, TraceIdealKind.P_T):
        shifts = range(p**i)
    else:
        if i < 1:
            raise ValueError("the ideal D_i needs i >= 1")
        shifts = [k * p ** (i - 1) for k in range(p)]
    matrix = np.zeros((group.order, group.order), dtype=object)
    for k in shifts:
        perm = group.gamma_conjugation_perm(k)
        matrix[np.arange(group.order), perm] += 1
    return matrix


def trace_ideal_basis(group: LayerGroup, i: int, kind: TraceIdealKind, precision: int) -> HowellBasis:
    """Howell basis of `T_i`, `D_i`, `D_i + (p)` or `p T_i` inside `(ℤ/p^N)[group]`, cached on the group."""
    kind = TraceIdealKind(kind)
    cache = group.__dict__.setdefault("_trace_ideal_cache", {})
    key = (i, kind, precision)
    if key not in cache:
        base = orbit_sum_matrix(group, i, TraceIdealKind.T if kind == TraceIdealKind.P_T else kind)
        if kind == TraceIdealKind.D_PLUS_P:
            generators = np.concatenate([base, group.p * np.eye(group.order, dtype=object)], axis=0)
        elif kind == TraceIdealKind.P_T:
            generators = group.p * base
        else:
            generators = base
        cache[key] = HowellBasis(generators, group.p, precision)
        logger.debug(f"cached {kind.value}_{i} of {group!r} at precision {precision}")
    return cache[key]


def trace_ideal_membership(
    x: RingElement, i: int, kind: Union[str, TraceIdealKind] = TraceIdealKind.T
) -> MembershipResult:
    """
    Decide whether `x` lies in the ideal `kind` of layer `i` and return a preimage under its generating map.

    For `T` and `pT` the witness `w` satisfies `x = Σ_{k<p^i} γ^k w γ^-k` (times `p`); for `D+p` the witness is a
    pair `(w, u)` with `x = Σ_{k<p} γ^(k p^(i-1)) w γ^-(k p^(i-1)) + p u`.
    """
    kind = TraceIdealKind(kind)
    if not isinstance(x.group, LayerGroup):
        raise ModelMismatch("trace ideals live in the group rings of the abelian layers")
    basis = trace_ideal_basis(x.group, i, kind, x.precision)
    solution = basis.solve(x.coeffs)
    if solution is None:
        return MembershipResult(False)
    n = x.group.order
    if kind == TraceIdealKind.D_PLUS_P:
        witness = (RingElement(x.group, solution[:n], x.precision), RingElement(x.group, solution[n:], x.precision))
    else:
        witness = RingElement(x.group, solution, x.precision)
    return MembershipResult(True, witness)


def gamma_conjugate(x: RingElement, k: int = 1) -> RingElement:
    """`γ^k x γ^-k` on a layer ring."""
    group = x.group
    if not isinstance(group, LayerGroup):
        raise ModelMismatch("γ-conjugation is defined here for layer rings")
    return x.pushforward_indices(group, group.gamma_conjugation_perm(k))


def orbit_sum(x: RingElement, i: int, kind: Union[str, TraceIdealKind] = TraceIdealKind.T) -> RingElement:
    """The generating map of the ideal `kind` applied to `x`."""
    kind = TraceIdealKind(kind)
    p = x.p
    shifts = range(p**i) if kind in (TraceIdealKind.T, TraceIdealKind.P_T) else [k * p ** (i - 1) for k in range(p)]
    total = RingElement.zero(x.group, x.precision)
    for k in shifts:
        total = total + gamma_conjugate(x, k)
    return total * p if kind == TraceIdealKind.P_T else total


# fractions with central denominators


def central_period(group: FiniteGroup) -> int:
    """`p^e`: denominators must be supported on `{γ^(p^e k)}`."""
    model = group.model if isinstance(group, LayerGroup) else group
    return group.p**model.e


def is_central_denominator(t: RingElement) -> bool:
    period = central_period(t.group)
    for g in t.support():
        if any(g.h) or g.a % period:
            return False
    return not t.is_divisible_by_p_power(1)


class FractionElement:
    """`a / t` with `t` in `Λ(Γ^(e))` and `t ≢ 0 mod p`."""

    __hash__ = None

    def __init__(self, numerator: RingElement, denominator: RingElement):
        if numerator.group is not denominator.group:
            raise ModelMismatch("numerator and denominator live in different group rings")
        if not is_central_denominator(denominator):
            raise BadDenominator(f"{denominator!r} is not a central element of Λ(Γ^(e)) prime to {denominator.p}")
        self.numerator = numerator
        self.denominator = denominator
        self.group = numerator.group
        self.p = numerator.p
        self.precision = min(numerator.precision, denominator.precision)

    @classmethod
    def integral(cls, x: RingElement) -> "FractionElement":
        return cls(x, RingElement.one(x.group, x.precision))

    def __add__(self, other):
        return fraction_arith(self, other, "+")

    def __sub__(self, other):
        return fraction_arith(self, other, "-")

    def __mul__(self, other):
        return fraction_arith(self, other, "*")

    def __eq__(self, other):
        if not isinstance(other, FractionElement):
            return NotImplemented
        return fraction_arith(self, other, "eq")

    def __repr__(self):
        return f"FractionElement(({self.numerator.to_text()}) / ({self.denominator.to_text()}))"


def fraction_arith(a: FractionElement, b: FractionElement, op: str) -> Union[FractionElement, bool]:
    """
    Ring operation (`+`, `-`, `*`) or equality test (`eq`) on fractions. Denominators are central, so sums are
    formed over the common denominator without reordering and equality is decided by cross-multiplication.
    """
    if op == "+":
        return FractionElement(
            a.numerator * b.denominator + b.numerator * a.denominator, a.denominator * b.denominator
        )
    if op == "-":
        return FractionElement(
            a.numerator * b.denominator - b.numerator * a.denominator, a.denominator * b.denominator
        )
    if op == "*":
        return FractionElement(a.numerator * b.numerator, a.denominator * b.denominator)
    if op == "eq":
        return bool(a.numerator * b.denominator == b.numerator * a.denominator)
    raise ValueError(f"unknown operation {op!r}, has to be one of +, -, *, eq")
