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
Values of partial zeta functions at negative integers for towers abelian over ℚ, the smoothed values Δ, the
group-ring approximations of `(1 - γ^(p^i)) ζ(K_i/F_i)` and the congruences between layers.

A tower is described by a `ZetaDatum`: the prime p, a prime-to-p conductor `f0`, the set Σ of bad primes, the depth
`e`, the level `j`, the value `κ = N(γ) ∈ 1 + pℤ` of the cyclotomic character on the chosen generator γ, and the
Artin map `(ℤ/M)^× → G/Γ^(j) = H × ℤ/p^j` with `M = f0 p^(f+j)`. Every value is an exact rational
until the final reduction modulo `p^(f+j)`.
"""

import itertools
import math
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import Rational, isprime, primefactors
from sympy import bernoulli as sympy_bernoulli

from .configuration_utils import get_config
from .errors import (
    InvalidDatum,
    LevelMismatch,
    ModelMismatch,
    NonAbelianTower,
    NonIntegralDelta,
    ParseError,
    PrecisionExhausted,
)
from .exactnum import CycloRational, check_prime, p_adic_valuation, reduce_mod_pN
from .groupmodel import GroupElement, GroupModel, GroupSpec, LayerGroup, build_group, transfer_ver
from .groupring import RingElement, TraceIdealKind, trace_ideal_membership
from .k1maps import ver_ring
from .logging import get_logger, progress
from .phipsi import CheckReport


logger = get_logger(__name__)


# Bernoulli numbers


@lru_cache(maxsize=None)
def bernoulli(k: int) -> Fraction:
    """`B_k` from `Σ_{i<=k} C(k+1, i) B_i = 0`, `B_0 = 1` (so `B_1 = -1/2`)."""
    if k < 0:
        raise ValueError(f"Bernoulli numbers need k >= 0, got {k}")
    if k == 0:
        return Fraction(1)
    if k > 1 and k % 2:
        return Fraction(0)
    total = sum(math.comb(k + 1, i) * bernoulli(i) for i in range(k))
    return -total / (k + 1)


@lru_cache(maxsize=4096)
def bernoulli_polynomial(k: int, x: Fraction) -> Fraction:
    """`B_k(x) = Σ_n C(k, n) B_n x^(k-n)`."""
    x = Fraction(x)
    return sum(math.comb(k, n) * bernoulli(n) * x ** (k - n) for n in range(k + 1))


def kummer_value(p: int, k: int) -> int:
    """`(1 - p^(k-1)) B_k / k` modulo p, for `k` with `p - 1 ∤ k`."""
    check_prime(p)
    value = (1 - Fraction(p) ** (k - 1)) * bernoulli(k) / k
    return reduce_mod_pN(value, p, 1).value


# partial zeta values over ℚ


def _hurwitz_base(f: int, a: int, k: int) -> Fraction:
    # Σ_{n ≡ a (f), n > 0} n^(k-1), regularised: -f^(k-1) B_k(a/f) / k with a taken in 1..f
    a = a % f or f
    return -Fraction(f) ** (k - 1) * bernoulli_polynomial(k, Fraction(a, f)) / k


def partial_zeta_Q(f_mod: int, a: int, k: int, sigma: Iterable[int] = ()) -> Fraction:
    """
    `ζ_Σ(1-k; a mod f)`: the partial zeta function of the positive integers `n ≡ a (mod f)` prime to Σ,
    at `1 - k`.
    Primes of Σ not dividing `f` are removed by inclusion-exclusion.
    """
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if f_mod < 1:
        raise ValueError(f"the modulus must be positive, got {f_mod}")
    sigma = sorted(set(sigma))
    if any(f_mod % ell == 0 and a % ell == 0 for ell in sigma):
        return Fraction(0)
    extra = [ell for ell in sigma if f_mod % ell]
    total = Fraction(0)
    for size in range(len(extra) + 1):
        for subset in itertools.combinations(extra, size):
            d = math.prod(subset)
            shifted = a * pow(d, -1, f_mod) if f_mod > 1 else 0
            total += (-1) ** size * Fraction(d) ** (k - 1) * _hurwitz_base(f_mod, shifted, k)
    return total


def hurwitz_oracle(f_mod: int, a: int, k: int) -> Fraction:
    """`ζ(1-k; a mod f)` through sympy's Bernoulli polynomials, for cross-checking `partial_zeta_Q` with Σ = ∅."""
    a = a % f_mod or f_mod
    value = -Rational(f_mod) ** (k - 1) * sympy_bernoulli(k, Rational(a, f_mod)) / k
    return Fraction(int(value.p), int(value.q))


# Dirichlet characters


@dataclass(frozen=True)
class DirichletCharacter:
    """
    A character of `(ℤ/modulus)^×` with values in `μ_m`, `m = order_modulus`. `exponents[a]` is `t` with
    `χ(a) = ζ_m^t`, or `None` when `a` is not a unit.
    """

    modulus: int
    order_modulus: int
    exponents: Tuple[Optional[int], ...]

    def __post_init__(self):
        if len(self.exponents) != self.modulus:
            raise ValueError(f"expected {self.modulus} exponents, got {len(self.exponents)}")

    @classmethod
    def trivial(cls, modulus: int = 1) -> "DirichletCharacter":
        return cls(modulus, 1, tuple(0 if math.gcd(a, modulus) == 1 else None for a in range(modulus)))

    @classmethod
    def from_function(cls, modulus: int, order_modulus: int, fn) -> "DirichletCharacter":
        exponents = tuple(
            int(fn(a)) % order_modulus if math.gcd(a, modulus) == 1 else None for a in range(modulus)
        )
        return cls(modulus, order_modulus, exponents)

    def exponent(self, a: int) -> Optional[int]:
        return self.exponents[a % self.modulus]

    def __call__(self, a: int) -> CycloRational:
        t = self.exponent(a)
        if t is None:
            return CycloRational.zero(self.order_modulus)
        return CycloRational.root_of_unity(self.order_modulus, t)

    @cached_property
    def conductor(self) -> int:
        for d in sorted(d for d in range(1, self.modulus + 1) if self.modulus % d == 0):
            if all(self.exponents[n] in (None, 0) for n in range(1, self.modulus, d)):
                return d
        return self.modulus

    def primitive(self) -> "DirichletCharacter":
        f = self.conductor
        exponents = []
        for a in range(f):
            if math.gcd(a, f) != 1:
                exponents.append(None)
                continue
            lift = next(b for b in range(a, a + f * self.modulus + 1, f) if math.gcd(b, self.modulus) == 1)
            exponents.append(self.exponents[lift % self.modulus])
        return DirichletCharacter(f, self.order_modulus, tuple(exponents))

    def is_even(self) -> bool:
        return self.exponent(-1) == 0

    def is_trivial(self) -> bool:
        return self.conductor == 1

    def conjugate(self) -> "DirichletCharacter":
        return DirichletCharacter(
            self.modulus,
            self.order_modulus,
            tuple(None if t is None else -t % self.order_modulus for t in self.exponents),
        )


def generalized_bernoulli(chi: DirichletCharacter, k: int) -> CycloRational:
    """`B_(k,χ) = f^(k-1) Σ_{a=1}^{f} χ(a) B_k(a/f)` with `f` the modulus of `chi`."""
    f, m = chi.modulus, chi.order_modulus
    buckets = [Fraction(0)] * m
    for a in range(1, f + 1):
        t = chi.exponent(a)
        if t is not None:
            buckets[t] += bernoulli_polynomial(k, Fraction(a, f))
    return CycloRational(m, tuple(buckets)) * Fraction(f) ** (k - 1)


def dirichlet_L_value(chi: DirichletCharacter, k: int, sigma: Iterable[int] = ()) -> CycloRational:
    """
    `L_Σ(χ, 1-k) = -B_(k,χ)/k · Π_{ℓ ∈ Σ, ℓ ∤ cond} (1 - χ(ℓ) ℓ^(k-1))`,
    computed with the primitive character.
    """
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    primitive = chi.primitive()
    value = generalized_bernoulli(primitive, k) * Fraction(-1, k)
    for ell in sorted(set(sigma)):
        if primitive.modulus % ell:
            value = value * (1 - primitive(ell) * ell ** (k - 1))
    return value


# tower data


@dataclass
class ZetaDatum:
    """
    A tower abelian over ℚ at level `j`. Datum files look like

    ```
    # cubic field of conductor 7 times the cyclotomic Z_3-extension
    p=3
    f0=7
    sigma=3,7
    depth=1
    level=2
    kappa_gamma=4
    orders=3
    artin 136 -> h^1@g^0
    artin 29 -> 1@g^5
    ```

    `artin a -> x` lines give the Artin map on generators of `(ℤ/M)^×`; it is extended multiplicatively and must be
    well defined, total and surjective. `κ(γ)` must be `≡ 1 (mod p)`, `f` is its p-adic distance to 1, and the
    Artin map must be compatible with it: `a^(p-1) ≡ κ^((p-1)c)` modulo `p^(f+j)` when `γ^c` is the Γ-part of the
    image of `a`.
    """

    p: int
    f0: int
    sigma: Tuple[int, ...]
    depth: int
    level: int
    kappa_gamma: int
    orders: Tuple[int, ...] = ()
    artin: Tuple[Tuple[int, GroupElement], ...] = ()
    action: Optional[Tuple[Tuple[int, ...], ...]] = None
    comments: Tuple[str, ...] = field(default=(), compare=False)
    _l_cache: Dict[Tuple, CycloRational] = field(default_factory=dict, init=False, repr=False, compare=False)

    _KEYS = ("p", "f0", "sigma", "depth", "level", "kappa_gamma", "orders", "action")
    _REQUIRED = ("p", "f0", "sigma", "depth", "level", "kappa_gamma")

    def __post_init__(self):
        try:
            check_prime(self.p)
        except ValueError as err:
            raise InvalidDatum(str(err)) from None
        if self.f0 < 1 or self.f0 % self.p == 0:
            raise InvalidDatum(f"f0 must be a positive integer prime to {self.p}, got {self.f0}")
        self.sigma = tuple(sorted(set(self.sigma)))
        bad = [q for q in self.sigma if not isprime(q)]
        if bad:
            raise InvalidDatum(f"Σ may only contain primes, got {bad}")
        needed = {self.p, *primefactors(self.f0)}
        if not needed <= set(self.sigma):
            raise InvalidDatum(f"Σ = {set(self.sigma)} must contain p and every prime dividing f0: {sorted(needed)}")
        if not 0 <= self.depth <= self.level:
            raise InvalidDatum(f"need 0 <= depth <= level, got depth {self.depth} and level {self.level}")
        if self.kappa_gamma % self.p != 1 or self.kappa_gamma == 1:
            raise InvalidDatum(f"κ(γ) = {self.kappa_gamma} must be ≡ 1 mod {self.p} and different from 1")
        if not self.is_abelian:
            raise NonAbelianTower("the action on H is not trivial, the tower is not abelian over the base")
        self.orders = tuple(self.orders)
        for a, _ in self.artin:
            if math.gcd(a, self.modulus) != 1:
                raise InvalidDatum(f"Artin generator {a} is not a unit modulo {self.modulus}")
        self.artin_table

    # derived quantities

    @property
    def f(self) -> int:
        return p_adic_valuation(self.kappa_gamma - 1, self.p)

    @property
    def precision(self) -> int:
        return self.f + self.level

    @property
    def modulus(self) -> int:
        return self.f0 * self.p ** (self.f + self.level)

    @cached_property
    def model(self) -> GroupModel:
        r = len(self.orders)
        action = self.action or tuple(tuple(int(s == t) for t in range(r)) for s in range(r))
        spec = GroupSpec(self.p, 0, self.orders, action, self.level, self.precision)
        return build_group(spec)

    @property
    def is_abelian(self) -> bool:
        r = len(self.orders)
        return self.action is None or all(
            (self.action[s][t] - int(s == t)) % self.orders[s] == 0 for s in range(r) for t in range(r)
        )

    @cached_property
    def artin_table(self) -> Dict[int, GroupElement]:
        """The Artin map on every unit modulo `M`."""
        model, M = self.model, self.modulus
        generators = [(a % M, model.normalize(g.h, g.a)) for a, g in self.artin]
        table = {1 % M: model.identity}
        frontier = [1 % M]
        while frontier:
            nxt = []
            for b in frontier:
                for a, g in generators:
                    c, y = b * a % M, model.multiply(table[b], g)
                    if c in table:
                        if table[c] != y:
                            raise InvalidDatum(f"the Artin assignment is not a homomorphism: {c} has two images")
                        continue
                    table[c] = y
                    nxt.append(c)
            frontier = nxt
        units = sum(1 for a in range(M) if math.gcd(a, M) == 1)
        if len(table) != units:
            raise InvalidDatum(f"the Artin generators only reach {len(table)} of the {units} units modulo {M}")
        if len(set(table.values())) != model.order:
            raise InvalidDatum(f"the Artin map does not reach all {model.order} elements of G/Γ^({self.level})")
        mod = self.p**self.precision
        for a, g in table.items():
            if pow(a, self.p - 1, mod) != pow(self.kappa_gamma, (self.p - 1) * g.a, mod):
                raise InvalidDatum(
                    f"the Artin image {model.format_monomial(g)} of {a} is not compatible "
                    f"with κ(γ) = {self.kappa_gamma}"
                )
        logger.debug(f"Artin map modulo {M} onto a group of order {model.order}")
        return table

    def with_level(self, level: int) -> "ZetaDatum":
        """The same tower seen at another level; the Artin generators are reduced and projected."""
        if level == self.level:
            return self
        artin = tuple((a, GroupElement(g.h, g.a % self.p**level)) for a, g in self.artin)
        if level > self.level:
            raise InvalidDatum("raising the level needs Artin images at the higher level; write a new datum")
        return ZetaDatum(
            self.p, self.f0, self.sigma, self.depth, level, self.kappa_gamma, self.orders, artin, self.action
        )

    def kappa_power(self, n: int) -> int:
        """`N(γ^n) = κ^n` for `n >= 0`, exactly."""
        return self.kappa_gamma**n

    # characters of G/Γ^(j)

    @property
    def exponent(self) -> int:
        return max([self.p**self.level, *self.orders])

    def characters(self) -> List[Tuple[int, ...]]:
        ranges = [range(d) for d in self.orders] + [range(self.p**self.level)]
        return [tuple(u) for u in itertools.product(*ranges)]

    def character_exponent(self, u: Tuple[int, ...], g: GroupElement) -> int:
        m = self.exponent
        t = sum(uu * hh * (m // d) for uu, hh, d in zip(u, g.h, self.orders))
        t += u[-1] * g.a * (m // self.p**self.level)
        return t % m

    def dirichlet_character(self, u: Tuple[int, ...]) -> DirichletCharacter:
        table = self.artin_table
        return DirichletCharacter.from_function(
            self.modulus, self.exponent, lambda a: self.character_exponent(u, table[a])
        )

    def L_value(self, u: Tuple[int, ...], k: int) -> CycloRational:
        key = (u, k)
        if key not in self._l_cache:
            self._l_cache[key] = dirichlet_L_value(self.dirichlet_character(u), k, self.sigma)
        return self._l_cache[key]

    # files

    @classmethod
    def parse(cls, text: str) -> "ZetaDatum":
        comments, values, artin_lines = [], {}, []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                comments.append(raw.rstrip())
                continue
            if line.startswith("artin"):
                body, sep, image = line[len("artin") :].partition("->")
                if not sep:
                    raise ParseError(f"line {lineno}: expected 'artin a -> element', got {raw!r}")
                try:
                    artin_lines.append((int(body), image.strip()))
                except ValueError:
                    raise ParseError(f"line {lineno}: {body.strip()!r} is not an integer") from None
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep or key not in cls._KEYS:
                raise ParseError(f"line {lineno}: expected one of {', '.join(cls._KEYS)} as key=value, got {raw!r}")
            if key in values:
                raise ParseError(f"line {lineno}: duplicate key {key!r}")
            values[key] = value.strip()
        missing = [k for k in cls._REQUIRED if k not in values]
        if missing:
            raise ParseError(f"missing keys: {', '.join(missing)}")

        def ints(text: str) -> Tuple[int, ...]:
            return tuple(int(x) for x in text.split(",") if x.strip())

        try:
            orders = ints(values.get("orders", ""))
            action = None
            if "action" in values:
                flat = ints(values["action"])
                r = len(orders)
                if len(flat) != r * r:
                    raise ParseError(f"action has {len(flat)} entries, expected {r * r}")
                action = tuple(tuple(flat[s * r : (s + 1) * r]) for s in range(r))
            p, level = int(values["p"]), int(values["level"])
        except ValueError as err:
            if isinstance(err, ParseError):
                raise
            raise ParseError(f"non-integer value in datum: {err}") from err

        # images are read in the group G/Γ^(level); the model only depends on p, orders and level
        identity = tuple(tuple(int(s == t) for t in range(len(orders))) for s in range(len(orders)))
        scratch = build_group(GroupSpec(p, 0, orders, identity, level, 1))
        artin = []
        for a, image in artin_lines:
            c, g = scratch.parse_monomial(image)
            if c != 1:
                raise ParseError(f"Artin image {image!r} must be a group element")
            artin.append((a, g))
        try:
            return cls(
                p=p,
                f0=int(values["f0"]),
                sigma=ints(values["sigma"]),
                depth=int(values["depth"]),
                level=level,
                kappa_gamma=int(values["kappa_gamma"]),
                orders=orders,
                artin=tuple(artin),
                action=action,
                comments=tuple(comments),
            )
        except ValueError as err:
            if isinstance(err, (ParseError, InvalidDatum)):
                raise
            raise ParseError(f"non-integer value in datum: {err}") from err

    @classmethod
    def from_file(cls, path: Union[str, os.PathLike]) -> "ZetaDatum":
        with open(path, encoding="utf-8") as f:
            return cls.parse(f.read())

    def to_text(self) -> str:
        lines = list(self.comments)
        lines += [
            f"p={self.p}",
            f"f0={self.f0}",
            f"sigma={','.join(str(q) for q in self.sigma)}",
            f"depth={self.depth}",
            f"level={self.level}",
            f"kappa_gamma={self.kappa_gamma}",
        ]
        if self.orders:
            lines.append(f"orders={','.join(str(d) for d in self.orders)}")
        if self.action is not None:
            lines.append(f"action={','.join(str(x) for row in self.action for x in row)}")
        lines += [f"artin {a} -> {self.model.format_monomial(g)}" for a, g in self.artin]
        return "\n".join(lines) + "\n"

    def save(self, path: Union[str, os.PathLike]) -> None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(self.to_text())


# locally constant functions


@dataclass
class LocallyConstantFn:
    """A function on `G_i^ab/Γ^(j)`, stored by its values in the element order of the layer group."""

    group: LayerGroup
    values: Tuple[Fraction, ...]

    def __post_init__(self):
        self.values = tuple(Fraction(v) for v in self.values)
        if len(self.values) != self.group.order:
            raise ValueError(f"expected {self.group.order} values, got {len(self.values)}")

    @classmethod
    def constant(cls, group: LayerGroup, c: Union[int, Fraction] = 1) -> "LocallyConstantFn":
        return cls(group, (Fraction(c),) * group.order)

    @classmethod
    def delta(cls, group: LayerGroup, x: GroupElement) -> "LocallyConstantFn":
        values = [Fraction(0)] * group.order
        values[group.index_of(x)] = Fraction(1)
        return cls(group, tuple(values))

    @classmethod
    def parse(cls, text: str, group: LayerGroup) -> "LocallyConstantFn":
        """Read `Σ c_x x` in element notation as the function `x ↦ c_x`; coefficients may be fractions `a/b`."""
        text = text.strip()
        if not text:
            raise ParseError("empty function text")
        text = re.sub(r"\s+-\s*", " + -", text)
        values = [Fraction(0)] * group.order
        for term in (t.strip() for t in text.split("+")):
            if not term or term == "0":
                continue
            sign = 1
            if term.startswith("-") and not re.match(r"-\d", term):
                sign, term = -1, term[1:].strip()
            scale = Fraction(1)
            match = re.match(r"(-?\d+/\d+)\*?", term)
            if match:
                scale, term = Fraction(match.group(1)), term[match.end() :]
            if not term or term.startswith("@"):
                term = "1" + term
            c, g = group.parse_monomial(term)
            values[group.index_of(g)] += sign * scale * c
        return cls(group, tuple(values))

    def __call__(self, g: GroupElement) -> Fraction:
        return self.values[self.group.index_of(g)]

    def shifted(self, n: int) -> "LocallyConstantFn":
        """`h ↦ ε(γ^n h)`."""
        group = self.group
        gamma_n = group.normalize((0,) * group.rank, n)
        return LocallyConstantFn(group, tuple(self(group.multiply(gamma_n, g)) for g in group.elements))

    def pullback(self, source: LayerGroup, fn) -> "LocallyConstantFn":
        return LocallyConstantFn(source, tuple(self(fn(g)) for g in source.elements))

    def is_fixed_by(self, n: int) -> bool:
        """Whether `(γ^n · ε)(h) = ε(h^(γ^n))` equals ε."""
        perm = self.group.gamma_conjugation_perm(n)
        return all(self.values[perm[s]] == v for s, v in enumerate(self.values))

    def is_p_integral(self) -> bool:
        return all(v.denominator % self.group.p for v in self.values)

    def to_text(self) -> str:
        terms = [f"{v}*{self.group.format_monomial(g)}" for g, v in zip(self.group.elements, self.values) if v]
        return " + ".join(terms) or "0"


# layer values


def _layer_group(datum: ZetaDatum, i: int) -> LayerGroup:
    if not 0 <= i <= datum.depth:
        raise ValueError(f"layer {i} is outside 0..{datum.depth}")
    return datum.model.layer_group(i, i)


def partial_zeta_vector(datum: ZetaDatum, i: int, k: int) -> Tuple[Fraction, ...]:
    """
    `ζ_i(δ^(x), 1-k)` for every `x ∈ G_i^ab/Γ^(j)`, by character orthogonality: the characters `χ` of the layer
    group split into the characters `ψ` of `G/Γ^(j)` restricting to them, and `L_(F_i)(χ) = Π_ψ L_Σ(ψ)`.
    """
    group = _layer_group(datum, i)
    p, j, m = datum.p, datum.level, datum.exponent
    products: Dict[Tuple[int, ...], CycloRational] = {}
    for u in datum.characters():
        key = u[:-1] + (u[-1] % p ** (j - i),)
        products[key] = products.get(key, CycloRational.one(m)) * datum.L_value(u, k)
    out = []
    for x in group.elements:
        total = CycloRational.zero(m)
        for key, value in products.items():
            total = total + value * CycloRational.root_of_unity(m, -datum.character_exponent(key, x))
        total = total * Fraction(1, group.order)
        if not total.is_rational():
            raise NonAbelianTower(f"the character sum for {group.format_monomial(x)} did not come out rational")
        out.append(total.to_rational())
    logger.debug(f"partial zeta values of layer {i} at 1-{k} from {len(products)} layer characters")
    return tuple(out)


def partial_zeta_layer(datum: ZetaDatum, i: int, x: GroupElement, k: int) -> Fraction:
    """`ζ_i(δ^(x), 1-k)` for a class `x` of `G_i^ab/Γ^(j)`."""
    group = _layer_group(datum, i)
    return partial_zeta_vector(datum, i, k)[group.index_of(x)]


def partial_zeta_direct(datum: ZetaDatum, x: GroupElement, k: int) -> Fraction:
    """`ζ_0(δ^(x), 1-k)` summed directly over the residues modulo `M` whose Artin image is `x`."""
    target = datum.model.normalize(x.h, x.a)
    return sum(
        (partial_zeta_Q(datum.modulus, a, k, datum.sigma) for a, g in datum.artin_table.items() if g == target),
        Fraction(0),
    )


def dedekind_zeta_layer(datum: ZetaDatum, i: int, k: int) -> Fraction:
    """`ζ_(F_i, Σ)(1-k)`: the product of `L_Σ(ψ, 1-k)` over the characters trivial on the layer group."""
    _layer_group(datum, i)
    p, j = datum.p, datum.level
    value = CycloRational.one(datum.exponent)
    for u in datum.characters():
        if not any(u[:-1]) and u[-1] % p ** (j - i) == 0:
            value = value * datum.L_value(u, k)
    return value.to_rational()


def L_layer(datum: ZetaDatum, i: int, eps: LocallyConstantFn, k: int) -> Fraction:
    """`L_i(ε, 1-k) = Σ_x ε(x) ζ_i(δ^(x), 1-k)`."""
    zetas = partial_zeta_vector(datum, i, k)
    return sum((v * z for v, z in zip(eps.values, zetas)), Fraction(0))


def delta_value(datum: ZetaDatum, i: int, eps: LocallyConstantFn, k: int) -> Fraction:
    """`Δ_i(ε, 1-k) = L_i(ε, 1-k) - N(γ^(p^i))^k L_i(ε_(i), 1-k)` with `ε_(i)(h) = ε(γ^(p^i) h)`."""
    if eps.group is not _layer_group(datum, i):
        raise ModelMismatch("ε must live on the layer group of the datum")
    if k % (datum.p - 1):
        logger.warning_advice(f"Δ at weight {k}, which is not divisible by p - 1 = {datum.p - 1}")
    n = datum.p**i
    return L_layer(datum, i, eps, k) - datum.kappa_power(n * k) * L_layer(datum, i, eps.shifted(n), k)


def _delta_vector(datum: ZetaDatum, i: int, k: int) -> List[Fraction]:
    group = _layer_group(datum, i)
    zetas = partial_zeta_vector(datum, i, k)
    n = datum.p**i
    factor = datum.kappa_power(n * k)
    # δ^(x)_(i) = δ^(γ^(-p^i) x)
    shifted = [group.index_of(group.normalize(x.h, x.a - n)) for x in group.elements]
    return [zetas[s] - factor * zetas[t] for s, t in enumerate(shifted)]


def zeta_approx(datum: ZetaDatum, i: int, j: Optional[int], k: int) -> RingElement:
    """
    `Σ_x Δ_i(δ^(x), 1-k) N(x)^(-k) x` in `ℤ/p^(f+j)[G_i^ab/Γ^(j)]`, the image of `(1 - γ^(p^i)) ζ(K_i/F_i)`.

    Raises:
        `NonIntegralDelta`: some Δ-value is not p-integral (Σ is too small).
    """
    if k < 1 or k % (datum.p - 1):
        raise ValueError(f"the weight must be a positive multiple of p - 1 = {datum.p - 1}, got {k}")
    if j is not None:
        datum = datum.with_level(j)
    group = _layer_group(datum, i)
    N = datum.precision
    mod = datum.p**N
    coeffs = np.zeros(group.order, dtype=object)
    for s, (x, value) in enumerate(zip(group.elements, _delta_vector(datum, i, k))):
        if value.denominator % datum.p == 0:
            raise NonIntegralDelta(
                f"Δ_{i}(δ^({group.format_monomial(x)}), 1-{k}) = {value} is not {datum.p}-integral; "
                "Σ must contain p and the ramified primes"
            )
        coeffs[s] = reduce_mod_pN(value, datum.p, N).value * pow(datum.kappa_gamma, -k * x.a, mod) % mod
    return RingElement(group, coeffs, N)


# congruences


@dataclass
class CongruenceCheck:
    holds: bool
    lhs: Fraction
    rhs: Fraction
    p: int
    exponent: int

    def __bool__(self):
        return self.holds

    def to_lines(self) -> List[str]:
        verdict = "PASS" if self.holds else "FAIL"
        return [f"CONGRUENCE={verdict} mod {self.p}^{self.exponent}", f"LHS={self.lhs}", f"RHS={self.rhs}"]


def congruent(a: Fraction, b: Fraction, p: int, n: int) -> bool:
    """Whether `a ≡ b` modulo `p^n` in `ℤ_(p)`."""
    if n <= 0:
        return True
    difference = Fraction(a) - Fraction(b)
    return difference == 0 or p_adic_valuation(difference, p) >= n


def dr_congruence_check(
    datum: ZetaDatum, i: int, j_inv: int, eps: LocallyConstantFn, k: int
) -> CongruenceCheck:
    """
    `Δ_i(ε, 1-k) ≡ Δ_(i-1)(ε ∘ ver_i, 1-pk)` modulo `p^(i-j_inv)` for a p-integral ε on
    `G_i^ab/Γ^(j)` fixed by `γ^(p^j_inv)`.
    """
    if not 1 <= i <= datum.depth:
        raise ValueError(f"the congruence compares layers i and i-1 with 1 <= i <= {datum.depth}, got {i}")
    if not eps.is_p_integral():
        raise ValueError("ε must take p-integral values")
    if not eps.is_fixed_by(datum.p**j_inv):
        raise ValueError(f"ε is not fixed by γ^({datum.p}^{j_inv})")
    if k % (datum.p - 1):
        logger.warning_advice(f"congruence at weight {k}, which is not divisible by p - 1 = {datum.p - 1}")
    model = datum.model
    lower = _layer_group(datum, i - 1)
    pulled = eps.pullback(lower, lambda g: transfer_ver(model, i, g))
    lhs = delta_value(datum, i, eps, k)
    rhs = delta_value(datum, i - 1, pulled, datum.p * k)
    exponent = i - j_inv
    holds = congruent(lhs, rhs, datum.p, exponent)
    logger.info(f"Δ_{i} = {lhs}, Δ_{i - 1}∘ver = {rhs}, congruent mod {datum.p}^{exponent}: {holds}")
    return CongruenceCheck(holds, lhs, rhs, datum.p, exponent)


def ver_congruence_check(approximations: Sequence[RingElement], i: int, precision: Optional[int] = None) -> bool:
    """
    `z_i - ver_i(z_(i-1)) ∈ T_i` in `ℤ/p^n[G_i^ab/Γ^(j)]`, by default with `n` one less than the precision of the
    approximations.

    Raises:
        `LevelMismatch`: the approximations do not live at a common level.
    """
    if not 1 <= i < len(approximations):
        raise ValueError(f"need 1 <= i < {len(approximations)}")
    upper, lower = approximations[i], approximations[i - 1]
    for n, z in ((i, upper), (i - 1, lower)):
        if not isinstance(z.group, LayerGroup) or z.group.h_layer != n or z.group.gamma_layer != n:
            raise ModelMismatch(f"approximation {n} does not live on G_{n}^ab")
    model = upper.group.model
    if lower.group.model is not model:
        if lower.group.model.level != model.level:
            raise LevelMismatch(f"approximations at levels {lower.group.model.level} and {model.level}")
        if lower.group.model.spec != model.spec:
            raise ModelMismatch("approximations come from different group models")
        lower = RingElement(model.layer_group(i - 1, i - 1), lower.coeffs, lower.precision)
    n = precision or min(upper.precision, lower.precision) - 1
    if n < 1:
        raise PrecisionExhausted("the ver-congruence loses one digit and needs approximations of precision >= 2")
    difference = (upper - ver_ring(model, i, lower)).truncate(n)
    member = trace_ideal_membership(difference, i, TraceIdealKind.T)
    logger.info(f"z_{i} - ver(z_{i - 1}) in T_{i} modulo {model.p}^{n}: {member.member}")
    return member.member


def sample_weights(p: int, weights: Optional[Sequence[int]] = None) -> List[int]:
    """The configured weights divisible by `p - 1`, padded to at least two."""
    weights = list(weights if weights is not None else get_config().zeta.sample_weights)
    chosen = [k for k in weights if k > 0 and k % (p - 1) == 0]
    multiple = p - 1
    while len(chosen) < 2:
        if multiple not in chosen:
            chosen.append(multiple)
        multiple += p - 1
    return sorted(chosen)


def k_independence_check(
    datum: ZetaDatum, i: int, j: Optional[int] = None, weights: Optional[Sequence[int]] = None
) -> CheckReport:
    """Compare `zeta_approx` across several weights; every weight after the first gets a verdict."""
    weights = sample_weights(datum.p, weights)
    report = CheckReport()
    base = zeta_approx(datum, i, j, weights[0])
    for k in progress(weights[1:], desc="weights"):
        other = zeta_approx(datum, i, j, k)
        same = other == base
        report.record(f"K_INDEPENDENT[{weights[0]},{k}]", same, None if same else other.to_text())
    report.details["WEIGHTS"] = ",".join(str(k) for k in weights)
    report.details["PRECISION"] = str(base.precision)
    return report
