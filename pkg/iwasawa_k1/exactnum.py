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
Exact numbers: rationals, residues modulo p^N with a precision ledger, and elements of cyclotomic fields ℚ(ζ_m).
"""

import contextlib
import contextvars
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, List, Optional, Tuple, Union

from sympy import QQ, Poly, Rational, cyclotomic_poly, invert, isprime, symbols, totient
from sympy.polys.polyerrors import NotInvertible

from .errors import DenominatorDivisible, DivisionByZero, ModulusMismatch
from .logging import get_logger


logger = get_logger(__name__)

ExactRational = Fraction

_x = symbols("x")


@dataclass(frozen=True)
class LedgerEntry:
    operation: str
    before: int
    after: int


_ledger: contextvars.ContextVar = contextvars.ContextVar("iwasawa_k1_precision_ledger", default=None)


@contextlib.contextmanager
def precision_ledger():
    """
    Collect every precision truncation performed inside the block.

    ```python
    with precision_ledger() as entries:
        Residue(1, 3, 4) + Residue(1, 3, 2)
    assert entries == [LedgerEntry("add", 4, 2)]
    ```
    """
    entries: List[LedgerEntry] = []
    token = _ledger.set(entries)
    try:
        yield entries
    finally:
        _ledger.reset(token)


def record_truncation(operation: str, before: int, after: int) -> None:
    if before == after:
        return
    logger.debug(f"{operation}: precision truncated from {before} to {after}")
    entries = _ledger.get()
    if entries is not None:
        entries.append(LedgerEntry(operation, before, after))


def check_prime(p: int) -> int:
    if not isinstance(p, int) or p < 3 or not isprime(p):
        raise ValueError(f"p must be an odd prime, got {p!r}")
    return p


@dataclass(frozen=True)
class AtLeastN:
    """Valuation of an element that vanishes at the working precision N: only `v ≥ N` is known."""

    n: int

    def __repr__(self):
        return f"AtLeastN({self.n})"


def p_adic_valuation(q: Union[int, Fraction], p: int) -> Optional[int]:
    """Valuation of a nonzero rational at p. Returns `None` for zero."""
    q = Fraction(q)
    if q == 0:
        return None
    num, den = q.numerator, q.denominator
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


@dataclass(frozen=True)
class Residue:
    """An element of ℤ/p^N, stored by its representative in [0, p^N)."""

    value: int
    p: int
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"precision N must be at least 1, got {self.N}")
        object.__setattr__(self, "value", int(self.value) % (self.p**self.N))

    @property
    def modulus(self) -> int:
        return self.p**self.N

    def _align(self, other, operation: str) -> Tuple[int, int, int]:
        if isinstance(other, Residue):
            if other.p != self.p:
                raise ModulusMismatch(f"cannot combine residues modulo powers of {self.p} and {other.p}")
            N = min(self.N, other.N)
            record_truncation(operation, max(self.N, other.N), N)
            return self.value, other.value, N
        if isinstance(other, int):
            return self.value, other, self.N
        if isinstance(other, Fraction):
            return self.value, reduce_mod_pN(other, self.p, self.N).value, self.N
        return NotImplemented

    def _binary(self, other, operation: str, fn: Callable[[int, int], int]):
        aligned = self._align(other, operation)
        if aligned is NotImplemented:
            return NotImplemented
        a, b, N = aligned
        return Residue(fn(a, b), self.p, N)

    def __add__(self, other):
        return self._binary(other, "add", lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, "sub", lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binary(other, "sub", lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, "mul", lambda a, b: a * b)

    __rmul__ = __mul__

    def __neg__(self):
        return Residue(-self.value, self.p, self.N)

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return Residue(pow(self.value, n, self.modulus), self.p, self.N)

    def __truediv__(self, other):
        if isinstance(other, int):
            other = Residue(other, self.p, self.N)
        if not isinstance(other, Residue):
            return NotImplemented
        return self * other.inverse()

    def is_unit(self) -> bool:
        return self.value % self.p != 0

    def inverse(self) -> "Residue":
        if self.value == 0:
            raise DivisionByZero(f"0 has no inverse modulo {self.p}^{self.N}")
        if not self.is_unit():
            raise DenominatorDivisible(
                f"{self.value} is divisible by {self.p} and has no inverse modulo {self.p}^{self.N}"
            )
        return Residue(pow(self.value, -1, self.modulus), self.p, self.N)

    def truncate(self, N: int) -> "Residue":
        if N > self.N:
            raise ValueError(f"cannot truncate precision {self.N} up to {N}; use `lift`")
        record_truncation("truncate", self.N, N)
        return Residue(self.value, self.p, N)

    def lift(self, N: int) -> "Residue":
        """Same representative at precision N ≥ self.N. The extra digits are a choice, not a certified value."""
        if N < self.N:
            raise ValueError(f"cannot lift precision {self.N} down to {N}; use `truncate`")
        return Residue(self.value, self.p, N)

    def signed(self) -> int:
        """Representative in (-p^N/2, p^N/2]."""
        m = self.modulus
        return self.value - m if self.value > m // 2 else self.value

    def __int__(self):
        return self.value

    def __str__(self):
        return f"{self.value} mod {self.p}^{self.N}"


def reduce_mod_pN(q: Union[int, Fraction], p: int, N: int) -> Residue:
    """
    Reduce a p-integral rational modulo p^N.

    Raises:
        `DenominatorDivisible`: the reduced denominator of `q` is divisible by p.
    """
    q = Fraction(q)
    if q.denominator % p == 0:
        raise DenominatorDivisible(f"{q} is not p-integral for p = {p}")
    m = p**N
    return Residue(q.numerator * pow(q.denominator, -1, m), p, N)


def valuation(x: Residue) -> Union[int, AtLeastN]:
    if x.value == 0:
        return AtLeastN(x.N)
    return p_adic_valuation(x.value, x.p)


# cyclotomic fields


@lru_cache(maxsize=None)
def cyclotomic_coefficients(m: int) -> Tuple[int, ...]:
    """Coefficients of Φ_m, constant term first."""
    return tuple(int(c) for c in reversed(Poly(cyclotomic_poly(m, _x), _x).all_coeffs()))


@lru_cache(maxsize=None)
def _power_table(m: int) -> Tuple[Tuple[int, ...], ...]:
    # coordinates of ζ^t, 0 ≤ t < max(m, 2φ(m) - 1), in the power basis 1, ζ, ..., ζ^(φ-1)
    phi = int(totient(m))
    phi_coeffs = cyclotomic_coefficients(m)
    size = max(m, 2 * phi - 1)
    table = []
    current = [1] + [0] * (phi - 1)
    for _ in range(size):
        table.append(tuple(current))
        top = current[-1]
        current = [0] + current[:-1]
        if top:
            for s in range(phi):
                current[s] -= top * phi_coeffs[s]
    return tuple(table)


@dataclass(frozen=True)
class CycloRational:
    """
    An element of ℚ(ζ_m) in the power basis 1, ζ, ..., ζ^(φ(m)-1), reduced modulo the cyclotomic polynomial Φ_m.
    """

    m: int
    coords: Tuple[Fraction, ...] = field(default=())

    def __post_init__(self):
        phi = int(totient(self.m))
        coords = tuple(Fraction(c) for c in self.coords)
        if len(coords) < phi:
            coords = coords + (Fraction(0),) * (phi - len(coords))
        elif len(coords) > phi:
            coords = _reduce_coordinates(self.m, coords)
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_rational(cls, m: int, q: Union[int, Fraction]) -> "CycloRational":
        return cls(m, (Fraction(q),))

    @classmethod
    def zero(cls, m: int) -> "CycloRational":
        return cls(m, ())

    @classmethod
    def one(cls, m: int) -> "CycloRational":
        return cls.from_rational(m, 1)

    @classmethod
    def root_of_unity(cls, m: int, exponent: int) -> "CycloRational":
        """ζ_m^exponent."""
        return cls(m, _power_table(m)[exponent % m])

    def _coerce(self, other) -> "CycloRational":
        if isinstance(other, CycloRational):
            if other.m != self.m:
                raise ModulusMismatch(f"cannot combine elements of Q(zeta_{self.m}) and Q(zeta_{other.m})")
            return other
        if isinstance(other, (int, Fraction)):
            return CycloRational.from_rational(self.m, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycloRational(self.m, tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        return CycloRational(self.m, tuple(-a for a in self.coords))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloRational(self.m, tuple(a * other for a in self.coords))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        conv = [Fraction(0)] * (2 * len(self.coords) - 1)
        for s, a in enumerate(self.coords):
            if a:
                for t, b in enumerate(other.coords):
                    if b:
                        conv[s + t] += a * b
        return CycloRational(self.m, _reduce_coordinates(self.m, tuple(conv)))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result, base = CycloRational.one(self.m), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DivisionByZero("division of a cyclotomic element by 0")
            return self * (Fraction(1) / Fraction(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def is_zero(self) -> bool:
        return not any(self.coords)

    def inverse(self) -> "CycloRational":
        if self.is_zero():
            raise DivisionByZero(f"0 has no inverse in Q(zeta_{self.m})")
        f = Poly([Rational(c.numerator, c.denominator) for c in reversed(self.coords)], _x, domain=QQ)
        g = Poly(cyclotomic_poly(self.m, _x), _x, domain=QQ)
        try:
            inv = invert(f, g)
        except NotInvertible as err:
            raise DivisionByZero(f"{self} is not invertible in Q(zeta_{self.m})") from err
        coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(inv.all_coeffs())]
        return CycloRational(self.m, tuple(coeffs))

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} does not lie in Q")
        return self.coords[0]

    def __str__(self):
        terms = [f"({c})*z^{t}" if t else f"({c})" for t, c in enumerate(self.coords) if c]
        return " + ".join(terms) if terms else "0"


def _reduce_coordinates(m: int, coords: Tuple[Fraction, ...]) -> Tuple[Fraction, ...]:
    phi = int(totient(m))
    table = _power_table(m)
    if len(coords) > len(table):
        table = _extend_table(m, len(coords))
    out = list(coords[:phi]) + [Fraction(0)] * max(0, phi - len(coords))
    for t in range(phi, len(coords)):
        c = coords[t]
        if c:
            for s, v in enumerate(table[t]):
                if v:
                    out[s] += c * v
    return tuple(out)


def _extend_table(m: int, size: int) -> Tuple[Tuple[int, ...], ...]:
    base = _power_table(m)
    return tuple(base[t % m] for t in range(size))


def cyclo_arith(a: CycloRational, b: Optional[CycloRational], op: str) -> CycloRational:
    """
    Field operation `op` in {"+", "-", "*", "/", "inv"} on elements of the same ℚ(ζ_m). `inv` is unary and
    ignores `b`, which may be `None`.
    """
    if op == "inv":
        return a.inverse()
    if b is None:
        raise ValueError(f"operation {op!r} needs two operands")
    if a.m != b.m:
        raise ModulusMismatch(f"cannot combine elements of Q(zeta_{a.m}) and Q(zeta_{b.m})")
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        return a / b
    raise ValueError(f"unknown operation {op!r}, has to be one of +, -, *, /, inv")
