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
"""Exceptions raised by the library. Every class derives from `IwasawaK1Error` and from the closest builtin."""


class IwasawaK1Error(Exception):
    """Base class of all library errors."""


class ParseError(IwasawaK1Error, ValueError):
    """A group spec, tuple file, datum or element text could not be read."""


# exact numbers


class DenominatorDivisible(IwasawaK1Error, ValueError):
    """A rational with denominator divisible by p was reduced modulo p^N."""


class DivisionByZero(IwasawaK1Error, ZeroDivisionError):
    pass


class ModulusMismatch(IwasawaK1Error, ValueError):
    """Operands live over different primes or cyclotomic fields."""


# group models


class InvalidAction(IwasawaK1Error, ValueError):
    """The action matrix is not an automorphism of the given order, or e is not minimal."""


class LevelTooSmall(IwasawaK1Error, ValueError):
    pass


class IllDefined(IwasawaK1Error, ValueError):
    """A map on a quotient does not respect the relations it must kill."""


# group rings


class ModelMismatch(IwasawaK1Error, ValueError):
    """Operands belong to different group rings."""


class NotAUnit(IwasawaK1Error, ArithmeticError):
    pass


class BadDenominator(IwasawaK1Error, ValueError):
    """A fraction denominator is outside the central multiplicative set."""


class NotInIdeal(IwasawaK1Error, ValueError):
    pass


# maps and logarithms


class NotInPsi(IwasawaK1Error, ValueError):
    pass


class InexactDivision(IwasawaK1Error, ArithmeticError):
    pass


class DescentFailure(IwasawaK1Error, ArithmeticError):
    """A value expected in the base ring kept a non-trivial cyclotomic coordinate."""


class PrecisionExhausted(IwasawaK1Error, ArithmeticError):
    pass


class IntegralityFailure(IwasawaK1Error, ArithmeticError):
    """The integral logarithm produced a non-integral value."""


class NotInPhi(IwasawaK1Error, ValueError):
    pass


class TooLarge(IwasawaK1Error, ValueError):
    """The requested dense computation exceeds the configured size limit."""


# zeta side


class NonAbelianTower(IwasawaK1Error, ValueError):
    pass


class NonIntegralDelta(IwasawaK1Error, ArithmeticError):
    pass


class LevelMismatch(IwasawaK1Error, ValueError):
    pass


class InvalidDatum(IwasawaK1Error, ValueError):
    """A zeta datum is inconsistent (Artin map, Σ, or κ)."""
