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
"""Seeded generators of group elements, ring elements, units and trace elements for property checks."""

import random
from typing import Optional

import numpy as np

from .configuration_utils import get_config
from .groupmodel import FiniteGroup, GroupElement
from .groupring import RingElement, TraceElement


def set_seed(seed: int):
    """
    Helper function for reproducible behavior to set the seed in `random` and `numpy`.

    Args:
        seed (`int`): The seed to set.
    """
    random.seed(seed)
    np.random.seed(seed)


def make_rng(seed: Optional[int] = None) -> np.random.Generator:
    """A `numpy.random.Generator` seeded with `seed`, or with `random.seed` from the active configuration."""
    if seed is None:
        seed = get_config().random.seed
    return np.random.default_rng(seed)


def _residues(rng: np.random.Generator, modulus: int, size: int) -> np.ndarray:
    return np.array([int(x) for x in rng.integers(0, modulus, size=size)], dtype=object)


def random_group_element(group: FiniteGroup, rng: np.random.Generator) -> GroupElement:
    return group.elements[int(rng.integers(0, group.order))]


def random_ring_element(group: FiniteGroup, precision: int, rng: np.random.Generator) -> RingElement:
    return RingElement(group, _residues(rng, group.p**precision, group.order), precision)


def random_unit(group: FiniteGroup, precision: int, rng: np.random.Generator) -> RingElement:
    """A uniformly random element, shifted by a multiple of the identity until its augmentation is prime to p."""
    x = random_ring_element(group, precision, rng)
    aug = x.augmentation() % group.p
    if aug == 0:
        shift = int(rng.integers(1, group.p))
        x = x + RingElement.scalar(group, shift, precision)
    return x


def random_radical(group: FiniteGroup, precision: int, rng: np.random.Generator) -> RingElement:
    """A random element of the Jacobson radical `(p, I)`, i.e. with augmentation divisible by p."""
    x = random_ring_element(group, precision, rng)
    aug = x.augmentation() % group.p
    if aug:
        x = x - RingElement.scalar(group, aug, precision)
    return x


def random_p_radical(group: FiniteGroup, precision: int, rng: np.random.Generator) -> RingElement:
    """A random element of `p·J`."""
    return random_radical(group, precision, rng) * group.p


def random_trace_element(group: FiniteGroup, precision: int, rng: np.random.Generator) -> TraceElement:
    return TraceElement(group, _residues(rng, group.p**precision, len(group.classes)), precision)
