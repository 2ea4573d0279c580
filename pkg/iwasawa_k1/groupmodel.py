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
Finite quotients `G/Γ^(j)` of a one-dimensional p-adic Lie group `G = H ⋊ Γ`, their abelian layers, conjugacy
classes, transfer maps and the group spec file format.

Elements are pairs `(h, a)` standing for `h * γ^a`, with `h` an exponent vector in `H = ⊕ ℤ/d_t` and `a` taken
modulo `p^j`. The product is `(h1, a1) * (h2, a2) = (h1 + A^a1 h2, a1 + a2)`.
"""

import itertools
import os
import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .configuration_utils import FrozenDict
from .errors import IllDefined, InvalidAction, LevelTooSmall, ParseError
from .exactnum import check_prime, p_adic_valuation
from .linalg import mat_mul, smith_normal_form
from .logging import get_logger


logger = get_logger(__name__)


class GroupElement(NamedTuple):
    h: Tuple[int, ...]
    a: int


@dataclass(frozen=True)
class ConjClass:
    index: int
    representative: GroupElement
    members: Tuple[int, ...]
    stratum: int

    @property
    def size(self) -> int:
        return len(self.members)


_TOKEN = re.compile(r"^h(\d*)(?:\^(-?\d+))?$")


class FiniteGroup:
    """
    A finite group `H' × {γ^a : a ∈ step·ℤ/p^level}` with `γ` acting on `H'` through `_action_matrix`.

    The element with H-index `u` and Γ-index `c` (so `a = c * step`) sits at position `u * gamma_size + c`.
    Subclasses set the action. With the default identity action the group is abelian.
    """

    def __init__(self, p: int, orders: Sequence[int], step: int, level: int):
        self.p = p
        self.orders = tuple(int(d) for d in orders)
        self.rank = len(self.orders)
        self.step = step
        self.level = level
        self.gamma_modulus = p**level
        self.gamma_size = self.gamma_modulus // step
        self.h_size = int(np.prod(self.orders, dtype=object)) if self.orders else 1
        self.order = self.h_size * self.gamma_size
        strides = []
        acc = 1
        for d in reversed(self.orders):
            strides.append(acc)
            acc *= d
        self._strides = np.array(list(reversed(strides)), dtype=np.int64)

    # H-part bookkeeping

    def h_index(self, h: Sequence[int]) -> int:
        return int(sum(int(x) % d * s for x, d, s in zip(h, self.orders, self._strides)))

    @cached_property
    def h_coords(self) -> np.ndarray:
        coords = list(itertools.product(*(range(d) for d in self.orders)))
        return np.array(coords, dtype=np.int64).reshape(self.h_size, self.rank)

    def _coords_to_index(self, coords: np.ndarray) -> np.ndarray:
        if self.rank == 0:
            return np.zeros(coords.shape[:-1], dtype=np.int64)
        return (coords % np.array(self.orders, dtype=np.int64) * self._strides).sum(axis=-1)

    @cached_property
    def _h_add_table(self) -> np.ndarray:
        coords = self.h_coords
        return self._coords_to_index(coords[:, None, :] + coords[None, :, :])

    def _action_matrix(self, a: int) -> Optional[np.ndarray]:
        """Matrix of the action of `γ^a` on the H-part, or `None` for the identity."""
        return None

    def act(self, a: int, h: Sequence[int]) -> Tuple[int, ...]:
        matrix = self._action_matrix(a)
        if matrix is None:
            return tuple(int(x) % d for x, d in zip(h, self.orders))
        vec = matrix.dot(np.array(h, dtype=np.int64))
        return tuple(int(x) % d for x, d in zip(vec, self.orders))

    @cached_property
    def _action_table(self) -> np.ndarray:
        # row c holds the H-indices of γ^(c*step) acting on every H-element
        table = np.empty((self.gamma_size, self.h_size), dtype=np.int64)
        for c in range(self.gamma_size):
            matrix = self._action_matrix(c * self.step)
            coords = self.h_coords if matrix is None else self.h_coords.dot(matrix.T)
            table[c] = self._coords_to_index(coords)
        return table

    # elements

    @cached_property
    def elements(self) -> Tuple[GroupElement, ...]:
        out = []
        for coords in self.h_coords:
            h = tuple(int(x) for x in coords)
            out.extend(GroupElement(h, c * self.step) for c in range(self.gamma_size))
        return tuple(out)

    @cached_property
    def index(self) -> FrozenDict:
        return FrozenDict((g, k) for k, g in enumerate(self.elements))

    def index_of(self, g: GroupElement) -> int:
        return self.h_index(g.h) * self.gamma_size + (g.a % self.gamma_modulus) // self.step

    def normalize(self, h: Sequence[int], a: int) -> GroupElement:
        if len(h) != self.rank:
            raise ValueError(f"expected {self.rank} H-coordinates, got {len(h)}")
        a = a % self.gamma_modulus
        if a % self.step:
            raise ValueError(f"γ-exponent {a} is not a multiple of {self.step}")
        return GroupElement(tuple(int(x) % d for x, d in zip(h, self.orders)), a)

    @property
    def identity(self) -> GroupElement:
        return GroupElement((0,) * self.rank, 0)

    def multiply(self, x: GroupElement, y: GroupElement) -> GroupElement:
        acted = self.act(x.a, y.h)
        return GroupElement(
            tuple((u + v) % d for u, v, d in zip(x.h, acted, self.orders)), (x.a + y.a) % self.gamma_modulus
        )

    def inverse(self, x: GroupElement) -> GroupElement:
        back = self.act(-x.a, x.h)
        return GroupElement(tuple(-u % d for u, d in zip(back, self.orders)), -x.a % self.gamma_modulus)

    def power(self, x: GroupElement, n: int) -> GroupElement:
        if n < 0:
            return self.power(self.inverse(x), -n)
        result, base = self.identity, x
        while n:
            if n & 1:
                result = self.multiply(result, base)
            base = self.multiply(base, base)
            n >>= 1
        return result

    def conjugate(self, g: GroupElement, x: GroupElement) -> GroupElement:
        return self.multiply(self.multiply(g, x), self.inverse(g))

    @cached_property
    def mul_table(self) -> np.ndarray:
        idx = np.arange(self.order)
        hx, cx = idx // self.gamma_size, idx % self.gamma_size
        acted = self._action_table[cx][:, hx]
        h = self._h_add_table[hx[:, None], acted]
        c = (cx[:, None] + cx[None, :]) % self.gamma_size
        logger.debug(f"multiplication table of order {self.order} built")
        return h * self.gamma_size + c

    @cached_property
    def inv_table(self) -> np.ndarray:
        identity = self.index_of(self.identity)
        return np.argmax(self.mul_table == identity, axis=1)

    @property
    def is_abelian(self) -> bool:
        return bool((self.mul_table == self.mul_table.T).all())

    # conjugacy classes

    def _compute_classes(self) -> List[ConjClass]:
        return [ConjClass(k, g, (k,), 0) for k, g in enumerate(self.elements)]

    @cached_property
    def classes(self) -> Tuple[ConjClass, ...]:
        return tuple(self._compute_classes())

    @cached_property
    def class_index(self) -> np.ndarray:
        out = np.empty(self.order, dtype=np.int64)
        for cls in self.classes:
            out[list(cls.members)] = cls.index
        return out

    # text

    def h_names(self) -> List[str]:
        return ["h"] if self.rank == 1 else [f"h{t + 1}" for t in range(self.rank)]

    def format_monomial(self, g: GroupElement, coefficient: int = 1) -> str:
        factors = [str(coefficient)] if coefficient != 1 else []
        factors += [f"{name}^{k}" for name, k in zip(self.h_names(), g.h) if k]
        return f"{'*'.join(factors) or '1'}@g^{g.a}"

    def parse_monomial(self, text: str) -> Tuple[int, GroupElement]:
        """Parse `c*h1^k*h3^m@g^b` into `(c, element)`. Exponents and coefficients are normalised."""
        text = text.strip()
        left, _, right = text.partition("@")
        a = 0
        if right:
            right = right.strip()
            match = re.fullmatch(r"g(?:\^(-?\d+))?", right)
            if not match:
                raise ParseError(f"cannot read the Γ-part {right!r} of {text!r}")
            a = int(match.group(1)) if match.group(1) is not None else 1
        coefficient = 1
        h = [0] * self.rank
        for token in (t.strip() for t in left.split("*")):
            if not token:
                raise ParseError(f"empty factor in {text!r}")
            if re.fullmatch(r"-?\d+", token):
                coefficient *= int(token)
                continue
            match = _TOKEN.match(token)
            if not match:
                raise ParseError(f"cannot read the factor {token!r} of {text!r}")
            slot = int(match.group(1)) if match.group(1) else 1
            if not 1 <= slot <= self.rank or (self.rank > 1 and not match.group(1)):
                raise ParseError(f"{token!r} does not name one of the generators {', '.join(self.h_names())}")
            h[slot - 1] += int(match.group(2)) if match.group(2) is not None else 1
        try:
            return coefficient, self.normalize(h, a)
        except ValueError as err:
            raise ParseError(str(err)) from err


class LayerGroup(FiniteGroup):
    """
    The abelian group `H_k × Γ^(g)/Γ^(j)` where `H_k` is the k-th abelian layer of a model. `G_i^ab` is the case
    `k = g = i`; the codomains of the trace, norm and projection maps use `k < g`.
    """

    def __init__(self, model: "GroupModel", h_layer: int, gamma_layer: int):
        self.model = model
        self.h_layer = h_layer
        self.gamma_layer = gamma_layer
        super().__init__(model.p, model.layer(h_layer).orders, model.p**gamma_layer, model.level)

    def __repr__(self):
        return f"LayerGroup(H_{self.h_layer} x Gamma^({self.gamma_layer}) / Gamma^({self.level}))"

    def gamma_conjugate(self, g: GroupElement, k: int = 1) -> GroupElement:
        """`γ^k g γ^-k`: the action of `A^k` on the H-part, trivial on the Γ-part."""
        return GroupElement(self.model.layer(self.h_layer).act(k, g.h), g.a)

    @lru_cache(maxsize=None)
    def gamma_conjugation_perm(self, k: int = 1) -> np.ndarray:
        return np.array([self.index_of(self.gamma_conjugate(g, k)) for g in self.elements], dtype=np.int64)


class AbelianLayer:
    """
    `H_i = H / (A^(p^i) - 1) H` in Smith coordinates.

    Attributes:
        orders (`Tuple[int, ...]`): invariant factors larger than one.
        projection (`np.ndarray`): `h ↦ projection @ h mod orders` is the quotient map `H → H_i`.
        section (`np.ndarray`): `hbar ↦ section @ hbar mod d` is a set-theoretic lift `H_i → H`.
        gamma_action (`np.ndarray`): the automorphism of `H_i` induced by `A`.
    """

    def __init__(self, model: "GroupModel", i: int):
        self.model = model
        self.i = i
        r = model.rank
        relation = np.concatenate(
            [np.diag(model.orders).astype(np.int64), model.action_power(model.p**i) - np.eye(r, dtype=np.int64)],
            axis=1,
        ) if r else np.zeros((0, 0), dtype=np.int64)
        if r:
            U, S, _, U_inv = smith_normal_form(relation.tolist())
            diag = [S[t][t] for t in range(r)]
        else:
            U, U_inv, diag = [], [], []
        keep = [t for t, s in enumerate(diag) if s != 1]
        self.orders = tuple(int(diag[t]) for t in keep)
        self.projection = np.array([[U[t][s] % diag[t] for s in range(r)] for t in keep], dtype=np.int64).reshape(
            len(keep), r
        )
        self.section = np.array([[U_inv[s][t] for t in keep] for s in range(r)], dtype=np.int64).reshape(
            r, len(keep)
        )
        A = model.action_power(1)
        self.gamma_action = np.array(
            [self._project_vec(A.dot(self.section[:, t])) for t in range(len(keep))], dtype=np.int64
        ).T.reshape(len(keep), len(keep))
        logger.debug(f"H_{i} has invariant factors {self.orders}")

    def _project_vec(self, h: np.ndarray) -> Tuple[int, ...]:
        vec = self.projection.dot(np.asarray(h, dtype=np.int64) % np.array(self.model.orders, dtype=np.int64))
        return tuple(int(x) % d for x, d in zip(vec, self.orders))

    @property
    def size(self) -> int:
        return int(np.prod(self.orders, dtype=object)) if self.orders else 1

    def project(self, h: Sequence[int]) -> Tuple[int, ...]:
        return self._project_vec(np.array(h, dtype=np.int64))

    def lift(self, hbar: Sequence[int]) -> Tuple[int, ...]:
        vec = self.section.dot(np.array(hbar, dtype=np.int64)) if self.orders else np.zeros(self.model.rank)
        return tuple(int(x) % d for x, d in zip(vec, self.model.orders))

    def act(self, k: int, hbar: Sequence[int]) -> Tuple[int, ...]:
        """Action of `A^k` on `H_i`."""
        vec = np.array(hbar, dtype=np.int64)
        k %= self.model.p**self.model.e
        for _ in range(k):
            vec = self.gamma_action.dot(vec) % np.array(self.orders, dtype=np.int64)
        return tuple(int(x) for x in vec)

    def orbit(self, hbar: Sequence[int]) -> Tuple[Tuple[int, ...], ...]:
        seen = [tuple(hbar)]
        current = tuple(hbar)
        while True:
            current = self.act(1, current)
            if current == seen[0]:
                return tuple(seen)
            seen.append(current)

    @property
    def group(self) -> LayerGroup:
        return self.model.layer_group(self.i, self.i)


@dataclass
class GroupSpec:
    """
    Parameters of a group model, as read from a `.grp` file:

    ```
    # optional comment lines
    p=3
    e=1
    orders=9
    action=4
    level=2
    precision=3
    ```

    `orders` lists `d_1, ..., d_r` and `action` the matrix `A` in row-major order, both comma separated.
    """

    p: int
    e: int
    orders: Tuple[int, ...]
    action: Tuple[Tuple[int, ...], ...]
    level: int
    precision: int
    comments: Tuple[str, ...] = field(default=(), compare=False)

    _KEYS = ("p", "e", "orders", "action", "level", "precision")

    @classmethod
    def parse(cls, text: str) -> "GroupSpec":
        comments, values = [], {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                comments.append(raw.rstrip())
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep or key not in cls._KEYS:
                raise ParseError(f"line {lineno}: expected one of {', '.join(cls._KEYS)} as key=value, got {raw!r}")
            if key in values:
                raise ParseError(f"line {lineno}: duplicate key {key!r}")
            values[key] = value.strip()
        missing = [k for k in cls._KEYS if k not in values]
        if missing:
            raise ParseError(f"missing keys: {', '.join(missing)}")
        try:
            orders = tuple(int(x) for x in values["orders"].split(","))
            flat = [int(x) for x in values["action"].split(",")]
            r = len(orders)
            if len(flat) != r * r:
                raise ParseError(f"action has {len(flat)} entries, expected {r * r} for {r} generators")
            action = tuple(tuple(flat[s * r : (s + 1) * r]) for s in range(r))
            return cls(
                p=int(values["p"]),
                e=int(values["e"]),
                orders=orders,
                action=action,
                level=int(values["level"]),
                precision=int(values["precision"]),
                comments=tuple(comments),
            )
        except ValueError as err:
            if isinstance(err, ParseError):
                raise
            raise ParseError(f"non-integer value in group spec: {err}") from err

    @classmethod
    def from_file(cls, path: Union[str, os.PathLike]) -> "GroupSpec":
        with open(path, encoding="utf-8") as f:
            return cls.parse(f.read())

    def to_text(self) -> str:
        lines = list(self.comments)
        lines += [
            f"p={self.p}",
            f"e={self.e}",
            f"orders={','.join(str(d) for d in self.orders)}",
            f"action={','.join(str(x) for row in self.action for x in row)}",
            f"level={self.level}",
            f"precision={self.precision}",
        ]
        return "\n".join(lines) + "\n"

    def save(self, path: Union[str, os.PathLike]) -> None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(self.to_text())


class GroupModel(FiniteGroup):
    """The finite quotient `G/Γ^(j)` of `G = H ⋊ Γ`. Build it with `build_group`."""

    def __init__(self, spec: GroupSpec):
        self.spec = spec
        self.e = spec.e
        self.precision = spec.precision
        self.action = np.array(spec.action, dtype=np.int64).reshape(len(spec.orders), len(spec.orders))
        self._ver_checked = set()
        super().__init__(spec.p, spec.orders, 1, spec.level)
        self._action_powers = FrozenDict(
            (k, self._compute_action_power(k)) for k in range(self.p ** max(self.e, 0))
        )

    def __repr__(self):
        return (
            f"GroupModel(p={self.p}, e={self.e}, orders={self.orders}, action={self.spec.action}, "
            f"level={self.level}, precision={self.precision})"
        )

    def _reduce_rows(self, matrix: np.ndarray) -> np.ndarray:
        return matrix % np.array(self.orders, dtype=np.int64)[:, None] if self.rank else matrix

    def _compute_action_power(self, k: int) -> np.ndarray:
        result = np.eye(self.rank, dtype=np.int64)
        for _ in range(k):
            result = self._reduce_rows(self.action.dot(result))
        return result

    def action_power(self, k: int) -> np.ndarray:
        """`A^k` with rows reduced modulo the orders; `A^(p^e)` is the identity."""
        return self._action_powers[k % self.p**self.e]

    def _action_matrix(self, a: int) -> Optional[np.ndarray]:
        k = a % self.p**self.e
        return None if k == 0 else self._action_powers[k]

    def stratum(self, a: int) -> int:
        """`min(v_p(a), e)` for `a` read in ℤ_p, with `a ≡ 0 mod p^j` standing for `p^j ℤ_p`."""
        a %= self.gamma_modulus
        if a == 0:
            return self.e
        return min(p_adic_valuation(a, self.p), self.e)

    @lru_cache(maxsize=None)
    def layer(self, i: int) -> AbelianLayer:
        if not 0 <= i <= self.level:
            raise ValueError(f"layer index {i} is outside 0..{self.level}")
        return AbelianLayer(self, i)

    @lru_cache(maxsize=None)
    def layer_group(self, h_layer: int, gamma_layer: int) -> LayerGroup:
        if not 0 <= h_layer <= gamma_layer <= self.level:
            raise ValueError(f"need 0 <= {h_layer} <= {gamma_layer} <= {self.level} for a layer group")
        return LayerGroup(self, h_layer, gamma_layer)

    def abelianize(self, i: int, g: GroupElement) -> GroupElement:
        """Image of `g ∈ G_i` in `G_i^ab`."""
        if g.a % self.p**i:
            raise ValueError(f"{g} does not lie in G_{i}")
        return GroupElement(self.layer(i).project(g.h), g.a % self.gamma_modulus)

    def with_level(self, level: int) -> "GroupModel":
        return build_group(_replace(self.spec, level=level))

    def with_precision(self, precision: int) -> "GroupModel":
        return build_group(_replace(self.spec, precision=precision))

    def _compute_classes(self) -> List[ConjClass]:
        buckets: Dict[tuple, List[int]] = {}
        for k, g in enumerate(self.elements):
            i = self.stratum(g.a)
            orbit = self.layer(i).orbit(self.layer(i).project(g.h))
            buckets.setdefault((g.a, min(orbit)), []).append(k)
        ordered = sorted(buckets.values(), key=lambda members: members[0])
        return [
            ConjClass(n, self.elements[m[0]], tuple(m), self.stratum(self.elements[m[0]].a))
            for n, m in enumerate(ordered)
        ]


def _replace(spec: GroupSpec, **changes) -> GroupSpec:
    values = dict(
        p=spec.p, e=spec.e, orders=spec.orders, action=spec.action, level=spec.level, precision=spec.precision
    )
    values.update(changes)
    return GroupSpec(comments=spec.comments, **values)


def _validate(spec: GroupSpec) -> None:
    check_prime(spec.p)
    r = len(spec.orders)
    if spec.e < 0:
        raise InvalidAction(f"e must be non-negative, got {spec.e}")
    if spec.precision < 1:
        raise ValueError(f"precision must be at least 1, got {spec.precision}")
    for d in spec.orders:
        if d < 1 or spec.p ** (p_adic_valuation(d, spec.p) or 0) != d:
            raise InvalidAction(f"order {d} is not a power of {spec.p}")
    if len(spec.action) != r or any(len(row) != r for row in spec.action):
        raise InvalidAction(f"action must be a {r}x{r} matrix")
    for s in range(r):
        for t in range(r):
            if spec.action[s][t] * spec.orders[t] % spec.orders[s]:
                raise InvalidAction(
                    f"action entry ({s + 1},{t + 1}) = {spec.action[s][t]} does not respect the orders "
                    f"{spec.orders[t]} -> {spec.orders[s]}"
                )

    def reduce(matrix):
        return [[x % spec.orders[s] for x in row] for s, row in enumerate(matrix)]

    identity = reduce([[int(s == t) for t in range(r)] for s in range(r)])
    powers = [reduce(spec.action)]  # powers[k] = A^(p^k)
    for _ in range(spec.e):
        base = last = powers[-1]
        for _ in range(spec.p - 1):
            last = reduce(mat_mul(base, last))
        powers.append(last)
    if powers[-1] != identity:
        raise InvalidAction(f"A^({spec.p}^{spec.e}) is not the identity on H")
    if spec.e > 0 and powers[-2] == identity:
        raise InvalidAction(f"e = {spec.e} is not minimal: A^({spec.p}^{spec.e - 1}) is already the identity")
    if spec.level < spec.e:
        raise LevelTooSmall(f"level {spec.level} is smaller than e = {spec.e}")


def build_group(spec: GroupSpec) -> GroupModel:
    """
    Validate a group spec and build the model.

    Raises:
        `InvalidAction`: `A` does not respect the orders, `A^(p^e) != 1`, or `e` is not minimal.
        `LevelTooSmall`: `level < e`.
    """
    _validate(spec)
    model = GroupModel(spec)
    logger.info(f"built {model!r} of order {model.order}")
    return model


def abelianization(model: GroupModel, i: int) -> AbelianLayer:
    """`H_i = H / (γ^(p^i) - 1)H` with its cyclic decomposition and projection from H."""
    return model.layer(i)


def conjugacy_classes(model: FiniteGroup) -> Tuple[ConjClass, ...]:
    return model.classes


def conjugacy_classes_by_orbits(model: FiniteGroup) -> List[frozenset]:
    """Classes found by closing every element under conjugation by every element."""
    table, inv = model.mul_table, model.inv_table
    parent = list(range(model.order))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in range(model.order):
        conj = table[table[g, :], inv[g]]
        for x, y in enumerate(conj):
            rx, ry = find(x), find(int(y))
            if rx != ry:
                parent[max(rx, ry)] = min(rx, ry)
    groups: Dict[int, set] = {}
    for x in range(model.order):
        groups.setdefault(find(x), set()).add(x)
    return [frozenset(members) for members in groups.values()]


def _check_ver_well_defined(model: GroupModel, i: int) -> None:
    layer = model.layer(i)
    step = model.p ** (i - 1)
    base = model.action_power(step) - np.eye(model.rank, dtype=np.int64)
    for t in range(model.rank):
        w = base[:, t]
        image = sum(model.action_power(k * step).dot(w) for k in range(model.p))
        if any(layer.project(image)):
            raise IllDefined(f"ver from layer {i - 1} to {i} does not kill the relation generator {t + 1}")


def transfer_ver(model: GroupModel, i: int, x: GroupElement) -> GroupElement:
    """
    The transfer `G_(i-1)^ab → G_i^ab`.

    `x = (hbar, a)` lives in `G_(i-1)^ab`. If `a` generates `p^(i-1) ℤ_p` the transfer is the p-th power of a lift,
    otherwise it is `(Σ_{k<p} A^(k p^(i-1)) h, p a)`.
    """
    if not 1 <= i <= model.level:
        raise ValueError(f"ver needs 1 <= i <= {model.level}, got {i}")
    _ver_checked(model, i)
    h = model.layer(i - 1).lift(x.h)
    a = x.a % model.gamma_modulus
    if a and p_adic_valuation(a, model.p) == i - 1:
        powered = model.power(GroupElement(h, a), model.p)
        h_new, a_new = powered.h, powered.a
    else:
        step = model.p ** (i - 1)
        h_new = np.zeros(model.rank, dtype=np.int64)
        for k in range(model.p):
            h_new = h_new + model.action_power(k * step).dot(np.array(h, dtype=np.int64))
        a_new = model.p * a
    return GroupElement(model.layer(i).project(h_new), a_new % model.gamma_modulus)


def _ver_checked(model: GroupModel, i: int) -> None:
    if i not in model._ver_checked:
        _check_ver_well_defined(model, i)
        model._ver_checked.add(i)


def p_power_phi(model: FiniteGroup, g: GroupElement) -> GroupElement:
    return model.power(g, model.p)


@dataclass(frozen=True)
class SpecialTypeResult:
    is_special: bool
    # (generator number starting at 1, layer index i) of the first failure
    witness: Optional[Tuple[int, int]] = None

    def __bool__(self):
        return self.is_special


def is_special_type(model: GroupModel) -> SpecialTypeResult:
    """
    Whether the p-power map descends to homomorphisms `G_i^ab → G_(i+1)^ab` for every `i < e`, checked on the
    generators of H: `[h^p]` against `[Σ_{k<p} A^(k p^i) h]` in `H_(i+1)`.
    """
    for i in range(model.e):
        layer = model.layer(i + 1)
        step = model.p**i
        for t in range(model.rank):
            e_t = np.zeros(model.rank, dtype=np.int64)
            e_t[t] = 1
            twisted = sum(model.action_power(k * step).dot(e_t) for k in range(model.p))
            if layer.project(model.p * e_t) != layer.project(twisted):
                logger.debug(f"not of special type: generator {t + 1} fails on layer {i}")
                return SpecialTypeResult(False, (t + 1, i))
    return SpecialTypeResult(True)
