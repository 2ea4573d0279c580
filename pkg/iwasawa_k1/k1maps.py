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
Maps between the group ring of `G/Γ^(j)` and the group rings of its abelian layers `G_i^ab = H_i × Γ^(i)/Γ^(j)`.

Multiplicative side:

* `theta(model, i, x)`: norm of `x` down to `Λ(G_i)` (determinant of right multiplication on the basis
  `1, γ, ..., γ^(p^i - 1)`) followed by abelianization.
* `norm_Nr(model, j, i, x)`: the same construction for `Λ(G_j^ab)` over `Λ(H_j × Γ^(i))`.

Additive side:

* `beta(model, i, t)`: restriction of a trace element to `G_i` followed by abelianization.
* `tau(model, tup)`: the left inverse of `beta` on tuples satisfying the Ψ conditions.
* `tr_map` and `pi_map`: the module trace and the coefficientwise projection into `Λ(H_j × Γ^(i))`.

Glue between the layers: `ver_ring`, `phi_ring`, `phi_trace` and the ω-twists `omega_twist_product`,
`omega_twist_sum`.
"""

import os
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    DescentFailure,
    InexactDivision,
    ModelMismatch,
    NotAUnit,
    NotInPsi,
    ParseError,
    PrecisionExhausted,
)
from .exactnum import CycloRational
from .groupmodel import GroupElement, GroupModel, LayerGroup, p_power_phi, transfer_ver
from .groupring import RingElement, TraceElement, parse_element, project_level
from .linalg import berkowitz_det
from .logging import get_logger


logger = get_logger(__name__)

FLAVORS = ("additive", "multiplicative")


def _check_layer(model: GroupModel, i: int, lowest: int = 0) -> None:
    if not lowest <= i <= model.e:
        raise ValueError(f"layer index {i} is outside {lowest}..{model.e}")


def _check_on(x: RingElement, group) -> None:
    if x.group is not group:
        raise ModelMismatch(f"expected an element of {group!r}, got one of {x.group!r}")


def _h_projection_map(model: GroupModel, k: int) -> np.ndarray:
    """Array sending the H-index of `h` in the model to the H-index of its image in `H_k`."""
    cache = model.__dict__.setdefault("_h_projection_cache", {})
    if k not in cache:
        layer = model.layer(k)
        coords = model.h_coords.dot(layer.projection.T)
        cache[k] = model.layer_group(k, k)._coords_to_index(coords)
    return cache[k]


def _h_layer_map(model: GroupModel, i: int, k: int) -> np.ndarray:
    """H-index map `H_i → H_k` for `k <= i`."""
    out = np.zeros(model.layer_group(i, i).h_size, dtype=np.int64)
    out[_h_projection_map(model, i)] = _h_projection_map(model, k)
    return out


def _assemble(x: RingElement, target, cols: np.ndarray, targets: np.ndarray) -> List[List[RingElement]]:
    # row r of the matrix collects x_g at (cols[r, g], targets[r, g])
    n = cols.shape[0]
    coeffs = np.zeros((n, n, target.order), dtype=object)
    rows = np.broadcast_to(np.arange(n)[:, None], cols.shape)
    np.add.at(coeffs, (rows, cols, targets), np.broadcast_to(x.coeffs.astype(object), cols.shape))
    return [[RingElement(target, coeffs[r, s], x.precision) for s in range(n)] for r in range(n)]


# multiplicative side


def theta_matrix(model: GroupModel, i: int, x: RingElement) -> List[List[RingElement]]:
    """
    Matrix of right multiplication by `x` on `Λ(G)` as a free left `Λ(G_i)`-module with basis `γ^r`, `r < p^i`,
    with entries pushed to `Λ(G_i^ab)`.

    Row `r` holds `γ^r x = Σ_s M[r][s] γ^s`; a group element `(h, a)` contributes `(A^r h, r + a - s)` at
    column `s = (r + a) mod p^i`.
    """
    _check_layer(model, i)
    _check_on(x, model)
    target = model.layer_group(i, i)
    n = model.p**i
    idx = np.arange(model.order)
    hx, a = idx // model.gamma_size, idx % model.gamma_size
    hmap = _h_projection_map(model, i)
    cols = np.empty((n, model.order), dtype=np.int64)
    targets = np.empty((n, model.order), dtype=np.int64)
    for r in range(n):
        acted = model._action_table[r % model.gamma_size][hx]
        s = (a + r) % n
        shift = (a + r - s) % model.gamma_modulus
        cols[r] = s
        targets[r] = hmap[acted] * target.gamma_size + shift // n
    return _assemble(x, target, cols, targets)


def theta(model: GroupModel, i: int, x: RingElement) -> RingElement:
    """
    `θ_i(x)`, a unit of `Λ(G_i^ab)`.

    Raises:
        `NotAUnit`: the augmentation of `x` is divisible by p.
    """
    if not x.is_unit():
        raise NotAUnit(f"θ_{i} needs a unit, the augmentation of {x!r} is divisible by {x.p}")
    matrix = theta_matrix(model, i, x)
    return berkowitz_det(matrix, RingElement.one(model.layer_group(i, i), x.precision))


def _layer_matrix_indices(model: GroupModel, j_layer: int, i: int) -> Tuple[np.ndarray, np.ndarray, LayerGroup]:
    # Λ(G_j^ab) over Λ(H_j × Γ^(i)) with basis γ^(p^j k), k < p^(i-j)
    source = model.layer_group(j_layer, j_layer)
    target = model.layer_group(j_layer, i)
    n = model.p ** (i - j_layer)
    idx = np.arange(source.order)
    hx, c = idx // source.gamma_size, idx % source.gamma_size
    cols = np.empty((n, source.order), dtype=np.int64)
    targets = np.empty((n, source.order), dtype=np.int64)
    for k in range(n):
        s = (c + k) % n
        shift = ((c + k - s) * source.step) % model.gamma_modulus
        cols[k] = s
        targets[k] = hx * target.gamma_size + shift // target.step
    return cols, targets, target


def _check_pair(model: GroupModel, j_layer: int, i: int) -> None:
    if not 0 <= j_layer <= i <= model.e:
        raise ValueError(f"need 0 <= {j_layer} <= {i} <= {model.e}")


def norm_Nr(model: GroupModel, j_layer: int, i: int, x: RingElement) -> RingElement:
    """
    Norm `Λ(G_j^ab)^× → Λ(H_j × Γ^(i))^×` for `j <= i`.

    Raises:
        `NotAUnit`: `x` is not a unit.
    """
    _check_pair(model, j_layer, i)
    _check_on(x, model.layer_group(j_layer, j_layer))
    if not x.is_unit():
        raise NotAUnit(f"Nr needs a unit, the augmentation of {x!r} is divisible by {x.p}")
    cols, targets, target = _layer_matrix_indices(model, j_layer, i)
    matrix = _assemble(x, target, cols, targets)
    return berkowitz_det(matrix, RingElement.one(target, x.precision))


def tr_map(model: GroupModel, j_layer: int, i: int, x: RingElement) -> RingElement:
    """Module trace `Λ(G_j^ab) → Λ(H_j × Γ^(i))`: `(h, a) ↦ p^(i-j) (h, a)` if `p^i | a`, else 0."""
    _check_pair(model, j_layer, i)
    _check_on(x, model.layer_group(j_layer, j_layer))
    cols, targets, target = _layer_matrix_indices(model, j_layer, i)
    out = np.zeros(target.order, dtype=object)
    for k in range(cols.shape[0]):
        diagonal = cols[k] == k
        np.add.at(out, targets[k][diagonal], x.coeffs[diagonal].astype(object))
    return RingElement(target, out, x.precision)


def pi_map(model: GroupModel, i: int, j_layer: int, x: RingElement) -> RingElement:
    """Projection `Λ(G_i^ab) → Λ(H_j × Γ^(i))` induced by `H_i → H_j`."""
    _check_pair(model, j_layer, i)
    source = model.layer_group(i, i)
    _check_on(x, source)
    target = model.layer_group(j_layer, i)
    idx = np.arange(source.order)
    hmap = _h_layer_map(model, i, j_layer)
    index_map = hmap[idx // source.gamma_size] * target.gamma_size + idx % source.gamma_size
    return x.pushforward_indices(target, index_map)


# additive side


def _gamma_orbit_perms(group: LayerGroup, count: int) -> np.ndarray:
    return np.stack([group.gamma_conjugation_perm(k) for k in range(count)])


def beta(model: GroupModel, i: int, t: TraceElement) -> RingElement:
    """
    `β_i(t)`: a class `[h γ^a]` goes to `Σ_{k<p^i} γ^k (h γ^a) γ^-k` in `Λ(G_i^ab)` when `p^i | a`, and to 0
    otherwise.
    """
    _check_layer(model, i)
    if t.group is not model:
        raise ModelMismatch("β takes trace elements of the group model itself")
    target = model.layer_group(i, i)
    layer = model.layer(i)
    n = model.p**i
    bases, values = [], []
    for cls in model.classes:
        c = int(t.coeffs[cls.index])
        g = cls.representative
        if c == 0 or g.a % n:
            continue
        bases.append(target.index_of(GroupElement(layer.project(g.h), g.a)))
        values.append(c)
    out = np.zeros(target.order, dtype=object)
    if bases:
        perms = _gamma_orbit_perms(target, n)[:, bases]
        np.add.at(out, perms, np.broadcast_to(np.array(values, dtype=object), perms.shape))
    return RingElement(target, out, t.precision)


def tau(model: GroupModel, tup: "LayerTuple") -> TraceElement:
    """
    Left inverse of `β` on Ψ: a class of stratum `i` with representative `g` gets the coefficient of `x_i` at the
    image of `g`, times the γ-orbit size of that image, divided by `p^i`. The result is known modulo `p^(N-e)`.

    Raises:
        `NotInPsi`: the tuple fails A1 or A2.
        `InexactDivision`: a coefficient is not divisible as required.
        `PrecisionExhausted`: `N <= e`.
    """
    from .phipsi import check_psi

    if tup.model is not model:
        raise ModelMismatch("the tuple belongs to another model")
    report = check_psi(tup)
    if not report.passed:
        raise NotInPsi(f"the tuple is not in Ψ, first failing condition {report.first_failure}")
    precision = tup.precision - model.e
    if precision < 1:
        raise PrecisionExhausted(f"τ loses {model.e} digits, the tuple only has {tup.precision}")
    out = np.zeros(len(model.classes), dtype=object)
    for cls in model.classes:
        i = cls.stratum
        g = cls.representative
        layer = model.layer(i)
        hbar = layer.project(g.h)
        total = tup.entries[i].coefficient(GroupElement(hbar, g.a)) * len(layer.orbit(hbar))
        if total % model.p**i:
            raise InexactDivision(
                f"coefficient {total} of class {cls.index} is not divisible by {model.p}^{i}; the input is not in Ψ"
            )
        out[cls.index] = total // model.p**i
    return TraceElement(model, out, precision)


# Frobenius, transfer and twists


def phi_ring(x: RingElement) -> RingElement:
    """Linear extension of `g ↦ g^p`; a ring endomorphism on the abelian layers."""
    group = x.group
    return x.pushforward(group, lambda g: p_power_phi(group, g))


def phi_trace(t: TraceElement) -> TraceElement:
    """`[g] ↦ [g^p]` on the trace quotient."""
    group = t.group
    index_map = np.array(
        [group.class_index[group.index_of(p_power_phi(group, cls.representative))] for cls in group.classes],
        dtype=np.int64,
    )
    out = np.zeros(len(group.classes), dtype=object)
    np.add.at(out, index_map, t.coeffs.astype(object))
    return TraceElement(group, out, t.precision)


def ver_ring(model: GroupModel, i: int, x: RingElement) -> RingElement:
    """Ring map `Λ(G_(i-1)^ab) → Λ(G_i^ab)` induced by the transfer."""
    if not 1 <= i <= model.level:
        raise ValueError(f"ver needs 1 <= i <= {model.level}, got {i}")
    _check_on(x, model.layer_group(i - 1, i - 1))
    return x.pushforward(model.layer_group(i, i), lambda g: transfer_ver(model, i, g))


@dataclass(frozen=True)
class CharacterOmega:
    """
    The character `ω_i` of `G_(i-1)^ab`: trivial on `H_(i-1)` and on `Γ^(i)`, and sending `γ^(p^(i-1))` to
    `ζ_p^generator_power`.
    """

    i: int
    p: int
    generator_power: int = 1

    def __post_init__(self):
        if self.i < 1:
            raise ValueError(f"ω_i needs i >= 1, got {self.i}")
        if self.generator_power % self.p == 0:
            raise ValueError("ω_i must be non-trivial on Γ^(i-1)")

    def exponent(self, g: GroupElement) -> int:
        return self.generator_power * (g.a // self.p ** (self.i - 1)) % self.p

    def value(self, g: GroupElement) -> CycloRational:
        return CycloRational.root_of_unity(self.p, self.exponent(g))


def _cp_mul(X: np.ndarray, Y: np.ndarray, table: np.ndarray, modulus: int) -> np.ndarray:
    # product in (ℤ/p^N)[C_p × group], rows indexed by C_p
    p = X.shape[0]
    out = np.zeros_like(X)
    for u in range(p):
        for g in np.flatnonzero(X[u]):
            row = table[g]
            for w in range(p):
                out[(u + w) % p, row] = (out[(u + w) % p, row] + X[u, g] * Y[w]) % modulus
    return out


def omega_twist_product(
    model: GroupModel, i: int, x: RingElement, omega: Optional[CharacterOmega] = None
) -> RingElement:
    """
    `Π_{k=0}^{p-1} ω̃_i^k(x)` for `x ∈ Λ(G_(i-1)^ab)`, where `ω̃(g) = ω(g) g`.

    The product is formed in `(ℤ/p^N)[C_p][G_(i-1)^ab]` and reduced modulo `1 + ζ + ... + ζ^(p-1)`; it is Galois
    invariant, so every coordinate other than the constant one must vanish.

    Raises:
        `DescentFailure`: a non-constant cyclotomic coordinate survived.
    """
    if not 1 <= i <= model.e:
        raise ValueError(f"ω-twists need 1 <= i <= {model.e}, got {i}")
    group = model.layer_group(i - 1, i - 1)
    _check_on(x, group)
    omega = omega or CharacterOmega(i, model.p)
    p, modulus = model.p, x.modulus
    exponents = np.array([omega.exponent(g) for g in group.elements], dtype=np.int64)
    idx = np.arange(group.order)
    values = x.coeffs.astype(object)

    product = np.zeros((p, group.order), dtype=object)
    product[0, group.index_of(group.identity)] = 1
    for k in range(p):
        factor = np.zeros((p, group.order), dtype=object)
        factor[(k * exponents) % p, idx] = values
        product = _cp_mul(product, factor, group.mul_table, modulus)

    for u in range(1, p - 1):
        if ((product[u] - product[p - 1]) % modulus).any():
            raise DescentFailure(f"coordinate ζ^{u} of the ω-twisted product does not vanish")
    return RingElement(group, (product[0] - product[p - 1]) % modulus, x.precision)


def omega_twist_sum(model: GroupModel, i: int, x: RingElement) -> RingElement:
    """`Σ_{k=0}^{p-1} ω̃_i^k(x)`: `p` times the part of `x` on which `ω_i` is trivial."""
    if not 1 <= i <= model.e:
        raise ValueError(f"ω-twists need 1 <= i <= {model.e}, got {i}")
    group = model.layer_group(i - 1, i - 1)
    _check_on(x, group)
    keep = np.array([g.a % model.p**i == 0 for g in group.elements])
    coeffs = np.where(keep, x.coeffs.astype(object) * model.p, 0)
    return RingElement(group, coeffs, x.precision)


def beta_phi_defect(model: GroupModel, i: int, t: TraceElement) -> Tuple[RingElement, RingElement]:
    """
    Both sides of `β_i(φ(t)) - φ(β_i(t)) = ver_i(p β_(i-1)(t) - Σ_k ω̃_i^k β_(i-1)(t))`.
    """
    _check_layer(model, i, lowest=1)
    lhs = beta(model, i, phi_trace(t)) - phi_ring(beta(model, i, t))
    lower = beta(model, i - 1, t)
    rhs = ver_ring(model, i, lower * model.p - omega_twist_sum(model, i, lower))
    return lhs, rhs


def special_beta_phi(model: GroupModel, i: int, t: TraceElement) -> Tuple[RingElement, RingElement]:
    """Both sides of `β_i(φ(t)) = p ver_i(β_(i-1)(t))`, an identity when the model is of special type."""
    _check_layer(model, i, lowest=1)
    return beta(model, i, phi_trace(t)), ver_ring(model, i, beta(model, i - 1, t)) * model.p


# tuples


@dataclass
class LayerTuple:
    """
    A tuple `(x_0, ..., x_e)` with `x_i ∈ Λ(G_i^ab)`. Tuple files look like

    ```
    # θ(h) on E1
    flavor=multiplicative
    precision=3
    layer 0: 1*h^1@g^0
    layer 1: h^3@g^0
    ```

    `precision` is optional and defaults to the model precision; missing layers are 0 (additive) or 1
    (multiplicative).
    """

    model: GroupModel
    entries: List[RingElement]
    flavor: str = "additive"
    comments: Tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.flavor not in FLAVORS:
            raise ValueError(f"flavor has to be one of {', '.join(FLAVORS)}, got {self.flavor!r}")
        if len(self.entries) != self.model.e + 1:
            raise ValueError(f"expected {self.model.e + 1} layers, got {len(self.entries)}")
        for i, x in enumerate(self.entries):
            if x.group is not self.model.layer_group(i, i):
                raise ModelMismatch(f"entry {i} does not live on G_{i}^ab")

    @property
    def precision(self) -> int:
        return min(x.precision for x in self.entries)

    @classmethod
    def filled(cls, model: GroupModel, flavor: str, precision: Optional[int] = None) -> "LayerTuple":
        precision = precision or model.precision
        make = RingElement.one if flavor == "multiplicative" else RingElement.zero
        return cls(model, [make(model.layer_group(i, i), precision) for i in range(model.e + 1)], flavor)

    @classmethod
    def parse(cls, text: str, model: GroupModel) -> "LayerTuple":
        flavor, precision, comments, lines = "additive", model.precision, [], {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                comments.append(raw.rstrip())
                continue
            if line.startswith("layer"):
                head, sep, body = line.partition(":")
                try:
                    i = int(head[len("layer") :])
                except ValueError:
                    raise ParseError(f"line {lineno}: cannot read the layer index in {raw!r}") from None
                if not sep or not 0 <= i <= model.e:
                    raise ParseError(f"line {lineno}: expected 'layer i: <element>' with 0 <= i <= {model.e}")
                if i in lines:
                    raise ParseError(f"line {lineno}: layer {i} given twice")
                lines[i] = body
                continue
            key, sep, value = (s.strip() for s in line.partition("="))
            if key == "flavor" and sep:
                if value not in FLAVORS:
                    raise ParseError(f"line {lineno}: unknown flavor {value!r}")
                flavor = value
            elif key == "precision" and sep:
                try:
                    precision = int(value)
                except ValueError:
                    raise ParseError(f"line {lineno}: precision must be an integer, got {value!r}") from None
            else:
                raise ParseError(f"line {lineno}: cannot read {raw!r}")
        default = "1" if flavor == "multiplicative" else "0"
        entries = []
        for i in range(model.e + 1):
            group = model.layer_group(i, i)
            entries.append(parse_element(lines.get(i, default), group, precision))
        return cls(model, entries, flavor, tuple(comments))

    @classmethod
    def from_file(cls, path: Union[str, os.PathLike], model: GroupModel) -> "LayerTuple":
        with open(path, encoding="utf-8") as f:
            return cls.parse(f.read(), model)

    def to_text(self) -> str:
        lines = list(self.comments) + [f"flavor={self.flavor}", f"precision={self.precision}"]
        lines += [f"layer {i}: {x.to_text()}" for i, x in enumerate(self.entries)]
        return "\n".join(lines) + "\n"

    def save(self, path: Union[str, os.PathLike]) -> None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(self.to_text())


def theta_tuple(model: GroupModel, x: RingElement) -> LayerTuple:
    return LayerTuple(model, [theta(model, i, x) for i in range(model.e + 1)], "multiplicative")


def beta_tuple(model: GroupModel, t: TraceElement) -> LayerTuple:
    return LayerTuple(model, [beta(model, i, t) for i in range(model.e + 1)], "additive")


def project_tuple(tup: LayerTuple, lower: GroupModel) -> LayerTuple:
    """Image of a tuple under the level projection onto a model of lower level with the same `H`."""
    entries = [project_level(x, lower.layer_group(i, i)) for i, x in enumerate(tup.entries)]
    return LayerTuple(lower, entries, tup.flavor)


def project_trace(t: TraceElement, lower: GroupModel) -> TraceElement:
    """Image of a trace element under the level projection, class by class."""
    out = np.zeros(len(lower.classes), dtype=object)
    for cls in t.group.classes:
        g = cls.representative
        image = lower.index_of(GroupElement(g.h, g.a % lower.gamma_modulus))
        out[lower.class_index[image]] += int(t.coeffs[cls.index])
    return TraceElement(lower, out, t.precision)


def distinct_theta_images(model: GroupModel, elements: Sequence[GroupElement]) -> bool:
    """Whether group elements with distinct images in `G^ab` have distinct θ-tuples."""
    seen = {}
    for g in elements:
        x = RingElement.basis(model, g, model.precision)
        key = tuple(tuple(int(c) for c in y.coeffs) for y in theta_tuple(model, x).entries)
        ab = (model.layer(0).project(g.h), g.a)
        if key in seen and seen[key] != ab:
            logger.debug(f"θ-tuples of {g} and an element with image {seen[key]} coincide")
            return False
        seen[key] = ab
    return True
