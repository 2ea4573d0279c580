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
Exact linear algebra used by the group models and the group rings.

* `smith_normal_form` computes `U * M * V = S` over ℤ together with `U^-1`, which gives coordinates on
  finite abelian quotients.
* `HowellBasis` is the Howell form of a submodule of (ℤ/p^N)^n. Rows are reduced by a minimal-valuation pivot,
  and every pivot row `r` with pivot `p^v` feeds `p^(N-v) * r` back into the reduction so that membership can
  be decided by a single top-down sweep. Generator combinations are carried along so that membership returns a
  witness and the leftover rows span the kernel.
* `berkowitz_det` is the division-free determinant over any commutative ring whose elements support `+`, `-`
  and `*`.
"""

from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

from .configuration_utils import get_config
from .exactnum import p_adic_valuation
from .logging import get_logger


logger = get_logger(__name__)

IntMatrix = List[List[int]]


def coefficient_dtype(modulus: int):
    """int64 while products of two residues fit, Python ints otherwise."""
    max_bits = get_config().precision.max_modulus_bits
    if modulus.bit_length() <= max_bits:
        return np.int64
    return object


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def mat_mul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


# Smith normal form over ℤ


def smith_normal_form(M: Sequence[Sequence[int]]) -> Tuple[IntMatrix, IntMatrix, IntMatrix, IntMatrix]:
    """
    Smith normal form of an integer matrix.

    Args:
        M (`Sequence[Sequence[int]]`): an `m x n` integer matrix.

    Return:
        `(U, S, V, U_inv)` with `U * M * V = S`, `S` diagonal with non-negative entries `s_1 | s_2 | ...`, `U` and
        `V` unimodular and `U_inv` the inverse of `U`.
    """
    A = [[int(v) for v in row] for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U, U_inv, V = identity(m), identity(m), identity(n)

    def swap_rows(i, k):
        A[i], A[k] = A[k], A[i]
        U[i], U[k] = U[k], U[i]
        for row in U_inv:
            row[i], row[k] = row[k], row[i]

    def swap_cols(j, k):
        for row in A:
            row[j], row[k] = row[k], row[j]
        for row in V:
            row[j], row[k] = row[k], row[j]

    def add_row(target, source, c):
        # row_target += c * row_source
        A[target] = [x + c * y for x, y in zip(A[target], A[source])]
        U[target] = [x + c * y for x, y in zip(U[target], U[source])]
        for row in U_inv:
            row[source] -= c * row[target]

    def add_col(target, source, c):
        for row in A:
            row[target] += c * row[source]
        for row in V:
            row[target] += c * row[source]

    for t in range(min(m, n)):
        while True:
            candidates = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
            if not candidates:
                return U, A, V, U_inv
            _, i, j = min(candidates)
            if i != t:
                swap_rows(i, t)
            if j != t:
                swap_cols(j, t)

            pivot = A[t][t]
            clean = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // pivot))
                    clean = clean and A[i][t] == 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // pivot))
                    clean = clean and A[t][j] == 0
            if not clean:
                continue

            offender = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % pivot), None
            )
            if offender is not None:
                add_row(t, offender, 1)
                continue
            break

        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
            for row in U_inv:
                row[t] = -row[t]

    return U, A, V, U_inv


def elementary_divisor_valuations(M: Sequence[Sequence[int]], p: int) -> List[int]:
    """p-adic valuations of the nonzero elementary divisors of an integer matrix."""
    _, S, _, _ = smith_normal_form(M)
    diagonal = [S[k][k] for k in range(min(len(S), len(S[0]) if S else 0))]
    return [p_adic_valuation(d, p) for d in diagonal if d]


def cyclic_summand_count(generators: np.ndarray, p: int, N: int) -> int:
    """
    Number of cyclic summands of the submodule of (ℤ/p^N)^n spanned by the rows of `generators`. For the
    reduction of a free ℤ_p-module whose elementary divisors are all below `p^N` this is its ℤ_p-rank.
    """
    rows = np.asarray(generators, dtype=object) % p**N
    if rows.size == 0:
        return 0
    return sum(1 for v in elementary_divisor_valuations(rows.tolist(), p) if v < N)


# Howell form over ℤ/p^N


class HowellBasis:
    """
    Howell basis of the submodule of (ℤ/p^N)^n spanned by the rows of a generator matrix.

    Attributes:
        rows (`np.ndarray`): basis rows in echelon form, pivot entries equal to `p^v`.
        pivots (`List[Tuple[int, int]]`): `(column, v)` for each basis row.
        combos (`np.ndarray`): `combos[k] @ generators == rows[k]` modulo p^N.
        kernel (`np.ndarray`): rows spanning the relations `w` with `w @ generators == 0`.
    """

    def __init__(self, generators: np.ndarray, p: int, N: int):
        self.p = p
        self.N = N
        self.modulus = p**N
        dtype = coefficient_dtype(self.modulus)
        generators = np.asarray(generators, dtype=object) % self.modulus
        if generators.ndim != 2:
            raise ValueError(f"generators must be a 2d array, got shape {generators.shape}")
        self.num_generators, self.ncols = generators.shape
        self.generators = generators.astype(dtype)

        work = np.concatenate([generators, np.eye(self.num_generators, dtype=object)], axis=1).astype(dtype)
        work = [row for row in work if row.any()]
        basis, pivots = [], []
        for col in range(self.ncols):
            live = [k for k, row in enumerate(work) if int(row[col]) % self.modulus]
            if not live:
                continue
            b = min(live, key=lambda k: p_adic_valuation(int(work[k][col]) % self.modulus, p))
            v = p_adic_valuation(int(work[b][col]) % self.modulus, p)
            unit = int(work[b][col]) // p**v
            best = (work[b] * pow(unit, -1, self.modulus)) % self.modulus
            rest = []
            for k, row in enumerate(work):
                if k == b:
                    continue
                entry = int(row[col]) % self.modulus
                if entry:
                    # entry is divisible by p^v since v is the smallest valuation in this column
                    row = (row - (entry // p**v) * best) % self.modulus
                rest.append(row)
            if v > 0:
                rest.append((best * p ** (N - v)) % self.modulus)
            work = [row for row in rest if row.any()]
            basis.append(best)
            pivots.append((col, v))

        width = self.ncols + self.num_generators
        self.rows = np.array([row[: self.ncols] for row in basis], dtype=dtype).reshape(len(basis), self.ncols)
        self.combos = np.array([row[self.ncols :] for row in basis], dtype=dtype).reshape(
            len(basis), self.num_generators
        )
        self.pivots = pivots
        leftovers = [row[self.ncols :] for row in work if len(row) == width]
        self.kernel = np.array(leftovers, dtype=dtype).reshape(len(leftovers), self.num_generators)
        logger.debug(
            f"Howell basis over Z/{p}^{N}: {self.num_generators} generators in {self.ncols} columns, "
            f"{len(basis)} pivots, {len(leftovers)} relations"
        )

    @property
    def length(self) -> int:
        """log_p of the number of elements of the submodule."""
        return sum(self.N - v for _, v in self.pivots)

    def solve(self, x: np.ndarray) -> Optional[np.ndarray]:
        """
        Return `w` with `w @ generators == x` modulo p^N, or `None` when `x` is not in the submodule.
        """
        dtype = self.rows.dtype if self.rows.size else coefficient_dtype(self.modulus)
        x = (np.asarray(x, dtype=object) % self.modulus).astype(dtype)
        witness = np.zeros(self.num_generators, dtype=dtype)
        for row, combo, (col, v) in zip(self.rows, self.combos, self.pivots):
            entry = int(x[col]) % self.modulus
            if entry == 0:
                continue
            if entry % self.p**v:
                return None
            q = entry // self.p**v
            x = (x - q * row) % self.modulus
            witness = (witness + q * combo) % self.modulus
        if x.any():
            return None
        return witness

    def contains(self, x: np.ndarray) -> bool:
        return self.solve(x) is not None

    def issubset(self, other: "HowellBasis") -> bool:
        return all(other.contains(row) for row in self.rows)

    def same_module(self, other: "HowellBasis") -> bool:
        return self.issubset(other) and other.issubset(self)


def howell_form(generators: np.ndarray, p: int, N: int) -> HowellBasis:
    return HowellBasis(generators, p, N)


def kernel_mod_pN(matrix: np.ndarray, p: int, N: int) -> np.ndarray:
    """Rows spanning `{w : w @ matrix == 0 mod p^N}`."""
    return HowellBasis(matrix, p, N).kernel


# Division-free determinant


def berkowitz_charpoly(M: Sequence[Sequence[Any]], one: Any) -> List[Any]:
    """
    Coefficients `[1, c_1, ..., c_n]` of `det(t*I - M)`, highest degree first, computed without division.

    The trailing principal submatrices are processed from the bottom right corner outwards. For the block
    `[[a, R], [C, A]]` the new coefficient vector is `T * old` with the Toeplitz matrix whose diagonals are
    `1, -a, -R*C, -R*A*C, -R*A^2*C, ...`.
    """
    n = len(M)
    vect = [one]
    for k in range(n - 1, -1, -1):
        size = n - k
        a = M[k][k]
        R = [M[k][j] for j in range(k + 1, n)]
        C = [M[i][k] for i in range(k + 1, n)]
        A = [[M[i][j] for j in range(k + 1, n)] for i in range(k + 1, n)]

        diags = [one, -a]
        column = C
        for _ in range(2, size + 1):
            diags.append(-_dot(R, column))
            column = [_dot(row, column) for row in A]

        new = []
        for i in range(size + 1):
            acc = None
            for j in range(min(i + 1, len(vect))):
                term = diags[i - j] * vect[j]
                acc = term if acc is None else acc + term
            new.append(acc)
        vect = new
    return vect


def _dot(u: Sequence[Any], v: Sequence[Any]) -> Any:
    acc = None
    for a, b in zip(u, v):
        term = a * b
        acc = term if acc is None else acc + term
    return acc


def berkowitz_det(M: Sequence[Sequence[Any]], one: Any) -> Any:
    """Determinant of a square matrix over a commutative ring; `one` is the ring identity."""
    n = len(M)
    if n == 0:
        return one
    constant = berkowitz_charpoly(M, one)[-1]
    return constant if n % 2 == 0 else -constant


# echelon form over F_p


def row_basis_mod_p(rows: np.ndarray, p: int) -> np.ndarray:
    """Reduced row echelon basis of the row space of `rows` over F_p, one vectorized elimination per pivot."""
    M = np.asarray(rows, dtype=np.int64) % p
    if M.ndim != 2:
        raise ValueError(f"rows must be a 2d array, got shape {M.shape}")
    basis = []
    for col in range(M.shape[1]):
        if not M.shape[0]:
            break
        live = np.flatnonzero(M[:, col])
        if not live.size:
            continue
        k = live[0]
        pivot = (M[k] * pow(int(M[k, col]), -1, p)) % p
        M = np.delete(M, k, axis=0)
        M = (M - np.outer(M[:, col], pivot)) % p
        M = M[M.any(axis=1)]
        basis = [(row - row[col] * pivot) % p for row in basis]
        basis.append(pivot)
    return np.array(basis, dtype=np.int64).reshape(len(basis), np.shape(rows)[1])
