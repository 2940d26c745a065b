"""Exact integer matrices for the crosscap-slide action on homology.

For a closed non-orientable surface of genus ``g`` the crosscap slides
act on a rank ``g - 1`` summand of the first homology, and the image of
the action is the level-2 principal congruence subgroup of
``GL(g - 1, Z)``, i.e. the matrices congruent to the identity mod 2.
The generator ``Y[i, j]`` (slide the i-th crosscap along the loop
through crosscaps i and j) acts by

* negating basis class ``i``, and
* for ``j <= g - 1``, adding twice basis class ``i`` to class ``j``;
* for ``j == g`` only the negation survives (class ``g`` is not part of
  the chosen basis).

Matrices act on column vectors; column ``m`` holds the image of the
m-th basis class.  ``Y[g, i]`` is not an independent generator: it is
the product ``(Y[1,i] Y[1,g]) ... (Y[g-1,i] Y[g-1,g]) Y[i,g]`` (the
``k = i`` factor omitted), which collapses to a closed form with ``-1``
at ``(i, i)`` and ``-2`` down the rest of column ``i``.  ``make_y_gi``
computes both and refuses to answer if they disagree.

All arithmetic is exact: entries are unbounded Python ints, inverses go
through ``fractions.Fraction`` and are checked to be integral.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

Pair = tuple[int, int]
#: one letter of a word in the Y generators: ((i, j), exponent), exponent +-1
YLetter = tuple[Pair, int]


class DimensionMismatchError(ValueError):
    """Operands of a matrix operation have different sizes."""


class NotUnimodularError(ValueError):
    """Inverse requested for a matrix with determinant not in {+1, -1}."""


class IndexRangeError(ValueError):
    """A generator index lies outside the range valid for the genus."""


@dataclass(frozen=True)
class GenusConfig:
    """Genus of the non-orientable surface under consideration.

    The homology matrices have size g - 1.  Genus 3 is the smallest
    case where the slide generators, the quotient construction, and the
    rank formulas are all meaningful, so smaller values are rejected
    outright.
    """

    g: int

    def __post_init__(self) -> None:
        if not isinstance(self.g, int) or self.g < 3:
            raise ValueError(f"genus must be an integer >= 3, got {self.g!r}")

    @property
    def dim(self) -> int:
        return self.g - 1


GenusLike = Union[int, GenusConfig]


def genus(g: GenusLike) -> int:
    """Coerce an int or GenusConfig to a validated genus value."""
    if isinstance(g, GenusConfig):
        return g.g
    return GenusConfig(g).g


@dataclass(frozen=True)
class IntMatrix:
    """Immutable square integer matrix, row-major tuple of tuples."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.rows)
        if n == 0:
            raise ValueError("empty matrix")
        for row in self.rows:
            if len(row) != n:
                raise ValueError("matrix must be square")
            for x in row:
                if not isinstance(x, int):
                    raise TypeError(f"non-integer entry {x!r}")

    @property
    def n(self) -> int:
        return len(self.rows)

    def entry(self, i: int, j: int) -> int:
        """Entry in row i, column j, 1-based."""
        return self.rows[i - 1][j - 1]

    def __mul__(self, other: "IntMatrix") -> "IntMatrix":
        return mat_mul(self, other)

    def to_json(self) -> dict:
        return {"n": self.n, "rows": [list(row) for row in self.rows]}

    @classmethod
    def from_json(cls, data: dict) -> "IntMatrix":
        rows = tuple(tuple(int(x) for x in row) for row in data["rows"])
        m = cls(rows)
        if m.n != data["n"]:
            raise ValueError("declared size does not match row data")
        return m


@functools.cache
def identity(n: int) -> IntMatrix:
    return IntMatrix(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))


def mat_mul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    if a.n != b.n:
        raise DimensionMismatchError(f"cannot multiply {a.n}x{a.n} by {b.n}x{b.n}")
    bt = tuple(zip(*b.rows))
    return IntMatrix(
        tuple(
            tuple(sum(x * y for x, y in zip(row, col)) for col in bt)
            for row in a.rows
        )
    )


def det(a: IntMatrix) -> int:
    """Determinant by the Bareiss fraction-free elimination (exact)."""
    n = a.n
    m = [list(row) for row in a.rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                # exact division: Bareiss guarantees prev divides this
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def mat_inv(a: IntMatrix) -> IntMatrix:
    """Exact inverse of a unimodular matrix via Gauss-Jordan over Fraction."""
    d = det(a)
    if d not in (1, -1):
        raise NotUnimodularError(f"determinant {d}, inverse not integral")
    n = a.n
    aug = [
        [Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
        for i, row in enumerate(a.rows)
    ]
    for col in range(n):
        pivot = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    inv_rows = []
    for r in range(n):
        row = []
        for x in aug[r][n:]:
            if x.denominator != 1:
                raise NotUnimodularError("inverse is not integral")
            row.append(int(x))
        inv_rows.append(tuple(row))
    return IntMatrix(tuple(inv_rows))


def is_level2(a: IntMatrix) -> bool:
    """True iff the matrix is congruent to the identity mod 2."""
    return all(
        (x - int(i == j)) % 2 == 0
        for i, row in enumerate(a.rows)
        for j, x in enumerate(row)
    )


def _check_group_element(m: IntMatrix, label: str) -> IntMatrix:
    # constructed generators must be unimodular and level-2
    if det(m) not in (1, -1):
        raise ArithmeticError(f"{label} is not unimodular")
    if not is_level2(m):
        raise ArithmeticError(f"{label} is not congruent to I mod 2")
    return m


@functools.cache
def make_y(g: GenusLike, i: int, j: int) -> IntMatrix:
    """Matrix of the slide generator Y[i, j], for 1 <= i <= g-1, 1 <= j <= g.

    ``(i, i)`` entry -1; ``(i, j)`` entry 2 when j <= g-1; identity
    elsewhere.  ``Y[g, i]`` is not covered here, see ``make_y_gi``.
    """
    g = genus(g)
    if not 1 <= i <= g - 1:
        raise IndexRangeError(f"first index {i} outside 1..{g - 1}")
    if not 1 <= j <= g:
        raise IndexRangeError(f"second index {j} outside 1..{g}")
    if i == j:
        raise IndexRangeError("slide indices must differ")
    n = g - 1
    rows = [[int(r == c) for c in range(n)] for r in range(n)]
    rows[i - 1][i - 1] = -1
    if j <= g - 1:
        rows[i - 1][j - 1] = 2
    return _check_group_element(
        IntMatrix(tuple(tuple(row) for row in rows)), f"Y[{i},{j}] at g={g}"
    )


@functools.cache
def make_y_gi(g: GenusLike, i: int) -> IntMatrix:
    """Matrix of Y[g, i]: closed form, cross-checked against the product.

    Product: (Y[1,i] Y[1,g]) ... (Y[g-1,i] Y[g-1,g]) Y[i,g] with the
    k = i factor omitted.  Closed form: -1 at (i, i), -2 at (m, i) for
    every other row m, identity elsewhere.  Disagreement would mean the
    matrix convention is inconsistent, so it raises instead of guessing.
    """
    g = genus(g)
    if not 1 <= i <= g - 1:
        raise IndexRangeError(f"index {i} outside 1..{g - 1}")
    n = g - 1
    product = identity(n)
    for k in range(1, g):
        if k == i:
            continue
        product = product * make_y(g, k, i) * make_y(g, k, g)
    product = product * make_y(g, i, g)
    rows = [[int(r == c) for c in range(n)] for r in range(n)]
    for m in range(1, g):
        rows[m - 1][i - 1] = -1 if m == i else -2
    closed = IntMatrix(tuple(tuple(row) for row in rows))
    if product != closed:
        raise ArithmeticError(
            f"Y[{g},{i}] closed form disagrees with its defining product"
        )
    return _check_group_element(closed, f"Y[{g},{i}] at g={g}")


def y_matrix(g: GenusLike, i: int, j: int) -> IntMatrix:
    """Matrix for a slide symbol with either index order, including i = g."""
    g = genus(g)
    if i == g:
        return make_y_gi(g, j)
    return make_y(g, i, j)


@functools.cache
def _y_inverse(g: int, i: int, j: int) -> IntMatrix:
    return mat_inv(y_matrix(g, i, j))


def eval_word(g: GenusLike, letters: Iterable[YLetter]) -> IntMatrix:
    """Evaluate a word in the Y generators to a single matrix.

    ``letters`` is a sequence of ``((i, j), exp)`` with exp +1 or -1.
    The empty word evaluates to the identity.
    """
    g = genus(g)
    acc = identity(g - 1)
    for (i, j), exp in letters:
        if exp == 1:
            acc = acc * y_matrix(g, i, j)
        elif exp == -1:
            acc = acc * _y_inverse(g, i, j)
        else:
            raise ValueError(f"exponent must be +1 or -1, got {exp}")
    return acc
