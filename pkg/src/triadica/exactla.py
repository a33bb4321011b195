"""Exact linear algebra over the rationals.

Everything downstream (structure constants, restriction matrices, section
spaces, differentials) reduces to the primitives in this module: reduced row
echelon form, kernels, solving, quotients, and spans of products.  Scalars are
`fractions.Fraction` throughout; there is no floating point anywhere in the
package, so comparisons are exact and echelon bases are canonical: two
subspaces are equal iff their stored bases are equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionMismatchError

Rational = Fraction
Vector = tuple[Fraction, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def rat(value) -> Fraction:
    """Coerce an int, Fraction, or exact string like '-3/7' to a Fraction.

    Floats are rejected: accepting them would smuggle binary rounding into a
    kernel whose whole contract is exactness.
    """
    if isinstance(value, bool):
        raise TypeError("bool is not a rational scalar")
    if isinstance(value, float):
        raise TypeError(f"float {value!r} rejected; use an exact string instead")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not an exact rational literal: {value!r}") from exc
    raise TypeError(f"cannot interpret {type(value).__name__} as a rational")


def vec(values: Iterable) -> Vector:
    return tuple(rat(v) for v in values)


def zero_vec(n: int) -> Vector:
    return (ZERO,) * n


def vec_add(a: Sequence[Fraction], b: Sequence[Fraction]) -> Vector:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def vec_sub(a: Sequence[Fraction], b: Sequence[Fraction]) -> Vector:
    return tuple(x - y for x, y in zip(a, b, strict=True))


def vec_scale(c: Fraction, a: Sequence[Fraction]) -> Vector:
    return tuple(c * x for x in a)


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b, strict=True)), ZERO)


@dataclass(frozen=True)
class Matrix:
    """Immutable rows x cols matrix of Fractions, row-major."""

    rows: int
    cols: int
    entries: tuple[Vector, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows:
            raise DimensionMismatchError(f"expected {self.rows} rows, got {len(self.entries)}")
        for r in self.entries:
            if len(r) != self.cols:
                raise DimensionMismatchError(f"row of width {len(r)} in {self.rows}x{self.cols} matrix")

    @staticmethod
    def from_rows(rows: Iterable[Iterable], cols: int | None = None) -> "Matrix":
        data = tuple(vec(r) for r in rows)
        if cols is None:
            if not data:
                raise DimensionMismatchError("cols required for a matrix with no rows")
            cols = len(data[0])
        return Matrix(len(data), cols, data)

    @staticmethod
    def identity(n: int) -> "Matrix":
        return Matrix(n, n, tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n)))

    @staticmethod
    def zeros(rows: int, cols: int) -> "Matrix":
        return Matrix(rows, cols, tuple(zero_vec(cols) for _ in range(rows)))

    @staticmethod
    def from_columns(columns: Sequence[Sequence], rows: int | None = None) -> "Matrix":
        cols = [vec(c) for c in columns]
        if rows is None:
            if not cols:
                raise DimensionMismatchError("rows required for a matrix with no columns")
            rows = len(cols[0])
        for c in cols:
            if len(c) != rows:
                raise DimensionMismatchError("ragged columns")
        return Matrix(rows, len(cols), tuple(tuple(c[i] for c in cols) for i in range(rows)))

    def row(self, i: int) -> Vector:
        return self.entries[i]

    def col(self, j: int) -> Vector:
        return tuple(r[j] for r in self.entries)

    def apply(self, v: Sequence[Fraction]) -> Vector:
        if len(v) != self.cols:
            raise DimensionMismatchError(f"vector of length {len(v)} applied to {self.rows}x{self.cols}")
        return tuple(dot(r, v) for r in self.entries)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionMismatchError(f"{self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        ot = other.transpose()
        return Matrix(self.rows, other.cols,
                      tuple(tuple(dot(r, c) for c in ot.entries) for r in self.entries))

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatchError("matrix shapes differ")
        return Matrix(self.rows, self.cols,
                      tuple(vec_add(a, b) for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatchError("matrix shapes differ")
        return Matrix(self.rows, self.cols,
                      tuple(vec_sub(a, b) for a, b in zip(self.entries, other.entries)))

    def scaled(self, c) -> "Matrix":
        c = rat(c)
        return Matrix(self.rows, self.cols, tuple(vec_scale(c, r) for r in self.entries))

    def transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows,
                      tuple(tuple(self.entries[i][j] for i in range(self.rows)) for j in range(self.cols)))

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.entries for x in r)


def hstack(parts: Sequence[Matrix]) -> Matrix:
    rows = parts[0].rows
    for p in parts:
        if p.rows != rows:
            raise DimensionMismatchError("hstack row counts differ")
    return Matrix(rows, sum(p.cols for p in parts),
                  tuple(tuple(x for p in parts for x in p.entries[i]) for i in range(rows)))


def vstack(parts: Sequence[Matrix]) -> Matrix:
    cols = parts[0].cols
    for p in parts:
        if p.cols != cols:
            raise DimensionMismatchError("vstack column counts differ")
    return Matrix(sum(p.rows for p in parts), cols,
                  tuple(r for p in parts for r in p.entries))


def rref(vectors: Iterable[Sequence[Fraction]], width: int) -> tuple[list[Vector], list[int]]:
    """Reduced row echelon form.  Returns (nonzero rows, pivot columns).

    The output is canonical: any spanning set of the same row space reduces
    to the identical list of rows.
    """
    work = [list(v) for v in vectors]
    for v in work:
        if len(v) != width:
            raise DimensionMismatchError(f"vector of length {len(v)}, expected {width}")
    pivots: list[int] = []
    row = 0
    for col in range(width):
        pivot = next((r for r in range(row, len(work)) if work[r][col] != 0), None)
        if pivot is None:
            continue
        work[row], work[pivot] = work[pivot], work[row]
        inv = ONE / work[row][col]
        work[row] = [inv * x for x in work[row]]
        for r in range(len(work)):
            if r != row and work[r][col] != 0:
                factor = work[r][col]
                work[r] = [x - factor * y for x, y in zip(work[r], work[row])]
        pivots.append(col)
        row += 1
        if row == len(work):
            break
    return [tuple(v) for v in work[:row]], pivots


@dataclass(frozen=True)
class Subspace:
    """Subspace of Q^ambient_dim, stored by its canonical echelon basis."""

    ambient_dim: int
    basis: tuple[Vector, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v: Sequence[Fraction]) -> bool:
        if len(v) != self.ambient_dim:
            raise DimensionMismatchError("vector/ambient length mismatch")
        residue = list(v)
        for b in self.basis:
            lead = next(j for j, x in enumerate(b) if x != 0)
            if residue[lead] != 0:
                c = residue[lead]
                residue = [x - c * y for x, y in zip(residue, b)]
        return all(x == 0 for x in residue)

    def coordinates(self, v: Sequence[Fraction]) -> Vector | None:
        """Coefficients of v in the stored basis, or None if v is outside."""
        residue = list(v)
        coords = []
        for b in self.basis:
            lead = next(j for j, x in enumerate(b) if x != 0)
            c = residue[lead]
            coords.append(c)
            if c != 0:
                residue = [x - c * y for x, y in zip(residue, b)]
        if any(x != 0 for x in residue):
            return None
        return tuple(coords)


def span(ambient_dim: int, vectors: Iterable[Sequence[Fraction]]) -> Subspace:
    rows, _ = rref(vectors, ambient_dim)
    return Subspace(ambient_dim, tuple(rows))


def full_space(n: int) -> Subspace:
    return Subspace(n, Matrix.identity(n).entries)


def kernel(m: Matrix) -> Subspace:
    """Null space {v : m v = 0} with canonical echelon basis."""
    rows, pivots = rref(m.entries, m.cols)
    pivot_set = set(pivots)
    free = [j for j in range(m.cols) if j not in pivot_set]
    basis = []
    for f in free:
        v = [ZERO] * m.cols
        v[f] = ONE
        for r, p in enumerate(pivots):
            v[p] = -rows[r][f]
        basis.append(v)
    return span(m.cols, basis)


@dataclass(frozen=True)
class SolveResult:
    solution: Vector | None
    unique: bool

    @property
    def consistent(self) -> bool:
        return self.solution is not None


def solve(m: Matrix, rhs: Sequence[Fraction]) -> SolveResult:
    """Particular solution of m x = rhs; `unique` reports whether ker m = 0."""
    if len(rhs) != m.rows:
        raise DimensionMismatchError("rhs length does not match row count")
    augmented = [list(r) + [b] for r, b in zip(m.entries, rhs)]
    rows, pivots = rref(augmented, m.cols + 1)
    if m.cols in pivots:
        return SolveResult(None, len([p for p in pivots if p < m.cols]) == m.cols)
    x = [ZERO] * m.cols
    for r, p in enumerate(pivots):
        x[p] = rows[r][m.cols]
    return SolveResult(tuple(x), len(pivots) == m.cols)


@dataclass(frozen=True)
class Quotient:
    """Quotient of an ambient coordinate space by a subspace.

    projection . section = identity on the quotient, and the kernel of
    projection is exactly the subspace quotiented out.
    """

    ambient_dim: int
    quotient_dim: int
    projection: Matrix
    section: Matrix


def quotient_space(ambient_dim: int, sub: Subspace) -> Quotient:
    if sub.ambient_dim != ambient_dim:
        raise DimensionMismatchError("subspace lives in a different ambient space")
    pivot_of = {next(j for j, x in enumerate(b) if x != 0): b for b in sub.basis}
    free = [j for j in range(ambient_dim) if j not in pivot_of]
    proj_cols = []
    for j in range(ambient_dim):
        residue = [ZERO] * ambient_dim
        residue[j] = ONE
        for p, b in pivot_of.items():
            if residue[p] != 0:
                c = residue[p]
                residue = [x - c * y for x, y in zip(residue, b)]
        proj_cols.append([residue[f] for f in free])
    projection = Matrix.from_columns(proj_cols, rows=len(free))
    section = Matrix.from_columns(
        [[ONE if j == f else ZERO for j in range(ambient_dim)] for f in free],
        rows=ambient_dim)
    return Quotient(ambient_dim, len(free), projection, section)


def product_subspace(u: Subspace, v: Subspace, struct) -> Subspace:
    """Span of all products of u-basis by v-basis under a bilinear map.

    `struct[i][j]` is the coordinate vector of (basis_i * basis_j) in the
    common ambient space of u and v.
    """
    if u.ambient_dim != v.ambient_dim:
        raise DimensionMismatchError("ambient spaces differ")
    n = u.ambient_dim
    products = []
    for a in u.basis:
        for b in v.basis:
            w = [ZERO] * n
            for i, ai in enumerate(a):
                if ai == 0:
                    continue
                for j, bj in enumerate(b):
                    if bj == 0:
                        continue
                    c = ai * bj
                    for k, s in enumerate(struct[i][j]):
                        if s != 0:
                            w[k] += c * s
            products.append(w)
    return span(n, products)
