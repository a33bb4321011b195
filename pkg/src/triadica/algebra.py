"""Finite-dimensional commutative unital algebras over the rationals.

An algebra is given by structure constants: struct[i][j] is the coordinate
vector of the product of basis elements i and j.  The zero-dimensional
algebra (unit = 0) is allowed and is used for sections over the empty set.

Characters are the nonzero multiplicative unital functionals with rational
values.  They are computed exactly, as common eigenvectors of the transposed
multiplication operators; when the semisimple quotient has factors that are
proper field extensions of Q the search cannot exhaust it and NotSplitError
is raised rather than returning a silently truncated list.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iter_product
from math import lcm

from .errors import DimensionMismatchError, TriadicaError
from .exactla import (ONE, ZERO, Matrix, Subspace, Vector, full_space, kernel,
                      rat, span, vec)
from .report import Finding, Report


class NotSplitError(TriadicaError):
    """The semisimple quotient has a factor that is not Q itself."""

    def __init__(self, found: int, semisimple_dim: int):
        self.found = found
        self.semisimple_dim = semisimple_dim
        super().__init__(
            f"only {found} rational characters found but the semisimple "
            f"quotient has dimension {semisimple_dim}; the algebra does not "
            f"split over Q")


@dataclass(frozen=True)
class Algebra:
    dim: int
    struct: tuple[tuple[Vector, ...], ...]
    unit: Vector

    def __post_init__(self):
        n = self.dim
        if len(self.struct) != n or len(self.unit) != n:
            raise DimensionMismatchError("structure constants do not match dim")
        for row in self.struct:
            if len(row) != n or any(len(v) != n for v in row):
                raise DimensionMismatchError("structure constants do not match dim")

    @property
    def is_degenerate(self) -> bool:
        return self.dim == 0

    def multiply(self, a, b) -> Vector:
        out = [ZERO] * self.dim
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            row = self.struct[i]
            for j, bj in enumerate(b):
                if bj == 0:
                    continue
                c = ai * bj
                for k, s in enumerate(row[j]):
                    if s != 0:
                        out[k] += c * s
        return tuple(out)

    def left_mult(self, a) -> Matrix:
        """Matrix of multiplication by the element with coordinates a."""
        cols = [self.multiply(a, tuple(ONE if j == i else ZERO for j in range(self.dim)))
                for i in range(self.dim)]
        return Matrix.from_columns(cols, rows=self.dim)

    def power(self, a, k: int) -> Vector:
        out = self.unit
        for _ in range(k):
            out = self.multiply(out, a)
        return out


def algebra_from_struct(struct, unit) -> Algebra:
    rows = tuple(tuple(vec(v) for v in row) for row in struct)
    return Algebra(len(rows), rows, vec(unit))


def validate_algebra(a: Algebra) -> Report:
    """Commutativity, associativity and two-sided unit, with witnesses."""
    findings: list[Finding] = []
    n = a.dim
    basis = [tuple(ONE if j == i else ZERO for j in range(n)) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if a.struct[i][j] != a.struct[j][i]:
                findings.append(Finding("error", f"basis ({i},{j})",
                                        "product is not commutative", [i, j]))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                left = a.multiply(a.struct[i][j], basis[k])
                right = a.multiply(basis[i], a.struct[j][k])
                if left != right:
                    findings.append(Finding("error", f"basis ({i},{j},{k})",
                                            "product is not associative", [i, j, k]))
    for i in range(n):
        if a.multiply(a.unit, basis[i]) != basis[i]:
            findings.append(Finding("error", f"unit*e{i}", "unit is not a left unit", i))
    if n == 0:
        findings.append(Finding("info", "algebra", "degenerate zero algebra (unit = 0)", None))
    return Report("validate_algebra", tuple(findings))


def function_algebra(k: int) -> Algebra:
    """Q^k with pointwise product; k = 0 gives the degenerate zero algebra."""
    struct = tuple(tuple(tuple(ONE if i == j == l else ZERO for l in range(k))
                         for j in range(k)) for i in range(k))
    return Algebra(k, struct, (ONE,) * k)


def truncated_poly_algebra(k: int) -> Algebra:
    """Q[x]/(x^k), basis 1, x, ..., x^(k-1)."""
    if k < 1:
        raise DimensionMismatchError("truncated polynomial algebra needs k >= 1")
    struct = tuple(tuple(tuple(ONE if i + j == l else ZERO for l in range(k))
                         for j in range(k)) for i in range(k))
    return Algebra(k, struct, tuple(ONE if l == 0 else ZERO for l in range(k)))


def is_standard_function_algebra(a: Algebra) -> bool:
    return a == function_algebra(a.dim)


def poly_quotient_algebra(coeffs) -> Algebra:
    """Q[x]/(f) for monic f given by coefficients [c0, ..., c_{k-1}, 1].

    Basis 1, x, ..., x^(k-1); products reduce modulo f.
    """
    coeffs = [rat(c) for c in coeffs]
    if len(coeffs) < 2 or coeffs[-1] != ONE:
        raise DimensionMismatchError("need a monic polynomial of degree >= 1")
    k = len(coeffs) - 1
    powers = [tuple(ONE if l == 0 else ZERO for l in range(k))]
    for _ in range(2 * k - 2):
        prev = powers[-1]
        top = prev[k - 1]
        nxt = [ZERO] + list(prev[:k - 1])
        if top != 0:
            nxt = [y - top * coeffs[l] for l, y in enumerate(nxt)]
        powers.append(tuple(nxt))
    struct = tuple(tuple(powers[i + j] for j in range(k)) for i in range(k))
    return Algebra(k, struct, powers[0])


@dataclass(frozen=True)
class AlgebraMorphism:
    source: Algebra
    target: Algebra
    matrix: Matrix

    def __post_init__(self):
        if self.matrix.cols != self.source.dim or self.matrix.rows != self.target.dim:
            raise DimensionMismatchError(
                f"morphism matrix {self.matrix.rows}x{self.matrix.cols} does not fit "
                f"{self.source.dim} -> {self.target.dim}")

    def apply(self, v) -> Vector:
        return self.matrix.apply(v)


def validate_algebra_morphism(h: AlgebraMorphism) -> Report:
    findings: list[Finding] = []
    src, tgt, m = h.source, h.target, h.matrix
    if m.apply(src.unit) != tgt.unit:
        findings.append(Finding("error", "unit", "unit is not preserved",
                                [str(x) for x in m.apply(src.unit)]))
    for i in range(src.dim):
        for j in range(i, src.dim):
            lhs = m.apply(src.struct[i][j])
            rhs = tgt.multiply(m.col(i), m.col(j))
            if lhs != rhs:
                findings.append(Finding("error", f"basis ({i},{j})",
                                        "product is not preserved", [i, j]))
    return Report("validate_algebra_morphism", tuple(findings))


@dataclass(frozen=True)
class TensorProduct:
    """A tensor B with basis (i,j) -> i*B.dim + j, plus the factor embeddings."""

    algebra: Algebra
    left: Matrix
    right: Matrix


def tensor_product(a: Algebra, b: Algebra) -> TensorProduct:
    n, m = a.dim, b.dim
    nm = n * m
    struct = [[None] * nm for _ in range(nm)]
    for i in range(n):
        for j in range(m):
            for k in range(n):
                for l in range(m):
                    left = a.struct[i][k]
                    right = b.struct[j][l]
                    out = [ZERO] * nm
                    for p, lp in enumerate(left):
                        if lp == 0:
                            continue
                        for q, rq in enumerate(right):
                            if rq != 0:
                                out[p * m + q] = lp * rq
                    struct[i * m + j][k * m + l] = tuple(out)
    unit = [ZERO] * nm
    for p, up in enumerate(a.unit):
        for q, uq in enumerate(b.unit):
            unit[p * m + q] = up * uq
    algebra = Algebra(nm, tuple(tuple(row) for row in struct), tuple(unit))
    left_cols = []
    for i in range(n):
        col = [ZERO] * nm
        for q, uq in enumerate(b.unit):
            col[i * m + q] = uq
        left_cols.append(col)
    right_cols = []
    for j in range(m):
        col = [ZERO] * nm
        for p, up in enumerate(a.unit):
            col[p * m + j] = up
        right_cols.append(col)
    return TensorProduct(algebra,
                         Matrix.from_columns(left_cols, rows=nm),
                         Matrix.from_columns(right_cols, rows=nm))


def multiplication_map(a: Algebra) -> Matrix:
    """The linear map A tensor A -> A sending e_i tensor e_j to their product."""
    n = a.dim
    cols = [a.struct[i][j] for i in range(n) for j in range(n)]
    return Matrix.from_columns(cols, rows=n)


def nilradical(a: Algebra) -> Subspace:
    """Kernel of the trace form t(x, y) = trace(mult by xy).

    Over Q this radical coincides with the set of nilpotent elements for a
    commutative associative algebra.
    """
    n = a.dim
    basis_traces = []
    for k in range(n):
        basis_traces.append(sum((a.struct[k][j][j] for j in range(n)), ZERO))
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            prod = a.struct[i][j]
            row.append(sum((prod[k] * basis_traces[k] for k in range(n)), ZERO))
        rows.append(row)
    return kernel(Matrix.from_rows(rows, cols=n))


@dataclass(frozen=True)
class Character:
    """A multiplicative unital functional, stored by its coefficient row."""

    algebra: Algebra
    functional: Vector

    def __call__(self, v) -> Fraction:
        return sum((c * x for c, x in zip(self.functional, v)), ZERO)


def validate_character(chi: Character) -> Report:
    findings = []
    a = chi.algebra
    if chi(a.unit) != 1:
        findings.append(Finding("error", "unit", "character does not send the unit to 1",
                                str(chi(a.unit))))
    for i in range(a.dim):
        for j in range(i, a.dim):
            if chi(a.struct[i][j]) != chi.functional[i] * chi.functional[j]:
                findings.append(Finding("error", f"basis ({i},{j})",
                                        "character is not multiplicative", [i, j]))
    return Report("validate_character", tuple(findings))


def _char_poly(m: Matrix) -> list[Fraction]:
    """Coefficients [c0, ..., c_{k-1}, 1] of det(t*I - m), by Faddeev-LeVerrier.

    N_1 = m, c_{k-1} = -tr N_1; N_{i+1} = m (N_i + c_{k-i} I),
    c_{k-i-1} = -tr N_{i+1} / (i+1).
    """
    k = m.rows
    if k == 0:
        return [ONE]
    coeffs = [ZERO] * k + [ONE]
    n_mat = m
    c = -sum((n_mat.entries[d][d] for d in range(k)), ZERO)
    coeffs[k - 1] = c
    for i in range(1, k):
        shifted = Matrix(k, k, tuple(
            tuple(n_mat.entries[r][s] + (c if r == s else ZERO) for s in range(k))
            for r in range(k)))
        n_mat = m @ shifted
        c = -sum((n_mat.entries[d][d] for d in range(k)), ZERO) / (i + 1)
        coeffs[k - 1 - i] = c
    return coeffs


def _divisors(n: int) -> list[int]:
    n = abs(n)
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def _rational_roots(coeffs: list[Fraction]) -> list[Fraction]:
    """All rational roots of a nonzero polynomial with rational coefficients."""
    poly = list(coeffs)
    roots = []
    while poly and poly[0] == 0:
        if ZERO not in roots:
            roots.append(ZERO)
        poly = poly[1:]
    if len(poly) <= 1:
        return sorted(roots)
    scale = lcm(*[c.denominator for c in poly])
    ints = [int(c * scale) for c in poly]
    lead, const = ints[-1], ints[0]
    candidates = set()
    for p in _divisors(const):
        for q in _divisors(lead):
            candidates.add(Fraction(p, q))
            candidates.add(Fraction(-p, q))
    for cand in candidates:
        acc = ZERO
        for c in reversed(poly):
            acc = acc * cand + c
        if acc == 0:
            roots.append(cand)
    return sorted(set(roots))


def characters(a: Algebra) -> list[Character]:
    """All rational characters, sorted by functional, or NotSplitError.

    The search refines the dual space by rational eigenvalues of the
    transposed multiplication operators; each surviving line is a candidate
    which is then verified directly.  Completeness is certified against the
    dimension of the semisimple quotient (dim A - dim nilradical).
    """
    n = a.dim
    if n == 0:
        return []
    target = n - nilradical(a).dim
    # piece = echelon row basis of a subspace of the dual space
    pieces: list[tuple[Vector, ...]] = [full_space(n).basis]
    for i in range(n):
        op = a.left_mult(tuple(ONE if j == i else ZERO for j in range(n)))
        refined: list[tuple[Vector, ...]] = []
        for basis in pieces:
            k = len(basis)
            if k == 0:
                continue
            # action on the piece: rows of (basis . op) in piece coordinates
            sub = Subspace(n, basis)
            rep_rows = []
            for b in basis:
                image = op.transpose().apply(b)  # row functional composed with op
                coords = sub.coordinates(image)
                assert coords is not None, "multiplication operators must preserve the piece"
                rep_rows.append(coords)
            rep = Matrix.from_rows(rep_rows, cols=k).transpose()
            for root in _rational_roots(_char_poly(rep)):
                shifted = Matrix(k, k, tuple(
                    tuple(rep.entries[r][s] - (root if r == s else ZERO) for s in range(k))
                    for r in range(k)))
                eig = kernel(shifted)
                if eig.dim == 0:
                    continue
                rows = []
                for cvec in eig.basis:
                    combo = [ZERO] * n
                    for c, b in zip(cvec, basis):
                        if c != 0:
                            combo = [x + c * y for x, y in zip(combo, b)]
                    rows.append(combo)
                refined.append(span(n, rows).basis)
        pieces = refined
    found = []
    for basis in pieces:
        for row in basis:
            at_unit = sum((c * u for c, u in zip(row, a.unit)), ZERO)
            if at_unit == 0:
                continue
            functional = tuple(c / at_unit for c in row)
            cand = Character(a, functional)
            if validate_character(cand).ok:
                found.append(cand)
    unique = {c.functional: c for c in found}
    ordered = [unique[f] for f in sorted(unique)]
    if len(ordered) != target:
        raise NotSplitError(len(ordered), target)
    return ordered


def enumerate_unital_morphisms(a: Algebra, b: Algebra) -> list[AlgebraMorphism]:
    """All unital algebra morphisms between standard function algebras.

    Every such morphism Q^m -> Q^k is the pullback along a point map
    {0..k-1} -> {0..m-1}, so the list has exactly m^k entries, enumerated in
    lexicographic order of the underlying point maps.
    """
    if not is_standard_function_algebra(a) or not is_standard_function_algebra(b):
        raise ValueError("enumeration is defined for standard function algebras only")
    m, k = a.dim, b.dim
    out = []
    for tau in iter_product(range(m), repeat=k):
        rows = [[ONE if tau[r] == c else ZERO for c in range(m)] for r in range(k)]
        out.append(AlgebraMorphism(a, b, Matrix.from_rows(rows, cols=m)))
    return out
