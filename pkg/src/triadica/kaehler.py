"""Universal differential modules for finite-dimensional rational algebras.

The module of an algebra A is built from the multiplication kernel I inside
A (x) A: the module is I / I^2, the operator sends x to the class of
x (x) 1 - 1 (x) x, and A acts through multiplication by x (x) 1.  Every
derivation out of A factors through this operator by a unique module map;
`factor_derivation` computes that map by exact linear solving and reports
whether it was pinned down uniquely.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .algebra import Algebra, multiplication_map, tensor_product
from .errors import DimensionMismatchError, TriadicaError
from .exactla import (ONE, ZERO, Matrix, Quotient, Subspace, full_space,
                      kernel, product_subspace, quotient_space, solve, span,
                      vec_scale)
from .report import Finding
from .sheaf import (AlgebraPresheaf, ModulePresheaf, ModuleSections,
                    Sheafification, sheafify, sheafify_module)
from .triad import DifferentialTriad, check_leibniz


class NotADerivation(TriadicaError):
    """The map handed to factor_derivation does not satisfy the Leibniz rule."""

    def __init__(self, finding: Finding):
        self.finding = finding
        super().__init__(f"not a derivation: {finding.location}: {finding.message}")


class FactorizationFailed(TriadicaError):
    """No module map factors the derivation through the given operator."""


@dataclass(frozen=True)
class KaehlerModule:
    """Universal differential module of an algebra, with its build data.

    `ideal` is the multiplication kernel in tensor coordinates and
    `quotient` maps ideal coordinates onto module coordinates; both are kept
    so tests and callers can trace module elements back to tensors.
    """

    algebra: Algebra
    module: ModuleSections
    differential: Matrix
    ideal: Subspace
    ideal_square: Subspace
    quotient: Quotient


def _basis_vec(n: int, i: int):
    return tuple(ONE if t == i else ZERO for t in range(n))


def kaehler_module(a: Algebra) -> KaehlerModule:
    n = a.dim
    t = tensor_product(a, a)
    ideal = kernel(multiplication_map(a))
    square = product_subspace(ideal, ideal, t.algebra.struct)
    square_in_ideal = span(ideal.dim, [ideal.coordinates(b) for b in square.basis])
    quot = quotient_space(ideal.dim, square_in_ideal)
    omega_dim = quot.quotient_dim

    def left_tensor(i: int):
        # e_i (x) 1 in tensor coordinates
        out = [ZERO] * (n * n)
        for j, uj in enumerate(a.unit):
            if uj != 0:
                out[i * n + j] += uj
        return tuple(out)

    cols = []
    for i in range(n):
        diff = list(left_tensor(i))
        for j, uj in enumerate(a.unit):
            if uj != 0:
                diff[j * n + i] -= uj
        coords = ideal.coordinates(diff)
        assert coords is not None, "x(x)1 - 1(x)x escaped the multiplication kernel"
        cols.append(quot.projection.apply(coords))
    d = Matrix.from_columns(cols, rows=omega_dim)

    lifts = []
    for k in range(omega_dim):
        in_ideal = quot.section.apply(_basis_vec(omega_dim, k))
        ambient = [ZERO] * (n * n)
        for c, b in zip(in_ideal, ideal.basis):
            if c != 0:
                ambient = [x + c * y for x, y in zip(ambient, b)]
        lifts.append(tuple(ambient))
    action = []
    for i in range(n):
        left = left_tensor(i)
        row = []
        for k in range(omega_dim):
            prod = t.algebra.multiply(left, lifts[k])
            coords = ideal.coordinates(prod)
            assert coords is not None, "the multiplication kernel is not an ideal"
            row.append(quot.projection.apply(coords))
        action.append(tuple(row))
    module = ModuleSections(n, omega_dim, tuple(action))
    return KaehlerModule(a, module, d, ideal, square_in_ideal, quot)


@dataclass(frozen=True)
class Factorization:
    matrix: Matrix
    unique: bool


def factor_derivation(k: KaehlerModule, target: ModuleSections,
                      derivation: Matrix) -> Factorization:
    """Unique module map phi with phi . d = derivation, solved exactly.

    Raises NotADerivation when the input map breaks the Leibniz rule and
    FactorizationFailed when no module map fits (which can only happen for a
    doctored operator, never for the universal one).
    """
    a = k.algebra
    if target.algebra_dim != a.dim:
        raise DimensionMismatchError("target module is over a different algebra")
    if derivation.rows != target.dim or derivation.cols != a.dim:
        raise DimensionMismatchError(
            f"derivation has shape {derivation.rows}x{derivation.cols}")
    leibniz = check_leibniz(a, target, derivation)
    if not leibniz.ok:
        raise NotADerivation(leibniz.errors()[0])
    om, tm = k.module.dim, target.dim
    unknowns = tm * om  # phi[r][c] at index r*om + c
    rows, rhs = [], []
    for i in range(a.dim):
        dcol = k.differential.col(i)
        for r in range(tm):
            row = [ZERO] * unknowns
            for c in range(om):
                row[r * om + c] = dcol[c]
            rows.append(row)
            rhs.append(derivation.entries[r][i])
    for i in range(a.dim):
        act_omega = k.module.act_matrix(_basis_vec(a.dim, i))
        act_target = target.act_matrix(_basis_vec(a.dim, i))
        for j in range(om):
            acted = act_omega.col(j)
            for r in range(tm):
                row = [ZERO] * unknowns
                for c in range(om):
                    row[r * om + c] += acted[c]
                for s in range(tm):
                    row[s * om + j] -= act_target.entries[r][s]
                rows.append(row)
                rhs.append(ZERO)
    system = Matrix.from_rows(rows, cols=unknowns) if rows else Matrix.zeros(0, unknowns)
    result = solve(system, tuple(rhs))
    if not result.consistent:
        raise FactorizationFailed("no module map factors the derivation")
    entries = tuple(tuple(result.solution[r * om + c] for c in range(om))
                    for r in range(tm))
    return Factorization(Matrix(tm, om, entries), result.unique)


def derivation_space(a: Algebra, target: ModuleSections) -> list[Matrix]:
    """Basis of the space of derivations from a into the target module."""
    if target.algebra_dim != a.dim:
        raise DimensionMismatchError("target module is over a different algebra")
    n, tm = a.dim, target.dim
    unknowns = tm * n  # D[r][i] at index r*n + i
    rows = []
    act = [target.act_matrix(_basis_vec(n, i)) for i in range(n)]
    for i in range(n):
        for j in range(i, n):
            prod = a.struct[i][j]
            for r in range(tm):
                row = [ZERO] * unknowns
                for idx, coeff in enumerate(prod):
                    row[r * n + idx] += coeff
                for s in range(tm):
                    row[s * n + j] -= act[i].entries[r][s]
                    row[s * n + i] -= act[j].entries[r][s]
                rows.append(row)
    space = kernel(Matrix.from_rows(rows, cols=unknowns)) if rows \
        else full_space(unknowns)
    out = []
    for b in space.basis:
        out.append(Matrix(tm, n, tuple(tuple(b[r * n + i] for i in range(n))
                                       for r in range(tm))))
    return out


def random_derivations(a: Algebra, target: ModuleSections, count: int,
                       seed: int = 0) -> list[Matrix]:
    """Seeded random rational combinations of a derivation-space basis."""
    basis = derivation_space(a, target)
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        m = Matrix.zeros(target.dim, a.dim)
        for b in basis:
            c = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
            m = m + b.scaled(c)
        out.append(m)
    return out


def restrict_scalars(m: ModuleSections, r: Matrix) -> ModuleSections:
    """View a module over the restriction target as one over the source."""
    if r.rows != m.algebra_dim:
        raise DimensionMismatchError("restriction does not land in the module's algebra")
    action = []
    for i in range(r.cols):
        image = r.col(i)
        action.append(tuple(m.act(image, _basis_vec(m.dim, j))
                            for j in range(m.dim)))
    return ModuleSections(r.cols, m.dim, tuple(action))


@dataclass(frozen=True)
class KaehlerPresheafResult:
    presheaf_triad: DifferentialTriad
    sheaf_triad: DifferentialTriad
    per_open: tuple[KaehlerModule, ...]
    base_sheafification: Sheafification
    module_sheafification: Sheafification


def kaehler_presheaf(base: AlgebraPresheaf) -> KaehlerPresheafResult:
    """Universal differential module over every open, glued into a triad.

    Module restrictions are forced: the composite of the small-open operator
    with the algebra restriction is a derivation, so it factors uniquely
    through the big-open module.  The result is returned both as a raw
    presheaf triad and with both layers sheafified and the operator carried
    across blockwise.
    """
    space = base.space
    per_open = tuple(kaehler_module(base.sections[u])
                     for u in range(len(space.opens)))
    table = {}
    for u, v in space.inclusion_pairs():
        if u == v:
            table[(u, v)] = Matrix.identity(per_open[u].module.dim)
            continue
        r = base.restriction(u, v)
        target = restrict_scalars(per_open[v].module, r)
        composite = per_open[v].differential @ r
        table[(u, v)] = factor_derivation(per_open[u], target, composite).matrix
    modules = ModulePresheaf(base, tuple(k.module for k in per_open), table)
    diffs = tuple(k.differential for k in per_open)
    presheaf_triad = DifferentialTriad(base, modules, diffs)

    base_plus = sheafify(base)
    module_plus = sheafify_module(modules, base_plus)
    d_plus = []
    for u in range(len(space.opens)):
        alg_layout = base_plus.layouts[u]
        mod_layout = module_plus.layouts[u]
        cols = []
        for b in alg_layout.basis:
            chunks = alg_layout.chunks(b)
            image = tuple(x for s, chunk in zip(alg_layout.stalk_opens, chunks)
                          for x in diffs[s].apply(chunk))
            cols.append(mod_layout.coordinates(image))
        d_plus.append(Matrix.from_columns(cols, rows=len(mod_layout.basis)))
    sheaf_triad = DifferentialTriad(base_plus.presheaf, module_plus.presheaf,
                                    tuple(d_plus))
    return KaehlerPresheafResult(presheaf_triad, sheaf_triad, per_open,
                                 base_plus, module_plus)
