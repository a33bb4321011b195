"""Presheaves of algebras and modules on finite spaces, and their sheaf theory.

Sections are kept per open-set index; restriction matrices are stored for
every inclusion pair of opens.  On a finite space the sheaf condition only
needs to be checked against irredundant covers (no member contained in the
union of the others), and sheafification has a concrete description: sections
over U are the families of stalk sections (one per point of U, taken at the
point's minimal open) that agree under restriction whenever one minimal open
contains another.

Sections over the empty set are the degenerate zero algebra / zero module;
this is what makes the empty cover of the empty set pass the equalizer test.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Union

from .algebra import (Algebra, AlgebraMorphism, function_algebra,
                      validate_algebra, validate_algebra_morphism)
from .errors import DimensionMismatchError, TriadicaError
from .exactla import ONE, ZERO, Matrix, Subspace, Vector, kernel, span
from .finspace import (ContinuousMap, FiniteSpace, minimal_open,
                       minimal_open_superset, preimage_open)
from .report import Finding, Report


class RestrictionSquareViolation(TriadicaError):
    """A morphism component fails to commute with a restriction map."""

    def __init__(self, open_index: int, section):
        self.open_index = open_index
        self.section = tuple(section)
        super().__init__(
            f"restriction square fails over open index {open_index} "
            f"on section {[str(x) for x in section]}")


@dataclass(frozen=True)
class ModuleSections:
    """Sections of a module over one open: a vector space with an action.

    action[i][j] is the coordinate vector of (algebra basis i) . (module
    basis j); algebra_dim is carried so empty modules keep their shape.
    """

    algebra_dim: int
    dim: int
    action: tuple[tuple[Vector, ...], ...]

    def __post_init__(self):
        if len(self.action) != self.algebra_dim:
            raise DimensionMismatchError("action tensor does not match algebra dim")
        for row in self.action:
            if len(row) != self.dim or any(len(v) != self.dim for v in row):
                raise DimensionMismatchError("action tensor does not match module dim")

    def act(self, a, w) -> Vector:
        out = [ZERO] * self.dim
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            row = self.action[i]
            for j, wj in enumerate(w):
                if wj == 0:
                    continue
                c = ai * wj
                for k, s in enumerate(row[j]):
                    if s != 0:
                        out[k] += c * s
        return tuple(out)

    def act_matrix(self, a) -> Matrix:
        cols = [self.act(a, tuple(ONE if j == i else ZERO for j in range(self.dim)))
                for i in range(self.dim)]
        return Matrix.from_columns(cols, rows=self.dim)


def zero_module_sections(algebra_dim: int) -> ModuleSections:
    return ModuleSections(algebra_dim, 0, tuple(() for _ in range(algebra_dim)))


def free_module_sections(a: Algebra, rank: int) -> ModuleSections:
    """A^rank with the diagonal multiplication action."""
    n = a.dim
    dim = n * rank
    basis = [tuple(ONE if t == i else ZERO for t in range(n)) for i in range(n)]
    action = []
    for i in range(n):
        row = []
        for j in range(dim):
            block, pos = divmod(j, n)
            prod = a.multiply(basis[i], basis[pos])
            out = [ZERO] * dim
            for t, x in enumerate(prod):
                out[block * n + t] = x
            row.append(tuple(out))
        action.append(tuple(row))
    return ModuleSections(n, dim, tuple(action))


def validate_module_sections(a: Algebra, m: ModuleSections) -> Report:
    """Unit acts as identity; action is associative over the algebra."""
    findings: list[Finding] = []
    n = a.dim
    basis = [tuple(ONE if t == i else ZERO for t in range(n)) for i in range(n)]
    mod_basis = [tuple(ONE if t == j else ZERO for t in range(m.dim)) for j in range(m.dim)]
    for j, w in enumerate(mod_basis):
        if m.act(a.unit, w) != w:
            findings.append(Finding("error", f"unit.w{j}",
                                    "unit does not act as the identity", j))
    for i in range(n):
        for j in range(n):
            prod = a.struct[i][j]
            for k, w in enumerate(mod_basis):
                if m.act(prod, w) != m.act(basis[i], m.act(basis[j], w)):
                    findings.append(Finding("error", f"(e{i} e{j}).w{k}",
                                            "action is not associative", [i, j, k]))
    return Report("validate_module_sections", tuple(findings))


@dataclass(frozen=True)
class AlgebraPresheaf:
    space: FiniteSpace
    sections: tuple[Algebra, ...]
    restrictions: dict

    def __post_init__(self):
        if len(self.sections) != len(self.space.opens):
            raise DimensionMismatchError("one section algebra per open required")
        for (u, v), m in self.restrictions.items():
            if m.cols != self.sections[u].dim or m.rows != self.sections[v].dim:
                raise DimensionMismatchError(
                    f"restriction {u}->{v} has shape {m.rows}x{m.cols}")
        for u, v in self.space.inclusion_pairs():
            if (u, v) not in self.restrictions:
                raise DimensionMismatchError(f"missing restriction for inclusion {u}->{v}")

    def algebra(self, u: int) -> Algebra:
        return self.sections[u]

    def restriction(self, u: int, v: int) -> Matrix:
        return self.restrictions[(u, v)]

    def section_dim(self, u: int) -> int:
        return self.sections[u].dim


@dataclass(frozen=True)
class ModulePresheaf:
    base: AlgebraPresheaf
    sections: tuple[ModuleSections, ...]
    restrictions: dict

    def __post_init__(self):
        if len(self.sections) != len(self.base.space.opens):
            raise DimensionMismatchError("one module per open required")
        for u, m in enumerate(self.sections):
            if m.algebra_dim != self.base.sections[u].dim:
                raise DimensionMismatchError(f"module over open {u} has wrong algebra dim")
        for (u, v), m in self.restrictions.items():
            if m.cols != self.sections[u].dim or m.rows != self.sections[v].dim:
                raise DimensionMismatchError(
                    f"module restriction {u}->{v} has shape {m.rows}x{m.cols}")
        for u, v in self.base.space.inclusion_pairs():
            if (u, v) not in self.restrictions:
                raise DimensionMismatchError(f"missing module restriction {u}->{v}")

    @property
    def space(self) -> FiniteSpace:
        return self.base.space

    def module(self, u: int) -> ModuleSections:
        return self.sections[u]

    def restriction(self, u: int, v: int) -> Matrix:
        return self.restrictions[(u, v)]

    def section_dim(self, u: int) -> int:
        return self.sections[u].dim


Presheaf = Union[AlgebraPresheaf, ModulePresheaf]


def _space_of(p: Presheaf) -> FiniteSpace:
    return p.space


def fill_restrictions(space: FiniteSpace, dims, given: dict) -> dict:
    """Complete a restriction table with identities and maps to empty opens."""
    table = dict(given)
    for u, v in space.inclusion_pairs():
        if (u, v) in table:
            continue
        if u == v:
            table[(u, v)] = Matrix.identity(dims[u])
        elif dims[v] == 0:
            table[(u, v)] = Matrix.zeros(0, dims[u])
        else:
            raise DimensionMismatchError(f"missing restriction for inclusion {u}->{v}")
    return table


def make_algebra_presheaf(space: FiniteSpace, sections, restrictions) -> AlgebraPresheaf:
    sections = tuple(sections)
    dims = [a.dim for a in sections]
    return AlgebraPresheaf(space, sections, fill_restrictions(space, dims, restrictions))


def make_module_presheaf(base: AlgebraPresheaf, sections, restrictions) -> ModulePresheaf:
    sections = tuple(sections)
    dims = [m.dim for m in sections]
    return ModulePresheaf(base, sections, fill_restrictions(base.space, dims, restrictions))


def constant_presheaf(space: FiniteSpace, a: Algebra) -> AlgebraPresheaf:
    """a over every nonempty open, identity restrictions, zero over empty."""
    empty = function_algebra(0)
    sections = tuple(a if u else empty for u in space.opens)
    table = {}
    for u, v in space.inclusion_pairs():
        if space.opens[v]:
            table[(u, v)] = Matrix.identity(a.dim)
        else:
            table[(u, v)] = Matrix.zeros(0, sections[u].dim)
    return AlgebraPresheaf(space, sections, table)


def function_restriction_matrix(bigger, smaller) -> Matrix:
    """Coordinate-selection map Q^{sorted bigger} -> Q^{sorted smaller}."""
    big, small = sorted(bigger), sorted(smaller)
    if not small:
        return Matrix.zeros(0, len(big))
    rows = [[ONE if q == p else ZERO for q in big] for p in small]
    return Matrix.from_rows(rows, cols=len(big))


def function_presheaf(space: FiniteSpace) -> AlgebraPresheaf:
    """U -> all rational functions on U, coordinates at sorted points."""
    sections = tuple(function_algebra(len(u)) for u in space.opens)
    table = {(u, v): function_restriction_matrix(space.opens[u], space.opens[v])
             for u, v in space.inclusion_pairs()}
    return AlgebraPresheaf(space, sections, table)


def zero_module_presheaf(base: AlgebraPresheaf) -> ModulePresheaf:
    sections = tuple(zero_module_sections(a.dim) for a in base.sections)
    table = {(u, v): Matrix.zeros(0, 0) for u, v in base.space.inclusion_pairs()}
    return ModulePresheaf(base, sections, table)


def _functoriality_findings(p: Presheaf) -> list[Finding]:
    findings = []
    space = _space_of(p)
    for u, v in space.inclusion_pairs():
        if u == v:
            continue
        for w in range(len(space.opens)):
            if not space.opens[w] <= space.opens[v]:
                continue
            direct = p.restriction(u, w)
            composed = p.restriction(v, w) @ p.restriction(u, v)
            if direct != composed:
                findings.append(Finding("error", f"chain {u}->{v}->{w}",
                                        "restriction maps do not compose functorially",
                                        [u, v, w]))
    return findings


def validate_algebra_presheaf(p: AlgebraPresheaf) -> Report:
    findings: list[Finding] = []
    space = p.space
    for u, algebra in enumerate(p.sections):
        for f in validate_algebra(algebra).errors():
            findings.append(Finding("error", f"open {u}: {f.location}", f.message, f.witness))
        if not space.opens[u] and algebra.dim != 0:
            findings.append(Finding("error", f"open {u}",
                                    "sections over the empty set must be the zero algebra",
                                    algebra.dim))
    for u, v in space.inclusion_pairs():
        r = p.restriction(u, v)
        if u == v and r != Matrix.identity(p.sections[u].dim):
            findings.append(Finding("error", f"restriction {u}->{u}",
                                    "identity inclusion must restrict by the identity", None))
        for f in validate_algebra_morphism(AlgebraMorphism(p.sections[u], p.sections[v], r)).errors():
            findings.append(Finding("error", f"restriction {u}->{v}: {f.location}",
                                    f.message, f.witness))
    findings.extend(_functoriality_findings(p))
    return Report("validate_algebra_presheaf", tuple(findings))


def validate_module_presheaf(m: ModulePresheaf) -> Report:
    findings: list[Finding] = []
    space = m.space
    for u in range(len(space.opens)):
        for f in validate_module_sections(m.base.sections[u], m.sections[u]).errors():
            findings.append(Finding("error", f"open {u}: {f.location}", f.message, f.witness))
        if not space.opens[u] and m.sections[u].dim != 0:
            findings.append(Finding("error", f"open {u}",
                                    "module sections over the empty set must vanish",
                                    m.sections[u].dim))
    for u, v in space.inclusion_pairs():
        rho = m.restriction(u, v)
        if u == v and rho != Matrix.identity(m.sections[u].dim):
            findings.append(Finding("error", f"module restriction {u}->{u}",
                                    "identity inclusion must restrict by the identity", None))
        # restriction is a module map over the algebra restriction
        r = m.base.restriction(u, v)
        alg = m.base.sections[u]
        for i in range(alg.dim):
            a = tuple(ONE if t == i else ZERO for t in range(alg.dim))
            for j in range(m.sections[u].dim):
                w = tuple(ONE if t == j else ZERO for t in range(m.sections[u].dim))
                lhs = rho.apply(m.sections[u].act(a, w))
                rhs = m.sections[v].act(r.apply(a), rho.apply(w))
                if lhs != rhs:
                    findings.append(Finding("error", f"module restriction {u}->{v}",
                                            "restriction does not respect the action",
                                            [i, j]))
    findings.extend(_functoriality_findings(m))
    return Report("validate_module_presheaf", tuple(findings))


@dataclass(frozen=True)
class Stalk:
    point: int
    open_index: int
    sections: object
    germ_maps: dict


def stalk(p: Presheaf, x: int) -> Stalk:
    """Sections over the minimal open of x, with the maps from larger opens."""
    space = _space_of(p)
    ux = minimal_open(space, x)
    germs = {v: p.restriction(v, ux) for v in space.opens_containing({x})}
    return Stalk(x, ux, p.sections[ux], germs)


@dataclass(frozen=True)
class PresheafMorphism:
    """Componentwise linear map between presheaves over the same space."""

    source: Presheaf
    target: Presheaf
    components: tuple[Matrix, ...]

    def __post_init__(self):
        space = _space_of(self.source)
        if len(self.components) != len(space.opens):
            raise DimensionMismatchError("one component per open required")
        for u, c in enumerate(self.components):
            if c.cols != self.source.section_dim(u) or c.rows != self.target.section_dim(u):
                raise DimensionMismatchError(f"component over open {u} has shape "
                                             f"{c.rows}x{c.cols}")

    def component(self, u: int) -> Matrix:
        return self.components[u]


def validate_presheaf_morphism(h: PresheafMorphism, multiplicative: bool = False) -> Report:
    """Restriction squares; optionally unit/product preservation per open."""
    findings: list[Finding] = []
    space = _space_of(h.source)
    for u, v in space.inclusion_pairs():
        lhs = h.components[v] @ h.source.restriction(u, v)
        rhs = h.target.restriction(u, v) @ h.components[u]
        if lhs != rhs:
            findings.append(Finding("error", f"square {u}->{v}",
                                    "component does not commute with restriction",
                                    [u, v]))
    if multiplicative:
        for u in range(len(space.opens)):
            mor = AlgebraMorphism(h.source.sections[u], h.target.sections[u],
                                  h.components[u])
            for f in validate_algebra_morphism(mor).errors():
                findings.append(Finding("error", f"open {u}: {f.location}",
                                        f.message, f.witness))
    return Report("validate_presheaf_morphism", tuple(findings))


# ---------------------------------------------------------------------------
# sheaf condition


@dataclass(frozen=True)
class CoverWitness:
    open_index: int
    cover: tuple[int, ...]
    kind: str  # "not_injective" or "gluing_fails"
    section: object


@dataclass(frozen=True)
class SheafCertificate:
    presheaf: Presheaf
    is_sheaf: bool
    witnesses: tuple[CoverWitness, ...]


def irredundant_covers(space: FiniteSpace, u: int) -> list[tuple[int, ...]]:
    """Covers of opens[u] by proper nonempty opens, none inside the others'
    union; for the empty open this is just the empty cover."""
    u_set = space.opens[u]
    if not u_set:
        return [()]
    members = [i for i, w in enumerate(space.opens) if w and w < u_set]
    out = []
    for r in range(1, len(members) + 1):
        for combo in combinations(members, r):
            union = frozenset().union(*[space.opens[i] for i in combo])
            if union != u_set:
                continue
            redundant = False
            for i in combo:
                others = [space.opens[j] for j in combo if j != i]
                rest = frozenset().union(*others) if others else frozenset()
                if space.opens[i] <= rest:
                    redundant = True
                    break
            if not redundant:
                out.append(combo)
    return sorted(out)


def _equalizer_data(p: Presheaf, u: int, cover: tuple[int, ...]):
    """Natural map into the product and the compatible-family subspace."""
    space = _space_of(p)
    dims = [p.section_dim(i) for i in cover]
    offsets = []
    total = 0
    for d in dims:
        offsets.append(total)
        total += d
    if cover:
        natural = Matrix(total, p.section_dim(u),
                         tuple(row for i in cover for row in p.restriction(u, i).entries))
    else:
        natural = Matrix.zeros(0, p.section_dim(u))
    rows = []
    for a_pos in range(len(cover)):
        for b_pos in range(a_pos + 1, len(cover)):
            i, j = cover[a_pos], cover[b_pos]
            meet = space.open_index(space.opens[i] & space.opens[j])
            ri = p.restriction(i, meet)
            rj = p.restriction(j, meet)
            for r in range(ri.rows):
                row = [ZERO] * total
                for c in range(ri.cols):
                    row[offsets[a_pos] + c] += ri.entries[r][c]
                for c in range(rj.cols):
                    row[offsets[b_pos] + c] -= rj.entries[r][c]
                rows.append(row)
    if rows:
        compatible = kernel(Matrix.from_rows(rows, cols=total))
    else:
        compatible = Subspace(total, Matrix.identity(total).entries if total else ())
    return natural, compatible, offsets, dims


def _split_family(vector, offsets, dims):
    return [tuple(vector[o:o + d]) for o, d in zip(offsets, dims)]


def check_sheaf_condition(p: Presheaf) -> SheafCertificate:
    """Equalizer test against every irredundant cover of every open.

    The image of the natural map always lies in the compatible-family space
    (functoriality), so the test reduces to: natural map injective, and its
    rank equal to the dimension of the compatible-family space.
    """
    space = _space_of(p)
    witnesses: list[CoverWitness] = []
    for u in range(len(space.opens)):
        for cover in irredundant_covers(space, u):
            natural, compatible, offsets, dims = _equalizer_data(p, u, cover)
            ker = kernel(natural)
            if ker.dim > 0:
                witnesses.append(CoverWitness(u, cover, "not_injective",
                                              [str(x) for x in ker.basis[0]]))
                continue
            image = span(natural.rows, [natural.col(c) for c in range(natural.cols)])
            if image.dim != compatible.dim:
                stray = next(b for b in compatible.basis if not image.contains(b))
                family = [[str(x) for x in chunk]
                          for chunk in _split_family(stray, offsets, dims)]
                witnesses.append(CoverWitness(u, cover, "gluing_fails", family))
    return SheafCertificate(p, not witnesses, tuple(witnesses))


# ---------------------------------------------------------------------------
# sheafification


@dataclass(frozen=True)
class FamilyLayout:
    """Coordinates of the compatible-stalk-family space over one open."""

    points: tuple[int, ...]
    stalk_opens: tuple[int, ...]
    offsets: tuple[int, ...]
    dims: tuple[int, ...]
    total: int
    basis: tuple[Vector, ...]  # echelon basis of the compatible subspace

    def chunks(self, vector):
        return [tuple(vector[o:o + d]) for o, d in zip(self.offsets, self.dims)]

    def coordinates(self, vector) -> Vector:
        return _family_coordinates(self, vector)


def _family_layout(p: Presheaf, u: int) -> FamilyLayout:
    space = _space_of(p)
    pts = tuple(sorted(space.opens[u]))
    stalk_opens = tuple(minimal_open(space, x) for x in pts)
    dims = tuple(p.section_dim(s) for s in stalk_opens)
    offsets = []
    total = 0
    for d in dims:
        offsets.append(total)
        total += d
    rows = []
    for a_pos, x in enumerate(pts):
        for b_pos, y in enumerate(pts):
            if x == y:
                continue
            # y in U_x exactly when U_y is inside U_x
            if not space.opens[stalk_opens[b_pos]] <= space.opens[stalk_opens[a_pos]]:
                continue
            if space.opens[stalk_opens[b_pos]] == space.opens[stalk_opens[a_pos]]:
                # identical minimal opens at distinct points: both directions
                # would give the same constraint twice; keep one orientation
                if b_pos < a_pos:
                    continue
            r = p.restriction(stalk_opens[a_pos], stalk_opens[b_pos])
            for row_idx in range(r.rows):
                row = [ZERO] * total
                for c in range(r.cols):
                    row[offsets[a_pos] + c] += r.entries[row_idx][c]
                row[offsets[b_pos] + row_idx] -= ONE
                rows.append(row)
    if rows:
        basis = kernel(Matrix.from_rows(rows, cols=total)).basis
    else:
        basis = Matrix.identity(total).entries if total else ()
    return FamilyLayout(pts, stalk_opens, tuple(offsets), dims, total, basis)


@dataclass(frozen=True)
class Sheafification:
    presheaf: Presheaf
    canonical: PresheafMorphism
    layouts: tuple[FamilyLayout, ...]


def _family_coordinates(layout: FamilyLayout, vector) -> Vector:
    coords = Subspace(layout.total, layout.basis).coordinates(vector)
    assert coords is not None, "family is not compatible; sheafification is broken"
    return coords


def _restriction_between_layouts(space, lu: FamilyLayout, lv: FamilyLayout) -> Matrix:
    """Truncate families from a bigger open to a smaller one."""
    if lv.total == 0 or not lv.basis:
        return Matrix.zeros(len(lv.basis), len(lu.basis))
    cols = []
    for b in lu.basis:
        chunks = lu.chunks(b)
        chunk_of = dict(zip(lu.points, chunks))
        truncated = tuple(x for p in lv.points for x in chunk_of[p])
        cols.append(_family_coordinates(lv, truncated))
    return Matrix.from_columns(cols, rows=len(lv.basis))


def sheafify(p: AlgebraPresheaf) -> Sheafification:
    """Compatible-stalk-family sheafification of an algebra presheaf."""
    space = p.space
    layouts = tuple(_family_layout(p, u) for u in range(len(space.opens)))
    algebras = []
    for u, layout in enumerate(layouts):
        k = len(layout.basis)
        struct = []
        for a in layout.basis:
            row = []
            a_chunks = layout.chunks(a)
            for b in layout.basis:
                b_chunks = layout.chunks(b)
                prod = tuple(x
                             for s, ac, bc in zip(layout.stalk_opens, a_chunks, b_chunks)
                             for x in p.sections[s].multiply(ac, bc))
                row.append(_family_coordinates(layout, prod))
            struct.append(tuple(row))
        unit_family = tuple(x for s in layout.stalk_opens for x in p.sections[s].unit)
        unit = _family_coordinates(layout, unit_family) if k else ()
        algebras.append(Algebra(k, tuple(struct), unit))
    table = {}
    for u, v in space.inclusion_pairs():
        table[(u, v)] = _restriction_between_layouts(space, layouts[u], layouts[v])
    plus = AlgebraPresheaf(space, tuple(algebras), table)
    components = []
    for u, layout in enumerate(layouts):
        cols = []
        for i in range(p.section_dim(u)):
            e = tuple(ONE if t == i else ZERO for t in range(p.section_dim(u)))
            family = tuple(x for s in layout.stalk_opens
                           for x in p.restriction(u, s).apply(e))
            cols.append(_family_coordinates(layout, family))
        components.append(Matrix.from_columns(cols, rows=len(layout.basis))
                          if cols or layout.basis else Matrix.zeros(len(layout.basis), 0))
    canonical = PresheafMorphism(p, plus, tuple(components))
    return Sheafification(plus, canonical, layouts)


def sheafify_module(m: ModulePresheaf, base_plus: Sheafification) -> Sheafification:
    """Sheafify a module presheaf over the already-sheafified base algebra."""
    space = m.space
    base_layouts = base_plus.layouts
    layouts = tuple(_family_layout(m, u) for u in range(len(space.opens)))
    modules = []
    for u, layout in enumerate(layouts):
        alg_layout = base_layouts[u]
        alg_dim = len(alg_layout.basis)
        action = []
        for a in alg_layout.basis:
            a_chunks = alg_layout.chunks(a)
            row = []
            for w in layout.basis:
                w_chunks = layout.chunks(w)
                acted = tuple(x
                              for s, ac, wc in zip(layout.stalk_opens, a_chunks, w_chunks)
                              for x in m.sections[s].act(ac, wc))
                row.append(_family_coordinates(layout, acted))
            action.append(tuple(row))
        modules.append(ModuleSections(alg_dim, len(layout.basis), tuple(action)))
    table = {}
    for u, v in space.inclusion_pairs():
        table[(u, v)] = _restriction_between_layouts(space, layouts[u], layouts[v])
    plus = ModulePresheaf(base_plus.presheaf, tuple(modules), table)
    components = []
    for u, layout in enumerate(layouts):
        cols = []
        for i in range(m.section_dim(u)):
            e = tuple(ONE if t == i else ZERO for t in range(m.section_dim(u)))
            family = tuple(x for s in layout.stalk_opens
                           for x in m.restriction(u, s).apply(e))
            cols.append(_family_coordinates(layout, family))
        components.append(Matrix.from_columns(cols, rows=len(layout.basis))
                          if cols else Matrix.zeros(len(layout.basis), 0))
    canonical = PresheafMorphism(m, plus, tuple(components))
    return Sheafification(plus, canonical, layouts)


# ---------------------------------------------------------------------------
# pushforward


def pushforward(f: ContinuousMap, p: AlgebraPresheaf) -> AlgebraPresheaf:
    """Direct image: sections over V are the sections over the preimage."""
    if p.space != f.domain:
        raise DimensionMismatchError("presheaf does not live on the map's domain")
    y = f.codomain
    pre = [preimage_open(f, v) for v in range(len(y.opens))]
    sections = tuple(p.sections[pre[v]] for v in range(len(y.opens)))
    table = {(u, v): p.restriction(pre[u], pre[v]) for u, v in y.inclusion_pairs()}
    return AlgebraPresheaf(y, sections, table)


def pushforward_module(f: ContinuousMap, m: ModulePresheaf,
                       base_image: AlgebraPresheaf | None = None) -> ModulePresheaf:
    if base_image is None:
        base_image = pushforward(f, m.base)
    y = f.codomain
    pre = [preimage_open(f, v) for v in range(len(y.opens))]
    sections = tuple(m.sections[pre[v]] for v in range(len(y.opens)))
    table = {(u, v): m.restriction(pre[u], pre[v]) for u, v in y.inclusion_pairs()}
    return ModulePresheaf(base_image, sections, table)


def pushforward_morphism(f: ContinuousMap, h: PresheafMorphism) -> PresheafMorphism:
    src = pushforward(f, h.source) if isinstance(h.source, AlgebraPresheaf) \
        else pushforward_module(f, h.source)
    tgt = pushforward(f, h.target) if isinstance(h.target, AlgebraPresheaf) \
        else pushforward_module(f, h.target)
    pre = [preimage_open(f, v) for v in range(len(f.codomain.opens))]
    return PresheafMorphism(src, tgt, tuple(h.components[pre[v]]
                                            for v in range(len(f.codomain.opens))))


# ---------------------------------------------------------------------------
# sections and morphisms over arbitrary subsets


@dataclass(frozen=True)
class SubsetSections:
    """Finite stand-in for sections over a closed-in subset K: sections over
    the smallest open around K, with the maps from every open containing K."""

    subset: frozenset
    open_index: int
    sections: object
    maps: dict


def sections_over_subset(p: Presheaf, subset) -> SubsetSections:
    space = _space_of(p)
    uk = minimal_open_superset(space, subset)
    maps = {v: p.restriction(v, uk) for v in space.opens_containing(subset)}
    return SubsetSections(frozenset(subset), uk, p.sections[uk], maps)


def morphism_over_subset(h: PresheafMorphism, subset) -> Matrix:
    """Component of a presheaf morphism at a subset's minimal open.

    Raises RestrictionSquareViolation if some open above the subset
    disagrees after restriction (witnessing that h was not a morphism).
    """
    space = _space_of(h.source)
    uk = minimal_open_superset(space, subset)
    hk = h.components[uk]
    for v in space.opens_containing(subset):
        lhs = hk @ h.source.restriction(v, uk)
        rhs = h.target.restriction(v, uk) @ h.components[v]
        if lhs != rhs:
            diff = lhs - rhs
            col = next(c for c in range(diff.cols)
                       if any(diff.entries[r][c] != 0 for r in range(diff.rows)))
            section = tuple(ONE if t == col else ZERO
                            for t in range(h.source.section_dim(v)))
            raise RestrictionSquareViolation(v, section)
    return hk
