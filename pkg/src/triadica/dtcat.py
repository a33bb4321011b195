"""Morphisms between differential triads and the category they generate.

A morphism rides on a continuous map f: X -> Y.  Its algebra part sends
sections over each open V of Y into sections over the preimage of V; the
module part does the same one level up; and per open, the two parts form a
commuting square with the Leibniz operators.  check_morphism verifies all
of that on basis elements.  The rest of the module builds the standard
morphisms (identity, constant-map, pullback), composes them, and runs the
finite enumerations: recovering a point map from its algebra components,
and counting all morphisms between functional triads over discrete spaces.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import (Character, enumerate_unital_morphisms)
from .errors import DimensionMismatchError, TriadicaError
from .exactla import ONE, ZERO, Matrix, span
from .finspace import (ContinuousMap, FiniteSpace, all_maps, compose_maps,
                       constant_map, continuity_witness, identity_map,
                       is_continuous, minimal_open, preimage_open)
from .report import Finding, Report, merge_reports
from .sheaf import (PresheafMorphism, function_presheaf, pushforward,
                    pushforward_module, stalk, validate_presheaf_morphism)
from .triad import (DifferentialTriad, FunctionalTriad, as_functional,
                    constants_only_kernel, function_triad)


class BoundExceeded(TriadicaError):
    """The requested enumeration is larger than the configured bound."""


@dataclass(frozen=True)
class TriadMorphism:
    """A map of triads: continuous f plus componentwise linear data.

    Components are indexed by opens of the codomain space.  The algebra
    component over V maps A_target(V) into A_source(preimage of V) and is
    expected to be a unit-preserving algebra morphism; the module component
    does the same for the module layer.  check_morphism is the judge; the
    constructor only enforces shapes.
    """

    map: ContinuousMap
    source: DifferentialTriad
    target: DifferentialTriad
    algebra_components: tuple[Matrix, ...]
    module_components: tuple[Matrix, ...]

    def __post_init__(self):
        y_opens = self.target.space.opens
        if len(self.algebra_components) != len(y_opens) or \
                len(self.module_components) != len(y_opens):
            raise DimensionMismatchError("one component pair per codomain open required")
        for v in range(len(y_opens)):
            pre = preimage_open(self.map, v)
            fa = self.algebra_components[v]
            fo = self.module_components[v]
            if fa.cols != self.target.algebras.section_dim(v) or \
                    fa.rows != self.source.algebras.section_dim(pre):
                raise DimensionMismatchError(
                    f"algebra component over open {v} has shape {fa.rows}x{fa.cols}")
            if fo.cols != self.target.modules.section_dim(v) or \
                    fo.rows != self.source.modules.section_dim(pre):
                raise DimensionMismatchError(
                    f"module component over open {v} has shape {fo.rows}x{fo.cols}")

    def preimage(self, v: int) -> int:
        return preimage_open(self.map, v)


def check_morphism(m: TriadMorphism, source: DifferentialTriad | None = None,
                   target: DifferentialTriad | None = None) -> Report:
    """Verify that m really is a morphism of triads.

    Four layers of findings: the frame (continuity and matching spaces),
    the algebra components (unit, products, restriction squares), the module
    components (restriction squares plus compatibility with the algebra
    action), and the operator squares.  Everything is checked on basis
    elements over every open and reported with (open, basis index) witnesses.
    """
    source = m.source if source is None else source
    target = m.target if target is None else target
    frame = []
    if source != m.source or target != m.target:
        frame.append(Finding("error", "frame",
                             "declared source or target disagrees with the morphism",
                             None))
        return Report("check_morphism", tuple(frame))
    if m.map.domain != source.space or m.map.codomain != target.space:
        frame.append(Finding("error", "frame",
                             "underlying map does not connect the triad spaces", None))
        return Report("check_morphism", tuple(frame))
    bad_open = continuity_witness(m.map.values, m.map.domain, m.map.codomain)
    if bad_open is not None:
        frame.append(Finding("error", "continuity",
                             f"preimage of open {bad_open} is not open", bad_open))
    parts = [Report("frame", tuple(frame))]

    push_alg = pushforward(m.map, source.algebras)
    h_alg = PresheafMorphism(target.algebras, push_alg, m.algebra_components)
    parts.append(Report("algebra_components",
                        validate_presheaf_morphism(h_alg, multiplicative=True).findings))

    push_mod = pushforward_module(m.map, source.modules, base_image=push_alg)
    h_mod = PresheafMorphism(target.modules, push_mod, m.module_components)
    module_findings = list(validate_presheaf_morphism(h_mod).findings)
    for v in range(len(target.space.opens)):
        pre = preimage_open(m.map, v)
        act_y = target.modules.sections[v]
        act_x = source.modules.sections[pre]
        fa, fo = m.algebra_components[v], m.module_components[v]
        for i in range(act_y.algebra_dim):
            fa_i = fa.col(i)
            for j in range(act_y.dim):
                lhs = fo.apply(act_y.action[i][j])
                rhs = act_x.act(fa_i, fo.col(j))
                if lhs != rhs:
                    module_findings.append(Finding(
                        "error", f"open {v}, action pair ({i},{j})",
                        "module component is not linear over the algebra component",
                        {"open": v, "pair": [i, j],
                         "defect": [str(p - q) for p, q in zip(lhs, rhs)]}))
    parts.append(Report("module_components", tuple(module_findings)))

    square_findings = []
    for v in range(len(target.space.opens)):
        pre = preimage_open(m.map, v)
        lhs = m.module_components[v] @ target.differentials[v]
        rhs = source.differentials[pre] @ m.algebra_components[v]
        if lhs != rhs:
            diff = lhs - rhs
            j = next(c for c in range(diff.cols)
                     if any(diff.entries[r][c] != 0 for r in range(diff.rows)))
            square_findings.append(Finding(
                "error", f"open {v}, basis {j}",
                "operator square does not commute",
                {"open": v, "basis": j,
                 "defect": [str(x) for x in diff.col(j)]}))
    parts.append(Report("differential_squares", tuple(square_findings)))
    return merge_reports("check_morphism", parts)


def identity_morphism(t: DifferentialTriad) -> TriadMorphism:
    n = len(t.space.opens)
    return TriadMorphism(
        identity_map(t.space), t, t,
        tuple(Matrix.identity(t.algebras.section_dim(v)) for v in range(n)),
        tuple(Matrix.identity(t.modules.section_dim(v)) for v in range(n)))


def compose(g_hat: TriadMorphism, f_hat: TriadMorphism) -> TriadMorphism:
    """g_hat after f_hat.

    Over an open W of the final space, the composite component first applies
    g_hat's component at W, then f_hat's component at the g-preimage of W.
    """
    if f_hat.target != g_hat.source:
        raise DimensionMismatchError("morphisms are not composable")
    gf = compose_maps(g_hat.map, f_hat.map)
    alg, mod = [], []
    for w in range(len(g_hat.target.space.opens)):
        gw = preimage_open(g_hat.map, w)
        alg.append(f_hat.algebra_components[gw] @ g_hat.algebra_components[w])
        mod.append(f_hat.module_components[gw] @ g_hat.module_components[w])
    return TriadMorphism(gf, f_hat.source, g_hat.target, tuple(alg), tuple(mod))


def constant_morphism(source: DifferentialTriad,
                      target: FunctionalTriad | DifferentialTriad,
                      c: int) -> TriadMorphism:
    """The morphism riding on the constant map at c.

    Needs point evaluations on the target algebras: a section over an open
    containing c goes to its value at c times the unit of the global source
    sections.  The module component is zero, which closes the operator
    square because the operator kills constants.  Raises NotFunctional when
    the target cannot evaluate sections at points.
    """
    ft = target if isinstance(target, FunctionalTriad) else as_functional(target)
    t = ft.triad
    f = constant_map(source.space, t.space, c)
    full_x = source.space.open_index(source.space.full_set)
    unit = source.algebras.sections[full_x].unit
    alg, mod = [], []
    for v, vset in enumerate(t.space.opens):
        cols_a = t.algebras.section_dim(v)
        cols_o = t.modules.section_dim(v)
        pre = preimage_open(f, v)
        rows_a = source.algebras.section_dim(pre)
        rows_o = source.modules.section_dim(pre)
        if c in vset:
            erow = ft.embeddings[v].row(sorted(vset).index(c))
            alg.append(Matrix.from_columns(
                [tuple(erow[j] * u for u in unit) for j in range(cols_a)],
                rows=rows_a))
        else:
            alg.append(Matrix.zeros(rows_a, cols_a))
        mod.append(Matrix.zeros(rows_o, cols_o))
    return TriadMorphism(f, source, t, tuple(alg), tuple(mod))


def pullback_morphism(f: ContinuousMap) -> TriadMorphism:
    """Precomposition with f, as a morphism of the functional triads."""
    tx, ty = function_triad(f.domain), function_triad(f.codomain)
    alg = []
    for v, vset in enumerate(f.codomain.opens):
        pre_pts = sorted(f.domain.opens[preimage_open(f, v)])
        v_pts = sorted(vset)
        rows = [[ONE if f.values[x] == q else ZERO for q in v_pts] for x in pre_pts]
        alg.append(Matrix.from_rows(rows, cols=len(v_pts)))
    mod = tuple(Matrix.zeros(0, 0) for _ in f.codomain.opens)
    return TriadMorphism(f, tx, ty, tuple(alg), mod)


# ---------------------------------------------------------------------------
# uniqueness of components


def _image(mat: Matrix):
    return span(mat.rows, [mat.col(j) for j in range(mat.cols)])


def _frame_mismatch(m1: TriadMorphism, m2: TriadMorphism) -> list[Finding]:
    out = []
    if m1.map != m2.map:
        out.append(Finding("error", "frame", "underlying maps differ", None))
    if m1.source != m2.source or m1.target != m2.target:
        out.append(Finding("error", "frame", "morphisms connect different triads", None))
    return out


def differential_agreement_on_image(m1: TriadMorphism,
                                    m2: TriadMorphism) -> Report:
    """Equal algebra components force equal module components on the image
    of the target operator.

    Disagreement ON the image is an error (one input was not a morphism).
    Components may still differ off the image; that is legal and gets an
    informational finding: "agree on image, differ globally".
    """
    findings = _frame_mismatch(m1, m2)
    if not findings and m1.algebra_components != m2.algebra_components:
        findings.append(Finding("error", "preconditions",
                                "algebra components differ", None))
    if findings:
        return Report("differential_agreement_on_image", tuple(findings))
    differ_globally = False
    for v in range(len(m1.target.space.opens)):
        image = _image(m1.target.differentials[v])
        for b in image.basis:
            lhs = m1.module_components[v].apply(b)
            rhs = m2.module_components[v].apply(b)
            if lhs != rhs:
                findings.append(Finding(
                    "error", f"open {v}",
                    "module components disagree on the operator image",
                    {"open": v, "section": [str(c) for c in b],
                     "defect": [str(p - q) for p, q in zip(lhs, rhs)]}))
        if m1.module_components[v] != m2.module_components[v]:
            differ_globally = True
    if differ_globally and not any(f.severity == "error" for f in findings):
        findings.append(Finding("info", "global",
                                "agree on image, differ globally", None))
    return Report("differential_agreement_on_image", tuple(findings))


def algebra_component_uniqueness(m1: TriadMorphism,
                                 m2: TriadMorphism) -> Report:
    """Equal module components force equal algebra components, provided the
    source operator vanishes only on constants.

    The argument runs as an executable proof: the operator kills the
    difference of the components (because the operator squares and the
    module components agree), so the difference lands in the constants, and
    a constant difference of unit-preserving maps must be zero.  Each step
    that fails produces an error finding with a witness; when the kernel
    hypothesis fails the report is exploratory and asserts nothing.
    """
    findings = _frame_mismatch(m1, m2)
    if not findings and m1.module_components != m2.module_components:
        findings.append(Finding("error", "preconditions",
                                "module components differ", None))
    if findings:
        return Report("algebra_component_uniqueness", tuple(findings))
    source = m1.source
    if not constants_only_kernel(source):
        return Report("algebra_component_uniqueness", (
            Finding("warning", "hypothesis",
                    "hypothesis not met: the source operator kernel is larger "
                    "than the constants, no uniqueness is claimed", None),),
            exploratory=True)
    for v in range(len(m1.target.space.opens)):
        pre = preimage_open(m1.map, v)
        a_x = source.algebras.sections[pre]
        d_x = source.differentials[pre]
        diff = m1.algebra_components[v] - m2.algebra_components[v]
        if diff.is_zero():
            continue
        constants = span(a_x.dim, [a_x.unit])
        for j in range(diff.cols):
            col = diff.col(j)
            if all(c == 0 for c in col):
                continue
            witness = {"open": v, "basis": j, "difference": [str(c) for c in col]}
            if any(c != 0 for c in d_x.apply(col)):
                findings.append(Finding(
                    "error", f"open {v}, basis {j}",
                    "difference of algebra components is not killed by the operator "
                    "(an input was not a morphism)", witness))
            elif not constants.contains(col):
                findings.append(Finding(
                    "error", f"open {v}, basis {j}",
                    "difference of algebra components escapes the constants", witness))
            else:
                findings.append(Finding(
                    "error", f"open {v}, basis {j}",
                    "algebra components differ by a nonzero constant", witness))
    return Report("algebra_component_uniqueness", tuple(findings))


# ---------------------------------------------------------------------------
# evaluation characters and point-map recovery


def evaluation_character(ft: FunctionalTriad, x: int) -> Character:
    """Evaluate-at-x as a character of the stalk algebra at x.

    The stalk is the sections over the smallest open around x; the character
    row is the x-row of that open's embedding.  Consistency with every germ
    map is verified: evaluating a restricted section equals evaluating the
    section, for every open containing x.
    """
    space = ft.space
    ux = minimal_open(space, x)
    row = ft.embeddings[ux].row(sorted(space.opens[ux]).index(x))
    chi = Character(ft.triad.algebras.sections[ux], row)
    st = stalk(ft.triad.algebras, x)
    for v, germ in st.germ_maps.items():
        via_germ = tuple(chi(germ.col(j)) for j in range(germ.cols))
        direct = ft.embeddings[v].row(sorted(space.opens[v]).index(x))
        if via_germ != tuple(direct):
            raise TriadicaError(
                f"evaluation at {x} is inconsistent with the germ map from open {v}")
    return chi


def _is_discrete(space: FiniteSpace) -> bool:
    return all(space.is_open(frozenset({p})) for p in space.points)


def verify_pullback_forced(f: ContinuousMap, h: PresheafMorphism) -> Report:
    """Check that a presheaf morphism between full functional sheaves is
    precomposition with f.

    Row r of the component over V is the character "evaluate at the r-th
    preimage point x"; it must coincide with the character "evaluate at
    f(x)" on the sections over V.  For non-discrete spaces the report is
    marked exploratory: there the stalks admit several characters and no
    forcing theorem is asserted.
    """
    findings = []
    exploratory = not (_is_discrete(f.domain) and _is_discrete(f.codomain))
    if exploratory:
        findings.append(Finding("warning", "spaces",
                                "non-discrete spaces: exploratory result only", None))
    if h.source != function_presheaf(f.codomain) or \
            h.target != pushforward(f, function_presheaf(f.domain)):
        findings.append(Finding("error", "frame",
                                "expected the full functional sheaves of the map", None))
        return Report("verify_pullback_forced", tuple(findings),
                      exploratory=exploratory)
    for fd in validate_presheaf_morphism(h, multiplicative=True).findings:
        findings.append(Finding(fd.severity, f"morphism: {fd.location}",
                                fd.message, fd.witness))
    for v, vset in enumerate(f.codomain.opens):
        pre_pts = sorted(f.domain.opens[preimage_open(f, v)])
        v_pts = sorted(vset)
        comp = h.components[v]
        for r, x in enumerate(pre_pts):
            expected = tuple(ONE if f.values[x] == q else ZERO for q in v_pts)
            got = tuple(comp.row(r))
            if got != expected:
                findings.append(Finding(
                    "error", f"open {v}, point {x}",
                    "evaluation after the morphism is not evaluation at the image point",
                    {"open": v, "point": x, "row": [str(c) for c in got]}))
    return Report("verify_pullback_forced", tuple(findings), exploratory=exploratory)


def enumerate_presheaf_morphisms(f: ContinuousMap) -> list[PresheafMorphism]:
    """All unit-preserving multiplicative presheaf morphisms from the full
    functional sheaf on the codomain into the pushforward of the one on the
    domain.

    Depth-first over opens in ascending size; a candidate for an open is kept
    only if it squares with every already-chosen component of a smaller open.
    Candidates per open come in lexicographic point-map order, so the output
    order is deterministic.
    """
    y = f.codomain
    source = function_presheaf(y)
    target = pushforward(f, function_presheaf(f.domain))
    order = sorted(range(len(y.opens)),
                   key=lambda u: (len(y.opens[u]), sorted(y.opens[u])))
    candidates = {
        u: [mor.matrix for mor in
            enumerate_unital_morphisms(source.sections[u], target.sections[u])]
        for u in order}
    strict_subs = {u: [v for v in order if y.opens[v] < y.opens[u]] for u in order}
    out: list[PresheafMorphism] = []
    assigned: dict[int, Matrix] = {}

    def extend(k: int):
        if k == len(order):
            out.append(PresheafMorphism(
                source, target, tuple(assigned[u] for u in range(len(y.opens)))))
            return
        u = order[k]
        for cand in candidates[u]:
            if all(assigned[v] @ source.restriction(u, v) ==
                   target.restriction(u, v) @ cand for v in strict_subs[u]):
                assigned[u] = cand
                extend(k + 1)
                del assigned[u]

    extend(0)
    return out


@dataclass(frozen=True)
class FullnessResult:
    """Outcome of the morphism count between functional triads."""

    source_space: FiniteSpace
    target_space: FiniteSpace
    total: int
    per_map: tuple[tuple[tuple[int, ...], int], ...]
    report: Report


def fullness_check(x_space: FiniteSpace, y_space: FiniteSpace,
                   bound: int = 64) -> FullnessResult:
    """Count all triad morphisms between the functional triads on two spaces.

    A morphism here is a continuous map plus a compatible family of
    unit-preserving algebra maps (the module layer is zero, so it forces
    nothing).  Over discrete spaces the expected answer is one morphism per
    point map, each family being pullback by its map; any deviation is an
    error.  Over non-discrete spaces the count is reported as exploratory,
    with no expectation asserted.
    """
    total_maps = y_space.point_count ** x_space.point_count
    if total_maps > bound:
        raise BoundExceeded(
            f"{total_maps} candidate maps exceed the bound {bound}")
    discrete = _is_discrete(x_space) and _is_discrete(y_space)
    findings = []
    if not discrete:
        findings.append(Finding("warning", "spaces",
                                "non-discrete spaces: counts are exploratory", None))
    per_map = []
    total = 0
    for values in all_maps(x_space, y_space):
        if not is_continuous(values, x_space, y_space):
            continue
        f = ContinuousMap(x_space, y_space, values)
        families = enumerate_presheaf_morphisms(f)
        per_map.append((values, len(families)))
        total += len(families)
        if discrete:
            if len(families) != 1:
                findings.append(Finding(
                    "error", f"map {values}",
                    f"expected exactly one component family, found {len(families)}",
                    list(values)))
            else:
                forced = verify_pullback_forced(f, families[0])
                if not forced.ok:
                    findings.append(Finding(
                        "error", f"map {values}",
                        "the unique component family is not pullback by the map",
                        list(values)))
    if discrete and total != total_maps:
        findings.append(Finding(
            "error", "count",
            f"morphism count {total} does not match point-map count {total_maps}",
            total))
    findings.append(Finding("info", "count",
                            f"{total} morphisms over {len(per_map)} continuous maps",
                            total))
    report = Report("fullness_check", tuple(findings), exploratory=not discrete)
    return FullnessResult(x_space, y_space, total, tuple(per_map), report)
