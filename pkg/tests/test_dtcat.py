"""Triad morphisms: validation, category laws, constant maps, uniqueness of
components, point-map recovery, and the fullness count."""

import itertools
from fractions import Fraction

import pytest

from triadica.algebra import characters, function_algebra, truncated_poly_algebra
from triadica.dtcat import (BoundExceeded, FullnessResult, TriadMorphism,
                            algebra_component_uniqueness, check_morphism,
                            compose, constant_morphism,
                            differential_agreement_on_image,
                            enumerate_presheaf_morphisms, evaluation_character,
                            fullness_check, identity_morphism,
                            pullback_morphism, verify_pullback_forced)
from triadica.errors import DimensionMismatchError
from triadica.exactla import Matrix, vec
from triadica.finspace import (ContinuousMap, all_maps, discrete_space,
                               is_continuous, sierpinski_space)
from triadica.kaehler import kaehler_module, kaehler_presheaf
from triadica.sheaf import (ModuleSections, PresheafMorphism, constant_presheaf,
                            function_presheaf, pushforward, zero_module_sections)
from triadica.triad import (DifferentialTriad, NotFunctional, as_functional,
                            constant_triad, constants_only_kernel,
                            function_triad)

POINT = discrete_space(1)


def kaehler_point_triad(a):
    """The algebra's universal differential module as a triad over one point."""
    k = kaehler_module(a)
    return constant_triad(POINT, a, k.module, k.differential)


def order_three_endomorphism(a, b):
    """The triad endomorphism induced by x -> a*x + b*x^2 on Q[x]/(x^3)."""
    t = kaehler_point_triad(truncated_poly_algebra(3))
    fa = Matrix.from_columns([vec([1, 0, 0]), vec([0, a, b]), vec([0, 0, a * a])],
                             rows=3)
    fo = Matrix.from_columns([vec([a, 2 * b]), vec([0, a * a])], rows=2)
    full = POINT.open_index(frozenset({0}))
    alg = [None] * len(POINT.opens)
    mod = [None] * len(POINT.opens)
    for v, vset in enumerate(POINT.opens):
        if vset:
            alg[v], mod[v] = fa, fo
        else:
            alg[v], mod[v] = Matrix.zeros(0, 0), Matrix.zeros(0, 0)
    return TriadMorphism(ContinuousMap(POINT, POINT, (0,)), t, t,
                         tuple(alg), tuple(mod))


# ---------------------------------------------------------------------------
# check_morphism


def test_identity_is_a_morphism_on_fixture_triads():
    fixtures = [
        function_triad(discrete_space(2)),
        function_triad(sierpinski_space()),
        kaehler_point_triad(truncated_poly_algebra(3)),
        kaehler_presheaf(constant_presheaf(
            sierpinski_space(), truncated_poly_algebra(2))).presheaf_triad,
    ]
    for t in fixtures:
        assert check_morphism(identity_morphism(t)).ok


def test_pullback_is_a_morphism_for_every_map():
    spaces = [discrete_space(2), discrete_space(3), sierpinski_space()]
    for x in spaces:
        for y in spaces:
            for values in all_maps(x, y):
                if not is_continuous(values, x, y):
                    continue
                pm = pullback_morphism(ContinuousMap(x, y, values))
                assert check_morphism(pm).ok


def test_doubled_module_component_breaks_the_operator_square():
    t = kaehler_point_triad(truncated_poly_algebra(3))
    good = identity_morphism(t)
    bad = TriadMorphism(good.map, t, t, good.algebra_components,
                        tuple(c.scaled(Fraction(2))
                              for c in good.module_components))
    report = check_morphism(bad)
    assert not report.ok
    errs = report.errors()
    assert any("differential_squares" in f.location for f in errs)
    assert any(f.witness and f.witness.get("defect") for f in errs
               if isinstance(f.witness, dict))


def test_declared_frame_must_match():
    t = function_triad(discrete_space(2))
    other = function_triad(sierpinski_space())
    report = check_morphism(identity_morphism(t), source=other)
    assert not report.ok


def test_component_shapes_are_enforced():
    t = function_triad(discrete_space(2))
    good = identity_morphism(t)
    with pytest.raises(DimensionMismatchError):
        TriadMorphism(good.map, t, t, good.algebra_components[:-1] +
                      (Matrix.zeros(1, 1),), good.module_components)


# ---------------------------------------------------------------------------
# category laws


def pullback_chain():
    f = ContinuousMap(discrete_space(2), discrete_space(3), (2, 0))
    g = ContinuousMap(discrete_space(3), discrete_space(2), (1, 1, 0))
    h = ContinuousMap(discrete_space(2), discrete_space(2), (1, 0))
    return pullback_morphism(f), pullback_morphism(g), pullback_morphism(h)


def mixed_chain():
    source = kaehler_presheaf(constant_presheaf(
        sierpinski_space(), truncated_poly_algebra(3))).presheaf_triad
    m1 = constant_morphism(source, function_triad(discrete_space(2)), 1)
    m2 = pullback_morphism(ContinuousMap(discrete_space(2), discrete_space(3),
                                         (2, 0)))
    m3 = pullback_morphism(ContinuousMap(discrete_space(3), discrete_space(2),
                                         (1, 1, 0)))
    return m1, m2, m3


@pytest.mark.parametrize("chain", [pullback_chain, mixed_chain])
def test_associativity_of_composition(chain):
    m1, m2, m3 = chain()
    left = compose(m3, compose(m2, m1))
    right = compose(compose(m3, m2), m1)
    assert left == right
    assert check_morphism(left).ok


@pytest.mark.parametrize("chain", [pullback_chain, mixed_chain])
def test_identity_is_neutral_for_composition(chain):
    for m in chain():
        assert compose(identity_morphism(m.target), m) == m
        assert compose(m, identity_morphism(m.source)) == m


@pytest.mark.parametrize("chain", [pullback_chain, mixed_chain])
def test_composites_are_morphisms(chain):
    m1, m2, m3 = chain()
    for m in (compose(m2, m1), compose(m3, m2), compose(m3, compose(m2, m1))):
        assert check_morphism(m).ok


def test_identity_composes_to_itself():
    i = identity_morphism(function_triad(discrete_space(2)))
    assert compose(i, i) == i


def test_composing_mismatched_morphisms_is_rejected():
    m1, m2, _ = pullback_chain()
    with pytest.raises(DimensionMismatchError):
        compose(m1, m1)


# ---------------------------------------------------------------------------
# constant morphisms


CONSTANT_GRID = []
for _target_space in (discrete_space(2), sierpinski_space()):
    for _c in range(_target_space.point_count):
        CONSTANT_GRID.append((function_triad(_target_space), _c))


def constant_sources():
    return [
        kaehler_point_triad(truncated_poly_algebra(3)),
        kaehler_presheaf(constant_presheaf(
            sierpinski_space(), truncated_poly_algebra(2))).presheaf_triad,
        function_triad(discrete_space(2)),
    ]


def test_constant_morphisms_pass_validation_on_the_grid():
    combos = 0
    for source in constant_sources():
        for target, c in CONSTANT_GRID:
            m = constant_morphism(source, target, c)
            assert check_morphism(m).ok
            combos += 1
    assert combos >= 6


def test_constant_morphism_kills_the_operator():
    # the operator square degenerates: d after the algebra component is zero
    for source in constant_sources():
        for target, c in CONSTANT_GRID:
            m = constant_morphism(source, target, c)
            for v in range(len(m.target.space.opens)):
                pre = m.preimage(v)
                assert (source.differentials[pre] @ m.algebra_components[v]).is_zero()
                assert m.module_components[v].is_zero()


def test_constant_morphism_sends_unit_to_unit():
    source = kaehler_point_triad(truncated_poly_algebra(3))
    target = function_triad(sierpinski_space())
    m = constant_morphism(source, target, 0)
    full_y = target.space.open_index(target.space.full_set)
    unit_y = target.algebras.sections[full_y].unit
    full_x = source.space.open_index(source.space.full_set)
    unit_x = source.algebras.sections[full_x].unit
    assert m.algebra_components[full_y].apply(unit_y) == unit_x


def test_constant_morphism_requires_point_evaluations():
    source = function_triad(discrete_space(2))
    target = kaehler_point_triad(truncated_poly_algebra(2))  # nilpotents inside
    with pytest.raises(NotFunctional):
        constant_morphism(source, target, 0)


def test_composing_constant_morphisms_lands_at_the_final_point():
    source = kaehler_point_triad(truncated_poly_algebra(3))
    mid = as_functional(function_triad(discrete_space(2)))
    end = as_functional(function_triad(sierpinski_space()))
    c1 = constant_morphism(source, mid, 1)
    c2 = constant_morphism(mid.triad, end, 0)
    assert compose(c2, c1) == constant_morphism(source, end, 0)


# ---------------------------------------------------------------------------
# module components are pinned on the operator image


def padded_point_triad():
    """Q[x]/(x^3) with its differential module plus one inert summand the
    operator never reaches."""
    a = truncated_poly_algebra(3)
    k = kaehler_module(a)
    dim = k.module.dim + 1
    action = []
    for i in range(a.dim):
        row = [vec(tuple(k.module.action[i][j]) + (0,)) for j in range(k.module.dim)]
        row.append(vec([0] * dim) if i else vec([0] * k.module.dim + [1]))
        action.append(tuple(row))
    padded = ModuleSections(a.dim, dim, tuple(action))
    d = Matrix.from_rows([list(k.differential.row(r)) for r in range(k.module.dim)]
                         + [[0] * a.dim], cols=a.dim)
    return constant_triad(POINT, a, padded, d)


def _endo_with_module_matrix(t, fo):
    base = identity_morphism(t)
    mods = tuple(fo if t.space.opens[v] else base.module_components[v]
                 for v in range(len(t.space.opens)))
    return TriadMorphism(base.map, t, t, base.algebra_components, mods)


def test_equal_morphisms_trivially_agree_on_image():
    t = kaehler_point_triad(truncated_poly_algebra(3))
    m = identity_morphism(t)
    report = differential_agreement_on_image(m, m)
    assert report.ok and not report.findings


def test_difference_outside_the_image_is_reported_but_not_an_error():
    t = padded_point_triad()
    m1 = identity_morphism(t)
    m2 = _endo_with_module_matrix(t, Matrix.from_rows(
        [[1, 0, 0], [0, 1, 0], [0, 0, 2]], cols=3))
    assert check_morphism(m2).ok  # scaling the inert summand is legal
    report = differential_agreement_on_image(m1, m2)
    assert report.ok
    assert any(f.message == "agree on image, differ globally"
               for f in report.findings)


def test_difference_inside_the_image_is_an_error():
    t = padded_point_triad()
    m1 = identity_morphism(t)
    m2 = _endo_with_module_matrix(t, Matrix.from_rows(
        [[2, 0, 0], [0, 1, 0], [0, 0, 1]], cols=3))
    report = differential_agreement_on_image(m1, m2)
    assert not report.ok
    assert any("disagree on the operator image" in f.message
               for f in report.errors())


def test_agreement_requires_equal_algebra_components():
    t = kaehler_point_triad(truncated_poly_algebra(3))
    report = differential_agreement_on_image(order_three_endomorphism(1, 0),
                                             order_three_endomorphism(2, 0))
    assert not report.ok
    assert any("algebra components differ" in f.message for f in report.errors())


# ---------------------------------------------------------------------------
# algebra components are pinned by module components


def test_endomorphism_grid_never_shares_a_module_component():
    # over Q[x]/(x^3) the operator image is the whole module, so the module
    # component remembers both parameters of the algebra component
    grid = {}
    for a, b in itertools.product(range(-2, 3), repeat=2):
        m = order_three_endomorphism(a, b)
        assert check_morphism(m).ok
        key = tuple(tuple(row) for row in m.module_components[1].entries)
        grid.setdefault(key, []).append(m.algebra_components[1])
    assert len(grid) == 25
    for mats in grid.values():
        assert len(mats) == 1


def test_uniqueness_report_passes_on_equal_module_components():
    t = kaehler_point_triad(truncated_poly_algebra(3))
    assert constants_only_kernel(t)
    for a, b in [(1, 0), (2, -1), (0, 3)]:
        m = order_three_endomorphism(a, b)
        report = algebra_component_uniqueness(m, m)
        assert report.ok and report.status == "pass"


def test_uniqueness_detects_a_constant_shift():
    # doctor one algebra component by a constant: the executable argument
    # walks difference -> killed by operator -> constant -> nonzero
    m1 = order_three_endomorphism(1, 0)
    shifted = Matrix.from_columns(
        [vec([1, 0, 0]), vec([1, 1, 0]), vec([0, 0, 1])], rows=3)
    alg = list(m1.algebra_components)
    alg[1] = shifted
    m2 = TriadMorphism(m1.map, m1.source, m1.target, tuple(alg),
                       m1.module_components)
    assert not check_morphism(m2).ok  # the shift is not multiplicative
    report = algebra_component_uniqueness(m1, m2)
    assert not report.ok
    assert any("nonzero constant" in f.message for f in report.errors())


def test_uniqueness_hypothesis_not_met_is_exploratory():
    t = function_triad(discrete_space(2))  # zero operator: kernel is everything
    m = identity_morphism(t)
    report = algebra_component_uniqueness(m, m)
    assert report.status == "exploratory"
    assert any("hypothesis not met" in f.message for f in report.findings)


def test_two_characters_in_the_target_defeat_uniqueness():
    # an abstract Q^2 over one point admits two evaluation-like maps into the
    # source; both ride the identity with zero module components, so the
    # module layer cannot tell them apart and the report says so
    source = kaehler_point_triad(truncated_poly_algebra(3))
    assert constants_only_kernel(source)
    target = constant_triad(POINT, function_algebra(2), zero_module_sections(2),
                            Matrix.zeros(0, 2))
    f = ContinuousMap(POINT, POINT, (0,))
    morphisms = []
    for picked in (0, 1):
        # indicator at the picked coordinate becomes the unit, the other dies
        fa = Matrix.from_columns(
            [vec([1, 0, 0]) if j == picked else vec([0, 0, 0])
             for j in range(2)], rows=3)
        alg, mod = [], []
        for v, vset in enumerate(POINT.opens):
            if vset:
                alg.append(fa)
                mod.append(Matrix.zeros(2, 0))
            else:
                alg.append(Matrix.zeros(0, 0))
                mod.append(Matrix.zeros(0, 0))
        morphisms.append(TriadMorphism(f, source, target, tuple(alg), tuple(mod)))
    m1, m2 = morphisms
    assert check_morphism(m1).ok and check_morphism(m2).ok
    assert m1.module_components == m2.module_components
    assert m1.algebra_components != m2.algebra_components
    report = algebra_component_uniqueness(m1, m2)
    assert not report.ok
    assert any("nonzero constant" in f.message for f in report.errors())


# ---------------------------------------------------------------------------
# evaluation characters


def test_discrete_stalks_have_a_unique_evaluation_character():
    ft = as_functional(function_triad(discrete_space(3)))
    for x in range(3):
        chi = evaluation_character(ft, x)
        assert chi.algebra.dim == 1
        assert [c.functional for c in characters(chi.algebra)] == [chi.functional]


def test_closed_point_evaluation_picks_the_second_coordinate():
    ft = as_functional(function_triad(sierpinski_space()))
    chi = evaluation_character(ft, 1)
    assert chi.algebra.dim == 2
    assert chi.functional == vec([0, 1])
    # the stalk itself carries two characters; evaluation selects one of them
    assert len(characters(chi.algebra)) == 2


def test_evaluation_sends_the_unit_to_one():
    for space in (discrete_space(2), sierpinski_space()):
        ft = as_functional(function_triad(space))
        for x in range(space.point_count):
            chi = evaluation_character(ft, x)
            assert chi(chi.algebra.unit) == 1


# ---------------------------------------------------------------------------
# recovering the point map


def test_pullback_family_is_the_only_family_small_discrete():
    for nx in (1, 2, 3):
        for ny in (1, 2, 3):
            x, y = discrete_space(nx), discrete_space(ny)
            for values in all_maps(x, y):
                f = ContinuousMap(x, y, values)
                fams = enumerate_presheaf_morphisms(f)
                assert len(fams) == 1
                pm = pullback_morphism(f)
                assert fams[0].components == pm.algebra_components
                assert verify_pullback_forced(f, fams[0]).status == "pass"


def test_recovery_rejects_the_wrong_pullback():
    x = y = discrete_space(2)
    f = ContinuousMap(x, y, (1, 0))
    g = ContinuousMap(x, y, (0, 1))
    wrong = PresheafMorphism(function_presheaf(y),
                             pushforward(f, function_presheaf(x)),
                             pullback_morphism(g).algebra_components)
    report = verify_pullback_forced(f, wrong)
    assert not report.ok


def test_recovery_on_non_discrete_spaces_is_exploratory():
    s = sierpinski_space()
    f = ContinuousMap(s, s, (0, 1))
    fams = enumerate_presheaf_morphisms(f)
    report = verify_pullback_forced(f, fams[0])
    assert report.exploratory
    assert report.status in ("exploratory", "fail")


# ---------------------------------------------------------------------------
# fullness counts


@pytest.mark.parametrize("nx,ny,count", [
    (1, 2, 2), (2, 2, 4), (2, 3, 9), (3, 2, 8), (2, 1, 1), (1, 1, 1),
])
def test_fullness_counts_match_point_maps(nx, ny, count):
    result = fullness_check(discrete_space(nx), discrete_space(ny))
    assert isinstance(result, FullnessResult)
    assert result.report.ok and result.report.status == "pass"
    assert result.total == count
    assert all(n == 1 for _, n in result.per_map)


def test_fullness_bound_guard():
    with pytest.raises(BoundExceeded):
        fullness_check(discrete_space(3), discrete_space(3), bound=26)
    assert fullness_check(discrete_space(3), discrete_space(3)).total == 27


def test_fullness_over_sierpinski_is_exploratory_and_inflated():
    # off the discrete world extra component families appear; frozen counts
    # document the phenomenon rather than assert a theorem
    s = sierpinski_space()
    result = fullness_check(s, s)
    assert result.report.status == "exploratory"
    assert result.total == 7
    assert dict((tuple(v), n) for v, n in result.per_map) == {
        (0, 0): 1, (0, 1): 2, (1, 1): 4}
