"""Bundle descriptors, twisting, Whitney sums, the splitting-principle oracle."""

import random

import pytest

from cptower import (
    BundleDescriptor,
    BundleError,
    Poly,
    Stage,
    TowerSpec,
    dual_complement_of_tautological,
    normalize_c1,
    presentation,
    projectivize,
    splitting_oracle_tensor,
    tensor_line,
    whitney_sum_of_lines,
)
from conftest import cp, cp_spec, hirzebruch


def x_poly(coeff=1, power=1):
    return Poly(1, {(power,): coeff})


def rank2(base, c1, c2, alpha=None):
    return BundleDescriptor(base=base, rank=2, chern=(c1, c2), alpha=alpha)


# -- descriptor validation --------------------------------------------------


def test_chern_classes_are_stored_reduced():
    xi = rank2(cp(1), x_poly(3), Poly(1, {(2,): 5}))
    # x^2 = 0 over CP^1
    assert xi.chern == (x_poly(3), Poly.zero(1))
    assert xi.c1 == x_poly(3)


@pytest.mark.parametrize(
    "kwargs, message",
    [
        (dict(rank=0, chern=()), "rank must be positive"),
        (dict(rank=2, chern=(Poly.zero(1),)), "rank 2 bundle needs 2 chern"),
        (dict(rank=1, chern=(Poly.zero(2),)), "chern class 1 has 2 generators"),
        (
            dict(rank=1, chern=(Poly(1, {(2,): 1}),)),
            "chern class 1 must be homogeneous of cohomological degree 2",
        ),
    ],
)
def test_descriptor_validation(kwargs, message):
    with pytest.raises(BundleError, match=message):
        BundleDescriptor(base=cp(2), **kwargs)


def test_alpha_tag_rules():
    even = rank2(cp(3), x_poly(2), Poly(1, {(2,): 1}), alpha=1)
    assert even.alpha == 1
    assert rank2(cp(3), x_poly(1), Poly(1, {(2,): 1}), alpha=0).alpha == 0
    with pytest.raises(BundleError, match="alpha is forced to 0 when c1 is odd"):
        rank2(cp(3), x_poly(1), Poly(1, {(2,): 1}), alpha=1)
    with pytest.raises(BundleError, match="alpha must be 0 or 1"):
        rank2(cp(3), x_poly(2), Poly(1, {(2,): 1}), alpha=2)
    with pytest.raises(BundleError, match="only applies over CP\\^3"):
        rank2(cp(2), x_poly(2), Poly(1, {(2,): 1}), alpha=0)
    with pytest.raises(BundleError, match="only applies to rank-2"):
        BundleDescriptor(
            base=cp(3),
            rank=3,
            chern=(Poly.zero(1), Poly.zero(1), Poly.zero(1)),
            alpha=0,
        )


def test_descriptor_json():
    xi = rank2(cp(3), x_poly(2), Poly(1, {(2,): 7}), alpha=1)
    assert xi.to_json() == {
        "rank": "2",
        "chern": [
            [{"coeff": "2", "exps": ["1"]}],
            [{"coeff": "7", "exps": ["2"]}],
        ],
        "alpha": "1",
    }
    assert rank2(cp(2), x_poly(1), Poly.zero(1)).to_json()["alpha"] is None


# -- tensor_line ------------------------------------------------------------


def test_tensor_fixture_over_cp2():
    # c1 = 3x, c2 = 5x^2, twist by -x: c1 -> x, c2 -> 5 + 1 - 3 = 3 times x^2
    xi = rank2(cp(2), x_poly(3), Poly(1, {(2,): 5}))
    tw = tensor_line(xi, x_poly(-1))
    assert tw.chern == (x_poly(1), Poly(1, {(2,): 3}))


def test_tensor_by_trivial_line_is_identity():
    xi = rank2(cp(2), x_poly(3), Poly(1, {(2,): 5}), alpha=None)
    assert tensor_line(xi, Poly.zero(1)).chern == xi.chern


def test_tensor_rides_alpha_along():
    xi = rank2(cp(3), x_poly(2), Poly(1, {(2,): 1}), alpha=1)
    assert tensor_line(xi, x_poly(2)).alpha == 1


def test_tensor_validation():
    xi = rank2(cp(2), x_poly(1), Poly.zero(1))
    with pytest.raises(BundleError, match="rank-2"):
        tensor_line(
            BundleDescriptor(base=cp(2), rank=1, chern=(x_poly(1),)), x_poly(1)
        )
    with pytest.raises(BundleError, match="homogeneous of degree 2"):
        tensor_line(xi, Poly(1, {(2,): 1}))


def test_tensor_composes_additively():
    h1 = hirzebruch(1)
    c1 = Poly(2, {(1, 0): 2, (0, 1): -1})
    c2 = Poly(2, {(1, 1): 3})
    t = Poly(2, {(1, 0): 1})
    s = Poly(2, {(0, 1): -2})
    xi = rank2(h1, c1, c2)
    assert tensor_line(tensor_line(xi, t), s).chern == tensor_line(xi, t + s).chern
    assert tensor_line(tensor_line(xi, t), -1 * t).chern == xi.chern


def test_splitting_oracle_closed_forms():
    c1, c2 = splitting_oracle_tensor()
    # in the (e1, e2, s) slots: c1' = e1 + 2s, c2' = e2 + e1 s + s^2
    assert c1 == Poly(3, {(1, 0, 0): 1, (0, 0, 1): 2})
    assert c2 == Poly(3, {(0, 1, 0): 1, (1, 0, 1): 1, (0, 0, 2): 1})


def test_tensor_matches_oracle_on_random_descriptors():
    oc1, oc2 = splitting_oracle_tensor()
    rng = random.Random(12)
    bases = [cp(1), cp(2), hirzebruch(0), hirzebruch(1)]
    for _ in range(200):
        base = rng.choice(bases)
        g = base.ngens

        def rand_hom(w):
            total = Poly.zero(g)
            for mono in base.graded_basis(2 * w):
                total = total + Poly.monomial(g, mono, rng.randint(-6, 6))
            return total

        c1, c2, t = rand_hom(1), rand_hom(2), rand_hom(1)
        tw = tensor_line(rank2(base, c1, c2), t)
        assert tw.chern[0] == base.normal_form(oc1.substitute((c1, c2, t)))
        assert tw.chern[1] == base.normal_form(oc2.substitute((c1, c2, t)))


# -- whitney_sum_of_lines ---------------------------------------------------


def test_whitney_sum_fixture_over_cp1():
    desc = whitney_sum_of_lines(cp(1), [x_poly(1), Poly.zero(1), Poly.zero(1)])
    assert desc.rank == 3
    assert desc.chern == (x_poly(1), Poly.zero(1), Poly.zero(1))


def test_whitney_sum_matches_product_expansion():
    h0 = hirzebruch(0)
    x = Poly(2, {(1, 0): 1})
    y = Poly(2, {(0, 1): 1})
    lines = [x, y, x + y]
    desc = whitney_sum_of_lines(h0, lines)
    # elementary symmetric functions of the roots, reduced
    one = Poly.constant(2, 1)
    total = one
    for r in lines:
        total = total * (one + r)
    for i, c in enumerate(desc.chern, start=1):
        graded = Poly(2, {m: v for m, v in total.terms.items() if sum(m) == i})
        assert c == h0.normal_form(graded)


def test_whitney_sum_validation():
    with pytest.raises(BundleError, match="empty list"):
        whitney_sum_of_lines(cp(1), [])
    with pytest.raises(BundleError, match="line class 2 must be homogeneous"):
        whitney_sum_of_lines(cp(2), [x_poly(1), Poly(1, {(2,): 1})])


# -- normalize_c1 -----------------------------------------------------------


def test_normalize_fixture():
    xi = rank2(cp(2), x_poly(3), Poly(1, {(2,): 5}))
    norm, twist = normalize_c1(xi)
    assert twist == x_poly(-1)
    assert norm.chern == (x_poly(1), Poly(1, {(2,): 3}))


def test_normalize_even_c1_lands_on_zero():
    xi = rank2(cp(2), x_poly(4), Poly(1, {(2,): 1}))
    norm, twist = normalize_c1(xi)
    assert twist == x_poly(-2)
    assert norm.c1.is_zero()


def test_normalize_coordinates_land_in_01():
    h1 = hirzebruch(1)
    for sx in range(-4, 5):
        for sy in range(-4, 5):
            c1 = Poly(2, {(1, 0): sx, (0, 1): sy})
            norm, twist = normalize_c1(rank2(h1, c1, Poly.zero(2)))
            coords = {norm.c1.coefficient((1, 0)), norm.c1.coefficient((0, 1))}
            assert coords <= {0, 1}
            # untwisting returns the original bundle
            back = tensor_line(norm, -1 * twist)
            assert back.chern == rank2(h1, c1, Poly.zero(2)).chern


def test_normalize_validation():
    with pytest.raises(BundleError, match="rank-2"):
        normalize_c1(BundleDescriptor(base=cp(1), rank=1, chern=(x_poly(2),)))


# -- milnor hypersurfaces ---------------------------------------------------


def test_milnor_1_2_presentation():
    pres = presentation(dual_complement_of_tautological(1, 2))
    assert pres.relations[0] == Poly(2, {(2, 0): 1})
    assert pres.relations[1] == Poly(2, {(0, 2): 1, (1, 1): 1})


def test_milnor_2_2_presentation():
    pres = presentation(dual_complement_of_tautological(2, 2))
    assert pres.relations[0] == Poly(2, {(3, 0): 1})
    assert pres.relations[1] == Poly(2, {(0, 2): 1, (1, 1): 1, (2, 0): 1})


def test_milnor_truncates_chern_at_base_dimension():
    spec = dual_complement_of_tautological(1, 3)
    # over CP^1 only c_1 survives; c_2, c_3 reduce to zero
    assert spec.stages[1].chern[0] == x_poly(1)
    assert spec.stages[1].chern[1].is_zero()
    assert spec.stages[1].chern[2].is_zero()


@pytest.mark.parametrize(
    "i, j, message",
    [
        (0, 2, "base exponent must be at least 1"),
        (3, 2, "need i <= j"),
        (1, 1, "degenerate"),
    ],
)
def test_milnor_validation(i, j, message):
    with pytest.raises(BundleError, match=message):
        dual_complement_of_tautological(i, j)


# -- projectivize -----------------------------------------------------------


def test_projectivize_builds_the_expected_stage():
    base_spec = cp_spec(2)
    base = presentation(base_spec)
    xi = rank2(base, Poly.zero(1), Poly(1, {(2,): 2}))
    spec = projectivize(base_spec, xi)
    assert spec.ngens == 2
    pres = presentation(spec)
    assert pres.relations[1] == Poly(2, {(0, 2): 1, (2, 0): 2})


def test_projectivize_validation():
    base_spec = cp_spec(2)
    other = rank2(cp(1), x_poly(1), Poly.zero(1))
    with pytest.raises(BundleError, match="not defined over the given base"):
        projectivize(base_spec, other)
    line = BundleDescriptor(base=presentation(base_spec), rank=1, chern=(Poly.zero(1),))
    with pytest.raises(BundleError, match="point fiber"):
        projectivize(base_spec, line)


# -- JSON -------------------------------------------------------------------


def test_bundle_json_round_trip():
    from cptower.chern import bundle_from_json

    xi = rank2(cp(3), x_poly(2), Poly(1, {(2,): 7}), alpha=1)
    assert bundle_from_json(cp(3), xi.to_json()) == xi
    plain = rank2(cp(2), x_poly(1), Poly.zero(1))
    assert bundle_from_json(cp(2), plain.to_json()) == plain


@pytest.mark.parametrize(
    "data, message",
    [
        ([], "must be an object"),
        ({"rank": "2", "chern": [], "zz": 1}, "unknown keys"),
        ({"rank": "2"}, "needs 'rank' and 'chern'"),
        ({"rank": "x", "chern": []}, "rank must be an integer"),
        ({"rank": "1", "chern": {}}, "chern must be a list"),
    ],
)
def test_bundle_from_json_rejects(data, message):
    from cptower.chern import bundle_from_json

    with pytest.raises(BundleError, match=message):
        bundle_from_json(cp(2), data)
