"""Tower descriptions, quotient presentations, duality, determinants."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cptower import (
    DualityError,
    Poly,
    RingPresentation,
    Stage,
    TowerSpec,
    TowerSpecError,
    dense_multiplication_table,
    matrix_det,
    presentation,
    towerspec_from_json,
    towerspec_to_json,
)
from conftest import cp, cp_spec, hirzebruch, hirzebruch_spec


def eta_spec(s: int, a: int) -> TowerSpec:
    """CP^1 bundle over CP^2 with c_1 = s*X, c_2 = a*X^2."""
    return TowerSpec((
        Stage(2, (Poly.zero(0), Poly.zero(0), Poly.zero(0))),
        Stage(1, (Poly(1, {(1,): s}), Poly(1, {(2,): a}))),
    ))


def zeta_spec(s: int, r: int, a: int) -> TowerSpec:
    """CP^1 bundle over CP^1 x CP^1 with c_1 = s*X + r*Y, c_2 = a*XY."""
    return TowerSpec((
        Stage(1, (Poly.zero(0), Poly.zero(0))),
        Stage(1, (Poly.zero(1), Poly.zero(1))),
        Stage(1, (Poly(2, {(1, 0): s, (0, 1): r}), Poly(2, {(1, 1): a}))),
    ))


# -- stage / spec validation ------------------------------------------------


def test_towerspec_validation_messages():
    with pytest.raises(TowerSpecError, match="stage 1 fiber_dim must be at least 1"):
        TowerSpec((Stage(0, ()),))
    with pytest.raises(TowerSpecError, match="stage 1 expects 2 chern classes, got 1"):
        TowerSpec((Stage(1, (Poly.zero(0),)),))
    with pytest.raises(
        TowerSpecError, match="stage 1 chern entry 1 must be a polynomial in 0"
    ):
        TowerSpec((Stage(1, (Poly.zero(1), Poly.zero(1))),))
    with pytest.raises(
        TowerSpecError,
        match="stage 2 chern entry 1 must be homogeneous of cohomological degree 2",
    ):
        TowerSpec((
            Stage(1, (Poly.zero(0), Poly.zero(0))),
            Stage(1, (Poly.constant(1, 3), Poly.zero(1))),
        ))


def test_towerspec_properties():
    spec = zeta_spec(1, 1, 2)
    assert spec.ngens == 3
    assert spec.real_dimension == 6
    assert cp_spec(3).real_dimension == 6


# -- presentation construction ---------------------------------------------


def test_cp_presentation():
    pres = cp(3)
    assert pres.caps == (3,)
    assert pres.relations == (Poly(1, {(4,): 1}),)
    assert pres.poincare() == (1, 1, 1, 1)


@pytest.mark.parametrize("k", [0, 1, 2, -3])
def test_hirzebruch_presentation(k):
    pres = hirzebruch(k)
    assert pres.caps == (1, 1)
    assert pres.relations[0] == Poly(2, {(2, 0): 1})
    assert pres.relations[1] == Poly(2, {(0, 2): 1, (1, 1): k})


def test_eta_presentation():
    pres = presentation(eta_spec(0, 2))
    assert pres.caps == (2, 1)
    assert pres.relations[0] == Poly(2, {(3, 0): 1})
    assert pres.relations[1] == Poly(2, {(0, 2): 1, (2, 0): 2})


def test_zeta_presentation():
    pres = presentation(zeta_spec(1, 1, 2))
    assert pres.relations[2] == Poly(
        3, {(0, 0, 2): 1, (1, 0, 1): 1, (0, 1, 1): 1, (1, 1, 0): 2}
    )


def test_stage_chern_is_reduced_in_the_base():
    # c_1 = 3x over CP^1 is fine, but x^2 terms in c_2 must reduce away
    spec = TowerSpec((
        Stage(1, (Poly.zero(0), Poly.zero(0))),
        Stage(1, (Poly(1, {(1,): 3}), Poly(1, {(2,): 5}))),
    ))
    pres = presentation(spec)
    # x^2 = 0 in the base, so the would-be 5x^2 tail vanishes
    assert pres.relations[1] == Poly(2, {(0, 2): 1, (1, 1): 3})


def test_presentation_validation():
    x4 = Poly(1, {(4,): 1})
    with pytest.raises(ValueError, match="one relation per generator"):
        RingPresentation((3,), ())
    with pytest.raises(ValueError, match="must be >= 1"):
        RingPresentation((0,), (Poly(1, {(1,): 1}),))
    with pytest.raises(ValueError, match="full ambient ring"):
        RingPresentation((3,), (Poly(2, {(4, 0): 1}),))
    with pytest.raises(ValueError, match="monic with leading monomial x_1\\^4"):
        RingPresentation((3,), (Poly(1, {(4,): 2}),))
    with pytest.raises(ValueError, match="monic with leading monomial x_1\\^4"):
        RingPresentation((3,), (Poly(1, {(5,): 1}),))
    # a well-formed presentation also equals itself and hashes
    p1 = RingPresentation((3,), (x4,))
    p2 = RingPresentation((3,), (x4,))
    assert p1 == p2 and hash(p1) == hash(p2)


# -- normal forms -----------------------------------------------------------


def test_normal_form_fixtures():
    eta = presentation(eta_spec(0, 2))
    assert eta.normal_form(Poly(2, {(0, 2): 1})) == Poly(2, {(2, 0): -2})
    h2 = hirzebruch(2)
    x_plus_y = Poly(2, {(1, 0): 1, (0, 1): 1})
    assert h2.normal_form(x_plus_y * x_plus_y).is_zero()
    h0 = hirzebruch(0)
    assert h0.normal_form(Poly(2, {(2, 1): 1})).is_zero()


def test_normal_form_of_relations_is_zero():
    for pres in (cp(3), hirzebruch(1), presentation(zeta_spec(1, 1, 2))):
        for rel in pres.relations:
            assert pres.normal_form(rel).is_zero()


def test_normal_form_wrong_ring():
    with pytest.raises(ValueError, match="polynomial has 2 generators"):
        cp(3).normal_form(Poly.zero(2))


@settings(max_examples=50, deadline=None)
@given(
    st.dictionaries(
        st.tuples(st.integers(0, 4), st.integers(0, 4)),
        st.integers(-20, 20),
        max_size=5,
    ),
    st.dictionaries(
        st.tuples(st.integers(0, 4), st.integers(0, 4)),
        st.integers(-20, 20),
        max_size=5,
    ),
)
def test_normal_form_idempotent_and_multiplicative(ta, tb):
    pres = presentation(eta_spec(1, -2))
    a, b = Poly(2, ta), Poly(2, tb)
    na, nb = pres.normal_form(a), pres.normal_form(b)
    assert pres.normal_form(na) == na
    assert pres.normal_form(a * b) == pres.normal_form(na * nb)
    assert pres.normal_form(a + b) == na + nb


# -- graded structure -------------------------------------------------------


def test_graded_basis_fixtures():
    eta = presentation(eta_spec(0, 2))
    assert eta.graded_basis(4) == [(2, 0), (1, 1)]
    assert eta.graded_basis(0) == [(0, 0)]
    assert cp(3).graded_basis(8) == []
    assert cp(3).graded_basis(-2) == []
    assert cp(3).graded_basis(3) == []


def test_graded_basis_is_sorted_and_partitions_rank():
    pres = presentation(zeta_spec(1, 0, 2))
    seen = []
    for d in range(0, pres.top_degree + 2, 2):
        basis = pres.graded_basis(d)
        assert all(sum(m) == d // 2 for m in basis)
        seen.extend(basis)
    assert seen == pres.graded_basis_all()
    assert len(seen) == pres.rank == 8


@pytest.mark.parametrize(
    "pres_builder, expected",
    [
        (lambda: cp(3), (1, 1, 1, 1)),
        (lambda: hirzebruch(1), (1, 2, 1)),
        (lambda: presentation(eta_spec(0, 3)), (1, 2, 2, 1)),
        (lambda: presentation(zeta_spec(1, 1, 1)), (1, 3, 3, 1)),
    ],
)
def test_poincare_fixtures(pres_builder, expected):
    pres = pres_builder()
    assert pres.poincare() == expected
    assert sum(pres.poincare()) == pres.rank


def test_poincare_is_palindromic_product_of_blocks():
    pres = presentation(zeta_spec(1, 1, 2))
    betti = pres.poincare()
    assert betti == tuple(reversed(betti))
    # independent recomputation from the factorization
    poly = [1]
    for cap in pres.caps:
        block = [1] * (cap + 1)
        poly = [
            sum(poly[i] * block[d - i] for i in range(len(poly)) if 0 <= d - i <= cap)
            for d in range(len(poly) + cap)
        ]
    assert betti == tuple(poly)


def test_top_monomial_and_degree():
    pres = presentation(eta_spec(0, 2))
    assert pres.top_monomial() == (2, 1)
    assert pres.top_degree == 6


# -- duality ----------------------------------------------------------------


def test_top_pairing_fixtures():
    assert hirzebruch(0).top_pairing_matrix(2) == [[0, 1], [1, 0]]
    assert hirzebruch(1).top_pairing_matrix(2) == [[0, 1], [1, -1]]
    assert cp(3).top_pairing_matrix(2) == [[1]]
    assert cp(3).top_pairing_matrix(0) == [[1]]


def test_top_pairing_unimodular_across_degrees():
    pres = presentation(zeta_spec(1, 1, 2))
    for d in range(0, pres.top_degree + 2, 2):
        m = pres.top_pairing_matrix(d)
        assert abs(matrix_det(m)) == 1


def test_top_pairing_odd_degree_is_empty():
    assert cp(3).top_pairing_matrix(3) == []


def test_relation_tails_stay_below_the_leading_monomial():
    # the monomial order makes any tail mentioning a later generator larger
    # than the leading power, so such relations are rejected as non-monic
    with pytest.raises(ValueError, match="monic with leading monomial x_1\\^2"):
        RingPresentation(
            (1, 1),
            (Poly(2, {(2, 0): 1, (1, 1): 1}), Poly(2, {(0, 2): 1})),
        )


def test_duality_guard_branches(monkeypatch):
    """Legal presentations always pass the pairing guard (the relations are
    tower-triangular), so exercise both DualityError branches by lying about
    a graded basis."""
    pres = presentation(eta_spec(0, 2))
    real = RingPresentation.graded_basis

    def drop_one(self, degree):
        basis = real(self, degree)
        return basis[:-1] if degree == 4 else basis

    monkeypatch.setattr(RingPresentation, "graded_basis", drop_one)
    with pytest.raises(DualityError, match="not square"):
        pres.top_pairing_matrix(2)

    def duplicate(self, degree):
        basis = real(self, degree)
        return [basis[0], basis[0]] if degree == 4 else basis

    monkeypatch.setattr(RingPresentation, "graded_basis", duplicate)
    with pytest.raises(DualityError, match="determinant"):
        pres.top_pairing_matrix(2)


# -- independent dense oracle ----------------------------------------------


def test_dense_table_agrees_with_normal_form():
    """The smallest-first unmemoized reducer and the memoized
    highest-generator-first reducer must give the same structure constants."""
    pres = presentation(zeta_spec(1, 1, 2))
    basis = pres.graded_basis_all()
    index = {m: i for i, m in enumerate(basis)}
    table = dense_multiplication_table(pres)
    for i, bi in enumerate(basis):
        for j, bj in enumerate(basis):
            prod = Poly.monomial(pres.ngens, bi) * Poly.monomial(pres.ngens, bj)
            nf = pres.normal_form(prod)
            vec = [0] * len(basis)
            for mono, coeff in nf.terms.items():
                vec[index[mono]] = coeff
            assert table[(i, j)] == tuple(vec)


def test_dense_table_on_hirzebruch():
    pres = hirzebruch(1)
    table = dense_multiplication_table(pres)
    basis = pres.graded_basis_all()
    assert basis == [(0, 0), (1, 0), (0, 1), (1, 1)]
    # x * y = xy, y * y = -xy
    assert table[(1, 2)] == (0, 0, 0, 1)
    assert table[(2, 2)] == (0, 0, 0, -1)


# -- determinants -----------------------------------------------------------


def test_matrix_det_fixtures():
    assert matrix_det([]) == 1
    assert matrix_det([[5]]) == 5
    assert matrix_det([[1, 2], [3, 4]]) == -2
    assert matrix_det([[2, 0, 1], [1, 1, 0], [0, 3, 1]]) == 5
    assert matrix_det([[0, 1], [1, 0]]) == -1
    assert matrix_det([[0, 0], [0, 0]]) == 0
    with pytest.raises(ValueError, match="non-square"):
        matrix_det([[1, 2]])


@settings(max_examples=80, deadline=None)
@given(st.lists(st.lists(st.integers(-5, 5), min_size=3, max_size=3), min_size=3, max_size=3))
def test_matrix_det_matches_permutation_expansion(rows):
    expected = 0
    for perm in itertools.permutations(range(3)):
        sign = 1
        for i in range(3):
            for j in range(i + 1, 3):
                if perm[i] > perm[j]:
                    sign = -sign
        term = sign
        for i in range(3):
            term *= rows[i][perm[i]]
        expected += term
    assert matrix_det(rows) == expected


# -- JSON -------------------------------------------------------------------


def test_towerspec_json_round_trip():
    for spec in (cp_spec(3), hirzebruch_spec(2), zeta_spec(1, 0, 2)):
        payload = towerspec_to_json(spec)
        assert towerspec_from_json(payload) == spec
        # schema tag is accepted when present
        assert towerspec_from_json({"schema": "cpt/1", **payload}) == spec


def test_towerspec_json_emits_strings():
    payload = towerspec_to_json(hirzebruch_spec(2))
    assert payload["stages"][0]["fiber_dim"] == "1"
    assert payload["stages"][1]["chern"][0] == [{"coeff": "2", "exps": ["1"]}]


@pytest.mark.parametrize(
    "data, message",
    [
        ([], "tower spec must be an object"),
        ({"stages": [], "x": 1}, "unknown keys"),
        ({"stages": [], "schema": "cpt/2"}, "unsupported schema"),
        ({"stages": []}, "non-empty 'stages'"),
        ({}, "non-empty 'stages'"),
        ({"stages": [3]}, "stage 1 must be an object"),
        ({"stages": [{"fiber_dim": "1", "chern": [[], []], "x": 0}]}, "stage 1: unknown keys"),
        ({"stages": [{"chern": []}]}, "stage 1: missing fiber_dim"),
        ({"stages": [{"fiber_dim": "one"}]}, "stage 1: fiber_dim must be an integer"),
        ({"stages": [{"fiber_dim": "1", "chern": {}}]}, "stage 1: chern must be a list"),
        (
            {"stages": [{"fiber_dim": "1", "chern": [[{"coeff": "0", "exps": []}], []]}]},
            "stage 1 chern entry 1: term 1: zero coefficient",
        ),
    ],
)
def test_towerspec_from_json_rejects(data, message):
    with pytest.raises(TowerSpecError, match=message):
        towerspec_from_json(data)


def test_towerspec_from_json_forward_reference():
    # stage 2's chern classes may only mention generator 1
    data = {
        "stages": [
            {"fiber_dim": "1", "chern": [[], []]},
            {"fiber_dim": "1", "chern": [[], []]},
            {
                "fiber_dim": "1",
                "chern": [
                    [{"coeff": "1", "exps": ["0", "0", "1"]}],
                    [],
                ],
            },
        ]
    }
    with pytest.raises(TowerSpecError, match="stage 3 chern references generator 3"):
        towerspec_from_json(data)


def test_towerspec_from_json_pads_narrow_exponents():
    # a 1-exponent monomial in stage 3 means generator 1; widths are padded
    data = {
        "stages": [
            {"fiber_dim": "1", "chern": [[], []]},
            {"fiber_dim": "1", "chern": [[], []]},
            {
                "fiber_dim": "1",
                "chern": [
                    [{"coeff": "1", "exps": ["1"]}],
                    [],
                ],
            },
        ]
    }
    spec = towerspec_from_json(data)
    assert spec.stages[2].chern[0] == Poly(2, {(1, 0): 1})
