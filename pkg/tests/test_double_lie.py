import itertools
import json
import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

import closed_forms
from cases import lsa_algebras, perturbed, transport
from conftest import random_rational
from hypersymp import linalg as la
from hypersymp.algebra_core import AffineSymplecticData, Connection, SymplecticForm
from hypersymp.double_lie import (
    GroupElement,
    Subspace,
    alpha,
    basis_grid,
    beta,
    bracket_table_json,
    build_bracket,
    centre,
    centre_from_connections,
    double_group_audit,
    group_inverse,
    group_multiply,
    jacobi_check,
    left_translation_jacobian,
    lie_algebra_from_json,
    linearization_check,
    lower_central_series,
)
from hypersymp.errors import InputError
from hypersymp.families import affA_data, kodaira_connections, kodaira_data, threestep_data, threestep_matrices

e = la.unit_vector
rationals = st.fractions(min_value=-3, max_value=3, max_denominator=3)


def zero_data(m=4):
    return AffineSymplecticData(Connection.zero(m), Connection.zero(m), SymplecticForm.canonical(m))


def eq10_oracle(nab, prime, u, v):
    """Bracket of the double algebra straight from the displayed matrices.

    nab[i] is the matrix of nabla_{e_i}; nabla_x y = sum_i x_i nab[i] y.
    """
    m = len(nab)

    def conn(mats, x, y):
        out = [Fraction(0)] * m
        for i in range(m):
            for k in range(m):
                for j in range(m):
                    out[k] += Fraction(x[i]) * Fraction(mats[i][k][j]) * Fraction(y[j])
        return out

    x, xp, y, yp = u[:m], u[m:], v[:m], v[m:]
    first = [p - q for p, q in zip(conn(prime, y, xp), conn(prime, x, yp))]
    second = [p - q for p, q in zip(conn(nab, x, yp), conn(nab, y, xp))]
    return tuple(first + second)


# -- brackets ------------------------------------------------------------


def test_kodaira_n1_brackets():
    L = build_bracket(kodaira_data(1))
    table = {(b["i"], b["j"]): b["coeffs"] for b in bracket_table_json(L)["brackets"]}
    assert table == {
        (0, 4): la.format_vector(e(8, 5)),  # [e1, f1] = f2
        (2, 6): la.format_vector(la.vec_neg(e(8, 3))),  # [e3, f3] = -e4
    }


def test_zero_connections_give_abelian_algebra():
    L = build_bracket(zero_data())
    assert L.is_zero()
    assert lower_central_series(L).step == 1
    assert centre(L).rank == 8


@pytest.mark.parametrize("abc", [(0, 1, 0), (1, 2, 3), (Fraction(-1, 2), 2, Fraction(1, 3))])
def test_threestep_bracket_matches_oracle(abc):
    nab, prime = threestep_matrices(*abc)
    L = build_bracket(threestep_data(a=abc[0], b=abc[1], c=abc[2]))
    for i in range(8):
        for j in range(8):
            assert L.product(i, j) == eq10_oracle(nab, prime, e(8, i), e(8, j))


def test_bracket_labels_and_json_round_trip():
    L = build_bracket(threestep_data(a=1, b=2, c=3))
    obj = json.loads(json.dumps(bracket_table_json(L)))
    assert obj["basis"] == ["e1", "e2", "e3", "e4", "f1", "f2", "f3", "f4"]
    assert all(b["i"] < b["j"] for b in obj["brackets"])
    assert lie_algebra_from_json(obj) == L


def test_antisymmetry_enforced():
    from hypersymp.double_lie import LieAlgebra

    with pytest.raises(InputError):
        LieAlgebra.from_products(2, {(0, 1): (1, 0)})


# -- Jacobi ---------------------------------------------------------------


def test_jacobi_holds_on_families():
    assert jacobi_check(build_bracket(kodaira_data(2)))
    assert jacobi_check(build_bracket(zero_data()))


def test_jacobi_sign_flips_in_flat_table_stay_lie():
    # Every nonzero bracket of the flat family is central, so no sign flip can break Jacobi.
    L = build_bracket(kodaira_data(1))
    for i, j, v in L.nonzero_products():
        for k in range(8):
            if v[k]:
                assert jacobi_check(perturbed(L, i, j, k, -2 * v[k]))


def test_jacobi_detects_sign_flip_in_threestep_table():
    L = build_bracket(threestep_data(a=0, b=1, c=0))
    # [e1, f1] = -e2 + f1 - f3; flip the e2 coefficient
    assert L.product(0, 4)[1] == -1
    check = jacobi_check(perturbed(L, 0, 4, 1, 2))
    assert not check
    assert len(check.witness) == 3


# -- nilpotency and centre -----------------------------------------------


def test_lower_central_series_steps():
    assert lower_central_series(build_bracket(kodaira_data(1))).step == 2
    assert lower_central_series(build_bracket(threestep_data(a=0, b=1, c=0))).step == 3
    assert lower_central_series(build_bracket(threestep_data(a=1, b=2, c=2))).step == 2
    series = lower_central_series(build_bracket(threestep_data(a=0, b=1, c=0)))
    assert series.dims == [8, 3, 2]


def test_non_nilpotent_detected():
    # e1.e1 = e1 makes ad_{e1} non-nilpotent
    series = lower_central_series(lsa_algebras()[1])
    assert not series.nilpotent and series.step is None


def test_kodaira_centre():
    z = centre(build_bracket(kodaira_data(1)))
    assert z == Subspace.span([e(8, k) for k in (1, 3, 5, 7)], 8)


def test_centre_matches_connection_kernel():
    for data in (kodaira_data(2), threestep_data(a=0, b=1, c=0), threestep_data(a=2, b=-1, c=Fraction(1, 2))):
        assert centre(build_bracket(data)) == centre_from_connections(data)


def test_subspace_membership():
    s = Subspace.span([(1, 1, 0), (0, 0, 1)], 3)
    assert (2, 2, 5) in s
    assert (1, 0, 0) not in s
    assert s.rank == 2 and not s.is_zero()


# -- the group ------------------------------------------------------------


def test_identity_and_abelian_factors(rng):
    data = threestep_data(a=1, b=2, c=3)
    ident = GroupElement.identity(4)
    for _ in range(5):
        x = [random_rational(rng) for _ in range(4)]
        y = [random_rational(rng) for _ in range(4)]
        q = GroupElement(y, x)
        assert group_multiply(data, ident, q) == q
        prod = group_multiply(data, GroupElement(x, (0,) * 4), GroupElement(y, (0,) * 4))
        assert prod == GroupElement(la.vec_add(la.vector(x), la.vector(y)), (0,) * 4)
        assert group_inverse(data, GroupElement(x, (0,) * 4)) == GroupElement(la.vec_neg(la.vector(x)), (0,) * 4)
    assert group_inverse(data, ident) == ident


def test_alpha_beta_match_component_formulas(rng):
    for _ in range(20):
        a, b, c = (random_rational(rng) for _ in range(3))
        data = threestep_data(a=a, b=b, c=c)
        xp = tuple(random_rational(rng) for _ in range(4))
        y = tuple(random_rational(rng) for _ in range(4))
        assert alpha(data, xp, y) == closed_forms.alpha(a, b, c, xp, y)
        assert beta(data, xp, y) == closed_forms.beta(a, b, c, xp, y)


def test_two_sided_inverse(rng):
    data = threestep_data(a=Fraction(1, 2), b=-1, c=2)
    ident = GroupElement.identity(4)
    for _ in range(10):
        p = GroupElement.from_vector([random_rational(rng) for _ in range(8)])
        inv = group_inverse(data, p)
        assert group_multiply(data, p, inv) == ident
        assert group_multiply(data, inv, p) == ident


def test_group_element_validation():
    with pytest.raises(InputError):
        GroupElement((1, 2), (1,))
    with pytest.raises(InputError):
        GroupElement.from_vector((1, 2, 3))
    with pytest.raises(InputError):
        group_multiply(kodaira_data(1), GroupElement.identity(2), GroupElement.identity(2))


# -- Jacobian of left translation ----------------------------------------


def _translate(data, p, v):
    return group_multiply(data, p, GroupElement.from_vector(v)).as_vector()


def _difference_jacobian(data, p, q, h, central):
    v0 = q.as_vector()
    cols = []
    for j in range(8):
        step = la.vec_scale(h, e(8, j))
        hi = _translate(data, p, la.vec_add(v0, step))
        lo = _translate(data, p, la.vec_sub(v0, step)) if central else _translate(data, p, v0)
        cols.append(la.vec_scale(1 / (2 * h if central else h), la.vec_sub(hi, lo)))
    return la.transpose(tuple(cols))


def test_jacobian_at_identity_point():
    data = threestep_data(a=1, b=2, c=3)
    q = GroupElement.from_vector([1, -1, 2, 0, 3, 1, 0, -2])
    assert left_translation_jacobian(data, GroupElement.identity(4), q) == la.identity(8)


def test_jacobian_blocks_at_identity(rng):
    data = threestep_data(a=1, b=2, c=3)
    for _ in range(5):
        p = GroupElement.from_vector([random_rational(rng) for _ in range(8)])
        jac = left_translation_jacobian(data, p, GroupElement.identity(4))
        upper = la.sub_block(jac, range(4), range(4))
        assert upper == la.mat_add(la.identity(4), data.nabla_prime.right(p.x_prime))
        assert la.sub_block(jac, range(4), range(4, 8)) == la.zeros(4)
        assert la.sub_block(jac, range(4, 8), range(4, 8)) == la.identity(4)


def test_jacobian_matches_difference_quotients(rng):
    data = threestep_data(a=Fraction(1, 2), b=1, c=-1)
    h = Fraction(1, 1000)
    for _ in range(3):
        p = GroupElement.from_vector([random_rational(rng) for _ in range(8)])
        q = GroupElement.from_vector([random_rational(rng) for _ in range(8)])
        exact = left_translation_jacobian(data, p, q)
        # the map is quadratic in the moving point, so central differences are exact
        assert _difference_jacobian(data, p, q, h, central=True) == exact
        err = max(abs(x - y) for r, s in zip(_difference_jacobian(data, p, q, h, False), exact) for x, y in zip(r, s))
        err2 = max(abs(x - y) for r, s in zip(_difference_jacobian(data, p, q, h / 2, False), exact) for x, y in zip(r, s))
        assert err <= 100 * h
        if err:
            assert err2 * 2 == err  # forward difference error is exactly linear in h


# -- audit ----------------------------------------------------------------


def _samples(rng, n=20):
    return [tuple(GroupElement.from_vector([random_rational(rng) for _ in range(8)]) for _ in range(3)) for _ in range(n)]


@pytest.mark.parametrize("data", [kodaira_data(1), threestep_data(a=1, b=2, c=3)], ids=["kodaira", "threestep"])
def test_audit_random_triples(data, rng):
    report = double_group_audit(data, _samples(rng), grid=())
    assert report.ok, report.to_json()
    assert report.n_triples == 20
    assert set(report.checks) >= {"associativity", "identity", "inverse", "alpha_action", "beta_action", "alpha_compat", "beta_compat"}


def test_audit_zero_samples():
    zero = GroupElement.identity(4)
    assert double_group_audit(kodaira_data(1), [(zero, zero, zero)], grid=()).ok


def test_basis_grid_size():
    assert len(basis_grid(4)) == 24


def test_linearization():
    data = threestep_data(a=1, b=2, c=3)
    pts = [p.x for p in basis_grid(4)] + [(1, Fraction(1, 2), -3, 2)]
    assert linearization_check(data, pts)


# -- the semidirect case nabla' = 0 ---------------------------------------


def test_affA_bracket():
    nabla, _ = kodaira_connections(1)
    data = affA_data(nabla, SymplecticForm.canonical(4))
    L = build_bracket(data)
    rng = random.Random(5)
    for _ in range(10):
        u = [random_rational(rng) for _ in range(8)]
        v = [random_rational(rng) for _ in range(8)]
        a, b, c, d = u[:4], u[4:], v[:4], v[4:]
        expected = la.zero_vector(4) + la.vec_sub(nabla(a, d), nabla(c, b))
        assert L(u, v) == expected
    assert lower_central_series(L).step == 2


def test_affA_rejects_invalid():
    bad = Connection.from_products(4, {(0, 1): e(4, 0)})
    with pytest.raises(InputError):
        affA_data(bad, SymplecticForm.canonical(4))
    assert build_bracket(affA_data(Connection.zero(4), SymplecticForm.canonical(4))).is_zero()


# -- properties -----------------------------------------------------------


invertible4 = st.lists(rationals, min_size=16, max_size=16).map(
    lambda v: tuple(tuple(v[4 * i: 4 * i + 4]) for i in range(4))
)


@settings(max_examples=20, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(rationals, rationals, rationals, invertible4)
def test_structure_invariants(a, b, c, P):
    assume(la.det(P) != 0)
    data = AffineSymplecticData(*transport(threestep_data(a=a, b=b, c=c), P))
    L = build_bracket(data)
    assert jacobi_check(L)
    series = lower_central_series(L)
    assert series.nilpotent and series.step <= 3
    assert series.step == (3 if b != c else 2)
    for i, j in itertools.chain(itertools.combinations(range(4), 2), itertools.combinations(range(4, 8), 2)):
        assert la.is_zero(L.product(i, j))
    assert centre(L) == centre_from_connections(data)


@settings(max_examples=30, deadline=None)
@given(st.lists(rationals, min_size=24, max_size=24), rationals, rationals, rationals)
def test_associativity_property(vals, a, b, c):
    data = threestep_data(a=a, b=b, c=c)
    p, q, r = (GroupElement.from_vector(vals[8 * k: 8 * k + 8]) for k in range(3))
    lhs = group_multiply(data, group_multiply(data, p, q), r)
    assert lhs == group_multiply(data, p, group_multiply(data, q, r))
