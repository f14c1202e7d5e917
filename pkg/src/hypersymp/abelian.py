"""Abelian complex product structures.

For a complex product structure {J, E} on a Lie algebra g with
E-eigenspaces g_+ and g_-, four conditions are equivalent:

    (i)   [Jx, Jy] = [x, y]                       (J abelian)
    (ii)  g_+ and g_- are abelian subalgebras
    (iii) df vanishes on g_+ ^ g_+ and g_- ^ g_- for f in A_+ and A_-,
          where A_+- are the annihilators and (df)(x ^ y) = -f([x, y])
    (iv)  [Ex, Ey] = -[x, y]                      (E abelian)

Each is evaluated independently here.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import linalg as la
from .algebra_core import PASS, Check, Connection
from .double_lie import LieAlgebra, jacobi_check
from .errors import InputError, InternalError
from .geometry import Endomorphism, integrability_check


def _twisted_bracket_check(L: LieAlgebra, S: Endomorphism, sign: int) -> Check:
    d = L.dim
    cols = la.transpose(S.matrix)
    for i in range(d):
        for j in range(i + 1, d):
            if L(cols[i], cols[j]) != la.vec_scale(sign, L.product(i, j)):
                return Check.failed(i, j)
    return PASS


def abelian_J(L: LieAlgebra, J: Endomorphism) -> Check:
    """[J b_i, J b_j] == [b_i, b_j]."""
    return _twisted_bracket_check(L, J, 1)


def abelian_E(L: LieAlgebra, E: Endomorphism) -> Check:
    """[E b_i, E b_j] == -[b_i, b_j]."""
    return _twisted_bracket_check(L, E, -1)


def eigenspaces(E: Endomorphism) -> tuple[la.Matrix, la.Matrix]:
    """Bases of ker(E - 1) and ker(E + 1)."""
    d = E.dim
    ident = la.identity(d)
    plus = la.nullspace(la.mat_sub(E.matrix, ident), d)
    minus = la.nullspace(la.mat_add(E.matrix, ident), d)
    return plus, minus


def subalgebras_abelian(L: LieAlgebra, E: Endomorphism) -> Check:
    """g_+ and g_- are abelian; witness (sign, i, j) on eigenspace basis indices.

    A bracket leaving its eigenspace is reported the same way: then E is
    not integrable, and the subspace is not an abelian subalgebra either.
    """
    for sign, basis in zip("+-", eigenspaces(E)):
        for i in range(len(basis)):
            for j in range(i + 1, len(basis)):
                if not la.is_zero(L(basis[i], basis[j])):
                    return Check.failed(sign, i, j)
    return PASS


def annihilator(basis: la.Matrix, dim: int) -> la.Matrix:
    """Covectors vanishing on span(basis)."""
    if not basis:
        return la.identity(dim)
    return la.nullspace(basis, dim)


def differential(L: LieAlgebra, f) -> la.Matrix:
    """Antisymmetric matrix of (df)(b_i ^ b_j) = -f([b_i, b_j])."""
    d = L.dim
    return tuple(tuple(-la.dot(f, L.product(i, j)) for j in range(d)) for i in range(d))


def annihilator_condition(L: LieAlgebra, E: Endomorphism) -> Check:
    """df restricted to g_+ x g_+ and g_- x g_- vanishes for f in A_+ and A_-."""
    d = L.dim
    plus, minus = eigenspaces(E)
    for ann_name, ann in (("ann(g+)", annihilator(plus, d)), ("ann(g-)", annihilator(minus, d))):
        for idx, f in enumerate(ann):
            df = differential(L, f)
            for sub_name, sub in (("+", plus), ("-", minus)):
                for i in range(len(sub)):
                    dfu = la.mat_vec(df, sub[i])
                    for j in range(i + 1, len(sub)):
                        if la.dot(sub[j], dfu):
                            return Check.failed(ann_name, idx, sub_name, i, j)
    return PASS


def is_complex_product(L: LieAlgebra, J: Endomorphism, E: Endomorphism) -> bool:
    """J^2 = -1, E^2 = 1, JE = -EJ, both integrable, and L a Lie algebra."""
    d = L.dim
    ident = la.identity(d)
    if la.mat_mul(J.matrix, J.matrix) != la.mat_neg(ident):
        return False
    if la.mat_mul(E.matrix, E.matrix) != ident:
        return False
    if (J @ E).matrix != (-(E @ J)).matrix:
        return False
    if not jacobi_check(L):
        return False
    return bool(integrability_check(J, "complex", L)) and bool(integrability_check(E, "product", L))


@dataclass(frozen=True)
class AbelianReport:
    J_abelian: bool
    subalgebras_abelian: bool
    annihilator_condition: bool
    E_abelian: bool
    complex_product: bool

    @property
    def values(self) -> tuple[bool, bool, bool, bool]:
        return (self.J_abelian, self.subalgebras_abelian, self.annihilator_condition, self.E_abelian)

    @property
    def coincide(self) -> bool:
        return len(set(self.values)) == 1

    def to_json(self) -> dict:
        return {
            "J_abelian": self.J_abelian,
            "subalgebras_abelian": self.subalgebras_abelian,
            "annihilator_condition": self.annihilator_condition,
            "E_abelian": self.E_abelian,
            "complex_product_structure": self.complex_product,
        }


def abelian_report(L: LieAlgebra, J: Endomorphism, E: Endomorphism) -> AbelianReport:
    """Evaluate (i)-(iv); when {J, E} is a complex product structure they must agree."""
    report = AbelianReport(
        bool(abelian_J(L, J)),
        bool(subalgebras_abelian(L, E)),
        bool(annihilator_condition(L, E)),
        bool(abelian_E(L, E)),
        is_complex_product(L, J, E),
    )
    if report.complex_product and not report.coincide:
        raise InternalError(f"abelian conditions disagree on a complex product structure: {report}")
    return report


def check_left_symmetric(nabla: Connection) -> Check:
    """(x.y).z - x.(y.z) symmetric in x, y on basis triples."""
    m = nabla.dim
    for i in range(m):
        for j in range(i + 1, m):
            for k in range(m):
                lhs = la.vec_sub(nabla(nabla.product(i, j), la.unit_vector(m, k)), nabla(la.unit_vector(m, i), nabla.product(j, k)))
                rhs = la.vec_sub(nabla(nabla.product(j, i), la.unit_vector(m, k)), nabla(la.unit_vector(m, j), nabla.product(i, k)))
                if lhs != rhs:
                    return Check.failed(i, j, k)
    return PASS


def lsa_semidirect(nabla: Connection) -> LieAlgebra:
    """h x h with [(x, x'), (y, y')] = ([x, y]_h, nabla_x y' - nabla_y x').

    Here x.y = nabla_x y must be left-symmetric and [x, y]_h = x.y - y.x.
    With J(x, y) = (-y, x) and E = diag(1, -1) the result carries a complex
    product structure, abelian iff h is abelian.
    """
    check = check_left_symmetric(nabla)
    if not check:
        raise InputError(f"product is not left-symmetric (witness {check.witness})")
    m = nabla.dim
    zero = la.zero_vector(m)
    products = {}
    for i in range(m):
        for j in range(m):
            lie = la.vec_sub(nabla.product(i, j), nabla.product(j, i))
            act = nabla.product(i, j)
            products[(i, j)] = lie + zero
            products[(i, m + j)] = zero + act
            products[(m + j, i)] = zero + la.vec_neg(act)
    return LieAlgebra.from_products(2 * m, products)
